use super::TrainConfig;
use crate::error::{Error, Result};

/// `round(warmup_ratio * total_steps)`.
pub fn warmup_steps(total_steps: usize, warmup_ratio: f64) -> usize {
    (warmup_ratio * total_steps as f64).round() as usize
}

/// Linear warmup to `peak_learning_rate`, then linear decay to zero at `total_steps`.
///
/// During warmup the rate is `peak * (step + 1) / warmup_steps`, so step 0 is
/// never zero and the last warmup step reaches the peak. From `warmup_steps`
/// on it is `peak * (total_steps - step) / (total_steps - warmup_steps)`.
pub fn warmup_schedule(step: usize, total_steps: usize, cfg: &TrainConfig) -> Result<f64> {
    if total_steps == 0 {
        return Err(Error::Usage("total_steps must be positive".into()));
    }
    if step >= total_steps {
        return Err(Error::Usage(format!(
            "step {step} is outside the schedule of {total_steps} steps"
        )));
    }
    let peak = cfg.peak_learning_rate;
    let warmup = warmup_steps(total_steps, cfg.warmup_ratio);
    if step < warmup {
        return Ok(peak * (step + 1) as f64 / warmup as f64);
    }
    Ok(peak * (total_steps - step) as f64 / (total_steps - warmup) as f64)
}
