//! Mini-batch training against a slow full-batch subgradient reference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use style_seam::features::SparseVector;
use style_seam::model::{hinge_objective, train_with_report, LinearModel, TrainConfig};

const DIM: usize = 40;

/// 200 sparse samples labeled by a hidden linear rule with 10% label noise.
fn random_sparse_dataset(seed: u64) -> (Vec<SparseVector>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden: Vec<f64> = (0..DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for _ in 0..200 {
        let mut entries = Vec::new();
        for i in 0..DIM {
            if rng.gen_bool(0.2) {
                entries.push((i, rng.gen_range(-1.0..1.0)));
            }
        }
        let x = SparseVector { entries, dimension: DIM };
        let mut y = u8::from(x.dot_dense(&hidden) >= 0.0);
        if rng.gen_bool(0.1) {
            y ^= 1;
        }
        xs.push(x);
        ys.push(y);
    }
    (xs, ys)
}

/// Full-batch subgradient descent with step 1/sqrt(t), keeping the best iterate.
fn full_batch_reference(xs: &[SparseVector], ys: &[u8], lambda: f64, iterations: usize) -> f64 {
    let n = xs.len() as f64;
    let dense: Vec<Vec<f64>> = xs.iter().map(SparseVector::to_dense).collect();
    let mut w = vec![0.0; DIM];
    let mut b = 0.0;
    let mut best = f64::INFINITY;
    for t in 1..=iterations {
        let mut gw: Vec<f64> = w.iter().map(|wi| lambda * wi).collect();
        let mut gb = 0.0;
        for (x, &y) in dense.iter().zip(ys) {
            let y = if y == 1 { 1.0 } else { -1.0 };
            let m: f64 = x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b;
            if y * m < 1.0 {
                for (g, xi) in gw.iter_mut().zip(x) {
                    *g -= y * xi / n;
                }
                gb -= y / n;
            }
        }
        let eta = 1.0 / (t as f64).sqrt();
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= eta * g;
        }
        b -= eta * gb;
        let model = LinearModel { weights: w.clone(), bias: b, lambda };
        best = best.min(hinge_objective(&model, xs, ys));
    }
    best
}

#[test]
fn sgd_objective_close_to_full_batch_reference() {
    let (xs, ys) = random_sparse_dataset(17);
    let lambda = 0.01;
    let reference = full_batch_reference(&xs, &ys, lambda, 20_000);
    let cfg = TrainConfig {
        lambda,
        epochs: 50,
        ..TrainConfig::default()
    };
    let (_, report) = train_with_report(&xs, &ys, &cfg).unwrap();
    let got = report.final_objective();
    println!("sgd {got:.6} reference {reference:.6}");
    assert!(
        (got - reference).abs() <= 0.05 * reference,
        "sgd objective {got} vs reference {reference}"
    );
}
