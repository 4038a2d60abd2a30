//! Random instance generators shared by the integration tests.

#![allow(dead_code)]

pub mod oracle;

use nalgebra::{DMatrix, DVector};
use netmaint_core::reliability::ThresholdSampler;
use netmaint_core::{CustomerNetwork, UnitFleet};

pub struct Rng(ThresholdSampler);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ThresholdSampler::new(seed, 7))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.uniform()
    }

    /// Integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        (lo + (self.0.uniform() * (hi - lo + 1) as f64) as usize).min(hi)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.0.uniform() < p
    }
}

/// Network with `a_i` in [1, 3], `b_i(t)` in [1, 10] and a random sparse
/// `w` scaled so that every row sum and every column sum is at most
/// `slack * a_i` (strict Assumption 1 and a positive definite pricing form).
pub fn network(rng: &mut Rng, n: usize, t_count: usize, symmetric: bool, slack: f64) -> CustomerNetwork {
    let a = DVector::from_fn(n, |_, _| rng.uniform(1.0, 3.0));
    let b = DMatrix::from_fn(n, t_count, |_, _| rng.uniform(1.0, 10.0));
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for l in 0..n {
            if i != l && rng.chance(0.6) {
                w[(i, l)] = rng.uniform(0.0, 1.0);
            }
        }
    }
    if symmetric {
        w = (&w + w.transpose()) * 0.5;
    }
    let mut scale = f64::INFINITY;
    for i in 0..n {
        let worst = w.row(i).sum().max(w.column(i).sum());
        if worst > 0.0 {
            scale = scale.min(slack * a[i] / worst);
        }
    }
    if scale.is_finite() {
        w *= scale;
    }
    CustomerNetwork::new(a, b, w).expect("generated network is valid")
}

/// Fleet of `j` units with thresholds spread over [3, 12].
pub fn fleet(rng: &mut Rng, j: usize) -> UnitFleet {
    UnitFleet::new(
        (0..j).map(|_| rng.uniform(3.0, 12.0)).collect(),
        (0..j).map(|_| rng.uniform(0.0, 2.0)).collect(),
        (0..j).map(|_| rng.uniform(0.0, 5.0)).collect(),
        (0..j).map(|_| rng.uniform(0.5, 5.0)).collect(),
    )
    .expect("generated fleet is valid")
}

/// Published five-unit fleet with unit capacities of 1.
pub fn table1_fleet() -> UnitFleet {
    UnitFleet::new(
        vec![12.0, 10.0, 11.2, 9.4, 11.8],
        vec![1.4, 3.2, 2.5, 1.1, 2.1],
        vec![20.48, 21.39, 22.73, 24.78, 24.82],
        vec![1.0; 5],
    )
    .unwrap()
}

/// `(a, w, b(t))` of a network as plain vectors.
pub fn plain(net: &CustomerNetwork, t: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let n = net.n();
    let a = net.a().iter().copied().collect();
    let w = (0..n).map(|i| (0..n).map(|l| net.w()[(i, l)]).collect()).collect();
    let b = (0..n).map(|i| net.b()[(i, t)]).collect();
    (a, w, b)
}
