//! Published enrollment fixtures and an independent dual-problem oracle.
#![allow(dead_code)]

use fuzzy_forecast::svr::Kernel;

pub const CENTERS: [f64; 7] = [
    13573.95, 15130.14, 15448.22, 15885.33, 16825.08, 18190.36, 19125.23,
];

pub const INTERVALS: [(f64, f64); 7] = [
    (13047.0, 14352.045),
    (14352.045, 15289.18),
    (15289.18, 15666.775),
    (15666.775, 16355.205),
    (16355.205, 17507.72),
    (17507.72, 18657.795),
    (18657.795, 19345.0),
];

/// Input features `(interval index, membership)` of the observations
/// 1971..=1991, i.e. the rows forecasting 1972..=1992.
pub const FEATURES: [(usize, f64); 21] = [
    (1, 0.00613),
    (1, 0.39538),
    (1, 0.62833),
    (2, 0.36702),
    (3, 0.45238),
    (3, 0.05778),
    (3, 0.83110),
    (4, 0.28212),
    (5, 0.39200),
    (5, 0.48918),
    (5, 0.02845),
    (3, 0.38088),
    (3, 0.55037),
    (2, 0.84614),
    (2, 0.86535),
    (4, 0.46079),
    (5, 0.43712),
    (6, 0.55846),
    (7, 0.45431),
    (7, 0.97526),
    (7, 0.98835),
];

pub const TARGETS: [f64; 21] = [
    0.08086, 0.12925, 0.26122, 0.38283, 0.35912, 0.40560, 0.44667, 0.59726, 0.61509, 0.530560,
    0.37854, 0.38872, 0.33269, 0.33556, 0.46625, 0.60553, 0.81104, 0.94157, 0.99856, 1.0, 0.92661,
];

/// Forecast column of the SVR variant, target years 1972..=1992.
pub const SVM_FORECASTS: [f64; 21] = [
    14060.40, 14497.26, 14758.83, 15017.41, 15665.24, 15222.17, 16090.48, 16026.05, 16701.41,
    16810.53, 16293.21, 15584.96, 15775.27, 15555.38, 15576.95, 16226.67, 16752.08, 17440.31,
    17875.35, 18460.41, 18474.99,
];

/// Actual enrollments for target years 1972..=1992.
pub const ACTUALS: [f64; 21] = [
    13563.0, 13867.0, 14696.0, 15460.0, 15311.0, 15603.0, 15861.0, 16807.0, 16919.0, 16388.0,
    15433.0, 15497.0, 15145.0, 15163.0, 15984.0, 16859.0, 18150.0, 18970.0, 19328.0, 19337.0,
    18876.0,
];

pub const TRAIN_ROWS: usize = 16;

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Small deterministic generator so fixtures do not depend on a crate RNG.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn kernel_value(kernel: &Kernel, a: &[f64], b: &[f64]) -> f64 {
    kernel.eval(a, b).unwrap()
}

/// Maximizes the unfolded dual over `(α, α*) ∈ [0, C]^{2n}` with
/// `Σ α - Σ α* = 0` by FISTA with exact projection (bisection on the
/// multiplier of the equality constraint). Returns the objective
/// `-½(α-α*)ᵀK(α-α*) - ε Σ(α+α*) + yᵀ(α-α*)`.
pub fn dual_oracle(kernel: &Kernel, xs: &[Vec<f64>], ys: &[f64], cost: f64, epsilon: f64) -> f64 {
    let n = xs.len();
    let k: Vec<Vec<f64>> = xs
        .iter()
        .map(|a| xs.iter().map(|b| kernel_value(kernel, a, b)).collect())
        .collect();
    let lipschitz = 2.0
        * k.iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
        + 1e-12;

    let objective = |z: &[f64]| {
        let beta: Vec<f64> = (0..n).map(|i| z[i] - z[n + i]).collect();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += beta[i] * beta[j] * k[i][j];
            }
        }
        let lin: f64 = (0..n)
            .map(|i| ys[i] * beta[i] - epsilon * (z[i] + z[n + i]))
            .sum();
        -0.5 * quad + lin
    };
    // ascent direction of the objective
    let gradient = |z: &[f64]| {
        let beta: Vec<f64> = (0..n).map(|i| z[i] - z[n + i]).collect();
        let kb: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| k[i][j] * beta[j]).sum())
            .collect();
        let mut g = vec![0.0; 2 * n];
        for i in 0..n {
            g[i] = -kb[i] - epsilon + ys[i];
            g[n + i] = kb[i] - epsilon - ys[i];
        }
        g
    };
    let project = |v: &[f64]| {
        let shifted = |lambda: f64| -> Vec<f64> {
            (0..2 * n)
                .map(|i| {
                    let sign = if i < n { 1.0 } else { -1.0 };
                    (v[i] - sign * lambda).clamp(0.0, cost)
                })
                .collect()
        };
        let balance = |z: &[f64]| (0..n).map(|i| z[i] - z[n + i]).sum::<f64>();
        let span = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + cost + 1.0;
        let (mut lo, mut hi) = (-span, span);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if balance(&shifted(mid)) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        shifted(0.5 * (lo + hi))
    };

    let mut z = vec![0.0; 2 * n];
    let mut y = z.clone();
    let mut t = 1.0f64;
    for _ in 0..20_000 {
        let g = gradient(&y);
        let step: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a + b / lipschitz).collect();
        let next = project(&step);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = next
            .iter()
            .zip(&z)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        z = next;
        t = t_next;
    }
    objective(&z)
}
