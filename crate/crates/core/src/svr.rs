//! Epsilon-insensitive support vector regression trained on the dual problem.
//!
//! The dual over `(α, α*)` is folded into signed coefficients
//! `β_i = α_i - α*_i ∈ [-C, C]` with `Σ β_i = 0`. At the optimum
//! `α_i α*_i = 0`, so the linear ε term becomes `-ε Σ |β_i|` and the
//! objective is
//!
//! ```text
//! D(β) = -½ βᵀKβ + yᵀβ - ε ‖β‖₁
//! ```
//!
//! The solver moves two coefficients at a time along `e_i - e_j`, which keeps
//! the equality constraint, and maximizes `D` exactly along that line.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvrError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("{inputs} inputs but {targets} targets")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    Polynomial { degree: u32, gamma: f64, coef0: f64 },
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<(), SvrError> {
        match *self {
            Kernel::Linear => Ok(()),
            Kernel::Polynomial {
                degree,
                gamma,
                coef0,
            } => {
                if degree < 1 {
                    return Err(SvrError::InvalidParameter(
                        "polynomial degree must be >= 1".into(),
                    ));
                }
                if !(gamma > 0.0 && gamma.is_finite()) || !coef0.is_finite() {
                    return Err(SvrError::InvalidParameter(format!(
                        "polynomial kernel needs gamma > 0 and finite coef0, got {gamma}, {coef0}"
                    )));
                }
                Ok(())
            }
            Kernel::Rbf { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(SvrError::InvalidParameter(format!(
                        "rbf gamma must be > 0, got {gamma}"
                    )))
                }
            }
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> Result<f64, SvrError> {
        if a.len() != b.len() {
            return Err(SvrError::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(self.eval_unchecked(a, b))
    }

    fn eval_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Polynomial {
                degree,
                gamma,
                coef0,
            } => (gamma * dot(a, b) + coef0).powi(degree as i32),
            Kernel::Rbf { gamma } => {
                let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
                (-gamma * sq).exp()
            }
        }
    }
}

impl fmt::Display for Kernel {
    /// `linear`, `polynomial <degree> <gamma> <coef0>` or `rbf <gamma>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Linear => f.write_str("linear"),
            Kernel::Polynomial {
                degree,
                gamma,
                coef0,
            } => {
                write!(f, "polynomial {degree} {gamma:.16e} {coef0:.16e}")
            }
            Kernel::Rbf { gamma } => write!(f, "rbf {gamma:.16e}"),
        }
    }
}

impl std::str::FromStr for Kernel {
    type Err = SvrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SvrError::InvalidParameter(format!("bad kernel spec `{s}`"));
        let num = |t: Option<&str>| -> Result<f64, SvrError> {
            t.ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        let mut parts = s.split_whitespace();
        let kernel = match parts.next() {
            Some("linear") => Kernel::Linear,
            Some("rbf") => Kernel::Rbf {
                gamma: num(parts.next())?,
            },
            Some("polynomial") => Kernel::Polynomial {
                degree: parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?,
                gamma: num(parts.next())?,
                coef0: num(parts.next())?,
            },
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        kernel.validate()?;
        Ok(kernel)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `1 / (n_features · var(X))` over every entry of the inputs; 1.0 when the
/// inputs have no spread.
pub fn scale_gamma(inputs: &[Vec<f64>]) -> f64 {
    let n_features = inputs.first().map_or(1, Vec::len).max(1);
    let all: Vec<f64> = inputs.iter().flatten().copied().collect();
    if all.is_empty() {
        return 1.0;
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / all.len() as f64;
    if var > 0.0 {
        1.0 / (n_features as f64 * var)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrParams {
    pub cost: f64,
    pub epsilon: f64,
    pub kernel: Kernel,
    pub kkt_tol: f64,
    /// Iteration cap is `max_passes × n` pair updates.
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self {
            cost: 1.0,
            epsilon: 0.1,
            kernel: Kernel::Linear,
            kkt_tol: 1e-3,
            max_passes: 1000,
            seed: 42,
        }
    }
}

impl SvrParams {
    fn validate(&self) -> Result<(), SvrError> {
        if !(self.cost > 0.0 && self.cost.is_finite()) {
            return Err(SvrError::InvalidParameter(format!(
                "C must be > 0, got {}",
                self.cost
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(SvrError::InvalidParameter(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.kkt_tol > 0.0) {
            return Err(SvrError::InvalidParameter(format!(
                "kkt_tol must be > 0, got {}",
                self.kkt_tol
            )));
        }
        self.kernel.validate()
    }
}

/// Coefficients below this magnitude are dropped from the stored expansion.
pub const SUPPORT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub kernel: Kernel,
    pub cost: f64,
    pub epsilon: f64,
    pub dim: usize,
    pub support_inputs: Vec<Vec<f64>>,
    /// `β_i` for each stored support input.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
}

impl SvrModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64, SvrError> {
        if x.len() != self.dim {
            return Err(SvrError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .support_inputs
            .iter()
            .zip(&self.dual_coefs)
            .map(|(s, beta)| beta * self.kernel.eval_unchecked(s, x))
            .sum::<f64>()
            + self.bias)
    }

    /// Text form: `svr v1`, kernel line, `C,epsilon,dim`, one `β,features…`
    /// line per support vector, then the bias. Numbers carry 17 significant
    /// digits.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "svr v1\n{}\n{:.16e},{:.16e},{}\n",
            self.kernel, self.cost, self.epsilon, self.dim
        );
        for (s, beta) in self.support_inputs.iter().zip(&self.dual_coefs) {
            out.push_str(&format!("{beta:.16e}"));
            for v in s {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:.16e}\n", self.bias));
        out
    }

    /// Parses the body written by [`to_text`](Self::to_text) (the lines after
    /// the `svr v1` header).
    pub fn from_text_body(lines: &[&str]) -> Result<Self, String> {
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{s}`"))
        };
        if lines.len() < 3 {
            return Err("truncated svr model".into());
        }
        let kernel: Kernel = lines[0].parse().map_err(|e: SvrError| e.to_string())?;
        let head: Vec<&str> = lines[1].split(',').collect();
        if head.len() != 3 {
            return Err(format!("bad C/epsilon line `{}`", lines[1]));
        }
        let cost = num(head[0])?;
        let epsilon = num(head[1])?;
        let dim: usize = head[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad dimension `{}`", head[2]))?;
        let (sv_lines, bias_line) = lines[2..].split_at(lines.len() - 3);
        let mut support_inputs = Vec::with_capacity(sv_lines.len());
        let mut dual_coefs = Vec::with_capacity(sv_lines.len());
        for line in sv_lines {
            let fields = line.split(',').map(num).collect::<Result<Vec<f64>, _>>()?;
            if fields.len() != dim + 1 {
                return Err(format!(
                    "support vector line has {} fields, expected {}",
                    fields.len(),
                    dim + 1
                ));
            }
            dual_coefs.push(fields[0]);
            support_inputs.push(fields[1..].to_vec());
        }
        let bias = num(bias_line[0])?;
        Ok(Self {
            kernel,
            cost,
            epsilon,
            dim,
            support_inputs,
            dual_coefs,
            bias,
        })
    }
}

/// Full solver outcome, including the dense coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrFit {
    pub model: SvrModel,
    /// `β_i` for every training row, in input order.
    pub betas: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest KKT violation `max lo - min hi` at exit.
    pub kkt_gap: f64,
    /// Dual objective after each accepted step (only when traced).
    pub objective_trace: Vec<f64>,
    /// `Σ β` after each accepted step (only when traced).
    pub sum_trace: Vec<f64>,
}

pub fn svr_train(
    inputs: &[Vec<f64>],
    targets: &[f64],
    params: &SvrParams,
) -> Result<SvrModel, SvrError> {
    Ok(Solver::new(inputs, targets, params)?.run(false).model)
}

/// Like [`svr_train`] but returns the solver state and, when `trace` is set,
/// the full objective recomputed after every step.
pub fn svr_fit(
    inputs: &[Vec<f64>],
    targets: &[f64],
    params: &SvrParams,
    trace: bool,
) -> Result<SvrFit, SvrError> {
    Ok(Solver::new(inputs, targets, params)?.run(trace))
}

/// Dual objective `-½ βᵀKβ + yᵀβ - ε‖β‖₁`.
pub fn dual_objective(
    kernel: &Kernel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    betas: &[f64],
    epsilon: f64,
) -> f64 {
    let mut quad = 0.0;
    for (i, bi) in betas.iter().enumerate() {
        for (j, bj) in betas.iter().enumerate() {
            quad += bi * bj * kernel.eval_unchecked(&inputs[i], &inputs[j]);
        }
    }
    let linear: f64 = targets.iter().zip(betas).map(|(y, b)| y * b).sum();
    let l1: f64 = betas.iter().map(|b| b.abs()).sum();
    -0.5 * quad + linear - epsilon * l1
}

struct Solver<'a> {
    inputs: &'a [Vec<f64>],
    targets: &'a [f64],
    params: &'a SvrParams,
    gram: Vec<Vec<f64>>,
    betas: Vec<f64>,
    /// `Σ_k β_k K_ik`
    fitted: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(
        inputs: &'a [Vec<f64>],
        targets: &'a [f64],
        params: &'a SvrParams,
    ) -> Result<Self, SvrError> {
        if inputs.is_empty() {
            return Err(SvrError::EmptyTrainingSet);
        }
        if inputs.len() != targets.len() {
            return Err(SvrError::LengthMismatch {
                inputs: inputs.len(),
                targets: targets.len(),
            });
        }
        let dim = inputs[0].len();
        if let Some(bad) = inputs.iter().find(|x| x.len() != dim) {
            return Err(SvrError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        params.validate()?;
        let gram = inputs
            .iter()
            .map(|a| {
                inputs
                    .iter()
                    .map(|b| params.kernel.eval_unchecked(a, b))
                    .collect()
            })
            .collect();
        let n = inputs.len();
        Ok(Self {
            inputs,
            targets,
            params,
            gram,
            betas: vec![0.0; n],
            fitted: vec![0.0; n],
        })
    }

    fn residual(&self, i: usize) -> f64 {
        self.targets[i] - self.fitted[i]
    }

    /// Interval of bias values consistent with row `i`'s optimality condition.
    fn bias_bounds(&self, i: usize) -> (f64, f64) {
        let (r, eps, c, b) = (
            self.residual(i),
            self.params.epsilon,
            self.params.cost,
            self.betas[i],
        );
        if b == 0.0 {
            (r - eps, r + eps)
        } else if b >= c {
            (f64::NEG_INFINITY, r - eps)
        } else if b <= -c {
            (r + eps, f64::INFINITY)
        } else if b > 0.0 {
            (r - eps, r - eps)
        } else {
            (r + eps, r + eps)
        }
    }

    /// Maximal violating pair `(argmax lo, argmin hi)` and its gap.
    fn worst_pair(&self) -> (usize, usize, f64, f64, f64) {
        let (mut i_best, mut lo_best) = (0, f64::NEG_INFINITY);
        let (mut j_best, mut hi_best) = (0, f64::INFINITY);
        for k in 0..self.betas.len() {
            let (lo, hi) = self.bias_bounds(k);
            if lo > lo_best {
                lo_best = lo;
                i_best = k;
            }
            if hi < hi_best {
                hi_best = hi;
                j_best = k;
            }
        }
        (i_best, j_best, lo_best - hi_best, lo_best, hi_best)
    }

    /// Gain in `D` from `β_i += t, β_j -= t`.
    fn gain(&self, i: usize, j: usize, t: f64) -> f64 {
        let (bi, bj, eps) = (self.betas[i], self.betas[j], self.params.epsilon);
        let eta = self.gram[i][i] + self.gram[j][j] - 2.0 * self.gram[i][j];
        t * (self.residual(i) - self.residual(j))
            - 0.5 * eta.max(0.0) * t * t
            - eps * ((bi + t).abs() - bi.abs() + (bj - t).abs() - bj.abs())
    }

    /// Exact maximizer of the concave piecewise quadratic gain on the
    /// feasible segment.
    fn best_step(&self, i: usize, j: usize) -> (f64, f64) {
        let (bi, bj, c, eps) = (
            self.betas[i],
            self.betas[j],
            self.params.cost,
            self.params.epsilon,
        );
        let lower = (-c - bi).max(bj - c);
        let upper = (c - bi).min(bj + c);
        if !(lower < upper) {
            return (0.0, 0.0);
        }
        let mut knots = vec![lower, upper];
        knots.extend([-bi, bj].into_iter().filter(|&k| lower < k && k < upper));
        knots.sort_by(f64::total_cmp);

        let eta = (self.gram[i][i] + self.gram[j][j] - 2.0 * self.gram[i][j]).max(0.0);
        let slope0 = self.residual(i) - self.residual(j);
        let mut candidates = knots.clone();
        for w in knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let si = (bi + mid).signum();
            let sj = (bj - mid).signum();
            let linear = slope0 - eps * si + eps * sj;
            if eta > 1e-12 {
                candidates.push((linear / eta).clamp(w[0], w[1]));
            }
        }
        candidates
            .into_iter()
            .map(|t| (t, self.gain(i, j, t)))
            .fold(
                (0.0, 0.0),
                |best, cand| if cand.1 > best.1 { cand } else { best },
            )
    }

    fn apply(&mut self, i: usize, j: usize, t: f64) {
        let c = self.params.cost;
        let snap = |v: f64| {
            let v = v.clamp(-c, c);
            if (c - v.abs()) <= 1e-12 * c {
                c.copysign(v)
            } else {
                v
            }
        };
        let new_i = snap(self.betas[i] + t);
        let new_j = snap(self.betas[j] - t);
        let (di, dj) = (new_i - self.betas[i], new_j - self.betas[j]);
        self.betas[i] = new_i;
        self.betas[j] = new_j;
        for k in 0..self.fitted.len() {
            self.fitted[k] += di * self.gram[k][i] + dj * self.gram[k][j];
        }
    }

    fn random_partner_step(&mut self, i: usize, rng: &mut ChaCha8Rng) -> Option<f64> {
        let n = self.betas.len();
        for _ in 0..n.min(16) {
            let k = rng.gen_range(0..n);
            if k == i {
                continue;
            }
            let (t, gained) = self.best_step(i, k);
            if gained > 0.0 {
                self.apply(i, k, t);
                return Some(gained);
            }
        }
        None
    }

    fn bias(&self, lo: f64, hi: f64) -> f64 {
        let c = self.params.cost;
        let free: Vec<f64> = (0..self.betas.len())
            .filter(|&k| self.betas[k] != 0.0 && self.betas[k].abs() < c)
            .map(|k| self.bias_bounds(k).0)
            .collect();
        if !free.is_empty() {
            return free.iter().sum::<f64>() / free.len() as f64;
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        }
    }

    fn run(mut self, trace: bool) -> SvrFit {
        let n = self.betas.len();
        let max_iter = self.params.max_passes.saturating_mul(n).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        let mut objective = 0.0;
        let mut objective_trace = Vec::new();
        let mut sum_trace = Vec::new();
        let mut converged = false;
        let mut iterations = 0;

        while iterations < max_iter {
            let (i, j, gap, _, _) = self.worst_pair();
            if gap <= self.params.kkt_tol {
                converged = true;
                break;
            }
            let (t, gained) = self.best_step(i, j);
            let gained = if gained > 0.0 {
                self.apply(i, j, t);
                gained
            } else {
                // numerical stall on the worst pair
                match self.random_partner_step(i, &mut rng) {
                    Some(g) => g,
                    None => break,
                }
            };
            iterations += 1;
            objective += gained;
            if trace {
                objective_trace.push(dual_objective(
                    &self.params.kernel,
                    self.inputs,
                    self.targets,
                    &self.betas,
                    self.params.epsilon,
                ));
                sum_trace.push(self.betas.iter().sum());
            }
        }

        let (_, _, kkt_gap, lo, hi) = self.worst_pair();
        let bias = self.bias(lo, hi);
        let (support_inputs, dual_coefs) = self
            .betas
            .iter()
            .zip(self.inputs)
            .filter(|(b, _)| b.abs() > SUPPORT_FLOOR)
            .map(|(b, x)| (x.clone(), *b))
            .unzip();
        let objective = if trace {
            objective_trace.last().copied().unwrap_or(0.0)
        } else {
            objective
        };
        SvrFit {
            model: SvrModel {
                kernel: self.params.kernel,
                cost: self.params.cost,
                epsilon: self.params.epsilon,
                dim: self.inputs[0].len(),
                support_inputs,
                dual_coefs,
                bias,
            },
            betas: self.betas,
            objective,
            iterations,
            converged,
            kkt_gap,
            objective_trace,
            sum_trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Kernel::Linear.eval(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(
            Kernel::Rbf { gamma: 0.5 }
                .eval(&[0.3, 7.0], &[0.3, 7.0])
                .unwrap(),
            1.0
        );
        let v = Kernel::Rbf { gamma: 1.0 }
            .eval(&[0.0, 0.0], &[1.0, 0.0])
            .unwrap();
        assert!((v - 0.36788).abs() < 1e-5);
        let p = Kernel::Polynomial {
            degree: 2,
            gamma: 0.5,
            coef0: 1.0,
        };
        assert_eq!(p.eval(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 6.5 * 6.5);
        assert!(matches!(
            Kernel::Linear.eval(&[1.0], &[1.0, 2.0]),
            Err(SvrError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_text_round_trip() {
        for k in [
            Kernel::Linear,
            Kernel::Rbf { gamma: 0.123456789 },
            Kernel::Polynomial {
                degree: 3,
                gamma: 0.2,
                coef0: -1.5,
            },
        ] {
            assert_eq!(k.to_string().parse::<Kernel>().unwrap(), k);
        }
        assert!("rbf -1".parse::<Kernel>().is_err());
        assert!("sigmoid 1".parse::<Kernel>().is_err());
    }

    #[test]
    fn constant_targets_give_flat_model() {
        for kernel in [Kernel::Linear, Kernel::Rbf { gamma: 0.7 }] {
            let params = SvrParams {
                kernel,
                ..SvrParams::default()
            };
            let m = svr_train(&rows(&[0.0, 1.0, 2.0, 5.0]), &[3.5; 4], &params).unwrap();
            assert!(m.dual_coefs.is_empty());
            assert_eq!(m.bias, 3.5);
            assert_eq!(m.predict(&[10.0]).unwrap(), 3.5);
        }
    }

    #[test]
    fn line_fits_inside_tube() {
        let params = SvrParams {
            cost: 100.0,
            epsilon: 0.01,
            ..SvrParams::default()
        };
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let m = svr_train(&rows(&xs), &ys, &params).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((m.predict(&[*x]).unwrap() - y).abs() <= params.epsilon + params.kkt_tol);
        }
        assert!((m.predict(&[1.5]).unwrap() - 3.0).abs() <= params.epsilon + params.kkt_tol);
    }

    #[test]
    fn grid_search_confirms_line_is_feasible() {
        // the ε-tube around y = 2x admits slope/intercept pairs near (2, 0)
        let xs = [0.0, 1.0, 2.0, 3.0];
        let mut best = f64::INFINITY;
        for a in 0..=400 {
            for b in 0..=200 {
                let slope = 1.0 + a as f64 * 0.005;
                let icpt = -0.5 + b as f64 * 0.005;
                let worst = xs
                    .iter()
                    .map(|x| (slope * x + icpt - 2.0 * x).abs())
                    .fold(0.0, f64::max);
                if worst <= 0.01 {
                    best = best.min(slope.abs());
                }
            }
        }
        assert!(best.is_finite() && (best - 2.0).abs() < 0.01);
    }

    #[test]
    fn empty_model_predicts_bias() {
        let m = SvrModel {
            kernel: Kernel::Linear,
            cost: 1.0,
            epsilon: 0.1,
            dim: 2,
            support_inputs: vec![],
            dual_coefs: vec![],
            bias: -0.25,
        };
        assert_eq!(m.predict(&[4.0, 5.0]).unwrap(), -0.25);
        assert!(m.predict(&[4.0]).is_err());
    }

    #[test]
    fn training_errors() {
        let p = SvrParams::default();
        assert_eq!(svr_train(&[], &[], &p), Err(SvrError::EmptyTrainingSet));
        assert!(matches!(
            svr_train(&rows(&[1.0, 2.0]), &[1.0], &p),
            Err(SvrError::LengthMismatch { .. })
        ));
        let bad = SvrParams {
            cost: 0.0,
            ..SvrParams::default()
        };
        assert!(svr_train(&rows(&[1.0, 2.0]), &[1.0, 2.0], &bad).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let xs: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![i as f64 * 0.37, (i as f64).sin()])
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0].cos() + 0.3 * x[1]).collect();
        let params = SvrParams {
            kernel: Kernel::Rbf { gamma: 0.8 },
            epsilon: 0.05,
            ..SvrParams::default()
        };
        let m = svr_train(&xs, &ys, &params).unwrap();
        let text = m.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "svr v1");
        let back = SvrModel::from_text_body(&lines[1..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn scale_gamma_matches_definition() {
        let xs = vec![vec![1.0, 0.0], vec![3.0, 2.0]];
        // entries {1,0,3,2}: mean 1.5, variance 1.25
        assert!((scale_gamma(&xs) - 1.0 / (2.0 * 1.25)).abs() < 1e-15);
        assert_eq!(scale_gamma(&[vec![1.0], vec![1.0]]), 1.0);
    }
}
