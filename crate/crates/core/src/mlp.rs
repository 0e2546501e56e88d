//! Single-hidden-layer perceptron regressor with a linear output unit,
//! trained by full-batch gradient descent on mean squared error.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlpError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{inputs} inputs but {targets} targets")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("training loss became non-finite at epoch {0}")]
    DivergedLoss(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    /// Linear hidden layer; the network then spans affine maps of its input.
    #[default]
    Identity,
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative expressed through the activation output `a = act(z)`.
    fn derivative(self, a: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Identity => "identity",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
        })
    }
}

impl std::str::FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" | "linear" => Ok(Activation::Identity),
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(format!("unknown activation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub input_dim: usize,
    pub hidden_dim: usize,
    /// `input_dim × hidden_dim`
    pub weights_ih: Vec<Vec<f64>>,
    pub bias_h: Vec<f64>,
    pub weights_ho: Vec<f64>,
    pub bias_o: f64,
    pub activation: Activation,
}

/// Gradient of the mean squared error, shaped like the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights_ih: Vec<Vec<f64>>,
    pub bias_h: Vec<f64>,
    pub weights_ho: Vec<f64>,
    pub bias_o: f64,
}

impl Gradients {
    /// Flattened in the same order as [`MlpModel::params`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.weights_ih.iter().flatten().copied().collect();
        out.extend(&self.bias_h);
        out.extend(&self.weights_ho);
        out.push(self.bias_o);
        out
    }
}

/// Weights uniform in `±1/√fan_in` from a seeded generator; biases zero.
pub fn mlp_init(
    input_dim: usize,
    hidden_dim: usize,
    activation: Activation,
    seed: u64,
) -> Result<MlpModel, MlpError> {
    if input_dim == 0 || hidden_dim == 0 {
        return Err(MlpError::InvalidParameter(
            "layer sizes must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound_ih = 1.0 / (input_dim as f64).sqrt();
    let bound_ho = 1.0 / (hidden_dim as f64).sqrt();
    let weights_ih = (0..input_dim)
        .map(|_| {
            (0..hidden_dim)
                .map(|_| rng.gen_range(-bound_ih..=bound_ih))
                .collect()
        })
        .collect();
    let weights_ho = (0..hidden_dim)
        .map(|_| rng.gen_range(-bound_ho..=bound_ho))
        .collect();
    Ok(MlpModel {
        input_dim,
        hidden_dim,
        weights_ih,
        bias_h: vec![0.0; hidden_dim],
        weights_ho,
        bias_o: 0.0,
        activation,
    })
}

impl MlpModel {
    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        (0..self.hidden_dim)
            .map(|h| {
                let z = self.bias_h[h]
                    + x.iter()
                        .zip(&self.weights_ih)
                        .map(|(xi, row)| xi * row[h])
                        .sum::<f64>();
                self.activation.apply(z)
            })
            .collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), MlpError> {
        if x.len() != self.input_dim {
            return Err(MlpError::DimensionMismatch {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, MlpError> {
        self.check_dim(x)?;
        let hidden = self.hidden(x);
        Ok(self.bias_o
            + hidden
                .iter()
                .zip(&self.weights_ho)
                .map(|(a, w)| a * w)
                .sum::<f64>())
    }

    pub fn loss(&self, inputs: &[Vec<f64>], targets: &[f64]) -> Result<f64, MlpError> {
        Ok(self.loss_and_gradients(inputs, targets)?.0)
    }

    /// Mean squared error over the batch and its gradient.
    pub fn loss_and_gradients(
        &self,
        inputs: &[Vec<f64>],
        targets: &[f64],
    ) -> Result<(f64, Gradients), MlpError> {
        if inputs.len() != targets.len() || inputs.is_empty() {
            return Err(MlpError::LengthMismatch {
                inputs: inputs.len(),
                targets: targets.len(),
            });
        }
        let mut grad = Gradients {
            weights_ih: vec![vec![0.0; self.hidden_dim]; self.input_dim],
            bias_h: vec![0.0; self.hidden_dim],
            weights_ho: vec![0.0; self.hidden_dim],
            bias_o: 0.0,
        };
        let n = inputs.len() as f64;
        let mut loss = 0.0;
        for (x, y) in inputs.iter().zip(targets) {
            self.check_dim(x)?;
            let hidden = self.hidden(x);
            let out = self.bias_o
                + hidden
                    .iter()
                    .zip(&self.weights_ho)
                    .map(|(a, w)| a * w)
                    .sum::<f64>();
            let err = out - y;
            loss += err * err / n;
            let d_out = 2.0 * err / n;
            grad.bias_o += d_out;
            for (h, &a) in hidden.iter().enumerate() {
                grad.weights_ho[h] += d_out * a;
                let d_z = d_out * self.weights_ho[h] * self.activation.derivative(a);
                grad.bias_h[h] += d_z;
                for (i, xi) in x.iter().enumerate() {
                    grad.weights_ih[i][h] += d_z * xi;
                }
            }
        }
        Ok((loss, grad))
    }

    fn step(&mut self, grad: &Gradients, lr: f64) {
        for (row, grow) in self.weights_ih.iter_mut().zip(&grad.weights_ih) {
            for (w, g) in row.iter_mut().zip(grow) {
                *w -= lr * g;
            }
        }
        for (b, g) in self.bias_h.iter_mut().zip(&grad.bias_h) {
            *b -= lr * g;
        }
        for (w, g) in self.weights_ho.iter_mut().zip(&grad.weights_ho) {
            *w -= lr * g;
        }
        self.bias_o -= lr * grad.bias_o;
    }

    /// Parameters flattened as `weights_ih` (row-major), `bias_h`,
    /// `weights_ho`, `bias_o`.
    pub fn params(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.weights_ih.iter().flatten().copied().collect();
        out.extend(&self.bias_h);
        out.extend(&self.weights_ho);
        out.push(self.bias_o);
        out
    }

    /// Inverse of [`params`](Self::params).
    pub fn set_params(&mut self, flat: &[f64]) {
        let mut it = flat.iter().copied();
        for row in &mut self.weights_ih {
            for w in row.iter_mut() {
                *w = it.next().expect("parameter count");
            }
        }
        for b in &mut self.bias_h {
            *b = it.next().expect("parameter count");
        }
        for w in &mut self.weights_ho {
            *w = it.next().expect("parameter count");
        }
        self.bias_o = it.next().expect("parameter count");
    }

    /// Text form: `mlp v1`, `input_dim,hidden_dim`, activation, then
    /// `weights_ih` rows, `bias_h`, `weights_ho` and `bias_o`, 17 significant
    /// digits each.
    pub fn to_text(&self) -> String {
        let fmt_row = |row: &[f64]| {
            row.iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = format!(
            "mlp v1\n{},{}\n{}\n",
            self.input_dim, self.hidden_dim, self.activation
        );
        for row in &self.weights_ih {
            out.push_str(&fmt_row(row));
            out.push('\n');
        }
        out.push_str(&fmt_row(&self.bias_h));
        out.push('\n');
        out.push_str(&fmt_row(&self.weights_ho));
        out.push('\n');
        out.push_str(&format!("{:.16e}\n", self.bias_o));
        out
    }

    /// Parses the lines after the `mlp v1` header.
    pub fn from_text_body(lines: &[&str]) -> Result<Self, String> {
        let row = |line: &str, len: usize| -> Result<Vec<f64>, String> {
            let vals = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("bad number `{s}`"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != len {
                return Err(format!("expected {len} values, found {}", vals.len()));
            }
            Ok(vals)
        };
        let dims = lines.first().ok_or("truncated mlp model")?;
        let (i, h) = dims
            .split_once(',')
            .ok_or_else(|| format!("bad dims line `{dims}`"))?;
        let input_dim: usize = i
            .trim()
            .parse()
            .map_err(|_| format!("bad dims line `{dims}`"))?;
        let hidden_dim: usize = h
            .trim()
            .parse()
            .map_err(|_| format!("bad dims line `{dims}`"))?;
        if input_dim == 0 || hidden_dim == 0 {
            return Err("layer sizes must be >= 1".into());
        }
        if lines.len() != 2 + input_dim + 3 {
            return Err(format!(
                "expected {} lines, found {}",
                2 + input_dim + 3,
                lines.len()
            ));
        }
        let activation: Activation = lines[1].trim().parse()?;
        let weights_ih = lines[2..2 + input_dim]
            .iter()
            .map(|l| row(l, hidden_dim))
            .collect::<Result<Vec<_>, _>>()?;
        let bias_h = row(lines[2 + input_dim], hidden_dim)?;
        let weights_ho = row(lines[3 + input_dim], hidden_dim)?;
        let bias_o = row(lines[4 + input_dim], 1)?[0];
        Ok(Self {
            input_dim,
            hidden_dim,
            weights_ih,
            bias_h,
            weights_ho,
            bias_o,
            activation,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpTraining {
    pub model: MlpModel,
    /// Full-batch loss at the start of each epoch.
    pub losses: Vec<f64>,
    pub final_loss: f64,
}

pub fn mlp_train(
    model: MlpModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    learning_rate: f64,
    epochs: usize,
) -> Result<MlpTraining, MlpError> {
    if epochs == 0 {
        return Err(MlpError::InvalidParameter("epochs must be >= 1".into()));
    }
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(MlpError::InvalidParameter(format!(
            "learning rate must be > 0, got {learning_rate}"
        )));
    }
    let mut model = model;
    let mut losses = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let (loss, grad) = model.loss_and_gradients(inputs, targets)?;
        if !loss.is_finite() {
            return Err(MlpError::DivergedLoss(epoch));
        }
        losses.push(loss);
        model.step(&grad, learning_rate);
        if !model.params().iter().all(|w| w.is_finite()) {
            return Err(MlpError::DivergedLoss(epoch));
        }
    }
    let final_loss = model.loss(inputs, targets)?;
    if !final_loss.is_finite() {
        return Err(MlpError::DivergedLoss(epochs));
    }
    Ok(MlpTraining {
        model,
        losses,
        final_loss,
    })
}
