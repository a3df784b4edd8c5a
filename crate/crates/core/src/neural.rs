//! Minimal numerical substrate shared by the memory-network models:
//! named parameter arrays with paired gradients, plain gradient descent
//! with global-norm clipping, standard nonlinearities, and a
//! finite-difference gradient checker.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn tanh(x: f64) -> f64 {
    x.tanh()
}

/// Numerically stable softmax (max-subtraction). Output components are
/// positive and sum to one.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for o in &mut out {
        *o /= sum;
    }
    out
}

/// y += W x, with W stored row-major (rows x cols).
pub(crate) fn matvec_add(w: &[f64], rows: usize, cols: usize, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(w.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(y.len(), rows);
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        let mut acc = 0.0;
        for c in 0..cols {
            acc += row[c] * x[c];
        }
        y[r] += acc;
    }
}

/// y += W^T d, with W stored row-major (rows x cols); d has `rows`
/// components and y has `cols`.
pub(crate) fn matvec_t_add(w: &[f64], rows: usize, cols: usize, d: &[f64], y: &mut [f64]) {
    debug_assert_eq!(w.len(), rows * cols);
    debug_assert_eq!(d.len(), rows);
    debug_assert_eq!(y.len(), cols);
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        let dr = d[r];
        for c in 0..cols {
            y[c] += dr * row[c];
        }
    }
}

/// dW += d (x)^T outer product accumulation, dW row-major (d.len x x.len).
pub(crate) fn outer_add(d: &[f64], x: &[f64], dw: &mut [f64]) {
    debug_assert_eq!(dw.len(), d.len() * x.len());
    let cols = x.len();
    for (r, &dr) in d.iter().enumerate() {
        let row = &mut dw[r * cols..(r + 1) * cols];
        for c in 0..cols {
            row[c] += dr * x[c];
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Handle to a parameter registered in a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamId(usize);

/// Gradient-descent settings: step size and global-norm gradient clip.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub clip_norm: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 0.03,
            clip_norm: 5.0,
        }
    }
}

/// Named dense real arrays with paired gradient buffers.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    names: Vec<String>,
    shapes: Vec<(usize, usize)>,
    values: Vec<Vec<f64>>,
    grads: Vec<Vec<f64>>,
}

impl ParamStore {
    pub fn new() -> ParamStore {
        ParamStore::default()
    }

    fn register(&mut self, name: &str, rows: usize, cols: usize, value: Vec<f64>) -> ParamId {
        assert!(
            !self.names.iter().any(|n| n == name),
            "parameter `{name}` registered twice"
        );
        assert_eq!(value.len(), rows * cols);
        let id = ParamId(self.names.len());
        self.names.push(name.to_string());
        self.shapes.push((rows, cols));
        self.grads.push(vec![0.0; value.len()]);
        self.values.push(value);
        id
    }

    /// Register a parameter initialized uniformly in [-half_range, half_range].
    pub fn register_uniform(
        &mut self,
        name: &str,
        rows: usize,
        cols: usize,
        half_range: f64,
        rng: &mut ChaCha8Rng,
    ) -> ParamId {
        let value = (0..rows * cols)
            .map(|_| rng.random_range(-half_range..half_range))
            .collect();
        self.register(name, rows, cols, value)
    }

    /// Register a parameter with every component set to `value`.
    pub fn register_const(&mut self, name: &str, rows: usize, cols: usize, value: f64) -> ParamId {
        self.register(name, rows, cols, vec![value; rows * cols])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.names.len()).map(ParamId)
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn shape(&self, id: ParamId) -> (usize, usize) {
        self.shapes[id.0]
    }

    pub fn value(&self, id: ParamId) -> &[f64] {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut [f64] {
        &mut self.values[id.0]
    }

    /// Row `r` of a matrix-shaped parameter.
    pub fn row(&self, id: ParamId, r: usize) -> &[f64] {
        let (_, cols) = self.shapes[id.0];
        &self.values[id.0][r * cols..(r + 1) * cols]
    }

    pub fn grad(&self, id: ParamId) -> &[f64] {
        &self.grads[id.0]
    }

    pub fn grad_mut(&mut self, id: ParamId) -> &mut [f64] {
        &mut self.grads[id.0]
    }

    /// Immutable values alongside mutable gradients, for backward passes
    /// that read weights while accumulating.
    pub fn values_and_grads_mut(&mut self) -> (&[Vec<f64>], &mut [Vec<f64>]) {
        (&self.values, &mut self.grads)
    }

    pub fn index(&self, id: ParamId) -> usize {
        id.0
    }

    pub fn zero_grads(&mut self) {
        for g in &mut self.grads {
            g.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn grad_norm(&self) -> f64 {
        self.grads
            .iter()
            .flat_map(|g| g.iter())
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }

    /// One gradient-descent step with global-norm clipping; gradients are
    /// zeroed afterwards. Fails on non-finite gradients, naming the
    /// offending parameter.
    pub fn sgd_step(&mut self, config: &OptimizerConfig) -> Result<()> {
        for (i, g) in self.grads.iter().enumerate() {
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite gradient in parameter `{}`",
                    self.names[i]
                )));
            }
        }
        let norm = self.grad_norm();
        let scale = if norm > config.clip_norm {
            config.clip_norm / norm
        } else {
            1.0
        };
        let step = config.learning_rate * scale;
        for (v, g) in self.values.iter_mut().zip(&self.grads) {
            for (x, d) in v.iter_mut().zip(g) {
                *x -= step * d;
            }
        }
        for (i, v) in self.values.iter().enumerate() {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite value in parameter `{}` after update",
                    self.names[i]
                )));
            }
        }
        self.zero_grads();
        Ok(())
    }

    /// Write all parameters as a text container: `param name rows cols`
    /// followed by one row per line, values with 17 significant digits.
    /// Free-form `meta key value` lines precede the parameters.
    pub fn save<W: Write>(&self, mut w: W, meta: &[(String, String)]) -> Result<()> {
        writeln!(w, "veritas-params 1")?;
        for (key, value) in meta {
            writeln!(w, "meta {key} {value}")?;
        }
        for id in self.ids() {
            let (rows, cols) = self.shape(id);
            writeln!(w, "param {} {} {}", self.name(id), rows, cols)?;
            let value = self.value(id);
            for r in 0..rows {
                let row: Vec<String> =
                    value[r * cols..(r + 1) * cols].iter().map(|x| format!("{x:.16e}")).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
        }
        Ok(())
    }

    pub fn load<R: BufRead>(reader: R) -> Result<(ParamStore, Vec<(String, String)>)> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, message: "empty parameter file".into() })??;
        if header.trim() != "veritas-params 1" {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected header `{header}`"),
            });
        }
        let mut store = ParamStore::new();
        let mut meta = Vec::new();
        let mut lineno = 1;
        let mut pending: Option<(String, usize, usize, Vec<f64>)> = None;
        let mut flush =
            |store: &mut ParamStore, pending: &mut Option<(String, usize, usize, Vec<f64>)>| -> Result<()> {
                if let Some((name, rows, cols, value)) = pending.take() {
                    if value.len() != rows * cols {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!(
                                "parameter `{name}`: expected {} values, found {}",
                                rows * cols,
                                value.len()
                            ),
                        });
                    }
                    store.register(&name, rows, cols, value);
                }
                Ok(())
            };
        for line in lines {
            let line = line?;
            lineno += 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("meta ") {
                let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
                meta.push((key.to_string(), value.to_string()));
            } else if let Some(rest) = line.strip_prefix("param ") {
                flush(&mut store, &mut pending)?;
                let parts: Vec<&str> = rest.rsplitn(3, ' ').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("malformed param header `{line}`"),
                    });
                }
                let name = parts[2].to_string();
                let rows: usize = parts[1].parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad row count in `{line}`"),
                })?;
                let cols: usize = parts[0].parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad column count in `{line}`"),
                })?;
                pending = Some((name, rows, cols, Vec::with_capacity(rows * cols)));
            } else {
                let target = pending.as_mut().ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: "values before any param header".into(),
                })?;
                for field in line.split_whitespace() {
                    let x: f64 = field.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad number `{field}`"),
                    })?;
                    target.3.push(x);
                }
            }
        }
        flush(&mut store, &mut pending)?;
        Ok((store, meta))
    }
}

/// Compare analytic gradients in `store` against central finite differences
/// of `loss`, optionally on a random subsample of coordinates per parameter.
/// Returns the maximum relative error. Coordinates where both gradients are
/// below 1e-7 in magnitude count as exact.
pub fn check_gradients<F>(
    store: &mut ParamStore,
    mut loss: F,
    epsilon: f64,
    max_coords_per_param: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> f64
where
    F: FnMut(&ParamStore) -> f64,
{
    let mut worst = 0.0_f64;
    for id in store.ids().collect::<Vec<_>>() {
        let len = store.value(id).len();
        let coords: Vec<usize> = match max_coords_per_param {
            Some(m) if m < len => {
                let mut picked: Vec<usize> = (0..len).collect();
                for i in 0..m {
                    let j = rng.random_range(i..len);
                    picked.swap(i, j);
                }
                picked.truncate(m);
                picked
            }
            _ => (0..len).collect(),
        };
        for c in coords {
            let analytic = store.grad(id)[c];
            let original = store.value(id)[c];
            store.value_mut(id)[c] = original + epsilon;
            let plus = loss(store);
            store.value_mut(id)[c] = original - epsilon;
            let minus = loss(store);
            store.value_mut(id)[c] = original;
            let numeric = (plus - minus) / (2.0 * epsilon);
            let diff = (analytic - numeric).abs();
            let rel = if diff < 1e-7 {
                0.0
            } else {
                diff / analytic.abs().max(numeric.abs())
            };
            worst = worst.max(rel);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn softmax_of_equal_scores_is_uniform() {
        let r = softmax(&[0.0, 0.0, 0.0]);
        for &x in &r {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_survives_large_scores() {
        let r = softmax(&[1000.0, 0.0]);
        assert!(r.iter().all(|x| x.is_finite()));
        assert!(r[0] > 0.999999);
        assert!((r[0] + r[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_is_shift_invariant() {
        let a = softmax(&[0.3, -1.2, 2.5]);
        let b = softmax(&[0.3 + 7.0, -1.2 + 7.0, 2.5 + 7.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_sums_to_one_across_magnitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let scale = 10f64.powf(rng.random_range(-8.0..8.0));
            let n = rng.random_range(1..9);
            let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
            let r = softmax(&scores);
            let sum: f64 = r.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum {sum} at scale {scale}");
            assert!(r.iter().all(|x| *x >= 0.0 && x.is_finite()));
        }
    }

    #[test]
    fn sigmoid_and_tanh_basics() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(tanh(0.0), 0.0);
        for x in [-3.0, -0.5, 0.1, 2.0] {
            assert!((sigmoid(-x) - (1.0 - sigmoid(x))).abs() < 1e-15);
            assert!(sigmoid(x) > 0.0 && sigmoid(x) < 1.0);
            assert!(tanh(x) > -1.0 && tanh(x) < 1.0);
        }
    }

    #[test]
    fn sgd_step_applies_learning_rate() {
        let mut store = ParamStore::new();
        let p = store.register_const("p", 1, 1, 1.0);
        store.grad_mut(p)[0] = 0.5;
        store
            .sgd_step(&OptimizerConfig { learning_rate: 1.0, clip_norm: 5.0 })
            .unwrap();
        assert_eq!(store.value(p), &[0.5]);
        assert_eq!(store.grad(p), &[0.0]);
    }

    #[test]
    fn sgd_step_with_zero_gradient_changes_nothing() {
        let mut store = ParamStore::new();
        let p = store.register_const("p", 1, 3, 0.25);
        store.sgd_step(&OptimizerConfig::default()).unwrap();
        assert_eq!(store.value(p), &[0.25, 0.25, 0.25]);
    }

    #[test]
    fn sgd_step_clips_by_global_norm() {
        let mut store = ParamStore::new();
        let p = store.register_const("p", 1, 2, 1.0);
        store.grad_mut(p).copy_from_slice(&[30.0, 40.0]); // norm 50
        store
            .sgd_step(&OptimizerConfig { learning_rate: 0.03, clip_norm: 5.0 })
            .unwrap();
        // clip scales by 0.1: effective gradient [3, 4]
        assert!((store.value(p)[0] - (1.0 - 0.03 * 3.0)).abs() < 1e-15);
        assert!((store.value(p)[1] - (1.0 - 0.03 * 4.0)).abs() < 1e-15);
    }

    #[test]
    fn sgd_step_rejects_non_finite_gradient() {
        let mut store = ParamStore::new();
        let p = store.register_const("broken", 1, 1, 1.0);
        store.grad_mut(p)[0] = f64::NAN;
        let err = store.sgd_step(&OptimizerConfig::default()).unwrap_err();
        assert!(err.to_string().contains("broken"), "{err}");
    }

    #[test]
    fn gradient_check_on_linear_model_is_exact() {
        let mut store = ParamStore::new();
        let w = store.register_const("w", 1, 3, 0.4);
        let coeff = [1.0, 2.0, 3.0];
        store.grad_mut(w).copy_from_slice(&coeff);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let worst = check_gradients(
            &mut store,
            |s| dot(s.value(w), &coeff),
            1e-5,
            None,
            &mut rng,
        );
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn store_roundtrips_through_text_container() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut store = ParamStore::new();
        store.register_uniform("weights", 3, 4, 0.1, &mut rng);
        store.register_const("bias two words", 1, 2, -0.5);
        let meta = vec![
            ("model".to_string(), "test".to_string()),
            ("source".to_string(), "a name with spaces".to_string()),
        ];
        let mut buf = Vec::new();
        store.save(&mut buf, &meta).unwrap();
        let (loaded, loaded_meta) = ParamStore::load(&buf[..]).unwrap();
        assert_eq!(loaded_meta, meta);
        assert_eq!(loaded.len(), store.len());
        for (a, b) in store.ids().zip(loaded.ids()) {
            assert_eq!(store.name(a), loaded.name(b));
            assert_eq!(store.shape(a), loaded.shape(b));
            assert_eq!(store.value(a), loaded.value(b));
        }
    }

    #[test]
    fn matvec_helpers_agree_with_hand_results() {
        // W = [[1, 2], [3, 4]] row-major
        let w = [1.0, 2.0, 3.0, 4.0];
        let mut y = vec![0.0; 2];
        matvec_add(&w, 2, 2, &[1.0, 1.0], &mut y);
        assert_eq!(y, vec![3.0, 7.0]);
        let mut yt = vec![0.0; 2];
        matvec_t_add(&w, 2, 2, &[1.0, 1.0], &mut yt);
        assert_eq!(yt, vec![4.0, 6.0]);
        let mut dw = vec![0.0; 4];
        outer_add(&[1.0, 2.0], &[3.0, 5.0], &mut dw);
        assert_eq!(dw, vec![3.0, 5.0, 6.0, 10.0]);
    }
}
