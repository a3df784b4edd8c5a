//! Distance functions, weighted truth selection, initialization, and the
//! joint categorical/continuous loss.

use std::collections::BTreeMap;

use crate::data::{Dataset, Value, ValueKind};
use crate::error::{Error, Result};

/// Distance reported for a degenerate entry (all values identical) when the
/// candidate truth differs from the common value.
pub const DEGENERATE_DISTANCE: f64 = 1e6;

/// Per-entry normalization for continuous distances: the mean of the
/// entry's value set and the root of the summed squared deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryScale {
    pub mean: f64,
    pub denom: f64,
    degenerate_distance: f64,
}

impl EntryScale {
    /// Compute the scale over an entry's full value set.
    pub fn from_values(values: &[f64]) -> EntryScale {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let denom = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>().sqrt();
        EntryScale {
            mean,
            denom,
            degenerate_distance: DEGENERATE_DISTANCE,
        }
    }

    pub fn with_degenerate_distance(mut self, distance: f64) -> EntryScale {
        self.degenerate_distance = distance;
        self
    }

    pub fn is_degenerate(&self) -> bool {
        self.denom == 0.0
    }
}

/// 0/1 distance between categorical values: exact string comparison, no
/// normalization.
pub fn d_cate(truth: &Value, obs: &Value) -> Result<f64> {
    match (truth, obs) {
        (Value::Categorical(t), Value::Categorical(v)) => Ok(if t == v { 0.0 } else { 1.0 }),
        _ => Err(Error::Argument(
            "categorical distance needs two categorical values".into(),
        )),
    }
}

/// Scale-normalized absolute distance between continuous values:
/// |truth - obs| divided by the entry scale. On a degenerate entry the
/// distance is 0 at the common value and a large constant elsewhere.
pub fn d_con(truth: f64, obs: f64, scale: &EntryScale) -> Result<f64> {
    if !truth.is_finite() || !obs.is_finite() {
        return Err(Error::Value("non-finite input to continuous distance".into()));
    }
    if scale.is_degenerate() {
        return Ok(if obs == truth { 0.0 } else { scale.degenerate_distance });
    }
    Ok((truth - obs).abs() / scale.denom)
}

fn validate_weights(len: usize, weights: &[f64]) -> Result<f64> {
    if len == 0 {
        return Err(Error::Argument("empty value set".into()));
    }
    if weights.len() != len {
        return Err(Error::Argument(format!(
            "{} values but {} weights",
            len,
            weights.len()
        )));
    }
    let mut total = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Argument(format!("weight {w} is not finite and >= 0")));
        }
        total += w;
    }
    if total <= 0.0 {
        return Err(Error::Argument("weights must not all be zero".into()));
    }
    Ok(total)
}

/// Weighted median: the smallest value whose strictly-below weight mass is
/// less than half the total and whose strictly-above mass is at most half.
/// This is the minimizer of the weight-summed absolute distance; under ties
/// the smallest satisfying value is returned.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    validate_weights(values.len(), weights)?;
    for &v in values {
        if !v.is_finite() {
            return Err(Error::Argument(format!("value {v} is not finite")));
        }
    }
    let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // Summing in sorted order keeps the result independent of input order.
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let half = total / 2.0;

    let mut below = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        let mut group = 0.0;
        while i < pairs.len() && pairs[i].0 == v {
            group += pairs[i].1;
            i += 1;
        }
        let above = total - below - group;
        if below < half && above <= half {
            return Ok(v);
        }
        below += group;
    }
    Err(Error::Argument("no value satisfies the median condition".into()))
}

/// Weighted vote over categorical values: the value with maximal summed
/// weight, ties broken by the lexicographically smallest token.
pub fn weighted_vote(values: &[&Value], weights: &[f64]) -> Result<Value> {
    validate_weights(values.len(), weights)?;
    let mut pairs: Vec<(&str, f64)> = Vec::with_capacity(values.len());
    for (v, &w) in values.iter().zip(weights) {
        match v {
            Value::Categorical(token) => pairs.push((token, w)),
            Value::Continuous(_) => {
                return Err(Error::Argument("weighted vote needs categorical values".into()))
            }
        }
    }
    pairs.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)));

    let mut best: Option<(&str, f64)> = None;
    let mut i = 0;
    while i < pairs.len() {
        let token = pairs[i].0;
        let mut mass = 0.0;
        while i < pairs.len() && pairs[i].0 == token {
            mass += pairs[i].1;
            i += 1;
        }
        // Tokens arrive in lexicographic order, so a strict comparison keeps
        // the smallest token among ties.
        if best.map_or(true, |(_, m)| mass > m) {
            best = Some((token, mass));
        }
    }
    let (token, _) = best.expect("non-empty by validation");
    Ok(Value::Categorical(token.to_string()))
}

/// Per-entry credibility distribution over that entry's present
/// observations. Each row is non-negative and sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CredibilityAssignment {
    per_entry: Vec<Vec<f64>>,
}

impl CredibilityAssignment {
    pub fn new(dataset: &Dataset, per_entry: Vec<Vec<f64>>) -> Result<CredibilityAssignment> {
        if per_entry.len() != dataset.num_entries() {
            return Err(Error::Argument(format!(
                "{} credibility rows for {} entries",
                per_entry.len(),
                dataset.num_entries()
            )));
        }
        for (entry_id, row) in per_entry.iter().enumerate() {
            let count = dataset.entry_observations(entry_id).count();
            if row.len() != count {
                return Err(Error::Argument(format!(
                    "entry {entry_id}: {} credibilities for {count} observations",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &r in row {
                if !r.is_finite() || r < 0.0 {
                    return Err(Error::Argument(format!(
                        "entry {entry_id}: credibility {r} is not finite and >= 0"
                    )));
                }
                sum += r;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Argument(format!(
                    "entry {entry_id}: credibilities sum to {sum}, expected 1"
                )));
            }
        }
        Ok(CredibilityAssignment { per_entry })
    }

    /// Uniform distribution over each entry's observations.
    pub fn uniform(dataset: &Dataset) -> CredibilityAssignment {
        let per_entry = (0..dataset.num_entries())
            .map(|id| {
                let n = dataset.entry_observations(id).count();
                vec![1.0 / n as f64; n]
            })
            .collect();
        CredibilityAssignment { per_entry }
    }

    pub fn entry(&self, entry_id: usize) -> &[f64] {
        &self.per_entry[entry_id]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.per_entry
    }
}

/// Predicted value per entry. May cover a subset of entries (single-type
/// baselines leave the other type unassigned).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TruthAssignment {
    values: BTreeMap<usize, Value>,
}

impl TruthAssignment {
    pub fn new() -> TruthAssignment {
        TruthAssignment::default()
    }

    pub fn from_map(values: BTreeMap<usize, Value>) -> TruthAssignment {
        TruthAssignment { values }
    }

    pub fn set(&mut self, entry_id: usize, value: Value) {
        self.values.insert(entry_id, value);
    }

    pub fn get(&self, entry_id: usize) -> Option<&Value> {
        self.values.get(&entry_id)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Value)> {
        self.values.iter().map(|(&id, v)| (id, v))
    }

    /// Equality with a tolerance on continuous values; categorical values
    /// compare exactly.
    pub fn approx_eq(&self, other: &TruthAssignment, tol: f64) -> bool {
        if self.values.len() != other.values.len() {
            return false;
        }
        for (id, value) in &self.values {
            match (value, other.values.get(id)) {
                (Value::Categorical(a), Some(Value::Categorical(b))) if a == b => {}
                (Value::Continuous(a), Some(Value::Continuous(b))) if (a - b).abs() <= tol => {}
                _ => return false,
            }
        }
        true
    }
}

/// Scales for every continuous entry, indexed by entry id.
pub fn entry_scales(dataset: &Dataset) -> Vec<Option<EntryScale>> {
    dataset
        .entries()
        .iter()
        .map(|entry| match entry.kind {
            ValueKind::Categorical => None,
            ValueKind::Continuous => Some(EntryScale::from_values(&dataset.entry_numbers(entry.id))),
        })
        .collect()
}

/// Select a truth per entry from credibility-weighted observations:
/// weighted vote for categorical entries, weighted median for continuous.
/// Every selected truth is one of the entry's observed values.
pub fn update_truths(
    dataset: &Dataset,
    credibilities: &CredibilityAssignment,
) -> Result<TruthAssignment> {
    let mut result = TruthAssignment::new();
    for entry in dataset.entries() {
        let weights = credibilities.entry(entry.id);
        match entry.kind {
            ValueKind::Categorical => {
                let values: Vec<&Value> =
                    dataset.entry_observations(entry.id).map(|o| &o.value).collect();
                result.set(entry.id, weighted_vote(&values, weights)?);
            }
            ValueKind::Continuous => {
                let values = dataset.entry_numbers(entry.id);
                result.set(entry.id, Value::Continuous(weighted_median(&values, weights)?));
            }
        }
    }
    Ok(result)
}

/// Initial truths: unweighted majority vote for categorical entries and the
/// arithmetic mean for continuous entries. The mean may not be an observed
/// value; every later update restores that property.
pub fn initialize_truths(dataset: &Dataset) -> TruthAssignment {
    let mut result = TruthAssignment::new();
    for entry in dataset.entries() {
        match entry.kind {
            ValueKind::Categorical => {
                let values: Vec<&Value> =
                    dataset.entry_observations(entry.id).map(|o| &o.value).collect();
                let weights = vec![1.0; values.len()];
                let vote = weighted_vote(&values, &weights).expect("entry has observations");
                result.set(entry.id, vote);
            }
            ValueKind::Continuous => {
                let values = dataset.entry_numbers(entry.id);
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                result.set(entry.id, Value::Continuous(mean));
            }
        }
    }
    result
}

/// Credibility-weighted distances of one entry's observations from a
/// candidate truth.
pub fn entry_distances(
    dataset: &Dataset,
    entry_id: usize,
    truth: &Value,
    scale: Option<&EntryScale>,
) -> Result<Vec<f64>> {
    let entry = dataset.entry(entry_id);
    let mut out = Vec::new();
    match entry.kind {
        ValueKind::Categorical => {
            for obs in dataset.entry_observations(entry_id) {
                out.push(d_cate(truth, &obs.value)?);
            }
        }
        ValueKind::Continuous => {
            let scale = scale.ok_or_else(|| {
                Error::Argument(format!("entry {entry_id}: missing scale for continuous entry"))
            })?;
            let t = truth.number().ok_or_else(|| {
                Error::Argument(format!("entry {entry_id}: categorical truth for continuous entry"))
            })?;
            for obs in dataset.entry_observations(entry_id) {
                let v = obs.value.number().expect("kind checked at construction");
                out.push(d_con(t, v, scale)?);
            }
        }
    }
    Ok(out)
}

/// Joint weighted loss: `alpha` times the credibility-weighted categorical
/// distances plus `beta` times the continuous ones, summed over present
/// observations.
pub fn joint_loss(
    dataset: &Dataset,
    truths: &TruthAssignment,
    credibilities: &CredibilityAssignment,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Argument(format!(
            "loss weights must be positive, got alpha={alpha} beta={beta}"
        )));
    }
    let scales = entry_scales(dataset);
    let mut cat = 0.0;
    let mut con = 0.0;
    for entry in dataset.entries() {
        let truth = truths
            .get(entry.id)
            .ok_or_else(|| Error::Argument(format!("no truth assigned to entry {}", entry.id)))?;
        let dists = entry_distances(dataset, entry.id, truth, scales[entry.id].as_ref())?;
        let weighted: f64 = dists
            .iter()
            .zip(credibilities.entry(entry.id))
            .map(|(d, r)| d * r)
            .sum();
        match entry.kind {
            ValueKind::Categorical => cat += weighted,
            ValueKind::Continuous => con += weighted,
        }
    }
    Ok(alpha * cat + beta * con)
}
