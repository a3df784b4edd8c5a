//! Domain types for multi-source observations: sources, entries, values,
//! the TSV interchange formats, and a seeded synthetic generator with
//! planted source reliabilities.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// The two supported observation types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Categorical,
    Continuous,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Categorical => "cat",
            ValueKind::Continuous => "con",
        }
    }

    pub fn parse(token: &str) -> Option<ValueKind> {
        match token {
            "cat" => Some(ValueKind::Categorical),
            "con" => Some(ValueKind::Continuous),
            _ => None,
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A claimed or true value for an entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Categorical(String),
    Continuous(f64),
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Categorical(_) => ValueKind::Categorical,
            Value::Continuous(_) => ValueKind::Continuous,
        }
    }

    pub fn token(&self) -> Option<&str> {
        match self {
            Value::Categorical(t) => Some(t),
            Value::Continuous(_) => None,
        }
    }

    pub fn number(&self) -> Option<f64> {
        match self {
            Value::Categorical(_) => None,
            Value::Continuous(x) => Some(*x),
        }
    }

    fn parse(kind: ValueKind, raw: &str, line: usize) -> Result<Value> {
        match kind {
            ValueKind::Categorical => {
                if raw.is_empty() {
                    Err(Error::Value(format!("line {line}: empty categorical token")))
                } else {
                    Ok(Value::Categorical(raw.to_string()))
                }
            }
            ValueKind::Continuous => {
                let x: f64 = raw.parse().map_err(|_| {
                    Error::Value(format!("line {line}: `{raw}` is not a real number"))
                })?;
                if !x.is_finite() {
                    return Err(Error::Value(format!(
                        "line {line}: continuous value `{raw}` is not finite"
                    )));
                }
                Ok(Value::Continuous(x))
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Categorical(t) => f.write_str(t),
            // Shortest round-trip rendering; parsing it back yields the same bits.
            Value::Continuous(x) => write!(f, "{x}"),
        }
    }
}

/// A provider of observations with latent reliability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub id: usize,
    pub name: String,
}

/// An (object, property) pair: the atomic question whose true value is sought.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub id: usize,
    pub object: String,
    pub property: String,
    pub kind: ValueKind,
}

/// One source's claimed value for one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub entry_id: usize,
    pub source_id: usize,
    pub value: Value,
}

/// Immutable store of sources, entries, and per-entry observation lists,
/// with optional ground truth for evaluation.
///
/// Source and entry ids are dense integers assigned in first-appearance
/// order, so downstream memory banks and masks can be plain arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    sources: Vec<Source>,
    entries: Vec<Entry>,
    observations: Vec<Observation>,
    /// entry id -> indices into `observations`, ascending source id.
    by_entry: Vec<Vec<usize>>,
    ground_truth: BTreeMap<usize, Value>,
    source_index: HashMap<String, usize>,
    entry_index: HashMap<(String, String), usize>,
}

impl Dataset {
    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, id: usize) -> &Entry {
        &self.entries[id]
    }

    pub fn source(&self, id: usize) -> &Source {
        &self.sources[id]
    }

    /// Observations of one entry, in ascending source id.
    pub fn entry_observations(&self, entry_id: usize) -> impl Iterator<Item = &Observation> + '_ {
        self.by_entry[entry_id].iter().map(|&i| &self.observations[i])
    }

    /// Continuous values of one entry, in ascending source id.
    /// Empty for categorical entries.
    pub fn entry_numbers(&self, entry_id: usize) -> Vec<f64> {
        self.entry_observations(entry_id)
            .filter_map(|o| o.value.number())
            .collect()
    }

    pub fn lookup_source(&self, name: &str) -> Option<usize> {
        self.source_index.get(name).copied()
    }

    pub fn lookup_entry(&self, object: &str, property: &str) -> Option<usize> {
        self.entry_index
            .get(&(object.to_string(), property.to_string()))
            .copied()
    }

    pub fn ground_truth(&self) -> &BTreeMap<usize, Value> {
        &self.ground_truth
    }

    pub fn set_ground_truth(&mut self, truth: BTreeMap<usize, Value>) {
        self.ground_truth = truth;
    }

    /// Parse the observations TSV: one row per observation,
    /// `source \t object \t property \t kind \t value` with kind in {cat, con}.
    pub fn parse_observations<R: BufRead>(reader: R) -> Result<Dataset> {
        let mut builder = DatasetBuilder::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 5 tab-separated fields, found {}", fields.len()),
                });
            }
            let (source, object, property, kind_token, raw_value) =
                (fields[0], fields[1], fields[2], fields[3], fields[4]);
            for (name, field) in [("source", source), ("object", object), ("property", property)] {
                if field.is_empty() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("empty {name} field"),
                    });
                }
            }
            let kind = ValueKind::parse(kind_token).ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("unknown kind `{kind_token}` (expected cat or con)"),
            })?;
            let value = Value::parse(kind, raw_value, lineno)?;
            builder.add_observation(source, object, property, value, Some(lineno))?;
        }
        builder.finish()
    }

    /// Serialize observations in insertion order. Re-parsing the output
    /// reproduces the dataset exactly, ids included.
    pub fn write_observations<W: Write>(&self, mut w: W) -> Result<()> {
        for obs in &self.observations {
            let entry = &self.entries[obs.entry_id];
            let source = &self.sources[obs.source_id];
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                source.name, entry.object, entry.property, entry.kind, obs.value
            )?;
        }
        Ok(())
    }

    /// Serialize the ground-truth map as `object \t property \t value` rows,
    /// in entry id order.
    pub fn write_ground_truth<W: Write>(&self, mut w: W) -> Result<()> {
        for (&entry_id, value) in &self.ground_truth {
            let entry = &self.entries[entry_id];
            writeln!(w, "{}\t{}\t{}", entry.object, entry.property, value)?;
        }
        Ok(())
    }
}

/// Parse `object \t property \t value` rows against an existing dataset.
/// Values are typed by the referenced entry's kind. Rejects rows naming
/// unknown entries and second rows for the same entry.
pub fn parse_value_rows<R: BufRead>(reader: R, dataset: &Dataset) -> Result<BTreeMap<usize, Value>> {
    let mut map = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let (object, property, raw_value) = (fields[0], fields[1], fields[2]);
        let entry_id = dataset.lookup_entry(object, property).ok_or_else(|| {
            Error::Reference(format!("line {lineno}: unknown entry ({object}, {property})"))
        })?;
        let value = Value::parse(dataset.entry(entry_id).kind, raw_value, lineno)?;
        if map.insert(entry_id, value).is_some() {
            return Err(Error::Duplicate(format!(
                "line {lineno}: second value for entry ({object}, {property})"
            )));
        }
    }
    Ok(map)
}

/// Attach a ground-truth TSV to a dataset. At most one truth per entry;
/// truths must reference entries that exist.
pub fn parse_ground_truth<R: BufRead>(reader: R, dataset: &mut Dataset) -> Result<()> {
    let map = parse_value_rows(reader, dataset)?;
    dataset.set_ground_truth(map);
    Ok(())
}

/// Incremental dataset construction with dense first-appearance ids.
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    sources: Vec<Source>,
    entries: Vec<Entry>,
    observations: Vec<Observation>,
    source_index: HashMap<String, usize>,
    entry_index: HashMap<(String, String), usize>,
    seen: HashSet<(usize, usize)>,
}

fn check_token(field: &str, what: &str) -> Result<()> {
    if field.is_empty() {
        return Err(Error::Value(format!("empty {what} token")));
    }
    if field.contains('\t') || field.contains('\n') {
        return Err(Error::Value(format!(
            "{what} token contains a tab or newline: {field:?}"
        )));
    }
    Ok(())
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one observation, interning the source and entry.
    /// Rejects duplicate (entry, source) pairs and kind conflicts.
    pub fn add_observation(
        &mut self,
        source_name: &str,
        object: &str,
        property: &str,
        value: Value,
        at_line: Option<usize>,
    ) -> Result<()> {
        let ctx = at_line.map(|l| format!(" (line {l})")).unwrap_or_default();
        check_token(source_name, "source")?;
        check_token(object, "object")?;
        check_token(property, "property")?;
        if let Value::Categorical(token) = &value {
            check_token(token, "value")?;
        }
        if let Value::Continuous(x) = &value {
            if !x.is_finite() {
                return Err(Error::Value(format!("non-finite continuous value{ctx}")));
            }
        }

        let source_id = match self.source_index.get(source_name) {
            Some(&id) => id,
            None => {
                let id = self.sources.len();
                self.sources.push(Source {
                    id,
                    name: source_name.to_string(),
                });
                self.source_index.insert(source_name.to_string(), id);
                id
            }
        };

        let key = (object.to_string(), property.to_string());
        let entry_id = match self.entry_index.get(&key) {
            Some(&id) => {
                let entry = &self.entries[id];
                if entry.kind != value.kind() {
                    return Err(Error::Schema(format!(
                        "entry ({object}, {property}) is {} but got a {} value{ctx}",
                        entry.kind,
                        value.kind()
                    )));
                }
                id
            }
            None => {
                let id = self.entries.len();
                self.entries.push(Entry {
                    id,
                    object: object.to_string(),
                    property: property.to_string(),
                    kind: value.kind(),
                });
                self.entry_index.insert(key, id);
                id
            }
        };

        if !self.seen.insert((entry_id, source_id)) {
            return Err(Error::Duplicate(format!(
                "source {source_name} already has an observation for ({object}, {property}){ctx}"
            )));
        }

        self.observations.push(Observation {
            entry_id,
            source_id,
            value,
        });
        Ok(())
    }

    pub fn finish(self) -> Result<Dataset> {
        let mut by_entry = vec![Vec::new(); self.entries.len()];
        for (i, obs) in self.observations.iter().enumerate() {
            by_entry[obs.entry_id].push(i);
        }
        for list in &mut by_entry {
            list.sort_by_key(|&i| self.observations[i].source_id);
        }
        Ok(Dataset {
            sources: self.sources,
            entries: self.entries,
            observations: self.observations,
            by_entry,
            ground_truth: BTreeMap::new(),
            source_index: self.source_index,
            entry_index: self.entry_index,
        })
    }
}

/// Configuration for the planted-reliability synthetic generator.
///
/// Source `k` answers a categorical entry correctly with probability
/// `reliabilities[k]` (otherwise a uniformly chosen wrong candidate), and
/// answers a continuous entry with truth plus Gaussian noise of standard
/// deviation `noise_scales[k]`. Each (entry, source) pair is independently
/// omitted with probability `missing_rate`; an entry's presence mask is
/// redrawn until at least one source remains.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub reliabilities: Vec<f64>,
    pub noise_scales: Vec<f64>,
    pub categorical_entries: usize,
    pub candidate_count: usize,
    pub continuous_entries: usize,
    pub missing_rate: f64,
}

impl SyntheticConfig {
    fn validate(&self) -> Result<()> {
        let k = self.reliabilities.len();
        if k < 1 {
            return Err(Error::Config("need at least one source".into()));
        }
        if self.noise_scales.len() != k {
            return Err(Error::Config(format!(
                "{} noise scales for {} sources",
                self.noise_scales.len(),
                k
            )));
        }
        for (i, &p) in self.reliabilities.iter().enumerate() {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Config(format!(
                    "reliability of source {i} must lie in (0, 1], got {p}"
                )));
            }
        }
        for (i, &s) in self.noise_scales.iter().enumerate() {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::Config(format!(
                    "noise scale of source {i} must be finite and >= 0, got {s}"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return Err(Error::Config(format!(
                "missing rate must lie in [0, 1), got {}",
                self.missing_rate
            )));
        }
        if self.categorical_entries > 0 && self.candidate_count < 2 {
            return Err(Error::Config(format!(
                "categorical entries need at least 2 candidate values, got {}",
                self.candidate_count
            )));
        }
        if self.categorical_entries + self.continuous_entries == 0 {
            return Err(Error::Config("dataset would have no entries".into()));
        }
        Ok(())
    }
}

/// Generate a dataset with planted truths and per-source reliabilities.
/// Deterministic given (config, seed); ground truth is attached for every
/// entry.
pub fn generate_synthetic(config: &SyntheticConfig, seed: u64) -> Result<Dataset> {
    config.validate()?;
    let k = config.reliabilities.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<Normal<f64>> = config
        .noise_scales
        .iter()
        .map(|&s| Normal::new(0.0, s).expect("validated scale"))
        .collect();

    let candidates: Vec<String> = (0..config.candidate_count).map(|c| format!("c{c}")).collect();
    let source_names: Vec<String> = (0..k).map(|s| format!("src{s:02}")).collect();

    let draw_mask = |rng: &mut ChaCha8Rng| loop {
        let mask: Vec<bool> = (0..k).map(|_| rng.random::<f64>() >= config.missing_rate).collect();
        if mask.iter().any(|&m| m) {
            return mask;
        }
    };

    let mut builder = DatasetBuilder::new();
    let mut truths: Vec<Value> = Vec::new();

    for i in 0..config.categorical_entries {
        let object = format!("cat{i:05}");
        let truth_idx = rng.random_range(0..config.candidate_count);
        let mask = draw_mask(&mut rng);
        for s in 0..k {
            if !mask[s] {
                continue;
            }
            let idx = if rng.random::<f64>() < config.reliabilities[s] {
                truth_idx
            } else {
                let wrong = rng.random_range(0..config.candidate_count - 1);
                if wrong >= truth_idx {
                    wrong + 1
                } else {
                    wrong
                }
            };
            builder.add_observation(
                &source_names[s],
                &object,
                "label",
                Value::Categorical(candidates[idx].clone()),
                None,
            )?;
        }
        truths.push(Value::Categorical(candidates[truth_idx].clone()));
    }

    for j in 0..config.continuous_entries {
        let object = format!("con{j:05}");
        let truth = rng.random_range(0.0..100.0);
        let mask = draw_mask(&mut rng);
        for s in 0..k {
            if !mask[s] {
                continue;
            }
            let value = truth + noise[s].sample(&mut rng);
            builder.add_observation(&source_names[s], &object, "amount", Value::Continuous(value), None)?;
        }
        truths.push(Value::Continuous(truth));
    }

    let mut dataset = builder.finish()?;
    let truth_map: BTreeMap<usize, Value> = truths.into_iter().enumerate().collect();
    dataset.set_ground_truth(truth_map);
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Dataset> {
        Dataset::parse_observations(text.as_bytes())
    }

    #[test]
    fn parses_two_sources_one_entry() {
        let ds = parse("s1\tobj\tprop\tcon\t1.5\ns2\tobj\tprop\tcon\t2.5\n").unwrap();
        assert_eq!(ds.num_sources(), 2);
        assert_eq!(ds.num_entries(), 1);
        let values: Vec<f64> = ds.entry_numbers(0);
        assert_eq!(values, vec![1.5, 2.5]);
    }

    #[test]
    fn rejects_duplicate_observation() {
        let err = parse("s1\to\tp\tcat\ta\ns2\to\tp\tcat\tb\ns1\to\tp\tcat\tc\n").unwrap_err();
        assert!(matches!(err, Error::Duplicate(_)), "{err}");
    }

    #[test]
    fn rejects_wrong_column_count() {
        let err = parse("s1\to\tp\tcat\ta\ns2\to\tp\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn rejects_kind_conflict() {
        let err = parse("s1\to\tp\tcat\ta\ns2\to\tp\tcon\t2.0\n").unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn rejects_non_real_continuous() {
        let err = parse("s1\to\tp\tcon\tabc\n").unwrap_err();
        assert!(matches!(err, Error::Value(_)), "{err}");
        let err = parse("s1\to\tp\tcon\tinf\n").unwrap_err();
        assert!(matches!(err, Error::Value(_)), "{err}");
    }

    #[test]
    fn rejects_unknown_kind() {
        let err = parse("s1\to\tp\tnum\t1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn ground_truth_attaches() {
        let mut ds = parse("s1\to\tp\tcat\ta\ns2\to\tp\tcat\tb\n").unwrap();
        parse_ground_truth("o\tp\ta\n".as_bytes(), &mut ds).unwrap();
        assert_eq!(ds.ground_truth().len(), 1);
        assert_eq!(ds.ground_truth()[&0], Value::Categorical("a".into()));
    }

    #[test]
    fn ground_truth_rejects_conflicting_rows() {
        let mut ds = parse("s1\to\tp\tcat\ta\n").unwrap();
        let err = parse_ground_truth("o\tp\ta\no\tp\tb\n".as_bytes(), &mut ds).unwrap_err();
        assert!(matches!(err, Error::Duplicate(_)), "{err}");
    }

    #[test]
    fn ground_truth_rejects_unknown_entry() {
        let mut ds = parse("s1\to\tp\tcat\ta\n").unwrap();
        let err = parse_ground_truth("o\tq\ta\n".as_bytes(), &mut ds).unwrap_err();
        assert!(matches!(err, Error::Reference(_)), "{err}");
    }

    #[test]
    fn observation_kinds_match_entry_kinds() {
        let ds = parse("s1\to\tp\tcat\ta\ns2\to\tp\tcat\tb\ns1\to2\tp\tcon\t5\n").unwrap();
        for obs in ds.observations() {
            assert_eq!(obs.value.kind(), ds.entry(obs.entry_id).kind);
        }
    }

    fn small_config() -> SyntheticConfig {
        SyntheticConfig {
            reliabilities: vec![1.0],
            noise_scales: vec![0.0],
            categorical_entries: 5,
            candidate_count: 3,
            continuous_entries: 0,
            missing_rate: 0.0,
        }
    }

    #[test]
    fn perfect_source_always_matches_truth() {
        let ds = generate_synthetic(&small_config(), 11).unwrap();
        for obs in ds.observations() {
            assert_eq!(&ds.ground_truth()[&obs.entry_id], &obs.value);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let config = SyntheticConfig {
            reliabilities: vec![0.9, 0.6],
            noise_scales: vec![0.1, 1.0],
            categorical_entries: 20,
            candidate_count: 4,
            continuous_entries: 20,
            missing_rate: 0.2,
        };
        let a = generate_synthetic(&config, 7).unwrap();
        let b = generate_synthetic(&config, 7).unwrap();
        assert_eq!(a, b);
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        a.write_observations(&mut buf_a).unwrap();
        b.write_observations(&mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut config = small_config();
        config.reliabilities.clear();
        config.noise_scales.clear();
        assert!(matches!(generate_synthetic(&config, 0), Err(Error::Config(_))));

        let mut config = small_config();
        config.candidate_count = 1;
        assert!(matches!(generate_synthetic(&config, 0), Err(Error::Config(_))));

        let mut config = small_config();
        config.missing_rate = 1.0;
        assert!(matches!(generate_synthetic(&config, 0), Err(Error::Config(_))));
    }

    /// Empirical per-source accuracy tracks the planted reliabilities.
    #[test]
    fn planted_reliabilities_recovered_by_counting() {
        let config = SyntheticConfig {
            reliabilities: vec![0.9, 0.9, 0.9, 0.55, 0.55, 0.55, 0.55, 0.55, 0.55, 0.55],
            noise_scales: vec![0.0; 10],
            categorical_entries: 2000,
            candidate_count: 4,
            continuous_entries: 0,
            missing_rate: 0.0,
        };
        let ds = generate_synthetic(&config, 3).unwrap();
        let mut hits = vec![0usize; 10];
        let mut totals = vec![0usize; 10];
        for obs in ds.observations() {
            totals[obs.source_id] += 1;
            if ds.ground_truth()[&obs.entry_id] == obs.value {
                hits[obs.source_id] += 1;
            }
        }
        for s in 0..10 {
            let rate = hits[s] as f64 / totals[s] as f64;
            assert!(
                (rate - config.reliabilities[s]).abs() <= 0.03,
                "source {s}: empirical {rate} vs planted {}",
                config.reliabilities[s]
            );
        }
    }

    #[test]
    fn entry_with_single_observation_is_allowed() {
        let ds = parse("s1\to\tp\tcon\t3.5\n").unwrap();
        assert_eq!(ds.num_entries(), 1);
        assert_eq!(ds.entry_observations(0).count(), 1);
    }

    proptest! {
        /// serialize -> parse reproduces the dataset exactly, ids included.
        #[test]
        fn roundtrip_through_tsv(seed in 0u64..500) {
            let config = SyntheticConfig {
                reliabilities: vec![0.8, 0.5, 0.95],
                noise_scales: vec![0.3, 2.0, 0.05],
                categorical_entries: 6,
                candidate_count: 3,
                continuous_entries: 6,
                missing_rate: 0.25,
            };
            let ds = generate_synthetic(&config, seed).unwrap();
            let mut obs_buf = Vec::new();
            ds.write_observations(&mut obs_buf).unwrap();
            let mut reparsed = Dataset::parse_observations(&obs_buf[..]).unwrap();
            let mut truth_buf = Vec::new();
            ds.write_ground_truth(&mut truth_buf).unwrap();
            parse_ground_truth(&truth_buf[..], &mut reparsed).unwrap();
            prop_assert_eq!(ds, reparsed);
        }

        /// Tokens with internal spaces survive the TSV round trip.
        #[test]
        fn roundtrip_with_spacey_tokens(name in "[a-z][a-z ]{0,6}[a-z]", v in -100.0f64..100.0) {
            let mut builder = DatasetBuilder::new();
            builder.add_observation(&name, "an object", "a property", Value::Continuous(v), None).unwrap();
            builder.add_observation("other", "an object", "a property", Value::Continuous(v + 1.0), None).unwrap();
            let ds = builder.finish().unwrap();
            let mut buf = Vec::new();
            ds.write_observations(&mut buf).unwrap();
            let reparsed = Dataset::parse_observations(&buf[..]).unwrap();
            prop_assert_eq!(ds, reparsed);
        }
    }
}
