//! Token vocabulary over namespaced source/object/property/value tokens,
//! a skip-gram trainer with negative sampling, and observation-vector
//! assembly by concatenation.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Entry, Value};
use crate::error::{Error, Result};
use crate::neural::sigmoid;

pub fn source_token(name: &str) -> String {
    format!("s:{name}")
}

pub fn object_token(object: &str) -> String {
    format!("o:{object}")
}

pub fn property_token(property: &str) -> String {
    format!("p:{property}")
}

/// Continuous values are tokenized by their canonical decimal rendering;
/// categorical values by their token.
pub fn value_token(value: &Value) -> String {
    format!("v:{value}")
}

/// Token -> dense index map. Namespace prefixes keep source, object,
/// property, and value tokens from colliding.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Vocabulary {
        Vocabulary::default()
    }

    /// Vocabulary over every token the dataset can produce, in a fixed
    /// deterministic order.
    pub fn from_dataset(dataset: &Dataset) -> Vocabulary {
        let mut vocab = Vocabulary::new();
        for source in dataset.sources() {
            vocab.intern(&source_token(&source.name));
        }
        for entry in dataset.entries() {
            vocab.intern(&object_token(&entry.object));
            vocab.intern(&property_token(&entry.property));
            for obs in dataset.entry_observations(entry.id) {
                vocab.intern(&value_token(&obs.value));
            }
        }
        vocab
    }

    pub fn intern(&mut self, token: &str) -> usize {
        if let Some(&i) = self.index.get(token) {
            return i;
        }
        let i = self.tokens.len();
        self.tokens.push(token.to_string());
        self.index.insert(token.to_string(), i);
        i
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// One context window per observation: the source token plus the
/// observation's object, property, and value tokens. Every token in a
/// window co-predicts every other token of the same window.
pub fn build_contexts(dataset: &Dataset, vocab: &Vocabulary) -> Result<Vec<[usize; 4]>> {
    let mut windows = Vec::new();
    let lookup = |token: String| {
        vocab
            .index_of(&token)
            .ok_or_else(|| Error::Lookup(format!("token `{token}` not in vocabulary")))
    };
    for entry in dataset.entries() {
        let o = lookup(object_token(&entry.object))?;
        let p = lookup(property_token(&entry.property))?;
        for obs in dataset.entry_observations(entry.id) {
            let s = lookup(source_token(&dataset.source(obs.source_id).name))?;
            let v = lookup(value_token(&obs.value))?;
            windows.push([s, o, p, v]);
        }
    }
    Ok(windows)
}

/// Skip-gram training settings.
#[derive(Debug, Clone)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub learning_rate: f64,
    pub negatives: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 50,
            learning_rate: 0.03,
            negatives: 5,
            epochs: 5,
            seed: 0,
        }
    }
}

/// Token index -> vector table.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> EmbeddingTable {
        EmbeddingTable { dim, vectors }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, index: usize) -> &[f64] {
        &self.vectors[index]
    }
}

/// Loss of one (center, context) pair with fixed negative samples:
/// -ln s(v.u) - sum_n ln s(-v.u_n). Stable for large magnitudes.
pub(crate) fn pair_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    fn softplus(z: f64) -> f64 {
        if z > 30.0 {
            z
        } else if z < -30.0 {
            z.exp()
        } else {
            (1.0 + z.exp()).ln()
        }
    }
    let mut loss = softplus(-dot_slices(center, context));
    for n in negatives {
        loss += softplus(dot_slices(center, n));
    }
    loss
}

/// Analytic gradients of [`pair_loss`] with respect to the center vector,
/// the context output vector, and each negative output vector.
pub(crate) fn pair_gradients(
    center: &[f64],
    context: &[f64],
    negatives: &[&[f64]],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let dim = center.len();
    let mut d_center = vec![0.0; dim];
    let g_pos = sigmoid(dot_slices(center, context)) - 1.0;
    let d_context: Vec<f64> = center.iter().map(|c| g_pos * c).collect();
    for (dc, &u) in d_center.iter_mut().zip(context) {
        *dc += g_pos * u;
    }
    let mut d_negatives = Vec::with_capacity(negatives.len());
    for n in negatives {
        let g_neg = sigmoid(dot_slices(center, n));
        d_negatives.push(center.iter().map(|c| g_neg * c).collect());
        for (dc, &u) in d_center.iter_mut().zip(*n) {
            *dc += g_neg * u;
        }
    }
    (d_center, d_context, d_negatives)
}

fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Train skip-gram embeddings with negative sampling over the windows.
/// Negatives are drawn from the unigram distribution raised to 0.75.
/// Deterministic given the seed; single-threaded.
pub fn train_skipgram(
    windows: &[[usize; 4]],
    vocab_size: usize,
    config: &SkipGramConfig,
) -> Result<EmbeddingTable> {
    if vocab_size == 0 || windows.is_empty() {
        return Err(Error::Argument("nothing to train on: empty vocabulary".into()));
    }
    if config.dim == 0 {
        return Err(Error::Argument("embedding dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut counts = vec![0u64; vocab_size];
    for window in windows {
        for &t in window {
            if t >= vocab_size {
                return Err(Error::Lookup(format!("token index {t} out of range")));
            }
            counts[t] += 1;
        }
    }
    // Cumulative unigram^0.75 table for negative sampling.
    let mut cumulative = Vec::with_capacity(vocab_size);
    let mut acc = 0.0;
    for &c in &counts {
        acc += (c as f64).powf(0.75);
        cumulative.push(acc);
    }
    let total = acc;

    let dim = config.dim;
    let mut input: Vec<Vec<f64>> = (0..vocab_size)
        .map(|_| (0..dim).map(|_| rng.random_range(-0.5 / dim as f64..0.5 / dim as f64)).collect())
        .collect();
    let mut output: Vec<Vec<f64>> = vec![vec![0.0; dim]; vocab_size];

    let lr = config.learning_rate;
    let mut d_center = vec![0.0; dim];
    for _ in 0..config.epochs {
        for window in windows {
            for center_pos in 0..4 {
                let center = window[center_pos];
                for ctx_pos in 0..4 {
                    if ctx_pos == center_pos {
                        continue;
                    }
                    let context = window[ctx_pos];
                    d_center.iter_mut().for_each(|x| *x = 0.0);

                    let g_pos = sigmoid(dot_slices(&input[center], &output[context])) - 1.0;
                    for d in 0..dim {
                        d_center[d] += g_pos * output[context][d];
                    }
                    for d in 0..dim {
                        output[context][d] -= lr * g_pos * input[center][d];
                    }

                    for _ in 0..config.negatives {
                        let u = rng.random::<f64>() * total;
                        let target = cumulative.partition_point(|&c| c <= u).min(vocab_size - 1);
                        if target == context {
                            continue;
                        }
                        let g_neg = sigmoid(dot_slices(&input[center], &output[target]));
                        for d in 0..dim {
                            d_center[d] += g_neg * output[target][d];
                        }
                        for d in 0..dim {
                            output[target][d] -= lr * g_neg * input[center][d];
                        }
                    }

                    for d in 0..dim {
                        input[center][d] -= lr * d_center[d];
                    }
                }
            }
        }
    }

    for (i, v) in input.iter().enumerate() {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite embedding for token index {i}"
            )));
        }
    }
    Ok(EmbeddingTable::new(dim, input))
}

/// Observation vector: concatenation of the object, property, and value
/// token vectors, length 3 * dim. Out-of-vocabulary tokens are an error,
/// never a silent zero vector.
pub fn observation_vector(
    table: &EmbeddingTable,
    vocab: &Vocabulary,
    entry: &Entry,
    value: &Value,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(3 * table.dim());
    for token in [
        object_token(&entry.object),
        property_token(&entry.property),
        value_token(value),
    ] {
        let idx = vocab
            .index_of(&token)
            .ok_or_else(|| Error::Lookup(format!("token `{token}` not in vocabulary")))?;
        out.extend_from_slice(table.vector(idx));
    }
    Ok(out)
}

/// Write embeddings as `|V| d` followed by one `token v_1 ... v_d` line
/// per token, in vocabulary order.
pub fn write_embeddings<W: Write>(
    mut w: W,
    vocab: &Vocabulary,
    table: &EmbeddingTable,
) -> Result<()> {
    writeln!(w, "{} {}", vocab.len(), table.dim())?;
    for i in 0..vocab.len() {
        let fields: Vec<String> = table.vector(i).iter().map(|x| format!("{x}")).collect();
        writeln!(w, "{} {}", vocab.token(i), fields.join(" "))?;
    }
    Ok(())
}

/// Read an embedding file back. The vector occupies the last `d`
/// space-separated fields of each line; everything before them is the
/// token, so tokens containing spaces survive.
pub fn read_embeddings<R: BufRead>(reader: R) -> Result<(Vocabulary, EmbeddingTable)> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "empty embedding file".into() })??;
    let mut parts = header.split_whitespace();
    let count: usize = parts
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| Error::Parse { line: 1, message: "bad vocabulary size".into() })?;
    let dim: usize = parts
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| Error::Parse { line: 1, message: "bad dimension".into() })?;

    let mut vocab = Vocabulary::new();
    let mut vectors = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.rsplitn(dim + 1, ' ').collect();
        if parts.len() != dim + 1 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected a token and {dim} values"),
            });
        }
        let token = parts[dim];
        if token.is_empty() {
            return Err(Error::Parse { line: lineno, message: "empty token".into() });
        }
        // rsplitn yields fields right-to-left.
        let mut vector = Vec::with_capacity(dim);
        for field in parts[..dim].iter().rev() {
            let x: f64 = field.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad number `{field}`"),
            })?;
            vector.push(x);
        }
        let index = vocab.intern(token);
        if index != vectors.len() {
            return Err(Error::Duplicate(format!("line {lineno}: token `{token}` repeated")));
        }
        vectors.push(vector);
    }
    if vectors.len() != count {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declared {count} tokens, file has {}", vectors.len()),
        });
    }
    Ok((vocab, EmbeddingTable::new(dim, vectors)))
}
