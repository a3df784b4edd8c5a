//! Feedforward memory network: one trainable memory vector per source,
//! scored against observation vectors by a memory-weighted dot product and
//! normalized per entry, so an entry's credibilities sum to one.

use crate::error::{Error, Result};
use crate::neural::{dot, softmax, ParamId, ParamStore};

/// One observation presented to a model: the claiming source and the
/// observation's embedding vector. Embeddings stay fixed during training;
/// gradient flows only into the memories.
#[derive(Debug, Clone, Copy)]
pub struct ObsInput<'a> {
    pub source: usize,
    pub x: &'a [f64],
}

pub const MEMORY_INIT: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct FfmnModel {
    memories: ParamId,
    dim: usize,
    num_sources: usize,
}

/// Cached activations of one entry's forward pass.
#[derive(Debug, Clone)]
pub struct FfmnForward {
    pub scores: Vec<f64>,
    pub credibilities: Vec<f64>,
}

impl FfmnModel {
    /// Register a K x dim memory bank. Memories start at a small constant
    /// so initial credibilities are near-uniform.
    pub fn new(store: &mut ParamStore, num_sources: usize, dim: usize) -> FfmnModel {
        let memories = store.register_const("memories", num_sources, dim, MEMORY_INIT);
        FfmnModel { memories, dim, num_sources }
    }

    /// Rebind to a store loaded from a checkpoint.
    pub fn from_store(store: &ParamStore) -> Result<FfmnModel> {
        let memories = store
            .find("memories")
            .ok_or_else(|| Error::Lookup("checkpoint has no `memories` parameter".into()))?;
        let (num_sources, dim) = store.shape(memories);
        Ok(FfmnModel { memories, dim, num_sources })
    }

    pub fn memories(&self) -> ParamId {
        self.memories
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_sources(&self) -> usize {
        self.num_sources
    }

    fn check_inputs(&self, obs: &[ObsInput]) -> Result<()> {
        if obs.is_empty() {
            return Err(Error::Argument("entry has no observations".into()));
        }
        for o in obs {
            if o.source >= self.num_sources {
                return Err(Error::Lookup(format!(
                    "no memory for source {} (bank holds {})",
                    o.source, self.num_sources
                )));
            }
            if o.x.len() != self.dim {
                return Err(Error::Argument(format!(
                    "observation vector length {} does not match memory length {}",
                    o.x.len(),
                    self.dim
                )));
            }
        }
        Ok(())
    }

    /// Per-entry credibilities: score each observation by the sum of the
    /// element-wise product of its source memory and its vector, then take
    /// softmax over the entry's observations.
    pub fn forward(&self, store: &ParamStore, obs: &[ObsInput]) -> Result<FfmnForward> {
        self.check_inputs(obs)?;
        let scores: Vec<f64> = obs
            .iter()
            .map(|o| dot(store.row(self.memories, o.source), o.x))
            .collect();
        let credibilities = softmax(&scores);
        Ok(FfmnForward { scores, credibilities })
    }

    /// Accumulate exact gradients into the present sources' memories given
    /// the upstream gradient with respect to the credibilities.
    pub fn backward(
        &self,
        store: &mut ParamStore,
        obs: &[ObsInput],
        forward: &FfmnForward,
        upstream: &[f64],
    ) {
        assert_eq!(upstream.len(), obs.len());
        let r = &forward.credibilities;
        let inner: f64 = upstream.iter().zip(r).map(|(u, ri)| u * ri).sum();
        let mem_index = store.index(self.memories);
        let (_, grads) = store.values_and_grads_mut();
        let grad = &mut grads[mem_index];
        for (j, o) in obs.iter().enumerate() {
            let d_score = r[j] * (upstream[j] - inner);
            let row = &mut grad[o.source * self.dim..(o.source + 1) * self.dim];
            for (g, &x) in row.iter_mut().zip(o.x) {
                *g += d_score * x;
            }
        }
    }
}
