//! Feedback memory network: an LSTM over an entry's observation sequence
//! (canonical order: ascending source id) where every gate also reads the
//! current observation's source memory. Credibilities are read from the
//! final hidden state, either through an explicit readout matrix or, in
//! literal mode, directly from the hidden vector (hidden size = source
//! count). Absent sources are masked out of the softmax.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffmn::{ObsInput, MEMORY_INIT};
use crate::neural::{matvec_add, matvec_t_add, outer_add, sigmoid, softmax, ParamId, ParamStore};

pub const WEIGHT_INIT_HALF_RANGE: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct FbmnConfig {
    pub hidden: usize,
    pub literal_readout: bool,
}

impl Default for FbmnConfig {
    fn default() -> Self {
        FbmnConfig { hidden: 16, literal_readout: false }
    }
}

#[derive(Debug, Clone)]
pub struct FbmnModel {
    w_ix: ParamId,
    w_ih: ParamId,
    w_ic: ParamId,
    w_im: ParamId,
    b_i: ParamId,
    w_fx: ParamId,
    w_fh: ParamId,
    w_fc: ParamId,
    w_fm: ParamId,
    b_f: ParamId,
    w_cx: ParamId,
    w_ch: ParamId,
    w_cm: ParamId,
    b_c: ParamId,
    w_ox: ParamId,
    w_oh: ParamId,
    w_oc: ParamId,
    w_om: ParamId,
    b_o: ParamId,
    readout: Option<ParamId>,
    memories: ParamId,
    hidden: usize,
    input_dim: usize,
    mem_dim: usize,
    num_sources: usize,
}

/// Cached activations of one entry's forward pass, one row per time step.
#[derive(Debug, Clone)]
pub struct FbmnForward {
    i: Vec<Vec<f64>>,
    f: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
    o: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    tanh_c: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
    pub scores: Vec<f64>,
    pub credibilities: Vec<f64>,
}

impl FbmnModel {
    /// Register all gate weights, the readout, and the memory bank.
    /// In literal mode the hidden size is forced to the source count and
    /// the readout matrix is omitted.
    pub fn new(
        store: &mut ParamStore,
        num_sources: usize,
        input_dim: usize,
        config: &FbmnConfig,
        rng: &mut ChaCha8Rng,
    ) -> FbmnModel {
        let hidden = if config.literal_readout { num_sources } else { config.hidden };
        assert!(hidden > 0, "hidden size must be positive");
        let mem_dim = hidden;
        let mut mat = |name: &str, rows: usize, cols: usize| {
            store.register_uniform(name, rows, cols, WEIGHT_INIT_HALF_RANGE, rng)
        };
        let w_ix = mat("w_ix", hidden, input_dim);
        let w_ih = mat("w_ih", hidden, hidden);
        let w_ic = mat("w_ic", hidden, hidden);
        let w_im = mat("w_im", hidden, mem_dim);
        let b_i = mat("b_i", 1, hidden);
        let w_fx = mat("w_fx", hidden, input_dim);
        let w_fh = mat("w_fh", hidden, hidden);
        let w_fc = mat("w_fc", hidden, hidden);
        let w_fm = mat("w_fm", hidden, mem_dim);
        let b_f = mat("b_f", 1, hidden);
        let w_cx = mat("w_cx", hidden, input_dim);
        let w_ch = mat("w_ch", hidden, hidden);
        let w_cm = mat("w_cm", hidden, mem_dim);
        let b_c = mat("b_c", 1, hidden);
        let w_ox = mat("w_ox", hidden, input_dim);
        let w_oh = mat("w_oh", hidden, hidden);
        let w_oc = mat("w_oc", hidden, hidden);
        let w_om = mat("w_om", hidden, mem_dim);
        let b_o = mat("b_o", 1, hidden);
        let readout = if config.literal_readout {
            None
        } else {
            Some(mat("readout", num_sources, hidden))
        };
        let memories = store.register_const("memories", num_sources, mem_dim, MEMORY_INIT);
        FbmnModel {
            w_ix, w_ih, w_ic, w_im, b_i,
            w_fx, w_fh, w_fc, w_fm, b_f,
            w_cx, w_ch, w_cm, b_c,
            w_ox, w_oh, w_oc, w_om, b_o,
            readout,
            memories,
            hidden,
            input_dim,
            mem_dim,
            num_sources,
        }
    }

    /// Rebind to a store loaded from a checkpoint.
    pub fn from_store(store: &ParamStore) -> Result<FbmnModel> {
        let find = |name: &str| {
            store
                .find(name)
                .ok_or_else(|| Error::Lookup(format!("checkpoint has no `{name}` parameter")))
        };
        let w_ix = find("w_ix")?;
        let (hidden, input_dim) = store.shape(w_ix);
        let memories = find("memories")?;
        let (num_sources, mem_dim) = store.shape(memories);
        Ok(FbmnModel {
            w_ix,
            w_ih: find("w_ih")?,
            w_ic: find("w_ic")?,
            w_im: find("w_im")?,
            b_i: find("b_i")?,
            w_fx: find("w_fx")?,
            w_fh: find("w_fh")?,
            w_fc: find("w_fc")?,
            w_fm: find("w_fm")?,
            b_f: find("b_f")?,
            w_cx: find("w_cx")?,
            w_ch: find("w_ch")?,
            w_cm: find("w_cm")?,
            b_c: find("b_c")?,
            w_ox: find("w_ox")?,
            w_oh: find("w_oh")?,
            w_oc: find("w_oc")?,
            w_om: find("w_om")?,
            b_o: find("b_o")?,
            readout: store.find("readout"),
            memories,
            hidden,
            input_dim,
            mem_dim,
            num_sources,
        })
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn num_sources(&self) -> usize {
        self.num_sources
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn is_literal(&self) -> bool {
        self.readout.is_none()
    }

    pub fn memories(&self) -> ParamId {
        self.memories
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
            if o.x.len() != self.input_dim {
                return Err(Error::Argument(format!(
                    "observation vector length {} does not match input size {}",
                    o.x.len(),
                    self.input_dim
                )));
            }
        }
        Ok(())
    }

    /// Run the gated recurrence over the entry's observations and softmax
    /// the per-source scores of the present sources.
    pub fn forward(&self, store: &ParamStore, obs: &[ObsInput]) -> Result<FbmnForward> {
        self.check_inputs(obs)?;
        let t_max = obs.len();
        let hd = self.hidden;
        let mut fwd = FbmnForward {
            i: Vec::with_capacity(t_max),
            f: Vec::with_capacity(t_max),
            g: Vec::with_capacity(t_max),
            o: Vec::with_capacity(t_max),
            c: Vec::with_capacity(t_max),
            tanh_c: Vec::with_capacity(t_max),
            h: Vec::with_capacity(t_max),
            scores: Vec::new(),
            credibilities: Vec::new(),
        };
        let zeros = vec![0.0; hd];
        let mut h_prev: Vec<f64> = zeros.clone();
        let mut c_prev: Vec<f64> = zeros.clone();

        let gate = |store: &ParamStore,
                    w_x: ParamId,
                    w_h: ParamId,
                    w_c: Option<ParamId>,
                    w_m: ParamId,
                    b: ParamId,
                    x: &[f64],
                    h_prev: &[f64],
                    c_prev: &[f64],
                    m: &[f64]| {
            let mut act = store.value(b).to_vec();
            matvec_add(store.value(w_x), hd, self.input_dim, x, &mut act);
            matvec_add(store.value(w_h), hd, hd, h_prev, &mut act);
            if let Some(w_c) = w_c {
                matvec_add(store.value(w_c), hd, hd, c_prev, &mut act);
            }
            matvec_add(store.value(w_m), hd, self.mem_dim, m, &mut act);
            act
        };

        for o in obs {
            let x = o.x;
            let m = store.row(self.memories, o.source);
            let mut i_t = gate(store, self.w_ix, self.w_ih, Some(self.w_ic), self.w_im, self.b_i, x, &h_prev, &c_prev, m);
            i_t.iter_mut().for_each(|a| *a = sigmoid(*a));
            let mut f_t = gate(store, self.w_fx, self.w_fh, Some(self.w_fc), self.w_fm, self.b_f, x, &h_prev, &c_prev, m);
            f_t.iter_mut().for_each(|a| *a = sigmoid(*a));
            let mut g_t = gate(store, self.w_cx, self.w_ch, None, self.w_cm, self.b_c, x, &h_prev, &c_prev, m);
            g_t.iter_mut().for_each(|a| *a = a.tanh());
            let c_t: Vec<f64> = (0..hd).map(|d| f_t[d] * c_prev[d] + i_t[d] * g_t[d]).collect();
            // The output gate peeks at the previous cell state, not the new one.
            let mut o_t = gate(store, self.w_ox, self.w_oh, Some(self.w_oc), self.w_om, self.b_o, x, &h_prev, &c_prev, m);
            o_t.iter_mut().for_each(|a| *a = sigmoid(*a));
            let tanh_c: Vec<f64> = c_t.iter().map(|c| c.tanh()).collect();
            let h_t: Vec<f64> = (0..hd).map(|d| o_t[d] * tanh_c[d]).collect();

            h_prev = h_t.clone();
            c_prev = c_t.clone();
            fwd.i.push(i_t);
            fwd.f.push(f_t);
            fwd.g.push(g_t);
            fwd.o.push(o_t);
            fwd.c.push(c_t);
            fwd.tanh_c.push(tanh_c);
            fwd.h.push(h_t);
        }

        let h_last = &fwd.h[t_max - 1];
        fwd.scores = match self.readout {
            Some(readout) => obs
                .iter()
                .map(|o| {
                    store
                        .row(readout, o.source)
                        .iter()
                        .zip(h_last)
                        .map(|(w, h)| w * h)
                        .sum()
                })
                .collect(),
            None => obs.iter().map(|o| h_last[o.source]).collect(),
        };
        fwd.credibilities = softmax(&fwd.scores);
        Ok(fwd)
    }

    /// Backpropagation through time: gradients into every gate weight, the
    /// readout, and the memories of present sources (the memory used at
    /// step t only collects gradient from step t).
    pub fn backward(
        &self,
        store: &mut ParamStore,
        obs: &[ObsInput],
        fwd: &FbmnForward,
        upstream: &[f64],
    ) {
        assert_eq!(upstream.len(), obs.len());
        let t_max = obs.len();
        let hd = self.hidden;
        let xd = self.input_dim;
        let md = self.mem_dim;

        let r = &fwd.credibilities;
        let inner: f64 = upstream.iter().zip(r).map(|(u, ri)| u * ri).sum();
        let d_scores: Vec<f64> = (0..t_max).map(|j| r[j] * (upstream[j] - inner)).collect();

        let ix = store.index(self.w_ix);
        let ih = store.index(self.w_ih);
        let ic = store.index(self.w_ic);
        let im = store.index(self.w_im);
        let ib = store.index(self.b_i);
        let fx = store.index(self.w_fx);
        let fh = store.index(self.w_fh);
        let fc = store.index(self.w_fc);
        let fm = store.index(self.w_fm);
        let fb = store.index(self.b_f);
        let cx = store.index(self.w_cx);
        let ch = store.index(self.w_ch);
        let cm = store.index(self.w_cm);
        let cb = store.index(self.b_c);
        let ox = store.index(self.w_ox);
        let oh = store.index(self.w_oh);
        let oc = store.index(self.w_oc);
        let om = store.index(self.w_om);
        let ob = store.index(self.b_o);
        let ro = self.readout.map(|p| store.index(p));
        let mem = store.index(self.memories);

        let (values, grads) = store.values_and_grads_mut();

        let zeros = vec![0.0; hd];
        let mut dh = vec![0.0; hd];
        let h_last = &fwd.h[t_max - 1];
        match ro {
            Some(ro) => {
                for (j, o) in obs.iter().enumerate() {
                    let row = &values[ro][o.source * hd..(o.source + 1) * hd];
                    let g_row = &mut grads[ro][o.source * hd..(o.source + 1) * hd];
                    for d in 0..hd {
                        g_row[d] += d_scores[j] * h_last[d];
                        dh[d] += d_scores[j] * row[d];
                    }
                }
            }
            None => {
                for (j, o) in obs.iter().enumerate() {
                    dh[o.source] += d_scores[j];
                }
            }
        }

        let mut dc_next = vec![0.0; hd];
        let mut da_i = vec![0.0; hd];
        let mut da_f = vec![0.0; hd];
        let mut da_g = vec![0.0; hd];
        let mut da_o = vec![0.0; hd];
        let mut dc = vec![0.0; hd];

        for t in (0..t_max).rev() {
            let i_t = &fwd.i[t];
            let f_t = &fwd.f[t];
            let g_t = &fwd.g[t];
            let o_t = &fwd.o[t];
            let tanh_c = &fwd.tanh_c[t];
            let c_prev: &[f64] = if t == 0 { &zeros } else { &fwd.c[t - 1] };
            let h_prev: &[f64] = if t == 0 { &zeros } else { &fwd.h[t - 1] };
            let x = obs[t].x;
            let source = obs[t].source;
            let m = &values[mem][source * md..(source + 1) * md];

            for d in 0..hd {
                let do_d = dh[d] * tanh_c[d];
                da_o[d] = do_d * o_t[d] * (1.0 - o_t[d]);
                let dc_d = dh[d] * o_t[d] * (1.0 - tanh_c[d] * tanh_c[d]) + dc_next[d];
                dc[d] = dc_d;
                da_f[d] = dc_d * c_prev[d] * f_t[d] * (1.0 - f_t[d]);
                da_i[d] = dc_d * g_t[d] * i_t[d] * (1.0 - i_t[d]);
                da_g[d] = dc_d * i_t[d] * (1.0 - g_t[d] * g_t[d]);
            }

            outer_add(&da_i, x, &mut grads[ix]);
            outer_add(&da_i, h_prev, &mut grads[ih]);
            outer_add(&da_i, c_prev, &mut grads[ic]);
            outer_add(&da_i, m, &mut grads[im]);
            for d in 0..hd {
                grads[ib][d] += da_i[d];
            }
            outer_add(&da_f, x, &mut grads[fx]);
            outer_add(&da_f, h_prev, &mut grads[fh]);
            outer_add(&da_f, c_prev, &mut grads[fc]);
            outer_add(&da_f, m, &mut grads[fm]);
            for d in 0..hd {
                grads[fb][d] += da_f[d];
            }
            outer_add(&da_g, x, &mut grads[cx]);
            outer_add(&da_g, h_prev, &mut grads[ch]);
            outer_add(&da_g, m, &mut grads[cm]);
            for d in 0..hd {
                grads[cb][d] += da_g[d];
            }
            outer_add(&da_o, x, &mut grads[ox]);
            outer_add(&da_o, h_prev, &mut grads[oh]);
            outer_add(&da_o, c_prev, &mut grads[oc]);
            outer_add(&da_o, m, &mut grads[om]);
            for d in 0..hd {
                grads[ob][d] += da_o[d];
            }

            {
                let m_grad = &mut grads[mem][source * md..(source + 1) * md];
                matvec_t_add(&values[im], hd, md, &da_i, m_grad);
                matvec_t_add(&values[fm], hd, md, &da_f, m_grad);
                matvec_t_add(&values[cm], hd, md, &da_g, m_grad);
                matvec_t_add(&values[om], hd, md, &da_o, m_grad);
            }

            let mut dh_prev = vec![0.0; hd];
            matvec_t_add(&values[ih], hd, hd, &da_i, &mut dh_prev);
            matvec_t_add(&values[fh], hd, hd, &da_f, &mut dh_prev);
            matvec_t_add(&values[ch], hd, hd, &da_g, &mut dh_prev);
            matvec_t_add(&values[oh], hd, hd, &da_o, &mut dh_prev);

            let mut dc_prev: Vec<f64> = (0..hd).map(|d| dc[d] * f_t[d]).collect();
            matvec_t_add(&values[ic], hd, hd, &da_i, &mut dc_prev);
            matvec_t_add(&values[fc], hd, hd, &da_f, &mut dc_prev);
            matvec_t_add(&values[oc], hd, hd, &da_o, &mut dc_prev);

            dh = dh_prev;
            dc_next = dc_prev;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::check_gradients;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inputs<'a>(xs: &'a [Vec<f64>], sources: &[usize]) -> Vec<ObsInput<'a>> {
        sources.iter().zip(xs).map(|(&source, x)| ObsInput { source, x }).collect()
    }

    fn random_inputs(
        rng: &mut ChaCha8Rng,
        t: usize,
        k: usize,
        dim: usize,
    ) -> (Vec<Vec<f64>>, Vec<usize>) {
        // distinct sources in ascending order, one per step
        let mut sources: Vec<usize> = (0..k).collect();
        for i in 0..sources.len() {
            let j = rng.random_range(i..sources.len());
            sources.swap(i, j);
        }
        sources.truncate(t);
        sources.sort_unstable();
        let xs = (0..t)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        (xs, sources)
    }

    #[test]
    fn single_observation_gets_full_credibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut store = ParamStore::new();
        let model = FbmnModel::new(&mut store, 3, 4, &FbmnConfig { hidden: 5, literal_readout: false }, &mut rng);
        let xs = vec![vec![0.1, -0.2, 0.3, 0.4]];
        let fwd = model.forward(&store, &inputs(&xs, &[2])).unwrap();
        assert_eq!(fwd.credibilities, vec![1.0]);
    }

    #[test]
    fn zero_parameters_give_uniform_credibilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for literal in [false, true] {
            let mut store = ParamStore::new();
            let model = FbmnModel::new(&mut store, 3, 4, &FbmnConfig { hidden: 4, literal_readout: literal }, &mut rng);
            for id in store.ids().collect::<Vec<_>>() {
                store.value_mut(id).iter_mut().for_each(|v| *v = 0.0);
            }
            let xs = vec![vec![0.5; 4]; 3];
            let fwd = model.forward(&store, &inputs(&xs, &[0, 1, 2])).unwrap();
            for &r in &fwd.credibilities {
                assert!((r - 1.0 / 3.0).abs() < 1e-15, "literal={literal}");
            }
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut store = ParamStore::new();
        let model = FbmnModel::new(&mut store, 4, 6, &FbmnConfig::default(), &mut rng);
        let (xs, sources) = random_inputs(&mut rng, 3, 4, 6);
        let obs = inputs(&xs, &sources);
        let a = model.forward(&store, &obs).unwrap();
        let b = model.forward(&store, &obs).unwrap();
        for (x, y) in a.credibilities.iter().zip(&b.credibilities) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn credibilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for literal in [false, true] {
            let mut store = ParamStore::new();
            let model = FbmnModel::new(&mut store, 5, 3, &FbmnConfig { hidden: 5, literal_readout: literal }, &mut rng);
            for t in 1..=5 {
                let (xs, sources) = random_inputs(&mut rng, t, 5, 3);
                let fwd = model.forward(&store, &inputs(&xs, &sources)).unwrap();
                let sum: f64 = fwd.credibilities.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..8 {
            let literal = trial % 2 == 1;
            let t = rng.random_range(1..=5);
            let hidden = rng.random_range(2..=6);
            let k = t.max(rng.random_range(2..=6));
            let dim = rng.random_range(2..=4);
            let mut store = ParamStore::new();
            let model = FbmnModel::new(
                &mut store,
                k,
                dim,
                &FbmnConfig { hidden, literal_readout: literal },
                &mut rng,
            );
            let (xs, sources) = random_inputs(&mut rng, t, k, dim);
            let upstream: Vec<f64> = (0..t).map(|_| rng.random_range(-1.0..1.0)).collect();

            let obs = inputs(&xs, &sources);
            let fwd = model.forward(&store, &obs).unwrap();
            model.backward(&mut store, &obs, &fwd, &upstream);

            let worst = check_gradients(
                &mut store,
                |s| {
                    let fwd = model.forward(s, &inputs(&xs, &sources)).unwrap();
                    fwd.credibilities.iter().zip(&upstream).map(|(r, u)| r * u).sum()
                },
                1e-5,
                None,
                &mut rng,
            );
            assert!(
                worst < 1e-4,
                "trial {trial} (T={t}, H={hidden}, literal={literal}): max relative error {worst}"
            );
        }
    }

    #[test]
    fn single_step_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut store = ParamStore::new();
        let model = FbmnModel::new(&mut store, 2, 3, &FbmnConfig { hidden: 4, literal_readout: false }, &mut rng);
        let xs = vec![vec![0.4, -0.9, 0.2], vec![-0.1, 0.8, 0.6]];
        let sources = vec![0, 1];
        let upstream = vec![1.3, -0.4];
        let obs = inputs(&xs, &sources);
        let fwd = model.forward(&store, &obs).unwrap();
        model.backward(&mut store, &obs, &fwd, &upstream);
        let worst = check_gradients(
            &mut store,
            |s| {
                let fwd = model.forward(s, &inputs(&xs, &sources)).unwrap();
                fwd.credibilities.iter().zip(&upstream).map(|(r, u)| r * u).sum()
            },
            1e-5,
            None,
            &mut rng,
        );
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn saturated_input_gate_starves_candidate_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut store = ParamStore::new();
        let model = FbmnModel::new(&mut store, 3, 4, &FbmnConfig { hidden: 3, literal_readout: false }, &mut rng);
        store.value_mut(model.b_i).iter_mut().for_each(|b| *b = -40.0);
        let (xs, sources) = random_inputs(&mut rng, 3, 3, 4);
        let obs = inputs(&xs, &sources);
        let fwd = model.forward(&store, &obs).unwrap();
        model.backward(&mut store, &obs, &fwd, &[1.0, -2.0, 0.5]);
        let max_cx = store.grad(model.w_cx).iter().fold(0.0_f64, |a, g| a.max(g.abs()));
        assert!(max_cx < 1e-6, "candidate weights still see gradient {max_cx}");
    }

    #[test]
    fn absent_source_memories_receive_no_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut store = ParamStore::new();
        let model = FbmnModel::new(&mut store, 4, 3, &FbmnConfig { hidden: 3, literal_readout: false }, &mut rng);
        let xs = vec![vec![0.2, 0.4, -0.6], vec![0.9, -0.3, 0.1]];
        let obs = inputs(&xs, &[1, 3]);
        let fwd = model.forward(&store, &obs).unwrap();
        model.backward(&mut store, &obs, &fwd, &[1.0, -1.0]);
        let md = model.mem_dim;
        let grad = store.grad(model.memories());
        assert!(grad[0..md].iter().all(|&g| g == 0.0));
        assert!(grad[2 * md..3 * md].iter().all(|&g| g == 0.0));
        assert!(grad[md..2 * md].iter().any(|&g| g != 0.0));
    }

    /// Growing the registry with an extra source must not disturb entries
    /// that never mention it.
    #[test]
    fn extra_registered_source_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut store_small = ParamStore::new();
        let small = FbmnModel::new(&mut store_small, 2, 3, &FbmnConfig { hidden: 4, literal_readout: false }, &mut rng);
        let mut store_big = ParamStore::new();
        let big = FbmnModel::new(&mut store_big, 3, 3, &FbmnConfig { hidden: 4, literal_readout: false }, &mut rng);

        // Copy the small model's parameters into the big one (shared rows).
        for id in store_small.ids().collect::<Vec<_>>() {
            let name = store_small.name(id).to_string();
            let value = store_small.value(id).to_vec();
            let target = store_big.find(&name).unwrap();
            let target_value = store_big.value_mut(target);
            target_value[..value.len()].copy_from_slice(&value);
        }

        let xs = vec![vec![0.7, -0.2, 0.5], vec![-0.4, 0.9, 0.3]];
        let obs = inputs(&xs, &[0, 1]);
        let a = small.forward(&store_small, &obs).unwrap();
        let b = big.forward(&store_big, &obs).unwrap();
        for (x, y) in a.credibilities.iter().zip(&b.credibilities) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
