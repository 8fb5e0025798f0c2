//! Hard-output Viterbi and soft-output Viterbi (SOVA) decoding.
//!
//! Both decoders maximize a path metric over the trellis starting in state 0.
//! The SOVA metric is the path log-likelihood
//!
//! ```text
//! sum_t [ 1/2 sum_j llr_tj s_tj + 1/2 s(x_t) ln(P0_t / P1_t) ]
//! ```
//!
//! with `s(0) = +1`, `s(1) = -1`, so metric differences are log-likelihood
//! ratios between paths. Reliabilities follow the Hagenauer-Hoeher rule: the
//! reliability of bit `i` is the smallest metric difference among discarded
//! competitors (merging onto the decoded path) that disagree with it at `i`.
//! The window spans the whole packet.
//!
//! Ties in add-compare-select prefer the branch carrying input 0, then the
//! lower-numbered predecessor. Unterminated decoding ends in the best state,
//! lowest index on ties.

use crate::code::Trellis;
use crate::error::{Error, Result};

/// Floor/ceiling applied to every probability entering or leaving a decoder.
pub const PROB_CLIP: f64 = 1e-12;

/// Per-bit probabilities of a one, clipped to `[PROB_CLIP, 1 - PROB_CLIP]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbSequence(Vec<f64>);

fn clip(p: f64) -> f64 {
    if p.is_nan() {
        0.5
    } else {
        p.clamp(PROB_CLIP, 1.0 - PROB_CLIP)
    }
}

impl ProbSequence {
    pub fn new(p: Vec<f64>) -> Self {
        Self(p.into_iter().map(clip).collect())
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![0.5; k])
    }

    /// From log-likelihood ratios `ln(P1 / P0)`.
    pub fn from_llrs(llrs: &[f64]) -> Self {
        Self::new(llrs.iter().map(|&l| logistic(l)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// `ln(P1 / P0)` of entry `i`.
    pub fn llr(&self, i: usize) -> f64 {
        let p = self.0[i];
        (p / (1.0 - p)).ln()
    }

    pub fn llrs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.llr(i)).collect()
    }

    /// Hard decisions, `p > 0.5` meaning one.
    pub fn hard(&self) -> Vec<u8> {
        self.0.iter().map(|&p| (p > 0.5) as u8).collect()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub(crate) fn logistic(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub hard: Vec<u8>,
    pub posterior: ProbSequence,
    /// Metric of the decoded path.
    pub path_metric: f64,
}

fn info_len(trellis: &Trellis, n_llr: usize, terminated: bool) -> Result<usize> {
    let n = trellis.n_out();
    let tail = if terminated { trellis.nu() } else { 0 };
    if n_llr % n != 0 || n_llr / n < tail {
        return Err(Error::InvalidParameter(format!(
            "{n_llr} channel values do not fit a rate-1/{n} {} block",
            if terminated { "terminated" } else { "unterminated" }
        )));
    }
    Ok(n_llr / n - tail)
}

/// `out[o] = sum_j llr_j * s(bit j of o)` for every output pattern `o`.
fn fill_branch_table(llr: &[f64], table: &mut [f64]) {
    for (o, v) in table.iter_mut().enumerate() {
        *v = llr
            .iter()
            .enumerate()
            .map(|(j, &l)| if (o >> j) & 1 == 0 { l } else { -l })
            .sum();
    }
}

/// True when candidate `(metric_b, input_b, pred_b)` should replace the
/// current best `(metric_a, input_a, pred_a)`.
#[inline]
fn better(metric_b: f64, input_b: u8, pred_b: usize, metric_a: f64, input_a: u8, pred_a: usize) -> bool {
    if metric_b != metric_a {
        return metric_b > metric_a;
    }
    (input_b, pred_b) < (input_a, pred_a)
}

fn best_end_state(metrics: &[f64]) -> usize {
    let mut best = 0;
    for (s, &m) in metrics.iter().enumerate() {
        if m > metrics[best] {
            best = s;
        }
    }
    best
}

/// Maximum-metric path under `sum llr * symbol`. Returns the information bits.
pub fn viterbi_hard(trellis: &Trellis, channel_llr: &[f64], terminated: bool) -> Result<Vec<u8>> {
    let k = info_len(trellis, channel_llr.len(), terminated)?;
    let n = trellis.n_out();
    let steps = channel_llr.len() / n;
    let states = trellis.num_states();

    let mut metric = vec![f64::NEG_INFINITY; states];
    metric[0] = 0.0;
    let mut next_metric = vec![0.0; states];
    let mut choice = vec![0u8; steps * states];
    let mut bm = vec![0.0; 1 << n];

    for t in 0..steps {
        fill_branch_table(&channel_llr[t * n..(t + 1) * n], &mut bm);
        for s in 0..states {
            let preds = trellis.predecessors(s);
            let mut pick = 0usize;
            let mut best = f64::NEG_INFINITY;
            for (idx, &(p, x)) in preds.iter().enumerate() {
                let m = metric[p] + bm[trellis.output(p, x) as usize];
                if idx == 0 || better(m, x, p, best, preds[pick].1, preds[pick].0) {
                    best = m;
                    pick = idx;
                }
            }
            next_metric[s] = best;
            choice[t * states + s] = pick as u8;
        }
        std::mem::swap(&mut metric, &mut next_metric);
    }

    let mut state = if terminated { 0 } else { best_end_state(&metric) };
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        let (p, x) = trellis.predecessors(state)[choice[t * states + state] as usize];
        bits[t] = x;
        state = p;
    }
    bits.truncate(k);
    Ok(bits)
}

/// Soft-output Viterbi with per-bit a-priori probabilities.
///
/// `apriori` must have one entry per information bit; tail steps of a
/// terminated block carry no prior.
pub fn sova(
    trellis: &Trellis,
    channel_llr: &[f64],
    apriori: &ProbSequence,
    terminated: bool,
) -> Result<DecodeResult> {
    let k = info_len(trellis, channel_llr.len(), terminated)?;
    if apriori.len() != k {
        return Err(Error::InvalidParameter(format!(
            "a-priori length {} differs from information length {k}",
            apriori.len()
        )));
    }
    let n = trellis.n_out();
    let steps = channel_llr.len() / n;
    let states = trellis.num_states();

    let mut metric = vec![f64::NEG_INFINITY; states];
    metric[0] = 0.0;
    let mut next_metric = vec![0.0; states];
    let mut choice = vec![0u8; steps * states];
    let mut delta = vec![0.0f64; steps * states];
    let mut bm = vec![0.0; 1 << n];

    for t in 0..steps {
        fill_branch_table(&channel_llr[t * n..(t + 1) * n], &mut bm);
        // half prior LLR ln(P1/P0); input 1 gains it, input 0 loses it
        let half_prior = if t < k { 0.5 * apriori.llr(t) } else { 0.0 };
        for s in 0..states {
            let preds = trellis.predecessors(s);
            let m: [f64; 2] = std::array::from_fn(|idx| {
                let (p, x) = preds[idx];
                let prior = if x == 1 { half_prior } else { -half_prior };
                metric[p] + 0.5 * bm[trellis.output(p, x) as usize] + prior
            });
            let pick = better(m[1], preds[1].1, preds[1].0, m[0], preds[0].1, preds[0].0) as usize;
            next_metric[s] = m[pick];
            choice[t * states + s] = pick as u8;
            delta[t * states + s] = if m[1 - pick] == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                m[pick] - m[1 - pick]
            };
        }
        std::mem::swap(&mut metric, &mut next_metric);
    }

    let end = if terminated { 0 } else { best_end_state(&metric) };
    let path_metric = metric[end];

    // decoded path: path_states[t] is the state at time t
    let mut path_states = vec![0usize; steps + 1];
    let mut path_bits = vec![0u8; steps];
    path_states[steps] = end;
    for t in (0..steps).rev() {
        let s = path_states[t + 1];
        let (p, x) = trellis.predecessors(s)[choice[t * states + s] as usize];
        path_bits[t] = x;
        path_states[t] = p;
    }

    let mut reliability = vec![f64::INFINITY; k];
    // walks a competitor that sits in state `cs` at time `j` back until it
    // rejoins the decoded path, lowering the reliability of differing bits
    let mark = |rel: &mut [f64], mut cs: usize, mut j: usize, d: f64| {
        while j > 0 && cs != path_states[j] {
            j -= 1;
            let (p, x) = trellis.predecessors(cs)[choice[j * states + cs] as usize];
            if j < k && x != path_bits[j] && d < rel[j] {
                rel[j] = d;
            }
            cs = p;
        }
    };
    if !terminated {
        // other end states compete with the chosen one
        for s in (0..states).filter(|&s| s != end && metric[s].is_finite()) {
            mark(&mut reliability, s, steps, path_metric - metric[s]);
        }
    }
    for t in (0..steps).rev() {
        let s = path_states[t + 1];
        let d = delta[t * states + s];
        if !d.is_finite() {
            continue;
        }
        let (cs, cx) = trellis.predecessors(s)[1 - choice[t * states + s] as usize];
        if t < k && cx != path_bits[t] && d < reliability[t] {
            reliability[t] = d;
        }
        mark(&mut reliability, cs, t, d);
    }

    let hard: Vec<u8> = path_bits[..k].to_vec();
    let posterior = hard
        .iter()
        .zip(&reliability)
        .map(|(&b, &r)| {
            if b == 1 {
                // keep posterior > 0.5 for a one even on an exact metric tie
                clip(logistic(r)).max(0.5 + f64::EPSILON)
            } else {
                clip(logistic(-r))
            }
        })
        .collect();

    Ok(DecodeResult {
        hard,
        posterior: ProbSequence(posterior),
        path_metric,
    })
}
