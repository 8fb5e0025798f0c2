//! Truncated weight spectrum `beta[w, d]` of first-error events.

use std::collections::{BTreeMap, HashMap};

use crate::code::Trellis;
use crate::error::{Error, Result};

/// Counts of first-error events keyed by `(input weight, output weight)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpectrum {
    beta: BTreeMap<(u32, u32), u64>,
    d_free: u32,
    d_max: u32,
    w_max: u32,
}

impl WeightSpectrum {
    /// Builds a spectrum from raw counts; zero counts are dropped.
    pub fn from_counts(counts: impl IntoIterator<Item = ((u32, u32), u64)>, d_max: u32) -> Self {
        let beta: BTreeMap<_, _> = counts
            .into_iter()
            .filter(|&((_, d), c)| c > 0 && d <= d_max)
            .collect();
        let d_free = beta.keys().map(|&(_, d)| d).min().unwrap_or(0);
        let w_max = beta.keys().map(|&(w, _)| w).max().unwrap_or(0);
        Self {
            beta,
            d_free,
            d_max,
            w_max,
        }
    }

    pub fn d_free(&self) -> u32 {
        self.d_free
    }

    /// Largest output weight included in the enumeration.
    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    /// Largest input weight seen among the enumerated events.
    pub fn w_max(&self) -> u32 {
        self.w_max
    }

    pub fn count(&self, w: u32, d: u32) -> u64 {
        self.beta.get(&(w, d)).copied().unwrap_or(0)
    }

    /// `(w, d, count)` in ascending `(w, d)` order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.beta.iter().map(|(&(w, d), &c)| (w, d, c))
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Restriction to `d <= d_max`.
    pub fn truncated(&self, d_max: u32) -> Self {
        Self::from_counts(self.iter().map(|(w, d, c)| ((w, d), c)), d_max.min(self.d_max))
    }

    /// CSV with header `w,d,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("w,d,count\n");
        for (w, d, c) in self.iter() {
            s.push_str(&format!("{w},{d},{c}\n"));
        }
        s
    }
}

/// Exact `beta[w, d]` for every `d <= d_max`.
///
/// Walks all paths that leave state 0, stay among nonzero states and remerge,
/// dropping any partial path heavier than `d_max`. Paths are merged by
/// `(state, w, d)` at each depth, so the cost is polynomial in `d_max`.
/// A zero-weight cycle would make the walk endless, so catastrophic
/// trellises are rejected up front.
pub fn enumerate_spectrum(trellis: &Trellis, d_max: u32) -> Result<WeightSpectrum> {
    if trellis.has_zero_weight_cycle() {
        return Err(Error::Catastrophic(
            "zero-weight cycle among nonzero states".into(),
        ));
    }
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut frontier: HashMap<(usize, u32, u32), u64> = HashMap::new();

    let first = trellis.next_state(0, 1);
    let d0 = trellis.output_weight(0, 1);
    if first == 0 {
        // Only possible for memoryless behaviour; treat as a length-1 event.
        counts.insert((1, d0), 1);
    } else if d0 <= d_max {
        frontier.insert((first, 1, d0), 1);
    }

    // Without zero cycles every run of `num_states` steps adds weight, so the
    // frontier empties after at most num_states * (d_max + 1) steps.
    let max_steps = trellis.num_states() * (d_max as usize + 2);
    let mut steps = 0;
    while !frontier.is_empty() {
        steps += 1;
        debug_assert!(steps <= max_steps, "spectrum walk failed to terminate");
        let mut next: HashMap<(usize, u32, u32), u64> = HashMap::with_capacity(frontier.len());
        for (&(s, w, d), &c) in &frontier {
            for x in 0..2u8 {
                let nd = d + trellis.output_weight(s, x);
                if nd > d_max {
                    continue;
                }
                let nw = w + x as u32;
                let ns = trellis.next_state(s, x);
                if ns == 0 {
                    *counts.entry((nw, nd)).or_default() += c;
                } else {
                    *next.entry((ns, nw, nd)).or_default() += c;
                }
            }
        }
        frontier = next;
    }
    Ok(WeightSpectrum::from_counts(counts, d_max))
}

/// Free distance, found by enumerating with a growing cap.
pub fn free_distance(trellis: &Trellis) -> Result<u32> {
    let mut cap = 2 * (trellis.nu() as u32 + 1);
    loop {
        let s = enumerate_spectrum(trellis, cap)?;
        if !s.is_empty() {
            return Ok(s.d_free());
        }
        cap *= 2;
    }
}

/// Spectrum truncated at `d_free + offset`.
pub fn spectrum_with_offset(trellis: &Trellis, offset: u32) -> Result<WeightSpectrum> {
    let d_free = free_distance(trellis)?;
    enumerate_spectrum(trellis, d_free + offset)
}
