//! Pairwise error probabilities when the decoder holds correlated side
//! information, and the union bounds built from them.
//!
//! Notation: `d_z` is the Hamming distance between the competing codewords,
//! `d_x` between their information sequences, `gamma_b` the linear
//! energy-per-information-bit SNR and `L = ln(rho / (1 - rho))` the prior
//! log-likelihood carried by one side-information bit.

use libm::erfc;

use crate::error::{Error, Result};
use crate::spectrum::WeightSpectrum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PepParams {
    /// Code rate.
    pub r: f64,
    /// Probability that the two sources agree on a bit.
    pub rho: f64,
    /// Linear `xi_b / N_0`.
    pub gamma_b: f64,
}

impl PepParams {
    pub fn new(r: f64, rho: f64, gamma_b: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParameter(format!("rate {r} not in (0, 1]")));
        }
        if !(0.5..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!("rho {rho} not in [0.5, 1]")));
        }
        if !(gamma_b > 0.0) || !gamma_b.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma_b {gamma_b} must be > 0")));
        }
        Ok(Self { r, rho, gamma_b })
    }

    /// Rate-1/2 parameters with the SNR given in dB.
    pub fn half_rate_db(rho: f64, gamma_b_db: f64) -> Result<Self> {
        Self::new(0.5, rho, crate::db_to_linear(gamma_b_db))
    }
}

/// `ln(rho / (1 - rho))`; infinite at `rho = 1`.
pub fn prior_llr(rho: f64) -> f64 {
    (rho / (1.0 - rho)).ln()
}

/// `0.5 erfc(sqrt(g) + m L / (4 sqrt(g)))` with the `m * L` product taken as
/// zero when `m = 0`, so `rho = 1` stays well defined.
fn shifted_erfc(g: f64, m: i64, l: f64) -> f64 {
    let root = g.sqrt();
    let shift = if m == 0 { 0.0 } else { m as f64 * l / (4.0 * root) };
    0.5 * erfc(root + shift)
}

/// PEP conditioned on `j` of the `d_x` differing positions having side
/// information that agrees with the transmitted bit.
pub fn conditional_pep(d_z: u32, d_x: u32, j: u32, p: &PepParams) -> Result<f64> {
    if d_z == 0 {
        return Err(Error::InvalidParameter("d_z must be >= 1".into()));
    }
    if j > d_x {
        return Err(Error::InvalidParameter(format!("j = {j} exceeds d_x = {d_x}")));
    }
    Ok(conditional_unchecked(d_z, d_x, j, p))
}

fn conditional_unchecked(d_z: u32, d_x: u32, j: u32, p: &PepParams) -> f64 {
    let g = p.r * d_z as f64 * p.gamma_b;
    shifted_erfc(g, 2 * j as i64 - d_x as i64, prior_llr(p.rho))
}

/// PEP averaged over side-information agreement patterns.
///
/// The summand depends on the pattern only through its number of agreements
/// `j`, so the `2^d_x` patterns collapse onto a binomial sum.
pub fn averaged_pep(d_z: u32, d_x: u32, p: &PepParams) -> Result<f64> {
    if d_z == 0 {
        return Err(Error::InvalidParameter("d_z must be >= 1".into()));
    }
    let rho = p.rho;
    let mut binom = 1.0f64;
    let mut total = 0.0;
    for j in 0..=d_x {
        if j > 0 {
            binom = binom * (d_x - j + 1) as f64 / j as f64;
        }
        let weight = binom * rho.powi(j as i32) * (1.0 - rho).powi((d_x - j) as i32);
        if weight > 0.0 {
            total += weight * conditional_unchecked(d_z, d_x, j, p);
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// The earlier approximation that assumes every side-information bit matches
/// the transmitted one. Kept for comparison; it underestimates the PEP.
pub fn hagenauer_pep(d_z: u32, d_x: u32, p: &PepParams) -> Result<f64> {
    conditional_pep(d_z, d_x, d_x, p)
}

/// Exact bit error probability of uncoded antipodal signalling with a MAP
/// decision that uses one correlated side-information bit.
pub fn uncoded_exact_pe(gamma_b: f64, rho: f64) -> f64 {
    let l = prior_llr(rho);
    shifted_erfc(gamma_b, 1, l) * rho + shifted_erfc(gamma_b, -1, l) * (1.0 - rho)
}

/// Hagenauer-style counterpart of [`uncoded_exact_pe`].
pub fn uncoded_hagenauer_pe(gamma_b: f64, rho: f64) -> f64 {
    shifted_erfc(gamma_b, 1, prior_llr(rho))
}

/// Agreement probability between a decoder's input prior and the true bits
/// when the partner decoder errs with probability `p_b`.
pub fn effective_correlation(rho: f64, p_b: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_b) {
        return Err(Error::InvalidParameter(format!("p_b {p_b} not in [0, 0.5]")));
    }
    Ok(rho * (1.0 - p_b) + (1.0 - rho) * p_b)
}

/// Union-bound value plus the contribution of the outermost enumerated
/// distance shell, as a truncation diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub tail: f64,
}

fn weighted_sum(spec: &WeightSpectrum, p: &PepParams, weight: impl Fn(u32) -> f64) -> Bound {
    let mut value = 0.0;
    let mut tail = 0.0;
    for (w, d, c) in spec.iter() {
        // d >= 1 always holds for enumerated events of a non-catastrophic code
        let term = c as f64 * weight(w) * averaged_pep(d.max(1), w, p).unwrap_or(0.0);
        value += term;
        if d == spec.d_max() {
            tail += term;
        }
    }
    Bound { value, tail }
}

/// `sum beta[w,d] * w * P_e(d, w)`.
pub fn bit_error_bound(spec: &WeightSpectrum, p: &PepParams) -> Bound {
    weighted_sum(spec, p, |w| w as f64)
}

/// `sum beta[w,d] * L_pkt * P_e(d, w)`. Not clamped to 1.
pub fn packet_error_bound(spec: &WeightSpectrum, p: &PepParams, l_pkt: usize) -> Bound {
    weighted_sum(spec, p, |_| l_pkt as f64)
}

/// Packet bound averaged over the two links of the pair, each with its own SNR.
pub fn average_packet_bound(
    spec_x: &WeightSpectrum,
    spec_y: &WeightSpectrum,
    px: &PepParams,
    py: &PepParams,
    l_pkt: usize,
) -> f64 {
    0.5 * (packet_error_bound(spec_x, px, l_pkt).value
        + packet_error_bound(spec_y, py, l_pkt).value)
}

/// Joint entropy in bits of a correlated pair with uniform marginals.
pub fn joint_entropy(rho: f64) -> f64 {
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    1.0 + h(rho) + h(1.0 - rho)
}
