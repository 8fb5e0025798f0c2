//! Correlated binary sources, antipodal transmission over quasi-static
//! fading links with AWGN, and channel log-likelihood ratios.
//!
//! Noise spectral density is fixed at `N_0 = 1`; link quality enters through
//! the received energy per coded bit `xi_c = r * gamma_b`. Bit 0 maps to the
//! symbol `+1`, bit 1 to `-1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const N0: f64 = 1.0;

/// Link gain statistics. Gains are drawn once per packet and normalized to
/// `E|alpha|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fading {
    Awgn,
    Rayleigh,
    /// Rice with linear K factor (ratio of line-of-sight to scattered power).
    Rice(f64),
}

impl Fading {
    /// The K factor; infinite for AWGN.
    pub fn k_factor(&self) -> f64 {
        match *self {
            Fading::Awgn => f64::INFINITY,
            Fading::Rayleigh => 0.0,
            Fading::Rice(k) => k,
        }
    }
}

impl fmt::Display for Fading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fading::Awgn => f.write_str("awgn"),
            Fading::Rayleigh => f.write_str("rayleigh"),
            Fading::Rice(k) => write!(f, "rice{k}"),
        }
    }
}

impl FromStr for Fading {
    type Err = Error;

    /// Accepts `awgn`, `rayleigh`, `rice10`, `rice:10`, `rice(10)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "awgn" => return Ok(Fading::Awgn),
            "rayleigh" => return Ok(Fading::Rayleigh),
            _ => {}
        }
        let k = t
            .strip_prefix("rice")
            .map(|r| r.trim_matches(|c| c == ':' || c == '(' || c == ')' || c == '='))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown fading '{s}'")))?;
        let k: f64 = k
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad Rice factor in '{s}'")))?;
        if !(k >= 0.0) {
            return Err(Error::InvalidParameter(format!("Rice factor {k} < 0")));
        }
        Ok(if k.is_infinite() {
            Fading::Awgn
        } else {
            Fading::Rice(k)
        })
    }
}

/// Per-link channel parameters; `gamma_b` is the average energy per
/// information bit over `N_0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub fading: Fading,
    /// Code rate used to convert between per-bit and per-coded-bit energy.
    pub r: f64,
    pub gamma_b: f64,
}

impl ChannelParams {
    pub fn new(fading: Fading, r: f64, gamma_b: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParameter(format!("rate {r} not in (0, 1]")));
        }
        if !(gamma_b >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma_b {gamma_b} < 0")));
        }
        Ok(Self { fading, r, gamma_b })
    }

    pub fn from_db(fading: Fading, r: f64, gamma_b_db: f64) -> Result<Self> {
        Self::new(fading, r, crate::db_to_linear(gamma_b_db))
    }

    /// Average received energy per coded bit.
    pub fn xi_c(&self) -> f64 {
        self.r * self.gamma_b * N0
    }

    pub fn n0(&self) -> f64 {
        N0
    }
}

/// Converts average received power per coded sample (dB) to the average
/// `gamma_b` (dB) seen by a rate-`r` code, `gamma_b = xi_rx / (2 r)`.
pub fn received_power_to_gamma_b_db(xi_rx_db: f64, r: f64) -> f64 {
    xi_rx_db - crate::linear_to_db(2.0 * r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatedPair {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
}

/// Received samples of one packet and the link gain it saw.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSeq {
    pub u: Vec<f64>,
    pub gain: Complex64,
}

/// Uniform `x`; `y_i = x_i` with probability `rho`, independently per bit.
pub fn draw_sources<R: Rng + ?Sized>(k: usize, rho: f64, rng: &mut R) -> Result<CorrelatedPair> {
    if !(0.5..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho {rho} not in [0.5, 1]")));
    }
    let mut x = Vec::with_capacity(k);
    let mut y = Vec::with_capacity(k);
    for _ in 0..k {
        let xi = rng.random::<bool>() as u8;
        let flip = (rng.random::<f64>() >= rho) as u8;
        x.push(xi);
        y.push(xi ^ flip);
    }
    Ok(CorrelatedPair { x, y })
}

/// Independent uniform bits.
pub fn draw_bits<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<u8> {
    (0..k).map(|_| rng.random::<bool>() as u8).collect()
}

/// One quasi-static gain: `sqrt(K/(K+1)) + CN(0, 1/(K+1))`.
pub fn draw_gain<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Complex64 {
    let k = params.fading.k_factor();
    if k.is_infinite() {
        return Complex64::new(1.0, 0.0);
    }
    let los = (k / (k + 1.0)).sqrt();
    let sigma = (0.5 / (k + 1.0)).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(los + sigma * re, sigma * im)
}

fn symbol(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `u_i = z_i sqrt(2 xi_c) |alpha| + eta_i`, `eta_i ~ N(0, N_0)`.
pub fn transmit<R: Rng + ?Sized>(
    coded: &[u8],
    params: &ChannelParams,
    alpha: Complex64,
    rng: &mut R,
) -> ObservationSeq {
    let amp = (2.0 * params.xi_c()).sqrt() * alpha.norm();
    let sigma = N0.sqrt();
    let u = coded
        .iter()
        .map(|&b| {
            let n: f64 = rng.sample(StandardNormal);
            symbol(b) * amp + sigma * n
        })
        .collect();
    ObservationSeq { u, gain: alpha }
}

/// `llr_i = 2 sqrt(2 xi_c) |alpha| u_i / N_0`, positive favouring bit 0.
pub fn channel_llr(obs: &ObservationSeq, params: &ChannelParams) -> Vec<f64> {
    let scale = 2.0 * (2.0 * params.xi_c()).sqrt() * obs.gain.norm() / N0;
    obs.u.iter().map(|&u| scale * u).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for trial `trial` of SNR point `point` under `master`.
/// Depends only on the three integers, never on scheduling.
pub fn trial_rng(master: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let a = splitmix64(master);
    let b = splitmix64(a ^ point.wrapping_mul(0xd6e8_feb8_6659_fd93));
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&a.to_le_bytes());
    seed[8..16].copy_from_slice(&b.to_le_bytes());
    seed[16..24].copy_from_slice(&splitmix64(b ^ trial).to_le_bytes());
    seed[24..].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> ChaCha8Rng {
        trial_rng(7, 0, 0)
    }

    #[test]
    fn full_correlation_copies_source() {
        let p = draw_sources(1000, 1.0, &mut rng()).unwrap();
        assert_eq!(p.x, p.y);
    }

    #[test]
    fn agreement_rate_matches_rho() {
        let n = 1_000_000;
        for rho in [0.5, 0.9] {
            let p = draw_sources(n, rho, &mut rng()).unwrap();
            let agree = p.x.iter().zip(&p.y).filter(|(a, b)| a == b).count() as f64 / n as f64;
            let sigma = (rho * (1.0 - rho) / n as f64).sqrt().max(0.5 / (n as f64).sqrt());
            assert!((agree - rho).abs() < 3.0 * sigma, "rho {rho}: {agree}");
            let ones = p.x.iter().map(|&b| b as f64).sum::<f64>() / n as f64;
            assert!((ones - 0.5).abs() < 3.0 * 0.5 / (n as f64).sqrt());
        }
        assert!(draw_sources(10, 0.4, &mut rng()).is_err());
        assert!(draw_sources(10, 1.1, &mut rng()).is_err());
    }

    #[test]
    fn gain_moments() {
        let awgn = ChannelParams::new(Fading::Awgn, 0.5, 1.0).unwrap();
        assert_eq!(draw_gain(&awgn, &mut rng()).norm_sqr(), 1.0);

        let n = 1_000_000;
        let moments = |fading| {
            let p = ChannelParams::new(fading, 0.5, 1.0).unwrap();
            let mut r = rng();
            let g: Vec<f64> = (0..n).map(|_| draw_gain(&p, &mut r).norm_sqr()).collect();
            let mean = g.iter().sum::<f64>() / n as f64;
            let var = g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (mean, var)
        };
        let (m_ray, v_ray) = moments(Fading::Rayleigh);
        // |alpha|^2 is Exp(1): variance 1
        assert!((m_ray - 1.0).abs() < 3.0 * (v_ray / n as f64).sqrt());
        let (m_rice, v_rice) = moments(Fading::Rice(10.0));
        assert!((m_rice - 1.0).abs() < 3.0 * (v_rice / n as f64).sqrt());
        assert!(v_rice < v_ray);
    }

    #[test]
    fn noiseless_limit_recovers_symbols() {
        let p = ChannelParams::new(Fading::Awgn, 0.5, 1e12).unwrap();
        let coded = draw_bits(200, &mut rng());
        let obs = transmit(&coded, &p, Complex64::new(1.0, 0.0), &mut rng());
        for (b, u) in coded.iter().zip(&obs.u) {
            assert_eq!(*b == 1, *u < 0.0);
        }
    }

    #[test]
    fn zero_energy_is_pure_noise() {
        let p = ChannelParams::new(Fading::Awgn, 0.5, 0.0).unwrap();
        let n = 200_000;
        let obs = transmit(&vec![0; n], &p, Complex64::new(1.0, 0.0), &mut rng());
        let mean = obs.u.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn correlation_with_symbols() {
        let p = ChannelParams::from_db(Fading::Awgn, 0.5, 3.0).unwrap();
        let n = 1_000_000;
        let mut r = rng();
        let coded = draw_bits(n, &mut r);
        let obs = transmit(&coded, &p, Complex64::new(1.0, 0.0), &mut r);
        let m = coded
            .iter()
            .zip(&obs.u)
            .map(|(&b, &u)| u * symbol(b))
            .sum::<f64>()
            / n as f64;
        let expected = (2.0 * 0.5 * crate::db_to_linear(3.0)).sqrt();
        assert!((m - expected).abs() < 5.0 / (n as f64).sqrt(), "{m} {expected}");
    }

    #[test]
    fn llr_scaling() {
        let p = ChannelParams::new(Fading::Awgn, 0.5, 2.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = ObservationSeq {
            u: vec![0.0; 4],
            gain: one,
        };
        assert!(channel_llr(&zero, &p).iter().all(|&l| l == 0.0));

        let a = (2.0 * p.xi_c()).sqrt();
        let clean = ObservationSeq {
            u: vec![a, -a],
            gain: one,
        };
        let l = channel_llr(&clean, &p);
        assert!((l[0] - 4.0 * p.xi_c()).abs() < 1e-12);
        assert!((l[1] + 4.0 * p.xi_c()).abs() < 1e-12);

        let scaled = ObservationSeq {
            u: vec![3.0 * a, -3.0 * a],
            gain: one,
        };
        let ls = channel_llr(&scaled, &p);
        assert!((ls[0] - 3.0 * l[0]).abs() < 1e-12);
    }

    #[test]
    fn fading_parsing() {
        assert_eq!("awgn".parse::<Fading>().unwrap(), Fading::Awgn);
        assert_eq!("Rayleigh".parse::<Fading>().unwrap(), Fading::Rayleigh);
        assert_eq!("rice10".parse::<Fading>().unwrap(), Fading::Rice(10.0));
        assert_eq!("rice(2.5)".parse::<Fading>().unwrap(), Fading::Rice(2.5));
        assert_eq!("rice:inf".parse::<Fading>().unwrap(), Fading::Awgn);
        assert!("rician".parse::<Fading>().is_err());
        assert!("rice-1".parse::<Fading>().is_err());
    }

    #[test]
    fn power_axis_mapping() {
        assert!((received_power_to_gamma_b_db(4.0, 0.5) - 4.0).abs() < 1e-12);
        let sw = received_power_to_gamma_b_db(4.0, 1.0 / 3.0);
        assert!((crate::db_to_linear(sw) / crate::db_to_linear(4.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn trial_streams_are_reproducible() {
        let a: u64 = trial_rng(1, 2, 3).random();
        let b: u64 = trial_rng(1, 2, 3).random();
        let c: u64 = trial_rng(1, 2, 4).random();
        let d: u64 = trial_rng(1, 3, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
