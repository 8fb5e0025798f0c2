//! Iterative joint decoding of the two correlated streams.
//!
//! Each half-iteration runs SOVA on one stream, then converts its output
//! into a prior for the other stream through the correlation model
//! `P_I{y_i} = P_O{x_i} rho + (1 - P_O{x_i}) (1 - rho)`.

use crate::channel::{channel_llr, ChannelParams, ObservationSeq};
use crate::code::Trellis;
use crate::decode::{logistic, sova, ProbSequence};
use crate::error::{Error, Result};

/// What a decoder hands to the correlation mixer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PriorExchange {
    /// Full a-posteriori probabilities.
    #[default]
    Posterior,
    /// Posterior with the decoder's own prior divided out (turbo-style).
    /// Not used by the default pipeline.
    Extrinsic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointConfig {
    pub rho: f64,
    pub iterations: usize,
    pub early_stop: bool,
    pub exchange: PriorExchange,
    pub terminated: bool,
}

impl JointConfig {
    pub fn new(rho: f64) -> Self {
        Self {
            rho,
            iterations: 5,
            early_stop: true,
            exchange: PriorExchange::Posterior,
            terminated: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.5..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!(
                "rho {} not in [0.5, 1]",
                self.rho
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointResult {
    pub x_hat: Vec<u8>,
    pub y_hat: Vec<u8>,
    pub iterations_run: usize,
    /// Fraction of positions where `x_hat` and `y_hat` agree, after each iteration.
    pub agreement: Vec<f64>,
}

/// `out_i = p_i rho + (1 - p_i)(1 - rho)`, clipped.
///
/// Evaluated as `(1 - rho) + p_i (2 rho - 1)` so that `rho = 0.5` yields
/// exactly 0.5.
pub fn mix_apriori(posterior: &ProbSequence, rho: f64) -> ProbSequence {
    ProbSequence::new(
        posterior
            .as_slice()
            .iter()
            .map(|&p| (1.0 - rho) + p * (2.0 * rho - 1.0))
            .collect(),
    )
}

fn extrinsic(posterior: &ProbSequence, prior: &ProbSequence) -> ProbSequence {
    let l: Vec<f64> = (0..posterior.len())
        .map(|i| posterior.llr(i) - prior.llr(i))
        .collect();
    ProbSequence::new(l.iter().map(|&v| logistic(v)).collect())
}

fn info_len(trellis: &Trellis, n_llr: usize, terminated: bool) -> Result<usize> {
    let tail = if terminated { trellis.nu() } else { 0 };
    let steps = n_llr / trellis.n_out();
    if n_llr % trellis.n_out() != 0 || steps < tail {
        return Err(Error::InvalidParameter(format!(
            "{n_llr} observations do not fit the trellis"
        )));
    }
    Ok(steps - tail)
}

fn agreement(a: &[u8], b: &[u8]) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64
}

/// Alternating SOVA decoding of both streams with a-priori exchange.
pub fn decode_joint(
    trellis: &Trellis,
    obs_x: &ObservationSeq,
    obs_y: &ObservationSeq,
    params_x: &ChannelParams,
    params_y: &ChannelParams,
    cfg: &JointConfig,
) -> Result<JointResult> {
    cfg.validate()?;
    let llr_x = channel_llr(obs_x, params_x);
    let llr_y = channel_llr(obs_y, params_y);
    decode_joint_llr(trellis, &llr_x, &llr_y, cfg)
}

/// [`decode_joint`] on precomputed channel LLRs.
pub fn decode_joint_llr(
    trellis: &Trellis,
    llr_x: &[f64],
    llr_y: &[f64],
    cfg: &JointConfig,
) -> Result<JointResult> {
    cfg.validate()?;
    let k = info_len(trellis, llr_x.len(), cfg.terminated)?;
    if info_len(trellis, llr_y.len(), cfg.terminated)? != k {
        return Err(Error::InvalidParameter(
            "the two observation sequences differ in length".into(),
        ));
    }

    let to_mixer = |post: &ProbSequence, prior: &ProbSequence| match cfg.exchange {
        PriorExchange::Posterior => post.clone(),
        PriorExchange::Extrinsic => extrinsic(post, prior),
    };

    let mut prior_x = ProbSequence::uniform(k);
    let mut prev: Option<(Vec<u8>, Vec<u8>)> = None;
    let mut agreements = Vec::with_capacity(cfg.iterations);
    let mut iterations_run = 0;
    let mut x_hat = Vec::new();
    let mut y_hat = Vec::new();

    for _ in 0..cfg.iterations {
        iterations_run += 1;
        let dx = sova(trellis, llr_x, &prior_x, cfg.terminated)?;
        let prior_y = mix_apriori(&to_mixer(&dx.posterior, &prior_x), cfg.rho);
        let dy = sova(trellis, llr_y, &prior_y, cfg.terminated)?;
        prior_x = mix_apriori(&to_mixer(&dy.posterior, &prior_y), cfg.rho);

        x_hat = dx.hard;
        y_hat = dy.hard;
        agreements.push(agreement(&x_hat, &y_hat));
        let stable = prev
            .as_ref()
            .is_some_and(|(px, py)| *px == x_hat && *py == y_hat);
        if cfg.early_stop && stable {
            break;
        }
        prev = Some((x_hat.clone(), y_hat.clone()));
    }

    Ok(JointResult {
        x_hat,
        y_hat,
        iterations_run,
        agreement: agreements,
    })
}

/// Prior built from the partner's true bits: `rho` where the partner bit is
/// one, `1 - rho` where it is zero.
pub fn genie_prior(partner: &[u8], rho: f64) -> ProbSequence {
    ProbSequence::new(
        partner
            .iter()
            .map(|&b| if b == 1 { rho } else { 1.0 - rho })
            .collect(),
    )
}

/// Single SOVA pass on one stream using the other sensor's true information
/// as side information. This is the decoder the union bounds describe.
pub fn decode_genie(
    trellis: &Trellis,
    obs: &ObservationSeq,
    params: &ChannelParams,
    partner_true: &[u8],
    rho: f64,
    terminated: bool,
) -> Result<Vec<u8>> {
    if !(0.5..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho {rho} not in [0.5, 1]")));
    }
    let llr = channel_llr(obs, params);
    Ok(sova(trellis, &llr, &genie_prior(partner_true, rho), terminated)?.hard)
}

/// Agreement between a decoder's prior and the truth when the partner
/// decoder's bit error rate is `p_b`.
pub use crate::pep::effective_correlation;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::PROB_CLIP;

    #[test]
    fn mixer_values() {
        let p = ProbSequence::new(vec![1.0, 0.5, 0.0]);
        let m = mix_apriori(&p, 0.9);
        assert!((m.get(0) - 0.9).abs() < 1e-11);
        assert_eq!(m.get(1), 0.5);
        let m8 = mix_apriori(&ProbSequence::new(vec![0.0]), 0.8);
        assert!((m8.get(0) - 0.2).abs() < 1e-11);
    }

    #[test]
    fn mixer_range_and_order() {
        let ps: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let m = mix_apriori(&ProbSequence::new(ps), 0.85);
        let v = m.as_slice();
        assert!(v.iter().all(|&p| (0.15 - 1e-9..=0.85 + 1e-9).contains(&p)));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let half = mix_apriori(&ProbSequence::new(vec![0.0, 0.3, 1.0]), 0.5);
        assert!(half.as_slice().iter().all(|&p| p == 0.5));
    }

    #[test]
    fn genie_prior_saturates_under_clip() {
        let p = genie_prior(&[1, 0], 1.0);
        assert_eq!(p.get(0), 1.0 - PROB_CLIP);
        assert_eq!(p.get(1), PROB_CLIP);
    }

    #[test]
    fn config_validation() {
        assert!(JointConfig::new(0.4).validate().is_err());
        let mut c = JointConfig::new(0.9);
        c.iterations = 0;
        assert!(c.validate().is_err());
    }
}
