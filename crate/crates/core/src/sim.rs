//! Monte Carlo packet-error simulation.
//!
//! Every trial draws its randomness from a private stream keyed by
//! `(seed, snr index, trial index)`, and stop rules are only evaluated at
//! fixed batch boundaries. Results therefore do not depend on the number of
//! worker threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{
    channel_llr, draw_bits, draw_gain, draw_sources, received_power_to_gamma_b_db, transmit,
    trial_rng, ChannelParams, Fading,
};
use crate::code::{CodeSpec, PolyGF2, Trellis};
use crate::decode::{sova, viterbi_hard};
use crate::error::{Error, Result};
use crate::joint::{decode_joint_llr, genie_prior, JointConfig, PriorExchange};
use crate::pep::{bit_error_bound, packet_error_bound, PepParams};
use crate::spectrum::spectrum_with_offset;

/// Trials evaluated between two stop-rule checks.
pub const BATCH: u64 = 64;

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Iterative joint decoding with a recursive code.
    JointRecursive,
    /// Iterative joint decoding with a feed-forward code.
    JointNonrecursive,
    /// Independent hard Viterbi decoding of each link.
    Unjoint,
    /// Ideal distributed compression followed by independent rate-1/3 coding.
    SwBaseline,
    /// SOVA on each link with the partner's true bits as prior.
    Genie,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::JointRecursive,
        Scheme::JointNonrecursive,
        Scheme::Unjoint,
        Scheme::SwBaseline,
        Scheme::Genie,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::JointRecursive => "joint_recursive",
            Scheme::JointNonrecursive => "joint_nonrecursive",
            Scheme::Unjoint => "unjoint",
            Scheme::SwBaseline => "sw_baseline",
            Scheme::Genie => "genie",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('-', "_").to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.as_str() == t)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// How the values of `snr_grid` are interpreted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SnrAxis {
    /// Average energy per information bit over `N_0` (dB).
    #[default]
    GammaB,
    /// Average received energy per coded sample (dB); each scheme sees
    /// `gamma_b = xi_rx / (2 r)` for its own rate `r`.
    ReceivedPower,
}

impl FromStr for SnrAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gamma_b" | "gammab" | "eb" => Ok(SnrAxis::GammaB),
            "received_power" | "xi_rx" | "rx" => Ok(SnrAxis::ReceivedPower),
            _ => Err(Error::Config(format!("unknown snr axis '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub max_packets: u64,
    /// Stop once `err_x + err_y` reaches this count.
    pub max_errors: u64,
    /// Optional Wilson half-width target on the average PER.
    pub target_ci_half_width: Option<f64>,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_packets: 100_000,
            max_errors: 200,
            target_ci_half_width: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    /// Rate-1/2 code shared by both links; unused by `sw_baseline`.
    pub code: CodeSpec,
    pub rho: f64,
    pub l_pkt: usize,
    pub fading: Fading,
    pub snr_grid: Vec<f64>,
    pub snr_axis: SnrAxis,
    pub stop: StopRule,
    pub seed: u64,
    pub iterations: usize,
    pub early_stop: bool,
    pub exchange: PriorExchange,
}

impl SimConfig {
    pub fn new(scheme: Scheme, code: CodeSpec, rho: f64, l_pkt: usize, snr_grid: Vec<f64>) -> Self {
        Self {
            scheme,
            code,
            rho,
            l_pkt,
            fading: Fading::Awgn,
            snr_grid,
            snr_axis: SnrAxis::GammaB,
            stop: StopRule::default(),
            seed: 1,
            iterations: 5,
            early_stop: true,
            exchange: PriorExchange::Posterior,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.5..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho {} not in [0.5, 1]", self.rho)));
        }
        if self.l_pkt == 0 {
            return Err(Error::Config("l_pkt must be positive".into()));
        }
        if self.snr_grid.is_empty() || self.snr_grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("snr_grid must hold finite values".into()));
        }
        if self.stop.max_packets == 0 || self.stop.max_errors == 0 {
            return Err(Error::Config("stop rule bounds must be positive".into()));
        }
        if let Some(h) = self.stop.target_ci_half_width {
            if !(h > 0.0) {
                return Err(Error::Config("target CI half-width must be positive".into()));
            }
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        match self.scheme {
            Scheme::JointRecursive if !self.code.is_recursive() => Err(Error::Config(format!(
                "joint_recursive needs a recursive code, got {}",
                self.code
            ))),
            Scheme::JointNonrecursive if self.code.is_recursive() => Err(Error::Config(format!(
                "joint_nonrecursive needs a feed-forward code, got {}",
                self.code
            ))),
            _ => Ok(()),
        }
    }
}

/// Information bits per packet of the compressed scheme: `round(2 L / 3)`.
pub fn sw_packet_len(l_pkt: usize) -> usize {
    ((2 * l_pkt) as f64 / 3.0).round() as usize
}

/// Rate-1/3, 8-state feed-forward code of the compressed baseline.
pub fn sw_trellis() -> Trellis {
    let gens: Vec<PolyGF2> = ["1011", "1101", "1111"]
        .iter()
        .map(|s| PolyGF2::from_binary(s).expect("valid"))
        .collect();
    Trellis::feedforward(3, &gens).expect("valid")
}

/// Coded symbols one transmitter sends per packet (tail included).
pub fn coded_symbols_per_packet(scheme: Scheme, code: &CodeSpec, l_pkt: usize) -> usize {
    match scheme {
        Scheme::SwBaseline => sw_trellis().coded_len(sw_packet_len(l_pkt), true),
        _ => code.trellis().coded_len(l_pkt, true),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub err_x: bool,
    pub err_y: bool,
    pub iterations: usize,
}

/// A configuration with its trellis built once.
#[derive(Clone, Debug)]
pub struct Simulator {
    cfg: SimConfig,
    trellis: Trellis,
    k: usize,
    rate: f64,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let (trellis, k) = match cfg.scheme {
            Scheme::SwBaseline => (sw_trellis(), sw_packet_len(cfg.l_pkt)),
            _ => (cfg.code.trellis(), cfg.l_pkt),
        };
        if k == 0 {
            return Err(Error::Config("packet too short".into()));
        }
        let rate = 1.0 / trellis.n_out() as f64;
        Ok(Self {
            cfg,
            trellis,
            k,
            rate,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Information bits per link and packet.
    pub fn info_len(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Average `gamma_b` (dB) of each link at grid point `snr_index`.
    pub fn gamma_b_db(&self, snr_index: usize) -> f64 {
        let v = self.cfg.snr_grid[snr_index];
        match self.cfg.snr_axis {
            SnrAxis::GammaB => v,
            SnrAxis::ReceivedPower => received_power_to_gamma_b_db(v, self.rate),
        }
    }

    fn link_params(&self, snr_index: usize) -> ChannelParams {
        ChannelParams::from_db(self.cfg.fading, self.rate, self.gamma_b_db(snr_index))
            .expect("validated")
    }

    /// One packet per link, end to end.
    pub fn run_trial(&self, snr_index: usize, trial: u64) -> Result<TrialOutcome> {
        let cfg = &self.cfg;
        let params = self.link_params(snr_index);
        let mut rng = trial_rng(cfg.seed, snr_index as u64, trial);

        let (x, y) = match cfg.scheme {
            // compression removes the correlation
            Scheme::SwBaseline => (draw_bits(self.k, &mut rng), draw_bits(self.k, &mut rng)),
            _ => {
                let p = draw_sources(self.k, cfg.rho, &mut rng)?;
                (p.x, p.y)
            }
        };
        let cx = self.trellis.encode(&x, true);
        let cy = self.trellis.encode(&y, true);
        let ax = draw_gain(&params, &mut rng);
        let ay = draw_gain(&params, &mut rng);
        let llr_x = channel_llr(&transmit(&cx, &params, ax, &mut rng), &params);
        let llr_y = channel_llr(&transmit(&cy, &params, ay, &mut rng), &params);

        let (x_hat, y_hat, iterations) = match cfg.scheme {
            Scheme::JointRecursive | Scheme::JointNonrecursive => {
                let jc = JointConfig {
                    rho: cfg.rho,
                    iterations: cfg.iterations,
                    early_stop: cfg.early_stop,
                    exchange: cfg.exchange,
                    terminated: true,
                };
                let r = decode_joint_llr(&self.trellis, &llr_x, &llr_y, &jc)?;
                (r.x_hat, r.y_hat, r.iterations_run)
            }
            Scheme::Unjoint | Scheme::SwBaseline => (
                viterbi_hard(&self.trellis, &llr_x, true)?,
                viterbi_hard(&self.trellis, &llr_y, true)?,
                1,
            ),
            Scheme::Genie => (
                sova(&self.trellis, &llr_x, &genie_prior(&y, cfg.rho), true)?.hard,
                sova(&self.trellis, &llr_y, &genie_prior(&x, cfg.rho), true)?.hard,
                1,
            ),
        };
        Ok(TrialOutcome {
            err_x: x_hat != x,
            err_y: y_hat != y,
            iterations,
        })
    }

    /// Runs one grid point until the stop rule fires.
    pub fn run_point(&self, snr_index: usize) -> Result<SimPoint> {
        let stop = &self.cfg.stop;
        let mut counts = Counts::default();
        while counts.packets < stop.max_packets {
            let start = counts.packets;
            let end = (start + BATCH).min(stop.max_packets);
            let batch = (start..end)
                .into_par_iter()
                .map(|t| self.run_trial(snr_index, t).map(Counts::from))
                .try_reduce(Counts::default, |a, b| Ok(a + b))?;
            counts = counts + batch;
            if counts.errors() >= stop.max_errors {
                break;
            }
            if let Some(h) = stop.target_ci_half_width {
                let (lo, hi) = wilson_interval(counts.errors(), 2 * counts.packets);
                if counts.errors() > 0 && (hi - lo) / 2.0 <= h {
                    break;
                }
            }
        }
        Ok(SimPoint::from_counts(
            self.cfg.snr_grid[snr_index],
            self.gamma_b_db(snr_index),
            counts,
        ))
    }

    pub fn run(&self) -> Result<SimResult> {
        let points = (0..self.cfg.snr_grid.len())
            .map(|i| self.run_point(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(SimResult {
            scheme: self.cfg.scheme,
            rho: self.cfg.rho,
            l_pkt: self.cfg.l_pkt,
            fading: self.cfg.fading,
            points,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    packets: u64,
    err_x: u64,
    err_y: u64,
    iterations: u64,
}

impl Counts {
    fn errors(&self) -> u64 {
        self.err_x + self.err_y
    }
}

impl From<TrialOutcome> for Counts {
    fn from(o: TrialOutcome) -> Self {
        Self {
            packets: 1,
            err_x: o.err_x as u64,
            err_y: o.err_y as u64,
            iterations: o.iterations as u64,
        }
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            packets: self.packets + o.packets,
            err_x: self.err_x + o.err_x,
            err_y: self.err_y + o.err_y,
            iterations: self.iterations + o.iterations,
        }
    }
}

/// Outcome at one SNR point. PER figures average the two links.
#[derive(Clone, Debug, PartialEq)]
pub struct SimPoint {
    /// Grid value as given (on the configured axis).
    pub snr_db: f64,
    pub gamma_b_db: f64,
    pub packets: u64,
    pub err_x: u64,
    pub err_y: u64,
    pub per_x: f64,
    pub per_y: f64,
    pub per_avg: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_iters: f64,
}

impl SimPoint {
    fn from_counts(snr_db: f64, gamma_b_db: f64, c: Counts) -> Self {
        let n = c.packets.max(1) as f64;
        let (ci_lo, ci_hi) = wilson_interval(c.errors(), 2 * c.packets);
        Self {
            snr_db,
            gamma_b_db,
            packets: c.packets,
            err_x: c.err_x,
            err_y: c.err_y,
            per_x: c.err_x as f64 / n,
            per_y: c.err_y as f64 / n,
            per_avg: c.errors() as f64 / (2.0 * n),
            ci_lo,
            ci_hi,
            mean_iters: c.iterations as f64 / n,
        }
    }

    pub fn ci_half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub scheme: Scheme,
    pub rho: f64,
    pub l_pkt: usize,
    pub fading: Fading,
    pub points: Vec<SimPoint>,
}

pub const SIM_CSV_HEADER: &str =
    "scheme,rho,lpkt,fading,snr_db,packets,err_x,err_y,per_avg,ci_lo,ci_hi,mean_iters";

impl SimResult {
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.4}\n",
                self.scheme,
                self.rho,
                self.l_pkt,
                self.fading,
                p.snr_db,
                p.packets,
                p.err_x,
                p.err_y,
                p.per_avg,
                p.ci_lo,
                p.ci_hi,
                p.mean_iters
            ));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        format!("{SIM_CSV_HEADER}\n{}", self.csv_rows())
    }

    /// `(snr_db, per_avg)` pairs with zero counts replaced by half a count.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| {
                let per = if p.per_avg > 0.0 {
                    p.per_avg
                } else {
                    0.5 / (2.0 * p.packets.max(1) as f64)
                };
                (p.snr_db, per)
            })
            .collect()
    }
}

/// Runs every point of `cfg.snr_grid` (see [`Simulator`]).
pub fn estimate_per(cfg: &SimConfig) -> Result<SimResult> {
    Simulator::new(cfg.clone())?.run()
}

pub fn run_trial(cfg: &SimConfig, snr_index: usize, trial: u64) -> Result<TrialOutcome> {
    Simulator::new(cfg.clone())?.run_trial(snr_index, trial)
}

/// Wilson score interval at 95% for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// SNR at which a PER curve crosses `target`, interpolating linearly in
/// `(dB, log10 PER)` between the first bracketing pair of points.
pub fn snr_at_per(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((s0, p0), (s1, p1)) = (w[0], w[1]);
        if p0 >= target && p1 <= target && p0 > 0.0 && p1 > 0.0 {
            if p0 == p1 {
                return Some(s0);
            }
            let (l0, l1, lt) = (p0.log10(), p1.log10(), target.log10());
            Some(s0 + (lt - l0) / (l1 - l0) * (s1 - s0))
        } else {
            None
        }
    })
}

/// Horizontal distance (dB) by which `better` reaches `target` before `worse`.
pub fn snr_gain_at(worse: &[(f64, f64)], better: &[(f64, f64)], target: f64) -> Option<f64> {
    Some(snr_at_per(worse, target)? - snr_at_per(better, target)?)
}

/// Monte Carlo bit error rate of uncoded antipodal signalling on AWGN where
/// the MAP decision also uses one side-information bit that agrees with the
/// transmitted bit with probability `rho`. Returns `(errors, trials)`.
pub fn uncoded_genie_errors(gamma_b: f64, rho: f64, trials: u64, seed: u64) -> Result<(u64, u64)> {
    if !(0.5..=1.0).contains(&rho) || !(gamma_b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need rho in [0.5, 1] and gamma_b > 0, got {rho}, {gamma_b}"
        )));
    }
    const CHUNK: u64 = 1 << 16;
    let params = ChannelParams::new(Fading::Awgn, 1.0, gamma_b)?;
    let amp = (2.0 * params.xi_c()).sqrt();
    let scale = 2.0 * amp / crate::channel::N0;
    let side = crate::pep::prior_llr(rho);
    let chunks = trials.div_ceil(CHUNK);
    let errors = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = trial_rng(seed, u64::MAX, c);
            let n = CHUNK.min(trials - c * CHUNK);
            let mut e = 0u64;
            for _ in 0..n {
                // transmit bit 0; the side bit disagrees with probability 1 - rho
                let noise: f64 = rng.sample(rand_distr::StandardNormal);
                let u = amp + crate::channel::N0.sqrt() * noise;
                let agree = rng.random::<f64>() < rho;
                let l = scale * u + if agree { side } else { -side };
                if l < 0.0 || (l == 0.0 && rng.random::<bool>()) {
                    e += 1;
                }
            }
            e
        })
        .sum();
    Ok((errors, trials))
}

/// Settings of the comparison against the ideal-compression baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareConfig {
    pub rho: f64,
    pub l_pkt: usize,
    pub fadings: Vec<Fading>,
    /// Average received power per coded sample, dB.
    pub xi_rx_grid: Vec<f64>,
    pub recursive_code: CodeSpec,
    pub nonrecursive_code: CodeSpec,
    pub stop: StopRule,
    pub seed: u64,
    pub iterations: usize,
}

impl CompareConfig {
    pub fn new(xi_rx_grid: Vec<f64>) -> Self {
        Self {
            rho: 0.9393,
            l_pkt: 100,
            fadings: vec![Fading::Awgn, Fading::Rayleigh, Fading::Rice(10.0)],
            xi_rx_grid,
            recursive_code: CodeSpec::c95(),
            nonrecursive_code: CodeSpec::nonrecursive_nu3(),
            stop: StopRule::default(),
            seed: 1,
            iterations: 5,
        }
    }

    pub fn sim_config(&self, scheme: Scheme, fading: Fading) -> SimConfig {
        let code = match scheme {
            Scheme::JointRecursive => self.recursive_code,
            _ => self.nonrecursive_code,
        };
        SimConfig {
            fading,
            snr_axis: SnrAxis::ReceivedPower,
            stop: self.stop,
            seed: self.seed,
            iterations: self.iterations,
            ..SimConfig::new(scheme, code, self.rho, self.l_pkt, self.xi_rx_grid.clone())
        }
    }
}

pub const COMPARE_SCHEMES: [Scheme; 3] = [
    Scheme::JointRecursive,
    Scheme::JointNonrecursive,
    Scheme::SwBaseline,
];

/// Airtime bookkeeping: coded symbols per packet of each scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Airtime {
    pub joint_symbols: usize,
    pub sw_symbols: usize,
}

impl Airtime {
    pub fn of(cfg: &CompareConfig) -> Self {
        Self {
            joint_symbols: coded_symbols_per_packet(Scheme::JointRecursive, &cfg.recursive_code, cfg.l_pkt),
            sw_symbols: coded_symbols_per_packet(Scheme::SwBaseline, &cfg.recursive_code, cfg.l_pkt),
        }
    }

    /// `sw - joint`, in coded symbols.
    pub fn residue(&self) -> i64 {
        self.sw_symbols as i64 - self.joint_symbols as i64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub fading: Fading,
    pub results: Vec<SimResult>,
}

impl Comparison {
    pub fn result(&self, scheme: Scheme) -> Option<&SimResult> {
        self.results.iter().find(|r| r.scheme == scheme)
    }
}

/// Runs the recursive joint, feed-forward joint and compressed baseline
/// schemes at equal per-sample energy for every fading model.
pub fn compare_sw(cfg: &CompareConfig) -> Result<Vec<Comparison>> {
    cfg.fadings
        .iter()
        .map(|&fading| {
            let results = COMPARE_SCHEMES
                .iter()
                .map(|&s| estimate_per(&cfg.sim_config(s, fading)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Comparison { fading, results })
        })
        .collect()
}

pub const COMPARE_CSV_HEADER: &str =
    "fading,scheme,xi_rx_db,gamma_b_db,packets,err_x,err_y,per_avg,ci_lo,ci_hi";

pub fn comparison_csv(rows: &[Comparison]) -> String {
    let mut s = format!("{COMPARE_CSV_HEADER}\n");
    for c in rows {
        for r in &c.results {
            for p in &r.points {
                s.push_str(&format!(
                    "{},{},{},{:.4},{},{},{},{:.6e},{:.6e},{:.6e}\n",
                    c.fading,
                    r.scheme,
                    p.snr_db,
                    p.gamma_b_db,
                    p.packets,
                    p.err_x,
                    p.err_y,
                    p.per_avg,
                    p.ci_lo,
                    p.ci_hi
                ));
            }
        }
    }
    s
}

/// Simulated genie PER next to the analytical packet bound.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlayRow {
    pub point: SimPoint,
    pub packet_bound: f64,
    pub bit_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlayConfig {
    pub code: CodeSpec,
    pub rho: f64,
    pub l_pkt: usize,
    pub gamma_b_grid: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub d_max_offset: u32,
}

pub fn bound_overlay(cfg: &OverlayConfig) -> Result<Vec<OverlayRow>> {
    let trellis = cfg.code.trellis();
    if trellis.has_zero_weight_cycle() {
        return Err(Error::Catastrophic(cfg.code.to_string()));
    }
    let spectrum = spectrum_with_offset(&trellis, cfg.d_max_offset)?;
    let sim = SimConfig {
        stop: cfg.stop,
        seed: cfg.seed,
        ..SimConfig::new(Scheme::Genie, cfg.code, cfg.rho, cfg.l_pkt, cfg.gamma_b_grid.clone())
    };
    let result = estimate_per(&sim)?;
    result
        .points
        .into_iter()
        .map(|point| {
            let p = PepParams::half_rate_db(cfg.rho, point.gamma_b_db)?;
            Ok(OverlayRow {
                packet_bound: packet_error_bound(&spectrum, &p, cfg.l_pkt).value,
                bit_bound: bit_error_bound(&spectrum, &p).value,
                point,
            })
        })
        .collect()
}

pub const OVERLAY_CSV_HEADER: &str =
    "gamma_b_db,packets,per_avg,ci_lo,ci_hi,packet_bound,bit_bound";

pub fn overlay_csv(rows: &[OverlayRow]) -> String {
    let mut s = format!("{OVERLAY_CSV_HEADER}\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}\n",
            r.point.gamma_b_db,
            r.point.packets,
            r.point.per_avg,
            r.point.ci_lo,
            r.point.ci_hi,
            r.packet_bound,
            r.bit_bound
        ));
    }
    s
}
