//! Command-line front end. Results go to stdout (or `--out`) as CSV,
//! diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 catastrophic code.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use corrconv::config::{parse_grid, parse_list, ConfigFile};
use corrconv::joint::PriorExchange;
use corrconv::pep::{bit_error_bound, packet_error_bound, PepParams};
use corrconv::search::{search_optimal, stability_report, SearchSpec};
use corrconv::sim::{
    bound_overlay, compare_sw, comparison_csv, estimate_per, overlay_csv, snr_gain_at, Airtime,
    CompareConfig, OverlayConfig, Scheme, SimConfig, SnrAxis, StopRule, COMPARE_SCHEMES,
};
use corrconv::spectrum::spectrum_with_offset;
use corrconv::{CodeSpec, Error, Fading, Result};

#[derive(Parser, Debug)]
#[command(name = "corrconv", version, about = "Joint decoding of correlated sources over convolutional codes")]
struct Cli {
    /// Master seed for every Monte Carlo stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode a bit string.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Information bits, e.g. 1011.
        #[arg(long)]
        bits: String,
        #[arg(long)]
        no_terminate: bool,
    },
    /// Weight spectrum as `w,d,count`.
    Spectrum {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        d_max_offset: Option<u32>,
    },
    /// Union bounds over an SNR grid.
    Bound {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        lpkt: Option<usize>,
        /// gamma_b grid in dB: `a:step:b` or a comma list.
        #[arg(long)]
        snr_grid: Option<String>,
        #[arg(long)]
        d_max_offset: Option<u32>,
    },
    /// Exhaustive search for the code minimizing the packet bound.
    Search {
        #[arg(long)]
        nu: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        lpkt: Option<usize>,
        /// gamma_b values (dB) the bound is averaged over.
        #[arg(long)]
        gamma_db: Option<String>,
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        d_max_offset: Option<u32>,
        /// Also report the per-SNR winner over this grid.
        #[arg(long)]
        stability_grid: Option<String>,
    },
    /// Monte Carlo packet error rate of one scheme.
    Simulate {
        /// joint_recursive, joint_nonrecursive, unjoint, sw_baseline or genie.
        #[arg(long)]
        scheme: Option<String>,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        lpkt: Option<usize>,
        /// awgn, rayleigh, rice<K>.
        #[arg(long)]
        fading: Option<String>,
        #[arg(long)]
        snr_grid: Option<String>,
        /// gamma_b or received_power.
        #[arg(long)]
        axis: Option<String>,
        #[command(flatten)]
        stop: StopArgs,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        no_early_stop: bool,
        /// posterior or extrinsic.
        #[arg(long)]
        exchange: Option<String>,
    },
    /// Joint schemes against ideal compression plus rate-1/3 coding.
    CompareSw {
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        lpkt: Option<usize>,
        /// Comma list of fading models.
        #[arg(long)]
        fadings: Option<String>,
        /// Average received power per coded sample, dB.
        #[arg(long)]
        snr_grid: Option<String>,
        #[command(flatten)]
        stop: StopArgs,
        #[arg(long)]
        iterations: Option<usize>,
        /// PER level at which gaps are reported.
        #[arg(long)]
        target_per: Option<f64>,
    },
    /// Genie simulation next to the packet bound.
    Overlay {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        lpkt: Option<usize>,
        #[arg(long)]
        snr_grid: Option<String>,
        #[command(flatten)]
        stop: StopArgs,
        #[arg(long)]
        d_max_offset: Option<u32>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct CodeArgs {
    /// Built-in code: c80, c90, c95 or nr3.
    #[arg(long)]
    code: Option<String>,
    /// Generator 1 (binary, highest power first, or octal with `o` prefix).
    #[arg(long)]
    g1: Option<String>,
    #[arg(long)]
    g2: Option<String>,
    /// Feedback polynomial; 0 or 1 for a feed-forward code.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    nu: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
struct StopArgs {
    #[arg(long)]
    max_packets: Option<u64>,
    #[arg(long)]
    max_errors: Option<u64>,
    /// Stop once the 95% Wilson half-width falls below this.
    #[arg(long)]
    ci_half_width: Option<f64>,
}

/// Command-line value, else config file value, else nothing.
struct Resolve<'a> {
    file: &'a ConfigFile,
}

impl Resolve<'_> {
    fn opt<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    fn or<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.opt(cli, key)?.unwrap_or(default))
    }

    fn grid(&self, cli: Option<String>, key: &str, default: &str) -> Result<Vec<f64>> {
        parse_grid(&self.or(cli, key, default.to_string())?)
    }

    fn flag(&self, cli: bool, key: &str) -> Result<bool> {
        Ok(cli || self.file.get::<bool>(key)?.unwrap_or(false))
    }

    fn code(&self, a: CodeArgs, fallback: CodeSpec) -> Result<CodeSpec> {
        if let Some(name) = self.opt(a.code, "code")? {
            return builtin(&name);
        }
        let g1 = self.opt(a.g1, "g1")?;
        let g2 = self.opt(a.g2, "g2")?;
        let h = self.opt(a.h, "h")?;
        match (g1, g2) {
            (Some(g1), Some(g2)) => {
                let h = h.unwrap_or_else(|| "0".into());
                let inferred = [&g1, &g2, &h]
                    .iter()
                    .filter(|s| !s.starts_with('o') && !s.starts_with("0o"))
                    .map(|s| s.len())
                    .max()
                    .unwrap_or(4)
                    .max(2);
                let nu = self.or(a.nu, "nu", inferred - 1)?;
                CodeSpec::parse(&g1, &g2, &h, nu)
            }
            (None, None) if h.is_none() => Ok(fallback),
            _ => Err(Error::Config("give both --g1 and --g2".into())),
        }
    }

    fn stop(&self, a: StopArgs) -> Result<StopRule> {
        let d = StopRule::default();
        Ok(StopRule {
            max_packets: self.or(a.max_packets, "max_packets", d.max_packets)?,
            max_errors: self.or(a.max_errors, "max_errors", d.max_errors)?,
            target_ci_half_width: self.opt(a.ci_half_width, "ci_half_width")?,
        })
    }
}

fn builtin(name: &str) -> Result<CodeSpec> {
    match name.trim().to_ascii_lowercase().as_str() {
        "c80" => Ok(CodeSpec::c80()),
        "c90" => Ok(CodeSpec::c90()),
        "c95" => Ok(CodeSpec::c95()),
        "nr3" | "nonrecursive" => Ok(CodeSpec::nonrecursive_nu3()),
        _ => Err(Error::Config(format!("unknown built-in code '{name}'"))),
    }
}

fn parse_exchange(s: &str) -> Result<PriorExchange> {
    match s.trim().to_ascii_lowercase().as_str() {
        "posterior" => Ok(PriorExchange::Posterior),
        "extrinsic" => Ok(PriorExchange::Extrinsic),
        _ => Err(Error::Config(format!("unknown exchange '{s}'"))),
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Config(format!("bit string has '{c}'"))),
        })
        .collect()
}

fn check_noncatastrophic(code: &CodeSpec) -> Result<()> {
    if corrconv::code::is_catastrophic(code) {
        return Err(Error::Catastrophic(code.to_string()));
    }
    Ok(())
}

const KEYS: &[&str] = &[
    "seed", "threads", "out", "code", "g1", "g2", "h", "nu", "bits", "no_terminate",
    "d_max_offset", "rho", "lpkt", "snr_grid", "gamma_db", "top", "stability_grid", "scheme",
    "fading", "fadings", "axis", "max_packets", "max_errors", "ci_half_width", "iterations",
    "no_early_stop", "exchange", "target_per",
];

fn run(cli: Cli) -> Result<String> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    file.check_keys(KEYS)?;
    let r = Resolve { file: &file };
    let seed = r.or(cli.seed, "seed", 1u64)?;
    if let Some(n) = r.opt(cli.threads, "threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }

    match cli.cmd {
        Command::Encode { code, bits, no_terminate } => {
            let code = r.code(code, CodeSpec::c90())?;
            let info = parse_bits(&bits)?;
            let terminate = !r.flag(no_terminate, "no_terminate")?;
            let out: String = code
                .encode(&info, terminate)
                .iter()
                .map(|b| char::from(b'0' + b))
                .collect();
            Ok(out + "\n")
        }
        Command::Spectrum { code, d_max_offset } => {
            let code = r.code(code, CodeSpec::c90())?;
            check_noncatastrophic(&code)?;
            let off = r.or(d_max_offset, "d_max_offset", 10)?;
            let s = spectrum_with_offset(&code.trellis(), off)?;
            eprintln!("{code}: d_free {} d_max {}", s.d_free(), s.d_max());
            Ok(s.to_csv())
        }
        Command::Bound { code, rho, lpkt, snr_grid, d_max_offset } => {
            let code = r.code(code, CodeSpec::c90())?;
            check_noncatastrophic(&code)?;
            let rho = r.or(rho, "rho", 0.9)?;
            let lpkt = r.or(lpkt, "lpkt", 100usize)?;
            let grid = r.grid(snr_grid, "snr_grid", "0:0.5:6")?;
            let off = r.or(d_max_offset, "d_max_offset", 10)?;
            let s = spectrum_with_offset(&code.trellis(), off)?;
            let mut out = String::from("gamma_b_db,bit_bound,packet_bound,packet_tail\n");
            for g in grid {
                let p = PepParams::half_rate_db(rho, g)
                    .map_err(|e| Error::Config(e.to_string()))?;
                let pb = packet_error_bound(&s, &p, lpkt);
                out.push_str(&format!(
                    "{g},{:.6e},{:.6e},{:.6e}\n",
                    bit_error_bound(&s, &p).value,
                    pb.value,
                    pb.tail
                ));
            }
            Ok(out)
        }
        Command::Search { nu, rho, lpkt, gamma_db, top, d_max_offset, stability_grid } => {
            let mut spec = SearchSpec::new(
                r.or(nu, "nu", 3)?,
                r.grid(gamma_db, "gamma_db", "3")?,
                r.or(rho, "rho", 0.9)?,
                r.or(lpkt, "lpkt", 100)?,
            );
            spec.d_max_offset = r.or(d_max_offset, "d_max_offset", spec.d_max_offset)?;
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
            let res = search_optimal(&spec)?;
            let sk = &res.skipped;
            eprintln!(
                "candidates {} evaluated {} skipped: catastrophic {} nonrealizable {} duplicate {} degenerate {}",
                res.candidates_total, res.evaluated, sk.catastrophic, sk.nonrealizable, sk.duplicate, sk.degenerate
            );
            for w in res.tied_winners() {
                eprintln!("winner: {} bound {:.6e}", w.code, w.bound);
            }
            if !res.top_rescore_stable {
                eprintln!("warning: leading order changes with a deeper spectrum");
            }
            if let Some(g) = r.opt(stability_grid, "stability_grid")? {
                for row in stability_report(&spec, &parse_grid(&g)?)? {
                    eprintln!(
                        "stability {} dB: {} bound {:.6e} {}",
                        row.gamma_b_db,
                        row.winner,
                        row.bound,
                        if row.matches_global { "same" } else { "differs" }
                    );
                }
            }
            Ok(res.to_csv(r.or(top, "top", 10)?))
        }
        Command::Simulate {
            scheme,
            code,
            rho,
            lpkt,
            fading,
            snr_grid,
            axis,
            stop,
            iterations,
            no_early_stop,
            exchange,
        } => {
            let scheme: Scheme = r.or(scheme, "scheme", "joint_recursive".into())?.parse()?;
            let rho = r.or(rho, "rho", 0.9)?;
            let fallback = match scheme {
                Scheme::JointRecursive | Scheme::Genie => CodeSpec::optimum_for_rho(rho),
                _ => CodeSpec::nonrecursive_nu3(),
            };
            let code = r.code(code, fallback)?;
            check_noncatastrophic(&code)?;
            let mut cfg = SimConfig::new(
                scheme,
                code,
                rho,
                r.or(lpkt, "lpkt", 100)?,
                r.grid(snr_grid, "snr_grid", "0:0.5:4")?,
            );
            cfg.fading = r.or(fading, "fading", "awgn".into())?.parse::<Fading>()?;
            cfg.snr_axis = r.or(axis, "axis", "gamma_b".into())?.parse::<SnrAxis>()?;
            cfg.stop = r.stop(stop)?;
            cfg.seed = seed;
            cfg.iterations = r.or(iterations, "iterations", 5)?;
            cfg.early_stop = !r.flag(no_early_stop, "no_early_stop")?;
            cfg.exchange = parse_exchange(&r.or(exchange, "exchange", "posterior".into())?)?;
            Ok(estimate_per(&cfg)?.to_csv())
        }
        Command::CompareSw { rho, lpkt, fadings, snr_grid, stop, iterations, target_per } => {
            let mut cfg = CompareConfig::new(r.grid(snr_grid, "snr_grid", "0:1:20")?);
            cfg.rho = r.or(rho, "rho", cfg.rho)?;
            cfg.l_pkt = r.or(lpkt, "lpkt", cfg.l_pkt)?;
            if let Some(f) = r.opt(fadings, "fadings")? {
                cfg.fadings = parse_list(&f)?;
            }
            cfg.stop = r.stop(stop)?;
            cfg.seed = seed;
            cfg.iterations = r.or(iterations, "iterations", cfg.iterations)?;
            let target = r.or(target_per, "target_per", 1e-2)?;
            let air = Airtime::of(&cfg);
            eprintln!(
                "coded symbols per packet: joint {} sw {} (residue {})",
                air.joint_symbols,
                air.sw_symbols,
                air.residue()
            );
            let rows = compare_sw(&cfg)?;
            for c in &rows {
                let curve = |s| c.result(s).map(|x| x.curve()).unwrap_or_default();
                let rec = curve(Scheme::JointRecursive);
                for s in COMPARE_SCHEMES.iter().skip(1) {
                    match snr_gain_at(&curve(*s), &rec, target) {
                        Some(g) => eprintln!("{}: joint_recursive ahead of {s} by {g:.2} dB at PER {target}", c.fading),
                        None => eprintln!("{}: no crossing of PER {target} for {s}", c.fading),
                    }
                }
            }
            Ok(comparison_csv(&rows))
        }
        Command::Overlay { code, rho, lpkt, snr_grid, stop, d_max_offset } => {
            let code = r.code(code, CodeSpec::c90())?;
            check_noncatastrophic(&code)?;
            let rows = bound_overlay(&OverlayConfig {
                code,
                rho: r.or(rho, "rho", 0.9)?,
                l_pkt: r.or(lpkt, "lpkt", 100)?,
                gamma_b_grid: r.grid(snr_grid, "snr_grid", "1:0.5:5")?,
                stop: r.stop(stop)?,
                seed,
                d_max_offset: r.or(d_max_offset, "d_max_offset", 10)?,
            })?;
            Ok(overlay_csv(&rows))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let text = match run(cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                Error::Catastrophic(_) => 3,
                Error::Io(_) => 1,
                _ => 2,
            });
        }
    };
    let written = match out {
        Some(p) => std::fs::write(&p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
