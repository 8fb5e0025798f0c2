//! Joint decoding of two correlated binary sources, each protected by its own
//! rate-1/2 convolutional code.
//!
//! The crate covers the whole chain:
//!
//! * [`code`]: polynomial code descriptions, trellises, encoding and code
//!   classification (catastrophic, swap-equivalent).
//! * [`channel`]: correlated source pairs, quasi-static Rice/Rayleigh/AWGN links
//!   and channel LLRs.
//! * [`decode`]: hard Viterbi and soft-output Viterbi (SOVA) with a-priori input.
//! * [`joint`]: the iterative two-decoder loop that turns each decoder's output
//!   into the other's prior through the correlation model.
//! * [`pep`] and [`spectrum`]: pairwise error probabilities with correlated side
//!   information, weight spectra and union bounds.
//! * [`search`]: exhaustive search for the code minimizing the packet bound.
//! * [`sim`]: Monte Carlo driver and CSV output used by the CLI.

pub mod channel;
pub mod code;
pub mod config;
pub mod decode;
mod error;
pub mod joint;
pub mod pep;
pub mod search;
pub mod sim;
pub mod spectrum;

pub use channel::{ChannelParams, CorrelatedPair, Fading, ObservationSeq};
pub use code::{CodeSpec, PolyGF2, Trellis};
pub use decode::{sova, viterbi_hard, DecodeResult, ProbSequence};
pub use error::{Error, Result};
pub use joint::{decode_genie, decode_joint, JointConfig, JointResult, PriorExchange};
pub use pep::PepParams;
pub use search::{search_optimal, SearchResult, SearchSpec};
pub use sim::{Scheme, SimConfig, SimResult};
pub use spectrum::{enumerate_spectrum, WeightSpectrum};

/// Converts a value in decibels to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
