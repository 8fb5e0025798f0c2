//! Rate-1/2 convolutional codes described by two generator polynomials and an
//! optional feedback polynomial, plus the trellis they induce.
//!
//! Encoder model (memory `nu`, register `s_1..s_nu`, `s_1` most recent):
//!
//! ```text
//! a      = x ^ h_1 s_1 ^ ... ^ h_nu s_nu
//! out_j  = g_j,0 a ^ g_j,1 s_1 ^ ... ^ g_j,nu s_nu
//! s'     = (a, s_1, ..., s_{nu-1})
//! ```
//!
//! With `h = 0` or `h = 1` the feedback sum is empty and the code is
//! feed-forward. Any other `h` must have `h_0 = 1`.
//!
//! States are packed with `s_1` in the most significant of the `nu` bits, so
//! register contents `10` (just shifted in a one) is state 2 for `nu = 2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported memory. The exhaustive search is limited further.
pub const MAX_MEMORY: usize = 12;

/// Polynomial over GF(2) with a fixed number of coefficients (`nu + 1`).
///
/// Bit `k` of [`PolyGF2::bits`] is the coefficient of `D^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyGF2 {
    bits: u16,
    len: u8,
}

impl PolyGF2 {
    pub fn new(bits: u16, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_MEMORY + 1 {
            return Err(Error::InvalidPolynomial(format!(
                "length {len} outside 1..={}",
                MAX_MEMORY + 1
            )));
        }
        if len < 16 && bits >> len != 0 {
            return Err(Error::InvalidPolynomial(format!(
                "{bits:#b} does not fit in {len} coefficients"
            )));
        }
        Ok(Self {
            bits,
            len: len as u8,
        })
    }

    pub fn zero(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    /// Parses a binary string written highest power first ("1101" is
    /// `D^3 + D^2 + 1`). The string length fixes the polynomial length.
    pub fn from_binary(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidPolynomial(s.to_string()));
        }
        let bits = u16::from_str_radix(s, 2).map_err(|_| Error::InvalidPolynomial(s.into()))?;
        Self::new(bits, s.len())
    }

    /// Parses octal shorthand of the same bit pattern (`15` is `1101`).
    pub fn from_octal(s: &str, len: usize) -> Result<Self> {
        let digits = s.trim().trim_start_matches("0o");
        let bits =
            u16::from_str_radix(digits, 8).map_err(|_| Error::InvalidPolynomial(s.into()))?;
        Self::new(bits, len)
    }

    /// Parses either form: `0o15` / `o15` is octal, anything else binary.
    /// A binary string shorter than `len` is left-padded with zeros.
    pub fn parse(s: &str, len: usize) -> Result<Self> {
        let t = s.trim();
        if let Some(oct) = t.strip_prefix("0o").or_else(|| t.strip_prefix('o')) {
            return Self::from_octal(oct, len);
        }
        let p = Self::from_binary(t)?;
        if p.len() > len {
            return Err(Error::InvalidPolynomial(format!(
                "'{t}' has {} coefficients, expected {len}",
                p.len()
            )));
        }
        Self::new(p.bits, len)
    }

    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn coeff(&self, k: usize) -> u8 {
        ((self.bits >> k) & 1) as u8
    }

    pub fn to_binary(&self) -> String {
        (0..self.len())
            .rev()
            .map(|k| if self.coeff(k) == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn to_octal(&self) -> String {
        format!("{:o}", self.bits)
    }
}

impl fmt::Display for PolyGF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary())
    }
}

impl FromStr for PolyGF2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_binary(s)
    }
}

/// A rate-1/2 code: generators `g1`, `g2` and feedback `h`, all of length `nu + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    g1: PolyGF2,
    g2: PolyGF2,
    h: PolyGF2,
    nu: usize,
}

impl CodeSpec {
    pub fn new(g1: PolyGF2, g2: PolyGF2, h: PolyGF2) -> Result<Self> {
        let len = g1.len();
        if len < 2 {
            return Err(Error::InvalidCode("memory must be at least 1".into()));
        }
        if g2.len() != len || h.len() != len {
            return Err(Error::InvalidCode(format!(
                "polynomial lengths differ: {}, {}, {}",
                g1.len(),
                g2.len(),
                h.len()
            )));
        }
        if h.bits() > 1 && h.coeff(0) == 0 {
            return Err(Error::InvalidCode(format!(
                "feedback {h} has no constant term and cannot be realized causally"
            )));
        }
        Ok(Self {
            g1,
            g2,
            h,
            nu: len - 1,
        })
    }

    /// Builds a code from CLI-style strings (binary, or octal with an `o` prefix).
    pub fn parse(g1: &str, g2: &str, h: &str, nu: usize) -> Result<Self> {
        let len = nu + 1;
        Self::new(
            PolyGF2::parse(g1, len)?,
            PolyGF2::parse(g2, len)?,
            PolyGF2::parse(h, len)?,
        )
    }

    fn fixed(g1: &str, g2: &str, h: &str) -> Self {
        Self::parse(g1, g2, h, 3).expect("built-in code is valid")
    }

    /// Optimum 8-state recursive code for source correlation 0.8.
    pub fn c80() -> Self {
        Self::fixed("1101", "1111", "1011")
    }

    /// Optimum 8-state recursive code for source correlation 0.9.
    pub fn c90() -> Self {
        Self::fixed("1011", "1111", "1101")
    }

    /// Optimum 8-state recursive code for source correlation 0.95.
    pub fn c95() -> Self {
        Self::fixed("1011", "1101", "1111")
    }

    /// Best 8-state feed-forward code for uncorrelated sources (`15, 17` octal).
    pub fn nonrecursive_nu3() -> Self {
        Self::fixed("1101", "1111", "0000")
    }

    /// The table code designed for the correlation nearest to `rho`.
    pub fn optimum_for_rho(rho: f64) -> Self {
        let candidates = [(0.8, Self::c80()), (0.9, Self::c90()), (0.95, Self::c95())];
        candidates
            .into_iter()
            .min_by(|a, b| (a.0 - rho).abs().total_cmp(&(b.0 - rho).abs()))
            .map(|(_, c)| c)
            .unwrap()
    }

    pub fn g1(&self) -> PolyGF2 {
        self.g1
    }

    pub fn g2(&self) -> PolyGF2 {
        self.g2
    }

    pub fn h(&self) -> PolyGF2 {
        self.h
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn num_states(&self) -> usize {
        1 << self.nu
    }

    pub fn is_recursive(&self) -> bool {
        self.h.bits() >> 1 != 0
    }

    pub fn trellis(&self) -> Trellis {
        build_trellis(self)
    }

    pub fn encode(&self, info: &[u8], terminate: bool) -> Vec<u8> {
        self.trellis().encode(info, terminate)
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g1={} g2={} h={}", self.g1, self.g2, self.h)
    }
}

/// Key identifying a code up to relabeling of its two outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeKey {
    pub nu: usize,
    pub g_lo: u16,
    pub g_hi: u16,
    pub h: u16,
}

pub fn canonical_key(spec: &CodeSpec) -> CodeKey {
    let (a, b) = (spec.g1.bits(), spec.g2.bits());
    CodeKey {
        nu: spec.nu,
        g_lo: a.min(b),
        g_hi: a.max(b),
        h: spec.h.bits(),
    }
}

/// State-transition table of a rate-1/n feedback/feed-forward encoder.
#[derive(Clone, Debug)]
pub struct Trellis {
    nu: usize,
    n_out: usize,
    /// `next[state][input]`
    next: Vec<[u32; 2]>,
    /// `out[state][input]`, bit `j` holds output `j`.
    out: Vec<[u8; 2]>,
    /// `prev[state]` lists the two `(predecessor, input)` pairs entering `state`.
    prev: Vec<[(u32, u8); 2]>,
}

/// Builds the trellis of a validated [`CodeSpec`].
pub fn build_trellis(spec: &CodeSpec) -> Trellis {
    let feedback = if spec.is_recursive() {
        spec.h.bits() & !1
    } else {
        0
    };
    Trellis::from_taps(spec.nu, &[spec.g1.bits(), spec.g2.bits()], feedback)
}

impl Trellis {
    /// Feed-forward trellis of a rate-1/n code (`gens.len() == n`).
    pub fn feedforward(nu: usize, gens: &[PolyGF2]) -> Result<Self> {
        if nu == 0 || nu > MAX_MEMORY {
            return Err(Error::InvalidCode(format!("memory {nu} out of range")));
        }
        if gens.is_empty() || gens.len() > 8 {
            return Err(Error::InvalidCode("need 1 to 8 generators".into()));
        }
        if gens.iter().any(|g| g.len() != nu + 1) {
            return Err(Error::InvalidCode("generator length must be nu + 1".into()));
        }
        let taps: Vec<u16> = gens.iter().map(|g| g.bits()).collect();
        Ok(Self::from_taps(nu, &taps, 0))
    }

    /// `taps[j]` and `feedback` use bit k for the coefficient of `D^k`.
    fn from_taps(nu: usize, taps: &[u16], feedback: u16) -> Self {
        let n_states = 1usize << nu;
        // register word: a at bit nu, s_k at bit nu - k
        let reverse = |p: u16| -> u32 {
            (0..=nu)
                .filter(|&k| (p >> k) & 1 == 1)
                .map(|k| 1u32 << (nu - k))
                .sum()
        };
        let tap_masks: Vec<u32> = taps.iter().map(|&p| reverse(p)).collect();
        let fb_mask = reverse(feedback);

        let mut next = vec![[0u32; 2]; n_states];
        let mut out = vec![[0u8; 2]; n_states];
        let mut prev = vec![Vec::with_capacity(2); n_states];
        for state in 0..n_states as u32 {
            let fb = (state & fb_mask).count_ones() & 1;
            for input in 0..2u32 {
                let a = input ^ fb;
                let reg = (a << nu) | state;
                let ns = reg >> 1;
                let mut o = 0u8;
                for (j, m) in tap_masks.iter().enumerate() {
                    o |= (((reg & m).count_ones() & 1) as u8) << j;
                }
                next[state as usize][input as usize] = ns;
                out[state as usize][input as usize] = o;
                prev[ns as usize].push((state, input as u8));
            }
        }
        let prev = prev
            .into_iter()
            .map(|p| {
                debug_assert_eq!(p.len(), 2);
                [p[0], p[1]]
            })
            .collect();
        Self {
            nu,
            n_out: taps.len(),
            next,
            out,
            prev,
        }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    /// Output bits per input bit.
    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn next_state(&self, state: usize, input: u8) -> usize {
        self.next[state][input as usize] as usize
    }

    /// Packed output label; bit `j` is output `j`.
    pub fn output(&self, state: usize, input: u8) -> u8 {
        self.out[state][input as usize]
    }

    pub fn output_weight(&self, state: usize, input: u8) -> u32 {
        self.output(state, input).count_ones()
    }

    pub fn predecessors(&self, state: usize) -> [(usize, u8); 2] {
        let p = self.prev[state];
        [(p[0].0 as usize, p[0].1), (p[1].0 as usize, p[1].1)]
    }

    /// Input that shifts a zero into the register from `state`.
    pub fn tail_input(&self, state: usize) -> u8 {
        let msb = 1usize << (self.nu - 1);
        if self.next_state(state, 0) & msb == 0 {
            0
        } else {
            1
        }
    }

    /// Coded length produced for `k` information bits.
    pub fn coded_len(&self, k: usize, terminated: bool) -> usize {
        self.n_out * (k + if terminated { self.nu } else { 0 })
    }

    /// Encodes `info` (values 0/1) starting from state 0. With `terminate`,
    /// `nu` tail inputs drive the encoder back to state 0.
    pub fn encode(&self, info: &[u8], terminate: bool) -> Vec<u8> {
        self.encode_from(0, info, terminate).0
    }

    /// Same as [`Trellis::encode`] but also returns the final state.
    pub fn encode_from(&self, start: usize, info: &[u8], terminate: bool) -> (Vec<u8>, usize) {
        let mut coded = Vec::with_capacity(self.coded_len(info.len(), terminate));
        let mut state = start;
        let mut push = |state: &mut usize, x: u8| {
            let o = self.output(*state, x);
            coded.extend((0..self.n_out).map(|j| (o >> j) & 1));
            *state = self.next_state(*state, x);
        };
        for &x in info {
            push(&mut state, x & 1);
        }
        if terminate {
            for _ in 0..self.nu {
                let x = self.tail_input(state);
                push(&mut state, x);
            }
        }
        (coded, state)
    }

    /// Tail inputs that return `state` to zero.
    pub fn termination_tail(&self, mut state: usize) -> Vec<u8> {
        (0..self.nu)
            .map(|_| {
                let x = self.tail_input(state);
                state = self.next_state(state, x);
                x
            })
            .collect()
    }

    /// True when some cycle through nonzero states emits only zeros, or when
    /// every output is identically zero.
    pub fn has_zero_weight_cycle(&self) -> bool {
        let n = self.num_states();
        if self.out.iter().all(|o| o[0] == 0 && o[1] == 0) {
            return true;
        }
        // DFS colouring over the subgraph of zero-output edges between nonzero states.
        let mut colour = vec![0u8; n];
        for root in 1..n {
            if colour[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0u8)];
            colour[root] = 1;
            while let Some(&mut (s, ref mut input)) = stack.last_mut() {
                if *input == 2 {
                    colour[s] = 2;
                    stack.pop();
                    continue;
                }
                let x = *input;
                *input += 1;
                if self.output(s, x) != 0 {
                    continue;
                }
                let ns = self.next_state(s, x);
                if ns == 0 {
                    continue;
                }
                match colour[ns] {
                    1 => return true,
                    0 => {
                        colour[ns] = 1;
                        stack.push((ns, 0));
                    }
                    _ => {}
                }
            }
        }
        false
    }
}

pub fn is_catastrophic(spec: &CodeSpec) -> bool {
    if spec.g1.is_zero() && spec.g2.is_zero() {
        return true;
    }
    spec.trellis().has_zero_weight_cycle()
}
