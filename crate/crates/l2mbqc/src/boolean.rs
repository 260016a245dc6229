//! Boolean functions `F_2^n -> F_2` and their classical analyses.
//!
//! Truth tables are packed 64 entries per word. Entry `x` holds `f(x)` where
//! bit `i` of `x` (counting from 0) is the input bit `x_{i+1}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};

/// Largest arity accepted by table-based operations.
pub const MAX_ARITY: usize = 20;

/// Builder families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// 0 iff the Hamming weight is congruent to `j` modulo `p`.
    ModP { p: u32, j: u32 },
    And,
    Or,
    /// Second least significant bit of the Hamming weight.
    PairwiseAnd,
    Parity,
    Constant(bool),
    Custom,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::ModP { .. } => "mod_p",
            Kind::And => "and",
            Kind::Or => "or",
            Kind::PairwiseAnd => "pairwise_and",
            Kind::Parity => "parity",
            Kind::Constant(_) => "constant",
            Kind::Custom => "custom",
        }
    }

    fn params(&self) -> Value {
        match self {
            Kind::ModP { p, j } => json!({ "p": p, "j": j }),
            Kind::Constant(b) => json!({ "value": u8::from(*b) }),
            _ => json!({}),
        }
    }

    fn symmetric_profile(&self, n: usize) -> Option<Vec<bool>> {
        let rule: Box<dyn Fn(usize) -> bool> = match *self {
            Kind::ModP { p, j } => Box::new(move |w| w % p as usize != j as usize),
            Kind::And => Box::new(move |w| w == n),
            Kind::Or => Box::new(|w| w > 0),
            Kind::PairwiseAnd => Box::new(|w| (w >> 1) & 1 == 1),
            Kind::Parity => Box::new(|w| w & 1 == 1),
            Kind::Constant(b) => Box::new(move |_| b),
            Kind::Custom => return None,
        };
        Some((0..=n).map(rule).collect())
    }
}

/// A Boolean function stored as a packed truth table.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    kind: Kind,
    words: Vec<u64>,
    profile: Option<Vec<bool>>,
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction({}, n={}, 0x{})", self.kind.name(), self.n, self.table_hex())
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n > MAX_ARITY {
        return Err(Error::ArityCap { n, cap: MAX_ARITY });
    }
    Ok(())
}

impl BooleanFunction {
    /// Builds a named family member on `n` bits.
    pub fn build(kind: Kind, n: usize) -> Result<Self> {
        check_arity(n)?;
        if n == 0 {
            return Err(invalid("arity must be at least 1"));
        }
        if let Kind::ModP { p, j } = kind {
            if p < 2 || j >= p {
                return Err(invalid(format!("mod_p needs p >= 2 and 0 <= j < p (got p={p}, j={j})")));
            }
        }
        if kind == Kind::Custom {
            return Err(invalid("custom functions are built from a table"));
        }
        let profile = kind.symmetric_profile(n).expect("named kinds are symmetric");
        let mut f = Self::from_fn(n, |x| profile[x.count_ones() as usize])?;
        f.kind = kind;
        f.profile = Some(profile);
        Ok(f)
    }

    pub fn mod_p(p: u32, j: u32, n: usize) -> Result<Self> {
        Self::build(Kind::ModP { p, j }, n)
    }

    pub fn and(n: usize) -> Result<Self> {
        Self::build(Kind::And, n)
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::build(Kind::Or, n)
    }

    pub fn pairwise_and(n: usize) -> Result<Self> {
        Self::build(Kind::PairwiseAnd, n)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::build(Kind::Parity, n)
    }

    pub fn constant(value: bool, n: usize) -> Result<Self> {
        Self::build(Kind::Constant(value), n)
    }

    /// Tabulates `f` over all `2^n` inputs. The result is tagged `Custom`;
    /// its symmetric profile is filled in when `f` turns out symmetric.
    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        check_arity(n)?;
        let size = 1u64 << n;
        let mut words = vec![0u64; (size as usize).div_ceil(64)];
        for x in 0..size {
            if f(x) {
                words[(x / 64) as usize] |= 1 << (x % 64);
            }
        }
        let mut out = BooleanFunction { n, kind: Kind::Custom, words, profile: None };
        out.profile = out.detect_profile();
        Ok(out)
    }

    /// Custom function from an explicit list of `2^n` output bits.
    pub fn from_table(n: usize, bits: &[bool]) -> Result<Self> {
        check_arity(n)?;
        if bits.len() != 1 << n {
            return Err(invalid(format!("table has {} entries, expected {}", bits.len(), 1u64 << n)));
        }
        Self::from_fn(n, |x| bits[x as usize])
    }

    /// Symmetric custom function from its Hamming-weight profile (length `n + 1`).
    pub fn from_profile(profile: &[bool]) -> Result<Self> {
        if profile.is_empty() {
            return Err(invalid("profile must have n + 1 >= 1 entries"));
        }
        let n = profile.len() - 1;
        Self::from_fn(n, |x| profile[x.count_ones() as usize])
    }

    /// Parses the big-number hex form produced by [`Self::table_hex`].
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_arity(n)?;
        let digits: Vec<u8> = hex
            .trim_start_matches("0x")
            .chars()
            .rev()
            .map(|c| c.to_digit(16).map(|d| d as u8).ok_or_else(|| invalid(format!("bad hex digit {c:?}"))))
            .collect::<Result<_>>()?;
        let size = 1usize << n;
        if digits.len() * 4 < size && digits.len() < expected_hex_digits(n) {
            return Err(invalid("hex string too short for the arity"));
        }
        for (i, d) in digits.iter().enumerate() {
            if i * 4 >= size && *d != 0 {
                return Err(invalid("hex string has bits beyond 2^n"));
            }
        }
        Self::from_fn(n, |x| {
            let x = x as usize;
            (digits[x / 4] >> (x % 4)) & 1 == 1
        })
    }

    fn detect_profile(&self) -> Option<Vec<bool>> {
        let mut profile: Vec<Option<bool>> = vec![None; self.n + 1];
        for x in 0..(1u64 << self.n) {
            let w = x.count_ones() as usize;
            let v = self.eval(x);
            match profile[w] {
                None => profile[w] = Some(v),
                Some(prev) if prev != v => return None,
                _ => {}
            }
        }
        Some(profile.into_iter().map(|v| v.unwrap_or(false)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Hamming-weight profile, present iff the function is symmetric.
    pub fn profile(&self) -> Option<&[bool]> {
        self.profile.as_deref()
    }

    pub fn is_symmetric(&self) -> bool {
        self.profile.is_some()
    }

    /// `f(x)` for an input given as an integer index. Bits above `n` are ignored.
    pub fn eval(&self, x: u64) -> bool {
        let x = x & ((1u64 << self.n) - 1);
        (self.words[(x / 64) as usize] >> (x % 64)) & 1 == 1
    }

    /// `f(x)` for an explicit bit vector `(x_1, ..., x_n)`.
    pub fn evaluate(&self, bits: &[bool]) -> Result<bool> {
        if bits.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: bits.len() });
        }
        Ok(self.eval(bits_to_index(bits)))
    }

    /// All outputs in input order.
    pub fn table(&self) -> Vec<bool> {
        (0..(1u64 << self.n)).map(|x| self.eval(x)).collect()
    }

    /// Truth table as one big hexadecimal number whose bit `x` is `f(x)`,
    /// using `max(1, 2^n / 4)` digits.
    pub fn table_hex(&self) -> String {
        let digits = expected_hex_digits(self.n);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut v = 0u8;
            for b in 0..4 {
                let x = (d * 4 + b) as u64;
                if x < (1u64 << self.n) && self.eval(x) {
                    v |= 1 << b;
                }
            }
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        s
    }

    /// Algebraic normal form via the Moebius transform over the subset lattice.
    pub fn anf(&self) -> AnfPolynomial {
        let mut t: Vec<bool> = self.table();
        moebius_in_place(&mut t, self.n);
        let monomials = t.iter().enumerate().filter(|(_, &v)| v).map(|(s, _)| s as u64).collect();
        AnfPolynomial { n: self.n, monomials }
    }

    /// Normalized Walsh-Hadamard coefficient `2^-n sum_x (-1)^(f(x) + k.x)`.
    pub fn walsh_hadamard(&self, k: u64) -> f64 {
        let sum: i64 = (0..(1u64 << self.n))
            .map(|x| if self.eval(x) ^ ((k & x).count_ones() & 1 == 1) { -1 } else { 1 })
            .sum();
        sum as f64 / (1u64 << self.n) as f64
    }

    /// The whole spectrum, indexed by `k`, by the fast transform.
    pub fn walsh_spectrum(&self) -> Vec<f64> {
        let size = 1usize << self.n;
        let mut v: Vec<i64> = (0..size as u64).map(|x| if self.eval(x) { -1 } else { 1 }).collect();
        let mut h = 1;
        while h < size {
            for i in (0..size).step_by(2 * h) {
                for j in i..i + h {
                    let (a, b) = (v[j], v[j + h]);
                    v[j] = a + b;
                    v[j + h] = a - b;
                }
            }
            h *= 2;
        }
        v.into_iter().map(|c| c as f64 / size as f64).collect()
    }

    /// `max_k |f^(k)|`.
    pub fn f_max(&self) -> f64 {
        self.walsh_spectrum().into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    /// Noncontextual bound `(1 + f_max) / 2` on the success probability.
    pub fn nchvm_bound(&self) -> f64 {
        (1.0 + self.f_max()) / 2.0
    }

    /// Best agreement of `f` with any affine function `k.x + c`, found by
    /// enumerating all `2^(n+1)` candidates.
    pub fn best_affine_agreement(&self) -> f64 {
        let size = 1u64 << self.n;
        let mut best = 0u64;
        for k in 0..size {
            let agree = (0..size).filter(|&x| self.eval(x) == ((k & x).count_ones() & 1 == 1)).count() as u64;
            best = best.max(agree).max(size - agree);
        }
        best as f64 / size as f64
    }

    /// JSON form `{"n", "kind", "params", "table_hex"}`.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "kind": self.kind.name(),
            "params": self.kind.params(),
            "table_hex": self.table_hex(),
        })
    }

    /// Inverse of [`Self::to_json`]. Named kinds are rebuilt and must match the table.
    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: FunctionJson = serde_json::from_value(v.clone())?;
        let table = Self::from_hex(raw.n, &raw.table_hex)?;
        let kind = match raw.kind.as_str() {
            "mod_p" => Kind::ModP {
                p: param_u32(&raw.params, "p")?,
                j: param_u32(&raw.params, "j")?,
            },
            "and" => Kind::And,
            "or" => Kind::Or,
            "pairwise_and" => Kind::PairwiseAnd,
            "parity" => Kind::Parity,
            "constant" => Kind::Constant(param_u32(&raw.params, "value")? != 0),
            "custom" => return Ok(table),
            other => return Err(invalid(format!("unknown kind {other:?}"))),
        };
        let built = Self::build(kind, raw.n)?;
        if built.words != table.words {
            return Err(invalid("table_hex disagrees with the named kind"));
        }
        Ok(built)
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    n: usize,
    kind: String,
    #[serde(default)]
    params: Value,
    table_hex: String,
}

fn param_u32(params: &Value, key: &str) -> Result<u32> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as u32)
        .ok_or_else(|| invalid(format!("missing integer parameter {key:?}")))
}

fn expected_hex_digits(n: usize) -> usize {
    ((1usize << n) / 4).max(1)
}

/// Integer index of `(x_1, ..., x_n)`.
pub fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

/// Parses a bit string whose first character is `x_1`.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(invalid(format!("bit strings contain only 0 and 1, found {c:?}"))),
        })
        .collect()
}

/// Formats input `x` as a bit string with `x_1` first.
pub fn format_bits(x: u64, n: usize) -> String {
    (0..n).map(|i| if (x >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Moebius transform over F_2; an involution.
pub fn moebius_in_place(t: &mut [bool], n: usize) {
    assert_eq!(t.len(), 1 << n);
    for i in 0..n {
        let bit = 1usize << i;
        for x in 0..t.len() {
            if x & bit != 0 {
                t[x] ^= t[x ^ bit];
            }
        }
    }
}

/// Multilinear polynomial over F_2: XOR of monomials, each a subset mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnfPolynomial {
    pub n: usize,
    /// Included monomials in increasing mask order.
    pub monomials: Vec<u64>,
}

impl AnfPolynomial {
    pub fn degree(&self) -> usize {
        self.monomials.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> bool {
        self.monomials.iter().filter(|&&m| m & x == m).count() % 2 == 1
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.monomials.binary_search(&mask).is_ok()
    }

    /// Human-readable form such as `x1 + x2 + x1x2`.
    pub fn to_string_terms(&self) -> String {
        if self.monomials.is_empty() {
            return "0".into();
        }
        let term = |m: u64| -> String {
            if m == 0 {
                return "1".into();
            }
            (0..self.n).filter(|i| m >> i & 1 == 1).map(|i| format!("x{}", i + 1)).collect()
        };
        let mut sorted = self.monomials.clone();
        sorted.sort_by_key(|m| (m.count_ones(), *m));
        sorted.into_iter().map(term).collect::<Vec<_>>().join(" + ")
    }
}

/// Coefficients `a_mu^(j)` of the complete-`mu`-tic terms in the ANF of `Mod_{p,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPAnfCoefficients {
    pub p: u32,
    /// `rows[mu][j]`, `mu = 0..=n`.
    pub rows: Vec<Vec<bool>>,
}

impl ModPAnfCoefficients {
    pub fn coefficient(&self, mu: usize, j: u32) -> bool {
        self.rows[mu][j as usize]
    }

    /// Largest `mu` with `a_mu^(j) = 1`, i.e. the ANF degree of `Mod_{p,j}`.
    pub fn degree(&self, j: u32) -> usize {
        (0..self.rows.len()).rev().find(|&mu| self.rows[mu][j as usize]).unwrap_or(0)
    }
}

/// Runs `a_0 = (0, 1, ..., 1)`, `a_{mu+1}[j] = a_mu[j] + a_mu[j - 1 mod p]`.
pub fn mod_p_anf_coeffs(p: u32, n: usize) -> Result<ModPAnfCoefficients> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(invalid(format!("p must be odd and at least 3, got {p}")));
    }
    let p_us = p as usize;
    let mut rows = Vec::with_capacity(n + 1);
    let mut a: Vec<bool> = (0..p_us).map(|j| j != 0).collect();
    rows.push(a.clone());
    for _ in 0..n {
        a = (0..p_us).map(|j| a[j] ^ a[(j + p_us - 1) % p_us]).collect();
        rows.push(a.clone());
    }
    Ok(ModPAnfCoefficients { p, rows })
}

/// `C_n^mu(x)`: XOR over all `mu`-subsets of the set bits, i.e. `binom(|x|, mu) mod 2`.
pub fn complete_mutic(mu: usize, weight: usize) -> bool {
    // Lucas: binom(w, mu) is odd iff mu's bits are a subset of w's bits
    mu & !weight == 0 && mu <= weight
}
