//! Pauli strings and real/complex weighted sums of them.
//!
//! A [`PauliString`] packs one 2-bit letter code per qubit into a `u128`,
//! with qubit 0 in the most significant digit. Comparing the packed words
//! therefore orders strings lexicographically as base-4 integers
//! (`I < X < Y < Z`), which is the canonical order used throughout the crate.
//!
//! Dense matrices use the usual Kronecker convention: the leftmost letter
//! (qubit 0) is the most significant bit of a computational basis index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest operator (in qubits) [`decompose`] accepts by default.
pub const DEFAULT_DECOMPOSE_CAP: usize = 6;
/// Largest register (in qubits) that is ever materialized as a dense matrix.
pub const DEFAULT_DENSE_CAP: usize = 12;
/// Coefficients below this magnitude are dropped after merging terms.
pub const PRUNE_TOL: f64 = 1e-12;

pub const MAX_QUBITS: usize = 64;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn from_code(code: u8) -> Pauli {
        Pauli::ALL[(code & 3) as usize]
    }

    pub fn as_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Single-letter product `self * other` as (phase, letter).
    pub fn multiply(self, other: Pauli) -> (Phase, Pauli) {
        let (a, b) = (self as u8, other as u8);
        if a == 0 {
            return (Phase::ONE, other);
        }
        if b == 0 {
            return (Phase::ONE, self);
        }
        if a == b {
            return (Phase::ONE, Pauli::I);
        }
        // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
        let cyclic = matches!((a, b), (1, 2) | (2, 3) | (3, 1));
        let phase = if cyclic { Phase::I } else { Phase::MINUS_I };
        (phase, Pauli::from_code(a ^ b))
    }
}

/// A power of `i`: one of `+1, +i, -1, -i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn inverse(self) -> Phase {
        Phase((4 - self.0) & 3)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) & 3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Tensor product of single-qubit Pauli letters on `n <= 64` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    // `n` first so that strings of different length never interleave.
    n: u8,
    bits: u128,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString { n: n as u8, bits: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = PauliString::identity(letters.len());
        for (q, &p) in letters.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// String with the letters of `local` placed on `qubits` of an `n`-qubit register.
    pub fn embedded(n: usize, qubits: &[usize], local: &PauliString) -> Result<Self> {
        if qubits.len() != local.len() {
            return Err(Error::LengthMismatch {
                left: qubits.len(),
                right: local.len(),
            });
        }
        let mut s = PauliString::identity(n);
        for (k, &q) in qubits.iter().enumerate() {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, len: n });
            }
            s.set(q, local.letter(k));
        }
        Ok(s)
    }

    /// Letters on the given qubits, in that order.
    pub fn restricted(&self, qubits: &[usize]) -> PauliString {
        let letters: Vec<Pauli> = qubits.iter().map(|&q| self.letter(q)).collect();
        PauliString::from_letters(&letters)
    }

    /// All `4^n` strings in canonical order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(n <= 16, "enumerating 4^{n} strings is not sensible");
        (0..(1u128 << (2 * n))).map(move |bits| PauliString { n: n as u8, bits })
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn shift(&self, q: usize) -> usize {
        2 * (self.len() - 1 - q)
    }

    pub fn letter(&self, q: usize) -> Pauli {
        assert!(q < self.len());
        Pauli::from_code((self.bits >> self.shift(q)) as u8)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.len());
        let sh = self.shift(q);
        self.bits = (self.bits & !(3u128 << sh)) | ((p as u128) << sh);
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len()).map(move |q| self.letter(q))
    }

    /// Base-4 integer value of the letters (qubit 0 most significant).
    pub fn index(&self) -> u128 {
        self.bits
    }

    pub fn from_index(n: usize, index: u128) -> Self {
        assert!(n <= MAX_QUBITS);
        let mask = if n == 64 { u128::MAX } else { (1u128 << (2 * n)) - 1 };
        PauliString {
            n: n as u8,
            bits: index & mask,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> usize {
        self.letters().filter(|&p| p != Pauli::I).count()
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&q| self.letter(q) != Pauli::I)
            .collect()
    }

    pub fn y_count(&self) -> usize {
        self.letters().filter(|&p| p == Pauli::Y).count()
    }

    pub fn y_parity(&self) -> Parity {
        if self.y_count() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Operator product `self * other = phase * r`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        self.check_len(other)?;
        let mut phase = Phase::ONE;
        let mut out = PauliString::identity(self.len());
        for q in 0..self.len() {
            let (ph, p) = self.letter(q).multiply(other.letter(q));
            phase = phase * ph;
            out.set(q, p);
        }
        Ok((phase, out))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let clashes = (0..self.len())
            .filter(|&q| {
                let (a, b) = (self.letter(q), other.letter(q));
                a != Pauli::I && b != Pauli::I && a != b
            })
            .count();
        Ok(clashes % 2 == 0)
    }

    /// Basis-index bits flipped by this string (X or Y letters).
    pub fn x_mask(&self) -> u64 {
        self.mask_of(|p| matches!(p, Pauli::X | Pauli::Y))
    }

    /// Basis-index bits picking up a sign (Z or Y letters).
    pub fn z_mask(&self) -> u64 {
        self.mask_of(|p| matches!(p, Pauli::Z | Pauli::Y))
    }

    fn mask_of(&self, pred: impl Fn(Pauli) -> bool) -> u64 {
        let n = self.len();
        (0..n)
            .filter(|&q| pred(self.letter(q)))
            .fold(0u64, |m, q| m | (1u64 << (n - 1 - q)))
    }

    /// `sigma |x> = amplitude * |x'>`.
    pub fn apply_to_basis(&self, x: u64) -> (u64, Complex64) {
        let action = MonomialAction::of(self);
        action.apply(x)
    }

    pub fn dense(&self) -> Result<DMatrix<Complex64>> {
        PauliSum::from_string(*self).dense_matrix()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_QUBITS {
            return Err(Error::parse(s, format!("more than {MAX_QUBITS} letters")));
        }
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::parse(s, format!("bad letter `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::parse(s, "empty Pauli string"));
        }
        Ok(PauliString::from_letters(&letters))
    }
}

/// Precomputed action of a Pauli string on computational basis states:
/// `sigma |x> = i^ny (-1)^{popcount(x & z)} |x ^ flip>`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MonomialAction {
    pub flip: u64,
    pub z: u64,
    pub base: Complex64,
}

impl MonomialAction {
    pub fn of(s: &PauliString) -> Self {
        MonomialAction {
            flip: s.x_mask(),
            z: s.z_mask(),
            base: Phase((s.y_count() & 3) as u8).to_complex(),
        }
    }

    #[inline]
    pub fn sign(&self, x: u64) -> f64 {
        if (x & self.z).count_ones() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    pub fn apply(&self, x: u64) -> (u64, Complex64) {
        (x ^ self.flip, self.base * self.sign(x))
    }
}

/// Sum of Pauli strings with complex coefficients, kept in canonical order
/// with like terms merged.
#[derive(Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(PauliString, Complex64)>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: Vec::new() }
    }

    pub fn from_string(s: PauliString) -> Self {
        PauliSum {
            n: s.len(),
            terms: vec![(s, C_ONE)],
        }
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliString)>,
    {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (c, s) in terms {
            if s.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: s.len(),
                });
            }
            *acc.entry(s).or_insert(C_ZERO) += c;
        }
        Ok(Self::from_map(n, acc))
    }

    pub fn from_real_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        Self::from_terms(n, terms.into_iter().map(|(c, s)| (Complex64::new(c, 0.0), s)))
    }

    fn from_map(n: usize, acc: BTreeMap<PauliString, Complex64>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= PRUNE_TOL)
            .collect();
        PauliSum { n, terms }
    }

    /// Real coefficient vector over an explicit basis, as used by c-matrices.
    pub fn from_real_vector(basis: &[PauliString], coeffs: &[f64]) -> Result<Self> {
        if basis.len() != coeffs.len() {
            return Err(Error::LengthMismatch {
                left: basis.len(),
                right: coeffs.len(),
            });
        }
        let n = basis.first().map_or(0, |s| s.len());
        Self::from_real_terms(n, coeffs.iter().copied().zip(basis.iter().copied()))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn strings(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(|(s, _)| *s)
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms
            .binary_search_by(|(t, _)| t.cmp(s))
            .map(|i| self.terms[i].1)
            .unwrap_or(C_ZERO)
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.im.abs()).fold(0.0, f64::max)
    }

    /// All coefficients real, i.e. the operator is Hermitian.
    pub fn is_real_hermitian(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Single string with unit coefficient, if that is all this sum is.
    pub fn as_single_string(&self) -> Option<(PauliString, f64)> {
        match self.terms.as_slice() {
            [(s, c)] if c.im == 0.0 => Some((*s, c.re)),
            _ => None,
        }
    }

    /// Union of the qubit supports of all terms.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for (s, _) in &self.terms {
            for q in s.support() {
                used[q] = true;
            }
        }
        (0..self.n).filter(|&q| used[q]).collect()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let map = self.terms.iter().map(|(s, c)| (*s, c * k)).collect();
        Self::from_map(self.n, map)
    }

    pub fn add(&self, other: &PauliSum) -> Result<Self> {
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(s, c)| (*c, *s)),
        )
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliSum) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (ph, r) = a.multiply(b)?;
                *acc.entry(r).or_insert(C_ZERO) += ca * cb * ph.to_complex();
            }
        }
        Ok(Self::from_map(self.n, acc))
    }

    pub fn embed(&self, n: usize, qubits: &[usize]) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(s, c)| PauliString::embedded(n, qubits, s).map(|e| (*c, e)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, terms)
    }

    /// Coefficients as a real vector over `basis`; imaginary parts are dropped.
    pub fn real_vector(&self, basis: &[PauliString]) -> Vec<f64> {
        basis.iter().map(|s| self.coefficient(s).re).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(s, _)| s.x_mask() == 0)
    }

    /// Diagonal of a Z-only sum, one entry per basis index.
    pub fn diagonal(&self) -> Option<Vec<Complex64>> {
        if !self.is_diagonal() {
            return None;
        }
        let dim = 1usize << self.n;
        let actions: Vec<_> = self
            .terms
            .iter()
            .map(|(s, c)| (MonomialAction::of(s), *c))
            .collect();
        Some(
            (0..dim as u64)
                .map(|x| actions.iter().map(|(a, c)| c * a.sign(x)).sum())
                .collect(),
        )
    }

    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.dense_matrix_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn dense_matrix_with_cap(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n > cap {
            return Err(Error::CapExceeded {
                what: "dense matrix qubits",
                value: self.n,
                cap,
            });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (s, c) in &self.terms {
            let act = MonomialAction::of(s);
            for y in 0..dim as u64 {
                let (x, amp) = act.apply(y);
                m[(x as usize, y as usize)] += c * amp;
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliSum({self})")
    }
}

/// Real number printed with at most 12 significant digits, shortest form.
pub fn format_coefficient(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

impl fmt::Display for PauliSum {
    /// `c1*S1 + c2*S2 - c3*S3`; unit coefficients are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0*{}", PauliString::identity(self.n));
        }
        for (k, (s, c)) in self.terms.iter().enumerate() {
            let (sep, shown) = if c.im == 0.0 && c.re < 0.0 {
                (" - ", format_coefficient(-c.re))
            } else if c.im == 0.0 {
                (" + ", format_coefficient(c.re))
            } else {
                (
                    " + ",
                    format!(
                        "({}{}{}i)",
                        format_coefficient(c.re),
                        if c.im < 0.0 { "-" } else { "+" },
                        format_coefficient(c.im.abs())
                    ),
                )
            };
            if k == 0 {
                if sep == " - " {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{sep}")?;
            }
            if shown == "1" {
                write!(f, "{s}")?;
            } else {
                write!(f, "{shown}*{s}")?;
            }
        }
        Ok(())
    }
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let inner = inner.trim();
        let body = inner
            .strip_suffix('i')
            .ok_or_else(|| Error::parse(text, "complex coefficient must end in `i`"))?;
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| {
                (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
            })
            .ok_or_else(|| Error::parse(text, "missing imaginary part"))?;
        let re: f64 = body[..split]
            .trim()
            .parse()
            .map_err(|_| Error::parse(text, "bad real part"))?;
        let im_text = body[split..].replace(' ', "");
        let im: f64 = match im_text.as_str() {
            "+" => 1.0,
            "-" => -1.0,
            other => other.parse().map_err(|_| Error::parse(text, "bad imaginary part"))?,
        };
        Ok(Complex64::new(re, im))
    } else {
        t.parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| Error::parse(text, "bad coefficient"))
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        if text.is_empty() {
            return Err(Error::parse(s, "empty Pauli sum"));
        }
        // Split into signed terms at top-level `+`/`-` that are not exponent signs.
        let mut pieces: Vec<(f64, String)> = Vec::new();
        let mut depth = 0i32;
        let mut sign = 1.0;
        let mut cur = String::new();
        let mut prev: Option<char> = None;
        for c in text.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            let is_sep = depth == 0
                && (c == '+' || c == '-')
                && !matches!(prev, Some('e') | Some('E'));
            if is_sep {
                if !cur.trim().is_empty() {
                    pieces.push((sign, std::mem::take(&mut cur)));
                    sign = 1.0;
                }
                if c == '-' {
                    sign = -sign;
                }
            } else {
                cur.push(c);
            }
            if !c.is_whitespace() {
                prev = Some(c);
            }
        }
        if !cur.trim().is_empty() {
            pieces.push((sign, cur));
        }

        let mut terms = Vec::with_capacity(pieces.len());
        for (sign, piece) in pieces {
            let piece = piece.trim();
            let (coef, string) = match piece.rsplit_once('*') {
                Some((c, p)) => (parse_complex(c)?, p.parse::<PauliString>()?),
                None => (C_ONE, piece.parse::<PauliString>()?),
            };
            terms.push((coef * sign, string));
        }
        let n = terms[0].1.len();
        PauliSum::from_terms(n, terms)
    }
}

/// Hilbert-Schmidt decomposition `op = sum_i tr(sigma_i op)/2^k sigma_i`.
pub fn decompose(op: &DMatrix<Complex64>) -> Result<PauliSum> {
    decompose_with_cap(op, DEFAULT_DECOMPOSE_CAP)
}

pub fn decompose_with_cap(op: &DMatrix<Complex64>, cap: usize) -> Result<PauliSum> {
    let dim = op.nrows();
    if op.ncols() != dim {
        return Err(Error::LengthMismatch {
            left: op.nrows(),
            right: op.ncols(),
        });
    }
    if !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let k = dim.trailing_zeros() as usize;
    if k > cap {
        return Err(Error::CapExceeded {
            what: "decompose qubits",
            value: k,
            cap,
        });
    }
    let inv = 1.0 / dim as f64;
    let terms = PauliString::all(k).map(|s| {
        let act = MonomialAction::of(&s);
        // tr(sigma op) = sum_y <y^flip| sigma |y> op[y, y^flip]
        let tr: Complex64 = (0..dim as u64)
            .map(|y| {
                let (x, amp) = act.apply(y);
                amp * op[(y as usize, x as usize)]
            })
            .sum();
        (tr * inv, s)
    });
    PauliSum::from_terms(k, terms)
}

/// Decomposition of a diagonal operator onto I/Z strings by a Walsh-Hadamard
/// transform; no qubit cap beyond what the diagonal itself costs.
pub fn decompose_diagonal(diag: &[Complex64]) -> Result<PauliSum> {
    let dim = diag.len();
    if !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let k = dim.trailing_zeros() as usize;
    let mut w = diag.to_vec();
    let mut h = 1;
    while h < dim {
        for block in (0..dim).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (w[j], w[j + h]);
                w[j] = a + b;
                w[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let inv = 1.0 / dim as f64;
    let terms = w.into_iter().enumerate().map(|(zbits, c)| {
        let mut s = PauliString::identity(k);
        for q in 0..k {
            if (zbits >> (k - 1 - q)) & 1 == 1 {
                s.set(q, Pauli::Z);
            }
        }
        (c * inv, s)
    });
    PauliSum::from_terms(k, terms)
}
