//! Exact arithmetic for n-qubit Pauli words and single-qudit generalized
//! Pauli operators.
//!
//! A qubit word is stored as `i^phase · X^x Z^z` where `x` and `z` are bit
//! masks. Site `s` (the `s`-th letter from the left, 0-based) is bit
//! `n - 1 - s` of each mask, so the masks line up with computational basis
//! indices of the dense matrix (site 0 is the most significant qubit).
//! With `Y = iXZ` every Hermitian word has `phase = popcount(x & z) mod 4`.
//!
//! A qudit operator is `ω^phase · X^a Z^b` with `X|j⟩ = |j+1⟩`,
//! `Z|j⟩ = ω^j|j⟩` and `ω = e^{2πi/d}`, so that `ZX = ωXZ`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dense::{DenseOperator, I, ONE, ZERO};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

/// Single-site Pauli letter; the discriminant is the Bell index of σ_i.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Letter {
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            0 => Some(Letter::I),
            1 => Some(Letter::X),
            2 => Some(Letter::Y),
            3 => Some(Letter::Z),
            _ => None,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliWord {
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_parts(n, 0, 0, 0)
    }

    /// Raw constructor over index-convention masks.
    pub fn from_parts(n: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mask = site_mask(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidParameter(format!(
                "bit masks exceed {n} qubits"
            )));
        }
        Ok(Self {
            n,
            x,
            z,
            phase: phase % 4,
        })
    }

    /// Hermitian word with the given letters (`Y` included as a letter, not `XZ`).
    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        let n = letters.len();
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (s, l) in letters.iter().enumerate() {
            let bit = 1u64 << (n - 1 - s);
            let (xb, zb) = l.bits();
            if xb {
                x |= bit;
            }
            if zb {
                z |= bit;
            }
        }
        Ok(Self::from_parts(n, x, z, 0)?.hermitian())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn letter(&self, site: usize) -> Letter {
        let bit = 1u64 << (self.n - 1 - site);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|s| self.letter(s)).collect()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Hermitian representative of the projective class (`+` sign in display).
    pub fn hermitian(&self) -> Self {
        Self {
            phase: (self.y_count() % 4) as u8,
            ..*self
        }
    }

    pub fn is_identity_class(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn projectively_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Symplectic vector `(x, z)` packed as `x | z << 64`.
    pub fn symplectic(&self) -> u128 {
        self.x as u128 | ((self.z as u128) << 64)
    }

    /// Hermitian word for a packed symplectic vector.
    pub fn from_symplectic(n: usize, v: u128) -> Result<Self> {
        Ok(Self::from_parts(n, v as u64, (v >> 64) as u64, 0)?.hermitian())
    }

    fn check_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        // Z^{z1} X^{x2} = (-1)^{z1·x2} X^{x2} Z^{z1}
        let sign = (self.z & other.x).count_ones() % 2;
        Ok(Self {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: ((self.phase as u32 + other.phase as u32 + 2 * sign) % 4) as u8,
        })
    }

    /// `(i^p X^x Z^z)† = i^{-p} Z^z X^x = i^{-p} (-1)^{x·z} X^x Z^z`
    pub fn adjoint(&self) -> Self {
        let yz = self.y_count() % 2;
        Self {
            phase: ((4 - self.phase as u32 + 2 * yz) % 4) as u8,
            ..*self
        }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_n(other)?;
        Ok(symplectic_form(self.symplectic(), other.symplectic()) == 0)
    }

    fn phase_factor(&self) -> Complex64 {
        i_pow(self.phase as u32)
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_with_cap(crate::dense::DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseOperator> {
        let dim = checked_dim(self.n, cap)?;
        let mut m = DenseOperator::zeros(dim);
        let ph = self.phase_factor();
        for j in 0..dim as u64 {
            let sign = if (self.z & j).count_ones() % 2 == 1 { -ph } else { ph };
            m.set((j ^ self.x) as usize, j as usize, sign);
        }
        Ok(m)
    }

    /// Applies the word to a state vector without building its matrix.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n;
        if psi.len() != dim {
            return Err(Error::SizeMismatch(psi.len(), dim));
        }
        let ph = self.phase_factor();
        let mut out = vec![ZERO; dim];
        for (j, amp) in psi.iter().enumerate() {
            let sign = if (self.z & j as u64).count_ones() % 2 == 1 { -ph } else { ph };
            out[j ^ self.x as usize] = sign * amp;
        }
        Ok(out)
    }
}

fn site_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn checked_dim(n: usize, cap: usize) -> Result<usize> {
    if n >= usize::BITS as usize - 1 || (1usize << n) > cap {
        return Err(Error::CapExceeded {
            dim: if n < 63 { 1usize << n } else { usize::MAX },
            cap,
        });
    }
    Ok(1usize << n)
}

fn i_pow(p: u32) -> Complex64 {
    match p % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// `1` iff the packed vectors anticommute.
pub fn symplectic_form(u: u128, v: u128) -> u32 {
    let (ux, uz) = (u as u64, (u >> 64) as u64);
    let (vx, vz) = (v as u64, (v >> 64) as u64);
    ((ux & vz) ^ (uz & vx)).count_ones() % 2
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = (self.phase as u32 + 4 - self.y_count() % 4) % 4;
        let token = match shown {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(token)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    /// Grammar: optional phase token from `+`, `-`, `+i`, `-i`, then one
    /// letter per site from `{I, X, Y, Z}`. Error positions are 1-based sites.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (shown, body) = if let Some(rest) = text.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = text.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = text.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = text.strip_prefix('-') {
            (2, rest)
        } else {
            (0, text)
        };
        if body.is_empty() {
            return Err(Error::Syntax {
                position: 1,
                reason: "expected at least one site letter".into(),
            });
        }
        let mut letters = Vec::with_capacity(body.len());
        for (i, ch) in body.chars().enumerate() {
            letters.push(match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                other => {
                    return Err(Error::Syntax {
                        position: i + 1,
                        reason: format!("site letter '{other}' is not one of I, X, Y, Z"),
                    })
                }
            });
        }
        let word = Self::from_letters(&letters)?;
        Ok(Self {
            phase: ((word.phase as u32 + shown) % 4) as u8,
            ..word
        })
    }
}

impl Serialize for PauliWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `e^{2πi c/d}` with `c` reduced mod `d` first, so equal exponents give
/// bit-identical values.
pub fn omega_pow(d: usize, c: i64) -> Complex64 {
    let c = c.rem_euclid(d as i64);
    let theta = 2.0 * PI * c as f64 / d as f64;
    Complex64::new(theta.cos(), theta.sin())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuditPauli {
    d: usize,
    a: usize,
    b: usize,
    phase: usize,
}

impl QuditPauli {
    pub fn new(d: usize, a: i64, b: i64) -> Result<Self> {
        Self::with_phase(d, a, b, 0)
    }

    pub fn with_phase(d: usize, a: i64, b: i64, phase: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!(
                "qudit dimension must be at least 2, got {d}"
            )));
        }
        let m = d as i64;
        Ok(Self {
            d,
            a: a.rem_euclid(m) as usize,
            b: b.rem_euclid(m) as usize,
            phase: phase.rem_euclid(m) as usize,
        })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, 0, 0)
    }

    /// Shift `X^a`.
    pub fn shift(d: usize, a: i64) -> Result<Self> {
        Self::new(d, a, 0)
    }

    /// Clock `Z^b`.
    pub fn clock(d: usize, b: i64) -> Result<Self> {
        Self::new(d, 0, b)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn x_power(&self) -> usize {
        self.a
    }

    pub fn z_power(&self) -> usize {
        self.b
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn projectively_eq(&self, other: &Self) -> bool {
        self.d == other.d && self.a == other.a && self.b == other.b
    }

    pub fn is_identity_class(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Drops the phase.
    pub fn projective(&self) -> Self {
        Self { phase: 0, ..*self }
    }

    fn check_d(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::SizeMismatch(self.d, other.d));
        }
        Ok(())
    }

    /// `(X^a Z^b)(X^a' Z^b') = ω^{b·a'} X^{a+a'} Z^{b+b'}`
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_d(other)?;
        let d = self.d;
        Ok(Self {
            d,
            a: (self.a + other.a) % d,
            b: (self.b + other.b) % d,
            phase: (self.phase + other.phase + self.b * other.a) % d,
        })
    }

    /// `(ω^c X^a Z^b)† = ω^{-c + ab} X^{-a} Z^{-b}`
    pub fn adjoint(&self) -> Self {
        let d = self.d;
        Self {
            d,
            a: (d - self.a) % d,
            b: (d - self.b) % d,
            phase: (d - self.phase + self.a * self.b % d) % d,
        }
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_with_cap(crate::dense::DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DenseOperator> {
        let d = self.d;
        if d > cap {
            return Err(Error::CapExceeded { dim: d, cap });
        }
        let mut m = DenseOperator::zeros(d);
        for j in 0..d {
            let exponent = (self.phase + self.b * j) as i64;
            m.set((j + self.a) % d, j, omega_pow(d, exponent));
        }
        Ok(m)
    }
}

impl fmt::Display for QuditPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != 0 {
            write!(f, "w{}*", self.phase)?;
        }
        write!(f, "x{}z{}@d{}", self.a, self.b, self.d)
    }
}

impl FromStr for QuditPauli {
    type Err = Error;

    /// Grammar: `x<a>z<b>@d<d>` with nonnegative decimals, optionally
    /// prefixed by `w<c>*` for a phase `ω^c`. Error positions are 1-based
    /// character offsets.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let mut cur = Cursor { text, pos: 0 };
        let mut phase = 0u64;
        if cur.peek() == Some('w') {
            cur.expect('w')?;
            phase = cur.number()?;
            cur.expect('*')?;
        }
        cur.expect('x')?;
        let a = cur.number()?;
        cur.expect('z')?;
        let b = cur.number()?;
        cur.expect('@')?;
        cur.expect('d')?;
        let d = cur.number()?;
        if cur.pos != text.len() {
            return Err(cur.error("trailing characters"));
        }
        let d = usize::try_from(d).map_err(|_| cur.error("dimension too large"))?;
        let m = d.max(1) as u64;
        Self::with_phase(d, (a % m) as i64, (b % m) as i64, (phase % m) as i64)
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn error(&self, reason: &str) -> Error {
        Error::Syntax {
            position: self.pos + 1,
            reason: reason.to_string(),
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{ch}'")))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let rest = &self.text[self.pos..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.error("expected a nonnegative integer"));
        }
        let value = rest[..len]
            .parse()
            .map_err(|_| self.error("integer out of range"))?;
        self.pos += len;
        Ok(value)
    }
}

impl Serialize for QuditPauli {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuditPauli {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Reduced ℤ₂ row basis of the given packed vectors (XOR basis, distinct pivots).
pub fn z2_basis(vectors: &[u128]) -> Vec<u128> {
    let mut basis: Vec<u128> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for &b in &basis {
            let pivot = 127 - b.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let pivot = 127 - v.leading_zeros();
            for b in basis.iter_mut() {
                if *b >> pivot & 1 == 1 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
    }
    basis.sort_unstable_by(|a, b| b.cmp(a));
    basis
}

pub fn z2_rank(vectors: &[u128]) -> usize {
    z2_basis(vectors).len()
}

/// Projective group generated by `generators`, as Hermitian words.
///
/// Elements are enumerated by binary counting over the reduced basis, so
/// the identity comes first and the order is deterministic.
pub fn generate_group(n: usize, generators: &[PauliWord]) -> Result<Vec<PauliWord>> {
    for g in generators {
        if g.n() != n {
            return Err(Error::SizeMismatch(g.n(), n));
        }
    }
    let vecs: Vec<u128> = generators.iter().map(PauliWord::symplectic).collect();
    let basis = z2_basis(&vecs);
    if basis.len() > 24 {
        return Err(Error::InvalidParameter(format!(
            "group of order 2^{} is too large to enumerate",
            basis.len()
        )));
    }
    (0..1u64 << basis.len())
        .map(|mask| {
            let v = basis
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u128, |acc, (_, b)| acc ^ b);
            PauliWord::from_symplectic(n, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    #[test]
    fn x_squared_is_identity() {
        let x = w("X");
        let p = x.multiply(&x).unwrap();
        assert!(p.is_identity_class());
        assert_eq!(p.phase(), 0);
    }

    #[test]
    fn single_anticommuting_site_flips_sign() {
        let a = w("ZI");
        let b = w("XX");
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        assert!(ab.projectively_eq(&ba));
        assert_eq!((ab.phase() + 4 - ba.phase()) % 4, 2);
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let p = w("X").multiply(&w("Z")).unwrap();
        assert_eq!(p, w("-iY"));
        assert_eq!(p.to_string(), "-iY");
        // i^3 · Y
        let y = w("Y");
        assert_eq!(p, PauliWord { phase: (y.phase() + 3) % 4, ..y });
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(w("X").adjoint(), w("X"));
        let p = PauliWord::from_parts(1, 1, 1, 1).unwrap(); // i·XZ = Y
        assert_eq!(p.adjoint(), p);
        let q = PauliWord::from_parts(1, 1, 1, 0).unwrap(); // XZ
        let prod = q.adjoint().multiply(&q).unwrap();
        assert!(prod.is_identity_class());
        assert_eq!(prod.phase(), 0);
    }

    #[test]
    fn commutation_examples() {
        assert!(!w("ZII").commutes(&w("XXX")).unwrap());
        assert!(w("ZZI").commutes(&w("XXX")).unwrap());
        assert!(w("III").commutes(&w("XYZ")).unwrap());
        assert_eq!(w("ZI").commutes(&w("Z")), Err(Error::SizeMismatch(2, 1)));
    }

    #[test]
    fn qudit_commutation_phase() {
        let d = 3;
        let x = QuditPauli::shift(d, 1).unwrap();
        let z = QuditPauli::clock(d, 1).unwrap();
        let zx = z.multiply(&x).unwrap();
        let xz = x.multiply(&z).unwrap();
        assert!(zx.projectively_eq(&xz));
        assert_eq!((zx.phase() + d - xz.phase()) % d, 1);
    }

    #[test]
    fn qudit_x_to_the_d_is_identity() {
        let x = QuditPauli::shift(5, 1).unwrap();
        let mut acc = QuditPauli::identity(5).unwrap();
        for _ in 0..5 {
            acc = acc.multiply(&x).unwrap();
        }
        assert_eq!(acc, QuditPauli::identity(5).unwrap());
    }

    #[test]
    fn qudit_product_against_dense() {
        let p = QuditPauli::new(3, 2, 1).unwrap();
        let q = QuditPauli::new(3, 1, 2).unwrap();
        let pq = p.multiply(&q).unwrap();
        assert_eq!(pq, QuditPauli::with_phase(3, 0, 0, 1).unwrap());
        // dense oracle
        let dense = p.to_dense().unwrap().matmul(&q.to_dense().unwrap());
        let omega = omega_pow(3, 1);
        let expect = DenseOperator::identity(3).scale(omega);
        assert!(dense.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn qudit_mismatch() {
        let a = QuditPauli::identity(3).unwrap();
        let b = QuditPauli::identity(4).unwrap();
        assert_eq!(a.multiply(&b), Err(Error::SizeMismatch(3, 4)));
    }

    #[test]
    fn dense_x_and_qudit_z() {
        let x = w("X").to_dense().unwrap();
        let expect = DenseOperator::from_fn(2, |r, c| if r != c { ONE } else { ZERO });
        assert_eq!(x, expect);

        let z = QuditPauli::clock(3, 1).unwrap().to_dense().unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let e = if j == k { omega_pow(3, j as i64) } else { ZERO };
                assert_eq!(z.get(j, k), e);
            }
        }
    }

    #[test]
    fn dense_y_matches_sigma_2() {
        let y = w("Y").to_dense().unwrap();
        assert_eq!(y.get(0, 1), -I);
        assert_eq!(y.get(1, 0), I);
        assert_eq!(y.get(0, 0), ZERO);
    }

    #[test]
    fn dense_cap() {
        let p = PauliWord::identity(11).unwrap();
        assert!(matches!(p.to_dense(), Err(Error::CapExceeded { .. })));
        assert!(p.to_dense_with_cap(2048).is_ok());
        let q = QuditPauli::identity(9).unwrap();
        assert!(matches!(q.to_dense_with_cap(8), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn parse_examples() {
        let p = w("ZII");
        assert_eq!(p.n(), 3);
        assert_eq!(p.letters(), vec![Letter::Z, Letter::I, Letter::I]);
        assert_eq!(p.x_mask(), 0);
        assert_eq!(p.z_mask(), 0b100);

        let q: QuditPauli = "x2z1@d4".parse().unwrap();
        assert_eq!((q.d(), q.x_power(), q.z_power(), q.phase()), (4, 2, 1, 0));

        match "XQZ".parse::<PauliWord>() {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!("".parse::<PauliWord>().is_err());
        assert!("-".parse::<PauliWord>().is_err());
        assert!("x1z@d4".parse::<QuditPauli>().is_err());
        assert!("x1z1@d1".parse::<QuditPauli>().is_err());
        assert!("x1z1@d4 junk".parse::<QuditPauli>().is_err());
    }

    #[test]
    fn formatter_canonical_forms() {
        for s in ["XYZ", "-XYZ", "+iZ", "-iYY", "I"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert_eq!(w("+XZ").to_string(), "XZ");
        for s in ["x0z0@d2", "x3z1@d5", "w2*x1z4@d7"] {
            assert_eq!(s.parse::<QuditPauli>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn group_generation_counts() {
        let g = generate_group(3, &[w("ZII"), w("IZI"), w("IIZ"), w("XXX")]).unwrap();
        assert_eq!(g.len(), 16);
        assert!(g[0].is_identity_class());
        let g = generate_group(2, &[w("ZI"), w("ZI"), w("II")]).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn apply_matches_dense() {
        let p = w("-iXYZ");
        let psi: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let a = p.apply(&psi).unwrap();
        let b = p.to_dense().unwrap().apply(&psi);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
    }
}
