//! State families `{(I ⊗ U_i)|Φ⟩}` given by their defining Pauli unitaries.
//!
//! Every constructor attaches the sizes and dimensions it predicts so the
//! numerical pipeline can be checked against them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::pauli::{generate_group, z2_rank, Letter, PauliWord, QuditPauli};

/// Largest qubit count the family constructors will enumerate.
pub const MAX_FAMILY_QUBITS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum Unitaries {
    Qubit(Vec<PauliWord>),
    Qudit(Vec<QuditPauli>),
}

impl Unitaries {
    pub fn len(&self) -> usize {
        match self {
            Unitaries::Qubit(v) => v.len(),
            Unitaries::Qudit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Unitaries::Qubit(v) => v.iter().map(ToString::to_string).collect(),
            Unitaries::Qudit(v) => v.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn dense(&self, cap: usize) -> Result<Vec<DenseOperator>> {
        match self {
            Unitaries::Qubit(v) => v.iter().map(|w| w.to_dense_with_cap(cap)).collect(),
            Unitaries::Qudit(v) => v.iter().map(|w| w.to_dense_with_cap(cap)).collect(),
        }
    }

    /// Parses a homogeneous list of qubit words or qudit operators.
    pub fn parse_list<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let first = items.first().ok_or(Error::EmptyInput)?;
        if first.as_ref().contains('@') {
            items
                .iter()
                .map(|s| s.as_ref().parse::<QuditPauli>())
                .collect::<Result<_>>()
                .map(Unitaries::Qudit)
        } else {
            items
                .iter()
                .map(|s| s.as_ref().parse::<PauliWord>())
                .collect::<Result<_>>()
                .map(Unitaries::Qubit)
        }
    }

    fn local_dim(&self) -> Result<usize> {
        match self {
            Unitaries::Qubit(v) => {
                let n = v.first().ok_or(Error::EmptyInput)?.n();
                if let Some(bad) = v.iter().find(|w| w.n() != n) {
                    return Err(Error::SizeMismatch(n, bad.n()));
                }
                if n >= usize::BITS as usize {
                    return Err(Error::TooManyQubits(n));
                }
                Ok(1usize << n)
            }
            Unitaries::Qudit(v) => {
                let d = v.first().ok_or(Error::EmptyInput)?.d();
                if let Some(bad) = v.iter().find(|w| w.d() != d) {
                    return Err(Error::SizeMismatch(d, bad.d()));
                }
                Ok(d)
            }
        }
    }

    fn first_duplicate(&self) -> Option<(usize, usize)> {
        fn find<T>(v: &[T], eq: impl Fn(&T, &T) -> bool) -> Option<(usize, usize)> {
            (0..v.len()).find_map(|j| (0..j).find(|&i| eq(&v[i], &v[j])).map(|i| (i, j)))
        }
        match self {
            Unitaries::Qubit(v) => find(v, PauliWord::projectively_eq),
            Unitaries::Qudit(v) => find(v, QuditPauli::projectively_eq),
        }
    }
}

impl Serialize for Unitaries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Unitaries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        Unitaries::parse_list(&items).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicted {
    pub set_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator_system_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_algebra: Option<bool>,
}

/// The family `{(I ⊗ U_i)|Φ⟩}` on `C^d ⊗ C^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateSet {
    pub construction: String,
    pub params: BTreeMap<String, usize>,
    pub d: usize,
    pub unitaries: Unitaries,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<Predicted>,
}

#[derive(Deserialize)]
struct RawStateSet {
    construction: String,
    #[serde(default)]
    params: BTreeMap<String, usize>,
    d: usize,
    unitaries: Unitaries,
    #[serde(default)]
    predicted: Option<Predicted>,
}

impl<'de> Deserialize<'de> for StateSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawStateSet::deserialize(d)?;
        let set = StateSet::new(raw.construction, raw.params, raw.unitaries, raw.predicted)
            .map_err(D::Error::custom)?;
        if set.d != raw.d {
            return Err(D::Error::custom(format!(
                "declared d = {} but unitaries act on C^{}",
                raw.d, set.d
            )));
        }
        Ok(set)
    }
}

impl StateSet {
    /// Validates homogeneity, projective distinctness and the predicted size.
    pub fn new(
        construction: impl Into<String>,
        params: BTreeMap<String, usize>,
        unitaries: Unitaries,
        predicted: Option<Predicted>,
    ) -> Result<Self> {
        let d = unitaries.local_dim()?;
        if let Some((i, j)) = unitaries.first_duplicate() {
            let labels = unitaries.labels();
            return Err(Error::InvalidParameter(format!(
                "unitaries {i} ({}) and {j} ({}) are projectively equal",
                labels[i], labels[j]
            )));
        }
        if let Some(p) = &predicted {
            if p.set_size != unitaries.len() {
                return Err(Error::InvalidParameter(format!(
                    "predicted size {} but {} unitaries",
                    p.set_size,
                    unitaries.len()
                )));
            }
        }
        Ok(Self {
            construction: construction.into(),
            params,
            d,
            unitaries,
            predicted,
        })
    }

    /// A user-supplied set with no predictions.
    pub fn custom(unitaries: Unitaries) -> Result<Self> {
        Self::new("custom", BTreeMap::new(), unitaries, None)
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.unitaries.labels()
    }

    pub fn qubit_words(&self) -> Option<&[PauliWord]> {
        match &self.unitaries {
            Unitaries::Qubit(v) => Some(v),
            Unitaries::Qudit(_) => None,
        }
    }

    pub fn qudit_ops(&self) -> Option<&[QuditPauli]> {
        match &self.unitaries {
            Unitaries::Qudit(v) => Some(v),
            Unitaries::Qubit(_) => None,
        }
    }

    pub fn dense_unitaries(&self, cap: usize) -> Result<Vec<DenseOperator>> {
        self.unitaries.dense(cap)
    }

    /// `construction[params]`, e.g. `theorem2[k=2,n=3]`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            return self.construction.clone();
        }
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}[{}]", self.construction, params.join(","))
    }

    /// The same family without member `index`; predictions are dropped.
    pub fn without(&self, index: usize) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "index {index} out of range for {} states",
                self.len()
            )));
        }
        let unitaries = match &self.unitaries {
            Unitaries::Qubit(v) => {
                let mut v = v.clone();
                v.remove(index);
                Unitaries::Qubit(v)
            }
            Unitaries::Qudit(v) => {
                let mut v = v.clone();
                v.remove(index);
                Unitaries::Qudit(v)
            }
        };
        let mut params = self.params.clone();
        params.insert("dropped".into(), index);
        Self::new(self.construction.clone(), params, unitaries, None)
    }

    /// Index of the member projectively equal to `label`, if any.
    pub fn position_of(&self, label: &str) -> Option<usize> {
        match &self.unitaries {
            Unitaries::Qubit(v) => {
                let w: PauliWord = label.parse().ok()?;
                v.iter().position(|u| u.projectively_eq(&w))
            }
            Unitaries::Qudit(v) => {
                let w: QuditPauli = label.parse().ok()?;
                v.iter().position(|u| u.projectively_eq(&w))
            }
        }
    }
}

fn dedup_qubit(words: impl IntoIterator<Item = PauliWord>) -> Vec<PauliWord> {
    let mut out: Vec<PauliWord> = Vec::new();
    for w in words {
        if !out.iter().any(|u| u.projectively_eq(&w)) {
            out.push(w.hermitian());
        }
    }
    out
}

fn dedup_qudit(ops: impl IntoIterator<Item = QuditPauli>) -> Vec<QuditPauli> {
    let mut out: Vec<QuditPauli> = Vec::new();
    for w in ops {
        if !out.iter().any(|u| u.projectively_eq(&w)) {
            out.push(w.projective());
        }
    }
    out
}

fn words(list: &[&str]) -> Vec<PauliWord> {
    list.iter().map(|s| s.parse().expect("static word")).collect()
}

/// The six three-qubit words `I, ZII, IZI, IIZ, XXX, YYY`.
pub fn example2_set() -> StateSet {
    let us = words(&["III", "ZII", "IZI", "IIZ", "XXX", "YYY"]);
    StateSet::new(
        "example2",
        BTreeMap::new(),
        Unitaries::Qubit(us),
        Some(Predicted {
            set_size: 6,
            operator_system_dim: Some(16),
            algebra_dim: Some(16),
            is_algebra: Some(true),
        }),
    )
    .expect("example2 is a valid state set")
}

/// `⌊n/2 + 1⌋`, which minimizes `2^k + 2^{n-k+1}`.
pub fn theorem2_default_k(n: usize) -> usize {
    n / 2 + 1
}

/// Every word whose site `s` ranges over `choices[s]`, first site most significant.
fn product_words(choices: &[&[Letter]]) -> Vec<PauliWord> {
    let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
    for site in choices {
        out = out
            .into_iter()
            .flat_map(|s| {
                site.iter().map(move |c| {
                    let mut t = s.clone();
                    t.push(*c);
                    t
                })
            })
            .collect();
    }
    out.iter()
        .map(|l| PauliWord::from_letters(l).expect("n within range"))
        .collect()
}

/// `({I,Z}^k ⊗ I^{n-k}) ∪ (I^k ⊗ {I,Z}^{n-k}) ∪ (X^k ⊗ {X,Y}^{n-k})`.
pub fn theorem2_family(n: usize, k: Option<usize>) -> Result<StateSet> {
    if !(2..=MAX_FAMILY_QUBITS).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "n must be in 2..={MAX_FAMILY_QUBITS}, got {n}"
        )));
    }
    let k = k.unwrap_or_else(|| theorem2_default_k(n));
    if !(1..=n).contains(&k) {
        return Err(Error::InvalidParameter(format!("k must be in 1..={n}, got {k}")));
    }
    use Letter::{I, X, Y, Z};
    let (iz, i, x, xy): (&[Letter], &[Letter], &[Letter], &[Letter]) = (&[I, Z], &[I], &[X], &[X, Y]);
    let mut part1 = vec![iz; k];
    part1.extend(vec![i; n - k]);
    let mut part2 = vec![i; k];
    part2.extend(vec![iz; n - k]);
    let mut part3 = vec![x; k];
    part3.extend(vec![xy; n - k]);
    let all = [part1, part2, part3].iter().flat_map(|p| product_words(p)).collect::<Vec<_>>();
    let us = dedup_qubit(all);
    let m = (1usize << k) + (1usize << (n - k + 1)) - 1;
    let params = BTreeMap::from([("n".to_string(), n), ("k".to_string(), k)]);
    StateSet::new(
        "theorem2",
        params,
        Unitaries::Qubit(us),
        Some(Predicted {
            set_size: m,
            operator_system_dim: Some(1 << (n + 1)),
            algebra_dim: Some(1 << (n + 1)),
            is_algebra: Some(true),
        }),
    )
}

/// `G₁ ∪ G₂` for the projective groups generated by a split generator list.
///
/// The union of generators must have symplectic rank `n + 1` and the two
/// groups may share only the identity.
pub fn theorem2_from_split(s1: &[PauliWord], s2: &[PauliWord]) -> Result<StateSet> {
    let n = s1.iter().chain(s2).next().ok_or(Error::EmptyInput)?.n();
    if let Some(bad) = s1.iter().chain(s2).find(|w| w.n() != n) {
        return Err(Error::SizeMismatch(n, bad.n()));
    }
    let sym = |ws: &[PauliWord]| ws.iter().map(PauliWord::symplectic).collect::<Vec<_>>();
    let (r1, r2) = (z2_rank(&sym(s1)), z2_rank(&sym(s2)));
    let mut both = sym(s1);
    both.extend(sym(s2));
    let r = z2_rank(&both);
    if r != n + 1 {
        return Err(Error::RankDeficient {
            found: r,
            needed: n + 1,
        });
    }
    if r1 + r2 != r {
        return Err(Error::SubgroupOverlap);
    }
    let g1 = generate_group(n, s1)?;
    let g2 = generate_group(n, s2)?;
    let m = g1.len() + g2.len() - 1;
    let us = dedup_qubit(g1.into_iter().chain(g2));
    let params = BTreeMap::from([("n".to_string(), n), ("rank1".to_string(), r1), ("rank2".to_string(), r2)]);
    StateSet::new(
        "theorem2-split",
        params,
        Unitaries::Qubit(us),
        Some(Predicted {
            set_size: m,
            operator_system_dim: Some(1 << (n + 1)),
            algebra_dim: Some(1 << (n + 1)),
            is_algebra: Some(true),
        }),
    )
}

/// The generator split behind `theorem2_family(n, k)`: `Z` on the first `k`
/// sites, then `Z` on the remaining sites together with `X^{⊗n}`.
pub fn theorem2_split(n: usize, k: usize) -> Result<(Vec<PauliWord>, Vec<PauliWord>)> {
    if !(1..=n).contains(&k) || n > MAX_FAMILY_QUBITS {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k ≤ n, got n={n}, k={k}")));
    }
    let z_at = |site: usize| {
        let mut letters = vec![Letter::I; n];
        letters[site] = Letter::Z;
        PauliWord::from_letters(&letters)
    };
    let s1 = (0..k).map(z_at).collect::<Result<Vec<_>>>()?;
    let mut s2 = (k..n).map(z_at).collect::<Result<Vec<_>>>()?;
    s2.push(PauliWord::from_letters(&vec![Letter::X; n])?);
    Ok((s1, s2))
}

/// `⌈√(d/2)⌉`, i.e. the least `l` with `2l² ≥ d`.
pub fn theorem4_default_l(d: usize) -> usize {
    (1..).find(|l| 2 * l * l >= d).unwrap()
}

/// `S₁` or `S₂ = {X^{jk} : j < l}` repeats a power of `X`.
fn wraps(d: usize, k: usize, l: usize) -> bool {
    k > d || (l - 1) * k >= d
}

/// Default `(k, l)`: `l = ⌈√(d/2)⌉, k = 2l` unless its powers of `X` wrap
/// past `d`, in which case the no-wrap pair with the same `k + 2l` and the
/// largest `l` is used. If none exists the wrapping pair is kept.
pub fn theorem4_default_params(d: usize) -> (usize, usize) {
    let l0 = theorem4_default_l(d);
    if !wraps(d, 2 * l0, l0) {
        return (2 * l0, l0);
    }
    (1..l0)
        .rev()
        .map(|l| (4 * l0 - 2 * l, l))
        .find(|&(k, l)| k * l >= d && !wraps(d, k, l))
        .unwrap_or((2 * l0, l0))
}

/// Resolves `(k, l)`. A single given value is paired with the least
/// partner satisfying `kl ≥ d`.
pub fn theorem4_params(d: usize, k: Option<usize>, l: Option<usize>) -> Result<(usize, usize)> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be at least 2, got {d}")));
    }
    let (k, l) = match (k, l) {
        (None, None) => theorem4_default_params(d),
        (Some(k), None) if k > 0 => (k, d.div_ceil(k)),
        (None, Some(l)) if l > 0 => (d.div_ceil(l), l),
        (Some(k), Some(l)) => (k, l),
        _ => return Err(Error::InvalidParameter("k and l must be positive".into())),
    };
    if k == 0 || l == 0 {
        return Err(Error::InvalidParameter("k and l must be positive".into()));
    }
    if k * l < d {
        return Err(Error::InvalidParameter(format!("need kl ≥ d, got k={k}, l={l}, d={d}")));
    }
    Ok((k, l))
}

fn shift_family(d: usize, k: usize, l: usize, clock_power: usize) -> Result<Vec<QuditPauli>> {
    let s1 = (0..k).map(|a| QuditPauli::shift(d, a as i64));
    let s2: Vec<QuditPauli> = (0..l)
        .map(|j| QuditPauli::shift(d, (j * k) as i64))
        .collect::<Result<_>>()?;
    let clock = QuditPauli::clock(d, clock_power as i64)?;
    let s3 = s2.iter().map(|u| u.multiply(&clock)).collect::<Result<Vec<_>>>()?;
    let all: Vec<QuditPauli> = s1.collect::<Result<Vec<_>>>()?.into_iter().chain(s2).chain(s3).collect();
    Ok(dedup_qudit(all))
}

/// `S₁ ∪ S₂ ∪ S₂Z` with `S₁ = {X^a : a < k}` and `S₂ = {X^{jk} : j < l}`.
///
/// Exponents are taken mod `d`, so when `(l-1)k ≥ d` some members coincide
/// and the set is smaller than the nominal `k + 2l - 1`.
pub fn theorem4_family(d: usize, k: Option<usize>, l: Option<usize>) -> Result<StateSet> {
    let (k, l) = theorem4_params(d, k, l)?;
    let us = shift_family(d, k, l, 1)?;
    let params = BTreeMap::from([
        ("d".to_string(), d),
        ("k".to_string(), k),
        ("l".to_string(), l),
        ("nominal_size".to_string(), k + 2 * l - 1),
    ]);
    let os_dim = (3 * d).min(d * d);
    StateSet::new(
        "theorem4",
        params,
        Unitaries::Qudit(us.clone()),
        Some(Predicted {
            set_size: us.len(),
            operator_system_dim: Some(os_dim),
            algebra_dim: (os_dim == d * d).then_some(d * d),
            is_algebra: Some(os_dim == d * d),
        }),
    )
}

/// `S₁ ∪ S₂ ∪ S₂Z^{d/2}` for even `d`.
pub fn halfshift_variant(d: usize, k: Option<usize>, l: Option<usize>) -> Result<StateSet> {
    if d % 2 != 0 {
        return Err(Error::InvalidParameter(format!("d must be even, got {d}")));
    }
    let (k, l) = theorem4_params(d, k, l)?;
    let us = shift_family(d, k, l, d / 2)?;
    let params = BTreeMap::from([("d".to_string(), d), ("k".to_string(), k), ("l".to_string(), l)]);
    StateSet::new(
        "halfshift",
        params,
        Unitaries::Qudit(us.clone()),
        Some(Predicted {
            set_size: us.len(),
            operator_system_dim: Some(2 * d),
            algebra_dim: Some(2 * d),
            is_algebra: Some(true),
        }),
    )
}

/// Per-site Bell indices `i ∈ {0,1,2,3}` naming `|Φ_{i_1}⟩ ⊗ … ⊗ |Φ_{i_n}⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLabel {
    pub indices: Vec<u8>,
}

impl LatticeLabel {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = indices.iter().find(|&&i| i > 3) {
            return Err(Error::InvalidParameter(format!("Bell index {bad} is not in 0..=3")));
        }
        Ok(Self { indices })
    }

    /// `σ_{i_1} ⊗ … ⊗ σ_{i_n}`
    pub fn to_word(&self) -> Result<PauliWord> {
        let letters: Vec<Letter> = self
            .indices
            .iter()
            .map(|&i| Letter::from_index(i).expect("validated"))
            .collect();
        PauliWord::from_letters(&letters)
    }
}

/// `(I ⊗ U)|Φ⟩` for the word of `label`, with all of Alice's qubits first.
/// Equals the tensor product of the named Bell states up to a qubit
/// permutation and a global phase (a factor `i` per `σ_2`).
pub fn lattice_state_vector(label: &LatticeLabel, cap: usize) -> Result<Vec<Complex64>> {
    let word = label.to_word()?;
    let u = word.to_dense_with_cap(cap)?;
    Ok(crate::protocol::state_vector(&u))
}
