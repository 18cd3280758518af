//! Decision pipeline for one-way LOCC distinguishability of
//! `{(I ⊗ U_i)|Φ⟩}`, producing certificates that can be rechecked alone.
//!
//! When the operator system `𝔖 = span{U_i†U_j}` is an algebra the states are
//! distinguishable iff it has a separating vector. Otherwise the only
//! certificate on offer is an embedded copy of `M₂`, which rules out
//! distinguishability; failing that the verdict is `Inconclusive`.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constructions::{StateSet, Unitaries};
use crate::dense::{hermitian_eigh, inner, normalize, DenseOperator, DEFAULT_DENSE_CAP, I};
use crate::error::{Error, Result};
use crate::pauli::{generate_group, z2_basis, PauliWord, QuditPauli};
use crate::span::{is_algebra, operator_system_of, OperatorSpan, Tolerances};
use crate::wedderburn::{
    decompose, pauli_subgroup_signature, random_witness, vector_rank, verify_witness, BlockSignature,
};

pub const DEFAULT_SEED: u64 = 0x10cc_2016;

/// Qubit sets on more than this many dimensions take the symbolic route.
pub const DEFAULT_DENSE_LIMIT: usize = 32;

const RECHECK_LOOSENING: f64 = 10.0;

/// Mixes `(U + U†)/2` and `(U − U†)/2i` so distinct eigenphases of a unitary
/// land on distinct real eigenvalues.
const EIGEN_MIX: f64 = 0.618_033_988_749_895;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Distinguishable,
    Indistinguishable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedM2 {
    pub phi0: Vec<Complex64>,
    pub phi1: Vec<Complex64>,
    /// Residuals of `|φ0⟩⟨φ0|, |φ0⟩⟨φ1|, |φ1⟩⟨φ0|, |φ1⟩⟨φ1|` against the span.
    pub residuals: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload")]
pub enum Certificate {
    SeparatingWitness { psi: Vec<Complex64> },
    DimensionExceeded { dim: usize, d: usize },
    /// Block `k` of the canonically ordered signature has `m < n`.
    BlockViolation { k: usize, m: usize, n: usize },
    EmbeddedM2(EmbeddedM2),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Dense,
    Exact,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Diagnostics {
    pub route: Route,
    pub operator_system_dim: Option<usize>,
    pub is_algebra: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_signature: Option<BlockSignature>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub certificate: Option<Certificate>,
    pub diagnostics: Diagnostics,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub seed: u64,
    pub dense_limit: usize,
    pub tol: Tolerances,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            dense_limit: DEFAULT_DENSE_LIMIT,
            tol: Tolerances::default(),
        }
    }
}

impl AnalyzeOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn route_for(&self, set: &StateSet) -> Route {
        match set.unitaries {
            Unitaries::Qubit(_) if set.d > self.dense_limit => Route::Exact,
            _ => Route::Dense,
        }
    }
}

pub fn analyze(set: &StateSet, seed: u64) -> Verdict {
    analyze_with(set, &AnalyzeOptions::with_seed(seed))
}

pub fn analyze_with(set: &StateSet, opts: &AnalyzeOptions) -> Verdict {
    let route = opts.route_for(set);
    let mut diag = Diagnostics {
        route,
        operator_system_dim: None,
        is_algebra: None,
        block_signature: None,
        note: None,
    };
    let result = match route {
        Route::Dense => analyze_dense(set, opts, &mut diag),
        Route::Exact => analyze_exact(set.qubit_words().unwrap_or_default(), opts, &mut diag),
    };
    match result {
        Ok((outcome, certificate)) => Verdict {
            outcome,
            certificate,
            diagnostics: diag,
        },
        Err(e) => {
            diag.note = Some(format!("analysis failed: {e}"));
            Verdict {
                outcome: Outcome::Inconclusive,
                certificate: None,
                diagnostics: diag,
            }
        }
    }
}

type Decision = (Outcome, Option<Certificate>);

fn undecided(diag: &mut Diagnostics, note: impl Into<String>) -> Result<Decision> {
    diag.note = Some(note.into());
    Ok((Outcome::Inconclusive, None))
}

fn violation(sig: &BlockSignature) -> Option<Certificate> {
    sig.violating_block().map(|k| Certificate::BlockViolation {
        k,
        m: sig.blocks[k].m,
        n: sig.blocks[k].n,
    })
}

/// `{u_0 ⊕ u_j}` as Hermitian words; they generate the same group as all
/// pairwise products.
pub fn difference_generators(words: &[PauliWord]) -> Result<Vec<PauliWord>> {
    let first = words.first().ok_or(Error::EmptyInput)?;
    let n = first.n();
    words
        .iter()
        .map(|w| PauliWord::from_symplectic(n, first.symplectic() ^ w.symplectic()))
        .collect()
}

fn analyze_dense(set: &StateSet, opts: &AnalyzeOptions, diag: &mut Diagnostics) -> Result<Decision> {
    let d = set.d;
    let us = set.dense_unitaries(DEFAULT_DENSE_CAP)?;
    let os = operator_system_of(&us, opts.tol)?;
    let dim = os.dimension();
    diag.operator_system_dim = Some(dim);
    let closed = is_algebra(&os);
    diag.is_algebra = Some(closed);

    if !closed {
        let candidates = m2_candidates(set)?;
        return match find_m2_witness(&os, &candidates) {
            Some(w) => Ok((Outcome::Indistinguishable, Some(Certificate::EmbeddedM2(w)))),
            None => undecided(
                diag,
                "operator system is not an algebra and no embedded M2 was found among the candidate eigenvectors",
            ),
        };
    }

    let exact = match set.qubit_words() {
        Some(words) => Some(pauli_subgroup_signature(&difference_generators(words)?)?),
        None => None,
    };
    if dim > d {
        diag.block_signature = exact;
        return Ok((Outcome::Indistinguishable, Some(Certificate::DimensionExceeded { dim, d })));
    }
    if let Some(sig) = &exact {
        if sig.algebra_dim() != dim {
            return undecided(
                diag,
                format!("numerical dimension {dim} disagrees with the group order {}", sig.algebra_dim()),
            );
        }
        if let Some(cert) = violation(sig) {
            diag.block_signature = exact;
            return Ok((Outcome::Indistinguishable, Some(cert)));
        }
    }
    let found = random_witness(&os, opts.seed)?;
    diag.block_signature = exact.or(found.signature);
    match (found.exists, found.witness) {
        (true, Some(psi)) if verify_witness(&os, &psi)? => {
            Ok((Outcome::Distinguishable, Some(Certificate::SeparatingWitness { psi })))
        }
        (false, _) => match diag.block_signature.as_ref().and_then(violation) {
            Some(cert) if set.qubit_words().is_none() => Ok((Outcome::Indistinguishable, Some(cert))),
            _ => undecided(diag, "numerical decomposition contradicts the exact signature"),
        },
        _ => undecided(diag, "witness failed verification"),
    }
}

/// Distinct symplectic classes of `U_i†U_j`, identity included.
pub fn operator_system_classes(words: &[PauliWord]) -> Vec<u128> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in words {
        for b in words {
            let v = a.symplectic() ^ b.symplectic();
            if seen.insert(v) {
                out.push(v);
            }
        }
    }
    out
}

/// `Some(group)` when the classes already form a group, i.e. `𝔖` is an algebra.
fn exact_closure(words: &[PauliWord]) -> (usize, Option<Vec<u128>>) {
    let classes = operator_system_classes(words);
    let rank = z2_basis(&classes).len();
    let closed = rank < usize::BITS as usize && classes.len() == 1usize << rank;
    (classes.len(), closed.then_some(classes))
}

fn analyze_exact(words: &[PauliWord], opts: &AnalyzeOptions, diag: &mut Diagnostics) -> Result<Decision> {
    let n = words.first().ok_or(Error::EmptyInput)?.n();
    let (dim, group) = exact_closure(words);
    diag.operator_system_dim = Some(dim);
    diag.is_algebra = Some(group.is_some());
    if group.is_none() {
        return undecided(
            diag,
            "operator system is not an algebra; the embedded M2 search needs the dense route",
        );
    }
    let sig = pauli_subgroup_signature(&difference_generators(words)?)?;
    let d = sig.ambient_dim;
    diag.block_signature = Some(sig.clone());
    if dim > d {
        return Ok((Outcome::Indistinguishable, Some(Certificate::DimensionExceeded { dim, d })));
    }
    if let Some(cert) = violation(&sig) {
        return Ok((Outcome::Indistinguishable, Some(cert)));
    }
    if d > DEFAULT_DENSE_CAP {
        return undecided(diag, format!("a separating vector exists but C^{d} is too large to write one down"));
    }
    let elements = generate_group(n, &difference_generators(words)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..3 {
        let psi = gaussian_unit(&mut rng, d);
        if pauli_witness_holds(&elements, &psi, opts.tol)? {
            return Ok((Outcome::Distinguishable, Some(Certificate::SeparatingWitness { psi })));
        }
    }
    undecided(diag, "random draws failed to produce a separating vector")
}

fn gaussian_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&v)
}

/// `{gψ : g ∈ G}` has full rank `|G|`.
fn pauli_witness_holds(group: &[PauliWord], psi: &[Complex64], tol: Tolerances) -> Result<bool> {
    let d = psi.len();
    if group.len() > d {
        return Ok(false);
    }
    let images = group.iter().map(|g| g.apply(psi)).collect::<Result<Vec<_>>>()?;
    Ok(vector_rank(&images, tol.rank_cutoff(d)) == group.len())
}

/// Eigenvectors of the set's own unitaries: the shift parts of qudit
/// operators, or every non-identity qubit word.
fn m2_candidates(set: &StateSet) -> Result<Vec<DenseOperator>> {
    match &set.unitaries {
        Unitaries::Qubit(words) => words
            .iter()
            .filter(|w| !w.is_identity_class())
            .map(|w| w.to_dense_with_cap(DEFAULT_DENSE_CAP))
            .collect(),
        Unitaries::Qudit(ops) => {
            let mut powers: Vec<usize> = ops.iter().map(QuditPauli::x_power).filter(|&a| a != 0).collect();
            powers.sort_unstable();
            powers.dedup();
            powers
                .into_iter()
                .map(|a| QuditPauli::shift(set.d, a as i64)?.to_dense_with_cap(DEFAULT_DENSE_CAP))
                .collect()
        }
    }
}

/// Eigenvectors of a unitary ordered by eigenphase in `[0, 2π)`.
pub fn unitary_eigenvectors(u: &DenseOperator) -> Result<Vec<Vec<Complex64>>> {
    let herm = &(u + &u.adjoint()).scale(Complex64::new(0.5, 0.0))
        + &(u - &u.adjoint()).scale(-I * (0.5 * EIGEN_MIX));
    let (_, vecs) = hermitian_eigh(&herm)?;
    let tau = std::f64::consts::TAU;
    let mut keyed: Vec<(f64, Vec<Complex64>)> = vecs
        .into_iter()
        .map(|v| {
            let mut phase = inner(&v, &u.apply(&v)).arg().rem_euclid(tau);
            if tau - phase < 1e-9 {
                phase = 0.0;
            }
            (phase, v)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, v)| v).collect())
}

fn rank_one_residuals(span: &OperatorSpan, phi0: &[Complex64], phi1: &[Complex64]) -> Result<[f64; 4]> {
    let pairs = [(phi0, phi0), (phi0, phi1), (phi1, phi0), (phi1, phi1)];
    let mut out = [0.0; 4];
    for (r, (a, b)) in out.iter_mut().zip(pairs) {
        *r = span.residual(&DenseOperator::outer(a, b))?;
    }
    Ok(out)
}

/// Searches ordered eigenvector pairs `(φ0, φ1)` of each candidate for one
/// whose four matrix units all lie in `span`.
pub fn find_m2_witness(span: &OperatorSpan, candidates: &[DenseOperator]) -> Option<EmbeddedM2> {
    if span.dimension() < 4 {
        return None;
    }
    let tol = span.tolerances().membership;
    for u in candidates.iter().filter(|u| u.dim() == span.dim()) {
        let Ok(vecs) = unitary_eigenvectors(u) else { continue };
        // a matrix unit pair needs both diagonal projectors first
        let diagonal: Vec<usize> = (0..vecs.len())
            .filter(|&a| {
                span.residual(&DenseOperator::outer(&vecs[a], &vecs[a]))
                    .is_ok_and(|r| r <= tol)
            })
            .collect();
        for &a in &diagonal {
            for &b in &diagonal {
                if a == b {
                    continue;
                }
                let Ok(residuals) = rank_one_residuals(span, &vecs[a], &vecs[b]) else { continue };
                if residuals.iter().all(|&r| r <= tol) {
                    return Some(EmbeddedM2 {
                        phi0: vecs[a].clone(),
                        phi1: vecs[b].clone(),
                        residuals,
                    });
                }
            }
        }
    }
    None
}

/// Validates `cert` against `set` from scratch with thresholds loosened
/// tenfold. Any mismatch or internal error yields `false`.
pub fn recheck(cert: &Certificate, set: &StateSet) -> bool {
    recheck_with(cert, set, &AnalyzeOptions::default())
}

pub fn recheck_with(cert: &Certificate, set: &StateSet, opts: &AnalyzeOptions) -> bool {
    let loose = AnalyzeOptions {
        tol: opts.tol.loosened(RECHECK_LOOSENING),
        ..*opts
    };
    let result = match loose.route_for(set) {
        Route::Dense => recheck_dense(cert, set, &loose),
        Route::Exact => recheck_exact(cert, set.qubit_words().unwrap_or_default(), &loose),
    };
    result.unwrap_or(false)
}

fn recheck_dense(cert: &Certificate, set: &StateSet, opts: &AnalyzeOptions) -> Result<bool> {
    let d = set.d;
    let us = set.dense_unitaries(DEFAULT_DENSE_CAP)?;
    let os = operator_system_of(&us, opts.tol)?;
    match cert {
        Certificate::SeparatingWitness { psi } => {
            Ok(psi.len() == d && is_algebra(&os) && verify_witness(&os, psi)?)
        }
        Certificate::DimensionExceeded { dim, d: cd } => {
            Ok(*cd == d && *dim == os.dimension() && *dim > d && is_algebra(&os))
        }
        Certificate::BlockViolation { k, m, n } => {
            if !is_algebra(&os) || m >= n {
                return Ok(false);
            }
            let sig = decompose(&os, opts.seed)?;
            Ok(sig.blocks.get(*k).is_some_and(|b| b.m == *m && b.n == *n))
        }
        Certificate::EmbeddedM2(w) => {
            if w.phi0.len() != d || w.phi1.len() != d {
                return Ok(false);
            }
            let tol = opts.tol.membership;
            let orthonormal = (inner(&w.phi0, &w.phi0).re - 1.0).abs() <= tol
                && (inner(&w.phi1, &w.phi1).re - 1.0).abs() <= tol
                && inner(&w.phi0, &w.phi1).norm() <= tol;
            Ok(orthonormal && rank_one_residuals(&os, &w.phi0, &w.phi1)?.iter().all(|&r| r <= tol))
        }
    }
}

fn recheck_exact(cert: &Certificate, words: &[PauliWord], opts: &AnalyzeOptions) -> Result<bool> {
    let n = words.first().ok_or(Error::EmptyInput)?.n();
    let (dim, group) = exact_closure(words);
    if group.is_none() {
        return Ok(false);
    }
    let sig = pauli_subgroup_signature(&difference_generators(words)?)?;
    let d = sig.ambient_dim;
    match cert {
        Certificate::DimensionExceeded { dim: cd, d: cdd } => Ok(*cd == dim && *cdd == d && dim > d),
        Certificate::BlockViolation { k, m, n } => {
            Ok(m < n && sig.blocks.get(*k).is_some_and(|b| b.m == *m && b.n == *n))
        }
        Certificate::SeparatingWitness { psi } => {
            if psi.len() != d || d > DEFAULT_DENSE_CAP {
                return Ok(false);
            }
            let elements = generate_group(n, &difference_generators(words)?)?;
            pauli_witness_holds(&elements, &normalize(psi), opts.tol)
        }
        Certificate::EmbeddedM2(_) => Ok(false),
    }
}
