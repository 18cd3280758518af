//! Block structure `⊕_k (I_{m_k} ⊗ M_{n_k})` of finite-dimensional
//! *-algebras and separating vectors.
//!
//! A separating vector exists iff `m_k ≥ n_k` for every block. The numerical
//! path finds the minimal central projections by diagonalizing a random
//! Hermitian element of the center; the exact path reads the signature of a
//! qubit Pauli-subgroup algebra off the symplectic form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dense::{hermitian_eigh, norm, normalize, DenseOperator, I, ZERO};
use crate::error::{Error, Result};
use crate::pauli::{symplectic_form, z2_basis, z2_rank, PauliWord};
use crate::span::{is_algebra, orthonormal_span, OperatorSpan, Tolerances};

const CENTER_ATTEMPTS: usize = 5;
const WITNESS_ATTEMPTS: usize = 3;
const EIGENVALUE_GAP_REL: f64 = 1e-6;
const INTEGER_TOL: f64 = 1e-6;

/// One summand `I_m ⊗ M_n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub m: usize,
    pub n: usize,
}

impl Block {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    pub fn admits_separating_vector(&self) -> bool {
        self.m >= self.n
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSignature {
    pub ambient_dim: usize,
    pub blocks: Vec<Block>,
    /// Minimal central projections, aligned with `blocks`. Empty on the exact path.
    #[serde(skip)]
    pub projections: Vec<DenseOperator>,
}

impl BlockSignature {
    fn new(ambient_dim: usize, blocks: Vec<Block>, projections: Vec<DenseOperator>) -> Self {
        let mut paired: Vec<(Block, Option<DenseOperator>)> = if projections.is_empty() {
            blocks.into_iter().map(|b| (b, None)).collect()
        } else {
            blocks.into_iter().zip(projections.into_iter().map(Some)).collect()
        };
        // canonical order: (n, m) descending
        paired.sort_by(|(a, _), (b, _)| (b.n, b.m).cmp(&(a.n, a.m)));
        let blocks = paired.iter().map(|(b, _)| *b).collect();
        let projections = paired.into_iter().filter_map(|(_, p)| p).collect();
        Self {
            ambient_dim,
            blocks,
            projections,
        }
    }

    /// `Σ n_k²`
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.n * b.n).sum()
    }

    /// `Σ m_k n_k`, which equals the ambient dimension for a unital algebra.
    pub fn represented_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.m * b.n).sum()
    }

    /// Blocks as a sorted multiset, for comparing signatures from different paths.
    pub fn multiset(&self) -> Vec<Block> {
        let mut v = self.blocks.clone();
        v.sort();
        v
    }

    pub fn violating_block(&self) -> Option<usize> {
        self.blocks.iter().position(|b| !b.admits_separating_vector())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparatingVerdict {
    pub exists: bool,
    pub witness: Option<Vec<Complex64>>,
    pub violating_block: Option<usize>,
    /// Present when the verdict came from the block criterion.
    pub signature: Option<BlockSignature>,
}

/// `m_k ≥ n_k` for every block.
pub fn has_separating_vector(sig: &BlockSignature) -> bool {
    sig.blocks.iter().all(Block::admits_separating_vector)
}

/// `dim(A) ≤ d`. `false` already rules out a separating vector.
pub fn dimension_necessary_check(algebra_dim: usize, d: usize) -> bool {
    algebra_dim <= d
}

fn random_unit_vector(rng: &mut impl Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&v)
}

/// Orthonormal coefficient vectors (w.r.t. the span basis) of the center.
fn center_coefficients(algebra: &OperatorSpan) -> Result<Vec<Vec<Complex64>>> {
    let basis = algebra.basis();
    let dim_a = basis.len();
    // Gram matrix of the linear map c ↦ ([Σ c_j B_j, B_i])_i
    let mut gram = DenseOperator::zeros(dim_a);
    for bi in basis {
        let comms: Vec<DenseOperator> = basis.iter().map(|bj| bj.commutator(bi)).collect();
        for j in 0..dim_a {
            for l in j..dim_a {
                let g = comms[j].hs_inner(&comms[l]);
                gram.set(j, l, gram.get(j, l) + g);
                if l != j {
                    gram.set(l, j, gram.get(l, j) + g.conj());
                }
            }
        }
    }
    let (values, vectors) = hermitian_eigh(&gram)?;
    let top = values.last().copied().unwrap_or(0.0).max(1.0);
    Ok(values
        .iter()
        .zip(vectors)
        .filter(|(l, _)| **l <= 1e-9 * top)
        .map(|(_, v)| v)
        .collect())
}

fn combine(basis: &[DenseOperator], coeffs: &[Complex64]) -> DenseOperator {
    let d = basis[0].dim();
    let mut acc = DenseOperator::zeros(d);
    for (b, c) in basis.iter().zip(coeffs) {
        if *c != ZERO {
            acc = &acc + &b.scale(*c);
        }
    }
    acc
}

/// Groups ascending eigenvalues into clusters separated by more than
/// `EIGENVALUE_GAP_REL` times the spectral diameter.
fn cluster_eigenvalues(values: &[f64]) -> Vec<std::ops::Range<usize>> {
    let diameter = values.last().unwrap() - values.first().unwrap();
    let gap = EIGENVALUE_GAP_REL * diameter;
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if diameter > 1e-12 && values[i] - values[i - 1] > gap {
            clusters.push(start..i);
            start = i;
        }
    }
    clusters.push(start..values.len());
    clusters
}

/// Wedderburn block signature with minimal central projections.
const IDEMPOTENT_STEPS: usize = 8;

pub fn decompose(algebra: &OperatorSpan, seed: u64) -> Result<BlockSignature> {
    if algebra.dimension() == 0 || !is_algebra(algebra) {
        return Err(Error::NotAnAlgebra);
    }
    let d = algebra.dim();
    let basis = algebra.basis();
    let center: Vec<DenseOperator> = center_coefficients(algebra)?
        .iter()
        .map(|c| combine(basis, c))
        .collect();
    if center.is_empty() {
        return Err(Error::Numerical("center is trivial; the identity should be central".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..CENTER_ATTEMPTS {
        let mut h = DenseOperator::zeros(d);
        for z in &center {
            let zh = z.adjoint();
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            let sym = z + &zh;
            let anti = (z - &zh).scale(I);
            h = &h + &(&sym.scale(re.into()) + &anti.scale(im.into()));
        }
        let (values, vectors) = hermitian_eigh(&h)?;
        let clusters = cluster_eigenvalues(&values);
        if clusters.len() != center.len() {
            continue;
        }

        let mut blocks = Vec::with_capacity(clusters.len());
        let mut projections = Vec::with_capacity(clusters.len());
        for range in clusters {
            let mut p = DenseOperator::zeros(d);
            for v in &vectors[range.clone()] {
                p = &p + &DenseOperator::outer(v, v);
            }
            p = central_projection(&p, &center);
            let rank = range.len();
            let compressed: Vec<DenseOperator> = basis.iter().map(|b| p.matmul(b)).collect();
            let local_dim = orthonormal_span(&compressed, algebra.tolerances())?.dimension();
            let root = (local_dim as f64).sqrt();
            let n = root.round() as usize;
            if n == 0 || (root - n as f64).abs() > INTEGER_TOL || n * n != local_dim {
                return Err(Error::NonIntegerBlock(format!(
                    "block dimension {local_dim} is not a perfect square"
                )));
            }
            if rank % n != 0 {
                return Err(Error::NonIntegerBlock(format!(
                    "projection rank {rank} is not a multiple of block size {n}"
                )));
            }
            blocks.push(Block::new(rank / n, n));
            projections.push(p);
        }
        let sig = BlockSignature::new(d, blocks, projections);
        if sig.represented_dim() != d || sig.algebra_dim() != algebra.dimension() {
            return Err(Error::Numerical(format!(
                "signature {:?} inconsistent with algebra dimension {} on C^{d}",
                sig.blocks,
                algebra.dimension()
            )));
        }
        return Ok(sig);
    }
    Err(Error::DegenerateCenter(CENTER_ATTEMPTS))
}

/// Pulls an approximate spectral projection back into the center (whose
/// basis is orthonormal), then restores idempotence by `P <- 3P^2 - 2P^3`.
/// Eigenvectors of a clustered spectrum can leak across blocks by far more
/// than machine precision; this removes the leak.
fn central_projection(p: &DenseOperator, center: &[DenseOperator]) -> DenseOperator {
    let mut q = DenseOperator::zeros(p.dim());
    for z in center {
        q = &q + &z.scale(z.hs_inner(p));
    }
    for _ in 0..IDEMPOTENT_STEPS {
        let q2 = q.matmul(&q);
        let next = &q2.scale(3.0.into()) - &q2.matmul(&q).scale(2.0.into());
        let done = next.max_abs_diff(&q) < 1e-15;
        q = next;
        if done {
            break;
        }
    }
    q
}

/// Rank test for injectivity of `B ↦ Bψ` on the algebra. The scale of `psi`
/// is irrelevant; a zero vector is never separating.
pub fn verify_witness(algebra: &OperatorSpan, psi: &[Complex64]) -> Result<bool> {
    let d = algebra.dim();
    if psi.len() != d {
        return Err(Error::DimensionMismatch(psi.len(), d));
    }
    let dim_a = algebra.dimension();
    let psi_norm = norm(psi);
    if dim_a > d || psi_norm == 0.0 || !psi_norm.is_finite() {
        return Ok(false);
    }
    let psi: Vec<Complex64> = psi.iter().map(|z| z / psi_norm).collect();
    let images: Vec<Vec<Complex64>> = algebra.basis().iter().map(|b| b.apply(&psi)).collect();
    Ok(vector_rank(&images, algebra.tolerances().rank_cutoff(d)) == dim_a)
}

/// Numerical rank of a list of vectors by Gram-Schmidt with relative cutoff.
pub(crate) fn vector_rank(vectors: &[Vec<Complex64>], rel: f64) -> usize {
    let scale = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = crate::dense::inner(b, &r);
                for (x, e) in r.iter_mut().zip(b) {
                    *x -= c * e;
                }
            }
        }
        let rn = norm(&r);
        if rn > rel * scale {
            basis.push(r.into_iter().map(|z| z / rn).collect());
        }
    }
    basis.len()
}

/// Randomized separating-vector search with a block-criterion fallback.
pub fn random_witness(algebra: &OperatorSpan, seed: u64) -> Result<SeparatingVerdict> {
    if !is_algebra(algebra) {
        return Err(Error::NotAnAlgebra);
    }
    let d = algebra.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if dimension_necessary_check(algebra.dimension(), d) {
        for _ in 0..WITNESS_ATTEMPTS {
            let psi = random_unit_vector(&mut rng, d);
            if verify_witness(algebra, &psi)? {
                return Ok(SeparatingVerdict {
                    exists: true,
                    witness: Some(psi),
                    violating_block: None,
                    signature: None,
                });
            }
        }
    }
    let sig = decompose(algebra, rng.gen())?;
    match sig.violating_block() {
        Some(k) => Ok(SeparatingVerdict {
            exists: false,
            witness: None,
            violating_block: Some(k),
            signature: Some(sig),
        }),
        None => Err(Error::Numerical(format!(
            "blocks {:?} admit a separating vector but {WITNESS_ATTEMPTS} random draws failed",
            sig.blocks
        ))),
    }
}

/// Symplectic data of a qubit Pauli subgroup `G`: `|G| = 2^{t+2r}` with
/// radical `G ∩ G^⊥` of order `2^t`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PauliSubgroupStructure {
    pub n: usize,
    pub group_rank: usize,
    pub radical_rank: usize,
    pub half_form_rank: usize,
}

impl PauliSubgroupStructure {
    pub fn group_order_log2(&self) -> usize {
        self.group_rank
    }
}

pub fn pauli_subgroup_structure(generators: &[PauliWord]) -> Result<PauliSubgroupStructure> {
    let n = generators.first().ok_or(Error::EmptyInput)?.n();
    if let Some(bad) = generators.iter().find(|g| g.n() != n) {
        return Err(Error::SizeMismatch(n, bad.n()));
    }
    let vecs: Vec<u128> = generators.iter().map(PauliWord::symplectic).collect();
    let basis = z2_basis(&vecs);
    let rows: Vec<u128> = basis
        .iter()
        .map(|&u| {
            basis
                .iter()
                .enumerate()
                .filter(|(_, &v)| symplectic_form(u, v) == 1)
                .fold(0u128, |acc, (j, _)| acc | 1u128 << j)
        })
        .collect();
    let form_rank = z2_rank(&rows);
    debug_assert!(form_rank % 2 == 0);
    Ok(PauliSubgroupStructure {
        n,
        group_rank: basis.len(),
        radical_rank: basis.len() - form_rank,
        half_form_rank: form_rank / 2,
    })
}

/// Exact signature of the algebra spanned by the projective group generated
/// by `generators`: `2^t` blocks of `(2^{n-t-r}, 2^r)`. Projections are omitted.
pub fn pauli_subgroup_signature(generators: &[PauliWord]) -> Result<BlockSignature> {
    let s = pauli_subgroup_structure(generators)?;
    if s.n > 62 || s.radical_rank > 24 {
        return Err(Error::InvalidParameter(format!(
            "signature with n = {} and 2^{} blocks is too large to list",
            s.n, s.radical_rank
        )));
    }
    let block = Block::new(
        1usize << (s.n - s.radical_rank - s.half_form_rank),
        1usize << s.half_form_rank,
    );
    Ok(BlockSignature::new(
        1usize << s.n,
        vec![block; 1usize << s.radical_rank],
        Vec::new(),
    ))
}

/// Orthonormal span of `W (⊕_k I_{m_k} ⊗ M_{n_k}) W†` built from matrix units.
pub fn block_algebra(blocks: &[Block], basis_change: &DenseOperator, tol: Tolerances) -> Result<OperatorSpan> {
    let d: usize = blocks.iter().map(|b| b.m * b.n).sum();
    if d == 0 {
        return Err(Error::EmptyInput);
    }
    if basis_change.dim() != d {
        return Err(Error::DimensionMismatch(basis_change.dim(), d));
    }
    let w_adj = basis_change.adjoint();
    let mut ops = Vec::new();
    let mut offset = 0;
    for b in blocks {
        for r in 0..b.n {
            for c in 0..b.n {
                let mut e = DenseOperator::zeros(d);
                for copy in 0..b.m {
                    let base = offset + copy * b.n;
                    e.set(base + r, base + c, crate::dense::ONE);
                }
                ops.push(basis_change.matmul(&e).matmul(&w_adj));
            }
        }
        offset += b.m * b.n;
    }
    orthonormal_span(&ops, tol)
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix.
pub fn random_unitary(d: usize, seed: u64) -> DenseOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = nalgebra::DMatrix::<Complex64>::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution is Haar
    DenseOperator::from_fn(d, |i, j| {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { crate::dense::ONE };
        q[(i, j)] * ph
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::{generated_algebra, operator_system_of};

    fn w(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    fn dense(s: &str) -> DenseOperator {
        w(s).to_dense().unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn full_matrix_algebra_is_one_block() {
        let alg = block_algebra(&[Block::new(1, 3)], &DenseOperator::identity(3), tol()).unwrap();
        let sig = decompose(&alg, 7).unwrap();
        assert_eq!(sig.blocks, vec![Block::new(1, 3)]);
        assert!(!has_separating_vector(&sig));
    }

    #[test]
    fn diagonal_algebra_is_d_blocks() {
        let alg = block_algebra(&[Block::new(1, 1); 4], &random_unitary(4, 3), tol()).unwrap();
        let sig = decompose(&alg, 1).unwrap();
        assert_eq!(sig.blocks, vec![Block::new(1, 1); 4]);
        assert!(has_separating_vector(&sig));
    }

    #[test]
    fn projections_resolve_identity() {
        let blocks = [Block::new(2, 1), Block::new(1, 2), Block::new(3, 2)];
        let alg = block_algebra(&blocks, &random_unitary(10, 11), tol()).unwrap();
        let sig = decompose(&alg, 5).unwrap();
        assert_eq!(sig.blocks, vec![Block::new(3, 2), Block::new(1, 2), Block::new(2, 1)]);
        let mut sum = DenseOperator::zeros(10);
        for (k, p) in sig.projections.iter().enumerate() {
            assert!(p.matmul(p).max_abs_diff(p) < 1e-8);
            assert!(p.adjoint().max_abs_diff(p) < 1e-8);
            let rank = p.trace().re.round() as usize;
            assert_eq!(rank, sig.blocks[k].m * sig.blocks[k].n);
            for q in &sig.projections[k + 1..] {
                assert!(p.matmul(q).frobenius_norm() < 1e-8);
            }
            sum = &sum + p;
        }
        assert!(sum.max_abs_diff(&DenseOperator::identity(10)) < 1e-8);
    }

    #[test]
    fn decompose_rejects_non_algebra() {
        let s = orthonormal_span(&[dense("I"), dense("X"), dense("Z")], tol()).unwrap();
        assert_eq!(decompose(&s, 0).unwrap_err(), Error::NotAnAlgebra);
    }

    #[test]
    fn criterion_examples() {
        let sig = |blocks: Vec<Block>| BlockSignature::new(0, blocks, vec![]);
        assert!(!has_separating_vector(&sig(vec![Block::new(1, 2); 4])));
        assert!(has_separating_vector(&sig(vec![Block::new(2, 2)])));
        assert!(has_separating_vector(&sig(vec![Block::new(1, 1); 5])));
    }

    #[test]
    fn necessary_dimension_check() {
        assert!(!dimension_necessary_check(16, 8));
        for n in 1..10 {
            assert!(!dimension_necessary_check(1 << (n + 1), 1 << n));
        }
        assert!(dimension_necessary_check(8, 8));
    }

    #[test]
    fn witness_for_abelian_pair() {
        let s = orthonormal_span(&[dense("I"), dense("X")], tol()).unwrap();
        let v = random_witness(&s, 42).unwrap();
        assert!(v.exists);
        assert!(verify_witness(&s, v.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn no_witness_for_m2() {
        let s = operator_system_of(&[dense("I"), dense("X"), dense("Z")], tol()).unwrap();
        let v = random_witness(&s, 42).unwrap();
        assert!(!v.exists);
        assert_eq!(v.violating_block, Some(0));
        assert_eq!(v.signature.unwrap().blocks, vec![Block::new(1, 2)]);
    }

    #[test]
    fn verify_witness_examples() {
        let trivial = orthonormal_span(&[DenseOperator::identity(3)], tol()).unwrap();
        let psi = normalize(&[Complex64::new(0.3, 0.1), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0)]);
        assert!(verify_witness(&trivial, &psi).unwrap());

        let pair = orthonormal_span(&[dense("I"), dense("X")], tol()).unwrap();
        let plus = normalize(&[crate::dense::ONE, crate::dense::ONE]);
        assert!(!verify_witness(&pair, &plus).unwrap());

        let full = block_algebra(&[Block::new(1, 2)], &DenseOperator::identity(2), tol()).unwrap();
        assert!(!verify_witness(&full, &plus).unwrap());
        assert!(verify_witness(&full, &psi).is_err());
    }

    #[test]
    fn exact_signature_examples() {
        let sig = pauli_subgroup_signature(&[w("ZII"), w("IZI"), w("IIZ"), w("XXX")]).unwrap();
        assert_eq!(sig.blocks, vec![Block::new(1, 2); 4]);
        let s = pauli_subgroup_structure(&[w("ZII"), w("IZI"), w("IIZ"), w("XXX")]).unwrap();
        assert_eq!((s.radical_rank, s.half_form_rank), (2, 1));

        let sig = pauli_subgroup_signature(&[w("II")]).unwrap();
        assert_eq!(sig.blocks, vec![Block::new(4, 1)]);

        let s = pauli_subgroup_structure(&[w("X"), w("Z")]).unwrap();
        assert_eq!((s.radical_rank, s.half_form_rank), (0, 1));
        assert_eq!(pauli_subgroup_signature(&[w("X"), w("Z")]).unwrap().blocks, vec![Block::new(1, 2)]);

        assert_eq!(pauli_subgroup_signature(&[w("X"), w("ZZ")]).unwrap_err(), Error::SizeMismatch(1, 2));
        assert_eq!(pauli_subgroup_signature(&[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn example_two_algebra_numeric_matches_exact() {
        let words = ["III", "ZII", "IZI", "IIZ", "XXX", "YYY"];
        let ops: Vec<DenseOperator> = words.iter().map(|s| dense(s)).collect();
        let alg = generated_algebra(&ops, tol()).unwrap();
        assert_eq!(alg.dimension(), 16);
        let sig = decompose(&alg, 9).unwrap();
        assert_eq!(sig.blocks, vec![Block::new(1, 2); 4]);
    }
}
