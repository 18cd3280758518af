//! Numerical engine for subspaces of d×d operators under the
//! Hilbert-Schmidt inner product `⟨A, B⟩ = tr(A†B)`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::{inner, norm, DenseOperator};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative rank cutoff; `None` means `1e-9 · d`.
    pub rank_rel: Option<f64>,
    /// Membership holds when the residual is below `membership · ‖op‖`.
    pub membership: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: None,
            membership: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn rank_cutoff(&self, dim: usize) -> f64 {
        self.rank_rel.unwrap_or(1e-9 * dim as f64)
    }

    /// Same settings, every threshold scaled by `factor`.
    pub fn loosened(&self, factor: f64) -> Self {
        Self {
            rank_rel: self.rank_rel.map(|t| t * factor),
            membership: self.membership * factor,
        }
    }
}

/// Orthonormal basis of an operator subspace, with the generators it came
/// from and lazily evaluated structural flags.
#[derive(Clone, Debug)]
pub struct OperatorSpan {
    dim: usize,
    basis: Vec<DenseOperator>,
    generators: Vec<DenseOperator>,
    labels: Vec<String>,
    tol: Tolerances,
    self_adjoint: OnceLock<bool>,
    contains_identity: OnceLock<bool>,
    mult_closed: OnceLock<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanFlags {
    pub is_self_adjoint: Option<bool>,
    pub contains_identity: Option<bool>,
    pub is_mult_closed: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanSummary {
    pub ambient_dim: usize,
    pub dimension: usize,
    pub flags: SpanFlags,
    pub generator_labels: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<DenseOperator>>,
}

/// Gram-Schmidt step with one re-orthogonalization pass. Returns the
/// residual norm; `v` is left holding the residual.
fn orthogonalize(basis: &[DenseOperator], v: &mut [Complex64]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b.as_slice(), v);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for (x, e) in v.iter_mut().zip(b.as_slice()) {
                *x -= c * e;
            }
        }
    }
    norm(v)
}

fn push_if_independent(
    basis: &mut Vec<DenseOperator>,
    dim: usize,
    op: &DenseOperator,
    cutoff: f64,
) -> bool {
    let mut v = op.as_slice().to_vec();
    let r = orthogonalize(basis, &mut v);
    if r > cutoff {
        for x in v.iter_mut() {
            *x /= r;
        }
        basis.push(DenseOperator::from_raw(dim, v));
        true
    } else {
        false
    }
}

impl OperatorSpan {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the span as a linear space.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DenseOperator] {
        &self.basis
    }

    pub fn generators(&self) -> &[DenseOperator] {
        &self.generators
    }

    pub fn generator_labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn flags(&self) -> SpanFlags {
        SpanFlags {
            is_self_adjoint: self.self_adjoint.get().copied(),
            contains_identity: self.contains_identity.get().copied(),
            is_mult_closed: self.mult_closed.get().copied(),
        }
    }

    pub fn summary(&self, verbose: bool) -> SpanSummary {
        SpanSummary {
            ambient_dim: self.dim,
            dimension: self.dimension(),
            flags: self.flags(),
            generator_labels: self.labels.clone(),
            basis: verbose.then(|| self.basis.clone()),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    /// Orthogonal projection residual `‖op − Π(op)‖_F`.
    pub fn residual(&self, op: &DenseOperator) -> Result<f64> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch(op.dim(), self.dim));
        }
        let mut v = op.as_slice().to_vec();
        Ok(orthogonalize(&self.basis, &mut v))
    }

    /// Membership with the span's own tolerance; the residual is always returned.
    pub fn contains(&self, op: &DenseOperator) -> Result<(bool, f64)> {
        let r = self.residual(op)?;
        Ok((r <= self.tol.membership * op.frobenius_norm(), r))
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self.self_adjoint.get_or_init(|| {
            self.basis
                .iter()
                .all(|b| self.contains(&b.adjoint()).map(|(ok, _)| ok).unwrap_or(false))
        })
    }

    pub fn contains_identity(&self) -> bool {
        *self.contains_identity.get_or_init(|| {
            self.contains(&DenseOperator::identity(self.dim))
                .map(|(ok, _)| ok)
                .unwrap_or(false)
        })
    }

    pub fn is_mult_closed(&self) -> bool {
        *self.mult_closed.get_or_init(|| {
            for a in &self.basis {
                for b in &self.basis {
                    // factors have unit norm, so ‖ab‖ ≤ 1 and the cutoff is absolute
                    let p = a.matmul(b);
                    match self.residual(&p) {
                        Ok(r) if r <= self.tol.membership => {}
                        _ => return false,
                    }
                }
            }
            true
        })
    }
}

fn check_dims(ops: &[DenseOperator]) -> Result<usize> {
    let first = ops.first().ok_or(Error::EmptyInput)?;
    let d = first.dim();
    if let Some(bad) = ops.iter().find(|o| o.dim() != d) {
        return Err(Error::DimensionMismatch(d, bad.dim()));
    }
    Ok(d)
}

/// Orthonormal basis for `span(ops)`, processing inputs in order.
///
/// An input is dropped when its residual against the basis built so far is
/// below `rank_cutoff · max‖op‖`.
pub fn orthonormal_span(ops: &[DenseOperator], tol: Tolerances) -> Result<OperatorSpan> {
    let d = check_dims(ops)?;
    let scale = ops.iter().map(DenseOperator::frobenius_norm).fold(0.0, f64::max);
    let cutoff = tol.rank_cutoff(d) * scale;
    let mut basis = Vec::new();
    for op in ops {
        if basis.len() == d * d {
            break;
        }
        push_if_independent(&mut basis, d, op, cutoff);
    }
    Ok(OperatorSpan {
        dim: d,
        basis,
        generators: ops.to_vec(),
        labels: Vec::new(),
        tol,
        self_adjoint: OnceLock::new(),
        contains_identity: OnceLock::new(),
        mult_closed: OnceLock::new(),
    })
}

/// Free-function form of [`OperatorSpan::contains`].
pub fn contains(span: &OperatorSpan, op: &DenseOperator) -> Result<(bool, f64)> {
    span.contains(op)
}

/// `span{U_i† U_j : all ordered pairs} ∪ {I}`.
pub fn operator_system_of(unitaries: &[DenseOperator], tol: Tolerances) -> Result<OperatorSpan> {
    let d = check_dims(unitaries)?;
    let mut gens = vec![DenseOperator::identity(d)];
    let mut labels = vec!["I".to_string()];
    let adjoints: Vec<DenseOperator> = unitaries.iter().map(DenseOperator::adjoint).collect();
    for (i, ui) in adjoints.iter().enumerate() {
        for (j, uj) in unitaries.iter().enumerate() {
            if i != j {
                gens.push(ui.matmul(uj));
                labels.push(format!("U{i}†U{j}"));
            }
        }
    }
    let span = orthonormal_span(&gens, tol)?.with_labels(labels);
    let _ = span.self_adjoint.set(true);
    let _ = span.contains_identity.set(true);
    Ok(span)
}

/// Smallest multiplicatively closed span containing `span`.
///
/// Each round adjoins products of basis elements where at least one factor
/// was added in the previous round; the dimension is bounded by d², so the
/// loop terminates.
pub fn multiply_closure(span: &OperatorSpan) -> OperatorSpan {
    let d = span.dim;
    let mut basis = span.basis.clone();
    let mut fresh_from = 0;
    while fresh_from < basis.len() && basis.len() < d * d {
        let round_end = basis.len();
        for i in 0..round_end {
            for j in 0..round_end {
                if i < fresh_from && j < fresh_from {
                    continue;
                }
                let p = basis[i].matmul(&basis[j]);
                push_if_independent(&mut basis, d, &p, span.tol.membership);
                if basis.len() == d * d {
                    break;
                }
            }
        }
        fresh_from = round_end;
    }
    let out = OperatorSpan {
        dim: d,
        basis,
        generators: span.generators.clone(),
        labels: span.labels.clone(),
        tol: span.tol,
        self_adjoint: OnceLock::new(),
        contains_identity: OnceLock::new(),
        mult_closed: OnceLock::new(),
    };
    let _ = out.mult_closed.set(true);
    if let Some(&sa) = span.self_adjoint.get() {
        if sa {
            let _ = out.self_adjoint.set(true);
        }
    }
    if let Some(&true) = span.contains_identity.get() {
        let _ = out.contains_identity.set(true);
    }
    out
}

/// Unital *-algebra generated by `ops`: closure of `span(ops ∪ ops† ∪ {I})`.
pub fn generated_algebra(ops: &[DenseOperator], tol: Tolerances) -> Result<OperatorSpan> {
    let d = check_dims(ops)?;
    let mut gens = vec![DenseOperator::identity(d)];
    for op in ops {
        gens.push(op.clone());
        gens.push(op.adjoint());
    }
    let span = orthonormal_span(&gens, tol)?;
    let _ = span.self_adjoint.set(true);
    let _ = span.contains_identity.set(true);
    Ok(multiply_closure(&span))
}

/// Self-adjoint, contains `I`, and closed under products of basis elements.
pub fn is_algebra(span: &OperatorSpan) -> bool {
    span.is_self_adjoint() && span.contains_identity() && span.is_mult_closed()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliWord;

    fn dense(s: &str) -> DenseOperator {
        s.parse::<PauliWord>().unwrap().to_dense().unwrap()
    }

    #[test]
    fn single_identity_has_dimension_one() {
        let s = orthonormal_span(&[DenseOperator::identity(3)], Tolerances::default()).unwrap();
        assert_eq!(s.dimension(), 1);
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        assert_eq!(
            orthonormal_span(&[], Tolerances::default()).unwrap_err(),
            Error::EmptyInput
        );
        let err = orthonormal_span(
            &[DenseOperator::identity(2), DenseOperator::identity(3)],
            Tolerances::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::DimensionMismatch(2, 3));
    }

    #[test]
    fn z_not_in_span_of_i_and_x() {
        let s = orthonormal_span(&[dense("I"), dense("X")], Tolerances::default()).unwrap();
        let (inside, r) = s.contains(&dense("Z")).unwrap();
        assert!(!inside);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn basis_elements_are_members() {
        let s = orthonormal_span(&[dense("I"), dense("X"), dense("Z")], Tolerances::default())
            .unwrap();
        for b in s.basis() {
            let (inside, r) = s.contains(b).unwrap();
            assert!(inside && r < 1e-12);
        }
        assert!(s.contains(&DenseOperator::identity(4)).is_err());
    }

    #[test]
    fn operator_system_of_bell_triple_is_full() {
        let us = [dense("I"), dense("X"), dense("Z")];
        let s = operator_system_of(&us, Tolerances::default()).unwrap();
        assert_eq!(s.dimension(), 4);
        assert_eq!(s.flags().is_self_adjoint, Some(true));
        assert!(is_algebra(&s));
    }

    #[test]
    fn closure_of_abelian_pair() {
        let s = orthonormal_span(&[dense("I"), dense("X")], Tolerances::default()).unwrap();
        let c = multiply_closure(&s);
        assert_eq!(c.dimension(), 2);
        assert!(is_algebra(&s));
    }

    #[test]
    fn closure_fills_in_products() {
        let s = orthonormal_span(&[dense("XI"), dense("IZ")], Tolerances::default()).unwrap();
        assert!(!s.is_mult_closed());
        let c = multiply_closure(&s);
        // I, XI, IZ, XZ
        assert_eq!(c.dimension(), 4);
        assert!(is_algebra(&c));
    }

    #[test]
    fn non_self_adjoint_span_is_not_algebra() {
        let e01 = DenseOperator::from_fn(2, |r, c| {
            if r == 0 && c == 1 {
                crate::dense::ONE
            } else {
                crate::dense::ZERO
            }
        });
        let s = orthonormal_span(&[DenseOperator::identity(2), e01], Tolerances::default())
            .unwrap();
        assert!(s.is_mult_closed());
        assert!(!s.is_self_adjoint());
        assert!(!is_algebra(&s));
    }
}
