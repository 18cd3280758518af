//! Certifying one-way LOCC (in)distinguishability of maximally entangled
//! state families built from Pauli operators.
//!
//! A family `{(I ⊗ U_i)|Φ⟩}` is analyzed through the operator system
//! `span{U_i† U_j, I}`. When that span is a C*-algebra, the family is
//! one-way distinguishable exactly when the algebra has a separating vector,
//! which is decided from its block structure `⊕_k (I_{m_k} ⊗ M_{n_k})`
//! (`m_k ≥ n_k` for every block). When it is not an algebra, an embedded
//! copy of `M_2` still certifies indistinguishability.
//!
//! Modules:
//! - [`pauli`]: exact qubit Pauli words and qudit Weyl operators.
//! - [`span`]: Hilbert-Schmidt spans, membership and multiplicative closure.
//! - [`wedderburn`]: block decomposition and separating-vector witnesses.
//! - [`constructions`]: the lattice and generalized Pauli state families.
//! - [`discrimination`]: the certificate-producing decision pipeline.
//! - [`protocol`]: fixed local product-basis measurement simulation.

pub mod constructions;
pub mod dense;
pub mod discrimination;
pub mod error;
pub mod pauli;
pub mod protocol;
pub mod span;
pub mod wedderburn;

#[cfg(test)]
mod proptests;

pub use dense::DenseOperator;
pub use error::{Error, Result};
pub use pauli::{PauliWord, QuditPauli};
pub use span::{OperatorSpan, Tolerances};
