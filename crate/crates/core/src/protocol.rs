//! Fixed product-basis measurements on `{(I ⊗ U_i)|Φ⟩}` and their outcome tables.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::StateSet;
use crate::dense::{inner, kron_vec, DenseOperator, DEFAULT_DENSE_CAP, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Outcomes with probability at or below this are outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// `(I ⊗ U)|Φ⟩` with `|Φ⟩ = Σ|ii⟩/√d`; entry `i·d + j` is `U_{ji}/√d`.
pub fn state_vector(u: &DenseOperator) -> Vec<Complex64> {
    let d = u.dim();
    let s = 1.0 / (d as f64).sqrt();
    let mut out = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = u.get(j, i) * s;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalMeasurement {
    pub d: usize,
    pub label: String,
    pub alice_basis: Vec<Vec<Complex64>>,
    pub bob_basis: Vec<Vec<Complex64>>,
    /// One name per basis vector, shared by both parties.
    pub outcome_names: Vec<String>,
}

#[derive(Deserialize)]
struct RawMeasurement {
    label: String,
    alice_basis: Vec<Vec<Complex64>>,
    bob_basis: Vec<Vec<Complex64>>,
    #[serde(default)]
    outcome_names: Option<Vec<String>>,
}

impl<'de> Deserialize<'de> for LocalMeasurement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMeasurement::deserialize(d)?;
        let mut m = LocalMeasurement::new(raw.label, raw.alice_basis, raw.bob_basis)
            .map_err(serde::de::Error::custom)?;
        if let Some(names) = raw.outcome_names {
            if names.len() != m.d {
                return Err(serde::de::Error::custom("outcome_names must have one entry per basis vector"));
            }
            m.outcome_names = names;
        }
        Ok(m)
    }
}

fn check_basis(basis: &[Vec<Complex64>], d: usize, party: &str) -> Result<()> {
    if basis.len() != d {
        return Err(Error::DimensionMismatch(d, basis.len()));
    }
    if let Some(v) = basis.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch(d, v.len()));
    }
    for (a, u) in basis.iter().enumerate() {
        for (b, v) in basis.iter().enumerate().skip(a) {
            let expect = if a == b { ONE } else { ZERO };
            if (inner(u, v) - expect).norm() > ORTHONORMAL_TOL {
                return Err(Error::InvalidParameter(format!(
                    "{party} basis is not orthonormal at vectors ({a}, {b})"
                )));
            }
        }
    }
    Ok(())
}

impl LocalMeasurement {
    pub fn new(label: impl Into<String>, alice_basis: Vec<Vec<Complex64>>, bob_basis: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = alice_basis.len();
        if d == 0 {
            return Err(Error::EmptyInput);
        }
        check_basis(&alice_basis, d, "alice")?;
        check_basis(&bob_basis, d, "bob")?;
        Ok(Self {
            d,
            label: label.into(),
            alice_basis,
            bob_basis,
            outcome_names: (0..d).map(|i| i.to_string()).collect(),
        })
    }

    pub fn outcome_count(&self) -> usize {
        self.d * self.d
    }

    /// `"a,b"` with the per-party names.
    pub fn outcome_name(&self, index: usize) -> String {
        format!("{},{}", self.outcome_names[index / self.d], self.outcome_names[index % self.d])
    }
}

fn check_qubits(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one qubit".into()));
    }
    let d = 1usize.checked_shl(n as u32).filter(|&d| d <= DEFAULT_DENSE_CAP);
    d.ok_or(Error::TooManyQubits(n))
}

fn product_basis(n: usize, single: [[Complex64; 2]; 2]) -> Vec<Vec<Complex64>> {
    (0..1usize << n)
        .map(|t| {
            (0..n).fold(vec![ONE], |acc, s| {
                let bit = (t >> (n - 1 - s)) & 1;
                kron_vec(&acc, &single[bit])
            })
        })
        .collect()
}

fn bit_names(n: usize, symbols: [char; 2]) -> Vec<String> {
    (0..1usize << n)
        .map(|t| (0..n).map(|s| symbols[(t >> (n - 1 - s)) & 1]).collect())
        .collect()
}

/// Both parties measure every qubit in the `σ₂` eigenbasis `(|0⟩ ± i|1⟩)/√2`;
/// bit 0 of a site is the `+1` eigenvector.
pub fn y_basis_measurement(n: usize) -> Result<LocalMeasurement> {
    check_qubits(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [Complex64::new(h, 0.0), I * h];
    let minus = [Complex64::new(h, 0.0), -I * h];
    let basis = product_basis(n, [plus, minus]);
    let mut m = LocalMeasurement::new("y-basis", basis.clone(), basis)?;
    m.outcome_names = bit_names(n, ['+', '-']);
    Ok(m)
}

/// Computational basis on `C^d` for both parties.
pub fn z_basis_measurement(d: usize) -> Result<LocalMeasurement> {
    if d == 0 || d > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            dim: d,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let basis: Vec<Vec<Complex64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { ONE } else { ZERO }).collect())
        .collect();
    let mut m = LocalMeasurement::new("z-basis", basis.clone(), basis)?;
    if d.is_power_of_two() && d > 1 {
        m.outcome_names = bit_names(d.trailing_zeros() as usize, ['0', '1']);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeTable {
    pub measurement: String,
    pub d: usize,
    pub state_labels: Vec<String>,
    pub outcome_names: Vec<String>,
    /// `rows[s][a·d + b]` is the probability of `(a, b)` for state `s`.
    pub rows: Vec<Vec<f64>>,
    pub support: Vec<Vec<usize>>,
}

/// `|⟨a|⊗⟨b|ψ⟩|²` for every state and product outcome.
pub fn outcome_table(set: &StateSet, meas: &LocalMeasurement) -> Result<OutcomeTable> {
    if set.d != meas.d {
        return Err(Error::DimensionMismatch(set.d, meas.d));
    }
    let d = set.d;
    let unitaries = set.dense_unitaries(DEFAULT_DENSE_CAP)?;
    let mut rows = Vec::with_capacity(unitaries.len());
    let mut support = Vec::with_capacity(unitaries.len());
    for u in &unitaries {
        let psi = state_vector(u);
        // t[i][b] = Σ_j ψ_{ij} conj(bob_b[j])
        let t: Vec<Vec<Complex64>> = (0..d)
            .map(|i| meas.bob_basis.iter().map(|bv| inner(bv, &psi[i * d..(i + 1) * d])).collect())
            .collect();
        let mut row = Vec::with_capacity(d * d);
        for av in &meas.alice_basis {
            for b in 0..d {
                let amp: Complex64 = (0..d).map(|i| av[i].conj() * t[i][b]).sum();
                row.push(amp.norm_sqr().clamp(0.0, 1.0));
            }
        }
        support.push((0..d * d).filter(|&o| row[o] > SUPPORT_THRESHOLD).collect());
        rows.push(row);
    }
    Ok(OutcomeTable {
        measurement: meas.label.clone(),
        d,
        state_labels: set.labels(),
        outcome_names: (0..d * d).map(|o| meas.outcome_name(o)).collect(),
        rows,
        support,
    })
}

impl OutcomeTable {
    /// `state,alice,bob,probability` lines for outcomes in the support.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,alice,bob,probability\n");
        for (s, row) in self.rows.iter().enumerate() {
            for &o in &self.support[s] {
                out.push_str(&format!("{},{},{},{:.12}\n", self.state_labels[s], o / self.d, o % self.d, row[o]));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub disjoint: bool,
    pub colliding_pairs: Vec<(usize, usize)>,
    pub colliding_labels: Vec<(String, String)>,
}

/// Pairs of states whose supports meet; empty means the measurement names
/// the state from any single outcome.
pub fn supports_disjoint(table: &OutcomeTable) -> CollisionReport {
    let mut pairs = Vec::new();
    for i in 0..table.support.len() {
        for j in i + 1..table.support.len() {
            if table.support[i].iter().any(|o| table.support[j].binary_search(o).is_ok()) {
                pairs.push((i, j));
            }
        }
    }
    CollisionReport {
        disjoint: pairs.is_empty(),
        colliding_labels: pairs
            .iter()
            .map(|&(i, j)| (table.state_labels[i].clone(), table.state_labels[j].clone()))
            .collect(),
        colliding_pairs: pairs,
    }
}

/// Multinomial counts per state; outcomes outside the support are never drawn.
pub fn sample_table(table: &OutcomeTable, shots: u64, seed: u64) -> Result<Vec<Vec<u64>>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    table
        .rows
        .iter()
        .map(|row| {
            let weights: Vec<f64> = row.iter().map(|&p| if p > SUPPORT_THRESHOLD { p } else { 0.0 }).collect();
            let dist = WeightedIndex::new(&weights).map_err(|e| Error::Numerical(e.to_string()))?;
            let mut counts = vec![0u64; row.len()];
            for _ in 0..shots {
                counts[dist.sample(&mut rng)] += 1;
            }
            Ok(counts)
        })
        .collect()
}

pub fn sample_outcomes(set: &StateSet, meas: &LocalMeasurement, shots: u64, seed: u64) -> Result<Vec<Vec<u64>>> {
    sample_table(&outcome_table(set, meas)?, shots, seed)
}
