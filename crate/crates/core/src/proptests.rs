//! Randomized invariants across modules. Kept inside the crate so they run
//! ahead of the integration targets.

use std::collections::HashSet;

use num_complex::Complex64;
use proptest::prelude::*;

use crate::constructions::{example2_set, halfshift_variant, theorem2_family, theorem4_family, StateSet, Unitaries};
use crate::dense::{DenseOperator, DEFAULT_DENSE_CAP, ONE, ZERO};
use crate::discrimination::{analyze, recheck, Certificate, Outcome};
use crate::pauli::{generate_group, symplectic_form, z2_rank};
use crate::protocol::{outcome_table, state_vector, supports_disjoint, y_basis_measurement, LocalMeasurement};
use crate::span::{generated_algebra, is_algebra, multiply_closure, operator_system_of, orthonormal_span};
use crate::wedderburn::{block_algebra, decompose, random_unitary, Block};
use crate::{PauliWord, QuditPauli, Tolerances};

fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>(), 0u8..4).prop_map(move |(x, z, p)| PauliWord::from_parts(n, x & mask, z & mask, p).unwrap())
}

fn word_pair() -> impl Strategy<Value = (PauliWord, PauliWord)> {
    (1usize..=5).prop_flat_map(|n| (word(n), word(n)))
}

fn word_list(max: usize) -> impl Strategy<Value = Vec<PauliWord>> {
    (1usize..=3).prop_flat_map(move |n| prop::collection::vec(word(n), 1..=max))
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn dense_all(words: &[PauliWord]) -> Vec<DenseOperator> {
    words.iter().map(|w| w.to_dense().unwrap()).collect()
}

fn mutually_contained(a: &crate::OperatorSpan, b: &crate::OperatorSpan) -> bool {
    a.basis().iter().all(|x| b.contains(x).unwrap().0) && b.basis().iter().all(|x| a.contains(x).unwrap().0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dense_conversion_is_a_homomorphism((p, q) in word_pair()) {
        let pq = p.multiply(&q).unwrap().to_dense().unwrap();
        prop_assert_eq!(pq, p.to_dense().unwrap().matmul(&q.to_dense().unwrap()));
        prop_assert_eq!(p.adjoint().to_dense().unwrap(), p.to_dense().unwrap().adjoint());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn commutation_matches_dense((p, q) in word_pair()) {
        let (a, b) = (p.to_dense().unwrap(), q.to_dense().unwrap());
        let ab = a.matmul(&b);
        let ba = b.matmul(&a);
        prop_assert_eq!(p.commutes(&q).unwrap(), ab.max_abs_diff(&ba) == 0.0);
        prop_assert!(ab.max_abs_diff(&ba) == 0.0 || ab.max_abs_diff(&ba.scale(-ONE)) == 0.0);
    }

    #[test]
    fn distinct_classes_are_trace_orthogonal((p, q) in word_pair()) {
        let t = p.to_dense().unwrap().hs_inner(&q.to_dense().unwrap());
        if p.projectively_eq(&q) {
            prop_assert!((t.norm() - (1u64 << p.n()) as f64).abs() < 1e-12);
        } else {
            prop_assert_eq!(t, ZERO);
        }
    }

    #[test]
    fn projective_group_order_is_two_to_the_rank(gens in word_list(6)) {
        let n = gens[0].n();
        let group = generate_group(n, &gens).unwrap();
        let classes: HashSet<u128> = group.iter().map(PauliWord::symplectic).collect();
        let vecs: Vec<u128> = gens.iter().map(PauliWord::symplectic).collect();
        prop_assert_eq!(classes.len(), 1usize << z2_rank(&vecs));
        prop_assert_eq!(group.len(), classes.len());
    }

    #[test]
    fn qudit_dense_conversion_is_a_homomorphism(d in 2usize..9, a in 0i64..20, b in 0i64..20, c in 0i64..20, e in 0i64..20) {
        let p = QuditPauli::new(d, a, b).unwrap();
        let q = QuditPauli::new(d, c, e).unwrap();
        let lhs = p.multiply(&q).unwrap().to_dense().unwrap();
        let rhs = p.to_dense().unwrap().matmul(&q.to_dense().unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        prop_assert!(p.adjoint().to_dense().unwrap().max_abs_diff(&p.to_dense().unwrap().adjoint()) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn closure_is_idempotent_and_monotone(words in word_list(5)) {
        let os = operator_system_of(&dense_all(&words), tol()).unwrap();
        let once = multiply_closure(&os);
        let twice = multiply_closure(&once);
        prop_assert_eq!(once.dimension(), twice.dimension());
        prop_assert!(mutually_contained(&once, &twice));
        prop_assert!(once.dimension() >= os.dimension());
        prop_assert_eq!(once.dimension() == os.dimension(), is_algebra(&os));
    }

    #[test]
    fn spans_are_orthonormal_and_contain_their_inputs(words in word_list(6), mix in prop::collection::vec(-1.0f64..1.0, 6)) {
        let mut ops = dense_all(&words);
        // a generic combination adds a dependent input
        let combo = ops.iter().zip(&mix).fold(DenseOperator::zeros(ops[0].dim()), |acc, (o, &c)| &acc + &o.scale(c.into()));
        ops.push(combo);
        let span = orthonormal_span(&ops, tol()).unwrap();
        for (i, a) in span.basis().iter().enumerate() {
            for (j, b) in span.basis().iter().enumerate() {
                let expect = if i == j { ONE } else { ZERO };
                prop_assert!((a.hs_inner(b) - expect).norm() < 10.0 * tol().membership);
            }
        }
        for op in &ops {
            prop_assert!(span.residual(op).unwrap() < tol().membership * op.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn supports_never_collide_after_removal(n in 2usize..=4, seed in any::<u64>()) {
        let set = theorem2_family(n, None).unwrap();
        let meas = y_basis_measurement(n).unwrap();
        let before = supports_disjoint(&outcome_table(&set, &meas).unwrap()).colliding_pairs.len();
        let drop = (seed % set.len() as u64) as usize;
        let smaller = set.without(drop).unwrap();
        let after = supports_disjoint(&outcome_table(&smaller, &meas).unwrap()).colliding_pairs.len();
        prop_assert!(after <= before);
    }

    #[test]
    fn amplitude_identity(d in 2usize..7, seed in any::<u64>(), a in 0usize..7, b in 0usize..7) {
        let (a, b) = (a % d, b % d);
        let u = random_unitary(d, seed);
        let alice = random_unitary(d, seed ^ 1);
        let bob = random_unitary(d, seed ^ 2);
        let col = |m: &DenseOperator, c: usize| -> Vec<Complex64> { (0..d).map(|r| m.get(r, c)).collect() };
        let (av, bv) = (col(&alice, a), col(&bob, b));
        let psi = state_vector(&u);
        let direct: Complex64 = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| av[i].conj() * bv[j].conj() * psi[i * d + j])
            .sum();
        let conj_a: Vec<Complex64> = av.iter().map(|z| z.conj()).collect();
        let via_u: Complex64 = bv.iter().zip(u.apply(&conj_a)).map(|(x, y)| x.conj() * y).sum::<Complex64>() / (d as f64).sqrt();
        prop_assert!((direct - via_u).norm() < 1e-12);

        // total probability is one for every state under every measurement
        let alice_basis = (0..d).map(|c| col(&alice, c)).collect();
        let bob_basis = (0..d).map(|c| col(&bob, c)).collect();
        let meas = LocalMeasurement::new("random", alice_basis, bob_basis).unwrap();
        let set = theorem4_family(d, None, None).unwrap();
        for row in outcome_table(&set, &meas).unwrap().rows {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn decomposed_projections_form_a_partition(seed in any::<u64>(), shape in prop::collection::vec((1usize..4, 1usize..4), 1..4)) {
        let blocks: Vec<Block> = shape.iter().map(|&(m, n)| Block::new(m, n)).collect();
        let d: usize = blocks.iter().map(|b| b.m * b.n).sum();
        let alg = block_algebra(&blocks, &random_unitary(d, seed), tol()).unwrap();
        let sig = decompose(&alg, seed).unwrap();
        prop_assert_eq!(sig.represented_dim(), d);
        prop_assert_eq!(sig.algebra_dim(), alg.dimension());
        let mut sum = DenseOperator::zeros(d);
        for (i, p) in sig.projections.iter().enumerate() {
            prop_assert!(p.matmul(p).max_abs_diff(p) < 1e-8);
            prop_assert!(p.adjoint().max_abs_diff(p) < 1e-8);
            for q in &sig.projections[i + 1..] {
                prop_assert!(p.matmul(q).frobenius_norm() < 1e-8);
            }
            sum = &sum + p;
        }
        prop_assert!((&sum - &DenseOperator::identity(d)).frobenius_norm() < 1e-8);
    }
}

#[test]
fn pairwise_distinct_products_give_the_counting_rule() {
    // words whose pairwise product classes are distinct and nontrivial
    let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let sets = [owned(&["XI", "ZI", "IX"]), owned(&["XII", "IZI", "IIY", "ZZZ"]), example2_set().labels()];
    for labels in sets {
        let words: Vec<PauliWord> = labels.iter().map(|s| s.parse().unwrap()).collect();
        let mut seen = HashSet::new();
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                let v = a.symplectic() ^ b.symplectic();
                assert!(v != 0 && seen.insert(v), "{labels:?} is not a valid input");
            }
        }
        let m = words.len();
        let os = operator_system_of(&dense_all(&words), tol()).unwrap();
        assert_eq!(os.dimension(), 1 + m * (m - 1) / 2, "{labels:?}");
    }
}

fn families() -> Vec<StateSet> {
    let mut sets = vec![example2_set()];
    for n in 2..=5 {
        for k in 1..n {
            sets.push(theorem2_family(n, Some(k)).unwrap());
        }
    }
    for d in 2..=16 {
        sets.push(theorem4_family(d, None, None).unwrap());
        if d % 2 == 0 {
            sets.push(halfshift_variant(d, None, None).unwrap());
        }
    }
    sets
}

#[test]
fn predicted_operator_system_dimensions_hold() {
    for set in families() {
        let os = operator_system_of(&set.dense_unitaries(DEFAULT_DENSE_CAP).unwrap(), tol()).unwrap();
        let predicted = set.predicted.as_ref().unwrap();
        if let Some(dim) = predicted.operator_system_dim {
            assert_eq!(os.dimension(), dim, "{}", set.label());
        }
        if let Some(closed) = predicted.is_algebra {
            assert_eq!(is_algebra(&os), closed, "{}", set.label());
        }
    }
}

#[test]
fn family_states_are_pairwise_orthogonal() {
    for set in families() {
        let states: Vec<Vec<Complex64>> =
            set.dense_unitaries(DEFAULT_DENSE_CAP).unwrap().iter().map(state_vector).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip.norm() - expect).abs() < 1e-12, "{} states {i}, {j}", set.label());
            }
        }
    }
}

#[test]
fn lattice_algebra_has_dimension_two_to_the_n_plus_one() {
    for n in 2..=8 {
        let set = theorem2_family(n, None).unwrap();
        let words = set.qubit_words().unwrap();
        let gens: Vec<PauliWord> = words.iter().map(|w| words[0].adjoint().multiply(w).unwrap()).collect();
        let group = generate_group(n, &gens).unwrap();
        assert_eq!(group.len(), 1 << (n + 1), "n={n}");
        // the classes are a group containing every U_i†U_j
        let classes: HashSet<u128> = group.iter().map(PauliWord::symplectic).collect();
        for a in words {
            for b in words {
                assert!(classes.contains(&(a.symplectic() ^ b.symplectic())));
            }
        }
        assert!(gens.iter().any(|g| gens.iter().any(|h| symplectic_form(g.symplectic(), h.symplectic()) == 1)));
    }
}

#[test]
fn generalized_family_cross_products_span_the_shift_powers() {
    for d in 2..=12 {
        let set = theorem4_family(d, None, None).unwrap();
        let (k, l) = (set.params["k"], set.params["l"]);
        assert!(k * l >= d);
        let s1: Vec<DenseOperator> = (0..k).map(|a| QuditPauli::shift(d, a as i64).unwrap().to_dense().unwrap()).collect();
        let s2: Vec<DenseOperator> =
            (0..l).map(|j| QuditPauli::shift(d, (j * k) as i64).unwrap().to_dense().unwrap()).collect();
        let cross: Vec<DenseOperator> = s1.iter().flat_map(|a| s2.iter().map(move |b| a.adjoint().matmul(b))).collect();
        let r = orthonormal_span(&cross, tol()).unwrap();
        let powers: Vec<DenseOperator> = (0..d).map(|a| QuditPauli::shift(d, a as i64).unwrap().to_dense().unwrap()).collect();
        let all = orthonormal_span(&powers, tol()).unwrap();
        assert_eq!(r.dimension(), d, "d={d}");
        assert!(mutually_contained(&r, &all), "d={d}");
    }
}

#[test]
fn every_family_is_indistinguishable_with_a_valid_certificate() {
    for set in families().into_iter().filter(|s| s.d <= 32) {
        let v = analyze(&set, 11);
        assert_eq!(v.outcome, Outcome::Indistinguishable, "{}", set.label());
        assert!(recheck(v.certificate.as_ref().unwrap(), &set), "{}", set.label());
        let again = analyze(&set, 11);
        assert_eq!(fingerprint(&v), fingerprint(&again));
    }
}

fn fingerprint(v: &crate::discrimination::Verdict) -> String {
    format!("{:?}|{:?}", v.outcome, v.certificate)
}

#[test]
fn dropping_a_colliding_member_removes_the_dimension_obstruction() {
    for n in 2..=5 {
        let set = theorem2_family(n, None).unwrap();
        let report = supports_disjoint(&outcome_table(&set, &y_basis_measurement(n).unwrap()).unwrap());
        let &(i, j) = report.colliding_pairs.first().unwrap();
        for drop in [i, j] {
            let smaller = set.without(drop).unwrap();
            let v = analyze(&smaller, 3);
            assert!(
                !matches!(v.certificate, Some(Certificate::DimensionExceeded { .. })),
                "n={n} drop {drop}: {:?}",
                v.certificate
            );
            let us = smaller.dense_unitaries(DEFAULT_DENSE_CAP).unwrap();
            let os = operator_system_of(&us, tol()).unwrap();
            if is_algebra(&os) {
                assert!(os.dimension() <= smaller.d, "n={n} drop {drop}");
            }
        }
    }
}

#[test]
fn custom_qudit_sets_round_trip_through_generated_algebras() {
    // the clock and shift generate all of M_d
    for d in 2..=6 {
        let ops = Unitaries::Qudit(vec![QuditPauli::shift(d, 1).unwrap(), QuditPauli::clock(d, 1).unwrap()]);
        let alg = generated_algebra(&ops.dense(DEFAULT_DENSE_CAP).unwrap(), tol()).unwrap();
        assert_eq!(alg.dimension(), d * d);
        assert_eq!(decompose(&alg, 0).unwrap().blocks, vec![Block::new(1, d)]);
    }
}
