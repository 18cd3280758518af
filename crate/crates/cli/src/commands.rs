use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use locc_core::constructions::StateSet;
use locc_core::discrimination::{
    analyze_with, difference_generators, operator_system_classes, recheck_with, AnalyzeOptions, Certificate,
    Diagnostics, Outcome, Route, DEFAULT_DENSE_LIMIT,
};
use locc_core::protocol::{
    outcome_table, sample_table, supports_disjoint, y_basis_measurement, z_basis_measurement, LocalMeasurement,
};
use locc_core::span::{generated_algebra, operator_system_of, SpanSummary};
use locc_core::wedderburn::{decompose, has_separating_vector, pauli_subgroup_signature, BlockSignature};
use locc_core::{Error, Tolerances};
use serde::Serialize;

use crate::args::{Common, Format};
use crate::Failure;

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Serialize>(body: &T) -> String {
    serde_json::to_string_pretty(&Envelope { schema: SCHEMA, body }).expect("report serializes")
}

fn options(common: &Common) -> AnalyzeOptions {
    let mut opts = AnalyzeOptions::with_seed(common.seed);
    if let Some(t) = common.tol {
        opts.tol = Tolerances {
            membership: t,
            ..Tolerances::default()
        };
    }
    opts
}

fn no_csv(common: &Common) -> Result<(), Failure> {
    if common.format == Format::Csv {
        return Err(Failure::input("csv output is only available for simulate"));
    }
    Ok(())
}

pub fn construct(set: &StateSet, common: &Common) -> Result<(String, ExitCode), Failure> {
    no_csv(common)?;
    let out = match common.format {
        Format::Table => {
            let mut s = format!("{}  d={}  size={}\n", set.label(), set.d, set.len());
            for (i, l) in set.labels().iter().enumerate() {
                s.push_str(&format!("{i:>4}  {l}\n"));
            }
            s
        }
        _ => to_json(set),
    };
    Ok((out, ExitCode::SUCCESS))
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    set: &'a StateSet,
    seed: u64,
    outcome: Outcome,
    certificate: &'a Option<Certificate>,
    diagnostics: &'a Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    recheck: Option<bool>,
}

fn certificate_name(c: &Option<Certificate>) -> &'static str {
    match c {
        Some(Certificate::SeparatingWitness { .. }) => "SeparatingWitness",
        Some(Certificate::DimensionExceeded { .. }) => "DimensionExceeded",
        Some(Certificate::BlockViolation { .. }) => "BlockViolation",
        Some(Certificate::EmbeddedM2(_)) => "EmbeddedM2",
        None => "none",
    }
}

pub fn analyze(set: &StateSet, common: &Common) -> Result<(String, ExitCode), Failure> {
    no_csv(common)?;
    let opts = options(common);
    let v = analyze_with(set, &opts);
    let recheck = match (&v.certificate, common.verbose) {
        (Some(c), true) => Some(recheck_with(c, set, &opts)),
        _ => None,
    };
    let code = match v.outcome {
        Outcome::Distinguishable => ExitCode::SUCCESS,
        Outcome::Indistinguishable => ExitCode::from(3),
        Outcome::Inconclusive => ExitCode::from(4),
    };
    let out = match common.format {
        Format::Table => {
            let d = &v.diagnostics;
            let mut s = String::new();
            s.push_str(&format!("set          {}\n", set.label()));
            s.push_str(&format!("outcome      {:?}\n", v.outcome));
            s.push_str(&format!("certificate  {}\n", certificate_name(&v.certificate)));
            s.push_str(&format!("route        {:?}\n", d.route));
            if let Some(dim) = d.operator_system_dim {
                s.push_str(&format!("dim S        {dim} (d = {})\n", set.d));
            }
            if let Some(a) = d.is_algebra {
                s.push_str(&format!("algebra      {a}\n"));
            }
            if let Some(sig) = &d.block_signature {
                s.push_str(&format!("blocks       {}\n", blocks_text(sig)));
            }
            if let Some(note) = &d.note {
                s.push_str(&format!("note         {note}\n"));
            }
            s
        }
        _ => to_json(&AnalyzeReport {
            set,
            seed: common.seed,
            outcome: v.outcome,
            certificate: &v.certificate,
            diagnostics: &v.diagnostics,
            recheck,
        }),
    };
    Ok((out, code))
}

fn blocks_text(sig: &BlockSignature) -> String {
    let mut groups: Vec<((usize, usize), usize)> = Vec::new();
    for b in &sig.blocks {
        match groups.last_mut() {
            Some((key, count)) if *key == (b.m, b.n) => *count += 1,
            _ => groups.push(((b.m, b.n), 1)),
        }
    }
    groups
        .iter()
        .map(|((m, n), c)| if *c == 1 { format!("({m},{n})") } else { format!("({m},{n})x{c}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Serialize)]
struct DecomposeReport {
    set: String,
    route: Route,
    operator_system_dim: usize,
    closure_applied: bool,
    algebra_dim: usize,
    signature: BlockSignature,
    separating: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    algebra: Option<SpanSummary>,
}

pub fn decompose_cmd(set: &StateSet, common: &Common) -> Result<(String, ExitCode), Failure> {
    no_csv(common)?;
    let opts = options(common);
    let report = match set.qubit_words() {
        Some(words) if set.d > DEFAULT_DENSE_LIMIT => {
            let signature = pauli_subgroup_signature(&difference_generators(words)?)?;
            let os_dim = operator_system_classes(words).len();
            DecomposeReport {
                set: set.label(),
                route: Route::Exact,
                operator_system_dim: os_dim,
                closure_applied: os_dim != signature.algebra_dim(),
                algebra_dim: signature.algebra_dim(),
                separating: has_separating_vector(&signature),
                signature,
                algebra: None,
            }
        }
        _ => {
            let us = set.dense_unitaries(locc_core::dense::DEFAULT_DENSE_CAP)?;
            let os = operator_system_of(&us, opts.tol)?;
            let alg = generated_algebra(&us_products(&us), opts.tol)?;
            let signature = decompose(&alg, opts.seed).map_err(Failure::numerical)?;
            DecomposeReport {
                set: set.label(),
                route: Route::Dense,
                operator_system_dim: os.dimension(),
                closure_applied: alg.dimension() != os.dimension(),
                algebra_dim: alg.dimension(),
                separating: has_separating_vector(&signature),
                signature,
                algebra: common.verbose.then(|| alg.summary(false)),
            }
        }
    };
    let out = match common.format {
        Format::Table => format!(
            "set          {}\ndim S        {}\nalgebra dim  {}{}\nblocks       {}\nseparating   {}\n",
            report.set,
            report.operator_system_dim,
            report.algebra_dim,
            if report.closure_applied { " (after closure)" } else { "" },
            blocks_text(&report.signature),
            report.separating
        ),
        _ => to_json(&report),
    };
    Ok((out, ExitCode::SUCCESS))
}

/// `U_i†U_j` for all ordered pairs, whose span is the operator system.
fn us_products(us: &[locc_core::DenseOperator]) -> Vec<locc_core::DenseOperator> {
    let mut out = Vec::with_capacity(us.len() * us.len());
    for a in us {
        let a_adj = a.adjoint();
        for b in us {
            out.push(a_adj.matmul(b));
        }
    }
    out
}

fn measurement(name: &str, set: &StateSet) -> Result<LocalMeasurement, Failure> {
    match name {
        "y-basis" => {
            if !set.d.is_power_of_two() || set.d < 2 {
                return Err(Failure::input(format!("y-basis needs qubits, but d = {}", set.d)));
            }
            Ok(y_basis_measurement(set.d.trailing_zeros() as usize)?)
        }
        "z-basis" => Ok(z_basis_measurement(set.d)?),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("measurement {path:?} is neither y-basis, z-basis nor a readable file: {e}")))?;
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{path}: {e}")))
        }
    }
}

fn resolve_drop(set: &StateSet, drop: &str) -> Result<StateSet, Failure> {
    let index = match drop.parse::<usize>() {
        Ok(i) => i,
        Err(_) => set
            .position_of(drop)
            .ok_or_else(|| Failure::input(format!("{drop:?} is not a member of the set")))?,
    };
    Ok(set.without(index)?)
}

#[derive(Serialize)]
struct SupportEntry {
    outcome: String,
    alice: usize,
    bob: usize,
    probability: f64,
}

#[derive(Serialize)]
struct StateRow {
    label: String,
    support: Vec<SupportEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probabilities: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<BTreeMap<String, u64>>,
}

#[derive(Serialize)]
struct SimulateReport {
    set: String,
    measurement: String,
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    dropped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    states: Vec<StateRow>,
    disjoint: bool,
    colliding_pairs: Vec<(usize, usize)>,
    colliding_labels: Vec<(String, String)>,
}

pub fn simulate(
    set: &StateSet,
    measure: &str,
    drop: Option<&str>,
    shots: Option<u64>,
    common: &Common,
) -> Result<(String, ExitCode), Failure> {
    let (set, dropped) = match drop {
        Some(label) => {
            let reduced = resolve_drop(set, label)?;
            (reduced, Some(label.to_string()))
        }
        None => (set.clone(), None),
    };
    let meas = measurement(measure, &set)?;
    let table = outcome_table(&set, &meas).map_err(|e| match e {
        Error::DimensionMismatch(a, b) => Failure::input(format!("states act on C^{a} but the measurement on C^{b}")),
        other => other.into(),
    })?;
    let report = supports_disjoint(&table);
    let counts = shots.map(|s| sample_table(&table, s, common.seed)).transpose()?;

    if common.format == Format::Csv {
        return Ok((table.to_csv(), ExitCode::SUCCESS));
    }
    let states: Vec<StateRow> = table
        .rows
        .iter()
        .enumerate()
        .map(|(s, row)| StateRow {
            label: table.state_labels[s].clone(),
            support: table.support[s]
                .iter()
                .map(|&o| SupportEntry {
                    outcome: table.outcome_names[o].clone(),
                    alice: o / table.d,
                    bob: o % table.d,
                    probability: row[o],
                })
                .collect(),
            probabilities: common.verbose.then(|| row.clone()),
            counts: counts.as_ref().map(|c| {
                c[s].iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(o, &k)| (table.outcome_names[o].clone(), k))
                    .collect()
            }),
        })
        .collect();
    let out = SimulateReport {
        set: set.label(),
        measurement: meas.label.clone(),
        d: set.d,
        dropped,
        shots,
        states,
        disjoint: report.disjoint,
        colliding_pairs: report.colliding_pairs,
        colliding_labels: report.colliding_labels,
    };
    let text = match common.format {
        Format::Table => {
            let mut s = format!("{}  measured in {}\n", out.set, out.measurement);
            for row in &out.states {
                let cells: Vec<String> = row
                    .support
                    .iter()
                    .map(|e| format!("({}) {:.6}", e.outcome, e.probability))
                    .collect();
                s.push_str(&format!("{:<12} {}\n", row.label, cells.join("  ")));
            }
            s.push_str(&format!("disjoint     {}\n", out.disjoint));
            for (a, b) in &out.colliding_labels {
                s.push_str(&format!("collision    {a} ~ {b}\n"));
            }
            s
        }
        _ => to_json(&out),
    };
    Ok((text, ExitCode::SUCCESS))
}

#[derive(Serialize)]
struct VerifyReport {
    certificate: &'static str,
    valid: bool,
}

pub fn verify(path: &std::path::Path, common: &Common) -> Result<(String, ExitCode), Failure> {
    no_csv(common)?;
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let set: StateSet = value
        .get("set")
        .cloned()
        .ok_or_else(|| Failure::input("verdict has no \"set\" field"))
        .and_then(|v| serde_json::from_value(v).map_err(|e| Failure::input(format!("set: {e}"))))?;
    let cert: Option<Certificate> = value
        .get("certificate")
        .cloned()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| Failure::input(format!("certificate: {e}")))?
        .flatten();
    let cert = cert.ok_or_else(|| Failure::input("verdict carries no certificate"))?;
    let valid = recheck_with(&cert, &set, &options(common));
    let report = VerifyReport {
        certificate: certificate_name(&Some(cert)),
        valid,
    };
    let out = match common.format {
        Format::Table => format!("{}  {}\n", report.certificate, if valid { "valid" } else { "INVALID" }),
        _ => to_json(&report),
    };
    Ok((out, if valid { ExitCode::SUCCESS } else { ExitCode::from(1) }))
}
