use std::fs;

use locc_core::constructions::{
    example2_set, halfshift_variant, theorem2_family, theorem4_family, StateSet, Unitaries,
};
use locc_core::PauliWord;

use crate::args::{Family, FamilyParams, InputArgs};
use crate::Failure;

pub fn build_family(family: Family, p: &FamilyParams) -> Result<StateSet, Failure> {
    let unused = |names: &[(&str, Option<usize>)]| -> Result<(), Failure> {
        match names.iter().find(|(_, v)| v.is_some()) {
            Some((name, _)) => Err(Failure::input(format!("--{name} does not apply to {family:?}"))),
            None => Ok(()),
        }
    };
    let need = |name: &str, v: Option<usize>| v.ok_or_else(|| Failure::input(format!("{family:?} needs --{name}")));
    let set = match family {
        Family::Example2 => {
            unused(&[("n", p.n), ("d", p.d), ("k", p.k), ("l", p.l)])?;
            Ok(example2_set())
        }
        Family::Theorem2 => {
            unused(&[("d", p.d), ("l", p.l)])?;
            theorem2_family(need("n", p.n)?, p.k)
        }
        Family::Theorem4 => {
            unused(&[("n", p.n)])?;
            theorem4_family(need("d", p.d)?, p.k, p.l)
        }
        Family::Halfshift => {
            unused(&[("n", p.n)])?;
            halfshift_variant(need("d", p.d)?, p.k, p.l)
        }
    };
    set.map_err(Failure::from)
}

fn is_qubit_token(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| matches!(c, 'I' | 'X' | 'Y' | 'Z' | '+' | '-' | 'i'))
}

/// Comma-separated words. `I` stretches to `--n` qubits, and bare qudit
/// tokens such as `x1z0` pick up `@d<d>` from `--d`.
fn parse_states(text: &str, p: &FamilyParams) -> Result<StateSet, Failure> {
    let tokens: Vec<String> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            if is_qubit_token(t) {
                match p.n {
                    Some(n) if t == "I" && n > 1 => "I".repeat(n),
                    _ => t.to_string(),
                }
            } else if !t.contains('@') {
                match p.d {
                    Some(d) => format!("{t}@d{d}"),
                    None => t.to_string(),
                }
            } else {
                t.to_string()
            }
        })
        .collect();
    if tokens.is_empty() {
        return Err(Failure::input("--states is empty"));
    }
    let unitaries = Unitaries::parse_list(&tokens)?;
    let set = StateSet::custom(unitaries)?;
    if let Some(d) = p.d {
        if d != set.d {
            return Err(Failure::input(format!("--d {d} but the states act on C^{}", set.d)));
        }
    }
    if let Some(n) = p.n {
        if set.qubit_words().and_then(|w| w.first()).map(PauliWord::n) != Some(n) {
            return Err(Failure::input(format!("--n {n} does not match the given words")));
        }
    }
    Ok(set)
}

pub fn resolve(input: &InputArgs) -> Result<StateSet, Failure> {
    if let Some(path) = &input.input {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        // a saved verdict carries its set under "set"
        let set_value = value.get("set").cloned().unwrap_or(value);
        return serde_json::from_value(set_value).map_err(|e| Failure::input(format!("{}: {e}", path.display())));
    }
    if let Some(family) = input.construct {
        return build_family(family, &input.params);
    }
    if let Some(states) = &input.states {
        return parse_states(states, &input.params);
    }
    Err(Failure::input("give one of --input, --construct or --states"))
}
