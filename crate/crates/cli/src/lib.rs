//! Command dispatch for the `coboundary` binary.
//!
//! Every command prints one JSON document on stdout and diagnostics on
//! stderr. Exit code 0 means the command ran (a `not_coboundary` verdict is
//! a success), 1 means the input was rejected, and 2 means an internal
//! invariant failed or the pipeline and oracle disagreed.

pub mod fuzz;
pub mod scenario;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use coboundary::{
    brute_force_oracle, coboundary_from_potential, moore_schmidt_decide, CocycleError, Decision,
    FinAbGroup, DEFAULT_ORACLE_BOUND,
};
use serde_json::{json, Map, Value};

use crate::fuzz::{default_moduli, run_fuzz, FuzzConfig, GroupKind};
use crate::scenario::{load_scenario, Scenario};

/// Largest group accepted by `dual`; its pairing table has `|K|²` entries.
pub const MAX_DUAL_ORDER: usize = 1024;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coboundary", version, about = "Decide whether a finite cocycle is a coboundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file.
    Validate { file: PathBuf },
    /// Decide with the character-wise pipeline.
    Decide {
        file: PathBuf,
        /// Include the potential F for coboundaries.
        #[arg(long)]
        witness: bool,
    },
    /// Decide by exhaustive search over all potentials.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        witness: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_BOUND)]
        max_oracle: u64,
    },
    /// Print the dual group and the full pairing table.
    Dual {
        #[arg(long, value_delimiter = ',', required = true)]
        moduli: Vec<u32>,
    },
    /// Decide, rebuild the cocycle from the witness and compare.
    Roundtrip { file: PathBuf },
    /// Compare the pipeline with the oracle on random scenarios.
    Fuzz {
        /// Largest number of atoms per scenario.
        #[arg(long, default_value_t = 5)]
        atoms: usize,
        /// Acting group; all of them in turn when omitted.
        #[arg(long, value_enum)]
        group: Option<GroupKind>,
        /// Coefficient group; a fixed mix of small groups when omitted.
        #[arg(long, value_delimiter = ',')]
        moduli: Option<Vec<u32>>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ORACLE_BOUND)]
        max_oracle: u64,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn json(code: i32, doc: &Value, stderr: String) -> Self {
        let mut stdout = serde_json::to_string_pretty(doc).expect("JSON values serialize");
        stdout.push('\n');
        Outcome { code, stdout, stderr }
    }

    fn invalid(message: String) -> Self {
        Outcome::json(
            EXIT_INVALID,
            &json!({"error": {"kind": "usage", "message": message}}),
            format!("error: {message}\n"),
        )
    }
}

/// Runs one command line, `args[0]` being the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome::json(
                    EXIT_INVALID,
                    &json!({"error": {"kind": "usage", "message": text.trim_end()}}),
                    text,
                ),
            };
        }
    };
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Decide { file, witness } => with_scenario(&file, |s| decide(s, witness)),
        Command::Oracle {
            file,
            witness,
            max_oracle,
        } => with_scenario(&file, |s| oracle(s, witness, max_oracle)),
        Command::Dual { moduli } => dual(moduli),
        Command::Roundtrip { file } => with_scenario(&file, roundtrip),
        Command::Fuzz {
            atoms,
            group,
            moduli,
            trials,
            seed,
            max_oracle,
        } => fuzz(atoms, group, moduli, trials, seed, max_oracle),
    }
}

fn with_scenario(path: &Path, f: impl FnOnce(&Scenario) -> Outcome) -> Outcome {
    match load_scenario(path) {
        Ok(s) => f(&s),
        Err(e) => Outcome::json(
            EXIT_INVALID,
            &json!({"error": e.to_json()}),
            format!("error: {e}\n"),
        ),
    }
}

fn validate(path: &Path) -> Outcome {
    match load_scenario(path) {
        Ok(s) => {
            let note = if s.is_all_null() {
                "warning: every atom is null; the measure algebra is trivial\n".to_string()
            } else {
                String::new()
            };
            Outcome::json(EXIT_OK, &json!({"ok": true}), note)
        }
        Err(e) => Outcome::json(
            EXIT_INVALID,
            &json!({"ok": false, "error": e.to_json()}),
            format!("error: {e}\n"),
        ),
    }
}

fn elem_json(coords: &[u32]) -> Value {
    json!(coords)
}

/// `{"verdict": ...}` plus the witness or certificate, as printed by
/// `decide` and `oracle`.
pub fn decision_json(s: &Scenario, d: &Decision, witness: bool) -> Value {
    let base = s.action().base();
    let mut out = Map::new();
    match d {
        Decision::Coboundary(w) => {
            out.insert("verdict".into(), "coboundary".into());
            if witness {
                let f: Map<String, Value> = (0..base.len())
                    .map(|x| (base.id(x).to_string(), elem_json(w.potential.get(x).coords())))
                    .collect();
                out.insert("F".into(), Value::Object(f));
            }
        }
        Decision::NotCoboundary(cert) => {
            out.insert("verdict".into(), "not_coboundary".into());
            let cert = cert.as_ref().map_or(Value::Null, |c| {
                json!({
                    "character": c.character.coords(),
                    "gamma": s.group().name(c.gamma),
                    "atom": base.id(c.atom),
                    "value": c.value.to_string(),
                })
            });
            out.insert("certificate".into(), cert);
        }
    }
    if s.is_all_null() {
        out.insert("all_null".into(), true.into());
    }
    Value::Object(out)
}

fn internal(e: &CocycleError) -> Outcome {
    Outcome::json(
        EXIT_INTERNAL,
        &json!({"error": {"kind": "internal", "message": e.to_string()}}),
        format!("internal error: {e}\n"),
    )
}

fn cocycle_error(e: &CocycleError) -> Outcome {
    match e {
        CocycleError::InternalInconsistency(_) => internal(e),
        _ => Outcome::json(
            EXIT_INVALID,
            &json!({"error": {"kind": "input", "message": e.to_string()}}),
            format!("error: {e}\n"),
        ),
    }
}

fn decide(s: &Scenario, witness: bool) -> Outcome {
    match moore_schmidt_decide(s.cocycle()) {
        Ok(d) => Outcome::json(EXIT_OK, &decision_json(s, &d, witness), String::new()),
        Err(e) => cocycle_error(&e),
    }
}

fn oracle(s: &Scenario, witness: bool, bound: u64) -> Outcome {
    match brute_force_oracle(s.cocycle(), bound) {
        Ok(run) => Outcome::json(
            EXIT_OK,
            &decision_json(s, &run.decision, witness),
            format!("examined {} candidate potentials\n", run.candidates),
        ),
        Err(e) => cocycle_error(&e),
    }
}

fn roundtrip(s: &Scenario) -> Outcome {
    let d = match moore_schmidt_decide(s.cocycle()) {
        Ok(d) => d,
        Err(e) => return cocycle_error(&e),
    };
    let Decision::Coboundary(w) = &d else {
        let mut doc = decision_json(s, &d, false);
        doc["roundtrip"] = "not_applicable".into();
        return Outcome::json(EXIT_OK, &doc, String::new());
    };
    let c = s.cocycle();
    let rebuilt = match coboundary_from_potential(c.action(), c.group(), &w.potential) {
        Ok(r) => r,
        Err(e) => return internal(&CocycleError::InternalInconsistency(e.to_string())),
    };
    let mut doc = decision_json(s, &d, false);
    if rebuilt.rho() == c.rho() {
        doc["roundtrip"] = "ok".into();
        Outcome::json(EXIT_OK, &doc, String::new())
    } else {
        let g = (0..c.rho().len())
            .find(|&g| rebuilt.component(g) != c.component(g))
            .expect("some component differs");
        doc["roundtrip"] = "mismatch".into();
        Outcome::json(
            EXIT_INTERNAL,
            &doc,
            format!("internal error: witness does not reproduce ρ at {}\n", s.group().name(g)),
        )
    }
}

fn dual(moduli: Vec<u32>) -> Outcome {
    let k = match FinAbGroup::new(moduli) {
        Ok(k) => k,
        Err(e) => return Outcome::invalid(e.to_string()),
    };
    let order = k.moduli().iter().try_fold(1usize, |acc, &m| acc.checked_mul(m as usize));
    if !order.is_some_and(|o| o <= MAX_DUAL_ORDER) {
        return Outcome::invalid(format!("group order exceeds {MAX_DUAL_ORDER}"));
    }
    let d = k.dual();
    let elements: Vec<_> = k.elements().collect();
    let characters: Vec<_> = d.elements().collect();
    let table: Vec<Vec<String>> = characters
        .iter()
        .map(|chi| {
            elements
                .iter()
                .map(|e| k.pairing(chi, e).expect("members of K and its dual").to_string())
                .collect()
        })
        .collect();
    let doc = json!({
        "group": {"moduli": k.moduli(), "order": k.order()},
        "dual": {"moduli": d.moduli(), "order": d.order()},
        "elements": elements.iter().map(|e| e.coords()).collect::<Vec<_>>(),
        "characters": characters.iter().map(|c| c.coords()).collect::<Vec<_>>(),
        "pairing": table,
    });
    Outcome::json(EXIT_OK, &doc, String::new())
}

fn fuzz(
    atoms: usize,
    group: Option<GroupKind>,
    moduli: Option<Vec<u32>>,
    trials: u64,
    seed: u64,
    max_oracle: u64,
) -> Outcome {
    if atoms == 0 {
        return Outcome::invalid("--atoms must be at least 1".into());
    }
    let moduli = match moduli {
        Some(m) => {
            if let Err(e) = FinAbGroup::new(m.clone()) {
                return Outcome::invalid(e.to_string());
            }
            vec![m]
        }
        None => default_moduli(),
    };
    let config = FuzzConfig {
        max_atoms: atoms,
        groups: group.map_or_else(|| GroupKind::ALL.to_vec(), |g| vec![g]),
        moduli,
        trials,
        seed,
        max_oracle,
    };
    let report = run_fuzz(&config);
    let mut stderr = String::new();
    for r in report.records.iter().filter(|r| r.is_failure()) {
        stderr.push_str(&format!(
            "trial {}: group {} K {:?} atoms {}: decide {:?} oracle {:?} certificate {:?} roundtrip {:?} {}\n",
            r.index,
            r.group.name(),
            r.moduli,
            r.atoms,
            r.decide,
            r.oracle,
            r.certificate_ok,
            r.roundtrip_ok,
            r.internal_error.as_deref().unwrap_or("")
        ));
    }
    if report.summary.skipped > 0 {
        stderr.push_str(&format!(
            "{} trials exceeded the oracle bound and were skipped\n",
            report.summary.skipped
        ));
    }
    let code = if report.summary.is_clean() { EXIT_OK } else { EXIT_INTERNAL };
    Outcome::json(code, &report.summary.to_json(seed), stderr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_of_z2() {
        let out = run(["coboundary", "dual", "--moduli", "2"]);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["pairing"], json!([["0/1", "0/1"], ["0/1", "1/2"]]));
        assert_eq!(v["characters"], json!([[0], [1]]));
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run(["coboundary", "dual", "--moduli", "0"]).code, 1);
        assert_eq!(run(["coboundary", "frobnicate"]).code, 1);
        assert_eq!(run(["coboundary", "fuzz", "--group", "a5"]).code, 1);
        assert_eq!(run(["coboundary", "decide", "/nonexistent.json"]).code, 1);
        assert_eq!(run(["coboundary", "--help"]).code, 0);
    }
}
