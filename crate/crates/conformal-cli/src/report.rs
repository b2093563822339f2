//! Report assembly: every command produces an [`Outcome`] holding the
//! JSON payload, the plain-text rendering, and the exit code.  JSON
//! output is wrapped in a schema-versioned envelope and rendered with
//! sorted keys, so identical queries produce byte-identical reports.

use conformal_core::annihilation::GradedReport;
use conformal_core::ext::{ExtSolution, Frame, SpecialReport};
use conformal_core::lca::{AxiomReport, ConformalAlgebra, NovikovAlgebra, NovikovIdentity, NovikovWitness};
use conformal_core::modules::{ModuleCheckReport, Rank1Classification, Rank1Module};
use conformal_core::roots::ResidualReason;
use conformal_core::MultiPoly;
use serde_json::{json, Value};
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

pub fn engine() -> String {
    format!("conformal-cli {}", env!("CARGO_PKG_VERSION"))
}

/// The result of a successfully-dispatched command (which may still
/// report a verification failure through `exit`).
pub struct Outcome {
    pub payload: Value,
    pub text: String,
    pub exit: i32,
}

/// Prints the report to stdout in the selected mode.
pub fn emit(command: &str, outcome: &Outcome, json_mode: bool) {
    if json_mode {
        let envelope = json!({
            "schema_version": SCHEMA_VERSION,
            "engine": engine(),
            "command": command,
            "payload": outcome.payload,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&envelope).expect("reports always serialize")
        );
    } else {
        println!("{}", outcome.text.trim_end());
    }
}

/// Outcome for a verification failure detected while loading inputs
/// (for example an algebra file whose axioms do not hold): the witness
/// text still lands in the report, with exit code 1.
pub fn verification_outcome(detail: &str) -> Outcome {
    Outcome {
        payload: json!({ "ok": false, "error": "verification", "detail": detail }),
        text: detail.to_string(),
        exit: 1,
    }
}

// ---------------------------------------------------------------------------
// Per-command outcomes
// ---------------------------------------------------------------------------

pub fn algebra_check_outcome(alg: &ConformalAlgebra, report: &AxiomReport) -> Outcome {
    let skew: Vec<Value> = report
        .skew_failures
        .iter()
        .map(|w| {
            json!({
                "pair": [alg.generators[w.i].clone(), alg.generators[w.j].clone()],
                "component": alg.generators[w.k].clone(),
                "residual": w.residual.to_string(),
            })
        })
        .collect();
    let jacobi: Vec<Value> = report
        .jacobi_failures
        .iter()
        .map(|w| {
            json!({
                "triple": [
                    alg.generators[w.i].clone(),
                    alg.generators[w.j].clone(),
                    alg.generators[w.k].clone(),
                ],
                "component": alg.generators[w.target].clone(),
                "residual": w.residual.to_string(),
            })
        })
        .collect();
    let payload = json!({
        "algebra": alg.name,
        "rank": alg.rank(),
        "generators": alg.generators,
        "brackets": bracket_map(alg),
        "ok": report.is_ok(),
        "skew_failures": skew,
        "jacobi_failures": jacobi,
    });
    let mut text = format!("algebra {} (rank {}): ", alg.name, alg.rank());
    if report.is_ok() {
        text.push_str("all axioms hold");
    } else {
        text.push_str("AXIOMS FAIL\n");
        let _ = write!(text, "{report}");
    }
    Outcome { payload, text, exit: if report.is_ok() { 0 } else { 1 } }
}

pub fn novikov_build_outcome(
    nov: &NovikovAlgebra,
    identity_failures: &[NovikovWitness],
    built: Option<(&ConformalAlgebra, &AxiomReport)>,
) -> Outcome {
    let failures: Vec<Value> = identity_failures
        .iter()
        .map(|w| {
            let identity = match w.identity {
                NovikovIdentity::LeftSymmetry => "left_symmetry",
                NovikovIdentity::RightCommutativity => "right_commutativity",
            };
            json!({
                "identity": identity,
                "triple": [
                    nov.basis[w.i].clone(),
                    nov.basis[w.j].clone(),
                    nov.basis[w.k].clone(),
                ],
                "residual": w.residual.iter()
                    .map(conformal_core::field::render_rat)
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let ok = identity_failures.is_empty();
    let conformal = match built {
        Some((conf, axioms)) => json!({
            "name": conf.name,
            "generators": conf.generators,
            "brackets": bracket_map(conf),
            "axioms_ok": axioms.is_ok(),
        }),
        None => Value::Null,
    };
    let payload = json!({
        "novikov": nov.name,
        "dim": nov.dim(),
        "basis": nov.basis,
        "identities_ok": ok,
        "identity_failures": failures,
        "conformal": conformal,
    });
    let mut text = format!("novikov algebra {} (dim {}): ", nov.name, nov.dim());
    if ok {
        text.push_str("identities hold\n");
        if let Some((conf, axioms)) = built {
            let _ = writeln!(
                text,
                "conformal algebra {} (rank {}), axioms {}:",
                conf.name,
                conf.rank(),
                if axioms.is_ok() { "hold" } else { "FAIL" }
            );
            text.push_str(&bracket_lines(conf));
        }
    } else {
        let _ = writeln!(text, "IDENTITIES FAIL ({} witnesses)", identity_failures.len());
        for w in identity_failures {
            let what = match w.identity {
                NovikovIdentity::LeftSymmetry => "left symmetry",
                NovikovIdentity::RightCommutativity => "right commutativity",
            };
            let _ = writeln!(
                text,
                "  {what} fails on ({}, {}, {})",
                nov.basis[w.i], nov.basis[w.j], nov.basis[w.k]
            );
        }
    }
    Outcome { payload, text, exit: if ok { 0 } else { 1 } }
}

pub fn module_check_outcome(
    alg: &ConformalAlgebra,
    module_desc: &str,
    report: &ModuleCheckReport,
) -> Outcome {
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|w| json!({ "context": w.context, "residual": w.residual.to_string() }))
        .collect();
    let payload = json!({
        "algebra": alg.name,
        "module": module_desc,
        "ok": report.is_ok(),
        "failures": failures,
    });
    let mut text = format!("module {} over {}: ", module_desc, alg.name);
    let _ = write!(text, "{report}");
    Outcome { payload, text, exit: if report.is_ok() { 0 } else { 1 } }
}

pub fn rank1_outcome(alg: &ConformalAlgebra, class: &Rank1Classification) -> Outcome {
    let families: Vec<Value> = class
        .families
        .iter()
        .map(|f| {
            json!({
                "params": f.params,
                "actions": action_map(alg, &f.actions),
            })
        })
        .collect();
    let payload = json!({
        "algebra": alg.name,
        "max_degree": class.max_degree,
        "includes_zero_module": class.includes_zero_module,
        "families": families,
    });
    let mut text = format!(
        "free rank-one modules over {} (degree bound {}):\n",
        alg.name, class.max_degree
    );
    for (idx, f) in class.families.iter().enumerate() {
        let _ = writeln!(
            text,
            "  family {} (params {}): {}",
            idx + 1,
            if f.params.is_empty() { "none".to_string() } else { f.params.join(", ") },
            action_line(alg, &f.actions),
        );
    }
    if class.includes_zero_module {
        text.push_str("  plus the everywhere-zero action\n");
    }
    Outcome { payload, text, exit: 0 }
}

pub fn ext_outcome(
    alg: &ConformalAlgebra,
    sub_desc: &str,
    quot_desc: &str,
    sol: &ExtSolution,
) -> Outcome {
    let frame = match sol.frame {
        Frame::Direct => "direct",
        Frame::Shifted => "shifted",
    };
    let reps: Vec<Value> = sol
        .representatives
        .iter()
        .map(|r| {
            json!({
                "actions": action_map(alg, &r.phi),
                "translation": r.translation_part.as_ref().map(|p| p.to_string()),
            })
        })
        .collect();
    let payload = json!({
        "algebra": alg.name,
        "sub": sub_desc,
        "quot": quot_desc,
        "max_degree": sol.max_degree,
        "frame": frame,
        "cocycle_dim": sol.cocycle_dim,
        "coboundary_rank": sol.coboundary_rank,
        "ext_dim": sol.ext_dim,
        "representatives": reps,
    });
    let mut text = format!(
        "extensions over {}: sub {}, quot {} (degree bound {}, {} frame)\n",
        alg.name, sub_desc, quot_desc, sol.max_degree, frame
    );
    let _ = writeln!(
        text,
        "cocycle dim {}, coboundary rank {}, ext dim {}",
        sol.cocycle_dim, sol.coboundary_rank, sol.ext_dim
    );
    for (idx, r) in sol.representatives.iter().enumerate() {
        let mut line = format!("  representative {}: {}", idx + 1, action_line(alg, &r.phi));
        if let Some(a) = &r.translation_part {
            let _ = write!(line, "; translation {a}");
        }
        text.push_str(&line);
        text.push('\n');
    }
    Outcome { payload, text, exit: 0 }
}

pub fn special_outcome(
    alg: &ConformalAlgebra,
    parameter: &str,
    report: &SpecialReport,
) -> Outcome {
    let special: Vec<Value> = report
        .special
        .iter()
        .map(|p| json!({ "value": p.value.to_string(), "ext_dim": p.ext_dim }))
        .collect();
    let inadmissible: Vec<String> =
        report.inadmissible.iter().map(|v| v.to_string()).collect();
    let unresolved: Vec<Value> = report
        .residual_factors
        .iter()
        .map(|f| {
            let reason = match f.reason {
                ResidualReason::NoRealRoots => "no_real_roots",
                ResidualReason::UncertifiedDiscriminant => "uncertified_discriminant",
                ResidualReason::HighDegree => "high_degree",
            };
            json!({
                "factor": f.factor.to_string(),
                "multiplicity": f.multiplicity,
                "reason": reason,
            })
        })
        .collect();
    let payload = json!({
        "algebra": alg.name,
        "parameter": parameter,
        "weight_gap": report.weight_gap,
        "max_degree": report.max_degree,
        "generic_ext_dim": report.generic_ext_dim,
        "special": special,
        "inadmissible": inadmissible,
        "unresolved_factors": unresolved,
    });
    let mut text = format!(
        "weight sweep over {} in {}: gap {}, degree bound {}\n",
        alg.name, parameter, report.weight_gap, report.max_degree
    );
    let _ = writeln!(text, "generic ext dim: {}", report.generic_ext_dim);
    if report.special.is_empty() {
        text.push_str("special weights: none\n");
    } else {
        text.push_str("special weights:\n");
        for p in &report.special {
            let _ = writeln!(text, "  {} -> ext dim {}", p.value, p.ext_dim);
        }
    }
    if !report.inadmissible.is_empty() {
        let _ = writeln!(text, "inadmissible candidates: {}", inadmissible.join(", "));
    }
    if !report.residual_factors.is_empty() {
        let _ = writeln!(text, "unresolved factors: {}", report.residual_factors.len());
    }
    Outcome { payload, text, exit: 0 }
}

pub fn ann_solvable_outcome(
    alg: &ConformalAlgebra,
    n: usize,
    dims: &[usize],
) -> Outcome {
    let solvable = dims.last() == Some(&0);
    let payload = json!({
        "algebra": alg.name,
        "N": n,
        "dim": dims.first().copied().unwrap_or(0),
        "derived_series": dims,
        "solvable": solvable,
    });
    let mut text = format!(
        "truncated mode algebra of {} at N={}: dim {}\n",
        alg.name,
        n,
        dims.first().copied().unwrap_or(0)
    );
    let series: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(text, "derived series dims: {}", series.join(" "));
    let _ = writeln!(text, "solvable: {}", if solvable { "yes" } else { "no" });
    Outcome { payload, text, exit: if solvable { 0 } else { 1 } }
}

pub fn ann_jacobi_outcome(alg: &ConformalAlgebra, report: &GradedReport) -> Outcome {
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|w| json!({ "context": w.context, "residual": w.residual.to_string() }))
        .collect();
    let payload = json!({
        "algebra": alg.name,
        "ok": report.is_ok(),
        "failures": failures,
    });
    let text = if report.is_ok() {
        format!(
            "mode-algebra identities for {}: antisymmetry, Jacobi, and the derivation rule hold \
             for all symbolic mode indices",
            alg.name
        )
    } else {
        let mut t = format!(
            "mode-algebra identities for {}: FAIL ({} witnesses)\n",
            alg.name,
            report.failures.len()
        );
        for w in &report.failures {
            let _ = writeln!(t, "  {}: residual {}", w.context, w.residual);
        }
        t
    };
    Outcome { payload, text, exit: if report.is_ok() { 0 } else { 1 } }
}

// ---------------------------------------------------------------------------
// Shared rendering helpers
// ---------------------------------------------------------------------------

/// `{"Gi,Gj": {"Gk": "<poly>"}}` for the nonzero bracket entries.
fn bracket_map(alg: &ConformalAlgebra) -> Value {
    let mut outer = serde_json::Map::new();
    for i in 0..alg.rank() {
        for j in 0..alg.rank() {
            let mut inner = serde_json::Map::new();
            for (k, p) in alg.bracket(i, j).iter().enumerate() {
                if !p.is_zero() {
                    inner.insert(alg.generators[k].clone(), Value::String(p.to_string()));
                }
            }
            if !inner.is_empty() {
                outer.insert(
                    format!("{},{}", alg.generators[i], alg.generators[j]),
                    Value::Object(inner),
                );
            }
        }
    }
    Value::Object(outer)
}

fn bracket_lines(alg: &ConformalAlgebra) -> String {
    let mut out = String::new();
    for i in 0..alg.rank() {
        for j in 0..alg.rank() {
            let terms: Vec<String> = alg
                .bracket(i, j)
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(k, p)| format!("({}) {}", p, alg.generators[k]))
                .collect();
            if !terms.is_empty() {
                let _ = writeln!(
                    out,
                    "  [{}, {}] = {}",
                    alg.generators[i],
                    alg.generators[j],
                    terms.join(" + ")
                );
            }
        }
    }
    out
}

/// `{"L": "<poly>", "I": "<poly>"}` for a per-generator polynomial list.
fn action_map(alg: &ConformalAlgebra, polys: &[MultiPoly]) -> Value {
    let mut map = serde_json::Map::new();
    for (k, p) in polys.iter().enumerate() {
        map.insert(alg.generators[k].clone(), Value::String(p.to_string()));
    }
    Value::Object(map)
}

fn action_line(alg: &ConformalAlgebra, polys: &[MultiPoly]) -> String {
    polys
        .iter()
        .enumerate()
        .map(|(k, p)| format!("{} -> {}", alg.generators[k], p))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Describes a rank-one module for echoing back in reports.
pub fn module_desc(alg: &ConformalAlgebra, module: &Rank1Module) -> String {
    match module {
        Rank1Module::Free { actions } => format!("free[{}]", action_line(alg, actions)),
        Rank1Module::Torsion { gamma } => format!("C({gamma})"),
    }
}
