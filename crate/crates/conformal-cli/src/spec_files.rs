//! On-disk input formats and the error → exit-code classification.
//!
//! Three JSON file kinds are accepted (schemas under `schemas/` at the
//! repository root):
//!
//! * algebra files — named generators plus a sparse bracket table whose
//!   entries are polynomial expressions in `d` (the derivation) and `l`
//!   (the bracket parameter);
//! * novikov files — a finite-dimensional product table with rational
//!   entries;
//! * module files — rank-one module data, either a list of action
//!   polynomials (free case) or a single evaluation scalar (torsion
//!   case);
//! * ext query files — a self-extension problem described by its type
//!   number and parameters.
//!
//! Builtins are addressed as `builtin:R`, `builtin:vir`, and
//! `builtin:N`; module strings `V(a,D)` / `M(a,D)` / `C(g)` name the
//! standard rank-one modules inline.

use crate::expr::{parse_poly_expr, parse_rational};
use conformal_core::field::{rat_int, render_rat, FieldElem, Rat};
use conformal_core::lca::{ConformalAlgebra, LcaError, NovikovAlgebra};
use conformal_core::modules::{ModuleError, Rank1Module};
use conformal_core::MultiPoly;
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Failures surfaced by the command-line front end, tagged by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input: unreadable file, schema violation, expression
    /// syntax error, bad flag combination.  Exit code 2.
    #[error("{0}")]
    Schema(String),
    /// The input parsed but a verification step failed: algebra axioms,
    /// module compatibility, non-solvable series.  Exit code 1.
    #[error("{0}")]
    Verification(String),
    /// The query is well-formed but outside the engine's scope.  Exit
    /// code 3.
    #[error("{0}")]
    Unsupported(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }
}

pub(crate) fn classify_module_error(e: ModuleError) -> CliError {
    match e {
        ModuleError::UnsupportedAlgebra(_) => CliError::Unsupported(e.to_string()),
        ModuleError::UnexpectedStructure(_) => CliError::Verification(e.to_string()),
        _ => CliError::Schema(e.to_string()),
    }
}

fn classify_algebra_error(e: LcaError) -> CliError {
    CliError::Schema(e.to_string())
}

// ---------------------------------------------------------------------------
// Algebra files
// ---------------------------------------------------------------------------

/// JSON shape of an algebra file.  Bracket keys are `"Gi,Gj"` pairs of
/// generator names; inner keys name the output generator; missing
/// entries are zero.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpecFile {
    pub name: String,
    pub generators: Vec<String>,
    #[serde(default)]
    pub brackets: BTreeMap<String, BTreeMap<String, String>>,
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read `{path}`: {e}")))
}

fn from_json<T: serde::de::DeserializeOwned>(path: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Schema(format!("`{path}`: {e}")))
}

/// Resolves an `--algebra` argument: `builtin:R`, `builtin:vir`, or a
/// path to an algebra file.  File-based algebras are axiom-checked when
/// `verify` is set; a failed check carries the witness report.
pub fn load_algebra(spec: &str, verify: bool) -> Result<ConformalAlgebra, CliError> {
    let alg = match spec {
        "builtin:R" => ConformalAlgebra::builtin_r(),
        "builtin:vir" => ConformalAlgebra::builtin_virasoro(),
        other if other.starts_with("builtin:") => {
            return Err(CliError::Schema(format!(
                "unknown builtin algebra `{other}` (expected builtin:R or builtin:vir)"
            )));
        }
        path => {
            let file: AlgebraSpecFile = from_json(path, &read_file(path)?)?;
            algebra_from_file(path, file)?
        }
    };
    if verify {
        let report = alg.check_axioms();
        if !report.is_ok() {
            return Err(CliError::Verification(format!(
                "algebra `{}` fails its axioms:\n{report}",
                alg.name
            )));
        }
    }
    Ok(alg)
}

fn algebra_from_file(path: &str, file: AlgebraSpecFile) -> Result<ConformalAlgebra, CliError> {
    let n = file.generators.len();
    let index = |name: &str| -> Result<usize, CliError> {
        file.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| CliError::Schema(format!("`{path}`: unknown generator `{name}`")))
    };
    let mut table = vec![vec![vec![MultiPoly::zero(); n]; n]; n];
    for (pair, outputs) in &file.brackets {
        let mut parts = pair.split(',');
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(CliError::Schema(format!(
                    "`{path}`: bracket key `{pair}` is not of the form \"Gi,Gj\""
                )));
            }
        };
        let (i, j) = (index(a)?, index(b)?);
        for (out, text) in outputs {
            let k = index(out)?;
            let poly = parse_poly_expr(text, &[]).map_err(|e| {
                CliError::Schema(format!("`{path}`: bracket [{a},{b}] -> {out}: {e}"))
            })?;
            if let Some(bad) = poly.vars().iter().find(|v| *v != "d" && *v != "l") {
                return Err(CliError::Schema(format!(
                    "`{path}`: bracket [{a},{b}] -> {out}: variable `{bad}` is not allowed \
                     (brackets are polynomials in d and l)"
                )));
            }
            table[i][j][k] = poly;
        }
    }
    ConformalAlgebra::new(&file.name, file.generators.clone(), table)
        .map_err(classify_algebra_error)
}

// ---------------------------------------------------------------------------
// Novikov files
// ---------------------------------------------------------------------------

/// JSON shape of a finite Novikov algebra: product keys are `"a,b"`
/// basis-name pairs, inner keys name the output basis vector, entries
/// are rationals.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NovikovSpecFile {
    pub name: String,
    pub basis: Vec<String>,
    #[serde(default)]
    pub products: BTreeMap<String, BTreeMap<String, String>>,
}

/// Resolves a `--novikov` argument: `builtin:N` (the two-dimensional
/// algebra with e1*e2 = e1 and e2*e2 = e1 + e2) or a path.
pub fn load_novikov(spec: &str) -> Result<NovikovAlgebra, CliError> {
    match spec {
        "builtin:N" => Ok(NovikovAlgebra::builtin_two_dim()),
        other if other.starts_with("builtin:") => Err(CliError::Schema(format!(
            "unknown builtin Novikov algebra `{other}` (expected builtin:N)"
        ))),
        path => {
            let file: NovikovSpecFile = from_json(path, &read_file(path)?)?;
            novikov_from_file(path, file)
        }
    }
}

fn novikov_from_file(path: &str, file: NovikovSpecFile) -> Result<NovikovAlgebra, CliError> {
    let n = file.basis.len();
    let index = |name: &str| -> Result<usize, CliError> {
        file.basis
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| CliError::Schema(format!("`{path}`: unknown basis vector `{name}`")))
    };
    let mut table: Vec<Vec<Vec<Rat>>> = vec![vec![vec![rat_int(0); n]; n]; n];
    for (pair, outputs) in &file.products {
        let mut parts = pair.split(',');
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(CliError::Schema(format!(
                    "`{path}`: product key `{pair}` is not of the form \"a,b\""
                )));
            }
        };
        let (i, j) = (index(a)?, index(b)?);
        for (out, text) in outputs {
            let k = index(out)?;
            let value = parse_rational(text).map_err(|e| {
                CliError::Schema(format!("`{path}`: product {a}*{b} -> {out}: {e}"))
            })?;
            table[i][j][k] = value;
        }
    }
    NovikovAlgebra::new(&file.name, file.basis.clone(), table).map_err(classify_algebra_error)
}

// ---------------------------------------------------------------------------
// Module strings and files
// ---------------------------------------------------------------------------

/// JSON shape of a rank-one module file.  Exactly one of the two fields
/// must be present: `free_actions` lists one action polynomial (in `d`
/// and `l`) per algebra generator; `translation_scalar` gives the
/// evaluation point of a one-dimensional module.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpecFile {
    #[serde(default)]
    pub free_actions: Option<Vec<String>>,
    #[serde(default)]
    pub translation_scalar: Option<String>,
}

/// Resolves a `--sub` / `--quot` / `--module` argument.  Accepts the
/// inline strings `V(a,D)` and `M(a,D)` (free module with shift `a` and
/// weight `D`), `C(g)` (one-dimensional module at evaluation point
/// `g`), or a path to a module file.
pub fn parse_module(alg: &ConformalAlgebra, spec: &str) -> Result<Rank1Module, CliError> {
    let s = spec.trim();
    for prefix in ["V(", "M("] {
        if let Some(rest) = s.strip_prefix(prefix) {
            let inner = rest.strip_suffix(')').ok_or_else(|| {
                CliError::Schema(format!("module `{s}`: missing closing parenthesis"))
            })?;
            let args = split_two(inner).ok_or_else(|| {
                CliError::Schema(format!(
                    "module `{s}`: expected two arguments, a shift and a weight"
                ))
            })?;
            let shift = scalar_arg(s, "shift", args.0)?;
            let weight = scalar_arg(s, "weight", args.1)?;
            return Rank1Module::standard(
                alg,
                &MultiPoly::from_rat(shift),
                &MultiPoly::from_rat(weight),
            )
            .map_err(classify_module_error);
        }
    }
    if let Some(rest) = s.strip_prefix("C(") {
        let inner = rest.strip_suffix(')').ok_or_else(|| {
            CliError::Schema(format!("module `{s}`: missing closing parenthesis"))
        })?;
        let gamma = scalar_arg(s, "evaluation point", inner)?;
        return Ok(Rank1Module::Torsion { gamma: FieldElem::from_rat(gamma) });
    }
    module_from_file(alg, s)
}

fn scalar_arg(context: &str, what: &str, text: &str) -> Result<Rat, CliError> {
    parse_rational(text.trim())
        .map_err(|e| CliError::Schema(format!("module `{context}`: {what}: {e}")))
}

/// Splits on the single comma that sits at parenthesis depth zero.
fn split_two(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => {
                let (a, b) = s.split_at(i);
                let b = &b[1..];
                if b.contains(',') {
                    return None;
                }
                return Some((a, b));
            }
            _ => {}
        }
    }
    None
}

fn module_from_file(alg: &ConformalAlgebra, path: &str) -> Result<Rank1Module, CliError> {
    let file: ModuleSpecFile = from_json(path, &read_file(path)?)?;
    match (file.free_actions, file.translation_scalar) {
        (Some(actions), None) => {
            let mut parsed = Vec::with_capacity(actions.len());
            for (i, text) in actions.iter().enumerate() {
                let poly = parse_poly_expr(text, &[]).map_err(|e| {
                    CliError::Schema(format!("`{path}`: action {i}: {e}"))
                })?;
                if let Some(bad) = poly.vars().iter().find(|v| *v != "d" && *v != "l") {
                    return Err(CliError::Schema(format!(
                        "`{path}`: action {i}: variable `{bad}` is not allowed \
                         (actions are polynomials in d and l)"
                    )));
                }
                parsed.push(poly);
            }
            if parsed.len() != alg.rank() {
                return Err(CliError::Schema(format!(
                    "`{path}`: {} actions given but the algebra has {} generators",
                    parsed.len(),
                    alg.rank()
                )));
            }
            Ok(Rank1Module::Free { actions: parsed })
        }
        (None, Some(text)) => {
            let gamma = parse_rational(&text).map_err(|e| {
                CliError::Schema(format!("`{path}`: translation_scalar: {e}"))
            })?;
            Ok(Rank1Module::Torsion { gamma: FieldElem::from_rat(gamma) })
        }
        _ => Err(CliError::Schema(format!(
            "`{path}`: exactly one of `free_actions` and `translation_scalar` must be present"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Ext query files
// ---------------------------------------------------------------------------

/// JSON shape of an extension query.  `type` selects the module pair:
/// 1 = one-dimensional sub below a free quotient (params `gamma`,
/// `alpha`, `delta`); 2 = free sub below a one-dimensional quotient
/// (same params); 3 = free sub and quotient (params `alpha_sub`,
/// `delta_sub`, `alpha_quot`, `delta_quot`).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtQueryFile {
    #[serde(default)]
    pub algebra: Option<String>,
    pub r#type: u8,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub max_degree: Option<u32>,
}

/// A fully-resolved extension query: module strings ready for
/// [`parse_module`] plus optional overrides.
#[derive(Debug)]
pub struct ExtQuery {
    pub algebra: Option<String>,
    pub sub: String,
    pub quot: String,
    pub max_degree: Option<u32>,
}

pub fn load_ext_query(path: &str) -> Result<ExtQuery, CliError> {
    let file: ExtQueryFile = from_json(path, &read_file(path)?)?;
    let expected: &[&str] = match file.r#type {
        1 | 2 => &["gamma", "alpha", "delta"],
        3 => &["alpha_sub", "delta_sub", "alpha_quot", "delta_quot"],
        t => {
            return Err(CliError::Schema(format!(
                "`{path}`: type must be 1, 2, or 3 (got {t})"
            )));
        }
    };
    for key in file.params.keys() {
        if !expected.contains(&key.as_str()) {
            return Err(CliError::Schema(format!(
                "`{path}`: unexpected parameter `{key}` for a type {} query",
                file.r#type
            )));
        }
    }
    let get = |key: &str| -> Result<String, CliError> {
        let text = file.params.get(key).ok_or_else(|| {
            CliError::Schema(format!(
                "`{path}`: missing parameter `{key}` for a type {} query",
                file.r#type
            ))
        })?;
        let value = parse_rational(text)
            .map_err(|e| CliError::Schema(format!("`{path}`: parameter `{key}`: {e}")))?;
        Ok(render_rat(&value))
    };
    let (sub, quot) = match file.r#type {
        1 => (format!("C({})", get("gamma")?), format!("V({},{})", get("alpha")?, get("delta")?)),
        2 => (format!("V({},{})", get("alpha")?, get("delta")?), format!("C({})", get("gamma")?)),
        _ => (
            format!("V({},{})", get("alpha_sub")?, get("delta_sub")?),
            format!("V({},{})", get("alpha_quot")?, get("delta_quot")?),
        ),
    };
    Ok(ExtQuery { algebra: file.algebra, sub, quot, max_degree: file.max_degree })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_resolve() {
        assert_eq!(load_algebra("builtin:R", true).unwrap().rank(), 2);
        assert_eq!(load_algebra("builtin:vir", true).unwrap().rank(), 1);
        assert!(matches!(load_algebra("builtin:Q", true), Err(CliError::Schema(_))));
        assert_eq!(load_novikov("builtin:N").unwrap().dim(), 2);
    }

    #[test]
    fn module_strings_resolve() {
        let alg = ConformalAlgebra::builtin_r();
        let free = parse_module(&alg, "V(0,-1)").unwrap();
        assert!(matches!(free, Rank1Module::Free { .. }));
        let same = parse_module(&alg, "M(0,-1)").unwrap();
        assert_eq!(format!("{free:?}"), format!("{same:?}"));
        let torsion = parse_module(&alg, "C(-3/2)").unwrap();
        assert!(matches!(torsion, Rank1Module::Torsion { .. }));
        assert!(parse_module(&alg, "V(0)").is_err());
        assert!(parse_module(&alg, "V(0,1,2)").is_err());
        assert!(parse_module(&alg, "C(d)").is_err());
    }

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(CliError::Verification(String::new()).exit_code(), 1);
        assert_eq!(CliError::Schema(String::new()).exit_code(), 2);
        assert_eq!(CliError::Unsupported(String::new()).exit_code(), 3);
    }
}
