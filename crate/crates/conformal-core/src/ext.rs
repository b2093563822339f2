//! Extensions of one rank-one module by another over a bracket table.
//!
//! An extension is a module `E` fitting into `0 -> S -> E -> Q -> 0` where
//! both `S` (the submodule) and `Q` (the quotient) are rank-one modules.
//! Choosing a lift `q` of the quotient generator identifies `E` with
//! `Q (+) S` as a `C[d]`-space; the module structure is then the known
//! structures on `S` and `Q` plus deformation data with values in `S`:
//!
//! * one polynomial `phi_i` per algebra generator `i` (the `S`-component
//!   of the action of generator `i` on `q`), and
//! * when `Q` is one-dimensional (so not free over `C[d]`), an extra
//!   polynomial `a(d)` deforming the translation action on `q`.
//!
//! The module axioms are linear in this data, so the set of extensions is
//! the nullspace of an exact linear system (the cocycles).  Changing the
//! lift `q` by an `S`-element produces the trivial directions (the
//! coboundaries).  The reported dimension is
//! `dim cocycles - rank coboundaries`, with canonical representatives
//! obtained by reducing a nullspace basis modulo the coboundary span and
//! re-verifying each representative against every equation.
//!
//! All unknowns are truncated to a degree bound; `ext_stabilize` runs two
//! bounds and reports whether the answer has stopped changing.  For a pair
//! of free modules whose actions share the same constant shift, the system
//! is graded and is solved block-by-block in the shifted frame where that
//! constant is absorbed into `d`; `ext_special_values` runs the graded
//! solve with a symbolic weight parameter and finds the parameter values
//! where the dimension jumps.

use crate::field::FieldElem;
use crate::lca::ConformalAlgebra;
use crate::linalg::{ff_rank, LinalgError, Rref, SparseMat, SparseRow};
use crate::modules::{check_module, ModuleError, Rank1Module};
use crate::poly::{Monomial, MultiPoly};
use crate::roots::{univ_roots, ResidualFactor, RootsError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("{which} module fails its own axioms: {report}")]
    InvalidModule { which: &'static str, report: String },
    #[error("system has symbolic coefficients; a concrete solve needs numeric module data")]
    ParametricSystem,
    #[error("solver invariant violated: {0}")]
    StructureAssertion(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Roots(#[from] RootsError),
}

/// The data of one extension problem.
#[derive(Debug, Clone)]
pub struct ExtProblem {
    pub algebra: ConformalAlgebra,
    pub sub: Rank1Module,
    pub quot: Rank1Module,
}

/// Whether representatives are expressed directly in `d` or in the
/// shifted frame where the modules' common constant shift is absorbed
/// into `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Direct,
    Shifted,
}

/// One extension representative: the `S`-valued deformation polynomial of
/// each generator's action on the lifted quotient generator, plus the
/// translation deformation when the quotient is one-dimensional.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtRep {
    pub phi: Vec<MultiPoly>,
    pub translation_part: Option<MultiPoly>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtSolution {
    pub cocycle_dim: usize,
    pub coboundary_rank: usize,
    pub ext_dim: usize,
    pub representatives: Vec<ExtRep>,
    pub frame: Frame,
    pub max_degree: u32,
}

#[derive(Debug, Clone)]
pub struct StabilizeReport {
    pub base: ExtSolution,
    pub refined: ExtSolution,
    pub stabilized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecialPoint {
    pub value: FieldElem,
    pub ext_dim: usize,
}

/// Result of a symbolic weight sweep: the generic dimension, every
/// parameter value where the dimension strictly exceeds it, values
/// excluded because one of the two modules degenerates there, and any
/// factors of the pivot locus whose roots could not be certified.
#[derive(Debug, Clone)]
pub struct SpecialReport {
    pub weight_gap: i64,
    pub max_degree: u32,
    pub generic_ext_dim: usize,
    pub special: Vec<SpecialPoint>,
    pub inadmissible: Vec<FieldElem>,
    pub residual_factors: Vec<ResidualFactor>,
}

// ---------------------------------------------------------------------------
// Internal structure
// ---------------------------------------------------------------------------

/// Validated module data in the form the equation builder consumes: action
/// polynomials for both modules (zero for one-dimensional ones) and the
/// translation scalars of one-dimensional parts.
struct Parts {
    rank: usize,
    sub_actions: Vec<MultiPoly>,
    sub_gamma: Option<FieldElem>,
    quot_actions: Vec<MultiPoly>,
    quot_gamma: Option<FieldElem>,
}

fn parts_of(alg: &ConformalAlgebra, sub: &Rank1Module, quot: &Rank1Module) -> Result<Parts, ExtError> {
    for (which, m) in [("sub", sub), ("quot", quot)] {
        let report = check_module(alg, m)?;
        if !report.is_ok() {
            return Err(ExtError::InvalidModule { which, report: report.to_string() });
        }
    }
    let zero_actions = || vec![MultiPoly::zero(); alg.rank()];
    let (sub_actions, sub_gamma) = match sub {
        Rank1Module::Free { actions } => (actions.clone(), None),
        Rank1Module::Torsion { gamma } => (zero_actions(), Some(gamma.clone())),
    };
    let (quot_actions, quot_gamma) = match quot {
        Rank1Module::Free { actions } => (actions.clone(), None),
        Rank1Module::Torsion { gamma } => (zero_actions(), Some(gamma.clone())),
    };
    Ok(Parts { rank: alg.rank(), sub_actions, sub_gamma, quot_actions, quot_gamma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Phi(usize),
    Translation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Col {
    slot: Slot,
    dpow: u32,
    lpow: u32,
}

impl Col {
    fn order_key(&self) -> (Slot, u32, u32) {
        (self.slot, self.dpow + self.lpow, self.dpow)
    }
}

impl PartialOrd for Col {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Col {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

enum ColMode {
    /// All unknown monomials of total degree up to the bound.
    Whole(u32),
    /// Only the homogeneous monomials of one total degree (graded solve).
    Block(u32),
}

fn build_cols(parts: &Parts, mode: &ColMode, phi_slots: Option<&[usize]>) -> Vec<Col> {
    let allowed = |g: usize| phi_slots.map_or(true, |s| s.contains(&g));
    let mut cols = Vec::new();
    match mode {
        ColMode::Whole(dmax) => {
            for g in 0..parts.rank {
                if !allowed(g) {
                    continue;
                }
                if parts.sub_gamma.is_some() {
                    // Image collapses d to the translation scalar, so the
                    // unknowns depend on l alone.
                    for b in 0..=*dmax {
                        cols.push(Col { slot: Slot::Phi(g), dpow: 0, lpow: b });
                    }
                } else {
                    for total in 0..=*dmax {
                        for dp in 0..=total {
                            cols.push(Col { slot: Slot::Phi(g), dpow: dp, lpow: total - dp });
                        }
                    }
                }
            }
            if parts.quot_gamma.is_some() {
                if parts.sub_gamma.is_some() {
                    cols.push(Col { slot: Slot::Translation, dpow: 0, lpow: 0 });
                } else {
                    for j in 0..=*dmax {
                        cols.push(Col { slot: Slot::Translation, dpow: j, lpow: 0 });
                    }
                }
            }
        }
        ColMode::Block(k) => {
            debug_assert!(parts.sub_gamma.is_none() && parts.quot_gamma.is_none());
            for g in 0..parts.rank {
                if !allowed(g) {
                    continue;
                }
                for dp in 0..=*k {
                    cols.push(Col { slot: Slot::Phi(g), dpow: dp, lpow: k - dp });
                }
            }
        }
    }
    cols.sort();
    cols
}

/// The exact linear system: deterministic row list over the column basis,
/// with entries that may involve symbolic module parameters.
struct LinSys {
    cols: Vec<Col>,
    rows: Vec<BTreeMap<usize, MultiPoly>>,
}

fn assemble(alg: &ConformalAlgebra, parts: &Parts, cols: &[Col]) -> LinSys {
    let rank = parts.rank;
    let d = MultiPoly::var("d");
    let l = MultiPoly::var("l");
    let m = MultiPoly::var("m");
    let d_l = &d + &l;
    let d_m = &d + &m;
    let l_m = &l + &m;
    let neg_lm = -&l_m;

    // Algebra-side polynomials appearing in the commutator identity for the
    // pair (i, j), evaluated once.
    let a_shift_lm: Vec<MultiPoly> = parts
        .quot_actions
        .iter()
        .map(|a| a.substitute("l", &m).substitute("d", &d_l))
        .collect(); // A_j(d+l, m)
    let a_shift_ml: Vec<MultiPoly> =
        parts.quot_actions.iter().map(|a| a.substitute("d", &d_m)).collect(); // A_i(d+m, l)
    let b_in_m: Vec<MultiPoly> =
        parts.sub_actions.iter().map(|b| b.substitute("l", &m)).collect(); // B_j(d, m)
    let p_sub: Vec<Vec<Vec<MultiPoly>>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    (0..rank)
                        .map(|k| alg.bracket(i, j)[k].substitute("d", &neg_lm))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut acc: BTreeMap<(usize, Monomial), BTreeMap<usize, MultiPoly>> = BTreeMap::new();
    let add = |acc: &mut BTreeMap<(usize, Monomial), BTreeMap<usize, MultiPoly>>,
                   eq: usize,
                   ci: usize,
                   poly: MultiPoly| {
        let poly = match &parts.sub_gamma {
            Some(g1) => poly.specialize("d", g1),
            None => poly,
        };
        if poly.is_zero() {
            return;
        }
        for (mono, coeff) in poly.partition_by(&["d", "l", "m"]) {
            acc.entry((eq, mono)).or_default().insert(ci, coeff);
        }
    };

    for (ci, col) in cols.iter().enumerate() {
        match col.slot {
            Slot::Phi(k) => {
                let dp = col.dpow;
                let lp = col.lpow;
                let mono_d_l = &MultiPoly::var_pow("d", dp) * &MultiPoly::var_pow("l", lp);
                let mono_d_m = &MultiPoly::var_pow("d", dp) * &MultiPoly::var_pow("m", lp);
                let mono_dl_m = &d_l.pow(dp) * &MultiPoly::var_pow("m", lp);
                let mono_dm_l = &d_m.pow(dp) * &MultiPoly::var_pow("l", lp);
                let mono_d_lm = &MultiPoly::var_pow("d", dp) * &l_m.pow(lp);
                for i in 0..rank {
                    for j in 0..rank {
                        let eq = i * rank + j;
                        let mut c = MultiPoly::zero();
                        if k == i {
                            c = &c + &(&a_shift_lm[j] * &mono_d_l);
                            c = &c - &(&mono_dm_l * &b_in_m[j]);
                        }
                        if k == j {
                            c = &c + &(&mono_dl_m * &parts.sub_actions[i]);
                            c = &c - &(&a_shift_ml[i] * &mono_d_m);
                        }
                        c = &c - &(&p_sub[i][j][k] * &mono_d_lm);
                        add(&mut acc, eq, ci, c);
                    }
                }
                if let Some(g2) = &parts.quot_gamma {
                    // Compatibility with the deformed translation action:
                    // gamma2 * phi_i - (d + l) * phi_i plus the
                    // translation column's contribution elsewhere.
                    let eq = rank * rank + k;
                    let scal = &MultiPoly::constant(g2.clone()) - &d_l;
                    add(&mut acc, eq, ci, &scal * &mono_d_l);
                }
            }
            Slot::Translation => {
                let shift = d_l.pow(col.dpow);
                for i in 0..rank {
                    let eq = rank * rank + i;
                    add(&mut acc, eq, ci, &shift * &parts.sub_actions[i]);
                }
            }
        }
    }

    LinSys { cols: cols.to_vec(), rows: acc.into_values().collect() }
}

/// Lift-change generators: multiplying the lifted quotient generator by a
/// power of `d` (a scalar when either side is one-dimensional).
fn psi_gens(parts: &Parts, dmax: u32) -> Vec<MultiPoly> {
    if parts.sub_gamma.is_some() {
        vec![MultiPoly::one()]
    } else {
        (0..dmax).map(|j| MultiPoly::var_pow("d", j)).collect()
    }
}

/// Coordinates (over `cols`) of the trivial deformation produced by the
/// lift change `q -> q + psi(d) s`.
fn coboundary_vector(
    parts: &Parts,
    cols: &[Col],
    psi: &MultiPoly,
) -> Result<Vec<MultiPoly>, ExtError> {
    let col_index: BTreeMap<(Slot, u32, u32), usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.slot, c.dpow, c.lpow), i))
        .collect();
    let d = MultiPoly::var("d");
    let l = MultiPoly::var("l");
    let psi_shift = psi.substitute("d", &(&d + &l));
    let mut coords = vec![MultiPoly::zero(); cols.len()];
    let place = |slot: Slot, poly: &MultiPoly, coords: &mut Vec<MultiPoly>| -> Result<(), ExtError> {
        for (mono, coeff) in poly.partition_by(&["d", "l"]) {
            let key = (slot, mono.0[0], mono.0[1]);
            match col_index.get(&key) {
                Some(&ci) => coords[ci] = &coords[ci] + &coeff,
                None => {
                    return Err(ExtError::StructureAssertion(format!(
                        "trivial deformation leaves the unknown space at {key:?}"
                    )))
                }
            }
        }
        Ok(())
    };
    for g in 0..parts.rank {
        let mut delta = &(&psi_shift * &parts.sub_actions[g]) - &(&parts.quot_actions[g] * psi);
        if let Some(g1) = &parts.sub_gamma {
            delta = delta.specialize("d", g1);
        }
        place(Slot::Phi(g), &delta, &mut coords)?;
    }
    if let Some(g2) = &parts.quot_gamma {
        let mut delta_a = &(&d - &MultiPoly::constant(g2.clone())) * psi;
        if let Some(g1) = &parts.sub_gamma {
            delta_a = delta_a.specialize("d", g1);
        }
        place(Slot::Translation, &delta_a, &mut coords)?;
    }
    Ok(coords)
}

struct SolveOut {
    cocycle_dim: usize,
    cob_rank: usize,
    ext_dim: usize,
    reps: Vec<Vec<FieldElem>>,
}

fn constant_entry(p: &MultiPoly) -> Result<FieldElem, ExtError> {
    p.as_constant().ok_or(ExtError::ParametricSystem)
}

fn dense_to_sparse(v: &[FieldElem]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

/// Same vector with the column order flipped.  The coboundary span is
/// reduced in this order so that subtracting it from a cocycle cancels
/// the highest-order coordinates first, leaving minimal-degree
/// representatives.
fn rev_sparse(v: &[FieldElem]) -> SparseRow {
    let n = v.len();
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (n - 1 - i, c.clone()))
        .collect()
}

fn unrev_dense(row: &SparseRow, n: usize) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::zero(); n];
    for (&j, c) in row {
        out[n - 1 - j] = c.clone();
    }
    out
}

fn row_dot(row: &SparseRow, v: &[FieldElem]) -> FieldElem {
    let mut acc = FieldElem::zero();
    for (&j, c) in row {
        acc = &acc + &(c * &v[j]);
    }
    acc
}

fn solve_concrete(sys: &LinSys, cobs: &[Vec<MultiPoly>]) -> Result<SolveOut, ExtError> {
    let n = sys.cols.len();
    let mut mat = SparseMat::new(n);
    for row in &sys.rows {
        let mut sr = SparseRow::new();
        for (&c, p) in row {
            let v = constant_entry(p)?;
            if !v.is_zero() {
                sr.insert(c, v);
            }
        }
        mat.push_row(sr);
    }
    let rref = mat.rref();
    let null = rref.nullspace();
    let cocycle_dim = null.len();

    // The coboundary span is row-reduced over the *reversed* column order,
    // so reducing a cocycle against it cancels top coordinates first.
    let mut cob_rref = Rref::empty(n);
    for cob in cobs {
        let dense: Vec<FieldElem> =
            cob.iter().map(constant_entry).collect::<Result<_, _>>()?;
        // A trivial deformation must itself satisfy every equation.
        for row in &mat.rows {
            if !row_dot(row, &dense).is_zero() {
                return Err(ExtError::StructureAssertion(
                    "trivial deformation fails the equations".into(),
                ));
            }
        }
        cob_rref.absorb(rev_sparse(&dense));
    }
    let cob_rank = cob_rref.rank();

    let mut rep_rref = Rref::empty(n);
    for v in &null {
        let reduced = unrev_dense(&cob_rref.reduce(rev_sparse(v)), n);
        rep_rref.absorb(dense_to_sparse(&reduced));
    }
    let ext_dim = rep_rref.rank();
    if ext_dim + cob_rank != cocycle_dim {
        return Err(ExtError::StructureAssertion(format!(
            "dimension bookkeeping failed: {ext_dim} + {cob_rank} != {cocycle_dim}"
        )));
    }
    let reps = rep_rref.dense_rows();
    for v in &reps {
        for row in &mat.rows {
            if !row_dot(row, v).is_zero() {
                return Err(ExtError::StructureAssertion(
                    "representative fails re-verification".into(),
                ));
            }
        }
    }
    Ok(SolveOut { cocycle_dim, cob_rank, ext_dim, reps })
}

fn rep_to_polys(parts: &Parts, cols: &[Col], v: &[FieldElem]) -> ExtRep {
    let mut phi = vec![MultiPoly::zero(); parts.rank];
    let mut translation = if parts.quot_gamma.is_some() {
        Some(MultiPoly::zero())
    } else {
        None
    };
    for (ci, col) in cols.iter().enumerate() {
        if v[ci].is_zero() {
            continue;
        }
        let mono = &MultiPoly::var_pow("d", col.dpow) * &MultiPoly::var_pow("l", col.lpow);
        let term = mono.scale(&v[ci]);
        match col.slot {
            Slot::Phi(g) => phi[g] = &phi[g] + &term,
            Slot::Translation => {
                let t = translation.get_or_insert_with(MultiPoly::zero);
                *t = &*t + &term;
            }
        }
    }
    ExtRep { phi, translation_part: translation }
}

// ---------------------------------------------------------------------------
// Public solvers
// ---------------------------------------------------------------------------

/// Solves the extension problem over the full unknown space of degree at
/// most `max_degree`, without exploiting any grading.
pub fn ext_compute_whole(p: &ExtProblem, max_degree: u32) -> Result<ExtSolution, ExtError> {
    ext_compute_whole_filtered(p, max_degree, None)
}

/// Same as [`ext_compute_whole`] but with the deformation slots restricted
/// to the listed generators (the rest are frozen to zero).  Lift changes
/// whose image leaves the restricted space are rejected.
pub fn ext_compute_whole_filtered(
    p: &ExtProblem,
    max_degree: u32,
    phi_slots: Option<&[usize]>,
) -> Result<ExtSolution, ExtError> {
    let parts = parts_of(&p.algebra, &p.sub, &p.quot)?;
    let cols = build_cols(&parts, &ColMode::Whole(max_degree), phi_slots);
    let sys = assemble(&p.algebra, &parts, &cols);
    let cobs: Vec<Vec<MultiPoly>> = psi_gens(&parts, max_degree)
        .iter()
        .map(|psi| coboundary_vector(&parts, &cols, psi))
        .collect::<Result<_, _>>()?;
    let out = solve_concrete(&sys, &cobs)?;
    Ok(ExtSolution {
        cocycle_dim: out.cocycle_dim,
        coboundary_rank: out.cob_rank,
        ext_dim: out.ext_dim,
        representatives: out.reps.iter().map(|v| rep_to_polys(&parts, &cols, v)).collect(),
        frame: Frame::Direct,
        max_degree,
    })
}

/// Reads off `(shift, weight)` from an action family of the standard shape
/// `d + shift + weight * l` on the first generator (zero on the others).
fn parse_standard(alg: &ConformalAlgebra, m: &Rank1Module) -> Option<(MultiPoly, MultiPoly)> {
    let Rank1Module::Free { actions } = m else { return None };
    if actions.len() != alg.rank() {
        return None;
    }
    if actions.iter().skip(1).any(|a| !a.is_zero()) {
        return None;
    }
    let a = &actions[0];
    if a.degree_in("l").unwrap_or(0) > 1 {
        return None;
    }
    let weight = a.coeff_of_power("l", 1);
    if weight.degree_in("d").unwrap_or(0) > 0 {
        return None;
    }
    let base = a.specialize("l", &FieldElem::zero());
    let shift = &base - &MultiPoly::var("d");
    if shift.degree_in("d").unwrap_or(0) > 0 {
        return None;
    }
    let rebuilt = &(&MultiPoly::var("d") + &shift) + &(&weight * &MultiPoly::var("l"));
    if rebuilt == *a {
        Some((shift, weight))
    } else {
        None
    }
}

/// Solves one homogeneous block of the graded (shifted-frame) problem.
fn solve_block(
    alg: &ConformalAlgebra,
    parts: &Parts,
    k: u32,
    phi_slots: Option<&[usize]>,
) -> Result<(Vec<Col>, LinSys, Vec<Vec<MultiPoly>>), ExtError> {
    let cols = build_cols(parts, &ColMode::Block(k), phi_slots);
    let sys = assemble(alg, parts, &cols);
    let cobs = if k >= 1 {
        vec![coboundary_vector(parts, &cols, &MultiPoly::var_pow("d", k - 1))?]
    } else {
        Vec::new()
    };
    Ok((cols, sys, cobs))
}

/// Solves the extension problem.  When both modules are free with the
/// standard action shape and share the same constant shift, the constant
/// is absorbed into the translation variable and the graded block solve is
/// used (representatives are then expressed in the shifted frame);
/// otherwise this falls back to the whole-space solve.
pub fn ext_compute(p: &ExtProblem, max_degree: u32) -> Result<ExtSolution, ExtError> {
    ext_compute_filtered(p, max_degree, None)
}

pub fn ext_compute_filtered(
    p: &ExtProblem,
    max_degree: u32,
    phi_slots: Option<&[usize]>,
) -> Result<ExtSolution, ExtError> {
    let graded = match (parse_standard(&p.algebra, &p.sub), parse_standard(&p.algebra, &p.quot)) {
        (Some((shift_s, weight_s)), Some((shift_q, weight_q))) if shift_s == shift_q => {
            Some((shift_s, weight_s, weight_q))
        }
        _ => None,
    };
    let Some((shift, weight_s, weight_q)) = graded else {
        return ext_compute_whole_filtered(p, max_degree, phi_slots);
    };

    let zero = MultiPoly::zero();
    let sub_shifted = Rank1Module::standard(&p.algebra, &zero, &weight_s)?;
    let quot_shifted = Rank1Module::standard(&p.algebra, &zero, &weight_q)?;
    let parts = parts_of(&p.algebra, &sub_shifted, &quot_shifted)?;

    let mut cocycle_dim = 0;
    let mut cob_rank = 0;
    let mut ext_dim = 0;
    let mut representatives = Vec::new();
    for k in 0..=max_degree {
        let (cols, sys, cobs) = solve_block(&p.algebra, &parts, k, phi_slots)?;
        let out = solve_concrete(&sys, &cobs)?;
        cocycle_dim += out.cocycle_dim;
        cob_rank += out.cob_rank;
        ext_dim += out.ext_dim;
        representatives
            .extend(out.reps.iter().map(|v| rep_to_polys(&parts, &cols, v)));
    }
    Ok(ExtSolution {
        cocycle_dim,
        coboundary_rank: cob_rank,
        ext_dim,
        representatives,
        frame: if shift.is_zero() { Frame::Direct } else { Frame::Shifted },
        max_degree,
    })
}

/// The frame-matched parts and whole-space columns for `p`, mirroring the
/// route [`ext_compute`] takes: graded standard problems are rebuilt with
/// the common shift absorbed, everything else is used as given.
fn reduction_setup(p: &ExtProblem, max_degree: u32) -> Result<(Parts, Vec<Col>), ExtError> {
    let graded = match (parse_standard(&p.algebra, &p.sub), parse_standard(&p.algebra, &p.quot)) {
        (Some((shift_s, weight_s)), Some((shift_q, weight_q))) if shift_s == shift_q => {
            Some((weight_s, weight_q))
        }
        _ => None,
    };
    let parts = if let Some((ws, wq)) = graded {
        let zero = MultiPoly::zero();
        let sub = Rank1Module::standard(&p.algebra, &zero, &ws)?;
        let quot = Rank1Module::standard(&p.algebra, &zero, &wq)?;
        parts_of(&p.algebra, &sub, &quot)?
    } else {
        parts_of(&p.algebra, &p.sub, &p.quot)?
    };
    let cols = build_cols(&parts, &ColMode::Whole(max_degree), None);
    Ok((parts, cols))
}

/// Scatters a representative back onto the column basis.  Fails when the
/// representative has the wrong slot shape, exceeds the degree bound, or
/// uses monomials outside the solution space of this problem.
fn rep_to_dense(parts: &Parts, cols: &[Col], rep: &ExtRep) -> Result<Vec<FieldElem>, ExtError> {
    if rep.phi.len() != parts.rank {
        return Err(ExtError::StructureAssertion(format!(
            "candidate has {} deformation slots, the algebra has {}",
            rep.phi.len(),
            parts.rank
        )));
    }
    if rep.translation_part.is_some() && parts.quot_gamma.is_none() {
        return Err(ExtError::StructureAssertion(
            "candidate has a translation part but the quotient is free".into(),
        ));
    }
    let index: BTreeMap<Col, usize> =
        cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut out = vec![FieldElem::zero(); cols.len()];
    let mut scatter = |slot: Slot, poly: &MultiPoly| -> Result<(), ExtError> {
        if let Some(bad) = poly.vars().iter().find(|v| *v != "d" && *v != "l") {
            return Err(ExtError::StructureAssertion(format!(
                "candidate involves the variable `{bad}`"
            )));
        }
        for dp in 0..=poly.degree_in("d").unwrap_or(0) {
            let by_d = poly.coeff_of_power("d", dp);
            for lp in 0..=by_d.degree_in("l").unwrap_or(0) {
                let c = by_d
                    .coeff_of_power("l", lp)
                    .as_constant()
                    .ok_or(ExtError::ParametricSystem)?;
                if c.is_zero() {
                    continue;
                }
                let col = Col { slot, dpow: dp, lpow: lp };
                let Some(&ci) = index.get(&col) else {
                    return Err(ExtError::StructureAssertion(format!(
                        "candidate monomial d^{dp} l^{lp} lies outside the \
                         degree-{} solution space",
                        cols.iter().map(|c| c.dpow + c.lpow).max().unwrap_or(0)
                    )));
                };
                out[ci] = c;
            }
        }
        Ok(())
    };
    for (g, poly) in rep.phi.iter().enumerate() {
        scatter(Slot::Phi(g), poly)?;
    }
    if let Some(a) = &rep.translation_part {
        if a.degree_in("l").unwrap_or(0) > 0 {
            return Err(ExtError::StructureAssertion(
                "translation part must not involve l".into(),
            ));
        }
        scatter(Slot::Translation, a)?;
    }
    Ok(out)
}

/// Canonically reduces an externally supplied deformation: verifies it
/// satisfies every cocycle equation at this degree bound, then removes
/// its coboundary component, cancelling the highest-order coordinates
/// first.  The result is the canonical member of the candidate's class,
/// so two cocycles are equivalent exactly when they reduce to the same
/// representative, and trivial deformations reduce to zero.  The
/// candidate must be written in the same frame as [`ext_compute`]'s
/// representatives for this problem.
pub fn ext_reduce(p: &ExtProblem, max_degree: u32, candidate: &ExtRep) -> Result<ExtRep, ExtError> {
    let (parts, cols) = reduction_setup(p, max_degree)?;
    let sys = assemble(&p.algebra, &parts, &cols);
    let dense = rep_to_dense(&parts, &cols, candidate)?;

    let n = cols.len();
    let mut mat = SparseMat::new(n);
    for row in &sys.rows {
        let mut sr = SparseRow::new();
        for (&c, poly) in row {
            let v = constant_entry(poly)?;
            if !v.is_zero() {
                sr.insert(c, v);
            }
        }
        mat.push_row(sr);
    }
    for row in &mat.rows {
        if !row_dot(row, &dense).is_zero() {
            return Err(ExtError::StructureAssertion(
                "candidate is not a cocycle: an equation has nonzero residual".into(),
            ));
        }
    }

    let mut cob_rref = Rref::empty(n);
    for psi in psi_gens(&parts, max_degree) {
        let cob = coboundary_vector(&parts, &cols, &psi)?;
        let dense_cob: Vec<FieldElem> =
            cob.iter().map(constant_entry).collect::<Result<_, _>>()?;
        cob_rref.absorb(rev_sparse(&dense_cob));
    }
    let reduced = unrev_dense(&cob_rref.reduce(rev_sparse(&dense)), n);
    Ok(rep_to_polys(&parts, &cols, &reduced))
}

/// The assembled whole-space system as a dense matrix: one row per
/// stored equation over the canonical column order.  Exposed so
/// independent rank oracles can be run against the exact solver input.
pub fn ext_system_matrix(
    p: &ExtProblem,
    max_degree: u32,
) -> Result<Vec<Vec<FieldElem>>, ExtError> {
    let (parts, cols) = reduction_setup(p, max_degree)?;
    let sys = assemble(&p.algebra, &parts, &cols);
    let n = cols.len();
    sys.rows
        .iter()
        .map(|row| {
            let mut dense = vec![FieldElem::zero(); n];
            for (&c, poly) in row {
                dense[c] = constant_entry(poly)?;
            }
            Ok(dense)
        })
        .collect()
}

/// Runs the solver at `max_degree` and `max_degree + 2` and reports
/// whether both the dimension and the canonical representatives agree.
pub fn ext_stabilize(p: &ExtProblem, max_degree: u32) -> Result<StabilizeReport, ExtError> {
    let base = ext_compute(p, max_degree)?;
    let refined = ext_compute(p, max_degree + 2)?;
    let stabilized = base.ext_dim == refined.ext_dim
        && base.representatives == refined.representatives;
    Ok(StabilizeReport { base, refined, stabilized })
}

/// Sweep of the free/free graded problem with submodule weight `t` and
/// quotient weight `t + weight_gap`, both with zero shift: computes the
/// generic extension dimension and every admissible weight where the
/// dimension jumps.  Candidate weights come from the vanishing loci of the
/// fraction-free pivots (a superset of the true jump locus); each one is
/// re-verified by a concrete solve.
pub fn ext_special_values(
    alg: &ConformalAlgebra,
    weight_gap: i64,
    max_degree: u32,
) -> Result<SpecialReport, ExtError> {
    let t = MultiPoly::var("t");
    let zero = MultiPoly::zero();
    let sub = Rank1Module::standard(alg, &zero, &t)?;
    let quot = Rank1Module::standard(alg, &zero, &(&t + &MultiPoly::from_int(weight_gap)))?;
    let parts = parts_of(alg, &sub, &quot)?;

    let mut generic_total = 0usize;
    let mut pivot_polys: Vec<MultiPoly> = Vec::new();
    for k in 0..=max_degree {
        let (cols, sys, cobs) = solve_block(alg, &parts, k, None)?;
        let dense: Vec<Vec<MultiPoly>> = sys
            .rows
            .iter()
            .map(|row| {
                (0..cols.len())
                    .map(|c| row.get(&c).cloned().unwrap_or_else(MultiPoly::zero))
                    .collect()
            })
            .collect();
        let ff = if dense.is_empty() {
            None
        } else {
            Some(ff_rank(&dense, "t")?)
        };
        let cob_rows: Vec<Vec<MultiPoly>> =
            cobs.iter().filter(|v| v.iter().any(|p| !p.is_zero())).cloned().collect();
        let ffc = if cob_rows.is_empty() {
            None
        } else {
            Some(ff_rank(&cob_rows, "t")?)
        };
        let rank = ff.as_ref().map_or(0, |f| f.rank);
        let crank = ffc.as_ref().map_or(0, |f| f.rank);
        generic_total += cols.len() - rank - crank;
        if let Some(f) = ff {
            pivot_polys.extend(f.pivot_polys);
        }
        if let Some(f) = ffc {
            pivot_polys.extend(f.pivot_polys);
        }
    }

    let mut candidates: Vec<FieldElem> = Vec::new();
    let mut residual_factors: Vec<ResidualFactor> = Vec::new();
    for pol in &pivot_polys {
        if pol.as_constant().is_some() {
            continue;
        }
        let report = univ_roots(pol, "t")?;
        for (root, _) in report.roots {
            if !candidates.contains(&root) {
                candidates.push(root);
            }
        }
        for rf in report.residual {
            if !residual_factors.contains(&rf) {
                residual_factors.push(rf);
            }
        }
    }
    candidates.sort_by_key(sort_key);

    let mut special = Vec::new();
    let mut inadmissible = Vec::new();
    let gap_neg = FieldElem::from_int(-weight_gap);
    for t0 in candidates {
        if t0.is_zero() || t0 == gap_neg {
            // One of the two weights vanishes: the modules degenerate.
            inadmissible.push(t0);
            continue;
        }
        let t1 = &t0 + &FieldElem::from_int(weight_gap);
        let sub0 = Rank1Module::standard(alg, &zero, &MultiPoly::constant(t0.clone()))?;
        let quot0 = Rank1Module::standard(alg, &zero, &MultiPoly::constant(t1))?;
        let sol = ext_compute(
            &ExtProblem { algebra: alg.clone(), sub: sub0, quot: quot0 },
            max_degree,
        )?;
        if sol.ext_dim > generic_total {
            special.push(SpecialPoint { value: t0, ext_dim: sol.ext_dim });
        }
    }

    Ok(SpecialReport {
        weight_gap,
        max_degree,
        generic_ext_dim: generic_total,
        special,
        inadmissible,
        residual_factors,
    })
}

/// Deterministic ordering key for field elements: discriminant first
/// (rationals sort before quadratic irrationals), then both coordinates.
fn sort_key(x: &FieldElem) -> (u64, crate::field::Rat, crate::field::Rat) {
    let (a, b) = x.parts();
    (x.discriminant().unwrap_or(0), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn r() -> ConformalAlgebra {
        ConformalAlgebra::builtin_r()
    }

    fn std_free(alg: &ConformalAlgebra, alpha: i64, delta: i64) -> Rank1Module {
        Rank1Module::standard(
            alg,
            &MultiPoly::from_int(alpha),
            &MultiPoly::from_int(delta),
        )
        .unwrap()
    }

    fn lpoly(k: u32) -> MultiPoly {
        MultiPoly::var_pow("l", k)
    }

    #[test]
    fn one_dim_sub_small_bound_frozen() {
        // Sub is one-dimensional with translation scalar -2; quot has
        // shift 2, weight 1, so the shifts cancel.  At bound 3 the
        // unknown space has 8 coordinates, the cocycles are spanned by
        // l and l^2, and one direction is trivial.
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: Rank1Module::Torsion { gamma: FieldElem::from_int(-2) },
            quot: std_free(&alg, 2, 1),
        };
        let sol = ext_compute(&p, 3).unwrap();
        assert_eq!(sol.cocycle_dim, 2);
        assert_eq!(sol.coboundary_rank, 1);
        assert_eq!(sol.ext_dim, 1);
        assert_eq!(sol.representatives.len(), 1);
        let rep = &sol.representatives[0];
        assert_eq!(rep.phi[0], lpoly(2));
        assert!(rep.phi[1].is_zero());
        assert!(rep.translation_part.is_none());
    }

    #[test]
    fn one_dim_sub_nonmatching_shift_is_trivial() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: Rank1Module::Torsion { gamma: FieldElem::from_int(1) },
            quot: std_free(&alg, 1, 1),
        };
        let sol = ext_compute(&p, 6).unwrap();
        assert_eq!(sol.ext_dim, 0);
    }

    #[test]
    fn one_dim_sub_weight_two_and_three() {
        let alg = r();
        for (delta, expect_dim) in [(2i64, 1usize), (3, 0)] {
            let p = ExtProblem {
                algebra: alg.clone(),
                sub: Rank1Module::Torsion { gamma: FieldElem::from_int(-3) },
                quot: std_free(&alg, 3, delta),
            };
            let sol = ext_compute(&p, 6).unwrap();
            assert_eq!(sol.ext_dim, expect_dim, "weight {delta}");
            if delta == 2 {
                assert_eq!(sol.representatives[0].phi[0], lpoly(3));
            }
        }
    }

    #[test]
    fn one_dim_quot_weight_one() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 1, 1),
            quot: Rank1Module::Torsion { gamma: FieldElem::from_int(-1) },
        };
        let sol = ext_compute(&p, 5).unwrap();
        assert_eq!(sol.ext_dim, 1);
        let rep = &sol.representatives[0];
        assert_eq!(rep.phi[0], MultiPoly::one());
        assert!(rep.phi[1].is_zero());
        assert_eq!(rep.translation_part.as_ref().unwrap(), &MultiPoly::one());
    }

    #[test]
    fn one_dim_quot_weight_two_is_trivial() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 1, 2),
            quot: Rank1Module::Torsion { gamma: FieldElem::from_int(-1) },
        };
        let sol = ext_compute(&p, 5).unwrap();
        assert_eq!(sol.ext_dim, 0);
    }

    #[test]
    fn free_free_equal_weights() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 2),
            quot: std_free(&alg, 0, 2),
        };
        let sol = ext_compute(&p, 6).unwrap();
        assert_eq!(sol.ext_dim, 2);
        assert_eq!(sol.representatives[0].phi[0], MultiPoly::one());
        assert!(sol.representatives[0].phi[1].is_zero());
        assert_eq!(sol.representatives[1].phi[0], MultiPoly::var("l"));
        assert!(sol.representatives[1].phi[1].is_zero());
    }

    #[test]
    fn free_free_gap_two() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 3),
            quot: std_free(&alg, 0, 5),
        };
        let sol = ext_compute(&p, 8).unwrap();
        assert_eq!(sol.ext_dim, 1);
        let rep = &sol.representatives[0];
        // The class of l^2 (2d + l); the minimal-degree representative
        // modulo coboundaries is the pure l^3 cocycle.
        assert_eq!(rep.phi[0], lpoly(3));
        assert!(rep.phi[1].is_zero());
    }

    #[test]
    fn free_free_gap_one_mixes_both_slots() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 2),
            quot: std_free(&alg, 0, 3),
        };
        let sol = ext_compute(&p, 6).unwrap();
        assert_eq!(sol.ext_dim, 1);
        let rep = &sol.representatives[0];
        assert_eq!(rep.phi[0], MultiPoly::var("d"));
        assert_eq!(rep.phi[1], MultiPoly::var("l").scale(&FieldElem::from_int(2)));
    }

    #[test]
    fn virasoro_gap_one_is_trivial() {
        let alg = ConformalAlgebra::builtin_virasoro();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 2),
            quot: std_free(&alg, 0, 3),
        };
        let sol = ext_compute(&p, 6).unwrap();
        assert_eq!(sol.ext_dim, 0);
    }

    #[test]
    fn mismatched_shifts_are_trivial() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 1, 2),
            quot: std_free(&alg, 0, 2),
        };
        let sol = ext_compute(&p, 6).unwrap();
        assert_eq!(sol.ext_dim, 0);
        assert_eq!(sol.frame, Frame::Direct);
    }

    #[test]
    fn graded_and_whole_routes_agree() {
        let alg = r();
        let alpha = MultiPoly::from_rat(rat(7, 3));
        let sub = Rank1Module::standard(&alg, &alpha, &MultiPoly::from_int(3)).unwrap();
        let quot = Rank1Module::standard(&alg, &alpha, &MultiPoly::from_int(5)).unwrap();
        let p = ExtProblem { algebra: alg.clone(), sub, quot };
        let graded = ext_compute(&p, 7).unwrap();
        let whole = ext_compute_whole(&p, 7).unwrap();
        assert_eq!(graded.frame, Frame::Shifted);
        assert_eq!(whole.frame, Frame::Direct);
        assert_eq!(graded.ext_dim, whole.ext_dim);
        assert_eq!(graded.ext_dim, 1);
    }

    #[test]
    fn both_one_dimensional() {
        let alg = r();
        for (g1, g2, expect) in [(2i64, 2i64, 1usize), (1, 0, 0)] {
            let p = ExtProblem {
                algebra: alg.clone(),
                sub: Rank1Module::Torsion { gamma: FieldElem::from_int(g1) },
                quot: Rank1Module::Torsion { gamma: FieldElem::from_int(g2) },
            };
            let sol = ext_compute(&p, 4).unwrap();
            assert_eq!(sol.ext_dim, expect, "gammas {g1},{g2}");
            if expect == 1 {
                let rep = &sol.representatives[0];
                assert!(rep.phi.iter().all(|q| q.is_zero()));
                assert_eq!(rep.translation_part.as_ref().unwrap(), &MultiPoly::one());
            }
        }
    }

    #[test]
    fn stabilization_on_graded_problem() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 3),
            quot: std_free(&alg, 0, 5),
        };
        let rep = ext_stabilize(&p, 8).unwrap();
        assert!(rep.stabilized);
        assert_eq!(rep.base.ext_dim, 1);
    }

    #[test]
    fn special_values_for_gap_two() {
        let alg = r();
        let report = ext_special_values(&alg, 2, 8).unwrap();
        assert_eq!(report.generic_ext_dim, 1);
        assert_eq!(report.special.len(), 1);
        assert_eq!(report.special[0].value, FieldElem::from_int(-1));
        assert_eq!(report.special[0].ext_dim, 2);
        for x in &report.inadmissible {
            assert!(x.is_zero() || *x == FieldElem::from_int(-2));
        }
    }

    #[test]
    fn restricted_slots_never_exceed_full_solve() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 3),
            quot: std_free(&alg, 0, 4),
        };
        let full = ext_compute(&p, 6).unwrap();
        let f_only = ext_compute_filtered(&p, 6, Some(&[0])).unwrap();
        assert!(f_only.ext_dim <= full.ext_dim);
        assert_eq!(full.ext_dim, 1);
    }

    #[test]
    fn reduce_is_idempotent_on_representatives() {
        let alg = r();
        let problems = [
            ExtProblem {
                algebra: alg.clone(),
                sub: std_free(&alg, 2, 3),
                quot: std_free(&alg, 2, 5),
            },
            ExtProblem {
                algebra: alg.clone(),
                sub: Rank1Module::Torsion { gamma: FieldElem::zero() },
                quot: std_free(&alg, 0, 1),
            },
            ExtProblem {
                algebra: alg.clone(),
                sub: std_free(&alg, -1, 1),
                quot: Rank1Module::Torsion { gamma: FieldElem::from_int(1) },
            },
        ];
        for p in &problems {
            let sol = ext_compute(p, 8).unwrap();
            assert!(sol.ext_dim >= 1);
            for rep in &sol.representatives {
                assert_eq!(&ext_reduce(p, 8, rep).unwrap(), rep);
            }
        }
    }

    #[test]
    fn reduce_collapses_an_unreduced_cocycle_form() {
        // At weights (3, 5) the family f = l^2 (2d + l), g = 0 is a
        // cocycle whose dl^2 part is trivial: subtracting 2/7 of the
        // coboundary 7dl^2 + 3l^3 leaves l^3 / 7.
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 3),
            quot: std_free(&alg, 0, 5),
        };
        let two_d = MultiPoly::var("d").scale(&FieldElem::from_int(2));
        let f = &MultiPoly::var_pow("l", 2) * &(&two_d + &MultiPoly::var("l"));
        let candidate = ExtRep { phi: vec![f, MultiPoly::zero()], translation_part: None };
        let reduced = ext_reduce(&p, 8, &candidate).unwrap();
        assert_eq!(reduced.phi[0], lpoly(3).scale(&FieldElem::from_rat(rat(1, 7))));
        assert!(reduced.phi[1].is_zero());

        // The coboundary itself reduces to zero.
        let seven_d = MultiPoly::var("d").scale(&FieldElem::from_int(7));
        let three_l = MultiPoly::var("l").scale(&FieldElem::from_int(3));
        let cob = &MultiPoly::var_pow("l", 2) * &(&seven_d + &three_l);
        let trivial = ExtRep { phi: vec![cob, MultiPoly::zero()], translation_part: None };
        let zeroed = ext_reduce(&p, 8, &trivial).unwrap();
        assert!(zeroed.phi.iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn reduce_rejects_non_cocycles() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 3),
            quot: std_free(&alg, 0, 5),
        };
        let candidate = ExtRep {
            phi: vec![lpoly(2), MultiPoly::zero()],
            translation_part: None,
        };
        let err = ext_reduce(&p, 8, &candidate).unwrap_err();
        assert!(matches!(err, ExtError::StructureAssertion(_)));

        // By contrast (l, 0) happens to be a multiple of the degree-one
        // coboundary here, so it reduces to zero rather than erroring.
        let trivial = ExtRep {
            phi: vec![MultiPoly::var("l"), MultiPoly::zero()],
            translation_part: None,
        };
        let reduced = ext_reduce(&p, 8, &trivial).unwrap();
        assert!(reduced.phi.iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn system_matrix_rank_matches_the_cocycle_count() {
        let alg = r();
        let p = ExtProblem {
            algebra: alg.clone(),
            sub: std_free(&alg, 0, 3),
            quot: std_free(&alg, 0, 5),
        };
        let mat = ext_system_matrix(&p, 6).unwrap();
        let cols = mat[0].len();
        assert!(mat.iter().all(|row| row.len() == cols));
        let mut sm = SparseMat::new(cols);
        for row in &mat {
            sm.push_row(dense_to_sparse(row));
        }
        let rank = sm.rref().rank();
        let sol = ext_compute_whole(&p, 6).unwrap();
        assert_eq!(cols - rank, sol.cocycle_dim);
    }
}
