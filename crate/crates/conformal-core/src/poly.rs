//! Sparse multivariate polynomials over [`FieldElem`] scalars.
//!
//! Polynomials are kept in a canonical form: the variable list contains
//! exactly the variables that occur in some term, ordered with the core
//! variables `d` (the translation generator), `l` (lambda) and `m` (mu)
//! first and all other names alphabetically after them; terms live in a
//! map keyed by graded-lexicographic monomials.  Two polynomials are equal
//! iff their canonical forms are identical, and rendering iterates terms in
//! descending graded-lex order so equal polynomials print identically.

use crate::field::{render_rat, FieldElem, FieldError, Rat};
use num_traits::{One, Signed};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("term has {got} exponents but the variable list has {expected} entries")]
    TermLength { expected: usize, got: usize },
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
}

/// Exponent vector aligned with a polynomial's variable list.
///
/// The ordering is graded-lexicographic: total degree first, then
/// lexicographic comparison of the exponent vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

// Graded-lex: Ord on (total degree, exponent vector).
impl Monomial {
    fn key(&self) -> (u32, &[u32]) {
        (self.total_degree(), &self.0)
    }
}

fn mono_cmp(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    a.key().cmp(&b.key())
}

/// Canonical ordering key for variable names: `d`, `l`, `m` first, then
/// declared parameters alphabetically.
fn var_key(name: &str) -> (u8, &str) {
    match name {
        "d" => (0, ""),
        "l" => (1, ""),
        "m" => (2, ""),
        other => (3, other),
    }
}

/// Sparse multivariate polynomial in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<MonoKey, FieldElem>,
    /// The unique quadratic discriminant among the coefficients, if any.
    disc: Option<u64>,
}

/// BTreeMap key wrapper imposing graded-lex order.
#[derive(Clone, PartialEq, Eq, Debug)]
struct MonoKey(Monomial);

impl PartialOrd for MonoKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonoKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        mono_cmp(&self.0, &other.0)
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { vars: Vec::new(), terms: BTreeMap::new(), disc: None }
    }

    pub fn one() -> Self {
        Self::constant(FieldElem::one())
    }

    pub fn constant(c: FieldElem) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(MonoKey(Monomial(Vec::new())), c.clone());
        }
        let disc = c.discriminant();
        MultiPoly { vars: Vec::new(), terms, disc }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(FieldElem::from_int(n))
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::constant(FieldElem::from_rat(r))
    }

    /// The single variable `name`.
    pub fn var(name: &str) -> Self {
        Self::var_pow(name, 1)
    }

    /// `name^k`.
    pub fn var_pow(name: &str, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        let mut terms = BTreeMap::new();
        terms.insert(MonoKey(Monomial(vec![k])), FieldElem::one());
        MultiPoly { vars: vec![name.to_string()], terms, disc: None }
    }

    /// Builds a polynomial from explicit terms over a declared variable list.
    pub fn from_terms(
        vars: Vec<String>,
        terms: Vec<(Vec<u32>, FieldElem)>,
    ) -> Result<Self, PolyError> {
        for i in 0..vars.len() {
            if vars[i + 1..].contains(&vars[i]) {
                return Err(PolyError::DuplicateVariable(vars[i].clone()));
            }
        }
        // Sort the variable list canonically and permute exponents to match.
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| var_key(&vars[a]).cmp(&var_key(&vars[b])));
        let sorted_vars: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();

        let mut map: BTreeMap<MonoKey, FieldElem> = BTreeMap::new();
        let mut disc: Option<u64> = None;
        for (exps, c) in terms {
            if exps.len() != vars.len() {
                return Err(PolyError::TermLength { expected: vars.len(), got: exps.len() });
            }
            if c.is_zero() {
                continue;
            }
            match (disc, c.discriminant()) {
                (Some(d1), Some(d2)) if d1 != d2 => {
                    return Err(FieldError::MixedDiscriminants(d1, d2).into())
                }
                (None, d @ Some(_)) => disc = d,
                _ => {}
            }
            let permuted: Vec<u32> = order.iter().map(|&i| exps[i]).collect();
            let key = MonoKey(Monomial(permuted));
            let entry = match map.remove(&key) {
                Some(prev) => prev.checked_add(&c)?,
                None => c,
            };
            if !entry.is_zero() {
                map.insert(key, entry);
            }
        }
        Ok(Self::normalized(sorted_vars, map))
    }

    /// Canonicalizes: drops zero terms and unused variables, recomputes the
    /// coefficient discriminant.  `vars` must already be sorted canonically.
    fn normalized(vars: Vec<String>, mut terms: BTreeMap<MonoKey, FieldElem>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let mut used = vec![false; vars.len()];
        for key in terms.keys() {
            for (i, &e) in key.0 .0.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        let (vars, terms) = if used.iter().all(|&u| u) {
            (vars, terms)
        } else {
            let keep: Vec<usize> = (0..vars.len()).filter(|&i| used[i]).collect();
            let new_vars: Vec<String> = keep.iter().map(|&i| vars[i].clone()).collect();
            let new_terms = terms
                .into_iter()
                .map(|(k, c)| {
                    (MonoKey(Monomial(keep.iter().map(|&i| k.0 .0[i]).collect())), c)
                })
                .collect();
            (new_vars, new_terms)
        };
        let mut disc = None;
        for c in terms.values() {
            match (disc, c.discriminant()) {
                (None, d @ Some(_)) => disc = d,
                (Some(d1), Some(d2)) => {
                    assert_eq!(d1, d2, "mixed quadratic discriminants inside a polynomial")
                }
                _ => {}
            }
        }
        MultiPoly { vars, terms, disc }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// The unique quadratic discriminant among the coefficients, if any.
    pub fn discriminant(&self) -> Option<u64> {
        self.disc
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<FieldElem> {
        if self.vars.is_empty() {
            Some(
                self.terms
                    .get(&MonoKey(Monomial(Vec::new())))
                    .cloned()
                    .unwrap_or_else(FieldElem::zero),
            )
        } else {
            None
        }
    }

    /// Iterates `(monomial, coefficient)` pairs in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter().map(|(k, c)| (&k.0, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0.total_degree()).max()
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: &str) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        match self.vars.iter().position(|v| v == var) {
            None => Some(0),
            Some(i) => self.terms.keys().map(|k| k.0 .0[i]).max(),
        }
    }

    fn disc_union(&self, other: &Self) -> Result<Option<u64>, PolyError> {
        match (self.disc, other.disc) {
            (None, x) | (x, None) => Ok(x),
            (Some(d1), Some(d2)) if d1 == d2 => Ok(Some(d1)),
            (Some(d1), Some(d2)) => Err(FieldError::MixedDiscriminants(d1, d2).into()),
        }
    }

    /// Aligns two polynomials over the union of their variable lists.
    fn aligned(&self, other: &Self) -> (Vec<String>, BTreeMap<MonoKey, FieldElem>, BTreeMap<MonoKey, FieldElem>) {
        if self.vars == other.vars {
            return (self.vars.clone(), self.terms.clone(), other.terms.clone());
        }
        let mut union: Vec<String> = self.vars.clone();
        for v in &other.vars {
            if !union.contains(v) {
                union.push(v.clone());
            }
        }
        union.sort_by(|a, b| var_key(a).cmp(&var_key(b)));
        let remap = |p: &MultiPoly| {
            let idx: Vec<usize> = p
                .vars
                .iter()
                .map(|v| union.iter().position(|u| u == v).unwrap())
                .collect();
            p.terms
                .iter()
                .map(|(k, c)| {
                    let mut exps = vec![0u32; union.len()];
                    for (j, &e) in k.0 .0.iter().enumerate() {
                        exps[idx[j]] = e;
                    }
                    (MonoKey(Monomial(exps)), c.clone())
                })
                .collect::<BTreeMap<_, _>>()
        };
        let a = remap(self);
        let b = remap(other);
        (union, a, b)
    }

    /// Checked addition; reports mixed quadratic discriminants.
    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.disc_union(other)?;
        let (vars, mut a, b) = self.aligned(other);
        for (k, c) in b {
            let entry = match a.remove(&k) {
                Some(prev) => prev.checked_add(&c)?,
                None => c,
            };
            if !entry.is_zero() {
                a.insert(k, entry);
            }
        }
        Ok(Self::normalized(vars, a))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&(-other))
    }

    /// Checked multiplication; reports mixed quadratic discriminants.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.disc_union(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let (vars, a, b) = self.aligned(other);
        let mut acc: BTreeMap<MonoKey, FieldElem> = BTreeMap::new();
        for (ka, ca) in &a {
            for (kb, cb) in &b {
                let exps: Vec<u32> = ka
                    .0
                     .0
                    .iter()
                    .zip(kb.0 .0.iter())
                    .map(|(x, y)| x.checked_add(*y).expect("exponent overflow"))
                    .collect();
                let key = MonoKey(Monomial(exps));
                let prod = ca.checked_mul(cb)?;
                let entry = match acc.remove(&key) {
                    Some(prev) => prev.checked_add(&prod)?,
                    None => prod,
                };
                if !entry.is_zero() {
                    acc.insert(key, entry);
                }
            }
        }
        Ok(Self::normalized(vars, acc))
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), v * c))
            .collect();
        Self::normalized(self.vars.clone(), terms)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `var := replacement` simultaneously across all terms.
    ///
    /// The replacement may itself contain `var`; each occurrence of `var^e`
    /// in the original is replaced by `replacement^e` exactly once.
    pub fn substitute(&self, var: &str, replacement: &MultiPoly) -> Self {
        let idx = match self.vars.iter().position(|v| v == var) {
            Some(i) => i,
            None => return self.clone(),
        };
        // Group terms by the exponent of `var` so each replacement power is
        // formed and merged exactly once, keeping the cost linear in the
        // number of terms.
        let mut groups: BTreeMap<u32, BTreeMap<MonoKey, FieldElem>> = BTreeMap::new();
        for (k, c) in &self.terms {
            let e = k.0 .0[idx];
            let mut exps = k.0 .0.clone();
            exps[idx] = 0;
            groups
                .entry(e)
                .or_default()
                .insert(MonoKey(Monomial(exps)), c.clone());
        }
        let mut acc = Self::zero();
        let mut power = Self::one();
        let mut power_exp = 0u32;
        for (e, terms) in groups {
            while power_exp < e {
                power = &power * replacement;
                power_exp += 1;
            }
            let part = Self::normalized(self.vars.clone(), terms);
            acc = &acc + &(&part * &power);
        }
        acc
    }

    /// Substitutes a constant for one variable.
    pub fn specialize(&self, var: &str, value: &FieldElem) -> Self {
        self.substitute(var, &MultiPoly::constant(value.clone()))
    }

    /// Splits into homogeneous components by total degree in the named
    /// variables; absent names contribute degree zero.  The zero polynomial
    /// yields an empty map.
    pub fn homogeneous_components(&self, vars: &[&str]) -> BTreeMap<u32, MultiPoly> {
        let idx: Vec<usize> = vars
            .iter()
            .filter_map(|v| self.vars.iter().position(|u| u == v))
            .collect();
        let mut out: BTreeMap<u32, BTreeMap<MonoKey, FieldElem>> = BTreeMap::new();
        for (k, c) in &self.terms {
            let deg: u32 = idx.iter().map(|&i| k.0 .0[i]).sum();
            out.entry(deg).or_default().insert(k.clone(), c.clone());
        }
        out.into_iter()
            .map(|(deg, terms)| (deg, Self::normalized(self.vars.clone(), terms)))
            .collect()
    }

    /// Coefficient of `var^k`, as a polynomial in the remaining variables.
    pub fn coeff_of_power(&self, var: &str, k: u32) -> MultiPoly {
        match self.vars.iter().position(|v| v == var) {
            None => {
                if k == 0 {
                    self.clone()
                } else {
                    Self::zero()
                }
            }
            Some(i) => {
                let terms = self
                    .terms
                    .iter()
                    .filter(|(key, _)| key.0 .0[i] == k)
                    .map(|(key, c)| {
                        let mut exps = key.0 .0.clone();
                        exps[i] = 0;
                        (MonoKey(Monomial(exps)), c.clone())
                    })
                    .collect();
                Self::normalized(self.vars.clone(), terms)
            }
        }
    }

    /// All coefficients in one variable, indexed by power (empty for zero).
    pub fn coeffs_in(&self, var: &str) -> Vec<MultiPoly> {
        match self.degree_in(var) {
            None => Vec::new(),
            Some(d) => (0..=d).map(|k| self.coeff_of_power(var, k)).collect(),
        }
    }

    /// Coefficient of the monomial described by `assignment` (variables not
    /// listed must have exponent zero).
    pub fn coefficient(&self, assignment: &[(&str, u32)]) -> FieldElem {
        let mut exps = vec![0u32; self.vars.len()];
        for (name, e) in assignment {
            match self.vars.iter().position(|v| v == name) {
                Some(i) => exps[i] = *e,
                None => {
                    if *e > 0 {
                        return FieldElem::zero();
                    }
                }
            }
        }
        self.terms
            .get(&MonoKey(Monomial(exps)))
            .cloned()
            .unwrap_or_else(FieldElem::zero)
    }

    /// Groups terms by their monomial in `main` (exponent vectors follow the
    /// order of `main` as given); values are polynomials in the remaining
    /// variables.  Used to turn a polynomial identity into matrix rows.
    pub fn partition_by(&self, main: &[&str]) -> BTreeMap<Monomial, MultiPoly> {
        let main_idx: Vec<Option<usize>> = main
            .iter()
            .map(|v| self.vars.iter().position(|u| u == v))
            .collect();
        let rest_idx: Vec<usize> = (0..self.vars.len())
            .filter(|i| !main_idx.contains(&Some(*i)))
            .collect();
        let rest_vars: Vec<String> = rest_idx.iter().map(|&i| self.vars[i].clone()).collect();
        let mut grouped: BTreeMap<Monomial, BTreeMap<MonoKey, FieldElem>> = BTreeMap::new();
        for (k, c) in &self.terms {
            let key = Monomial(
                main_idx
                    .iter()
                    .map(|oi| oi.map(|i| k.0 .0[i]).unwrap_or(0))
                    .collect(),
            );
            let rest = MonoKey(Monomial(rest_idx.iter().map(|&i| k.0 .0[i]).collect()));
            grouped.entry(key).or_default().insert(rest, c.clone());
        }
        grouped
            .into_iter()
            .map(|(k, terms)| (k, Self::normalized(rest_vars.clone(), terms)))
            .collect()
    }

    /// Leading term in graded-lex order, if any.
    pub fn leading_term(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.iter().next_back().map(|(k, c)| (&k.0, c))
    }

    fn render_monomial(&self, mono: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in mono.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.vars[i].clone()),
                _ => parts.push(format!("{}^{}", self.vars[i], e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Descending graded-lex order for output.
        for (key, c) in self.terms.iter().rev() {
            let mono = self.render_monomial(&key.0);
            let piece = match c {
                FieldElem::Rational(r) => {
                    let mag = r.abs();
                    let body = if mono.is_empty() {
                        render_rat(&mag)
                    } else if mag.is_one() {
                        mono.clone()
                    } else {
                        format!("{}*{}", render_rat(&mag), mono)
                    };
                    if first {
                        if r.is_negative() {
                            format!("-{body}")
                        } else {
                            body
                        }
                    } else if r.is_negative() {
                        format!(" - {body}")
                    } else {
                        format!(" + {body}")
                    }
                }
                quad => {
                    let body = if mono.is_empty() {
                        format!("({quad})")
                    } else {
                        format!("({quad})*{mono}")
                    };
                    if first {
                        body
                    } else {
                        format!(" + {body}")
                    }
                }
            };
            f.write_str(&piece)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("polynomial operation failed: {e}"))
            }
        }
        impl $trait for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&FieldElem::from_int(-1))
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
