//! Exact linear algebra over the scalar field and over `Z[t]`.
//!
//! Three elimination routines live here on purpose:
//!
//! * a sparse online reduction producing the (unique) reduced row echelon
//!   form, used by every solver path;
//! * a plain dense forward elimination, kept as an independent cross-check
//!   of ranks computed by the sparse path;
//! * fraction-free Bareiss elimination for matrices whose entries are
//!   integer polynomials in a single parameter, which yields the generic
//!   rank together with the pivot determinants whose roots bound the locus
//!   where the rank can drop.
//!
//! Ranks can additionally be confirmed modulo large primes; reductions of a
//! rational matrix mod `p` can only lower the rank, so agreement at random
//! primes is strong evidence that no elimination step was wrong.

use crate::field::{mul_mod_u64, pow_mod_u64, FieldElem, Rat};
use crate::poly::MultiPoly;
use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix entry at ({row},{col}) is not univariate in parameter {param:?}")]
    NotUnivariate { row: usize, col: usize, param: String },
    #[error("matrix entry at ({row},{col}) has a quadratic-irrational coefficient; parametric elimination runs over the rationals")]
    IrrationalEntry { row: usize, col: usize },
}

/// A sparse row: column index -> nonzero coefficient.
pub type SparseRow = BTreeMap<usize, FieldElem>;

/// Sparse matrix with a fixed column count and rows in insertion order.
#[derive(Clone, Debug)]
pub struct SparseMat {
    pub cols: usize,
    pub rows: Vec<SparseRow>,
}

impl SparseMat {
    pub fn new(cols: usize) -> Self {
        SparseMat { cols, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: SparseRow) {
        debug_assert!(row.keys().all(|&c| c < self.cols));
        let row: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn push_dense_row(&mut self, row: &[FieldElem]) {
        assert_eq!(row.len(), self.cols);
        let sparse: SparseRow = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        if !sparse.is_empty() {
            self.rows.push(sparse);
        }
    }

    pub fn rref(&self) -> Rref {
        let mut r = Rref { cols: self.cols, rows: Vec::new() };
        for row in &self.rows {
            r.absorb(row.clone());
        }
        r.rows.sort_by_key(|(pivot, _)| *pivot);
        r
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Deterministic nullspace basis: one vector per free column, in
    /// ascending column order, with a 1 in the free position.
    pub fn nullspace(&self) -> Vec<Vec<FieldElem>> {
        self.rref().nullspace()
    }
}

/// Reduced row echelon form (unique for a given row space).
#[derive(Clone, Debug)]
pub struct Rref {
    pub cols: usize,
    /// `(pivot column, row)` sorted by pivot column; each row has a 1 at its
    /// pivot and zeros at every other pivot column.
    pub rows: Vec<(usize, SparseRow)>,
}

impl Rref {
    pub fn empty(cols: usize) -> Self {
        Rref { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Reduces `row` against the current rows, returning the remainder.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        for (pivot, base) in &self.rows {
            if let Some(c) = row.get(pivot).cloned() {
                // row -= c * base
                for (&j, v) in base {
                    let delta = &c * v;
                    let entry = match row.remove(&j) {
                        Some(prev) => prev - delta,
                        None => -delta,
                    };
                    if !entry.is_zero() {
                        row.insert(j, entry);
                    }
                }
            }
        }
        row
    }

    /// Reduces a row and, if a remainder is left, installs it as a new
    /// pivot row (eliminating its pivot column from the older rows).
    /// Returns true if the row enlarged the span.
    pub fn absorb(&mut self, row: SparseRow) -> bool {
        let rem = self.reduce(row);
        let Some((&pivot, _)) = rem.iter().next() else {
            return false;
        };
        let inv = rem[&pivot].checked_inv().expect("pivot is nonzero");
        let norm: SparseRow = rem.iter().map(|(&j, v)| (j, v * &inv)).collect();
        for (_, base) in self.rows.iter_mut() {
            if let Some(c) = base.get(&pivot).cloned() {
                for (&j, v) in &norm {
                    let delta = &c * v;
                    let entry = match base.remove(&j) {
                        Some(prev) => prev - delta,
                        None => -delta,
                    };
                    if !entry.is_zero() {
                        base.insert(j, entry);
                    }
                }
            }
        }
        self.rows.push((pivot, norm));
        self.rows.sort_by_key(|(p, _)| *p);
        true
    }

    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(row.clone()).is_empty()
    }

    pub fn nullspace(&self) -> Vec<Vec<FieldElem>> {
        let pivot_cols = self.pivots();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![FieldElem::zero(); self.cols];
            v[free] = FieldElem::one();
            for (pivot, row) in &self.rows {
                if let Some(c) = row.get(&free) {
                    v[*pivot] = -c;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// The span as row vectors (dense), pivot-ordered.
    pub fn dense_rows(&self) -> Vec<Vec<FieldElem>> {
        self.rows
            .iter()
            .map(|(_, row)| {
                let mut v = vec![FieldElem::zero(); self.cols];
                for (&j, c) in row {
                    v[j] = c.clone();
                }
                v
            })
            .collect()
    }
}

/// A linear subspace of `F^n`, kept in reduced row echelon form.
///
/// Because the RREF of a row space is unique, equality of spans is literal
/// equality of the reduced rows.
#[derive(Clone, Debug)]
pub struct Subspace {
    rref: Rref,
}

impl Subspace {
    pub fn empty(n: usize) -> Self {
        Subspace { rref: Rref::empty(n) }
    }

    pub fn from_vectors(n: usize, vecs: impl IntoIterator<Item = Vec<FieldElem>>) -> Self {
        let mut mat = SparseMat::new(n);
        for v in vecs {
            mat.push_dense_row(&v);
        }
        Subspace { rref: mat.rref() }
    }

    pub fn dim(&self) -> usize {
        self.rref.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rref.cols
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        let row: SparseRow = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        self.rref.contains(&row)
    }

    pub fn insert(&mut self, v: &[FieldElem]) -> bool {
        let row: SparseRow = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        self.rref.absorb(row)
    }

    pub fn basis(&self) -> Vec<Vec<FieldElem>> {
        self.rref.dense_rows()
    }

    pub fn same_span(&self, other: &Subspace) -> bool {
        self.rref.cols == other.rref.cols
            && self.rref.pivots() == other.rref.pivots()
            && self.rref.rows == other.rref.rows
    }
}

/// Plain dense forward elimination; an independent rank oracle for the
/// sparse RREF path.
pub fn dense_rank(rows: &[Vec<FieldElem>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<FieldElem>> = rows.to_vec();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].checked_inv().unwrap();
        for j in col..cols {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let c = m[i][col].clone();
                for j in col..cols {
                    let delta = &c * &m[rank][j];
                    m[i][j] = &m[i][j] - &delta;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

// ---------------------------------------------------------------------------
// Modular rank
// ---------------------------------------------------------------------------

/// Rank of a rational matrix reduced modulo a prime.
///
/// Returns `None` if some denominator vanishes mod `p` (caller should pick
/// another prime).  Quadratic-irrational entries are expanded to rational
/// 2x2 blocks first, which exactly doubles the rank, so the caller can
/// compare `2 * field rank` against the result in that case; the expansion
/// factor is returned alongside the rank.
pub fn rank_mod_prime(mat: &SparseMat, p: u64) -> Option<(usize, usize)> {
    let mut blocked = false;
    for row in &mat.rows {
        if row.values().any(|v| v.discriminant().is_some()) {
            blocked = true;
            break;
        }
    }
    let (rows, cols) = if blocked {
        let mut rows = Vec::with_capacity(mat.rows.len() * 2);
        for row in &mat.rows {
            let mut top: Vec<(usize, Rat)> = Vec::new();
            let mut bot: Vec<(usize, Rat)> = Vec::new();
            for (&j, v) in row {
                let (a, b) = v.parts();
                let d = v.discriminant().map(|d| Rat::from_integer(BigInt::from(d)));
                // (a + b sqrt(d)) acts on the Q-basis (1, sqrt(d)) of the
                // extension as the 2x2 rational matrix [[a, b d], [b, a]].
                top.push((2 * j, a.clone()));
                bot.push((2 * j + 1, a));
                if let Some(d) = d {
                    top.push((2 * j + 1, &b * d));
                    bot.push((2 * j, b));
                }
            }
            rows.push(top);
            rows.push(bot);
        }
        (rows, mat.cols * 2)
    } else {
        let rows = mat
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(&j, v)| (j, v.as_rational().unwrap().clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        (rows, mat.cols)
    };

    let mut fp_rows: Vec<Vec<u64>> = Vec::with_capacity(rows.len());
    for row in &rows {
        let mut dense = vec![0u64; cols];
        for (j, q) in row {
            let num = bigint_mod(q.numer(), p);
            let den = bigint_mod(q.denom(), p);
            if den == 0 {
                return None;
            }
            let inv = pow_mod_u64(den, p - 2, p);
            dense[*j] = mul_mod_u64(num, inv, p);
        }
        fp_rows.push(dense);
    }

    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pr) = (rank..fp_rows.len()).find(|&i| fp_rows[i][col] != 0) else {
            continue;
        };
        fp_rows.swap(rank, pr);
        let inv = pow_mod_u64(fp_rows[rank][col], p - 2, p);
        for j in col..cols {
            fp_rows[rank][j] = mul_mod_u64(fp_rows[rank][j], inv, p);
        }
        for i in 0..fp_rows.len() {
            if i != rank && fp_rows[i][col] != 0 {
                let c = fp_rows[i][col];
                for j in col..cols {
                    let sub = mul_mod_u64(c, fp_rows[rank][j], p);
                    fp_rows[i][j] = (fp_rows[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == fp_rows.len() {
            break;
        }
    }
    Some((rank, if blocked { 2 } else { 1 }))
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let m = n.magnitude() % p;
    let m = m.to_u64_digits().first().copied().unwrap_or(0);
    if n.sign() == Sign::Minus && m != 0 {
        p - m
    } else {
        m
    }
}

// ---------------------------------------------------------------------------
// Fraction-free elimination over Z[t]
// ---------------------------------------------------------------------------

/// Dense univariate integer polynomial (coefficients ascending), used as the
/// entry domain for Bareiss elimination.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IPoly(pub Vec<BigInt>);

impl IPoly {
    pub fn zero() -> Self {
        IPoly(Vec::new())
    }

    pub fn one() -> Self {
        IPoly(vec![BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    fn trim(mut v: Vec<BigInt>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        IPoly(v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::trim(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        Self::trim(out)
    }

    /// Exact division; panics if `other` does not divide `self` (which would
    /// indicate a broken elimination invariant).
    pub fn div_exact(&self, other: &Self) -> Self {
        self.try_div(other).expect("non-exact polynomial division")
    }

    /// Division in `Z[t]` when it is exact; `None` if `other` does not
    /// divide `self` over the integers.
    pub fn try_div(&self, other: &Self) -> Option<Self> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.0.len() < other.0.len() {
            return None;
        }
        let mut rem = self.0.clone();
        let dlead = other.0.last().unwrap();
        let ddeg = other.0.len() - 1;
        let mut quot = vec![BigInt::zero(); rem.len() - ddeg];
        for k in (0..quot.len()).rev() {
            let lead = rem[k + ddeg].clone();
            if lead.is_zero() {
                continue;
            }
            let (q, r) = num_integer::Integer::div_rem(&lead, dlead);
            if !r.is_zero() {
                return None;
            }
            for (i, c) in other.0.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::trim(quot))
        } else {
            None
        }
    }

    /// Primitive part with positive leading coefficient (roots preserved).
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = num_integer::Integer::gcd(&g, c);
        }
        if self.0.last().unwrap().is_negative() {
            g = -g;
        }
        IPoly(self.0.iter().map(|c| c / &g).collect())
    }

    pub fn to_multipoly(&self, param: &str) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for (i, c) in self.0.iter().enumerate() {
            let term = MultiPoly::var_pow(param, i as u32)
                .scale(&FieldElem::from_rat(Rat::from_integer(c.clone())));
            acc = &acc + &term;
        }
        acc
    }
}

/// Result of fraction-free elimination on a one-parameter matrix.
#[derive(Clone, Debug)]
pub struct FfRank {
    /// Generic rank (rank for all parameter values off the pivot locus).
    pub rank: usize,
    /// Successive pivot determinants (primitive, positive leading
    /// coefficient).  The rank can only drop at parameter values where the
    /// final pivots vanish; the union of their roots is a superset of the
    /// true drop locus.
    pub pivot_polys: Vec<MultiPoly>,
}

/// Fraction-free Bareiss elimination of a matrix of polynomials in the
/// single parameter `param`.  Entries must be univariate in `param` with
/// rational coefficients.
pub fn ff_rank(mat: &[Vec<MultiPoly>], param: &str) -> Result<FfRank, LinalgError> {
    let rows = mat.len();
    let cols = mat.first().map(|r| r.len()).unwrap_or(0);

    // Convert to Z[t], clearing denominators row by row (row scaling by a
    // nonzero rational changes neither the rank nor the vanishing locus).
    let mut m: Vec<Vec<IPoly>> = Vec::with_capacity(rows);
    for (i, row) in mat.iter().enumerate() {
        let mut lcm = BigInt::one();
        for (j, entry) in row.iter().enumerate() {
            if entry
                .vars()
                .iter()
                .any(|v| v != param)
            {
                return Err(LinalgError::NotUnivariate { row: i, col: j, param: param.into() });
            }
            if entry.discriminant().is_some() {
                return Err(LinalgError::IrrationalEntry { row: i, col: j });
            }
            for (_, c) in entry.terms() {
                let den = c.as_rational().unwrap().denom().clone();
                lcm = num_integer::Integer::lcm(&lcm, &den);
            }
        }
        let mut irow = Vec::with_capacity(cols);
        for entry in row {
            let deg = entry.degree_in(param).unwrap_or(0) as usize;
            let mut coeffs = vec![BigInt::zero(); deg + 1];
            for (mono, c) in entry.terms() {
                let e = mono.0.first().copied().unwrap_or(0) as usize;
                let q = c.as_rational().unwrap();
                let scaled = q * Rat::from_integer(lcm.clone());
                debug_assert!(scaled.denom().is_one());
                coeffs[e] = scaled.numer().clone();
            }
            irow.push(IPoly::trim(coeffs));
        }
        m.push(irow);
    }

    let mut pivots: Vec<IPoly> = Vec::new();
    let mut prev = IPoly::one();
    let mut r = 0usize;
    for col in 0..cols {
        if r >= rows {
            break;
        }
        // Lowest-degree pivot first: keeps entry growth down and avoids
        // spuriously parameter-dependent pivots when a constant is available.
        let pivot_row = (r..rows)
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| (m[i][col].degree().unwrap(), i));
        let Some(p) = pivot_row else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][col].clone();
        for i in r + 1..rows {
            for j in col + 1..cols {
                let t = pivot.mul(&m[i][j]).sub(&m[i][col].mul(&m[r][j]));
                m[i][j] = t.div_exact(&prev);
            }
            m[i][col] = IPoly::zero();
        }
        pivots.push(pivot.clone());
        prev = pivot;
        r += 1;
    }

    Ok(FfRank {
        rank: r,
        pivot_polys: pivots
            .iter()
            .map(|p| p.primitive().to_multipoly(param))
            .collect(),
    })
}

/// Evaluates a polynomial matrix at a concrete parameter value, producing a
/// scalar matrix (useful both to verify rank drops and as the dense-rank
/// oracle input).
pub fn eval_matrix(mat: &[Vec<MultiPoly>], param: &str, value: &FieldElem) -> Vec<Vec<FieldElem>> {
    mat.iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    e.specialize(param, value)
                        .as_constant()
                        .expect("entry did not specialize to a constant")
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat_int;

    fn fe(n: i64) -> FieldElem {
        FieldElem::from_int(n)
    }

    fn sparse_from(rows: &[&[i64]], cols: usize) -> SparseMat {
        let mut m = SparseMat::new(cols);
        for r in rows {
            let dense: Vec<FieldElem> = r.iter().map(|&x| fe(x)).collect();
            m.push_dense_row(&dense);
        }
        m
    }

    #[test]
    fn rref_rank_and_nullspace() {
        // x + y + z = 0, x - z = 0  =>  nullspace spanned by (1, -2, 1)
        let m = sparse_from(&[&[1, 1, 1], &[1, 0, -1]], 3);
        let ns = m.nullspace();
        assert_eq!(m.rank(), 2);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![fe(1), fe(-2), fe(1)]);
    }

    #[test]
    fn sparse_and_dense_ranks_agree() {
        let rows: Vec<Vec<FieldElem>> = vec![
            vec![fe(2), fe(4), fe(6), fe(0)],
            vec![fe(1), fe(2), fe(3), fe(0)],
            vec![fe(0), fe(1), fe(1), fe(5)],
            vec![fe(1), fe(3), fe(4), fe(5)],
        ];
        let mut m = SparseMat::new(4);
        for r in &rows {
            m.push_dense_row(r);
        }
        assert_eq!(m.rank(), dense_rank(&rows));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let m = sparse_from(&[&[1, 2, 3, 4], &[0, 1, -1, 2], &[1, 3, 2, 6]], 4);
        for v in m.nullspace() {
            for row in &m.rows {
                let mut acc = FieldElem::zero();
                for (&j, c) in row {
                    acc = &acc + &(c * &v[j]);
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn subspace_equality_is_span_equality() {
        let a = Subspace::from_vectors(3, vec![vec![fe(1), fe(0), fe(1)], vec![fe(0), fe(1), fe(1)]]);
        let b = Subspace::from_vectors(3, vec![vec![fe(1), fe(1), fe(2)], vec![fe(1), fe(-1), fe(0)]]);
        assert!(a.same_span(&b));
        assert!(a.contains(&[fe(2), fe(3), fe(5)]));
        assert!(!a.contains(&[fe(1), fe(0), fe(0)]));
    }

    #[test]
    fn modular_rank_matches_rational_rank() {
        let m = sparse_from(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]], 3);
        let (r, factor) = rank_mod_prime(&m, 1_000_003).unwrap();
        assert_eq!(factor, 1);
        assert_eq!(r, m.rank());
        assert_eq!(r, 2);
    }

    #[test]
    fn modular_rank_with_quadratic_entries_doubles() {
        let s = FieldElem::sqrt_of(19).unwrap();
        let mut m = SparseMat::new(2);
        m.push_dense_row(&[s.clone(), FieldElem::one()]);
        m.push_dense_row(&[FieldElem::from_int(19), s.clone()]);
        // Second row is sqrt(19) times the first: field rank 1.
        assert_eq!(m.rank(), 1);
        let (r, factor) = rank_mod_prime(&m, 1_000_003).unwrap();
        assert_eq!(factor, 2);
        assert_eq!(r, 2 * m.rank());
    }

    #[test]
    fn bareiss_identity_has_constant_pivots() {
        let id: Vec<Vec<MultiPoly>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { MultiPoly::one() } else { MultiPoly::zero() })
                    .collect()
            })
            .collect();
        let f = ff_rank(&id, "t").unwrap();
        assert_eq!(f.rank, 3);
        assert!(f.pivot_polys.iter().all(|p| p.total_degree() == Some(0)));
    }

    #[test]
    fn bareiss_pivot_locus_is_exact_for_swap_matrix() {
        // [[t, 1], [1, t]]: rank 2 generically, dropping exactly at t = +/-1.
        let t = MultiPoly::var("t");
        let mat = vec![
            vec![t.clone(), MultiPoly::one()],
            vec![MultiPoly::one(), t.clone()],
        ];
        let f = ff_rank(&mat, "t").unwrap();
        assert_eq!(f.rank, 2);
        // Lowest-degree pivoting selects the constant 1 first, so the pivot
        // set is {1, t^2 - 1} and its roots are exactly +/-1.
        let roots_poly = &f.pivot_polys[1];
        assert_eq!(
            roots_poly,
            &(&t * &t - MultiPoly::one())
        );
        for v in [-1i64, 1] {
            let eval = eval_matrix(&mat, "t", &fe(v));
            assert_eq!(dense_rank(&eval), 1);
        }
        let eval = eval_matrix(&mat, "t", &fe(3));
        assert_eq!(dense_rank(&eval), 2);
    }

    #[test]
    fn bareiss_division_stays_exact() {
        // Random-ish small integer matrix scaled with a parameter column.
        let t = MultiPoly::var("t");
        let c = |n: i64| MultiPoly::from_int(n);
        let mat = vec![
            vec![&c(2) * &t, c(3), c(5)],
            vec![c(7), &c(11) * &t, c(13)],
            vec![c(17), c(19), &c(23) * &t],
        ];
        let f = ff_rank(&mat, "t").unwrap();
        assert_eq!(f.rank, 3);
        // The final pivot is (up to scaling) the determinant; check at a
        // sample value against dense elimination.
        let det = &f.pivot_polys[2];
        let at2 = det.specialize("t", &fe(2));
        assert!(!at2.as_constant().unwrap().is_zero());
        assert_eq!(dense_rank(&eval_matrix(&mat, "t", &fe(2))), 3);
    }

    #[test]
    fn parametric_entries_must_be_univariate() {
        let mat = vec![vec![&MultiPoly::var("t") * &MultiPoly::var("u")]];
        assert!(matches!(
            ff_rank(&mat, "t"),
            Err(LinalgError::NotUnivariate { .. })
        ));
    }

    #[test]
    fn rational_coefficients_are_cleared_rowwise() {
        let half = MultiPoly::from_rat(rat_int(1) / rat_int(2));
        let t = MultiPoly::var("t");
        let mat = vec![vec![&half * &t, MultiPoly::one()], vec![MultiPoly::one(), t.clone()]];
        let f = ff_rank(&mat, "t").unwrap();
        assert_eq!(f.rank, 2);
        // Vanishing locus: t/2 * t - 1 = 0 -> t^2 - 2 (after clearing).
        assert_eq!(f.pivot_polys[1], &(&t * &t) - &MultiPoly::from_int(2));
    }
}
