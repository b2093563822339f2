//! Mode algebras of a conformal algebra.
//!
//! Expanding each generator into modes `g[m]` (`m` ranging over the
//! integers) turns a bracket table into an ordinary graded Lie algebra:
//! the bracket of two modes is a finite sum `[g_i[m], g_j[n]] =
//! sum_k c(m,n) * g_k[m+n-s]` whose coefficients are polynomials in the
//! symbolic indices and whose shifts `s` are fixed integers, and the
//! translation operator acts as the outer derivation
//! `[d, g[m]] = -(m+1) * g[m-1]`.
//!
//! Because every structure coefficient is polynomial in the indices, the
//! Lie axioms for the whole infinite family reduce to finitely many
//! polynomial identities; [`GradedLieFamily::check_graded_jacobi`]
//! verifies them exactly, covering all integer modes at once.
//!
//! The nonnegative modes span a subalgebra filtered by the lowest index;
//! cutting away all modes of index `>= N` yields the finite-dimensional
//! quotients built by [`GradedLieFamily::build_truncation`], which is
//! where solvability ([`derived_series`]) and the filtration relations
//! ([`filtration_checks`]) are checked.

use crate::field::FieldElem;
use crate::lca::ConformalAlgebra;
use crate::linalg::Subspace;
use crate::poly::MultiPoly;
use std::collections::BTreeMap;

/// One summand of a mode bracket: `coeff * g_gen[total - shift]`, where
/// `total` is `m + n` for pair brackets (coefficient in variables `m`,
/// `n`) and `m` for the derivation (coefficient in `m`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTerm {
    pub shift: i64,
    pub gen: usize,
    pub coeff: MultiPoly,
}

/// A graded Lie algebra presented by index-polynomial structure data.
#[derive(Debug, Clone)]
pub struct GradedLieFamily {
    pub names: Vec<String>,
    /// `brackets[i][j]` lists the terms of `[g_i[m], g_j[n]]`.
    pub brackets: Vec<Vec<Vec<ModeTerm>>>,
    /// `derivation[i]` lists the terms of `[d, g_i[m]]`, when the family
    /// carries the translation derivation.
    pub derivation: Option<Vec<Vec<ModeTerm>>>,
}

/// One failed identity with its exact residual polynomial.
#[derive(Debug, Clone)]
pub struct GradedWitness {
    pub context: String,
    pub residual: MultiPoly,
}

#[derive(Debug, Clone, Default)]
pub struct GradedReport {
    pub failures: Vec<GradedWitness>,
}

impl GradedReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for GradedReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "all graded identities hold");
        }
        writeln!(f, "{} failed identities:", self.failures.len())?;
        for w in &self.failures {
            writeln!(f, "  {}: residual {}", w.context, w.residual)?;
        }
        Ok(())
    }
}

/// `x * (x-1) * ... * (x-s+1)` for a polynomial argument.
fn falling(x: &MultiPoly, s: u32) -> MultiPoly {
    let mut acc = MultiPoly::one();
    for r in 0..s {
        acc = &acc * &(x - &MultiPoly::from_int(r as i64));
    }
    acc
}

/// Simultaneous substitution `m -> reps[0]`, `n -> reps[1]`, safe even
/// when the replacements themselves involve `m` or `n`.
fn rename_mn(p: &MultiPoly, rep_m: &MultiPoly, rep_n: &MultiPoly) -> MultiPoly {
    p.substitute("m", &MultiPoly::var("@m"))
        .substitute("n", &MultiPoly::var("@n"))
        .substitute("@m", rep_m)
        .substitute("@n", rep_n)
}

fn eval2(p: &MultiPoly, m: i64, n: i64) -> FieldElem {
    p.specialize("m", &FieldElem::from_int(m))
        .specialize("n", &FieldElem::from_int(n))
        .as_constant()
        .expect("mode coefficient must close over m, n")
}

/// Folds a list of terms into a canonical `(shift, generator) -> coeff`
/// map with zero entries dropped.
fn term_map(terms: &[ModeTerm]) -> BTreeMap<(i64, usize), MultiPoly> {
    let mut out: BTreeMap<(i64, usize), MultiPoly> = BTreeMap::new();
    for t in terms {
        let slot = out.entry((t.shift, t.gen)).or_insert_with(MultiPoly::zero);
        *slot = &*slot + &t.coeff;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl GradedLieFamily {
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Mode expansion of a bracket table.  Writing the table entry for
    /// generator `k` of `[g_i l g_j]` as `sum c * d^t * l^p`, the term
    /// contributes
    /// `c * (m+1)(m)...(m+2-p) * (-1)^t * (M)(M-1)...(M-t+1) * g_k[m+n-(p+t-1)]`
    /// with `M = m+n+2-p`, and the translation operator becomes the
    /// derivation `[d, g[m]] = -(m+1) g[m-1]`.
    pub fn family_from_conformal(alg: &ConformalAlgebra) -> Self {
        let rank = alg.rank();
        let m = MultiPoly::var("m");
        let n = MultiPoly::var("n");
        let m_plus_1 = &m + &MultiPoly::one();
        let mut brackets = vec![vec![Vec::new(); rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                let mut acc: BTreeMap<(i64, usize), MultiPoly> = BTreeMap::new();
                for (k, entry) in alg.bracket(i, j).iter().enumerate() {
                    for (mono, c) in entry.partition_by(&["d", "l"]) {
                        let (t, p) = (mono.0[0], mono.0[1]);
                        let c = c.as_constant().expect("bracket tables are constant in d, l");
                        let big_m = &(&m + &n) + &MultiPoly::from_int(2 - p as i64);
                        let mut coeff = &falling(&m_plus_1, p) * &falling(&big_m, t);
                        coeff = coeff.scale(&c);
                        if t % 2 == 1 {
                            coeff = -&coeff;
                        }
                        let key = (p as i64 + t as i64 - 1, k);
                        let slot = acc.entry(key).or_insert_with(MultiPoly::zero);
                        *slot = &*slot + &coeff;
                    }
                }
                acc.retain(|_, c| !c.is_zero());
                brackets[i][j] = acc
                    .into_iter()
                    .map(|((shift, gen), coeff)| ModeTerm { shift, gen, coeff })
                    .collect();
            }
        }
        let derivation = (0..rank)
            .map(|g| vec![ModeTerm { shift: 1, gen: g, coeff: -&m_plus_1 }])
            .collect();
        GradedLieFamily {
            names: alg.generators.clone(),
            brackets,
            derivation: Some(derivation),
        }
    }

    /// `[[g_a[va], g_b[vb]], g_c[vc]]` expanded symbolically, collected
    /// by `(total shift, target generator)`.
    fn double_bracket(
        &self,
        a: usize,
        b: usize,
        c: usize,
        va: &str,
        vb: &str,
        vc: &str,
    ) -> BTreeMap<(i64, usize), MultiPoly> {
        let mut out: BTreeMap<(i64, usize), MultiPoly> = BTreeMap::new();
        let pa = MultiPoly::var(va);
        let pb = MultiPoly::var(vb);
        let pc = MultiPoly::var(vc);
        for t1 in &self.brackets[a][b] {
            let q1 = rename_mn(&t1.coeff, &pa, &pb);
            let inner = &(&pa + &pb) - &MultiPoly::from_int(t1.shift);
            for t2 in &self.brackets[t1.gen][c] {
                let q2 = rename_mn(&t2.coeff, &inner, &pc);
                let slot = out
                    .entry((t1.shift + t2.shift, t2.gen))
                    .or_insert_with(MultiPoly::zero);
                *slot = &*slot + &(&q1 * &q2);
            }
        }
        out
    }

    /// Verifies antisymmetry, the Jacobi identity, and (when the
    /// derivation is present) its Leibniz rule, all as polynomial
    /// identities in the symbolic indices `m`, `n`, `k` — one check per
    /// generator tuple covers every integer instantiation.
    pub fn check_graded_jacobi(&self) -> GradedReport {
        let rank = self.rank();
        let mut report = GradedReport::default();
        let m = MultiPoly::var("m");
        let n = MultiPoly::var("n");

        for i in 0..rank {
            for j in 0..rank {
                let mut residuals = term_map(&self.brackets[i][j]);
                for t in &self.brackets[j][i] {
                    let swapped = rename_mn(&t.coeff, &n, &m);
                    let slot = residuals
                        .entry((t.shift, t.gen))
                        .or_insert_with(MultiPoly::zero);
                    *slot = &*slot + &swapped;
                }
                for ((shift, gen), r) in residuals {
                    if !r.is_zero() {
                        report.failures.push(GradedWitness {
                            context: format!(
                                "antisymmetry of [{}[m], {}[n]] at {}[m+n-{shift}]",
                                self.names[i], self.names[j], self.names[gen]
                            ),
                            residual: r,
                        });
                    }
                }
            }
        }

        for a in 0..rank {
            for b in 0..rank {
                for c in 0..rank {
                    let mut sum = self.double_bracket(a, b, c, "m", "n", "k");
                    for (key, v) in self.double_bracket(b, c, a, "n", "k", "m") {
                        let slot = sum.entry(key).or_insert_with(MultiPoly::zero);
                        *slot = &*slot + &v;
                    }
                    for (key, v) in self.double_bracket(c, a, b, "k", "m", "n") {
                        let slot = sum.entry(key).or_insert_with(MultiPoly::zero);
                        *slot = &*slot + &v;
                    }
                    for ((shift, gen), r) in sum {
                        if !r.is_zero() {
                            report.failures.push(GradedWitness {
                                context: format!(
                                    "jacobi for ({}[m], {}[n], {}[k]) at {}[m+n+k-{shift}]",
                                    self.names[a], self.names[b], self.names[c], self.names[gen]
                                ),
                                residual: r,
                            });
                        }
                    }
                }
            }
        }

        if let Some(der) = &self.derivation {
            for i in 0..rank {
                for j in 0..rank {
                    // [d, [g_i[m], g_j[n]]] - [[d, g_i[m]], g_j[n]]
                    //                       - [g_i[m], [d, g_j[n]]]
                    let mut res: BTreeMap<(i64, usize), MultiPoly> = BTreeMap::new();
                    for t in &self.brackets[i][j] {
                        let idx = &(&m + &n) - &MultiPoly::from_int(t.shift);
                        for dt in &der[t.gen] {
                            let dcoeff = rename_mn(&dt.coeff, &idx, &MultiPoly::zero());
                            let slot = res
                                .entry((t.shift + dt.shift, dt.gen))
                                .or_insert_with(MultiPoly::zero);
                            *slot = &*slot + &(&t.coeff * &dcoeff);
                        }
                    }
                    for dt in &der[i] {
                        let shifted_m = &m - &MultiPoly::from_int(dt.shift);
                        for t in &self.brackets[dt.gen][j] {
                            let q = rename_mn(&t.coeff, &shifted_m, &n);
                            let slot = res
                                .entry((dt.shift + t.shift, t.gen))
                                .or_insert_with(MultiPoly::zero);
                            *slot = &*slot - &(&dt.coeff * &q);
                        }
                    }
                    for dt in &der[j] {
                        let dcoeff = rename_mn(&dt.coeff, &n, &MultiPoly::zero());
                        let shifted_n = &n - &MultiPoly::from_int(dt.shift);
                        for t in &self.brackets[i][dt.gen] {
                            let q = rename_mn(&t.coeff, &m, &shifted_n);
                            let slot = res
                                .entry((dt.shift + t.shift, t.gen))
                                .or_insert_with(MultiPoly::zero);
                            *slot = &*slot - &(&dcoeff * &q);
                        }
                    }
                    for ((shift, gen), r) in res {
                        if !r.is_zero() {
                            report.failures.push(GradedWitness {
                                context: format!(
                                    "derivation rule on [{}[m], {}[n]] at {}[m+n-{shift}]",
                                    self.names[i], self.names[j], self.names[gen]
                                ),
                                residual: r,
                            });
                        }
                    }
                }
            }
        }

        report
    }

    /// Bracket of two concrete modes: `(generator, index, coefficient)`
    /// triples with zero coefficients dropped.
    pub fn bracket_modes(&self, i: usize, m: i64, j: usize, n: i64) -> Vec<(usize, i64, FieldElem)> {
        let mut out = Vec::new();
        for t in &self.brackets[i][j] {
            let c = eval2(&t.coeff, m, n);
            if !c.is_zero() {
                out.push((t.gen, m + n - t.shift, c));
            }
        }
        out
    }

    /// The quotient of the nonnegative-mode subalgebra by the span of all
    /// modes of index `>= n`, on the basis `g_0[0], ..., g_{r-1}[0],
    /// g_0[1], ...`.  The result is verified to satisfy antisymmetry and
    /// the Jacobi identity exactly on all basis triples.
    ///
    /// # Panics
    /// If `n == 0`, or if the family's mode brackets do not close into a
    /// Lie structure on the quotient.
    pub fn build_truncation(&self, n: usize) -> FiniteLieAlgebra {
        assert!(n >= 1, "truncation needs at least the index-0 modes");
        let rank = self.rank();
        let dim = rank * n;
        let labels = (0..n)
            .flat_map(|idx| self.names.iter().map(move |g| format!("{g}[{idx}]")))
            .collect();
        let mut sc = vec![vec![vec![FieldElem::zero(); dim]; dim]; dim];
        for mi in 0..n {
            for gi in 0..rank {
                for nj in 0..n {
                    for gj in 0..rank {
                        let x = mi * rank + gi;
                        let y = nj * rank + gj;
                        for (gen, idx, c) in
                            self.bracket_modes(gi, mi as i64, gj, nj as i64)
                        {
                            if idx < 0 || idx >= n as i64 {
                                continue;
                            }
                            let z = idx as usize * rank + gen;
                            sc[x][y][z] = &sc[x][y][z] + &c;
                        }
                    }
                }
            }
        }
        let out = FiniteLieAlgebra { labels, sc };
        out.verify();
        out
    }
}

/// A finite-dimensional Lie algebra given by structure constants over the
/// basis recorded in `labels`.
#[derive(Debug, Clone)]
pub struct FiniteLieAlgebra {
    pub labels: Vec<String>,
    /// `sc[x][y]` is the dense coordinate vector of `[e_x, e_y]`.
    pub sc: Vec<Vec<Vec<FieldElem>>>,
}

impl FiniteLieAlgebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Bracket extended bilinearly to coordinate vectors.
    pub fn bracket_vec(&self, u: &[FieldElem], v: &[FieldElem]) -> Vec<FieldElem> {
        let dim = self.dim();
        let mut out = vec![FieldElem::zero(); dim];
        for (x, cu) in u.iter().enumerate() {
            if cu.is_zero() {
                continue;
            }
            for (y, cv) in v.iter().enumerate() {
                if cv.is_zero() {
                    continue;
                }
                let scale = cu * cv;
                for (z, c) in self.sc[x][y].iter().enumerate() {
                    if !c.is_zero() {
                        out[z] = &out[z] + &(c * &scale);
                    }
                }
            }
        }
        out
    }

    /// Exact antisymmetry and Jacobi on all basis tuples.
    fn verify(&self) {
        let dim = self.dim();
        let unit = |x: usize| {
            let mut v = vec![FieldElem::zero(); dim];
            v[x] = FieldElem::one();
            v
        };
        for x in 0..dim {
            for y in 0..dim {
                for z in 0..dim {
                    let s = &self.sc[x][y][z] + &self.sc[y][x][z];
                    assert!(s.is_zero(), "antisymmetry fails at [{x},{y}] -> {z}");
                }
            }
        }
        for x in 0..dim {
            for y in 0..dim {
                for z in 0..dim {
                    let mut acc = self.bracket_vec(&self.bracket_vec(&unit(x), &unit(y)), &unit(z));
                    let t2 = self.bracket_vec(&self.bracket_vec(&unit(y), &unit(z)), &unit(x));
                    let t3 = self.bracket_vec(&self.bracket_vec(&unit(z), &unit(x)), &unit(y));
                    for i in 0..dim {
                        acc[i] = &(&acc[i] + &t2[i]) + &t3[i];
                        assert!(
                            acc[i].is_zero(),
                            "jacobi fails at ({x},{y},{z}) component {i}"
                        );
                    }
                }
            }
        }
    }
}

/// Dimensions of the derived series `g, [g,g], [[g,g],[g,g]], ...`,
/// listed until the first repeat or zero.  The algebra is solvable
/// exactly when the final entry is zero.
pub fn derived_series(g: &FiniteLieAlgebra) -> Vec<usize> {
    let dim = g.dim();
    let mut dims = vec![dim];
    let mut current = Subspace::from_vectors(
        dim,
        (0..dim).map(|x| {
            let mut v = vec![FieldElem::zero(); dim];
            v[x] = FieldElem::one();
            v
        }),
    );
    loop {
        let basis = current.basis();
        let mut next = Subspace::empty(dim);
        for (a, u) in basis.iter().enumerate() {
            for v in basis.iter().skip(a + 1) {
                next.insert(&g.bracket_vec(u, v));
            }
        }
        let nd = next.dim();
        dims.push(nd);
        if nd == 0 || nd == *dims.get(dims.len() - 2).unwrap() {
            break;
        }
        current = next;
    }
    dims
}

/// Filtration facts inside the `N`-truncation.
#[derive(Debug, Clone)]
pub struct FiltrationReport {
    pub truncation_n: usize,
    /// Dimension of the span of all brackets of basis modes.
    pub commutator_dim: usize,
    /// Whether that span equals `span{I[0]} + (all modes of index >= 1)`;
    /// present when the family has a generator named `I`.
    pub commutator_matches_distinguished: Option<bool>,
    /// Whether the derivation maps the span of modes of index `>= n` onto
    /// the span of modes of index `>= n-1`, for every `1 <= n < N`,
    /// modulo the top index `N-1` (whose preimage was truncated away);
    /// present when the family carries the derivation.
    pub derivation_image_ok: Option<bool>,
}

pub fn filtration_checks(family: &GradedLieFamily, n: usize) -> FiltrationReport {
    assert!(n >= 2, "filtration comparisons need at least indices 0 and 1");
    let rank = family.rank();
    let trunc = family.build_truncation(n);
    let dim = trunc.dim();
    let unit = |x: usize| {
        let mut v = vec![FieldElem::zero(); dim];
        v[x] = FieldElem::one();
        v
    };

    let mut commutator = Subspace::empty(dim);
    for x in 0..dim {
        for y in (x + 1)..dim {
            commutator.insert(&trunc.sc[x][y]);
        }
    }

    let commutator_matches_distinguished =
        family.names.iter().position(|s| s == "I").map(|i_gen| {
            let mut expected = Subspace::empty(dim);
            expected.insert(&unit(i_gen));
            for idx in 1..n {
                for g in 0..rank {
                    expected.insert(&unit(idx * rank + g));
                }
            }
            expected.same_span(&commutator)
        });

    let derivation_image_ok = family.derivation.as_ref().map(|der| {
        let tail = |from: usize| {
            let mut s = Subspace::empty(dim);
            for idx in from..n {
                for g in 0..rank {
                    s.insert(&unit(idx * rank + g));
                }
            }
            s
        };
        let top = tail(n - 1);
        (1..n).all(|lvl| {
            let mut image = Subspace::empty(dim);
            let mut image_plus_top = top.clone();
            for idx in lvl..n {
                for g in 0..rank {
                    let mut v = vec![FieldElem::zero(); dim];
                    for dt in &der[g] {
                        let target = idx as i64 - dt.shift;
                        if target < 0 || target >= n as i64 {
                            continue;
                        }
                        let c = eval2(&dt.coeff, idx as i64, 0);
                        let slot = target as usize * rank + dt.gen;
                        v[slot] = &v[slot] + &c;
                    }
                    image.insert(&v);
                    image_plus_top.insert(&v);
                }
            }
            let lower = tail(lvl - 1);
            let mut lower_plus_top = top.clone();
            for b in lower.basis() {
                lower_plus_top.insert(&b);
            }
            image.basis().iter().all(|v| lower.contains(v))
                && image_plus_top.same_span(&lower_plus_top)
        })
    });

    FiltrationReport {
        truncation_n: n,
        commutator_dim: commutator.dim(),
        commutator_matches_distinguished,
        derivation_image_ok,
    }
}
