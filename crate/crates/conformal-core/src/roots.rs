//! Exact real roots of univariate polynomials with rational coefficients.
//!
//! The solver returns every rational root and every real root lying in a
//! quadratic extension `Q(sqrt(d))` with a certified squarefree `d`, each
//! with its multiplicity.  Factors whose roots cannot be represented that
//! way -- complex-conjugate pairs, irreducible factors of degree three or
//! more, or quadratic factors whose discriminant cannot be certified
//! squarefree within `u64` -- are returned verbatim as residual factors, so
//! the caller always knows whether the root list is complete over the reals.
//!
//! Pipeline: Yun squarefree decomposition over `Q`; for each squarefree
//! factor, degree one and two are solved directly, while higher degrees are
//! factored modulo a 59-bit prime (distinct-degree then equal-degree
//! splitting), linear and quadratic modular factors are Hensel-lifted past
//! the Landau-Mignotte coefficient bound, and every candidate factor is
//! verified by exact trial division before any root is reported.  Reported
//! roots are re-checked against the original polynomial, so a factorization
//! bug cannot silently produce a wrong root.

use crate::field::{certify_squarefree, is_prime_u64, mul_mod_u64, pow_mod_u64, FieldElem, Rat};
use crate::linalg::IPoly;
use crate::poly::MultiPoly;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootsError {
    #[error("the zero polynomial vanishes everywhere; no finite root list exists")]
    ZeroPolynomial,
    #[error("polynomial involves variables {0:?}; expected only the root variable")]
    NotUnivariate(Vec<String>),
    #[error("polynomial has quadratic-irrational coefficients; root search runs over the rationals")]
    IrrationalCoefficients,
    #[error("no usable prime found for modular factorization")]
    PrimeSearchFailed,
}

/// Why a factor could not be resolved into representable real roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualReason {
    /// Negative discriminant: the factor has no real roots at all.
    NoRealRoots,
    /// The squarefree part of the discriminant could not be certified
    /// within `u64`, so the (real) roots are not representable here.
    UncertifiedDiscriminant,
    /// Irreducible over `Q` of degree three or more.
    HighDegree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualFactor {
    /// Primitive integer form of the unresolved factor.
    pub factor: MultiPoly,
    pub multiplicity: u32,
    pub reason: ResidualReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    /// Roots with multiplicities, sorted deterministically (rationals
    /// first, then by discriminant, then by coordinates).
    pub roots: Vec<(FieldElem, u32)>,
    /// Factors whose real roots (if any) are not representable.
    pub residual: Vec<ResidualFactor>,
}

impl RootReport {
    /// True when every root over the complex numbers was captured, i.e.
    /// there are no residual factors at all.
    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }
}

/// All representable real roots of a univariate polynomial in `var`.
pub fn univ_roots(p: &MultiPoly, var: &str) -> Result<RootReport, RootsError> {
    let stray: Vec<String> = p.vars().iter().filter(|v| *v != var).cloned().collect();
    if !stray.is_empty() {
        return Err(RootsError::NotUnivariate(stray));
    }
    if p.discriminant().is_some() {
        return Err(RootsError::IrrationalCoefficients);
    }
    if p.is_zero() {
        return Err(RootsError::ZeroPolynomial);
    }

    let f = q_from_multipoly(p, var);
    let mut roots: Vec<(FieldElem, u32)> = Vec::new();
    let mut residual: Vec<ResidualFactor> = Vec::new();
    if q_deg(&f) == 0 {
        return Ok(RootReport { roots, residual });
    }

    for (factor, mult) in yun_squarefree(&f) {
        match q_deg(&factor) {
            0 => {}
            1 => {
                // monic x + c -> root -c
                let r = -factor[0].clone();
                roots.push((FieldElem::from_rat(r), mult));
            }
            2 => {
                quadratic_roots(&factor[1], &factor[0], mult, var, &mut roots, &mut residual);
            }
            _ => factor_high_degree(&factor, mult, var, &mut roots, &mut residual)?,
        }
    }

    // Exactness gate: every reported root must annihilate the input.
    for (r, _) in &roots {
        let val = p.specialize(var, r);
        assert!(val.is_zero(), "root verification failed for {r}");
    }
    // Degree accounting: roots + residual factors must exhaust the input.
    let claimed: u32 = roots.iter().map(|(_, m)| m).sum::<u32>()
        + residual
            .iter()
            .map(|r| r.multiplicity * r.factor.total_degree().unwrap_or(0))
            .sum::<u32>();
    assert_eq!(
        claimed,
        p.degree_in(var).unwrap_or(0),
        "root multiplicities and residual degrees must sum to the degree"
    );

    roots.sort_by(|(x, _), (y, _)| {
        let kx = (x.discriminant(), x.parts());
        let ky = (y.discriminant(), y.parts());
        kx.cmp(&ky)
    });
    Ok(RootReport { roots, residual })
}

// ---------------------------------------------------------------------------
// Dense rational polynomials (coefficients ascending, always trimmed)
// ---------------------------------------------------------------------------

type QPoly = Vec<Rat>;

fn q_trim(mut v: QPoly) -> QPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn q_deg(f: &QPoly) -> usize {
    debug_assert!(!f.is_empty());
    f.len() - 1
}

fn q_from_multipoly(p: &MultiPoly, var: &str) -> QPoly {
    let deg = p.degree_in(var).unwrap_or(0) as usize;
    let mut out = vec![Rat::zero(); deg + 1];
    for (mono, c) in p.terms() {
        let e = mono.0.first().copied().unwrap_or(0) as usize;
        out[e] = c.as_rational().unwrap().clone();
    }
    q_trim(out)
}

fn q_to_primitive_multipoly(f: &QPoly, var: &str) -> MultiPoly {
    ipoly_from_q(f).primitive().to_multipoly(var)
}

fn q_deriv(f: &QPoly) -> QPoly {
    let mut out = Vec::with_capacity(f.len().saturating_sub(1));
    for (i, c) in f.iter().enumerate().skip(1) {
        out.push(c * Rat::from_integer(BigInt::from(i)));
    }
    q_trim(out)
}

fn q_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    q_trim(out)
}

fn q_make_monic(f: &QPoly) -> QPoly {
    let lc = f.last().expect("monic normalization of zero polynomial");
    f.iter().map(|c| c / lc).collect()
}

/// Division with remainder; divisor must be nonzero.
fn q_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    assert!(!b.is_empty());
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let mut rem = a.clone();
    let mut quot = vec![Rat::zero(); a.len() - b.len() + 1];
    let lc = b.last().unwrap();
    for k in (0..quot.len()).rev() {
        let c = &rem[k + b.len() - 1] / lc;
        if c.is_zero() {
            continue;
        }
        for (i, bc) in b.iter().enumerate() {
            let delta = &c * bc;
            rem[k + i] -= delta;
        }
        quot[k] = c;
    }
    (q_trim(quot), q_trim(rem))
}

fn q_div_exact(a: &QPoly, b: &QPoly) -> QPoly {
    let (q, r) = q_divrem(a, b);
    assert!(r.is_empty(), "expected exact polynomial division");
    q
}

fn q_gcd_monic(a: &QPoly, b: &QPoly) -> QPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_empty() {
        let (_, r) = q_divrem(&x, &y);
        x = y;
        y = r;
    }
    if x.is_empty() {
        x
    } else {
        q_make_monic(&x)
    }
}

/// Yun's squarefree decomposition: returns monic pairwise-coprime
/// squarefree factors with their multiplicities.
fn yun_squarefree(f: &QPoly) -> Vec<(QPoly, u32)> {
    let f = q_make_monic(f);
    let df = q_deriv(&f);
    let g = q_gcd_monic(&f, &df);
    if g.len() <= 1 {
        return vec![(f, 1)];
    }
    let mut out = Vec::new();
    let mut b = q_div_exact(&f, &g);
    let mut d = q_sub(&q_div_exact(&df, &g), &q_deriv(&b));
    let mut i = 1u32;
    loop {
        let a = q_gcd_monic(&b, &d);
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = q_div_exact(&b, &a);
        if b.len() <= 1 {
            break;
        }
        let c = q_div_exact(&d, &a);
        d = q_sub(&c, &q_deriv(&b));
        i += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Quadratics: exact roots via certified discriminant splitting
// ---------------------------------------------------------------------------

/// Roots of the monic quadratic `x^2 + b x + c`, pushed with multiplicity.
fn quadratic_roots(
    b: &Rat,
    c: &Rat,
    mult: u32,
    var: &str,
    roots: &mut Vec<(FieldElem, u32)>,
    residual: &mut Vec<ResidualFactor>,
) {
    let disc = b * b - Rat::from_integer(BigInt::from(4)) * c;
    let factor_poly =
        || q_to_primitive_multipoly(&vec![c.clone(), b.clone(), Rat::one()], var);
    assert!(!disc.is_zero(), "squarefree quadratic cannot have a double root");
    if disc.is_negative() {
        residual.push(ResidualFactor {
            factor: factor_poly(),
            multiplicity: mult,
            reason: ResidualReason::NoRealRoots,
        });
        return;
    }
    // sqrt(n/d) = sqrt(n*d)/d; split n*d as s^2 * k with k certified
    // squarefree.
    let nd = disc.numer() * disc.denom();
    let Some((s, k)) = split_square(&nd) else {
        residual.push(ResidualFactor {
            factor: factor_poly(),
            multiplicity: mult,
            reason: ResidualReason::UncertifiedDiscriminant,
        });
        return;
    };
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let base = -b * &half; // -b/2
    let scale = Rat::new(s, disc.denom() * BigInt::from(2)); // s/(2d)
    if k == 1 {
        roots.push((FieldElem::from_rat(&base + &scale), mult));
        roots.push((FieldElem::from_rat(&base - &scale), mult));
    } else {
        let plus = FieldElem::quadratic(base.clone(), scale.clone(), k)
            .expect("split_square returned an uncertified discriminant");
        let minus = FieldElem::quadratic(base, -scale, k).unwrap();
        roots.push((plus, mult));
        roots.push((minus, mult));
    }
}

/// Writes `n > 0` as `s^2 * k` with `k` certified squarefree (`k = 1` for a
/// perfect square).  `None` when the squarefree part cannot be certified or
/// does not fit in `u64`.
fn split_square(n: &BigInt) -> Option<(BigInt, u64)> {
    assert!(n.is_positive());
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut k: u128 = 1;
    let mut p: u64 = 2;
    while p <= 10_000 {
        let pb = BigInt::from(p);
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            for _ in 0..e / 2 {
                s *= &pb;
            }
            if e % 2 == 1 {
                k *= p as u128;
                if k > u64::MAX as u128 {
                    return None;
                }
            }
        }
        p += 1;
    }
    if !rest.is_one() {
        // rest has no prime factor <= 10^4.
        let sq = rest.sqrt();
        if (&sq * &sq) == rest {
            s *= sq;
        } else {
            let r64 = rest.to_u64()?;
            // No small factors and not a square: squarefree iff it avoids
            // p^2*q / p^3 shapes, which certify_squarefree decides safely.
            if !certify_squarefree(r64) {
                return None;
            }
            k = k.checked_mul(r64 as u128)?;
            if k > u64::MAX as u128 {
                return None;
            }
        }
    }
    let k64 = k as u64;
    if k64 != 1 && !certify_squarefree(k64) {
        return None;
    }
    Some((s, k64))
}

// ---------------------------------------------------------------------------
// Degree >= 3: modular factorization with Hensel lifting
// ---------------------------------------------------------------------------

fn ipoly_from_q(f: &QPoly) -> IPoly {
    let mut lcm = BigInt::one();
    for c in f {
        lcm = lcm.lcm(c.denom());
    }
    let coeffs = f
        .iter()
        .map(|c| {
            let scaled = c * Rat::from_integer(lcm.clone());
            debug_assert!(scaled.denom().is_one());
            scaled.numer().clone()
        })
        .collect::<Vec<_>>();
    IPoly(coeffs).primitive()
}

fn factor_high_degree(
    g: &QPoly,
    mult: u32,
    var: &str,
    roots: &mut Vec<(FieldElem, u32)>,
    residual: &mut Vec<ResidualFactor>,
) -> Result<(), RootsError> {
    let fz = ipoly_from_q(g);
    let n = fz.0.len() - 1;
    let lc = fz.0.last().unwrap().clone();

    // Monicize: F(x) = lc^(n-1) * fz(x/lc) is monic over Z and its roots
    // are lc times the roots of fz.
    let mut fcoeffs = Vec::with_capacity(n + 1);
    for (i, c) in fz.0.iter().enumerate() {
        let mut t = c.clone();
        for _ in 0..(n - 1).saturating_sub(i) {
            t *= &lc;
        }
        if n >= 1 && i == n {
            // leading coefficient becomes 1: c * lc^(n-1-n) would be c/lc
            t = BigInt::one();
        }
        fcoeffs.push(t);
    }
    let f_monic = IPoly(fcoeffs);
    debug_assert!(f_monic.0.last().unwrap().is_one());

    let p = choose_prime(&f_monic)?;

    // Modular factor data of degree one and two.
    let fp: Vec<u64> = f_monic.0.iter().map(|c| bigint_mod_u64(c, p)).collect();
    let (part1, part2) = ddf_low_degrees(&fp, p);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let linear_parts = edf(&part1, 1, p, &mut rng);
    let quad_parts = edf(&part2, 2, p, &mut rng);
    let mod_roots: Vec<u64> = linear_parts
        .iter()
        .map(|h| {
            debug_assert_eq!(h.len(), 2);
            (p - h[0] % p) % p
        })
        .collect();

    // Landau-Mignotte bound for coefficients of monic factors of degree
    // <= 2, and lifting precision p^k exceeding twice that bound.
    let norm2: BigInt = f_monic.0.iter().map(|c| c * c).sum::<BigInt>().sqrt() + BigInt::one();
    let bound: BigInt = (BigInt::one() << (n as u32 + 1)) * &norm2;
    let mut modulus = BigInt::from(p);
    let mut k = 1u32;
    let two_bound = &bound * BigInt::from(2) + BigInt::one();
    while modulus < two_bound {
        modulus *= BigInt::from(p);
        k += 1;
    }

    let lifted_roots: Vec<BigInt> = mod_roots
        .iter()
        .map(|&c| newton_lift_root(&f_monic, c, p, k))
        .collect();
    let lifted_quads: Vec<(BigInt, BigInt)> = quad_parts
        .iter()
        .map(|h| hensel_lift_quadratic(&f_monic, h, &fp, p, k))
        .collect();

    // Remaining unfactored parts, over Z (monicized) and over Q (original).
    let mut f_rem = f_monic.clone();
    let mut g_rem = g.clone();
    let mut consumed = vec![false; lifted_roots.len()];

    // Linear factors first: monic F has integer roots; map back via x = lc*y.
    for (i, c) in lifted_roots.iter().enumerate() {
        let sym = symmetric_rem(c, &modulus);
        let cand = IPoly(vec![-sym.clone(), BigInt::one()]);
        if let Some(q) = f_rem.try_div(&cand) {
            f_rem = q;
            consumed[i] = true;
            let root = Rat::new(sym, lc.clone());
            g_rem = q_div_exact(&g_rem, &vec![-root.clone(), Rat::one()]);
            roots.push((FieldElem::from_rat(root), mult));
        }
    }

    // Quadratic factors irreducible mod p.
    for (u, v) in &lifted_quads {
        let su = symmetric_rem(u, &modulus);
        let sv = symmetric_rem(v, &modulus);
        let cand = IPoly(vec![sv.clone(), su.clone(), BigInt::one()]);
        if let Some(q) = f_rem.try_div(&cand) {
            f_rem = q;
            // x^2 + su*x + sv with x = lc*y: y^2 + (su/lc) y + (sv/lc^2)
            let bq = Rat::new(su, lc.clone());
            let cq = Rat::new(sv, &lc * &lc);
            absorb_quadratic(bq, cq, mult, var, &mut g_rem, roots, residual);
        }
    }

    // Quadratic factors that split mod p: pair the leftover lifted roots.
    for i in 0..lifted_roots.len() {
        if consumed[i] {
            continue;
        }
        for j in i + 1..lifted_roots.len() {
            if consumed[i] || consumed[j] {
                continue;
            }
            let u = (-(&lifted_roots[i] + &lifted_roots[j])).mod_floor(&modulus);
            let v = (&lifted_roots[i] * &lifted_roots[j]).mod_floor(&modulus);
            let su = symmetric_rem(&u, &modulus);
            let sv = symmetric_rem(&v, &modulus);
            let cand = IPoly(vec![sv.clone(), su.clone(), BigInt::one()]);
            if let Some(q) = f_rem.try_div(&cand) {
                f_rem = q;
                consumed[i] = true;
                consumed[j] = true;
                let bq = Rat::new(su, lc.clone());
                let cq = Rat::new(sv, &lc * &lc);
                absorb_quadratic(bq, cq, mult, var, &mut g_rem, roots, residual);
            }
        }
    }

    if g_rem.len() > 1 {
        residual.push(ResidualFactor {
            factor: q_to_primitive_multipoly(&g_rem, var),
            multiplicity: mult,
            reason: ResidualReason::HighDegree,
        });
    }
    Ok(())
}

/// Divides a verified monic quadratic factor out of `g_rem` and reports its
/// roots.
fn absorb_quadratic(
    bq: Rat,
    cq: Rat,
    mult: u32,
    var: &str,
    g_rem: &mut QPoly,
    roots: &mut Vec<(FieldElem, u32)>,
    residual: &mut Vec<ResidualFactor>,
) {
    let divisor = vec![cq.clone(), bq.clone(), Rat::one()];
    *g_rem = q_div_exact(g_rem, &divisor);
    quadratic_roots(&bq, &cq, mult, var, roots, residual);
}

/// First prime above 2^59 for which the monic polynomial stays squarefree.
fn choose_prime(f: &IPoly) -> Result<u64, RootsError> {
    let mut cand: u64 = (1u64 << 59) + 1;
    for _ in 0..2000 {
        if is_prime_u64(cand) {
            let fp: Vec<u64> = f.0.iter().map(|c| bigint_mod_u64(c, cand)).collect();
            let dfp = fp_deriv(&fp, cand);
            let g = fp_gcd(&fp, &dfp, cand);
            if g.len() == 1 {
                return Ok(cand);
            }
        }
        cand += 2;
    }
    Err(RootsError::PrimeSearchFailed)
}

fn bigint_mod_u64(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn symmetric_rem(c: &BigInt, modulus: &BigInt) -> BigInt {
    let c = c.mod_floor(modulus);
    if &c * BigInt::from(2) > *modulus {
        c - modulus
    } else {
        c
    }
}

// ---------------------------------------------------------------------------
// Arithmetic in F_p[x] (dense, coefficients ascending, trimmed)
// ---------------------------------------------------------------------------

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, &c) in a.iter().enumerate() {
        out[i] = c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] = (out[i] + c) % p;
    }
    fp_trim(out)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, &c) in a.iter().enumerate() {
        out[i] = c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] = (out[i] + p - c) % p;
    }
    fp_trim(out)
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod_u64(x, y, p)) % p;
        }
    }
    fp_trim(out)
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty());
    if a.len() < b.len() {
        return (Vec::new(), a.to_vec());
    }
    let inv_lc = pow_mod_u64(*b.last().unwrap(), p - 2, p);
    let mut rem = a.to_vec();
    let mut quot = vec![0u64; a.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let c = mul_mod_u64(rem[k + b.len() - 1], inv_lc, p);
        if c == 0 {
            continue;
        }
        quot[k] = c;
        for (i, &bc) in b.iter().enumerate() {
            let sub = mul_mod_u64(c, bc, p);
            rem[k + i] = (rem[k + i] + p - sub) % p;
        }
    }
    (fp_trim(quot), fp_trim(rem))
}

fn fp_make_monic(a: &[u64], p: u64) -> Vec<u64> {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => {
            let inv = pow_mod_u64(lc, p - 2, p);
            a.iter().map(|&c| mul_mod_u64(c, inv, p)).collect()
        }
    }
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        let (_, r) = fp_divrem(&x, &y, p);
        x = y;
        y = r;
    }
    fp_make_monic(&x, p)
}

/// Extended Euclid: returns `(s, t)` with `s*a + t*b = 1`; requires
/// `gcd(a, b) = 1`.
fn fp_bezout(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0: Vec<u64> = vec![1];
    let mut s1: Vec<u64> = Vec::new();
    let mut t0: Vec<u64> = Vec::new();
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    assert_eq!(r0.len(), 1, "bezout arguments must be coprime");
    let inv = pow_mod_u64(r0[0], p - 2, p);
    let s = s0.iter().map(|&c| mul_mod_u64(c, inv, p)).collect();
    let t = t0.iter().map(|&c| mul_mod_u64(c, inv, p)).collect();
    (s, t)
}

fn fp_deriv(a: &[u64], p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len().saturating_sub(1));
    for (i, &c) in a.iter().enumerate().skip(1) {
        out.push(mul_mod_u64(c, (i as u64) % p, p));
    }
    fp_trim(out)
}

fn fp_powmod(base: &[u64], exp: &BigUint, m: &[u64], p: u64) -> Vec<u64> {
    debug_assert!(q_len_deg(m) >= 1, "modulus must be non-constant");
    let mut acc: Vec<u64> = vec![1];
    let (_, base) = fp_divrem(base, m, p);
    for i in (0..exp.bits()).rev() {
        acc = fp_divrem(&fp_mul(&acc, &acc, p), m, p).1;
        if exp.bit(i) {
            acc = fp_divrem(&fp_mul(&acc, &base, p), m, p).1;
        }
    }
    acc
}

/// Distinct-degree split: returns the (monic) products of all irreducible
/// factors of degree one and degree two; factors of higher degree are
/// discarded (they cannot contribute representable roots).
fn ddf_low_degrees(f: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = fp_make_monic(f, p);
    let x: Vec<u64> = vec![0, 1];
    let mut part1: Vec<u64> = vec![1];
    let mut part2: Vec<u64> = vec![1];
    let mut frob: Option<Vec<u64>> = None;

    // degree-one factors
    if q_len_deg(&rem) == 1 {
        part1 = rem.clone();
        rem = vec![1];
    } else if q_len_deg(&rem) >= 2 {
        let h = fp_powmod(&x, &BigUint::from(p), &rem, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &rem, p);
        if q_len_deg(&g) > 0 {
            part1 = g.clone();
            rem = fp_divrem(&rem, &g, p).0;
        }
        frob = Some(fp_divrem(&h, &rem, p).1);
    }

    // degree-two factors
    if q_len_deg(&rem) == 2 {
        part2 = rem.clone();
    } else if q_len_deg(&rem) >= 4 {
        let h1 = frob.expect("frobenius power available when degree >= 2 remained");
        let h2 = fp_powmod(&h1, &BigUint::from(p), &rem, p);
        let g = fp_gcd(&fp_sub(&h2, &x, p), &rem, p);
        if q_len_deg(&g) > 0 {
            part2 = g;
        }
    }
    (part1, part2)
}

fn q_len_deg(f: &[u64]) -> usize {
    f.len().saturating_sub(1)
}

/// Equal-degree splitting (Cantor-Zassenhaus) of a monic product of
/// distinct irreducible degree-`d` polynomials.
fn edf(part: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    let deg = q_len_deg(part);
    if deg == 0 {
        return Vec::new();
    }
    if deg == d {
        return vec![fp_make_monic(part, p)];
    }
    let exp: BigUint = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let r: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
        let r = fp_trim(r);
        if q_len_deg(&r) == 0 {
            continue;
        }
        let s = fp_powmod(&r, &exp, part, p);
        let mut s1 = s.clone();
        if s1.is_empty() {
            s1 = vec![p - 1];
        } else {
            s1[0] = (s1[0] + p - 1) % p;
            s1 = fp_trim(s1);
        }
        let g = fp_gcd(&s1, part, p);
        let gd = q_len_deg(&g);
        if gd > 0 && gd < deg {
            let cof = fp_divrem(part, &g, p).0;
            let mut out = edf(&g, d, p, rng);
            out.extend(edf(&cof, d, p, rng));
            return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Lifting mod p^k
// ---------------------------------------------------------------------------

fn eval_mod(f: &IPoly, c: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for coeff in f.0.iter().rev() {
        acc = (acc * c + coeff).mod_floor(modulus);
    }
    acc
}

/// Newton lift of a simple root from mod p to mod p^k.
fn newton_lift_root(f: &IPoly, c0: u64, p: u64, k: u32) -> BigInt {
    let deriv = IPoly(
        f.0.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    );
    let pb = BigInt::from(p);
    let d0 = eval_mod(&deriv, &BigInt::from(c0), &pb).to_u64().unwrap();
    assert!(d0 != 0, "root is not simple mod p");
    let inv0 = pow_mod_u64(d0, p - 2, p);

    let mut c = BigInt::from(c0);
    let mut modulus = pb.clone();
    for _ in 1..k {
        let next = &modulus * &pb;
        let e = eval_mod(f, &c, &next);
        debug_assert!((&e % &modulus).is_zero());
        let t_small = (&e / &modulus).to_u64().unwrap();
        let delta = (p - mul_mod_u64(t_small, inv0, p)) % p;
        c += &modulus * BigInt::from(delta);
        modulus = next;
    }
    debug_assert!(eval_mod(f, &c, &modulus).is_zero());
    c
}

/// Linear Hensel lift of a monic quadratic factor `h0` of monic `f` from
/// mod p to mod p^k; returns the lifted `(u, v)` of `x^2 + u x + v`.
fn hensel_lift_quadratic(f: &IPoly, h0: &[u64], fp: &[u64], p: u64, k: u32) -> (BigInt, BigInt) {
    let h0 = fp_make_monic(h0, p);
    let g0 = {
        let (q, r) = fp_divrem(fp, &h0, p);
        debug_assert!(r.is_empty());
        q
    };
    let (s, t) = fp_bezout(&h0, &g0, p);

    let pb = BigInt::from(p);
    let mut h: Vec<BigInt> = h0.iter().map(|&c| BigInt::from(c)).collect();
    let mut g: Vec<BigInt> = g0.iter().map(|&c| BigInt::from(c)).collect();
    let mut modulus = pb.clone();
    for _ in 1..k {
        let next = &modulus * &pb;
        // e = (f - h*g) / modulus  (mod p)
        let mut prod = vec![BigInt::zero(); h.len() + g.len() - 1];
        for (i, a) in h.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let mut e = vec![0u64; f.0.len()];
        for i in 0..f.0.len() {
            let diff = (&f.0[i] - prod.get(i).cloned().unwrap_or_default()).mod_floor(&next);
            debug_assert!((&diff % &modulus).is_zero());
            e[i] = (&diff / &modulus).to_u64().unwrap();
        }
        let e = fp_trim(e);
        let (q, r) = fp_divrem(&fp_mul(&t, &e, p), &h0, p);
        let dh = r;
        let dg = fp_add(&fp_mul(&s, &e, p), &fp_mul(&q, &g0, p), p);
        for (i, c) in dh.iter().enumerate() {
            h[i] = (&h[i] + &modulus * BigInt::from(*c)).mod_floor(&next);
        }
        for (i, c) in dg.iter().enumerate() {
            g[i] = (&g[i] + &modulus * BigInt::from(*c)).mod_floor(&next);
        }
        modulus = next;
    }
    debug_assert_eq!(h.len(), 3);
    (h[1].clone(), h[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_int};

    fn t() -> MultiPoly {
        MultiPoly::var("t")
    }

    fn poly_from_roots(rs: &[(i64, i64)]) -> MultiPoly {
        // product of (den*t - num)
        let mut acc = MultiPoly::one();
        for &(num, den) in rs {
            let lin = &(&t() * &MultiPoly::from_int(den)) - &MultiPoly::from_int(num);
            acc = &acc * &lin;
        }
        acc
    }

    #[test]
    fn linear_and_cubed_roots() {
        // (t - 1)(t + 2)^3
        let f = &poly_from_roots(&[(1, 1)])
            * &poly_from_roots(&[(-2, 1), (-2, 1), (-2, 1)]);
        let rep = univ_roots(&f, "t").unwrap();
        assert!(rep.is_complete());
        assert_eq!(
            rep.roots,
            vec![
                (FieldElem::from_int(-2), 3),
                (FieldElem::from_int(1), 1),
            ]
        );
    }

    #[test]
    fn quadratic_with_surd_roots() {
        // 2t^2 + 10t + 3: roots -5/2 +/- sqrt(19)/2
        let f = &(&MultiPoly::from_int(2) * &(&t() * &t()))
            + &(&(&MultiPoly::from_int(10) * &t()) + &MultiPoly::from_int(3));
        let rep = univ_roots(&f, "t").unwrap();
        assert!(rep.is_complete());
        let minus = FieldElem::quadratic(rat(-5, 2), rat(-1, 2), 19).unwrap();
        let plus = FieldElem::quadratic(rat(-5, 2), rat(1, 2), 19).unwrap();
        assert_eq!(rep.roots, vec![(minus, 1), (plus, 1)]);
    }

    #[test]
    fn complex_pair_is_residual() {
        let f = &(&t() * &t()) + &MultiPoly::one();
        let rep = univ_roots(&f, "t").unwrap();
        assert!(rep.roots.is_empty());
        assert_eq!(rep.residual.len(), 1);
        assert_eq!(rep.residual[0].reason, ResidualReason::NoRealRoots);
    }

    #[test]
    fn mixed_quintic_over_modular_path() {
        // (t^2 - 2)(t^2 - 3)(t + 5): forces the degree >= 3 machinery with
        // both paired-linear and irreducible quadratic lifts.
        let t2 = &t() * &t();
        let f = &(&(&t2 - &MultiPoly::from_int(2)) * &(&t2 - &MultiPoly::from_int(3)))
            * &(&t() + &MultiPoly::from_int(5));
        let rep = univ_roots(&f, "t").unwrap();
        assert!(rep.is_complete());
        let sqrt = |d: u64, sign: i64| {
            FieldElem::quadratic(rat_int(0), rat(sign, 1), d).unwrap()
        };
        assert_eq!(
            rep.roots,
            vec![
                (FieldElem::from_int(-5), 1),
                (sqrt(2, -1), 1),
                (sqrt(2, 1), 1),
                (sqrt(3, -1), 1),
                (sqrt(3, 1), 1),
            ]
        );
    }

    #[test]
    fn rational_roots_with_large_coefficients() {
        // (t - 10^15)(t + 1)(2t - 3) stresses the lifting bound.
        let big: i64 = 1_000_000_000_000_000;
        let f = &poly_from_roots(&[(big, 1), (-1, 1)]) * &poly_from_roots(&[(3, 2)]);
        let rep = univ_roots(&f, "t").unwrap();
        assert!(rep.is_complete());
        assert_eq!(
            rep.roots,
            vec![
                (FieldElem::from_int(-1), 1),
                (FieldElem::from_rat(rat(3, 2)), 1),
                (FieldElem::from_int(big), 1),
            ]
        );
    }

    #[test]
    fn irreducible_cubic_is_residual() {
        // t^3 - t - 1 is irreducible over Q.
        let f = &(&(&t() * &t()) * &t()) - &(&t() + &MultiPoly::one());
        let rep = univ_roots(&f, "t").unwrap();
        assert!(rep.roots.is_empty());
        assert_eq!(rep.residual.len(), 1);
        assert_eq!(rep.residual[0].reason, ResidualReason::HighDegree);
        assert_eq!(rep.residual[0].factor, f);
    }

    #[test]
    fn repeated_surd_roots_keep_multiplicity() {
        // (t^2 - 2)^2
        let q = &(&t() * &t()) - &MultiPoly::from_int(2);
        let f = &q * &q;
        let rep = univ_roots(&f, "t").unwrap();
        let s = FieldElem::sqrt_of(2).unwrap();
        assert_eq!(rep.roots, vec![((-&s), 2), (s, 2)]);
    }

    #[test]
    fn uncertifiable_discriminant_is_residual() {
        // t^2 - q with q = 1000003 * 1000033 > 10^12, composite, square-free
        // but not certifiable within the u64 policy.
        let q: i64 = 1_000_003 * 1_000_033;
        let f = &(&t() * &t()) - &MultiPoly::from_int(q);
        let rep = univ_roots(&f, "t").unwrap();
        assert!(rep.roots.is_empty());
        assert_eq!(rep.residual.len(), 1);
        assert_eq!(
            rep.residual[0].reason,
            ResidualReason::UncertifiedDiscriminant
        );
    }

    #[test]
    fn zero_and_constant_inputs() {
        assert_eq!(
            univ_roots(&MultiPoly::zero(), "t"),
            Err(RootsError::ZeroPolynomial)
        );
        let rep = univ_roots(&MultiPoly::from_int(7), "t").unwrap();
        assert!(rep.roots.is_empty() && rep.residual.is_empty());
    }

    #[test]
    fn root_at_zero_via_trailing_terms() {
        // t^2 (t - 4) (t^2 - 5)
        let f = &(&(&t() * &t()) * &poly_from_roots(&[(4, 1)]))
            * &(&(&t() * &t()) - &MultiPoly::from_int(5));
        let rep = univ_roots(&f, "t").unwrap();
        let s5 = FieldElem::sqrt_of(5).unwrap();
        assert_eq!(
            rep.roots,
            vec![
                (FieldElem::zero(), 2),
                (FieldElem::from_int(4), 1),
                ((-&s5), 1),
                (s5, 1),
            ]
        );
    }
}
