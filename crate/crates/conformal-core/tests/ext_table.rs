//! Frozen extension-dimension table for the rank-two algebra: standard
//! free modules `V(0, w)` (sub) and `V(0, w + n)` (quot) at a generic
//! weight, plus every exceptional weight where the dimension jumps.

use conformal_core::ext::{ext_compute, ext_special_values, ExtProblem, SpecialPoint};
use conformal_core::field::{rat, rat_int, FieldElem};
use conformal_core::lca::ConformalAlgebra;
use conformal_core::modules::Rank1Module;
use conformal_core::MultiPoly;

fn weighted(alg: &ConformalAlgebra, w: &FieldElem) -> Rank1Module {
    Rank1Module::standard(alg, &MultiPoly::zero(), &MultiPoly::constant(w.clone())).unwrap()
}

fn dim_at(alg: &ConformalAlgebra, w: &FieldElem, gap: i64, max_degree: u32) -> usize {
    let quot_w = w + &FieldElem::from_int(gap);
    let p = ExtProblem {
        algebra: alg.clone(),
        sub: weighted(alg, w),
        quot: weighted(alg, &quot_w),
    };
    ext_compute(&p, max_degree).unwrap().ext_dim
}

#[test]
fn generic_weight_gap_table() {
    let alg = ConformalAlgebra::builtin_r();
    let generic = FieldElem::from_int(7);
    let expected = [2usize, 1, 1, 1, 1, 0, 0, 0, 0];
    for (gap, want) in expected.iter().enumerate() {
        let got = dim_at(&alg, &generic, gap as i64, 12);
        assert_eq!(got, *want, "gap {gap}");
    }
}

#[test]
fn exceptional_rational_weights() {
    let alg = ConformalAlgebra::builtin_r();
    assert_eq!(dim_at(&alg, &FieldElem::from_int(-1), 2, 10), 2);
    assert_eq!(dim_at(&alg, &FieldElem::from_int(-4), 5, 10), 1);
}

#[test]
fn exceptional_quadratic_weights() {
    let alg = ConformalAlgebra::builtin_r();
    for sign in [-1i64, 1] {
        let w = FieldElem::quadratic(rat(-5, 2), rat(sign, 2), 19).unwrap();
        assert_eq!(dim_at(&alg, &w, 6, 10), 1, "sign {sign}");
    }
}

#[test]
fn sweep_finds_rational_exceptional_weights() {
    let alg = ConformalAlgebra::builtin_r();
    let report = ext_special_values(&alg, 5, 10).unwrap();
    assert_eq!(report.generic_ext_dim, 0);
    assert_eq!(
        report.special,
        vec![SpecialPoint { value: FieldElem::from_int(-4), ext_dim: 1 }]
    );
}

#[test]
fn sweep_finds_quadratic_exceptional_weights() {
    let alg = ConformalAlgebra::builtin_r();
    let report = ext_special_values(&alg, 6, 9).unwrap();
    assert_eq!(report.generic_ext_dim, 0);
    let expected: Vec<SpecialPoint> = [-1i64, 1]
        .iter()
        .map(|s| SpecialPoint {
            value: FieldElem::quadratic(rat(-5, 2), rat(*s, 2), 19).unwrap(),
            ext_dim: 1,
        })
        .collect();
    assert_eq!(report.special, expected);
}

#[test]
fn virasoro_gap_table_loses_the_dimension_one_gap() {
    let alg = ConformalAlgebra::builtin_virasoro();
    let generic = FieldElem::from_rat(rat_int(7));
    let expected = [2usize, 0, 1, 1, 1, 0, 0];
    for (gap, want) in expected.iter().enumerate() {
        let got = dim_at(&alg, &generic, gap as i64, 10);
        assert_eq!(got, *want, "gap {gap}");
    }
}
