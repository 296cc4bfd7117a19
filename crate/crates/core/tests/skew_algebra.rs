mod common;

use std::collections::HashSet;
use std::sync::Arc;

use common::{random_element, random_nonzero, rng};
use rand::Rng;
use skewcode::skew::{
    class_representative, conjugacy_class, conjugate, power_function, product_eval, root_structure,
    skew_linear_operator, ConjugacyClassId,
};
use skewcode::{Element, FieldTower, SkewError, SkewPoly};

fn tower(p: u32, k: u32, m: u32) -> Arc<FieldTower> {
    Arc::new(FieldTower::new(p, k, m).unwrap())
}

fn random_poly(t: &Arc<FieldTower>, max_deg: usize, r: &mut impl Rng) -> SkewPoly {
    let d = r.gen_range(0..=max_deg);
    let mut coeffs: Vec<Element> = (0..=d).map(|_| random_element(t, r)).collect();
    coeffs[d] = random_nonzero(t, r);
    SkewPoly::new(t.clone(), coeffs)
}

/// `a^{1 + q0 + … + q0^{i-1}}` by exponentiation.
fn norm_closed_form(t: &FieldTower, i: usize, a: Element) -> Element {
    let q0 = t.q0() as u64;
    let e: u64 = (0..i as u32).map(|j| q0.pow(j)).sum();
    t.pow(a, e)
}

/// `Σ f_i·N_i(a)` with closed-form norms.
fn eval_oracle(f: &SkewPoly, a: Element) -> Element {
    let t = f.tower();
    f.coeffs()
        .iter()
        .enumerate()
        .fold(Element::ZERO, |acc, (i, &c)| t.add(acc, t.mul(c, norm_closed_form(t, i, a))))
}

/// Coefficient convolution `Σ f_i σ^i(g_j) t^{i+j}` with `σ^i(x) = x^{q0^i}`.
fn mul_oracle(f: &SkewPoly, g: &SkewPoly) -> Vec<Element> {
    let t = f.tower();
    if f.is_zero() || g.is_zero() {
        return vec![];
    }
    let q0 = t.q0() as u64;
    let mut out = vec![Element::ZERO; f.coeffs().len() + g.coeffs().len() - 1];
    for (i, &a) in f.coeffs().iter().enumerate() {
        for (j, &b) in g.coeffs().iter().enumerate() {
            let sb = t.pow(b, q0.pow(i as u32));
            out[i + j] = t.add(out[i + j], t.mul(a, sb));
        }
    }
    out
}

#[test]
fn multiplication_matches_convolution_and_ring_laws() {
    for (p, k, m) in [(2, 1, 6), (7, 1, 2), (3, 1, 4), (2, 2, 3)] {
        let t = tower(p, k, m);
        let mut r = rng(11 * p as u64 + m as u64);
        for _ in 0..1000 {
            let (f, g, h) = (random_poly(&t, 5, &mut r), random_poly(&t, 5, &mut r), random_poly(&t, 5, &mut r));
            let fg = f.mul(&g).unwrap();
            assert_eq!(fg.coeffs(), mul_oracle(&f, &g).as_slice());
            assert_eq!(fg.degree().unwrap(), f.degree().unwrap() + g.degree().unwrap());
            assert!(!fg.is_zero());
            assert_eq!(fg.mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
            assert_eq!(f.mul(&g.add(&h).unwrap()).unwrap(), fg.add(&f.mul(&h).unwrap()).unwrap());
            assert_eq!(f.add(&g).unwrap().mul(&h).unwrap(), f.mul(&h).unwrap().add(&g.mul(&h).unwrap()).unwrap());
            let one = SkewPoly::constant(t.clone(), Element::ONE);
            assert_eq!(f.mul(&one).unwrap(), f);
        }
    }
}

#[test]
fn t_times_a_twists_the_coefficient() {
    let t = tower(2, 1, 2);
    let w = t.generator();
    let tt = SkewPoly::new(t.clone(), vec![Element::ZERO, Element::ONE]);
    let prod = tt.mul(&SkewPoly::constant(t.clone(), w)).unwrap();
    assert_eq!(prod.coeffs(), &[Element::ZERO, t.mul(w, w)]);
}

#[test]
fn base_field_coefficients_commute() {
    let t = tower(7, 1, 2);
    for c in 0..7u32 {
        let c = Element::from_int(c);
        let lin = SkewPoly::linear(t.clone(), c);
        let sq = lin.mul(&lin).unwrap();
        let two_c = t.add(c, c);
        let expect = SkewPoly::new(t.clone(), vec![t.mul(c, c), t.neg(two_c), Element::ONE]);
        assert_eq!(sq, expect);
    }
}

#[test]
fn right_division_reassembles() {
    for (p, k, m) in [(7, 1, 2), (2, 1, 6), (3, 1, 4)] {
        let t = tower(p, k, m);
        let mut r = rng(1000 + p as u64);
        for _ in 0..10_000 {
            let f = random_poly(&t, 7, &mut r);
            let g = random_poly(&t, 4, &mut r);
            let (q, rem) = f.right_div(&g).unwrap();
            assert!(rem.is_zero() || rem.degree() < g.degree());
            assert_eq!(q.mul(&g).unwrap().add(&rem).unwrap(), f);
        }
    }
    let t = tower(7, 1, 2);
    let a = Element::from_int(30);
    let lin = SkewPoly::linear(t.clone(), a);
    let (q, rem) = lin.right_div(&lin).unwrap();
    assert_eq!(q, SkewPoly::constant(t.clone(), Element::ONE));
    assert!(rem.is_zero());
    assert_eq!(lin.right_div(&SkewPoly::zero(t)).unwrap_err(), SkewError::DivisionByZeroPolynomial);
}

#[test]
fn evaluation_two_routes_agree_with_closed_form() {
    for (p, k, m) in [(7, 1, 2), (2, 1, 6), (3, 1, 4), (7, 1, 3)] {
        let t = tower(p, k, m);
        let mut r = rng(2000 + p as u64 + m as u64);
        for _ in 0..10_000 {
            let f = random_poly(&t, 6, &mut r);
            let a = random_element(&t, &mut r);
            let v = f.evaluate(a);
            assert_eq!(v, f.evaluate_by_division(a));
            assert_eq!(v, eval_oracle(&f, a));
        }
    }
}

#[test]
fn power_function_examples() {
    let t = tower(2, 1, 2);
    let w = t.generator();
    assert_eq!(power_function(&t, 0, w), Element::ONE);
    assert_eq!(power_function(&t, 1, w), w);
    assert_eq!(power_function(&t, 2, w), Element::ONE);
    let t = tower(3, 1, 4);
    let mut r = rng(3);
    for _ in 0..200 {
        let a = random_element(&t, &mut r);
        let i = r.gen_range(0..8);
        assert_eq!(power_function(&t, i, a), norm_closed_form(&t, i, a));
    }
}

#[test]
fn product_rule_matches_direct_evaluation() {
    for (p, k, m) in [(7, 1, 2), (2, 1, 6), (3, 1, 4)] {
        let t = tower(p, k, m);
        let mut r = rng(3000 + p as u64);
        for _ in 0..10_000 {
            let f = random_poly(&t, 4, &mut r);
            let g = random_poly(&t, 4, &mut r);
            let a = random_element(&t, &mut r);
            assert_eq!(product_eval(&f, &g, a).unwrap(), f.mul(&g).unwrap().evaluate(a));
        }
    }
    let t = tower(7, 1, 2);
    let a = Element::from_int(17);
    let f = SkewPoly::new(t.clone(), vec![Element::from_int(3), Element::from_int(40)]);
    assert_eq!(product_eval(&f, &SkewPoly::linear(t.clone(), a), a).unwrap(), Element::ZERO);
}

#[test]
fn conjugation_laws() {
    let t = tower(7, 1, 2);
    let g = t.generator();
    assert_eq!(conjugate(&t, g, g).unwrap(), t.pow(g, 7));
    assert_eq!(conjugate(&t, g, Element::ONE).unwrap(), g);
    assert_eq!(conjugate(&t, Element::ZERO, g).unwrap(), Element::ZERO);
    assert_eq!(conjugate(&t, g, Element::ZERO).unwrap_err(), SkewError::ConjugateByZero);
    for (p, k, m) in [(7, 1, 2), (2, 1, 6), (3, 1, 4)] {
        let t = tower(p, k, m);
        let mut r = rng(4000 + p as u64);
        for _ in 0..10_000 {
            let a = random_element(&t, &mut r);
            let (c, d) = (random_nonzero(&t, &mut r), random_nonzero(&t, &mut r));
            let lhs = conjugate(&t, conjugate(&t, a, c).unwrap(), d).unwrap();
            assert_eq!(lhs, conjugate(&t, a, t.mul(d, c)).unwrap());
            let oracle = t.mul(t.pow(c, t.q0() as u64 - 1), a);
            assert_eq!(conjugate(&t, a, c).unwrap(), oracle);
        }
    }
}

#[test]
fn conjugacy_classes_partition_the_field() {
    let t = tower(7, 1, 2);
    assert_eq!(conjugacy_class(&t, Element::ZERO), ConjugacyClassId(-1));
    assert_eq!(conjugacy_class(&t, t.gen_pow(6)), ConjugacyClassId(0));
    let ids: HashSet<_> = t.elements().map(|x| conjugacy_class(&t, x)).collect();
    assert_eq!(ids.len(), 7);
    // orbit of each element under all conjugations
    for x in t.elements() {
        let orbit: HashSet<Element> = t.elements().skip(1).map(|c| conjugate(&t, x, c).unwrap()).collect();
        for y in t.elements() {
            assert_eq!(orbit.contains(&y), conjugacy_class(&t, x) == conjugacy_class(&t, y));
        }
    }
    for l in 0..6 {
        let rep = class_representative(&t, ConjugacyClassId(l));
        assert_eq!(conjugacy_class(&t, rep), ConjugacyClassId(l));
    }
}

#[test]
fn skew_linear_operator_is_base_linear() {
    let t = tower(7, 1, 2);
    let mut r = rng(5);
    let one = SkewPoly::constant(t.clone(), Element::ONE);
    for _ in 0..2000 {
        let f = random_poly(&t, 4, &mut r);
        let a = random_element(&t, &mut r);
        let (y1, y2) = (random_element(&t, &mut r), random_element(&t, &mut r));
        let c = Element::from_int(r.gen_range(0..7));
        let d = |y| skew_linear_operator(&f, a, y);
        assert_eq!(d(t.add(y1, y2)), t.add(d(y1), d(y2)));
        assert_eq!(d(t.mul(c, y1)), t.mul(c, d(y1)));
        assert_eq!(d(Element::ZERO), Element::ZERO);
        assert_eq!(skew_linear_operator(&one, a, y1), y1);
        if !y1.is_zero() {
            let expect = t.mul(f.evaluate(conjugate(&t, a, y1).unwrap()), y1);
            assert_eq!(d(y1), expect);
        }
    }
}

/// Per nonzero class: `{y : f(rep^y) = 0} ∪ {0}` by direct scan, checked to
/// be an `F_{q0}`-subspace; returns its dimension.
fn class_dimension_oracle(f: &SkewPoly, rep: Element) -> usize {
    let t = f.tower();
    let q0 = t.q0() as u64;
    let e = q0 - 1;
    let set: HashSet<Element> = t
        .elements()
        .filter(|&y| y.is_zero() || f.evaluate(t.mul(t.pow(y, e), rep)).is_zero())
        .collect();
    for &u in &set {
        for &v in &set {
            assert!(set.contains(&t.add(u, v)));
        }
        for c in t.base_elements() {
            assert!(set.contains(&t.mul(c, u)));
        }
    }
    let mut dim = 0;
    let mut size = 1u64;
    while size < set.len() as u64 {
        size *= q0;
        dim += 1;
    }
    assert_eq!(size, set.len() as u64, "root space size is a power of q0");
    dim
}

#[test]
fn fundamental_theorem_on_small_fields() {
    for (p, k, m, trials) in [(2, 1, 6, 60), (3, 1, 4, 40), (7, 1, 2, 60)] {
        let t = tower(p, k, m);
        let mut r = rng(6000 + p as u64);
        for _ in 0..trials {
            let f = random_poly(&t, 5, &mut r);
            let deg = f.degree().unwrap();
            let rs = root_structure(&f).unwrap();
            assert!(rs.total_dimension() <= deg);
            assert!(rs.check_subspaces(&f));
            let mut oracle_total = usize::from(f.evaluate(Element::ZERO).is_zero());
            for l in 0..t.q0() as i32 - 1 {
                let rep = class_representative(&t, ConjugacyClassId(l));
                let d = class_dimension_oracle(&f, rep);
                let reported = rs.classes.iter().find(|c| c.class.0 == l).map_or(0, |c| c.dimension());
                assert_eq!(d, reported, "class {l}");
                oracle_total += d;
            }
            assert_eq!(oracle_total, rs.total_dimension());
        }
    }
}

#[test]
fn root_structure_examples() {
    let t = tower(7, 1, 2);
    let a = t.gen_pow(9);
    let rs = root_structure(&SkewPoly::linear(t.clone(), a)).unwrap();
    assert_eq!(rs.classes.len(), 1);
    assert_eq!(rs.classes[0].dimension(), 1);
    let rs = root_structure(&SkewPoly::constant(t.clone(), Element::from_int(5))).unwrap();
    assert_eq!(rs.total_dimension(), 0);
    assert_eq!(root_structure(&SkewPoly::zero(t)).unwrap_err(), SkewError::ZeroPolynomial);
    let big = tower(2, 1, 21);
    assert!(matches!(
        root_structure(&SkewPoly::constant(big, Element::ONE)),
        Err(SkewError::FieldTooLarge(_))
    ));
}

#[test]
fn tower_mismatch_is_reported() {
    let f = SkewPoly::constant(tower(7, 1, 2), Element::ONE);
    let g = SkewPoly::constant(tower(2, 1, 6), Element::ONE);
    assert_eq!(f.mul(&g).unwrap_err(), SkewError::TowerMismatch);
}
