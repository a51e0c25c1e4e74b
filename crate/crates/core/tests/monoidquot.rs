mod common;

use common::*;
use oper_calc::funfield::rat::int;
use oper_calc::funfield::{PuncturedCurve, Rat, RatFun};
use oper_calc::monoidquot::*;
use oper_calc::opers::LineSection;
use proptest::prelude::*;
use rand::Rng;

fn random_monoid_elt(r: &mut impl Rng, curve: &PuncturedCurve, e: usize) -> MonoidElt {
    MonoidElt::new(curve, e, random_nonzero_element(r, curve, e)).unwrap()
}

/// Grade in `0..=max_d`, length in `min_n..=max_n`.
fn random_line(r: &mut impl Rng, curve: &PuncturedCurve, max_d: usize, min_n: usize, max_n: usize) -> LineSection {
    let d = r.gen_range(0..=max_d);
    let n = r.gen_range(min_n..=max_n);
    LineSection::new(curve, d, random_vector(r, curve, d, n)).unwrap()
}

/// A family function `sum_k s^k f_k` with `f_k` random of grade `d`.
fn random_family_fun(r: &mut impl Rng, curve: &PuncturedCurve, d: usize, s_deg: usize) -> FamilyFun {
    FamilyFun::new((0..=s_deg).map(|_| random_element(r, curve, d, 0.6)).collect())
}

fn random_family_line(r: &mut impl Rng, curve: &PuncturedCurve, d: usize, n: usize) -> FamilyLine {
    loop {
        let g = (0..n)
            .map(|_| {
                let s_deg = r.gen_range(0..=2);
                random_family_fun(r, curve, d, s_deg)
            })
            .collect();
        if let Ok(line) = FamilyLine::new(curve, d, g) {
            return line;
        }
    }
}

fn nonzero_family(r: &mut impl Rng, curve: &PuncturedCurve, e: usize) -> FamilyFun {
    loop {
        let s_deg = r.gen_range(0..=1);
        let m = random_family_fun(r, curve, e, s_deg);
        if !m.is_zero() {
            return m;
        }
    }
}

#[test]
fn witness_grade_is_doubled() {
    let c = PuncturedCurve::affine_line();
    let f = LineSection::new(&c, 2, vec![RatFun::t(), RatFun::t().powi(2)]).unwrap();
    let g = LineSection::new(&c, 2, vec![RatFun::one(), RatFun::t()]).unwrap();
    let w = find_witness(&c, &f, &g).unwrap();
    let lhs = act(&c, &w.m1, &f).unwrap();
    assert_eq!(lhs.grade(), 4);
    assert_eq!(lhs, act(&c, &w.m2, &g).unwrap());
    let json = serde_json::to_value(&w).unwrap();
    assert!(json.get("m1").is_some() && json.get("m2").is_some());
    assert_eq!(json["localizer"], serde_json::json!(["1"]));
}

#[test]
fn grade_mismatch_is_reported() {
    let c = PuncturedCurve::affine_line();
    let f = LineSection::new(&c, 1, vec![RatFun::one(), RatFun::t()]).unwrap();
    let g = LineSection::new(&c, 2, vec![RatFun::one(), RatFun::t()]).unwrap();
    assert_eq!(find_witness(&c, &f, &g), Err(MonoidError::GradeMismatch(1, 2)));
}

#[test]
fn family_witness_localizes() {
    // f = (s, s·t + 1), g = (s·t, s·t^2 + t) = t·f
    let c = PuncturedCurve::affine_line();
    let s = FamilyFun::s();
    let t = FamilyFun::constant(RatFun::t());
    let one = FamilyFun::constant(RatFun::one());
    let f = FamilyLine::new(&c, 1, vec![s.clone(), s.mul(&t).add(&one)]).unwrap();
    let g = f.act(&c, &t, 1).unwrap();
    let f2 = FamilyLine::new(&c, 2, f.g().to_vec()).unwrap();
    let w = find_family_witness(&c, &f2, &g).unwrap();
    // m1 = g_0 = s·t, m2 = f_0 = s, product s^2·t: the localizer is s^2
    assert_eq!(w.localizer, oper_calc::funfield::Poly::from_ints(&[0, 0, 1]));
    assert!(matches!(w.specialize(&c, &int(0)), Err(MonoidError::DegenerateFamily(_))));
    let pair = w.specialize(&c, &int(3)).unwrap();
    let fs = family_specialize(&c, &f2, &int(3)).unwrap();
    let gs = family_specialize(&c, &g, &int(3)).unwrap();
    assert_eq!(act(&c, &pair.m1, &fs).unwrap(), act(&c, &pair.m2, &gs).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fiber_preservation(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let curve = curve_with(k);
        let f = random_line(&mut r, &curve, 2, 2, 4);
        let e = r.gen_range(0..=2);
        let m = random_monoid_elt(&mut r, &curve, e);
        prop_assert!(same_image(&act(&curve, &m, &f).unwrap(), &f));
    }

    #[test]
    fn action_laws(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let curve = curve_with(k);
        let f = random_line(&mut r, &curve, 2, 2, 4);
        let (e1, e2) = (r.gen_range(0..=2), r.gen_range(0..=2));
        let m = random_monoid_elt(&mut r, &curve, e1);
        let n = random_monoid_elt(&mut r, &curve, e2);
        prop_assert_eq!(act(&curve, &MonoidElt::identity(), &f).unwrap(), f.clone());
        let nested = act(&curve, &m, &act(&curve, &n, &f).unwrap()).unwrap();
        prop_assert_eq!(nested, act(&curve, &m.mul(&n), &f).unwrap());
    }

    #[test]
    fn witness_on_constructed_pairs(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let curve = curve_with(k);
        let h0 = random_line(&mut r, &curve, 1, 2, 4);
        let e = r.gen_range(0..=2);
        let m = random_monoid_elt(&mut r, &curve, e);
        let m2 = random_monoid_elt(&mut r, &curve, e);
        let f = act(&curve, &m, &h0).unwrap();
        let g = act(&curve, &m2, &h0).unwrap();
        let w = find_witness(&curve, &f, &g).unwrap();
        prop_assert_eq!(act(&curve, &w.m1, &f).unwrap(), act(&curve, &w.m2, &g).unwrap());
        // the index is the smallest nonzero coordinate of f
        let i = f.g().iter().position(|x| !x.is_zero()).unwrap();
        prop_assert_eq!(w.m2.value(), &f.g()[i]);
    }

    #[test]
    fn distinct_classes_act_differently(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let curve = curve_with(k);
        let f = random_line(&mut r, &curve, 2, 1, 4);
        let e = r.gen_range(1..=2);
        let m = random_monoid_elt(&mut r, &curve, e);
        let m2 = random_monoid_elt(&mut r, &curve, e);
        prop_assume!(!m.proj_eq(&m2));
        let a = act(&curve, &m, &f).unwrap();
        let b = act(&curve, &m2, &f).unwrap();
        prop_assert!(!proportional(a.g(), b.g()));
        prop_assert!(freeness_check(&curve, &m, &m2, &f).unwrap());
        // a constant multiple is the same class
        let c = nonzero_rat(&mut r);
        let mc = MonoidElt::new(&curve, e, m.value().scale(&c)).unwrap();
        prop_assert!(proportional(a.g(), act(&curve, &mc, &f).unwrap().g()));
        prop_assert!(freeness_check(&curve, &m, &mc, &f).unwrap());
    }

    #[test]
    fn not_same_image_is_rejected(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=2);
        let curve = curve_with(k);
        let f = LineSection::new(&curve, 1, random_vector(&mut r, &curve, 1, 3)).unwrap();
        let g = LineSection::new(&curve, 1, random_vector(&mut r, &curve, 1, 3)).unwrap();
        prop_assume!(!same_image(&f, &g));
        prop_assert_eq!(find_witness(&curve, &f, &g), Err(MonoidError::NotSameImage));
    }

    #[test]
    fn family_witness_specializes(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=2);
        let curve = curve_with(k);
        let (d, n) = (r.gen_range(0..=1), r.gen_range(2..=3));
        let h0 = random_family_line(&mut r, &curve, d, n);
        let e = r.gen_range(0..=1);
        let m = nonzero_family(&mut r, &curve, e);
        let m2 = nonzero_family(&mut r, &curve, e);
        let (Ok(f), Ok(g)) = (h0.act(&curve, &m, e), h0.act(&curve, &m2, e)) else {
            // a factor of m in s makes the product non-primitive
            return Ok(());
        };
        let w = find_family_witness(&curve, &f, &g).unwrap();
        prop_assert!(!w.localizer.is_zero());
        let mut checked = 0;
        for s0 in (-6..=6).map(int) {
            if w.localizer.eval(&s0) == Rat::from_integer(0.into()) {
                continue;
            }
            let pair = w.specialize(&curve, &s0).unwrap();
            let fs = family_specialize(&curve, &f, &s0).unwrap();
            let gs = family_specialize(&curve, &g, &s0).unwrap();
            prop_assert_eq!(act(&curve, &pair.m1, &fs).unwrap(), act(&curve, &pair.m2, &gs).unwrap());
            checked += 1;
        }
        prop_assert!(checked >= 5);
    }
}
