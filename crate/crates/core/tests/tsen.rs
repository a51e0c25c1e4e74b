use std::time::Instant;

use oper_calc::funfield::rat::rat;
use oper_calc::funfield::Poly;
use oper_calc::tsen::*;
use proptest::prelude::*;

fn conic() -> ProjectiveSystem {
    ProjectiveSystem::from_int_forms(2, &[&[(&[0, 1], &[2, 0, 0]), (&[1, -1], &[0, 2, 0]), (&[-1], &[0, 0, 2])]]).unwrap()
}

fn xy_minus_z2() -> ProjectiveSystem {
    ProjectiveSystem::from_int_forms(2, &[&[(&[1], &[1, 1, 0]), (&[-1], &[0, 0, 2])]]).unwrap()
}

fn p(c: &[i64]) -> Poly {
    Poly::from_ints(c)
}

#[test]
fn count_examples() {
    let g2 = ProjectiveSystem::from_int_forms(
        6,
        &[
            &[(&[1], &[2, 0, 0, 0, 0, 0, 0])],
            &[(&[1], &[0, 2, 0, 0, 0, 0, 0])],
            &[(&[1], &[0, 0, 3, 0, 0, 0, 0])],
        ],
    )
    .unwrap();
    for e in 0..10 {
        let c = tsen_count(&g2, e);
        assert_eq!(c.slope, 0);
        assert!(!c.diverges);
        assert_eq!(c.slack, 7 * (e as i64 + 1) - 1 - (7 * e as i64 + 3));
    }
    let line = ProjectiveSystem::from_int_forms(1, &[&[(&[1], &[1, 0]), (&[1], &[0, 1])]]).unwrap();
    assert_eq!(tsen_count(&line, 0).slack, 0);
}

#[test]
fn verify_examples() {
    assert!(verify_section(&conic(), &[p(&[1]), p(&[1]), p(&[1])]));
    assert!(verify_section(&xy_minus_z2(), &[p(&[1]), p(&[0, 0, 1]), p(&[0, 1])]));
    assert!(!verify_section(&conic(), &[p(&[1]), p(&[0]), p(&[1])]));
    assert!(!verify_section(&conic(), &[p(&[0]), p(&[0]), p(&[0])]));
}

#[test]
fn planted_candidate_satisfies_assembled_equations() {
    let s = xy_minus_z2();
    let eqs = assemble_system(&s, 2);
    assert_eq!(eqs.len(), tsen_count(&s, 2).equations as usize);
    // (1, t^2, t) in the coefficient variables
    let mut x = vec![rat(0, 1); 9];
    x[ansatz_var(2, 0, 0)] = rat(1, 1);
    x[ansatz_var(2, 1, 2)] = rat(1, 1);
    x[ansatz_var(2, 2, 1)] = rat(1, 1);
    assert!(eqs.iter().all(|q| q.eval(&x) == rat(0, 1)));
}

#[test]
fn solver_examples() {
    let start = Instant::now();
    let out = solve_section(&conic(), 0, 0, 100);
    let sec = out.section.expect("a rational point on the conic");
    assert!(verify_section(&conic(), &sec.coords));
    // slack is 0 at e = 0, so only the slack warning is expected
    assert_eq!(out.warnings.len(), 1, "{:?}", out.warnings);
    assert!(out.warnings[0].contains("slack 0"));

    let out = solve_section(&xy_minus_z2(), 2, 0, 100);
    let sec = out.section.expect("a section of xy = z^2");
    assert!(verify_section(&xy_minus_z2(), &sec.coords));
    assert!(sec.coords.iter().all(|c| c.degree().unwrap_or(0) <= 2));

    // x^2 + y^2 on P^1: sum of degrees exceeds n
    let circle = ProjectiveSystem::from_int_forms(1, &[&[(&[1], &[2, 0]), (&[1], &[0, 2])]]).unwrap();
    let out = solve_section(&circle, 1, 0, 20);
    assert!(out.section.is_none());
    assert!(out.warnings.iter().any(|w| w.contains("exceeds")));
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn solver_is_deterministic() {
    let a = solve_section(&conic(), 1, 7, 50);
    let b = solve_section(&conic(), 1, 7, 50);
    assert_eq!(a, b);
}

#[test]
fn candidates_are_primitive() {
    let s = xy_minus_z2();
    let c = SectionCandidate::new(&s, 3, vec![p(&[0, 2]), p(&[0, 0, 0, 2]), p(&[0, 0, 2])]).unwrap();
    assert_eq!(c.coords, vec![p(&[1]), p(&[0, 0, 1]), p(&[0, 1])]);
    assert_eq!(SectionCandidate::new(&s, 3, vec![p(&[]), p(&[]), p(&[])]), Err(TsenError::ZeroSection));
    assert!(matches!(SectionCandidate::new(&s, 1, vec![p(&[0, 0, 1]), p(&[1]), p(&[1])]), Err(TsenError::DegreeExceeded { .. })));
}

#[test]
fn json_round_trip() {
    let s = conic();
    let json = serde_json::to_string(&s).unwrap();
    assert!(json.contains("\"ambient\":2"));
    let back: ProjectiveSystem = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
    let bad = r#"{"ambient":1,"forms":[[{"exponents":[2,0],"coeff":["1"]},{"exponents":[1,0],"coeff":["1"]}]]}"#;
    assert!(serde_json::from_str::<ProjectiveSystem>(bad).is_err());
}

fn arb_system() -> impl Strategy<Value = ProjectiveSystem> {
    (1usize..4).prop_flat_map(|n| {
        let form = (1u32..4).prop_flat_map(move |d| {
            prop::collection::vec(
                (prop::collection::vec(-3i64..4, 1..4), prop::collection::vec(0u32..=d, n + 1)),
                1..4,
            )
            .prop_map(move |terms| {
                terms
                    .into_iter()
                    .map(|(c, mut exps)| {
                        // force total degree d by putting the remainder on the last variable
                        let mut budget = d;
                        for x in exps.iter_mut() {
                            *x = (*x).min(budget);
                            budget -= *x;
                        }
                        *exps.last_mut().unwrap() += budget;
                        Monomial { exponents: exps, coeff: Poly::from_ints(&c) }
                    })
                    .collect::<Vec<_>>()
            })
        });
        prop::collection::vec(form, 1..3).prop_filter_map("nonzero forms", move |forms| ProjectiveSystem::new(n, forms).ok())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn count_matches_assembly(s in arb_system(), e in 0usize..=6) {
        let eqs = assemble_system(&s, e);
        prop_assert_eq!(eqs.len() as i64, tsen_count(&s, e).equations);
        // each equation is homogeneous of its form's degree
        let mut k = 0;
        for (i, &d) in s.degrees().iter().enumerate() {
            let len = d * e + s.t_degrees()[i] + 1;
            for q in &eqs[k..k + len] {
                prop_assert!(q.terms().all(|(exps, _)| exps.iter().sum::<u32>() as usize == d));
            }
            k += len;
        }
    }

    #[test]
    fn slack_slope(s in arb_system(), e in 0usize..10) {
        let total: usize = s.degrees().iter().sum();
        let a = tsen_count(&s, e);
        let b = tsen_count(&s, e + 1);
        prop_assert_eq!(b.slack - a.slack, a.slope);
        prop_assert_eq!(a.slope, s.ambient() as i64 + 1 - total as i64);
    }

    #[test]
    fn verification_is_scale_invariant(s in arb_system(), seed in 0u64..1000, num in 1i64..5, den in 1i64..4) {
        let out = solve_section(&s, 1, seed, 4);
        if let Some(sec) = out.section {
            prop_assert!(verify_section(&s, &sec.coords));
            let scaled: Vec<Poly> = sec.coords.iter().map(|c| c.scale(&rat(-num, den))).collect();
            prop_assert!(verify_section(&s, &scaled));
        }
        // and for arbitrary candidates
        let cand = vec![Poly::from_ints(&[1, num]); s.ambient() + 1];
        let scaled: Vec<Poly> = cand.iter().map(|c| c.scale(&rat(num, den))).collect();
        prop_assert_eq!(verify_section(&s, &cand), verify_section(&s, &scaled));
    }

    #[test]
    fn assembled_equations_vanish_exactly_on_verified_sections(s in arb_system(), seed in 0u64..1000) {
        let e = 1;
        if let Some(sec) = solve_section(&s, e, seed, 4).section {
            let mut x = vec![rat(0, 1); (s.ambient() + 1) * (e + 1)];
            for (j, c) in sec.coords.iter().enumerate() {
                for k in 0..=e {
                    x[ansatz_var(e, j, k)] = c.coeff(k);
                }
            }
            prop_assert!(assemble_system(&s, e).iter().all(|q| q.eval(&x) == rat(0, 1)));
        }
    }
}
