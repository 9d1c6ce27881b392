use std::time::Instant;

use dieudonne::dieudonne::{brute_force_dieudonne, meet_in_the_middle_dieudonne, DieudonneContext};
use dieudonne::scheme::{alpha, ep, product, witt};
use dieudonne::Caps;

#[test]
fn sizes_and_oracles() {
    let c = Caps::default();
    for (p, g) in [
        (2, witt(2, 1, 1, &c).unwrap()),
        (2, alpha(2, 2, &c).unwrap()),
        (2, ep(2, &c).unwrap()),
        (3, witt(3, 1, 0, &c).unwrap()),
        (3, ep(3, &c).unwrap()),
        (2, witt(2, 2, 2, &c).unwrap()),
        (3, witt(3, 1, 1, &c).unwrap()),
        (3, product(&ep(3, &c).unwrap(), &alpha(3, 1, &c).unwrap(), &c).unwrap()),
    ] {
        let t = Instant::now();
        let ctx = DieudonneContext::new(&g, &c).unwrap();
        let d = ctx.enumerate(&c).unwrap();
        let l = g.length().unwrap();
        eprintln!("{} p={p} |D|={} level {} in {:?}", g.name(), d.len(), ctx.level(), t.elapsed());
        assert_eq!(d.len() as u64, (p as u64).pow(l));
        if g.dim() <= 27 {
            let t = Instant::now();
            let m = meet_in_the_middle_dieudonne(&ctx, 7).unwrap();
            eprintln!("  mitm {:?}", t.elapsed());
            assert_eq!(m, d.elements());
        }
        if g.dim() <= 16 {
            assert_eq!(brute_force_dieudonne(&ctx).unwrap(), d.elements());
        }
        let t = Instant::now();
        let tab = d.addition_table().unwrap();
        eprintln!("  table {} in {:?}", tab.len(), t.elapsed());
    }
}

#[test]
fn inverse_functor_round_trips() {
    use dieudonne::amodule::{parse_presentation, FiniteAModule};
    use dieudonne::dieudonne::{classify_length2, inverse_functor};
    use dieudonne::scheme::{cartier_dual, is_isomorphic_small};
    let c = Caps::default();
    for text in ["A/(F,V)", "(A/(F,V))^2", "A/(F^2,V)", "A/(F,V^2)", "A/(F-V,p)", "A/(F^2,V^2)"] {
        let t = Instant::now();
        let pres = parse_presentation(text, 2).unwrap();
        let g = inverse_functor(&pres, &c).unwrap();
        assert!(g.verify_hopf().pass, "{text}");
        let d = DieudonneContext::new(&g, &c).unwrap().enumerate(&c).unwrap();
        let m = FiniteAModule::from_dieudonne(&d).unwrap();
        let expect = FiniteAModule::from_presentation(&pres, &c).unwrap();
        assert!(m.isomorphism(&expect, &c).unwrap().is_some(), "{text}");
        eprintln!("{text}: dim {} in {:?}", g.dim(), t.elapsed());
    }
    let e = inverse_functor(&parse_presentation("A/(F-V,p)", 2).unwrap(), &c).unwrap();
    assert!(is_isomorphic_small(&e, &ep(2, &c).unwrap(), &c).unwrap().is_some());
    for p in [2, 3] {
        let cl = classify_length2(p, &c).unwrap();
        assert!(cl.report.pass, "{:?}", cl.report.counterexample);
        assert_eq!(cl.a_numbers, vec![2, 1, 1, 1]);
        let a = alpha(p, 1, &c).unwrap();
        let a2 = alpha(p, 2, &c).unwrap();
        let expected = [product(&a, &a, &c).unwrap(), a2.clone(), cartier_dual(&a2, &c).unwrap(), ep(p, &c).unwrap()];
        for (g, h) in cl.schemes.iter().zip(&expected) {
            assert!(is_isomorphic_small(g, h, &c).unwrap().is_some(), "{} vs {}", g.name(), h.name());
        }
    }
}

#[test]
fn module_axioms_hold() {
    let c = Caps::default();
    for g in [witt(2, 1, 1, &c).unwrap(), ep(3, &c).unwrap(), witt(3, 1, 1, &c).unwrap(), witt(2, 2, 2, &c).unwrap()] {
        let t = Instant::now();
        let d = DieudonneContext::new(&g, &c).unwrap().enumerate(&c).unwrap();
        let r = d.check_module_axioms();
        eprintln!("{}: {:?}", g.name(), t.elapsed());
        assert!(r.pass, "{}: {:?}", g.name(), r.counterexample);
    }
}

/// The scheme built from a module does not depend on how the module is
/// written down, sampled on a few rewritten presentations.
#[test]
fn inverse_functor_is_independent_of_the_presentation() {
    use dieudonne::amodule::parse_presentation;
    use dieudonne::dieudonne::inverse_functor;
    use dieudonne::scheme::{catalog, is_isomorphic_small};
    let c = Caps::default();
    let build = |text: &str| inverse_functor(&parse_presentation(text, 2).unwrap(), &c).unwrap();
    for (a, b) in [("A/(F^2,V^2)", "A/(V^2,F^2)"), ("A/(F,V^2)", "A/(V^2,F,FV)"), ("A/(F-V,p)", "A/(V-F,p)")] {
        let (g, h) = (build(a), build(b));
        assert!(is_isomorphic_small(&g, &h, &c).unwrap().is_some(), "{a} vs {b}");
    }
    let w = catalog("witt:1,1", 2, &c).unwrap();
    assert!(is_isomorphic_small(&build("A/(F^2,V^2)"), &w, &c).unwrap().is_some());
}
