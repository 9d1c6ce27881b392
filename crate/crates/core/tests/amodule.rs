use dieudonne::amodule::{parse_presentation, FiniteAModule};
use dieudonne::dieudonne::DieudonneContext;
use dieudonne::scheme::{alpha, ep, product, witt, FiniteGroupScheme};
use dieudonne::Caps;

fn module_of(g: &FiniteGroupScheme) -> FiniteAModule {
    let c = Caps::default();
    let d = DieudonneContext::new(g, &c).unwrap().enumerate(&c).unwrap();
    FiniteAModule::from_dieudonne(&d).unwrap()
}

#[test]
fn witt_11_is_cyclic_with_f2_v2() {
    let c = Caps::default();
    let g = witt(2, 1, 1, &c).unwrap();
    let m = module_of(&g);
    assert!(m.check_axioms().pass);
    let pres = m.presentation();
    assert_eq!(pres.generators, 1);
    assert_eq!(pres.to_text(), "A/(F^2,V^2)");
    let gen = m.minimal_generators()[0];
    assert_eq!(m.label(gen), "x1");
}

#[test]
fn presentations_of_small_schemes() {
    let c = Caps::default();
    let a = alpha(2, 1, &c).unwrap();
    let cases = [
        (product(&a, &a, &c).unwrap(), "(A/(F,V))^2"),
        (ep(2, &c).unwrap(), "A/(F-V,p)"),
        (alpha(2, 2, &c).unwrap(), "A/(F^2,V)"),
        (a.clone(), "A/(F,V)"),
    ];
    for (g, text) in cases {
        let m = module_of(&g);
        assert_eq!(m.presentation().to_text(), text, "{}", g.name());
    }
}

#[test]
fn parsed_modules_match_dieudonne_modules() {
    let c = Caps::default();
    for (p, text, g) in [
        (2, "A/(F^2,V^2)", witt(2, 1, 1, &c).unwrap()),
        (2, "A/(F-V,p)", ep(2, &c).unwrap()),
        (3, "A/(F-V,p)", ep(3, &c).unwrap()),
        (3, "A/(F^2,V^2)", witt(3, 1, 1, &c).unwrap()),
        (2, "A/(F^3,V^3)", witt(2, 2, 2, &c).unwrap()),
    ] {
        let pres = parse_presentation(text, p).unwrap();
        let abstract_m = FiniteAModule::from_presentation(&pres, &c).unwrap();
        assert!(abstract_m.check_axioms().pass);
        let m = module_of(&g);
        assert_eq!(abstract_m.len(), m.len(), "{text}");
        assert!(abstract_m.isomorphism(&m, &c).unwrap().is_some(), "{text}");
        assert!(m.isomorphism(&abstract_m, &c).unwrap().is_some(), "{text}");
    }
}

#[test]
fn non_isomorphic_modules_are_told_apart() {
    let c = Caps::default();
    let texts = ["(A/(F,V))^2", "A/(F^2,V)", "A/(F,V^2)", "A/(F-V,p)"];
    let ms: Vec<FiniteAModule> = texts
        .iter()
        .map(|t| FiniteAModule::from_presentation(&parse_presentation(t, 2).unwrap(), &c).unwrap())
        .collect();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(ms[i].isomorphism(&ms[j], &c).unwrap().is_some(), i == j, "{} vs {}", texts[i], texts[j]);
        }
    }
}
