use dieudonne::algebra::basis_vec;
use dieudonne::linalg::sparse_to_dense;
use dieudonne::scheme::{self, alpha, cartier_dual, ep, is_isomorphic_small, product, witt, zero_scheme};
use dieudonne::witt::negation_law;
use dieudonne::Caps;

fn caps() -> Caps {
    Caps::default()
}

fn catalog(p: u32) -> Vec<scheme::FiniteGroupScheme> {
    let c = caps();
    let mut out = vec![];
    for n in 1..=3 {
        out.push(alpha(p, n, &c).unwrap());
    }
    let wmax = if p == 2 { 2 } else { 1 };
    for n in 0..=wmax {
        for m in 0..=wmax {
            if p == 2 && n + m > 3 {
                continue;
            }
            out.push(witt(p, n, m, &c).unwrap());
        }
    }
    out.push(ep(p, &c).unwrap());
    let a = alpha(p, 1, &c).unwrap();
    out.push(product(&a, &a, &c).unwrap());
    out.push(product(&a, &ep(p, &c).unwrap(), &c).unwrap());
    out
}

#[test]
fn alpha_2_structure() {
    let g = alpha(2, 1, &caps()).unwrap();
    assert_eq!(g.dim(), 2);
    assert_eq!(g.length().unwrap(), 1);
    // Δ(x) = x⊗1 + 1⊗x
    assert_eq!(g.delta_basis(1), &vec![(1, 1), (2, 1)]);
    // S(x) = −x = x in characteristic 2
    assert_eq!(g.antipode().columns[1], vec![(1, 1)]);
    assert!(g.verify_hopf().pass);
    assert_eq!(alpha(3, 2, &caps()).unwrap().length().unwrap(), 2);
}

#[test]
fn corrupted_coproduct_fails_counit() {
    let g = alpha(2, 1, &caps()).unwrap();
    let bad = scheme::FiniteGroupScheme::from_parts(
        "bad",
        g.algebra().clone(),
        vec![vec![(0, 1)], vec![(2, 1)]],
        g.antipode().clone(),
    );
    let r = bad.verify_hopf();
    assert!(!r.pass);
    assert!(r.counterexample.unwrap().contains("counit"));
}

#[test]
fn catalog_passes_hopf_axioms() {
    for p in [2, 3] {
        for g in catalog(p) {
            let r = g.verify_hopf();
            assert!(r.pass, "{}: {:?}", g.name(), r.counterexample);
            let l = g.length().unwrap();
            assert_eq!((p as usize).pow(l), g.dim());
        }
    }
    assert!(ep(5, &caps()).unwrap().verify_hopf().pass);
}

#[test]
fn witt_zero_m_is_alpha() {
    for p in [2, 3] {
        for m in 0..2 {
            let w = witt(p, 0, m, &caps()).unwrap();
            let a = alpha(p, m + 1, &caps()).unwrap();
            assert_eq!(w.dim(), a.dim());
            for c in 0..w.dim() {
                assert_eq!(w.delta_basis(c), a.delta_basis(c));
            }
        }
    }
}

#[test]
fn witt_11_invariants() {
    let w = witt(2, 1, 1, &caps()).unwrap();
    assert_eq!(w.dim(), 16);
    assert_eq!(w.length().unwrap(), 4);
    assert_eq!(w.lie_dim(), 2);
    assert_eq!(w.alpha_module().len(), 2);
    assert_eq!(w.a_number().unwrap(), 1);
    let d = cartier_dual(&w, &caps()).unwrap();
    assert_eq!(d.a_number().unwrap(), 1);
}

#[test]
fn ep_coproduct_p2() {
    let e = ep(2, &caps()).unwrap();
    assert_eq!(e.format_tensor(e.delta_basis(1)), "1⊗x + x⊗1 + x^2⊗x^2");
    assert_eq!(e.length().unwrap(), 2);
}

#[test]
fn products() {
    let c = caps();
    let a = alpha(2, 1, &c).unwrap();
    let aa = product(&a, &a, &c).unwrap();
    assert_eq!(aa.dim(), 4);
    assert_eq!(aa.length().unwrap(), 2);
    assert_eq!(aa.a_number().unwrap(), 2);
    let w = witt(2, 1, 0, &c).unwrap();
    let wz = product(&w, &zero_scheme(2).unwrap(), &c).unwrap();
    assert!(is_isomorphic_small(&wz, &w, &c).unwrap().is_some());
}

#[test]
fn verschiebung_is_shift_on_witt() {
    for (n, m) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
        let w = witt(2, n, m, &caps()).unwrap();
        let t = w.algebra().as_truncated().unwrap().clone();
        let v = w.verschiebung();
        for c in 0..w.dim() {
            let e = t.exps(c);
            // x^e ↦ Π x_{i-1}^{e_i}, zero if x_0 occurs
            let expect = if e[0] > 0 {
                vec![]
            } else {
                let mut s = e[1..].to_vec();
                s.push(0);
                vec![(t.index(&s).unwrap(), 1)]
            };
            assert_eq!(v.pullback.columns[c], expect, "W_{{{n},{m}}} at {}", t.monomial_name(c));
        }
    }
}

#[test]
fn frobenius_verschiebung_compose_to_p() {
    for p in [2, 3] {
        for g in catalog(p) {
            let fp = g.fp();
            let f = g.frobenius();
            let v = g.verschiebung();
            let mp = g.multiplication_by(p);
            assert_eq!(v.after(&fp, &f), mp, "{}", g.name());
            assert_eq!(f.after(&fp, &v), mp, "{}", g.name());
            assert!(g.check_hom(&g, &v).pass, "{}", g.name());
        }
    }
}

#[test]
fn verschiebung_vanishes_on_alpha() {
    for p in [2, 3] {
        for n in 1..=3 {
            let a = alpha(p, n, &caps()).unwrap();
            let v = a.verschiebung();
            for c in 1..a.dim() {
                assert!(v.pullback.columns[c].is_empty());
            }
        }
    }
}

#[test]
fn double_dual_has_identical_structure_constants() {
    let c = caps();
    for g in [witt(2, 1, 1, &c).unwrap(), ep(3, &c).unwrap(), alpha(2, 3, &c).unwrap()] {
        let d = cartier_dual(&g, &c).unwrap();
        assert!(d.verify_hopf().pass);
        assert_eq!(d.dim(), g.dim());
        let dd = cartier_dual(&d, &c).unwrap();
        for a in 0..g.dim() {
            assert_eq!(dd.delta_basis(a), g.delta_basis(a));
            assert_eq!(dd.antipode().columns[a], g.antipode().columns[a]);
            for b in 0..g.dim() {
                assert_eq!(dd.algebra().basis_product(a, b), g.algebra().basis_product(a, b));
            }
        }
    }
}

#[test]
fn self_dualities() {
    let c = caps();
    for p in [2, 3] {
        let a = alpha(p, 1, &c).unwrap();
        let ad = cartier_dual(&a, &c).unwrap();
        assert!(is_isomorphic_small(&ad, &a, &c).unwrap().is_some());
    }
    let w = witt(2, 1, 1, &c).unwrap();
    let wd = cartier_dual(&w, &c).unwrap();
    let iso = is_isomorphic_small(&wd, &w, &c).unwrap().expect("W_{1,1} is self-dual");
    assert!(wd.check_hom(&w, &iso).pass);
}

#[test]
fn non_isomorphic_length_two() {
    let c = caps();
    let a4 = alpha(2, 2, &c).unwrap();
    let a2 = alpha(2, 1, &c).unwrap();
    let a22 = product(&a2, &a2, &c).unwrap();
    let e = ep(2, &c).unwrap();
    let a4d = cartier_dual(&a4, &c).unwrap();
    assert!(is_isomorphic_small(&a4, &a22, &c).unwrap().is_none());
    for other in [&a4, &a4d, &a22] {
        assert!(is_isomorphic_small(&e, other, &c).unwrap().is_none());
    }
    assert!(is_isomorphic_small(&e, &e, &c).unwrap().is_some());
}

#[test]
fn quotients_and_lengths() {
    let c = caps();
    let w = witt(2, 1, 0, &c).unwrap();
    let t = w.algebra().as_truncated().unwrap();
    let x0 = basis_vec(w.dim(), t.index(&[1, 0]).unwrap());
    let (h, inc) = w.quotient(&[x0]).unwrap();
    assert!(h.verify_hopf().pass);
    assert_eq!(h.dim(), 2);
    assert!(h.check_hom(&w, &inc).pass);
    let (same, _) = w.quotient(&[]).unwrap();
    assert_eq!(same.dim(), w.dim());
    // x_1 alone does not generate a Hopf ideal
    let x1 = basis_vec(w.dim(), t.index(&[0, 1]).unwrap());
    assert!(w.quotient(&[x1]).is_err());
    // l(G) = l(ker f) + l(image) for F on W_{1,1}
    let w11 = witt(2, 1, 1, &c).unwrap();
    let f = w11.frobenius();
    let (k, _) = w11.kernel(&w11, &f).unwrap();
    let rank = f.pullback.to_matrix().rank(&w11.fp());
    assert_eq!(k.dim() * rank, w11.dim());
}

#[test]
fn alpha_modules() {
    let c = caps();
    for p in [2, 3] {
        for n in 1..=3 {
            let a = alpha(p, n, &c).unwrap();
            let basis = a.alpha_module();
            assert_eq!(basis.len(), n as usize);
            for (k, v) in basis.iter().enumerate() {
                // kernel vectors come out in echelon order: x^{p^k}
                let idx = (p as usize).pow(k as u32);
                assert_eq!(sparse_to_dense(&vec![(idx, 1)], a.dim()), v.clone());
            }
        }
        for m in 0..2 {
            assert_eq!(witt(p, 1, m, &c).unwrap().alpha_module().len(), m as usize + 1);
        }
    }
}

#[test]
fn antipode_of_witt_matches_negation_law() {
    let c = caps();
    for (p, n, m) in [(2, 1, 1), (2, 2, 0), (3, 1, 0), (3, 1, 1)] {
        let w = witt(p, n, m, &c).unwrap();
        let t = w.algebra().as_truncated().unwrap();
        let neg = negation_law(p, n).unwrap();
        let fp = w.fp();
        for i in 0..=n as usize {
            let f = neg.poly_at_level(i as u32, n);
            let mut expect = vec![0u32; w.dim()];
            for (e, coef) in f.terms() {
                if let Some(idx) = t.index(&e[..n as usize + 1]) {
                    expect[idx] = fp.add(expect[idx], fp.from_bigint(coef));
                }
            }
            let xi = t.power_index(i, 1).unwrap();
            let got = sparse_to_dense(&w.antipode().columns[xi], w.dim());
            assert_eq!(got, expect, "p={p} W_{{{n},{m}}} x{i}");
        }
    }
}

#[test]
fn catalog_expressions() {
    let c = caps();
    let g = scheme::catalog("alpha:4*alpha:2", 2, &c).unwrap();
    assert_eq!(g.dim(), 8);
    assert!(scheme::catalog("alpha:2^2", 2, &c).unwrap().dim() == 4);
    assert!(scheme::catalog("dual(witt:1,0)", 3, &c).unwrap().verify_hopf().pass);
    assert!(scheme::catalog("alpha:6", 2, &c).is_err());
    assert!(matches!(scheme::catalog("witt:3,3", 2, &c), Err(e) if e.is_cap()));
}
