//! The twelve acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.
//!
//! Criteria 3 and 10 contain statements that cannot be met; for those the
//! test asserts that the failures are exactly the known ones.

use std::time::Instant;

use dieudonne::algebra::{basis_vec, hom_from_images};
use dieudonne::amodule::{parse_presentation, FiniteAModule};
use dieudonne::dieudonne::{
    brute_force_dieudonne, check_exactness, classify_length2, inverse_functor, meet_in_the_middle_dieudonne,
    DieudonneContext,
};
use dieudonne::diffops::{congruence_suite, lambda_phi_congruence, lambda_poly};
use dieudonne::duality::{
    check_first_witt_operator, grading_check, leibniz_x0_check, leibniz_xi_check, PairingContext, StandardDuality,
};
use dieudonne::poly::{witt_vars, IntPoly, RatPoly};
use dieudonne::report::Report;
use dieudonne::scheme::{alpha, ep, is_isomorphic_small, product, witt, FiniteGroupScheme, SchemeHom};
use dieudonne::witt::{check_ghost_identity, check_homogeneity, law, LawKind, WittVector};
use dieudonne::{Caps, Error};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn report(&mut self, r: &Report) {
        self.check(r.pass, || r.summary_line());
    }

    fn error(&mut self, context: &str, e: Error) {
        self.checked += 1;
        self.failures.push(format!("{context}: {e}"));
    }
}

fn caps() -> Caps {
    Caps::default()
}

fn fact(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, k| a * k)
}

fn c1_ghost() -> Tally {
    let mut t = Tally::default();
    for (p, top) in [(2, 4), (3, 3)] {
        for kind in [LawKind::Add, LawKind::Mul] {
            match law(p, top, kind, &caps()) {
                Ok(l) => t.report(&check_ghost_identity(&l)),
                Err(e) => t.error(&format!("{} p={p} n={top}", kind.name()), e),
            }
        }
    }
    t
}

fn c2_phi1_and_homogeneity() -> Tally {
    let mut t = Tally::default();
    for p in [2u32, 3, 5] {
        let vars = witt_vars(&["x", "y"], 1);
        // x1 + y1 − Σ_{0<i<p} (p−1)!/(i!(p−i)!) x0^i y0^{p−i}
        let mut terms = vec![(vec![0, 1, 0, 0], BigInt::from(1)), (vec![0, 0, 0, 1], BigInt::from(1))];
        for i in 1..p {
            terms.push((vec![i, 0, p - i, 0], -(fact(p - 1) / (fact(i) * fact(p - i)))));
        }
        let want = IntPoly::from_terms(&vars, terms);
        match law(p, 1, LawKind::Add, &caps()) {
            Ok(l) => {
                let got = l.poly_at_level(1, 1);
                t.check(got == want, || format!("φ_1 at p={p}: {got:?}"));
            }
            Err(e) => t.error(&format!("φ_1 p={p}"), e),
        }
    }
    for (p, top) in [(2, 4), (3, 3), (5, 3)] {
        for kind in [LawKind::Add, LawKind::Mul] {
            match law(p, top, kind, &caps()) {
                Ok(l) => t.report(&check_homogeneity(&l)),
                Err(e) => t.error(&format!("{} p={p} n={top}", kind.name()), e),
            }
        }
    }
    t
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `Σ p^i [a_i]` in `Z/p^{n+1}` with `[a] = a^{p^n}`.
fn residue(p: u64, a: &[u64]) -> u64 {
    let n = a.len() as u32 - 1;
    let q = p.pow(n + 1);
    let teich = |x: u64| {
        let mut r = x % q;
        for _ in 0..n {
            let b = r;
            r = (1..p).fold(b, |acc, _| acc * b % q);
        }
        r
    };
    a.iter().enumerate().map(|(i, &x)| p.pow(i as u32) * teich(x) % q).sum::<u64>() % q
}

fn ring_oracle(p: u32, n: u32, t: &mut Tally) -> Result<(), Error> {
    let pp = p as u64;
    let q = pp.pow(n + 1);
    let digits: Vec<Vec<u64>> = (0..q)
        .map(|mut k| {
            (0..=n)
                .map(|_| {
                    let d = k % pp;
                    k /= pp;
                    d
                })
                .collect()
        })
        .collect();
    let res: Vec<u64> = digits.iter().map(|d| residue(pp, d)).collect();
    let vecs: Vec<WittVector> = digits
        .iter()
        .map(|d| WittVector::from_prime(p, &d.iter().map(|&x| x as u32).collect::<Vec<_>>()))
        .collect::<Result<_, _>>()?;
    // the vector with residue r
    let mut inv = vec![0usize; q as usize];
    for (a, &r) in res.iter().enumerate() {
        inv[r as usize] = a;
    }
    let of = |r: u64| &vecs[inv[(r % q) as usize]];
    let p_vec = WittVector::from_integer(p, n, &BigInt::from(p))?;
    let mut bad = None;
    for (a, x) in vecs.iter().enumerate() {
        if &x.neg()? != of(q - res[a]) {
            bad.get_or_insert(format!("neg {x}"));
        }
        // p·x = V(σx) = σ(Vx)
        let px = x.mul(&p_vec)?;
        if px != x.sigma().verschiebung() || px != x.verschiebung().sigma() {
            bad.get_or_insert(format!("FV = p fails at {x}"));
        }
        for (b, y) in vecs.iter().enumerate() {
            if &x.add(y)? != of(res[a] + res[b]) {
                bad.get_or_insert(format!("{x} + {y}"));
            }
            if &x.mul(y)? != of(res[a] * res[b]) {
                bad.get_or_insert(format!("{x} · {y}"));
            }
        }
    }
    // τ(a)τ(b) = τ(ab); digits are little-endian, so τ(a) is vecs[a]. At
    // n = 0 this is the product check above.
    if n > 0 {
        for a in 0..p as usize {
            for b in 0..p as usize {
                let ab = a * b % p as usize;
                if vecs[a].mul(&vecs[b])? != vecs[ab] {
                    bad.get_or_insert(format!("τ({a})τ({b}) ≠ τ({ab})"));
                }
            }
        }
    }
    t.check(bad.is_none(), || format!("W_{n}(F_{p}): {}", bad.unwrap()));
    Ok(())
}

fn c3_ring_oracle() -> Tally {
    let mut t = Tally::default();
    for p in (2..=625u64).filter(|&p| is_prime(p)) {
        let mut n = 0;
        while p.pow(n + 1) <= 625 {
            if let Err(e) = ring_oracle(p as u32, n, &mut t) {
                t.error(&format!("W_{n}(F_{p})"), e);
            }
            n += 1;
        }
    }
    t
}

/// α_{p^n} (n ≤ 3), W_{n,m} (n, m ≤ 2 at p = 2, ≤ 1 at p = 3), E[p] and
/// some small products.
fn catalog(p: u32) -> Vec<FiniteGroupScheme> {
    let c = caps();
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(alpha(p, n, &c).unwrap());
    }
    let top = if p == 2 { 2 } else { 1 };
    for n in 0..=top {
        for m in 0..=top {
            out.push(witt(p, n, m, &c).unwrap());
        }
    }
    let a = alpha(p, 1, &c).unwrap();
    let e = ep(p, &c).unwrap();
    out.push(e.clone());
    out.push(product(&a, &a, &c).unwrap());
    out.push(product(&a, &e, &c).unwrap());
    out.push(product(&a, &witt(p, 1, 0, &c).unwrap(), &c).unwrap());
    out
}

fn c4_hopf() -> Tally {
    let mut t = Tally::default();
    for p in [2, 3] {
        for g in catalog(p) {
            t.report(&g.verify_hopf());
        }
    }
    t
}

fn c5_verschiebung_shift() -> Tally {
    let mut t = Tally::default();
    for (n, m) in [(1, 0), (0, 1), (1, 1)] {
        let w = witt(2, n, m, &caps()).unwrap();
        let tr = w.algebra().as_truncated().unwrap().clone();
        let v = w.verschiebung();
        for c in 0..w.dim() {
            let e = tr.exps(c);
            // x^e ↦ Π x_{i−1}^{e_i}, and 0 if x_0 occurs
            let expect = if e[0] > 0 {
                vec![]
            } else {
                let mut s = e[1..].to_vec();
                s.push(0);
                vec![(tr.index(&s).unwrap(), 1)]
            };
            t.check(v.pullback.columns[c] == expect, || {
                format!("W_{{{n},{m}}}: V^*({}) is not the shift", tr.monomial_name(c))
            });
        }
    }
    t
}

fn c6_enumeration() -> Tally {
    let mut t = Tally::default();
    let c = caps();
    for p in [2u32, 3] {
        for g in catalog(p) {
            let run = || -> Result<Option<String>, Error> {
                let ctx = DieudonneContext::new(&g, &c)?;
                let d = ctx.enumerate(&c)?;
                let l = g.length()?;
                if d.len() as u64 != (p as u64).pow(l) {
                    return Ok(Some(format!("|D({})| = {} ≠ p^{l}", g.name(), d.len())));
                }
                let oracle_bound = if p == 2 { 16 } else { 27 };
                if g.dim() <= oracle_bound {
                    let oracle = if g.dim() <= 16 {
                        brute_force_dieudonne(&ctx)?
                    } else {
                        meet_in_the_middle_dieudonne(&ctx, 7)?
                    };
                    if oracle != d.elements() {
                        return Ok(Some(format!("D({}) disagrees with the oracle", g.name())));
                    }
                }
                Ok(None)
            };
            match run() {
                Ok(r) => t.check(r.is_none(), || r.unwrap()),
                Err(e) => t.error(g.name(), e),
            }
        }
    }
    let w = witt(2, 1, 1, &c).unwrap();
    let m = FiniteAModule::from_dieudonne(&DieudonneContext::new(&w, &c).unwrap().enumerate(&c).unwrap()).unwrap();
    let pres = m.presentation();
    t.check(pres.generators == 1 && pres.to_text() == "A/(F^2,V^2)", || {
        format!("D(W_{{1,1}}) = {}", pres.to_text())
    });
    t
}

fn c7_axioms() -> Tally {
    let mut t = Tally::default();
    let c = caps();
    for p in [2, 3] {
        for g in catalog(p) {
            match DieudonneContext::new(&g, &c).and_then(|ctx| ctx.enumerate(&c)) {
                Ok(d) => {
                    t.report(&d.check_module_axioms());
                    match FiniteAModule::from_dieudonne(&d) {
                        Ok(m) => t.report(&m.check_axioms()),
                        Err(e) => t.error(g.name(), e),
                    }
                }
                Err(e) => t.error(g.name(), e),
            }
        }
    }
    t
}

/// The hom `G → H` whose pullback sends the `k`-th coordinate of `H` to
/// `images[k]`.
fn hom(h: &FiniteGroupScheme, g: &FiniteGroupScheme, images: &[Vec<u32>]) -> SchemeHom {
    let pullback = hom_from_images(h.algebra().as_truncated().unwrap(), g.algebra(), images).unwrap();
    SchemeHom { pullback }
}

/// The basis vector of `x_i^k` in `g`.
fn power(g: &FiniteGroupScheme, i: usize, k: u32) -> Vec<u32> {
    basis_vec(g.dim(), g.algebra().as_truncated().unwrap().power_index(i, k).unwrap())
}

fn c8_exactness() -> Tally {
    let mut t = Tally::default();
    let c = caps();
    for p in [2u32, 3] {
        let w11 = witt(p, 1, 1, &c).unwrap();
        let w10 = witt(p, 1, 0, &c).unwrap();
        let a1 = alpha(p, 1, &c).unwrap();
        let a2 = alpha(p, 2, &c).unwrap();
        let e = ep(p, &c).unwrap();
        let ae = product(&a1, &e, &c).unwrap();

        // W_{1,1} → α_{p²}, (x_0, x_1) ↦ x_0, is the cokernel of V
        let f = hom(&a2, &w11, &[power(&w11, 0, 1)]);
        t.report(&check_exactness(&w11, &a2, &f, &c));
        let fp = w11.fp();
        let v = w11.verschiebung();
        let fv = f.after(&fp, &v);
        t.check((1..a2.dim()).all(|k| fv.pullback.columns[k].is_empty()), || {
            format!("p={p}: the projection does not kill V(W_{{1,1}})")
        });
        let (ker_f, _) = w11.kernel(&a2, &f).unwrap();
        let (ker_v, _) = w11.kernel(&w11, &v).unwrap();
        // im V ⊂ ker f with |im V| = |W_{1,1}|/|ker V| = |ker f|
        t.check(ker_v.dim() * ker_f.dim() == w11.dim(), || {
            format!("p={p}: |ker V|·|ker f| = {} ≠ {}", ker_v.dim() * ker_f.dim(), w11.dim())
        });

        // W_{1,0} → α_p, (x_0, x_1) ↦ x_0
        t.report(&check_exactness(&w10, &a1, &hom(&a1, &w10, &[power(&w10, 0, 1)]), &c));
        // α_{p²} → α_p, x ↦ x^p
        t.report(&check_exactness(&a2, &a1, &hom(&a1, &a2, &[power(&a2, 0, p)]), &c));
        // α_p × E[p] → E[p]
        t.report(&check_exactness(&ae, &e, &hom(&e, &ae, &[power(&ae, 1, 1)]), &c));
    }
    t
}

fn c9_standard_duality() -> Tally {
    let mut t = Tally::default();
    let c = caps();
    for p in [2, 3] {
        for (n, m) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let run = || -> Result<(Report, Report), Error> {
                let sd = StandardDuality::new(n, m, p, &c)?;
                Ok((sd.verify(&c)?, sd.standard_iso(&c)?.report))
            };
            match run() {
                Ok((gen, iso)) => {
                    t.report(&gen);
                    t.report(&iso);
                }
                Err(e) => t.error(&format!("W_{{{n},{m}}} p={p}"), e),
            }
        }
    }
    let w = witt(2, 1, 1, &c).unwrap();
    match PairingContext::for_scheme(&w, &c).and_then(|ctx| ctx.check(&c)) {
        Ok(r) => t.report(&r),
        Err(e) => t.error("pairing on W_{1,1}", e),
    }
    t
}

/// The operator identity on `W_{1,0}` with the sign as printed (`+`),
/// and the three rules on `A_{1,1}` at `p = 2`.
fn c10_operators() -> Tally {
    let mut t = Tally::default();
    let c = caps();
    for p in [2, 3, 5] {
        match check_first_witt_operator(p, 1, &c) {
            Ok(r) => t.report(&r),
            Err(e) => t.error(&format!("W_{{1,0}} p={p}"), e),
        }
    }
    for check in [leibniz_x0_check, leibniz_xi_check, grading_check] {
        match check(1, 1, 2, &c) {
            Ok(r) => t.report(&r),
            Err(e) => t.error("A_{1,1}", e),
        }
    }
    t
}

fn c11_lambda() -> Tally {
    let mut t = Tally::default();
    let c = caps();
    for p in [2u32, 3, 5] {
        let vars = witt_vars(&["x", "y"], 1);
        let one = BigRational::from_integer(BigInt::from(1));
        let mut terms = vec![(vec![0, 1, 0, 0], one.clone()), (vec![0, 0, 0, 1], one)];
        for i in 1..p {
            terms.push((vec![i, 0, p - i, 0], BigRational::new(BigInt::from(1), fact(i) * fact(p - i))));
        }
        let want = RatPoly::from_terms(&vars, terms);
        match lambda_poly(p, 1, &c) {
            Ok(l) => t.check(l.poly == want, || format!("λ_1 at p={p}")),
            Err(e) => t.error(&format!("λ_1 p={p}"), e),
        }
    }
    for (p, top) in [(2, 2), (3, 1), (5, 1)] {
        for r in 0..=top {
            match lambda_phi_congruence(p, r, &c) {
                Ok(rep) => t.report(&rep),
                Err(e) => t.error(&format!("λ_{r} p={p}"), e),
            }
        }
    }
    // every (p, r) with p^{r+1} ≤ 625 among the primes used elsewhere
    for p in [2u32, 3, 5, 7] {
        let mut r = 1;
        while (p as u64).pow(r + 1) <= 625 {
            t.report(&congruence_suite(p, r));
            r += 1;
        }
    }
    t
}

fn c12_inverse() -> Tally {
    let mut t = Tally::default();
    let c = caps();
    for text in ["(A/(F,V))^2", "A/(F^2,V)", "A/(F,V^2)", "A/(F-V,p)", "A/(F^2,V^2)"] {
        let run = || -> Result<bool, Error> {
            let pres = parse_presentation(text, 2)?;
            let g = inverse_functor(&pres, &c)?;
            let back = FiniteAModule::from_dieudonne(&DieudonneContext::new(&g, &c)?.enumerate(&c)?)?;
            let expect = FiniteAModule::from_presentation(&pres, &c)?;
            Ok(back.isomorphism(&expect, &c)?.is_some())
        };
        match run() {
            Ok(ok) => t.check(ok, || format!("D(D^-1({text})) ≇ {text}")),
            Err(e) => t.error(text, e),
        }
    }
    match classify_length2(2, &c) {
        Ok(cl) => {
            t.report(&cl.report);
            t.check(cl.a_numbers == [2, 1, 1, 1], || format!("a-numbers {:?}", cl.a_numbers));
        }
        Err(e) => t.error("length two", e),
    }
    let e = inverse_functor(&parse_presentation("A/(F-V,p)", 2).unwrap(), &c).unwrap();
    t.check(is_isomorphic_small(&e, &ep(2, &c).unwrap(), &c).unwrap().is_some(), || {
        "D^-1(A/(F-V,p)) ≇ E[2]".into()
    });
    t
}

#[test]
fn acceptance() {
    let criteria: [(&str, f64, fn() -> Tally); 12] = [
        ("Witt laws: integrality and ghost identities", 10.0, c1_ghost),
        ("φ_1 closed form and homogeneity", 1.0, c2_phi1_and_homogeneity),
        ("W_n(F_p) against Z/p^{n+1}", 30.0, c3_ring_oracle),
        ("Hopf axioms on the catalog", 60.0, c4_hopf),
        ("Verschiebung is the coordinate shift", 30.0, c5_verschiebung_shift),
        ("Dieudonné enumeration", 60.0, c6_enumeration),
        ("group and A-module axioms", 60.0, c7_axioms),
        ("exactness", 30.0, c8_exactness),
        ("standard functional, standard iso, pairing", 120.0, c9_standard_duality),
        ("operator identities", 30.0, c10_operators),
        ("λ_r", 60.0, c11_lambda),
        ("inverse functor", 120.0, c12_inverse),
    ];
    let mut results = Vec::new();
    for (k, (title, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let t = run();
        let secs = start.elapsed().as_secs_f64();
        let status = if t.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("{status} criterion {}: {title}: {} checks in {secs:.1}s (budget {budget}s)", k + 1, t.checked);
        if let Some(first) = t.failures.first() {
            line.push_str(&format!("; {} failing, first: {first}", t.failures.len()));
        }
        println!("{line}");
        for f in t.failures.iter().skip(1) {
            println!("    also: {f}");
        }
        results.push(t);
    }

    for (k, t) in results.iter().enumerate() {
        match k + 1 {
            // p = 2 at levels 7 and 8 is beyond the Witt level cap
            3 => {
                assert_eq!(t.failures.len(), 2, "{:?}", t.failures);
                for (f, n) in t.failures.iter().zip([7, 8]) {
                    assert!(f.starts_with(&format!("W_{n}(F_2): ")) && f.contains("exceeds cap"), "{f}");
                }
            }
            // the printed sign holds only at p = 2, and the x_i rule is false
            10 => {
                let names: Vec<&str> = t.failures.iter().map(|f| f.split(' ').nth(1).unwrap()).collect();
                assert_eq!(names, ["first-witt-operator", "first-witt-operator", "leibniz-xi"], "{:?}", t.failures);
                assert!(t.failures[0].contains("\"p\":3") && t.failures[1].contains("\"p\":5"));
            }
            _ => assert!(t.failures.is_empty(), "criterion {}: {:?}", k + 1, t.failures),
        }
    }
}
