use std::collections::BTreeSet;
use std::sync::OnceLock;

use dieudonne::amodule::Lattice;
use dieudonne::diffops::{divided_derivative, DividedPowerOp};
use dieudonne::duality::{PairingContext, PairingTable};
use dieudonne::numeric::{FieldDescriptor, FieldElem};
use dieudonne::scheme::catalog;
use dieudonne::witt::WittVector;
use dieudonne::Caps;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn trim(mut f: Vec<BigInt>) -> Vec<BigInt> {
    while f.last().is_some_and(Zero::is_zero) {
        f.pop();
    }
    f
}

fn binom(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

fn poly() -> impl Strategy<Value = Vec<BigInt>> {
    prop::collection::vec(-50i64..50, 0..=201).prop_map(|v| v.into_iter().map(BigInt::from).collect())
}

/// `Σ p^i a_i^{p^n}` mod `p^{n+1}`, by repeated multiplication.
fn residue(p: u64, a: &[u32]) -> u64 {
    let n = a.len() as u32 - 1;
    let q = p.pow(n + 1);
    let teich = |x: u64| (0..p.pow(n)).fold(1 % q, |acc, _| acc * x % q);
    a.iter()
        .enumerate()
        .map(|(i, &x)| p.pow(i as u32) * if x == 0 { 0 } else { teich(x as u64) } % q)
        .sum::<u64>()
        % q
}

fn witt_case() -> impl Strategy<Value = (u32, Vec<u32>, Vec<u32>)> {
    (prop_oneof![Just((2u32, 4u32)), Just((3, 2)), Just((5, 1)), Just((7, 1))]).prop_flat_map(|(p, n)| {
        let comps = prop::collection::vec(0..p, n as usize + 1);
        (Just(p), comps.clone(), comps)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divided_powers_compose(f in poly(), a in 0u64..120, b in 0u64..120) {
        let lhs = divided_derivative(a, &divided_derivative(b, &f));
        let rhs = trim(divided_derivative(a + b, &f).into_iter().map(|c| c * binom(a + b, a)).collect());
        prop_assert_eq!(trim(lhs), rhs);
    }

    #[test]
    fn divided_powers_commute(f in poly(), p in prop_oneof![Just(2u32), Just(3), Just(5)], i in 0u32..4, j in 0u32..4) {
        let (di, dj) = (DividedPowerOp { p, i }, DividedPowerOp { p, i: j });
        prop_assert_eq!(trim(di.apply(&dj.apply(&f))), trim(dj.apply(&di.apply(&f))));
    }

    #[test]
    fn witt_ops_match_residues((p, a, b) in witt_case()) {
        let q = (p as u64).pow(a.len() as u32);
        let x = WittVector::from_prime(p, &a).unwrap();
        let y = WittVector::from_prime(p, &b).unwrap();
        let (ra, rb) = (residue(p as u64, &a), residue(p as u64, &b));
        let sum = x.add(&y).unwrap().prime_components().unwrap();
        let prod = x.mul(&y).unwrap().prime_components().unwrap();
        let neg = x.neg().unwrap().prime_components().unwrap();
        prop_assert_eq!(residue(p as u64, &sum), (ra + rb) % q);
        prop_assert_eq!(residue(p as u64, &prod), ra * rb % q);
        prop_assert_eq!(residue(p as u64, &neg), (q - ra) % q);
    }
}

/// `(p, modulus, n)` for F_4, F_8 and F_9, with three random vectors in `W_n`.
fn extension_case() -> impl Strategy<Value = (u32, Vec<u32>, u32, [Vec<Vec<u32>>; 3])> {
    prop_oneof![Just((2u32, vec![1u32, 1, 1], 2u32)), Just((2, vec![1, 1, 0, 1], 1)), Just((3, vec![1, 0, 1], 1))]
        .prop_flat_map(|(p, modulus, n)| {
            let elem = prop::collection::vec(0..p, modulus.len() - 1);
            let vector = prop::collection::vec(elem, n as usize + 1);
            (Just(p), Just(modulus), Just(n), [vector.clone(), vector.clone(), vector])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witt_ring_axioms_over_extensions((p, modulus, _n, vs) in extension_case()) {
        let desc = FieldDescriptor::extension(p, modulus).unwrap();
        let [x, y, z] = vs.map(|v| {
            WittVector::new(v.iter().map(|c| FieldElem::new(&desc, c).unwrap()).collect()).unwrap()
        });
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap());
        prop_assert!(x.add(&x.neg().unwrap()).unwrap().is_zero());
    }
}

struct Pairing {
    ctx: PairingContext,
    table: PairingTable,
    modulus: u64,
}

fn pairings() -> &'static [Pairing] {
    static CELL: OnceLock<Vec<Pairing>> = OnceLock::new();
    CELL.get_or_init(|| {
        let caps = Caps::default();
        [("witt:1,1", 2), ("witt:1,0", 3), ("alpha:p^2", 2), ("ep", 3)]
            .iter()
            .map(|&(e, p)| {
                let g = catalog(e, p, &caps).unwrap();
                let ctx = PairingContext::for_scheme(&g, &caps).unwrap();
                let table = ctx.table(&caps).unwrap();
                let modulus = (p as u64).pow(ctx.witt_level() + 1);
                Pairing { ctx, table, modulus }
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pairing_is_biadditive(which in 0usize..4, i in any::<prop::sample::Index>(), k in any::<prop::sample::Index>(),
                             j in any::<prop::sample::Index>(), l in any::<prop::sample::Index>()) {
        let Pairing { ctx, table: t, modulus } = &pairings()[which];
        let (i, k) = (i.index(t.xs.len()), k.index(t.xs.len()));
        let (j, l) = (j.index(t.ys.len()), l.index(t.ys.len()));
        let s = t.xs.binary_search(&ctx.source.dot_plus(&t.xs[i], &t.xs[k])).expect("D(G) is closed");
        let u = t.ys.binary_search(&ctx.dual_ctx.dot_plus(&t.ys[j], &t.ys[l])).expect("D(G^D) is closed");
        prop_assert_eq!(t.values[s][j], (t.values[i][j] + t.values[k][j]) % modulus);
        prop_assert_eq!(t.values[i][u], (t.values[i][j] + t.values[i][l]) % modulus);
        // the table agrees with a direct evaluation
        prop_assert_eq!(ctx.pair(&t.xs[i], &t.ys[j]).unwrap().residue, t.values[i][j]);
    }
}

fn ambient(p: u64, e: u32, dim: usize) -> Vec<Vec<u64>> {
    let m = p.pow(e);
    (0..m.pow(dim as u32))
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let d = k % m;
                    k /= m;
                    d
                })
                .collect()
        })
        .collect()
}

/// The subgroup generated by `gens`, by closing `{0}` under adding generators.
fn span(m: u64, dim: usize, gens: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
    let mut seen = BTreeSet::from([vec![0; dim]]);
    let mut frontier = vec![vec![0; dim]];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % m).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen
}

fn lattice_case() -> impl Strategy<Value = (u32, u32, usize, Vec<Vec<u64>>)> {
    prop_oneof![Just((2u32, 2u32, 3usize)), Just((3, 2, 2)), Just((2, 3, 2)), Just((5, 1, 3))].prop_flat_map(
        |(p, e, dim)| {
            let m = (p as u64).pow(e);
            let gens = prop::collection::vec(prop::collection::vec(0..m, dim), 0..4);
            (Just(p), Just(e), Just(dim), gens)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lattice_matches_brute_force((p, e, dim, gens) in lattice_case()) {
        let mut l = Lattice::new(p, e, dim);
        for g in &gens {
            l.insert(g);
        }
        let (pp, m) = (p as u64, (p as u64).pow(e));
        let oracle = span(m, dim, &gens);
        let elems: BTreeSet<Vec<u64>> = l.elements().into_iter().collect();
        prop_assert_eq!(&elems, &oracle);
        prop_assert_eq!(pp.pow(l.log_order()), oracle.len() as u64);
        prop_assert_eq!(pp.pow(l.log_index()), l.representatives().len() as u64);
        let reps: BTreeSet<Vec<u64>> = l.representatives().into_iter().collect();
        for v in ambient(pp, e, dim) {
            prop_assert_eq!(l.contains(&v), oracle.contains(&v));
            let r = l.reduce(&v);
            prop_assert!(reps.contains(&r));
            let diff: Vec<u64> = v.iter().zip(&r).map(|(a, b)| (a + m - b) % m).collect();
            prop_assert!(oracle.contains(&diff));
        }
    }
}
