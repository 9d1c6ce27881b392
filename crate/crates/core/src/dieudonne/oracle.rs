//! Reference enumerations of `D(G)` that share nothing with the level-wise
//! solver except the defining identity.

use std::collections::HashMap;

use super::DieudonneContext;
use crate::algebra::{self, Elem};
use crate::error::{Error, Result};
use crate::linalg::{sparse_from_dense, Echelon, Lead, SparseVec};
use crate::numeric::PrimeField;

/// Largest search space either oracle will walk.
pub const ORACLE_LIMIT: u64 = 1 << 24;

/// Tests every element of the augmentation ideal.
pub fn brute_force_dieudonne(ctx: &DieudonneContext) -> Result<Vec<Elem>> {
    let g = ctx.scheme();
    let d = g.dim();
    let p = g.p() as u64;
    let total = (p as f64).powi(d as i32 - 1);
    if total > ORACLE_LIMIT as f64 {
        return Err(Error::cap("brute-force search space", total as u64, ORACLE_LIMIT));
    }
    let mut x = vec![0u32; d];
    let mut out = Vec::new();
    loop {
        if ctx.is_dieudonne(&x) {
            out.push(x.clone());
        }
        // odometer over coordinates 1..d
        let mut i = 1;
        while i < d {
            x[i] += 1;
            if (x[i] as u64) < p {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    out.sort();
    Ok(out)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `k` pseudo-random `F_p`-linear functionals on `R ⊗ R`.
struct Fingerprint {
    fp: PrimeField,
    k: usize,
    seed: u64,
}

impl Fingerprint {
    fn new(fp: PrimeField, seed: u64) -> Self {
        let bits = 32 - (fp.p() - 1).leading_zeros();
        Fingerprint {
            fp,
            k: (64 / bits) as usize,
            seed,
        }
    }

    fn weight(&self, j: usize, t: usize) -> u32 {
        (splitmix(self.seed ^ ((j as u64) << 40) ^ t as u64) % self.fp.p() as u64) as u32
    }

    fn of(&self, t: &SparseVec) -> Vec<u32> {
        (0..self.k)
            .map(|j| {
                t.iter()
                    .fold(0, |acc, &(i, v)| self.fp.add(acc, self.fp.mul(v, self.weight(j, i))))
            })
            .collect()
    }

    fn axpy(&self, acc: &mut [u32], c: u32, v: &[u32]) {
        for (a, &b) in acc.iter_mut().zip(v) {
            *a = self.fp.add(*a, self.fp.mul(c, b));
        }
    }

    fn pack(&self, v: &[u32]) -> u64 {
        v.iter().fold(0u64, |acc, &x| acc.wrapping_mul(self.fp.p() as u64).wrapping_add(x as u64))
    }
}

/// All `F_p`-combinations of `basis`, each with the running sum of the
/// matching fingerprint vectors, in odometer order.
fn walk(fp: PrimeField, sig: &Fingerprint, basis_sigs: &[Vec<u32>], mut visit: impl FnMut(&[u32], &[u32])) {
    let p = fp.p();
    let n = basis_sigs.len();
    let mut digits = vec![0u32; n];
    let mut acc = vec![0u32; sig.k];
    loop {
        visit(&digits, &acc);
        let mut i = 0;
        while i < n {
            digits[i] += 1;
            if digits[i] < p {
                sig.axpy(&mut acc, 1, &basis_sigs[i]);
                break;
            }
            // wrapping p → 0 removes (p − 1) copies, i.e. adds one more
            digits[i] = 0;
            sig.axpy(&mut acc, 1, &basis_sigs[i]);
            i += 1;
        }
        if i == n {
            break;
        }
    }
}

fn combine(fp: &PrimeField, d: usize, basis: &[Elem], digits: &[u32], out: &mut Elem) {
    out.clear();
    out.resize(d, 0);
    for (b, &c) in basis.iter().zip(digits) {
        if c != 0 {
            algebra::axpy(fp, out, c, b);
        }
    }
}

/// Meet in the middle on the decomposition `M = C ⊕ K₁ ⊕ K₂`, where
/// `K₁ ⊕ K₂ = ker V^*`. Writing `L(x) = Δx − x⊗1 − 1⊗x` and `ρ` for the
/// non-linear part of the law, the identity reads
/// `L(x_{K₁}) = ρ(V^*x_C) − L(x_C) − L(x_{K₂})`; the left side is tabulated
/// under random linear fingerprints and every match is confirmed with the
/// full identity, so the result is exact.
pub fn meet_in_the_middle_dieudonne(ctx: &DieudonneContext, seed: u64) -> Result<Vec<Elem>> {
    let g = ctx.scheme();
    let d = g.dim();
    let fp = g.fp();
    let p = g.p() as f64;
    let n = ctx.level();

    let vcols: Vec<SparseVec> = (1..d).map(|c| ctx.vstar[c].clone()).collect();
    let kech = Echelon::from_columns(fp, &vcols);
    let kernel: Vec<Elem> = kech
        .kernel()
        .iter()
        .map(|comb| {
            let mut v = vec![0u32; d];
            for &(j, c) in comb {
                v[j + 1] = c;
            }
            v
        })
        .collect();
    let mut span = Echelon::new(fp, Lead::Min, false);
    for k in &kernel {
        span.insert(&sparse_from_dense(k));
    }
    let complement: Vec<Elem> = (1..d)
        .filter_map(|c| {
            let e = vec![(c, 1)];
            span.insert(&e).then(|| algebra::basis_vec(d, c))
        })
        .collect();

    let half = (complement.len() + kernel.len()) / 2;
    let k1 = half.min(kernel.len());
    let (left, right) = kernel.split_at(k1);
    let cost = p.powi(k1 as i32).max(p.powi((complement.len() + right.len()) as i32));
    if cost > ORACLE_LIMIT as f64 {
        return Err(Error::cap("meet-in-the-middle search space", cost as u64, ORACLE_LIMIT));
    }

    let sig = Fingerprint::new(fp, seed);
    let lsig = |x: &Elem| sig.of(&g.reduced_delta(x));
    let left_sigs: Vec<Vec<u32>> = left.iter().map(lsig).collect();
    let right_sigs: Vec<Vec<u32>> = right.iter().map(lsig).collect();
    let comp_sigs: Vec<Vec<u32>> = complement.iter().map(lsig).collect();

    let mut table: HashMap<u64, Vec<Vec<u32>>> = HashMap::new();
    walk(fp, &sig, &left_sigs, |digits, acc| {
        table.entry(sig.pack(acc)).or_default().push(digits.to_vec());
    });

    let mut out = Vec::new();
    let mut xc = Vec::new();
    let mut xr = Vec::new();
    let mut xl = Vec::new();
    walk(fp, &sig, &comp_sigs, |cdigits, csig| {
        combine(&fp, d, &complement, cdigits, &mut xc);
        let y = ctx.v_act(&xc);
        let mut target = if n == 0 { vec![0; sig.k] } else { sig.of(&ctx.lower_part(n, &y)) };
        sig.axpy(&mut target, fp.neg(1), csig);
        walk(fp, &sig, &right_sigs, |rdigits, rsig| {
            let mut t = target.clone();
            sig.axpy(&mut t, fp.neg(1), rsig);
            if let Some(hits) = table.get(&sig.pack(&t)) {
                combine(&fp, d, right, rdigits, &mut xr);
                for ldigits in hits {
                    combine(&fp, d, left, ldigits, &mut xl);
                    let x = algebra::add(&fp, &algebra::add(&fp, &xc, &xr), &xl);
                    if ctx.is_dieudonne(&x) {
                        out.push(x);
                    }
                }
            }
        });
    });
    out.sort();
    Ok(out)
}
