use std::collections::HashMap;

use super::{FiniteGroupScheme, SchemeHom};
use crate::algebra::{self, Elem, LinearMap};
use crate::error::{Error, Result};
use crate::linalg::{sparse_from_dense, Echelon, Lead, SparseVec};
use crate::Caps;

/// Invariants preserved by isomorphism: dimension, cotangent dimension,
/// `dim α(G)`, and the ranks of `F^*`, `V^*` and their iterates.
pub fn fingerprint(g: &FiniteGroupScheme) -> Vec<usize> {
    let fp = g.fp();
    let mut out = vec![g.dim(), g.cotangent_dim(), g.alpha_module().len()];
    let f = g.frobenius();
    let v = g.verschiebung();
    let mut fk = f.clone();
    let mut vk = v.clone();
    for _ in 0..3 {
        out.push(fk.pullback.to_matrix().rank(&fp));
        out.push(vk.pullback.to_matrix().rank(&fp));
        fk = fk.after(&fp, &f);
        vk = vk.after(&fp, &v);
    }
    out
}

/// A monomial basis of `R` in the generators, with the change of basis.
struct GenPresentation {
    gens: Vec<usize>,
    orders: Vec<u32>,
    /// all monomials `Π g_i^{e_i}` with `e_i < orders[i]`
    monomials: Vec<Vec<u32>>,
    /// indices into `monomials` forming a basis of `R`
    basis: Vec<usize>,
    /// for each non-basis monomial: its expansion in the basis monomials
    relations: Vec<(usize, SparseVec)>,
    /// `e_c = Σ coords[c]_j · basis_j`
    coords: Vec<SparseVec>,
}

fn nilpotency_order(g: &FiniteGroupScheme, x: &[u32]) -> u32 {
    let mut acc = x.to_vec();
    let mut k = 1;
    while !algebra::is_zero(&acc) {
        acc = g.algebra().mul(&acc, x);
        k += 1;
    }
    k
}

fn present(h: &FiniteGroupScheme) -> GenPresentation {
    let d = h.dim();
    let fp = h.fp();
    let alg = h.algebra();
    let gens = h.generators();
    let orders: Vec<u32> = gens
        .iter()
        .map(|&g| nilpotency_order(h, &algebra::basis_vec(d, g)))
        .collect();
    let mut monomials: Vec<Vec<u32>> = vec![vec![0; gens.len()]];
    for (i, &o) in orders.iter().enumerate() {
        let mut next = Vec::new();
        for m in &monomials {
            for k in 0..o {
                let mut e = m.clone();
                e[i] = k;
                next.push(e);
            }
        }
        monomials = next;
    }
    let powers: Vec<Vec<Elem>> = gens
        .iter()
        .zip(&orders)
        .map(|(&g, &o)| {
            let x = algebra::basis_vec(d, g);
            let mut pw = vec![alg.one()];
            for _ in 1..o {
                let nxt = alg.mul(pw.last().unwrap(), &x);
                pw.push(nxt);
            }
            pw
        })
        .collect();
    let value = |e: &[u32]| {
        let mut acc = alg.one();
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                acc = alg.mul(&acc, &powers[i][k as usize]);
            }
        }
        acc
    };
    let values: Vec<SparseVec> = monomials.iter().map(|e| sparse_from_dense(&value(e))).collect();
    let mut basis = Vec::new();
    let mut rest = Vec::new();
    let mut basis_ech = Echelon::new(fp, Lead::Min, true);
    for (k, v) in values.iter().enumerate() {
        if basis_ech.contains(v) {
            rest.push(k);
        } else {
            basis_ech.insert(v);
            basis.push(k);
        }
    }
    let relations = rest
        .into_iter()
        .map(|k| (k, basis_ech.solve(&values[k]).expect("in span")))
        .collect();
    let coords = (0..d)
        .map(|c| basis_ech.solve(&vec![(c, 1)]).expect("monomials span R"))
        .collect();
    GenPresentation {
        gens,
        orders,
        monomials,
        basis,
        relations,
        coords,
    }
}

/// Searches for a Hopf isomorphism `G ≅ H`, returned as its pullback
/// `R_H → R_G`. Generator images are tried in canonical order, so the
/// result is deterministic. `Ok(None)` certifies that none exists.
pub fn is_isomorphic_small(g: &FiniteGroupScheme, h: &FiniteGroupScheme, caps: &Caps) -> Result<Option<SchemeHom>> {
    if g.p() != h.p() {
        return Err(Error::FieldMismatch(format!("F_{} vs F_{}", g.p(), h.p())));
    }
    let d = g.dim();
    if d > caps.iso_dim || h.dim() > caps.iso_dim {
        return Err(Error::cap("isomorphism search dimension", d.max(h.dim()) as u64, caps.iso_dim as u64));
    }
    if fingerprint(g) != fingerprint(h) {
        return Ok(None);
    }
    let fp = g.fp();
    let p = g.p() as u64;
    let pres = present(h);
    let r = pres.gens.len();

    // candidate images: nonzero elements of M_G with the generator's
    // nilpotency order; primitive generators must map to primitives
    let alpha_g = g.alpha_module();
    let mut candidates: Vec<Vec<Elem>> = Vec::with_capacity(r);
    for (i, &gen) in pres.gens.iter().enumerate() {
        let primitive = h.reduced_delta(&algebra::basis_vec(d, gen)).is_empty();
        let space: Vec<Elem> = if primitive {
            alpha_g.clone()
        } else {
            (1..d).map(|c| algebra::basis_vec(d, c)).collect()
        };
        let size = (p as f64).powi(space.len() as i32);
        if size > caps.iso_nodes as f64 {
            return Err(Error::cap("isomorphism search candidates", size as u64, caps.iso_nodes));
        }
        let mut list = Vec::new();
        let total = p.pow(space.len() as u32);
        for code in 1..total {
            let mut x = vec![0u32; d];
            let mut c = code;
            for b in space.iter().rev() {
                algebra::axpy(&fp, &mut x, (c % p) as u32, b);
                c /= p;
            }
            if nilpotency_order(g, &x) == pres.orders[i] {
                list.push(x);
            }
        }
        candidates.push(list);
    }

    // the constraints checkable once generators 0..=i are assigned
    let max_gen = |e: &[u32]| e.iter().rposition(|&k| k > 0).unwrap_or(0);
    let mut rel_at: Vec<Vec<usize>> = vec![Vec::new(); r];
    for (k, (mono, comb)) in pres.relations.iter().enumerate() {
        let mut lvl = max_gen(&pres.monomials[*mono]);
        for &(j, _) in comb {
            lvl = lvl.max(max_gen(&pres.monomials[pres.basis[j]]));
        }
        rel_at[lvl].push(k);
    }
    // Δ_H(g_i) in basis-monomial coordinates
    let dh = h.dim();
    let delta_coords: Vec<Vec<(usize, usize, u32)>> = pres
        .gens
        .iter()
        .map(|&gen| {
            let mut acc: HashMap<(usize, usize), u32> = HashMap::new();
            for &(t, v) in h.delta_basis(gen) {
                for &(j, x) in &pres.coords[t / dh] {
                    for &(k, y) in &pres.coords[t % dh] {
                        let e = acc.entry((j, k)).or_insert(0);
                        *e = fp.add(*e, fp.mul(v, fp.mul(x, y)));
                    }
                }
            }
            let mut v: Vec<_> = acc.into_iter().filter(|&(_, c)| c != 0).map(|((j, k), c)| (j, k, c)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut delta_at: Vec<Vec<usize>> = vec![Vec::new(); r];
    for (i, terms) in delta_coords.iter().enumerate() {
        let mut lvl = i;
        for &(j, k, _) in terms {
            lvl = lvl
                .max(max_gen(&pres.monomials[pres.basis[j]]))
                .max(max_gen(&pres.monomials[pres.basis[k]]));
        }
        delta_at[lvl].push(i);
    }

    struct Search<'a> {
        g: &'a FiniteGroupScheme,
        h: &'a FiniteGroupScheme,
        pres: &'a GenPresentation,
        candidates: &'a [Vec<Elem>],
        rel_at: &'a [Vec<usize>],
        delta_at: &'a [Vec<usize>],
        delta_coords: &'a [Vec<(usize, usize, u32)>],
        powers: Vec<Vec<Elem>>,
        nodes: u64,
        limit: u64,
    }

    impl Search<'_> {
        fn mono(&self, e: &[u32]) -> Elem {
            let alg = self.g.algebra();
            let mut acc = alg.one();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    acc = alg.mul(&acc, &self.powers[i][k as usize]);
                }
            }
            acc
        }

        fn basis_image(&self, j: usize) -> Elem {
            self.mono(&self.pres.monomials[self.pres.basis[j]])
        }

        fn consistent(&self, level: usize) -> bool {
            let fp = self.g.fp();
            let d = self.g.dim();
            for &k in &self.rel_at[level] {
                let (mono, comb) = &self.pres.relations[k];
                let lhs = self.mono(&self.pres.monomials[*mono]);
                let mut rhs = vec![0u32; d];
                for &(j, c) in comb {
                    algebra::axpy(&fp, &mut rhs, c, &self.basis_image(j));
                }
                if lhs != rhs {
                    return false;
                }
            }
            for &i in &self.delta_at[level] {
                let lhs = self.g.delta(&self.powers[i][1]);
                let mut acc: HashMap<usize, u32> = HashMap::new();
                for &(j, k, c) in &self.delta_coords[i] {
                    let t = self.g.outer(&self.basis_image(j), &self.basis_image(k));
                    for (idx, v) in t {
                        let e = acc.entry(idx).or_insert(0);
                        *e = fp.add(*e, fp.mul(c, v));
                    }
                }
                if lhs != super::finish(acc) {
                    return false;
                }
            }
            true
        }

        fn leaf(&self) -> Option<SchemeHom> {
            let fp = self.g.fp();
            let d = self.g.dim();
            let images: Vec<Elem> = (0..self.pres.basis.len()).map(|j| self.basis_image(j)).collect();
            let columns: Vec<SparseVec> = self
                .pres
                .coords
                .iter()
                .map(|cs| {
                    let mut v = vec![0u32; d];
                    for &(j, c) in cs {
                        algebra::axpy(&fp, &mut v, c, &images[j]);
                    }
                    sparse_from_dense(&v)
                })
                .collect();
            let f = SchemeHom {
                pullback: LinearMap { cod_dim: d, columns },
            };
            (f.pullback.is_bijective(&fp) && self.g.check_hom(self.h, &f).pass).then_some(f)
        }

        fn run(&mut self, level: usize) -> Result<Option<SchemeHom>> {
            if level == self.candidates.len() {
                return Ok(self.leaf());
            }
            for x in &self.candidates[level] {
                self.nodes += 1;
                if self.nodes > self.limit {
                    return Err(Error::cap("isomorphism search nodes", self.nodes, self.limit));
                }
                let alg = self.g.algebra();
                let mut pw = vec![alg.one()];
                for _ in 1..self.pres.orders[level] {
                    let nxt = alg.mul(pw.last().unwrap(), x);
                    pw.push(nxt);
                }
                self.powers.push(pw);
                if self.consistent(level) {
                    if let Some(f) = self.run(level + 1)? {
                        return Ok(Some(f));
                    }
                }
                self.powers.pop();
            }
            Ok(None)
        }
    }

    if r == 0 {
        return Ok(Some(SchemeHom::identity(g)));
    }
    let mut search = Search {
        g,
        h,
        pres: &pres,
        candidates: &candidates,
        rel_at: &rel_at,
        delta_at: &delta_at,
        delta_coords: &delta_coords,
        powers: Vec::new(),
        nodes: 0,
        limit: caps.iso_nodes,
    };
    search.run(0)
}
