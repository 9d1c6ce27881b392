//! Finite `A`-modules stored as operation tables on `0..len`.

use std::collections::{HashMap, VecDeque};

use serde_json::json;

use super::{AElem, AModulePresentation, Lattice, TruncatedA};
use crate::dieudonne::DieudonneModule;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::Caps;

/// Coordinates of an `r`-tuple in `(Z/p^e)^{r·width}`.
pub(crate) fn flatten(t: &[AElem]) -> Vec<u64> {
    t.iter().flat_map(|a| a.iter().copied()).collect()
}

pub(crate) fn unflatten(ring: &TruncatedA, v: &[u64]) -> Vec<AElem> {
    v.chunks(ring.width())
        .map(|c| c.iter().enumerate().map(|(s, &a)| a % ring.modulus(s)).collect())
        .collect()
}

/// The truncation itself: `p^{len} · (coordinate)` is zero in `A_{M,N}`.
fn truncation_lattice(ring: &TruncatedA, r: usize) -> Lattice {
    let w = ring.width();
    let mut l = Lattice::new(ring.p, ring.max_len(), r * w);
    for k in 0..r {
        for s in 0..w {
            let mut v = vec![0u64; r * w];
            v[k * w + s] = ring.modulus(s) % l.modulus();
            if v[k * w + s] != 0 {
                l.insert(&v);
            }
        }
    }
    l
}

/// Multiplies every entry of a tuple by `F^jV^i`.
fn scale_tuple(ring: &TruncatedA, t: &[AElem], j: u32, i: u32) -> Vec<AElem> {
    let w = ring.word(1, j, i);
    t.iter().map(|a| ring.mul(&w, a)).collect()
}

fn insert_submodule(ring: &TruncatedA, l: &mut Lattice, rel: &[AElem]) -> bool {
    let mut grew = false;
    for (j, i) in ring.monomials() {
        grew |= l.insert(&flatten(&scale_tuple(ring, rel, j, i)));
    }
    grew
}

/// The `A`-submodule of `A_{M,N}^r` generated by `relations`, together
/// with the truncation.
pub(crate) fn relation_lattice(ring: &TruncatedA, r: usize, relations: &[Vec<AElem>]) -> Lattice {
    let mut l = truncation_lattice(ring, r);
    for rel in relations {
        insert_submodule(ring, &mut l, rel);
    }
    l
}

/// A finite `A`-module: element `0..len`, with addition, negation, `F`, `V`.
#[derive(Debug, Clone)]
pub struct FiniteAModule {
    p: u32,
    add: Vec<u32>,
    neg: Vec<u32>,
    f: Vec<u32>,
    v: Vec<u32>,
    zero: u32,
    labels: Vec<String>,
}

impl FiniteAModule {
    pub fn from_tables(
        p: u32,
        add: Vec<u32>,
        neg: Vec<u32>,
        f: Vec<u32>,
        v: Vec<u32>,
        zero: u32,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = labels.len();
        if add.len() != n * n || neg.len() != n || f.len() != n || v.len() != n || zero as usize >= n {
            return Err(Error::InvalidArgument("inconsistent module tables".into()));
        }
        Ok(FiniteAModule { p, add, neg, f, v, zero, labels })
    }

    pub fn from_dieudonne(d: &DieudonneModule) -> Result<Self> {
        let g = d.context().scheme();
        let zero = d
            .index_of(&vec![0; g.dim()])
            .ok_or_else(|| Error::NotDieudonne("0 missing from D(G)".into()))?;
        let labels = d.elements().iter().map(|x| g.algebra().format_elem(x)).collect();
        Self::from_tables(
            g.p(),
            d.addition_table()?,
            d.neg_table()?,
            d.f_table()?,
            d.v_table()?,
            zero as u32,
            labels,
        )
    }

    /// `A_{M,N}^r / (relations)`, one element per canonical coset
    /// representative.
    pub fn from_presentation(m: &AModulePresentation, caps: &Caps) -> Result<Self> {
        let ring = m.ring();
        let r = m.generators;
        let lattice = relation_lattice(&ring, r, &m.relations);
        let size = (m.p as f64).powi(lattice.log_index() as i32);
        if size > caps.enumeration as f64 {
            return Err(Error::cap("presented module size", size as u64, caps.enumeration));
        }
        let reps = lattice.representatives();
        let index: HashMap<Vec<u64>, u32> = reps.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let look = |v: &[u64]| index[&lattice.reduce(v)];
        let modulus = lattice.modulus();
        let n = reps.len();
        let mut add = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let s: Vec<u64> = reps[a].iter().zip(&reps[b]).map(|(x, y)| (x + y) % modulus).collect();
                add[a * n + b] = look(&s);
            }
        }
        let act = |t: &Vec<u64>, j, i| look(&flatten(&scale_tuple(&ring, &unflatten(&ring, t), j, i)));
        let neg = reps
            .iter()
            .map(|t| look(&t.iter().map(|&x| (modulus - x) % modulus).collect::<Vec<_>>()))
            .collect();
        let f = reps.iter().map(|t| act(t, 1, 0)).collect();
        let v = reps.iter().map(|t| act(t, 0, 1)).collect();
        let labels = reps
            .iter()
            .map(|t| {
                let parts: Vec<String> = unflatten(&ring, t).iter().map(|a| ring.format(a)).collect();
                if parts.len() == 1 {
                    parts[0].clone()
                } else {
                    format!("({})", parts.join(", "))
                }
            })
            .collect();
        let zero = look(&vec![0; lattice.dim()]);
        Self::from_tables(m.p, add, neg, f, v, zero, labels)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn zero(&self) -> u32 {
        self.zero
    }

    pub fn label(&self, x: u32) -> &str {
        &self.labels[x as usize]
    }

    pub fn plus(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.len() + b as usize]
    }

    pub fn negate(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.f[a as usize]
    }

    pub fn verschiebung(&self, a: u32) -> u32 {
        self.v[a as usize]
    }

    /// `a + ⋯ + a` (`k` times).
    pub fn times(&self, mut k: u64, a: u32) -> u32 {
        let mut acc = self.zero;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.plus(acc, base);
            }
            base = self.plus(base, base);
            k >>= 1;
        }
        acc
    }

    /// `F^j V^i a`.
    pub fn word(&self, j: u32, i: u32, mut a: u32) -> u32 {
        for _ in 0..j {
            a = self.frobenius(a);
        }
        for _ in 0..i {
            a = self.verschiebung(a);
        }
        a
    }

    /// `b · a` for `b ∈ A_{M,N}`; needs `F^M = V^N = 0` on the module.
    pub fn act(&self, ring: &TruncatedA, b: &[u64], a: u32) -> u32 {
        let mut acc = self.zero;
        for (s, &c) in b.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let d = ring.delta(s);
            let w = self.word(d.max(0) as u32, (-d).max(0) as u32, a);
            acc = self.plus(acc, self.times(c, w));
        }
        acc
    }

    /// `Σ_k b_k · g_k`.
    pub fn act_tuple(&self, ring: &TruncatedA, b: &[AElem], gens: &[u32]) -> u32 {
        b.iter()
            .zip(gens)
            .fold(self.zero, |acc, (bk, &g)| self.plus(acc, self.act(ring, bk, g)))
    }

    fn order_of(&self, step: impl Fn(u32) -> u32) -> u32 {
        let mut cur: Vec<u32> = (0..self.len() as u32).collect();
        let mut k = 0;
        while cur.iter().any(|&x| x != self.zero) {
            cur = cur.into_iter().map(&step).collect();
            k += 1;
        }
        k
    }

    /// Smallest `a` with `F^a = 0`.
    pub fn f_order(&self) -> u32 {
        self.order_of(|x| self.frobenius(x))
    }

    pub fn v_order(&self) -> u32 {
        self.order_of(|x| self.verschiebung(x))
    }

    /// The subgroup generated by `gens`, as a membership mask.
    pub fn subgroup(&self, gens: &[u32]) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        mask[self.zero as usize] = true;
        let mut members = vec![self.zero];
        let mut queue: VecDeque<u32> = VecDeque::from([self.zero]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.plus(x, g);
                if !mask[y as usize] {
                    mask[y as usize] = true;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        mask
    }

    /// The words `F^jV^i g` spanning the submodule generated by `gens`.
    fn spanning_words(&self, gens: &[u32]) -> Vec<u32> {
        let (fo, vo) = (self.f_order(), self.v_order());
        let mut out = Vec::new();
        for &g in gens {
            for j in 0..fo.max(1) {
                for i in 0..vo.max(1) {
                    out.push(self.word(j, i, g));
                }
            }
        }
        out.retain(|&x| x != self.zero);
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn submodule(&self, gens: &[u32]) -> Vec<bool> {
        self.subgroup(&self.spanning_words(gens))
    }

    /// `FM + VM`, the radical; `M/(FM + VM)` has dimension = minimal
    /// number of generators.
    pub fn radical(&self) -> Vec<bool> {
        let mut gens: Vec<u32> = (0..self.len() as u32)
            .flat_map(|x| [self.frobenius(x), self.verschiebung(x)])
            .filter(|&x| x != self.zero)
            .collect();
        gens.sort_unstable();
        gens.dedup();
        self.subgroup(&gens)
    }

    /// Greedy in index order: keep an element unless it lies in the span of
    /// the radical and the generators kept so far.
    pub fn minimal_generators(&self) -> Vec<u32> {
        let rad: Vec<u32> = self
            .radical()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect();
        let mut basis = rad.clone();
        let mut mask = self.subgroup(&basis);
        let mut gens = Vec::new();
        for x in 0..self.len() as u32 {
            if !mask[x as usize] {
                gens.push(x);
                basis.push(x);
                mask = self.subgroup(&basis);
            }
        }
        gens
    }
}

impl FiniteAModule {
    /// `ker(A_{M,N}^r → M, e_k ↦ g_k)`, generated by triangular relations:
    /// for each coordinate `u_c`, the least `t` with `t·φ(u_c)` in the image
    /// of the earlier coordinates gives `t·u_c − (preimage)`.
    pub fn kernel_lattice(&self, ring: &TruncatedA, gens: &[u32]) -> (Lattice, Vec<Vec<u64>>) {
        let r = gens.len();
        let w = ring.width();
        let dim = r * w;
        let mut lattice = truncation_lattice(ring, r);
        let modulus = lattice.modulus();
        let mut pre: HashMap<u32, Vec<u64>> = HashMap::from([(self.zero, vec![0u64; dim])]);
        let mut relations = Vec::new();
        for k in 0..r {
            for s in 0..w {
                let c = k * w + s;
                let d = ring.delta(s);
                let x = self.word(d.max(0) as u32, (-d).max(0) as u32, gens[k]);
                let mut t = 1u64;
                let mut tx = x;
                while !pre.contains_key(&tx) {
                    tx = self.plus(tx, x);
                    t += 1;
                }
                let mut rel: Vec<u64> = pre[&tx].iter().map(|&a| (modulus - a) % modulus).collect();
                rel[c] = (rel[c] + t) % modulus;
                if lattice.insert(&rel) {
                    relations.push(rel);
                }
                let old: Vec<(u32, Vec<u64>)> = pre.iter().map(|(&h, v)| (h, v.clone())).collect();
                for (h, v) in old {
                    let mut y = h;
                    let mut vy = v;
                    for _ in 1..t {
                        y = self.plus(y, x);
                        vy[c] = (vy[c] + 1) % modulus;
                        pre.insert(y, vy.clone());
                    }
                }
            }
        }
        (lattice, relations)
    }

    /// Minimal generators (greedy, index order) and relations chosen from
    /// simple words first: `F^w`, `V^w`, `F^j − V^i`, `F^jV^i`, by weight.
    pub fn presentation(&self) -> AModulePresentation {
        let gens = self.minimal_generators();
        let r = gens.len();
        let m = self.f_order().max(1) - 1;
        let n = self.v_order().max(1) - 1;
        let ring = TruncatedA { p: self.p, f_bound: m + 2, v_bound: n + 2 };
        let (kernel, fallback) = self.kernel_lattice(&ring, &gens);
        let mut span = truncation_lattice(&ring, r);
        let mut relations = Vec::new();
        let top = ring.f_bound.max(ring.v_bound);
        let mut candidates: Vec<(usize, AElem)> = Vec::new();
        for wt in 1..=top {
            for k in 0..r {
                candidates.push((k, ring.word(1, wt, 0)));
                candidates.push((k, ring.word(1, 0, wt)));
                for j in 1..=wt {
                    for i in 1..=wt {
                        if j.max(i) == wt {
                            candidates.push((k, ring.sub(&ring.word(1, j, 0), &ring.word(1, 0, i))));
                        }
                    }
                }
                for j in 1..=wt {
                    for i in 1..=wt {
                        if j.max(i) == wt {
                            candidates.push((k, ring.word(1, j, i)));
                        }
                    }
                }
            }
        }
        let mut tuples: Vec<Vec<AElem>> = candidates
            .into_iter()
            .map(|(k, a)| {
                let mut t = vec![ring.zero(); r];
                t[k] = a;
                t
            })
            .collect();
        tuples.extend(fallback.iter().map(|v| unflatten(&ring, v)));
        for t in tuples {
            if span.log_order() == kernel.log_order() {
                break;
            }
            let v = flatten(&t);
            if kernel.contains(&v) && !span.contains(&v) {
                insert_submodule(&ring, &mut span, &t);
                relations.push(t);
            }
        }
        // display order: F^j, then F^j − V^i, then V^i, then the rest
        relations.sort_by_cached_key(|t| {
            let k = t.iter().position(|a| !ring.is_zero(a)).unwrap_or(r);
            let s = ring.format(&t[k.min(r - 1)]);
            let kind = match (s.starts_with('F'), s.contains(['+', '-']), s.starts_with('V')) {
                (true, false, _) => 0,
                (true, true, _) => 1,
                (_, _, true) => 2,
                _ => 3,
            };
            (k, kind, s.len())
        });
        AModulePresentation { p: self.p, m, n, generators: r, relations }
    }

    /// Abelian group laws, additivity of `F` and `V`, and `FV = VF = p`,
    /// checked on all elements (associativity on all triples).
    pub fn check_axioms(&self) -> Report {
        let params = json!({ "p": self.p, "size": self.len() });
        let n = self.len() as u32;
        let p = self.p as u64;
        let fail = |why: String| Report::fail("amodule-axioms", params.clone(), why);
        for a in 0..n {
            if self.plus(a, self.zero) != a {
                return fail(format!("{} + 0 ≠ {}", self.label(a), self.label(a)));
            }
            if self.plus(a, self.negate(a)) != self.zero {
                return fail(format!("{} + (−{}) ≠ 0", self.label(a), self.label(a)));
            }
            let pa = self.times(p, a);
            if self.frobenius(self.verschiebung(a)) != pa || self.verschiebung(self.frobenius(a)) != pa {
                return fail(format!("FV = VF = p fails at {}", self.label(a)));
            }
            for b in 0..n {
                let ab = self.plus(a, b);
                if ab != self.plus(b, a) {
                    return fail(format!("not commutative at ({}, {})", self.label(a), self.label(b)));
                }
                if self.frobenius(ab) != self.plus(self.frobenius(a), self.frobenius(b))
                    || self.verschiebung(ab) != self.plus(self.verschiebung(a), self.verschiebung(b))
                {
                    return fail(format!("F or V not additive at ({}, {})", self.label(a), self.label(b)));
                }
                let row = ab as usize * self.len();
                for c in 0..n {
                    if self.add[row + c as usize] != self.plus(a, self.plus(b, c)) {
                        return fail(format!(
                            "not associative at ({}, {}, {})",
                            self.label(a),
                            self.label(b),
                            self.label(c)
                        ));
                    }
                }
            }
        }
        Report::pass("amodule-axioms", params)
    }

    /// An `A`-linear bijection `self → other`, as the image of each element.
    /// Generator images are searched in index order among elements outside
    /// the radical, pruned by the relations of `self`.
    pub fn isomorphism(&self, other: &FiniteAModule, caps: &Caps) -> Result<Option<Vec<u32>>> {
        if self.p != other.p
            || self.len() != other.len()
            || self.f_order() != other.f_order()
            || self.v_order() != other.v_order()
        {
            return Ok(None);
        }
        let pres = self.presentation();
        let gens = self.minimal_generators();
        let r = gens.len();
        if other.minimal_generators().len() != r {
            return Ok(None);
        }
        let ring = pres.ring();
        let mut rel_at: Vec<Vec<&Vec<AElem>>> = vec![Vec::new(); r];
        for rel in &pres.relations {
            if let Some(k) = (0..r).rev().find(|&k| !ring.is_zero(&rel[k])) {
                rel_at[k].push(rel);
            }
        }
        let rad = other.radical();
        let pool: Vec<u32> = (0..other.len() as u32).filter(|&x| !rad[x as usize]).collect();
        let words = self.spanning_words(&gens);

        struct Search<'a> {
            src: &'a FiniteAModule,
            dst: &'a FiniteAModule,
            ring: TruncatedA,
            gens: &'a [u32],
            rel_at: &'a [Vec<&'a Vec<AElem>>],
            pool: &'a [u32],
            words: &'a [u32],
            images: Vec<u32>,
            nodes: u64,
            limit: u64,
        }

        impl Search<'_> {
            fn run(&mut self) -> Result<Option<Vec<u32>>> {
                let k = self.images.len();
                if k == self.gens.len() {
                    return Ok(self.leaf());
                }
                for &h in self.pool {
                    self.nodes += 1;
                    if self.nodes > self.limit {
                        return Err(Error::cap("module isomorphism search nodes", self.nodes, self.limit));
                    }
                    self.images.push(h);
                    let ok = self.rel_at[k].iter().all(|rel| {
                        self.dst.act_tuple(&self.ring, &rel[..=k], &self.images) == self.dst.zero
                    });
                    if ok {
                        if let Some(m) = self.run()? {
                            return Ok(Some(m));
                        }
                    }
                    self.images.pop();
                }
                Ok(None)
            }

            /// Extends generator images along `x ↦ x + F^jV^i g`; any clash
            /// or failed law rejects the assignment.
            fn leaf(&self) -> Option<Vec<u32>> {
                let (src, dst) = (self.src, self.dst);
                let word_images: Vec<u32> = self
                    .words
                    .iter()
                    .map(|&w| {
                        // recover w as F^jV^i g_k
                        let fo = src.f_order().max(1);
                        let vo = src.v_order().max(1);
                        for (k, &g) in self.gens.iter().enumerate() {
                            for j in 0..fo {
                                for i in 0..vo {
                                    if src.word(j, i, g) == w {
                                        return dst.word(j, i, self.images[k]);
                                    }
                                }
                            }
                        }
                        unreachable!("spanning word without a source")
                    })
                    .collect();
                let mut map = vec![u32::MAX; src.len()];
                map[src.zero as usize] = dst.zero;
                let mut queue = VecDeque::from([src.zero]);
                while let Some(x) = queue.pop_front() {
                    for (&w, &wi) in self.words.iter().zip(&word_images) {
                        let y = src.plus(x, w);
                        let yi = dst.plus(map[x as usize], wi);
                        match map[y as usize] {
                            u32::MAX => {
                                map[y as usize] = yi;
                                queue.push_back(y);
                            }
                            z if z != yi => return None,
                            _ => {}
                        }
                    }
                }
                let mut seen = vec![false; dst.len()];
                for &y in &map {
                    if y == u32::MAX || std::mem::replace(&mut seen[y as usize], true) {
                        return None;
                    }
                }
                let n = src.len() as u32;
                for a in 0..n {
                    let ma = map[a as usize];
                    if map[src.frobenius(a) as usize] != dst.frobenius(ma)
                        || map[src.verschiebung(a) as usize] != dst.verschiebung(ma)
                    {
                        return None;
                    }
                    for b in 0..n {
                        if map[src.plus(a, b) as usize] != dst.plus(ma, map[b as usize]) {
                            return None;
                        }
                    }
                }
                Some(map)
            }
        }

        let mut search = Search {
            src: self,
            dst: other,
            ring,
            gens: &gens,
            rel_at: &rel_at,
            pool: &pool,
            words: &words,
            images: Vec::new(),
            nodes: 0,
            limit: caps.iso_nodes,
        };
        search.run()
    }
}
