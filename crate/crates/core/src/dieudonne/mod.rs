//! Dieudonné elements: `x ∈ M` with
//! `Δ(x) = φ_n(V^{n*}x⊗1, 1⊗V^{n*}x, …, x⊗1, 1⊗x)`, the module `D(G)` they
//! form, and the operations `∔`, Witt scalars, `F`, `V` on it.

mod inverse;
mod oracle;

pub use inverse::*;
pub use oracle::*;

use std::collections::HashMap;

use serde_json::json;

use crate::algebra::{self, Elem};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::report::Report;
use crate::scheme::{FiniteGroupScheme, SchemeHom};
use crate::witt::{law, reduce_mod_p, LawKind, WittVector};
use crate::Caps;

/// `φ_k mod p`, grouped as `Σ_a X^a · (Σ_b c_{ab} Y^b)`.
#[derive(Debug, Clone)]
struct LawEval {
    /// distinct exponent vectors (left or right halves)
    exps: Vec<Vec<u32>>,
    /// `(a, [(b, c)])` as indices into `exps`
    groups: Vec<(usize, Vec<(usize, u32)>)>,
}

impl LawEval {
    fn new(p: u32, k: u32, caps: &Caps, drop_top: bool) -> Result<Self> {
        let add = law(p, k, LawKind::Add, caps)?;
        let f = add.poly_at_level(k, k);
        let half = k as usize + 1;
        let mut exps: Vec<Vec<u32>> = Vec::new();
        let mut pos: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut intern = |e: &[u32]| -> usize {
            if let Some(&i) = pos.get(e) {
                return i;
            }
            exps.push(e.to_vec());
            pos.insert(e.to_vec(), exps.len() - 1);
            exps.len() - 1
        };
        let mut grouped: Vec<(usize, Vec<(usize, u32)>)> = Vec::new();
        let mut gpos: HashMap<usize, usize> = HashMap::new();
        for (e, c) in reduce_mod_p(&f, p) {
            let (a, b) = e.split_at(half);
            if drop_top && (a[half - 1] > 0 || b[half - 1] > 0) {
                continue;
            }
            let ia = intern(a);
            let ib = intern(b);
            let g = *gpos.entry(ia).or_insert_with(|| {
                grouped.push((ia, Vec::new()));
                grouped.len() - 1
            });
            grouped[g].1.push((ib, c));
        }
        Ok(LawEval { exps, groups: grouped })
    }
}

/// Values `Π u_i^{a_i}` of the chain monomials of one element.
#[derive(Debug, Clone)]
struct Prepared {
    mono: Vec<Elem>,
    /// `S[g] = Σ_b c_{ab} m[b]` for each group `g`
    partial: Vec<Elem>,
}

/// A scheme together with a level `n` such that `V^{n+1} = 0`.
#[derive(Debug, Clone)]
pub struct DieudonneContext {
    g: FiniteGroupScheme,
    level: u32,
    vstar: Vec<SparseVec>,
    laws: Vec<LawEval>,
    lower: Vec<LawEval>,
}

/// The smallest `n` with `(V^*)^{n+1} = 0` on the augmentation ideal.
pub fn verschiebung_nilpotency(g: &FiniteGroupScheme) -> Option<u32> {
    let d = g.dim();
    let fp = g.fp();
    let v = g.verschiebung().pullback;
    let mut cur: Vec<Elem> = (1..d).map(|c| algebra::basis_vec(d, c)).collect();
    for n in 0..=d as u32 {
        cur = cur.iter().map(|x| v.apply(&fp, x)).collect();
        if cur.iter().all(|x| algebra::is_zero(x)) {
            return Some(n);
        }
    }
    None
}

impl DieudonneContext {
    /// Uses the smallest level allowed by the nilpotency of `V`.
    pub fn new(g: &FiniteGroupScheme, caps: &Caps) -> Result<Self> {
        let n = verschiebung_nilpotency(g)
            .ok_or_else(|| Error::InvalidArgument(format!("V is not nilpotent on {}", g.name())))?;
        Self::with_level(g, n, caps)
    }

    pub fn with_level(g: &FiniteGroupScheme, n: u32, caps: &Caps) -> Result<Self> {
        match verschiebung_nilpotency(g) {
            Some(k) if k <= n => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "level {n} is too small: V^{} ≠ 0 on {}",
                    n + 1,
                    g.name()
                )))
            }
        }
        let p = g.p();
        let mut laws = Vec::new();
        let mut lower = Vec::new();
        for k in 0..=n {
            laws.push(LawEval::new(p, k, caps, false)?);
            lower.push(LawEval::new(p, k, caps, true)?);
        }
        Ok(DieudonneContext {
            g: g.clone(),
            level: n,
            vstar: g.verschiebung().pullback.columns,
            laws,
            lower,
        })
    }

    pub fn scheme(&self) -> &FiniteGroupScheme {
        &self.g
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn v_act(&self, x: &[u32]) -> Elem {
        let fp = self.g.fp();
        let mut out = vec![0u32; x.len()];
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                for &(i, v) in &self.vstar[j] {
                    out[i] = fp.add(out[i], fp.mul(c, v));
                }
            }
        }
        out
    }

    pub fn f_act(&self, x: &[u32]) -> Elem {
        self.g.algebra().pow(x, self.g.p() as u64)
    }

    /// `(V^{k*}x, …, V^*x, x)`.
    pub fn chain_at(&self, x: &[u32], k: u32) -> Vec<Elem> {
        let mut out = vec![x.to_vec()];
        for _ in 0..k {
            let next = self.v_act(out.last().unwrap());
            out.push(next);
        }
        out.reverse();
        out
    }

    pub fn chain(&self, x: &[u32]) -> Vec<Elem> {
        self.chain_at(x, self.level)
    }

    fn prepare_with(&self, law: &LawEval, chain: &[Elem]) -> Prepared {
        let alg = self.g.algebra();
        let fp = self.g.fp();
        let d = self.g.dim();
        let mut powers: Vec<Vec<Elem>> = chain.iter().map(|u| vec![alg.one(), u.clone()]).collect();
        let mono: Vec<Elem> = law
            .exps
            .iter()
            .map(|e| {
                let mut acc = alg.one();
                for (i, &k) in e.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    while powers[i].len() <= k as usize {
                        let next = alg.mul(powers[i].last().unwrap(), &chain[i]);
                        powers[i].push(next);
                    }
                    acc = alg.mul(&acc, &powers[i][k as usize]);
                    if algebra::is_zero(&acc) {
                        break;
                    }
                }
                acc
            })
            .collect();
        let partial = law
            .groups
            .iter()
            .map(|(_, bs)| {
                let mut s = vec![0u32; d];
                for &(b, c) in bs {
                    algebra::axpy(&fp, &mut s, c, &mono[b]);
                }
                s
            })
            .collect();
        Prepared { mono, partial }
    }

    fn prepare(&self, x: &[u32]) -> Prepared {
        self.prepare_with(&self.laws[self.level as usize], &self.chain(x))
    }

    fn plus_prepared(&self, px: &Prepared, py: &Prepared) -> Elem {
        let alg = self.g.algebra();
        let fp = self.g.fp();
        let mut out = vec![0u32; self.g.dim()];
        for (gi, (a, _)) in self.laws[self.level as usize].groups.iter().enumerate() {
            let prod = alg.mul(&px.mono[*a], &py.partial[gi]);
            algebra::axpy(&fp, &mut out, 1, &prod);
        }
        out
    }

    /// `Σ_a m[a] ⊗ S[a]`: the law evaluated at `(u⊗1, 1⊗u)`.
    fn tensor_value(&self, law: &LawEval, prep: &Prepared) -> SparseVec {
        let fp = self.g.fp();
        let mut acc: HashMap<usize, u32> = HashMap::new();
        for (gi, (a, _)) in law.groups.iter().enumerate() {
            for (t, v) in self.g.outer(&prep.mono[*a], &prep.partial[gi]) {
                let e = acc.entry(t).or_insert(0);
                *e = fp.add(*e, v);
            }
        }
        crate::scheme::finish(acc)
    }

    /// The defining identity, evaluated exactly in `R ⊗ R`.
    pub fn is_dieudonne(&self, x: &[u32]) -> bool {
        if x.len() != self.g.dim() || x[0] != 0 {
            return false;
        }
        let law = &self.laws[self.level as usize];
        let rhs = self.tensor_value(law, &self.prepare_with(law, &self.chain(x)));
        self.g.delta(x) == rhs
    }

    /// `x ∔ y = φ_n(V^{n*}x, V^{n*}y, …, x, y)`.
    pub fn dot_plus(&self, x: &[u32], y: &[u32]) -> Elem {
        self.plus_prepared(&self.prepare(x), &self.prepare(y))
    }

    /// `−x = S(x)`.
    pub fn dot_neg(&self, x: &[u32]) -> Elem {
        self.g.antipode().apply(&self.g.fp(), x)
    }

    /// `x ∔ ⋯ ∔ x` (`k` times).
    pub fn times(&self, mut k: u64, x: &[u32]) -> Elem {
        let mut acc = vec![0u32; x.len()];
        let mut base = x.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.dot_plus(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.dot_plus(&base, &base);
            }
        }
        acc
    }

    /// `c ẋ× x = c_0^{p^n} x ∔ c_1^{p^{n−1}} p^*x ∔ ⋯ ∔ c_n p^{n*}x`, where
    /// `p^{i*}x = F^{i*}V^{i*}x` and `c_i^{…} x` is the `k`-linear scaling
    /// (over `F_p`, `c^p = c`).
    pub fn witt_scalar(&self, c: &WittVector, x: &[u32]) -> Result<Elem> {
        if c.level() != self.level {
            return Err(Error::InvalidArgument(format!(
                "Witt scalar of level {} acting at level {}",
                c.level(),
                self.level
            )));
        }
        let comps = c
            .prime_components()
            .ok_or_else(|| Error::Unsupported("Witt scalars over extension fields".into()))?;
        let fp = self.g.fp();
        let mut acc = vec![0u32; x.len()];
        let mut px = x.to_vec();
        for (i, &ci) in comps.iter().enumerate() {
            if i > 0 {
                px = self.f_act(&self.v_act(&px));
            }
            if ci != 0 {
                acc = self.dot_plus(&acc, &algebra::scale(&fp, ci, &px));
            }
        }
        Ok(acc)
    }

    /// The right-hand side of the level-`k` identity without its linear
    /// top terms, for the chain of `y = V^*x`.
    fn lower_part(&self, k: u32, y: &[u32]) -> SparseVec {
        let law = &self.lower[k as usize];
        let mut chain = self.chain_at(y, k - 1);
        chain.push(vec![0; y.len()]);
        self.tensor_value(law, &self.prepare_with(law, &chain))
    }

    /// All of `D(G)`, level by level: `D ∩ ker V` is the primitive part of
    /// `ker V`; an element of `D ∩ ker V^{k+1}` is an `x` with `V^*x = y`
    /// for some `y ∈ D ∩ ker V^k` and `Δx − x⊗1 − 1⊗x = ρ_k(chain of y)`,
    /// an affine-linear condition on `x`.
    pub fn enumerate(&self, caps: &Caps) -> Result<DieudonneModule> {
        let g = &self.g;
        let d = g.dim();
        let fp = g.fp();
        let p = g.p() as u64;
        let l = g.length()?;
        let expected = (p as f64).powi(l as i32);
        if expected > caps.enumeration as f64 {
            return Err(Error::cap("|D(G)|", expected as u64, caps.enumeration));
        }
        let dd = d * d;
        let cols: Vec<SparseVec> = (1..d)
            .map(|c| {
                let mut v = g.reduced_delta(&algebra::basis_vec(d, c));
                for &(i, x) in &self.vstar[c] {
                    v.push((dd + i, x));
                }
                v
            })
            .collect();
        let ech = Echelon::from_columns(fp, &cols);
        let lift = |comb: &SparseVec| -> Elem {
            let mut v = vec![0u32; d];
            for &(j, c) in comb {
                v[j + 1] = c;
            }
            v
        };
        let kernel: Vec<Elem> = ech.kernel().iter().map(lift).collect();
        let span = |base: &Elem, out: &mut Vec<Elem>| {
            let total = p.pow(kernel.len() as u32);
            for code in 0..total {
                let mut x = base.clone();
                let mut c = code;
                for k in &kernel {
                    algebra::axpy(&fp, &mut x, (c % p) as u32, k);
                    c /= p;
                }
                out.push(x);
            }
        };
        let mut current = Vec::new();
        span(&vec![0; d], &mut current);
        for k in 1..=self.level {
            let mut next = Vec::new();
            for y in &current {
                let mut rhs = self.lower_part(k, y);
                for (i, &c) in y.iter().enumerate() {
                    if c != 0 {
                        rhs.push((dd + i, c));
                    }
                }
                if let Some(sol) = ech.solve(&rhs) {
                    span(&lift(&sol), &mut next);
                    if next.len() as u64 > caps.enumeration {
                        return Err(Error::cap("|D(G)|", next.len() as u64, caps.enumeration));
                    }
                }
            }
            current = next;
        }
        Ok(DieudonneModule::new(self.clone(), current))
    }
}

/// `D(G)`, stored extensionally in canonical (lexicographic) order.
#[derive(Debug, Clone)]
pub struct DieudonneModule {
    ctx: DieudonneContext,
    elements: Vec<Elem>,
    index: HashMap<Elem, usize>,
}

impl DieudonneModule {
    pub fn new(ctx: DieudonneContext, mut elements: Vec<Elem>) -> Self {
        elements.sort();
        elements.dedup();
        let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        DieudonneModule { ctx, elements, index }
    }

    pub fn context(&self) -> &DieudonneContext {
        &self.ctx
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &[u32]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        self.index.contains_key(x)
    }

    /// The full `∔` table, `table[i·len + j] = index(e_i ∔ e_j)`.
    pub fn addition_table(&self) -> Result<Vec<u32>> {
        let n = self.len();
        let prepared: Vec<Prepared> = self.elements.iter().map(|x| self.ctx.prepare(x)).collect();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let s = self.ctx.plus_prepared(&prepared[i], &prepared[j]);
                let k = self.index_of(&s).ok_or_else(|| {
                    Error::NotDieudonne(format!("∔ leaves D(G) at pair ({i}, {j})"))
                })?;
                table[i * n + j] = k as u32;
            }
        }
        Ok(table)
    }

    pub fn map_indices(&self, f: impl Fn(&[u32]) -> Elem, what: &str) -> Result<Vec<u32>> {
        self.elements
            .iter()
            .map(|x| {
                self.index_of(&f(x))
                    .map(|k| k as u32)
                    .ok_or_else(|| Error::NotDieudonne(format!("{what} leaves D(G)")))
            })
            .collect()
    }

    pub fn f_table(&self) -> Result<Vec<u32>> {
        self.map_indices(|x| self.ctx.f_act(x), "F")
    }

    pub fn v_table(&self) -> Result<Vec<u32>> {
        self.map_indices(|x| self.ctx.v_act(x), "V")
    }

    pub fn neg_table(&self) -> Result<Vec<u32>> {
        self.map_indices(|x| self.ctx.dot_neg(x), "negation")
    }

    /// Every element passes the defining identity.
    pub fn check_soundness(&self) -> Report {
        let g = self.ctx.scheme();
        let params = json!({ "scheme": g.name(), "p": g.p() });
        let bad = self.elements.iter().find(|x| !self.ctx.is_dieudonne(x));
        Report::from_result(
            "dieudonne-soundness",
            params,
            bad.map(|x| format!("{} fails", g.algebra().format_elem(x))),
        )
    }

    /// `|D(G)| = p^{l(G)}`.
    pub fn check_size(&self) -> Report {
        let g = self.ctx.scheme();
        let params = json!({ "scheme": g.name(), "p": g.p() });
        let l = g.length().unwrap_or(0);
        let expect = (g.p() as u64).pow(l);
        Report::from_result(
            "dieudonne-size",
            params,
            (self.len() as u64 != expect).then(|| format!("|D(G)| = {} ≠ p^{l} = {expect}", self.len())),
        )
    }
}

/// `is_dieudonne` at an explicit level.
pub fn is_dieudonne(g: &FiniteGroupScheme, x: &[u32], n: u32, caps: &Caps) -> Result<bool> {
    Ok(DieudonneContext::with_level(g, n, caps)?.is_dieudonne(x))
}

/// `f^*: D(G′) → D(G)` for `f: G → G′`, as indices.
pub fn induced_map(src: &DieudonneModule, tgt: &DieudonneModule, f: &SchemeHom) -> Result<Vec<u32>> {
    let fp = src.context().scheme().fp();
    tgt.elements()
        .iter()
        .map(|x| {
            let y = f.pullback.apply(&fp, x);
            src.index_of(&y)
                .map(|k| k as u32)
                .ok_or_else(|| Error::NotDieudonne("f^* leaves D(G)".into()))
        })
        .collect()
}

/// Checks that `f^*` is additive and commutes with `F` and `V`.
pub fn check_induced_linear(src: &DieudonneModule, tgt: &DieudonneModule, f: &SchemeHom) -> Report {
    let params = json!({ "source": src.context().scheme().name(), "target": tgt.context().scheme().name() });
    let run = || -> Result<Option<String>> {
        let m = induced_map(src, tgt, f)?;
        let (ts, tt) = (src.addition_table()?, tgt.addition_table()?);
        let (fs, ft) = (src.f_table()?, tgt.f_table()?);
        let (vs, vt) = (src.v_table()?, tgt.v_table()?);
        let (ns, nt) = (src.len(), tgt.len());
        for i in 0..nt {
            for j in 0..nt {
                let lhs = m[tt[i * nt + j] as usize];
                let rhs = ts[m[i] as usize * ns + m[j] as usize];
                if lhs != rhs {
                    return Ok(Some(format!("f^* not additive at ({i}, {j})")));
                }
            }
            if m[ft[i] as usize] != fs[m[i] as usize] || m[vt[i] as usize] != vs[m[i] as usize] {
                return Ok(Some(format!("f^* does not commute with F, V at {i}")));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(r) => Report::from_result("induced-map", params, r),
        Err(e) => Report::fail("induced-map", params, e.to_string()),
    }
}

/// For an epimorphism `f: G → G′` with kernel `H`: `f^*` is injective on
/// `D(G′)`, its image is the kernel of restriction `D(G) → D(H)`, and the
/// restriction is surjective.
pub fn check_exactness(g: &FiniteGroupScheme, target: &FiniteGroupScheme, f: &SchemeHom, caps: &Caps) -> Report {
    let params = json!({ "source": g.name(), "target": target.name() });
    let run = || -> Result<Option<String>> {
        let fp = g.fp();
        if f.pullback.to_matrix().rank(&fp) != target.dim() {
            return Ok(Some("f is not an epimorphism (f^* not injective)".into()));
        }
        if !g.check_hom(target, f).pass {
            return Ok(Some("f is not a homomorphism".into()));
        }
        let (h, inc) = g.kernel(target, f)?;
        let dg = DieudonneContext::new(g, caps)?.enumerate(caps)?;
        let dt = DieudonneContext::new(target, caps)?.enumerate(caps)?;
        let dh = DieudonneContext::new(&h, caps)?.enumerate(caps)?;
        let image: Vec<Elem> = dt.elements().iter().map(|x| f.pullback.apply(&fp, x)).collect();
        let mut distinct = image.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() != image.len() {
            return Ok(Some("f^* is not injective on D(G′)".into()));
        }
        if let Some(x) = image.iter().find(|x| !dg.contains(x)) {
            return Ok(Some(format!("f^* sends into {} ∉ D(G)", g.algebra().format_elem(x))));
        }
        let mut kernel: Vec<Elem> = Vec::new();
        let mut restricted = std::collections::BTreeSet::new();
        for x in dg.elements() {
            let r = inc.pullback.apply(&fp, x);
            if algebra::is_zero(&r) {
                kernel.push(x.clone());
            }
            if !dh.contains(&r) {
                return Ok(Some("restriction leaves D(H)".into()));
            }
            restricted.insert(r);
        }
        kernel.sort();
        if kernel != distinct {
            return Ok(Some(format!(
                "im f^* has {} elements, ker(D(G) → D(H)) has {}",
                distinct.len(),
                kernel.len()
            )));
        }
        if restricted.len() != dh.len() {
            return Ok(Some(format!(
                "restriction D(G) → D(H) hits {} of {} elements",
                restricted.len(),
                dh.len()
            )));
        }
        Ok(None)
    };
    match run() {
        Ok(r) => Report::from_result("exactness", params, r),
        Err(e) => Report::fail("exactness", params, e.to_string()),
    }
}

/// Largest `|W_n(F_p)| = p^{n+1}` whose scalars are all tried.
pub const SCALAR_LIMIT: u64 = 27;

impl DieudonneModule {
    /// Group laws, `F`/`V` additivity and `FV = VF = p` on the full tables;
    /// then, when `p^{n+1} ≤ 27`, every Witt scalar: the action agrees with
    /// `∔`-multiplication by the integer `c mod p^{n+1}`, is associative and
    /// distributive, fixes `x` for `c = 1`, and commutes with `F` and `V`.
    pub fn check_module_axioms(&self) -> Report {
        let g = self.ctx.scheme();
        let params = json!({ "scheme": g.name(), "p": g.p(), "size": self.len() });
        match self.module_axiom_failure() {
            Ok(None) => Report::pass("dieudonne-module-axioms", params),
            Ok(Some(why)) => Report::fail("dieudonne-module-axioms", params, why),
            Err(e) => Report::fail("dieudonne-module-axioms", params, e.to_string()),
        }
    }

    fn module_axiom_failure(&self) -> Result<Option<String>> {
        let m = crate::amodule::FiniteAModule::from_dieudonne(self)?;
        let base = m.check_axioms();
        if !base.pass {
            return Ok(base.counterexample);
        }
        let g = self.ctx.scheme();
        let p = g.p();
        let n = self.ctx.level;
        if (p as u64).pow(n + 1) > SCALAR_LIMIT {
            return Ok(None);
        }
        let fp = g.fp();
        let scale: Vec<Vec<u32>> = (0..p)
            .map(|c| self.map_indices(|x| algebra::scale(&fp, c, x), "scaling"))
            .collect::<Result<_>>()?;
        let size = self.len() as u32;
        // on indices: ∔_i c_i · (FV)^i x
        let act = |c: &[u32], x: u32| -> u32 {
            let mut acc = m.zero();
            let mut px = x;
            for (i, &ci) in c.iter().enumerate() {
                if i > 0 {
                    px = m.frobenius(m.verschiebung(px));
                }
                acc = m.plus(acc, scale[ci as usize][px as usize]);
            }
            acc
        };
        let desc = crate::numeric::FieldDescriptor::prime(p)?;
        let scalars = WittVector::all(&desc, n);
        let comps: Vec<Vec<u32>> = scalars.iter().map(|c| c.prime_components().unwrap()).collect();
        let label = |x: u32| m.label(x).to_string();
        for (c, cc) in scalars.iter().zip(&comps) {
            let residue = c.to_residue()?;
            for x in 0..size {
                let cx = act(cc, x);
                if cx != m.times(residue, x) {
                    return Ok(Some(format!("{c} ẋ× {} ≠ {residue}·{}", label(x), label(x))));
                }
                if act(cc, m.frobenius(x)) != m.frobenius(cx) || act(cc, m.verschiebung(x)) != m.verschiebung(cx) {
                    return Ok(Some(format!("F or V not semilinear for {c} at {}", label(x))));
                }
            }
            for (c2, cc2) in scalars.iter().zip(&comps) {
                let prod = c.mul(c2)?.prime_components().unwrap();
                let sum = c.add(c2)?.prime_components().unwrap();
                for x in 0..size {
                    if act(&prod, x) != act(cc, act(cc2, x)) {
                        return Ok(Some(format!("({c}·{c2}) ẋ× {} ≠ {c} ẋ× ({c2} ẋ× {})", label(x), label(x))));
                    }
                    if act(&sum, x) != m.plus(act(cc, x), act(cc2, x)) {
                        return Ok(Some(format!("({c}+{c2}) ẋ× {} is not distributive", label(x))));
                    }
                }
            }
        }
        // the vector-level action agrees with the tables
        for (c, cc) in scalars.iter().zip(&comps) {
            for x in 0..size.min(8) {
                let direct = self.ctx.witt_scalar(c, &self.elements[x as usize])?;
                if self.index_of(&direct) != Some(act(cc, x) as usize) {
                    return Ok(Some(format!("witt_scalar({c}) disagrees with the tables at {}", label(x))));
                }
            }
        }
        Ok(None)
    }
}
