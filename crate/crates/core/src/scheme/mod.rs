//! Finite commutative infinitesimal group schemes over `F_p`, as explicit
//! Hopf algebras.
//!
//! Conventions shared by every scheme:
//! - basis element `0` is the unit and every other basis element lies in
//!   the augmentation ideal, so the counit is `ε(e_c) = δ_{c,0}`;
//! - `R ⊗ R` has basis `e_a ⊗ e_b` at index `a · dim + b`;
//! - a homomorphism `f: G → G′` is stored as its pullback
//!   `f^*: R′ → R`.

mod build;
mod iso;
mod quotient;

pub use build::*;
pub use iso::*;

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::algebra::{self, Algebra, Elem, LinearMap};
use crate::error::{Error, Result};
use crate::linalg::{sparse_from_dense, Echelon, Lead, SparseVec};
use crate::numeric::PrimeField;
use crate::report::Report;

#[derive(Debug, Clone)]
pub struct FiniteGroupScheme {
    name: String,
    alg: Algebra,
    delta: Vec<SparseVec>,
    antipode: LinearMap,
}

/// A homomorphism `G → G′`, stored contravariantly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeHom {
    pub pullback: LinearMap,
}

impl SchemeHom {
    pub fn identity(g: &FiniteGroupScheme) -> Self {
        SchemeHom {
            pullback: LinearMap::identity(g.dim()),
        }
    }

    /// `self ∘ other`, i.e. pullback `other^* ∘ self^*`.
    pub fn after(&self, fp: &PrimeField, other: &SchemeHom) -> SchemeHom {
        SchemeHom {
            pullback: other.pullback.compose(fp, &self.pullback),
        }
    }
}

impl FiniteGroupScheme {
    /// Assembles a scheme from raw structure maps without checking them;
    /// see [`FiniteGroupScheme::verify_hopf`].
    pub fn from_parts(name: impl Into<String>, alg: Algebra, delta: Vec<SparseVec>, antipode: LinearMap) -> Self {
        FiniteGroupScheme {
            name: name.into(),
            alg,
            delta,
            antipode,
        }
    }

    /// Assembles a scheme and derives its antipode from `Δ`.
    pub fn with_derived_antipode(name: impl Into<String>, alg: Algebra, delta: Vec<SparseVec>) -> Result<Self> {
        let antipode = derive_antipode(&alg, &delta)?;
        Ok(FiniteGroupScheme::from_parts(name, alg, delta, antipode))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn p(&self) -> u32 {
        self.alg.p()
    }

    pub fn fp(&self) -> PrimeField {
        self.alg.fp()
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// `Δ(e_c)` in tensor coordinates.
    pub fn delta_basis(&self, c: usize) -> &SparseVec {
        &self.delta[c]
    }

    pub fn antipode(&self) -> &LinearMap {
        &self.antipode
    }

    pub fn delta(&self, x: &[u32]) -> SparseVec {
        let fp = self.fp();
        let mut acc: HashMap<usize, u32> = HashMap::new();
        for (c, &xc) in x.iter().enumerate() {
            if xc == 0 {
                continue;
            }
            for &(t, v) in &self.delta[c] {
                let e = acc.entry(t).or_insert(0);
                *e = fp.add(*e, fp.mul(xc, v));
            }
        }
        finish(acc)
    }

    pub fn counit(&self, x: &[u32]) -> u32 {
        x[0]
    }

    /// `x ⊗ 1`.
    pub fn left(&self, x: &[u32]) -> SparseVec {
        let d = self.dim();
        sparse_from_dense(x).into_iter().map(|(i, c)| (i * d, c)).collect()
    }

    /// `1 ⊗ x`.
    pub fn right(&self, x: &[u32]) -> SparseVec {
        sparse_from_dense(x)
    }

    /// `x ⊗ y`.
    pub fn outer(&self, x: &[u32], y: &[u32]) -> SparseVec {
        let d = self.dim();
        let ys = sparse_from_dense(y);
        let mut out = Vec::new();
        for (a, &ca) in x.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for &(b, cb) in &ys {
                out.push((a * d + b, self.fp().mul(ca, cb)));
            }
        }
        out
    }

    /// Product in `R ⊗ R`.
    pub fn tensor_mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        tensor_mul(&self.alg, x, y)
    }

    /// `Δ(x) − x⊗1 − 1⊗x`.
    pub fn reduced_delta(&self, x: &[u32]) -> SparseVec {
        let fp = self.fp();
        let mut acc: HashMap<usize, u32> = self.delta(x).into_iter().collect();
        for (t, v) in self.left(x).into_iter().chain(self.right(x)) {
            let e = acc.entry(t).or_insert(0);
            *e = fp.sub(*e, v);
        }
        finish(acc)
    }

    /// Basis indices lifting a basis of `M/M²`; they generate the algebra.
    pub fn generators(&self) -> Vec<usize> {
        generators(&self.alg)
    }

    pub fn to_json(&self) -> Value {
        let d = self.dim();
        let delta: Vec<Value> = self
            .delta
            .iter()
            .map(|t| Value::Array(t.iter().map(|&(i, c)| json!([i / d, i % d, c])).collect()))
            .collect();
        let antipode: Vec<Value> = self
            .antipode
            .columns
            .iter()
            .map(|col| Value::Array(col.iter().map(|&(i, c)| json!([i, c])).collect()))
            .collect();
        let counit: Vec<u32> = (0..d).map(|c| u32::from(c == 0)).collect();
        let mut algebra = match &self.alg {
            Algebra::Truncated(t) => t.to_json(),
            Algebra::Table(_) => json!({ "p": self.p(), "ext_deg": 1 }),
        };
        let basis: Vec<String> = (0..d).map(|i| self.alg.label(i)).collect();
        algebra["basis"] = json!(basis);
        if let Algebra::Table(t) = &self.alg {
            let products: Vec<Value> = (0..d)
                .flat_map(|a| (a..d).map(move |b| (a, b)))
                .filter(|&(a, b)| !t.product(a, b).is_empty())
                .map(|(a, b)| json!([a, b, t.product(a, b)]))
                .collect();
            algebra["products"] = Value::Array(products);
        }
        json!({
            "name": self.name,
            "algebra": algebra,
            "delta": delta,
            "counit": counit,
            "antipode": antipode,
        })
    }

    pub fn format_text(&self) -> String {
        let mut s = format!("{}: dim {} over F_{}\n", self.name, self.dim(), self.p());
        for g in self.generators() {
            s.push_str(&format!(
                "Δ({}) = {}\n",
                self.alg.label(g),
                self.format_tensor(&self.delta[g])
            ));
        }
        s
    }

    pub fn format_tensor(&self, t: &SparseVec) -> String {
        let d = self.dim();
        let parts: Vec<String> = t
            .iter()
            .map(|&(i, c)| {
                let body = format!("{}⊗{}", self.alg.label(i / d), self.alg.label(i % d));
                if c == 1 {
                    body
                } else {
                    format!("{c}·{body}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

pub(crate) fn finish(acc: HashMap<usize, u32>) -> SparseVec {
    let mut v: SparseVec = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    v.sort_unstable_by_key(|&(i, _)| i);
    v
}

pub(crate) fn tensor_mul(alg: &Algebra, x: &SparseVec, y: &SparseVec) -> SparseVec {
    let d = alg.dim();
    let fp = alg.fp();
    let mut acc: HashMap<usize, u32> = HashMap::new();
    let mut tmp_a = vec![0u32; d];
    let mut tmp_b = vec![0u32; d];
    for &(s, cs) in x {
        let (a, b) = (s / d, s % d);
        for &(t, ct) in y {
            let (c, e) = (t / d, t % d);
            let coef = fp.mul(cs, ct);
            match alg {
                Algebra::Truncated(tr) => {
                    if let (Some(l), Some(r)) = (tr.mul_index(a, c), tr.mul_index(b, e)) {
                        let slot = acc.entry(l * d + r).or_insert(0);
                        *slot = fp.add(*slot, coef);
                    }
                }
                Algebra::Table(_) => {
                    tmp_a.iter_mut().for_each(|v| *v = 0);
                    tmp_b.iter_mut().for_each(|v| *v = 0);
                    alg.mul_basis_into(a, c, 1, &mut tmp_a);
                    alg.mul_basis_into(b, e, 1, &mut tmp_b);
                    for (l, &vl) in tmp_a.iter().enumerate() {
                        if vl == 0 {
                            continue;
                        }
                        for (r, &vr) in tmp_b.iter().enumerate() {
                            if vr != 0 {
                                let slot = acc.entry(l * d + r).or_insert(0);
                                *slot = fp.add(*slot, fp.mul(coef, fp.mul(vl, vr)));
                            }
                        }
                    }
                }
            }
        }
    }
    finish(acc)
}

pub(crate) fn generators(alg: &Algebra) -> Vec<usize> {
    let d = alg.dim();
    if let Algebra::Truncated(t) = alg {
        return (0..t.nvars())
            .filter(|&i| t.bounds()[i] > 1)
            .filter_map(|i| t.power_index(i, 1))
            .collect();
    }
    let fp = alg.fp();
    let mut m2 = Echelon::new(fp, Lead::Min, false);
    for a in 1..d {
        for b in a..d {
            let prod = alg.basis_product(a, b);
            if !algebra::is_zero(&prod) {
                m2.insert(&sparse_from_dense(&prod));
            }
        }
    }
    let mut gens = Vec::new();
    for c in 1..d {
        if m2.insert(&vec![(c, 1)]) {
            gens.push(c);
        }
    }
    gens
}

/// The antipode as the fixed point of `S(e_c) = ε(e_c) − Σ_{a≠0} Δ(e_c)_{ab} e_a S(e_b)`,
/// reached after at most the nilpotency index of `M` sweeps.
fn derive_antipode(alg: &Algebra, delta: &[SparseVec]) -> Result<LinearMap> {
    let d = alg.dim();
    let fp = alg.fp();
    let mut s: Vec<Elem> = (0..d).map(|c| if c == 0 { algebra::basis_vec(d, 0) } else { vec![0; d] }).collect();
    for _sweep in 0..=d + 1 {
        let mut changed = false;
        for c in 1..d {
            let mut next = vec![0u32; d];
            for &(t, v) in &delta[c] {
                let (a, b) = (t / d, t % d);
                if a == 0 {
                    continue;
                }
                let k = fp.neg(v);
                for (j, &sj) in s[b].iter().enumerate() {
                    if sj != 0 {
                        alg.mul_basis_into(a, j, fp.mul(k, sj), &mut next);
                    }
                }
            }
            if next != s[c] {
                s[c] = next;
                changed = true;
            }
        }
        if !changed {
            return Ok(LinearMap {
                cod_dim: d,
                columns: s.iter().map(|v| sparse_from_dense(v)).collect(),
            });
        }
    }
    Err(Error::IllDefined("antipode recursion does not converge; is the algebra local?".into()))
}

impl FiniteGroupScheme {
    /// Checks counit, co-associativity, co-commutativity and antipode laws,
    /// and that `Δ` and `S` are algebra homomorphisms.
    pub fn verify_hopf(&self) -> Report {
        let params = json!({ "scheme": self.name, "p": self.p(), "dim": self.dim() });
        match self.hopf_failure() {
            None => Report::pass("hopf", params),
            Some(msg) => Report::fail("hopf", params, msg),
        }
    }

    fn hopf_failure(&self) -> Option<String> {
        let d = self.dim();
        let fp = self.fp();
        if self.delta.len() != d || self.antipode.columns.len() != d {
            return Some("structure maps have the wrong size".into());
        }
        let label = |c: usize| self.alg.label(c);
        if self.delta[0] != vec![(0, 1)] {
            return Some("Δ(1) ≠ 1⊗1".into());
        }
        for c in 0..d {
            let t = &self.delta[c];
            let mut l = vec![0u32; d];
            let mut r = vec![0u32; d];
            for &(i, v) in t {
                if i / d == 0 {
                    r[i % d] = fp.add(r[i % d], v);
                }
                if i % d == 0 {
                    l[i / d] = fp.add(l[i / d], v);
                }
            }
            let e = algebra::basis_vec(d, c);
            if l != e || r != e {
                return Some(format!("counit law fails on {}", label(c)));
            }
        }
        for c in 0..d {
            let t: HashMap<usize, u32> = self.delta[c].iter().copied().collect();
            for (&i, &v) in &t {
                let swapped = (i % d) * d + i / d;
                if t.get(&swapped).copied().unwrap_or(0) != v {
                    return Some(format!("Δ({}) is not co-commutative", label(c)));
                }
            }
        }
        for c in 0..d {
            let mut lhs: HashMap<usize, u32> = HashMap::new();
            let mut rhs: HashMap<usize, u32> = HashMap::new();
            for &(i, v) in &self.delta[c] {
                let (a, b) = (i / d, i % d);
                for &(j, w) in &self.delta[a] {
                    let k = j * d + b;
                    let e = lhs.entry(k).or_insert(0);
                    *e = fp.add(*e, fp.mul(v, w));
                }
                for &(j, w) in &self.delta[b] {
                    let k = a * d * d + j;
                    let e = rhs.entry(k).or_insert(0);
                    *e = fp.add(*e, fp.mul(v, w));
                }
            }
            if finish(lhs) != finish(rhs) {
                return Some(format!("co-associativity fails on {}", label(c)));
            }
        }
        let s_dense: Vec<Elem> = self
            .antipode
            .columns
            .iter()
            .map(|col| crate::linalg::sparse_to_dense(col, d))
            .collect();
        for c in 0..d {
            let mut l = vec![0u32; d];
            let mut r = vec![0u32; d];
            for &(i, v) in &self.delta[c] {
                let (a, b) = (i / d, i % d);
                for (j, &sj) in s_dense[a].iter().enumerate() {
                    if sj != 0 {
                        self.alg.mul_basis_into(j, b, fp.mul(v, sj), &mut l);
                    }
                }
                for (j, &sj) in s_dense[b].iter().enumerate() {
                    if sj != 0 {
                        self.alg.mul_basis_into(a, j, fp.mul(v, sj), &mut r);
                    }
                }
            }
            let expect = if c == 0 { algebra::basis_vec(d, 0) } else { vec![0; d] };
            if l != expect || r != expect {
                return Some(format!("antipode law fails on {}", label(c)));
            }
        }
        for g in self.generators() {
            for b in 0..d {
                let prod = self.alg.basis_product(g, b);
                let lhs = self.delta(&prod);
                let rhs = self.tensor_mul(&self.delta[g], &self.delta[b]);
                if lhs != rhs {
                    return Some(format!("Δ is not multiplicative on {}·{}", label(g), label(b)));
                }
                let s_lhs = self.antipode.apply(&fp, &prod);
                let s_rhs = self.alg.mul(&s_dense[g], &s_dense[b]);
                if s_lhs != s_rhs {
                    return Some(format!("S is not multiplicative on {}·{}", label(g), label(b)));
                }
            }
        }
        None
    }

    /// Relative Frobenius: `F^*(x) = x^p`.
    pub fn frobenius(&self) -> SchemeHom {
        let d = self.dim();
        let p = self.p() as u64;
        let columns = (0..d)
            .map(|c| sparse_from_dense(&self.alg.pow(&algebra::basis_vec(d, c), p)))
            .collect();
        SchemeHom {
            pullback: LinearMap { cod_dim: d, columns },
        }
    }

    /// `D_k(c)[a]`: the coefficient of `e_a^{⊗k}` in `Δ^{(k)}(e_c)`.
    fn diagonal_coefficients(&self, k: u32) -> Vec<SparseVec> {
        let d = self.dim();
        let fp = self.fp();
        let mut cur: Vec<SparseVec> = (0..d).map(|c| vec![(c, 1)]).collect();
        for _ in 1..k {
            let next = (0..d)
                .map(|c| {
                    let mut acc: HashMap<usize, u32> = HashMap::new();
                    for &(t, v) in &self.delta[c] {
                        let (b, a) = (t / d, t % d);
                        if let Ok(pos) = cur[b].binary_search_by_key(&a, |&(i, _)| i) {
                            let e = acc.entry(a).or_insert(0);
                            *e = fp.add(*e, fp.mul(v, cur[b][pos].1));
                        }
                    }
                    finish(acc)
                })
                .collect();
            cur = next;
        }
        cur
    }

    /// Verschiebung, as the Cartier dual of the Frobenius of `G^D`:
    /// `V^*(e_c) = Σ_a ⟨(e_a^*)^p, e_c⟩ e_a`.
    pub fn verschiebung(&self) -> SchemeHom {
        SchemeHom {
            pullback: LinearMap {
                cod_dim: self.dim(),
                columns: self.diagonal_coefficients(self.p()),
            },
        }
    }

    /// Multiplication by `[k]`: pullback `μ_k ∘ Δ^{(k)}`.
    pub fn multiplication_by(&self, k: u32) -> SchemeHom {
        let d = self.dim();
        let fp = self.fp();
        if k == 0 {
            return SchemeHom {
                pullback: LinearMap {
                    cod_dim: d,
                    columns: (0..d).map(|c| if c == 0 { vec![(0, 1)] } else { vec![] }).collect(),
                },
            };
        }
        let mut cur: Vec<Elem> = (0..d).map(|c| algebra::basis_vec(d, c)).collect();
        for _ in 1..k {
            let next = (0..d)
                .map(|c| {
                    let mut out = vec![0u32; d];
                    for &(t, v) in &self.delta[c] {
                        let (b, a) = (t / d, t % d);
                        for (j, &cj) in cur[b].iter().enumerate() {
                            if cj != 0 {
                                self.alg.mul_basis_into(j, a, fp.mul(v, cj), &mut out);
                            }
                        }
                    }
                    out
                })
                .collect();
            cur = next;
        }
        SchemeHom {
            pullback: LinearMap {
                cod_dim: d,
                columns: cur.iter().map(|v| sparse_from_dense(v)).collect(),
            },
        }
    }

    /// Checks that `f: self → target` commutes with the structure maps.
    pub fn check_hom(&self, target: &FiniteGroupScheme, f: &SchemeHom) -> Report {
        let params = json!({ "source": self.name, "target": target.name });
        match self.hom_failure(target, f) {
            None => Report::pass("hom", params),
            Some(m) => Report::fail("hom", params, m),
        }
    }

    fn hom_failure(&self, target: &FiniteGroupScheme, f: &SchemeHom) -> Option<String> {
        let fp = self.fp();
        let (ds, dt) = (self.dim(), target.dim());
        let fm = &f.pullback;
        if fm.dom_dim() != dt || fm.cod_dim != ds {
            return Some("pullback has the wrong shape".into());
        }
        let image = |c: usize| crate::linalg::sparse_to_dense(&fm.columns[c], ds);
        if image(0) != algebra::basis_vec(ds, 0) {
            return Some("f^*(1) ≠ 1".into());
        }
        for c in 0..dt {
            let fc = image(c);
            if fc[0] != u32::from(c == 0) {
                return Some(format!("f^* does not preserve the counit on {}", target.alg.label(c)));
            }
            let lhs = self.delta(&fc);
            let mut acc: HashMap<usize, u32> = HashMap::new();
            for &(t, v) in &target.delta[c] {
                let (a, b) = (t / dt, t % dt);
                for &(i, x) in &fm.columns[a] {
                    for &(j, y) in &fm.columns[b] {
                        let e = acc.entry(i * ds + j).or_insert(0);
                        *e = fp.add(*e, fp.mul(v, fp.mul(x, y)));
                    }
                }
            }
            if lhs != finish(acc) {
                return Some(format!("f^* does not commute with Δ on {}", target.alg.label(c)));
            }
        }
        for g in target.generators() {
            for b in 0..dt {
                let lhs = fm.apply(&fp, &target.alg.basis_product(g, b));
                let rhs = self.alg.mul(&image(g), &image(b));
                if lhs != rhs {
                    return Some(format!(
                        "f^* is not multiplicative on {}·{}",
                        target.alg.label(g),
                        target.alg.label(b)
                    ));
                }
            }
        }
        None
    }

    /// Basis of `α(G)`: the primitive elements of the augmentation ideal.
    pub fn alpha_module(&self) -> Vec<Elem> {
        let d = self.dim();
        let cols: Vec<SparseVec> = (1..d).map(|c| self.reduced_delta(&algebra::basis_vec(d, c))).collect();
        let ech = Echelon::from_columns(self.fp(), &cols);
        ech.kernel()
            .iter()
            .map(|k| {
                let mut v = vec![0u32; d];
                for &(j, c) in k {
                    v[j + 1] = c;
                }
                v
            })
            .collect()
    }

    /// `l(G) = log_p dim R`.
    pub fn length(&self) -> Result<u32> {
        let p = self.p() as usize;
        let mut d = self.dim();
        let mut l = 0;
        while d > 1 && d % p == 0 {
            d /= p;
            l += 1;
        }
        if d != 1 {
            return Err(Error::InvalidArgument(format!("dimension {} is not a power of {p}", self.dim())));
        }
        Ok(l)
    }

    /// `dim M/M²`, which equals `dim Lie(G)`.
    pub fn cotangent_dim(&self) -> usize {
        self.generators().len()
    }

    pub fn lie_dim(&self) -> usize {
        self.cotangent_dim()
    }

    /// `H = ker F ∩ ker V`, the largest α-subgroup.
    pub fn alpha_subgroup(&self) -> Result<FiniteGroupScheme> {
        let fp = self.fp();
        let d = self.dim();
        let mut gens: Vec<Elem> = Vec::new();
        for hom in [self.frobenius(), self.verschiebung()] {
            for c in 1..d {
                let v = crate::linalg::sparse_to_dense(&hom.pullback.columns[c], d);
                if !algebra::is_zero(&v) {
                    gens.push(v);
                }
            }
        }
        let _ = fp;
        Ok(self.quotient(&gens)?.0.renamed(format!("ker F ∩ ker V of {}", self.name)))
    }

    /// `a(G) = dim α(ker F ∩ ker V)`.
    pub fn a_number(&self) -> Result<usize> {
        Ok(self.alpha_subgroup()?.alpha_module().len())
    }
}
