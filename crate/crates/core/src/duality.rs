//! Duality for `W_{n,m}`: the standard functional `y` on `A_{n,m}`, the
//! isomorphism `W_{n,m}^D → W_{m,n}` it induces, the pairing
//! `D(G) × D(G^D) → W_r(F_p)`, and the left-invariant operator `D_ȳ` of a
//! functional `ȳ`.

use std::collections::HashMap;

use serde_json::json;

use crate::algebra::{self, hom_from_images, Elem, LinearMap};
use crate::amodule::{AElem, TruncatedA};
use crate::dieudonne::{realize, verschiebung_nilpotency, DieudonneContext};
use crate::error::{Error, Result};
use crate::linalg::{sparse_from_dense, Echelon, Lead};
use crate::numeric::PrimeField;
use crate::report::{combine, Report};
use crate::scheme::{self, FiniteGroupScheme, SchemeHom};
use crate::witt::WittVector;
use crate::Caps;

/// An element of `R^D = Hom(R, k)`, by its values on the basis of `R`.
/// These are also the coordinates of the element in the dual basis of
/// [`scheme::cartier_dual`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFunctional {
    pub owner: String,
    pub values: Vec<u32>,
}

impl LinearFunctional {
    pub fn eval(&self, fp: &PrimeField, x: &[u32]) -> u32 {
        x.iter()
            .zip(&self.values)
            .fold(0, |acc, (&a, &b)| fp.add(acc, fp.mul(a, b)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "owner": self.owner, "values": self.values })
    }
}

/// `⟨x, y⟩ ∈ W_r(F_p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingValue {
    pub value: WittVector,
    /// the same value in `Z/p^{r+1}`
    pub residue: u64,
}

fn transpose(m: &LinearMap) -> LinearMap {
    let mut columns = vec![Vec::new(); m.cod_dim];
    for (j, col) in m.columns.iter().enumerate() {
        for &(i, v) in col {
            columns[i].push((j, v));
        }
    }
    LinearMap {
        cod_dim: m.dom_dim(),
        columns,
    }
}

fn invert(fp: &PrimeField, m: &LinearMap) -> Option<LinearMap> {
    let inv = m.to_matrix().inverse(fp)?;
    let columns = (0..inv.cols)
        .map(|j| (0..inv.rows).filter_map(|i| Some((i, inv.get(i, j))).filter(|e| e.1 != 0)).collect())
        .collect();
    Some(LinearMap {
        cod_dim: inv.rows,
        columns,
    })
}

fn truncated(g: &FiniteGroupScheme) -> Result<&algebra::TruncatedAlgebra> {
    g.algebra()
        .as_truncated()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no monomial coordinates", g.name())))
}

/// `V^{k*}` applied `k` times.
fn v_power(v: &LinearMap, fp: &PrimeField, x: &[u32], k: u32) -> Elem {
    (0..k).fold(x.to_vec(), |acc, _| v.apply(fp, &acc))
}

/// The functional `y` on `A_{n,m}`: 1 on `x_0^{p^m}`, 0 on every other
/// basis monomial.
pub fn standard_functional(n: u32, m: u32, p: u32, caps: &Caps) -> Result<LinearFunctional> {
    let w = scheme::witt(p, n, m, caps)?;
    standard_on(&w, m)
}

fn standard_on(w: &FiniteGroupScheme, m: u32) -> Result<LinearFunctional> {
    let t = truncated(w)?;
    let idx = t
        .power_index(0, w.p().pow(m))
        .ok_or_else(|| Error::InvalidArgument("x_0^{p^m} is zero".into()))?;
    Ok(LinearFunctional {
        owner: w.name().to_string(),
        values: algebra::basis_vec(w.dim(), idx),
    })
}

/// `W_{n,m}`, its dual, and the standard functional `y ∈ R(W_{n,m}^D)`.
#[derive(Debug, Clone)]
pub struct StandardDuality {
    pub n: u32,
    pub m: u32,
    pub witt: FiniteGroupScheme,
    pub dual: FiniteGroupScheme,
    pub y: LinearFunctional,
    dual_v: LinearMap,
}

impl StandardDuality {
    pub fn new(n: u32, m: u32, p: u32, caps: &Caps) -> Result<Self> {
        let witt = scheme::witt(p, n, m, caps)?;
        let dual = scheme::cartier_dual(&witt, caps)?;
        let y = standard_on(&witt, m)?;
        let dual_v = dual.verschiebung().pullback;
        Ok(StandardDuality { n, m, witt, dual, y, dual_v })
    }

    pub fn p(&self) -> u32 {
        self.witt.p()
    }

    /// `V^{j*}` of the dual applied to `z`.
    pub fn v_dual(&self, z: &[u32], j: u32) -> Elem {
        v_power(&self.dual_v, &self.witt.fp(), z, j)
    }

    /// `V^{j*}(y^{p^i})`.
    pub fn z(&self, i: u32, j: u32) -> Elem {
        let yp = self.dual.algebra().pow(&self.y.values, (self.p() as u64).pow(i));
        self.v_dual(&yp, j)
    }

    fn params(&self) -> serde_json::Value {
        json!({ "n": self.n, "m": self.m, "p": self.p() })
    }

    /// `y ∈ D(W_{n,m}^D)` at level `m`, the functionals `y, V^*y, …, V^{m*}y`
    /// generate `R(W_{n,m}^D)`, and `V^{j*}y^{p^i}` takes the value
    /// `δ_{ir}δ_{js}` on `x_r^{p^{m−s}}`.
    pub fn verify(&self, caps: &Caps) -> Result<Report> {
        let params = self.params();
        let ctx = DieudonneContext::with_level(&self.dual, self.m, caps)?;
        let member = Report::from_result(
            "standard-functional-dieudonne",
            params.clone(),
            (!ctx.is_dieudonne(&self.y.values)).then(|| "y is not a Dieudonné element".to_string()),
        );

        let gens: Vec<Elem> = (0..=self.m).map(|j| self.v_dual(&self.y.values, j)).collect();
        let generated = generated_dimension(&self.dual, &gens);
        let generation = Report::from_result(
            "standard-functional-generates",
            params.clone(),
            (generated != self.dual.dim())
                .then(|| format!("y, V^*y, … span a subalgebra of dimension {generated} < {}", self.dual.dim())),
        );

        let t = truncated(&self.witt)?;
        let p = self.p();
        let mut failure = None;
        'outer: for i in 0..=self.n {
            for j in 0..=self.m {
                let z = self.z(i, j);
                for r in 0..=self.n {
                    for s in 0..=self.m {
                        let idx = t.power_index(r as usize, p.pow(self.m - s)).expect("x_r^{p^{m-s}} ≠ 0");
                        let want = u32::from(i == r && j == s);
                        if z[idx] != want {
                            failure = Some(format!(
                                "V^{j}*(y^(p^{i})) takes {} on x_{r}^{}, expected {want}",
                                z[idx],
                                p.pow(self.m - s)
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
        let values = Report::from_result("standard-functional-values", params.clone(), failure);
        Ok(combine("standard-functional", params, &[member, generation, values]))
    }
}

/// Dimension of the subalgebra generated by `gens`.
fn generated_dimension(g: &FiniteGroupScheme, gens: &[Elem]) -> usize {
    let alg = g.algebra();
    let mut span = Echelon::new(g.fp(), Lead::Min, false);
    let one = alg.one();
    span.insert(&sparse_from_dense(&one));
    let mut queue = vec![one];
    while let Some(b) = queue.pop() {
        for x in gens {
            let c = alg.mul(&b, x);
            if span.insert(&sparse_from_dense(&c)) {
                queue.push(c);
            }
        }
    }
    span.rank()
}

/// Checks that the standard functional is a Dieudonné generator of
/// `W_{n,m}^D`.
pub fn verify_standard_is_dieudonne(n: u32, m: u32, p: u32, caps: &Caps) -> Result<Report> {
    StandardDuality::new(n, m, p, caps)?.verify(caps)
}

/// `f_y: W_{n,m}^D → W_{m,n}` with `f_y^*(x_i) = V^{(m−i)*}y`.
#[derive(Debug, Clone)]
pub struct StandardIso {
    pub source: FiniteGroupScheme,
    pub target: FiniteGroupScheme,
    pub hom: SchemeHom,
    pub report: Report,
}

impl StandardDuality {
    pub fn standard_iso(&self, caps: &Caps) -> Result<StandardIso> {
        let target = scheme::witt(self.p(), self.m, self.n, caps)?;
        let images: Vec<Elem> = (0..=self.m).map(|i| self.v_dual(&self.y.values, self.m - i)).collect();
        let pullback = hom_from_images(truncated(&target)?, self.dual.algebra(), &images)?;
        let hom = SchemeHom { pullback };
        let params = self.params();
        let is_hom = self.dual.check_hom(&target, &hom);
        let bijective = Report::from_result(
            "standard-iso-bijective",
            params.clone(),
            (!hom.pullback.is_bijective(&self.witt.fp())).then(|| "f_y^* is not bijective".to_string()),
        );
        let report = combine("standard-iso", params, &[is_hom, bijective]);
        Ok(StandardIso {
            source: self.dual.clone(),
            target,
            hom,
            report,
        })
    }
}

pub fn standard_iso(n: u32, m: u32, p: u32, caps: &Caps) -> Result<StandardIso> {
    StandardDuality::new(n, m, p, caps)?.standard_iso(caps)
}

/// `standard_iso(n,m)^{-1} ∘ standard_iso(m,n)^D`, an automorphism of
/// `W_{n,m}^D`. Nothing forces it to be the identity; the caller gets the
/// map and a description of it.
#[derive(Debug, Clone)]
pub struct StandardComposite {
    pub automorphism: SchemeHom,
    pub is_identity: bool,
    /// `Some(k)` when the automorphism is multiplication by `k`
    pub scalar: Option<u32>,
    pub report: Report,
}

pub fn standard_composite(n: u32, m: u32, p: u32, caps: &Caps) -> Result<StandardComposite> {
    let a = standard_iso(n, m, p, caps)?;
    let b = standard_iso(m, n, p, caps)?;
    let fp = PrimeField::new(p)?;
    let a_inv =
        invert(&fp, &a.hom.pullback).ok_or_else(|| Error::InvalidArgument("standard iso is not invertible".into()))?;
    // (b^D)^* = (b^*)^T, read on the identification (W_{m,n}^D)^D = W_{m,n}
    let pullback = transpose(&b.hom.pullback).compose(&fp, &a_inv);
    let automorphism = SchemeHom { pullback };
    let source = &a.source;
    let is_identity = automorphism.pullback == LinearMap::identity(source.dim());
    let scalar = (1..p).find(|&k| source.multiplication_by(k).pullback == automorphism.pullback);
    let params = json!({ "n": n, "m": m, "p": p, "identity": is_identity, "scalar": scalar });
    let report = combine(
        "standard-composite",
        params.clone(),
        &[
            source.check_hom(source, &automorphism),
            Report::from_result(
                "standard-composite-bijective",
                params,
                (!automorphism.pullback.is_bijective(&fp)).then(|| "composite is not bijective".to_string()),
            ),
        ],
    );
    Ok(StandardComposite {
        automorphism,
        is_identity,
        scalar,
        report,
    })
}

/// Everything needed to evaluate `⟨x, y⟩` for `x ∈ D(G)`, `y ∈ D(G^D)`,
/// where `G^D ⊂ W_{n,m}` (so `V^{n+1} = F^{m+1} = 0` on `G^D`).
///
/// `y` is the hom `f_y: G^D → W_{n,m}`; its dual composed with the standard
/// isomorphism is `y^D: W_{m,n} → G`, and `y^{D*}(x) ∈ D(W_{m,n})` is
/// `b·x_m` for a unique `b ∈ A/(F^{n+1}, V^{m+1})`. The pairing reads off
/// the coefficient of `b` on the diagonal through `F^nV^m`, the socle of
/// that ring; it lies in `Z/p^{r+1} = W_r(F_p)`. For `n = m` this is the
/// constant term of `b`. The constant term itself is degenerate when
/// `n ≠ m` (it vanishes on `V·D(G)` or `F·D(G)`).
#[derive(Debug, Clone)]
pub struct PairingContext {
    pub n: u32,
    pub m: u32,
    pub g: FiniteGroupScheme,
    pub dual: FiniteGroupScheme,
    /// `D(G)` at the level of `G`
    pub source: DieudonneContext,
    /// `D(G^D)` at level `n`
    pub dual_ctx: DieudonneContext,
    /// `(s^*)^{-1}: R(W_{n,m}^D) → R(W_{m,n})` for the standard iso `s`
    s_inv: LinearMap,
    witt_nm: algebra::TruncatedAlgebra,
    ring: TruncatedA,
    normal_form: HashMap<Elem, AElem>,
}

impl PairingContext {
    pub fn new(g: &FiniteGroupScheme, n: u32, m: u32, caps: &Caps) -> Result<Self> {
        let p = g.p();
        let fp = g.fp();
        let dual = scheme::cartier_dual(g, caps)?;
        let dual_ctx = DieudonneContext::with_level(&dual, n, caps)?;
        // F on G^D is dual to V on G
        if verschiebung_nilpotency(g).is_none_or(|k| k > m) {
            return Err(Error::InvalidArgument(format!("F^{} ≠ 0 on {}", m + 1, dual.name())));
        }
        let source = DieudonneContext::new(g, caps)?;
        let iso = standard_iso(n, m, p, caps)?;
        let s_inv = invert(&fp, &iso.hom.pullback)
            .ok_or_else(|| Error::InvalidArgument("standard iso is not invertible".into()))?;
        let witt_nm = truncated(&scheme::witt(p, n, m, caps)?)?.clone();

        // D(W_{m,n}) = A/(F^{n+1}, V^{m+1}) · x_m
        let target = &iso.target;
        let tctx = DieudonneContext::with_level(target, m, caps)?;
        let ring = TruncatedA::new(p, n + 1, m + 1)?;
        let gen = algebra::basis_vec(target.dim(), truncated(target)?.power_index(m as usize, 1).expect("x_m ≠ 0"));
        let mut normal_form = HashMap::new();
        for b in ring.elements() {
            let z = realize(&tctx, &ring, std::slice::from_ref(&gen), std::slice::from_ref(&b));
            if normal_form.insert(z, b).is_some() {
                return Err(Error::InvalidArgument("D(W_{m,n}) is not free on x_m".into()));
            }
        }
        Ok(PairingContext {
            n,
            m,
            g: g.clone(),
            dual,
            source,
            dual_ctx,
            s_inv,
            witt_nm,
            ring,
            normal_form,
        })
    }

    /// The smallest `(n, m)` with `V^{n+1} = F^{m+1} = 0` on `G^D`.
    pub fn for_scheme(g: &FiniteGroupScheme, caps: &Caps) -> Result<Self> {
        let nilpotent = |h: &FiniteGroupScheme| {
            verschiebung_nilpotency(h).ok_or_else(|| Error::InvalidArgument(format!("V is not nilpotent on {}", h.name())))
        };
        let dual = scheme::cartier_dual(g, caps)?;
        Self::new(g, nilpotent(&dual)?, nilpotent(g)?, caps)
    }

    /// `r = min(m, n)`.
    pub fn witt_level(&self) -> u32 {
        self.m.min(self.n)
    }

    /// `y^{D*}: R(G) → R(W_{m,n})`.
    pub fn y_dual_pullback(&self, y: &[u32]) -> Result<LinearMap> {
        let fp = self.g.fp();
        let images: Vec<Elem> = (0..=self.n)
            .map(|i| (0..self.n - i).fold(y.to_vec(), |acc, _| self.dual_ctx.v_act(&acc)))
            .collect();
        let f_y = hom_from_images(&self.witt_nm, self.dual.algebra(), &images)?;
        Ok(self.s_inv.compose(&fp, &transpose(&f_y)))
    }

    /// `b` with `y^{D*}(x) = b·x_m`.
    pub fn module_value(&self, pull: &LinearMap, x: &[u32]) -> Result<AElem> {
        let z = pull.apply(&self.g.fp(), x);
        self.normal_form
            .get(&z)
            .cloned()
            .ok_or_else(|| Error::NotDieudonne("y^{D*}(x) is not a Dieudonné element of W_{m,n}".into()))
    }

    /// Coefficient of `b` on the diagonal `δ = n − m`.
    pub fn value_of(&self, b: &AElem) -> Result<PairingValue> {
        self.coefficient(b, self.n as i64 - self.m as i64)
    }

    /// The diagonal-zero coefficient of `b`.
    pub fn constant_term(&self, b: &AElem) -> Result<PairingValue> {
        self.coefficient(b, 0)
    }

    fn coefficient(&self, b: &AElem, delta: i64) -> Result<PairingValue> {
        let residue = b[self.ring.slot(delta).expect("diagonal inside the ring")];
        Ok(PairingValue {
            value: WittVector::from_residue(self.g.p(), self.witt_level(), residue)?,
            residue,
        })
    }

    pub fn pair(&self, x: &[u32], y: &[u32]) -> Result<PairingValue> {
        let pull = self.y_dual_pullback(y)?;
        self.value_of(&self.module_value(&pull, x)?)
    }
}

pub fn pairing(g: &FiniteGroupScheme, n: u32, m: u32, x: &[u32], y: &[u32], caps: &Caps) -> Result<PairingValue> {
    let ctx = PairingContext::new(g, n, m, caps)?;
    if !ctx.source.is_dieudonne(x) || !ctx.dual_ctx.is_dieudonne(y) {
        return Err(Error::NotDieudonne("pairing arguments must be Dieudonné elements".into()));
    }
    ctx.pair(x, y)
}

/// The full pairing table on `D(G) × D(G^D)`, with its residues.
#[derive(Debug, Clone)]
pub struct PairingTable {
    pub xs: Vec<Elem>,
    pub ys: Vec<Elem>,
    /// `values[i][j] = ⟨xs[i], ys[j]⟩` in `Z/p^{r+1}`
    pub values: Vec<Vec<u64>>,
}

impl PairingContext {
    pub fn table(&self, caps: &Caps) -> Result<PairingTable> {
        let xs = self.source.enumerate(caps)?.elements().to_vec();
        let ys = self.dual_ctx.enumerate(caps)?.elements().to_vec();
        let mut values = vec![vec![0u64; ys.len()]; xs.len()];
        for (j, y) in ys.iter().enumerate() {
            let pull = self.y_dual_pullback(y)?;
            for (i, x) in xs.iter().enumerate() {
                values[i][j] = self.value_of(&self.module_value(&pull, x)?)?.residue;
            }
        }
        Ok(PairingTable { xs, ys, values })
    }

    /// Bilinearity in `x`, `⟨0,y⟩ = ⟨x,0⟩ = 0`, both adjunctions
    /// `⟨Fx,y⟩ = ⟨x,Vy⟩` and `⟨Vx,y⟩ = ⟨x,Fy⟩`, and perfectness on every
    /// enumerated pair.
    pub fn check(&self, caps: &Caps) -> Result<Report> {
        let t = self.table(caps)?;
        let params = json!({ "group": self.g.name(), "n": self.n, "m": self.m, "pairs": t.xs.len() * t.ys.len() });
        let modulus = (self.g.p() as u64).pow(self.witt_level() + 1);
        let xi = |x: &Elem| t.xs.binary_search(x).map_err(|_| Error::NotDieudonne("D(G) is not closed".into()));
        let yi = |y: &Elem| t.ys.binary_search(y).map_err(|_| Error::NotDieudonne("D(G^D) is not closed".into()));
        let label = |x: &Elem| self.g.algebra().format_elem(x);

        let zero_x = xi(&vec![0; self.g.dim()])?;
        let zero_y = yi(&vec![0; self.dual.dim()])?;
        let mut zero = None;
        if let Some(j) = (0..t.ys.len()).find(|&j| t.values[zero_x][j] != 0) {
            zero = Some(format!("⟨0, y⟩ ≠ 0 for y = {}", self.dual.algebra().format_elem(&t.ys[j])));
        } else if let Some(i) = (0..t.xs.len()).find(|&i| t.values[i][zero_y] != 0) {
            zero = Some(format!("⟨x, 0⟩ ≠ 0 for x = {}", label(&t.xs[i])));
        }

        let mut additive = None;
        let probes: Vec<usize> = (0..t.xs.len()).filter(|&i| i != zero_x).take(4).collect();
        'add: for (i, x) in t.xs.iter().enumerate() {
            for &k in &probes {
                let s = xi(&self.source.dot_plus(x, &t.xs[k]))?;
                for j in 0..t.ys.len() {
                    if t.values[s][j] != (t.values[i][j] + t.values[k][j]) % modulus {
                        additive = Some(format!("⟨x ∔ x′, y⟩ ≠ ⟨x,y⟩ + ⟨x′,y⟩ at x = {}", label(x)));
                        break 'add;
                    }
                }
            }
        }

        let mut adjoint = None;
        'adj: for (i, x) in t.xs.iter().enumerate() {
            let fx = xi(&self.source.f_act(x))?;
            let vx = xi(&self.source.v_act(x))?;
            for (j, y) in t.ys.iter().enumerate() {
                let vy = yi(&self.dual_ctx.v_act(y))?;
                let fy = yi(&self.dual_ctx.f_act(y))?;
                if t.values[fx][j] != t.values[i][vy] {
                    adjoint = Some(format!("⟨Fx,y⟩ ≠ ⟨x,Vy⟩ at x = {}", label(x)));
                    break 'adj;
                }
                if t.values[vx][j] != t.values[i][fy] {
                    adjoint = Some(format!("⟨Vx,y⟩ ≠ ⟨x,Fy⟩ at x = {}", label(x)));
                    break 'adj;
                }
            }
        }

        // both sides have exponent dividing p^{r+1}, so two injective
        // adjoint maps make the pairing perfect
        let mut perfect = None;
        if t.xs.len() != t.ys.len() {
            perfect = Some(format!("|D(G)| = {} but |D(G^D)| = {}", t.xs.len(), t.ys.len()));
        } else if let Some(i) = (0..t.xs.len()).find(|&i| i != zero_x && t.values[i].iter().all(|&v| v == 0)) {
            perfect = Some(format!("x = {} pairs to zero with everything", label(&t.xs[i])));
        } else if let Some(j) = (0..t.ys.len()).find(|&j| j != zero_y && t.values.iter().all(|row| row[j] == 0)) {
            perfect = Some(format!("y = {} pairs to zero with everything", self.dual.algebra().format_elem(&t.ys[j])));
        }

        Ok(combine(
            "pairing",
            params.clone(),
            &[
                Report::from_result("pairing-zero", params.clone(), zero),
                Report::from_result("pairing-additive", params.clone(), additive),
                Report::from_result("pairing-adjunction", params.clone(), adjoint),
                Report::from_result("pairing-perfect", params, perfect),
            ],
        ))
    }
}

/// `D = (id ⊗ ȳ) ∘ Δ`, the left-invariant operator with `ε ∘ D = ȳ`.
pub fn functional_to_operator(g: &FiniteGroupScheme, y: &[u32]) -> LinearMap {
    let d = g.dim();
    let fp = g.fp();
    let columns = (0..d)
        .map(|c| {
            let mut out = vec![0u32; d];
            for &(t, v) in g.delta_basis(c) {
                let w = y[t % d];
                if w != 0 {
                    out[t / d] = fp.add(out[t / d], fp.mul(v, w));
                }
            }
            sparse_from_dense(&out)
        })
        .collect();
    LinearMap { cod_dim: d, columns }
}

/// `(ȳ ∗ ȳ′)(z) = (ȳ ⊗ ȳ′)(Δz)`, computed from `Δ` directly.
pub fn convolution(g: &FiniteGroupScheme, y1: &[u32], y2: &[u32]) -> Elem {
    let d = g.dim();
    let fp = g.fp();
    (0..d)
        .map(|c| {
            g.delta_basis(c).iter().fold(0, |acc, &(t, v)| {
                fp.add(acc, fp.mul(v, fp.mul(y1[t / d], y2[t % d])))
            })
        })
        .collect()
}

/// `Δ ∘ D = (id ⊗ D) ∘ Δ` on every basis element.
pub fn check_left_invariant(g: &FiniteGroupScheme, op: &LinearMap) -> Report {
    let d = g.dim();
    let fp = g.fp();
    let params = json!({ "group": g.name() });
    for c in 0..d {
        let dc = crate::linalg::sparse_to_dense(&op.columns[c], d);
        let lhs = g.delta(&dc);
        let mut acc: HashMap<usize, u32> = HashMap::new();
        for &(t, v) in g.delta_basis(c) {
            for &(b, w) in &op.columns[t % d] {
                let e = acc.entry((t / d) * d + b).or_insert(0);
                *e = fp.add(*e, fp.mul(v, w));
            }
        }
        if lhs != scheme::finish(acc) {
            return Report::fail("left-invariant", params, format!("fails on {}", g.algebra().label(c)));
        }
    }
    Report::pass("left-invariant", params)
}

/// `D_ȳ ∘ D_ȳ′ = D_{ȳ∗ȳ′}`, plus left invariance of both operators.
pub fn operator_product_check(g: &FiniteGroupScheme, y1: &[u32], y2: &[u32]) -> Report {
    let fp = g.fp();
    let params = json!({ "group": g.name() });
    let d1 = functional_to_operator(g, y1);
    let d2 = functional_to_operator(g, y2);
    let lhs = d1.compose(&fp, &d2);
    let rhs = functional_to_operator(g, &convolution(g, y1, y2));
    let product = Report::from_result(
        "operator-product",
        params.clone(),
        (lhs != rhs).then(|| "D_y ∘ D_y′ differs from the operator of y ∗ y′".to_string()),
    );
    combine(
        "operator-product",
        params,
        &[check_left_invariant(g, &d1), check_left_invariant(g, &d2), product],
    )
}

/// `ȳ ↦ D_ȳ` on the whole dual basis: injective, and products go to
/// composites. The convolution is compared with the multiplication of
/// [`scheme::cartier_dual`] as well.
pub fn check_operator_algebra(g: &FiniteGroupScheme, caps: &Caps) -> Result<Report> {
    let d = g.dim();
    let fp = g.fp();
    let params = json!({ "group": g.name(), "dim": d });
    let dual = scheme::cartier_dual(g, caps)?;
    let ops: Vec<LinearMap> = (0..d).map(|a| functional_to_operator(g, &algebra::basis_vec(d, a))).collect();
    let mut span = Echelon::new(fp, Lead::Min, false);
    for op in &ops {
        let flat: Vec<(usize, u32)> =
            op.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(i, v)| (c * d + i, v))).collect();
        span.insert(&flat);
    }
    let injective = Report::from_result(
        "operator-injective",
        params.clone(),
        (span.rank() != d).then(|| format!("the operators span only {} dimensions", span.rank())),
    );
    let mut failure = None;
    'outer: for a in 0..d {
        for b in 0..d {
            let (ea, eb) = (algebra::basis_vec(d, a), algebra::basis_vec(d, b));
            let conv = convolution(g, &ea, &eb);
            if conv != dual.algebra().mul(&ea, &eb) {
                failure = Some(format!("convolution and the dual product differ on e*_{a}·e*_{b}"));
                break 'outer;
            }
            let comp = ops[a].compose(&fp, &ops[b]);
            let expected = conv.iter().enumerate().fold(LinearMap { cod_dim: d, columns: vec![Vec::new(); d] }, |acc, (c, &k)| {
                if k == 0 {
                    acc
                } else {
                    add_maps(&fp, &acc, &ops[c], k)
                }
            });
            if comp != expected {
                failure = Some(format!("D_(e*_{a}) ∘ D_(e*_{b}) ≠ D_(e*_{a}·e*_{b})"));
                break 'outer;
            }
        }
    }
    let product = Report::from_result("operator-algebra", params.clone(), failure);
    Ok(combine("operator-algebra", params, &[injective, product]))
}

/// `x + k·y`.
fn add_maps(fp: &PrimeField, x: &LinearMap, y: &LinearMap, k: u32) -> LinearMap {
    let d = x.cod_dim;
    let columns = x
        .columns
        .iter()
        .zip(&y.columns)
        .map(|(a, b)| {
            let mut out = crate::linalg::sparse_to_dense(a, d);
            for &(i, v) in b {
                out[i] = fp.add(out[i], fp.mul(k, v));
            }
            sparse_from_dense(&out)
        })
        .collect();
    LinearMap { cod_dim: d, columns }
}

/// `D_y(x_0^{p^m}x′) = x′ + x_0^{p^m}D_y(x′)` for every basis monomial
/// `x′` of `A_{n,m}`.
pub fn leibniz_x0_check(n: u32, m: u32, p: u32, caps: &Caps) -> Result<Report> {
    leibniz_rule(n, m, p, caps, true)
}

/// `D_y(x_i^{p^m}x′) = x_i^{p^m}D_y(x′)` for `i > 0` and every basis
/// monomial `x′`. This fails whenever `n > 0`: `Δ(x_1)^{p^m}` contains
/// `c·x_0^{(p−1)p^m} ⊗ x_0^{p^m}` with `c = 1/(p−1)!`, so
/// `D_y(x_1^{p^m}) = c·x_0^{(p−1)p^m} ≠ 0`.
pub fn leibniz_xi_check(n: u32, m: u32, p: u32, caps: &Caps) -> Result<Report> {
    leibniz_rule(n, m, p, caps, false)
}

/// Both rules.
pub fn leibniz_witt_check(n: u32, m: u32, p: u32, caps: &Caps) -> Result<Report> {
    let parts = [leibniz_x0_check(n, m, p, caps)?, leibniz_xi_check(n, m, p, caps)?];
    Ok(combine("leibniz-witt", json!({ "n": n, "m": m, "p": p }), &parts))
}

fn leibniz_rule(n: u32, m: u32, p: u32, caps: &Caps, first: bool) -> Result<Report> {
    let sd = StandardDuality::new(n, m, p, caps)?;
    let g = &sd.witt;
    let t = truncated(g)?;
    let (d, fp, alg) = (g.dim(), g.fp(), g.algebra());
    let op = functional_to_operator(g, &sd.y.values);
    let pm = p.pow(m);
    let check = if first { "leibniz-x0" } else { "leibniz-xi" };
    let vars: Vec<usize> = if first { vec![0] } else { (1..=n as usize).collect() };
    for c in 0..d {
        let x = algebra::basis_vec(d, c);
        let dx = op.apply(&fp, &x);
        for &i in &vars {
            let xi = algebra::basis_vec(d, t.power_index(i, pm).expect("x_i^{p^m} ≠ 0"));
            let lhs = op.apply(&fp, &alg.mul(&xi, &x));
            let mut rhs = alg.mul(&xi, &dx);
            if first {
                rhs = algebra::add(&fp, &rhs, &x);
            }
            if lhs != rhs {
                let why = format!("D_y(x_{i}^{pm} · {}) = {}", alg.label(c), alg.format_elem(&lhs));
                return Ok(Report::fail(check, sd.params(), why));
            }
        }
    }
    Ok(Report::pass(check, sd.params()))
}

/// The grading `d(x_0^{i_0}⋯x_n^{i_n}) = Σ p^k i_k` of `A_{n,m}`:
/// `Δ(x_n)` is homogeneous of degree `p^n`, and `D_{V^{j*}y}^{p^i}` lowers
/// degree by exactly `p^{i+m−j}`.
pub fn grading_check(n: u32, m: u32, p: u32, caps: &Caps) -> Result<Report> {
    let sd = StandardDuality::new(n, m, p, caps)?;
    let g = &sd.witt;
    let t = truncated(g)?;
    let (d, fp) = (g.dim(), g.fp());
    let weights: Vec<u64> = (0..=n).map(|k| (p as u64).pow(k)).collect();
    let deg = |c: usize| t.weighted_degree(c, &weights);
    let params = sd.params();

    let xn = t.power_index(n as usize, 1).expect("x_n ≠ 0");
    let top = (p as u64).pow(n);
    let coproduct = Report::from_result(
        "grading-coproduct",
        params.clone(),
        g.delta_basis(xn)
            .iter()
            .find(|&&(tt, _)| deg(tt / d) + deg(tt % d) != top)
            .map(|&(tt, _)| format!("Δ(x_{n}) has the term {} ⊗ {}", t.monomial_name(tt / d), t.monomial_name(tt % d))),
    );

    let mut failure = None;
    'outer: for j in 0..=m {
        let op = functional_to_operator(g, &sd.v_dual(&sd.y.values, j));
        let mut power = LinearMap::identity(d);
        for i in 0..=n {
            // power = D^{p^i}
            let steps = if i == 0 { 1 } else { (p as u64).pow(i) - (p as u64).pow(i - 1) };
            for _ in 0..steps {
                power = op.compose(&fp, &power);
            }
            let drop = (p as u64).pow(i + m - j);
            for c in 0..d {
                let bad = power.columns[c].iter().find(|&&(r, _)| deg(r) + drop != deg(c));
                if let Some(&(r, _)) = bad {
                    failure = Some(format!(
                        "D_(V^{j}* y)^(p^{i}) sends {} to a multiple of {}",
                        t.monomial_name(c),
                        t.monomial_name(r)
                    ));
                    break 'outer;
                }
            }
        }
    }
    let lowering = Report::from_result("grading-operators", params.clone(), failure);
    Ok(combine("grading", params, &[coproduct, lowering]))
}

/// On `W_{1,0}`: the operator `D` of the standard functional against
/// `∂/∂x_0 + c·x_0^{p−1}∂/∂x_1`, and `D^p` against `∂/∂x_1`. The
/// coefficient is `c = 1/(p−1)! ≡ −1` (from `Δ(x_1)`), so `c = 1` matches
/// only for `p = 2`.
pub fn check_first_witt_operator(p: u32, c: i64, caps: &Caps) -> Result<Report> {
    let sd = StandardDuality::new(1, 0, p, caps)?;
    let g = &sd.witt;
    let t = truncated(g)?;
    let (d, fp) = (g.dim(), g.fp());
    let op = functional_to_operator(g, &sd.y.values);
    let params = json!({ "p": p, "c": c });
    let partial = |var: usize, e: &[u32], out: &mut Vec<u32>, coef: u32, shift0: u32| {
        if e[var] == 0 {
            return;
        }
        let mut f = e.to_vec();
        f[var] -= 1;
        f[0] += shift0;
        if let Some(idx) = t.index(&f) {
            out[idx] = fp.add(out[idx], fp.mul(coef, fp.from_i64(e[var] as i64)));
        }
    };
    let mut first = None;
    let mut power = None;
    let op_p = (1..p).fold(op.clone(), |acc, _| op.compose(&fp, &acc));
    for b in 0..d {
        let e = t.exps(b);
        let mut want = vec![0u32; d];
        partial(0, &e, &mut want, 1, 0);
        partial(1, &e, &mut want, fp.from_i64(c), p - 1);
        if first.is_none() && op.apply(&fp, &algebra::basis_vec(d, b)) != want {
            first = Some(format!("D differs on {}", t.monomial_name(b)));
        }
        let mut want_p = vec![0u32; d];
        partial(1, &e, &mut want_p, 1, 0);
        if power.is_none() && op_p.apply(&fp, &algebra::basis_vec(d, b)) != want_p {
            power = Some(format!("D^p differs from ∂/∂x_1 on {}", t.monomial_name(b)));
        }
    }
    Ok(combine(
        "first-witt-operator",
        params.clone(),
        &[
            Report::from_result("first-witt-operator-d", params.clone(), first),
            Report::from_result("first-witt-operator-dp", params, power),
        ],
    ))
}
