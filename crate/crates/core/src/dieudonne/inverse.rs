//! From a presented module back to a group scheme: `M = A^r/K` is realized
//! inside `D(W_{n,m}^r) ≅ A_{m+1,n+1}^r`, and `G ⊂ W_{n,m}^r` is cut out by
//! the ideal generated by the Dieudonné elements of `K`.

use serde_json::json;

use super::DieudonneContext;
use crate::algebra::{self, Elem};
use crate::amodule::{AElem, AModulePresentation, Lattice, TruncatedA};
use crate::error::{Error, Result};
use crate::linalg::{sparse_from_dense, sparse_to_dense, Echelon, Lead};
use crate::report::Report;
use crate::scheme::{self, is_isomorphic_small, FiniteGroupScheme};
use crate::Caps;

/// `W_{n,m}^r` with the coordinate index of each factor's `x_n`.
fn free_scheme(p: u32, n: u32, m: u32, r: usize, caps: &Caps) -> Result<(FiniteGroupScheme, Vec<usize>)> {
    let w = scheme::witt(p, n, m, caps)?;
    let mut g = w.clone();
    for _ in 1..r {
        g = scheme::product(&g, &w, caps)?;
    }
    let t = g
        .algebra()
        .as_truncated()
        .ok_or_else(|| Error::InvalidArgument("free scheme lost its coordinates".into()))?;
    let vars = (0..r)
        .map(|k| t.power_index(k * (n as usize + 1) + n as usize, 1).expect("x_n exists"))
        .collect();
    Ok((g, vars))
}

/// `Σ^∔_k Σ^∔_δ a_δ · w_δ(x_n^{(k)})`, the element of `D(W_{n,m}^r)`
/// matching `b ∈ A_{m+1,n+1}^r`.
pub(crate) fn realize(ctx: &DieudonneContext, ring: &TruncatedA, gens: &[Elem], b: &[AElem]) -> Elem {
    let d = ctx.scheme().dim();
    let mut acc = vec![0u32; d];
    for (bk, g) in b.iter().zip(gens) {
        for (s, &c) in bk.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let delta = ring.delta(s);
            let mut w = g.clone();
            for _ in 0..delta.max(0) {
                w = ctx.f_act(&w);
            }
            for _ in 0..(-delta).max(0) {
                w = ctx.v_act(&w);
            }
            acc = ctx.dot_plus(&acc, &ctx.times(c, &w));
        }
    }
    acc
}

/// Moves an element of `A_{M′,N′}` into `A_{M,N}` for `M ≤ M′`, `N ≤ N′`.
fn truncate(from: &TruncatedA, to: &TruncatedA, a: &[u64]) -> AElem {
    let mut out = to.zero();
    for (s, &c) in a.iter().enumerate() {
        if let Some(t) = to.slot(from.delta(s)) {
            out[t] = c % to.modulus(t);
        }
    }
    out
}

/// `D^{-1}(M)`: enumerates the relation submodule `K ⊂ A_{m+1,n+1}^r`,
/// realizes each of its elements in `R(W_{n,m}^r)`, and takes the closed
/// subgroup scheme cut out by the ideal they generate.
pub fn inverse_functor(m: &AModulePresentation, caps: &Caps) -> Result<FiniteGroupScheme> {
    let p = m.p;
    let r = m.generators;
    if r == 0 {
        return scheme::zero_scheme(p);
    }
    let ring = TruncatedA::new(p, m.m + 1, m.n + 1)?;
    let free = (p as f64).powi((r as u32 * ring.log_size()) as i32);
    if free > caps.free_module as f64 {
        return Err(Error::cap("free module size", free as u64, caps.free_module));
    }
    let rel_ring = m.ring();
    let relations: Vec<Vec<AElem>> = m
        .relations
        .iter()
        .map(|t| t.iter().map(|a| truncate(&rel_ring, &ring, a)).collect())
        .collect();
    let lattice: Lattice = crate::amodule::relation_lattice(&ring, r, &relations);

    // F^{m+1} and V^{n+1} must already follow from the relations
    for k in 0..r {
        for (j, i) in [(m.m + 1, 0), (0, m.n + 1)] {
            let mut t = vec![rel_ring.zero(); r];
            t[k] = rel_ring.word(1, j, i);
            let rl = crate::amodule::relation_lattice(&rel_ring, r, &m.relations);
            if !rl.contains(&crate::amodule::flatten(&t)) {
                return Err(Error::InvalidArgument(format!(
                    "{}: relations not closed under the declared nilpotency",
                    m.to_text()
                )));
            }
        }
    }

    let (g0, vars) = free_scheme(p, m.n, m.m, r, caps)?;
    let d = g0.dim();
    let ctx = DieudonneContext::with_level(&g0, m.n, caps)?;
    let gens: Vec<Elem> = vars.iter().map(|&v| algebra::basis_vec(d, v)).collect();
    let fp = g0.fp();
    let mut span = Echelon::new(fp, Lead::Min, false);
    let mut ideal = Vec::new();
    for v in lattice.elements() {
        let b = crate::amodule::unflatten(&ring, &v);
        let x = realize(&ctx, &ring, &gens, &b);
        let sx = sparse_from_dense(&x);
        if !sx.is_empty() && span.insert(&sx) {
            ideal.push(sparse_to_dense(&sx, d));
        }
    }
    let (g, _) = g0.quotient(&ideal)?;
    Ok(g.renamed(format!("D^-1({})", m.to_text())))
}

/// The four length-two modules over `F_p` and their schemes.
#[derive(Debug, Clone)]
pub struct LengthTwoClassification {
    pub modules: Vec<String>,
    pub schemes: Vec<FiniteGroupScheme>,
    pub a_numbers: Vec<usize>,
    /// `(a, F = 0, V = 0, p = 0)` for each scheme
    pub invariants: Vec<(usize, bool, bool, bool)>,
    pub report: Report,
}

pub const LENGTH_TWO: [&str; 4] = ["(A/(F,V))^2", "A/(F^2,V)", "A/(F,V^2)", "A/(F-V,p)"];

fn vanishes(g: &FiniteGroupScheme, f: &scheme::SchemeHom) -> bool {
    (1..g.dim()).all(|c| f.pullback.columns[c].is_empty())
}

/// Builds the four schemes with `inverse_functor` and certifies that no
/// two are isomorphic.
pub fn classify_length2(p: u32, caps: &Caps) -> Result<LengthTwoClassification> {
    let mut schemes = Vec::new();
    for text in LENGTH_TWO {
        let pres = crate::amodule::parse_presentation(text, p)?;
        schemes.push(inverse_functor(&pres, caps)?);
    }
    let a_numbers = schemes.iter().map(|g| g.a_number()).collect::<Result<Vec<_>>>()?;
    let invariants: Vec<_> = schemes
        .iter()
        .zip(&a_numbers)
        .map(|(g, &a)| {
            (
                a,
                vanishes(g, &g.frobenius()),
                vanishes(g, &g.verschiebung()),
                vanishes(g, &g.multiplication_by(p)),
            )
        })
        .collect();
    let params = json!({ "p": p });
    let mut failure = None;
    'outer: for i in 0..4 {
        for j in i + 1..4 {
            if invariants[i] == invariants[j] {
                failure = Some(format!("{} and {} share invariants", LENGTH_TWO[i], LENGTH_TWO[j]));
                break 'outer;
            }
            if is_isomorphic_small(&schemes[i], &schemes[j], caps)?.is_some() {
                failure = Some(format!("{} ≅ {}", LENGTH_TWO[i], LENGTH_TWO[j]));
                break 'outer;
            }
        }
    }
    Ok(LengthTwoClassification {
        modules: LENGTH_TWO.iter().map(|s| s.to_string()).collect(),
        schemes,
        a_numbers,
        invariants,
        report: Report::from_result("classify-length2", params, failure),
    })
}
