use std::collections::HashMap;

use super::{finish, FiniteGroupScheme};
use crate::algebra::{Algebra, LinearMap, TableAlgebra, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::numeric::{factorial, PrimeField};
use crate::witt::{law, LawKind};
use crate::Caps;

/// Extends coproducts given on the variables of a truncated algebra to
/// every monomial, multiplicatively.
pub fn from_variable_coproducts(
    name: impl Into<String>,
    alg: TruncatedAlgebra,
    var_deltas: &[SparseVec],
) -> Result<FiniteGroupScheme> {
    let d = alg.dim();
    let a = Algebra::Truncated(alg.clone());
    let mut delta: Vec<SparseVec> = vec![Vec::new(); d];
    delta[0] = vec![(0, 1)];
    for idx in 1..d {
        let e = alg.exps(idx);
        let j = (0..e.len()).rev().find(|&j| e[j] > 0).unwrap();
        let prev = idx - alg.power_index(j, 1).unwrap();
        delta[idx] = if prev == 0 {
            var_deltas[j].clone()
        } else {
            super::tensor_mul(&a, &delta[prev], &var_deltas[j])
        };
    }
    FiniteGroupScheme::with_derived_antipode(name, a, delta)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn primitive(alg: &TruncatedAlgebra, var: usize) -> SparseVec {
    let d = alg.dim();
    let x = alg.power_index(var, 1).unwrap();
    let mut t = vec![(x, 1), (x * d, 1)];
    t.sort_unstable();
    t
}

pub fn zero_scheme(p: u32) -> Result<FiniteGroupScheme> {
    let alg = TruncatedAlgebra::new(p, vec![], vec![], 1)?;
    from_variable_coproducts("0", alg, &[])
}

/// `α_{p^n} = Spec k[x]/(x^{p^n})` with `x` primitive.
pub fn alpha(p: u32, n: u32, caps: &Caps) -> Result<FiniteGroupScheme> {
    if n == 0 {
        return Err(Error::InvalidArgument("α_{p^n} needs n ≥ 1".into()));
    }
    let bound = (p as u64).saturating_pow(n);
    if bound > caps.dim as u64 {
        return Err(Error::cap("algebra dimension", bound, caps.dim as u64));
    }
    let alg = TruncatedAlgebra::new(p, vec!["x".into()], vec![bound as u32], caps.dim)?;
    let dx = primitive(&alg, 0);
    from_variable_coproducts(format!("alpha_{bound}"), alg, &[dx])
}

/// `W_{n,m} = ker(F^{m+1})` on `W_n`: `k[x_0..x_n]/(x_i^{p^{m+1}})` with
/// `Δ(x_i) = φ_i(x⊗1, 1⊗x)` reduced mod `p`.
pub fn witt(p: u32, n: u32, m: u32, caps: &Caps) -> Result<FiniteGroupScheme> {
    let fp = PrimeField::new(p)?;
    let bound = (p as u64).checked_pow(m + 1).unwrap_or(u64::MAX);
    let dim = (bound as f64).powi(n as i32 + 1);
    if bound > u32::MAX as u64 || dim > caps.dim as f64 {
        return Err(Error::cap("algebra dimension", dim.min(u64::MAX as f64) as u64, caps.dim as u64));
    }
    let alg = TruncatedAlgebra::new(p, names("x", n as usize + 1), vec![bound as u32; n as usize + 1], caps.dim)?;
    let d = alg.dim();
    let add = law(p, n, LawKind::Add, caps)?;
    let k = n as usize + 1;
    let mut var_deltas = Vec::with_capacity(k);
    for i in 0..=n {
        let poly = add.poly_at_level(i, n);
        let mut acc: HashMap<usize, u32> = HashMap::new();
        for (e, c) in poly.terms() {
            let Some(l) = alg.index(&e[..k]) else { continue };
            let Some(r) = alg.index(&e[k..]) else { continue };
            let c = fp.from_bigint(c);
            if c != 0 {
                let slot = acc.entry(l * d + r).or_insert(0);
                *slot = fp.add(*slot, c);
            }
        }
        var_deltas.push(finish(acc));
    }
    from_variable_coproducts(format!("W_{{{n},{m}}}"), alg, &var_deltas)
}

/// The `p`-torsion `E[p]` of a supersingular elliptic curve:
/// `k[x]/(x^{p²})` with `Δ(x) = x⊗1 + 1⊗x + Σ_{0<j<p} x^{jp}⊗x^{(p−j)p}/(j!(p−j)!)`.
pub fn ep(p: u32, caps: &Caps) -> Result<FiniteGroupScheme> {
    let fp = PrimeField::new(p)?;
    let bound = p as u64 * p as u64;
    if bound > caps.dim as u64 {
        return Err(Error::cap("algebra dimension", bound, caps.dim as u64));
    }
    let alg = TruncatedAlgebra::new(p, vec!["x".into()], vec![bound as u32], caps.dim)?;
    let d = alg.dim();
    let mut dx = primitive(&alg, 0);
    for j in 1..p {
        let den = factorial(j as u64) * factorial((p - j) as u64);
        let den = fp.from_bigint(&den);
        let c = fp.inv(den).expect("j!(p-j)! is a unit");
        let l = alg.power_index(0, j * p).unwrap();
        let r = alg.power_index(0, (p - j) * p).unwrap();
        dx.push((l * d + r, c));
    }
    dx.sort_unstable();
    from_variable_coproducts(format!("E[{p}]"), alg, &[dx])
}

/// `G × H`: the tensor-product Hopf algebra; basis `e_a ⊗ f_b` at
/// index `a · dim H + b`.
pub fn product(g: &FiniteGroupScheme, h: &FiniteGroupScheme, caps: &Caps) -> Result<FiniteGroupScheme> {
    if g.p() != h.p() {
        return Err(Error::FieldMismatch(format!("F_{} vs F_{}", g.p(), h.p())));
    }
    let fp = g.fp();
    let (dg, dh) = (g.dim(), h.dim());
    let d = dg * dh;
    if d > caps.dim {
        return Err(Error::cap("algebra dimension", d as u64, caps.dim as u64));
    }
    let alg = match (g.algebra(), h.algebra()) {
        (Algebra::Truncated(a), Algebra::Truncated(b)) => {
            let mut b = b.clone();
            let mut renamed: Vec<String> = b.names().to_vec();
            for nm in renamed.iter_mut() {
                while a.names().contains(nm) {
                    nm.push('\'');
                }
            }
            b = TruncatedAlgebra::new(b.p(), renamed, b.bounds().to_vec(), caps.dim)?;
            Algebra::Truncated(a.tensor(&b, caps.dim)?)
        }
        (ga, ha) => {
            let labels = (0..d)
                .map(|i| {
                    let (a, b) = (i / dh, i % dh);
                    match (a, b) {
                        (0, 0) => "1".to_string(),
                        (_, 0) => ga.label(a),
                        (0, _) => format!("{}'", ha.label(b)),
                        _ => format!("{}·{}'", ga.label(a), ha.label(b)),
                    }
                })
                .collect();
            Algebra::Table(TableAlgebra::from_fn(fp.p(), d, labels, |i, j| {
                let l = ga.basis_product(i / dh, j / dh);
                let r = ha.basis_product(i % dh, j % dh);
                let mut out = Vec::new();
                for (a, &x) in l.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (b, &y) in r.iter().enumerate() {
                        if y != 0 {
                            out.push((a * dh + b, fp.mul(x, y)));
                        }
                    }
                }
                out
            }))
        }
    };
    let mut delta = Vec::with_capacity(d);
    for i in 0..d {
        let (a, b) = (i / dh, i % dh);
        let mut acc: HashMap<usize, u32> = HashMap::new();
        for &(s, v) in g.delta_basis(a) {
            let (a1, a2) = (s / dg, s % dg);
            for &(t, w) in h.delta_basis(b) {
                let (b1, b2) = (t / dh, t % dh);
                let k = (a1 * dh + b1) * d + (a2 * dh + b2);
                let e = acc.entry(k).or_insert(0);
                *e = fp.add(*e, fp.mul(v, w));
            }
        }
        delta.push(finish(acc));
    }
    let columns = (0..d)
        .map(|i| {
            let (a, b) = (i / dh, i % dh);
            let mut out = Vec::new();
            for &(x, v) in &g.antipode().columns[a] {
                for &(y, w) in &h.antipode().columns[b] {
                    out.push((x * dh + y, fp.mul(v, w)));
                }
            }
            out.sort_unstable();
            out
        })
        .collect();
    let name = format!("{} × {}", g.name(), h.name());
    Ok(FiniteGroupScheme::from_parts(name, alg, delta, LinearMap { cod_dim: d, columns }))
}

/// `G^D` on the dual basis `e_c^*`: multiplication is `Δ^∨`,
/// comultiplication is `μ^∨`, antipode is `S^∨`. The dual basis keeps the
/// conventions (unit first, the rest in the augmentation ideal), and
/// `(G^D)^D` has the structure constants of `G`.
pub fn cartier_dual(g: &FiniteGroupScheme, caps: &Caps) -> Result<FiniteGroupScheme> {
    let d = g.dim();
    if d > caps.dim {
        return Err(Error::cap("algebra dimension", d as u64, caps.dim as u64));
    }
    let fp = g.fp();
    let mut prod: HashMap<(usize, usize), SparseVec> = HashMap::new();
    for c in 0..d {
        for &(t, v) in g.delta_basis(c) {
            prod.entry((t / d, t % d)).or_default().push((c, v));
        }
    }
    let labels: Vec<String> = (0..d)
        .map(|c| if c == 0 { "1".to_string() } else { format!("e*({})", g.algebra().label(c)) })
        .collect();
    let alg = Algebra::Table(TableAlgebra::from_fn(fp.p(), d, labels, |a, b| {
        prod.get(&(a, b)).cloned().unwrap_or_default()
    }));
    let mut delta: Vec<SparseVec> = vec![Vec::new(); d];
    let mut scratch = vec![0u32; d];
    for a in 0..d {
        for b in 0..d {
            scratch.iter_mut().for_each(|v| *v = 0);
            g.algebra().mul_basis_into(a, b, 1, &mut scratch);
            for (c, &v) in scratch.iter().enumerate() {
                if v != 0 {
                    delta[c].push((a * d + b, v));
                }
            }
        }
    }
    let mut columns: Vec<SparseVec> = vec![Vec::new(); d];
    for (j, col) in g.antipode().columns.iter().enumerate() {
        for &(i, v) in col {
            columns[i].push((j, v));
        }
    }
    let name = format!("{}^D", g.name());
    Ok(FiniteGroupScheme::from_parts(name, alg, delta, LinearMap { cod_dim: d, columns }))
}

/// Parses catalog expressions: `alpha:N` (with `N = p^n`, also written
/// `alpha:p^n`), `witt:n,m`, `ep`, `zero`, `dual(…)`, and products joined
/// by `*`.
pub fn catalog(expr: &str, p: u32, caps: &Caps) -> Result<FiniteGroupScheme> {
    let parts = split_top(expr.trim(), '*');
    let mut it = parts.iter();
    let mut acc = catalog_term(it.next().unwrap().trim(), p, caps)?;
    for part in it {
        let rhs = catalog_term(part.trim(), p, caps)?;
        acc = product(&acc, &rhs, caps)?;
    }
    Ok(acc)
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn catalog_term(t: &str, p: u32, caps: &Caps) -> Result<FiniteGroupScheme> {
    let bad = || Error::Parse(format!("unknown scheme `{t}`"));
    if let Some(inner) = t.strip_prefix("dual(").and_then(|r| r.strip_suffix(')')) {
        return cartier_dual(&catalog(inner, p, caps)?, caps);
    }
    if t == "ep" {
        return ep(p, caps);
    }
    if t == "zero" || t == "0" {
        return zero_scheme(p);
    }
    if let Some(rest) = t.strip_prefix("alpha:") {
        let n = if let Some((base, e)) = rest.split_once('^') {
            let base = base.trim();
            if base != "p" && base.parse::<u32>().map_err(|_| bad())? != p {
                return Err(Error::InvalidArgument(format!("alpha:{rest} is not a power of p = {p}")));
            }
            e.trim().parse::<u32>().map_err(|_| bad())?
        } else {
            let order: u64 = rest.trim().parse().map_err(|_| bad())?;
            let mut n = 0;
            let mut q = order;
            while q > 1 && q % p as u64 == 0 {
                q /= p as u64;
                n += 1;
            }
            if q != 1 || n == 0 {
                return Err(Error::InvalidArgument(format!("alpha:{order} is not a power of p = {p}")));
            }
            n
        };
        return alpha(p, n, caps);
    }
    if let Some(rest) = t.strip_prefix("witt:") {
        let (n, m) = rest.split_once(',').ok_or_else(bad)?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        let m: u32 = m.trim().parse().map_err(|_| bad())?;
        return witt(p, n, m, caps);
    }
    Err(bad())
}
