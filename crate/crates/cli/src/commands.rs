use std::path::Path;

use clap::ValueEnum;
use dieudonne::amodule::{parse_presentation, FiniteAModule};
use dieudonne::dieudonne::{inverse_functor, DieudonneContext};
use dieudonne::diffops::lambda_poly;
use dieudonne::duality::{standard_composite, PairingContext, StandardDuality};
use dieudonne::report::Report;
use dieudonne::scheme::{catalog, is_isomorphic_small};
use dieudonne::witt::{law_with_cache, LawKind, WittLaw, WittVector};
use dieudonne::{Caps, Error, Result};
use serde_json::json;

use crate::Output;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum WittOp {
    Add,
    Mul,
}

pub fn witt_law(p: u32, n: u32, kind: &str, caps: &Caps, cache: Option<&Path>) -> Result<Output> {
    let kind = LawKind::parse(kind)?;
    let law = law_with_cache(p, n, kind, caps, cache)?;
    Ok(Output {
        text: law.format_text(),
        json: law.to_json(),
        reports: Vec::new(),
    })
}

fn parse_components(s: &str, p: u32, n: u32) -> Result<Vec<u32>> {
    let comps = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad Witt component {t:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    if comps.len() != n as usize + 1 {
        return Err(Error::InvalidArgument(format!(
            "{s:?} has {} components; W_{n} needs {}",
            comps.len(),
            n + 1
        )));
    }
    if let Some(c) = comps.iter().find(|&&c| c >= p) {
        return Err(Error::InvalidArgument(format!("component {c} is not in F_{p}")));
    }
    Ok(comps)
}

fn join(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

pub fn witt_eval(p: u32, n: u32, lhs: &str, rhs: &str, op: WittOp, caps: &Caps) -> Result<Output> {
    let cap = caps.witt_level_cap(p);
    if n > cap {
        return Err(Error::CapExceeded {
            what: "Witt level".into(),
            value: n as u64,
            cap: cap as u64,
        });
    }
    let a = parse_components(lhs, p, n)?;
    let b = parse_components(rhs, p, n)?;
    let x = WittVector::from_prime(p, &a)?;
    let y = WittVector::from_prime(p, &b)?;
    let z = match op {
        WittOp::Add => x.add(&y)?,
        WittOp::Mul => x.mul(&y)?,
    };
    let c = z.prime_components().expect("prime field components");
    let op_name = match op {
        WittOp::Add => "add",
        WittOp::Mul => "mul",
    };
    Ok(Output {
        text: join(&c),
        json: json!({ "p": p, "n": n, "op": op_name, "lhs": a, "rhs": b, "result": c }),
        reports: Vec::new(),
    })
}

pub fn scheme_build(kind: &str, p: u32, caps: &Caps) -> Result<Output> {
    let g = catalog(kind, p, caps)?;
    let report = g.verify_hopf();
    Ok(Output {
        text: g.format_text(),
        json: g.to_json(),
        reports: vec![report],
    })
}

pub fn dieudonne_enumerate(expr: &str, p: u32, caps: &Caps) -> Result<Output> {
    let g = catalog(expr, p, caps)?;
    let d = DieudonneContext::new(&g, caps)?.enumerate(caps)?;
    let m = FiniteAModule::from_dieudonne(&d)?;
    let pres = m.presentation();
    let gens: Vec<String> = m.minimal_generators().iter().map(|&x| m.label(x).to_string()).collect();
    let ring = pres.ring();
    let relations: Vec<String> = pres
        .relations
        .iter()
        .map(|rel| match rel.as_slice() {
            [a] => ring.format(a),
            _ => format!("({})", rel.iter().map(|a| ring.format(a)).collect::<Vec<_>>().join(",")),
        })
        .collect();
    let shape = match gens.len() {
        0 => "zero".to_string(),
        1 => "cyclic".to_string(),
        k => format!("{k} generators"),
    };
    let rels = if relations.is_empty() { "none".to_string() } else { relations.join(", ") };
    let noun = if d.len() == 1 { "element" } else { "elements" };
    let text = format!(
        "{}: {} {noun}; {shape}; relations {rels}\ngenerators: {}\npresentation: {}",
        g.name(),
        d.len(),
        if gens.is_empty() { "none".into() } else { gens.join(", ") },
        pres.to_text()
    );
    Ok(Output {
        text,
        json: json!({
            "scheme": g.name(),
            "elements": d.len(),
            "generators": gens,
            "relations": relations,
            "presentation": pres.to_json(),
        }),
        reports: vec![d.check_soundness(), d.check_size(), m.check_axioms()],
    })
}

pub fn dieudonne_inverse(module: &str, p: u32, compare: Option<&str>, caps: &Caps) -> Result<Output> {
    let pres = parse_presentation(module, p)?;
    let g = inverse_functor(&pres, caps)?;
    let mut reports = vec![g.verify_hopf()];

    // D(D^{-1}(M)) ≅ M
    let back = FiniteAModule::from_dieudonne(&DieudonneContext::new(&g, caps)?.enumerate(caps)?)?;
    let expect = FiniteAModule::from_presentation(&pres, caps)?;
    let params = json!({ "module": pres.to_text(), "p": p });
    reports.push(Report::from_result(
        "inverse-round-trip",
        params,
        back.isomorphism(&expect, caps)?
            .is_none()
            .then(|| format!("D(G) = {} is not {}", back.presentation().to_text(), pres.to_text())),
    ));
    let mut json = json!({ "module": pres.to_json(), "scheme": g.to_json() });
    let mut text = format!("module: {}\n{}", pres.to_text(), g.format_text());
    if let Some(expr) = compare {
        let h = catalog(expr, p, caps)?;
        let iso = is_isomorphic_small(&g, &h, caps)?.is_some();
        text.push_str(&format!("isomorphic to {}: {}\n", h.name(), if iso { "yes" } else { "no" }));
        json["compare"] = json!({ "scheme": h.name(), "isomorphic": iso });
        reports.push(Report::from_result(
            "inverse-compare",
            json!({ "module": pres.to_text(), "p": p, "compare": h.name() }),
            (!iso).then(|| format!("{} ≇ {}", g.name(), h.name())),
        ));
    }
    Ok(Output { text, json, reports })
}

pub fn dual_standard(n: u32, m: u32, p: u32, caps: &Caps) -> Result<Output> {
    let sd = StandardDuality::new(n, m, p, caps)?;
    let iso = sd.standard_iso(caps)?;
    let composite = standard_composite(n, m, p, caps)?;
    let w = &sd.witt;
    let y_at = sd.y.values.iter().position(|&c| c != 0).expect("y is a dual basis vector");
    let mut text = format!(
        "{}^D ≅ {}\ny = dual basis vector of {}\n",
        w.name(),
        iso.target.name(),
        w.algebra().label(y_at)
    );
    let fp = w.fp();
    let t = iso.target.algebra().as_truncated().expect("Witt coordinates");
    let mut images = Vec::new();
    for i in 0..=m {
        let xi = t.power_index(i as usize, 1).expect("x_i exists");
        let img = iso.hom.pullback.apply(&fp, &dieudonne::algebra::basis_vec(iso.target.dim(), xi));
        let shown = iso.source.algebra().format_elem(&img);
        text.push_str(&format!("f_y^*(x{i}) = V^{}*(y) = {shown}\n", m - i));
        images.push(json!({ "x": i, "image": shown }));
    }
    text.push_str(&format!(
        "composite automorphism: {}\n",
        match (composite.is_identity, composite.scalar) {
            (true, _) => "identity".to_string(),
            (false, Some(k)) => format!("multiplication by {k}"),
            (false, None) => "not a scalar".to_string(),
        }
    ));
    Ok(Output {
        text,
        json: json!({
            "n": n,
            "m": m,
            "p": p,
            "y": sd.y.to_json(),
            "iso": { "source": iso.source.name(), "target": iso.target.name(), "images": images },
            "composite": { "identity": composite.is_identity, "scalar": composite.scalar },
        }),
        reports: vec![sd.verify(caps)?, iso.report, composite.report],
    })
}

/// Tables larger than this are left out of the text output.
const TABLE_LIMIT: usize = 1024;

pub fn dual_pairing(expr: &str, p: u32, caps: &Caps) -> Result<Output> {
    let g = catalog(expr, p, caps)?;
    let ctx = PairingContext::for_scheme(&g, caps)?;
    let table = ctx.table(caps)?;
    let report = ctx.check(caps)?;
    let level = ctx.witt_level();
    let mut text = format!(
        "⟨D({}), D({})⟩: {} × {} values in Z/{}\n",
        g.name(),
        ctx.dual.name(),
        table.xs.len(),
        table.ys.len(),
        (p as u64).pow(level + 1)
    );
    if table.xs.len() * table.ys.len() <= TABLE_LIMIT {
        for (x, row) in table.xs.iter().zip(&table.values) {
            let row: Vec<String> = row.iter().map(u64::to_string).collect();
            text.push_str(&format!("{}: {}\n", g.algebra().format_elem(x), row.join(" ")));
        }
    }
    let xs: Vec<String> = table.xs.iter().map(|x| g.algebra().format_elem(x)).collect();
    let ys: Vec<String> = table.ys.iter().map(|y| ctx.dual.algebra().format_elem(y)).collect();
    Ok(Output {
        text,
        json: json!({
            "scheme": g.name(),
            "dual": ctx.dual.name(),
            "level": level,
            "xs": xs,
            "ys": ys,
            "values": table.values,
        }),
        reports: vec![report],
    })
}

pub fn lambda(p: u32, r: u32, caps: &Caps) -> Result<Output> {
    let law = lambda_poly(p, r, caps)?;
    let weights = WittLaw::weights(p, r, 2);
    let text = format!("lambda_{r} = {}", law.poly.format_weighted(&weights));
    let reduced: Vec<_> = law
        .reduce_mod_p()?
        .into_iter()
        .map(|(e, c)| json!({ "exps": e, "coeff": c }))
        .collect();
    let mut json = law.to_json();
    json["mod_p"] = json!(reduced);
    Ok(Output {
        text,
        json,
        reports: vec![dieudonne::diffops::lambda_phi_congruence(p, r, caps)?],
    })
}
