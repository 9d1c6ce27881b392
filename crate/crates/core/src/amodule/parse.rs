//! `A/(F^2,V^2)`, `A/(F-V,p)`, `(A/(F,V))^2`, `A/(F,V)⊕A/(F^2,V)`.

use super::{finite::relation_lattice, AModulePresentation, TruncatedA};
use crate::error::{Error, Result};

/// `c · F^j V^i` with any `p^k` folded into `j` and `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Word {
    c: i64,
    j: u32,
    i: u32,
}

type Relation = Vec<Word>;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits at `sep` outside parentheses.
fn split_top(s: &str, seps: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut rest = s;
    'outer: while let Some(ch) = rest.chars().next() {
        if depth == 0 {
            for sep in seps {
                if let Some(r) = rest.strip_prefix(sep) {
                    out.push(std::mem::take(&mut cur));
                    rest = r;
                    continue 'outer;
                }
            }
        }
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        cur.push(ch);
        rest = &rest[ch.len_utf8()..];
    }
    out.push(cur);
    out
}

fn parse_exponent(chars: &[char], pos: &mut usize) -> Result<u32> {
    if *pos < chars.len() && chars[*pos] == '^' {
        *pos += 1;
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let digits: String = chars[start..*pos].iter().collect();
        digits.parse().map_err(|_| parse_err("expected an exponent after '^'"))
    } else {
        Ok(1)
    }
}

fn parse_relation(s: &str) -> Result<Relation> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(parse_err("empty relation"));
    }
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let mut w = Word { c: 1, j: 0, i: 0 };
        match chars[pos] {
            '+' => pos += 1,
            '-' => {
                w.c = -1;
                pos += 1;
            }
            _ if pos > 0 => return Err(parse_err(format!("expected '+' or '-' in {s:?}"))),
            _ => {}
        }
        let mut factors = 0;
        while pos < chars.len() && chars[pos] != '+' && chars[pos] != '-' {
            match chars[pos] {
                '*' | '·' if factors > 0 => pos += 1,
                d if d.is_ascii_digit() => {
                    let start = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let n: i64 = chars[start..pos]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| parse_err("integer coefficient too large"))?;
                    w.c = w.c.checked_mul(n).ok_or_else(|| parse_err("integer coefficient too large"))?;
                    factors += 1;
                }
                'F' => {
                    pos += 1;
                    w.j += parse_exponent(&chars, &mut pos)?;
                    factors += 1;
                }
                'V' => {
                    pos += 1;
                    w.i += parse_exponent(&chars, &mut pos)?;
                    factors += 1;
                }
                'p' => {
                    pos += 1;
                    let k = parse_exponent(&chars, &mut pos)?;
                    w.j += k;
                    w.i += k;
                    factors += 1;
                }
                c => return Err(parse_err(format!("unexpected {c:?} in relation {s:?}"))),
            }
        }
        if factors == 0 {
            return Err(parse_err(format!("dangling sign in {s:?}")));
        }
        out.push(w);
    }
    Ok(out)
}

/// One summand: its relations and multiplicity.
fn parse_summand(s: &str) -> Result<(Vec<Relation>, usize)> {
    let s = s.trim();
    if let Some(body) = s.strip_prefix('(') {
        // "(…)^r"
        let close = body.rfind(')').ok_or_else(|| parse_err("unbalanced parentheses"))?;
        let inner = &body[..close];
        let tail = body[close + 1..].trim();
        let r = match tail.strip_prefix('^') {
            Some(k) => k.trim().parse().map_err(|_| parse_err(format!("bad multiplicity in {s:?}")))?,
            None if tail.is_empty() => 1,
            None => return Err(parse_err(format!("trailing {tail:?}"))),
        };
        let (rels, k) = parse_summand(inner)?;
        return Ok((rels, k * r));
    }
    if s == "A" {
        return Ok((Vec::new(), 1));
    }
    let rest = s
        .strip_prefix("A/")
        .ok_or_else(|| parse_err(format!("expected A/(…) in {s:?}")))?
        .trim();
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| parse_err(format!("expected parenthesised relations in {s:?}")))?;
    let rels = split_top(inner, &[","])
        .iter()
        .map(|r| parse_relation(r))
        .collect::<Result<Vec<_>>>()?;
    Ok((rels, 1))
}

fn evaluate(ring: &TruncatedA, rel: &Relation) -> Vec<u64> {
    rel.iter()
        .fold(ring.zero(), |acc, w| ring.add(&acc, &ring.word(w.c, w.j, w.i)))
}

/// Largest nilpotency bound tried when inferring `(m, n)`.
const MAX_BOUND: u32 = 16;

/// Parses the text form. The bounds `F^{m+1} = V^{n+1} = 0` are the
/// nilpotency orders of `F` and `V` on the presented module, found as the
/// values that stay put when the truncation is enlarged.
pub fn parse_presentation(text: &str, p: u32) -> Result<AModulePresentation> {
    crate::numeric::PrimeField::new(p)?;
    let mut generators = 0;
    let mut per_slot: Vec<(usize, Relation)> = Vec::new();
    for summand in split_top(text.trim(), &["⊕", "(+)", "+"]) {
        let (rels, r) = parse_summand(&summand)?;
        for _ in 0..r {
            for rel in &rels {
                per_slot.push((generators, rel.clone()));
            }
            generators += 1;
        }
    }
    if generators == 0 {
        return Err(parse_err("no generators"));
    }
    let degree = per_slot
        .iter()
        .flat_map(|(_, rel)| rel.iter().map(|w| w.j.max(w.i)))
        .max()
        .unwrap_or(0);
    let mut bound = degree + 1;
    loop {
        if bound > MAX_BOUND || (p as f64).powi(bound as i32) > (1u64 << 31) as f64 {
            return Err(Error::InvalidArgument(format!(
                "{text}: the relations do not make F and V nilpotent"
            )));
        }
        let ring = TruncatedA::new(p, bound, bound)?;
        let relations = tuples(&ring, generators, &per_slot);
        let lattice = relation_lattice(&ring, generators, &relations);
        let f = nilpotency(&ring, generators, &lattice, |j| ring.word(1, j, 0));
        let v = nilpotency(&ring, generators, &lattice, |i| ring.word(1, 0, i));
        if f < bound && v < bound {
            // one step beyond the bounds, so F^{m+1} and V^{n+1} stay visible
            let ring = TruncatedA::new(p, f.max(1) + 1, v.max(1) + 1)?;
            let relations = tuples(&ring, generators, &per_slot)
                .into_iter()
                .filter(|rel| rel.iter().any(|a| !ring.is_zero(a)))
                .collect();
            return Ok(AModulePresentation {
                p,
                m: ring.f_bound - 2,
                n: ring.v_bound - 2,
                generators,
                relations,
            });
        }
        bound *= 2;
    }
}

fn tuples(ring: &TruncatedA, r: usize, per_slot: &[(usize, Relation)]) -> Vec<Vec<Vec<u64>>> {
    per_slot
        .iter()
        .map(|(k, rel)| {
            let mut t = vec![ring.zero(); r];
            t[*k] = evaluate(ring, rel);
            t
        })
        .collect()
}

/// Smallest `a` with `w(a)·e_k` in the relation lattice for every `k`.
fn nilpotency(
    ring: &TruncatedA,
    r: usize,
    lattice: &super::Lattice,
    word: impl Fn(u32) -> Vec<u64>,
) -> u32 {
    let bound = ring.f_bound.max(ring.v_bound);
    (0..=bound)
        .find(|&a| {
            (0..r).all(|k| {
                let mut t = vec![ring.zero(); r];
                t[k] = word(a);
                lattice.contains(&super::finite::flatten(&t))
            })
        })
        .unwrap_or(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_inferred() {
        let m = parse_presentation("A/(F^2,V^2)", 2).unwrap();
        assert_eq!((m.m, m.n, m.generators), (1, 1, 1));
        let e = parse_presentation("A/(F-V,p)", 2).unwrap();
        assert_eq!((e.m, e.n), (1, 1));
        let a = parse_presentation("(A/(F,V))^2", 3).unwrap();
        assert_eq!((a.m, a.n, a.generators), (0, 0, 2));
        let mixed = parse_presentation("A/(F^2,V) ⊕ A/(F,V^2)", 2).unwrap();
        assert_eq!((mixed.m, mixed.n, mixed.generators), (1, 1, 2));
    }

    #[test]
    fn text_round_trip() {
        for s in ["A/(F^2,V^2)", "A/(F-V,p)", "(A/(F,V))^2", "A/(F^3,V)"] {
            let m = parse_presentation(s, 2).unwrap();
            assert_eq!(m.to_text(), s);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_presentation("A/(F)", 2).is_err());
        assert!(parse_presentation("A/(F,V", 2).is_err());
        assert!(parse_presentation("B/(F,V)", 2).is_err());
        assert!(parse_presentation("A/(F,V)", 4).is_err());
    }
}
