//! Sparse multivariate polynomials with exact coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Coefficient ring of a [`MultiPoly`]: `BigInt` or `BigRational`.
pub trait Coeff:
    Clone + Num + Neg<Output = Self> + FromStr + fmt::Display + fmt::Debug + PartialEq
{
}

impl Coeff for BigInt {}
impl Coeff for BigRational {}

/// Ordered variable names shared between polynomials.
pub type Vars = Arc<Vec<String>>;

pub fn vars(names: &[&str]) -> Vars {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

/// The variable block `x0..xn, y0..yn, z0..zn, ...` for the given prefixes.
pub fn witt_vars(prefixes: &[&str], n: u32) -> Vars {
    let mut v = Vec::new();
    for pre in prefixes {
        for i in 0..=n {
            v.push(format!("{pre}{i}"));
        }
    }
    Arc::new(v)
}

/// A polynomial `Σ c_e x^e` with no stored zero coefficients, iterated in
/// lexicographic order of the exponent vectors.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<C: Coeff> {
    vars: Vars,
    terms: BTreeMap<Vec<u32>, C>,
}

pub type IntPoly = MultiPoly<BigInt>;
pub type RatPoly = MultiPoly<BigRational>;

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: C) -> Self {
        Self::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, C::one())
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, C::one())
    }

    pub fn monomial(vars: &Vars, exps: Vec<u32>, c: C) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MultiPoly {
            vars: vars.clone(),
            terms,
        }
    }

    /// Sums the given terms; repeated exponent vectors are combined.
    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Self {
        let mut v: Vec<(Vec<u32>, C)> = terms.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Vec<u32>, C)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 = last.1.clone() + c,
                _ => merged.push((e, c)),
            }
        }
        MultiPoly {
            vars: vars.clone(),
            terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    fn add_term(&mut self, e: Vec<u32>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn same_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable sets"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_vars(other);
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.clone() * k.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_vars(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.vars);
        }
        let n = self.vars.len();
        let mut acc: HashMap<Vec<u32>, C> = HashMap::with_capacity((self.len() * other.len()).min(1 << 16));
        let mut buf = vec![0u32; n];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                for k in 0..n {
                    buf[k] = ea[k] + eb[k];
                }
                let c = ca.clone() * cb.clone();
                if let Some(v) = acc.get_mut(buf.as_slice()) {
                    *v = v.clone() + c;
                } else {
                    acc.insert(buf.clone(), c);
                }
            }
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share one
    /// variable set, which becomes that of the result.
    pub fn compose(&self, subs: &[MultiPoly<C>], target: &Vars) -> Self {
        assert_eq!(subs.len(), self.vars.len(), "one substitute per variable");
        let mut powers: Vec<Vec<MultiPoly<C>>> = subs.iter().map(|s| vec![Self::one(target), s.clone()]).collect();
        let mut result = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize]);
            }
            result = result.add(&term);
        }
        result
    }

    /// Moves the polynomial to a new variable set: variable `i` becomes
    /// variable `map[i]` of `target`.
    pub fn embed(&self, target: &Vars, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.vars.len());
        let mut p = Self::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                ne[map[i]] += k;
            }
            p.add_term(ne, c.clone());
        }
        p
    }

    /// Sets variable `i` to zero.
    pub fn kill_var(&self, i: usize) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[i] == 0)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Keeps the terms satisfying the predicate.
    pub fn filter_terms(&self, keep: impl Fn(&[u32], &C) -> bool) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, c)| keep(e, c))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical JSON: terms sorted lexicographically by exponent vector.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!({ "coeff": c.to_string(), "exps": e }))
            .collect();
        json!({ "vars": *self.vars, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("polynomial JSON: {m}"));
        let names: Vec<String> = v
            .get("vars")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing vars"))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("var name")))
            .collect::<Result<_>>()?;
        let vars = Arc::new(names);
        let mut p = Self::zero(&vars);
        for t in v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing terms"))?
        {
            let cs = t.get("coeff").and_then(Value::as_str).ok_or_else(|| bad("coeff"))?;
            let c = C::from_str(cs).map_err(|_| bad("coeff value"))?;
            let e: Vec<u32> = t
                .get("exps")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("exps"))?
                .iter()
                .map(|x| x.as_u64().map(|k| k as u32).ok_or_else(|| bad("exponent")))
                .collect::<Result<_>>()?;
            if e.len() != vars.len() {
                return Err(bad("exponent vector length"));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Human-readable form; terms by decreasing `Σ weights[i]·e_i`, ties
    /// broken lexicographically with heavier variables compared first.
    pub fn format_weighted(&self, weights: &[u64]) -> String {
        let mut ts: Vec<(&Vec<u32>, &C)> = self.terms.iter().collect();
        let weight = |e: &Vec<u32>| -> u64 { e.iter().zip(weights).map(|(&k, &w)| k as u64 * w).sum() };
        let mut priority: Vec<usize> = (0..self.vars.len()).collect();
        priority.sort_by_key(|&i| std::cmp::Reverse(weights[i]));
        let key = |e: &Vec<u32>| -> Vec<u32> { priority.iter().map(|&i| e[i]).collect() };
        ts.sort_by(|a, b| {
            weight(b.0)
                .cmp(&weight(a.0))
                .then_with(|| key(b.0).cmp(&key(a.0)))
        });
        if ts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in ts.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], k)
                    }
                })
                .collect();
            let mut cs = c.to_string();
            let negative = cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            let sign = match (idx, negative) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            out.push_str(sign);
            if mono.is_empty() {
                out.push_str(&cs);
            } else {
                if cs != "1" {
                    out.push_str(&cs);
                    out.push('·');
                }
                out.push_str(&mono.join("·"));
            }
        }
        out
    }

    /// Generic evaluation into any commutative ring supplied through closures.
    pub fn eval<R: Clone>(
        &self,
        values: &[R],
        one: &R,
        coeff: impl Fn(&C) -> R,
        add: impl Fn(&R, &R) -> R,
        mul: impl Fn(&R, &R) -> R,
        zero: &R,
    ) -> R {
        assert_eq!(values.len(), self.vars.len());
        let mut powers: Vec<Vec<R>> = values.iter().map(|v| vec![one.clone(), v.clone()]).collect();
        let mut acc = zero.clone();
        for (e, c) in &self.terms {
            let mut t = coeff(c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = mul(powers[i].last().unwrap(), &values[i]);
                    powers[i].push(next);
                }
                t = mul(&t, &powers[i][k as usize]);
            }
            acc = add(&acc, &t);
        }
        acc
    }
}

impl<C: Coeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = vec![1; self.vars.len()];
        f.write_str(&self.format_weighted(&w))
    }
}

impl<C: Coeff> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl IntPoly {
    /// Exact division by an integer, or `None` if some coefficient is not a
    /// multiple of it.
    pub fn div_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if !(c % d).is_zero() {
                return None;
            }
            terms.insert(e.clone(), c / d);
        }
        Some(MultiPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn to_rational(&self) -> RatPoly {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }
}

impl RatPoly {
    /// The polynomial as an integer polynomial, if all denominators are 1.
    pub fn to_integer(&self) -> Option<IntPoly> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if !c.denom().is_one() {
                return None;
            }
            terms.insert(e.clone(), c.numer().clone());
        }
        Some(MultiPoly {
            vars: self.vars.clone(),
            terms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vars {
        vars(&["x", "y"])
    }

    #[test]
    fn arithmetic_basics() {
        let v = xy();
        let x = IntPoly::var(&v, 0);
        let y = IntPoly::var(&v, 1);
        let s = x.add(&y);
        let sq = s.pow(2);
        assert_eq!(sq.coeff(&[1, 1]), BigInt::from(2));
        assert_eq!(sq.len(), 3);
        assert!(s.sub(&s).is_zero());
        assert_eq!(sq.to_string(), "x^2 + 2·x·y + y^2");
    }

    #[test]
    fn compose_and_embed() {
        let v = xy();
        let x = IntPoly::var(&v, 0);
        let y = IntPoly::var(&v, 1);
        let f = x.mul(&y).add(&x);
        let g = f.compose(&[y.clone(), x.clone()], &v);
        assert_eq!(g, y.mul(&x).add(&y));
        let w = vars(&["a", "b", "c"]);
        let h = f.embed(&w, &[2, 0]);
        assert_eq!(h.coeff(&[1, 0, 1]), BigInt::one());
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let v = xy();
        let x = RatPoly::var(&v, 0);
        let half = BigRational::new(1.into(), 2.into());
        let p = x.pow(3).scale(&half).add(&RatPoly::var(&v, 1));
        let j = p.to_json();
        assert_eq!(
            j.to_string(),
            r#"{"terms":[{"coeff":"1","exps":[0,1]},{"coeff":"1/2","exps":[3,0]}],"vars":["x","y"]}"#
        );
        let back = RatPoly::from_json(&j).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn exact_division() {
        let v = xy();
        let p = IntPoly::var(&v, 0).scale(&BigInt::from(4));
        assert!(p.div_exact(&BigInt::from(2)).is_some());
        assert!(p.div_exact(&BigInt::from(3)).is_none());
    }

    proptest::proptest! {
        #[test]
        fn ring_laws(a in proptest::collection::vec((0u32..3, 0u32..3, -5i64..5), 0..5),
                     b in proptest::collection::vec((0u32..3, 0u32..3, -5i64..5), 0..5),
                     c in proptest::collection::vec((0u32..3, 0u32..3, -5i64..5), 0..5)) {
            let v = xy();
            let mk = |t: &Vec<(u32, u32, i64)>| IntPoly::from_terms(&v, t.iter().map(|&(i, j, c)| (vec![i, j], BigInt::from(c))));
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            proptest::prop_assert_eq!(a.mul(&b), b.mul(&a));
            proptest::prop_assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            proptest::prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            proptest::prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
        }
    }
}
