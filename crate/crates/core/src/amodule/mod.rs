//! Modules over `A = W(F_p)[F, V]/(FV − p, VF − p)`. Over `F_p` the ring is
//! commutative, and a module killed by `F^M` and `V^N` is a module over the
//! finite ring `A_{M,N} = A/(F^M, V^N)`, whose `F_p`-basis is `F^jV^i`
//! (`j < M`, `i < N`).

mod finite;
mod lattice;
mod parse;

pub use finite::*;
pub use lattice::Lattice;
pub use parse::parse_presentation;

use crate::error::{Error, Result};

/// `A_{M,N}`. An element is `Σ_δ a_δ w_δ` with `w_δ = F^δ` (δ ≥ 0) or
/// `V^{−δ}` (δ < 0) and `a_δ ∈ Z/p^{len(δ)}`, since `p·F^jV^i = F^{j+1}V^{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedA {
    pub p: u32,
    /// `F^{f_bound} = 0`
    pub f_bound: u32,
    /// `V^{v_bound} = 0`
    pub v_bound: u32,
}

pub type AElem = Vec<u64>;

impl TruncatedA {
    pub fn new(p: u32, f_bound: u32, v_bound: u32) -> Result<Self> {
        if f_bound == 0 || v_bound == 0 {
            return Err(Error::InvalidArgument("nilpotency bounds must be positive".into()));
        }
        Ok(TruncatedA { p, f_bound, v_bound })
    }

    /// Number of diagonals, `M + N − 1`.
    pub fn width(&self) -> usize {
        (self.f_bound + self.v_bound - 1) as usize
    }

    /// Diagonal slot of `δ = j − i`.
    pub fn slot(&self, delta: i64) -> Option<usize> {
        let s = delta + self.v_bound as i64 - 1;
        (0..self.width() as i64).contains(&s).then_some(s as usize)
    }

    pub fn delta(&self, slot: usize) -> i64 {
        slot as i64 - self.v_bound as i64 + 1
    }

    /// Length of the diagonal through `w_δ`.
    pub fn len(&self, slot: usize) -> u32 {
        let d = self.delta(slot);
        let j0 = d.max(0) as u32;
        let i0 = (-d).max(0) as u32;
        (self.f_bound - j0).min(self.v_bound - i0)
    }

    pub fn modulus(&self, slot: usize) -> u64 {
        (self.p as u64).pow(self.len(slot))
    }

    /// Exponent `e` with every coefficient living in `Z/p^e`.
    pub fn max_len(&self) -> u32 {
        self.f_bound.min(self.v_bound)
    }

    /// `log_p |A_{M,N}| = MN`.
    pub fn log_size(&self) -> u32 {
        self.f_bound * self.v_bound
    }

    pub fn zero(&self) -> AElem {
        vec![0; self.width()]
    }

    pub fn integer(&self, c: i64) -> AElem {
        let mut out = self.zero();
        let s = self.slot(0).unwrap();
        out[s] = c.rem_euclid(self.modulus(s) as i64) as u64;
        out
    }

    /// `c · F^j V^i`.
    pub fn word(&self, c: i64, j: u32, i: u32) -> AElem {
        let mut out = self.zero();
        let t = j.min(i);
        if let Some(s) = self.slot(j as i64 - i as i64) {
            let m = self.modulus(s);
            if t < self.len(s) {
                let pt = (self.p as u64).pow(t);
                out[s] = (c.rem_euclid(m as i64) as u64) * pt % m;
            }
        }
        out
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> AElem {
        (0..self.width()).map(|s| (a[s] + b[s]) % self.modulus(s)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> AElem {
        (0..self.width())
            .map(|s| {
                let m = self.modulus(s);
                (m - a[s] % m) % m
            })
            .collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> AElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> AElem {
        let mut out = self.zero();
        let p = self.p as u64;
        for (s, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (t, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let (d1, d2) = (self.delta(s), self.delta(t));
                // F^a V^b = p^{min(a,b)} w_{a−b}
                let k = if d1.signum() * d2.signum() < 0 { d1.abs().min(d2.abs()) } else { 0 } as u32;
                let Some(u) = self.slot(d1 + d2) else { continue };
                if k >= self.len(u) {
                    continue;
                }
                let m = self.modulus(u);
                out[u] = (out[u] + (x % m) * (y % m) % m * p.pow(k)) % m;
            }
        }
        out
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Every element, in odometer order on the diagonal coefficients.
    pub fn elements(&self) -> Vec<AElem> {
        let mut out = vec![self.zero()];
        for s in 0..self.width() {
            let m = self.modulus(s);
            out = out
                .into_iter()
                .flat_map(|x| {
                    (0..m).map(move |c| {
                        let mut y = x.clone();
                        y[s] = c;
                        y
                    })
                })
                .collect();
        }
        out
    }

    /// The monomials `F^jV^i` with `j < M`, `i < N`; together they span
    /// `A_{M,N}` over `Z`.
    pub fn monomials(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for j in 0..self.f_bound {
            for i in 0..self.v_bound {
                out.push((j, i));
            }
        }
        out
    }

    /// Human-readable form, e.g. `F-V`, `p`, `F^2`, `2*V`.
    pub fn format(&self, a: &[u64]) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        // positive powers of F first, then 1, then V
        let mut order: Vec<usize> = (0..self.width()).collect();
        order.sort_by_key(|&s| {
            let d = self.delta(s);
            (if d > 0 { 0 } else if d == 0 { 1 } else { 2 }, d.abs())
        });
        for s in order {
            let m = self.modulus(s) as i64;
            let mut c = a[s] as i64;
            if c == 0 {
                continue;
            }
            // representative in [−m/2, m/2), except that a lone leading
            // term stays positive
            if 2 * c > m || (2 * c == m && !parts.is_empty()) {
                c -= m;
            }
            let neg = c < 0;
            let mut c = c.unsigned_abs();
            let mut t = 0;
            while c % self.p as u64 == 0 {
                c /= self.p as u64;
                t += 1;
            }
            let d = self.delta(s);
            let mut factors = Vec::new();
            if c != 1 {
                factors.push(c.to_string());
            }
            match t {
                0 => {}
                1 => factors.push("p".into()),
                _ => factors.push(format!("p^{t}")),
            }
            let w = match d {
                0 => None,
                1 => Some("F".to_string()),
                -1 => Some("V".to_string()),
                d if d > 0 => Some(format!("F^{d}")),
                d => Some(format!("V^{}", -d)),
            };
            factors.extend(w);
            if factors.is_empty() {
                factors.push("1".into());
            }
            parts.push((neg, factors.join("*")));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (neg, s)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push('-'),
                (_, false) => out.push('+'),
            }
            out.push_str(s);
        }
        out
    }
}

/// A finitely presented module `A^r / (relations)` on which `F^{m+1}` and
/// `V^{n+1}` vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AModulePresentation {
    pub p: u32,
    pub m: u32,
    pub n: u32,
    pub generators: usize,
    /// each relation is an `r`-tuple of elements of `A_{m+1,n+1}`
    pub relations: Vec<Vec<AElem>>,
}

impl AModulePresentation {
    /// The ring the relations live in, `A/(F^{m+2}, V^{n+2})`: one step
    /// beyond the bounds, so that `F^{m+1}` and `V^{n+1}` can be stated.
    pub fn ring(&self) -> TruncatedA {
        TruncatedA {
            p: self.p,
            f_bound: self.m + 2,
            v_bound: self.n + 2,
        }
    }

    /// The relations of generator `k` alone, if every relation involves a
    /// single generator.
    fn per_generator(&self) -> Option<Vec<Vec<String>>> {
        let ring = self.ring();
        let mut out = vec![Vec::new(); self.generators];
        for rel in &self.relations {
            let nz: Vec<usize> = (0..self.generators).filter(|&k| !ring.is_zero(&rel[k])).collect();
            match nz.as_slice() {
                [] => {}
                [k] => out[*k].push(ring.format(&rel[*k])),
                _ => return None,
            }
        }
        Some(out)
    }

    /// `A/(F^2,V^2)`, `(A/(F,V))^2`, `A/(F,V)⊕A/(F^2,V)`, or the general
    /// `A^r/((F,0),(V,-F))` form.
    pub fn to_text(&self) -> String {
        let ring = self.ring();
        if self.generators == 0 {
            return "0".into();
        }
        if let Some(per) = self.per_generator() {
            let summands: Vec<String> = per
                .iter()
                .map(|rels| if rels.is_empty() { "A".into() } else { format!("A/({})", rels.join(",")) })
                .collect();
            if summands.iter().all(|s| s == &summands[0]) && summands.len() > 1 {
                return format!("({})^{}", summands[0], summands.len());
            }
            return summands.join("⊕");
        }
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|rel| format!("({})", rel.iter().map(|a| ring.format(a)).collect::<Vec<_>>().join(",")))
            .collect();
        format!("A^{}/({})", self.generators, rels.join(","))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ring = self.ring();
        serde_json::json!({
            "p": self.p,
            "m": self.m,
            "n": self.n,
            "generators": self.generators,
            "relations": self.relations.iter().map(|r| r.iter().map(|a| ring.format(a)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "text": self.to_text(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_arithmetic() {
        let a = TruncatedA::new(2, 2, 2).unwrap();
        let f = a.word(1, 1, 0);
        let v = a.word(1, 0, 1);
        assert_eq!(a.mul(&f, &v), a.integer(2));
        assert!(a.is_zero(&a.mul(&f, &f)));
        assert!(a.is_zero(&a.integer(4)));
        assert_eq!(a.elements().len(), 16);
        assert_eq!(a.format(&a.sub(&f, &v)), "F-V");
        assert_eq!(a.format(&a.integer(2)), "p");
        assert_eq!(a.format(&a.integer(3)), "-1");
        let b = TruncatedA::new(3, 3, 2).unwrap();
        assert_eq!(b.format(&b.word(1, 2, 0)), "F^2");
        assert_eq!(b.format(&b.word(2, 1, 0)), "2*F");
        assert_eq!(b.format(&b.word(8, 1, 0)), "-F");
        assert_eq!(b.elements().len(), 3usize.pow(6));
    }
}
