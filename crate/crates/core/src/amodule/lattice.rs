//! Subgroups of `(Z/p^e)^d` in Howell form: exact membership, order, and
//! canonical coset representatives.

/// Valuation and unit part of `a ≠ 0` modulo `p^e`.
fn split(p: u64, mut a: u64) -> (u32, u64) {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    (v, a)
}

fn inv_mod(a: u64, m: u64) -> u64 {
    // extended Euclid on i128 keeps the signs simple
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(m as i128) as u64
}

#[derive(Debug, Clone)]
pub struct Lattice {
    p: u64,
    e: u32,
    modulus: u64,
    dim: usize,
    /// pivot rows, keyed by pivot column, pivot entry `p^v`
    rows: Vec<Option<(u32, Vec<u64>)>>,
}

impl Lattice {
    pub fn new(p: u32, e: u32, dim: usize) -> Self {
        Lattice {
            p: p as u64,
            e,
            modulus: (p as u64).pow(e),
            dim,
            rows: vec![None; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn axpy(&self, x: &mut [u64], c: u64, y: &[u64], from: usize) {
        let m = self.modulus;
        for i in from..self.dim {
            x[i] = (x[i] + (m - c % m) % m * y[i] % m) % m;
        }
    }

    /// Adds `v` to the generators; returns whether the subgroup grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let mut pending = vec![v.iter().map(|&a| a % self.modulus).collect::<Vec<u64>>()];
        let mut grew = false;
        while let Some(mut x) = pending.pop() {
            let mut c = 0;
            loop {
                while c < self.dim && x[c] == 0 {
                    c += 1;
                }
                if c == self.dim {
                    break;
                }
                let (v, u) = split(self.p, x[c]);
                match &self.rows[c] {
                    Some((pv, row)) if *pv <= v => {
                        let q = x[c] / self.p.pow(*pv);
                        let row = row.clone();
                        self.axpy(&mut x, q, &row, c);
                    }
                    _ => {
                        // x becomes the pivot (normalised to p^v); the old
                        // pivot row, if any, is reduced against it later
                        let ui = inv_mod(u, self.modulus);
                        let row: Vec<u64> = x.iter().map(|&a| a * ui % self.modulus).collect();
                        if let Some((_, old)) = self.rows[c].take() {
                            pending.push(old);
                        }
                        // Howell closure: p^{e−v}·row has a zero at c
                        let k = self.p.pow(self.e - v);
                        let shifted: Vec<u64> = row.iter().map(|&a| a * k % self.modulus).collect();
                        if shifted.iter().any(|&a| a != 0) {
                            pending.push(shifted);
                        }
                        self.rows[c] = Some((v, row));
                        grew = true;
                        break;
                    }
                }
            }
        }
        grew
    }

    /// The canonical representative of `v + L`: each pivot entry reduced
    /// below its pivot `p^v`.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut x: Vec<u64> = v.iter().map(|&a| a % self.modulus).collect();
        for c in 0..self.dim {
            if let Some((pv, row)) = &self.rows[c] {
                let q = x[c] / self.p.pow(*pv);
                if q != 0 {
                    self.axpy(&mut x, q, row, c);
                }
            }
        }
        x
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&a| a == 0)
    }

    /// `log_p |L|`.
    pub fn log_order(&self) -> u32 {
        self.rows
            .iter()
            .map(|r| r.as_ref().map_or(0, |(v, _)| self.e - v))
            .sum()
    }

    /// `log_p` of the index of `L` in `(Z/p^e)^d`.
    pub fn log_index(&self) -> u32 {
        self.e * self.dim as u32 - self.log_order()
    }

    /// Per coordinate, the range of the canonical representatives.
    pub fn residue_bounds(&self) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| r.as_ref().map_or(self.modulus, |(v, _)| self.p.pow(*v)))
            .collect()
    }

    /// All canonical representatives of `(Z/p^e)^d / L` in odometer order.
    pub fn representatives(&self) -> Vec<Vec<u64>> {
        let bounds = self.residue_bounds();
        let mut out = Vec::new();
        let mut x = vec![0u64; self.dim];
        loop {
            out.push(x.clone());
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                x[i] += 1;
                if x[i] < bounds[i] {
                    break;
                }
                x[i] = 0;
            }
        }
    }

    /// All elements of `L`.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let pivots: Vec<(u64, &Vec<u64>)> = self
            .rows
            .iter()
            .flatten()
            .map(|(v, row)| (self.p.pow(self.e - v), row))
            .collect();
        let mut out = vec![vec![0u64; self.dim]];
        for (order, row) in pivots {
            let mut next = Vec::with_capacity(out.len() * order as usize);
            for x in &out {
                let mut y = x.clone();
                for _ in 0..order {
                    next.push(y.clone());
                    self.axpy(&mut y, self.modulus - 1, row, 0);
                }
            }
            out = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_subgroups_of_z4() {
        let mut l = Lattice::new(2, 2, 2);
        assert!(l.insert(&[2, 1]));
        // ⟨(2,1)⟩ = {0, (2,1), (0,2), (2,3)}
        assert_eq!(l.log_order(), 2);
        assert!(l.contains(&[0, 2]));
        assert!(!l.contains(&[2, 0]));
        assert!(!l.insert(&[2, 3]));
        assert_eq!(l.elements().len(), 4);
        assert_eq!(l.representatives().len(), 4);
    }

    #[test]
    fn representatives_are_distinct_cosets() {
        let mut l = Lattice::new(3, 2, 3);
        l.insert(&[3, 1, 0]);
        l.insert(&[0, 3, 6]);
        let reps = l.representatives();
        assert_eq!(reps.len() as u32, 3u32.pow(l.log_index()));
        for r in &reps {
            assert_eq!(&l.reduce(r), r);
        }
        let elems = l.elements();
        assert_eq!(elems.len() as u32, 3u32.pow(l.log_order()));
        for x in &elems {
            assert!(l.contains(x));
        }
    }
}
