//! Linear algebra over `F_p`: sparse column echelon forms (kernels, spans,
//! particular solutions) and small dense matrices.

use std::collections::{BTreeMap, HashMap};

use crate::numeric::PrimeField;

/// Sparse vector: `(index, value)` pairs, indices strictly increasing,
/// values nonzero.
pub type SparseVec = Vec<(usize, u32)>;

pub fn sparse_from_dense(v: &[u32]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect()
}

pub fn sparse_to_dense(v: &SparseVec, len: usize) -> Vec<u32> {
    let mut d = vec![0; len];
    for &(i, c) in v {
        d[i] = c;
    }
    d
}

/// `a + k·b`.
pub fn sparse_axpy(fp: &PrimeField, a: &SparseVec, k: u32, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            let c = fp.mul(k, b[j].1);
            if c != 0 {
                out.push((b[j].0, c));
            }
            j += 1;
        } else {
            let c = fp.add(a[i].1, fp.mul(k, b[j].1));
            if c != 0 {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Which entry of a vector acts as its pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lead {
    Min,
    Max,
}

#[derive(Debug, Clone)]
struct Pivot {
    col: SparseVec,
    comb: SparseVec,
}

/// Incremental echelon form of a set of vectors, optionally remembering
/// how every pivot vector combines the inserted ones.
#[derive(Debug, Clone)]
pub struct Echelon {
    fp: PrimeField,
    lead: Lead,
    track: bool,
    inserted: usize,
    pivots: HashMap<usize, Pivot>,
    kernel: Vec<SparseVec>,
}

impl Echelon {
    pub fn new(fp: PrimeField, lead: Lead, track: bool) -> Self {
        Echelon {
            fp,
            lead,
            track,
            inserted: 0,
            pivots: HashMap::new(),
            kernel: Vec::new(),
        }
    }

    /// Column echelon form of `cols`, tracking combinations so that kernels
    /// and particular solutions are available.
    pub fn from_columns(fp: PrimeField, cols: &[SparseVec]) -> Self {
        let mut e = Echelon::new(fp, Lead::Min, true);
        for c in cols {
            e.insert(c);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_indices(&self) -> impl Iterator<Item = &usize> {
        self.pivots.keys()
    }

    pub fn is_pivot(&self, idx: usize) -> bool {
        self.pivots.contains_key(&idx)
    }

    /// Basis of the relations among the inserted vectors (tracked mode).
    pub fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    fn leading(&self, w: &BTreeMap<usize, u32>) -> Option<(usize, u32)> {
        match self.lead {
            Lead::Min => w.iter().next().map(|(&i, &c)| (i, c)),
            Lead::Max => w.iter().next_back().map(|(&i, &c)| (i, c)),
        }
    }

    /// Reduces `v`; returns the remainder (empty iff `v` is in the span) and
    /// the combination `c` with `v - remainder = Σ c_j inserted_j`.
    fn reduce(&self, v: &SparseVec) -> (BTreeMap<usize, u32>, BTreeMap<usize, u32>) {
        let fp = &self.fp;
        let mut w: BTreeMap<usize, u32> = v.iter().copied().collect();
        let mut comb: BTreeMap<usize, u32> = BTreeMap::new();
        let mut rest: BTreeMap<usize, u32> = BTreeMap::new();
        while let Some((row, val)) = self.leading(&w) {
            match self.pivots.get(&row) {
                Some(piv) => {
                    let k = fp.neg(val);
                    for &(i, c) in &piv.col {
                        let e = w.entry(i).or_insert(0);
                        *e = fp.add(*e, fp.mul(k, c));
                        if *e == 0 {
                            w.remove(&i);
                        }
                    }
                    if self.track {
                        for &(i, c) in &piv.comb {
                            let e = comb.entry(i).or_insert(0);
                            *e = fp.sub(*e, fp.mul(k, c));
                            if *e == 0 {
                                comb.remove(&i);
                            }
                        }
                    }
                }
                None => {
                    rest.insert(row, val);
                    w.remove(&row);
                }
            }
        }
        (rest, comb)
    }

    /// Adds a vector; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (rest, comb) = self.reduce(v);
        let fp = self.fp;
        // the combination expressing v - rest; the new pivot is rest = v - that
        let mut newcomb: BTreeMap<usize, u32> = comb.iter().map(|(&i, &c)| (i, fp.neg(c))).collect();
        if self.track {
            newcomb.insert(idx, 1);
        }
        if rest.is_empty() {
            if self.track {
                self.kernel.push(newcomb.into_iter().filter(|(_, c)| *c != 0).collect());
            }
            return false;
        }
        // `rest` is only partially reduced against later pivots, which is
        // fine: its leading entry is unoccupied
        let (row, val) = match self.lead {
            Lead::Min => rest.iter().next().map(|(&i, &c)| (i, c)).unwrap(),
            Lead::Max => rest.iter().next_back().map(|(&i, &c)| (i, c)).unwrap(),
        };
        let inv = fp.inv(val).expect("nonzero");
        let col: SparseVec = rest.iter().map(|(&i, &c)| (i, fp.mul(c, inv))).collect();
        let comb: SparseVec = if self.track {
            newcomb
                .into_iter()
                .map(|(i, c)| (i, fp.mul(c, inv)))
                .filter(|(_, c)| *c != 0)
                .collect()
        } else {
            Vec::new()
        };
        self.pivots.insert(row, Pivot { col, comb });
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Coefficients `c` with `Σ c_j inserted_j = v`, if `v` is in the span
    /// (tracked mode).
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "solve needs tracked combinations");
        let (rest, comb) = self.reduce(v);
        if !rest.is_empty() {
            return None;
        }
        Some(comb.into_iter().collect())
    }

    /// The remainder of `v` after reduction: zero exactly on the span.
    pub fn normal_form(&self, v: &SparseVec) -> SparseVec {
        self.reduce(v).0.into_iter().collect()
    }
}

/// Dense matrix over `F_p`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for &(i, v) in c {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, fp: &PrimeField, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = fp.add(out.get(i, j), fp.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Row-reduces a copy; returns the reduced matrix and pivot columns.
    fn rref(&self, fp: &PrimeField) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = fp.inv(m.get(r, c)).expect("nonzero pivot");
            for j in 0..m.cols {
                let v = fp.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = fp.sub(m.get(i, j), fp.mul(f, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, fp: &PrimeField) -> usize {
        self.rref(fp).1.len()
    }

    pub fn inverse(&self, fp: &PrimeField) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (red, pivots) = aug.rref(fp);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.get(i, n + j));
            }
        }
        Some(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn kernel_and_solve() {
        let fp = f(3);
        // columns (1,1,0), (0,1,1), (1,2,1): third = first + second
        let cols = vec![
            vec![(0, 1), (1, 1)],
            vec![(1, 1), (2, 1)],
            vec![(0, 1), (1, 2), (2, 1)],
        ];
        let e = Echelon::from_columns(fp, &cols);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.kernel().len(), 1);
        let k = sparse_to_dense(&e.kernel()[0], 3);
        // k0*c0 + k1*c1 + k2*c2 = 0
        for row in 0..3 {
            let mut s = 0;
            for (j, c) in cols.iter().enumerate() {
                let v = c.iter().find(|(i, _)| *i == row).map_or(0, |x| x.1);
                s = fp.add(s, fp.mul(v, k[j]));
            }
            assert_eq!(s, 0);
        }
        let b = vec![(0, 2), (1, 1), (2, 2)];
        let x = sparse_to_dense(&e.solve(&b).unwrap(), 3);
        for row in 0..3 {
            let mut s = 0;
            for (j, c) in cols.iter().enumerate() {
                let v = c.iter().find(|(i, _)| *i == row).map_or(0, |x| x.1);
                s = fp.add(s, fp.mul(v, x[j]));
            }
            assert_eq!(s, sparse_to_dense(&b, 3)[row]);
        }
        assert!(e.solve(&vec![(0, 1)]).is_none());
    }

    #[test]
    fn dense_inverse() {
        let fp = f(5);
        let m = Matrix {
            rows: 2,
            cols: 2,
            data: vec![1, 2, 3, 4],
        };
        let inv = m.inverse(&fp).unwrap();
        assert_eq!(m.mul(&fp, &inv), Matrix::identity(2));
        let sing = Matrix {
            rows: 2,
            cols: 2,
            data: vec![1, 2, 2, 4],
        };
        assert!(sing.inverse(&fp).is_none());
        assert_eq!(sing.rank(&fp), 1);
    }

    proptest::proptest! {
        #[test]
        fn echelon_rank_matches_dense(entries in proptest::collection::vec(0u32..3, 20)) {
            let fp = f(3);
            let cols: Vec<SparseVec> = entries.chunks(4).map(sparse_from_dense).collect();
            let e = Echelon::from_columns(fp, &cols);
            let m = Matrix::from_columns(4, &cols);
            proptest::prop_assert_eq!(e.rank(), m.rank(&fp));
            proptest::prop_assert_eq!(e.rank() + e.kernel().len(), cols.len());
            let mut lmax = Echelon::new(fp, Lead::Max, false);
            for c in &cols { lmax.insert(c); }
            proptest::prop_assert_eq!(lmax.rank(), e.rank());
        }
    }
}
