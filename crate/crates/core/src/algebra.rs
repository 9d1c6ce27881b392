//! Finite-dimensional commutative `F_p`-algebras: truncated polynomial
//! algebras `F_p[y_1..y_r]/(y_i^{p^{e_i}})` in their monomial basis, and
//! algebras given by structure constants on an abstract basis.
//!
//! Elements are dense coordinate vectors (`Vec<u32>`). Basis element `0` is
//! always the unit.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::numeric::PrimeField;

pub type Elem = Vec<u32>;

/// `F_p[y_1..y_r]/(y_i^{b_i})`. Monomials are indexed in mixed radix with the
/// first variable most significant, so index order is lexicographic order on
/// exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedAlgebra {
    p: u32,
    names: Vec<String>,
    bounds: Vec<u32>,
    strides: Vec<usize>,
    dim: usize,
}

impl TruncatedAlgebra {
    pub fn new(p: u32, names: Vec<String>, bounds: Vec<u32>, dim_cap: usize) -> Result<Self> {
        PrimeField::new(p)?;
        if names.len() != bounds.len() {
            return Err(Error::InvalidArgument("one bound per variable".into()));
        }
        for &b in &bounds {
            let mut q = b;
            while q > 1 && q % p == 0 {
                q /= p;
            }
            if b < 1 || q != 1 {
                return Err(Error::InvalidArgument(format!("bound {b} is not a power of {p}")));
            }
        }
        let mut dim: u64 = 1;
        for &b in &bounds {
            dim = dim.saturating_mul(b as u64);
        }
        if dim > dim_cap as u64 {
            return Err(Error::cap("algebra dimension", dim, dim_cap as u64));
        }
        let mut strides = vec![1usize; bounds.len()];
        for i in (0..bounds.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * bounds[i + 1] as usize;
        }
        Ok(TruncatedAlgebra {
            p,
            names,
            bounds,
            strides,
            dim: dim as usize,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.bounds.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn exps(&self, idx: usize) -> Vec<u32> {
        self.bounds
            .iter()
            .zip(&self.strides)
            .map(|(&b, &s)| ((idx / s) % b as usize) as u32)
            .collect()
    }

    pub fn index(&self, e: &[u32]) -> Option<usize> {
        let mut idx = 0;
        for (i, &k) in e.iter().enumerate() {
            if k >= self.bounds[i] {
                return None;
            }
            idx += k as usize * self.strides[i];
        }
        Some(idx)
    }

    /// Index of `y_i^k`, if nonzero.
    pub fn power_index(&self, i: usize, k: u32) -> Option<usize> {
        (k < self.bounds[i]).then(|| k as usize * self.strides[i])
    }

    /// Index of the product of two monomials, or `None` if it vanishes.
    #[inline]
    pub fn mul_index(&self, a: usize, b: usize) -> Option<usize> {
        for (i, &s) in self.strides.iter().enumerate() {
            let bd = self.bounds[i] as usize;
            if (a / s) % bd + (b / s) % bd >= bd {
                return None;
            }
        }
        Some(a + b)
    }

    /// Concatenates the variables; the basis of the result is the pairs
    /// `(a, b)` at index `a · dim(other) + b`.
    pub fn tensor(&self, other: &TruncatedAlgebra, dim_cap: usize) -> Result<TruncatedAlgebra> {
        if self.p != other.p {
            return Err(Error::FieldMismatch(format!("F_{} vs F_{}", self.p, other.p)));
        }
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let mut bounds = self.bounds.clone();
        bounds.extend_from_slice(&other.bounds);
        TruncatedAlgebra::new(self.p, names, bounds, dim_cap)
    }

    /// `Σ e_i w_i`; for the algebra of `W_{n,m}` with `w_i = p^i` this is the
    /// grading `i_0 + p i_1 + … + p^n i_n`.
    pub fn weighted_degree(&self, idx: usize, weights: &[u64]) -> u64 {
        self.exps(idx)
            .iter()
            .zip(weights)
            .map(|(&k, &w)| k as u64 * w)
            .sum()
    }

    /// Basis monomials of weighted degree exactly `d`.
    pub fn graded_component(&self, d: u64, weights: &[u64]) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.weighted_degree(i, weights) == d)
            .collect()
    }

    pub fn monomial_name(&self, idx: usize) -> String {
        let parts: Vec<String> = self
            .exps(idx)
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| {
                if k == 1 {
                    self.names[i].clone()
                } else {
                    format!("{}^{}", self.names[i], k)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("·")
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "p": self.p, "ext_deg": 1, "vars": self.names, "bounds": self.bounds })
    }
}

/// An algebra on an abstract basis with explicit structure constants,
/// stored in compressed rows: the product `e_a e_b` is
/// `entries[offsets[a·dim+b] .. offsets[a·dim+b+1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableAlgebra {
    p: u32,
    dim: usize,
    offsets: Vec<u32>,
    entries: Vec<(u32, u32)>,
    labels: Vec<String>,
}

impl TableAlgebra {
    /// Builds the table from a product function on basis pairs.
    pub fn from_fn(
        p: u32,
        dim: usize,
        labels: Vec<String>,
        mut product: impl FnMut(usize, usize) -> SparseVec,
    ) -> Self {
        let mut offsets = Vec::with_capacity(dim * dim + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for a in 0..dim {
            for b in 0..dim {
                for (c, v) in product(a, b) {
                    entries.push((c as u32, v));
                }
                offsets.push(entries.len() as u32);
            }
        }
        TableAlgebra {
            p,
            dim,
            offsets,
            entries,
            labels,
        }
    }

    #[inline]
    pub fn product(&self, a: usize, b: usize) -> &[(u32, u32)] {
        let k = a * self.dim + b;
        &self.entries[self.offsets[k] as usize..self.offsets[k + 1] as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algebra {
    Truncated(TruncatedAlgebra),
    Table(TableAlgebra),
}

impl Algebra {
    pub fn p(&self) -> u32 {
        match self {
            Algebra::Truncated(t) => t.p,
            Algebra::Table(t) => t.p,
        }
    }

    pub fn fp(&self) -> PrimeField {
        PrimeField::unchecked(self.p())
    }

    pub fn dim(&self) -> usize {
        match self {
            Algebra::Truncated(t) => t.dim,
            Algebra::Table(t) => t.dim,
        }
    }

    pub fn as_truncated(&self) -> Option<&TruncatedAlgebra> {
        match self {
            Algebra::Truncated(t) => Some(t),
            Algebra::Table(_) => None,
        }
    }

    pub fn label(&self, idx: usize) -> String {
        match self {
            Algebra::Truncated(t) => t.monomial_name(idx),
            Algebra::Table(t) => t.labels[idx].clone(),
        }
    }

    /// `out += coef · e_a e_b`.
    #[inline]
    pub fn mul_basis_into(&self, a: usize, b: usize, coef: u32, out: &mut [u32]) {
        let fp = self.fp();
        match self {
            Algebra::Truncated(t) => {
                if let Some(c) = t.mul_index(a, b) {
                    out[c] = fp.add(out[c], coef);
                }
            }
            Algebra::Table(t) => {
                for &(c, v) in t.product(a, b) {
                    out[c as usize] = fp.add(out[c as usize], fp.mul(coef, v));
                }
            }
        }
    }

    pub fn basis_product(&self, a: usize, b: usize) -> Elem {
        let mut out = vec![0; self.dim()];
        self.mul_basis_into(a, b, 1, &mut out);
        out
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Elem {
        let fp = self.fp();
        let mut out = vec![0; self.dim()];
        let ys: Vec<(usize, u32)> = y.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect();
        for (a, &ca) in x.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for &(b, cb) in &ys {
                self.mul_basis_into(a, b, fp.mul(ca, cb), &mut out);
            }
        }
        out
    }

    pub fn one(&self) -> Elem {
        basis_vec(self.dim(), 0)
    }

    pub fn pow(&self, x: &[u32], mut e: u64) -> Elem {
        let mut base = x.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn format_elem(&self, x: &[u32]) -> String {
        let parts: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let l = self.label(i);
                match (c, l.as_str()) {
                    (_, "1") => c.to_string(),
                    (1, _) => l,
                    _ => format!("{c}·{l}"),
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn elem_to_json(&self, x: &[u32]) -> Value {
        match self {
            Algebra::Truncated(t) => {
                let terms: Vec<Value> = x
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| json!({ "coeff": c.to_string(), "exps": t.exps(i) }))
                    .collect();
                json!({ "vars": t.names, "terms": terms })
            }
            Algebra::Table(t) => {
                let terms: Vec<Value> = x
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| json!({ "coeff": c.to_string(), "basis": t.labels[i] }))
                    .collect();
                json!({ "terms": terms })
            }
        }
    }
}

pub fn basis_vec(dim: usize, i: usize) -> Elem {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

pub fn is_zero(x: &[u32]) -> bool {
    x.iter().all(|&c| c == 0)
}

pub fn add(fp: &PrimeField, x: &[u32], y: &[u32]) -> Elem {
    x.iter().zip(y).map(|(&a, &b)| fp.add(a, b)).collect()
}

pub fn sub(fp: &PrimeField, x: &[u32], y: &[u32]) -> Elem {
    x.iter().zip(y).map(|(&a, &b)| fp.sub(a, b)).collect()
}

pub fn scale(fp: &PrimeField, c: u32, x: &[u32]) -> Elem {
    x.iter().map(|&a| fp.mul(c, a)).collect()
}

/// `x += c·y`.
pub fn axpy(fp: &PrimeField, x: &mut [u32], c: u32, y: &[u32]) {
    if c == 0 {
        return;
    }
    for (a, &b) in x.iter_mut().zip(y) {
        if b != 0 {
            *a = fp.add(*a, fp.mul(c, b));
        }
    }
}

/// A linear map between coordinate spaces, stored by the images of the
/// basis vectors of its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub cod_dim: usize,
    pub columns: Vec<SparseVec>,
}

impl LinearMap {
    pub fn identity(dim: usize) -> Self {
        LinearMap {
            cod_dim: dim,
            columns: (0..dim).map(|i| vec![(i, 1)]).collect(),
        }
    }

    pub fn dom_dim(&self) -> usize {
        self.columns.len()
    }

    pub fn apply(&self, fp: &PrimeField, x: &[u32]) -> Elem {
        let mut out = vec![0; self.cod_dim];
        for (j, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(i, v) in &self.columns[j] {
                out[i] = fp.add(out[i], fp.mul(c, v));
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, fp: &PrimeField, other: &LinearMap) -> LinearMap {
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let dense = crate::linalg::sparse_to_dense(col, self.dom_dim());
                crate::linalg::sparse_from_dense(&self.apply(fp, &dense))
            })
            .collect();
        LinearMap {
            cod_dim: self.cod_dim,
            columns,
        }
    }

    pub fn to_matrix(&self) -> crate::linalg::Matrix {
        crate::linalg::Matrix::from_columns(self.cod_dim, &self.columns)
    }

    pub fn is_bijective(&self, fp: &PrimeField) -> bool {
        self.cod_dim == self.dom_dim() && self.to_matrix().rank(fp) == self.cod_dim
    }
}

/// The algebra homomorphism out of a truncated algebra determined by the
/// images of its variables; each image must satisfy `image^{bound} = 0`.
pub fn hom_from_images(dom: &TruncatedAlgebra, cod: &Algebra, images: &[Elem]) -> Result<LinearMap> {
    if images.len() != dom.nvars() {
        return Err(Error::InvalidArgument(format!(
            "{} images for {} variables",
            images.len(),
            dom.nvars()
        )));
    }
    let mut powers: Vec<Vec<Elem>> = Vec::with_capacity(images.len());
    for (i, img) in images.iter().enumerate() {
        let b = dom.bounds()[i];
        let mut pw = vec![cod.one()];
        for _ in 1..=b {
            let next = cod.mul(pw.last().unwrap(), img);
            pw.push(next);
        }
        if !is_zero(&pw[b as usize]) {
            return Err(Error::IllDefined(format!(
                "image of {} does not satisfy {}^{} = 0",
                dom.names()[i],
                dom.names()[i],
                b
            )));
        }
        pw.pop();
        powers.push(pw);
    }
    let columns = (0..dom.dim())
        .map(|idx| {
            let e = dom.exps(idx);
            let mut acc = cod.one();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    acc = cod.mul(&acc, &powers[i][k as usize]);
                }
            }
            crate::linalg::sparse_from_dense(&acc)
        })
        .collect();
    Ok(LinearMap {
        cod_dim: cod.dim(),
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(p: u32, bounds: &[u32]) -> TruncatedAlgebra {
        let names = (0..bounds.len()).map(|i| format!("x{i}")).collect();
        TruncatedAlgebra::new(p, names, bounds.to_vec(), 4096).unwrap()
    }

    #[test]
    fn truncation_and_units() {
        let a = Algebra::Truncated(alg(2, &[4, 4]));
        let t = a.as_truncated().unwrap();
        let x0sq = basis_vec(16, t.index(&[2, 0]).unwrap());
        assert!(is_zero(&a.mul(&x0sq, &x0sq)));
        assert_eq!(a.mul(&x0sq, &a.one()), x0sq);
        let x0 = basis_vec(16, t.index(&[1, 0]).unwrap());
        let x1 = basis_vec(16, t.index(&[0, 1]).unwrap());
        let s = add(&a.fp(), &x0, &x1);
        let sq = a.mul(&s, &s);
        let expect = add(&a.fp(), &a.mul(&x0, &x0), &a.mul(&x1, &x1));
        assert_eq!(sq, expect);
    }

    #[test]
    fn tensor_dimension_and_order() {
        let a = alg(2, &[2, 2]);
        let t = a.tensor(&a, 4096).unwrap();
        assert_eq!(t.dim(), 16);
        // index a*dim+b convention
        assert_eq!(t.index(&[1, 0, 0, 1]).unwrap(), a.index(&[1, 0]).unwrap() * 4 + a.index(&[0, 1]).unwrap());
        assert!(TruncatedAlgebra::new(2, vec!["x".into()], vec![3], 10).is_err());
        assert!(TruncatedAlgebra::new(2, vec!["x".into(); 13], vec![2; 13], 4096).unwrap_err().is_cap());
    }

    #[test]
    fn weighted_degrees() {
        let a = alg(2, &[4, 4]);
        let w = [1, 2];
        assert_eq!(a.weighted_degree(a.index(&[1, 2]).unwrap(), &w), 5);
        assert_eq!(a.weighted_degree(0, &w), 0);
        let top = a.index(&[3, 3]).unwrap();
        // (p^{n+1}-1)(p^{m+1}-1)/(p-1) with p=2, n=m=1
        assert_eq!(a.weighted_degree(top, &w), 9);
        for (i, j) in [(1usize, 2usize), (3, 5), (4, 6)] {
            let prod = a.mul_index(i, j);
            if let Some(k) = prod {
                assert_eq!(a.weighted_degree(k, &w), a.weighted_degree(i, &w) + a.weighted_degree(j, &w));
            }
        }
    }

    #[test]
    fn hom_nilpotency_check() {
        let dom = alg(2, &[2]);
        let cod = Algebra::Truncated(alg(2, &[4]));
        let t = cod.as_truncated().unwrap();
        let img = basis_vec(4, t.index(&[2]).unwrap());
        assert!(hom_from_images(&dom, &cod, &[img]).is_ok());
        let dom4 = alg(2, &[4]);
        let cod2 = Algebra::Truncated(alg(2, &[2]));
        assert!(hom_from_images(&dom4, &cod2, &[basis_vec(2, 1)]).is_ok());
        let x = basis_vec(4, 1);
        assert!(hom_from_images(&dom, &cod, &[x]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn ring_axioms_random(bounds_idx in 0usize..4, seed in proptest::collection::vec(0u32..3, 27 * 3)) {
            let shapes: [&[u32]; 4] = [&[3, 3, 3], &[9, 3], &[27], &[3, 9]];
            let a = Algebra::Truncated(alg(3, shapes[bounds_idx]));
            let fp = a.fp();
            let x = seed[0..27].to_vec();
            let y = seed[27..54].to_vec();
            let z = seed[54..81].to_vec();
            proptest::prop_assert_eq!(a.mul(&x, &y), a.mul(&y, &x));
            proptest::prop_assert_eq!(a.mul(&x, &a.mul(&y, &z)), a.mul(&a.mul(&x, &y), &z));
            proptest::prop_assert_eq!(a.mul(&x, &add(&fp, &y, &z)), add(&fp, &a.mul(&x, &y), &a.mul(&x, &z)));
        }
    }
}
