use std::collections::HashMap;

use super::{finish, FiniteGroupScheme, SchemeHom};
use crate::algebra::{self, Algebra, Elem, LinearMap, TableAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{sparse_from_dense, Echelon, Lead, SparseVec};

impl FiniteGroupScheme {
    /// The closed subgroup scheme `Spec R/I` for the ideal `I` generated by
    /// `ideal_gens`, together with its inclusion into `G` (pullback: the
    /// projection `R → R/I`). The basis of `R/I` consists of the standard
    /// basis elements of `R` (those not leading any element of `I`), so the
    /// unit stays first. Fails unless `I` is a Hopf ideal.
    pub fn quotient(&self, ideal_gens: &[Elem]) -> Result<(FiniteGroupScheme, SchemeHom)> {
        let d = self.dim();
        let fp = self.fp();
        let mut span: Vec<SparseVec> = Vec::new();
        let mut ech = Echelon::new(fp, Lead::Max, false);
        for g in ideal_gens {
            if g.len() != d {
                return Err(Error::InvalidArgument("ideal generator of the wrong length".into()));
            }
            if g[0] != 0 {
                return Err(Error::InvalidArgument("ideal generator outside the augmentation ideal".into()));
            }
            if algebra::is_zero(g) {
                continue;
            }
            for b in 0..d {
                let mut prod = vec![0u32; d];
                for (a, &c) in g.iter().enumerate() {
                    if c != 0 {
                        self.alg.mul_basis_into(a, b, c, &mut prod);
                    }
                }
                let v = sparse_from_dense(&prod);
                if !v.is_empty() && ech.insert(&v) {
                    span.push(v);
                }
            }
        }
        let standard: Vec<usize> = (0..d).filter(|&i| !ech.is_pivot(i)).collect();
        let q = standard.len();
        let mut position = vec![usize::MAX; d];
        for (k, &i) in standard.iter().enumerate() {
            position[i] = k;
        }
        let reduce = |v: &SparseVec| -> SparseVec {
            ech.normal_form(v).into_iter().map(|(i, c)| (position[i], c)).collect()
        };
        let proj: Vec<SparseVec> = (0..d).map(|c| reduce(&vec![(c, 1)])).collect();

        let tensor_proj = |t: &SparseVec| -> SparseVec {
            let mut acc: HashMap<usize, u32> = HashMap::new();
            for &(s, v) in t {
                for &(i, x) in &proj[s / d] {
                    for &(j, y) in &proj[s % d] {
                        let e = acc.entry(i * q + j).or_insert(0);
                        *e = fp.add(*e, fp.mul(v, fp.mul(x, y)));
                    }
                }
            }
            finish(acc)
        };
        for v in &span {
            let dv = self.delta(&crate::linalg::sparse_to_dense(v, d));
            if !tensor_proj(&dv).is_empty() {
                return Err(Error::IllDefined(
                    "the ideal is not a Hopf ideal: the induced comultiplication is ill-defined".into(),
                ));
            }
            let sv = self.antipode.apply(&fp, &crate::linalg::sparse_to_dense(v, d));
            if !reduce(&sparse_from_dense(&sv)).is_empty() {
                return Err(Error::IllDefined("the ideal is not stable under the antipode".into()));
            }
        }

        let labels = standard.iter().map(|&i| self.alg.label(i)).collect();
        let alg = Algebra::Table(TableAlgebra::from_fn(fp.p(), q, labels, |a, b| {
            reduce(&sparse_from_dense(&self.alg.basis_product(standard[a], standard[b])))
        }));
        let delta: Vec<SparseVec> = standard.iter().map(|&c| tensor_proj(&self.delta[c])).collect();
        let columns: Vec<SparseVec> = standard
            .iter()
            .map(|&c| reduce(&self.antipode.columns[c]))
            .collect();
        let sub = FiniteGroupScheme::from_parts(
            format!("{}/I", self.name),
            alg,
            delta,
            LinearMap { cod_dim: q, columns },
        );
        let inclusion = SchemeHom {
            pullback: LinearMap { cod_dim: q, columns: proj },
        };
        Ok((sub, inclusion))
    }

    /// `ker(f)` for `f: self → target`, with its inclusion into `self`.
    pub fn kernel(&self, target: &FiniteGroupScheme, f: &SchemeHom) -> Result<(FiniteGroupScheme, SchemeHom)> {
        let d = self.dim();
        let gens: Vec<Elem> = (1..target.dim())
            .map(|c| crate::linalg::sparse_to_dense(&f.pullback.columns[c], d))
            .collect();
        let (k, inc) = self.quotient(&gens)?;
        Ok((k.renamed(format!("ker({} → {})", self.name, target.name)), inc))
    }
}
