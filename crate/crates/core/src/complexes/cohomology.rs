//! Cohomology over the ring (with torsion), over the residue field and over
//! the fraction field, with induced maps.

use crate::arith::{FfElem, Field, FiniteField};
use crate::linalg::gauss::{kernel, pivot_columns, solve_matrix};
use crate::linalg::{smith_normal_form, Dvr, Matrix};

use super::complex::{ChainMap, PerfectComplex};

/// H^i = ⊕ A/p^{e_j} ⊕ A^{r}, generators ordered torsion-ascending then free.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeCohomology<E> {
    pub degree: i64,
    pub free_rank: usize,
    pub torsion: Vec<u32>,
    /// Columns in L^i lying in ker d^{i+1}.
    pub generators: Matrix<E>,
    /// Row j gives the j-th generator coordinate of a cycle.
    pub coords: Matrix<E>,
    /// Matrix of an induced endomorphism on the generators; torsion rows are
    /// meaningful modulo the corresponding p^{e}.
    pub induced: Option<Matrix<E>>,
}

impl<E: Clone + PartialEq> DegreeCohomology<E> {
    pub fn num_generators(&self) -> usize {
        self.torsion.len() + self.free_rank
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyPresentation<E> {
    pub degrees: Vec<DegreeCohomology<E>>,
}

impl<E: Clone + PartialEq> CohomologyPresentation<E> {
    pub fn get(&self, i: i64) -> Option<&DegreeCohomology<E>> {
        self.degrees.iter().find(|h| h.degree == i)
    }

    pub fn has_torsion(&self) -> bool {
        self.degrees.iter().any(|h| !h.torsion.is_empty())
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(|h| h.num_generators() == 0)
    }
}

pub fn integral_cohomology<D: Dvr>(l: &PerfectComplex<D>) -> CohomologyPresentation<D::Elem> {
    let r = l.ring();
    let degrees = l
        .degrees()
        .map(|i| {
            let n = l.rank(i);
            let snf = smith_normal_form(r, &l.diff(i));
            let k = snf.rank();
            let rest = snf.u.submatrix(0..n, k..n);
            let w = l.diff(i + 1).mul(r, &rest);
            let snf2 = smith_normal_form(r, &w);
            let k2 = snf2.rank();
            let ker = snf2.v_inv.submatrix(0..n - k, k2..n - k);
            let free_gens = rest.mul(r, &ker);
            let free_coords = snf2.v.submatrix(k2..n - k, 0..n - k).mul(r, &snf.u_inv.submatrix(k..n, 0..n));

            let tors: Vec<usize> = (0..k).filter(|&j| snf.exponents[j] > 0).collect();
            let torsion = tors.iter().map(|&j| snf.exponents[j]).collect();
            let generators = snf.u.select_cols(&tors).hstack(&free_gens);
            let coords = snf.u_inv.select_rows(&tors).vstack(&free_coords);
            DegreeCohomology { degree: i, free_rank: n - k - k2, torsion, generators, coords, induced: None }
        })
        .collect();
    CohomologyPresentation { degrees }
}

/// Fill the induced-map slots with the action of γ on generators.
pub fn induced_on_cohomology<D: Dvr>(gamma: &ChainMap<D>, h: &mut CohomologyPresentation<D::Elem>) {
    let r = gamma.ring();
    for deg in &mut h.degrees {
        let img = gamma.component(deg.degree).mul(r, &deg.generators);
        deg.induced = Some(deg.coords.mul(r, &img));
    }
}

/// Whether two induced matrices agree as endomorphisms of H^i: free rows
/// exactly, torsion rows modulo p^{e}.
pub fn same_induced_map<D: Dvr>(d: &D, h: &DegreeCohomology<D::Elem>, a: &Matrix<D::Elem>, b: &Matrix<D::Elem>) -> bool {
    let diff = a.sub(d, b);
    (0..diff.rows()).all(|row| {
        let bound = h.torsion.get(row).map(|&e| e as i64);
        diff.row(row).iter().all(|x| match (d.valuation(x), bound) {
            (None, _) => true,
            (Some(v), Some(e)) => v >= e,
            (Some(_), None) => false,
        })
    })
}

/// H^i over a field: dimension, representative cycles, induced map.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldCohomology<E> {
    pub degree: i64,
    pub dim: usize,
    pub reps: Matrix<E>,
    pub induced: Option<Matrix<E>>,
}

/// Cohomology of a complex of vector spaces given by its differentials;
/// `gamma` supplies endomorphism components when present.
pub fn field_cohomology<F: Field>(
    f: &F,
    degrees: std::ops::RangeInclusive<i64>,
    rank: impl Fn(i64) -> usize,
    diff: impl Fn(i64) -> Matrix<F::Elem>,
    gamma: Option<&dyn Fn(i64) -> Matrix<F::Elem>>,
) -> Vec<FieldCohomology<F::Elem>> {
    degrees
        .map(|i| {
            let n = rank(i);
            let d_in = diff(i);
            let b_cols = d_in.select_cols(&pivot_columns(f, &d_in));
            let z = kernel(f, &diff(i + 1));
            let z_cols = Matrix::from_cols(&z, n);
            let both = b_cols.hstack(&z_cols);
            let nb = b_cols.cols();
            let reps_idx: Vec<usize> = pivot_columns(f, &both).into_iter().filter(|&c| c >= nb).collect();
            let reps = both.select_cols(&reps_idx);
            let induced = gamma.map(|g| {
                let img = g(i).mul(f, &reps);
                let sol = solve_matrix(f, &b_cols.hstack(&reps), &img).expect("γ maps cycles to cycles");
                sol.submatrix(nb..nb + reps.cols(), 0..reps.cols())
            });
            FieldCohomology { degree: i, dim: reps.cols(), reps, induced }
        })
        .collect()
}

/// H^i(L ⊗ k) with induced maps over the ring's residue field.
pub fn residue_cohomology<D: Dvr>(l: &PerfectComplex<D>, gamma: Option<&ChainMap<D>>) -> (FiniteField, Vec<FieldCohomology<FfElem>>) {
    let r = l.ring();
    let k = r.residue_field().clone();
    let red = |m: Matrix<D::Elem>| m.map(|x| r.residue(x));
    let g = gamma.map(|g| move |i: i64| red(g.component(i)));
    let gref: Option<&dyn Fn(i64) -> Matrix<FfElem>> = g.as_ref().map(|c| c as &dyn Fn(i64) -> Matrix<FfElem>);
    let out = field_cohomology(&k, l.degrees(), |i| l.rank(i), |i| red(l.diff(i)), gref);
    (k, out)
}

/// H^i(L) ⊗ K with induced maps over the fraction field.
pub fn rational_cohomology<D: Dvr>(l: &PerfectComplex<D>, gamma: Option<&ChainMap<D>>) -> Vec<FieldCohomology<D::Elem>> {
    let g = gamma.map(|g| move |i: i64| g.component(i));
    let gref: Option<&dyn Fn(i64) -> Matrix<D::Elem>> = g.as_ref().map(|c| c as &dyn Fn(i64) -> Matrix<D::Elem>);
    field_cohomology(l.ring(), l.degrees(), |i| l.rank(i), |i| l.diff(i), gref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ScalarContext;
    use std::sync::Arc;

    fn e1(p: u64) -> PerfectComplex<ScalarContext> {
        let c = ScalarContext::new(p).unwrap();
        let d = Matrix::from_rows(vec![vec![c.from_int(p as i64)]], 1).unwrap();
        PerfectComplex::new(c, 0, vec![1, 1], vec![d]).unwrap()
    }

    #[test]
    fn e1_cohomology() {
        let l = e1(5);
        let h = integral_cohomology(&l);
        assert_eq!(h.get(0).unwrap().num_generators(), 0);
        assert_eq!(h.get(1).unwrap().torsion, vec![1]);
        assert_eq!(h.get(1).unwrap().free_rank, 0);
        let (_, res) = residue_cohomology(&l, None);
        assert_eq!(res.iter().map(|x| x.dim).collect::<Vec<_>>(), vec![1, 1]);
        let rat = rational_cohomology(&l, None);
        assert_eq!(rat.iter().map(|x| x.dim).collect::<Vec<_>>(), vec![0, 0]);
    }

    #[test]
    fn e1_induced_by_two() {
        let l = Arc::new(e1(7));
        let c = l.ring().clone();
        let g = ChainMap::scalar(&l, &c.from_int(2));
        let mut h = integral_cohomology(&l);
        induced_on_cohomology(&g, &mut h);
        let ind = h.get(1).unwrap().induced.clone().unwrap();
        assert_eq!(c.reduce_mod_power(ind.get(0, 0), 1), 2.into());
        let (k, res) = residue_cohomology(&l, Some(&ChainMap::identity(&l)));
        assert_eq!(res[0].induced, Some(Matrix::identity(&k, 1)));
    }

    #[test]
    fn free_and_acyclic() {
        let c = ScalarContext::new(3).unwrap();
        let id = Matrix::identity(&c, 1);
        let l = PerfectComplex::new(c.clone(), 0, vec![1, 1], vec![id]).unwrap();
        assert!(integral_cohomology(&l).is_zero());
        let z = Matrix::zeros(&c, 3, 2);
        let l = PerfectComplex::new(c.clone(), 0, vec![2, 3], vec![z]).unwrap();
        let h = integral_cohomology(&l);
        assert_eq!((h.degrees[0].free_rank, h.degrees[1].free_rank), (2, 3));
        let g = Matrix::from_rows(vec![vec![c.from_int(2), c.zero()], vec![c.zero(), c.from_int(4)]], 2).unwrap();
        let l = Arc::new(PerfectComplex::concentrated(c.clone(), 0, 2));
        let gm = ChainMap::from_fn(l.clone(), l.clone(), |_| g.clone()).unwrap();
        let rat = rational_cohomology(&l, Some(&gm));
        assert_eq!(rat[0].induced.as_ref(), Some(&g));
    }
}
