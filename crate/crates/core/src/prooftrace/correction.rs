//! Moving γ within its homotopy class so that the top component acts on
//! each step of the flag by its Teichmüller unit.

use std::sync::Arc;

use crate::arith::{CyclotomicNumber, Field};
use crate::complexes::{perturb, ChainMap, Homotopy, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::gauss::inverse;
use crate::linalg::{solve_in_module, Matrix, Solvability};

use super::extring::CyclotomicLocal;
use super::filtration::FiltrationData;

/// The corrected map and the homotopy t : L^m → L^{m−1} with
/// γ″ = γ + d·t + t·d.
#[derive(Clone, Debug)]
pub struct Correction {
    pub gamma: ChainMap<CyclotomicLocal>,
    pub homotopy: Homotopy<CyclotomicLocal>,
}

/// Solve d^m(t_e) = ξ_e ℓ_e − γ^m(ℓ_e) modulo F^{e−1} for e = 1, …, s in
/// flag order and perturb γ by t with t(ℓ_e) = t_e.
pub fn homotopy_correction(
    l: &Arc<PerfectComplex<CyclotomicLocal>>,
    gamma: &ChainMap<CyclotomicLocal>,
    filt: &FiltrationData,
) -> Result<Correction> {
    let r = l.ring().clone();
    let m = l.hi();
    let (r1, s) = (l.rank(m - 1), l.rank(m));
    let d = l.diff(m);
    let g = gamma.component(m);
    let mut ts: Vec<Vec<CyclotomicNumber>> = Vec::with_capacity(s);
    for e in 0..s {
        let ell = filt.basis.col(e);
        let image = g.mul_vec(&r, &ell);
        let defect: Vec<CyclotomicNumber> = ell
            .iter()
            .zip(&image)
            .map(|(x, y)| r.sub(&r.mul(&filt.xi[e], x), y))
            .collect();
        let flag = filt.basis.submatrix(0..s, 0..e);
        if e == 0 && defect.iter().all(|x| r.is_zero(x)) {
            ts.push(vec![r.zero(); r1]);
            continue;
        }
        // defect already inside F^{e−1}: nothing to correct
        if e > 0 {
            let sol = solve_in_module(&r, &flag, &defect);
            if sol.kind == Solvability::Integral {
                ts.push(vec![r.zero(); r1]);
                continue;
            }
        }
        let sys = d.hstack(&flag);
        let sol = solve_in_module(&r, &sys, &defect);
        if sol.kind != Solvability::Integral {
            return Err(Error::DefectNotInImage(e + 1));
        }
        ts.push(sol.witness.unwrap()[..r1].to_vec());
    }
    let tmat = Matrix::from_cols(&ts, r1);
    let b_inv = inverse(&r, &filt.basis).ok_or(Error::NotInvertible)?;
    let t = tmat.mul(&r, &b_inv);
    let homotopy = Homotopy::from_fn(l.clone(), l.clone(), |i| {
        if i == m {
            t.clone()
        } else {
            Matrix::zeros(&r, l.rank(i - 1), l.rank(i))
        }
    })?;
    Ok(Correction { gamma: perturb(gamma, &homotopy), homotopy })
}

/// B^{-1} γ″^m B is upper triangular with diagonal exactly ξ.
pub fn is_teichmuller_triangular(ring: &CyclotomicLocal, top: &Matrix<CyclotomicNumber>, filt: &FiltrationData) -> bool {
    let Some(b_inv) = inverse(ring, &filt.basis) else {
        return false;
    };
    let t = b_inv.mul(ring, top).mul(ring, &filt.basis);
    let s = t.rows();
    (0..s).all(|i| (0..i).all(|j| ring.is_zero(t.get(i, j))) && t.get(i, i) == &filt.xi[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ScalarContext;
    use crate::prooftrace::filtration::{build_stable_filtration, FiltrationOutcome};

    #[test]
    fn e1_shape_corrects_to_teichmuller_lift() {
        let r = CyclotomicLocal::new(&ScalarContext::new(7).unwrap(), 3).unwrap();
        let d = Matrix::from_rows(vec![vec![r.from_int(7)]], 1).unwrap();
        let l = Arc::new(PerfectComplex::new(r.clone(), 0, vec![1, 1], vec![d]).unwrap());
        // γ = 2 + 7·3 on both degrees
        let g = ChainMap::scalar(&l, &r.from_int(23));
        let FiltrationOutcome::Ready(f) = build_stable_filtration(&r, &g.component(1)).unwrap() else { panic!() };
        let c = homotopy_correction(&l, &g, &f).unwrap();
        c.gamma.check().unwrap();
        let k = r.field();
        assert_eq!(c.gamma.component(1).get(0, 0), &k.zeta_pow(2));
        assert_eq!(c.gamma.sub(&g), c.homotopy.boundary());
        assert!(is_teichmuller_triangular(&r, &c.gamma.component(1), &f));
    }

    #[test]
    fn teichmuller_diagonal_needs_no_correction() {
        let r = CyclotomicLocal::new(&ScalarContext::new(5).unwrap(), 4).unwrap();
        let l = Arc::new(PerfectComplex::concentrated(r.clone(), 0, 2).shift(-1));
        let k = r.field().clone();
        let g = ChainMap::from_fn(l.clone(), l.clone(), |_| {
            Matrix::from_rows(vec![vec![k.zeta_pow(1), k.zero()], vec![k.zero(), k.one()]], 2).unwrap()
        })
        .unwrap();
        let FiltrationOutcome::Ready(f) = build_stable_filtration(&r, &g.component(1)).unwrap() else { panic!() };
        let c = homotopy_correction(&l, &g, &f).unwrap();
        assert_eq!(c.gamma, g);
    }
}
