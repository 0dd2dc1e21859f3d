//! Null-homotopies and quasi-isomorphisms.

use crate::linalg::{solve_in_module, Dvr, Matrix, Solvability};

use super::cohomology::integral_cohomology;
use super::complex::{cone, ChainMap, Homotopy};

/// Index bookkeeping for the unknowns t^i (row-major blocks, degree ascending).
struct Layout {
    lo: i64,
    offsets: Vec<usize>,
    shapes: Vec<(usize, usize)>,
}

impl Layout {
    fn total(&self) -> usize {
        self.offsets.last().copied().unwrap_or(0)
    }

    fn index(&self, i: i64, a: usize, b: usize) -> Option<usize> {
        let k = i - self.lo;
        if k < 0 || k as usize >= self.shapes.len() {
            return None;
        }
        let (_, cols) = self.shapes[k as usize];
        Some(self.offsets[k as usize] + a * cols + b)
    }
}

/// Solve f = d·t + t·d for t over the ring via one assembled linear system.
pub fn null_homotopy_witness<D: Dvr>(f: &ChainMap<D>) -> Option<Homotopy<D>> {
    let r = f.ring().clone();
    let (s, t) = (f.source(), f.target());
    let degrees: Vec<i64> = f.degrees().collect();
    let (lo, hi) = (*degrees.first()?, *degrees.last()?);
    let mut offsets = vec![0];
    let mut shapes = Vec::new();
    for i in lo..=hi + 1 {
        let shape = (t.rank(i - 1), s.rank(i));
        shapes.push(shape);
        offsets.push(offsets.last().unwrap() + shape.0 * shape.1);
    }
    let layout = Layout { lo, offsets, shapes };
    let n = layout.total();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in lo..=hi {
        let fi = f.component(i);
        let dt = t.diff(i);
        let ds = s.diff(i + 1);
        for a in 0..t.rank(i) {
            for b in 0..s.rank(i) {
                let mut row = vec![r.zero(); n];
                // (d_t^i t^i)[a][b] = Σ_c d_t^i[a][c] t^i[c][b]
                for c in 0..t.rank(i - 1) {
                    if let Some(idx) = layout.index(i, c, b) {
                        row[idx] = r.add(&row[idx], dt.get(a, c));
                    }
                }
                // (t^{i+1} d_s^{i+1})[a][b] = Σ_c t^{i+1}[a][c] d_s^{i+1}[c][b]
                for c in 0..s.rank(i + 1) {
                    if let Some(idx) = layout.index(i + 1, a, c) {
                        row[idx] = r.add(&row[idx], ds.get(c, b));
                    }
                }
                rows.push(row);
                rhs.push(fi.get(a, b).clone());
            }
        }
    }
    if n == 0 {
        return rhs.iter().all(|x| r.is_zero(x)).then(|| Homotopy::zero(s, t));
    }
    let m = Matrix::from_rows(rows, n).ok()?;
    let sol = solve_in_module(&r, &m, &rhs);
    if sol.kind != Solvability::Integral {
        return None;
    }
    let x = sol.witness?;
    Homotopy::from_fn(s.clone(), t.clone(), |i| {
        let k = i - lo;
        let (rr, cc) = (t.rank(i - 1), s.rank(i));
        if k < 0 || k as usize >= layout.shapes.len() {
            return Matrix::zeros(&r, rr, cc);
        }
        let off = layout.offsets[k as usize];
        Matrix::new(rr, cc, x[off..off + rr * cc].to_vec()).unwrap()
    })
    .ok()
}

/// True iff the cone has vanishing cohomology over the ring.
pub fn is_quasi_isomorphism<D: Dvr>(f: &ChainMap<D>) -> bool {
    let (c, _, _) = cone(f);
    integral_cohomology(&c).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Field, ScalarContext};
    use crate::complexes::complex::{perturb, PerfectComplex};
    use std::sync::Arc;

    fn e1(p: u64) -> Arc<PerfectComplex<ScalarContext>> {
        let c = ScalarContext::new(p).unwrap();
        let d = Matrix::from_rows(vec![vec![c.from_int(p as i64)]], 1).unwrap();
        Arc::new(PerfectComplex::new(c, 0, vec![1, 1], vec![d]).unwrap())
    }

    #[test]
    fn witnesses() {
        let l = e1(7);
        let c = l.ring().clone();
        assert!(null_homotopy_witness(&ChainMap::identity(&l)).is_none());
        let z = null_homotopy_witness(&ChainMap::zero(&l, &l)).unwrap();
        assert!(z.boundary().sub(&ChainMap::zero(&l, &l)).component(0).is_zero(&c));
        let t0 = Homotopy::from_fn(l.clone(), l.clone(), |i| {
            let m = Matrix::zeros(&c, l.rank(i - 1), l.rank(i));
            if i == 1 { Matrix::scalar(&c, 1, &c.from_int(3)) } else { m }
        })
        .unwrap();
        let f = t0.boundary();
        let t = null_homotopy_witness(&f).unwrap();
        assert_eq!(t.boundary(), f);
    }

    #[test]
    fn perturbation_example() {
        let l = e1(7);
        let c = l.ring().clone();
        let t = Homotopy::from_fn(l.clone(), l.clone(), |i| {
            if i == 1 { Matrix::scalar(&c, 1, &c.from_int(2)) } else { Matrix::zeros(&c, l.rank(i - 1), l.rank(i)) }
        })
        .unwrap();
        let g = perturb(&ChainMap::identity(&l), &t);
        assert_eq!(g.component(0), Matrix::scalar(&c, 1, &c.from_int(15)));
        assert_eq!(g.component(1), Matrix::scalar(&c, 1, &c.from_int(15)));
        g.check().unwrap();
    }

    #[test]
    fn quasi_isomorphisms() {
        let l = e1(3);
        let c = l.ring().clone();
        assert!(is_quasi_isomorphism(&ChainMap::identity(&l)));
        assert!(!is_quasi_isomorphism(&ChainMap::scalar(&l, &c.from_int(3))));
        let zero = Arc::new(PerfectComplex::zero(c.clone()));
        assert!(!is_quasi_isomorphism(&ChainMap::zero(&zero, &l)));
        let (cn, _, _) = cone(&ChainMap::identity(&l));
        cn.validate().unwrap();
        assert!(integral_cohomology(&cn).is_zero());
    }
}
