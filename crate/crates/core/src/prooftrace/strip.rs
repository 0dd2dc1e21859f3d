//! Removing the acyclic piece N → N at the top of a complex and carrying an
//! endomorphism across the resulting quasi-isomorphism.

use std::sync::Arc;

use crate::arith::FiniteField;
use crate::complexes::{ChainMap, Homotopy, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::gauss::{inverse, pivot_columns};
use crate::linalg::{solve_in_module, Dvr, Matrix, Solvability};

/// How N^{m−1} is chosen inside L^{m−1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripMode {
    /// Standard basis vectors at the pivot columns of the residue of d^m.
    General,
    /// Eigenvectors of γ^{m−1}, which must satisfy γ^order = id, so that N is γ-stable.
    Strict { order: u64 },
}

/// The quotient L → L/N together with a homotopy inverse.
#[derive(Clone, Debug)]
pub struct StripResult<D: Dvr> {
    pub source: Arc<PerfectComplex<D>>,
    pub complex: Arc<PerfectComplex<D>>,
    /// q : L → L′
    pub projection: ChainMap<D>,
    /// s : L′ → L with q·s = id
    pub section: ChainMap<D>,
    /// k : L → L with s·q − id = d·k + k·d, concentrated in the top degree
    pub homotopy: Homotopy<D>,
    /// rank of N^m
    pub removed: usize,
}

/// γ′ on the target of a quasi-isomorphism q with γ′·q − q·γ = d·h + h·d.
#[derive(Clone, Debug)]
pub struct Transported<D: Dvr> {
    pub gamma: ChainMap<D>,
    pub witness: Homotopy<D>,
}

fn residue_field_matrix<D: Dvr>(r: &D, m: &Matrix<D::Elem>) -> Matrix<crate::arith::FfElem> {
    m.map(|x| r.residue(x))
}

/// Standard basis vectors completing columns with independent residues to a basis.
fn complement<D: Dvr>(r: &D, cols: &Matrix<D::Elem>) -> Matrix<D::Elem> {
    let k: &FiniteField = r.residue_field();
    let n = cols.rows();
    let aug = residue_field_matrix(r, cols).hstack(&Matrix::identity(k, n));
    let piv = pivot_columns(k, &aug);
    debug_assert!(piv.iter().take(cols.cols()).copied().eq(0..cols.cols()));
    let extra: Vec<usize> = piv.into_iter().filter(|&j| j >= cols.cols()).map(|j| j - cols.cols()).collect();
    Matrix::identity(r, n).select_cols(&extra)
}

/// Columns of the ring-valued matrix whose residues are the pivot columns.
fn residue_pivot_columns<D: Dvr>(r: &D, m: &Matrix<D::Elem>) -> Vec<usize> {
    pivot_columns(r.residue_field(), &residue_field_matrix(r, m))
}

/// A γ-stable lift of a complement of ker(d^m ⊗ k), spanned by eigenvectors.
fn stable_columns<D: Dvr>(r: &D, d: &Matrix<D::Elem>, g: &Matrix<D::Elem>, order: u64) -> Result<Matrix<D::Elem>> {
    let n = g.rows();
    if g.pow(r, order) != Matrix::identity(r, n) {
        return Err(Error::InvalidParams(format!("γ^{order} is not the identity in the top-but-one degree")));
    }
    let roots = crate::arith::CyclotomicField::new(order);
    let zeta = |j: u64| {
        r.from_cyclotomic(&roots.zeta_pow(j % order))
            .ok_or_else(|| Error::InvalidParams(format!("the ring does not contain the {order}-th roots of unity")))
    };
    let inv_order = r.inv(&r.from_int(order as i64)).ok_or(Error::NotInvertible)?;
    let powers: Vec<Matrix<D::Elem>> = (0..order).map(|k| g.pow(r, k)).collect();
    let mut chosen: Vec<Vec<D::Elem>> = Vec::new();
    for j in 0..order {
        let mut e = Matrix::zeros(r, n, n);
        for (k, gk) in powers.iter().enumerate() {
            let c = zeta((order - j) * k as u64 % order)?;
            e = e.add(r, &gk.scale(r, &c));
        }
        let e = e.scale(r, &inv_order);
        let basis = e.select_cols(&residue_pivot_columns(r, &e));
        if basis.cols() == 0 {
            continue;
        }
        let image = d.mul(r, &basis);
        for c in residue_pivot_columns(r, &image) {
            chosen.push(basis.col(c));
        }
    }
    Ok(Matrix::from_cols(&chosen, n))
}

/// Quotient of L by the acyclic subcomplex N^{m−1} → N^m sitting in the
/// top two degrees, where N^m = d^m(N^{m−1}) lifts the image of the residue
/// of d^m. Afterwards the residue of the top differential vanishes.
pub fn strip_top_acyclic<D: Dvr>(
    l: &Arc<PerfectComplex<D>>,
    gamma: Option<&ChainMap<D>>,
    mode: StripMode,
) -> Result<StripResult<D>> {
    let r = l.ring().clone();
    let m = l.hi();
    let d = l.diff(m);
    let ncols = match mode {
        StripMode::General => {
            let piv = residue_pivot_columns(&r, &d);
            Matrix::identity(&r, l.rank(m - 1)).select_cols(&piv)
        }
        StripMode::Strict { order } => {
            let g = gamma.ok_or_else(|| Error::InvalidParams("strict stripping needs γ".into()))?;
            stable_columns(&r, &d, &g.component(m - 1), order)?
        }
    };
    strip_along(l, &ncols)
}

/// The quotient for an explicit N^{m−1} (columns whose images under d^m
/// have independent residues).
pub fn strip_along<D: Dvr>(l: &Arc<PerfectComplex<D>>, ncols: &Matrix<D::Elem>) -> Result<StripResult<D>> {
    let r = l.ring().clone();
    let (lo, m) = (l.lo(), l.hi());
    let k = ncols.cols();
    let d = l.diff(m);
    let (r1, r2) = (l.rank(m - 1), l.rank(m));
    let dn = d.mul(&r, ncols);
    if residue_pivot_columns(&r, &dn).len() != k || residue_pivot_columns(&r, ncols).len() != k {
        return Err(Error::InternalInconsistency("chosen columns are not split".into()));
    }
    let c1 = complement(&r, ncols);
    let c2 = complement(&r, &dn);
    let b1 = ncols.hstack(&c1);
    let b2 = dn.hstack(&c2);
    let b1_inv = inverse(&r, &b1).ok_or(Error::NotInvertible)?;
    let b2_inv = inverse(&r, &b2).ok_or(Error::NotInvertible)?;
    let t = b2_inv.mul(&r, &d).mul(&r, &c1);
    let x = t.submatrix(0..k, 0..r1 - k);
    let y = t.submatrix(k..r2, 0..r1 - k);
    let q1 = b1_inv.submatrix(k..r1, 0..r1);
    let q2 = b2_inv.submatrix(k..r2, 0..r2);

    let ranks: Vec<usize> = l
        .degrees()
        .map(|i| if i == m { r2 - k } else if i == m - 1 { r1 - k } else { l.rank(i) })
        .collect();
    let diffs: Vec<_> = (lo + 1..=m)
        .map(|i| {
            if i == m {
                y.clone()
            } else if i == m - 1 {
                q1.mul(&r, &l.diff(i))
            } else {
                l.diff(i)
            }
        })
        .collect();
    let lp = Arc::new(PerfectComplex::new_unchecked(r.clone(), lo, ranks, diffs)?);
    let projection = ChainMap::from_fn(l.clone(), lp.clone(), |i| {
        if i == m {
            q2.clone()
        } else if i == m - 1 {
            q1.clone()
        } else {
            Matrix::identity(&r, l.rank(i))
        }
    })?;
    let s1 = c1.sub(&r, &ncols.mul(&r, &x));
    let section = ChainMap::from_fn(lp.clone(), l.clone(), |i| {
        if i == m {
            c2.clone()
        } else if i == m - 1 {
            s1.clone()
        } else {
            Matrix::identity(&r, l.rank(i))
        }
    })?;
    let kt = ncols.mul(&r, &b2_inv.submatrix(0..k, 0..r2)).neg(&r);
    let homotopy = Homotopy::from_fn(l.clone(), l.clone(), |i| {
        if i == m {
            kt.clone()
        } else {
            Matrix::zeros(&r, l.rank(i - 1), l.rank(i))
        }
    })?;
    Ok(StripResult { source: l.clone(), complex: lp, projection, section, homotopy, removed: k })
}

/// γ′ = q·γ·s with witness h = q·γ·k.
pub fn transport_along_strip<D: Dvr>(strip: &StripResult<D>, gamma: &ChainMap<D>) -> Transported<D> {
    let qg = strip.projection.compose(gamma);
    Transported { gamma: qg.compose(&strip.section), witness: strip.homotopy.post_compose(&qg) }
}

/// Offsets of matrix-shaped unknown blocks inside one flat vector.
struct Blocks {
    entries: Vec<(usize, usize, usize)>,
}

impl Blocks {
    fn push(&mut self, rows: usize, cols: usize) -> usize {
        let off = self.total();
        self.entries.push((off, rows, cols));
        self.entries.len() - 1
    }

    fn total(&self) -> usize {
        self.entries.last().map(|&(o, r, c)| o + r * c).unwrap_or(0)
    }

    fn index(&self, block: usize, a: usize, b: usize) -> usize {
        let (o, _, c) = self.entries[block];
        o + a * c + b
    }

    fn read<E: Clone + PartialEq>(&self, block: usize, x: &[E]) -> Matrix<E> {
        let (o, r, c) = self.entries[block];
        Matrix::new(r, c, x[o..o + r * c].to_vec()).unwrap()
    }
}

/// For a quasi-isomorphism q : L → L′ and an endomorphism γ of L, solve for
/// a chain endomorphism γ′ of L′ and a homotopy h with γ′·q − q·γ = d·h + h·d,
/// as one linear system over the ring.
pub fn transport_along_quasi_iso<D: Dvr>(q: &ChainMap<D>, gamma: &ChainMap<D>) -> Result<Transported<D>> {
    let r = q.ring().clone();
    let (l, lp) = (q.source().clone(), q.target().clone());
    let lo = l.lo().min(lp.lo());
    let hi = l.hi().max(lp.hi());
    let mut blocks = Blocks { entries: Vec::new() };
    let gblocks: Vec<usize> = (lo..=hi).map(|i| blocks.push(lp.rank(i), lp.rank(i))).collect();
    let hblocks: Vec<usize> = (lo..=hi + 1).map(|i| blocks.push(lp.rank(i - 1), l.rank(i))).collect();
    let gb = |i: i64| gblocks.get((i - lo) as usize).copied().filter(|_| i >= lo);
    let hb = |i: i64| hblocks.get((i - lo) as usize).copied().filter(|_| i >= lo);
    let n = blocks.total();
    let mut rows: Vec<Vec<D::Elem>> = Vec::new();
    let mut rhs = Vec::new();
    let bump = |row: &mut Vec<D::Elem>, idx: usize, c: &D::Elem| {
        if !r.is_zero(c) {
            row[idx] = r.add(&row[idx], c);
        }
    };
    // γ′^i d′^i − d′^i γ′^{i−1} = 0
    for i in lo + 1..=hi {
        let dp = lp.diff(i);
        for a in 0..lp.rank(i) {
            for b in 0..lp.rank(i - 1) {
                let mut row = vec![r.zero(); n];
                if let Some(g) = gb(i) {
                    for c in 0..lp.rank(i) {
                        bump(&mut row, blocks.index(g, a, c), dp.get(c, b));
                    }
                }
                if let Some(g) = gb(i - 1) {
                    for c in 0..lp.rank(i - 1) {
                        bump(&mut row, blocks.index(g, c, b), &r.neg(dp.get(a, c)));
                    }
                }
                rows.push(row);
                rhs.push(r.zero());
            }
        }
    }
    // γ′^i q^i − d′^i h^i − h^{i+1} d^{i+1} = q^i γ^i
    for i in lo..=hi {
        let qi = q.component(i);
        let target = qi.mul(&r, &gamma.component(i));
        let dp = lp.diff(i);
        let dl = l.diff(i + 1);
        for a in 0..lp.rank(i) {
            for b in 0..l.rank(i) {
                let mut row = vec![r.zero(); n];
                if let Some(g) = gb(i) {
                    for c in 0..lp.rank(i) {
                        bump(&mut row, blocks.index(g, a, c), qi.get(c, b));
                    }
                }
                if let Some(h) = hb(i) {
                    for c in 0..lp.rank(i - 1) {
                        bump(&mut row, blocks.index(h, c, b), &r.neg(dp.get(a, c)));
                    }
                }
                if let Some(h) = hb(i + 1) {
                    for c in 0..l.rank(i + 1) {
                        bump(&mut row, blocks.index(h, a, c), &r.neg(dl.get(c, b)));
                    }
                }
                rows.push(row);
                rhs.push(target.get(a, b).clone());
            }
        }
    }
    let x = if n == 0 {
        Vec::new()
    } else {
        let sys = Matrix::from_rows(rows, n)?;
        let sol = solve_in_module(&r, &sys, &rhs);
        if sol.kind != Solvability::Integral {
            return Err(Error::InternalInconsistency("no integral transport; the map is not a quasi-isomorphism".into()));
        }
        sol.witness.unwrap()
    };
    let g = ChainMap::from_fn(lp.clone(), lp.clone(), |i| match gb(i) {
        Some(b) if i <= hi => blocks.read(b, &x),
        _ => Matrix::zeros(&r, lp.rank(i), lp.rank(i)),
    })?;
    let h = Homotopy::from_fn(l.clone(), lp.clone(), |i| match hb(i) {
        Some(b) => blocks.read(b, &x),
        None => Matrix::zeros(&r, lp.rank(i - 1), l.rank(i)),
    })?;
    Ok(Transported { gamma: g, witness: h })
}

/// True iff γ′·q − q·γ = d·h + h·d.
pub fn check_transport<D: Dvr>(q: &ChainMap<D>, gamma: &ChainMap<D>, t: &Transported<D>) -> bool {
    t.gamma.check().is_ok() && t.gamma.compose(q).sub(&q.compose(gamma)) == t.witness.boundary()
}
