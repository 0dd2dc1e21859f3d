//! Bounded complexes of finite free modules, chain maps and homotopies.
//!
//! Cohomological indexing: d^i : L^{i−1} → L^i. A complex with window [a, b]
//! has ranks for degrees a..=b and differentials d^{a+1}, …, d^b; everything
//! outside the window is zero.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, Dvr, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct PerfectComplex<D: Dvr> {
    ring: D,
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<Matrix<D::Elem>>,
}

impl<D: Dvr> PerfectComplex<D> {
    /// `diffs[k]` is d^{lo+k+1}. Shapes and d∘d = 0 are checked.
    pub fn new(ring: D, lo: i64, ranks: Vec<usize>, diffs: Vec<Matrix<D::Elem>>) -> Result<Self> {
        let c = Self::new_unchecked(ring, lo, ranks, diffs)?;
        c.validate()?;
        Ok(c)
    }

    /// Checks shapes only.
    pub fn new_unchecked(ring: D, lo: i64, ranks: Vec<usize>, diffs: Vec<Matrix<D::Elem>>) -> Result<Self> {
        if ranks.is_empty() {
            return Ok(PerfectComplex { ring, lo, ranks: vec![0], diffs: Vec::new() });
        }
        if diffs.len() + 1 != ranks.len() {
            return Err(Error::Shape(format!("{} ranks need {} differentials, got {}", ranks.len(), ranks.len() - 1, diffs.len())));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.shape() != (ranks[k + 1], ranks[k]) {
                return Err(Error::Shape(format!(
                    "d^{} is {:?}, expected {:?}",
                    lo + k as i64 + 1,
                    d.shape(),
                    (ranks[k + 1], ranks[k])
                )));
            }
        }
        Ok(PerfectComplex { ring, lo, ranks, diffs })
    }

    pub fn zero(ring: D) -> Self {
        PerfectComplex { ring, lo: 0, ranks: vec![0], diffs: Vec::new() }
    }

    /// A single module in degree `deg`.
    pub fn concentrated(ring: D, deg: i64, rank: usize) -> Self {
        PerfectComplex { ring, lo: deg, ranks: vec![rank], diffs: Vec::new() }
    }

    pub fn ring(&self) -> &D {
        &self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.ranks[(i - self.lo) as usize]
        }
    }

    /// d^i : L^{i−1} → L^i, a zero matrix outside the window.
    pub fn diff(&self, i: i64) -> Matrix<D::Elem> {
        if i > self.lo && i <= self.hi() {
            self.diffs[(i - self.lo - 1) as usize].clone()
        } else {
            Matrix::zeros(&self.ring, self.rank(i), self.rank(i - 1))
        }
    }

    pub fn diff_ref(&self, i: i64) -> Option<&Matrix<D::Elem>> {
        (i > self.lo && i <= self.hi()).then(|| &self.diffs[(i - self.lo - 1) as usize])
    }

    pub fn differentials(&self) -> &[Matrix<D::Elem>] {
        &self.diffs
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|i| sign(i) * self.rank(i) as i64).sum()
    }

    /// d∘d = 0 and integrality of every entry; reports the first failing degree.
    pub fn validate(&self) -> Result<()> {
        for i in self.degrees() {
            let Some(d) = self.diff_ref(i) else { continue };
            if d.entries().iter().any(|x| !self.ring.is_integral(x)) {
                return Err(Error::DenominatorNotInvertible(format!("entry of d^{i}")));
            }
            if let Some(next) = self.diff_ref(i + 1) {
                if !next.mul(&self.ring, d).is_zero(&self.ring) {
                    return Err(Error::NotAComplex(i + 1));
                }
            }
        }
        Ok(())
    }

    /// Same complex on the window [lo, hi] (which must contain every nonzero rank).
    pub fn with_window(&self, lo: i64, hi: i64) -> Self {
        assert!(self.degrees().all(|i| self.rank(i) == 0 || (lo..=hi).contains(&i)));
        let ranks: Vec<usize> = (lo..=hi).map(|i| self.rank(i)).collect();
        let diffs = (lo + 1..=hi).map(|i| self.diff(i)).collect();
        PerfectComplex { ring: self.ring.clone(), lo, ranks, diffs }
    }

    /// Smallest window holding every nonzero rank (degree 0 for the zero complex).
    pub fn trimmed(&self) -> Self {
        let nz: Vec<i64> = self.degrees().filter(|&i| self.rank(i) > 0).collect();
        match (nz.first(), nz.last()) {
            (Some(&a), Some(&b)) => self.with_window(a, b),
            _ => Self::zero(self.ring.clone()),
        }
    }

    /// L[n]^i = L^{i+n} with differential (−1)^n d.
    pub fn shift(&self, n: i64) -> Self {
        let s = self.ring.from_int(sign(n));
        PerfectComplex {
            ring: self.ring.clone(),
            lo: self.lo - n,
            ranks: self.ranks.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&self.ring, &s)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let (lo, hi) = union_window(self, other);
        let ranks = (lo..=hi).map(|i| self.rank(i) + other.rank(i)).collect();
        let diffs = (lo + 1..=hi).map(|i| Matrix::block_diag(&self.ring, &self.diff(i), &other.diff(i))).collect();
        PerfectComplex { ring: self.ring.clone(), lo, ranks, diffs }
    }
}

pub(crate) fn sign(i: i64) -> i64 {
    if i.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn union_window<D: Dvr>(a: &PerfectComplex<D>, b: &PerfectComplex<D>) -> (i64, i64) {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => (0, 0),
        (true, false) => (b.trimmed().lo(), b.trimmed().hi()),
        (false, true) => (a.trimmed().lo(), a.trimmed().hi()),
        _ => {
            let (a, b) = (a.trimmed(), b.trimmed());
            (a.lo().min(b.lo()), a.hi().max(b.hi()))
        }
    }
}

/// Degree-wise maps F^i : L^i → M^i. Degrees outside both windows are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap<D: Dvr> {
    source: Arc<PerfectComplex<D>>,
    target: Arc<PerfectComplex<D>>,
    lo: i64,
    comps: Vec<Matrix<D::Elem>>,
}

impl<D: Dvr> ChainMap<D> {
    /// Build from a component function; shapes checked, commutation not.
    pub fn from_fn(
        source: Arc<PerfectComplex<D>>,
        target: Arc<PerfectComplex<D>>,
        mut f: impl FnMut(i64) -> Matrix<D::Elem>,
    ) -> Result<Self> {
        let (lo, hi) = union_window(&source, &target);
        let mut comps = Vec::new();
        for i in lo..=hi {
            let m = f(i);
            if m.shape() != (target.rank(i), source.rank(i)) {
                return Err(Error::Shape(format!(
                    "component in degree {i} is {:?}, expected {:?}",
                    m.shape(),
                    (target.rank(i), source.rank(i))
                )));
            }
            comps.push(m);
        }
        Ok(ChainMap { source, target, lo, comps })
    }

    pub fn identity(c: &Arc<PerfectComplex<D>>) -> Self {
        let r = c.ring().clone();
        Self::from_fn(c.clone(), c.clone(), |i| Matrix::identity(&r, c.rank(i))).unwrap()
    }

    pub fn zero(source: &Arc<PerfectComplex<D>>, target: &Arc<PerfectComplex<D>>) -> Self {
        let r = source.ring().clone();
        Self::from_fn(source.clone(), target.clone(), |i| Matrix::zeros(&r, target.rank(i), source.rank(i))).unwrap()
    }

    pub fn scalar(c: &Arc<PerfectComplex<D>>, s: &D::Elem) -> Self {
        let r = c.ring().clone();
        Self::from_fn(c.clone(), c.clone(), |i| Matrix::scalar(&r, c.rank(i), s)).unwrap()
    }

    pub fn source(&self) -> &Arc<PerfectComplex<D>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PerfectComplex<D>> {
        &self.target
    }

    pub fn ring(&self) -> &D {
        self.source.ring()
    }

    pub fn component(&self, i: i64) -> Matrix<D::Elem> {
        let k = i - self.lo;
        if k >= 0 && (k as usize) < self.comps.len() {
            self.comps[k as usize].clone()
        } else {
            Matrix::zeros(self.ring(), self.target.rank(i), self.source.rank(i))
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.lo + self.comps.len() as i64 - 1
    }

    /// F^i d^i = d^i F^{i−1} for every i; reports the first failing degree.
    pub fn check(&self) -> Result<()> {
        let r = self.ring();
        for i in self.lo..=self.lo + self.comps.len() as i64 {
            let lhs = self.component(i).mul(r, &self.source.diff(i));
            let rhs = self.target.diff(i).mul(r, &self.component(i - 1));
            if lhs != rhs {
                return Err(Error::NotAChainMap(i));
            }
        }
        if self.comps.iter().flat_map(|m| m.entries()).any(|x| !r.is_integral(x)) {
            return Err(Error::DenominatorNotInvertible("chain map entry".into()));
        }
        Ok(())
    }

    pub fn is_endomorphism(&self) -> bool {
        Arc::ptr_eq(&self.source, &self.target) || self.source == self.target
    }

    /// self ∘ other
    pub fn compose(&self, other: &ChainMap<D>) -> Self {
        let r = self.ring().clone();
        Self::from_fn(other.source.clone(), self.target.clone(), |i| {
            self.component(i).mul(&r, &other.component(i))
        })
        .unwrap()
    }

    pub fn add(&self, other: &ChainMap<D>) -> Self {
        let r = self.ring().clone();
        Self::from_fn(self.source.clone(), self.target.clone(), |i| self.component(i).add(&r, &other.component(i))).unwrap()
    }

    pub fn sub(&self, other: &ChainMap<D>) -> Self {
        let r = self.ring().clone();
        Self::from_fn(self.source.clone(), self.target.clone(), |i| self.component(i).sub(&r, &other.component(i))).unwrap()
    }

    /// Same components viewed between other (equal-shaped) complexes.
    pub fn retarget(&self, source: Arc<PerfectComplex<D>>, target: Arc<PerfectComplex<D>>) -> Result<Self> {
        Self::from_fn(source, target, |i| self.component(i))
    }

    /// γ ⊕ δ on the direct sum.
    pub fn direct_sum(&self, other: &ChainMap<D>) -> Self {
        let r = self.ring().clone();
        let s = Arc::new(self.source.direct_sum(&other.source));
        let t = Arc::new(self.target.direct_sum(&other.target));
        Self::from_fn(s, t, |i| Matrix::block_diag(&r, &self.component(i), &other.component(i))).unwrap()
    }

    /// F[n]^i = F^{i+n} between shifted complexes.
    pub fn shift(&self, n: i64) -> Self {
        let s = Arc::new(self.source.shift(n));
        let t = Arc::new(self.target.shift(n));
        Self::from_fn(s, t, |i| self.component(i + n)).unwrap()
    }
}

/// Degree −1 maps t^i : L^i → M^{i−1}.
#[derive(Clone, Debug, PartialEq)]
pub struct Homotopy<D: Dvr> {
    source: Arc<PerfectComplex<D>>,
    target: Arc<PerfectComplex<D>>,
    lo: i64,
    comps: Vec<Matrix<D::Elem>>,
}

impl<D: Dvr> Homotopy<D> {
    pub fn from_fn(
        source: Arc<PerfectComplex<D>>,
        target: Arc<PerfectComplex<D>>,
        mut f: impl FnMut(i64) -> Matrix<D::Elem>,
    ) -> Result<Self> {
        let (lo, hi) = union_window(&source, &target);
        let mut comps = Vec::new();
        for i in lo..=hi + 1 {
            let m = f(i);
            if m.shape() != (target.rank(i - 1), source.rank(i)) {
                return Err(Error::Shape(format!(
                    "homotopy component in degree {i} is {:?}, expected {:?}",
                    m.shape(),
                    (target.rank(i - 1), source.rank(i))
                )));
            }
            comps.push(m);
        }
        Ok(Homotopy { source, target, lo, comps })
    }

    pub fn zero(source: &Arc<PerfectComplex<D>>, target: &Arc<PerfectComplex<D>>) -> Self {
        let r = source.ring().clone();
        Self::from_fn(source.clone(), target.clone(), |i| Matrix::zeros(&r, target.rank(i - 1), source.rank(i))).unwrap()
    }

    pub fn source(&self) -> &Arc<PerfectComplex<D>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PerfectComplex<D>> {
        &self.target
    }

    pub fn component(&self, i: i64) -> Matrix<D::Elem> {
        let k = i - self.lo;
        if k >= 0 && (k as usize) < self.comps.len() {
            self.comps[k as usize].clone()
        } else {
            Matrix::zeros(self.source.ring(), self.target.rank(i - 1), self.source.rank(i))
        }
    }

    /// The chain map d·t + t·d.
    pub fn boundary(&self) -> ChainMap<D> {
        let r = self.source.ring().clone();
        ChainMap::from_fn(self.source.clone(), self.target.clone(), |i| {
            let a = self.target.diff(i).mul(&r, &self.component(i));
            let b = self.component(i + 1).mul(&r, &self.source.diff(i + 1));
            a.add(&r, &b)
        })
        .unwrap()
    }

    pub fn add(&self, other: &Homotopy<D>) -> Self {
        let r = self.source.ring().clone();
        Self::from_fn(self.source.clone(), self.target.clone(), |i| self.component(i).add(&r, &other.component(i))).unwrap()
    }

    pub fn scale(&self, s: &D::Elem) -> Self {
        let r = self.source.ring().clone();
        Self::from_fn(self.source.clone(), self.target.clone(), |i| self.component(i).scale(&r, s)).unwrap()
    }

    /// f ∘ t (f a chain map out of the target).
    pub fn post_compose(&self, f: &ChainMap<D>) -> Self {
        let r = self.source.ring().clone();
        Self::from_fn(self.source.clone(), f.target().clone(), |i| f.component(i - 1).mul(&r, &self.component(i))).unwrap()
    }

    /// t ∘ f (f a chain map into the source).
    pub fn pre_compose(&self, f: &ChainMap<D>) -> Self {
        let r = self.source.ring().clone();
        Self::from_fn(f.source().clone(), self.target.clone(), |i| self.component(i).mul(&r, &f.component(i))).unwrap()
    }

    pub fn retarget(&self, source: Arc<PerfectComplex<D>>, target: Arc<PerfectComplex<D>>) -> Result<Self> {
        Self::from_fn(source, target, |i| self.component(i))
    }
}

/// γ + d·t + t·d.
pub fn perturb<D: Dvr>(gamma: &ChainMap<D>, t: &Homotopy<D>) -> ChainMap<D> {
    gamma.add(&t.boundary())
}

/// The mapping cone of f : L → M: cone^i = L^{i+1} ⊕ M^i with differential
/// [[−d_L, 0], [f, d_M]]. Returns the cone with the inclusion M → cone and
/// the projection cone → L[1].
pub fn cone<D: Dvr>(f: &ChainMap<D>) -> (Arc<PerfectComplex<D>>, ChainMap<D>, ChainMap<D>) {
    let r = f.ring().clone();
    let (l, m) = (f.source(), f.target());
    let (lo, hi) = union_window(l, m);
    let (lo, hi) = (lo - 1, hi);
    let ranks: Vec<usize> = (lo..=hi).map(|i| l.rank(i + 1) + m.rank(i)).collect();
    let diffs: Vec<_> = (lo + 1..=hi)
        .map(|i| {
            let a = l.diff(i + 1).neg(&r);
            let b = Matrix::zeros(&r, l.rank(i + 1), m.rank(i - 1));
            Matrix::block2(&a, &b, &f.component(i), &m.diff(i))
        })
        .collect();
    let c = Arc::new(PerfectComplex::new_unchecked(r.clone(), lo, ranks, diffs).unwrap());
    let incl = ChainMap::from_fn(m.clone(), c.clone(), |i| {
        Matrix::zeros(&r, l.rank(i + 1), m.rank(i)).vstack(&Matrix::identity(&r, m.rank(i)))
    })
    .unwrap();
    let shifted = Arc::new(l.shift(1));
    let proj = ChainMap::from_fn(c.clone(), shifted, |i| {
        Matrix::identity(&r, l.rank(i + 1)).hstack(&Matrix::zeros(&r, l.rank(i + 1), m.rank(i)))
    })
    .unwrap();
    (c, incl, proj)
}

/// Inclusions and projections of a direct sum L ⊕ M.
pub struct DirectSum<D: Dvr> {
    pub sum: Arc<PerfectComplex<D>>,
    pub incl_left: ChainMap<D>,
    pub incl_right: ChainMap<D>,
    pub proj_left: ChainMap<D>,
    pub proj_right: ChainMap<D>,
}

pub fn direct_sum<D: Dvr>(l: &Arc<PerfectComplex<D>>, m: &Arc<PerfectComplex<D>>) -> DirectSum<D> {
    let r = l.ring().clone();
    let sum = Arc::new(l.direct_sum(m));
    let il = ChainMap::from_fn(l.clone(), sum.clone(), |i| {
        Matrix::identity(&r, l.rank(i)).vstack(&Matrix::zeros(&r, m.rank(i), l.rank(i)))
    })
    .unwrap();
    let ir = ChainMap::from_fn(m.clone(), sum.clone(), |i| {
        Matrix::zeros(&r, l.rank(i), m.rank(i)).vstack(&Matrix::identity(&r, m.rank(i)))
    })
    .unwrap();
    let pl = ChainMap::from_fn(sum.clone(), l.clone(), |i| {
        Matrix::identity(&r, l.rank(i)).hstack(&Matrix::zeros(&r, l.rank(i), m.rank(i)))
    })
    .unwrap();
    let pr = ChainMap::from_fn(sum.clone(), m.clone(), |i| {
        Matrix::zeros(&r, m.rank(i), l.rank(i)).hstack(&Matrix::identity(&r, m.rank(i)))
    })
    .unwrap();
    DirectSum { sum, incl_left: il, incl_right: ir, proj_left: pl, proj_right: pr }
}

/// A quotient L/N along a degree-wise split inclusion ι : N → L.
pub struct SplitQuotient<D: Dvr> {
    pub quotient: Arc<PerfectComplex<D>>,
    pub projection: ChainMap<D>,
    /// Degree-wise sections of the projection (not chain maps in general).
    pub section: Vec<(i64, Matrix<D::Elem>)>,
}

/// Complements are read off the Smith decomposition of each ι^i.
pub fn quotient_by_split<D: Dvr>(iota: &ChainMap<D>) -> Result<SplitQuotient<D>> {
    let r = iota.ring().clone();
    let l = iota.target();
    let (lo, hi) = (l.lo(), l.hi());
    let mut proj = Vec::new();
    let mut sect = Vec::new();
    for i in lo..=hi {
        let m = iota.component(i);
        let snf = smith_normal_form(&r, &m);
        if snf.rank() != m.cols() || snf.exponents.iter().any(|&e| e > 0) {
            return Err(Error::NotSplit(i));
        }
        let k = snf.rank();
        proj.push(snf.u_inv.submatrix(k..m.rows(), 0..m.rows()));
        sect.push(snf.u.submatrix(0..m.rows(), k..m.rows()));
    }
    let ranks: Vec<usize> = proj.iter().map(|q| q.rows()).collect();
    let diffs = (lo + 1..=hi)
        .map(|i| {
            let (a, b) = ((i - lo) as usize, (i - lo - 1) as usize);
            proj[a].mul(&r, &l.diff(i)).mul(&r, &sect[b])
        })
        .collect();
    let quotient = Arc::new(PerfectComplex::new_unchecked(r.clone(), lo, ranks, diffs)?);
    let projection = ChainMap::from_fn(l.clone(), quotient.clone(), |i| proj[(i - lo) as usize].clone())?;
    let section = (lo..=hi).zip(sect).collect();
    Ok(SplitQuotient { quotient, projection, section })
}
