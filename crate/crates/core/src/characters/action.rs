//! Group actions in the derived category and the per-element report.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{nt, ScalarContext, TeichmullerDictionary};
use crate::complexes::{null_homotopy_witness, residue_cohomology, ChainMap, Homotopy, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::{characteristic_polynomial, unity_level, Dvr};

use super::group::GroupTable;
use super::values::{verify_theorem, CharacterReport, Verdict};

/// ρ(g) for every group element, with optional coherence homotopies
/// h_{g,h} satisfying ρ(g)ρ(h) − ρ(gh) = d·h + h·d.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionAssignment<D: Dvr> {
    pub group: GroupTable,
    pub complex: Arc<PerfectComplex<D>>,
    pub maps: Vec<ChainMap<D>>,
    pub coherence: BTreeMap<(usize, usize), Homotopy<D>>,
    /// t with ρ(e) − id = d·t + t·d.
    pub identity_homotopy: Option<Homotopy<D>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoherenceError {
    NotAChainMap { g: usize, degree: i64 },
    Pair { g: usize, h: usize },
    Identity,
    WrongCount { expected: usize, got: usize },
}

impl fmt::Display for CoherenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoherenceError::NotAChainMap { g, degree } => write!(f, "ρ({g}) does not commute with d in degree {degree}"),
            CoherenceError::Pair { g, h } => write!(f, "ρ({g})ρ({h}) − ρ({g}·{h}) is not null-homotopic"),
            CoherenceError::Identity => write!(f, "ρ(e) is not homotopic to the identity"),
            CoherenceError::WrongCount { expected, got } => write!(f, "expected {expected} maps, got {got}"),
        }
    }
}

impl<D: Dvr> ActionAssignment<D> {
    /// An action with ρ(g)ρ(h) = ρ(gh) on the nose.
    pub fn strict(group: GroupTable, complex: Arc<PerfectComplex<D>>, maps: Vec<ChainMap<D>>) -> Self {
        ActionAssignment { group, complex, maps, coherence: BTreeMap::new(), identity_homotopy: None }
    }

    pub fn map(&self, g: usize) -> &ChainMap<D> {
        &self.maps[g]
    }
}

fn null_homotopic<D: Dvr>(f: &ChainMap<D>, witness: Option<&Homotopy<D>>) -> bool {
    let r = f.ring();
    if f.degrees().all(|i| f.component(i).is_zero(r)) {
        return true;
    }
    if let Some(t) = witness {
        if t.boundary() == *f {
            return true;
        }
    }
    null_homotopy_witness(f).is_some()
}

pub fn check_action_coherence<D: Dvr>(act: &ActionAssignment<D>) -> std::result::Result<(), CoherenceError> {
    let n = act.group.order();
    if act.maps.len() != n {
        return Err(CoherenceError::WrongCount { expected: n, got: act.maps.len() });
    }
    for (g, m) in act.maps.iter().enumerate() {
        if let Err(Error::NotAChainMap(degree)) = m.check() {
            return Err(CoherenceError::NotAChainMap { g, degree });
        }
    }
    let e = act.group.identity();
    let id = ChainMap::identity(&act.complex);
    if !null_homotopic(&act.maps[e].sub(&id), act.identity_homotopy.as_ref()) {
        return Err(CoherenceError::Identity);
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|g| (0..n).map(move |h| (g, h))).collect();
    let bad = pairs.par_iter().find_first(|&&(g, h)| {
        let lhs = act.maps[g].compose(&act.maps[h]).sub(&act.maps[act.group.mul(g, h)]);
        !null_homotopic(&lhs, act.coherence.get(&(g, h)))
    });
    match bad {
        Some(&(g, h)) => Err(CoherenceError::Pair { g, h }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivariantReport {
    #[serde(rename = "N")]
    pub level: u64,
    pub reports: Vec<CharacterReport>,
}

impl EquivariantReport {
    /// True iff no p-regular element has an unequal (or uncertified) verdict.
    pub fn all_equal(&self) -> bool {
        self.reports.iter().filter(|r| r.p_regular).all(|r| r.verdict == Verdict::Equal)
    }
}

/// lcm of the prime-to-p parts of element orders and the orders of all
/// residue eigenvalues on cohomology.
pub fn choose_level(act: &ActionAssignment<ScalarContext>, max_level: u64) -> Result<u64> {
    let p = act.complex.ring().p();
    let mut level = act.group.prime_to_p_exponent(p);
    for m in &act.maps {
        let (k, coh) = residue_cohomology(&act.complex, Some(m));
        for h in coh {
            if h.dim == 0 {
                continue;
            }
            let cp = characteristic_polynomial(&k, h.induced.as_ref().unwrap());
            if let Some(n) = unity_level(&k, &cp, max_level) {
                level = nt::lcm(level, n);
            }
        }
    }
    if level > max_level {
        return Err(Error::DictionaryTooSmall { needed: level, max: max_level });
    }
    Ok(level)
}

pub fn equivariant_report(act: &ActionAssignment<ScalarContext>, max_level: u64) -> Result<EquivariantReport> {
    let ctx = act.complex.ring();
    let level = choose_level(act, max_level)?;
    let dict = TeichmullerDictionary::build(ctx, level)?;
    let reports = (0..act.group.order())
        .into_par_iter()
        .map(|g| element_report(act, &dict, g))
        .collect();
    Ok(EquivariantReport { level, reports })
}

pub fn element_report(act: &ActionAssignment<ScalarContext>, dict: &TeichmullerDictionary, g: usize) -> CharacterReport {
    let mut rep = verify_theorem(&act.complex, &act.maps[g], dict);
    rep.g = Some(g);
    rep.p_regular = act.group.is_p_regular(g, dict.p());
    if !rep.p_regular {
        rep.verdict = Verdict::Skipped;
        rep.reason = Some("element is not p-regular; values are informational".into());
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{CyclotomicField, Field};
    use crate::linalg::Matrix;

    fn perm_action(p: u64) -> ActionAssignment<ScalarContext> {
        let c = ScalarContext::new(p).unwrap();
        let l = Arc::new(PerfectComplex::concentrated(c.clone(), 0, 3));
        let cyc = Matrix::from_fn(3, 3, |i, j| if i == (j + 1) % 3 { c.one() } else { c.zero() });
        let maps = (0..3)
            .map(|k| {
                let m = cyc.pow(&c, k);
                ChainMap::from_fn(l.clone(), l.clone(), |_| m.clone()).unwrap()
            })
            .collect();
        ActionAssignment::strict(GroupTable::cyclic(3), l, maps)
    }

    #[test]
    fn c3_permutation_at_seven() {
        let act = perm_action(7);
        check_action_coherence(&act).unwrap();
        let rep = equivariant_report(&act, 10_000).unwrap();
        assert_eq!(rep.level, 3);
        let k = CyclotomicField::new(3);
        for r in &rep.reports {
            assert_eq!(r.verdict, Verdict::Equal);
            let expect = if r.g == Some(0) { 3 } else { 0 };
            assert_eq!(r.br.as_ref().unwrap(), &k.from_int(expect));
            assert_eq!(r.tr, k.from_int(expect));
        }
    }

    #[test]
    fn p_regular_flags_in_c6() {
        let c = ScalarContext::new(3).unwrap();
        let l = Arc::new(PerfectComplex::concentrated(c.clone(), 0, 1));
        let maps = (0..6)
            .map(|k| ChainMap::scalar(&l, &c.from_int(if k % 2 == 0 { 1 } else { -1 })))
            .collect();
        let act = ActionAssignment::strict(GroupTable::cyclic(6), l, maps);
        check_action_coherence(&act).unwrap();
        let rep = equivariant_report(&act, 10_000).unwrap();
        let regular: Vec<usize> = rep.reports.iter().filter(|r| r.p_regular).map(|r| r.g.unwrap()).collect();
        assert_eq!(regular, vec![0, 3]);
        assert!(rep.all_equal());
    }

    #[test]
    fn detects_broken_relation() {
        let mut act = perm_action(5);
        let l = act.complex.clone();
        let c = l.ring().clone();
        act.maps[2] = ChainMap::scalar(&l, &c.from_int(1));
        assert_eq!(check_action_coherence(&act), Err(CoherenceError::Pair { g: 1, h: 1 }));
    }
}
