//! The virtual character values Br and Tr and the per-automorphism verdict.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{nt, CyclotomicField, CyclotomicNumber, Field, ScalarContext, TeichmullerDictionary, MAX_DICTIONARY_LEVEL};
use crate::complexes::complex::sign;
use crate::complexes::{induced_on_cohomology, integral_cohomology, rational_cohomology, residue_cohomology, ChainMap, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::gauss::det;
use crate::linalg::{characteristic_polynomial, is_prime_to_p_automorphism, residue_spectrum, unity_level, Dvr, Matrix};

/// Ceiling on the iteration count when computing the order of the action on torsion.
pub const TORSION_ORDER_CEILING: u64 = 1_000_000;

/// Σ_i (−1)^i tr(γ | H^i(L) ⊗ K).
pub fn ordinary_virtual_trace<D: Dvr>(l: &PerfectComplex<D>, gamma: &ChainMap<D>) -> CyclotomicNumber {
    let r = l.ring();
    let total = rational_cohomology(l, Some(gamma)).iter().fold(r.zero(), |acc, h| {
        let t = h.induced.as_ref().unwrap().trace(r);
        if sign(h.degree) > 0 {
            r.add(&acc, &t)
        } else {
            r.sub(&acc, &t)
        }
    });
    r.to_cyclotomic(&total)
}

/// Br together with the exponents j of the residue eigenvalues ω^j per degree.
#[derive(Clone, Debug, PartialEq)]
pub struct BrauerValue {
    pub value: CyclotomicNumber,
    pub spectra: BTreeMap<i64, Vec<u64>>,
}

/// Σ_i (−1)^i Σ_j (Teichmüller lift of the j-th eigenvalue on H^i(L ⊗ k)).
pub fn brauer_virtual_character<D: Dvr>(
    l: &PerfectComplex<D>,
    gamma: &ChainMap<D>,
    dict: &TeichmullerDictionary,
) -> Result<BrauerValue> {
    let (kr, coh) = residue_cohomology(l, Some(gamma));
    let field = dict.field();
    let k = dict.cyclotomic_field();
    let mut value = k.zero();
    let mut spectra = BTreeMap::new();
    for h in coh {
        if h.dim == 0 {
            continue;
        }
        let m = h.induced.unwrap().try_map(|x| dict.embed_residue(&kr, l.ring().level(), x))?;
        let cp = characteristic_polynomial(field, &m);
        let exps = match residue_spectrum(dict, &cp) {
            Ok(e) => e,
            Err(Error::NonUnityRoots(n)) => {
                return Err(match unity_level(field, &cp, MAX_DICTIONARY_LEVEL) {
                    Some(need) if dict.level() % need != 0 => Error::DictionaryTooSmall {
                        needed: nt::lcm(need, dict.level()),
                        max: MAX_DICTIONARY_LEVEL,
                    },
                    _ => Error::NonUnityRoots(n),
                })
            }
            Err(e) => return Err(e),
        };
        let s = exps.iter().fold(k.zero(), |acc, &j| k.add(&acc, &k.zeta_pow(j)));
        value = if sign(h.degree) > 0 { k.add(&value, &s) } else { k.sub(&value, &s) };
        spectra.insert(h.degree, exps);
    }
    Ok(BrauerValue { value, spectra })
}

/// Sufficient criterion for γ inducing prime-to-p automorphisms on every
/// H^i(L): on torsion the induced automorphism has finite order prime to p,
/// on the free quotient its characteristic polynomial is a product of Φ_d
/// with p ∤ d.
pub fn prime_to_p_on_cohomology(l: &PerfectComplex<ScalarContext>, gamma: &ChainMap<ScalarContext>) -> Result<bool> {
    let ctx = l.ring();
    let mut h = integral_cohomology(l);
    induced_on_cohomology(gamma, &mut h);
    for deg in &h.degrees {
        let m = deg.induced.as_ref().unwrap();
        let t = deg.torsion.len();
        let n = deg.num_generators();
        if t > 0 {
            let tors = m.submatrix(0..t, 0..t);
            let reduced = tors.map(|x| ctx.residue_of(x));
            let kr = ctx.residue_field();
            if det(kr, &reduced.map(|&x| kr.constant(x))) == kr.zero() {
                return Err(Error::NotAutomorphism(deg.degree));
            }
            match torsion_order(ctx, &tors, &deg.torsion) {
                Some(ord) if ord % ctx.p() != 0 => {}
                _ => return Ok(false),
            }
        }
        if n > t {
            let free = m.submatrix(t..n, t..n);
            match is_prime_to_p_automorphism(&free, ctx) {
                Ok(true) => {}
                Ok(false) => return Ok(false),
                Err(Error::NotInvertible) => return Err(Error::NotAutomorphism(deg.degree)),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

/// Order of an automorphism of ⊕ A/p^{e_j}, by iterated multiplication with
/// canonical residues; `None` past the ceiling.
fn torsion_order(ctx: &ScalarContext, m: &Matrix<BigRational>, exps: &[u32]) -> Option<u64> {
    let t = exps.len();
    let moduli: Vec<BigInt> = exps.iter().map(|&e| BigInt::from(ctx.p()).pow(e)).collect();
    let canon = |rows: Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
        rows.into_iter()
            .enumerate()
            .map(|(j, row)| row.into_iter().map(|x| ((x % &moduli[j]) + &moduli[j]) % &moduli[j]).collect())
            .collect()
    };
    let base: Vec<Vec<BigInt>> = (0..t).map(|j| (0..t).map(|k| ctx.reduce_mod_power(m.get(j, k), exps[j])).collect()).collect();
    let is_identity = |a: &Vec<Vec<BigInt>>| {
        (0..t).all(|j| (0..t).all(|k| a[j][k] == if j == k { BigInt::one() % &moduli[j] } else { BigInt::zero() }))
    };
    let mut acc = base.clone();
    for k in 1..=TORSION_ORDER_CEILING {
        if is_identity(&acc) {
            return Some(k);
        }
        let next = (0..t)
            .map(|j| {
                (0..t)
                    .map(|c| (0..t).fold(BigInt::zero(), |s, l| s + &acc[j][l] * &base[l][c]))
                    .collect()
            })
            .collect();
        acc = canon(next);
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Unequal,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    pub p_regular: bool,
    #[serde(rename = "Br")]
    pub br: Option<CyclotomicNumber>,
    #[serde(rename = "Tr")]
    pub tr: CyclotomicNumber,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Exponents j of the residue eigenvalues ω^j (ε side) per degree.
    pub spectra: BTreeMap<i64, Vec<u64>>,
    /// Exponents j of the rational eigenvalues ζ^j (ξ side) per degree, when
    /// they are roots of unity of the dictionary's level.
    #[serde(default)]
    pub xi_spectra: BTreeMap<i64, Vec<u64>>,
}

/// Both sides of the identity for one automorphism; skipped (with reason)
/// when the hypotheses cannot be certified.
pub fn verify_theorem(
    l: &PerfectComplex<ScalarContext>,
    gamma: &ChainMap<ScalarContext>,
    dict: &TeichmullerDictionary,
) -> CharacterReport {
    let hyp = prime_to_p_on_cohomology(l, gamma);
    let tr = ordinary_virtual_trace(l, gamma).embed(dict.level()).expect("rational values embed");
    let br = brauer_virtual_character(l, gamma, dict);
    let xi_spectra = rational_cohomology(l, Some(gamma))
        .into_iter()
        .filter(|h| h.dim > 0)
        .filter_map(|h| {
            let cp = characteristic_polynomial(l.ring(), h.induced.as_ref().unwrap());
            crate::linalg::rational_spectrum(&cp, dict.level()).ok().map(|s| (h.degree, s))
        })
        .collect();
    let (verdict, reason) = match (&hyp, &br) {
        (Ok(true), Ok(b)) if b.value == tr => (Verdict::Equal, None),
        (Ok(true), Ok(_)) => (Verdict::Unequal, None),
        (Ok(false), _) => (Verdict::Skipped, Some("not certified prime to p on cohomology".to_string())),
        (Err(e), _) => (Verdict::Skipped, Some(e.to_string())),
        (Ok(true), Err(e)) => (Verdict::Skipped, Some(e.to_string())),
    };
    let (br, spectra) = match br {
        Ok(b) => (Some(b.value), b.spectra),
        Err(_) => (None, BTreeMap::new()),
    };
    CharacterReport { g: None, p_regular: true, br, tr, verdict, reason, spectra, xi_spectra }
}

/// Rational value as an element of Q(ζ_N).
pub fn rational_at_level(level: u64, n: i64) -> CyclotomicNumber {
    CyclotomicField::new(level).from_int(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ctx(p: u64) -> ScalarContext {
        ScalarContext::new(p).unwrap()
    }

    fn e1(p: u64) -> Arc<PerfectComplex<ScalarContext>> {
        let c = ctx(p);
        let d = Matrix::from_rows(vec![vec![c.from_int(p as i64)]], 1).unwrap();
        Arc::new(PerfectComplex::new(c, 0, vec![1, 1], vec![d]).unwrap())
    }

    fn degree_zero(c: &ScalarContext, rows: &[&[i64]]) -> (Arc<PerfectComplex<ScalarContext>>, ChainMap<ScalarContext>) {
        let n = rows.len();
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| c.from_int(x)).collect()).collect(), n).unwrap();
        let l = Arc::new(PerfectComplex::concentrated(c.clone(), 0, n));
        let g = ChainMap::from_fn(l.clone(), l.clone(), |_| m.clone()).unwrap();
        (l, g)
    }

    #[test]
    fn companion_of_phi3_at_seven() {
        let c = ctx(7);
        let (l, g) = degree_zero(&c, &[&[0, -1], &[1, -1]]);
        let dict = TeichmullerDictionary::build(&c, 3).unwrap();
        assert_eq!(ordinary_virtual_trace(&l, &g), rational_at_level(1, -1));
        let br = brauer_virtual_character(&l, &g, &dict).unwrap();
        assert_eq!(br.value, rational_at_level(3, -1));
        let rep = verify_theorem(&l, &g, &dict);
        assert_eq!(rep.verdict, Verdict::Equal);
    }

    #[test]
    fn e1_family() {
        let l = e1(7);
        let c = l.ring().clone();
        let d1 = TeichmullerDictionary::build(&c, 1).unwrap();
        let id = ChainMap::identity(&l);
        assert_eq!(ordinary_virtual_trace(&l, &id), rational_at_level(1, 0));
        assert_eq!(brauer_virtual_character(&l, &id, &d1).unwrap().value, rational_at_level(1, 0));
        let two = ChainMap::scalar(&l, &c.from_int(2));
        let d3 = TeichmullerDictionary::build(&c, 3).unwrap();
        let br = brauer_virtual_character(&l, &two, &d3).unwrap();
        assert_eq!(br.value, rational_at_level(3, 0));
        assert_eq!(br.spectra.get(&0), Some(&vec![2]));
        assert_eq!(br.spectra.get(&1), Some(&vec![2]));
        assert!(prime_to_p_on_cohomology(&l, &two).unwrap());
        assert_eq!(
            brauer_virtual_character(&l, &two, &d1),
            Err(Error::DictionaryTooSmall { needed: 3, max: MAX_DICTIONARY_LEVEL })
        );
    }

    #[test]
    fn prime_to_p_criterion() {
        let c = ctx(3);
        let (l, g) = degree_zero(&c, &[&[1, 0], &[0, 1]]);
        assert!(prime_to_p_on_cohomology(&l, &g).unwrap());
        let (l, g) = degree_zero(&c, &[&[0, -1], &[1, -1]]);
        assert!(!prime_to_p_on_cohomology(&l, &g).unwrap());
        // multiplication by 3 kills the torsion of E1 at p = 3
        let e = e1(3);
        let three = ChainMap::scalar(&e, &c.from_int(3));
        assert_eq!(prime_to_p_on_cohomology(&e, &three), Err(Error::NotAutomorphism(1)));
        // torsion Z/9 with γ = 4 has order 3, divisible by p
        let d = Matrix::from_rows(vec![vec![c.from_int(9)]], 1).unwrap();
        let l = Arc::new(PerfectComplex::new(c.clone(), 0, vec![1, 1], vec![d]).unwrap());
        assert!(!prime_to_p_on_cohomology(&l, &ChainMap::scalar(&l, &c.from_int(4))).unwrap());
        assert!(prime_to_p_on_cohomology(&l, &ChainMap::scalar(&l, &c.from_int(-1))).unwrap());
    }

    #[test]
    fn zero_complex() {
        let c = ctx(5);
        let l = Arc::new(PerfectComplex::zero(c.clone()));
        let d = TeichmullerDictionary::build(&c, 1).unwrap();
        let rep = verify_theorem(&l, &ChainMap::identity(&l), &d);
        assert_eq!(rep.verdict, Verdict::Equal);
        assert_eq!(rep.tr, rational_at_level(1, 0));
    }
}
