use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use perfbr_core::arith::{
    cyclo::cyclotomic_poly_q, nt, CyclotomicField, Field, Poly, RationalField, ScalarContext, TeichmullerDictionary,
};
use perfbr_core::characters::{brauer_virtual_character, choose_level, ordinary_virtual_trace};
use perfbr_core::complexes::{integral_cohomology, perturb, residue_cohomology, Homotopy, PerfectComplex};
use perfbr_core::harness::{generate_action, GeneratorParams, Mode};
use perfbr_core::linalg::{characteristic_polynomial, smith_normal_form, Matrix};

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn p_local_matrix(p: u64, rows: usize, cols: usize) -> impl Strategy<Value = Matrix<BigRational>> {
    prop::collection::vec((-6i64..=6, 0u32..=3), rows * cols).prop_map(move |cells| {
        let data = cells
            .into_iter()
            .map(|(u, v)| BigRational::from_integer(BigInt::from(u) * BigInt::from(p).pow(v)))
            .collect();
        Matrix::new(rows, cols, data).unwrap()
    })
}

fn sized_matrix() -> impl Strategy<Value = (u64, Matrix<BigRational>)> {
    (0usize..4, 1usize..=6, 1usize..=6).prop_flat_map(|(k, r, c)| {
        let p = PRIMES[k];
        p_local_matrix(p, r, c).prop_map(move |m| (p, m))
    })
}

fn instance() -> impl Strategy<Value = GeneratorParams> {
    (1u64..500, 0usize..6, any::<bool>()).prop_map(|(seed, k, strict)| {
        let (p, n) = [(2, 3), (3, 4), (5, 4), (5, 6), (7, 3), (7, 6)][k];
        GeneratorParams::new(seed, p, n, if strict { Mode::Strict } else { Mode::General })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_factors_and_sorts((p, m) in sized_matrix()) {
        let ctx = ScalarContext::new(p).unwrap();
        let s = smith_normal_form(&ctx, &m);
        prop_assert_eq!(s.u.mul(&ctx, &s.diagonal(&ctx)).mul(&ctx, &s.v), m.clone());
        prop_assert_eq!(s.u.mul(&ctx, &s.u_inv), Matrix::identity(&ctx, m.rows()));
        prop_assert_eq!(s.v.mul(&ctx, &s.v_inv), Matrix::identity(&ctx, m.cols()));
        prop_assert!(s.exponents.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn snf_of_transpose_has_same_exponents((p, m) in sized_matrix()) {
        let ctx = ScalarContext::new(p).unwrap();
        prop_assert_eq!(smith_normal_form(&ctx, &m).exponents, smith_normal_form(&ctx, &m.transpose()).exponents);
    }

    #[test]
    fn cayley_hamilton(entries in prop::collection::vec(-5i64..=5, 16), n in 1usize..=4) {
        let f = RationalField;
        let m = Matrix::from_fn(n, n, |i, j| f.from_int(entries[i * 4 + j]));
        let cp = characteristic_polynomial(&f, &m);
        let mut acc = Matrix::zeros(&f, n, n);
        for c in cp.coeffs().iter().rev() {
            acc = acc.mul(&f, &m).add(&f, &Matrix::scalar(&f, n, c));
        }
        prop_assert!(acc.is_zero(&f));
        prop_assert_eq!(cp.coeff(&f, n - 1), f.neg(&m.trace(&f)));
    }

    #[test]
    fn cyclotomic_product_is_x_n_minus_one(n in 1u64..=60) {
        let f = RationalField;
        let prod = nt::divisors(n).iter().fold(Poly::constant(&f, f.one()), |acc, &d| acc.mul(&f, &cyclotomic_poly_q(d)));
        prop_assert_eq!(prod, Poly::x_pow_minus_one(&f, n as usize));
    }

    #[test]
    fn dictionary_lift_is_multiplicative(k in 0usize..4, n in 1u64..=40, a in 0u64..40, b in 0u64..40) {
        let p = PRIMES[k];
        prop_assume!(nt::gcd(n, p) == 1);
        let dict = TeichmullerDictionary::build(&ScalarContext::new(p).unwrap(), n).unwrap();
        let kf = dict.field();
        let cyc = CyclotomicField::new(n);
        let (wa, wb) = (dict.omega_pow(a).clone(), dict.omega_pow(b).clone());
        prop_assert_eq!(dict.lift(&kf.mul(&wa, &wb)).unwrap(), cyc.mul(&dict.lift(&wa).unwrap(), &dict.lift(&wb).unwrap()));
        prop_assert_eq!(dict.reduce(&dict.lift(&wa).unwrap()).unwrap(), wa);
    }

    #[test]
    fn euler_characteristic_and_universal_coefficients(params in instance()) {
        let act = generate_action(&params).unwrap();
        let l = &act.complex;
        let h = integral_cohomology(l);
        let (_, res) = residue_cohomology(l, None);
        let sign = |i: i64| if i.rem_euclid(2) == 0 { 1 } else { -1 };
        let chi: i64 = h.degrees.iter().map(|d| sign(d.degree) * d.free_rank as i64).sum();
        prop_assert_eq!(chi, l.euler_characteristic());
        for r in &res {
            let here = h.get(r.degree).map_or(0, |d| d.free_rank + d.torsion.len());
            let above = h.get(r.degree + 1).map_or(0, |d| d.torsion.len());
            prop_assert_eq!(r.dim, here + above, "degree {}", r.degree);
        }
    }

    #[test]
    fn characters_are_homotopy_invariant_additive_and_shift_odd(params in instance(), entries in prop::collection::vec(-3i64..=3, 64)) {
        let act = generate_action(&params).unwrap();
        let l = &act.complex;
        let ctx = l.ring().clone();
        let dict = TeichmullerDictionary::build(&ctx, choose_level(&act, 240).unwrap()).unwrap();
        let gamma = &act.maps[1 % act.group.order()];
        let br = brauer_virtual_character(l, gamma, &dict).unwrap().value;
        let tr = ordinary_virtual_trace(l, gamma);

        let mut k = 0;
        let t = Homotopy::from_fn(l.clone(), l.clone(), |i| {
            Matrix::from_fn(l.rank(i - 1), l.rank(i), |_, _| {
                k += 1;
                ctx.from_int(entries[k % entries.len()])
            })
        }).unwrap();
        let moved = perturb(gamma, &t);
        prop_assert_eq!(&brauer_virtual_character(l, &moved, &dict).unwrap().value, &br);
        prop_assert_eq!(&ordinary_virtual_trace(l, &moved), &tr);

        let doubled = gamma.direct_sum(gamma);
        let kf = CyclotomicField::new(br.level());
        prop_assert_eq!(brauer_virtual_character(doubled.source(), &doubled, &dict).unwrap().value, kf.add(&br, &br));
        let kt = CyclotomicField::new(tr.level());
        prop_assert_eq!(ordinary_virtual_trace(doubled.source(), &doubled), kt.add(&tr, &tr));

        let shifted = gamma.shift(1);
        prop_assert_eq!(brauer_virtual_character(shifted.source(), &shifted, &dict).unwrap().value, kf.neg(&br));
        prop_assert_eq!(ordinary_virtual_trace(shifted.source(), &shifted), kt.neg(&tr));
    }
}

#[test]
fn concentrated_complex_has_free_cohomology() {
    let ctx = ScalarContext::new(5).unwrap();
    let l = Arc::new(PerfectComplex::concentrated(ctx, 2, 3));
    let h = integral_cohomology(&l);
    assert_eq!(h.get(2).unwrap().free_rank, 3);
    assert!(!h.has_torsion());
}
