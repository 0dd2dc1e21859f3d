//! Dense univariate polynomials over any [`Field`] handle.

use super::field::Field;

/// Coefficients in ascending degree; the leading coefficient is nonzero
/// unless the polynomial is zero (empty coefficient list).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> Poly<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|c| f.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        Self::new(f, vec![c])
    }

    /// x − a
    pub fn linear_root<F: Field<Elem = E>>(f: &F, a: &E) -> Self {
        Poly { coeffs: vec![f.neg(a), f.one()] }
    }

    /// x^n − 1
    pub fn x_pow_minus_one<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut c = vec![f.zero(); n + 1];
        c[0] = f.neg(&f.one());
        c[n] = f.add(&c[n], &f.one());
        Self::new(f, c)
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff<F: Field<Elem = E>>(&self, f: &F, i: usize) -> E {
        self.coeffs.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn map<F: Field, G: Fn(&E) -> F::Elem>(&self, target: &F, g: G) -> Poly<F::Elem> {
        Poly::new(target, self.coeffs.iter().map(g).collect())
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| f.add(&self.coeff(f, i), &other.coeff(f, i)))
            .collect();
        Self::new(f, c)
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| f.sub(&self.coeff(f, i), &other.coeff(f, i)))
            .collect();
        Self::new(f, c)
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Self {
        Self::new(f, self.coeffs.iter().map(|c| f.mul(c, s)).collect())
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = f.add(&c[i + j], &f.mul(a, b));
            }
        }
        Self::new(f, c)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem<F: Field<Elem = E>>(&self, f: &F, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = f.inv(divisor.leading().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + dd], &lead_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, d));
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(f, quot), Self::new(f, rem))
    }

    pub fn rem<F: Field<Elem = E>>(&self, f: &F, divisor: &Self) -> Self {
        self.div_rem(f, divisor).1
    }

    pub fn monic<F: Field<Elem = E>>(&self, f: &F) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.scale(f, &f.inv(l).unwrap()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Returns (g, s, t) with s·self + t·other = g, g monic.
    pub fn ext_gcd<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::constant(f, f.one()), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::constant(f, f.one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(f, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(f, &q.mul(f, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(f, &q.mul(f, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = f.inv(&l).unwrap();
                (r0.scale(f, &li), s0.scale(f, &li), t0.scale(f, &li))
            }
        }
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, x: &E) -> E {
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn derivative<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_int(i as i64)))
            .collect();
        Self::new(f, c)
    }

    /// self^e mod m
    pub fn pow_mod<F: Field<Elem = E>>(&self, f: &F, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(f, m);
        let mut acc = Self::constant(f, f.one()).rem(f, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base).rem(f, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base).rem(f, m);
            }
        }
        acc
    }
}
