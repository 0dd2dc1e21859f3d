//! Cyclotomic polynomials and exact arithmetic in Q(ζ_N).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{Field, RationalField};
use super::nt;
use super::poly::Poly;
use crate::error::{Error, Result};

fn cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer polynomial product.
fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

/// Exact division by a monic integer polynomial.
fn int_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        for (j, d) in b.iter().enumerate() {
            r[k + j] -= &c * d;
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    q
}

fn x_pow_minus_one(d: u64) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); d as usize + 1];
    v[0] = -BigInt::one();
    v[d as usize] = BigInt::one();
    v
}

/// The N-th cyclotomic polynomial Φ_N (ascending integer coefficients),
/// computed as ∏_{d | N} (x^d − 1)^{μ(N/d)}.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic level must be positive");
    if let Some(c) = cache().lock().unwrap().get(&n) {
        return c.clone();
    }
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in nt::divisors(n) {
        match nt::mobius(n / d) {
            1 => num = int_mul(&num, &x_pow_minus_one(d)),
            -1 => den = int_mul(&den, &x_pow_minus_one(d)),
            _ => {}
        }
    }
    let phi = Arc::new(int_div_exact(&num, &den));
    cache().lock().unwrap().insert(n, phi.clone());
    phi
}

/// Φ_N as a rational polynomial.
pub fn cyclotomic_poly_q(n: u64) -> Poly<BigRational> {
    let f = RationalField;
    Poly::new(
        &f,
        cyclotomic_polynomial(n)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    )
}

/// An element of Q(ζ_N) in the power basis 1, ζ, …, ζ^{φ(N)−1}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    level: u64,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn from_rational(level: u64, r: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); nt::euler_phi(level) as usize];
        coeffs[0] = r;
        CyclotomicNumber { level, coeffs }
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    /// Re-express in Q(ζ_M) for N | M, using ζ_N = ζ_M^{M/N}.
    pub fn embed(&self, target: u64) -> Result<Self> {
        if target % self.level != 0 {
            return Err(Error::Shape(format!(
                "cannot embed level {} into level {}",
                self.level, target
            )));
        }
        if target == self.level {
            return Ok(self.clone());
        }
        let step = (target / self.level) as usize;
        let field = CyclotomicField::new(target);
        let mut raw = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        Ok(field.reduce(raw))
    }

    /// Common denominator d > 0 and integer numerators with self = a(ζ)/d.
    pub fn split_denominator(&self) -> (Vec<BigInt>, BigInt) {
        let d = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&d / c.denom()))
            .collect();
        (nums, d)
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("({c})·ζ{}", self.level),
                _ => format!("({c})·ζ{}^{i}", self.level),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicWire {
    #[serde(rename = "N")]
    level: u64,
    coeffs: Vec<String>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CyclotomicWire {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = CyclotomicWire::deserialize(d)?;
        if w.level == 0 {
            return Err(D::Error::custom("level must be positive"));
        }
        let coeffs = w
            .coeffs
            .iter()
            .map(|s| s.parse::<BigRational>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CyclotomicField::new(w.level).reduce(coeffs))
    }
}

/// Q(ζ_N) presented as Q[x]/(Φ_N).
#[derive(Clone, PartialEq, Eq)]
pub struct CyclotomicField {
    level: u64,
    modulus: Arc<Vec<BigInt>>,
}

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(ζ{})", self.level)
    }
}

impl CyclotomicField {
    pub fn new(level: u64) -> Self {
        CyclotomicField { level, modulus: cyclotomic_polynomial(level) }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn phi(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Reduce an arbitrary coefficient vector modulo Φ_N.
    pub fn reduce(&self, mut raw: Vec<BigRational>) -> CyclotomicNumber {
        let phi = self.phi();
        while raw.len() > phi {
            let top = raw.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = raw.len() - phi;
            for (i, m) in self.modulus.iter().take(phi).enumerate() {
                if !m.is_zero() {
                    raw[shift + i] -= &top * BigRational::from_integer(m.clone());
                }
            }
        }
        raw.resize(phi, BigRational::zero());
        CyclotomicNumber { level: self.level, coeffs: raw }
    }

    /// ζ_N^j
    pub fn zeta_pow(&self, j: u64) -> CyclotomicNumber {
        let j = (j % self.level) as usize;
        let mut raw = vec![BigRational::zero(); j + 1];
        raw[j] = BigRational::one();
        self.reduce(raw)
    }

    pub fn from_rational(&self, r: BigRational) -> CyclotomicNumber {
        CyclotomicNumber::from_rational(self.level, r)
    }

    pub fn from_coeffs(&self, coeffs: Vec<BigRational>) -> CyclotomicNumber {
        self.reduce(coeffs)
    }

    /// Bring an element of a dividing level into this field.
    pub fn coerce(&self, x: &CyclotomicNumber) -> Result<CyclotomicNumber> {
        x.embed(self.level)
    }

    fn as_poly(&self, x: &CyclotomicNumber) -> Poly<BigRational> {
        Poly::new(&RationalField, x.coeffs.clone())
    }
}

impl Field for CyclotomicField {
    type Elem = CyclotomicNumber;

    fn zero(&self) -> CyclotomicNumber {
        self.from_rational(BigRational::zero())
    }
    fn one(&self) -> CyclotomicNumber {
        self.from_rational(BigRational::one())
    }
    fn from_int(&self, n: i64) -> CyclotomicNumber {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }
    fn add(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        debug_assert_eq!(a.level, self.level);
        debug_assert_eq!(b.level, self.level);
        CyclotomicNumber {
            level: self.level,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
    fn sub(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        CyclotomicNumber {
            level: self.level,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
    fn neg(&self, a: &CyclotomicNumber) -> CyclotomicNumber {
        CyclotomicNumber { level: self.level, coeffs: a.coeffs.iter().map(|x| -x).collect() }
    }
    fn mul(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        debug_assert_eq!(a.level, self.level);
        debug_assert_eq!(b.level, self.level);
        if self.phi() == 1 {
            return self.from_rational(&a.coeffs[0] * &b.coeffs[0]);
        }
        let mut raw = vec![BigRational::zero(); 2 * self.phi() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        self.reduce(raw)
    }
    fn inv(&self, a: &CyclotomicNumber) -> Option<CyclotomicNumber> {
        if self.is_zero(a) {
            return None;
        }
        if let Some(r) = a.as_rational() {
            return Some(self.from_rational(r.recip()));
        }
        let q = RationalField;
        let (g, s, _) = self.as_poly(a).ext_gcd(&q, &cyclotomic_poly_q(self.level));
        debug_assert_eq!(g.degree(), Some(0));
        Some(self.reduce(s.into_coeffs()))
    }
    fn is_zero(&self, a: &CyclotomicNumber) -> bool {
        a.coeffs.iter().all(Zero::is_zero)
    }
}

/// A square root of the rational `d` inside some cyclotomic field Q(ζ_M)
/// with p ∤ M, via quadratic Gauss sums. Returns (M, √d).
pub fn sqrt_in_cyclotomic(d: &BigRational, p: u64) -> Option<(u64, CyclotomicNumber)> {
    if d.is_zero() {
        return Some((1, CyclotomicNumber::from_rational(1, BigRational::zero())));
    }
    // d = sign · (a/b)^2 · m with m squarefree
    let num = d.numer().abs() * d.denom();
    let num_u: u128 = num.clone().try_into().ok()?;
    let mut square = BigInt::one();
    let mut m: u64 = 1;
    for (q, e) in nt::factorize(num_u) {
        square *= BigInt::from(q).pow(e / 2);
        if e % 2 == 1 {
            m = m.checked_mul(u64::try_from(q).ok()?)?;
        }
    }
    let scale = BigRational::new(square, d.denom().clone());
    // √(q*) for odd primes q, √2 and i; q* = (−1)^{(q−1)/2} q
    let mut level = 1u64;
    let mut parts: Vec<(u64, CyclotomicNumber)> = Vec::new();
    let mut flips = 0u32; // number of factors of −1 picked up
    for (q, _) in nt::factorize(m as u128) {
        let q = q as u64;
        if q == 2 {
            let f = CyclotomicField::new(8);
            parts.push((8, f.add(&f.zeta_pow(1), &f.zeta_pow(7))));
            level = nt::lcm(level, 8);
        } else {
            let f = CyclotomicField::new(q);
            let mut g = f.zero();
            for a in 1..q {
                let leg = legendre(a, q);
                let term = f.zeta_pow(a);
                g = if leg == 1 { f.add(&g, &term) } else { f.sub(&g, &term) };
            }
            if q % 4 == 3 {
                flips += 1;
            }
            parts.push((q, g));
            level = nt::lcm(level, q);
        }
    }
    let negative = d.is_negative();
    // product of parts squares to (−1)^flips · m; fix the sign with i
    if (flips % 2 == 1) != negative {
        level = nt::lcm(level, 4);
        parts.push((4, CyclotomicField::new(4).zeta_pow(1)));
    }
    if level % p == 0 {
        return None;
    }
    let field = CyclotomicField::new(level);
    let mut root = field.from_rational(scale);
    for (_, part) in parts {
        root = field.mul(&root, &part.embed(level).ok()?);
    }
    let target = field.from_rational(d.clone());
    (field.mul(&root, &root) == target).then_some((level, root))
}

fn legendre(a: u64, q: u64) -> i32 {
    let mut r = 1u64;
    let mut base = a % q;
    let mut e = (q - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}
