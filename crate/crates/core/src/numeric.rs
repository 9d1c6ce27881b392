//! Exact arithmetic: prime fields, small extension fields with Frobenius,
//! p-adic valuations of integers and rationals.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic in `F_p` on `u32` residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > 65_521 {
            return Err(Error::cap("characteristic", p as u64, 65_521));
        }
        Ok(PrimeField { p })
    }

    /// For a `p` already known to be prime.
    pub(crate) fn unchecked(p: u32) -> Self {
        PrimeField { p }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a % self.p == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    pub fn from_i64(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    pub fn from_bigint(&self, a: &BigInt) -> u32 {
        let m = BigInt::from(self.p);
        a.mod_floor(&m).to_u32().expect("residue fits in u32")
    }

    /// Reduces a p-integral rational modulo p.
    pub fn from_rational(&self, a: &BigRational) -> Result<u32> {
        let num = self.from_bigint(a.numer());
        let den = self.from_bigint(a.denom());
        if den == 0 {
            return Err(Error::Integrality(format!(
                "{a} is not {}-integral",
                self.p
            )));
        }
        Ok(self.mul(num, self.inv(den)?))
    }
}

/// Description of the finite field `F_{p^e} = F_p[t]/(f(t))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    p: u32,
    degree: u32,
    /// Monic defining polynomial, low degree first, length `degree + 1`.
    modulus: Vec<u32>,
}

/// Default refusal threshold on `p^e`.
pub const DEFAULT_FIELD_CAP: u64 = 81;

impl FieldDescriptor {
    pub fn prime(p: u32) -> Result<Arc<Self>> {
        PrimeField::new(p)?;
        Ok(Arc::new(FieldDescriptor {
            p,
            degree: 1,
            modulus: vec![0, 1],
        }))
    }

    /// `F_p[t]/(modulus)`, with the modulus given low degree first and checked
    /// for irreducibility.
    pub fn extension(p: u32, modulus: Vec<u32>) -> Result<Arc<Self>> {
        Self::extension_capped(p, modulus, DEFAULT_FIELD_CAP)
    }

    pub fn extension_capped(p: u32, modulus: Vec<u32>, cap: u64) -> Result<Arc<Self>> {
        let fp = PrimeField::new(p)?;
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must lie in [0, p)".into()));
        }
        let degree = (modulus.len() - 1) as u32;
        let size = (p as u64).checked_pow(degree).unwrap_or(u64::MAX);
        if size > cap {
            return Err(Error::cap("field size p^e", size, cap));
        }
        if !is_irreducible(&fp, &modulus) {
            return Err(Error::InvalidField(format!(
                "{} is reducible over F_{p}",
                format_poly(&modulus)
            )));
        }
        Ok(Arc::new(FieldDescriptor { p, degree, modulus }))
    }

    /// The shipped defaults: `F_4 = F_2[t]/(t^2+t+1)`, `F_8 = F_2[t]/(t^3+t+1)`,
    /// `F_9 = F_3[t]/(t^2+1)`; other sizes use the lexicographically first
    /// irreducible monic polynomial.
    pub fn default_extension(p: u32, degree: u32) -> Result<Arc<Self>> {
        if degree == 1 {
            return Self::prime(p);
        }
        let modulus = match (p, degree) {
            (2, 2) => vec![1, 1, 1],
            (2, 3) => vec![1, 1, 0, 1],
            (3, 2) => vec![1, 0, 1],
            _ => {
                let fp = PrimeField::new(p)?;
                let size = (p as u64).checked_pow(degree).unwrap_or(u64::MAX);
                if size > DEFAULT_FIELD_CAP {
                    return Err(Error::cap("field size p^e", size, DEFAULT_FIELD_CAP));
                }
                monic_polys(p, degree)
                    .find(|f| is_irreducible(&fp, f))
                    .ok_or_else(|| Error::InvalidField("no irreducible polynomial".into()))?
            }
        };
        Self::extension(p, modulus)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u64 {
        (self.p as u64).pow(self.degree)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn prime_field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(
                f,
                "F_{}[t]/({})",
                self.p,
                format_poly(&self.modulus)
            )
        }
    }
}

fn format_poly(c: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        };
        parts.push(match (a, i) {
            (_, 0) => a.to_string(),
            (1, _) => mono,
            _ => format!("{a}{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

fn monic_polys(p: u32, degree: u32) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(degree);
    (0..count).map(move |mut idx| {
        let mut v = Vec::with_capacity(degree as usize + 1);
        for _ in 0..degree {
            v.push((idx % p as u64) as u32);
            idx /= p as u64;
        }
        v.push(1);
        v
    })
}

fn poly_rem(fp: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = fp.inv(b[db]).expect("nonzero leading coefficient");
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let q = fp.mul(top, lead_inv);
            let shift = r.len() - 1 - db;
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = fp.sub(r[shift + i], fp.mul(q, bc));
            }
        }
        r.pop();
    }
    r
}

/// Brute-force irreducibility test: no monic factor of degree `1..=deg/2`.
fn is_irreducible(fp: &PrimeField, f: &[u32]) -> bool {
    let deg = (f.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for g in monic_polys(fp.p(), d) {
            if poly_rem(fp, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Element of `F_{p^e}`, stored as its coefficient vector over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    desc: Arc<FieldDescriptor>,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.desc.degree == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            write!(f, "{}", format_poly(&self.coeffs))
        }
    }
}

impl FieldElem {
    pub fn new(desc: &Arc<FieldDescriptor>, coeffs: &[u32]) -> Result<Self> {
        if coeffs.len() > desc.degree as usize {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients given for a degree-{} field",
                coeffs.len(),
                desc.degree
            )));
        }
        let mut c = vec![0; desc.degree as usize];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = v % desc.p;
        }
        Ok(FieldElem {
            desc: desc.clone(),
            coeffs: c,
        })
    }

    /// The image of an integer under `Z -> F_p -> F_{p^e}`.
    pub fn from_int(desc: &Arc<FieldDescriptor>, a: i64) -> Self {
        let mut c = vec![0; desc.degree as usize];
        c[0] = desc.prime_field().from_i64(a);
        FieldElem {
            desc: desc.clone(),
            coeffs: c,
        }
    }

    pub fn zero(desc: &Arc<FieldDescriptor>) -> Self {
        Self::from_int(desc, 0)
    }

    pub fn one(desc: &Arc<FieldDescriptor>) -> Self {
        Self::from_int(desc, 1)
    }

    /// The generator `t` of the extension (equal to `0` for a prime field).
    pub fn generator(desc: &Arc<FieldDescriptor>) -> Self {
        if desc.degree == 1 {
            return Self::zero(desc);
        }
        let mut c = vec![0; desc.degree as usize];
        c[1] = 1;
        FieldElem {
            desc: desc.clone(),
            coeffs: c,
        }
    }

    /// All `p^e` elements in a fixed order (little-endian base-p counting).
    pub fn all(desc: &Arc<FieldDescriptor>) -> Vec<FieldElem> {
        let p = desc.p as u64;
        (0..desc.size())
            .map(|mut idx| {
                let mut c = vec![0; desc.degree as usize];
                for slot in c.iter_mut() {
                    *slot = (idx % p) as u32;
                    idx /= p;
                }
                FieldElem {
                    desc: desc.clone(),
                    coeffs: c,
                }
            })
            .collect()
    }

    pub fn descriptor(&self) -> &Arc<FieldDescriptor> {
        &self.desc
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// The residue of an element of the prime field.
    pub fn as_prime(&self) -> Option<u32> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &FieldElem) -> Result<()> {
        if Arc::ptr_eq(&self.desc, &other.desc) || self.desc == other.desc {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!("{} vs {}", self.desc, other.desc)))
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn neg(&self) -> FieldElem {
        let fp = self.desc.prime_field();
        FieldElem {
            desc: self.desc.clone(),
            coeffs: self.coeffs.iter().map(|&c| fp.neg(c)).collect(),
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a^{q-2} = a^{-1} in F_q
        Ok(self.pow(self.desc.size() - 2))
    }

    pub(crate) fn add_unchecked(&self, other: &FieldElem) -> FieldElem {
        let fp = self.desc.prime_field();
        FieldElem {
            desc: self.desc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| fp.add(a, b))
                .collect(),
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &FieldElem) -> FieldElem {
        let fp = self.desc.prime_field();
        let e = self.desc.degree as usize;
        if e == 1 {
            return FieldElem {
                desc: self.desc.clone(),
                coeffs: vec![fp.mul(self.coeffs[0], other.coeffs[0])],
            };
        }
        let mut prod = vec![0u32; 2 * e - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = fp.add(prod[i + j], fp.mul(a, b));
            }
        }
        let mut r = poly_rem(&fp, &prod, &self.desc.modulus);
        r.resize(e, 0);
        FieldElem {
            desc: self.desc.clone(),
            coeffs: r,
        }
    }

    /// Multiplication by an integer (through `Z -> F_p`).
    pub fn scale(&self, c: u32) -> FieldElem {
        let fp = self.desc.prime_field();
        FieldElem {
            desc: self.desc.clone(),
            coeffs: self.coeffs.iter().map(|&a| fp.mul(a, c % fp.p())).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> FieldElem {
        let mut base = self.clone();
        let mut acc = FieldElem::one(&self.desc);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// `a -> a^p`.
    pub fn frobenius(&self) -> FieldElem {
        self.pow(self.desc.p as u64)
    }

    /// The unique `b` with `b^p = a`, namely `a^{p^{e-1}}`.
    pub fn frobenius_inverse(&self) -> FieldElem {
        let mut r = self.clone();
        for _ in 1..self.desc.degree {
            r = r.frobenius();
        }
        r
    }
}

/// `v_p(n)` for a nonzero integer; `None` for zero.
pub fn valuation_int(n: &BigInt, p: u32) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        m = q;
    }
}

/// A reduced rational number with p-adic valuation bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PRational(pub BigRational);

impl PRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(PRational(BigRational::new(num, den)))
    }

    pub fn from_int(n: i64) -> Self {
        PRational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// `v_p(num) - v_p(den)`; `None` for zero.
    pub fn valuation(&self, p: u32) -> Option<i64> {
        let vn = valuation_int(self.0.numer(), p)? as i64;
        let vd = valuation_int(self.0.denom(), p).unwrap_or(0) as i64;
        Some(vn - vd)
    }

    pub fn is_p_integral(&self, p: u32) -> bool {
        self.valuation(p).is_none_or(|v| v >= 0)
    }

    /// Canonical form: denominator positive and coprime to the numerator.
    pub fn is_canonical(&self) -> bool {
        self.0.denom().is_positive() && self.0.numer().gcd(self.0.denom()).is_one()
    }
}

impl fmt::Display for PRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `v_p(m!) = (m - s_p(m)) / (p - 1)` where `s_p` is the base-p digit sum.
pub fn factorial_valuation(m: u64, p: u32) -> u64 {
    let p = p as u64;
    let mut digit_sum = 0;
    let mut k = m;
    while k > 0 {
        digit_sum += k % p;
        k /= p;
    }
    (m - digit_sum) / (p - 1)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Base-p digits of `m`, least significant first, padded to `len`.
pub fn digits(mut m: u64, p: u32, len: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(len);
    for _ in 0..len {
        d.push((m % p as u64) as u32);
        m /= p as u64;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(f3.inv(2).unwrap(), 2);
        assert!(f3.inv(0).is_err());
        assert!(PrimeField::new(4).is_err());
    }

    #[test]
    fn f4_multiplication_reduces() {
        let f4 = FieldDescriptor::default_extension(2, 2).unwrap();
        let t = FieldElem::generator(&f4);
        let tt = t.mul(&t).unwrap();
        assert_eq!(tt.coeffs(), &[1, 1]);
        assert_eq!(t.frobenius(), tt);
        assert_eq!(tt.frobenius_inverse(), t);
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        assert_eq!(FieldElem::one(&f2).frobenius(), FieldElem::one(&f2));
        let f3 = FieldDescriptor::prime(3).unwrap();
        let two = FieldElem::from_int(&f3, 2);
        assert_eq!(two.frobenius(), two);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 + 1 = (t+1)^2 over F_2
        assert!(FieldDescriptor::extension(2, vec![1, 0, 1]).is_err());
        // t^2 + 1 is irreducible over F_3
        assert!(FieldDescriptor::extension(3, vec![1, 0, 1]).is_ok());
        // not monic
        assert!(FieldDescriptor::extension(3, vec![1, 0, 2]).is_err());
    }

    #[test]
    fn field_cap_refuses_large_fields() {
        let err = FieldDescriptor::default_extension(2, 7).unwrap_err();
        assert!(err.is_cap());
    }

    #[test]
    fn descriptor_mismatch_is_an_error() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let f3 = FieldDescriptor::prime(3).unwrap();
        let a = FieldElem::one(&f2);
        let b = FieldElem::one(&f3);
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch(_))));
        assert!(matches!(FieldElem::zero(&f2).inv(), Err(Error::DivisionByZero)));
    }

    fn field_list() -> Vec<Arc<FieldDescriptor>> {
        let mut out = Vec::new();
        for p in [2u32, 3, 5, 7] {
            for e in 1..=6 {
                if (p as u64).pow(e) <= 81 {
                    out.push(FieldDescriptor::default_extension(p, e).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn field_axioms_exhaustive() {
        for desc in field_list() {
            let els = FieldElem::all(&desc);
            let zero = FieldElem::zero(&desc);
            let one = FieldElem::one(&desc);
            for a in &els {
                assert_eq!(a.add(&zero).unwrap(), *a);
                assert_eq!(a.mul(&one).unwrap(), *a);
                assert!(a.add(&a.neg()).unwrap().is_zero());
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), one, "{desc}");
                }
                for b in &els {
                    assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                }
            }
            // associativity and distributivity are cubic; sample a stride for the bigger fields
            let stride = if els.len() > 27 { 7 } else { 1 };
            for a in els.iter().step_by(stride) {
                for b in els.iter() {
                    for c in els.iter().step_by(stride) {
                        let l = a.mul(&b.add(c).unwrap()).unwrap();
                        let r = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
                        assert_eq!(l, r);
                        assert_eq!(
                            a.mul(&b.mul(c).unwrap()).unwrap(),
                            a.mul(b).unwrap().mul(c).unwrap()
                        );
                        assert_eq!(
                            a.add(&b.add(c).unwrap()).unwrap(),
                            a.add(b).unwrap().add(c).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_inverse_exhaustive() {
        for desc in field_list() {
            for a in FieldElem::all(&desc) {
                assert_eq!(a.frobenius().frobenius_inverse(), a);
                assert_eq!(a.frobenius_inverse().frobenius(), a);
            }
        }
    }

    fn brute_factorial_valuation(m: u64, p: u32) -> u64 {
        (1..=m)
            .map(|k| valuation_int(&BigInt::from(k), p).unwrap())
            .sum()
    }

    #[test]
    fn factorial_valuation_examples() {
        assert_eq!(factorial_valuation(4, 2), 3);
        assert_eq!(factorial_valuation(0, 2), 0);
        assert_eq!(factorial_valuation(10, 3), 4);
        for p in [2, 3, 5] {
            for m in 0..=200 {
                assert_eq!(factorial_valuation(m, p), brute_factorial_valuation(m, p));
                assert_eq!(
                    factorial_valuation(m, p),
                    valuation_int(&factorial(m), p).unwrap()
                );
            }
        }
    }

    #[test]
    fn rational_valuation() {
        let r = PRational::new(BigInt::from(12), BigInt::from(-10)).unwrap();
        assert!(r.is_canonical());
        assert_eq!(r.valuation(2), Some(1));
        assert_eq!(r.valuation(5), Some(-1));
        assert!(!r.is_p_integral(5));
        assert_eq!(PRational::from_int(0).valuation(3), None);
        let f5 = PrimeField::new(5).unwrap();
        // 1/2 = 3 mod 5
        assert_eq!(
            f5.from_rational(&BigRational::new(1.into(), 2.into())).unwrap(),
            3
        );
    }

    proptest::proptest! {
        #[test]
        fn rational_ops_stay_canonical(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500) {
            let x = PRational::new(a.into(), b.into()).unwrap();
            let y = PRational::new(c.into(), d.into()).unwrap();
            for z in [x.0.clone() + y.0.clone(), x.0.clone() * y.0.clone(), x.0.clone() - y.0.clone()] {
                proptest::prop_assert!(PRational(z).is_canonical());
            }
        }
    }
}
