use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ScalarError;

/// Default characteristic for computations: the usual computer-algebra prime.
pub const DEFAULT_PRIME: u32 = 32003;

/// Which exact field a computation runs over. Embedded in every certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldDescriptor {
    Prime(u32),
    Rational,
}

impl Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Prime(p) => write!(f, "prime:{p}"),
            FieldDescriptor::Rational => f.write_str("rational"),
        }
    }
}

impl core::str::FromStr for FieldDescriptor {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "rational" || s == "Q" {
            return Ok(FieldDescriptor::Rational);
        }
        let digits = s.strip_prefix("prime:").unwrap_or(s);
        let p: u64 = digits
            .parse()
            .map_err(|_| ScalarError::BadFieldSpec(s.to_string()))?;
        PrimeField::new(p).map(|f| FieldDescriptor::Prime(f.modulus()))
    }
}

/// Arithmetic of an exact field. Elements are plain values; the field object
/// carries whatever runtime data the arithmetic needs (the modulus for `F_p`).
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Send + Sync + 'static;

    fn descriptor(&self) -> FieldDescriptor;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` exactly when `a` is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Parses an integer or a fraction `a/b`.
    fn parse_elem(&self, s: &str) -> Option<Self::Elem>;
    fn format_elem(&self, a: &Self::Elem) -> String;
    /// Canonical byte encoding, used for content hashing.
    fn encode_elem(&self, a: &Self::Elem, out: &mut Vec<u8>);

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `dst += c * src`.
    fn axpy(&self, dst: &mut [Self::Elem], c: &Self::Elem, src: &[Self::Elem]) {
        debug_assert_eq!(dst.len(), src.len());
        if self.is_zero(c) {
            return;
        }
        for (d, s) in dst.iter_mut().zip(src) {
            if !self.is_zero(s) {
                *d = self.add(d, &self.mul(c, s));
            }
        }
    }

    fn scale(&self, v: &mut [Self::Elem], c: &Self::Elem) {
        for x in v.iter_mut() {
            if !self.is_zero(x) {
                *x = self.mul(x, c);
            }
        }
    }

    fn zeros(&self, n: usize) -> Vec<Self::Elem> {
        alloc::vec![self.zero(); n]
    }

    fn is_zero_vec(&self, v: &[Self::Elem]) -> bool {
        v.iter().all(|x| self.is_zero(x))
    }
}

/// The prime field `F_p` for a prime `p < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ScalarError> {
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    fn reduce(&self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u32;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Prime(self.p)
    }
    #[inline]
    fn zero(&self) -> u32 {
        0
    }
    #[inline]
    fn one(&self) -> u32 {
        1
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.reduce(*a as u64 + *b as u64)
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.reduce(*a as u64 + (self.p - *b) as u64)
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - *a
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.reduce(*a as u64 * *b as u64)
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut base = *a as u64;
        let mut exp = self.p as u64 - 2;
        let m = self.p as u64;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        Some(acc as u32)
    }
    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    fn parse_elem(&self, s: &str) -> Option<u32> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n = self.from_i64(num.trim().parse().ok()?);
            let d = self.from_i64(den.trim().parse().ok()?);
            return Some(self.mul(&n, &self.inv(&d)?));
        }
        Some(self.from_i64(s.parse().ok()?))
    }
    fn format_elem(&self, a: &u32) -> String {
        a.to_string()
    }
    fn encode_elem(&self, a: &u32, out: &mut Vec<u8>) {
        out.extend_from_slice(&a.to_le_bytes());
    }

    fn axpy(&self, dst: &mut [u32], c: &u32, src: &[u32]) {
        debug_assert_eq!(dst.len(), src.len());
        if *c == 0 {
            return;
        }
        let p = self.p as u64;
        let c = *c as u64;
        for (d, s) in dst.iter_mut().zip(src) {
            if *s != 0 {
                *d = ((*d as u64 + c * *s as u64) % p) as u32;
            }
        }
    }
}

/// The rationals, with arbitrary-precision numerators and denominators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn parse_elem(&self, s: &str) -> Option<BigRational> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(BigRational::new(n, d));
        }
        Some(BigRational::from_integer(s.parse().ok()?))
    }
    fn format_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn encode_elem(&self, a: &BigRational, out: &mut Vec<u8>) {
        let sign = if a.is_negative() { 1u8 } else { 0u8 };
        out.push(sign);
        for part in [a.numer(), a.denom()] {
            let bytes = part.magnitude().to_bytes_le();
            out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            out.extend_from_slice(&bytes);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse_and_negation() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7u32 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
            assert_eq!(f.add(&a, &f.neg(&a)), 0);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1), 6);
    }

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(32001).is_err());
        assert!(PrimeField::new(1 << 33).is_err());
        assert_eq!(PrimeField::default().modulus(), 32003);
    }

    #[test]
    fn descriptor_round_trip() {
        for s in ["prime:32003", "prime:5", "rational"] {
            let d: FieldDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("prime:6".parse::<FieldDescriptor>().is_err());
    }

    #[test]
    fn parses_fractions() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.parse_elem("1/2"), Some(3));
        assert_eq!(f.parse_elem("-3"), Some(2));
        let q = Rationals;
        assert_eq!(q.format_elem(&q.parse_elem("-6/4").unwrap()), "-3/2");
        assert!(q.parse_elem("1/0").is_none());
    }
}
