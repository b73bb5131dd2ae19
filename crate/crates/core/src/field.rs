//! Exact coefficient arithmetic over ℚ (characteristic 0) or a prime field 𝔽_p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number used for exponents, weights and invariant values.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Validates a characteristic: 0 or a prime below 2^31.
pub fn check_char(p: u64) -> Result<()> {
    if p == 0 || (is_prime(p) && p < (1 << 31)) {
        Ok(())
    } else {
        Err(Error::Input(format!("characteristic {p} is neither 0 nor a supported prime")))
    }
}

/// An element of ℚ or 𝔽_p. For `p > 0` the value is kept as the residue in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    p: u64,
    #[serde(with = "q_serde")]
    v: Q,
}

impl FieldElement {
    /// Builds the image of a rational number in the field of characteristic `p`.
    pub fn new(p: u64, v: Q) -> Result<Self> {
        if p == 0 {
            return Ok(FieldElement { p, v });
        }
        let pb = BigInt::from(p);
        let d = v.denom().mod_floor(&pb);
        if d.is_zero() {
            return Err(Error::Input(format!("denominator of {} vanishes mod {p}", fmt_q(&v))));
        }
        let n = v.numer().mod_floor(&pb);
        let dinv = modpow(d.to_u64().unwrap(), p - 2, p);
        let r = (n.to_u64().unwrap() as u128 * dinv as u128 % p as u128) as u64;
        Ok(FieldElement { p, v: q(r as i64) })
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::new(p, q(n)).expect("integers always embed")
    }

    pub fn zero(p: u64) -> Self {
        Self::from_int(p, 0)
    }

    pub fn one(p: u64) -> Self {
        Self::from_int(p, 1)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// The rational value (for `p > 0`, the residue representative).
    pub fn value(&self) -> &Q {
        &self.v
    }

    fn residue(&self) -> u64 {
        self.v.numer().to_u64().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.v.is_one()
    }

    fn same_field(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixing characteristics {} and {}", self.p, o.p);
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_field(o);
        Self::new(self.p, &self.v + &o.v).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same_field(o);
        Self::new(self.p, &self.v - &o.v).unwrap()
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, -&self.v).unwrap()
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_field(o);
        Self::new(self.p, &self.v * &o.v).unwrap()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Algebra("inverse of zero".into()));
        }
        if self.p == 0 {
            return Ok(FieldElement { p: 0, v: self.v.recip() });
        }
        Ok(Self::from_int(self.p, modpow(self.residue(), self.p - 2, self.p) as i64))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        if self.p > 0 {
            let r = modpow(base.residue(), e, self.p);
            return Ok(Self::from_int(self.p, r as i64));
        }
        let mut acc = Self::one(0);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// All `k`-th roots of `self` in the base field, smallest representative first.
    ///
    /// Over 𝔽_p this is an exhaustive scan; over ℚ only the real rational roots are found.
    pub fn roots(&self, k: u64) -> Vec<Self> {
        assert!(k > 0);
        if self.p > 0 {
            if k % self.p == 0 || self.p <= 1 << 16 {
                return (0..self.p)
                    .map(|r| Self::from_int(self.p, r as i64))
                    .filter(|r| r.pow(k as i64).unwrap() == *self)
                    .collect();
            }
            return Vec::new();
        }
        let n = int_root(self.v.numer(), k);
        let d = int_root(self.v.denom(), k);
        let mut out = Vec::new();
        if let (Some(n), Some(d)) = (n, d) {
            let r = FieldElement { p: 0, v: Q::new(n, d) };
            if k % 2 == 0 && !r.is_zero() {
                out.push(r.neg());
            }
            out.push(r);
        }
        out
    }
}

/// Exact `k`-th root of an integer when it exists (sign allowed for odd `k`).
fn int_root(n: &BigInt, k: u64) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return int_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k as u32);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

pub(crate) fn modpow(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut b = b as u128 % m;
    let mut acc = 1u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(&self.v))
    }
}

pub(crate) mod q_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

/// Parses `n` or `n/d`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n.trim().parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_mod_p() {
        let a = FieldElement::new(5, qf(1, 2)).unwrap();
        assert_eq!(a, FieldElement::from_int(5, 3));
        assert!(FieldElement::new(5, qf(1, 5)).is_err());
        assert_eq!(FieldElement::from_int(7, -1), FieldElement::from_int(7, 6));
    }

    #[test]
    fn inverse_and_power() {
        let a = FieldElement::from_int(17, 3);
        assert!(a.mul(&a.inv().unwrap()).is_one());
        assert_eq!(a.pow(-1).unwrap(), a.inv().unwrap());
        let b = FieldElement::new(0, qf(2, 3)).unwrap();
        assert_eq!(b.pow(-2).unwrap().value(), &qf(9, 4));
    }

    #[test]
    fn roots_in_f17() {
        let r = FieldElement::from_int(17, 16).roots(4);
        let vals: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        assert_eq!(vals, ["2", "8", "9", "15"]);
        assert_eq!(FieldElement::new(0, qf(4, 9)).unwrap().roots(2).len(), 2);
        assert!(FieldElement::from_int(0, 2).roots(2).is_empty());
    }

    #[test]
    fn char_check() {
        assert!(check_char(0).is_ok());
        assert!(check_char(3).is_ok());
        assert!(check_char(4).is_err());
    }
}
