//! Exact arithmetic in Z[φ] and fixed-point projections of it.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

/// The number `a + b·φ` with integer `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Golden {
    pub a: BigInt,
    pub b: BigInt,
}

impl Golden {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Golden { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Golden::new(0, 0)
    }

    pub fn one() -> Self {
        Golden::new(1, 0)
    }

    /// `1/φ = φ − 1`.
    pub fn inv_phi() -> Self {
        Golden::new(-1, 1)
    }

    /// `φ^-n`.
    pub fn inv_phi_pow(n: usize) -> Self {
        let mut acc = Golden::one();
        let mut base = Golden::inv_phi();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        sign_of_sum(&self.a, &self.b)
    }

    /// Compares `self` with the rational `num / den` (`den > 0`).
    pub fn cmp_ratio(&self, num: &BigInt, den: &BigInt) -> Ordering {
        sign_of_sum(&(den * &self.a - num), &(den * &self.b))
    }

    /// `floor(self · 2^bits)`.
    pub fn floor_fixed(&self, bits: u32) -> BigInt {
        let scale = BigInt::one() << bits;
        // self = (2a + b)/2 + b·√5/2
        let c = (BigInt::from(2) * &self.a + &self.b) * &scale;
        let b_sqrt5 = floor_sqrt5_times(&(&self.b * &scale));
        (c + b_sqrt5).div_floor(&BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        let fixed = self.floor_fixed(80);
        fixed.to_f64().unwrap_or(f64::NAN) / 2f64.powi(80)
    }
}

/// `floor(x·√5)` for integer `x`.
fn floor_sqrt5_times(x: &BigInt) -> BigInt {
    let sq: BigUint = (x * x * BigInt::from(5u32)).magnitude().clone();
    let r = BigInt::from(Roots::sqrt(&sq));
    match x.sign() {
        Sign::Minus => -(r + BigInt::one()),
        _ => r,
    }
}

/// Sign of `a + b·φ`, i.e. of `(2a + b) + b·√5`.
fn sign_of_sum(a: &BigInt, b: &BigInt) -> Ordering {
    let c = BigInt::from(2) * a + b;
    let (sc, sb) = (c.sign(), b.sign());
    match (sc, sb) {
        (Sign::NoSign, _) => sb_ord(sb),
        (_, Sign::NoSign) => sb_ord(sc),
        _ if sc == sb => sb_ord(sc),
        _ => {
            // opposite signs: compare c² with 5b²
            let lhs = &c * &c;
            let rhs = b * b * 5u32;
            match lhs.cmp(&rhs) {
                Ordering::Greater => sb_ord(sc),
                Ordering::Less => sb_ord(sb),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

fn sb_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl Add for &Golden {
    type Output = Golden;
    fn add(self, o: &Golden) -> Golden {
        Golden { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &Golden {
    type Output = Golden;
    fn sub(self, o: &Golden) -> Golden {
        Golden { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &Golden {
    type Output = Golden;
    fn mul(self, o: &Golden) -> Golden {
        // φ² = φ + 1
        let bd = &self.b * &o.b;
        Golden {
            a: &self.a * &o.a + &bd,
            b: &self.a * &o.b + &self.b * &o.a + bd,
        }
    }
}

impl PartialOrd for Golden {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Golden {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

/// A half-open subinterval of `[0, 1)` held as `frac_bits`-bit fixed point:
/// the endpoints are `lo / 2^frac_bits` and `hi / 2^frac_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalQ {
    pub lo: BigUint,
    pub hi: BigUint,
    pub frac_bits: u32,
}

impl IntervalQ {
    pub fn height(&self) -> BigUint {
        &self.hi - &self.lo
    }

    pub fn lo_f64(&self) -> f64 {
        fixed_to_f64(&self.lo, self.frac_bits)
    }

    pub fn hi_f64(&self) -> f64 {
        fixed_to_f64(&self.hi, self.frac_bits)
    }

    pub fn height_f64(&self) -> f64 {
        fixed_to_f64(&self.height(), self.frac_bits)
    }

    /// Projects an exact `[lo, hi)` pair, rounding both ends down.
    pub fn from_golden(lo: &Golden, hi: &Golden, frac_bits: u32) -> Self {
        let conv = |g: &Golden| {
            g.floor_fixed(frac_bits)
                .to_biguint()
                .expect("interval endpoints are nonnegative")
        };
        IntervalQ { lo: conv(lo), hi: conv(hi), frac_bits }
    }
}

pub(crate) fn fixed_to_f64(x: &BigUint, frac_bits: u32) -> f64 {
    let shift = x.bits().saturating_sub(60);
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top * 2f64.powi(shift as i32 - frac_bits as i32)
}

/// `round(2^bits / φ)` for `bits ≤ 62`.
pub fn inv_phi_fixed(bits: u32) -> u64 {
    let x4 = Golden::inv_phi().floor_fixed(bits + 2);
    let rounded: BigInt = (x4 + 2) >> 2u32;
    rounded.to_u64().expect("fits in 64 bits")
}

/// `round(2^bits / φ)` at arbitrary precision.
pub fn inv_phi_fixed_big(bits: u32) -> BigUint {
    let x4 = Golden::inv_phi().floor_fixed(bits + 2);
    let rounded: BigInt = (x4 + 2) >> 2u32;
    rounded.to_biguint().expect("positive")
}
