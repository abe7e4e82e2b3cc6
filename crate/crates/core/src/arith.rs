//! Exact coefficient arithmetic over the rationals and over prime fields.
//!
//! A [`FieldSpec`] selects the coefficient field by its characteristic: `0`
//! means the rationals, a prime `p` means the residues modulo `p`. Elements
//! of different fields never mix; the checked operations report a mismatch
//! as [`ArithError::FieldMismatch`], the operator impls panic on it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision integers.
pub type Integer = BigInt;

/// Reduced fractions with positive denominator; zero is `0/1`.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("characteristic {0} is neither 0 nor a prime")]
    NotPrime(u64),
    #[error("cannot combine elements of characteristic {left} and {right}")]
    FieldMismatch { left: u64, right: u64 },
}

/// Builds the reduced fraction `num / den`.
pub fn rat_normalize(num: Integer, den: Integer) -> Result<Rational, ArithError> {
    if den.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    // BigRational::new reduces and moves the sign to the numerator.
    Ok(Rational::new(num, den))
}

/// The coefficient field, identified by its characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec { characteristic: 0 };

    pub fn new(characteristic: u64) -> Result<Self, ArithError> {
        if characteristic == 0 || is_prime(characteristic) {
            Ok(FieldSpec { characteristic })
        } else {
            Err(ArithError::NotPrime(characteristic))
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(&self) -> bool {
        self.characteristic == 0
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, value: i64) -> FieldElement {
        match self.characteristic {
            0 => FieldElement::Rational(Rational::from_integer(value.into())),
            p => FieldElement::Modular {
                residue: (value as i128).rem_euclid(p as i128) as u64,
                modulus: p,
            },
        }
    }

    /// Embeds an integer into the field (reducing modulo `p` when needed).
    pub fn from_integer(&self, value: &Integer) -> FieldElement {
        match self.characteristic {
            0 => FieldElement::Rational(Rational::from_integer(value.clone())),
            p => {
                let r = value.mod_floor(&BigInt::from(p));
                FieldElement::Modular {
                    residue: r.to_u64().expect("residue below modulus"),
                    modulus: p,
                }
            }
        }
    }

    /// Embeds a fraction; in characteristic `p` the denominator must be a unit.
    pub fn from_rational(&self, value: &Rational) -> Result<FieldElement, ArithError> {
        match self.characteristic {
            0 => Ok(FieldElement::Rational(value.clone())),
            _ => {
                let num = self.from_integer(value.numer());
                let den = self.from_integer(value.denom());
                num.try_div(&den)
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "Q"),
            p => write!(f, "F_{p}"),
        }
    }
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p` by the extended Euclidean algorithm.
fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    Some(s0.rem_euclid(p as i128) as u64)
}

/// A field element tagged with its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(Rational),
    /// `residue` is always in `[0, modulus)`.
    Modular {
        residue: u64,
        modulus: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Applies a ring operation to two elements of the same field.
pub fn field_arith(
    op: ArithOp,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<FieldElement, ArithError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

/// Multiplicative inverse.
pub fn field_inv(a: &FieldElement) -> Result<FieldElement, ArithError> {
    a.inv()
}

impl FieldElement {
    pub fn field(&self) -> FieldSpec {
        match self {
            FieldElement::Rational(_) => FieldSpec::RATIONALS,
            FieldElement::Modular { modulus, .. } => FieldSpec {
                characteristic: *modulus,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Modular { residue, .. } => *residue == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_one(),
            FieldElement::Modular { residue, .. } => *residue == 1,
        }
    }

    /// True for rationals with denominator 1 and for every residue.
    pub fn is_integral(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_integer(),
            FieldElement::Modular { .. } => true,
        }
    }

    /// Sign as seen by the renderer: residues are never negative.
    pub fn is_negative(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_negative(),
            FieldElement::Modular { .. } => false,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            FieldElement::Modular { .. } => None,
        }
    }

    fn check_same(&self, other: &FieldElement) -> Result<(), ArithError> {
        let (l, r) = (self.field(), other.field());
        if l == r {
            Ok(())
        } else {
            Err(ArithError::FieldMismatch {
                left: l.characteristic,
                right: r.characteristic,
            })
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a + b),
            (
                FieldElement::Modular {
                    residue: a,
                    modulus,
                },
                FieldElement::Modular { residue: b, .. },
            ) => {
                let s = (*a as u128 + *b as u128) % *modulus as u128;
                FieldElement::Modular {
                    residue: s as u64,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        self.check_same(other)?;
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a * b),
            (
                FieldElement::Modular {
                    residue: a,
                    modulus,
                },
                FieldElement::Modular { residue: b, .. },
            ) => FieldElement::Modular {
                residue: mul_mod(*a, *b, *modulus),
                modulus: *modulus,
            },
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        self.check_same(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<FieldElement, ArithError> {
        match self {
            FieldElement::Rational(r) => {
                if r.is_zero() {
                    Err(ArithError::DivisionByZero)
                } else {
                    Ok(FieldElement::Rational(r.recip()))
                }
            }
            FieldElement::Modular { residue, modulus } => inv_mod(*residue, *modulus)
                .map(|residue| FieldElement::Modular {
                    residue,
                    modulus: *modulus,
                })
                .ok_or(ArithError::DivisionByZero),
        }
    }

    fn neg_ref(&self) -> FieldElement {
        match self {
            FieldElement::Rational(r) => FieldElement::Rational(-r),
            FieldElement::Modular { residue, modulus } => FieldElement::Modular {
                residue: if *residue == 0 { 0 } else { modulus - residue },
                modulus: *modulus,
            },
        }
    }

    pub fn pow(&self, exp: u32) -> FieldElement {
        match self {
            FieldElement::Rational(r) => {
                FieldElement::Rational(num_traits::pow(r.clone(), exp as usize))
            }
            FieldElement::Modular { residue, modulus } => FieldElement::Modular {
                residue: pow_mod(*residue, exp as u64, *modulus),
                modulus: *modulus,
            },
        }
    }

    /// Absolute value for rationals; identity on residues.
    pub fn abs(&self) -> FieldElement {
        match self {
            FieldElement::Rational(r) => FieldElement::Rational(r.abs()),
            m => m.clone(),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{r}"),
            FieldElement::Modular { residue, .. } => write!(f, "{residue}"),
        }
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs)
                    .expect("field elements from different fields")
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}
