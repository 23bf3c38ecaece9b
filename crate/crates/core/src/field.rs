//! The scalar domains circuits are evaluated over: exact rationals and the
//! prime field modulo the Mersenne prime 2^61 - 1.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;

use crate::rational::Rational;

/// The test-field modulus, 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

/// Element of the prime field of order [`MODULUS`], stored reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(value: u64) -> Self {
        Fp(value % MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce128(x: u128) -> u64 {
        // 2^61 = 1 (mod p)
        let lo = (x as u64) & MODULUS;
        let hi = (x >> 61) as u64;
        let mut r = lo + (hi & MODULUS) + ((hi >> 61) as u64);
        while r >= MODULUS {
            r -= MODULUS;
        }
        r
    }

    pub fn pow(self, mut exp: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(self) -> Option<Fp> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(MODULUS - 2))
        }
    }

    /// Uniform element of the whole field.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Fp {
        loop {
            let v = rng.next_u64() & MODULUS;
            if v < MODULUS {
                return Fp(v);
            }
        }
    }

    fn from_bigint(value: &BigInt) -> Fp {
        let m = BigInt::from(MODULUS);
        let r = value.mod_floor(&m);
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }

    /// Maps `p/q` to `p * q^-1`; `None` when `p` divides `q`.
    pub fn from_rational(value: &Rational) -> Option<Fp> {
        let den = Fp::from_bigint(value.denom()).inverse()?;
        Some(Fp::from_bigint(value.numer()) * den)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        if self.0 >= rhs.0 {
            Fp(self.0 - rhs.0)
        } else {
            Fp(self.0 + MODULUS - rhs.0)
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp::ZERO - self
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        Fp(Fp::reduce128(self.0 as u128 * rhs.0 as u128))
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp::ONE
    }
}

/// A field circuits can be evaluated over.
pub trait Scalar:
    Clone + PartialEq + fmt::Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Embeds a rational constant; `None` if it is not representable.
    fn from_rational(value: &Rational) -> Option<Self>;

    fn inverse(&self) -> Option<Self>;
}

impl Scalar for Rational {
    fn from_rational(value: &Rational) -> Option<Self> {
        Some(value.clone())
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Scalar for Fp {
    fn from_rational(value: &Rational) -> Option<Self> {
        Fp::from_rational(value)
    }

    fn inverse(&self) -> Option<Self> {
        Fp::inverse(*self)
    }
}
