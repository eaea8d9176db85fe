//! Scalar traits shared by the linear algebra and the jet calculus.
//!
//! Everything is written against [`Field`] (any commutative field with
//! exact or approximate arithmetic) or [`Real`] (an ordered field with
//! absolute values). The crate root fixes the concrete exact choices.

use std::fmt::Debug;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

/// A commutative field.
pub trait Field: Clone + PartialEq + Debug + Num + std::ops::Neg<Output = Self> + Send + Sync {}

impl<T> Field for T where T: Clone + PartialEq + Debug + Num + std::ops::Neg<Output = T> + Send + Sync {}

/// An ordered real field (rationals, f32, f64).
pub trait Real: Field + Signed + PartialOrd + FromPrimitive {
    /// Lossy conversion used only at reporting edges (log-log slopes, CSV).
    fn to_f64_lossy(&self) -> f64;
}

impl Real for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Real for f32 {
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Real for num_rational::BigRational {
    fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for dashu_ratio::RBig {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Complex numbers over a real field, with conjugation.
pub type Cx<R> = Complex<R>;

pub fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

pub fn cx_real<R: Real>(re: R) -> Cx<R> {
    Complex::new(re, R::zero())
}

pub fn cx_i<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::one())
}

/// `|re| + |im|`, the rational stand-in for the modulus.
pub fn l1_modulus<R: Real>(z: &Cx<R>) -> R {
    z.re.abs() + z.im.abs()
}

pub fn from_int<R: Real>(k: i64) -> R {
    R::from_i64(k).expect("integer fits in scalar")
}

pub fn ratio<R: Real>(p: i64, q: i64) -> R {
    from_int::<R>(p) / from_int::<R>(q)
}

/// Exact integer power (negative exponents allowed).
pub fn powi<F: Field>(x: &F, e: i32) -> F {
    let mut acc = F::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * x.clone();
    }
    if e < 0 {
        F::one() / acc
    } else {
        acc
    }
}

/// Scalars that round-trip through the `"p/q"` text format.
pub trait TextScalar: Real + FromStr + std::fmt::Display {}
impl<T: Real + FromStr + std::fmt::Display> TextScalar for T {}

pub fn is_zero<F: Zero>(x: &F) -> bool {
    x.is_zero()
}

pub fn is_one<F: One + PartialEq>(x: &F) -> bool {
    x.is_one()
}
