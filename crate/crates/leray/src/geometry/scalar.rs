use crate::C64;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate a real-analytic defining function either on
/// real coordinates or on their complexification (for complex-step
/// differentiation).
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn powi(self, k: i32) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// Magnitude used for sanity checks only.
    fn magnitude(self) -> f64;
    /// Real part (the value itself for real scalars).
    fn real(self) -> f64;
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn real(self) -> f64 {
        self
    }
}

impl Scalar for C64 {
    fn cst(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn sqrt(self) -> Self {
        C64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        if self.im == 0.0 && self.re >= 0.0 {
            return C64::new(self.re.powf(p), 0.0);
        }
        C64::powf(self, p)
    }
    fn powi(self, k: i32) -> Self {
        C64::powi(&self, k)
    }
    fn exp(self) -> Self {
        C64::exp(self)
    }
    fn ln(self) -> Self {
        C64::ln(self)
    }
    fn sin(self) -> Self {
        C64::sin(self)
    }
    fn cos(self) -> Self {
        C64::cos(self)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn real(self) -> f64 {
        self.re
    }
}
