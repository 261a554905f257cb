//! The ε-unified scalar algebra 𝕂.
//!
//! For ε = +1 this is ℂ with unit `i` (`i² = −1`); for ε = −1 it is the algebra
//! of Lorentz (paracomplex, split-complex) numbers with unit `τ` (`τ² = +1`).
//! In both cases the unit squares to `−ε`, so one multiplication rule serves
//! both causal types.
//!
//! Paracomplex elementary functions go through the split isomorphism
//! Φ(a + τb) = (a + b, a − b), under which multiplication is componentwise.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, GridSpec};

/// Causal sign: spacelike surfaces use complex parameters, timelike ones use
/// paracomplex parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Eps {
    #[default]
    Spacelike,
    Timelike,
}

impl Eps {
    pub fn sign(self) -> f64 {
        match self {
            Eps::Spacelike => 1.0,
            Eps::Timelike => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Eps::Spacelike => 1,
            Eps::Timelike => -1,
        }
    }

    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Eps::Spacelike),
            -1 => Ok(Eps::Timelike),
            _ => Err(Error::ContractViolation(format!("causal sign must be ±1, got {s}"))),
        }
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Eps::Spacelike => "+1",
            Eps::Timelike => "-1",
        })
    }
}

impl Serialize for Eps {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.as_i32())
    }
}

/// One element `re + u·im` of 𝕂, where `u² = −ε`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EpsScalar {
    pub re: f64,
    pub im: f64,
    pub eps: Eps,
}

/// Default null-cone tolerance `1e-12·(1 + |re| + |im|)²`.
pub fn default_tol_null(z: EpsScalar) -> f64 {
    1e-12 * (1.0 + z.re.abs() + z.im.abs()).powi(2)
}

impl EpsScalar {
    pub const fn new(re: f64, im: f64, eps: Eps) -> Self {
        Self { re, im, eps }
    }

    pub const fn real(re: f64, eps: Eps) -> Self {
        Self::new(re, 0.0, eps)
    }

    pub const fn zero(eps: Eps) -> Self {
        Self::new(0.0, 0.0, eps)
    }

    pub const fn one(eps: Eps) -> Self {
        Self::new(1.0, 0.0, eps)
    }

    /// The imaginary unit `i` (ε = +1) or `τ` (ε = −1).
    pub const fn unit(eps: Eps) -> Self {
        Self::new(0.0, 1.0, eps)
    }

    /// The parameter point `x + u·y`.
    pub const fn from_xy(x: f64, y: f64, eps: Eps) -> Self {
        Self::new(x, y, eps)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im, self.eps)
    }

    /// `z·z̄ = re² + ε·im²`; real by construction. The paracomplex case is
    /// factored as (re + im)(re − im) to avoid cancellation near the null
    /// cone.
    pub fn squared_norm(self) -> f64 {
        match self.eps {
            Eps::Spacelike => self.re * self.re + self.im * self.im,
            Eps::Timelike => (self.re + self.im) * (self.re - self.im),
        }
    }

    /// The 𝕂-norm `|z z̄|^{1/2}`.
    pub fn norm(self) -> f64 {
        self.squared_norm().abs().sqrt()
    }

    /// Euclidean modulus of `(re, im)`; used for error measurement since the
    /// paracomplex norm vanishes on the null cone.
    pub fn modulus(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Whether `z` is a zero divisor (ε = −1, |re| = |im| ≠ 0).
    pub fn is_zero_divisor(self) -> bool {
        self.eps == Eps::Timelike && self.re.abs() == self.im.abs() && self.re != 0.0
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k, self.eps)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        if self.eps != rhs.eps {
            return Err(Error::EpsMismatch { left: self.eps.as_i32(), right: rhs.eps.as_i32() });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(self, rhs: Self) -> Self {
        let e = self.eps.sign();
        Self::new(
            self.re * rhs.re - e * self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
            self.eps,
        )
    }

    /// `z̄/(z z̄)`, refusing when `|z z̄| ≤ tol_null`.
    pub fn inverse(self, tol_null: f64) -> Result<Self> {
        let n = self.squared_norm();
        if !(n.abs() > tol_null) {
            return Err(Error::NullDivisor { re: self.re, im: self.im, norm: n });
        }
        Ok(self.conj().scale(1.0 / n))
    }

    pub fn inv(self) -> Result<Self> {
        self.inverse(default_tol_null(self))
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        let r = rhs.inv()?;
        self.checked_mul(r)
    }

    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Self::one(self.eps), |acc, _| acc * self)
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, Eps::Spacelike)
    }

    /// Applies a real function componentwise in split coordinates.
    fn split_map(self, f: impl Fn(f64) -> f64) -> Self {
        let p = SplitPair { u: self.re + self.im, v: self.re - self.im };
        SplitPair { u: f(p.u), v: f(p.v) }.to_scalar()
    }

    pub fn exp(self) -> Self {
        match self.eps {
            Eps::Spacelike => Self::from_complex(self.to_complex().exp()),
            Eps::Timelike => self.split_map(f64::exp),
        }
    }

    pub fn cosh(self) -> Self {
        match self.eps {
            Eps::Spacelike => Self::from_complex(self.to_complex().cosh()),
            Eps::Timelike => self.split_map(f64::cosh),
        }
    }

    pub fn sinh(self) -> Self {
        match self.eps {
            Eps::Spacelike => Self::from_complex(self.to_complex().sinh()),
            Eps::Timelike => self.split_map(f64::sinh),
        }
    }

    pub fn sin(self) -> Self {
        match self.eps {
            Eps::Spacelike => Self::from_complex(self.to_complex().sin()),
            Eps::Timelike => self.split_map(f64::sin),
        }
    }

    pub fn cos(self) -> Self {
        match self.eps {
            Eps::Spacelike => Self::from_complex(self.to_complex().cos()),
            Eps::Timelike => self.split_map(f64::cos),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Exp,
    Cosh,
    Sinh,
    Sin,
    Cos,
}

pub fn elementary(kind: Elementary, z: EpsScalar) -> EpsScalar {
    match kind {
        Elementary::Exp => z.exp(),
        Elementary::Cosh => z.cosh(),
        Elementary::Sinh => z.sinh(),
        Elementary::Sin => z.sin(),
        Elementary::Cos => z.cos(),
    }
}

fn assert_same_eps(a: EpsScalar, b: EpsScalar) {
    assert!(
        a.eps == b.eps,
        "contract violation: mixing causal signs {} and {}",
        a.eps,
        b.eps
    );
}

impl Add for EpsScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_same_eps(self, rhs);
        Self::new(self.re + rhs.re, self.im + rhs.im, self.eps)
    }
}

impl Sub for EpsScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_same_eps(self, rhs);
        Self::new(self.re - rhs.re, self.im - rhs.im, self.eps)
    }
}

impl Neg for EpsScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im, self.eps)
    }
}

impl Mul for EpsScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_same_eps(self, rhs);
        self.mul_unchecked(rhs)
    }
}

impl Mul<f64> for EpsScalar {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Add<f64> for EpsScalar {
    type Output = Self;
    fn add(self, k: f64) -> Self {
        Self::new(self.re + k, self.im, self.eps)
    }
}

/// Unchecked quotient `a·b̄/(b b̄)`: yields non-finite components on the null
/// cone instead of failing. Use [`EpsScalar::checked_div`] where the caller
/// needs the error.
impl Div for EpsScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert_same_eps(self, rhs);
        (self * rhs.conj()).scale(1.0 / rhs.squared_norm())
    }
}

impl fmt::Display for EpsScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = match self.eps {
            Eps::Spacelike => "i",
            Eps::Timelike => "τ",
        };
        write!(f, "{}{:+}{}", self.re, self.im, u)
    }
}

/// Image of a paracomplex number under Φ(a + τb) = (a + b, a − b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPair {
    pub u: f64,
    pub v: f64,
}

impl SplitPair {
    /// Φ⁻¹(u, v) = ((u + v)/2) + τ((u − v)/2).
    pub fn to_scalar(self) -> EpsScalar {
        EpsScalar::new(0.5 * (self.u + self.v), 0.5 * (self.u - self.v), Eps::Timelike)
    }

    pub fn hadamard(self, other: Self) -> Self {
        Self { u: self.u * other.u, v: self.v * other.v }
    }
}

pub fn split_iso(z: EpsScalar) -> Result<SplitPair> {
    if z.eps != Eps::Timelike {
        return Err(Error::ContractViolation(
            "the split isomorphism is defined on paracomplex numbers only".into(),
        ));
    }
    Ok(SplitPair { u: z.re + z.im, v: z.re - z.im })
}

/// A 𝕂-valued field on a grid.
#[derive(Debug, Clone)]
pub struct GridField {
    pub eps: Eps,
    pub field: Grid<EpsScalar>,
}

impl GridField {
    /// Samples `f` at every node `x + u·y`; non-finite values are masked.
    pub fn sample<F>(spec: GridSpec, eps: Eps, f: F) -> Self
    where
        F: Fn(EpsScalar) -> Option<EpsScalar> + Sync,
    {
        let field = Grid::tabulate(spec, |i, j| {
            let (x, y) = spec.point(i, j);
            f(EpsScalar::from_xy(x, y, eps)).filter(|v| v.is_finite())
        });
        Self { eps, field }
    }

    /// ∂f/∂z̄ = ½(∂x + ε·u·∂y) at a node.
    pub fn dbar_at(&self, i: usize, j: usize) -> Option<EpsScalar> {
        let fx = self.field.d1(i, j, Axis::X)?;
        let fy = self.field.d1(i, j, Axis::Y)?;
        let u = EpsScalar::unit(self.eps);
        Some((fx + u * fy * self.eps.sign()) * 0.5)
    }

    /// ∂f/∂z = ½(∂x − ε·u·∂y) at a node.
    pub fn dz_at(&self, i: usize, j: usize) -> Option<EpsScalar> {
        let fx = self.field.d1(i, j, Axis::X)?;
        let fy = self.field.d1(i, j, Axis::Y)?;
        let u = EpsScalar::unit(self.eps);
        Some((fx - u * fy * self.eps.sign()) * 0.5)
    }
}

/// Max over interior valid nodes of |∂f/∂z̄| (Euclidean modulus).
pub fn wirtinger_residual(f: &GridField) -> Result<f64> {
    let spec = f.field.spec;
    let interior_valid = f.field.iter_valid().filter(|&(i, j, _)| f.field.is_interior(i, j)).count();
    if spec.nx < 3 || spec.ny < 3 || interior_valid == 0 {
        return Err(Error::ContractViolation(
            "wirtinger residual needs at least a 3×3 block of valid nodes".into(),
        ));
    }
    Ok(f
        .field
        .iter_valid()
        .filter(|&(i, j, _)| f.field.is_interior(i, j))
        .filter_map(|(i, j, _)| f.dbar_at(i, j))
        .map(EpsScalar::modulus)
        .fold(0.0, f64::max))
}
