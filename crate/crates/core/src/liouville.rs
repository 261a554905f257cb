//! Solutions of the Liouville equation Δλ = −ε e^{−4λ}, with
//! Δ = e^{−2λ}(∂xx + ε ∂yy), from developing maps:
//!
//! ```text
//! e^λ = |1 − ε g ḡ| / (2 √(g′ ḡ′))
//! ```
//!
//! The solution is unchanged when g is replaced by T_ab ∘ g.

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, GridSpec};
use crate::kalg::{Eps, EpsScalar};
use crate::mobius::MobiusParams;
use crate::weierstrass::{DevelopingMap, DEFAULT_DELTA_G};

/// λ at a point from values of g and g′, or `None` where g ḡ = ε or
/// g′ ḡ′ ≤ 0.
pub fn lambda_at(g: EpsScalar, g_prime: EpsScalar, eps: Eps) -> Option<f64> {
    if !(g.is_finite() && g_prime.is_finite()) {
        return None;
    }
    let w = (1.0 - eps.sign() * g.squared_norm()).abs();
    let r = g_prime.squared_norm();
    if w <= DEFAULT_DELTA_G || !(r > 0.0) {
        return None;
    }
    Some((w / (2.0 * r.sqrt())).ln())
}

/// λ sampled on a grid; nodes violating the preconditions are masked.
pub fn lambda_from_g(map: &DevelopingMap, spec: GridSpec) -> Grid<f64> {
    Grid::tabulate(spec, |i, j| {
        let (x, y) = spec.point(i, j);
        let z = EpsScalar::from_xy(x, y, map.eps);
        lambda_at((map.g)(z), (map.g_prime)(z), map.eps)
    })
}

/// e^{−2λ}(λxx + ε λyy) + ε e^{−4λ} at a node with central stencils on both
/// axes.
pub fn liouville_defect(lambda: &Grid<f64>, eps: Eps, i: usize, j: usize) -> Option<f64> {
    if !lambda.has_valid_window(i, j, 1) {
        return None;
    }
    let l = lambda.get(i, j)?;
    let lxx = lambda.d2(i, j, Axis::X)?;
    let lyy = lambda.d2(i, j, Axis::Y)?;
    let e = eps.sign();
    Some((-2.0 * l).exp() * (lxx + e * lyy) + e * (-4.0 * l).exp())
}

/// Max |e^{−2λ}(λxx + ε λyy) + ε e^{−4λ}| over interior nodes.
pub fn liouville_residual(lambda: &Grid<f64>, eps: Eps) -> Result<f64> {
    let s = lambda.spec;
    let mut seen = false;
    let mut worst = 0.0f64;
    for j in 0..s.ny {
        for i in 0..s.nx {
            if let Some(d) = liouville_defect(lambda, eps, i, j) {
                seen = true;
                worst = worst.max(d.abs());
            }
        }
    }
    if !seen {
        return Err(Error::ContractViolation("no interior node with a full 3×3 stencil".into()));
    }
    Ok(worst)
}

/// g̃ = T_ab ∘ g with g̃′ = g′/(b̄ g + ā)². Points where the denominator is
/// null evaluate to NaN.
pub fn transform_developing_map(map: &DevelopingMap, t: &MobiusParams) -> Result<DevelopingMap> {
    if map.eps != t.eps() {
        return Err(Error::EpsMismatch { left: map.eps.as_i32(), right: t.eps().as_i32() });
    }
    let eps = map.eps;
    let nan = EpsScalar::new(f64::NAN, f64::NAN, eps);
    let (g1, t1) = (map.g.clone(), *t);
    let (g2, gp, t2) = (map.g.clone(), map.g_prime.clone(), *t);
    Ok(DevelopingMap::new(
        eps,
        move |z| t1.apply(g1(z)).unwrap_or(nan),
        move |z| t2.derivative(g2(z)).map(|d| gp(z) * d).unwrap_or(nan),
    ))
}

/// Whether T_ab ∘ g is free of poles on the grid: no node hits a null
/// denominator and, for ε = −1, b̄ g + ā does not cross the null cone
/// between nodes (its 𝕂-norm keeps one sign). A crossing means the
/// transformed map passes through infinity inside the domain.
pub fn transform_is_regular(map: &DevelopingMap, t: &MobiusParams, spec: GridSpec) -> bool {
    let mut sign = 0.0f64;
    for idx in 0..spec.len() {
        let (i, j) = spec.coords(idx);
        let (x, y) = spec.point(i, j);
        let g = (map.g)(EpsScalar::from_xy(x, y, map.eps));
        if !g.is_finite() {
            continue;
        }
        let d = t.denominator(g).squared_norm();
        if d == 0.0 || d * sign < 0.0 {
            return false;
        }
        sign = d.signum();
    }
    true
}
