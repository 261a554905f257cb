//! The Weierstrass representation of minimal surfaces in 𝕃³.
//!
//! A chart carries data (f, g) over a parameter rectangle. The tangent field
//! φ = ψ_z is
//!
//! ```text
//! ε = +1:  φ = (¼ f (1 + g²), (i/4) f (1 − g²), −½ f g)
//! ε = −1:  φ = (½ f g, ¼ f (1 − g²), (τ/4) f (1 + g²))
//! ```
//!
//! and the immersion is ψ = 2 Re ∫ φ dz. Along the grid axes dz = dx and
//! dz = u·dy, so ψ_x = 2 Re φ and ψ_y = 2 Re(u φ).

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec, Linear, Rect};
use crate::kalg::{default_tol_null, Eps, EpsScalar, GridField};
use crate::lorentz3::{stereo_unproject, LVec3};

pub type ScalarFn = Arc<dyn Fn(EpsScalar) -> EpsScalar + Send + Sync>;
pub type NodePredicate = Arc<dyn Fn(EpsScalar) -> bool + Send + Sync>;
pub type Phi = [EpsScalar; 3];

/// Default half-width of the masked band around g ḡ = ε.
pub const DEFAULT_DELTA_G: f64 = 1e-8;
/// Absolute part of the period-loop threshold, scaled by 1 + max |ψ|.
pub const PERIOD_TOL: f64 = 1e-6;

/// φ from values of (f, g) at a point.
pub fn phi_from_values(f: EpsScalar, g: EpsScalar, eps: Eps) -> Phi {
    let one = EpsScalar::one(eps);
    let u = EpsScalar::unit(eps);
    let g2 = g * g;
    match eps {
        Eps::Spacelike => [f * (one + g2) * 0.25, u * f * (one - g2) * 0.25, f * g * -0.5],
        Eps::Timelike => [f * g * 0.5, f * (one - g2) * 0.25, u * f * (one + g2) * 0.25],
    }
}

/// (f, g) back from φ at a point. Fails where the denominator
/// −φ₁ + iφ₂ (resp. φ₂ + τφ₃) is null.
pub fn data_from_values(phi: Phi, eps: Eps) -> Result<(EpsScalar, EpsScalar)> {
    let u = EpsScalar::unit(eps);
    let half_f = match eps {
        Eps::Spacelike => phi[0] - u * phi[1],
        Eps::Timelike => phi[1] + u * phi[2],
    };
    let inv = half_f.inverse(default_tol_null(half_f))?;
    let g = match eps {
        Eps::Spacelike => -(phi[2] * inv),
        Eps::Timelike => phi[0] * inv,
    };
    Ok((half_f * 2.0, g))
}

/// Field version of [`data_from_values`]: nodes where φ is masked or the
/// denominator is null come back masked.
pub fn data_from_phi(phi: &[GridField; 3], eps: Eps) -> Result<(GridField, GridField)> {
    for c in phi {
        if c.eps != eps {
            return Err(Error::EpsMismatch { left: c.eps.as_i32(), right: eps.as_i32() });
        }
    }
    let spec = phi[0].field.spec;
    if phi.iter().any(|c| c.field.spec != spec) {
        return Err(Error::ContractViolation("φ components sampled on different grids".into()));
    }
    let data = Grid::tabulate(spec, |i, j| {
        let p = [phi[0].field.get(i, j)?, phi[1].field.get(i, j)?, phi[2].field.get(i, j)?];
        data_from_values(p, eps).ok()
    });
    let f = data.map(|(f, _)| Some(f));
    let g = data.map(|(_, g)| Some(g));
    Ok((GridField { eps, field: f }, GridField { eps, field: g }))
}

/// ψ_x = 2 Re φ and ψ_y = 2 Re(u φ).
pub fn tangents(phi: Phi) -> (LVec3, LVec3) {
    let u = EpsScalar::unit(phi[0].eps);
    let re2 = |v: [EpsScalar; 3]| LVec3::new(2.0 * v[0].re, 2.0 * v[1].re, 2.0 * v[2].re);
    (re2(phi), re2([u * phi[0], u * phi[1], u * phi[2]]))
}

/// φ₁² + φ₂² − φ₃².
pub fn isotropy(phi: Phi) -> EpsScalar {
    phi[0] * phi[0] + phi[1] * phi[1] - phi[2] * phi[2]
}

/// φ₁φ̄₁ + φ₂φ̄₂ − φ₃φ̄₃, which must stay away from zero.
pub fn regularity(phi: Phi) -> f64 {
    phi[0].squared_norm() + phi[1].squared_norm() - phi[2].squared_norm()
}

/// A developing map g with its derivative.
#[derive(Clone)]
pub struct DevelopingMap {
    pub eps: Eps,
    pub g: ScalarFn,
    pub g_prime: ScalarFn,
}

impl DevelopingMap {
    pub fn new<G, D>(eps: Eps, g: G, g_prime: D) -> Self
    where
        G: Fn(EpsScalar) -> EpsScalar + Send + Sync + 'static,
        D: Fn(EpsScalar) -> EpsScalar + Send + Sync + 'static,
    {
        Self { eps, g: Arc::new(g), g_prime: Arc::new(g_prime) }
    }
}

impl fmt::Debug for DevelopingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DevelopingMap").field("eps", &self.eps).finish_non_exhaustive()
    }
}

/// Weierstrass data (f, g) with g′ (and optionally f′) over a rectangle.
#[derive(Clone)]
pub struct WeierstrassChart {
    pub eps: Eps,
    pub domain: Rect,
    pub delta_g: f64,
    g: ScalarFn,
    g_prime: ScalarFn,
    f: ScalarFn,
    f_prime: Option<ScalarFn>,
    singular: Option<NodePredicate>,
    twist: EpsScalar,
}

impl fmt::Debug for WeierstrassChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeierstrassChart")
            .field("eps", &self.eps)
            .field("domain", &self.domain)
            .field("delta_g", &self.delta_g)
            .field("twist", &self.twist)
            .finish_non_exhaustive()
    }
}

/// Values of the data at one valid node.
#[derive(Debug, Clone, Copy)]
pub struct NodeData {
    pub z: EpsScalar,
    pub f: EpsScalar,
    pub g: EpsScalar,
    pub g_prime: EpsScalar,
}

impl WeierstrassChart {
    pub fn new<G, D, F>(eps: Eps, domain: Rect, g: G, g_prime: D, f: F) -> Self
    where
        G: Fn(EpsScalar) -> EpsScalar + Send + Sync + 'static,
        D: Fn(EpsScalar) -> EpsScalar + Send + Sync + 'static,
        F: Fn(EpsScalar) -> EpsScalar + Send + Sync + 'static,
    {
        Self {
            eps,
            domain,
            delta_g: DEFAULT_DELTA_G,
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
            f: Arc::new(f),
            f_prime: None,
            singular: None,
            twist: EpsScalar::one(eps),
        }
    }

    /// The chart in Liouville normal form: f = −ε/g′. Nodes where g′ is
    /// null get a non-finite f and are masked.
    pub fn from_developing_map(map: &DevelopingMap, domain: Rect) -> Self {
        let eps = map.eps;
        let gp = map.g_prime.clone();
        let f = move |z: EpsScalar| {
            let d = gp(z);
            match d.inverse(default_tol_null(d)) {
                Ok(inv) => inv.scale(-eps.sign()),
                Err(_) => EpsScalar::new(f64::NAN, f64::NAN, eps),
            }
        };
        Self {
            eps,
            domain,
            delta_g: DEFAULT_DELTA_G,
            g: map.g.clone(),
            g_prime: map.g_prime.clone(),
            f: Arc::new(f),
            f_prime: None,
            singular: None,
            twist: EpsScalar::one(eps),
        }
    }

    pub fn with_f_prime<F>(mut self, f_prime: F) -> Self
    where
        F: Fn(EpsScalar) -> EpsScalar + Send + Sync + 'static,
    {
        self.f_prime = Some(Arc::new(f_prime));
        self
    }

    /// Nodes where `pred` holds are excluded.
    pub fn with_singular<P>(mut self, pred: P) -> Self
    where
        P: Fn(EpsScalar) -> bool + Send + Sync + 'static,
    {
        self.singular = Some(Arc::new(pred));
        self
    }

    pub fn with_delta_g(mut self, delta_g: f64) -> Self {
        self.delta_g = delta_g;
        self
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    /// Multiplies φ by the constant `w`. With w = τ this is the
    /// Lorentz-conjugate surface, ψ*_x = ψ_y and ψ*_y = ψ_x.
    pub fn twisted(mut self, w: EpsScalar) -> Self {
        self.twist = self.twist * w;
        self
    }

    pub fn is_twisted(&self) -> bool {
        self.twist != EpsScalar::one(self.eps)
    }

    pub fn developing_map(&self) -> DevelopingMap {
        DevelopingMap { eps: self.eps, g: self.g.clone(), g_prime: self.g_prime.clone() }
    }

    pub fn g(&self, z: EpsScalar) -> EpsScalar {
        (self.g)(z)
    }

    pub fn g_prime(&self, z: EpsScalar) -> EpsScalar {
        (self.g_prime)(z)
    }

    pub fn f(&self, z: EpsScalar) -> EpsScalar {
        (self.f)(z)
    }

    pub fn f_prime(&self, z: EpsScalar) -> Option<EpsScalar> {
        self.f_prime.as_ref().map(|fp| fp(z))
    }

    pub fn point(&self, x: f64, y: f64) -> EpsScalar {
        EpsScalar::from_xy(x, y, self.eps)
    }

    fn is_singular(&self, z: EpsScalar) -> bool {
        self.singular.as_ref().is_some_and(|p| p(z))
    }

    /// Evaluates the data at `z`, enforcing every validity condition.
    pub fn eval(&self, z: EpsScalar) -> Result<NodeData> {
        if z.eps != self.eps {
            return Err(Error::EpsMismatch { left: z.eps.as_i32(), right: self.eps.as_i32() });
        }
        let bad = |reason: &str| Error::SingularNode { x: z.re, y: z.im, reason: reason.into() };
        if self.is_singular(z) {
            return Err(bad("excluded by the chart"));
        }
        let (f, g, g_prime) = (self.f(z), self.g(z), self.g_prime(z));
        if !(f.is_finite() && g.is_finite() && g_prime.is_finite()) {
            return Err(bad("data not finite"));
        }
        if !(f.squared_norm() > 0.0) {
            return Err(bad("f f̄ ≤ 0"));
        }
        if (g.squared_norm() - self.eps.sign()).abs() <= self.delta_g {
            return Err(bad("g ḡ = ε"));
        }
        Ok(NodeData { z, f, g, g_prime })
    }

    pub fn is_valid(&self, z: EpsScalar) -> bool {
        self.eval(z).is_ok()
    }

    /// φ wherever the integrand itself is finite, including nodes on the
    /// locus g ḡ = ε where the metric degenerates.
    pub fn integrand(&self, z: EpsScalar) -> Option<Phi> {
        if z.eps != self.eps || self.is_singular(z) {
            return None;
        }
        let p = phi_from_values(self.f(z), self.g(z), self.eps);
        let p = p.map(|c| c * self.twist);
        p.iter().all(|c| c.is_finite()).then_some(p)
    }

    pub fn phi(&self, z: EpsScalar) -> Result<Phi> {
        let d = self.eval(z)?;
        Ok(phi_from_values(d.f, d.g, self.eps).map(|c| c * self.twist))
    }

    /// φ_z = ψ_zz, from f′ when supplied and by a central difference in x
    /// otherwise.
    pub fn phi_prime(&self, z: EpsScalar) -> Result<Phi> {
        let d = self.eval(z)?;
        let Some(fp) = self.f_prime(z) else {
            let h = 1e-5 * (1.0 + z.modulus());
            let dz = EpsScalar::real(h, self.eps);
            let (p, m) = (self.phi(z + dz)?, self.phi(z - dz)?);
            return Ok([0, 1, 2].map(|k| (p[k] - m[k]) * (0.5 / h)));
        };
        let (f, g, gp) = (d.f, d.g, d.g_prime);
        let one = EpsScalar::one(self.eps);
        let u = EpsScalar::unit(self.eps);
        let g2 = g * g;
        let fggp2 = f * g * gp * 2.0;
        let p = match self.eps {
            Eps::Spacelike => [
                (fp * (one + g2) + fggp2) * 0.25,
                u * (fp * (one - g2) - fggp2) * 0.25,
                (fp * g + f * gp) * -0.5,
            ],
            Eps::Timelike => [
                (fp * g + f * gp) * 0.5,
                (fp * (one - g2) - fggp2) * 0.25,
                u * (fp * (one + g2) + fggp2) * 0.25,
            ],
        };
        Ok(p.map(|c| c * self.twist))
    }

    /// e^{2λ} = f f̄ (1 − ε g ḡ)² / 4.
    pub fn conformal_factor(&self, z: EpsScalar) -> Result<f64> {
        let d = self.eval(z)?;
        let w = 1.0 - self.eps.sign() * d.g.squared_norm();
        Ok(0.25 * d.f.squared_norm() * w * w)
    }

    /// The oriented normal N, the inverse stereographic image of g.
    pub fn gauss_map(&self, z: EpsScalar) -> Result<LVec3> {
        let d = self.eval(z)?;
        stereo_unproject(d.g, self.eps)
    }

    /// α = −ε f g′.
    pub fn hopf_density(&self, z: EpsScalar) -> Result<EpsScalar> {
        let d = self.eval(z)?;
        Ok((d.f * d.g_prime).scale(-self.eps.sign()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Integrated,
    ClosedForm,
}

/// A sampled immersion.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub psi: Grid<LVec3>,
    pub eps: Eps,
    pub provenance: Provenance,
}

impl SurfaceGrid {
    pub fn from_closed_form<F>(spec: GridSpec, eps: Eps, psi: F) -> Self
    where
        F: Fn(f64, f64) -> Option<LVec3> + Sync,
    {
        let psi = Grid::tabulate(spec, |i, j| {
            let (x, y) = spec.point(i, j);
            psi(x, y).filter(|p| p.is_finite())
        });
        Self { psi, eps, provenance: Provenance::ClosedForm }
    }

    pub fn spec(&self) -> GridSpec {
        self.psi.spec
    }

    /// The stored value at a node regardless of its mask. Integrated grids
    /// keep ψ on metric-degenerate nodes the path passed through.
    pub fn raw(&self, i: usize, j: usize) -> LVec3 {
        self.psi.values[self.psi.spec.index(i, j)]
    }

    /// Applies a rigid motion P ↦ R P + t.
    pub fn transformed(&self, r: &crate::lorentz3::LMat3, t: LVec3) -> Self {
        let psi = Grid {
            spec: self.psi.spec,
            values: self.psi.values.iter().map(|&p| r.apply(p) + t).collect(),
            mask: self.psi.mask.clone(),
        };
        Self { psi, eps: self.eps, provenance: self.provenance }
    }
}

/// Cumulative composite quadrature of samples at spacing `h`: Simpson on even
/// prefixes, Simpson plus a closing 3/8 panel on odd ones. Exact on cubics
/// once four samples are available.
pub fn cumulative_simpson<T: Linear + Default>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::default(); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = (f[0] + f[1]) * (0.5 * h);
        return out;
    }
    out[1] = if n == 3 {
        (f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12.0)
    } else {
        (f[0] * 9.0 + f[1] * 19.0 - f[2] * 5.0 + f[3]) * (h / 24.0)
    };
    for k in 2..n {
        out[k] = if k % 2 == 0 {
            out[k - 2] + (f[k - 2] + f[k - 1] * 4.0 + f[k]) * (h / 3.0)
        } else {
            out[k - 3] + (f[k - 3] + (f[k - 2] + f[k - 1]) * 3.0 + f[k]) * (3.0 * h / 8.0)
        };
    }
    out
}

fn trapezoid<T: Linear + Default>(f: &[T], h: f64) -> T {
    let mut acc = T::default();
    for w in f.windows(2) {
        acc = acc + (w[0] + w[1]) * (0.5 * h);
    }
    acc
}

fn simpson_total<T: Linear + Default>(f: &[T], h: f64) -> T {
    cumulative_simpson(f, h).last().copied().unwrap_or_default()
}

/// Integrates from `start` forward and backward along `samples`, stopping at
/// the first missing sample in each direction.
fn integrate_line(samples: &[Option<LVec3>], start: usize, h: f64) -> Vec<Option<LVec3>> {
    let mut out = vec![None; samples.len()];
    let fwd: Vec<LVec3> = samples[start..].iter().map_while(|s| *s).collect();
    for (k, v) in cumulative_simpson(&fwd, h).into_iter().enumerate() {
        out[start + k] = Some(v);
    }
    let bwd: Vec<LVec3> = samples[..=start].iter().rev().map_while(|s| *s).collect();
    for (k, v) in cumulative_simpson(&bwd, h).into_iter().enumerate().skip(1) {
        out[start - k] = Some(-v);
    }
    out
}

/// ψ(z) = 2 Re ∫_{z0}^{z} φ dz along z0 → (x, y0) → (x, y).
///
/// Nodes where φ is finite but the metric degenerates are integrated through
/// and then masked. Errors with [`Error::PathBlocked`] if a node with a finite
/// integrand cannot be reached, and with [`Error::PeriodDetected`] if the
/// loop around the outer edge does not close.
pub fn integrate_immersion(chart: &WeierstrassChart, spec: GridSpec, z0: EpsScalar) -> Result<SurfaceGrid> {
    let (i0, j0) = spec
        .node_at(z0.re, z0.im)
        .ok_or_else(|| Error::ContractViolation(format!("base point ({}, {}) is not a grid node", z0.re, z0.im)))?;
    let eps = chart.eps;
    let tang: Grid<(LVec3, LVec3)> = Grid::tabulate(spec, |i, j| {
        let (x, y) = spec.point(i, j);
        chart
            .integrand(chart.point(x, y))
            .map(tangents)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
    });
    let (x, y) = spec.point(i0, j0);
    chart.eval(chart.point(x, y))?;

    let row: Vec<Option<LVec3>> = (0..spec.nx).map(|i| tang.get(i, j0).map(|t| t.0)).collect();
    let row = integrate_line(&row, i0, spec.hx);

    let columns: Vec<Vec<Option<LVec3>>> = (0..spec.nx)
        .into_par_iter()
        .map(|i| match row[i] {
            None => vec![None; spec.ny],
            Some(base) => {
                let col: Vec<Option<LVec3>> = (0..spec.ny).map(|j| tang.get(i, j).map(|t| t.1)).collect();
                integrate_line(&col, j0, spec.hy).into_iter().map(|v| v.map(|v| base + v)).collect()
            }
        })
        .collect();

    let mut values = vec![LVec3::zero(); spec.len()];
    let mut mask = vec![false; spec.len()];
    let mut blocked = None;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let idx = spec.index(i, j);
            match columns[i][j] {
                Some(v) => {
                    values[idx] = v;
                    let (x, y) = spec.point(i, j);
                    mask[idx] = chart.is_valid(chart.point(x, y));
                }
                None if tang.is_valid(i, j) && blocked.is_none() => blocked = Some((i, j)),
                None => {}
            }
        }
    }

    let scale = values.iter().map(|v| v.euclid_norm()).fold(0.0, f64::max);
    if let Some((residual, estimate)) = edge_loop(&tang) {
        if residual > PERIOD_TOL * (1.0 + scale) + 10.0 * estimate {
            return Err(Error::PeriodDetected { residual });
        }
    }
    if let Some((i, j)) = blocked {
        return Err(Error::PathBlocked { i, j });
    }
    Ok(SurfaceGrid { psi: Grid { spec, values, mask }, eps, provenance: Provenance::Integrated })
}

/// |∮ dψ| around the outer edge of the grid, with a quadrature error
/// estimate. `None` if any edge node lacks an integrand.
fn edge_loop(tang: &Grid<(LVec3, LVec3)>) -> Option<(f64, f64)> {
    let s = tang.spec;
    let (nx, ny) = (s.nx, s.ny);
    let bottom: Option<Vec<LVec3>> = (0..nx).map(|i| tang.get(i, 0).map(|t| t.0)).collect();
    let top: Option<Vec<LVec3>> = (0..nx).map(|i| tang.get(i, ny - 1).map(|t| t.0)).collect();
    let left: Option<Vec<LVec3>> = (0..ny).map(|j| tang.get(0, j).map(|t| t.1)).collect();
    let right: Option<Vec<LVec3>> = (0..ny).map(|j| tang.get(nx - 1, j).map(|t| t.1)).collect();
    Some(closed_loop(&bottom?, &right?, &top?, &left?, s.hx, s.hy))
}

fn closed_loop(bottom: &[LVec3], right: &[LVec3], top: &[LVec3], left: &[LVec3], hx: f64, hy: f64) -> (f64, f64) {
    let simpson = simpson_total(bottom, hx) + simpson_total(right, hy) - simpson_total(top, hx) - simpson_total(left, hy);
    let err = |f: &[LVec3], h| (simpson_total(f, h) - trapezoid(f, h)).euclid_norm();
    let estimate = err(bottom, hx) + err(right, hy) + err(top, hx) + err(left, hy);
    (simpson.euclid_norm(), estimate)
}

/// ‖2 Re ∮ φ dz‖ around `rect`, sampled with `n` intervals per side.
pub fn period_residual(chart: &WeierstrassChart, rect: Rect, n: usize) -> Result<f64> {
    let spec = GridSpec::over(rect, n + 1, n + 1)?;
    let side = |pts: Vec<(usize, usize)>, pick: fn((LVec3, LVec3)) -> LVec3| -> Result<Vec<LVec3>> {
        pts.into_iter()
            .map(|(i, j)| {
                let (x, y) = spec.point(i, j);
                chart
                    .integrand(chart.point(x, y))
                    .map(|p| pick(tangents(p)))
                    .ok_or_else(|| Error::SingularNode { x, y, reason: "no integrand on the loop".into() })
            })
            .collect()
    };
    let bottom = side((0..=n).map(|i| (i, 0)).collect(), |t| t.0)?;
    let top = side((0..=n).map(|i| (i, n)).collect(), |t| t.0)?;
    let left = side((0..=n).map(|j| (0, j)).collect(), |t| t.1)?;
    let right = side((0..=n).map(|j| (n, j)).collect(), |t| t.1)?;
    Ok(closed_loop(&bottom, &right, &top, &left, spec.hx, spec.hy).0)
}
