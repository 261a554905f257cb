//! Fundamental forms and curvatures of a sampled immersion, by second-order
//! finite differences.
//!
//! With N the unit normal (⟨N, N⟩ = −ε),
//!
//! ```text
//! E = ⟨ψx, ψx⟩   F = ⟨ψx, ψy⟩   G = ⟨ψy, ψy⟩
//! l = ⟨ψxx, N⟩  m = ⟨ψxy, N⟩  n = ⟨ψyy, N⟩
//! H = −(ε l + n)/(2E)    K = (m² − l n)/E²
//! k₁,₂ = −εH ± √(H² + εK)    λ = −¼ log(H² + εK)
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};
use crate::kalg::{Eps, EpsScalar};
use crate::liouville::liouville_residual;
use crate::lorentz3::{cross_l, inner, LVec3};
use crate::weierstrass::{SurfaceGrid, WeierstrassChart};

/// |E| below this is treated as a degenerate metric.
pub const DEGENERATE_E: f64 = 1e-14;
/// |H| below this is snapped to 0 for λ on known minimal surfaces.
pub const MINIMAL_SNAP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ShapeSummary {
    pub nodes: usize,
    pub max_e: f64,
    pub max_abs_h: f64,
    pub max_abs_f: f64,
    pub max_e_minus_eps_g: f64,
    pub max_abs_m: f64,
    pub gauss_residual: Option<f64>,
    pub liouville_residual: Option<f64>,
}

/// Per-node geometry on the nodes whose 5×5 window of ψ is fully valid.
#[derive(Debug, Clone)]
pub struct ShapeReport {
    pub eps: Eps,
    pub e: Grid<f64>,
    pub f: Grid<f64>,
    pub g: Grid<f64>,
    pub l: Grid<f64>,
    pub m: Grid<f64>,
    pub n: Grid<f64>,
    pub normal: Grid<LVec3>,
    pub h: Grid<f64>,
    pub k: Grid<f64>,
    pub k1: Grid<f64>,
    pub k2: Grid<f64>,
    pub lambda: Grid<f64>,
    pub summary: ShapeSummary,
}

#[derive(Debug, Clone, Copy, Default)]
struct Forms {
    e: f64,
    f: f64,
    g: f64,
    l: f64,
    m: f64,
    n: f64,
    normal: LVec3,
}

/// First and second fundamental forms and the normal.
///
/// The normal is cross_l(ψx, ψy) rescaled to ⟨N, N⟩ = −ε. With a chart the
/// sign is flipped per node to agree with the chart's Gauss map, so that
/// π(N) = g; without one the cross-product orientation is kept.
pub fn fundamental_forms(surface: &SurfaceGrid, orientation: Option<&WeierstrassChart>) -> Result<ShapeReport> {
    let psi = &surface.psi;
    let spec = psi.spec;
    let eps = surface.eps;
    let psi_x = psi.derivative(Axis::X);
    let chart = orientation.filter(|c| c.eps == eps && !c.is_twisted());

    let forms: Grid<Forms> = Grid::tabulate(spec, |i, j| {
        if !psi.has_valid_window(i, j, 2) {
            return None;
        }
        let xu = psi.d1(i, j, Axis::X)?;
        let xv = psi.d1(i, j, Axis::Y)?;
        let xuu = psi.d2(i, j, Axis::X)?;
        let xvv = psi.d2(i, j, Axis::Y)?;
        let xuv = psi_x.d1(i, j, Axis::Y)?;
        let c = cross_l(xu, xv);
        let cc = inner(c, c);
        if cc == 0.0 {
            return None;
        }
        let mut normal = c * (1.0 / cc.abs().sqrt());
        if let Some(ch) = chart {
            let (x, y) = spec.point(i, j);
            if let Ok(gn) = ch.gauss_map(EpsScalar::from_xy(x, y, eps)) {
                if eps.sign() * inner(normal, gn) > 0.0 {
                    normal = -normal;
                }
            }
        }
        Some(Forms {
            e: inner(xu, xu),
            f: inner(xu, xv),
            g: inner(xv, xv),
            l: inner(xuu, normal),
            m: inner(xuv, normal),
            n: inner(xvv, normal),
            normal,
        })
    });
    if forms.valid_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    if let Some((_, _, fm)) = forms.iter_valid().find(|(_, _, fm)| !(fm.e.abs() >= DEGENERATE_E)) {
        return Err(Error::DegenerateMetric(fm.e.abs()));
    }

    let pick = |sel: fn(&Forms) -> f64| forms.map(move |fm| Some(sel(&fm)));
    let e = pick(|fm| fm.e);
    let mut report = ShapeReport {
        eps,
        f: pick(|fm| fm.f),
        g: pick(|fm| fm.g),
        l: pick(|fm| fm.l),
        m: pick(|fm| fm.m),
        n: pick(|fm| fm.n),
        normal: forms.map(|fm| Some(fm.normal)),
        h: Grid::tabulate(spec, |_, _| None),
        k: Grid::tabulate(spec, |_, _| None),
        k1: Grid::tabulate(spec, |_, _| None),
        k2: Grid::tabulate(spec, |_, _| None),
        lambda: Grid::tabulate(spec, |_, _| None),
        e,
        summary: ShapeSummary::default(),
    };
    curvatures(&mut report, false);
    Ok(report)
}

/// Fills H, K, k₁, k₂, λ and the summary. With `known_minimal`, |H| below
/// [`MINIMAL_SNAP`] is taken as 0 in λ. Nodes with H² + εK ≤ 0 are masked in
/// k₁, k₂ and λ.
pub fn curvatures(report: &mut ShapeReport, known_minimal: bool) {
    let eps = report.eps;
    let e_s = eps.sign();
    let spec = report.e.spec;
    let at = |i, j| -> Option<(f64, f64)> {
        let (e, l, m, n) = (report.e.get(i, j)?, report.l.get(i, j)?, report.m.get(i, j)?, report.n.get(i, j)?);
        Some((-(e_s * l + n) / (2.0 * e), (m * m - l * n) / (e * e)))
    };
    let hk: Grid<(f64, f64)> = Grid::tabulate(spec, at);
    report.h = hk.map(|(h, _)| Some(h));
    report.k = hk.map(|(_, k)| Some(k));
    let disc = |(h, k): (f64, f64)| {
        let d = h * h + e_s * k;
        (d > 0.0).then_some(d)
    };
    report.k1 = hk.map(move |(h, k)| disc((h, k)).map(|d| -e_s * h + d.sqrt()));
    report.k2 = hk.map(move |(h, k)| disc((h, k)).map(|d| -e_s * h - d.sqrt()));
    report.lambda = hk.map(move |(h, k)| {
        let h = if known_minimal && h.abs() < MINIMAL_SNAP { 0.0 } else { h };
        disc((h, k)).map(|d| -0.25 * d.ln())
    });
    report.summary = summarize(report);
}

fn summarize(r: &ShapeReport) -> ShapeSummary {
    let e_s = r.eps.sign();
    let max_of = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, f64::max);
    let log_sqrt_e = r.e.map(|e| (e > 0.0).then(|| 0.5 * e.ln()));
    let gauss: Vec<f64> = r
        .k
        .iter_valid()
        .filter_map(|(i, j, k)| {
            if !log_sqrt_e.has_valid_window(i, j, 1) {
                return None;
            }
            let e = r.e.get(i, j)?;
            let lap = (log_sqrt_e.d2(i, j, Axis::X)? + e_s * log_sqrt_e.d2(i, j, Axis::Y)?) / e;
            Some((k + lap).abs())
        })
        .collect();
    ShapeSummary {
        nodes: r.e.valid_count(),
        max_e: max_of(&mut r.e.iter_valid().map(|t| t.2)),
        max_abs_h: max_of(&mut r.h.iter_valid().map(|t| t.2.abs())),
        max_abs_f: max_of(&mut r.f.iter_valid().map(|t| t.2.abs())),
        max_e_minus_eps_g: max_of(&mut r.e.iter_valid().filter_map(|(i, j, e)| Some((e - e_s * r.g.get(i, j)?).abs()))),
        max_abs_m: max_of(&mut r.m.iter_valid().map(|t| t.2.abs())),
        gauss_residual: (!gauss.is_empty()).then(|| max_of(&mut gauss.into_iter())),
        liouville_residual: liouville_residual(&r.lambda, r.eps).ok(),
    }
}

impl ShapeReport {
    /// max(|l − 1|, |m|, |n + ε|): distance from the Liouville normal form
    /// II = dx² − ε dy².
    pub fn normal_form_residual(&self) -> f64 {
        let e_s = self.eps.sign();
        self.l
            .iter_valid()
            .filter_map(|(i, j, l)| {
                let (m, n) = (self.m.get(i, j)?, self.n.get(i, j)?);
                Some((l - 1.0).abs().max(m.abs()).max((n + e_s).abs()))
            })
            .fold(0.0, f64::max)
    }

    /// Max relative deviation of α ᾱ from E²(H² + εK), with α the chart's
    /// Hopf density.
    pub fn hopf_residual(&self, chart: &WeierstrassChart) -> Option<f64> {
        let e_s = self.eps.sign();
        let spec = self.e.spec;
        let mut worst: Option<f64> = None;
        for (i, j, e) in self.e.iter_valid() {
            let (h, k) = (self.h.get(i, j)?, self.k.get(i, j)?);
            let (x, y) = spec.point(i, j);
            let Ok(alpha) = chart.hopf_density(chart.point(x, y)) else { continue };
            let lhs = alpha.squared_norm();
            let rhs = e * e * (h * h + e_s * k);
            let rel = (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE);
            worst = Some(worst.map_or(rel, |w| w.max(rel)));
        }
        worst
    }

    /// Max |⟨N, N⟩ + ε|.
    pub fn normal_residual(&self) -> f64 {
        let e_s = self.eps.sign();
        self.normal.iter_valid().map(|(_, _, n)| (inner(n, n) + e_s).abs()).fold(0.0, f64::max)
    }
}
