//! Verification reports: every invariant of an example evaluated against a
//! fixed threshold.

use std::fmt::Write as _;

use serde::Serialize;

use crate::app::{base_node, fmt17, Num};
use crate::error::Result;
use crate::gallery::{coordinate_line_torsion, GalleryEntry};
use crate::geometry::{curvatures, fundamental_forms, ShapeReport};
use crate::grid::{Axis, Grid, GridSpec, Rect};
use crate::kalg::{wirtinger_residual, Eps, GridField};
use crate::liouville::{lambda_from_g, liouville_residual, transform_developing_map, transform_is_regular};
use crate::lorentz3::{inner, stereo_project, LVec3};
use crate::mobius::{AxisAngle, MobiusParams};
use crate::weierstrass::{integrate_immersion, isotropy, period_residual, regularity, SurfaceGrid};

/// Step and size of the fine window used for derivative-based checks.
pub const WINDOW_H: f64 = 1e-3;
pub const WINDOW_N: usize = 201;

pub const TOL_CLOSED_FORM: f64 = 1e-6;
pub const TOL_MEAN_CURVATURE: f64 = 5e-5;
pub const TOL_CONFORMAL: f64 = 1e-6;
pub const TOL_GAUSS_EQUATION: f64 = 1e-3;
pub const TOL_HOPF_RELATION: f64 = 1e-4;
pub const TOL_NORMAL_FORM: f64 = 1e-4;
pub const TOL_HOPF_UNIT: f64 = 1e-13;
pub const TOL_NORMAL_NORM: f64 = 1e-9;
pub const TOL_PROJECTION: f64 = 1e-12;
pub const TOL_ISOTROPY: f64 = 1e-12;
pub const TOL_WIRTINGER: f64 = 1e-5;
pub const TOL_PERIOD: f64 = 1e-8;
pub const TOL_LIOUVILLE: f64 = 1e-5;
pub const TOL_LAMBDA_MATCH: f64 = 1e-10;
pub const TOL_LAMBDA_GEOMETRIC: f64 = 1e-3;
pub const TOL_TORSION: f64 = 1e-5;
pub const TOL_RHO_XY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyOptions {
    pub nx: usize,
    pub ny: usize,
    #[serde(skip)]
    pub domain: Option<Rect>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { nx: 201, ny: 201, domain: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Num,
    pub threshold: Num,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub example: String,
    pub eps: Eps,
    pub params: Vec<(String, Num)>,
    pub domain: [Num; 4],
    pub nx: usize,
    pub ny: usize,
    pub valid_nodes: usize,
    pub masked_nodes: usize,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// Passes when `value ≤ threshold`.
    fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        self.0.push(Check {
            name: name.into(),
            value: Num(value),
            threshold: Num(threshold),
            pass: value <= threshold,
            note: None,
        });
    }

    /// Passes when `value > threshold`.
    fn above(&mut self, name: &str, value: f64, threshold: f64) {
        self.0.push(Check {
            name: name.into(),
            value: Num(value),
            threshold: Num(threshold),
            pass: value > threshold,
            note: None,
        });
    }

    fn failed(&mut self, name: &str, threshold: f64, why: String) {
        self.0.push(Check {
            name: name.into(),
            value: Num(f64::NAN),
            threshold: Num(threshold),
            pass: false,
            note: Some(why),
        });
    }

    fn result(&mut self, name: &str, threshold: f64, r: Result<f64>) {
        match r {
            Ok(v) => self.at_most(name, v, threshold),
            Err(e) => self.failed(name, threshold, e.to_string()),
        }
    }
}

/// The fine window of [`WINDOW_N`]² nodes at step [`WINDOW_H`] centred in
/// `domain`.
pub fn window_spec(domain: Rect) -> Result<GridSpec> {
    GridSpec::window(domain.center(), WINDOW_H, WINDOW_N)
}

/// Integrates `entry` over `spec`, based at the valid node nearest the centre.
pub fn integrate_entry(entry: &GalleryEntry, spec: GridSpec) -> Result<(SurfaceGrid, (f64, f64))> {
    let bounds = spec.bounds();
    let (i, j) = base_node(&entry.chart, spec, bounds.center()).ok_or(crate::error::Error::EmptyMesh)?;
    let (x0, y0) = spec.point(i, j);
    let s = integrate_immersion(&entry.chart, spec, entry.chart.point(x0, y0))?;
    Ok((s, (x0, y0)))
}

/// Geometry of `entry` on the fine window, oriented by its chart.
pub fn window_geometry(entry: &GalleryEntry, domain: Rect) -> Result<ShapeReport> {
    let (s, _) = integrate_entry(entry, window_spec(domain)?)?;
    let mut r = fundamental_forms(&s, Some(&entry.chart))?;
    curvatures(&mut r, true);
    Ok(r)
}

/// Fixed rigid motions used for the λ-invariance check.
pub fn sample_transforms(eps: Eps) -> Vec<MobiusParams> {
    let axes = [
        (LVec3::new(0.0, 0.0, 1.0), 0.9),
        (LVec3::new(0.3, -0.2, 1.0), -1.3),
        (LVec3::new(1.0, 0.0, 1.0), 0.4),
        (LVec3::new(1.0, 0.5, 0.2), 0.6),
        (LVec3::new(-0.4, 1.0, 0.3), -0.8),
    ];
    axes.iter()
        .filter_map(|&(l, th)| AxisAngle::normalized(l, th).ok())
        .filter_map(|ax| MobiusParams::from_axis_angle(&ax, eps).ok())
        .collect()
}

/// Max |λ(T∘g) − λ(g)| over nodes where both are defined.
pub fn lambda_invariance(entry: &GalleryEntry, spec: GridSpec, t: &MobiusParams) -> Result<f64> {
    let map = entry.developing_map();
    let base = lambda_from_g(&map, spec);
    let moved = lambda_from_g(&transform_developing_map(&map, t)?, spec);
    Ok(base
        .iter_valid()
        .filter_map(|(i, j, v)| moved.get(i, j).map(|w| (v - w).abs()))
        .fold(0.0, f64::max))
}

pub fn verify_report(entry: &GalleryEntry, opts: &VerifyOptions) -> Result<VerifyReport> {
    let chart = &entry.chart;
    let eps = entry.eps;
    let domain = opts.domain.unwrap_or(entry.default_domain);
    let spec = GridSpec::over(domain, opts.nx, opts.ny)?;
    let mut c = Checks::default();
    let mut notes = entry.notes.clone();

    // closed-form oracle and masks on the requested grid
    let integrated = integrate_entry(entry, spec);
    let (valid, scale) = match &integrated {
        Ok((s, (x0, y0))) => {
            if let Some(cf) = &entry.closed_form {
                let off = cf(*x0, *y0);
                let dev = s
                    .psi
                    .iter_valid()
                    .map(|(i, j, v)| {
                        let (x, y) = spec.point(i, j);
                        (v - (cf(x, y) - off)).euclid_norm()
                    })
                    .fold(0.0, f64::max);
                c.at_most("closed_form_deviation", dev, TOL_CLOSED_FORM);
            }
            let scale = s.psi.iter_valid().map(|t| t.2.euclid_norm()).fold(0.0, f64::max);
            (s.psi.valid_count(), scale)
        }
        Err(e) => {
            c.failed("integration", 0.0, e.to_string());
            (0, 0.0)
        }
    };

    // pointwise identities at the valid nodes of the requested grid
    let mut iso = 0.0f64;
    let mut reg = f64::INFINITY;
    let mut proj = 0.0f64;
    let mut nn = 0.0f64;
    let mut hopf = 0.0f64;
    for idx in 0..spec.len() {
        let (i, j) = spec.coords(idx);
        let (x, y) = spec.point(i, j);
        let z = chart.point(x, y);
        let Ok(phi) = chart.phi(z) else { continue };
        let size: f64 = phi.iter().map(|p| p.squared_norm().abs()).sum();
        iso = iso.max(isotropy(phi).modulus() / (1.0 + size));
        reg = reg.min(regularity(phi).abs());
        if let Ok(n) = chart.gauss_map(z) {
            nn = nn.max((inner(n, n) + eps.sign()).abs());
            let g = chart.g(z);
            if let Ok(back) = stereo_project(n, eps) {
                proj = proj.max((back - g).modulus() / (1.0 + g.modulus()));
            }
        }
        if entry.liouville_normal {
            if let Ok(a) = chart.hopf_density(z) {
                hopf = hopf.max((a - crate::kalg::EpsScalar::one(eps)).modulus());
            }
        }
    }
    c.at_most("isotropy", iso, TOL_ISOTROPY);
    c.above("regularity", reg, 0.0);
    c.at_most("gauss_map_norm", nn, TOL_NORMAL_NORM);
    c.at_most("gauss_map_projection", proj, TOL_PROJECTION);
    if entry.liouville_normal {
        c.at_most("hopf_density_unit", hopf, TOL_HOPF_UNIT);
    }

    c.result(
        "period",
        TOL_PERIOD * (1.0 + scale),
        period_residual(chart, domain, 200),
    );

    // derivative checks on the fine window
    let wspec = window_spec(domain)?;
    let mut wirt = 0.0f64;
    let mut phi_size = 0.0f64;
    let mut wirt_err = None;
    for k in 0..3 {
        let field = GridField::sample(wspec, eps, |z| chart.phi(z).ok().map(|p| p[k]));
        phi_size = field.field.iter_valid().map(|t| t.2.modulus()).fold(phi_size, f64::max);
        match wirtinger_residual(&field) {
            Ok(r) => wirt = wirt.max(r),
            Err(e) => wirt_err = Some(e.to_string()),
        }
    }
    match wirt_err {
        Some(e) => c.failed("holomorphy", TOL_WIRTINGER, e),
        None => c.at_most("holomorphy", wirt / (1.0 + phi_size), TOL_WIRTINGER),
    }

    let map = entry.developing_map();
    let lambda_g = lambda_from_g(&map, wspec);
    c.result("liouville_residual", TOL_LIOUVILLE, liouville_residual(&lambda_g, eps));
    if let Some(lref) = &entry.reference_lambda {
        let exact = Grid::tabulate(wspec, |i, j| {
            let (x, y) = wspec.point(i, j);
            Some(lref(x, y)).filter(|v| v.is_finite())
        });
        c.result("liouville_residual_exact", TOL_LIOUVILLE, liouville_residual(&exact, eps));
        let dev = lambda_g
            .iter_valid()
            .filter_map(|(i, j, v)| exact.get(i, j).map(|w| (v - w).abs()))
            .fold(0.0, f64::max);
        c.at_most("lambda_reference", dev, TOL_LAMBDA_MATCH);
    }
    let coarse = GridSpec::over(domain, 41, 41)?;
    let inv = sample_transforms(eps)
        .iter()
        .filter(|t| transform_is_regular(&map, t, coarse))
        .map(|t| lambda_invariance(entry, coarse, t))
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
    c.result("lambda_invariance", TOL_LAMBDA_MATCH, inv);

    if entry.verify_curvature {
        match window_geometry(entry, domain) {
            Ok(r) => {
                let s = r.summary;
                c.at_most("max_abs_h", s.max_abs_h, TOL_MEAN_CURVATURE);
                c.at_most("max_abs_f", s.max_abs_f, TOL_CONFORMAL * s.max_e);
                c.at_most("max_e_minus_eps_g", s.max_e_minus_eps_g, TOL_CONFORMAL * s.max_e);
                c.at_most("normal_norm", r.normal_residual(), TOL_NORMAL_NORM);
                c.at_most("gauss_equation", s.gauss_residual.unwrap_or(f64::NAN), TOL_GAUSS_EQUATION);
                c.at_most("hopf_relation", r.hopf_residual(chart).unwrap_or(f64::NAN), TOL_HOPF_RELATION);
                if entry.liouville_normal {
                    c.at_most("liouville_normal_form", r.normal_form_residual(), TOL_NORMAL_FORM);
                }
                let dev = r
                    .lambda
                    .iter_valid()
                    .filter_map(|(i, j, v)| lambda_g.get(i, j).map(|w| (v - w).abs()))
                    .fold(f64::NAN, |a: f64, b| if a.is_nan() { b } else { a.max(b) });
                c.at_most("lambda_geometric", dev, TOL_LAMBDA_GEOMETRIC);
            }
            Err(e) => c.failed("geometry", 0.0, e.to_string()),
        }
    } else {
        notes.push("curvature checks skipped".into());
    }

    if let Some(cf) = entry.closed_form.as_ref().filter(|_| entry.name == "minkowski_bonnet") {
        let (x0, y0) = domain.center();
        let (ta, tb) = coordinate_line_torsion(cf, x0, y0);
        c.at_most("bonnet_torsion", ta.max(tb), TOL_TORSION);
    }
    if entry.name == "timelike_bonnet" {
        let rho = lambda_g.map(|l| Some(l.exp()));
        let rho_x = rho.derivative(Axis::X);
        let worst = (0..wspec.len())
            .filter_map(|idx| {
                let (i, j) = wspec.coords(idx);
                (rho.has_valid_window(i, j, 1)).then(|| rho_x.d1(i, j, Axis::Y)).flatten()
            })
            .fold(0.0f64, |a, v| a.max(v.abs()));
        c.at_most("rho_xy", worst, TOL_RHO_XY);
    }

    let checks = c.0;
    let pass = checks.iter().all(|k| k.pass);
    Ok(VerifyReport {
        example: entry.name.clone(),
        eps,
        params: entry.params.iter().map(|(k, v)| (k.to_string(), Num(*v))).collect(),
        domain: [Num(domain.x0), Num(domain.x1), Num(domain.y0), Num(domain.y1)],
        nx: spec.nx,
        ny: spec.ny,
        valid_nodes: valid,
        masked_nodes: spec.len() - valid,
        notes,
        checks,
        pass,
    })
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "example: {}", self.example);
        let _ = writeln!(s, "eps: {}", self.eps);
        for (k, v) in &self.params {
            let _ = writeln!(s, "param {k}: {}", fmt17(v.0));
        }
        let d: Vec<String> = self.domain.iter().map(|v| fmt17(v.0)).collect();
        let _ = writeln!(s, "domain: {}", d.join(","));
        let _ = writeln!(s, "grid: {}x{} valid={} masked={}", self.nx, self.ny, self.valid_nodes, self.masked_nodes);
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        for k in &self.checks {
            let verdict = if k.pass { "PASS" } else { "FAIL" };
            let _ = write!(s, "{verdict} {:<26} {:>24} <= {:>24}", k.name, fmt17(k.value.0), fmt17(k.threshold.0));
            if let Some(n) = &k.note {
                let _ = write!(s, "  ({n})");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}
