//! Named example surfaces, each given in Liouville coordinates by a
//! developing map g with f = −ε/g′, plus conjugate constructions.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Rect;
use crate::kalg::{Eps, EpsScalar};
use crate::lorentz3::LVec3;
use crate::weierstrass::{DevelopingMap, WeierstrassChart};

pub type PointFn = Arc<dyn Fn(f64, f64) -> LVec3 + Send + Sync>;
pub type RealFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

const PARAM_TOL: f64 = 1e-10;

/// Gallery names with their parameter constraints.
pub const EXAMPLES: [(&str, &str); 8] = [
    ("spacelike_enneper", "eps=+1, no parameters"),
    ("elliptic_catenoid", "eps=+1, no parameters"),
    ("minkowski_bonnet", "eps=+1, a^2 + b^2 = 1, 0 < a <= 1, 0 <= b < 1 (default a=0.8)"),
    ("helicoid", "eps=+1, no parameters"),
    ("minkowski_thomsen", "eps=+1, a^2 + b^2 = 1, 0 < a <= 1, 0 <= b < 1 (default a=0.8)"),
    ("timelike_enneper", "eps=-1, no parameters"),
    ("hyperbolic_catenoid", "eps=-1, no parameters"),
    ("timelike_bonnet", "eps=-1, a^2 - b^2 = 1, a >= 1, b <= 0 (default a=2)"),
];

/// Optional shape parameters; missing ones are derived from the constraint
/// or defaulted.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Params {
    pub a: Option<f64>,
    pub b: Option<f64>,
}

impl Params {
    pub fn new(a: Option<f64>, b: Option<f64>) -> Self {
        Self { a, b }
    }
}

#[derive(Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub eps: Eps,
    pub params: Vec<(&'static str, f64)>,
    pub chart: WeierstrassChart,
    pub closed_form: Option<PointFn>,
    pub reference_lambda: Option<RealFn>,
    pub default_domain: Rect,
    pub notes: Vec<String>,
    /// Whether f = −ε/g′, so the Hopf density is identically 1.
    pub liouville_normal: bool,
    /// Whether curvature checks apply (false for Lorentz conjugates).
    pub verify_curvature: bool,
}

impl fmt::Debug for GalleryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GalleryEntry")
            .field("name", &self.name)
            .field("eps", &self.eps)
            .field("params", &self.params)
            .field("default_domain", &self.default_domain)
            .field("notes", &self.notes)
            .finish_non_exhaustive()
    }
}

impl GalleryEntry {
    pub fn developing_map(&self) -> DevelopingMap {
        self.chart.developing_map()
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    /// Centre of the default domain.
    pub fn base_point(&self) -> (f64, f64) {
        self.default_domain.center()
    }
}

fn sqrt_i() -> EpsScalar {
    EpsScalar::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, Eps::Spacelike)
}

/// (x − y)/√2 and (x + y)/√2.
fn rotated(x: f64, y: f64) -> (f64, f64) {
    ((x - y) * FRAC_1_SQRT_2, (x + y) * FRAC_1_SQRT_2)
}

struct Recipe {
    name: &'static str,
    eps: Eps,
    params: Vec<(&'static str, f64)>,
    map: DevelopingMap,
    singular: Option<Arc<dyn Fn(f64, f64) -> bool + Send + Sync>>,
    closed_form: PointFn,
    lambda: RealFn,
    domain: Rect,
    notes: Vec<String>,
}

fn build(s: Recipe) -> GalleryEntry {
    let mut chart = WeierstrassChart::from_developing_map(&s.map, s.domain);
    if let Some(p) = s.singular {
        chart = chart.with_singular(move |z: EpsScalar| p(z.re, z.im));
    }
    GalleryEntry {
        name: s.name.to_string(),
        eps: s.eps,
        params: s.params,
        chart,
        closed_form: Some(s.closed_form),
        reference_lambda: Some(s.lambda),
        default_domain: s.domain,
        notes: s.notes,
        liouville_normal: true,
        verify_curvature: true,
    }
}

fn no_params(name: &str, p: Params) -> Result<()> {
    if p.a.is_some() || p.b.is_some() {
        return Err(Error::ParamConstraintViolation(format!("{name} takes no parameters")));
    }
    Ok(())
}

/// (a, b) with a² + b² = 1, 0 < a ≤ 1, 0 ≤ b < 1.
fn circle_params(p: Params) -> Result<(f64, f64)> {
    let (a, b) = match (p.a, p.b) {
        (None, None) => (0.8, 0.6),
        (Some(a), None) => (a, (1.0 - a * a).max(0.0).sqrt()),
        (None, Some(b)) => ((1.0 - b * b).max(0.0).sqrt(), b),
        (Some(a), Some(b)) => (a, b),
    };
    let ok = a > 0.0 && a <= 1.0 && (0.0..1.0).contains(&b) && (a * a + b * b - 1.0).abs() <= PARAM_TOL;
    if !ok {
        return Err(Error::ParamConstraintViolation(format!(
            "need a^2 + b^2 = 1, 0 < a <= 1, 0 <= b < 1; got a={a}, b={b}"
        )));
    }
    Ok((a, b))
}

/// (a, b) with a² − b² = 1, a ≥ 1, b ≤ 0.
fn hyperbola_params(p: Params) -> Result<(f64, f64)> {
    let (a, b) = match (p.a, p.b) {
        (None, None) => (2.0, -3f64.sqrt()),
        (Some(a), None) => (a, -(a * a - 1.0).max(0.0).sqrt()),
        (None, Some(b)) => ((1.0 + b * b).sqrt(), b),
        (Some(a), Some(b)) => (a, b),
    };
    let ok = a >= 1.0 && b <= 0.0 && (a * a - b * b - 1.0).abs() <= PARAM_TOL;
    if !ok {
        return Err(Error::ParamConstraintViolation(format!(
            "need a^2 - b^2 = 1, a >= 1, b <= 0; got a={a}, b={b}"
        )));
    }
    Ok((a, b))
}

pub fn get_example(name: &str, p: Params) -> Result<GalleryEntry> {
    const S: Eps = Eps::Spacelike;
    const T: Eps = Eps::Timelike;
    let entry = match name {
        "spacelike_enneper" => {
            no_params(name, p)?;
            build(Recipe {
                name: "spacelike_enneper",
                eps: S,
                params: vec![],
                map: DevelopingMap::new(S, |z| z, |_| EpsScalar::one(S)),
                singular: None,
                closed_form: Arc::new(|x, y| {
                    LVec3::new(
                        -0.5 * (x + x.powi(3) / 3.0 - y * y * x),
                        0.5 * (y + y.powi(3) / 3.0 - x * x * y),
                        0.5 * (x * x - y * y),
                    )
                }),
                lambda: Arc::new(|x, y| ((1.0 - x * x - y * y).abs() / 2.0).ln()),
                domain: Rect::new(-0.5, 0.5, -0.5, 0.5),
                notes: vec!["the unit circle |z| = 1 is excluded and masked".into()],
            })
        }
        "elliptic_catenoid" => {
            no_params(name, p)?;
            build(Recipe {
                name: "elliptic_catenoid",
                eps: S,
                params: vec![],
                map: DevelopingMap::new(S, |z: EpsScalar| -z.exp(), |z: EpsScalar| -z.exp()),
                singular: Some(Arc::new(|x, _| x <= 0.0)),
                closed_form: Arc::new(|x, y| LVec3::new(x.sinh() * y.cos(), x.sinh() * y.sin(), x)),
                lambda: Arc::new(|x, _| x.sinh().ln()),
                domain: Rect::new(0.5, 1.5, -1.0, 1.0),
                notes: vec!["defined for x > 0".into()],
            })
        }
        "minkowski_bonnet" => {
            let (a, b) = circle_params(p)?;
            let x0 = (b / a).asinh() + 0.3;
            build(Recipe {
                name: "minkowski_bonnet",
                eps: S,
                params: vec![("a", a), ("b", b)],
                map: DevelopingMap::new(
                    S,
                    move |z: EpsScalar| -(z.exp() * a) - EpsScalar::real(b, S),
                    move |z: EpsScalar| -(z.exp() * a),
                ),
                singular: Some(Arc::new(move |x, _| x.sinh() <= b / a)),
                closed_form: Arc::new(move |x, y| {
                    let w = (-x).exp() / a;
                    LVec3::new((a * x.cosh() - w) * y.cos() + b * x, a * x.sinh() * y.sin() + b * y, x - b * w * y.cos())
                }),
                lambda: Arc::new(move |x, y| (a * x.sinh() + b * y.cos()).ln()),
                domain: Rect::new(x0, x0 + 1.0, -1.0, 1.0),
                notes: vec!["defined for sinh x > b/a; a = 1, b = 0 is the elliptic catenoid".into()],
            })
        }
        "helicoid" => {
            no_params(name, p)?;
            let w = sqrt_i();
            build(Recipe {
                name: "helicoid",
                eps: S,
                params: vec![],
                map: DevelopingMap::new(S, move |z: EpsScalar| -(w * z).exp(), move |z: EpsScalar| -(w * (w * z).exp())),
                singular: Some(Arc::new(|x, y| x <= y)),
                closed_form: Arc::new(|x, y| {
                    let (d, s) = rotated(x, y);
                    LVec3::new(s.sin() * d.cosh(), -s.cos() * d.cosh(), s)
                }),
                lambda: Arc::new(|x, y| rotated(x, y).0.sinh().ln()),
                domain: Rect::new(1.0, 2.0, -0.5, 0.5),
                notes: vec!["sqrt(i) = exp(i pi/4), principal branch; defined for x > y".into()],
            })
        }
        "minkowski_thomsen" => {
            let (a, b) = circle_params(p)?;
            let w = sqrt_i();
            build(Recipe {
                name: "minkowski_thomsen",
                eps: S,
                params: vec![("a", a), ("b", b)],
                map: DevelopingMap::new(
                    S,
                    move |z: EpsScalar| -((w * z).exp() * a + EpsScalar::real(b, S)),
                    move |z: EpsScalar| -(w * (w * z).exp() * a),
                ),
                singular: Some(Arc::new(move |x, y| rotated(x, y).0.sinh() <= b / a)),
                closed_form: Arc::new(move |x, y| {
                    let (d, s) = rotated(x, y);
                    let e = (-d).exp() / a;
                    LVec3::new((e + a * d.sinh()) * s.sin() + b * s, -a * d.cosh() * s.cos() - b * d, s + b * e * s.sin())
                }),
                lambda: Arc::new(move |x, y| {
                    let (d, s) = rotated(x, y);
                    (a * d.sinh() + b * s.cos()).ln()
                }),
                domain: Rect::new(2.0, 3.0, -0.5, 0.5),
                notes: vec!["domain inequality sinh((x - y)/sqrt 2) > b/a used as printed".into()],
            })
        }
        "timelike_enneper" => {
            no_params(name, p)?;
            build(Recipe {
                name: "timelike_enneper",
                eps: T,
                params: vec![],
                map: DevelopingMap::new(T, |z| z, |_| EpsScalar::one(T)),
                singular: None,
                closed_form: Arc::new(|x, y| {
                    LVec3::new(
                        0.5 * (x * x + y * y),
                        0.5 * (x - x.powi(3) / 3.0 - y * y * x),
                        0.5 * (y + y.powi(3) / 3.0 + x * x * y),
                    )
                }),
                lambda: Arc::new(|x, y| ((1.0 + x * x - y * y).abs() / 2.0).ln()),
                domain: Rect::new(0.5, 1.5, -0.5, 0.5),
                notes: vec!["the hyperbolas x^2 - y^2 = -1 are excluded and masked".into()],
            })
        }
        "hyperbolic_catenoid" => {
            no_params(name, p)?;
            build(Recipe {
                name: "hyperbolic_catenoid",
                eps: T,
                params: vec![],
                map: DevelopingMap::new(T, |z: EpsScalar| -z.exp(), |z: EpsScalar| -z.exp()),
                singular: None,
                closed_form: Arc::new(|x, y| LVec3::new(x, x.cosh() * y.cosh(), -x.cosh() * y.sinh())),
                lambda: Arc::new(|x, _| x.cosh().ln()),
                domain: Rect::new(-1.0, 1.0, -1.0, 1.0),
                notes: vec![],
            })
        }
        "timelike_bonnet" => {
            let (a, b) = hyperbola_params(p)?;
            let x0 = (-b * 0.5f64.cosh() / a).max(1.0).acosh() + 0.3;
            build(Recipe {
                name: "timelike_bonnet",
                eps: T,
                params: vec![("a", a), ("b", b)],
                map: DevelopingMap::new(
                    T,
                    move |z: EpsScalar| -(z.exp() * a) - EpsScalar::real(b, T),
                    move |z: EpsScalar| -(z.exp() * a),
                ),
                singular: Some(Arc::new(move |x, y| a * x.cosh() <= -b * y.cosh())),
                closed_form: Arc::new(move |x, y| {
                    let w = (-x).exp() / a;
                    LVec3::new(x - b * w * y.cosh(), (w + a * x.sinh()) * y.cosh() + b * x, -a * x.cosh() * y.sinh() - b * y)
                }),
                lambda: Arc::new(move |x, y| (a * x.cosh() + b * y.cosh()).ln()),
                domain: Rect::new(x0, x0 + 1.0, -0.5, 0.5),
                notes: vec!["defined for a cosh x > -b cosh y; a = 1, b = 0 is the hyperbolic catenoid".into()],
            })
        }
        _ => return Err(Error::UnknownExample(name.to_string())),
    };
    Ok(entry)
}

/// The conjugate surface.
///
/// For ε = +1 the parameter is rotated: g*(w) = g(√i w), f*(w) = f(√i w)/√i,
/// λ*(x, y) = λ((x − y)/√2, (x + y)/√2), over the largest square inside the
/// rotated domain. The catenoid and Minkowski–Bonnet entries map to the
/// helicoid and Minkowski–Thomsen closed forms.
///
/// For ε = −1 this is the Lorentz conjugate with ψ*_x = ψ_y and ψ*_y = ψ_x,
/// i.e. φ* = τφ. Its shape operator need not be diagonalizable, so
/// curvature checks are switched off.
pub fn conjugate_surface(entry: &GalleryEntry) -> GalleryEntry {
    match entry.eps {
        Eps::Spacelike => spacelike_conjugate(entry),
        Eps::Timelike => {
            let mut notes = entry.notes.clone();
            notes.push("Weingarten not diagonalizable, curvature verification skipped".into());
            GalleryEntry {
                name: format!("lorentz_conjugate({})", entry.name),
                chart: entry.chart.clone().twisted(EpsScalar::unit(Eps::Timelike)),
                closed_form: None,
                reference_lambda: None,
                notes,
                liouville_normal: false,
                verify_curvature: false,
                ..entry.clone()
            }
        }
    }
}

fn spacelike_conjugate(entry: &GalleryEntry) -> GalleryEntry {
    const S: Eps = Eps::Spacelike;
    let w = sqrt_i();
    let src = entry.chart.clone();
    let (c1, c2, c3) = (src.clone(), src.clone(), src.clone());
    let winv = w.conj();
    let d = entry.default_domain;
    let (cx, cy) = d.center();
    let (ux, uy) = ((cx + cy) * FRAC_1_SQRT_2, (cy - cx) * FRAC_1_SQRT_2);
    let half = 0.5 * (d.x1 - d.x0).min(d.y1 - d.y0) / SQRT_2;
    let domain = Rect::new(ux - half, ux + half, uy - half, uy + half);
    let chart = WeierstrassChart::new(
        S,
        domain,
        move |z| c1.g(w * z),
        move |z| w * c2.g_prime(w * z),
        move |z| c3.f(w * z) * winv,
    )
    .with_singular(move |z| src.integrand(w * z).is_none())
    .with_delta_g(entry.chart.delta_g);
    let lambda = entry.reference_lambda.clone().map(|l| -> RealFn {
        Arc::new(move |x, y| {
            let (d, s) = rotated(x, y);
            l(d, s)
        })
    });
    let mut notes = entry.notes.clone();
    notes.push("conjugate via z* = exp(-i pi/4) z".into());
    let mut out = GalleryEntry {
        name: format!("conjugate({})", entry.name),
        eps: S,
        params: entry.params.clone(),
        chart,
        closed_form: None,
        reference_lambda: lambda,
        default_domain: domain,
        notes,
        liouville_normal: entry.liouville_normal,
        verify_curvature: true,
    };
    let known = match entry.name.as_str() {
        "elliptic_catenoid" => Some(("helicoid", Params::default())),
        "minkowski_bonnet" => Some(("minkowski_thomsen", Params::new(entry.param("a"), entry.param("b")))),
        _ => None,
    };
    if let Some((name, p)) = known {
        if let Ok(target) = get_example(name, p) {
            out.name = name.to_string();
            out.closed_form = target.closed_form;
        }
    }
    out
}

/// Corrupts a chart by conjugating g (and g′); φ is then no longer
/// holomorphic. Used as a negative control.
pub fn corrupted(entry: &GalleryEntry) -> GalleryEntry {
    let (c1, c2, c3) = (entry.chart.clone(), entry.chart.clone(), entry.chart.clone());
    let chart = WeierstrassChart::new(
        entry.eps,
        entry.chart.domain,
        move |z| c1.g(z).conj(),
        move |z| c2.g_prime(z).conj(),
        move |z| c3.f(z),
    );
    let mut notes = entry.notes.clone();
    notes.push("negative control: g replaced by its conjugate".into());
    GalleryEntry {
        name: format!("corrupted({})", entry.name),
        chart,
        closed_form: None,
        reference_lambda: None,
        notes,
        liouville_normal: false,
        ..entry.clone()
    }
}

/// Five-point derivatives of a coordinate line, up to third order.
fn line_derivatives(c: &dyn Fn(f64) -> LVec3, t: f64, h: f64) -> (LVec3, LVec3, LVec3) {
    let p = |k: f64| c(t + k * h);
    let d1 = (p(-2.0) - p(2.0) + (p(1.0) - p(-1.0)) * 8.0) * (1.0 / (12.0 * h));
    let d2 = ((p(1.0) + p(-1.0)) * 16.0 - p(2.0) - p(-2.0) - p(0.0) * 30.0) * (1.0 / (12.0 * h * h));
    let d3 = (p(-3.0) - p(3.0) + (p(2.0) - p(-2.0)) * 8.0 - (p(1.0) - p(-1.0)) * 13.0) * (1.0 / (8.0 * h * h * h));
    (d1, d2, d3)
}

/// Torsion ratios |⟨α′ × α‴, α″⟩| / ‖α′ × α″‖² for the coordinate lines
/// α(x) = ψ(x, y0) and β(y) = ψ(x0, y). Both vanish when the lines of
/// curvature are plane curves.
pub fn coordinate_line_torsion(psi: &PointFn, x0: f64, y0: f64) -> (f64, f64) {
    use crate::lorentz3::{cross_l, inner};
    let ratio = |(d1, d2, d3): (LVec3, LVec3, LVec3)| {
        let c = cross_l(d1, d2);
        inner(cross_l(d1, d3), d2).abs() / inner(c, c).abs()
    };
    let h = 1e-2;
    let alpha = ratio(line_derivatives(&|x| psi(x, y0), x0, h));
    let beta = ratio(line_derivatives(&|y| psi(x0, y), y0, h));
    (alpha, beta)
}
