//! Lorentz–Minkowski space 𝕃³ with metric dx₁² + dx₂² − dx₃².

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kalg::{Eps, EpsScalar};

/// Tolerance for membership of inputs in the hyperboloid H²_ε.
pub const HYPERBOLOID_TOL: f64 = 1e-9;
/// Tolerance for pseudo-orthogonality AᵀηA = η.
pub const PSEUDO_ORTHOGONAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl LVec3 {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Euclidean length, for error measurement only.
    pub fn euclid_norm(self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    /// Applies η = diag(1, 1, −1).
    pub fn eta(self) -> Self {
        Self::new(self.x1, self.x2, -self.x3)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }
}

impl Add for LVec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for LVec3 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for LVec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for LVec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<f64> for LVec3 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x1 * k, self.x2 * k, self.x3 * k)
    }
}

pub fn inner(u: LVec3, v: LVec3) -> f64 {
    u.x1 * v.x1 + u.x2 * v.x2 - u.x3 * v.x3
}

/// Lorentzian cross product η(u ×ₑ v), characterised by
/// ⟨cross_l(u, v), w⟩ = det[u; v; w].
pub fn cross_l(u: LVec3, v: LVec3) -> LVec3 {
    LVec3::new(
        u.x2 * v.x3 - u.x3 * v.x2,
        u.x3 * v.x1 - u.x1 * v.x3,
        u.x1 * v.x2 - u.x2 * v.x1,
    )
    .eta()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Causal {
    Spacelike,
    Timelike,
    Lightlike,
}

pub fn causal_character(v: LVec3, tol: f64) -> Causal {
    let q = inner(v, v);
    if q.abs() <= tol {
        Causal::Lightlike
    } else if q > 0.0 {
        Causal::Spacelike
    } else {
        Causal::Timelike
    }
}

fn check_on_hyperboloid(p: LVec3, eps: Eps) -> Result<()> {
    let r = inner(p, p) + eps.sign();
    if r.abs() > HYPERBOLOID_TOL * (1.0 + p.euclid_norm().powi(2)) {
        return Err(Error::ContractViolation(format!(
            "point {p:?} is not on H²_{} (⟨P,P⟩ + ε = {r:e})",
            eps
        )));
    }
    Ok(())
}

fn pole_tol(p: LVec3) -> f64 {
    1e-12 * (1.0 + p.euclid_norm())
}

/// Stereographic projection of H²_ε onto 𝕂: from the north pole (0, 0, 1)
/// when ε = +1, `(u + iv)/(1 − w)`; from the south pole (−1, 0, 0) when
/// ε = −1, `(−v + τw)/(u + 1)`.
pub fn stereo_project(p: LVec3, eps: Eps) -> Result<EpsScalar> {
    check_on_hyperboloid(p, eps)?;
    match eps {
        Eps::Spacelike => {
            let d = 1.0 - p.x3;
            if d.abs() < pole_tol(p) {
                return Err(Error::PoleError("w = 1 (north pole)".into()));
            }
            Ok(EpsScalar::new(p.x1 / d, p.x2 / d, eps))
        }
        Eps::Timelike => {
            let d = p.x1 + 1.0;
            if d.abs() < pole_tol(p) {
                return Err(Error::PoleError("u = −1 (south pole)".into()));
            }
            Ok(EpsScalar::new(-p.x2 / d, p.x3 / d, eps))
        }
    }
}

/// Inverse of [`stereo_project`].
pub fn stereo_unproject(z: EpsScalar, eps: Eps) -> Result<LVec3> {
    if z.eps != eps {
        return Err(Error::EpsMismatch { left: z.eps.as_i32(), right: eps.as_i32() });
    }
    let n = z.squared_norm();
    let tol = 1e-12 * (1.0 + n.abs());
    match eps {
        Eps::Spacelike => {
            let d = n - 1.0;
            if d.abs() < tol {
                return Err(Error::LightConeError("|z|² = 1".into()));
            }
            Ok(LVec3::new(-2.0 * z.re, -2.0 * z.im, 1.0 + n) * (1.0 / d))
        }
        Eps::Timelike => {
            let d = 1.0 + n;
            if d.abs() < tol {
                return Err(Error::LightConeError("1 + z z̄ = 0".into()));
            }
            Ok(LVec3::new(1.0 - n, -2.0 * z.re, 2.0 * z.im) * (1.0 / d))
        }
    }
}

/// Axis type: −1 timelike, 0 lightlike, +1 spacelike (the sign of ⟨L, L⟩).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisKind {
    Timelike,
    Lightlike,
    Spacelike,
}

impl AxisKind {
    pub fn k(self) -> i32 {
        match self {
            AxisKind::Timelike => -1,
            AxisKind::Lightlike => 0,
            AxisKind::Spacelike => 1,
        }
    }

    pub fn from_k(k: i32) -> Result<Self> {
        match k {
            -1 => Ok(AxisKind::Timelike),
            0 => Ok(AxisKind::Lightlike),
            1 => Ok(AxisKind::Spacelike),
            _ => Err(Error::ContractViolation(format!("k must be in {{−1, 0, 1}}, got {k}"))),
        }
    }
}

/// The pair (c_k(θ), s_k(θ)): (cos, sin) for k = −1, (1, −εθ) for k = 0,
/// (cosh, sinh) for k = +1.
pub fn ck_sk(theta: f64, k: AxisKind, eps: Eps) -> (f64, f64) {
    match k {
        AxisKind::Timelike => (theta.cos(), theta.sin()),
        AxisKind::Lightlike => (1.0, -eps.sign() * theta),
        AxisKind::Spacelike => (theta.cosh(), theta.sinh()),
    }
}

/// 3×3 real matrix acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LMat3(pub [[f64; 3]; 3]);

impl LMat3 {
    pub fn identity() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Self([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(c: [LVec3; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (k, col) in c.iter().enumerate() {
            let a = col.to_array();
            for r in 0..3 {
                m[r][k] = a[r];
            }
        }
        Self(m)
    }

    pub fn apply(&self, v: LVec3) -> LVec3 {
        let a = v.to_array();
        let row = |r: usize| self.0[r][0] * a[0] + self.0[r][1] * a[1] + self.0[r][2] * a[2];
        LVec3::new(row(0), row(1), row(2))
    }

    pub fn transpose(&self) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.0[c][r];
            }
        }
        Self(m)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// max |(AᵀηA − η)_{rc}|.
    pub fn pseudo_orthogonality_residual(&self) -> f64 {
        let eta = Self::diag(1.0, 1.0, -1.0);
        let g = self.transpose() * eta * *self;
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                r = r.max((g.0[i][j] - eta.0[i][j]).abs());
            }
        }
        r
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                r = r.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        r
    }
}

impl Mul for LMat3 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Self(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationKind {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

/// The three normal forms of O₁⁺⁺(3, ℝ).
pub fn canonical_rotation(kind: RotationKind, theta: f64) -> LMat3 {
    let (c, s) = (theta.cos(), theta.sin());
    let (ch, sh) = (theta.cosh(), theta.sinh());
    let h = 0.5 * theta * theta;
    LMat3(match kind {
        RotationKind::Hyperbolic => [[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]],
        RotationKind::Elliptic => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        RotationKind::Parabolic => [
            [1.0, -theta, theta],
            [theta, 1.0 - h, h],
            [theta, -h, 1.0 + h],
        ],
    })
}

/// Connected component of O₁(3, ℝ), named by (sign det, sign a₃₃).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LorentzComponent {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
    NotPseudoOrthogonal,
}

pub fn classify_lorentz(a: &LMat3) -> LorentzComponent {
    if a.pseudo_orthogonality_residual() > PSEUDO_ORTHOGONAL_TOL {
        return LorentzComponent::NotPseudoOrthogonal;
    }
    match (a.det() > 0.0, a.0[2][2] > 0.0) {
        (true, true) => LorentzComponent::PlusPlus,
        (true, false) => LorentzComponent::PlusMinus,
        (false, true) => LorentzComponent::MinusPlus,
        (false, false) => LorentzComponent::MinusMinus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rvec(rng: &mut ChaCha8Rng) -> LVec3 {
        LVec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
    }

    #[test]
    fn inner_products() {
        let e3 = LVec3::new(0.0, 0.0, 1.0);
        assert_eq!(inner(e3, e3), -1.0);
        assert_eq!(inner(LVec3::new(1.0, 0.0, 0.0), LVec3::new(0.0, 1.0, 0.0)), 0.0);
        assert_eq!(inner(LVec3::new(1.0, 1.0, 1.0), LVec3::new(2.0, 0.0, 1.0)), 1.0);
    }

    #[test]
    fn cross_product() {
        let e1 = LVec3::new(1.0, 0.0, 0.0);
        let e2 = LVec3::new(0.0, 1.0, 0.0);
        assert_eq!(cross_l(e1, e2), LVec3::new(0.0, 0.0, -1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (u, v, w) = (rvec(&mut rng), rvec(&mut rng), rvec(&mut rng));
            assert_eq!(cross_l(u, u), LVec3::zero());
            assert!(inner(cross_l(u, v), u).abs() < 1e-12);
            let det = LMat3::from_columns([u, v, w]).det();
            assert!((inner(cross_l(u, v), w) - det).abs() <= 1e-12 * (1.0 + det.abs()));
        }
    }

    #[test]
    fn causal_types() {
        assert_eq!(causal_character(LVec3::new(0.0, 0.0, 1.0), 1e-12), Causal::Timelike);
        assert_eq!(causal_character(LVec3::new(1.0, 0.0, 1.0), 1e-12), Causal::Lightlike);
        assert_eq!(causal_character(LVec3::new(2.0, 1.0, 1.0), 1e-12), Causal::Spacelike);
    }

    #[test]
    fn projections() {
        let s = Eps::Spacelike;
        let t = Eps::Timelike;
        assert_eq!(stereo_project(LVec3::new(0.0, 0.0, -1.0), s).unwrap(), EpsScalar::zero(s));
        assert_eq!(stereo_project(LVec3::new(1.0, 0.0, 0.0), t).unwrap(), EpsScalar::zero(t));
        assert!(matches!(stereo_project(LVec3::new(0.0, 0.0, 1.0), s), Err(Error::PoleError(_))));
        assert!(matches!(stereo_project(LVec3::new(-1.0, 0.0, 0.0), t), Err(Error::PoleError(_))));
        assert!(matches!(
            stereo_project(LVec3::new(1.0, 1.0, 1.0), s),
            Err(Error::ContractViolation(_))
        ));
        assert_eq!(stereo_unproject(EpsScalar::zero(s), s).unwrap(), LVec3::new(0.0, 0.0, -1.0));
        assert_eq!(stereo_unproject(EpsScalar::zero(t), t).unwrap(), LVec3::new(1.0, 0.0, 0.0));
        assert!(matches!(
            stereo_unproject(EpsScalar::new(0.6, 0.8, s), s),
            Err(Error::LightConeError(_))
        ));
        assert!(matches!(
            stereo_unproject(EpsScalar::new(0.0, 1.0, t), t),
            Err(Error::LightConeError(_))
        ));
    }

    #[test]
    fn projection_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for eps in [Eps::Spacelike, Eps::Timelike] {
            for _ in 0..500 {
                let z = EpsScalar::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), eps);
                let Ok(p) = stereo_unproject(z, eps) else { continue };
                if p.euclid_norm() > 1e3 {
                    continue;
                }
                assert!((inner(p, p) + eps.sign()).abs() < 1e-12 * (1.0 + p.euclid_norm().powi(2)));
                let back = stereo_project(p, eps).unwrap();
                assert!((back - z).modulus() < 1e-12 * (1.0 + z.modulus()), "{z} -> {back}");
            }
        }
    }

    #[test]
    fn ck_sk_values() {
        for k in [AxisKind::Timelike, AxisKind::Lightlike, AxisKind::Spacelike] {
            assert_eq!(ck_sk(0.0, k, Eps::Timelike), (1.0, 0.0));
        }
        let (c, s) = ck_sk(0.8, AxisKind::Spacelike, Eps::Spacelike);
        assert_eq!((c, s), (0.8f64.cosh(), 0.8f64.sinh()));
        assert!((c * c - s * s - 1.0).abs() < 1e-14);
        assert_eq!(ck_sk(2.0, AxisKind::Lightlike, Eps::Timelike), (1.0, 2.0));
        assert_eq!(ck_sk(2.0, AxisKind::Lightlike, Eps::Spacelike), (1.0, -2.0));
    }

    #[test]
    fn ck_sk_identities() {
        for eps in [Eps::Spacelike, Eps::Timelike] {
            for k in [AxisKind::Timelike, AxisKind::Lightlike, AxisKind::Spacelike] {
                for &t in &[-1.3, -0.2, 0.4, 1.1] {
                    let (c, s) = ck_sk(t, k, eps);
                    let (c2, s2) = ck_sk(2.0 * t, k, eps);
                    let kf = k.k() as f64;
                    assert!((c * c - kf * s * s - 1.0).abs() < 1e-13);
                    assert!((c * c + kf * s * s - c2).abs() < 1e-13);
                    assert!((2.0 * s * c - s2).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn canonical_rotations() {
        assert_eq!(canonical_rotation(RotationKind::Elliptic, 0.0), LMat3::identity());
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        assert_eq!(
            canonical_rotation(RotationKind::Hyperbolic, 1.0),
            LMat3([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, s, c]])
        );
        let p = canonical_rotation(RotationKind::Parabolic, 0.5);
        assert_eq!(p.0[1][2], 0.125);
        assert!(p.pseudo_orthogonality_residual() < 1e-14);
        for kind in [RotationKind::Hyperbolic, RotationKind::Elliptic, RotationKind::Parabolic] {
            for t in [-2.0, 0.3, 1.7] {
                assert_eq!(classify_lorentz(&canonical_rotation(kind, t)), LorentzComponent::PlusPlus);
            }
        }
    }

    #[test]
    fn rotation_group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [RotationKind::Hyperbolic, RotationKind::Elliptic] {
            for _ in 0..50 {
                let (a, b) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                let lhs = canonical_rotation(kind, a) * canonical_rotation(kind, b);
                let rhs = canonical_rotation(kind, a + b);
                assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            }
        }
        // isometry on hyperboloid points
        for eps in [Eps::Spacelike, Eps::Timelike] {
            for _ in 0..100 {
                let z = EpsScalar::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.5..0.5), eps);
                let p = stereo_unproject(z, eps).unwrap();
                for kind in [RotationKind::Hyperbolic, RotationKind::Elliptic, RotationKind::Parabolic] {
                    let q = canonical_rotation(kind, rng.gen_range(-1.0..1.0)).apply(p);
                    assert!((inner(q, q) - inner(p, p)).abs() < 1e-12 * (1.0 + q.euclid_norm().powi(2)));
                }
            }
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify_lorentz(&LMat3::identity()), LorentzComponent::PlusPlus);
        assert_eq!(classify_lorentz(&LMat3::diag(1.0, -1.0, -1.0)), LorentzComponent::PlusMinus);
        assert_eq!(classify_lorentz(&LMat3::diag(-1.0, 1.0, 1.0)), LorentzComponent::MinusPlus);
        assert_eq!(classify_lorentz(&LMat3::diag(1.0, 1.0, -1.0)), LorentzComponent::MinusMinus);
        let m = LMat3([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.3, 0.0, 1.0]]);
        assert_eq!(classify_lorentz(&m), LorentzComponent::NotPseudoOrthogonal);
    }
}
