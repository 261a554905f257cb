//! 𝕂-bilinear transformations T_ab(z) = (a z + ε b)/(b̄ z + ā) with
//! a ā − ε b b̄ = 1, and their dictionary to rotations of O₁⁺⁺(3, ℝ).
//!
//! Conjugating T_ab by the stereographic projection gives the linear map
//!
//! ```text
//! P ↦ c_k(θ) P − 2 s_k²(θ/2) ⟨P, L⟩ L + ε s_k(θ) (P × L)
//! ```
//!
//! where the axis L = (p, q, r) with ⟨L, L⟩ = k and the angle θ are read off
//! the coefficients (a, b).

use crate::error::{Error, Result};
use crate::kalg::{default_tol_null, Eps, EpsScalar};
use crate::lorentz3::{ck_sk, cross_l, inner, AxisKind, LMat3, LVec3};

/// Tolerance on a ā − ε b b̄ = 1 for user-supplied coefficients.
pub const CONSTRAINT_TOL: f64 = 1e-10;
const RENORMALIZE_BELOW: f64 = 1e-12;
const COMPOSE_FAIL_ABOVE: f64 = 1e-8;

/// Rotation axis L = (p, q, r) with p² + q² − r² = k, and an angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub axis: LVec3,
    pub theta: f64,
    pub kind: AxisKind,
}

impl AxisAngle {
    pub fn new(axis: LVec3, theta: f64, kind: AxisKind) -> Result<Self> {
        let r = inner(axis, axis) - kind.k() as f64;
        if r.abs() > CONSTRAINT_TOL * (1.0 + axis.euclid_norm().powi(2)) {
            return Err(Error::ContractViolation(format!(
                "axis {axis:?} does not satisfy p² + q² − r² = {} (off by {r:e})",
                kind.k()
            )));
        }
        Ok(Self { axis, theta, kind })
    }

    /// Rescales an arbitrary non-zero axis so that ⟨L, L⟩ ∈ {−1, 0, 1}.
    /// Directions with |⟨L, L⟩| ≤ 1e-10·|L|² are treated as lightlike and kept.
    pub fn normalized(axis: LVec3, theta: f64) -> Result<Self> {
        let n2 = axis.euclid_norm().powi(2);
        if n2 == 0.0 || !axis.is_finite() {
            return Err(Error::ContractViolation("rotation axis must be non-zero".into()));
        }
        let q = inner(axis, axis);
        if q.abs() <= CONSTRAINT_TOL * n2 {
            // snap r so that p² + q² = r² holds to round-off
            let r = (axis.x1 * axis.x1 + axis.x2 * axis.x2).sqrt().copysign(axis.x3);
            return Self::new(LVec3::new(axis.x1, axis.x2, r), theta, AxisKind::Lightlike);
        }
        let kind = if q > 0.0 { AxisKind::Spacelike } else { AxisKind::Timelike };
        Self::new(axis * (1.0 / q.abs().sqrt()), theta, kind)
    }

    /// The image of `p` under the rotation, straight from the closed form.
    pub fn rotate_point(&self, p: LVec3, eps: Eps) -> LVec3 {
        let (c, s) = ck_sk(self.theta, self.kind, eps);
        let (_, s_half) = ck_sk(0.5 * self.theta, self.kind, eps);
        let l = self.axis;
        p * c - l * (2.0 * s_half * s_half * inner(p, l)) + cross_l(p, l) * (eps.sign() * s)
    }

    /// Matrix of [`AxisAngle::rotate_point`]; the map is linear, so its
    /// columns are the images of the basis vectors.
    pub fn rotation_matrix(&self, eps: Eps) -> LMat3 {
        LMat3::from_columns([
            self.rotate_point(LVec3::new(1.0, 0.0, 0.0), eps),
            self.rotate_point(LVec3::new(0.0, 1.0, 0.0), eps),
            self.rotate_point(LVec3::new(0.0, 0.0, 1.0), eps),
        ])
    }
}

/// Coefficients of T_ab with a ā − ε b b̄ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusParams {
    a: EpsScalar,
    b: EpsScalar,
    eps: Eps,
}

impl MobiusParams {
    pub fn new(a: EpsScalar, b: EpsScalar, eps: Eps) -> Result<Self> {
        for z in [a, b] {
            if z.eps != eps {
                return Err(Error::EpsMismatch { left: z.eps.as_i32(), right: eps.as_i32() });
            }
        }
        let residual = unit_residual(a, b, eps);
        if !(residual.abs() <= CONSTRAINT_TOL) {
            return Err(Error::ConstraintViolation { residual });
        }
        Ok(Self { a, b, eps })
    }

    pub fn identity(eps: Eps) -> Self {
        Self { a: EpsScalar::one(eps), b: EpsScalar::zero(eps), eps }
    }

    pub fn a(&self) -> EpsScalar {
        self.a
    }

    pub fn b(&self) -> EpsScalar {
        self.b
    }

    pub fn eps(&self) -> Eps {
        self.eps
    }

    /// a ā − ε b b̄ − 1.
    pub fn residual(&self) -> f64 {
        unit_residual(self.a, self.b, self.eps)
    }

    /// The denominator b̄ z + ā.
    pub fn denominator(&self, z: EpsScalar) -> EpsScalar {
        self.b.conj() * z + self.a.conj()
    }

    pub fn apply(&self, z: EpsScalar) -> Result<EpsScalar> {
        if z.eps != self.eps {
            return Err(Error::EpsMismatch { left: z.eps.as_i32(), right: self.eps.as_i32() });
        }
        let den = self.denominator(z);
        let inv = den
            .inverse(default_tol_null(den))
            .map_err(|_| Error::DenominatorOnNullCone)?;
        Ok((self.a * z + self.b.scale(self.eps.sign())) * inv)
    }

    /// Derivative factor of T_ab at z: 1/(b̄ z + ā)².
    pub fn derivative(&self, z: EpsScalar) -> Result<EpsScalar> {
        let den = self.denominator(z);
        let inv = den
            .inverse(default_tol_null(den))
            .map_err(|_| Error::DenominatorOnNullCone)?;
        Ok(inv * inv)
    }

    /// (ā, −b).
    pub fn inverse(&self) -> Self {
        Self { a: self.a.conj(), b: -self.b, eps: self.eps }
    }

    /// T1 ∘ T2, by multiplying the matrices [[a, εb], [b̄, ā]].
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.eps != other.eps {
            return Err(Error::EpsMismatch { left: self.eps.as_i32(), right: other.eps.as_i32() });
        }
        let e = self.eps.sign();
        let a = self.a * other.a + (self.b * other.b.conj()).scale(e);
        let b = self.a * other.b + self.b * other.a.conj();
        let residual = unit_residual(a, b, self.eps);
        if residual.abs() <= RENORMALIZE_BELOW {
            return Ok(Self { a, b, eps: self.eps });
        }
        if !(residual.abs() <= COMPOSE_FAIL_ABOVE) {
            return Err(Error::ConstraintViolation { residual });
        }
        let k = 1.0 / (1.0 + residual).sqrt();
        Ok(Self { a: a.scale(k), b: b.scale(k), eps: self.eps })
    }

    pub fn from_axis_angle(ax: &AxisAngle, eps: Eps) -> Result<Self> {
        let ax = AxisAngle::new(ax.axis, ax.theta, ax.kind)?;
        let (c, s) = ck_sk(0.5 * ax.theta, ax.kind, eps);
        let LVec3 { x1: p, x2: q, x3: r } = ax.axis;
        let (a, b) = match eps {
            Eps::Spacelike => (EpsScalar::new(c, -r * s, eps), EpsScalar::new(q * s, -p * s, eps)),
            Eps::Timelike => (EpsScalar::new(c, p * s, eps), EpsScalar::new(r * s, -q * s, eps)),
        };
        Self::new(a, b, eps)
    }

    /// Half-angle cosine c = c_k(θ/2) and scaled axis S = s_k(θ/2)·L read
    /// back off (a, b).
    fn half_angle_frame(&self) -> (f64, LVec3) {
        let (a, b) = (self.a, self.b);
        let s = match self.eps {
            Eps::Spacelike => LVec3::new(-b.im, b.re, -a.im),
            Eps::Timelike => LVec3::new(a.im, -b.im, b.re),
        };
        (a.re, s)
    }

    /// The rotation π⁻¹ ∘ T_ab ∘ π ∈ O₁⁺⁺(3, ℝ).
    ///
    /// With c_k(θ) = 2c² − 1 and s_k(θ) = 2cs the closed form becomes
    /// P ↦ (2c² − 1) P − 2⟨P, S⟩ S + 2εc (P × S), which needs no θ or k.
    pub fn to_rotation(&self) -> LMat3 {
        let (c, s) = self.half_angle_frame();
        let e = self.eps.sign();
        let rot = |p: LVec3| p * (2.0 * c * c - 1.0) - s * (2.0 * inner(p, s)) + cross_l(p, s) * (2.0 * e * c);
        LMat3::from_columns([
            rot(LVec3::new(1.0, 0.0, 0.0)),
            rot(LVec3::new(0.0, 1.0, 0.0)),
            rot(LVec3::new(0.0, 0.0, 1.0)),
        ])
    }
}

fn unit_residual(a: EpsScalar, b: EpsScalar, eps: Eps) -> f64 {
    a.squared_norm() - eps.sign() * b.squared_norm() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz3::{classify_lorentz, stereo_project, stereo_unproject, LorentzComponent};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const S: Eps = Eps::Spacelike;
    const T: Eps = Eps::Timelike;

    #[test]
    fn construction() {
        assert!(MobiusParams::new(EpsScalar::one(S), EpsScalar::zero(S), S).is_ok());
        let th: f64 = 0.9;
        let a = EpsScalar::new((th / 2.0).cos(), -(th / 2.0).sin(), S);
        assert!(MobiusParams::new(a, EpsScalar::zero(S), S).is_ok());
        let bad = MobiusParams::new(EpsScalar::real(2.0, S), EpsScalar::zero(S), S);
        match bad {
            Err(Error::ConstraintViolation { residual }) => assert_eq!(residual, 3.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for eps in [S, T] {
            let id = MobiusParams::identity(eps);
            for _ in 0..20 {
                let z = EpsScalar::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), eps);
                assert_eq!(id.apply(z).unwrap(), z);
            }
        }
        let th: f64 = 1.1;
        let a = EpsScalar::new((th / 2.0).cos(), -(th / 2.0).sin(), S);
        let t = MobiusParams::new(a, EpsScalar::zero(S), S).unwrap();
        let z = EpsScalar::new(0.4, -0.3, S);
        let rot = EpsScalar::new(th.cos(), -th.sin(), S) * z;
        assert!((t.apply(z).unwrap() - rot).modulus() < 1e-15);
    }

    #[test]
    fn null_denominator() {
        // a = 1, b = −1 − τ satisfies the constraint (b b̄ = 0); at z = 1/2
        // the denominator is ½(1 + τ), a zero divisor.
        let t = MobiusParams::new(EpsScalar::one(T), EpsScalar::new(-1.0, -1.0, T), T).unwrap();
        let z = EpsScalar::real(0.5, T);
        assert!(t.denominator(z).is_zero_divisor());
        assert!(matches!(t.apply(z), Err(Error::DenominatorOnNullCone)));
    }

    #[test]
    fn axis_angle_coefficients() {
        for eps in [S, T] {
            let ax = AxisAngle::new(LVec3::new(0.0, 0.0, 1.0), 0.0, AxisKind::Timelike).unwrap();
            let t = MobiusParams::from_axis_angle(&ax, eps).unwrap();
            assert_eq!((t.a(), t.b()), (EpsScalar::one(eps), EpsScalar::zero(eps)));
        }
        let th = 0.7;
        let ax = AxisAngle::new(LVec3::new(0.0, 0.0, 1.0), th, AxisKind::Timelike).unwrap();
        let t = MobiusParams::from_axis_angle(&ax, S).unwrap();
        assert_eq!(t.a(), EpsScalar::new((th / 2.0).cos(), -(th / 2.0).sin(), S));
        assert_eq!(t.b(), EpsScalar::zero(S));

        let ax = AxisAngle::new(LVec3::new(1.0, 0.0, 1.0), 0.3, AxisKind::Lightlike).unwrap();
        let t = MobiusParams::from_axis_angle(&ax, T).unwrap();
        assert!(t.residual().abs() <= 1e-14);

        assert!(AxisAngle::new(LVec3::new(1.0, 1.0, 0.0), 0.3, AxisKind::Spacelike).is_err());
    }

    #[test]
    fn normalized_axes() {
        let ax = AxisAngle::normalized(LVec3::new(0.0, 0.0, 3.0), 1.0).unwrap();
        assert_eq!(ax.kind, AxisKind::Timelike);
        assert!((inner(ax.axis, ax.axis) + 1.0).abs() < 1e-15);
        let ax = AxisAngle::normalized(LVec3::new(2.0, 0.0, 2.0), 1.0).unwrap();
        assert_eq!(ax.kind, AxisKind::Lightlike);
        assert!(AxisAngle::normalized(LVec3::zero(), 1.0).is_err());
    }

    fn random_axis(rng: &mut ChaCha8Rng, kind: AxisKind) -> LVec3 {
        loop {
            let p: f64 = rng.gen_range(-1.5..1.5);
            let q: f64 = rng.gen_range(-1.5..1.5);
            let r2 = p * p + q * q - kind.k() as f64;
            if r2 < 0.0 {
                continue;
            }
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            return LVec3::new(p, q, sign * r2.sqrt());
        }
    }

    #[test]
    fn rotation_matches_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for eps in [S, T] {
            for kind in [AxisKind::Timelike, AxisKind::Lightlike, AxisKind::Spacelike] {
                for _ in 0..40 {
                    let ax = AxisAngle::new(random_axis(&mut rng, kind), rng.gen_range(-1.5..1.5), kind).unwrap();
                    let t = MobiusParams::from_axis_angle(&ax, eps).unwrap();
                    let r = t.to_rotation();
                    assert!(r.max_abs_diff(&ax.rotation_matrix(eps)) < 1e-12);
                    assert_eq!(classify_lorentz(&r), LorentzComponent::PlusPlus);
                    assert!((r.apply(ax.axis) - ax.axis).euclid_norm() < 1e-10);
                    for _ in 0..5 {
                        let z = EpsScalar::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8), eps);
                        let p = stereo_unproject(z, eps).unwrap();
                        let Ok(w) = t.apply(stereo_project(p, eps).unwrap()) else { continue };
                        let Ok(p1) = stereo_unproject(w, eps) else { continue };
                        let rp = r.apply(p);
                        assert!((p1 - rp).euclid_norm() < 1e-9 * (1.0 + rp.euclid_norm()));
                    }
                }
            }
        }
    }

    #[test]
    fn elliptic_rotation_about_time_axis() {
        let ax = AxisAngle::new(LVec3::new(0.0, 0.0, 1.0), PI / 4.0, AxisKind::Timelike).unwrap();
        let r = MobiusParams::from_axis_angle(&ax, S).unwrap().to_rotation();
        let (c, s) = ((PI / 4.0).cos(), (PI / 4.0).sin());
        // about x₃, preserving the third coordinate
        assert!((r.0[2][2] - 1.0).abs() < 1e-15);
        assert!((r.0[0][0] - c).abs() < 1e-15 && (r.0[1][1] - c).abs() < 1e-15);
        assert!((r.0[0][1].abs() - s).abs() < 1e-15);
    }

    #[test]
    fn composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for eps in [S, T] {
            let ax = AxisAngle::new(random_axis(&mut rng, AxisKind::Spacelike), 0.8, AxisKind::Spacelike).unwrap();
            let t = MobiusParams::from_axis_angle(&ax, eps).unwrap();
            assert_eq!(t.compose(&MobiusParams::identity(eps)).unwrap(), t);
            let id = t.compose(&t.inverse()).unwrap();
            assert!((id.a() - EpsScalar::one(eps)).modulus() < 1e-12);
            assert!(id.b().modulus() < 1e-12);
            for _ in 0..50 {
                let z = EpsScalar::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7), eps);
                let Ok(w) = t.apply(z) else { continue };
                assert!((t.inverse().apply(w).unwrap() - z).modulus() < 1e-12);
            }
            // same axis, angles add
            let axis = LVec3::new(0.0, 0.0, 1.0);
            let e1 = MobiusParams::from_axis_angle(&AxisAngle::new(axis, 0.4, AxisKind::Timelike).unwrap(), eps).unwrap();
            let e2 = MobiusParams::from_axis_angle(&AxisAngle::new(axis, 0.9, AxisKind::Timelike).unwrap(), eps).unwrap();
            let sum = MobiusParams::from_axis_angle(&AxisAngle::new(axis, 1.3, AxisKind::Timelike).unwrap(), eps).unwrap();
            let c = e1.compose(&e2).unwrap();
            assert!((c.a() - sum.a()).modulus() < 1e-14 && (c.b() - sum.b()).modulus() < 1e-14);
            assert!(c.residual().abs() < 1e-12);
        }
    }

    #[test]
    fn composition_pointwise_and_renormalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for eps in [S, T] {
            let t1 = MobiusParams::from_axis_angle(
                &AxisAngle::new(random_axis(&mut rng, AxisKind::Timelike), 0.5, AxisKind::Timelike).unwrap(),
                eps,
            )
            .unwrap();
            let t2 = MobiusParams::from_axis_angle(
                &AxisAngle::new(random_axis(&mut rng, AxisKind::Spacelike), -0.3, AxisKind::Spacelike).unwrap(),
                eps,
            )
            .unwrap();
            let c = t1.compose(&t2).unwrap();
            for _ in 0..50 {
                let z = EpsScalar::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), eps);
                let (Ok(w2), Ok(w)) = (t2.apply(z), c.apply(z)) else { continue };
                let Ok(w12) = t1.apply(w2) else { continue };
                assert!((w - w12).modulus() < 1e-11 * (1.0 + w.modulus()));
            }
            // a long chain stays on the constraint manifold
            let mut acc = MobiusParams::identity(eps);
            for _ in 0..2000 {
                acc = acc.compose(&t1).unwrap();
                acc = acc.compose(&t1.inverse()).unwrap();
            }
            assert!(acc.residual().abs() <= 1e-12);
        }
        // drift beyond 1e-8 is an error
        let off = MobiusParams { a: EpsScalar::real(1.0 + 1e-6, S), b: EpsScalar::zero(S), eps: S };
        assert!(matches!(
            off.compose(&MobiusParams::identity(S)),
            Err(Error::ConstraintViolation { .. })
        ));
        let slightly = MobiusParams { a: EpsScalar::real(1.0 + 1e-10, S), b: EpsScalar::zero(S), eps: S };
        let fixed = slightly.compose(&MobiusParams::identity(S)).unwrap();
        assert!(fixed.residual().abs() <= 1e-15);
    }
}
