//! Null-curve geometry in Minkowski 3-space.
//!
//! The ambient space carries the Lorentzian inner product
//! `⟨x, y⟩ = −(x¹y³ + x³y¹) + x²y²`; a vector is future-directed when
//! `⟨x, e1 + e3⟩ < 0`. A null curve parametrized by pseudo-arc (so that
//! `‖γ″‖ = 1`) carries the Frenet frame `(t, n, b) = (γ′, γ″, γ‴ + 2κγ′)`
//! with `t`, `b` null, `n` unit spacelike, `⟨t, b⟩ = −1`, moving by
//!
//! ```text
//! γ′ = t,   t′ = n,   n′ = −2κ t + b,   b′ = −2κ n,
//! ```
//!
//! where `κ = ¼⟨γ‴, γ‴⟩` is the curvature. In matrix form `F′ = F·K(κ)`
//! with `K(κ)` in the Lie algebra of the restricted Poincaré group; frames
//! are integrated on the group so the orthonormality relations are an
//! invariant of the scheme rather than a drifting constraint.

mod curvature;
mod integrate;
pub mod spline;

pub use curvature::{
    curvature_from_curve, pseudo_arc_reparametrize, CurvatureEstimate, FLEX_REL_TOL, NULL_REL_TOL,
};
pub use integrate::{integrate_frenet, integrate_frenet_fn, integrate_frenet_rk4_projected};

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance on the frame Gram residual.
pub const EPS_FRAME: f64 = 1e-8;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GeomError {
    /// Frame orthonormality residual exceeded the tolerance; the step size
    /// is too large for the curvature profile.
    #[error("frame drift: metric residual {residual:.3e} exceeds {tol:.3e} at s = {s}")]
    FrameDrift { residual: f64, tol: f64, s: f64 },
    /// The input samples are not in pseudo-arc parameter (`‖γ″‖ ≠ 1`).
    #[error("not pseudo-arc parametrized: |<g'',g''> - 1| = {deviation:.3e} at s = {s}")]
    NotPseudoArc { deviation: f64, s: f64 },
    /// `γ′ ∧ γ″ ≈ 0`: the curve has a flex point, where the pseudo-arc
    /// 1-form degenerates.
    #[error("flex point near parameter {t}: |<g'',g''>| = {norm:.3e}")]
    FlexPoint { t: f64, norm: f64 },
    /// The velocity is not null (or not future-directed) within tolerance.
    #[error("velocity not null/future-directed at parameter {t}: <g',g'> = {inner:.3e}")]
    NotNull { t: f64, inner: f64 },
    /// Malformed input grid or frame.
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// A point or vector of Minkowski 3-space in the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MVec3 {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        MVec3 { x1, x2, x3 }
    }

    pub const fn zero() -> Self {
        MVec3::new(0.0, 0.0, 0.0)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        MVec3::new(v[0], v[1], v[2])
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    /// `⟨self, self⟩` (can be negative: timelike).
    pub fn norm2(&self) -> f64 {
        minkowski_inner(self, self)
    }

    /// True when `⟨x, e1 + e3⟩ < 0`, i.e. `x1 + x3 > 0`.
    pub fn is_future_directed(&self) -> bool {
        self.x1 + self.x3 > 0.0
    }
}

impl std::ops::Add for MVec3 {
    type Output = MVec3;
    fn add(self, rhs: MVec3) -> MVec3 {
        MVec3::new(self.x1 + rhs.x1, self.x2 + rhs.x2, self.x3 + rhs.x3)
    }
}

impl std::ops::Sub for MVec3 {
    type Output = MVec3;
    fn sub(self, rhs: MVec3) -> MVec3 {
        MVec3::new(self.x1 - rhs.x1, self.x2 - rhs.x2, self.x3 - rhs.x3)
    }
}

impl std::ops::Mul<f64> for MVec3 {
    type Output = MVec3;
    fn mul(self, c: f64) -> MVec3 {
        MVec3::new(self.x1 * c, self.x2 * c, self.x3 * c)
    }
}

/// The Lorentzian inner product `⟨x, y⟩ = −(x¹y³ + x³y¹) + x²y²`.
pub fn minkowski_inner(x: &MVec3, y: &MVec3) -> f64 {
    -(x.x1 * y.x3 + x.x3 * y.x1) + x.x2 * y.x2
}

/// Gram matrix `g_ij` of a null frame.
pub fn metric_matrix() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0)
}

/// An affine frame: a point of the curve together with the Frenet triad
/// `(a1, a2, a3) = (t, n, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub point: MVec3,
    pub a1: MVec3,
    pub a2: MVec3,
    pub a3: MVec3,
}

impl Frame {
    /// The identity frame at the origin: `(t, n, b) = (e1, e2, e3)`.
    pub fn identity() -> Self {
        Frame {
            point: MVec3::zero(),
            a1: MVec3::new(1.0, 0.0, 0.0),
            a2: MVec3::new(0.0, 1.0, 0.0),
            a3: MVec3::new(0.0, 0.0, 1.0),
        }
    }

    /// Packs into the 4×4 affine representation: first column `(1, point)`,
    /// then `(0, a_i)` columns.
    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        for (col, v) in [
            (0usize, &self.point),
            (1, &self.a1),
            (2, &self.a2),
            (3, &self.a3),
        ] {
            m[(1, col)] = v.x1;
            m[(2, col)] = v.x2;
            m[(3, col)] = v.x3;
        }
        m
    }

    pub fn from_matrix(m: &Matrix4<f64>) -> Self {
        let col = |c: usize| MVec3::new(m[(1, c)], m[(2, c)], m[(3, c)]);
        Frame {
            point: col(0),
            a1: col(1),
            a2: col(2),
            a3: col(3),
        }
    }

    /// Largest deviation of `⟨a_i, a_j⟩` from the model Gram matrix.
    pub fn gram_residual(&self) -> f64 {
        let a = [&self.a1, &self.a2, &self.a3];
        let g = metric_matrix();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((minkowski_inner(a[i], a[j]) - g[(i, j)]).abs());
            }
        }
        worst
    }

    /// Determinant of the triad (positive for an oriented frame).
    pub fn triad_determinant(&self) -> f64 {
        Matrix3::from_columns(&[
            self.a1.to_vector(),
            self.a2.to_vector(),
            self.a3.to_vector(),
        ])
        .determinant()
    }

    /// Full frame validity check within tolerance `eps`.
    pub fn validate(&self, eps: f64) -> Result<(), GeomError> {
        let residual = self.gram_residual();
        if residual > eps {
            return Err(GeomError::FrameDrift {
                residual,
                tol: eps,
                s: f64::NAN,
            });
        }
        if !self.a1.is_future_directed() || !self.a3.is_future_directed() {
            return Err(GeomError::Invalid(
                "frame null legs are not future-directed".to_string(),
            ));
        }
        if self.triad_determinant() <= 0.0 {
            return Err(GeomError::Invalid(
                "frame triad is not positively oriented".to_string(),
            ));
        }
        Ok(())
    }
}

/// General element of the Lie algebra of the restricted Poincaré group:
///
/// ```text
/// ( 0    0    0    0  )
/// ( q1   v2   v3   0  )
/// ( q2   v1   0    v3 )
/// ( q3   0    v1  −v2 )
/// ```
///
/// The linear block `A` satisfies `Aᵀ g + g A = 0`.
pub fn e21_matrix(q: [f64; 3], v: [f64; 3]) -> Matrix4<f64> {
    let [q1, q2, q3] = q;
    let [v1, v2, v3] = v;
    Matrix4::new(
        0.0, 0.0, 0.0, 0.0, //
        q1, v2, v3, 0.0, //
        q2, v1, 0.0, v3, //
        q3, 0.0, v1, -v2,
    )
}

/// Frenet matrix `K(κ)`: `F′ = F·K(κ)` encodes
/// `γ′ = t, t′ = n, n′ = −2κ t + b, b′ = −2κ n`.
pub fn frenet_matrix(kappa: f64) -> Matrix4<f64> {
    e21_matrix([1.0, 0.0, 0.0], [1.0, 0.0, -2.0 * kappa])
}

/// A discretized null curve on a uniform pseudo-arc grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveSample {
    /// Uniform, strictly increasing pseudo-arc values.
    pub s: Vec<f64>,
    pub points: Vec<MVec3>,
    /// Frenet frames at the nodes, when known (`frames[k].point == points[k]`).
    pub frames: Option<Vec<Frame>>,
    /// Curvature values at the nodes, when known.
    pub kappa: Option<Vec<f64>>,
}

impl CurveSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid step (the grid is uniform by construction).
    pub fn step(&self) -> f64 {
        if self.s.len() < 2 {
            0.0
        } else {
            self.s[1] - self.s[0]
        }
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        if self.s.len() != self.points.len() {
            return Err(GeomError::Invalid(
                "s and points lengths differ".to_string(),
            ));
        }
        if self.s.len() < 2 {
            return Err(GeomError::Invalid("need at least two samples".to_string()));
        }
        let h = self.step();
        if !(h > 0.0) {
            return Err(GeomError::Invalid("grid not increasing".to_string()));
        }
        for w in self.s.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
                return Err(GeomError::Invalid("grid not uniform".to_string()));
            }
        }
        if let Some(frames) = &self.frames {
            if frames.len() != self.points.len() {
                return Err(GeomError::Invalid("frames length mismatch".to_string()));
            }
        }
        if let Some(kappa) = &self.kappa {
            if kappa.len() != self.points.len() {
                return Err(GeomError::Invalid("kappa length mismatch".to_string()));
            }
        }
        Ok(())
    }
}

/// Matrix exponential by scaling-and-squaring on a Taylor expansion.
/// Adequate for the 4×4 Lie-algebra elements used here at any step size.
pub fn expm(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a / 2f64.powi(squarings as i32);
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..=16 {
        term = term * b / (k as f64);
        sum += term;
    }
    let mut e = sum;
    for _ in 0..squarings {
        e = e * e;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_on_basis() {
        let e1 = MVec3::new(1.0, 0.0, 0.0);
        let e2 = MVec3::new(0.0, 1.0, 0.0);
        let e3 = MVec3::new(0.0, 0.0, 1.0);
        assert_eq!(minkowski_inner(&e2, &e2), 1.0);
        assert_eq!(minkowski_inner(&e1, &e3), -1.0);
        assert_eq!(minkowski_inner(&e1, &e1), 0.0);
        assert_eq!(minkowski_inner(&e1, &e2), 0.0);
        // symmetry
        let x = MVec3::new(0.3, -1.2, 2.0);
        let y = MVec3::new(-0.7, 0.4, 1.1);
        assert_eq!(minkowski_inner(&x, &y), minkowski_inner(&y, &x));
    }

    #[test]
    fn identity_frame_is_valid() {
        let f = Frame::identity();
        assert_eq!(f.gram_residual(), 0.0);
        assert!(f.validate(EPS_FRAME).is_ok());
        assert!(f.a1.is_future_directed());
        assert!(f.a3.is_future_directed());
        assert!(f.triad_determinant() > 0.0);
    }

    #[test]
    fn frenet_matrix_columns() {
        // with κ = 0: t' = n, n' = b, b' = 0 on the triad columns
        let k0 = frenet_matrix(0.0);
        let f = Frame::identity().to_matrix();
        let fp = f * k0;
        // gamma' = t = e1
        assert_eq!(fp.column(0).as_slice(), [0.0, 1.0, 0.0, 0.0]);
        // t' = n
        assert_eq!(fp.column(1).as_slice(), [0.0, 0.0, 1.0, 0.0]);
        // n' = b
        assert_eq!(fp.column(2).as_slice(), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(fp.column(3).as_slice(), [0.0, 0.0, 0.0, 0.0]);

        // with κ ≠ 0: n' = −2κ t + b and b' = −2κ n
        let kappa = 0.7;
        let k = frenet_matrix(kappa);
        let frame = Frame::identity();
        let fp = frame.to_matrix() * k;
        let np = Frame::from_matrix(&fp).a2; // derivative of the n-column
        let expected = frame.a1 * (-2.0 * kappa) + frame.a3;
        assert!((np.x1 - expected.x1).abs() < 1e-15);
        assert!((np.x2 - expected.x2).abs() < 1e-15);
        assert!((np.x3 - expected.x3).abs() < 1e-15);
        let bp = Frame::from_matrix(&fp).a3;
        let expected_b = frame.a2 * (-2.0 * kappa);
        assert!((bp.x2 - expected_b.x2).abs() < 1e-15);
    }

    #[test]
    fn e21_linear_block_is_infinitesimal_isometry() {
        let x = e21_matrix([0.3, -0.2, 1.1], [0.5, -1.3, 0.8]);
        let a = x.fixed_view::<3, 3>(1, 1).into_owned();
        let g = metric_matrix();
        let residual = (a.transpose() * g + g * a).norm();
        assert!(residual < 1e-15);
        // and the Frenet matrix is of that shape
        let k = frenet_matrix(0.37);
        let a = k.fixed_view::<3, 3>(1, 1).into_owned();
        assert!((a.transpose() * g + g * a).norm() < 1e-15);
    }

    #[test]
    fn expm_agrees_with_series_on_nilpotent() {
        // K(0) is nilpotent of order 4: exp has the closed form
        let k = frenet_matrix(0.0);
        let s = 2.0;
        let e = expm(&(k * s));
        let exact = Matrix4::identity()
            + k * s
            + (k * k) * (s * s / 2.0)
            + (k * k * k) * (s * s * s / 6.0);
        assert!((e - exact).norm() < 1e-12);
    }

    #[test]
    fn expm_of_e21_stays_in_group() {
        let x = e21_matrix([0.3, -0.2, 1.1], [0.5, -1.3, 0.8]);
        let e = expm(&x);
        // top row fixed
        assert!((e[(0, 0)] - 1.0).abs() < 1e-14);
        for c in 1..4 {
            assert!(e[(0, c)].abs() < 1e-14);
        }
        // linear block preserves the metric: Aᵀ g A = g
        let a = e.fixed_view::<3, 3>(1, 1).into_owned();
        let g = metric_matrix();
        assert!((a.transpose() * g * a - g).norm() < 1e-13);
    }
}
