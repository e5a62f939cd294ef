//! Curvature extraction and pseudo-arc reparametrization.
//!
//! On a natural-parameter sample (`‖γ″‖ = 1`) the curvature is
//! `κ = ¼⟨γ‴, γ‴⟩`, estimated here with centered second-order differences.
//! For a curve sampled in an arbitrary parameter, the natural parameter is
//! recovered from `s(t) = ∫ ‖γ″(t)‖^{1/2} dt` and the curve is resampled
//! onto a uniform `s`-grid by component-wise cubic splines. Curvature near
//! the boundary nodes is not reported rather than extrapolated.

use super::spline::CubicSpline;
use super::{minkowski_inner, CurveSample, GeomError, MVec3};

/// Relative tolerance for the null-velocity test.
pub const NULL_REL_TOL: f64 = 1e-6;
/// Relative tolerance below which `⟨γ″, γ″⟩` flags a flex point.
pub const FLEX_REL_TOL: f64 = 1e-6;

/// Curvature estimated at the interior nodes of a curve sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureEstimate {
    /// Index of the first covered node of the input sample.
    pub first_node: usize,
    /// Pseudo-arc values of the covered nodes.
    pub s: Vec<f64>,
    /// Curvature values at the covered nodes.
    pub kappa: Vec<f64>,
}

/// Estimates `κ = ¼⟨γ‴, γ‴⟩` at the interior nodes (two nodes are lost at
/// each end to the third-derivative stencil). The sample must be in
/// pseudo-arc parameter: `⟨γ″, γ″⟩ = 1` is checked at every interior node
/// within a tolerance that accounts for the `O(h²)` stencil error.
pub fn curvature_from_curve(curve: &CurveSample) -> Result<CurvatureEstimate, GeomError> {
    curve.validate()?;
    let n = curve.len();
    if n < 5 {
        return Err(GeomError::Invalid(
            "need at least five samples for the third-derivative stencil".to_string(),
        ));
    }
    let h = curve.step();
    let p = &curve.points;
    let tol = (10.0 * h * h).max(NULL_REL_TOL);

    // pseudo-arc check on the second derivative
    for k in 1..n - 1 {
        let d2 = (p[k - 1] + p[k + 1] - p[k] * 2.0) * (1.0 / (h * h));
        let n2 = minkowski_inner(&d2, &d2);
        if (n2 - 1.0).abs() > tol {
            if n2.abs() < 0.25 {
                return Err(GeomError::FlexPoint {
                    t: curve.s[k],
                    norm: n2.abs(),
                });
            }
            return Err(GeomError::NotPseudoArc {
                deviation: (n2 - 1.0).abs(),
                s: curve.s[k],
            });
        }
    }

    let mut s = Vec::with_capacity(n - 4);
    let mut kappa = Vec::with_capacity(n - 4);
    for k in 2..n - 2 {
        // centered third derivative, O(h²)
        let d3 = (p[k + 2] - p[k - 2] + (p[k - 1] - p[k + 1]) * 2.0) * (1.0 / (2.0 * h * h * h));
        kappa.push(0.25 * minkowski_inner(&d3, &d3));
        s.push(curve.s[k]);
    }
    Ok(CurvatureEstimate {
        first_node: 2,
        s,
        kappa,
    })
}

/// Derivative of the parabola through `(t0,y0), (t1,y1), (t2,y2)` at `te`.
fn lagrange3_deriv(t: [f64; 3], y: [MVec3; 3], te: f64) -> MVec3 {
    let [t0, t1, t2] = t;
    let w0 = (2.0 * te - t1 - t2) / ((t0 - t1) * (t0 - t2));
    let w1 = (2.0 * te - t0 - t2) / ((t1 - t0) * (t1 - t2));
    let w2 = (2.0 * te - t0 - t1) / ((t2 - t0) * (t2 - t1));
    y[0] * w0 + y[1] * w1 + y[2] * w2
}

/// Second derivative of the parabola through three samples (constant).
fn lagrange3_deriv2(t: [f64; 3], y: [MVec3; 3]) -> MVec3 {
    let [t0, t1, t2] = t;
    let w0 = 2.0 / ((t0 - t1) * (t0 - t2));
    let w1 = 2.0 / ((t1 - t0) * (t1 - t2));
    let w2 = 2.0 / ((t2 - t0) * (t2 - t1));
    y[0] * w0 + y[1] * w1 + y[2] * w2
}

fn stencil(n: usize, k: usize) -> [usize; 3] {
    if k == 0 {
        [0, 1, 2]
    } else if k == n - 1 {
        [n - 3, n - 2, n - 1]
    } else {
        [k - 1, k, k + 1]
    }
}

/// Recovers the natural parametrization of a null curve sampled at strictly
/// increasing parameter values `t` (not necessarily uniform).
///
/// Verifies along the way that the velocity is null and future-directed and
/// that there are no flex points, computes `s(t) = ∫ ⟨γ″,γ″⟩^{1/4} dt` by
/// the trapezoid rule, and resamples onto a uniform `s`-grid of `n_out`
/// nodes (input length when `None`) by not-a-knot cubic splines. When the
/// input is already uniformly sampled in the natural parameter the points
/// are passed through unchanged and only relabeled.
pub fn pseudo_arc_reparametrize(
    t: &[f64],
    points: &[MVec3],
    n_out: Option<usize>,
) -> Result<CurveSample, GeomError> {
    let n = t.len();
    if n != points.len() {
        return Err(GeomError::Invalid("t and points lengths differ".to_string()));
    }
    if n < 4 {
        return Err(GeomError::Invalid("need at least four samples".to_string()));
    }
    for w in t.windows(2) {
        if w[1] <= w[0] {
            return Err(GeomError::Invalid(
                "parameter values not strictly increasing".to_string(),
            ));
        }
    }
    let h_max = t.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);

    // velocity, acceleration, and the pseudo-arc density at every node
    let mut sigma = Vec::with_capacity(n);
    for k in 0..n {
        let idx = stencil(n, k);
        let ts = [t[idx[0]], t[idx[1]], t[idx[2]]];
        let ys = [points[idx[0]], points[idx[1]], points[idx[2]]];
        let v = lagrange3_deriv(ts, ys, t[k]);
        let a = lagrange3_deriv2(ts, ys);

        let v_scale = v.x1 * v.x1 + v.x2 * v.x2 + v.x3 * v.x3;
        let vv = minkowski_inner(&v, &v);
        let null_tol = v_scale * NULL_REL_TOL.max(20.0 * h_max * h_max);
        if vv.abs() > null_tol {
            return Err(GeomError::NotNull { t: t[k], inner: vv });
        }
        if !v.is_future_directed() {
            return Err(GeomError::NotNull { t: t[k], inner: vv });
        }
        let aa = minkowski_inner(&a, &a);
        let a_scale = (a.x1 * a.x1 + a.x2 * a.x2 + a.x3 * a.x3).max(v_scale);
        if aa <= FLEX_REL_TOL * a_scale {
            return Err(GeomError::FlexPoint {
                t: t[k],
                norm: aa.abs(),
            });
        }
        sigma.push(aa.powf(0.25));
    }

    // s(t) by the trapezoid rule
    let mut s_of_t = vec![0.0; n];
    for k in 1..n {
        s_of_t[k] = s_of_t[k - 1] + 0.5 * (sigma[k] + sigma[k - 1]) * (t[k] - t[k - 1]);
    }
    let total = s_of_t[n - 1];
    let n_out = n_out.unwrap_or(n).max(4);

    // Fast path: uniform t-grid and constant density means the sample is
    // already natural up to an affine relabeling.
    let t_uniform = {
        let h0 = t[1] - t[0];
        t.windows(2).all(|w| ((w[1] - w[0]) - h0).abs() <= 1e-9 * h0)
    };
    let sig_mean = sigma.iter().sum::<f64>() / n as f64;
    let sig_dev = sigma
        .iter()
        .map(|v| (v - sig_mean).abs())
        .fold(0.0, f64::max);
    if t_uniform && n_out == n && sig_dev <= sig_mean * (50.0 * h_max * h_max).max(1e-9) {
        let hs = total / (n - 1) as f64;
        return Ok(CurveSample {
            s: (0..n).map(|k| k as f64 * hs).collect(),
            points: points.to_vec(),
            frames: None,
            kappa: None,
        });
    }

    // spline resample of each coordinate onto the uniform s-grid
    let xs: Vec<f64> = points.iter().map(|p| p.x1).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.x2).collect();
    let zs: Vec<f64> = points.iter().map(|p| p.x3).collect();
    let sx = CubicSpline::not_a_knot(&s_of_t, &xs).map_err(GeomError::Invalid)?;
    let sy = CubicSpline::not_a_knot(&s_of_t, &ys).map_err(GeomError::Invalid)?;
    let sz = CubicSpline::not_a_knot(&s_of_t, &zs).map_err(GeomError::Invalid)?;
    let hs = total / (n_out - 1) as f64;
    let mut s_grid = Vec::with_capacity(n_out);
    let mut out_points = Vec::with_capacity(n_out);
    for k in 0..n_out {
        let s = (k as f64) * hs;
        s_grid.push(s);
        out_points.push(MVec3::new(sx.eval(s), sy.eval(s), sz.eval(s)));
    }
    Ok(CurveSample {
        s: s_grid,
        points: out_points,
        frames: None,
        kappa: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{integrate_frenet, Frame};

    fn null_cubic(s: f64) -> MVec3 {
        MVec3::new(s, s * s / 2.0, s * s * s / 6.0)
    }

    #[test]
    fn null_cubic_has_zero_curvature() {
        let n = 100;
        let h = 0.02;
        let curve = CurveSample {
            s: (0..=n).map(|k| k as f64 * h).collect(),
            points: (0..=n).map(|k| null_cubic(k as f64 * h)).collect(),
            frames: None,
            kappa: None,
        };
        let est = curvature_from_curve(&curve).unwrap();
        assert_eq!(est.first_node, 2);
        for v in &est.kappa {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn roundtrip_sin_curvature_second_order() {
        let err_at = |n: usize| {
            let h = 2.0 * std::f64::consts::PI / n as f64;
            let kappa: Vec<f64> = (0..=n).map(|k| (k as f64 * h).sin()).collect();
            let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
            let est = curvature_from_curve(&curve).unwrap();
            est.kappa
                .iter()
                .zip(&kappa[est.first_node..])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err_at(256);
        let e2 = err_at(512);
        assert!(e1 < 2e-3, "e1 = {e1:.3e}");
        assert!(e2 < e1 / 3.4, "orders: e1 = {e1:.3e}, e2 = {e2:.3e}");
    }

    #[test]
    fn constant_curvature_roundtrip() {
        let n = 600;
        let h = 0.01;
        let kappa = vec![1.0; n + 1];
        let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
        let est = curvature_from_curve(&curve).unwrap();
        for v in &est.kappa {
            assert!((v - 1.0).abs() < 5e-4, "kappa = {v}");
        }
    }

    #[test]
    fn natural_inner_product_relation() {
        // <γ', γ'''> = −1 on natural samples
        let n = 400;
        let h = 0.01;
        let kappa: Vec<f64> = (0..=n).map(|k| 0.4 * (k as f64 * h).sin()).collect();
        let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
        let p = &curve.points;
        for k in (2..n - 2).step_by(37) {
            let d1 = (p[k + 1] - p[k - 1]) * (1.0 / (2.0 * h));
            let d3 =
                (p[k + 2] - p[k - 2] + (p[k - 1] - p[k + 1]) * 2.0) * (1.0 / (2.0 * h * h * h));
            let ip = minkowski_inner(&d1, &d3);
            assert!((ip + 1.0).abs() < 1e-3, "node {k}: {ip}");
        }
    }

    #[test]
    fn reparametrize_scaled_null_cubic() {
        // γ(t) = (2t, 2t², (4/3)t³): s = 2t, the null cubic in s.
        let n = 120;
        let ht = 0.01;
        let t: Vec<f64> = (0..=n).map(|k| k as f64 * ht).collect();
        let pts: Vec<MVec3> = t
            .iter()
            .map(|&v| MVec3::new(2.0 * v, 2.0 * v * v, 4.0 / 3.0 * v * v * v))
            .collect();
        let out = pseudo_arc_reparametrize(&t, &pts, None).unwrap();
        // total pseudo-arc length = 2 * t_max
        let expect_len = 2.0 * t[n];
        assert!((out.s.last().unwrap() - expect_len).abs() < 1e-6);
        for (s, p) in out.s.iter().zip(&out.points).skip(2).take(n - 4) {
            let e = null_cubic(*s);
            assert!((p.x1 - e.x1).abs() < 1e-6, "x1 at s = {s}");
            assert!((p.x2 - e.x2).abs() < 1e-6, "x2 at s = {s}");
            assert!((p.x3 - e.x3).abs() < 1e-6, "x3 at s = {s}");
        }
    }

    #[test]
    fn reparametrize_identity_on_natural_input() {
        let n = 200;
        let h = 0.01;
        let kappa: Vec<f64> = (0..=n).map(|k| 0.3 * (k as f64 * h).cos()).collect();
        let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
        let out = pseudo_arc_reparametrize(&curve.s, &curve.points, None).unwrap();
        for (a, b) in out.points.iter().zip(&curve.points) {
            assert!((a.x1 - b.x1).abs() < 1e-7);
            assert!((a.x2 - b.x2).abs() < 1e-7);
            assert!((a.x3 - b.x3).abs() < 1e-7);
        }
    }

    #[test]
    fn scaling_law_for_curvature() {
        // κ̃(s) = (1/r) κ(s/√r) for the rescaled curve r·γ(s/√r)
        let n = 2048;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let kappa: Vec<f64> = (0..=n).map(|k| (k as f64 * h).sin()).collect();
        let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
        let r: f64 = 2.0;
        let rt = r.sqrt();
        let t_scaled: Vec<f64> = curve.s.iter().map(|&s| rt * s).collect();
        let pts_scaled: Vec<MVec3> = curve.points.iter().map(|&p| p * r).collect();
        let nat = pseudo_arc_reparametrize(&t_scaled, &pts_scaled, None).unwrap();
        let est = curvature_from_curve(&nat).unwrap();
        let mut worst = 0.0f64;
        for (s, k) in est.s.iter().zip(&est.kappa) {
            let expect = (s / rt).sin() / r;
            worst = worst.max((k - expect).abs());
        }
        assert!(worst < 5e-4, "scaling-law error {worst:.3e}");
    }

    #[test]
    fn rejects_non_null_input() {
        // timelike straight line
        let t: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let pts: Vec<MVec3> = t.iter().map(|&v| MVec3::new(v, 0.5 * v * v, v * v)).collect();
        assert!(matches!(
            pseudo_arc_reparametrize(&t, &pts, None),
            Err(GeomError::NotNull { .. }) | Err(GeomError::FlexPoint { .. })
        ));
    }

    #[test]
    fn rejects_flex_line() {
        // null straight line: γ″ = 0 everywhere
        let t: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let pts: Vec<MVec3> = t.iter().map(|&v| MVec3::new(v, 0.0, 0.0)).collect();
        assert!(matches!(
            pseudo_arc_reparametrize(&t, &pts, None),
            Err(GeomError::FlexPoint { .. })
        ));
    }
}
