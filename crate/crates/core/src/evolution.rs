//! Time evolution of periodic curvature profiles and of the curves they
//! bound.
//!
//! The curvature PDE `∂κ/∂t = rhs[κ]` (the right-hand side is the symbolic
//! output of a [`MotionSpec`]) is discretized pseudospectrally: the jet
//! `(κ, κ_s, …)` is computed by FFT with 2/3-rule dealiasing on the fields
//! entering nonlinear products, and the stiff linear part of the flow is
//! removed exactly with an integrating factor, leaving classical RK4 for the
//! nonlinear remainder.
//!
//! The curve itself moves by the frame flow `∂F/∂t = F·𝔓[κ]`, stepped with
//! the group exponential per node; after each step the curvature is
//! re-extracted from the evolved geometry instead of being integrated in
//! parallel. [`consistency_check`] quantifies the agreement of the two
//! routes — the geometric flow and the curvature PDE — after one step.

use nalgebra::Matrix4;
use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::diffpoly::{DiffPoly, DiffPolyError};
use crate::geometry::{
    curvature_from_curve, e21_matrix, expm, minkowski_inner, CurveSample, Frame, GeomError,
    EPS_FRAME,
};
use crate::hierarchy::{HierarchyTable, MotionSpec};
use crate::spectral::SpectralGrid;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum EvolveError {
    /// Blow-up detector: the sup-norm exceeded `INSTABILITY_FACTOR` times
    /// its initial value (or went non-finite).
    #[error("instability at t = {t}: max|kappa| = {max_abs:.3e}")]
    Instability { t: f64, max_abs: f64 },
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Symbolic(#[from] DiffPolyError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Abort threshold for the blow-up detector.
pub const INSTABILITY_FACTOR: f64 = 1e3;

/// A uniform periodic sampling of `κ(s)` on `[0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureGrid {
    length: f64,
    values: Vec<f64>,
}

impl CurvatureGrid {
    /// `values[k] = κ(k L / N)`; `N` must be a power of two, at least 16.
    pub fn new(length: f64, values: Vec<f64>) -> Result<Self, EvolveError> {
        let n = values.len();
        if n < 16 || !n.is_power_of_two() {
            return Err(EvolveError::Invalid(format!(
                "sample count {n} must be a power of two >= 16"
            )));
        }
        if !(length > 0.0) {
            return Err(EvolveError::Invalid("period must be positive".to_string()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EvolveError::Invalid("non-finite samples".to_string()));
        }
        Ok(CurvatureGrid { length, values })
    }

    /// Samples `κ(s)` from a closure on the `N`-point grid.
    pub fn sample(length: f64, n: usize, kappa: impl Fn(f64) -> f64) -> Result<Self, EvolveError> {
        let values = (0..n).map(|k| kappa(k as f64 * length / n as f64)).collect();
        CurvatureGrid::new(length, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.length
    }

    pub fn step(&self) -> f64 {
        self.length / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> Vec<f64> {
        crate::spectral::grid_nodes(self.values.len(), self.length)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// One snapshot of an evolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub grid: CurvatureGrid,
    /// Curve frames, present for co-evolution runs.
    pub frames: Option<Vec<Frame>>,
    /// `P_0, P_1, P_2` evaluated on `grid` at snapshot time.
    pub conserved: Vec<f64>,
}

/// Splits a flow right-hand side into its linear symbol and the nonlinear
/// remainder. The symbol of `Σ c_j u_j` is `Σ c_j (ik)^j`.
struct SplitRhs {
    linear: Vec<(usize, f64)>,
    nonlinear: DiffPoly,
}

impl SplitRhs {
    fn of(rhs: &DiffPoly) -> Result<Self, EvolveError> {
        let mut linear = Vec::new();
        let mut nonlinear = DiffPoly::zero();
        for (m, c) in rhs.iter() {
            let c_f64 = {
                use num_traits::ToPrimitive;
                c.to_f64().ok_or_else(|| {
                    EvolveError::Invalid("coefficient out of f64 range".to_string())
                })?
            };
            if m.degree() == 1 {
                let (j, _) = m.iter().next().expect("degree-1 monomial");
                linear.push((j, c_f64));
            } else if m.is_constant() {
                return Err(EvolveError::Invalid(
                    "flow right-hand side has a constant term".to_string(),
                ));
            } else {
                nonlinear = &nonlinear + &DiffPoly::term(c.clone(), m.clone());
            }
        }
        Ok(SplitRhs { linear, nonlinear })
    }

    fn symbol(&self, k: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(j, c) in &self.linear {
            acc += Complex64::new(0.0, k).powu(j as u32) * c;
        }
        acc
    }
}

/// Pseudospectral integrating-factor RK4 stepper for one curvature flow.
pub struct CurvatureFlow {
    grid: SpectralGrid,
    split: SplitRhs,
    nonlinear_order: usize,
    /// `exp(symbol · dt/2)` per mode, for the current `dt`.
    dt: f64,
    e_half: Vec<Complex64>,
    e_full: Vec<Complex64>,
}

impl CurvatureFlow {
    pub fn new(motion: &MotionSpec, n: usize, length: f64, dt: f64) -> Result<Self, EvolveError> {
        if !(dt > 0.0) {
            return Err(EvolveError::Invalid("dt must be positive".to_string()));
        }
        let grid = SpectralGrid::new(n, length);
        let split = SplitRhs::of(&motion.rhs)?;
        let nonlinear_order = split.nonlinear.max_order().unwrap_or(0);
        let e_half: Vec<Complex64> = (0..n)
            .map(|j| (split.symbol(grid.wavenumber(j)) * (dt / 2.0)).exp())
            .collect();
        let e_full = e_half.iter().map(|e| e * e).collect();
        Ok(CurvatureFlow {
            grid,
            split,
            nonlinear_order,
            dt,
            e_half,
            e_full,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Nonlinear part of the rhs evaluated in physical space from dealiased
    /// jets, returned in spectral space (dealiased).
    fn nonlinear_hat(&self, u_hat: &[Complex64]) -> Result<Vec<Complex64>, EvolveError> {
        if self.split.nonlinear.is_zero() {
            return Ok(vec![Complex64::new(0.0, 0.0); u_hat.len()]);
        }
        let n = u_hat.len();
        let mut base = u_hat.to_vec();
        self.grid.dealias(&mut base);
        let jets: Vec<Vec<f64>> = (0..=self.nonlinear_order)
            .map(|m| {
                let mut spec = base.clone();
                self.grid.derivative_spectrum(&mut spec, m);
                self.grid.ifft(&spec)
            })
            .collect();
        let mut jet_buf = vec![0.0; self.nonlinear_order + 1];
        let mut values = vec![0.0; n];
        for node in 0..n {
            for (m, jet) in jets.iter().enumerate() {
                jet_buf[m] = jet[node];
            }
            values[node] = self.split.nonlinear.evaluate(&jet_buf)?;
        }
        let mut spec = self.grid.fft(&values);
        self.grid.dealias(&mut spec);
        Ok(spec)
    }

    /// One integrating-factor RK4 step in spectral space.
    fn step(&self, u_hat: &mut Vec<Complex64>) -> Result<(), EvolveError> {
        let n = u_hat.len();
        let dt = self.dt;
        let k1 = self.nonlinear_hat(u_hat)?;
        let mut arg: Vec<Complex64> = (0..n)
            .map(|j| self.e_half[j] * (u_hat[j] + k1[j] * (dt / 2.0)))
            .collect();
        let k2 = self.nonlinear_hat(&arg)?;
        for (j, a) in arg.iter_mut().enumerate() {
            *a = self.e_half[j] * u_hat[j] + k2[j] * (dt / 2.0);
        }
        let k3 = self.nonlinear_hat(&arg)?;
        for (j, a) in arg.iter_mut().enumerate() {
            *a = self.e_full[j] * u_hat[j] + self.e_half[j] * k3[j] * dt;
        }
        let k4 = self.nonlinear_hat(&arg)?;
        for j in 0..n {
            u_hat[j] = self.e_full[j] * u_hat[j]
                + (self.e_full[j] * k1[j]
                    + self.e_half[j] * (k2[j] + k3[j]) * 2.0
                    + k4[j])
                    * (dt / 6.0);
        }
        Ok(())
    }
}

/// A step size satisfying an RK4-style stability bound for the nonlinear
/// part of the flow on this grid (the linear part is integrated exactly).
pub fn suggested_dt(motion: &MotionSpec, grid: &CurvatureGrid) -> f64 {
    let split = match SplitRhs::of(&motion.rhs) {
        Ok(s) => s,
        Err(_) => return 1e-4,
    };
    let amplitude = grid.max_abs().max(1e-6);
    let k_max = std::f64::consts::PI * grid.len() as f64 / grid.period();
    let mut rate: f64 = 0.0;
    for (m, c) in split.nonlinear.iter() {
        use num_traits::ToPrimitive;
        let c = c.to_f64().unwrap_or(0.0).abs();
        let degree = m.degree() as i32;
        let top = m.max_order().unwrap_or(0) as i32;
        rate += c * amplitude.powi(degree - 1) * k_max.powi(top) * degree as f64;
    }
    if rate <= 0.0 {
        return 1e-3;
    }
    1.0 / rate
}

/// Conserved functionals `P_k = ∫ p_k[κ] ds`, `k = 0..=m`, by the trapezoid
/// rule on spectral jets (exact for smooth periodic data).
pub fn conserved_functionals(
    grid: &CurvatureGrid,
    table: &HierarchyTable,
    m: usize,
) -> Result<Vec<f64>, EvolveError> {
    if m > table.depth() {
        return Err(EvolveError::Invalid(format!(
            "requested P_{m} beyond table depth {}",
            table.depth()
        )));
    }
    let sg = SpectralGrid::new(grid.len(), grid.period());
    let max_order = (0..=m)
        .filter_map(|k| table.p(k).max_order())
        .max()
        .unwrap_or(0);
    let jets = sg.jets(grid.values(), max_order, false);
    let h = grid.step();
    let mut out = Vec::with_capacity(m + 1);
    let mut jet_buf = vec![0.0; max_order + 1];
    for k in 0..=m {
        let density = table.p(k);
        let mut acc = 0.0;
        for node in 0..grid.len() {
            for (j, jet) in jets.iter().enumerate() {
                jet_buf[j] = jet[node];
            }
            acc += density.evaluate(&jet_buf)?;
        }
        out.push(acc * h);
    }
    Ok(out)
}

fn conserved_record(grid: &CurvatureGrid, table: &HierarchyTable) -> Result<Vec<f64>, EvolveError> {
    conserved_functionals(grid, table, 2.min(table.depth()))
}

/// Evolves a curvature grid under the motion's flow from `t = 0` to `T`,
/// recording a snapshot every `snap_every` steps (and always at the end).
pub fn evolve_curvature(
    motion: &MotionSpec,
    grid0: &CurvatureGrid,
    dt: f64,
    t_end: f64,
    snap_every: usize,
) -> Result<Vec<FlowState>, EvolveError> {
    let table = HierarchyTable::generate(2).expect("depth-2 table");
    let flow = CurvatureFlow::new(motion, grid0.len(), grid0.period(), dt)?;
    let n_steps = (t_end / dt).round().max(0.0) as usize;
    let snap_every = snap_every.max(1);
    let sg = &flow.grid;
    let mut u_hat = sg.fft(grid0.values());
    let abort_above = INSTABILITY_FACTOR * grid0.max_abs().max(1e-12);

    let mut snapshots = Vec::new();
    let record = |u_hat: &[Complex64], t: f64, snaps: &mut Vec<FlowState>| -> Result<(), EvolveError> {
        let values = sg.ifft(u_hat);
        let grid = CurvatureGrid::new(grid0.period(), values)?;
        let conserved = conserved_record(&grid, &table)?;
        snaps.push(FlowState {
            t,
            grid,
            frames: None,
            conserved,
        });
        Ok(())
    };

    record(&u_hat, 0.0, &mut snapshots)?;
    for step in 1..=n_steps {
        flow.step(&mut u_hat)?;
        let t = step as f64 * dt;
        let max_abs = sg
            .ifft(&u_hat)
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        if !max_abs.is_finite() || max_abs > abort_above {
            return Err(EvolveError::Instability { t, max_abs });
        }
        if step % snap_every == 0 || step == n_steps {
            record(&u_hat, t, &mut snapshots)?;
        }
    }
    Ok(snapshots)
}

/// The frame-flow matrix `𝔓[κ]` of a motion, evaluated on a numeric jet.
pub fn motion_matrix(motion: &MotionSpec, jet: &[f64]) -> Result<Matrix4<f64>, DiffPolyError> {
    let [p1, p2, p3, p4, p5, p6] = motion.coefficients_at(jet)?;
    Ok(e21_matrix([p1, p2, p3], [p4, p5, p6]))
}

/// Curvature from frames via `b′ = −2κ n`: `κ = −⟨b′, n⟩ / 2`, with
/// centered differences inside and one-sided second-order stencils at the
/// ends.
pub fn kappa_from_frames(frames: &[Frame], h: f64) -> Vec<f64> {
    let n = frames.len();
    let mut kappa = vec![0.0; n];
    let b = |k: usize| frames[k].a3;
    for k in 0..n {
        let bp = if k == 0 {
            (b(0) * (-3.0) + b(1) * 4.0 - b(2)) * (1.0 / (2.0 * h))
        } else if k == n - 1 {
            (b(n - 3) - b(n - 2) * 4.0 + b(n - 1) * 3.0) * (1.0 / (2.0 * h))
        } else {
            (b(k + 1) - b(k - 1)) * (1.0 / (2.0 * h))
        };
        kappa[k] = -0.5 * minkowski_inner(&bp, &frames[k].a2);
    }
    kappa
}

/// Evolves a curve (frames and curvature) under the motion's frame flow
/// `F ← F · exp(dt · 𝔓[κ])`, refreshing `κ` geometrically after every step.
///
/// The input must carry frames and curvature for all nodes; the curvature
/// must close up periodically (`κ` at the two ends equal) since jets are
/// computed spectrally.
pub fn evolve_curve(
    motion: &MotionSpec,
    curve0: &CurveSample,
    dt: f64,
    t_end: f64,
    snap_every: usize,
) -> Result<Vec<FlowState>, EvolveError> {
    curve0.validate()?;
    let frames0 = curve0
        .frames
        .as_ref()
        .ok_or_else(|| EvolveError::Invalid("curve carries no frames".to_string()))?;
    let kappa0 = curve0
        .kappa
        .as_ref()
        .ok_or_else(|| EvolveError::Invalid("curve carries no curvature".to_string()))?;
    let n_pts = curve0.len();
    let n = n_pts - 1; // periodic nodes
    if n < 16 {
        return Err(EvolveError::Invalid("need at least 17 nodes".to_string()));
    }
    let h = curve0.step();
    let length = n as f64 * h;
    if (kappa0[0] - kappa0[n]).abs() > 1e-6 * kappa0[0].abs().max(1.0) {
        return Err(EvolveError::Invalid(
            "curvature does not close up periodically".to_string(),
        ));
    }
    let table = HierarchyTable::generate(2).expect("depth-2 table");
    let sg = SpectralGrid::new(n, length);
    let jet_order = motion.max_jet_order();
    let n_steps = (t_end / dt).round().max(0.0) as usize;
    let snap_every = snap_every.max(1);

    let mut frames: Vec<Matrix4<f64>> = frames0.iter().map(Frame::to_matrix).collect();
    let mut kappa = kappa0.clone();
    let abort_above =
        INSTABILITY_FACTOR * kappa0.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-12);

    let record = |kappa: &[f64],
                  frames: &[Matrix4<f64>],
                  t: f64,
                  snaps: &mut Vec<FlowState>|
     -> Result<(), EvolveError> {
        let grid = CurvatureGrid::new(length, kappa[..n].to_vec());
        let conserved = match &grid {
            Ok(g) => conserved_record(g, &table)?,
            Err(_) => Vec::new(),
        };
        snaps.push(FlowState {
            t,
            grid: grid.unwrap_or(CurvatureGrid {
                length,
                values: kappa[..n].to_vec(),
            }),
            frames: Some(frames.iter().map(Frame::from_matrix).collect()),
            conserved,
        });
        Ok(())
    };

    let mut snapshots = Vec::new();
    record(&kappa, &frames, 0.0, &mut snapshots)?;
    for step in 1..=n_steps {
        // jets of the current curvature on the periodic nodes
        let jets = sg.jets(&kappa[..n], jet_order, false);
        let mut jet_buf = vec![0.0; jet_order + 1];
        for (node, frame) in frames.iter_mut().enumerate() {
            let src = if node == n { 0 } else { node };
            for (j, jet) in jets.iter().enumerate() {
                jet_buf[j] = jet[src];
            }
            let p = motion_matrix(motion, &jet_buf)?;
            *frame *= expm(&(p * dt));
        }
        // geometric curvature refresh
        let frame_structs: Vec<Frame> = frames.iter().map(Frame::from_matrix).collect();
        let t = step as f64 * dt;
        for f in &frame_structs {
            let residual = f.gram_residual();
            if residual > EPS_FRAME {
                return Err(GeomError::FrameDrift {
                    residual,
                    tol: EPS_FRAME,
                    s: t,
                }
                .into());
            }
        }
        kappa = kappa_from_frames(&frame_structs, h);
        let max_abs = kappa.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !max_abs.is_finite() || max_abs > abort_above {
            return Err(EvolveError::Instability { t, max_abs });
        }
        if step % snap_every == 0 || step == n_steps {
            record(&kappa, &frames, t, &mut snapshots)?;
        }
    }
    Ok(snapshots)
}

/// The executable content of the curvature-evolution theorem: after one
/// frame-flow step of size `dt`, the discrete time derivative of the
/// geometrically extracted curvature is compared pointwise against the
/// symbolic right-hand side evaluated on the initial curvature's jets.
/// Returns the max discrepancy over the nodes covered by the extraction
/// stencil.
pub fn consistency_check(
    motion: &MotionSpec,
    curve0: &CurveSample,
    dt: f64,
) -> Result<f64, EvolveError> {
    curve0.validate()?;
    let kappa0 = curve0
        .kappa
        .as_ref()
        .ok_or_else(|| EvolveError::Invalid("curve carries no curvature".to_string()))?;
    let n_pts = curve0.len();
    let n = n_pts - 1;
    let h = curve0.step();
    let length = n as f64 * h;
    let sg = SpectralGrid::new(n, length);
    let rhs_order = motion.rhs.max_order().unwrap_or(0);
    let jets = sg.jets(&kappa0[..n], rhs_order, false);

    let before = curvature_from_curve(curve0)?;
    let snaps = evolve_curve(motion, curve0, dt, dt, 1)?;
    let evolved = snaps.last().expect("one step");
    let evolved_curve = CurveSample {
        s: curve0.s.clone(),
        points: evolved
            .frames
            .as_ref()
            .expect("frames present")
            .iter()
            .map(|f| f.point)
            .collect(),
        frames: evolved.frames.clone(),
        kappa: None,
    };
    let after = curvature_from_curve(&evolved_curve)?;

    let mut worst = 0.0f64;
    let mut jet_buf = vec![0.0; rhs_order + 1];
    for (i, node) in (before.first_node..before.first_node + before.kappa.len()).enumerate() {
        let src = if node >= n { node - n } else { node };
        for (j, jet) in jets.iter().enumerate() {
            jet_buf[j] = jet[src];
        }
        let rhs = motion.rhs.evaluate(&jet_buf)?;
        let rate = (after.kappa[i] - before.kappa[i]) / dt;
        worst = worst.max((rate - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::integrate_frenet;

    fn kdv_motion() -> MotionSpec {
        MotionSpec::hierarchy_motion(2).unwrap()
    }

    #[test]
    fn constant_profile_is_a_fixed_point() {
        let motion = kdv_motion();
        let grid = CurvatureGrid::sample(10.0, 64, |_| 0.7).unwrap();
        let snaps = evolve_curvature(&motion, &grid, 1e-3, 0.1, 100).unwrap();
        let last = snaps.last().unwrap();
        for v in last.grid.values() {
            assert!((v - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_profile_is_fixed_for_higher_flows() {
        for n in 2..=4 {
            let motion = MotionSpec::hierarchy_motion(n).unwrap();
            let grid = CurvatureGrid::sample(10.0, 64, |_| 0.0).unwrap();
            let snaps = evolve_curvature(&motion, &grid, 1e-3, 0.05, 50).unwrap();
            for v in snaps.last().unwrap().grid.values() {
                assert_eq!(*v, 0.0, "flow {n}");
            }
        }
    }

    #[test]
    fn wave_flow_translates() {
        // n = 1 flow: u_t = -u_s, pure advection at unit speed
        let table = HierarchyTable::generate(1).unwrap();
        let rhs = table.kdv_rhs(1).unwrap();
        // build a MotionSpec-shaped carrier via p3 admissible? The wave flow
        // is not a curve motion; step the PDE directly through CurvatureFlow.
        let motion = MotionSpec {
            p1: DiffPoly::zero(),
            p2: DiffPoly::zero(),
            p3: DiffPoly::zero(),
            p4: DiffPoly::zero(),
            p5: DiffPoly::zero(),
            p6: DiffPoly::zero(),
            rhs,
        };
        let length = 2.0 * std::f64::consts::PI;
        let grid = CurvatureGrid::sample(length, 128, |s| (2.0 * s).sin().exp() - 1.0).unwrap();
        let dt = 1e-3;
        let t_end = 0.5;
        let snaps = evolve_curvature(&motion, &grid, dt, t_end, 10_000).unwrap();
        let sg = SpectralGrid::new(128, length);
        let expect = sg.translate(grid.values(), t_end);
        let got = snaps.last().unwrap().grid.values();
        let err = got
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "advection error {err:.3e}");
    }

    #[test]
    fn soliton_travels_at_speed_four() {
        let motion = kdv_motion();
        let length = 40.0;
        let n = 256;
        let grid = CurvatureGrid::sample(length, n, |s| {
            let x = s - length / 2.0;
            2.0 / x.cosh().powi(2)
        })
        .unwrap();
        let dt = 2e-4;
        let t_end = 0.25;
        let snaps = evolve_curvature(&motion, &grid, dt, t_end, 10_000).unwrap();
        let got = snaps.last().unwrap().grid.values().to_vec();
        let sg = SpectralGrid::new(n, length);
        let expect = sg.translate(grid.values(), 4.0 * t_end);
        let err = got
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "soliton shape error {err:.3e}");
        // conserved functionals recorded at each snapshot
        let c0 = &snaps[0].conserved;
        let c1 = &snaps.last().unwrap().conserved;
        for (a, b) in c0.iter().zip(c1) {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "drift {a} -> {b}");
        }
    }

    #[test]
    fn conserved_functionals_on_constants() {
        let table = HierarchyTable::generate(2).unwrap();
        let length = 5.0;
        let c = 1.3;
        let grid = CurvatureGrid::sample(length, 32, |_| c).unwrap();
        let p = conserved_functionals(&grid, &table, 2).unwrap();
        assert!((p[0] - length * c / 2.0).abs() < 1e-12);
        assert!((p[1] - length * c * c / 2.0).abs() < 1e-12);
        assert!((p[2] - length * c * c * c).abs() < 1e-11);
        // zero profile: all vanish
        let zero = CurvatureGrid::sample(length, 32, |_| 0.0).unwrap();
        for v in conserved_functionals(&zero, &table, 2).unwrap() {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn translation_equivariance() {
        let motion = kdv_motion();
        let length = 2.0 * std::f64::consts::PI;
        let n = 64;
        let shift_nodes = 5;
        let f = |s: f64| 0.4 * s.sin() + 0.1 * (2.0 * s).cos();
        let grid = CurvatureGrid::sample(length, n, f).unwrap();
        let shifted_vals: Vec<f64> = (0..n)
            .map(|k| grid.values()[(k + n - shift_nodes) % n])
            .collect();
        let shifted = CurvatureGrid::new(length, shifted_vals).unwrap();
        let dt = 1e-3;
        let a = evolve_curvature(&motion, &grid, dt, 0.05, 1000).unwrap();
        let b = evolve_curvature(&motion, &shifted, dt, 0.05, 1000).unwrap();
        let av = a.last().unwrap().grid.values();
        let bv = b.last().unwrap().grid.values();
        for k in 0..n {
            let rotated = av[(k + n - shift_nodes) % n];
            assert!((bv[k] - rotated).abs() < 1e-11);
        }
    }

    #[test]
    fn instability_detected_on_oversized_step() {
        let motion = kdv_motion();
        let grid = CurvatureGrid::sample(10.0, 128, |s| 2.0 * (2.0 * std::f64::consts::PI * s / 10.0).sin()).unwrap();
        // grossly unstable step for the nonlinear part
        let out = evolve_curvature(&motion, &grid, 0.5, 50.0, 1);
        assert!(matches!(out, Err(EvolveError::Instability { .. })));
    }

    #[test]
    fn stationary_motion_keeps_curve() {
        // p3 = 0 generates the zero motion
        let motion = MotionSpec::from_p3(&DiffPoly::zero()).unwrap();
        let n = 64;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let kappa: Vec<f64> = (0..=n).map(|k| 0.3 * (k as f64 * h).sin()).collect();
        let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
        let snaps = evolve_curve(&motion, &curve, 1e-2, 0.1, 100).unwrap();
        let last = snaps.last().unwrap();
        let frames = last.frames.as_ref().unwrap();
        for (f, f0) in frames.iter().zip(curve.frames.as_ref().unwrap()) {
            assert!((f.point.x1 - f0.point.x1).abs() < 1e-14);
            assert!((f.point.x2 - f0.point.x2).abs() < 1e-14);
            assert!((f.point.x3 - f0.point.x3).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_curvature_moves_rigidly() {
        let motion = kdv_motion();
        let kappa_c = 0.5;
        let n = 64;
        let h = 0.05;
        let kappa = vec![kappa_c; n + 1];
        let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
        let dt = 1e-3;
        let steps = 40;
        let snaps = evolve_curve(&motion, &curve, dt, dt * steps as f64, steps).unwrap();
        let last = snaps.last().unwrap();
        // curvature unchanged
        for v in last.grid.values() {
            assert!((v - kappa_c).abs() < 1e-8, "kappa drift {v}");
        }
        // frames evolve by a fixed one-parameter subgroup: F(s,t) = g(t) F(s,0)
        let frames0 = curve.frames.as_ref().unwrap();
        let frames1 = last.frames.as_ref().unwrap();
        let g = frames1[0].to_matrix() * frames0[0].to_matrix().try_inverse().unwrap();
        for k in (0..=n).step_by(13) {
            let expect = g * frames0[k].to_matrix();
            let diff = (frames1[k].to_matrix() - expect).norm();
            assert!(diff < 1e-9, "node {k}: {diff:.2e}");
        }
    }

    #[test]
    fn consistency_of_flow_and_pde() {
        let motion = kdv_motion();
        let length = 2.0 * std::f64::consts::PI;
        let n = 256;
        let h = length / n as f64;
        let kappa: Vec<f64> = (0..=n)
            .map(|k| 0.3 * (2.0 * std::f64::consts::PI * k as f64 * h / length).sin())
            .collect();
        let curve = integrate_frenet(&kappa, h, &Frame::identity()).unwrap();
        let d_coarse = consistency_check(&motion, &curve, 4e-3).unwrap();
        let d_fine = consistency_check(&motion, &curve, 1e-3).unwrap();
        assert!(d_fine < d_coarse, "no dt-improvement: {d_coarse:.3e} -> {d_fine:.3e}");
        assert!(d_fine < 1e-2, "one-step consistency too large: {d_fine:.3e}");
        // zero motion: zero discrepancy
        let zero = MotionSpec::from_p3(&DiffPoly::zero()).unwrap();
        let d0 = consistency_check(&zero, &curve, 1e-3).unwrap();
        assert!(d0 < 1e-12);
    }
}
