//! The KdV hierarchy by Lenard recursion, and the curvature motions it drives.
//!
//! Starting from `g0 = 1/2`, the recursion `D g_n = 𝒟 g_{n−1}` produces the
//! sequence of variational gradients of the KdV conserved functionals, with
//! densities `p_n` recovered by the homotopy formula so that `E(p_n) = g_n`.
//! The flows `u_t = −D g_n = −𝒟 g_{n−1}` are the members of the hierarchy:
//! `n = 1` is the wave equation, `n = 2` is KdV `u_t = −6 u u_s − u_sss`,
//! `n = 3` the fifth-order flow, and so on.
//!
//! A [`MotionSpec`] packages the six coefficient functions `p1 … p6` of a
//! curve motion generated by an admissible `p3` (one with `E(u1·p3) = 0`),
//! together with the induced curvature evolution
//! `∂κ/∂t = ½ 𝒟 p4 = −¼ 𝒟 D⁻¹ 𝒟 p3`. Choosing `p3 = 4 g_{n−2}` makes the
//! curvature evolve by the n-th hierarchy flow.

use thiserror::Error;

use crate::diffpoly::{DiffPoly, DiffPolyError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    /// A Lenard step hit a non-integrable density; the chain element passed
    /// in was not produced by the recursion.
    #[error(transparent)]
    NotExact(#[from] DiffPolyError),
    /// `E(u1·p3) ≠ 0`: this `p3` does not generate a local motion.
    #[error("p3 = {p3} is not admissible: E(u1*p3) = {obstruction} is nonzero")]
    NotAdmissible { p3: String, obstruction: String },
    /// Argument out of the operation's range (e.g. `kdv_rhs(0)`).
    #[error("index out of range: {0}")]
    OutOfRange(String),
}

/// The Lenard chain up to depth `n`: gradients `g[0..=n]` and densities
/// `p[0..=n]` with `D g_k = 𝒟 g_{k−1}` and `E(p_k) = g_k`, all exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyTable {
    g: Vec<DiffPoly>,
    p: Vec<DiffPoly>,
}

/// Default cap on the recursion depth. Term counts grow combinatorially;
/// everything exercised here needs depth ≤ 5.
pub const DEFAULT_MAX_DEPTH: usize = 8;

/// One Lenard step: given `g_{n−1}`, returns `g_n = D⁻¹ 𝒟 g_{n−1}`.
pub fn lenard_step(g_prev: &DiffPoly) -> Result<DiffPoly, HierarchyError> {
    Ok(g_prev.apply_script_d().primitive()?)
}

impl HierarchyTable {
    /// Generates the chain to depth `n` (`n ≤ DEFAULT_MAX_DEPTH`; use
    /// [`HierarchyTable::generate_unbounded`] past that).
    pub fn generate(n: usize) -> Result<Self, HierarchyError> {
        if n > DEFAULT_MAX_DEPTH {
            return Err(HierarchyError::OutOfRange(format!(
                "depth {n} exceeds the default bound {DEFAULT_MAX_DEPTH}"
            )));
        }
        Self::generate_unbounded(n)
    }

    /// Generates the chain to depth `n` with no depth cap.
    pub fn generate_unbounded(n: usize) -> Result<Self, HierarchyError> {
        let mut g = vec![DiffPoly::from_ratio(1, 2)];
        let mut p = vec![DiffPoly::var(0).scale_ratio(1, 2)];
        for k in 1..=n {
            let gk = lenard_step(&g[k - 1])?;
            let pk = gk.potential_from_gradient()?;
            g.push(gk);
            p.push(pk);
        }
        let table = HierarchyTable { g, p };
        table.check_invariants();
        Ok(table)
    }

    fn check_invariants(&self) {
        for k in 1..self.g.len() {
            assert_eq!(
                self.g[k].total_derivative(),
                self.g[k - 1].apply_script_d(),
                "Lenard relation D g_{k} = 𝒟 g_{} violated",
                k - 1
            );
        }
        for (k, (gk, pk)) in self.g.iter().zip(&self.p).enumerate() {
            assert_eq!(&pk.euler_operator(), gk, "E(p_{k}) = g_{k} violated");
        }
    }

    /// Depth of the table.
    pub fn depth(&self) -> usize {
        self.g.len() - 1
    }

    /// Gradient `g_k`.
    pub fn g(&self, k: usize) -> &DiffPoly {
        &self.g[k]
    }

    /// Conserved density `p_k` (`P_k = ∫ p_k ds`).
    pub fn p(&self, k: usize) -> &DiffPoly {
        &self.p[k]
    }

    pub fn gradients(&self) -> &[DiffPoly] {
        &self.g
    }

    pub fn densities(&self) -> &[DiffPoly] {
        &self.p
    }

    /// Right-hand side of the n-th hierarchy flow, `u_t = −D g_n`.
    /// Both Hamiltonian forms are computed and compared before returning.
    pub fn kdv_rhs(&self, n: usize) -> Result<DiffPoly, HierarchyError> {
        if n < 1 || n > self.depth() {
            return Err(HierarchyError::OutOfRange(format!(
                "kdv_rhs({n}) needs 1 <= n <= {}",
                self.depth()
            )));
        }
        let rhs = -&self.g[n].total_derivative();
        let alt = -&self.g[n - 1].apply_script_d();
        assert_eq!(rhs, alt, "bi-Hamiltonian forms of flow {n} disagree");
        Ok(rhs)
    }
}

/// Right-hand side of the n-th hierarchy flow, generating the chain on the
/// fly. See [`HierarchyTable::kdv_rhs`].
pub fn kdv_rhs(n: usize) -> Result<DiffPoly, HierarchyError> {
    if n < 1 {
        return Err(HierarchyError::OutOfRange(
            "kdv_rhs needs n >= 1".to_string(),
        ));
    }
    HierarchyTable::generate(n)?.kdv_rhs(n)
}

/// A local motion of null curves: the frame-flow coefficients `p1 … p6`
/// determined by an admissible generator `p3`, and the induced curvature
/// evolution `rhs`.
///
/// All integration constants are zero (primitives vanish on the zero jet).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotionSpec {
    pub p1: DiffPoly,
    pub p2: DiffPoly,
    pub p3: DiffPoly,
    pub p4: DiffPoly,
    pub p5: DiffPoly,
    pub p6: DiffPoly,
    /// Curvature evolution right-hand side `∂κ/∂t = ½ 𝒟 p4`.
    pub rhs: DiffPoly,
}

impl MotionSpec {
    /// Builds the motion generated by `p3`. Fails with `NotAdmissible` when
    /// `E(u1·p3) ≠ 0`.
    ///
    /// The construction cross-checks three equivalent forms of the induced
    /// curvature evolution: `½ 𝒟 p4`, `−½ D p6 − u0 p5`, and
    /// `−¼ 𝒟 D⁻¹ 𝒟 p3`; and the identity `p5 = ½ 𝒟 p3`. These hold for
    /// every admissible generator and are asserted, not assumed.
    pub fn from_p3(p3: &DiffPoly) -> Result<Self, HierarchyError> {
        let u0 = DiffPoly::var(0);
        let u1 = DiffPoly::var(1);
        let obstruction = (&u1 * p3).euler_operator();
        if !obstruction.is_zero() {
            return Err(HierarchyError::NotAdmissible {
                p3: p3.to_text(),
                obstruction: obstruction.to_text(),
            });
        }
        // ∫ u1 p3: admissibility makes this exact (the product has no
        // constant term).
        let integral = (&u1 * p3)
            .primitive()
            .expect("E(u1*p3) = 0 guarantees exactness");
        let half_d2 = p3.total_derivative_n(2).scale_ratio(1, 2);
        let p1 = &half_d2 + &integral;
        let p2 = -&p3.total_derivative();
        let p4 = &(&-&half_d2 - &(&u0 * p3).scale_ratio(2, 1)) + &integral;
        let p5 = &p1.total_derivative() + &(&u0 * &p3.total_derivative()).scale_ratio(2, 1);
        let p6 = &p5.total_derivative() - &(&u0 * &p4).scale_ratio(2, 1);
        let rhs = p4.apply_script_d().scale_ratio(1, 2);

        assert_eq!(p5, p3.apply_script_d().scale_ratio(1, 2), "p5 = ½𝒟p3 failed");
        let lemma_form = &-&p6.total_derivative().scale_ratio(1, 2) - &(&u0 * &p5);
        assert_eq!(rhs, lemma_form, "½𝒟p4 = −½Dp6 − u0 p5 failed");
        let via_inverse = -&p3
            .apply_script_d()
            .primitive()
            .expect("𝒟p3 = −2 D p4 is exact")
            .apply_script_d()
            .scale_ratio(1, 4);
        assert_eq!(rhs, via_inverse, "½𝒟p4 = −¼𝒟D⁻¹𝒟p3 failed");

        Ok(MotionSpec {
            p1,
            p2,
            p3: p3.clone(),
            p4,
            p5,
            p6,
            rhs,
        })
    }

    /// The motion whose curvature evolution is the n-th hierarchy flow:
    /// `p3 = 4 g_{n−2}`, `n ≥ 2`. The identity `rhs = kdv_rhs(n)` is
    /// verified symbolically before returning.
    pub fn hierarchy_motion(n: usize) -> Result<Self, HierarchyError> {
        let table = HierarchyTable::generate(n.max(2))?;
        Self::hierarchy_motion_from(&table, n)
    }

    /// Same as [`MotionSpec::hierarchy_motion`] but reusing a generated table.
    pub fn hierarchy_motion_from(
        table: &HierarchyTable,
        n: usize,
    ) -> Result<Self, HierarchyError> {
        if n < 2 || n > table.depth() {
            return Err(HierarchyError::OutOfRange(format!(
                "hierarchy_motion({n}) needs 2 <= n <= {}",
                table.depth()
            )));
        }
        let p3 = table.g(n - 2).scale_ratio(4, 1);
        let motion = Self::from_p3(&p3)?;
        assert_eq!(
            motion.rhs,
            table.kdv_rhs(n)?,
            "hierarchy motion {n} does not reproduce the hierarchy flow"
        );
        Ok(motion)
    }

    /// Highest jet order needed to evaluate all of `p1 … p6` and `rhs`.
    pub fn max_jet_order(&self) -> usize {
        [
            &self.p1, &self.p2, &self.p3, &self.p4, &self.p5, &self.p6, &self.rhs,
        ]
        .iter()
        .filter_map(|p| p.max_order())
        .max()
        .unwrap_or(0)
    }

    /// Evaluates `(p1, …, p6)` on a numeric jet.
    pub fn coefficients_at(&self, jet: &[f64]) -> Result<[f64; 6], DiffPolyError> {
        Ok([
            self.p1.evaluate(jet)?,
            self.p2.evaluate(jet)?,
            self.p3.evaluate(jet)?,
            self.p4.evaluate(jet)?,
            self.p5.evaluate(jet)?,
            self.p6.evaluate(jet)?,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(j: usize) -> DiffPoly {
        DiffPoly::var(j)
    }

    #[test]
    fn lenard_first_steps() {
        // 1/2 -> u0
        assert_eq!(lenard_step(&DiffPoly::from_ratio(1, 2)).unwrap(), u(0));
        // u0 -> 3 u0^2 + u2
        let g2 = lenard_step(&u(0)).unwrap();
        assert_eq!(g2, &(&u(0) * &u(0)).scale_ratio(3, 1) + &u(2));
        // g2 -> 10 u0^3 + 10 u0 u2 + 5 u1^2 + u4
        let g3 = lenard_step(&g2).unwrap();
        assert_eq!(g3.to_text(), "10*u0^3 + 10*u0*u2 + 5*u1^2 + u4");
    }

    #[test]
    fn table_matches_published_densities() {
        let t = HierarchyTable::generate(2).unwrap();
        assert_eq!(t.g(0), &DiffPoly::from_ratio(1, 2));
        assert_eq!(t.p(0), &u(0).scale_ratio(1, 2));
        assert_eq!(t.p(1), &(&u(0) * &u(0)).scale_ratio(1, 2));
        // P2 density equals u0^3 - u1^2/2 modulo a total derivative
        let classical = &(&(&u(0) * &u(0)) * &u(0)) - &(&u(1) * &u(1)).scale_ratio(1, 2);
        assert!(t.p(2).equal_mod_d(&classical));
    }

    #[test]
    fn kdv_rhs_first_flows() {
        let t = HierarchyTable::generate(3).unwrap();
        assert_eq!(t.kdv_rhs(1).unwrap(), u(1).scale_ratio(-1, 1));
        assert_eq!(
            t.kdv_rhs(2).unwrap(),
            &(&u(0) * &u(1)).scale_ratio(-6, 1) - &u(3)
        );
        let fifth = t.kdv_rhs(3).unwrap();
        assert_eq!(fifth.to_text(), "-30*u0^2*u1 - 10*u0*u3 - 20*u1*u2 - u5");
        assert!(kdv_rhs(0).is_err());
    }

    #[test]
    fn motion_from_constant_p3() {
        let m = MotionSpec::from_p3(&DiffPoly::from_int(2)).unwrap();
        assert_eq!(m.p1, u(0).scale_ratio(2, 1));
        assert!(m.p2.is_zero());
        assert_eq!(m.p4, u(0).scale_ratio(-2, 1));
        assert_eq!(m.p5, u(1).scale_ratio(2, 1));
        assert_eq!(
            m.p6,
            &u(2).scale_ratio(2, 1) + &(&u(0) * &u(0)).scale_ratio(4, 1)
        );
        assert_eq!(m.rhs, &-&u(3) - &(&u(0) * &u(1)).scale_ratio(6, 1));
        // and this is exactly the KdV flow
        assert_eq!(m.rhs, kdv_rhs(2).unwrap());
    }

    #[test]
    fn motion_admissibility() {
        // u1 is the standard non-admissible witness: E(u1^2) = -2 u2
        assert!(matches!(
            MotionSpec::from_p3(&u(1)),
            Err(HierarchyError::NotAdmissible { .. })
        ));
        // u0^2 IS admissible (u0^2 u1 = D(u0^3/3))
        assert!(MotionSpec::from_p3(&(&u(0) * &u(0))).is_ok());
    }

    #[test]
    fn hierarchy_motions_reproduce_flows() {
        let t = HierarchyTable::generate(5).unwrap();
        for n in 2..=5 {
            let m = MotionSpec::hierarchy_motion_from(&t, n).unwrap();
            assert_eq!(m.rhs, t.kdv_rhs(n).unwrap(), "flow {n}");
        }
        // n = 3 generator is 4 g1 = 4 u0
        let m3 = MotionSpec::hierarchy_motion_from(&t, 3).unwrap();
        assert_eq!(m3.p3, u(0).scale_ratio(4, 1));
    }
}
