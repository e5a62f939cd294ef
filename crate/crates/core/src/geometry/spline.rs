//! Cubic spline interpolation with not-a-knot end conditions.
//!
//! Standard C² interpolation on a strictly increasing knot grid; the
//! not-a-knot condition makes the third derivative continuous across the
//! first and last interior knots, which keeps full fourth-order accuracy up
//! to the boundary.

/// A cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Builds the not-a-knot spline. Requires at least two knots and a
    /// strictly increasing grid; with fewer than four knots the conditions
    /// degenerate to the interpolating polynomial.
    pub fn not_a_knot(x: &[f64], y: &[f64]) -> Result<Self, String> {
        let n = x.len();
        if n != y.len() {
            return Err("x and y lengths differ".to_string());
        }
        if n < 2 {
            return Err("need at least two knots".to_string());
        }
        for w in x.windows(2) {
            if w[1] <= w[0] {
                return Err("knots not strictly increasing".to_string());
            }
        }
        if n == 2 {
            return Ok(CubicSpline {
                x: x.to_vec(),
                y: y.to_vec(),
                m: vec![0.0; 2],
            });
        }
        if n == 3 {
            // unique parabola: constant second derivative
            let h0 = x[1] - x[0];
            let h1 = x[2] - x[1];
            let d0 = (y[1] - y[0]) / h0;
            let d1 = (y[2] - y[1]) / h1;
            let m = 2.0 * (d1 - d0) / (h0 + h1);
            return Ok(CubicSpline {
                x: x.to_vec(),
                y: y.to_vec(),
                m: vec![m; 3],
            });
        }

        // Solve for second derivatives m_i. Interior equations:
        //   h_{i-1} m_{i-1} + 2(h_{i-1}+h_i) m_i + h_i m_{i+1} = 6(d_i - d_{i-1})
        // Not-a-knot replaces the boundary rows with third-derivative
        // continuity across x1 and x_{n-2}:
        //   h1 m_0 - (h0 + h1) m_1 + h0 m_2 = 0
        //   h_{n-2} m_{n-3} - (h_{n-3} + h_{n-2}) m_{n-2} + h_{n-3} m_{n-1} = 0
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Banded system with bandwidth 2 at the two boundary rows; fold the
        // boundary rows into the tridiagonal part by eliminating m_0 and
        // m_{n-1} analytically.
        //
        // From the first boundary row: m_0 = ((h0+h1) m_1 - h0 m_2) / h1.
        // Substituting into the first interior equation (i = 1) gives a
        // tridiagonal-compatible row in (m_1, m_2). Likewise at the end.
        let ni = n - 2; // unknowns m_1 .. m_{n-2}
        let mut sub = vec![0.0; ni];
        let mut diag = vec![0.0; ni];
        let mut sup = vec![0.0; ni];
        let mut rhs = vec![0.0; ni];
        for (row, i) in (1..n - 1).enumerate() {
            sub[row] = h[i - 1];
            diag[row] = 2.0 * (h[i - 1] + h[i]);
            sup[row] = h[i];
            rhs[row] = 6.0 * (d[i] - d[i - 1]);
        }
        // Fold m_0 into row 0 (which involves m_0, m_1, m_2):
        // h0 m_0 + 2(h0+h1) m_1 + h1 m_2 = rhs0, with
        // m_0 = ((h0+h1) m_1 - h0 m_2)/h1.
        diag[0] += h[0] * (h[0] + h[1]) / h[1];
        sup[0] += -h[0] * h[0] / h[1];
        sub[0] = 0.0;
        // Fold m_{n-1} into the last row:
        // m_{n-1} = ((h_{n-3}+h_{n-2}) m_{n-2} - h_{n-2} m_{n-3})/h_{n-3}
        let hm = h[n - 2];
        let hp = h[n - 3];
        diag[ni - 1] += hm * (hp + hm) / hp;
        sub[ni - 1] += -hm * hm / hp;
        sup[ni - 1] = 0.0;

        let interior = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&interior);
        m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
        m[n - 1] = ((hp + hm) * m[n - 2] - hm * m[n - 3]) / hp;

        Ok(CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn segment(&self, xq: f64) -> usize {
        let n = self.x.len();
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&xq).expect("finite knots"))
        {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        }
    }

    /// Evaluates the spline (extrapolates with the boundary cubic).
    pub fn eval(&self, xq: f64) -> f64 {
        let i = self.segment(xq);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - xq) / h;
        let b = (xq - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative.
    pub fn eval_deriv(&self, xq: f64) -> f64 {
        let i = self.segment(xq);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - xq) / h;
        let b = (xq - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().expect("nonempty"))
    }
}

/// Thomas algorithm.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>, String> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom.abs() < 1e-300 {
        return Err("singular tridiagonal system".to_string());
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom.abs() < 1e-300 {
            return Err("singular tridiagonal system".to_string());
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}
