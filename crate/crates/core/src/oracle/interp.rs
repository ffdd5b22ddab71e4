//! Piecewise-cubic interpolation on a uniform grid.
//!
//! Each query uses the cubic through the four nearest nodes; beyond the
//! ends the boundary cubic is extrapolated. The scheme reproduces cubic
//! polynomials exactly, which keeps a quadratic log value function exact.

#[derive(Debug, Clone, PartialEq)]
pub struct UniformCubic {
    lower: f64,
    step: f64,
    values: Vec<f64>,
}

impl UniformCubic {
    /// `values[i]` sits at `lower + i * step`; needs at least four nodes.
    pub fn new(lower: f64, step: f64, values: Vec<f64>) -> Self {
        assert!(values.len() >= 4, "cubic interpolation needs four nodes");
        assert!(step > 0.0);
        Self { lower, step, values }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.lower + self.step * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value, first and second derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.values.len();
        let pos = (x - self.lower) / self.step;
        let cell = if pos.is_finite() { pos.floor() } else { 0.0 };
        let start = (cell as isize - 1).clamp(0, n as isize - 4) as usize;
        let u = pos - start as f64;
        let f = &self.values[start..start + 4];
        // forward differences, Newton form around node `start`
        let d1 = f[1] - f[0];
        let d2 = f[2] - 2.0 * f[1] + f[0];
        let d3 = f[3] - 3.0 * f[2] + 3.0 * f[1] - f[0];
        let value = f[0] + u * (d1 + (u - 1.0) * (d2 / 2.0 + (u - 2.0) * d3 / 6.0));
        let slope = d1 + d2 * (2.0 * u - 1.0) / 2.0 + d3 * (3.0 * u * u - 6.0 * u + 2.0) / 6.0;
        let curvature = d2 + d3 * (u - 1.0);
        (value, slope / self.step, curvature / (self.step * self.step))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }
}
