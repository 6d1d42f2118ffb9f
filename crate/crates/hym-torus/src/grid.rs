//! Uniform periodic grids on real 2n-tori and spectral scalar calculus.
//!
//! Real coordinate axes are ordered `(x_1, y_1, ..., x_n, y_n)` and the complex
//! structure is `z^i = x_i + sqrt(-1) y_i`.  Storage is row-major with axis 0
//! slowest.  Differentiation and Fourier-symbol inversion are exact on the
//! trigonometric range of the grid.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Discretization of a flat real 2n-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    n: usize,
    points: usize,
    periods: Vec<f64>,
}

impl GridSpec {
    /// `n`: complex dimension (1 or 2); `points`: grid points per real axis
    /// (power of two, at least 8); `periods`: side lengths per real axis in the
    /// order `(x_1, y_1, ..., x_n, y_n)`.
    pub fn new(n: usize, points: usize, periods: Vec<f64>) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::Unsupported(format!(
                "complex dimension n = {n}, supported values are 1 and 2"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Unsupported(format!(
                "points per axis = {points}, must be a power of two >= 8"
            )));
        }
        if periods.len() != 2 * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} periods, got {}",
                2 * n,
                periods.len()
            )));
        }
        if periods.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::ShapeMismatch("periods must be positive".into()));
        }
        Ok(GridSpec { n, points, periods })
    }

    /// Square torus with all periods equal to `2 pi`.
    pub fn square(n: usize, points: usize) -> Result<Self> {
        GridSpec::new(n, points, vec![std::f64::consts::TAU; 2 * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn total_points(&self) -> usize {
        self.points.pow(self.axes() as u32)
    }

    pub fn period_volume(&self) -> f64 {
        self.periods.iter().product()
    }

    fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.axes() - 1 - axis) as u32)
    }

    /// Real coordinates of grid point `idx`.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes()];
        let mut rem = idx;
        for a in 0..self.axes() {
            let s = self.stride(a);
            let m = rem / s;
            rem %= s;
            out[a] = self.periods[a] * (m as f64) / (self.points as f64);
        }
        out
    }

    /// Signed integer frequency of mode index `m` along one axis.
    fn signed_freq(&self, m: usize) -> i64 {
        if m <= self.points / 2 {
            m as i64
        } else {
            m as i64 - self.points as i64
        }
    }

    /// Angular frequencies `2 pi m / L` of the multi-mode at flat index `idx`.
    fn mode_freqs(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes()];
        let mut rem = idx;
        for a in 0..self.axes() {
            let s = self.stride(a);
            let m = rem / s;
            rem %= s;
            out[a] = std::f64::consts::TAU * self.signed_freq(m) as f64 / self.periods[a];
        }
        out
    }

    pub fn same_grid(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Complex scalar field sampled on a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: GridSpec,
    data: Vec<Complex64>,
}

fn apply_along_axis(
    grid: &GridSpec,
    data: &mut [Complex64],
    axis: usize,
    mut line_op: impl FnMut(&mut [Complex64]),
) {
    let np = grid.points_per_axis();
    let post = grid.stride(axis);
    let pre = grid.total_points() / (np * post);
    let mut line = vec![Complex64::default(); np];
    for p in 0..pre {
        for q in 0..post {
            let base = p * np * post + q;
            for (m, v) in line.iter_mut().enumerate() {
                *v = data[base + m * post];
            }
            line_op(&mut line);
            for (m, v) in line.iter().enumerate() {
                data[base + m * post] = *v;
            }
        }
    }
}

impl ScalarField {
    pub fn zeros(grid: &GridSpec) -> Self {
        ScalarField {
            grid: grid.clone(),
            data: vec![Complex64::default(); grid.total_points()],
        }
    }

    pub fn constant(grid: &GridSpec, value: Complex64) -> Self {
        ScalarField {
            grid: grid.clone(),
            data: vec![value; grid.total_points()],
        }
    }

    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let data = (0..grid.total_points())
            .map(|idx| f(&grid.coords(idx)))
            .collect();
        ScalarField {
            grid: grid.clone(),
            data,
        }
    }

    pub fn from_data(grid: &GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.total_points() {
            return Err(Error::ShapeMismatch(format!(
                "scalar field needs {} samples, got {}",
                grid.total_points(),
                data.len()
            )));
        }
        Ok(ScalarField {
            grid: grid.clone(),
            data,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &ScalarField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    pub fn mean(&self) -> Complex64 {
        self.data.iter().sum::<Complex64>() / self.data.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        // f64::max would silently drop NaN entries, so overflowed or
        // indeterminate data must be caught explicitly.
        self.data.iter().map(|v| v.norm()).fold(0.0, |acc, x| {
            if x.is_finite() {
                acc.max(x)
            } else {
                f64::INFINITY
            }
        })
    }

    pub fn max_real(&self) -> f64 {
        self.data.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_real(&self) -> f64 {
        self.data.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    /// Derivative along real axis `axis` by exact spectral differentiation.
    /// The Nyquist mode is zeroed, the standard choice for odd-order operators.
    pub fn partial_axis(&self, axis: usize) -> Result<Self> {
        if axis >= self.grid.axes() {
            return Err(Error::ShapeMismatch(format!(
                "axis {axis} out of range for {} axes",
                self.grid.axes()
            )));
        }
        let np = self.grid.points_per_axis();
        let period = self.grid.periods()[axis];
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(np);
        let inv = planner.plan_fft_inverse(np);
        let scale = 1.0 / np as f64;
        let mut out = self.clone();
        apply_along_axis(&self.grid, &mut out.data, axis, |line| {
            fwd.process(line);
            for (m, v) in line.iter_mut().enumerate() {
                let k = if 2 * m == np {
                    0.0
                } else {
                    std::f64::consts::TAU
                        * (if m <= np / 2 { m as i64 } else { m as i64 - np as i64 }) as f64
                        / period
                };
                *v *= I * k * scale;
            }
            inv.process(line);
        });
        Ok(out)
    }

    /// Holomorphic derivative `d/dz^i = (d/dx_i - sqrt(-1) d/dy_i) / 2`,
    /// `i` zero-based.
    pub fn partial_z(&self, i: usize) -> Result<Self> {
        let dx = self.partial_axis(2 * i)?;
        let dy = self.partial_axis(2 * i + 1)?;
        Ok(dx.zip(&dy, |a, b| 0.5 * (a - I * b)))
    }

    /// Antiholomorphic derivative `d/dzbar^i = (d/dx_i + sqrt(-1) d/dy_i) / 2`.
    pub fn partial_zbar(&self, i: usize) -> Result<Self> {
        let dx = self.partial_axis(2 * i)?;
        let dy = self.partial_axis(2 * i + 1)?;
        Ok(dx.zip(&dy, |a, b| 0.5 * (a + I * b)))
    }

    /// Quadrature of `f * volume_density` over the torus in real coordinates:
    /// uniform-grid mean times the total period volume.  The caller supplies the
    /// volume density (e.g. `2^n det g` for the metric volume form, or 1 for a
    /// plain coordinate integral).
    pub fn integrate(&self, volume_density: &ScalarField) -> Result<Complex64> {
        self.grid.same_grid(volume_density.grid())?;
        Ok(self.mul(volume_density).mean() * self.grid.period_volume())
    }

    /// Full 2n-dimensional forward transform (unnormalized).
    fn fft_all(&self, inverse: bool) -> Vec<Complex64> {
        let mut data = self.data.clone();
        let np = self.grid.points_per_axis();
        let mut planner = FftPlanner::new();
        let plan = if inverse {
            planner.plan_fft_inverse(np)
        } else {
            planner.plan_fft_forward(np)
        };
        for axis in 0..self.grid.axes() {
            apply_along_axis(&self.grid, &mut data, axis, |line| plan.process(line));
        }
        data
    }

    /// Solve a constant-coefficient equation `Op u = self` where `Op` acts on the
    /// Fourier mode with angular frequencies `k` as multiplication by
    /// `symbol(k)`.  If `require_zero_mean`, the right-hand side must have mean
    /// modulus at most `1e-10` relative to its sup-norm (absolute if the field
    /// vanishes) and the zero mode of the solution is set to zero; otherwise the
    /// symbol must be nonzero at `k = 0`.
    pub fn solve_fourier(
        &self,
        symbol: impl Fn(&[f64]) -> f64,
        require_zero_mean: bool,
    ) -> Result<Self> {
        if require_zero_mean {
            let mean = self.mean().norm();
            let scale = self.sup_norm().max(1.0);
            if mean > 1e-10 * scale {
                return Err(Error::NonZeroMean(mean));
            }
        }
        let mut spec = self.fft_all(false);
        let total = self.grid.total_points() as f64;
        for (idx, v) in spec.iter_mut().enumerate() {
            let k = self.grid.mode_freqs(idx);
            if k.iter().all(|&x| x == 0.0) {
                if require_zero_mean {
                    *v = Complex64::default();
                } else {
                    let s = symbol(&k);
                    if s == 0.0 {
                        return Err(Error::Numerical(
                            "symbol vanishes at the zero mode".into(),
                        ));
                    }
                    *v /= s * total;
                }
                continue;
            }
            let s = symbol(&k);
            if s == 0.0 {
                return Err(Error::Numerical(format!(
                    "symbol vanishes at nonzero mode {k:?}"
                )));
            }
            *v /= s * total;
        }
        let tmp = ScalarField {
            grid: self.grid.clone(),
            data: spec,
        };
        Ok(ScalarField {
            grid: self.grid.clone(),
            data: tmp.fft_all(true),
        })
    }
}

/// Holomorphic/antiholomorphic symbol factors of one Fourier mode: the value
/// `mu_i` with `d/dz^i exp(i k.x) = mu_i exp(i k.x)`, and `nu_i = -conj(mu_i)`
/// for `d/dzbar^i`.
pub fn dz_symbol(k: &[f64], i: usize) -> Complex64 {
    Complex64::new(0.5 * k[2 * i + 1], 0.5 * k[2 * i])
}

pub fn dzbar_symbol(k: &[f64], i: usize) -> Complex64 {
    -dz_symbol(k, i).conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(3, 16, vec![1.0; 6]).is_err());
        assert!(GridSpec::new(1, 12, vec![1.0; 2]).is_err());
        assert!(GridSpec::new(1, 4, vec![1.0; 2]).is_err());
        assert!(GridSpec::new(1, 16, vec![1.0; 3]).is_err());
        assert!(GridSpec::new(1, 16, vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn derivative_of_plane_wave_is_exact() {
        let grid = GridSpec::square(1, 32).unwrap();
        // f = exp(i(3x - 2y)), df/dz = (3/2 + i) f  since mu = (k_y + i k_x)/2.
        let f = ScalarField::from_fn(&grid, |p| (c(0.0, 1.0) * (3.0 * p[0] - 2.0 * p[1])).exp());
        let dz = f.partial_z(0).unwrap();
        let expect = f.scale(c(-1.0, 1.5));
        assert!(dz.sub(&expect).sup_norm() < 1e-12);
        let dzb = f.partial_zbar(0).unwrap();
        let expect = f.scale(c(1.0, 1.5));
        assert!(dzb.sub(&expect).sup_norm() < 1e-12);
    }

    #[test]
    fn derivative_anisotropic_periods() {
        let grid = GridSpec::new(1, 32, vec![std::f64::consts::TAU, 1.0]).unwrap();
        let k = std::f64::consts::TAU * 2.0; // mode 2 on the y-axis of period 1
        let f = ScalarField::from_fn(&grid, |p| c((k * p[1]).cos(), 0.0));
        let dy = f.partial_axis(1).unwrap();
        let expect = ScalarField::from_fn(&grid, |p| c(-k * (k * p[1]).sin(), 0.0));
        assert!(dy.sub(&expect).sup_norm() < 1e-10);
    }

    #[test]
    fn mixed_second_derivatives_commute() {
        let grid = GridSpec::square(2, 8).unwrap();
        let f = ScalarField::from_fn(&grid, |p| {
            c((p[0] + 2.0 * p[2]).sin() * (p[1] - p[3]).cos(), 0.0)
        });
        let a = f.partial_z(0).unwrap().partial_zbar(1).unwrap();
        let b = f.partial_zbar(1).unwrap().partial_z(0).unwrap();
        assert!(a.sub(&b).sup_norm() < 1e-12);
    }

    #[test]
    fn integrate_constants_and_waves() {
        let grid = GridSpec::square(1, 16).unwrap();
        let one = ScalarField::constant(&grid, c(1.0, 0.0));
        let total = one.integrate(&one).unwrap();
        let tau = std::f64::consts::TAU;
        assert_abs_diff_eq!(total.re, tau * tau, epsilon = 1e-12);
        let wave = ScalarField::from_fn(&grid, |p| c((3.0 * p[0]).cos(), 0.0));
        assert!(wave.integrate(&one).unwrap().norm() < 1e-12);
    }

    #[test]
    fn integrate_is_conjugation_equivariant() {
        let grid = GridSpec::square(1, 16).unwrap();
        let one = ScalarField::constant(&grid, c(1.0, 0.0));
        let f = ScalarField::from_fn(&grid, |p| c(p[0].cos(), (p[1] * 2.0).sin() + 0.3));
        let a = f.integrate(&one).unwrap().conj();
        let b = f.map(|v| v.conj()).integrate(&one).unwrap();
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
    }

    #[test]
    fn fourier_solve_inverts_flat_laplacian() {
        let grid = GridSpec::square(1, 32).unwrap();
        // Delta_flat(z-convention) = d/dz d/dzbar = (d_xx + d_yy)/4.
        let u = ScalarField::from_fn(&grid, |p| c((2.0 * p[0]).cos() * p[1].sin(), 0.0));
        let rhs = u.partial_z(0).unwrap().partial_zbar(0).unwrap();
        let sol = rhs
            .solve_fourier(
                |k| {
                    let mu = dz_symbol(k, 0);
                    let nu = dzbar_symbol(k, 0);
                    (mu * nu).re
                },
                true,
            )
            .unwrap();
        assert!(sol.sub(&u).sup_norm() < 1e-10);
    }

    #[test]
    fn fourier_solve_rejects_nonzero_mean() {
        let grid = GridSpec::square(1, 16).unwrap();
        let f = ScalarField::constant(&grid, c(1.0, 0.0));
        let err = f.solve_fourier(|_| 1.0, true);
        assert!(matches!(err, Err(Error::NonZeroMean(_))));
    }
}
