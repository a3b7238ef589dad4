use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::quadrature::gauss_legendre_unit;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, Complex64, ComplexMatrix};

/// Gauss-Legendre nodes per grid cell.
pub const CELL_NODES: usize = 12;

/// Fiber-valued samples on the periodic grid `t_j = j / N_t`.
///
/// Entry `(j, i)` is stored at `j * fiber_dim + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGridFunction {
    n_t: usize,
    fiber_dim: usize,
    values: Vec<Complex64>,
}

impl TimeGridFunction {
    pub fn zeros(n_t: usize, fiber_dim: usize) -> Self {
        Self {
            n_t,
            fiber_dim,
            values: vec![Complex64::new(0.0, 0.0); n_t * fiber_dim],
        }
    }

    pub fn from_fn(n_t: usize, fiber_dim: usize, mut f: impl FnMut(f64) -> Vec<Complex64>) -> Self {
        let mut values = Vec::with_capacity(n_t * fiber_dim);
        for j in 0..n_t {
            let v = f(j as f64 / n_t as f64);
            assert_eq!(v.len(), fiber_dim, "sample has the wrong fiber dimension");
            values.extend(v);
        }
        Self { n_t, fiber_dim, values }
    }

    pub fn from_values(n_t: usize, fiber_dim: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != n_t * fiber_dim {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {n_t} x {fiber_dim} grid",
                values.len()
            )));
        }
        Ok(Self { n_t, fiber_dim, values })
    }

    /// `e^{2 pi i n t} v`.
    pub fn plane_wave(n_t: usize, n: i64, v: &[Complex64]) -> Self {
        Self::from_fn(n_t, v.len(), |t| {
            let z = Complex64::from_polar(1.0, TAU * n as f64 * t);
            v.iter().map(|x| z * x).collect()
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_t).map(|j| j as f64 / self.n_t as f64).collect()
    }

    pub fn sample(&self, j: usize) -> &[Complex64] {
        &self.values[j * self.fiber_dim..(j + 1) * self.fiber_dim]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Mode coefficients `x_n = (1/N_t) sum_j e^{-2 pi i n t_j} x(t_j)`, indexed by
    /// FFT bin (bin `k` holds mode `k` for `k < N_t / 2` and `k - N_t` above).
    pub fn fourier_coefficients(&self) -> Vec<Vec<Complex64>> {
        let fft = FftPlanner::new().plan_fft_forward(self.n_t);
        let scale = 1.0 / self.n_t as f64;
        let mut out = vec![vec![Complex64::new(0.0, 0.0); self.fiber_dim]; self.n_t];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n_t];
        for i in 0..self.fiber_dim {
            for (j, b) in buf.iter_mut().enumerate() {
                *b = self.values[j * self.fiber_dim + i];
            }
            fft.process(&mut buf);
            for (k, b) in buf.iter().enumerate() {
                out[k][i] = b * scale;
            }
        }
        out
    }

    /// Coefficient of mode `n` (`|n| < N_t / 2`).
    pub fn mode(&self, n: i64) -> Vec<Complex64> {
        let k = n.rem_euclid(self.n_t as i64) as usize;
        self.fourier_coefficients().swap_remove(k)
    }
}

/// Signed mode number of FFT bin `k`; the Nyquist bin maps to `+N/2`.
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if 2 * k <= n {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn ensure_grid(n_t: usize) -> Result<()> {
    if n_t < 8 {
        return Err(Error::InvalidGrid(format!("need at least 8 grid points, got {n_t}")));
    }
    Ok(())
}

fn ensure_non_real(lambda: Complex64) -> Result<()> {
    if lambda.im == 0.0 || !lambda.im.is_finite() || !lambda.re.is_finite() {
        return Err(Error::RealSpectralParameter {
            re: lambda.re,
            im: lambda.im,
        });
    }
    Ok(())
}

/// Free periodic resolvent `R0(lambda) = (-i d/dt + H0 - lambda)^{-1}` on a grid,
/// evaluated from the integral formula
///
/// `u(t) = i int_0^t e^{-i lambda (s-t)} e^{i H0 (s-t)} f(s) ds
///       + i (e^{-i lambda} e^{i H0} - 1)^{-1} int_0^1 e^{-i lambda (s-t)} e^{i H0 (s-t)} f(s) ds`
///
/// applied to the trigonometric interpolant of the samples. Each eigen-channel
/// of `H0` reduces to a scalar kernel `e^{i a (s-t)}`, `a = h - lambda`; cell
/// integrals use Gauss-Legendre nodes and are accumulated in the direction in
/// which the kernel decays.
pub struct FreeResolvent {
    lambda: Complex64,
    n_t: usize,
    levels: Vec<f64>,
    channels: ComplexMatrix,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl FreeResolvent {
    pub fn new(h0: &ComplexMatrix, lambda: Complex64, n_t: usize) -> Result<Self> {
        ensure_non_real(lambda)?;
        ensure_grid(n_t)?;
        let eig = hermitian_eig(h0)?;
        for &h in &eig.real_values() {
            let a = Complex64::new(h, 0.0) - lambda;
            // |1 - e^{-i a}| from the decaying side; zero only on the real axis.
            let gap = (1.0 - (-a.im.abs()).exp()).abs();
            if gap < 1e-14 {
                return Err(Error::Singular {
                    pivot: gap,
                    threshold: 1e-14,
                });
            }
        }
        let (nodes, weights) = gauss_legendre_unit(CELL_NODES);
        let mut planner = FftPlanner::new();
        Ok(Self {
            lambda,
            n_t,
            levels: eig.real_values(),
            channels: eig.vectors,
            nodes,
            weights,
            fft: planner.plan_fft_forward(n_t),
            ifft: planner.plan_fft_inverse(n_t),
        })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn fiber_dim(&self) -> usize {
        self.levels.len()
    }

    pub fn apply(&self, f: &TimeGridFunction) -> TimeGridFunction {
        assert_eq!(f.n_t(), self.n_t, "grid size mismatch");
        assert_eq!(f.fiber_dim(), self.fiber_dim(), "fiber dimension mismatch");
        let d = self.fiber_dim();
        let mut out = TimeGridFunction::zeros(self.n_t, d);
        let mut g = vec![Complex64::new(0.0, 0.0); self.n_t];
        for c in 0..d {
            for (j, gj) in g.iter_mut().enumerate() {
                *gj = (0..d).map(|i| self.channels[(i, c)].conj() * f.values[j * d + i]).sum();
            }
            let u = self.scalar_channel(self.levels[c], &g);
            for (j, uj) in u.iter().enumerate() {
                for i in 0..d {
                    out.values[j * d + i] += self.channels[(i, c)] * uj;
                }
            }
        }
        out
    }

    /// Dense matrix of the operator on the `N_t * d` grid space.
    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.fiber_dim();
        let n = self.n_t * d;
        let mut m = ComplexMatrix::zeros(n, n);
        let mut e = TimeGridFunction::zeros(self.n_t, d);
        for col in 0..n {
            e.values[col] = Complex64::new(1.0, 0.0);
            let r = self.apply(&e);
            m.set_column(col, r.as_slice());
            e.values[col] = Complex64::new(0.0, 0.0);
        }
        m
    }

    fn scalar_channel(&self, level: f64, g: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_t;
        let h = 1.0 / n as f64;
        let i = Complex64::new(0.0, 1.0);
        let a = Complex64::new(level, 0.0) - self.lambda;

        let mut coeffs = g.to_vec();
        self.fft.process(&mut coeffs);
        for c in coeffs.iter_mut() {
            *c /= n as f64;
        }
        // Interpolant values at t_j + h x_r for every node r.
        let mut node_values: Vec<Vec<Complex64>> = Vec::with_capacity(self.nodes.len());
        for &x in &self.nodes {
            let mut buf: Vec<Complex64> = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    if n % 2 == 0 && 2 * k == n {
                        c * (std::f64::consts::PI * x).cos()
                    } else {
                        c * Complex64::from_polar(1.0, TAU * signed_mode(k, n) as f64 * x / n as f64)
                    }
                })
                .collect();
            self.ifft.process(&mut buf);
            node_values.push(buf);
        }

        let mut u = vec![Complex64::new(0.0, 0.0); n];
        if a.im < 0.0 {
            // K_j = int_0^{t_j} e^{i a (s - t_j)} g(s) ds, decaying forward.
            let w: Vec<Complex64> = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &wt)| (i * a * h * (x - 1.0)).exp() * (wt * h))
                .collect();
            let carry = (-i * a * h).exp();
            let mut k = vec![Complex64::new(0.0, 0.0); n + 1];
            for j in 0..n {
                let cell: Complex64 = (0..self.nodes.len()).map(|r| w[r] * node_values[r][j]).sum();
                k[j + 1] = carry * k[j] + cell;
            }
            let tail = k[n] / (Complex64::new(1.0, 0.0) - (-i * a).exp());
            for (j, uj) in u.iter_mut().enumerate() {
                let t = j as f64 * h;
                *uj = i * (k[j] + (-i * a * t).exp() * tail);
            }
        } else {
            // B_j = int_{t_j}^1 e^{i a (s - t_j)} g(s) ds, decaying backward.
            let w: Vec<Complex64> = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &wt)| (i * a * h * x).exp() * (wt * h))
                .collect();
            let carry = (i * a * h).exp();
            let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
            for j in (0..n).rev() {
                let cell: Complex64 = (0..self.nodes.len()).map(|r| w[r] * node_values[r][j]).sum();
                b[j] = carry * b[j + 1] + cell;
            }
            let head = b[0] / ((i * a).exp() - Complex64::new(1.0, 0.0));
            for (j, uj) in u.iter_mut().enumerate() {
                let t = j as f64 * h;
                *uj = i * ((i * a * (1.0 - t)).exp() * head - b[j]);
            }
        }
        u
    }
}

/// `R0(lambda) f` for the free Hamiltonian `h0`.
pub fn r0_apply(h0: &ComplexMatrix, lambda: Complex64, f: &TimeGridFunction) -> Result<TimeGridFunction> {
    Ok(FreeResolvent::new(h0, lambda, f.n_t())?.apply(f))
}

/// `(-i D + H0 - lambda) u` with `D` the centered second-order difference.
pub fn centered_difference_apply(h0: &ComplexMatrix, lambda: Complex64, u: &TimeGridFunction) -> TimeGridFunction {
    let (n, d) = (u.n_t(), u.fiber_dim());
    let inv_2h = n as f64 / 2.0;
    let mut out = TimeGridFunction::zeros(n, d);
    for j in 0..n {
        let next = u.sample((j + 1) % n);
        let prev = u.sample((j + n - 1) % n);
        let hu = h0.mul_vec(u.sample(j));
        for i in 0..d {
            out.values[j * d + i] =
                Complex64::new(0.0, -inv_2h) * (next[i] - prev[i]) + hu[i] - lambda * u.sample(j)[i];
        }
    }
    out
}

/// `(-i D + H0 - lambda) u` with `D` the spectral derivative (Nyquist bin dropped).
pub fn spectral_apply(h0: &ComplexMatrix, lambda: Complex64, u: &TimeGridFunction) -> TimeGridFunction {
    let (n, d) = (u.n_t(), u.fiber_dim());
    let mut planner = FftPlanner::new();
    let (fft, ifft) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    let mut out = TimeGridFunction::zeros(n, d);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..d {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = u.values[j * d + i];
        }
        fft.process(&mut buf);
        for (k, b) in buf.iter_mut().enumerate() {
            let m = if n % 2 == 0 && 2 * k == n {
                0.0
            } else {
                signed_mode(k, n) as f64
            };
            *b *= TAU * m / n as f64;
        }
        ifft.process(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            out.values[j * d + i] = *b;
        }
    }
    for j in 0..n {
        let hu = h0.mul_vec(u.sample(j));
        for i in 0..d {
            out.values[j * d + i] += hu[i] - lambda * u.sample(j)[i];
        }
    }
    out
}

/// Block of `F M F^{-1}` for modes `-n_modes..=n_modes`, where `M` acts on the
/// grid space and `F` takes samples to mode coefficients. Rows and columns are
/// ordered mode-major from `-n_modes`, fiber index minor.
pub fn to_mode_space(m: &ComplexMatrix, n_t: usize, fiber_dim: usize, n_modes: usize) -> ComplexMatrix {
    let d = fiber_dim;
    assert_eq!(m.rows(), n_t * d);
    let nb = 2 * n_modes + 1;
    let modes: Vec<i64> = (-(n_modes as i64)..=n_modes as i64).collect();
    let phase =
        |n: i64, j: usize| Complex64::from_polar(1.0, TAU * (n * j as i64).rem_euclid(n_t as i64) as f64 / n_t as f64);
    // M F^{-1}: columns are M applied to e^{2 pi i m t} e_i.
    let mut right = ComplexMatrix::zeros(n_t * d, nb * d);
    for (bm, &mm) in modes.iter().enumerate() {
        for i2 in 0..d {
            let col = bm * d + i2;
            for r in 0..n_t * d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n_t {
                    acc += m[(r, k * d + i2)] * phase(mm, k);
                }
                right[(r, col)] = acc;
            }
        }
    }
    let mut out = ComplexMatrix::zeros(nb * d, nb * d);
    for (bn, &nn) in modes.iter().enumerate() {
        for i1 in 0..d {
            for col in 0..nb * d {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n_t {
                    acc += phase(nn, j).conj() * right[(j * d + i1, col)];
                }
                out[(bn * d + i1, col)] = acc / n_t as f64;
            }
        }
    }
    out
}

/// Block-diagonal grid operator from per-sample fiber matrices.
pub fn block_diagonal(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let d = blocks.first().map_or(0, ComplexMatrix::rows);
    let mut m = ComplexMatrix::zeros(blocks.len() * d, blocks.len() * d);
    for (j, b) in blocks.iter().enumerate() {
        m.set_block(j * d, j * d, b);
    }
    m
}
