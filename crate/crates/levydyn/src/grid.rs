//! Periodic pseudo-spectral grids and wave fields.
//!
//! The 1D grid covers [-L, L) with n points; its dual lattice has spacing
//! pi/L. Fourier transforms use the unitary convention with a 1/sqrt(2 pi)
//! prefactor. The radial grid supports spherically symmetric 3D fields via a
//! sine-transform of r * psi(r), which makes the discrete transform an exact
//! involution.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use thiserror::Error;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid size {0} must be a power of two >= 64")]
    BadSize(usize),
    #[error("grid half-length must be positive, got {0}")]
    BadLength(f64),
    #[error("field has {got} samples but grid expects {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("radial grid size {0} must be >= 64")]
    BadRadialSize(usize),
    #[error("grids differ between operands")]
    GridMismatch,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unscaled forward DFT in place.
pub(crate) fn fft_forward(data: &mut [Complex64]) {
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(data.len());
        fft.process(data);
    });
}

/// Inverse DFT in place, scaled by 1/n so that it inverts `fft_forward`.
pub(crate) fn fft_inverse(data: &mut [Complex64]) {
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_inverse(data.len());
        fft.process(data);
    });
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Uniform periodic grid on [-L, L) with a power-of-two number of nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    half_length: f64,
}

impl Grid1D {
    pub fn new(n: usize, half_length: f64) -> Result<Self, GridError> {
        if n < 64 || !n.is_power_of_two() {
            return Err(GridError::BadSize(n));
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(GridError::BadLength(half_length));
        }
        Ok(Grid1D { n, half_length })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    /// Dual lattice spacing pi / L.
    pub fn dp(&self) -> f64 {
        PI / self.half_length
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    /// Signed angular frequency of FFT bin j.
    pub fn frequency(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        };
        m as f64 * self.dp()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.frequency(j))
    }

    /// Largest resolved angular frequency pi / dx.
    pub fn nyquist(&self) -> f64 {
        PI / self.dx()
    }
}

/// Complex field sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                want: grid.len(),
            });
        }
        Ok(WaveField { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: Grid1D, mut f: F) -> Self {
        let values = grid.nodes().map(&mut f).collect();
        WaveField { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        WaveField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Squared L2 norm, dx * sum |psi_j|^2.
    pub fn norm_sq(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            for v in &mut self.values {
                *v /= n;
            }
        }
        self
    }

    pub fn l_inf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn l_inf_diff(&self, other: &WaveField) -> Result<f64, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Unitary-convention Fourier coefficients on the dual lattice.
    pub fn spectrum(&self) -> SpectralField {
        let mut data = self.values.clone();
        fft_forward(&mut data);
        let scale = self.grid.dx() / SQRT_2PI;
        for (j, v) in data.iter_mut().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *v *= scale * sign;
        }
        SpectralField {
            grid: self.grid,
            values: data,
        }
    }

    /// Apply a Fourier multiplier p -> m(p).
    pub fn apply_multiplier<F: FnMut(f64) -> Complex64>(&self, mut m: F) -> WaveField {
        let mut data = self.values.clone();
        fft_forward(&mut data);
        for (j, v) in data.iter_mut().enumerate() {
            *v *= m(self.grid.frequency(j));
        }
        fft_inverse(&mut data);
        WaveField {
            grid: self.grid,
            values: data,
        }
    }

    /// Fraction of peak spectral amplitude sitting in the outer eighth of the
    /// dual lattice; large values mean the field is not resolved.
    pub fn spectral_tail_fraction(&self) -> f64 {
        let spec = self.spectrum();
        let cutoff = 0.875 * self.grid.nyquist();
        let mut peak = 0.0f64;
        let mut tail = 0.0f64;
        for (j, v) in spec.values.iter().enumerate() {
            let a = v.norm();
            peak = peak.max(a);
            if self.grid.frequency(j).abs() >= cutoff {
                tail = tail.max(a);
            }
        }
        if peak > 0.0 {
            tail / peak
        } else {
            0.0
        }
    }

    /// Band-limited interpolation onto a grid refined by `factor` (power of two).
    pub fn refined(&self, factor: usize) -> WaveField {
        assert!(factor.is_power_of_two());
        if factor == 1 {
            return self.clone();
        }
        let n = self.grid.len();
        let n2 = n * factor;
        let mut spec = self.values.clone();
        fft_forward(&mut spec);
        let mut big = vec![Complex64::new(0.0, 0.0); n2];
        let scale = factor as f64;
        for (j, v) in spec.iter().enumerate() {
            let m = if j < n / 2 {
                j
            } else {
                n2 - (n - j)
            };
            big[m] = v * scale;
        }
        fft_inverse(&mut big);
        WaveField {
            grid: Grid1D {
                n: n2,
                half_length: self.grid.half_length,
            },
            values: big,
        }
    }
}

/// Fourier coefficients of a [`WaveField`] in FFT bin order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                want: grid.len(),
            });
        }
        Ok(SpectralField { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: Grid1D, mut f: F) -> Self {
        let values = grid.frequencies().map(&mut f).collect();
        SpectralField { grid, values }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Squared L2 norm, dp * sum |psihat|^2 (Parseval-dual of the field norm).
    pub fn norm_sq(&self) -> f64 {
        self.grid.dp() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn to_field(&self) -> WaveField {
        let mut data = self.values.clone();
        let scale = SQRT_2PI / self.grid.dx();
        for (j, v) in data.iter_mut().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *v *= scale * sign;
        }
        fft_inverse(&mut data);
        WaveField {
            grid: self.grid,
            values: data,
        }
    }
}

/// Radial grid for spherically symmetric 3D fields: nodes r_j = (j+1) dr on
/// (0, R), dual nodes k_m = (m+1) pi / R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid3D {
    n: usize,
    rmax: f64,
}

impl RadialGrid3D {
    pub fn new(n: usize, rmax: f64) -> Result<Self, GridError> {
        if n < 64 {
            return Err(GridError::BadRadialSize(n));
        }
        if !(rmax > 0.0) || !rmax.is_finite() {
            return Err(GridError::BadLength(rmax));
        }
        Ok(RadialGrid3D { n, rmax })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    pub fn dr(&self) -> f64 {
        self.rmax / (self.n + 1) as f64
    }

    pub fn dk(&self) -> f64 {
        PI / self.rmax
    }

    pub fn node(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dr()
    }

    pub fn dual_node(&self, m: usize) -> f64 {
        (m + 1) as f64 * self.dk()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    pub fn dual_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|m| self.dual_node(m))
    }
}

/// DST-I of a complex sequence: out_k = sum_j in_j sin(pi (j+1)(k+1)/(n+1)).
fn dst_i(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let m = 2 * (n + 1);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (j, v) in values.iter().enumerate() {
        buf[j + 1] = *v;
        buf[m - 1 - j] = -*v;
    }
    fft_forward(&mut buf);
    (0..n)
        .map(|k| Complex64::new(0.0, 0.5) * buf[k + 1])
        .collect()
}

/// Spherically symmetric complex field psi(r) on a [`RadialGrid3D`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid3D,
    values: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid3D, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                want: grid.len(),
            });
        }
        Ok(RadialField { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: RadialGrid3D, mut f: F) -> Self {
        let values = grid.nodes().map(&mut f).collect();
        RadialField { grid, values }
    }

    pub fn grid(&self) -> RadialGrid3D {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Squared L2 norm with the 3D radial weight, 4 pi dr * sum r^2 |psi|^2.
    pub fn norm_sq(&self) -> f64 {
        4.0 * PI
            * self.grid.dr()
            * self
                .values
                .iter()
                .zip(self.grid.nodes())
                .map(|(v, r)| r * r * v.norm_sqr())
                .sum::<f64>()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            for v in &mut self.values {
                *v /= n;
            }
        }
        self
    }

    pub fn l_inf_diff(&self, other: &RadialField) -> Result<f64, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Radial (spherically symmetric 3D) Fourier transform,
    /// psihat(k) = sqrt(2/pi) (1/k) ∫ r psi(r) sin(kr) dr.
    /// The same map inverts itself on the dual grid.
    pub fn fourier(&self) -> RadialField {
        let weighted: Vec<Complex64> = self
            .values
            .iter()
            .zip(self.grid.nodes())
            .map(|(v, r)| v * r)
            .collect();
        let sine = dst_i(&weighted);
        let pref = (2.0 / PI).sqrt() * self.grid.dr();
        let values = sine
            .into_iter()
            .zip(self.grid.dual_nodes())
            .map(|(s, k)| s * pref / k)
            .collect();
        RadialField {
            grid: RadialGrid3D {
                n: self.grid.n,
                rmax: self.grid.rmax,
            },
            values,
        }
    }

    /// Inverse of [`RadialField::fourier`] (exact on the grid).
    pub fn inverse_fourier(&self) -> RadialField {
        // dual spacing: dk = pi / rmax plays the role of dr
        let dk = self.grid.dk();
        let weighted: Vec<Complex64> = self
            .values
            .iter()
            .zip(self.grid.dual_nodes())
            .map(|(v, k)| v * k)
            .collect();
        let sine = dst_i(&weighted);
        let pref = (2.0 / PI).sqrt() * dk;
        let values = sine
            .into_iter()
            .zip(self.grid.nodes())
            .map(|(s, r)| s * pref / r)
            .collect();
        RadialField {
            grid: self.grid,
            values,
        }
    }

    /// Apply a radial Fourier multiplier k -> m(k).
    pub fn apply_multiplier<F: FnMut(f64) -> Complex64>(&self, mut m: F) -> RadialField {
        let mut spec = self.fourier();
        for (v, k) in spec.values.iter_mut().zip(self.grid.dual_nodes()) {
            *v *= m(k);
        }
        spec.inverse_fourier()
    }
}
