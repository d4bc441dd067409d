//! Fine-grid representation of functions on ℝ^d (d ∈ {1,2}) with spectral
//! transforms, Fourier multipliers and Bessel potentials.
//!
//! The Fourier convention is û(ξ) = ∫ u(x) e^{-ix·ξ} dx. A field lives on the
//! periodic box [-L, L)^d sampled at N points per axis (N a power of two), so
//! the spatial nodes are x_j = -L + jΔx with Δx = 2L/N and the frequency
//! nodes are ξ_m = πm/L for m = -N/2 .. N/2-1. With the quadrature weight
//! Δx^d the cached spectrum approximates û at the frequency nodes, and the
//! discrete Parseval identity
//!
//!   Δx^d Σ|u|² = (Δξ/2π)^d Σ|û|²,  Δξ = π/L
//!
//! holds to rounding error.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Spatial dimension of a field; only 1 and 2 are supported.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::BadParams(format!("dimension {d} not supported"))),
        }
    }
}

/// Reduce a frequency to the fundamental cell [-π, π).
///
/// The reduction subtracts an exact integer multiple of the f64 value of 2π,
/// so inputs that differ by small exact multiples of `TAU` reduce to bitwise
/// identical values.
pub fn reduce_to_q(xi: f64) -> f64 {
    let r = (xi / TAU).round();
    let mut out = xi - r * TAU;
    // Half-open convention: +π maps to -π.
    if out >= std::f64::consts::PI {
        out -= TAU;
    } else if out < -std::f64::consts::PI {
        out += TAU;
    }
    out
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

/// The computational domain: a periodic box [-L, L)^d with N samples per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialWindow {
    dim: Dim,
    half_length: f64,
    samples_per_axis: usize,
}

impl SpatialWindow {
    pub fn new(dim: Dim, half_length: f64, samples_per_axis: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::BadParams(format!(
                "window half-length must be positive, got {half_length}"
            )));
        }
        if samples_per_axis < 16 || !samples_per_axis.is_power_of_two() {
            return Err(Error::BadParams(format!(
                "samples per axis must be a power of two >= 16, got {samples_per_axis}"
            )));
        }
        if dim == Dim::Two && samples_per_axis > 2048 {
            return Err(Error::BadParams(
                "2-d windows are limited to 2048 samples per axis".into(),
            ));
        }
        Ok(SpatialWindow {
            dim,
            half_length,
            samples_per_axis,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn samples_per_axis(&self) -> usize {
        self.samples_per_axis
    }

    /// Total number of stored samples, N^d.
    pub fn len(&self) -> usize {
        match self.dim {
            Dim::One => self.samples_per_axis,
            Dim::Two => self.samples_per_axis * self.samples_per_axis,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing Δx = 2L/N.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.samples_per_axis as f64
    }

    /// Frequency spacing Δξ = π/L.
    pub fn dxi(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }

    /// Largest represented frequency magnitude per axis, πN/(2L).
    pub fn max_xi(&self) -> f64 {
        self.dxi() * (self.samples_per_axis as f64) / 2.0
    }

    /// Spatial node along one axis for storage index j ∈ [0, N).
    pub fn x_node_1d(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    /// Frequency node along one axis for storage index j ∈ [0, N)
    /// (math index m = j - N/2).
    pub fn xi_node_1d(&self, j: usize) -> f64 {
        (j as f64 - self.samples_per_axis as f64 / 2.0) * self.dxi()
    }

    /// Spatial node for a flat index; the second coordinate is 0 in d = 1.
    pub fn x_node(&self, flat: usize) -> [f64; 2] {
        match self.dim {
            Dim::One => [self.x_node_1d(flat), 0.0],
            Dim::Two => {
                let n = self.samples_per_axis;
                [self.x_node_1d(flat / n), self.x_node_1d(flat % n)]
            }
        }
    }

    /// Frequency node for a flat index; the second coordinate is 0 in d = 1.
    pub fn xi_node(&self, flat: usize) -> [f64; 2] {
        match self.dim {
            Dim::One => [self.xi_node_1d(flat), 0.0],
            Dim::Two => {
                let n = self.samples_per_axis;
                [self.xi_node_1d(flat / n), self.xi_node_1d(flat % n)]
            }
        }
    }
}

/// Forward transform of window samples: math-ordered spectrum values
/// approximating û(ξ_m).
///
/// Exact identity used per axis: with x_j = -L + jΔx and ξ_m = πm/L,
/// e^{-i x_j ξ_m} = (-1)^m e^{-2πi jm/N}, so the result is a phase-twisted
/// FFT scaled by Δx^d.
fn forward_math(window: &SpatialWindow, values: &[C64]) -> Vec<C64> {
    let n = window.samples_per_axis;
    let mut buf = values.to_vec();
    match window.dim {
        Dim::One => {
            plan(n, true).process(&mut buf);
            let dx = window.dx();
            let mut out = vec![C64::default(); n];
            for j in 0..n {
                let m = j as i64 - (n / 2) as i64;
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                out[j] = buf[m.rem_euclid(n as i64) as usize] * dx * sign;
            }
            out
        }
        Dim::Two => {
            fft2_in_place(&mut buf, n, true);
            let scale = window.dx() * window.dx();
            let mut out = vec![C64::default(); n * n];
            for j1 in 0..n {
                let m1 = j1 as i64 - (n / 2) as i64;
                for j2 in 0..n {
                    let m2 = j2 as i64 - (n / 2) as i64;
                    let sign = if (m1 + m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let src = m1.rem_euclid(n as i64) as usize * n
                        + m2.rem_euclid(n as i64) as usize;
                    out[j1 * n + j2] = buf[src] * scale * sign;
                }
            }
            out
        }
    }
}

/// Inverse of [`forward_math`]: recovers window samples from a math-ordered
/// spectrum.
fn inverse_math(window: &SpatialWindow, spectrum: &[C64]) -> Vec<C64> {
    let n = window.samples_per_axis;
    let inv_scale = 1.0 / (n as f64 * window.dx());
    match window.dim {
        Dim::One => {
            let mut buf = vec![C64::default(); n];
            for j in 0..n {
                let m = j as i64 - (n / 2) as i64;
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[m.rem_euclid(n as i64) as usize] = spectrum[j] * sign * inv_scale;
            }
            plan(n, false).process(&mut buf);
            buf
        }
        Dim::Two => {
            let mut buf = vec![C64::default(); n * n];
            for j1 in 0..n {
                let m1 = j1 as i64 - (n / 2) as i64;
                for j2 in 0..n {
                    let m2 = j2 as i64 - (n / 2) as i64;
                    let sign = if (m1 + m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let dst = m1.rem_euclid(n as i64) as usize * n
                        + m2.rem_euclid(n as i64) as usize;
                    buf[dst] = spectrum[j1 * n + j2] * sign * inv_scale * inv_scale;
                }
            }
            fft2_in_place(&mut buf, n, false);
            buf
        }
    }
}

fn fft2_in_place(data: &mut [C64], n: usize, forward: bool) {
    let fft = plan(n, forward);
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose_square(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose_square(data, n);
}

fn transpose_square(data: &mut [C64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// A complex function sampled on a [`SpatialWindow`], with a lazily cached
/// spectrum. Fields are immutable after construction; transformations return
/// new fields, so the cache can never go stale.
#[derive(Clone, Debug)]
pub struct ContinuousField {
    window: SpatialWindow,
    values: Vec<C64>,
    spectrum: OnceLock<Vec<C64>>,
}

impl ContinuousField {
    pub fn from_values(window: SpatialWindow, values: Vec<C64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::BadParams(format!(
                "value count {} does not match window size {}",
                values.len(),
                window.len()
            )));
        }
        Ok(ContinuousField {
            window,
            values,
            spectrum: OnceLock::new(),
        })
    }

    pub fn zero(window: SpatialWindow) -> Self {
        ContinuousField {
            values: vec![C64::default(); window.len()],
            window,
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_fn_1d(window: SpatialWindow, mut f: impl FnMut(f64) -> C64) -> Result<Self> {
        if window.dim() != Dim::One {
            return Err(Error::BadParams("from_fn_1d needs a 1-d window".into()));
        }
        let values = (0..window.len()).map(|j| f(window.x_node_1d(j))).collect();
        Self::from_values(window, values)
    }

    pub fn from_fn_2d(window: SpatialWindow, mut f: impl FnMut(f64, f64) -> C64) -> Result<Self> {
        if window.dim() != Dim::Two {
            return Err(Error::BadParams("from_fn_2d needs a 2-d window".into()));
        }
        let n = window.samples_per_axis();
        let mut values = Vec::with_capacity(window.len());
        for j1 in 0..n {
            for j2 in 0..n {
                values.push(f(window.x_node_1d(j1), window.x_node_1d(j2)));
            }
        }
        Self::from_values(window, values)
    }

    /// Build a field directly from math-ordered spectrum values û(ξ_m);
    /// the spatial samples are synthesized immediately and the spectrum cache
    /// is pre-populated.
    pub fn from_spectrum(window: SpatialWindow, spectrum: Vec<C64>) -> Result<Self> {
        if spectrum.len() != window.len() {
            return Err(Error::BadParams(format!(
                "spectrum count {} does not match window size {}",
                spectrum.len(),
                window.len()
            )));
        }
        let values = inverse_math(&window, &spectrum);
        let cache = OnceLock::new();
        let _ = cache.set(spectrum);
        Ok(ContinuousField {
            window,
            values,
            spectrum: cache,
        })
    }

    /// Build a field by evaluating a closed-form transform at the frequency
    /// nodes (1-d).
    pub fn from_spectrum_fn_1d(window: SpatialWindow, mut f: impl FnMut(f64) -> C64) -> Result<Self> {
        if window.dim() != Dim::One {
            return Err(Error::BadParams("from_spectrum_fn_1d needs a 1-d window".into()));
        }
        let spec = (0..window.len()).map(|j| f(window.xi_node_1d(j))).collect();
        Self::from_spectrum(window, spec)
    }

    pub fn window(&self) -> &SpatialWindow {
        &self.window
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// The forward transform under the e^{-ix·ξ} convention, computed once and
    /// cached. Concurrent readers see one consistent spectrum.
    pub fn spectrum(&self) -> &[C64] {
        self.spectrum
            .get_or_init(|| forward_math(&self.window, &self.values))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let w = self.window.dx().powi(self.window.dim().as_usize() as i32);
        w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// L² inner product ⟨f, g⟩ = ∫ f ḡ dx by grid quadrature.
    pub fn inner(&self, other: &ContinuousField) -> Result<C64> {
        if self.window != other.window {
            return Err(Error::BadParams("inner product needs matching windows".into()));
        }
        let w = self.window.dx().powi(self.window.dim().as_usize() as i32);
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            * w)
    }

    /// Fraction of the squared norm carried by samples with |x|_∞ > L/2.
    pub fn mass_fraction_outside_half_window(&self) -> f64 {
        let total = self.values.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if total == 0.0 {
            return 0.0;
        }
        let half = self.window.half_length() / 2.0;
        let mut outside = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let x = self.window.x_node(flat);
            let linf = match self.window.dim() {
                Dim::One => x[0].abs(),
                Dim::Two => x[0].abs().max(x[1].abs()),
            };
            if linf > half {
                outside += v.norm_sqr();
            }
        }
        outside / total
    }

    /// Fraction of the squared spectral mass carried by frequency nodes with
    /// |ξ|_∞ above `cut` times the window's maximal frequency.
    pub fn spectral_mass_fraction_beyond(&self, cut: f64) -> f64 {
        let spec = self.spectrum();
        let total = spec.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if total == 0.0 {
            return 0.0;
        }
        let limit = cut * self.window.max_xi();
        let mut outside = 0.0;
        for (flat, v) in spec.iter().enumerate() {
            let xi = self.window.xi_node(flat);
            let linf = match self.window.dim() {
                Dim::One => xi[0].abs(),
                Dim::Two => xi[0].abs().max(xi[1].abs()),
            };
            if linf > limit {
                outside += v.norm_sqr();
            }
        }
        outside / total
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point (1-d).
    /// On grid nodes this reproduces the stored sample to rounding error.
    pub fn eval_1d(&self, x: f64) -> Result<C64> {
        if self.window.dim() != Dim::One {
            return Err(Error::BadParams("eval_1d needs a 1-d window".into()));
        }
        let dx = self.window.dx();
        let rel = (x + self.window.half_length()) / dx;
        let j = rel.round();
        if (rel - j).abs() < 1e-12 && j >= 0.0 && (j as usize) < self.window.len() {
            return Ok(self.values[j as usize]);
        }
        let spec = self.spectrum();
        let scale = self.window.dxi() / TAU;
        let mut acc = C64::default();
        for (idx, s) in spec.iter().enumerate() {
            let xi = self.window.xi_node_1d(idx);
            acc += s * C64::new(0.0, x * xi).exp();
        }
        Ok(acc * scale)
    }
}

/// Apply the Fourier multiplier with symbol χ(εξ): the returned field's
/// spectrum is χ(εξ_m)·û(ξ_m). Multipliers commute exactly since this is a
/// pointwise product of symbols.
pub fn fourier_multiplier(
    f: &ContinuousField,
    symbol: impl Fn(&[f64]) -> C64,
    eps: f64,
) -> Result<ContinuousField> {
    if !(eps > 0.0) {
        return Err(Error::BadParams(format!("multiplier scale must be positive, got {eps}")));
    }
    let window = *f.window();
    let d = window.dim().as_usize();
    let spec = f.spectrum();
    let mut out = Vec::with_capacity(spec.len());
    for (flat, s) in spec.iter().enumerate() {
        let xi = window.xi_node(flat);
        let scaled = [eps * xi[0], eps * xi[1]];
        out.push(symbol(&scaled[..d]) * s);
    }
    ContinuousField::from_spectrum(window, out)
}

/// Bessel weight ⟨ξ⟩^s = (1 + |ξ|²)^{s/2}.
pub fn bessel_weight(xi: &[f64], s: f64) -> f64 {
    let norm_sq: f64 = xi.iter().map(|t| t * t).sum();
    (1.0 + norm_sq).powf(s / 2.0)
}

/// Apply the Bessel potential ⟨εD⟩^s: spectrum multiplied by ⟨εξ⟩^s.
/// `bessel_multiplier(·, -s, ε)` inverts `bessel_multiplier(·, s, ε)`.
pub fn bessel_multiplier(f: &ContinuousField, s: f64, eps: f64) -> Result<ContinuousField> {
    fourier_multiplier(f, |xi| C64::new(bessel_weight(xi, s), 0.0), eps)
}

/// A square-summable function on the grid hZ^d with a finite index window.
#[derive(Clone, Debug)]
pub struct DiscreteField {
    step: f64,
    dim: Dim,
    n_min: [i64; 2],
    shape: [usize; 2],
    values: Vec<C64>,
}

impl DiscreteField {
    pub fn new(step: f64, dim: Dim, n_min: [i64; 2], shape: [usize; 2], values: Vec<C64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::BadParams(format!("grid step must be positive, got {step}")));
        }
        let expect = match dim {
            Dim::One => shape[0],
            Dim::Two => shape[0] * shape[1],
        };
        if values.len() != expect {
            return Err(Error::BadParams(format!(
                "value count {} does not match index window {:?}",
                values.len(),
                shape
            )));
        }
        Ok(DiscreteField {
            step,
            dim,
            n_min,
            shape,
            values,
        })
    }

    pub fn zeros_1d(step: f64, n_min: i64, len: usize) -> Result<Self> {
        Self::new(step, Dim::One, [n_min, 0], [len, 1], vec![C64::default(); len])
    }

    pub fn from_fn_1d(step: f64, n_min: i64, len: usize, mut f: impl FnMut(i64) -> C64) -> Result<Self> {
        let values = (0..len).map(|i| f(n_min + i as i64)).collect();
        Self::new(step, Dim::One, [n_min, 0], [len, 1], values)
    }

    pub fn from_fn_2d(
        step: f64,
        n_min: [i64; 2],
        shape: [usize; 2],
        mut f: impl FnMut(i64, i64) -> C64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(shape[0] * shape[1]);
        for i0 in 0..shape[0] {
            for i1 in 0..shape[1] {
                values.push(f(n_min[0] + i0 as i64, n_min[1] + i1 as i64));
            }
        }
        Self::new(step, Dim::Two, n_min, shape, values)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n_min(&self) -> [i64; 2] {
        self.n_min
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Multi-index of a flat storage position.
    pub fn index_of(&self, flat: usize) -> [i64; 2] {
        match self.dim {
            Dim::One => [self.n_min[0] + flat as i64, 0],
            Dim::Two => [
                self.n_min[0] + (flat / self.shape[1]) as i64,
                self.n_min[1] + (flat % self.shape[1]) as i64,
            ],
        }
    }

    /// ‖U‖_h = (h^d Σ|U_n|²)^{1/2}.
    pub fn norm_h(&self) -> f64 {
        let w = self.step.powi(self.dim.as_usize() as i32);
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn inner_h(&self, other: &DiscreteField) -> Result<C64> {
        if self.dim != other.dim || self.n_min != other.n_min || self.shape != other.shape {
            return Err(Error::BadParams("inner product needs matching index windows".into()));
        }
        let w = self.step.powi(self.dim.as_usize() as i32);
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            * w)
    }

    /// Discrete Fourier transform Û(ξ) = Σ U_n e^{-in·ξ}, evaluated through
    /// the reduced phase so the result is exactly 2πZ^d-periodic.
    pub fn dft_at(&self, xi: &[f64]) -> C64 {
        let d = self.dim.as_usize();
        debug_assert_eq!(xi.len(), d);
        let red: Vec<f64> = xi.iter().map(|&t| reduce_to_q(t)).collect();
        let mut acc = C64::default();
        for (flat, v) in self.values.iter().enumerate() {
            let n = self.index_of(flat);
            let phase: f64 = (0..d).map(|a| n[a] as f64 * red[a]).sum();
            acc += v * C64::new(0.0, -phase).exp();
        }
        acc
    }

    /// Values of Û on the uniform frequency grid η_r = 2πr/M per axis,
    /// r = -M/2 .. M/2-1 (math order). Computed exactly by folding the index
    /// window modulo M and taking an FFT, since e^{-in·η_r} only depends on
    /// n mod M.
    pub fn dft_on_grid(&self, m: usize) -> Vec<C64> {
        match self.dim {
            Dim::One => {
                let mut folded = vec![C64::default(); m];
                for (flat, v) in self.values.iter().enumerate() {
                    let n = self.n_min[0] + flat as i64;
                    folded[n.rem_euclid(m as i64) as usize] += v;
                }
                plan(m, true).process(&mut folded);
                // FFT bin r holds Û(2πr/M); reorder to math order.
                (0..m)
                    .map(|j| {
                        let r = j as i64 - (m / 2) as i64;
                        folded[r.rem_euclid(m as i64) as usize]
                    })
                    .collect()
            }
            Dim::Two => {
                let mut folded = vec![C64::default(); m * m];
                for (flat, v) in self.values.iter().enumerate() {
                    let n = self.index_of(flat);
                    let r0 = n[0].rem_euclid(m as i64) as usize;
                    let r1 = n[1].rem_euclid(m as i64) as usize;
                    folded[r0 * m + r1] += v;
                }
                fft2_in_place(&mut folded, m, true);
                let mut out = vec![C64::default(); m * m];
                for j0 in 0..m {
                    let r0 = (j0 as i64 - (m / 2) as i64).rem_euclid(m as i64) as usize;
                    for j1 in 0..m {
                        let r1 = (j1 as i64 - (m / 2) as i64).rem_euclid(m as i64) as usize;
                        out[j0 * m + j1] = folded[r0 * m + r1];
                    }
                }
                out
            }
        }
    }

    /// h^d Σ φ(hn)|U_n|² for a spatial window function φ.
    pub fn weighted_energy(&self, phi: impl Fn(&[f64]) -> f64) -> f64 {
        let d = self.dim.as_usize();
        let w = self.step.powi(d as i32);
        let mut acc = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let n = self.index_of(flat);
            let x = [self.step * n[0] as f64, self.step * n[1] as f64];
            acc += phi(&x[..d]) * v.norm_sqr();
        }
        w * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian_field(l: f64, n: usize) -> ContinuousField {
        let w = SpatialWindow::new(Dim::One, l, n).unwrap();
        ContinuousField::from_fn_1d(w, |x| C64::new((-x * x / 2.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn zero_field_has_zero_spectrum() {
        let w = SpatialWindow::new(Dim::One, 10.0, 64).unwrap();
        let f = ContinuousField::zero(w);
        assert!(f.spectrum().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // u(x) = e^{-x²/2} has û(ξ) = √(2π) e^{-ξ²/2}.
        let f = gaussian_field(20.0, 1024);
        let spec = f.spectrum();
        let mut max_err: f64 = 0.0;
        for j in 0..1024 {
            let xi = f.window().xi_node_1d(j);
            let exact = (2.0 * std::f64::consts::PI).sqrt() * (-xi * xi / 2.0).exp();
            max_err = max_err.max((spec[j] - C64::new(exact, 0.0)).norm());
        }
        assert!(max_err < 1e-10, "max abs error {max_err}");
    }

    #[test]
    fn indicator_transform_matches_quadrature_at_low_frequency() {
        // Discontinuous integrand: expect only O(Δx) agreement with the
        // closed form sin(ξ/2)/(ξ/2).
        let w = SpatialWindow::new(Dim::One, 10.0, 2048).unwrap();
        let f = ContinuousField::from_fn_1d(w, |x| {
            if (-0.5..0.5).contains(&x) {
                C64::new(1.0, 0.0)
            } else {
                C64::default()
            }
        })
        .unwrap();
        let spec = f.spectrum();
        let dx = w.dx();
        for j in 0..2048 {
            let xi = w.xi_node_1d(j);
            if xi.abs() > std::f64::consts::PI || xi.abs() < 1e-9 {
                continue;
            }
            let exact = (xi / 2.0).sin() / (xi / 2.0);
            let err = (spec[j] - C64::new(exact, 0.0)).norm();
            assert!(err < 10.0 * dx, "err {err} at xi={xi}");
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let f = gaussian_field(16.0, 512);
        let back = ContinuousField::from_spectrum(*f.window(), f.spectrum().to_vec()).unwrap();
        let mut max_rel: f64 = 0.0;
        for (a, b) in f.values().iter().zip(back.values()) {
            max_rel = max_rel.max((a - b).norm());
        }
        assert!(max_rel / f.l2_norm() < 1e-12);
    }

    #[test]
    fn parseval_identity_holds() {
        let f = gaussian_field(18.0, 512);
        let spatial = f.l2_norm_sq();
        let w = f.window();
        let spec_side = w.dxi() / TAU * f.spectrum().iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((spatial - spec_side).abs() / spatial < 1e-10);
    }

    #[test]
    fn real_even_field_has_real_spectrum() {
        let w = SpatialWindow::new(Dim::One, 12.0, 256).unwrap();
        let f = ContinuousField::from_fn_1d(w, |x| C64::new((-x * x).exp() * (1.0 + x * x), 0.0))
            .unwrap();
        for s in f.spectrum() {
            assert!(s.im.abs() < 1e-10);
        }
    }

    #[test]
    fn multiplier_identity_symbol_is_identity() {
        let f = gaussian_field(16.0, 256);
        let g = fourier_multiplier(&f, |_| C64::new(1.0, 0.0), 0.7).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn band_projection_acts_as_identity_on_band_limited_input() {
        let w = SpatialWindow::new(Dim::One, 16.0, 512).unwrap();
        // Band-limited to [-π, π) by construction in the spectrum.
        let f = ContinuousField::from_spectrum_fn_1d(w, |xi| {
            if (-std::f64::consts::PI..std::f64::consts::PI).contains(&xi) {
                C64::new((-xi * xi).exp(), 0.0)
            } else {
                C64::default()
            }
        })
        .unwrap();
        let g = fourier_multiplier(
            &f,
            |xi| {
                if (-std::f64::consts::PI..std::f64::consts::PI).contains(&xi[0]) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::default()
                }
            },
            1.0,
        )
        .unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bessel_multiplier_matches_quadrature_oracle() {
        // ⟨ξ⟩^{-1} multiplier against direct quadrature of the inversion
        // integral ∫⟨ξ⟩^{-1}û(ξ)e^{ixξ}dξ/2π.
        let f = gaussian_field(20.0, 1024);
        let g = bessel_multiplier(&f, -1.0, 1.0).unwrap();
        let w = f.window();
        let spec = f.spectrum();
        for &probe in &[0usize, 350, 512, 700, 1023] {
            let x = w.x_node_1d(probe);
            let mut acc = C64::default();
            for j in 0..w.len() {
                let xi = w.xi_node_1d(j);
                acc += spec[j] * (1.0 + xi * xi).powf(-0.5) * C64::new(0.0, x * xi).exp();
            }
            acc *= w.dxi() / TAU;
            assert!((acc - g.values()[probe]).norm() < 1e-8);
        }
    }

    #[test]
    fn bessel_multiplier_inverts() {
        let f = gaussian_field(16.0, 256);
        let g = bessel_multiplier(&bessel_multiplier(&f, 1.7, 0.5).unwrap(), -1.7, 0.5).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn bessel_multiplier_s2_matches_one_minus_laplacian() {
        // ⟨D⟩² u = u - Δu via the spectral Laplacian.
        let f = gaussian_field(20.0, 1024);
        let g = bessel_multiplier(&f, 2.0, 1.0).unwrap();
        let lap = fourier_multiplier(&f, |xi| C64::new(-(xi[0] * xi[0]), 0.0), 1.0).unwrap();
        for i in 0..f.values().len() {
            let expect = f.values()[i] - lap.values()[i];
            assert!((g.values()[i] - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn bessel_smoothing_contracts_for_positive_s() {
        let f = gaussian_field(16.0, 256);
        let g = bessel_multiplier(&f, -1.3, 1.0).unwrap();
        assert!(g.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn dft_unit_mass_is_constant_one() {
        let u = DiscreteField::from_fn_1d(0.5, 0, 1, |_| C64::new(1.0, 0.0)).unwrap();
        for &xi in &[0.0, 0.3, -2.0, 17.5] {
            assert!((u.dft_at(&[xi]) - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dft_single_shifted_mass_phase() {
        let u = DiscreteField::from_fn_1d(1.0, 1, 1, |_| C64::new(1.0, 0.0)).unwrap();
        let v = u.dft_at(&[std::f64::consts::PI]);
        assert!((v - C64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dft_periodicity_is_exact() {
        let u = DiscreteField::from_fn_1d(0.25, -3, 8, |n| {
            C64::new((n as f64 * 0.37).sin(), (n as f64 * 0.11).cos())
        })
        .unwrap();
        for j in 0..64 {
            let xi = -3.0 + j as f64 * (6.0 / 64.0);
            let a = u.dft_at(&[xi]);
            let b = u.dft_at(&[xi + TAU]);
            let c = u.dft_at(&[xi - 2.0 * TAU]);
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn discrete_parseval_by_quadrature() {
        let h = 0.3;
        let u = DiscreteField::from_fn_1d(h, -4, 8, |n| {
            C64::new((n as f64).cos(), (1.3 * n as f64).sin())
        })
        .unwrap();
        // h Σ|U_n|² = (h/2π) ∫_Q |Û|² dξ by trapezoid quadrature.
        let quad_points = 4096;
        let mut integral = 0.0;
        for j in 0..quad_points {
            let xi = -std::f64::consts::PI + TAU * j as f64 / quad_points as f64;
            integral += u.dft_at(&[xi]).norm_sqr();
        }
        integral *= TAU / quad_points as f64;
        let lhs = u.norm_h().powi(2);
        let rhs = h / TAU * integral;
        assert!((lhs - rhs).abs() < 1e-8, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn dft_on_grid_matches_direct_evaluation() {
        let u = DiscreteField::from_fn_1d(0.5, -7, 23, |n| {
            C64::new((0.3 * n as f64).sin(), 0.1 * n as f64)
        })
        .unwrap();
        let m = 64;
        let grid = u.dft_on_grid(m);
        for j in 0..m {
            let eta = (j as f64 - m as f64 / 2.0) * TAU / m as f64;
            assert!((grid[j] - u.dft_at(&[eta])).norm() < 1e-9);
        }
    }

    #[test]
    fn two_d_round_trip_and_gaussian_transform() {
        let w = SpatialWindow::new(Dim::Two, 10.0, 64).unwrap();
        let f = ContinuousField::from_fn_2d(w, |x, y| {
            C64::new((-(x * x + y * y) / 2.0).exp(), 0.0)
        })
        .unwrap();
        let spec = f.spectrum();
        // û(ξ) = 2π e^{-|ξ|²/2} in two dimensions.
        let mut max_err: f64 = 0.0;
        for flat in 0..w.len() {
            let xi = w.xi_node(flat);
            let exact = TAU * (-(xi[0] * xi[0] + xi[1] * xi[1]) / 2.0).exp();
            max_err = max_err.max((spec[flat] - C64::new(exact, 0.0)).norm());
        }
        assert!(max_err < 1e-9, "max err {max_err}");
        let back = ContinuousField::from_spectrum(w, spec.to_vec()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    proptest! {
        #[test]
        fn multipliers_commute(seed in 0u64..500) {
            let w = SpatialWindow::new(Dim::One, 8.0, 64).unwrap();
            let f = ContinuousField::from_fn_1d(w, |x| {
                C64::new((-x * x / 2.0).exp() * (seed as f64 * 0.01 + x).cos(), 0.0)
            }).unwrap();
            let chi1 = |xi: &[f64]| C64::new((-xi[0] * xi[0]).exp(), 0.0);
            let chi2 = |xi: &[f64]| C64::new(1.0 / (1.0 + xi[0] * xi[0]), 0.0);
            let a = fourier_multiplier(&fourier_multiplier(&f, chi1, 0.5).unwrap(), chi2, 0.5).unwrap();
            let b = fourier_multiplier(&fourier_multiplier(&f, chi2, 0.5).unwrap(), chi1, 0.5).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn round_trip_random_fields(seed in 0u64..200) {
            let w = SpatialWindow::new(Dim::One, 6.0, 128).unwrap();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state as f64 / u64::MAX as f64) - 0.5
            };
            let values: Vec<C64> = (0..128).map(|_| C64::new(next(), next())).collect();
            let f = ContinuousField::from_values(w, values).unwrap();
            let back = ContinuousField::from_spectrum(w, f.spectrum().to_vec()).unwrap();
            let norm = f.l2_norm().max(1e-30);
            for (a, b) in f.values().iter().zip(back.values()) {
                prop_assert!((a - b).norm() / norm < 1e-12);
            }
        }
    }
}
