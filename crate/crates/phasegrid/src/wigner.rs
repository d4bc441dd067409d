//! Phase-space transforms and pairings.
//!
//! The continuous phase-space density of a field u at scale ε is
//!
//!   m^ε[u](x,ξ) = (2πε)^{-d} ū(x) û(ξ/ε) e^{ix·ξ/ε},
//!
//! whose pairing against a separable test function φ(x)⊗χ(ξ) collapses to a
//! multiplier sandwich ∫ ū φ (χ(εD)u) dx — two transforms per term. Its
//! discrete analogue for U on hZ^d is
//!
//!   ⟨M^ε[U], φ⊗χ⟩ = h^d Σ_m Ū_m φ(hm) V_m,
//!   V_m = (2π)^{-d} ∫ Û(η) χ(εη/h) e^{im·η} dη,
//!
//! integrated over enough 2π-cells to exhaust the localization of χ. Since
//! e^{im·η} and Û are 2π-periodic, the folds collapse onto one cell and V is
//! a single inverse FFT; at matched scales (h = ε) the pairing is exactly
//! 2π-periodic in the ξ argument of the test function.
//!
//! The Wigner transform w^ε[u](x,ξ) = ∫ u(x-εp/2) ū(x+εp/2) e^{ip·ξ} dp/(2π)^d
//! is real-valued and carries the marginal identities ∫w dξ = |u|²,
//! ∫w dx = |û(ξ/ε)|²/(2πε)^d; the lattice-periodized series folds its ξ axis
//! onto [-π, π).

use std::f64::consts::{PI, TAU};

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{fourier_multiplier, ContinuousField, Dim, DiscreteField, SpatialWindow, C64};
use crate::profiles::{sigma_tail, Profile};
use crate::testfn::{AxisProduct, TestFunction};

/// Largest admissible step/scale ratio in discrete pairings; beyond it the
/// transforms need not stay bounded.
pub const MAX_STEP_SCALE_RATIO: f64 = 4.0;

/// Pairing ⟨m^ε[u], a⟩ for a separable test function.
pub fn pair_continuous(u: &ContinuousField, eps: f64, a: &TestFunction) -> Result<C64> {
    if !(eps > 0.0) {
        return Err(Error::BadParams(format!("scale must be positive, got {eps}")));
    }
    let window = u.window();
    let d = window.dim().as_usize();
    if a.dim() != d {
        return Err(Error::BadParams("test function dimension mismatch".into()));
    }
    let weight = window.dx().powi(d as i32);
    let mut total = C64::default();
    for term in &a.terms {
        let chi = term.xi.clone();
        let filtered = fourier_multiplier(u, |xi| C64::new(chi.eval(xi), 0.0), eps)?;
        let mut acc = C64::default();
        for (flat, v) in filtered.values().iter().enumerate() {
            let x = window.x_node(flat);
            acc += u.values()[flat].conj() * term.x.eval(&x[..d]) * v;
        }
        total += acc * weight;
    }
    Ok(total)
}

/// Pairing ⟨M^ε[U], a⟩ for a discrete field at step h and scale ε.
pub fn pair_discrete(u: &DiscreteField, eps: f64, a: &TestFunction) -> Result<C64> {
    let h = u.step();
    if !(eps > 0.0) {
        return Err(Error::BadParams(format!("scale must be positive, got {eps}")));
    }
    let ratio = h / eps;
    if ratio > MAX_STEP_SCALE_RATIO {
        return Err(Error::RatioTooLarge { ratio, limit: MAX_STEP_SCALE_RATIO });
    }
    let d = u.dim().as_usize();
    if a.dim() != d {
        return Err(Error::BadParams("test function dimension mismatch".into()));
    }
    let mut total = C64::default();
    for term in &a.terms {
        total += pair_discrete_term(u, eps, &term.x, &term.xi)?;
    }
    Ok(total)
}

fn pair_discrete_term(
    u: &DiscreteField,
    eps: f64,
    phi: &AxisProduct,
    chi: &AxisProduct,
) -> Result<C64> {
    let h = u.step();
    let d = u.dim().as_usize();

    // Per-axis fold counts and FFT resolution from χ's certified radius.
    let mut folds = [0i64; 2];
    let mut resolution = 512usize;
    let nmax = u
        .shape()
        .iter()
        .take(d)
        .zip(u.n_min().iter())
        .map(|(&len, &lo)| (lo.abs()).max((lo + len as i64).abs()) as usize)
        .max()
        .unwrap_or(1);
    for axis in 0..d {
        let f = &chi.factors[axis];
        let radius = f.radius().ok_or_else(|| {
            Error::UnsupportedPairing(
                "discrete pairings need a localized ξ factor (lattice folds are infinite)".into(),
            )
        })?;
        let span = (f.center().abs() + radius) * h / eps;
        folds[axis] = (span / TAU).ceil() as i64 + 1;
        // quadrature must resolve both Û (degree n_max) and χ(ε·/h)
        let chi_scale = f.variation_scale() * h / eps;
        let need = (4 * (nmax + 1)).max((16.0 * PI / chi_scale).ceil() as usize);
        resolution = resolution.max(need.next_power_of_two());
    }
    if d == 1 {
        // cheap headroom against the slow Fourier decay of C¹ windows
        resolution = resolution.max(4096) * 4;
    }
    let m = resolution.min(1 << 21);

    let uhat = u.dft_on_grid(m);
    let node = |r: usize| (r as f64 - m as f64 / 2.0) * TAU / m as f64;

    match u.dim() {
        Dim::One => {
            // X(η) = Σ_q χ(ε(η+2πq)/h), folded over the certified range.
            let mut g: Vec<C64> = (0..m)
                .map(|r| {
                    let eta = node(r);
                    let mut x = 0.0;
                    for q in -folds[0]..=folds[0] {
                        x += chi.factors[0].eval(eps * (eta + TAU * q as f64) / h);
                    }
                    uhat[r] * x
                })
                .collect();
            // V_m = (1/M) Σ_r X·Û e^{imη_r}: inverse FFT after undoing the
            // math-order offset.
            let mut fft_order = vec![C64::default(); m];
            for (r, v) in g.drain(..).enumerate() {
                let rm = (r as i64 - (m / 2) as i64).rem_euclid(m as i64) as usize;
                fft_order[rm] = v;
            }
            FftPlanner::new().plan_fft_inverse(m).process(&mut fft_order);
            let mut acc = C64::default();
            for (flat, uv) in u.values().iter().enumerate() {
                let n = u.n_min()[0] + flat as i64;
                let v = fft_order[n.rem_euclid(m as i64) as usize] / m as f64;
                acc += uv.conj() * phi.factors[0].eval(h * n as f64) * v;
            }
            Ok(acc * h)
        }
        Dim::Two => {
            let mut grid = vec![C64::default(); m * m];
            for r0 in 0..m {
                let e0 = node(r0);
                let mut x0 = 0.0;
                for q in -folds[0]..=folds[0] {
                    x0 += chi.factors[0].eval(eps * (e0 + TAU * q as f64) / h);
                }
                for r1 in 0..m {
                    let e1 = node(r1);
                    let mut x1 = 0.0;
                    for q in -folds[1]..=folds[1] {
                        x1 += chi.factors[1].eval(eps * (e1 + TAU * q as f64) / h);
                    }
                    let rm0 = (r0 as i64 - (m / 2) as i64).rem_euclid(m as i64) as usize;
                    let rm1 = (r1 as i64 - (m / 2) as i64).rem_euclid(m as i64) as usize;
                    grid[rm0 * m + rm1] = uhat[r0 * m + r1] * (x0 * x1);
                }
            }
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_inverse(m);
            for row in grid.chunks_exact_mut(m) {
                fft.process(row);
            }
            for i in 0..m {
                for j in (i + 1)..m {
                    grid.swap(i * m + j, j * m + i);
                }
            }
            for row in grid.chunks_exact_mut(m) {
                fft.process(row);
            }
            for i in 0..m {
                for j in (i + 1)..m {
                    grid.swap(i * m + j, j * m + i);
                }
            }
            let scale = 1.0 / (m as f64 * m as f64);
            let mut acc = C64::default();
            for (flat, uv) in u.values().iter().enumerate() {
                let n = u.index_of(flat);
                let r0 = n[0].rem_euclid(m as i64) as usize;
                let r1 = n[1].rem_euclid(m as i64) as usize;
                let v = grid[r0 * m + r1] * scale;
                let x = [h * n[0] as f64, h * n[1] as f64];
                acc += uv.conj() * phi.eval(&x) * v;
            }
            Ok(acc * h * h)
        }
    }
}

/// Values of the Wigner transform (or its periodized series) on an x × ξ
/// grid. Real-valued by the conjugate symmetry of the integrand.
#[derive(Clone, Debug)]
pub struct PhaseSpaceField {
    pub x_nodes: Vec<f64>,
    pub xi_nodes: Vec<f64>,
    /// Row-major: `values[ix * xi_nodes.len() + iq]`.
    pub values: Vec<f64>,
}

impl PhaseSpaceField {
    pub fn value(&self, ix: usize, iq: usize) -> f64 {
        self.values[ix * self.xi_nodes.len() + iq]
    }
}

/// The Wigner transform w^ε[u] on the window grid (one dimension).
///
/// The lag variable p is discretized as p_l = 2Δx·l/ε so that both shifted
/// arguments stay on the grid (periodic wraparound); the resulting frequency
/// grid has spacing πε/(2L), half the rescaled window resolution.
pub fn wigner_transform(u: &ContinuousField, eps: f64) -> Result<PhaseSpaceField> {
    if u.window().dim() != Dim::One {
        return Err(Error::BadParams(
            "the Wigner transform grid is only materialized in one dimension".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::BadParams(format!("scale must be positive, got {eps}")));
    }
    let window = *u.window();
    let n = window.samples_per_axis();
    let dp = 2.0 * window.dx() / eps;
    let dxi = PI * eps / (2.0 * window.half_length());
    let vals = u.values();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);

    let mut out = vec![0.0f64; n * n];
    let mut row = vec![C64::default(); n];
    for j in 0..n {
        // K_l = u(x - εp/2) ū(x + εp/2) = u_{j-l} ū_{j+l}. Out-of-window
        // reads count as zero: wrapping them around would let the field
        // interfere with its own periodic image and deposit a spurious
        // ghost column at the window edge.
        for l in 0..n {
            let ls = l as i64 - (n / 2) as i64;
            let a = j as i64 - ls;
            let b = j as i64 + ls;
            let k = if a >= 0 && a < n as i64 && b >= 0 && b < n as i64 {
                vals[a as usize] * vals[b as usize].conj()
            } else {
                C64::default()
            };
            row[ls.rem_euclid(n as i64) as usize] = k;
        }
        fft.process(&mut row);
        // w(x_j, ξ_q) = (Δp/2π) Σ_l K_l e^{2πi l q / N}, q symmetric.
        for q in 0..n {
            let qs = q as i64 - (n / 2) as i64;
            let v = row[qs.rem_euclid(n as i64) as usize];
            out[j * n + q] = v.re * dp / TAU;
        }
    }
    Ok(PhaseSpaceField {
        x_nodes: (0..n).map(|j| window.x_node_1d(j)).collect(),
        xi_nodes: (0..n).map(|q| (q as f64 - n as f64 / 2.0) * dxi).collect(),
        values: out,
    })
}

/// The lattice-periodized Wigner series: the ξ axis of the transform folded
/// onto [-π, π). Requires 4L/ε to be an integer so the fold is exact.
pub fn wigner_series(u: &ContinuousField, eps: f64) -> Result<PhaseSpaceField> {
    let w = wigner_transform(u, eps)?;
    let dxi = w.xi_nodes[1] - w.xi_nodes[0];
    let per_cell = TAU / dxi;
    if (per_cell - per_cell.round()).abs() > 1e-9 {
        return Err(Error::BadParams(format!(
            "2π/Δξ = {per_cell} must be an integer for an exact fold; choose ε with 4L/ε ∈ Z"
        )));
    }
    let pc = per_cell.round() as usize;
    let nx = w.x_nodes.len();
    let nq = w.xi_nodes.len();
    let mut xi_nodes = Vec::with_capacity(pc);
    let q0 = (-(pc as i64)) / 2;
    for i in 0..pc {
        xi_nodes.push((q0 + i as i64) as f64 * dxi);
    }
    let mut values = vec![0.0; nx * pc];
    for ix in 0..nx {
        for iq in 0..nq {
            let q = iq as i64 - (nq as i64) / 2;
            let folded = (q - q0).rem_euclid(pc as i64) as usize;
            values[ix * pc + folded] += w.values[ix * nq + iq];
        }
    }
    Ok(PhaseSpaceField { x_nodes: w.x_nodes, xi_nodes, values })
}

/// ⟨E^h[U], φ⟩ = h^d Σ φ(hn)|U_n|².
pub fn energy_density(u: &DiscreteField, phi: &AxisProduct) -> f64 {
    u.weighted_energy(|x| phi.eval(x))
}

/// Oscillation/compactness tail masses of a field at radius R.
#[derive(Clone, Copy, Debug)]
pub struct OscillationTails {
    /// Spectral mass beyond the R-dependent ball (scaled per the regime).
    pub frequency_tail: f64,
    /// Spatial mass beyond radius R.
    pub spatial_tail: f64,
}

/// Tails for a discrete field: frequency tail h^d(2π)^{-d}∫_{Q∖B(0,(h/ε)R)}|Û|²,
/// spatial tail h^d Σ_{|hn|>R}|U_n|². Both are non-increasing in R.
pub fn oscillation_diagnostics_discrete(
    u: &DiscreteField,
    eps: f64,
    r: f64,
) -> Result<OscillationTails> {
    if !(r > 0.0) || !(eps > 0.0) {
        return Err(Error::BadParams("R and ε must be positive".into()));
    }
    let h = u.step();
    let d = u.dim().as_usize();
    if u.dim() != Dim::One {
        return Err(Error::BadParams("discrete diagnostics are one-dimensional".into()));
    }
    let nmax = u.shape()[0] + u.n_min()[0].unsigned_abs() as usize;
    let m = (4 * (nmax + 1)).next_power_of_two().max(512);
    let grid = u.dft_on_grid(m);
    let cut = (h / eps * r).min(PI);
    let mut tail = 0.0;
    for (ridx, v) in grid.iter().enumerate() {
        let eta = (ridx as f64 - m as f64 / 2.0) * TAU / m as f64;
        if eta.abs() > cut {
            tail += v.norm_sqr();
        }
    }
    tail *= TAU / m as f64;
    let frequency_tail = h.powi(d as i32) * tail / TAU;

    let mut spatial = 0.0;
    for (flat, v) in u.values().iter().enumerate() {
        let n = u.n_min()[0] + flat as i64;
        if (h * n as f64).abs() > r {
            spatial += v.norm_sqr();
        }
    }
    Ok(OscillationTails { frequency_tail, spatial_tail: h.powi(d as i32) * spatial })
}

/// Tails for a continuous field at scale ε: spectral mass beyond |ξ| > R/ε
/// and spatial mass beyond |x| > R (both (2π)^{-d}-normalized on the
/// spectral side).
pub fn oscillation_diagnostics_continuous(
    u: &ContinuousField,
    eps: f64,
    r: f64,
) -> Result<OscillationTails> {
    if !(r > 0.0) || !(eps > 0.0) {
        return Err(Error::BadParams("R and ε must be positive".into()));
    }
    let window = u.window();
    let d = window.dim().as_usize();
    let cut = r / eps;
    let spec = u.spectrum();
    let wxi = (window.dxi() / TAU).powi(d as i32);
    let mut freq = 0.0;
    for (flat, v) in spec.iter().enumerate() {
        let xi = window.xi_node(flat);
        let norm = (xi[..d].iter().map(|t| t * t).sum::<f64>()).sqrt();
        if norm > cut {
            freq += v.norm_sqr();
        }
    }
    let wx = window.dx().powi(d as i32);
    let mut spatial = 0.0;
    for (flat, v) in u.values().iter().enumerate() {
        let x = window.x_node(flat);
        let norm = (x[..d].iter().map(|t| t * t).sum::<f64>()).sqrt();
        if norm > r {
            spatial += v.norm_sqr();
        }
    }
    Ok(OscillationTails { frequency_tail: freq * wxi, spatial_tail: spatial * wx })
}

/// ∫_Q σ_φ^R(ξ) h|Û(ξ)|² dξ for a discrete field: the Gram-tail-weighted
/// spectral mass that controls whether reconstructed sequences stay
/// h-oscillatory.
pub fn sigma_weighted_mass(
    u: &DiscreteField,
    profile: &Profile,
    s: f64,
    r: f64,
) -> Result<f64> {
    if u.dim() != Dim::One {
        return Err(Error::BadParams("σ-weighted mass is one-dimensional".into()));
    }
    let h = u.step();
    let nmax = u.shape()[0] + u.n_min()[0].unsigned_abs() as usize;
    let m = (4 * (nmax + 1)).next_power_of_two().max(512);
    let grid = u.dft_on_grid(m);
    let mut acc = 0.0;
    for (ridx, v) in grid.iter().enumerate() {
        let eta = (ridx as f64 - m as f64 / 2.0) * TAU / m as f64;
        acc += sigma_tail(profile, s, r, eta, 1e-8)? * v.norm_sqr();
    }
    Ok(acc * TAU / m as f64 * h)
}

/// Same σ-weighted diagnostic for a closed-form squared spectrum |Û|² given
/// directly on the fundamental cell (for families defined in frequency).
/// `support` is the interval of the cell carrying the spectrum, so that
/// arbitrarily thin bumps are quadratured exactly.
pub fn sigma_weighted_mass_spectrum(
    spectrum_sq: impl Fn(f64) -> f64,
    h: f64,
    profile: &Profile,
    s: f64,
    r: f64,
    support: (f64, f64),
    quad_points: usize,
) -> Result<f64> {
    let lo = support.0.max(-PI);
    let hi = support.1.min(PI);
    if hi <= lo {
        return Err(Error::BadParams("empty spectral support in the fundamental cell".into()));
    }
    let len = hi - lo;
    let mut acc = 0.0;
    for i in 0..quad_points {
        let xi = lo + len * (i as f64 + 0.5) / quad_points as f64;
        acc += sigma_tail(profile, s, r, xi, 1e-8)? * spectrum_sq(xi);
    }
    Ok(acc * len / quad_points as f64 * h)
}

/// The rescaled transform F^ε u(ξ) = (2πε)^{-d/2} û(ξ/ε), represented as a
/// field over the frequency variable (its window spans ε·[max ξ]).
pub fn rescaled_fourier(u: &ContinuousField, eps: f64) -> Result<ContinuousField> {
    if !(eps > 0.0) {
        return Err(Error::BadParams(format!("scale must be positive, got {eps}")));
    }
    let window = u.window();
    let d = window.dim().as_usize();
    let out_window = SpatialWindow::new(
        window.dim(),
        eps * window.max_xi(),
        window.samples_per_axis(),
    )?;
    let scale = (TAU * eps).powf(-(d as f64) / 2.0);
    let values: Vec<C64> = u.spectrum().iter().map(|s| s * scale).collect();
    ContinuousField::from_values(out_window, values)
}
