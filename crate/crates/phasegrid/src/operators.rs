//! Sampling, reconstruction, discretization and projection on h-scaled grids.
//!
//! The reconstruction operator synthesizes T_φ^h U(x) = Σ_n U_n φ(x/h - n);
//! its transform is φ̂(hξ)·h^d·Û(hξ). The sampling operator takes h-scaled
//! inner products, S_φ^h u(n) = h^{-d}⟨φ̄((·/h) - n), u⟩, and is evaluated
//! through the frequency-side identity
//!
//!   S_φ^h u(n) = (2π)^{-d} ∫ conj(φ̂(hξ)) û(ξ) e^{ihn·ξ} dξ,
//!
//! whose lattice folding h^d Û_S(hξ) = Σ_n conj(φ̂(hξ+2πn)) û(ξ + 2πn/h)
//! generalizes the Poisson summation formula. On a window the integral is a
//! quadrature over the represented frequencies; when the sampling grid
//! divides the window (2L/h integer) the phases collapse mod 2π and both
//! operators reduce to folded FFTs, exact for fields whose spectra the
//! window resolves.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{
    bessel_multiplier, bessel_weight, ContinuousField, Dim, DiscreteField, SpatialWindow, C64,
};
use crate::profiles::{dual_profile, tau, Profile, ProfileKind};

/// Default budget for spectral mass lost to window truncation.
pub const TRUNCATION_BUDGET: f64 = 1e-6;

/// Number of complete lattice folds of hξ represented by a window of N
/// samples when the sampling grid has M = 2L/h points.
fn folds_per_window(n: usize, m: usize) -> usize {
    if n <= m {
        0
    } else {
        (n / m - 1) / 2
    }
}

/// 2L/h as an exact small integer, if it is one.
fn aligned_grid_points(window: &SpatialWindow, h: f64) -> Option<usize> {
    let m = 2.0 * window.half_length() / h;
    let rounded = m.round();
    if (m - rounded).abs() < 1e-9 * rounded.max(1.0) && rounded >= 2.0 && rounded <= 1e8 {
        Some(rounded as usize)
    } else {
        None
    }
}

/// Reconstruction T_φ^h U represented on `window`, with the default
/// truncation budget.
pub fn reconstruct(
    u: &DiscreteField,
    profile: &Profile,
    h: f64,
    window: SpatialWindow,
) -> Result<ContinuousField> {
    reconstruct_with_budget(u, profile, h, window, TRUNCATION_BUDGET)
}

/// Reconstruction with an explicit spectral-truncation budget.
///
/// Profiles with compact spatial support are synthesized directly in x
/// (exact, no truncation); the rest go through the spectral formula, with a
/// certified estimate of the spectral mass falling outside the window.
pub fn reconstruct_with_budget(
    u: &DiscreteField,
    profile: &Profile,
    h: f64,
    window: SpatialWindow,
    budget: f64,
) -> Result<ContinuousField> {
    if matches!(profile.kind(), ProfileKind::DiracDelta) {
        return Err(Error::BadParams(
            "point-mass reconstruction yields a Dirac comb; it exists only inside discrete pairings"
                .into(),
        ));
    }
    if u.dim() != window.dim() {
        return Err(Error::BadParams("field and window dimensions differ".into()));
    }
    if !(h > 0.0) {
        return Err(Error::BadParams(format!("step must be positive, got {h}")));
    }
    if profile.spatial_radius().is_some() {
        return Ok(reconstruct_spatial(u, profile, h, window));
    }
    reconstruct_spectral(u, profile, h, window, budget)
}

/// Exact x-side synthesis for compactly supported profiles.
fn reconstruct_spatial(
    u: &DiscreteField,
    profile: &Profile,
    h: f64,
    window: SpatialWindow,
) -> ContinuousField {
    let radius = profile.spatial_radius().expect("compact support");
    let reach = radius.ceil() as i64 + 1;
    let nmin = u.n_min();
    let shape = u.shape();
    match window.dim() {
        Dim::One => {
            let mut values = vec![C64::default(); window.len()];
            for (j, v) in values.iter_mut().enumerate() {
                let x = window.x_node_1d(j);
                let center = (x / h).floor() as i64;
                for n in (center - reach)..=(center + reach) {
                    let idx = n - nmin[0];
                    if idx < 0 || idx >= shape[0] as i64 {
                        continue;
                    }
                    let w = profile.spatial_at_1d(x / h - n as f64).unwrap_or(0.0);
                    if w != 0.0 {
                        *v += u.values()[idx as usize] * w;
                    }
                }
            }
            ContinuousField::from_values(window, values).expect("matching window")
        }
        Dim::Two => {
            let nn = window.samples_per_axis();
            let mut values = vec![C64::default(); window.len()];
            for j1 in 0..nn {
                let x1 = window.x_node_1d(j1);
                let c1 = (x1 / h).floor() as i64;
                for j2 in 0..nn {
                    let x2 = window.x_node_1d(j2);
                    let c2 = (x2 / h).floor() as i64;
                    let mut acc = C64::default();
                    for n1 in (c1 - reach)..=(c1 + reach) {
                        let i1 = n1 - nmin[0];
                        if i1 < 0 || i1 >= shape[0] as i64 {
                            continue;
                        }
                        let w1 = profile.spatial_at_1d(x1 / h - n1 as f64).unwrap_or(0.0);
                        if w1 == 0.0 {
                            continue;
                        }
                        for n2 in (c2 - reach)..=(c2 + reach) {
                            let i2 = n2 - nmin[1];
                            if i2 < 0 || i2 >= shape[1] as i64 {
                                continue;
                            }
                            let w2 = profile.spatial_at_1d(x2 / h - n2 as f64).unwrap_or(0.0);
                            if w2 != 0.0 {
                                acc += u.values()[i1 as usize * shape[1] + i2 as usize] * w1 * w2;
                            }
                        }
                    }
                    values[j1 * nn + j2] = acc;
                }
            }
            ContinuousField::from_values(window, values).expect("matching window")
        }
    }
}

/// Spectral-side reconstruction with a certified truncation estimate.
fn reconstruct_spectral(
    u: &DiscreteField,
    profile: &Profile,
    h: f64,
    window: SpatialWindow,
    budget: f64,
) -> Result<ContinuousField> {
    let d = window.dim().as_usize();
    let n = window.samples_per_axis();
    let hd = h.powi(d as i32);
    let aligned = aligned_grid_points(&window, h);

    // Û(hξ_m) per window node, via one folded FFT when the grids align.
    let uhat_at: Box<dyn Fn(&[f64]) -> C64> = match aligned {
        Some(m) => {
            let grid = u.dft_on_grid(m);
            let mf = m as f64;
            Box::new(move |eta: &[f64]| {
                // η per axis is an exact multiple of 2π/M; index the grid.
                let mut flat = 0usize;
                for &e in eta {
                    let r = (e / (TAU / mf)).round() as i64;
                    let idx = (r + m as i64 / 2).rem_euclid(m as i64) as usize;
                    flat = flat * m + idx;
                }
                grid[flat]
            })
        }
        None => {
            if window.dim() == Dim::Two {
                return Err(Error::BadParams(
                    "2-d reconstruction needs 2L/h to be an integer".into(),
                ));
            }
            let u = u.clone();
            Box::new(move |eta: &[f64]| u.dft_at(eta))
        }
    };

    let mut spec = Vec::with_capacity(window.len());
    for flat in 0..window.len() {
        let xi = window.xi_node(flat);
        let eta = [h * xi[0], h * xi[1]];
        let phat = profile.fourier_at(&eta[..d]);
        spec.push(phat * hd * uhat_at(&eta[..d]));
    }

    // Truncation gate: reconstruction-spectrum mass outside the represented
    // band, estimated on the fundamental cell as τ(η) minus the represented
    // folds, weighted by |Û(η)|².
    if window.dim() == Dim::One {
        if let Some(m) = aligned {
            let folds = folds_per_window(n, m) as i64;
            let grid = u.dft_on_grid(m);
            let mg = grid.len();
            let mut lost = 0.0;
            let mut total = 0.0;
            for (r, v) in grid.iter().enumerate() {
                let eta = (r as f64 - mg as f64 / 2.0) * TAU / mg as f64;
                let t = match tau(profile, 0.0, &[eta], 1e-9) {
                    Ok(t) => t,
                    Err(_) => continue, // non-certifiable tail: covered by budget override
                };
                let mut inside = 0.0;
                for k in -folds..=folds {
                    inside += profile.fourier_at_1d(eta + TAU * k as f64).norm_sqr();
                }
                let w = v.norm_sqr();
                lost += (t - inside).max(0.0) * w;
                total += t * w;
            }
            if total > 0.0 && lost > budget * total {
                return Err(Error::WindowTooSmall(format!(
                    "reconstruction loses spectral mass fraction {:.3e} (budget {:.1e}); \
                     enlarge the window sample count",
                    lost / total,
                    budget
                )));
            }
        }
    }

    ContinuousField::from_spectrum(window, spec)
}

/// Sampling S_φ^h u on the index window hZ^d ∩ [-L, L)^d.
pub fn sample(u: &ContinuousField, profile: &Profile, h: f64) -> Result<DiscreteField> {
    sample_with_budget(u, profile, h, TRUNCATION_BUDGET)
}

pub fn sample_with_budget(
    u: &ContinuousField,
    profile: &Profile,
    h: f64,
    budget: f64,
) -> Result<DiscreteField> {
    if !(h > 0.0) {
        return Err(Error::BadParams(format!("step must be positive, got {h}")));
    }
    let window = *u.window();
    let d = window.dim().as_usize();
    // The quadrature only sees represented frequencies; demand that u has no
    // appreciable mass near the window's spectral edge.
    let edge = u.spectral_mass_fraction_beyond(0.9375);
    if edge > budget {
        return Err(Error::WindowTooSmall(format!(
            "input spectrum carries mass fraction {edge:.3e} in the outer band (budget {budget:.1e})"
        )));
    }
    let spec = u.spectrum();
    let scale = (window.dxi() / TAU).powi(d as i32);

    match aligned_grid_points(&window, h) {
        Some(m) => match window.dim() {
            Dim::One => {
                let mut folded = vec![C64::default(); m];
                for (flat, s) in spec.iter().enumerate() {
                    let xi = window.xi_node_1d(flat);
                    let g = profile.fourier_at_1d(h * xi).conj() * s;
                    // math index of ξ_m; phase e^{ihnξ_m} = e^{2πinm/M}
                    let midx = flat as i64 - (window.samples_per_axis() / 2) as i64;
                    folded[midx.rem_euclid(m as i64) as usize] += g;
                }
                let mut buf = folded;
                inverse_fft(&mut buf);
                let half = (m / 2) as i64;
                let values: Vec<C64> = (-half..(m as i64 - half))
                    .map(|nn| buf[nn.rem_euclid(m as i64) as usize] * scale)
                    .collect();
                DiscreteField::new(h, Dim::One, [-half, 0], [m, 1], values)
            }
            Dim::Two => {
                let nn = window.samples_per_axis();
                let mut folded = vec![C64::default(); m * m];
                for (flat, s) in spec.iter().enumerate() {
                    let xi = window.xi_node(flat);
                    let g = profile.fourier_at(&[h * xi[0], h * xi[1]]).conj() * s;
                    let m1 = (flat / nn) as i64 - (nn / 2) as i64;
                    let m2 = (flat % nn) as i64 - (nn / 2) as i64;
                    let r1 = m1.rem_euclid(m as i64) as usize;
                    let r2 = m2.rem_euclid(m as i64) as usize;
                    folded[r1 * m + r2] += g;
                }
                inverse_fft2(&mut folded, m);
                let half = (m / 2) as i64;
                let mut values = Vec::with_capacity(m * m);
                for n1 in -half..(m as i64 - half) {
                    for n2 in -half..(m as i64 - half) {
                        let r1 = n1.rem_euclid(m as i64) as usize;
                        let r2 = n2.rem_euclid(m as i64) as usize;
                        values.push(folded[r1 * m + r2] * scale);
                    }
                }
                DiscreteField::new(h, Dim::Two, [-half, -half], [m, m], values)
            }
        },
        None => {
            if window.dim() == Dim::Two {
                return Err(Error::BadParams("2-d sampling needs 2L/h to be an integer".into()));
            }
            let half = (window.half_length() / h).floor() as i64;
            let len = (2 * half) as usize;
            let mut values = Vec::with_capacity(len);
            for n in -half..half {
                let mut acc = C64::default();
                for (flat, s) in spec.iter().enumerate() {
                    let xi = window.xi_node_1d(flat);
                    acc += profile.fourier_at_1d(h * xi).conj()
                        * s
                        * C64::new(0.0, h * n as f64 * xi).exp();
                }
                values.push(acc * scale);
            }
            DiscreteField::new(h, Dim::One, [-half, 0], [len, 1], values)
        }
    }
}

fn inverse_fft(buf: &mut [C64]) {
    use rustfft::FftPlanner;
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
}

fn inverse_fft2(buf: &mut [C64], n: usize) {
    use rustfft::FftPlanner;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    for row in buf.chunks_exact_mut(n) {
        fft.process(row);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
    for row in buf.chunks_exact_mut(n) {
        fft.process(row);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Point discretization U_n = u(hn) (spectral interpolation off the grid
/// nodes). Equals sampling with the point-mass profile.
pub fn discretize(u: &ContinuousField, h: f64) -> Result<DiscreteField> {
    let tail = u.spectral_mass_fraction_beyond(0.9375);
    if tail > 1e-8 {
        return Err(Error::WindowTooSmall(format!(
            "field is not smooth enough for pointwise reads: outer-band mass {tail:.3e}"
        )));
    }
    sample_with_budget(u, &Profile::delta(), h, 1e-8)
}

/// Orthogonal projection onto the reconstruction range of ψ at step h in the
/// ⟨hD⟩^s inner product: P = T_ψ^h ∘ S_{dual(ψ,s)}^h ∘ ⟨hD⟩^s.
///
/// The reconstruction leg always goes through the spectral path so that the
/// biorthogonality S_dual ∘ T_ψ = Id closes at the grid level; the window
/// must oversample the coefficient grid for the stated idempotency
/// tolerances (N/M of a few hundred for spline profiles).
pub fn project(u: &ContinuousField, psi: &Profile, s: f64, h: f64) -> Result<ContinuousField> {
    let dual = dual_profile(psi, s)?;
    let smoothed = bessel_multiplier(u, s, h)?;
    let coeffs = sample(&smoothed, &dual, h)?;
    reconstruct_spectral(&coeffs, psi, h, *u.window(), 1.0)
}

/// A certified upper bound for the operator norms of T_φ^h and S_φ^h.
#[derive(Clone, Debug)]
pub struct OperatorNormCertificate {
    /// Upper bound B ≥ sup_Q τ_{⟨D⟩^s φ}; √B bounds both operator norms.
    pub bound: f64,
    pub exponent: f64,
    pub grid_points: usize,
    /// Grid maximizer of the Gram function.
    pub worst_xi: f64,
}

/// Scan the Gram function over the fundamental cell and return the certified
/// norm bound (grid maximum plus the tail allowance).
pub fn certify_norm(profile: &Profile, s: f64) -> Result<OperatorNormCertificate> {
    let grid_points = 512;
    let tail_tol = 1e-10;
    let mut best = f64::NEG_INFINITY;
    let mut worst_xi = 0.0;
    for i in 0..grid_points {
        let xi = -PI + TAU * i as f64 / grid_points as f64;
        let v = tau(profile, s, &[xi], tail_tol)?;
        if v > best {
            best = v;
            worst_xi = xi;
        }
    }
    Ok(OperatorNormCertificate { bound: best + tail_tol, exponent: s, grid_points, worst_xi })
}

/// Outcome of the random-trial verification of the norm certificate.
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub trials: usize,
    /// max over trials of ‖⟨hD⟩^s T_φ^h U‖ / (√B ‖U‖_h)
    pub max_reconstruction_ratio: f64,
    /// max over trials of ‖S_φ^h u‖_h / (√B ‖⟨hD⟩^{-s} u‖)
    pub max_sampling_ratio: f64,
    /// max relative error in (⟨hD⟩^s T U, ⟨hD⟩^{-s} u) = (U, S u)_h
    pub max_adjoint_error: f64,
}

/// Run seeded random (U, u, h) trials against the certificate. Norms are
/// evaluated through the exact window-spectral representation; window
/// truncation can only shrink the left-hand sides of the inequalities.
pub fn verify_bounds(profile: &Profile, s: f64, trials: usize, seed: u64) -> Result<BoundsReport> {
    let cert = certify_norm(profile, s)?;
    let sqrt_b = cert.bound.sqrt();
    let results: Vec<Result<(f64, f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| single_bound_trial(profile, s, sqrt_b, seed.wrapping_add(t as u64)))
        .collect();
    let mut report = BoundsReport {
        trials,
        max_reconstruction_ratio: 0.0,
        max_sampling_ratio: 0.0,
        max_adjoint_error: 0.0,
    };
    for r in results {
        let (r1, r2, adj) = r?;
        report.max_reconstruction_ratio = report.max_reconstruction_ratio.max(r1);
        report.max_sampling_ratio = report.max_sampling_ratio.max(r2);
        report.max_adjoint_error = report.max_adjoint_error.max(adj);
    }
    let slack = 1.0 + 1e-6;
    if report.max_reconstruction_ratio > slack {
        return Err(Error::CertificateViolated(format!(
            "reconstruction ratio {} exceeds 1 + 1e-6 for {}",
            report.max_reconstruction_ratio,
            profile.name()
        )));
    }
    if report.max_sampling_ratio > slack {
        return Err(Error::CertificateViolated(format!(
            "sampling ratio {} exceeds 1 + 1e-6 for {}",
            report.max_sampling_ratio,
            profile.name()
        )));
    }
    if report.max_adjoint_error > 1e-7 {
        return Err(Error::CertificateViolated(format!(
            "adjoint identity off by {} for {}",
            report.max_adjoint_error,
            profile.name()
        )));
    }
    Ok(report)
}

fn single_bound_trial(profile: &Profile, s: f64, sqrt_b: f64, seed: u64) -> Result<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = if rng.gen::<bool>() { 8.0 } else { 16.0 };
    let n = 2048usize;
    let m = *[32usize, 64, 128].get(rng.gen_range(0..3)).unwrap();
    let h = 2.0 * l / m as f64;
    let window = SpatialWindow::new(Dim::One, l, n)?;

    // Random discrete field supported well inside the sampling index window.
    let support = rng.gen_range(4..=12);
    let offset = rng.gen_range(-6i64..=-1);
    let u_disc = DiscreteField::from_fn_1d(h, offset, support, |_| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    })?;

    // Random smooth continuous field: random band-limited spectrum.
    let width = window.max_xi() * rng.gen_range(0.05..0.2);
    let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let u_cont = ContinuousField::from_spectrum_fn_1d(window, |xi| {
        let envelope = (-(xi / width).powi(2)).exp();
        C64::new(rng2.gen::<f64>() - 0.5, rng2.gen::<f64>() - 0.5) * envelope
    })?;

    // ‖⟨hD⟩^s T U‖ from exact spectral samples of the reconstruction.
    let uhat_grid = u_disc.dft_on_grid(m);
    let mut t_norm_sq = 0.0;
    for flat in 0..n {
        let xi = window.xi_node_1d(flat);
        let eta = h * xi;
        let w = bessel_weight(&[eta], s);
        let r = (eta / (TAU / m as f64)).round() as i64;
        let uhat = uhat_grid[(r + m as i64 / 2).rem_euclid(m as i64) as usize];
        t_norm_sq += (w * h) * (w * h) * profile.fourier_at_1d(eta).norm_sqr() * uhat.norm_sqr();
    }
    t_norm_sq *= window.dxi() / TAU;
    let r1 = t_norm_sq.sqrt() / (sqrt_b * u_disc.norm_h());

    // Sampling bound.
    let sampled = sample(&u_cont, profile, h)?;
    let weighted = bessel_multiplier(&u_cont, -s, h)?;
    let r2 = sampled.norm_h() / (sqrt_b * weighted.l2_norm());

    // Adjoint identity, both sides through the same spectral quadrature.
    let spec = u_cont.spectrum();
    let mut lhs = C64::default();
    for flat in 0..n {
        let xi = window.xi_node_1d(flat);
        let eta = h * xi;
        let r = (eta / (TAU / m as f64)).round() as i64;
        let uhat = uhat_grid[(r + m as i64 / 2).rem_euclid(m as i64) as usize];
        lhs += profile.fourier_at_1d(eta) * h * uhat * spec[flat].conj();
    }
    lhs *= window.dxi() / TAU;
    let rhs = u_disc.inner_h(&restrict_to(&sampled, &u_disc))?;
    let scale = lhs.norm().max(rhs.norm()).max(1e-12);
    let adj = (lhs - rhs).norm() / scale;

    Ok((r1, r2, adj))
}

/// Restrict a sampled field to the index window of `pattern` (1-d).
fn restrict_to(full: &DiscreteField, pattern: &DiscreteField) -> DiscreteField {
    let nmin = pattern.n_min();
    let shape = pattern.shape();
    let values: Vec<C64> = (0..shape[0])
        .map(|i| {
            let n = nmin[0] + i as i64;
            let idx = n - full.n_min()[0];
            if idx >= 0 && (idx as usize) < full.shape()[0] {
                full.values()[idx as usize]
            } else {
                C64::default()
            }
        })
        .collect();
    DiscreteField::new(pattern.step(), Dim::One, nmin, shape, values).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fourier_multiplier;

    fn window(l: f64, n: usize) -> SpatialWindow {
        SpatialWindow::new(Dim::One, l, n).unwrap()
    }

    fn unit_gaussian(w: SpatialWindow) -> ContinuousField {
        ContinuousField::from_fn_1d(w, |x| C64::new(PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0))
            .unwrap()
    }

    #[test]
    fn reconstruct_zero_is_zero() {
        let u = DiscreteField::zeros_1d(0.5, -4, 8).unwrap();
        let f = reconstruct(&u, &Profile::bspline(1), 0.5, window(8.0, 256)).unwrap();
        assert!(f.l2_norm() == 0.0);
    }

    #[test]
    fn reconstruct_box_profile_gives_indicator() {
        // Unit mass at n=0 with the box profile: the indicator of
        // [-1/2, 1/2), evaluated exactly by the x-side synthesis.
        let u = DiscreteField::from_fn_1d(1.0, 0, 1, |_| C64::new(1.0, 0.0)).unwrap();
        let w = window(8.0, 512);
        let f = reconstruct(&u, &Profile::bspline(0), 1.0, w).unwrap();
        for (j, v) in f.values().iter().enumerate() {
            let x = w.x_node_1d(j);
            let expect = if (-0.5..0.5).contains(&x) { 1.0 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn sinc_reconstruction_interpolates_band_limited_samples() {
        let w = window(16.0, 1024);
        let h = 0.5;
        // Band-limited strictly inside (-π/h, π/h).
        let u = ContinuousField::from_spectrum_fn_1d(w, |xi| {
            C64::new((-(xi / 3.0) * (xi / 3.0)).exp(), 0.0)
                * if xi.abs() < 0.9 * PI / h { 1.0 } else { 0.0 }
        })
        .unwrap();
        let samples = discretize(&u, h).unwrap();
        let back = reconstruct(&samples, &Profile::sinc(), h, w).unwrap();
        let err = (back
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * w.dx())
        .sqrt()
            / u.l2_norm();
        assert!(err < 1e-9, "relative reconstruction error {err}");
    }

    #[test]
    fn interpolating_profile_reproduces_its_samples() {
        let h = 0.25;
        let u = DiscreteField::from_fn_1d(h, -10, 21, |n| {
            C64::new((n as f64 * 0.4).sin(), (n as f64 * 0.2).cos())
        })
        .unwrap();
        let p = Profile::bspline(1);
        let w = window(8.0, 1024);
        let f = reconstruct(&u, &p, h, w).unwrap();
        for i in 0..21 {
            let n = -10 + i as i64;
            let x = h * n as f64;
            let j = ((x + w.half_length()) / w.dx()).round() as usize;
            assert!((f.values()[j] - u.values()[i]).norm() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn discretize_gaussian_matches_closed_form() {
        let w = window(12.0, 1024);
        let u = ContinuousField::from_fn_1d(w, |x| C64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
        let d = discretize(&u, 0.25).unwrap();
        for (i, v) in d.values().iter().enumerate() {
            let n = d.n_min()[0] + i as i64;
            let x = 0.25 * n as f64;
            assert!((v.re - (-x * x / 2.0).exp()).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn discretize_constant_is_constant() {
        let w = window(8.0, 256);
        let u = ContinuousField::from_fn_1d(w, |_| C64::new(1.0, 0.0)).unwrap();
        let d = discretize(&u, 0.5).unwrap();
        for v in d.values() {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn poisson_summation_for_gaussian() {
        // h Σ u(hn) e^{-ihnξ} = Σ û(ξ + 2πn/h) at 32 frequencies.
        let w = window(16.0, 1024);
        let u = ContinuousField::from_fn_1d(w, |x| C64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
        let h = 0.5;
        let d = discretize(&u, h).unwrap();
        for j in 0..32 {
            let xi = -6.0 + 12.0 * j as f64 / 31.0;
            let lhs = d.dft_at(&[h * xi]) * h;
            let mut rhs = C64::default();
            for n in -8i64..=8 {
                let arg: f64 = xi + TAU * n as f64 / h;
                rhs += C64::new(TAU.sqrt() * (-arg * arg / 2.0).exp(), 0.0);
            }
            assert!((lhs - rhs).norm() < 1e-8, "xi={xi}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn box_sampling_matches_direct_integral_oracle() {
        // S_φ^h u(n) = h^{-1} ∫ u(x) 1_{[-1/2,1/2]}((x/h) - n) dx for the box
        // profile, checked against direct quadrature.
        let w = window(12.0, 2048);
        let u = unit_gaussian(w);
        let h = 0.5;
        let s = sample(&u, &Profile::bspline(0), h).unwrap();
        for &n in &[-3i64, -1, 0, 2, 5] {
            let idx = (n - s.n_min()[0]) as usize;
            let steps = 20_000;
            let (a, b) = (h * (n as f64 - 0.5), h * (n as f64 + 0.5));
            let mut acc = 0.0;
            for i in 0..steps {
                let x = a + (b - a) * (i as f64 + 0.5) / steps as f64;
                acc += PI.powf(-0.25) * (-x * x / 2.0).exp();
            }
            acc *= (b - a) / steps as f64 / h;
            assert!((s.values()[idx].re - acc).abs() < 1e-7, "n={n}");
        }
    }

    #[test]
    fn sinc_sampling_of_band_limited_field_reads_point_values() {
        let w = window(16.0, 1024);
        let h = 0.5;
        let u = ContinuousField::from_spectrum_fn_1d(w, |xi| {
            C64::new((-(xi * xi) / 4.0).exp(), 0.0) * if xi.abs() < PI / h { 1.0 } else { 0.0 }
        })
        .unwrap();
        let s_sinc = sample(&u, &Profile::sinc(), h).unwrap();
        let s_delta = discretize(&u, h).unwrap();
        for (a, b) in s_sinc.values().iter().zip(s_delta.values()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn sample_zero_field_is_zero() {
        let w = window(8.0, 256);
        let u = ContinuousField::zero(w);
        let s = sample(&u, &Profile::bspline(1), 0.5).unwrap();
        assert_eq!(s.norm_h(), 0.0);
    }

    #[test]
    fn factorization_bessel_weight_commutes_through_reconstruction() {
        // ⟨hD⟩^s ∘ T_φ^h = T_{⟨D⟩^s φ}^h as operators. Both sides run through
        // the spectral synthesis path by tabulating φ̂ and ⟨·⟩^s φ̂ at the
        // exact frequencies the window represents.
        let h = 0.5;
        let s = 1.0;
        let base = Profile::bspline(2);
        let w = window(8.0, 2048);
        let nodes: Vec<f64> = (0..w.len()).map(|j| h * w.xi_node_1d(j)).collect();
        let plain: Vec<C64> = nodes.iter().map(|&t| base.fourier_at_1d(t)).collect();
        let weighted: Vec<C64> = nodes
            .iter()
            .map(|&t| base.fourier_at_1d(t) * bessel_weight(&[t], s))
            .collect();
        let p_plain = Profile::table(crate::profiles::FourierTable::new(nodes.clone(), plain).unwrap());
        let p_weighted = Profile::table(crate::profiles::FourierTable::new(nodes, weighted).unwrap());

        let u = DiscreteField::from_fn_1d(h, -6, 13, |n| {
            C64::new((n as f64 * 0.7).cos(), (n as f64 * 0.3).sin())
        })
        .unwrap();
        let lhs = bessel_multiplier(&reconstruct(&u, &p_plain, h, w).unwrap(), s, h).unwrap();
        let rhs = reconstruct(&u, &p_weighted, h, w).unwrap();
        for (a, b) in lhs.values().iter().zip(rhs.values()).step_by(7) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn sample_after_reconstruct_is_identity_for_sinc() {
        let h = 0.5;
        let u = DiscreteField::from_fn_1d(h, -8, 17, |n| {
            C64::new((n as f64 * 0.5).sin(), (n as f64 * 0.9).cos())
        })
        .unwrap();
        let w = window(16.0, 1024);
        let t = reconstruct(&u, &Profile::sinc(), h, w).unwrap();
        let back = sample(&t, &Profile::sinc(), h).unwrap();
        for i in 0..u.values().len() {
            let n = u.n_min()[0] + i as i64;
            let idx = (n - back.n_min()[0]) as usize;
            assert!((back.values()[idx] - u.values()[i]).norm() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint() {
        let w = window(12.0, 4096);
        let h = 1.0;
        let s = 0.0;
        let psi = Profile::bspline(1);
        let u = unit_gaussian(w);
        let pu = project(&u, &psi, s, h).unwrap();
        let ppu = project(&pu, &psi, s, h).unwrap();
        let idem = (ppu
            .values()
            .iter()
            .zip(pu.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * w.dx())
        .sqrt();
        assert!(idem < 1e-7, "idempotency defect {idem}");

        let v = ContinuousField::from_fn_1d(w, |x| {
            C64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.3 * (-x * x / 3.0).exp())
        })
        .unwrap();
        let pv = project(&v, &psi, s, h).unwrap();
        let a = pu.inner(&v).unwrap();
        let b = u.inner(&pv).unwrap();
        assert!((a - b).norm() < 1e-7, "⟨Pu,v⟩={a} vs ⟨u,Pv⟩={b}");
    }

    #[test]
    fn projection_onto_band_limited_range_is_band_limiting() {
        let w = window(16.0, 1024);
        let h = 0.5;
        let u = ContinuousField::from_spectrum_fn_1d(w, |xi| {
            C64::new((-(xi / 4.0) * (xi / 4.0)).exp(), 0.0)
                * if xi.abs() < PI / h { 1.0 } else { 0.0 }
        })
        .unwrap();
        let pu = project(&u, &Profile::sinc(), 0.0, h).unwrap();
        for (a, b) in pu.values().iter().zip(u.values()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn projection_annihilates_orthogonal_complement_of_sinc_range() {
        let w = window(16.0, 1024);
        let h = 2.0;
        // Spectrum supported where the h-scaled band [-π/h, π/h) has none.
        let u = ContinuousField::from_spectrum_fn_1d(w, |xi| {
            let inner = PI / h;
            if xi.abs() > 1.2 * inner && xi.abs() < 2.5 * inner {
                C64::new(1.0, 0.5)
            } else {
                C64::default()
            }
        })
        .unwrap();
        let pu = project(&u, &Profile::sinc(), 0.0, h).unwrap();
        assert!(pu.l2_norm() < 1e-9 * u.l2_norm().max(1.0));
    }

    #[test]
    fn projection_is_best_approximation_in_range() {
        let w = window(12.0, 512);
        let h = 0.5;
        let psi = Profile::bspline(1);
        let u = unit_gaussian(w);
        let pu = project(&u, &psi, 0.0, h).unwrap();
        let base_err = (pu
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * w.dx())
        .sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let coeffs = DiscreteField::from_fn_1d(h, -12, 25, |_| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 0.3
            })
            .unwrap();
            let candidate = reconstruct(&coeffs, &psi, h, w).unwrap();
            let err = (candidate
                .values()
                .iter()
                .zip(u.values())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                * w.dx())
            .sqrt();
            assert!(err + 1e-9 >= base_err, "random candidate beat the projection");
        }
    }

    #[test]
    fn certificate_for_sinc_is_unit_isometry() {
        let cert = certify_norm(&Profile::sinc(), 0.0).unwrap();
        assert!((cert.bound - 1.0).abs() < 1e-9);
        // Isometry on a random field.
        let h = 0.25;
        let u = DiscreteField::from_fn_1d(h, -5, 11, |n| {
            C64::new((n as f64).sin(), (2.0 * n as f64).cos())
        })
        .unwrap();
        let w = window(8.0, 1024);
        let t = reconstruct(&u, &Profile::sinc(), h, w).unwrap();
        assert!((t.l2_norm() - u.norm_h()).abs() < 1e-9 * u.norm_h());
    }

    #[test]
    fn verify_bounds_for_catalog_profiles() {
        for (p, s) in [
            (Profile::sinc(), 0.0),
            (Profile::bspline(0), 0.0),
            (Profile::bspline(1), 0.0),
            (Profile::haar(), 0.0),
            (Profile::gaussian(1.0).unwrap(), 0.0),
            (Profile::bspline(2), 1.0),
        ] {
            let report = verify_bounds(&p, s, 40, 0xfeed).unwrap();
            assert!(report.max_reconstruction_ratio <= 1.0 + 1e-6, "{}", p.name());
            assert!(report.max_sampling_ratio <= 1.0 + 1e-6, "{}", p.name());
            assert!(report.max_adjoint_error <= 1e-7, "{}", p.name());
        }
    }

    #[test]
    fn delta_reconstruction_is_rejected() {
        let u = DiscreteField::zeros_1d(0.5, 0, 4).unwrap();
        assert!(reconstruct(&u, &Profile::delta(), 0.5, window(8.0, 256)).is_err());
    }

    #[test]
    fn window_too_small_for_edge_heavy_spectrum() {
        let w = window(8.0, 256);
        // Mass right at the spectral edge of the window.
        let u = ContinuousField::from_spectrum_fn_1d(w, |xi| {
            C64::new((-(xi.abs() - w.max_xi()).powi(2)).exp(), 0.0)
        })
        .unwrap();
        match sample(&u, &Profile::bspline(0), 0.5) {
            Err(Error::WindowTooSmall(_)) => {}
            other => panic!("expected WindowTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn bandlimit_projection_equals_multiplier_form() {
        // For the cardinal-sine profile the projection is the band-limiting
        // multiplier 1_{[-π/h, π/h)}(D).
        let w = window(16.0, 1024);
        let h = 1.0;
        let u = unit_gaussian(w);
        let pu = project(&u, &Profile::sinc(), 0.0, h).unwrap();
        let cut = fourier_multiplier(
            &u,
            |xi| {
                if (-PI..PI).contains(&xi[0]) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::default()
                }
            },
            h,
        )
        .unwrap();
        for (a, b) in pu.values().iter().zip(cut.values()) {
            assert!((a - b).norm() < 1e-9);
        }
    }
}
