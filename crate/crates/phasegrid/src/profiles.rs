//! Sampling/reconstruction profiles φ with pointwise Fourier evaluation.
//!
//! Every profile exposes one fixed representative of its Fourier transform;
//! indicator-type transforms use half-open boxes [-π, π)^d, so e.g. the
//! cardinal-sine profile has φ̂(-π) = 1 and φ̂(π) = 0 in one dimension. The
//! representative matters: the lattice-fold formulas in `measures` are stated
//! pointwise.
//!
//! The central object is the lattice Gram function
//!
//!   τ_{⟨D⟩^s φ}(ξ) = Σ_{k∈Z^d} |⟨ξ+2πk⟩^s φ̂(ξ+2πk)|²,
//!
//! whose essential bounds characterize Bessel systems (τ ≤ B), Riesz bases
//! (A ≤ τ ≤ B) and orthonormal systems (τ ≡ 1) of h-scaled integer
//! translates. All series are evaluated with certified truncation: each kind
//! supplies an analytic envelope and the partial sum is extended until the
//! remaining tail is provably below the requested tolerance.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{bessel_weight, reduce_to_q, C64};

/// sin(t/2)/(t/2), the transform of the unit box 1_{[-1/2,1/2)}.
pub fn box_transform(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        // 4th-order Taylor keeps full precision through the removable zero.
        1.0 - t * t / 24.0
    } else {
        (t / 2.0).sin() / (t / 2.0)
    }
}

/// A sampled Fourier transform with linear interpolation, zero outside the
/// tabulated range.
#[derive(Clone, Debug)]
pub struct FourierTable {
    xi: Vec<f64>,
    values: Vec<C64>,
}

impl FourierTable {
    pub fn new(xi: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if xi.len() != values.len() || xi.len() < 2 {
            return Err(Error::BadParams("table needs >= 2 rows of matching length".into()));
        }
        if xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadParams("table abscissae must be strictly increasing".into()));
        }
        Ok(FourierTable { xi, values })
    }

    pub fn eval(&self, t: f64) -> C64 {
        let (lo, hi) = (self.xi[0], *self.xi.last().unwrap());
        if t < lo || t > hi {
            return C64::default();
        }
        let idx = match self.xi.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i.min(self.xi.len() - 1).max(1),
        };
        let (x0, x1) = (self.xi[idx - 1], self.xi[idx]);
        let w = (t - x0) / (x1 - x0);
        self.values[idx - 1] * (1.0 - w) + self.values[idx] * w
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xi[0], *self.xi.last().unwrap())
    }

    /// Jump points of the chosen representative: the two endpoints, when the
    /// tabulated value there is nonzero.
    pub fn jumps(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.values[0].norm() > 1e-14 {
            out.push(self.xi[0]);
        }
        if self.values.last().unwrap().norm() > 1e-14 {
            out.push(*self.xi.last().unwrap());
        }
        out
    }
}

/// Exponentially shrinking knots t_n = e^{-n} of the slow-tail profile.
fn knot(n: i64) -> f64 {
    (-(n as f64)).exp()
}

/// Piecewise-linear bump peaking at t_n, supported on (t_{n+1}, t_{n-1}).
fn slow_bump(n: i64, t: f64) -> f64 {
    let (lo, mid, hi) = (knot(n + 1), knot(n), knot(n - 1));
    if t > lo && t <= mid {
        (t - lo) / (mid - lo)
    } else if t > mid && t < hi {
        (t - hi) / (mid - hi)
    } else {
        0.0
    }
}

#[derive(Clone, Debug)]
pub enum ProfileKind {
    /// Point sampling; φ̂ ≡ 1.
    DiracDelta,
    /// Cardinal sine; φ̂ = 1_{[-π,π)} per axis (half-open representative).
    Sinc,
    /// Cardinal B-spline of order r; φ̂(t) = (sin(t/2)/(t/2))^{r+1} per axis.
    BSpline(u32),
    /// Haar wavelet (1 on [0,1/2), -1 on [1/2,1)); zero-mean profile.
    Haar,
    /// Gaussian e^{-x²/(2σ²)}; φ̂(t) = σ√(2π) e^{-σ²t²/2} per axis.
    Gaussian { sigma: f64 },
    /// Continuous transform whose Gram-function tails do not vanish
    /// uniformly: bumps of height 1 near 2πn at distance e^{-n}.
    SlowTail,
    /// Tabulated transform with linear interpolation.
    Table(Arc<FourierTable>),
    /// Canonical dual of ⟨D⟩^s·base: transform ⟨ξ⟩^s φ̂(ξ)/τ_{⟨D⟩^s base}(ξ),
    /// set to zero where τ falls below [`TAU_FLOOR`].
    DualOf { base: Arc<Profile>, exponent: f64 },
}

/// Below this value the Gram function counts as zero when forming duals;
/// avoids division blow-up at numerically-zero τ.
pub const TAU_FLOOR: f64 = 1e-12;

/// Description of where a profile's Fourier representative jumps.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpSet {
    Empty,
    /// Some axis coordinate lies on the odd-π lattice {(2n+1)π}.
    OddPiLattice,
    /// Explicit 1-d jump abscissae (no periodic extension implied).
    Points(Vec<f64>),
}

impl JumpSet {
    /// Whether the closure of the jump set contains the point ξ.
    pub fn contains(&self, xi: &[f64], tol: f64) -> bool {
        match self {
            JumpSet::Empty => false,
            JumpSet::OddPiLattice => xi.iter().any(|&t| {
                let r = reduce_to_q(t);
                (r.abs() - PI).abs() <= tol || r <= -PI + tol
            }),
            JumpSet::Points(ps) => {
                xi.iter().any(|&t| ps.iter().any(|&p| (t - p).abs() <= tol))
            }
        }
    }

    pub fn is_lebesgue_null(&self) -> bool {
        true // all supported jump sets are countable unions of points/faces
    }
}

#[derive(Clone, Debug)]
pub struct Profile {
    kind: ProfileKind,
}

impl Profile {
    pub fn delta() -> Self {
        Profile { kind: ProfileKind::DiracDelta }
    }

    pub fn sinc() -> Self {
        Profile { kind: ProfileKind::Sinc }
    }

    pub fn bspline(order: u32) -> Self {
        Profile { kind: ProfileKind::BSpline(order) }
    }

    pub fn haar() -> Self {
        Profile { kind: ProfileKind::Haar }
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::BadParams(format!("gaussian width must be positive, got {sigma}")));
        }
        Ok(Profile { kind: ProfileKind::Gaussian { sigma } })
    }

    /// The slow-tail profile: continuous φ̂ with Gram bound 1, yet
    /// sup_Q σ_φ^R = 1 for every truncation radius R.
    pub fn slow_tail() -> Self {
        Profile { kind: ProfileKind::SlowTail }
    }

    pub fn table(table: FourierTable) -> Self {
        Profile { kind: ProfileKind::Table(Arc::new(table)) }
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Short display name used in reports and errors.
    pub fn name(&self) -> String {
        match &self.kind {
            ProfileKind::DiracDelta => "delta".into(),
            ProfileKind::Sinc => "sinc".into(),
            ProfileKind::BSpline(r) => format!("bspline:{r}"),
            ProfileKind::Haar => "haar".into(),
            ProfileKind::Gaussian { sigma } => format!("gauss:{sigma}"),
            ProfileKind::SlowTail => "ceosc".into(),
            ProfileKind::Table(_) => "table".into(),
            ProfileKind::DualOf { base, exponent } => {
                format!("dual({}, s={exponent})", base.name())
            }
        }
    }

    /// Natural Sobolev exponent for the boundedness condition: 0 for the L²
    /// profiles in the catalog, -1 for point sampling (which only acts on
    /// functions with better-than-L² regularity).
    pub fn default_exponent(&self) -> f64 {
        match &self.kind {
            ProfileKind::DiracDelta => -1.0,
            _ => 0.0,
        }
    }

    /// One axis factor of the chosen Fourier representative.
    pub fn fourier_at_1d(&self, t: f64) -> C64 {
        match &self.kind {
            ProfileKind::DiracDelta => C64::new(1.0, 0.0),
            ProfileKind::Sinc => {
                if (-PI..PI).contains(&t) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::default()
                }
            }
            ProfileKind::BSpline(r) => C64::new(box_transform(t).powi(*r as i32 + 1), 0.0),
            ProfileKind::Haar => {
                if t.abs() < 1e-12 {
                    C64::default()
                } else {
                    let s = (t / 4.0).sin();
                    C64::new(0.0, 4.0 * s * s / t) * C64::new(0.0, -t / 2.0).exp()
                }
            }
            ProfileKind::Gaussian { sigma } => {
                C64::new(sigma * TAU.sqrt() * (-sigma * sigma * t * t / 2.0).exp(), 0.0)
            }
            ProfileKind::SlowTail => {
                let n = (t / TAU).round() as i64;
                if n < 1 {
                    return C64::default();
                }
                let u = t - TAU * n as f64;
                C64::new(slow_bump(n, u).max(0.0).sqrt(), 0.0)
            }
            ProfileKind::Table(tbl) => tbl.eval(t),
            ProfileKind::DualOf { base, exponent } => {
                let tau_b = match tau_1d(base, *exponent, t, 1e-10) {
                    Ok(v) => v,
                    Err(_) => return C64::default(),
                };
                if tau_b <= TAU_FLOOR {
                    C64::default()
                } else {
                    base.fourier_at_1d(t) * bessel_weight(&[t], *exponent) / tau_b
                }
            }
        }
    }

    /// The Fourier representative at a point of ℝ^d (tensor product of axis
    /// factors). Deterministic, no grid dependence.
    pub fn fourier_at(&self, xi: &[f64]) -> C64 {
        xi.iter().map(|&t| self.fourier_at_1d(t)).product()
    }

    /// Where the chosen representative jumps.
    pub fn jump_set(&self) -> JumpSet {
        match &self.kind {
            ProfileKind::Sinc => JumpSet::OddPiLattice,
            ProfileKind::Table(t) => {
                let js = t.jumps();
                if js.is_empty() {
                    JumpSet::Empty
                } else {
                    JumpSet::Points(js)
                }
            }
            ProfileKind::DualOf { base, .. } => base.jump_set(),
            _ => JumpSet::Empty,
        }
    }

    /// Spatial-side evaluation for compactly supported kinds (used by the
    /// exact synthesis path of the reconstruction operator).
    pub fn spatial_at_1d(&self, x: f64) -> Option<f64> {
        match &self.kind {
            ProfileKind::BSpline(r) => Some(cardinal_bspline(*r + 1, x)),
            ProfileKind::Haar => Some(if (0.0..0.5).contains(&x) {
                1.0
            } else if (0.5..1.0).contains(&x) {
                -1.0
            } else {
                0.0
            }),
            ProfileKind::Gaussian { sigma } => Some((-x * x / (2.0 * sigma * sigma)).exp()),
            _ => None,
        }
    }

    /// Half-width of the spatial support where `spatial_at_1d` is available;
    /// Gaussians report their effective (below 1e-16) radius.
    pub fn spatial_radius(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::BSpline(r) => Some((*r as f64 + 1.0) / 2.0),
            ProfileKind::Haar => Some(1.0),
            ProfileKind::Gaussian { sigma } => Some(9.0 * sigma),
            _ => None,
        }
    }

    /// Whether φ interpolates: continuous with φ(0) = 1, φ(k) = 0 on Z∖{0}.
    pub fn is_interpolating(&self) -> bool {
        matches!(self.kind, ProfileKind::Sinc | ProfileKind::BSpline(0) | ProfileKind::BSpline(1))
    }
}

/// Symmetric cardinal B-spline M_k (k ≥ 1 box factors), supported on [-k/2, k/2].
fn cardinal_bspline(k: u32, x: f64) -> f64 {
    if k == 1 {
        return if (-0.5..0.5).contains(&x) { 1.0 } else { 0.0 };
    }
    let km1 = (k - 1) as f64;
    let kk = k as f64;
    ((x + kk / 2.0) * cardinal_bspline(k - 1, x + 0.5)
        + (kk / 2.0 - x) * cardinal_bspline(k - 1, x - 0.5))
        / km1
}

/// |⟨t⟩^s φ̂(t)|² for one axis factor.
fn weighted_term(p: &Profile, s: f64, t: f64) -> f64 {
    let w = bessel_weight(&[t], s);
    w * w * p.fourier_at_1d(t).norm_sqr()
}

/// Power envelope |⟨t⟩^s φ̂(t)|² ≤ c·|t|^{-p} valid for |t| ≥ π.
struct PowerEnvelope {
    c: f64,
    p: f64,
}

fn power_envelope(profile: &Profile, s: f64) -> Result<Option<PowerEnvelope>> {
    let bessel_c = if s > 0.0 { 2f64.powf(s) } else { 1.0 };
    let env = match profile.kind() {
        ProfileKind::Sinc | ProfileKind::Table(_) | ProfileKind::SlowTail => None,
        ProfileKind::DiracDelta => {
            let p = -2.0 * s;
            if p <= 1.0 {
                return Err(Error::NonSummableTail { profile: profile.name(), exponent: s });
            }
            Some(PowerEnvelope { c: bessel_c, p })
        }
        ProfileKind::BSpline(r) => {
            let p = 2.0 * (*r as f64 + 1.0) - 2.0 * s;
            if p <= 1.0 {
                return Err(Error::NonSummableTail { profile: profile.name(), exponent: s });
            }
            Some(PowerEnvelope { c: bessel_c * 4f64.powi(*r as i32 + 1), p })
        }
        ProfileKind::Haar => {
            let p = 2.0 - 2.0 * s;
            if p <= 1.0 {
                return Err(Error::NonSummableTail { profile: profile.name(), exponent: s });
            }
            Some(PowerEnvelope { c: bessel_c * 16.0, p })
        }
        ProfileKind::Gaussian { .. } => None, // handled by the geometric loop
        ProfileKind::DualOf { .. } => None,   // handled via the base identity
    };
    Ok(env)
}

/// Certified bound on Σ_{|k| ≥ K} c·|ξ+2πk|^{-p} for |ξ| ≤ π, K ≥ 1:
/// each term is at most c(π(2k-1))^{-p}, and the sum over k ≥ K is compared
/// with the integral of the monotone envelope.
fn power_tail_bound(c: f64, p: f64, k: usize) -> f64 {
    let k = k as f64;
    let first = (2.0 * k - 1.0).powf(-p);
    let integral = (2.0 * k - 1.0).powf(1.0 - p) / (2.0 * (p - 1.0));
    2.0 * c * PI.powf(-p) * (first + integral)
}

/// One-dimensional Gram series with certified truncation. `min_ring`
/// restricts to lattice offsets |k| ≥ min_ring (used by the σ tails).
fn gram_series_1d(
    profile: &Profile,
    s: f64,
    xi_red: f64,
    tol: f64,
    min_ring: usize,
) -> Result<f64> {
    match profile.kind() {
        // Exactly one lattice translate lands in the half-open support box.
        ProfileKind::Sinc => {
            return Ok(if min_ring == 0 { weighted_term(profile, s, xi_red) } else { 0.0 });
        }
        ProfileKind::Table(tbl) => {
            let (lo, hi) = tbl.range();
            let kmin = ((lo - xi_red) / TAU).floor() as i64 - 1;
            let kmax = ((hi - xi_red) / TAU).ceil() as i64 + 1;
            let mut acc = 0.0;
            for k in kmin..=kmax {
                if (k.unsigned_abs() as usize) < min_ring {
                    continue;
                }
                acc += weighted_term(profile, s, xi_red + TAU * k as f64);
            }
            return Ok(acc);
        }
        ProfileKind::SlowTail => {
            // Closed form: only the bump pair straddling ξ contributes.
            if xi_red <= 0.0 || xi_red >= 1.0 {
                return Ok(0.0);
            }
            let center = (-xi_red.ln()).floor() as i64;
            let mut acc = 0.0;
            for n in (center - 2).max(1)..=(center + 2) {
                if (n as usize) < min_ring {
                    continue;
                }
                let w = bessel_weight(&[xi_red + TAU * n as f64], s);
                acc += w * w * slow_bump(n, xi_red);
            }
            return Ok(acc);
        }
        ProfileKind::Haar if s == 0.0 => {
            // |ψ̂(ξ+2πk)|² = 16 sin⁴(ξ/4 + πk/2)/(ξ+2πk)²; sin⁴ alternates
            // between sin⁴(ξ/4) (even k) and cos⁴(ξ/4) (odd k).
            let se = (xi_red / 4.0).sin().powi(4);
            let ce = (xi_red / 4.0).cos().powi(4);
            return Ok(inverse_square_gram_s0(profile, [se, ce], 16.0, xi_red, tol, min_ring));
        }
        ProfileKind::BSpline(0) if s == 0.0 => {
            // |φ̂(ξ+2πk)|² = 4 sin²(ξ/2)/(ξ+2πk)², the same for every k.
            let c = (xi_red / 2.0).sin().powi(2);
            return Ok(inverse_square_gram_s0(profile, [c, c], 4.0, xi_red, tol, min_ring));
        }
        ProfileKind::DualOf { base, exponent } => {
            // The base Gram function is 2π-periodic, so every dual term is a
            // base term divided by the same τ_base(ξ)²:
            //   τ_{⟨D⟩^s dual}(ξ) = τ_base^{(s+s₀)}(ξ) / τ_base^{(s₀)}(ξ)².
            let denom = tau_1d(base, *exponent, xi_red, tol / 64.0)?;
            if denom <= TAU_FLOOR {
                return Ok(0.0);
            }
            let scaled_tol = (tol * denom * denom / 4.0).max(1e-15);
            let numer = gram_series_1d(base, s + *exponent, xi_red, scaled_tol, min_ring)?;
            return Ok(numer / (denom * denom));
        }
        _ => {}
    }

    // Generic adaptive lattice sum with certified tails.
    let env = power_envelope(profile, s)?;
    let mut acc = if min_ring == 0 { weighted_term(profile, s, xi_red) } else { 0.0 };
    let mut ring = min_ring.max(1);
    loop {
        let limit = (ring * 2).max(ring + 8);
        for k in ring..=limit {
            acc += weighted_term(profile, s, xi_red + TAU * k as f64)
                + weighted_term(profile, s, xi_red - TAU * k as f64);
        }
        ring = limit + 1;
        match &env {
            Some(e) => {
                if power_tail_bound(e.c, e.p, ring) < tol {
                    return Ok(acc);
                }
            }
            None => {
                // Gaussian kind: terms decay super-exponentially; once the
                // outermost evaluated ring lies in the decreasing zone and is
                // below tol/4, the remainder is geometric with ratio < 1/2.
                let t_edge = xi_red.abs() + TAU * (ring - 1) as f64;
                let last = weighted_term(profile, s, t_edge) + weighted_term(profile, s, -t_edge);
                let safe_zone = match profile.kind() {
                    ProfileKind::Gaussian { sigma } => {
                        sigma * sigma * TAU * t_edge > 0.7 + 2.0 * s.abs()
                    }
                    _ => false,
                };
                if safe_zone && 2.0 * last < tol {
                    return Ok(acc);
                }
            }
        }
        if ring > 1 << 22 {
            return Err(Error::NonSummableTail { profile: profile.name(), exponent: s });
        }
    }
}

/// Tail of one arithmetic class Σ_{j≥0} amp/(t0+step·j)² by Euler-Maclaurin
/// with two correction terms. The summand is completely monotone in j, so
/// the remainder is bounded by the first omitted term.
fn em_tail_class(t0: f64, amp: f64, step: f64) -> f64 {
    amp * (1.0 / (step * t0) + 0.5 / (t0 * t0) + step / (6.0 * t0.powi(3)))
}

/// Start index so the Euler-Maclaurin remainder of every class stays below
/// `per_class_tol`: |R| ≤ amp·24·step³/(720·t0⁵).
fn em_start_ring(amp: f64, step: f64, per_class_tol: f64) -> usize {
    let t0_req = (amp * 24.0 * step.powi(3) / (720.0 * per_class_tol.max(1e-300))).powf(0.2);
    ((t0_req + PI) / TAU).ceil().max(8.0) as usize
}

/// Gram series at s = 0 for profiles whose weight has the exact form
/// amp·c_parity/(ξ+2πk)² with c alternating on a period-2 pattern in k:
/// the step wavelet (16·{sin⁴, cos⁴}(ξ/4)) and the unit box (4 sin²(ξ/2),
/// constant). Beyond a direct window the (sign × parity) arithmetic classes
/// are summed by Euler-Maclaurin.
fn inverse_square_gram_s0(
    profile: &Profile,
    coeffs: [f64; 2],
    amp: f64,
    xi_red: f64,
    tol: f64,
    min_ring: usize,
) -> f64 {
    let step = 2.0 * TAU; // each parity class advances by 4π
    let max_c = coeffs[0].max(coeffs[1]).max(1e-3);
    let k0 = em_start_ring(amp * max_c, step, tol / 8.0).max(min_ring);
    let mut acc = 0.0;
    if min_ring == 0 {
        acc += weighted_term(profile, 0.0, xi_red);
    }
    for k in min_ring.max(1)..k0 {
        acc += weighted_term(profile, 0.0, xi_red + TAU * k as f64)
            + weighted_term(profile, 0.0, xi_red - TAU * k as f64);
    }
    for parity in 0..2usize {
        let c = coeffs[parity];
        let ka = if k0 % 2 == parity { k0 } else { k0 + 1 };
        // positive side: t = ξ + 2πk, negative side: |t| = 2πk - ξ.
        acc += em_tail_class(xi_red + TAU * ka as f64, amp * c, step);
        acc += em_tail_class(TAU * ka as f64 - xi_red, amp * c, step);
    }
    acc
}

fn tau_1d(profile: &Profile, s: f64, xi: f64, tol: f64) -> Result<f64> {
    gram_series_1d(profile, s, reduce_to_q(xi), tol, 0)
}

/// The Gram function τ_{⟨D⟩^s φ}(ξ) with certified tail below `tol`.
///
/// In two dimensions only s = 0 is supported, where the series factors into
/// the product of the axis series.
pub fn tau(profile: &Profile, s: f64, xi: &[f64], tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::BadParams("tau tolerance must be positive".into()));
    }
    match xi.len() {
        1 => tau_1d(profile, s, xi[0], tol),
        2 => {
            if s != 0.0 {
                return Err(Error::BadParams(
                    "Gram function with s != 0 is only supported in one dimension".into(),
                ));
            }
            let a = tau_1d(profile, 0.0, xi[0], tol / 2.0)?;
            let b = tau_1d(profile, 0.0, xi[1], tol / 2.0)?;
            Ok(a * b)
        }
        d => Err(Error::BadParams(format!("dimension {d} not supported"))),
    }
}

/// Tail σ_φ^R(ξ) = Σ_{|n| ≥ R} |⟨ξ+2πn⟩^s φ̂(ξ+2πn)|² (one dimension),
/// non-increasing in R, with certified truncation.
pub fn sigma_tail(profile: &Profile, s: f64, r: f64, xi: f64, tol: f64) -> Result<f64> {
    if r <= 0.0 {
        return tau_1d(profile, s, xi, tol);
    }
    let min_ring = r.ceil() as usize;
    gram_series_1d(profile, s, reduce_to_q(xi), tol, min_ring)
}

/// The canonical dual: a profile whose transform is ⟨ξ⟩^s φ̂(ξ)/τ_{⟨D⟩^s φ}(ξ)
/// where the Gram function exceeds [`TAU_FLOOR`], and zero elsewhere.
///
/// Represented as a lazily evaluated quotient (not a sampled table) so the
/// dual-of-dual involution at s = 0 is exact up to the Gram tolerance.
pub fn dual_profile(profile: &Profile, s: f64) -> Result<Profile> {
    // Fail early when the Gram series itself cannot be certified.
    tau_1d(profile, s, 0.37, 1e-6)?;
    Ok(Profile {
        kind: ProfileKind::DualOf { base: Arc::new(profile.clone()), exponent: s },
    })
}

/// Verdict of the translate-system classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisVerdict {
    Orthonormal,
    Riesz,
    BesselOnly,
    Unbounded,
}

impl std::fmt::Display for BasisVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BasisVerdict::Orthonormal => "orthonormal",
            BasisVerdict::Riesz => "riesz",
            BasisVerdict::BesselOnly => "bessel_only",
            BasisVerdict::Unbounded => "unbounded",
        };
        f.write_str(s)
    }
}

/// Result of scanning the Gram function over the fundamental cell.
#[derive(Clone, Debug)]
pub struct BasisClassification {
    pub verdict: BasisVerdict,
    pub lower_a: f64,
    pub upper_b: f64,
    pub grid_points: usize,
}

/// Classify the h-scaled translate system of a profile by the extrema of the
/// Gram function over a uniform grid on [-π, π)^d.
pub fn basis_classify(
    profile: &Profile,
    s: f64,
    grid_points: usize,
    tol: f64,
    dim: usize,
) -> Result<BasisClassification> {
    if grid_points < 64 {
        return Err(Error::BadParams("classification grid needs >= 64 points".into()));
    }
    let tail_tol = (tol / 10.0).min(1e-8);
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for i in 0..grid_points {
        let xi = -PI + TAU * i as f64 / grid_points as f64;
        let v = tau_1d(profile, s, xi, tail_tol)?;
        if !v.is_finite() {
            return Ok(BasisClassification {
                verdict: BasisVerdict::Unbounded,
                lower_a: 0.0,
                upper_b: f64::INFINITY,
                grid_points,
            });
        }
        lower = lower.min(v);
        upper = upper.max(v);
    }
    if dim == 2 {
        if s != 0.0 {
            return Err(Error::BadParams(
                "2-d classification is only supported for s = 0".into(),
            ));
        }
        // tensor structure: extrema of the product are products of extrema
        lower *= lower;
        upper *= upper;
    }
    let verdict = if (lower - 1.0).abs() <= tol && (upper - 1.0).abs() <= tol {
        BasisVerdict::Orthonormal
    } else if lower > tol {
        BasisVerdict::Riesz
    } else {
        BasisVerdict::BesselOnly
    };
    Ok(BasisClassification { verdict, lower_a: lower, upper_b: upper, grid_points })
}

/// Parse a CLI/config profile spec:
/// `delta`, `sinc`, `bspline:<r>`, `haar`, `gauss:<sigma>`, `ceosc`,
/// `table:<path>` (rows: `xi re [im]`, whitespace or comma separated).
pub fn parse_profile_spec(spec: &str) -> Result<Profile> {
    let spec = spec.trim();
    match spec {
        "delta" => return Ok(Profile::delta()),
        "sinc" => return Ok(Profile::sinc()),
        "haar" => return Ok(Profile::haar()),
        "ceosc" => return Ok(Profile::slow_tail()),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("bspline:") {
        let r: u32 = rest
            .parse()
            .map_err(|_| Error::SpecParse(format!("bad b-spline order {rest:?}")))?;
        return Ok(Profile::bspline(r));
    }
    if let Some(rest) = spec.strip_prefix("gauss:") {
        let sigma: f64 = rest
            .parse()
            .map_err(|_| Error::SpecParse(format!("bad gaussian width {rest:?}")))?;
        return Profile::gaussian(sigma);
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(path)?;
        let mut xi = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            if cols.len() < 2 || cols.len() > 3 {
                return Err(Error::SpecParse(format!(
                    "table line {} needs 2 or 3 columns",
                    lineno + 1
                )));
            }
            let parse = |t: &str| -> Result<f64> {
                t.parse().map_err(|_| Error::SpecParse(format!("bad number {t:?}")))
            };
            xi.push(parse(cols[0])?);
            let re = parse(cols[1])?;
            let im = if cols.len() == 3 { parse(cols[2])? } else { 0.0 };
            values.push(C64::new(re, im));
        }
        return Ok(Profile::table(FourierTable::new(xi, values)?));
    }
    Err(Error::SpecParse(format!(
        "unknown profile spec {spec:?} (expected delta|sinc|bspline:<r>|haar|gauss:<sigma>|ceosc|table:<path>)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sinc_representative_is_half_open() {
        let p = Profile::sinc();
        assert_eq!(p.fourier_at_1d(PI), C64::default());
        assert_eq!(p.fourier_at_1d(-PI), C64::new(1.0, 0.0));
        assert_eq!(p.fourier_at_1d(0.0), C64::new(1.0, 0.0));
    }

    #[test]
    fn bspline_transform_values() {
        assert!((Profile::bspline(0).fourier_at_1d(0.0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        // Triangle-function transform at π against a direct quadrature oracle.
        let n = 400_000;
        let mut quad = 0.0;
        for i in 0..n {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
            quad += (1.0 - x.abs()) * (x * PI).cos() * (2.0 / n as f64);
        }
        let spline = Profile::bspline(1).fourier_at_1d(PI).re;
        assert!((spline - quad).abs() < 1e-9, "spline {spline} quad {quad}");
        assert!((spline - 4.0 / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn haar_transform_is_zero_mean() {
        assert_eq!(Profile::haar().fourier_at_1d(0.0), C64::default());
        // Direct quadrature of the step function as transform oracle.
        let n = 2_000_000;
        let xi = 2.3;
        let mut quad = C64::default();
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            let v = if x < 0.5 { 1.0 } else { -1.0 };
            quad += C64::new(0.0, -x * xi).exp() * v / n as f64;
        }
        let ours = Profile::haar().fourier_at_1d(xi);
        assert!((ours - quad).norm() < 1e-6, "ours {ours} quad {quad}");
    }

    #[test]
    fn tau_sinc_is_exactly_one() {
        let p = Profile::sinc();
        for i in 0..512 {
            let xi = -PI + TAU * i as f64 / 512.0;
            assert_eq!(tau(&p, 0.0, &[xi], 1e-12).unwrap(), 1.0);
        }
    }

    #[test]
    fn tau_bspline1_at_zero_is_one() {
        let v = tau(&Profile::bspline(1), 0.0, &[0.0], 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tau_bspline1_at_pi_matches_series_oracle() {
        // Independent oracle: the lattice series at π has terms
        // (2/(π(2n+1)))⁴ and the translates pair up as {n, -n-1}, so the sum
        // over Z is twice the sum over n >= 0; truncated at 1e6 terms.
        let mut oracle = 0.0;
        for n in 0..=1_000_000i64 {
            oracle += 2.0 * (2.0 / (PI * (2 * n + 1) as f64)).powi(4);
        }
        let ours = tau(&Profile::bspline(1), 0.0, &[PI], 1e-9).unwrap();
        assert!((ours - oracle).abs() < 1e-6, "ours {ours} oracle {oracle}");
        assert!((ours - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn tau_delta_needs_negative_exponent() {
        match tau(&Profile::delta(), 0.0, &[0.0], 1e-6) {
            Err(Error::NonSummableTail { .. }) => {}
            other => panic!("expected NonSummableTail, got {other:?}"),
        }
        // s < -1/2 converges in one dimension; closed form of the series:
        // Σ_k 1/(1+4π²k²) = coth(1/2)/2 by the partial-fraction expansion
        // of the hyperbolic cotangent.
        let v = tau(&Profile::delta(), -1.0, &[0.0], 1e-8).unwrap();
        let oracle = 0.5 / 0.5f64.tanh(); // coth(1/2)/2
        assert!((v - oracle).abs() < 1e-7, "v {v} oracle {oracle}");
    }

    #[test]
    fn tau_haar_is_one_by_disjoint_supports() {
        // Integer translates of the step profile have disjoint supports, so
        // the translate system is orthonormal and τ ≡ 1.
        for &xi in &[0.0, 0.5, 1.7, PI - 0.01, -2.0] {
            let v = tau(&Profile::haar(), 0.0, &[xi], 1e-6).unwrap();
            assert!((v - 1.0).abs() < 1e-4, "tau {v} at xi={xi}");
        }
    }

    #[test]
    fn tau_gaussian_certified() {
        let p = Profile::gaussian(1.0).unwrap();
        let v = tau(&p, 0.0, &[1.0], 1e-12).unwrap();
        let oracle: f64 = (-30..=30i64)
            .map(|k| {
                let t: f64 = 1.0 + TAU * k as f64;
                TAU * (-t * t).exp()
            })
            .sum();
        assert!((v - oracle).abs() < 1e-12);
    }

    #[test]
    fn tau_is_periodic() {
        for (p, s) in [
            (Profile::bspline(2), 0.0),
            (Profile::haar(), 0.0),
            (Profile::gaussian(0.8).unwrap(), 1.0),
        ] {
            for &xi in &[0.3, -1.2, 2.9] {
                let a = tau(&p, s, &[xi], 1e-9).unwrap();
                let b = tau(&p, s, &[xi + TAU], 1e-9).unwrap();
                let c = tau(&p, s, &[xi - 3.0 * TAU], 1e-9).unwrap();
                assert!((a - b).abs() < 1e-10);
                assert!((a - c).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tau_2d_is_tensor_product() {
        let p = Profile::bspline(1);
        let a = tau(&p, 0.0, &[0.7, -1.3], 1e-9).unwrap();
        let b = tau(&p, 0.0, &[0.7], 1e-9).unwrap() * tau(&p, 0.0, &[-1.3], 1e-9).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn sigma_sinc_vanishes_beyond_support() {
        assert_eq!(sigma_tail(&Profile::sinc(), 0.0, 2.0, 0.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn sigma_bspline_tail_small_and_consistent() {
        let p = Profile::bspline(1);
        let tau_pi = tau(&p, 0.0, &[PI], 1e-10).unwrap();
        let mut partial = 0.0;
        for n in -9i64..=9 {
            partial += weighted_term(&p, 0.0, PI + TAU * n as f64);
        }
        let sig = sigma_tail(&p, 0.0, 10.0, PI, 1e-10).unwrap();
        assert!(sig > 0.0 && sig < 1e-3);
        assert!((sig - (tau_pi - partial)).abs() < 1e-9);
    }

    #[test]
    fn sigma_non_increasing_in_r() {
        let p = Profile::haar();
        let mut last = f64::INFINITY;
        for r in [1.0, 2.0, 5.0, 10.0, 20.0] {
            let v = sigma_tail(&p, 0.0, r, 1.1, 1e-6).unwrap();
            assert!(v <= last + 1e-12);
            last = v;
        }
    }

    #[test]
    fn slow_tail_profile_properties() {
        let p = Profile::slow_tail();
        // Bump peaks at 2πn + t_n.
        for n in 1..=6i64 {
            let v = p.fourier_at_1d(TAU * n as f64 + knot(n));
            assert!((v.re - 1.0).abs() < 1e-12, "peak at n={n}: {v}");
        }
        assert_eq!(p.fourier_at_1d(PI), C64::default());
        // τ = 1 inside (0, t_1).
        let xi = 0.5 * (-5.0f64).exp();
        assert!((tau(&p, 0.0, &[xi], 1e-12).unwrap() - 1.0).abs() < 1e-12);
        // τ vanishes for ξ ≤ 0.
        assert_eq!(tau(&p, 0.0, &[-0.3], 1e-12).unwrap(), 0.0);
        // σ^n ≡ 1 on (0, t_{n+1}): the tails never die out uniformly.
        for r in [2.0, 5.0, 10.0] {
            let probe = 0.5 * knot(r as i64 + 1);
            let v = sigma_tail(&p, 0.0, r, probe, 1e-12).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "sigma^{r} = {v}");
        }
    }

    #[test]
    fn sigma_tails_vanish_for_decaying_profiles() {
        for p in [
            Profile::sinc(),
            Profile::bspline(0),
            Profile::bspline(1),
            Profile::gaussian(1.0).unwrap(),
            Profile::haar(),
        ] {
            let s60 = sigma_tail(&p, 0.0, 60.0, 1.0, 1e-6).unwrap();
            let s2 = sigma_tail(&p, 0.0, 2.0, 1.0, 1e-6).unwrap();
            assert!(s60 <= s2 + 1e-12);
            assert!(s60 < 0.02, "{}: sigma^60 = {s60}", p.name());
        }
    }

    #[test]
    fn tau_grid_refinement_stability_for_continuous_transforms() {
        // Decaying profiles have continuous τ; probe the modulus of
        // continuity at a few points.
        for p in [Profile::bspline(1), Profile::gaussian(1.0).unwrap(), Profile::haar()] {
            for &xi in &[0.3, 1.9, -2.4] {
                let a = tau(&p, 0.0, &[xi], 1e-9).unwrap();
                let b = tau(&p, 0.0, &[xi + 1e-8], 1e-9).unwrap();
                assert!((a - b).abs() < 1e-6, "{} jumps near {xi}", p.name());
            }
        }
    }

    #[test]
    fn dual_of_sinc_is_sinc_on_grid() {
        let d = dual_profile(&Profile::sinc(), 0.0).unwrap();
        for i in 0..64 {
            let xi = -PI + TAU * i as f64 / 64.0;
            assert!((d.fourier_at_1d(xi) - Profile::sinc().fourier_at_1d(xi)).norm() < 1e-10);
        }
    }

    #[test]
    fn dual_bspline1_value_at_pi() {
        // φ̂(π)/τ(π) = (4/π²)/(1/3) = 12/π².
        let d = dual_profile(&Profile::bspline(1), 0.0).unwrap();
        let v = d.fourier_at_1d(PI);
        assert!((v.re - 12.0 / (PI * PI)).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn dual_is_involution_where_tau_positive() {
        let p = Profile::bspline(1);
        let dd = dual_profile(&dual_profile(&p, 0.0).unwrap(), 0.0).unwrap();
        for &xi in &[0.0, 0.5, 1.5, PI, -2.2] {
            let a = dd.fourier_at_1d(xi);
            let b = p.fourier_at_1d(xi);
            assert!((a - b).norm() < 1e-8, "xi={xi}: {a} vs {b}");
        }
    }

    #[test]
    fn classify_sinc_orthonormal() {
        let c = basis_classify(&Profile::sinc(), 0.0, 512, 1e-9, 1).unwrap();
        assert_eq!(c.verdict, BasisVerdict::Orthonormal);
        assert_eq!(c.lower_a, 1.0);
        assert_eq!(c.upper_b, 1.0);
    }

    #[test]
    fn classify_bspline1_riesz_with_third_lower_bound() {
        let c = basis_classify(&Profile::bspline(1), 0.0, 512, 1e-6, 1).unwrap();
        assert_eq!(c.verdict, BasisVerdict::Riesz);
        assert!((c.lower_a - 1.0 / 3.0).abs() < 1e-3, "A = {}", c.lower_a);
        assert!((c.upper_b - 1.0).abs() < 1e-9, "B = {}", c.upper_b);
    }

    #[test]
    fn classify_haar_bounds_are_unit() {
        // Disjoint supports make the translate system orthonormal: both Gram
        // bounds sit at 1 (in particular the Riesz bounds are positive).
        let c = basis_classify(&Profile::haar(), 0.0, 128, 1e-3, 1).unwrap();
        assert!((c.lower_a - 1.0).abs() < 1e-3);
        assert!((c.upper_b - 1.0).abs() < 1e-3);
        assert_eq!(c.verdict, BasisVerdict::Orthonormal);
    }

    #[test]
    fn classify_slow_tail_is_bessel_only() {
        let c = basis_classify(&Profile::slow_tail(), 0.0, 128, 1e-6, 1).unwrap();
        assert_eq!(c.verdict, BasisVerdict::BesselOnly);
        assert!(c.upper_b <= 1.0 + 1e-9);
    }

    #[test]
    fn bspline_spatial_evaluation() {
        let b0 = Profile::bspline(0);
        assert_eq!(b0.spatial_at_1d(0.0), Some(1.0));
        assert_eq!(b0.spatial_at_1d(0.7), Some(0.0));
        let b1 = Profile::bspline(1);
        assert!((b1.spatial_at_1d(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((b1.spatial_at_1d(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(b1.spatial_at_1d(1.3), Some(0.0));
        // B-splines integrate to one.
        let b3 = Profile::bspline(3);
        let n = 40_000;
        let mut total = 0.0;
        for i in 0..n {
            let x = -2.5 + 5.0 * (i as f64 + 0.5) / n as f64;
            total += b3.spatial_at_1d(x).unwrap() * 5.0 / n as f64;
        }
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn parse_specs() {
        assert!(matches!(parse_profile_spec("sinc").unwrap().kind(), ProfileKind::Sinc));
        assert!(matches!(
            parse_profile_spec("bspline:2").unwrap().kind(),
            ProfileKind::BSpline(2)
        ));
        assert!(parse_profile_spec("gauss:0.5").is_ok());
        assert!(parse_profile_spec("nonsense").is_err());
    }

    proptest! {
        #[test]
        fn tau_periodicity_property(xi in -10.0f64..10.0, which in 0usize..3) {
            let p = match which {
                0 => Profile::bspline(1),
                1 => Profile::haar(),
                _ => Profile::gaussian(1.2).unwrap(),
            };
            let a = tau(&p, 0.0, &[xi], 1e-9).unwrap();
            let b = tau(&p, 0.0, &[xi + TAU], 1e-9).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }

        #[test]
        fn sigma_below_tau(xi in -3.0f64..3.0, r in 1.0f64..20.0) {
            let p = Profile::bspline(2);
            let t = tau(&p, 0.0, &[xi], 1e-10).unwrap();
            let s = sigma_tail(&p, 0.0, r, xi, 1e-10).unwrap();
            prop_assert!(s <= t + 1e-9);
            prop_assert!(s >= -1e-12);
        }
    }
}
