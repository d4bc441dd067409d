//! Separable phase-space test functions.
//!
//! Pairings accept finite sums of product terms φ(x)⊗χ(ξ) whose factors are
//! closed-form smooth windows with a certified localization radius: outside
//! `center ± radius` the factor carries a squared-mass fraction below 1e-10.
//! That radius drives the lattice-fold truncation in discrete pairings, where
//! the ξ factor must be localized for the pairing to be defined at all.

use crate::error::{Error, Result};

/// One scalar factor of a separable test function.
#[derive(Clone, Debug)]
pub enum Factor {
    /// amp·e^{-(t-c)²/(2w²)}
    Gaussian { center: f64, width: f64, amp: f64 },
    /// amp·cos²(π(t-c)/(2W)) on |t-c| ≤ W, zero outside (compact support).
    RaisedCosine { center: f64, half_width: f64, amp: f64 },
    /// amp·((t-c)/w)^degree·e^{-(t-c)²/(2w²)} (polynomial × Gaussian).
    PolyGaussian { center: f64, width: f64, degree: u32, amp: f64 },
    /// The constant 1; no localization radius.
    One,
}

impl Factor {
    pub fn gaussian(center: f64, width: f64) -> Self {
        Factor::Gaussian { center, width, amp: 1.0 }
    }

    pub fn raised_cosine(center: f64, half_width: f64) -> Self {
        Factor::RaisedCosine { center, half_width, amp: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Factor::Gaussian { center, width, amp } => {
                let z = (t - center) / width;
                amp * (-z * z / 2.0).exp()
            }
            Factor::RaisedCosine { center, half_width, amp } => {
                let z = (t - center) / half_width;
                if z.abs() >= 1.0 {
                    0.0
                } else {
                    let c = (std::f64::consts::FRAC_PI_2 * z).cos();
                    amp * c * c
                }
            }
            Factor::PolyGaussian { center, width, degree, amp } => {
                let z = (t - center) / width;
                amp * z.powi(degree as i32) * (-z * z / 2.0).exp()
            }
            Factor::One => 1.0,
        }
    }

    /// Center of localization (0 for the constant factor).
    pub fn center(&self) -> f64 {
        match *self {
            Factor::Gaussian { center, .. }
            | Factor::RaisedCosine { center, .. }
            | Factor::PolyGaussian { center, .. } => center,
            Factor::One => 0.0,
        }
    }

    /// Certified localization radius: squared mass outside center ± radius is
    /// below 1e-10 of the total. `None` for the constant factor.
    pub fn radius(&self) -> Option<f64> {
        match *self {
            Factor::Gaussian { width, .. } => Some(8.0 * width),
            Factor::RaisedCosine { half_width, .. } => Some(half_width),
            Factor::PolyGaussian { width, degree, .. } => {
                Some(8.0 * width * (1.0 + degree as f64))
            }
            Factor::One => None,
        }
    }

    /// Smallest scale of variation, used to choose quadrature resolutions.
    pub fn variation_scale(&self) -> f64 {
        match *self {
            Factor::Gaussian { width, .. } => width,
            Factor::RaisedCosine { half_width, .. } => half_width / 2.0,
            Factor::PolyGaussian { width, degree, .. } => width / (1.0 + degree as f64),
            Factor::One => f64::INFINITY,
        }
    }

    /// Whether the factor is non-negative everywhere.
    pub fn is_non_negative(&self) -> bool {
        match *self {
            Factor::Gaussian { amp, .. } | Factor::RaisedCosine { amp, .. } => amp >= 0.0,
            Factor::PolyGaussian { degree, amp, .. } => degree % 2 == 0 && amp >= 0.0,
            Factor::One => true,
        }
    }

    /// The factor t ↦ f(c·t) (argument rescaling; used by the scale-change
    /// identities).
    pub fn scale_argument(&self, c: f64) -> Factor {
        match *self {
            Factor::Gaussian { center, width, amp } => {
                Factor::Gaussian { center: center / c, width: width / c.abs(), amp }
            }
            Factor::RaisedCosine { center, half_width, amp } => Factor::RaisedCosine {
                center: center / c,
                half_width: half_width / c.abs(),
                amp,
            },
            Factor::PolyGaussian { center, width, degree, amp } => Factor::PolyGaussian {
                center: center / c,
                width: width / c.abs(),
                degree,
                amp: amp * if c < 0.0 && degree % 2 == 1 { -1.0 } else { 1.0 },
            },
            Factor::One => Factor::One,
        }
    }

    /// The factor t ↦ f(t - shift).
    pub fn translate(&self, shift: f64) -> Factor {
        let mut out = self.clone();
        match &mut out {
            Factor::Gaussian { center, .. }
            | Factor::RaisedCosine { center, .. }
            | Factor::PolyGaussian { center, .. } => *center += shift,
            Factor::One => {}
        }
        out
    }

    /// The factor t ↦ f(-t).
    pub fn negate_argument(&self) -> Factor {
        self.scale_argument(-1.0)
    }
}

/// A product of per-axis factors: a scalar function on ℝ^d (d = factor count).
#[derive(Clone, Debug)]
pub struct AxisProduct {
    pub factors: Vec<Factor>,
}

impl AxisProduct {
    pub fn new_1d(f: Factor) -> Self {
        AxisProduct { factors: vec![f] }
    }

    pub fn new_2d(f0: Factor, f1: Factor) -> Self {
        AxisProduct { factors: vec![f0, f1] }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        self.factors.iter().zip(t).map(|(f, &x)| f.eval(x)).product()
    }

    pub fn is_non_negative(&self) -> bool {
        self.factors.iter().all(|f| f.is_non_negative())
    }
}

/// One separable term φ(x)⊗χ(ξ).
#[derive(Clone, Debug)]
pub struct SeparableTerm {
    pub x: AxisProduct,
    pub xi: AxisProduct,
}

/// A finite sum of separable phase-space terms.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub terms: Vec<SeparableTerm>,
}

impl TestFunction {
    pub fn separable_1d(x: Factor, xi: Factor) -> Self {
        TestFunction {
            terms: vec![SeparableTerm {
                x: AxisProduct::new_1d(x),
                xi: AxisProduct::new_1d(xi),
            }],
        }
    }

    pub fn separable_2d(x: AxisProduct, xi: AxisProduct) -> Self {
        TestFunction { terms: vec![SeparableTerm { x, xi }] }
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map_or(1, |t| t.x.dim())
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.x.eval(x) * t.xi.eval(xi)).sum()
    }

    pub fn is_non_negative(&self) -> bool {
        // sufficient condition: a single term with non-negative factors,
        // or all terms non-negative
        self.terms.iter().all(|t| t.x.is_non_negative() && t.xi.is_non_negative())
    }
}

/// Parse a factor spec like `gauss:0,1`, `gauss:0,1,2.5`, `rcos:3.14,0.8`,
/// `poly:0,1,2`, `one`.
fn parse_factor(spec: &str) -> Result<Factor> {
    let spec = spec.trim();
    if spec == "one" {
        return Ok(Factor::One);
    }
    let (name, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::SpecParse(format!("factor {spec:?} needs name:args")))?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::SpecParse(format!("bad number {t:?} in {spec:?}")))
        })
        .collect::<Result<_>>()?;
    match (name, nums.len()) {
        ("gauss", 2) => Ok(Factor::Gaussian { center: nums[0], width: nums[1], amp: 1.0 }),
        ("gauss", 3) => Ok(Factor::Gaussian { center: nums[0], width: nums[1], amp: nums[2] }),
        ("rcos", 2) => {
            Ok(Factor::RaisedCosine { center: nums[0], half_width: nums[1], amp: 1.0 })
        }
        ("rcos", 3) => {
            Ok(Factor::RaisedCosine { center: nums[0], half_width: nums[1], amp: nums[2] })
        }
        ("poly", 3) => Ok(Factor::PolyGaussian {
            center: nums[0],
            width: nums[1],
            degree: nums[2] as u32,
            amp: 1.0,
        }),
        ("poly", 4) => Ok(Factor::PolyGaussian {
            center: nums[0],
            width: nums[1],
            degree: nums[2] as u32,
            amp: nums[3],
        }),
        _ => Err(Error::SpecParse(format!("unknown factor spec {spec:?}"))),
    }
}

/// Parse a test-function spec: terms joined by `+`, each term
/// `<xfactor>_x:<args> x <xifactor>_xi:<args>`, e.g.
/// `gauss_x:0,1 x gauss_xi:2,0.25`.
pub fn parse_testfn_spec(spec: &str) -> Result<TestFunction> {
    let mut terms = Vec::new();
    for term in spec.split('+') {
        let parts: Vec<&str> = term.split(" x ").map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::SpecParse(format!(
                "term {term:?} must have the form '<f>_x:<args> x <g>_xi:<args>'"
            )));
        }
        let xs = parts[0].replace("_x:", ":").replace("_x", "");
        let xis = parts[1].replace("_xi:", ":").replace("_xi", "");
        terms.push(SeparableTerm {
            x: AxisProduct::new_1d(parse_factor(&xs)?),
            xi: AxisProduct::new_1d(parse_factor(&xis)?),
        });
    }
    if terms.is_empty() {
        return Err(Error::SpecParse("empty test-function spec".into()));
    }
    Ok(TestFunction { terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_radius_certifies_mass() {
        let f = Factor::gaussian(1.0, 0.5);
        let r = f.radius().unwrap();
        // squared-mass tail outside the radius, by quadrature
        let n = 200_000;
        let mut inside = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            let t = 1.0 - 3.0 * r + 6.0 * r * (i as f64 + 0.5) / n as f64;
            let v = f.eval(t) * f.eval(t);
            total += v;
            if (t - 1.0).abs() <= r {
                inside += v;
            }
        }
        assert!((total - inside) / total < 1e-10);
    }

    #[test]
    fn raised_cosine_is_compact_and_smooth() {
        let f = Factor::raised_cosine(0.0, 2.0);
        assert_eq!(f.eval(2.0), 0.0);
        assert_eq!(f.eval(-2.5), 0.0);
        assert!((f.eval(0.0) - 1.0).abs() < 1e-15);
        // C¹ continuity at the edge
        let eps = 1e-6;
        assert!(f.eval(2.0 - eps) < 1e-10);
    }

    #[test]
    fn scale_argument_matches_composition() {
        let f = Factor::gaussian(1.5, 0.4);
        let g = f.scale_argument(2.0);
        for &t in &[-1.0, 0.0, 0.3, 0.75, 2.0] {
            assert!((g.eval(t) - f.eval(2.0 * t)).abs() < 1e-14);
        }
        let h = f.negate_argument();
        for &t in &[-2.0, -0.3, 0.9] {
            assert!((h.eval(t) - f.eval(-t)).abs() < 1e-14);
        }
    }

    #[test]
    fn parse_round_trip() {
        let tf = parse_testfn_spec("gauss_x:0,1 x gauss_xi:2,0.25").unwrap();
        assert_eq!(tf.terms.len(), 1);
        assert!((tf.eval(&[0.0], &[2.0]) - 1.0).abs() < 1e-14);
        let two =
            parse_testfn_spec("gauss_x:0,1 x rcos_xi:3.14,0.5 + one_x x gauss_xi:0,1").unwrap();
        assert_eq!(two.terms.len(), 2);
        assert!(matches!(two.terms[1].x.factors[0], Factor::One));
        assert!(parse_testfn_spec("gauss:0").is_err());
    }
}
