//! Brute-force Morrey norms, including off-center balls. Serves as the
//! independent oracle for the closed forms in [`crate::closedform`].

mod geometry;
mod integrate;
mod montecarlo;
mod search;

pub use geometry::{cap_angle_integral, cap_angle_integral_simpson, SphereInBall};
pub use integrate::gauss_legendre;
pub use montecarlo::{ball_p_integral_mc, McEstimate};

use crate::closedform::morrey_quantity;
use crate::domain::{Ball, NormMethod, NormReport, PiecewiseRadialPower};
use crate::error::{MorreyError, Result};

use integrate::BallIntegrator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Number of center offsets `a/R` in the grid stage.
    pub center_grid: usize,
    /// Number of log-spaced radii in the grid stage (annulus boundaries are added).
    pub radius_grid: usize,
    /// Gauss-Legendre points per shell panel.
    pub quad_points: usize,
    pub mc_samples: usize,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            center_grid: 200,
            radius_grid: 200,
            quad_points: 32,
            mc_samples: 1_000_000,
            rng_seed: 0x5eed,
        }
    }
}

impl SearchConfig {
    /// Coarser grid used when many norms are needed, e.g. every signed
    /// combination of a witness family.
    pub fn coarse() -> Self {
        Self {
            center_grid: 48,
            radius_grid: 96,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("center_grid", self.center_grid),
            ("radius_grid", self.radius_grid),
            ("quad_points", self.quad_points),
            ("mc_samples", self.mc_samples),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(MorreyError::InvalidArgument(format!("{name} must be >= 1"))),
            None => Ok(()),
        }
    }
}

/// `int_B |profile|^p` via the radial reduction with shell quadrature.
pub fn ball_p_integral(profile: &PiecewiseRadialPower, ball: &Ball, cfg: &SearchConfig) -> Result<f64> {
    cfg.validate()?;
    let value = BallIntegrator::new(*profile.params(), cfg.quad_points).integrate(profile, ball);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(MorreyError::Numerical(format!("ball integral is {value}")))
    }
}

/// `|B|^(1/q - 1/p) (int_B |profile|^p)^(1/p)` for one ball.
pub fn ball_quantity(profile: &PiecewiseRadialPower, ball: &Ball, cfg: &SearchConfig) -> Result<f64> {
    let integral = ball_p_integral(profile, ball, cfg)?;
    Ok(morrey_quantity(profile.params(), ball.radius(), integral))
}

/// Grid-plus-refinement estimate of the Morrey norm.
///
/// Bounded profiles are searched over off-center balls. Profiles with an
/// unbounded outer segment are searched over centered balls only and fail
/// with [`MorreyError::Divergent`] when the objective still grows at the
/// outer edge of the window.
pub fn morrey_norm_numeric(profile: &PiecewiseRadialPower, cfg: &SearchConfig) -> Result<NormReport> {
    cfg.validate()?;
    search::search(profile, cfg)
}

/// Monte Carlo evaluation of the ball quantity at a fixed ball.
pub fn ball_quantity_mc(profile: &PiecewiseRadialPower, ball: &Ball, cfg: &SearchConfig) -> Result<NormReport> {
    cfg.validate()?;
    let est = ball_p_integral_mc(profile, ball, cfg.mc_samples, cfg.rng_seed)?;
    let value = morrey_quantity(profile.params(), ball.radius(), est.value);
    // d(I^(1/p)) = I^(1/p - 1) dI / p
    let abs_uncertainty = if est.value > 0.0 {
        value * est.std_err / (profile.params().p() * est.value)
    } else {
        0.0
    };
    Ok(NormReport {
        value,
        argmax_ball: *ball,
        method: NormMethod::MonteCarlo,
        abs_uncertainty,
    })
}

/// True when `|profile|` is radially nonincreasing on all of `R^d`, checked
/// at every boundary. The profile is zero inside its inner radius and in
/// gaps. This is sufficient for the supremum to be attained on centered
/// balls.
pub fn monotone_profile_check(profile: &PiecewiseRadialPower) -> bool {
    let s = profile.params().power_exponent();
    let mut prev = f64::INFINITY;
    let mut prev_hi = profile.inner_radius();
    let mut step = |v: f64| {
        let ok = v <= prev;
        prev = v;
        ok
    };
    if prev_hi > 0.0 {
        step(0.0);
    }
    for seg in profile.segments() {
        let (lo, hi) = (seg.annulus.r_lo(), seg.annulus.r_hi());
        let c = seg.coeff.abs();
        if lo > prev_hi && !step(0.0) {
            return false;
        }
        let at_lo = if lo == 0.0 {
            if c == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            c * lo.powf(-s)
        };
        let at_hi = if hi.is_finite() { c * hi.powf(-s) } else { 0.0 };
        if !step(at_lo) || !step(at_hi) {
            return false;
        }
        prev_hi = hi;
    }
    true
}
