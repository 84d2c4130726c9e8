//! Exact evaluation of the power-function formulas: the norm of
//! `|x|^(-d/q)`, annulus integrals, the centered-ball quantity, the
//! admissible range of `eps` and the chunk lower bound.
//!
//! The supremum over centered balls of a piecewise profile is also computed
//! here. On each interval between annulus boundaries the objective is
//! smooth; it is maximized by golden-section search in `ln r` together with
//! explicit evaluation at every boundary.

use crate::domain::{Annulus, Ball, MorreyParams, NormMethod, NormReport, PiecewiseRadialPower};
use crate::error::{MorreyError, Result};

/// Relative radius tolerance of the golden-section search.
pub const GOLDEN_TOL: f64 = 1e-12;

/// Outer limit of the centered search, as a multiple of the outermost boundary.
pub const OUTER_SEARCH_FACTOR: f64 = 10.0;

/// `||f||` for `f(x) = |x|^(-d/q)`: `(omega/d)^(1/q) (q/(q-p))^(1/p)`.
pub fn power_norm_exact(params: &MorreyParams) -> f64 {
    let (p, q) = (params.p(), params.q());
    params.unit_ball_volume().powf(1.0 / q) * (q / (q - p)).powf(1.0 / p)
}

/// `int_{lo < |x| < hi} |x|^(-dp/q) dx = omega (hi^a - lo^a) / a` with `a = alpha`.
/// `hi` must be finite.
pub(crate) fn power_integral(params: &MorreyParams, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let alpha = params.alpha();
    let hi_pow = (alpha * hi.ln()).exp();
    let frac = if lo > 0.0 {
        -(alpha * (lo / hi).ln()).exp_m1()
    } else {
        1.0
    };
    params.sphere_area() * hi_pow * frac / alpha
}

/// `int_annulus |x|^(-dp/q) dx`. Unbounded annuli diverge and are rejected.
pub fn annulus_p_integral(params: &MorreyParams, ann: &Annulus) -> Result<f64> {
    if !ann.is_bounded() {
        return Err(MorreyError::InvalidArgument(
            "annulus integral diverges for r_hi = inf".into(),
        ));
    }
    Ok(power_integral(params, ann.r_lo(), ann.r_hi()))
}

/// `|B(0, rho)|^(1/q - 1/p) (int_annulus |f|^p)^(1/p)`.
///
/// The annulus is not clipped to the ball.
pub fn local_quantity(params: &MorreyParams, ball_radius: f64, ann: &Annulus) -> Result<f64> {
    if !(ball_radius.is_finite() && ball_radius > 0.0) {
        return Err(MorreyError::InvalidArgument(format!(
            "ball radius {ball_radius} must be positive"
        )));
    }
    let integral = annulus_p_integral(params, ann)?;
    Ok(morrey_quantity(params, ball_radius, integral))
}

/// `|B(., r)|^(1/q - 1/p) I^(1/p)`, evaluated in log domain.
pub(crate) fn morrey_quantity(params: &MorreyParams, radius: f64, p_integral: f64) -> f64 {
    if p_integral <= 0.0 {
        return 0.0;
    }
    let ln_vol = params.unit_ball_volume().ln() + params.d() as f64 * radius.ln();
    (params.volume_exponent() * ln_vol + p_integral.ln() / params.p()).exp()
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(MorreyError::InvalidArgument(format!(
            "delta {delta} outside (0, 1)"
        )))
    }
}

/// `(1 - (1 - delta)^p)^(q / (dq - dp))`: every `eps` strictly below this
/// makes the chunk lower bound exceed `1 - delta` times the power norm.
pub fn epsilon_upper_bound(params: &MorreyParams, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let gap = -(params.p() * (-delta).ln_1p()).exp_m1();
    Ok((gap.ln() / params.alpha()).exp())
}

/// `(1 - eps^alpha)^(1/p) ||f||`.
pub fn chunk_lower_bound(params: &MorreyParams, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(MorreyError::InvalidArgument(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    let one_minus = -(params.alpha() * epsilon.ln()).exp_m1();
    Ok(one_minus.powf(1.0 / params.p()) * power_norm_exact(params))
}

/// `int_{B(0, r)} |profile|^p`.
pub(crate) fn centered_p_integral(profile: &PiecewiseRadialPower, radius: f64) -> f64 {
    let params = profile.params();
    profile
        .segments()
        .iter()
        .take_while(|s| s.annulus.r_lo() < radius)
        .filter(|s| s.coeff != 0.0)
        .map(|s| {
            let hi = s.annulus.r_hi().min(radius);
            s.coeff.abs().powf(params.p()) * power_integral(params, s.annulus.r_lo(), hi)
        })
        .sum()
}

/// The centered-ball objective `r -> |B(0,r)|^(1/q-1/p) (int_{B(0,r)} |profile|^p)^(1/p)`.
pub fn centered_quantity(profile: &PiecewiseRadialPower, radius: f64) -> f64 {
    morrey_quantity(profile.params(), radius, centered_p_integral(profile, radius))
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Exact supremum over balls centered at the origin.
///
/// For an unbounded outermost segment with coefficient `c` the objective
/// tends to `|c| ||f||` as `r -> inf`; that limit is a candidate even though
/// no finite radius attains it.
pub fn centered_norm(profile: &PiecewiseRadialPower) -> Result<NormReport> {
    let params = profile.params();
    let exact = power_norm_exact(params);
    let breaks = profile.breakpoints();

    if breaks.is_empty() {
        // Single segment (0, inf): constant objective.
        let value = profile.segments()[0].coeff.abs() * exact;
        return Ok(NormReport {
            value,
            argmax_ball: Ball::centered(1.0)?,
            method: NormMethod::ClosedForm,
            abs_uncertainty: 0.0,
        });
    }

    let outer = *breaks.last().expect("nonempty");
    let mut best_r = breaks[0];
    let mut best = centered_quantity(profile, best_r);
    let mut consider = |r: f64, v: f64| {
        if v > best {
            best = v;
            best_r = r;
        }
    };

    for &r in &breaks[1..] {
        consider(r, centered_quantity(profile, r));
    }

    let mut edges: Vec<f64> = breaks.clone();
    edges.push(outer * OUTER_SEARCH_FACTOR);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0].ln(), w[1].ln());
        let (x, v) = golden_max(|x| centered_quantity(profile, x.exp()), lo, hi, GOLDEN_TOL);
        consider(x.exp(), v);
        consider(w[1], centered_quantity(profile, w[1]));
    }

    if !profile.is_bounded() {
        let tail = profile.segments().last().expect("nonempty").coeff.abs() * exact;
        if tail > best {
            best = tail;
            best_r = outer * OUTER_SEARCH_FACTOR;
        }
    }

    if !best.is_finite() {
        return Err(MorreyError::Numerical(format!(
            "centered objective is not finite ({best})"
        )));
    }
    Ok(NormReport {
        value: best,
        argmax_ball: Ball::centered(best_r)?,
        method: NormMethod::ClosedForm,
        abs_uncertainty: 0.0,
    })
}
