//! `int_{B(a,R)} |profile|^p` through the radial reduction
//! `int_0^inf g(r) A_d(r; a, R) dr`.
//!
//! The part of the ball containing the whole sphere `{|x| = r}`
//! (`r <= R - a`) is integrated with closed-form annulus primitives. On the
//! shell `|R - a| < r < R + a` the substitution `u = r^alpha` turns
//! `r^(alpha - 1) dr` into `du / alpha`, leaving the bounded integrand
//! `fraction(u^(1/alpha))`. Its square-root behaviour at both shell edges is
//! removed by the map `u = u0 + (u1 - u0)(1 - cos(pi s))/2` before
//! Gauss-Legendre quadrature in `s`.

use std::f64::consts::PI;

use crate::closedform::power_integral;
use crate::domain::{Ball, MorreyParams, PiecewiseRadialPower};

use super::geometry::SphereInBall;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn_1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pn_1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule on `[0, 1]` composed with the cosine map, stored as
/// positions `m_i` in `[0, 1]` and weights `W_i` with
/// `int_{u0}^{u1} g ~ (u1 - u0) sum_i W_i g(u0 + (u1 - u0) m_i)`.
#[derive(Debug, Clone)]
pub(crate) struct MappedRule {
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl MappedRule {
    pub(crate) fn new(points: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points);
        let (positions, weights) = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| {
                let s = 0.5 * (x + 1.0);
                let m = 0.5 * (1.0 - (PI * s).cos());
                (m, 0.5 * w * 0.5 * PI * (PI * s).sin())
            })
            .unzip();
        Self { positions, weights }
    }

    pub(crate) fn integrate<F: Fn(f64) -> f64>(&self, u0: f64, u1: f64, g: F) -> f64 {
        let span = u1 - u0;
        let sum: f64 = self
            .positions
            .iter()
            .zip(&self.weights)
            .map(|(&m, &w)| w * g(u0 + span * m))
            .sum();
        span * sum
    }
}

/// Reusable evaluator of ball integrals for one parameter triple.
#[derive(Debug, Clone)]
pub(crate) struct BallIntegrator {
    params: MorreyParams,
    sphere: SphereInBall,
    rule: MappedRule,
}

impl BallIntegrator {
    pub(crate) fn new(params: MorreyParams, quad_points: usize) -> Self {
        Self {
            params,
            sphere: SphereInBall::new(params.d()),
            rule: MappedRule::new(quad_points.max(1)),
        }
    }

    pub(crate) fn integrate(&self, profile: &PiecewiseRadialPower, ball: &Ball) -> f64 {
        let params = &self.params;
        let (a, radius) = (ball.center_dist(), ball.radius());
        let p = params.p();
        let alpha = params.alpha();
        let inv_alpha = 1.0 / alpha;
        let full_hi = (radius - a).max(0.0);
        let shell_lo = (radius - a).abs();
        let shell_hi = radius + a;

        let mut total = 0.0;
        for seg in profile.segments() {
            let (lo, hi) = (seg.annulus.r_lo(), seg.annulus.r_hi());
            if seg.coeff == 0.0 || lo >= shell_hi {
                continue;
            }
            let weight = seg.coeff.abs().powf(p);
            total += weight * power_integral(params, lo, hi.min(full_hi));

            if a > 0.0 {
                let x0 = lo.max(shell_lo);
                let x1 = hi.min(shell_hi);
                if x1 > x0 {
                    let u0 = (alpha * x0.ln()).exp();
                    let u1 = (alpha * x1.ln()).exp();
                    let shell = self.rule.integrate(u0, u1, |u| {
                        let r = (inv_alpha * u.ln()).exp();
                        self.sphere.partial_fraction(a, radius, r)
                    });
                    total += weight * params.sphere_area() * inv_alpha * shell;
                }
            }
        }
        total
    }
}
