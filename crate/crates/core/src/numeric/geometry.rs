//! Measure of an origin-centered sphere `{|x| = r}` lying inside an
//! off-center ball `B(a, R)`.

use crate::domain::{sphere_area, Ball};

/// `int_0^theta sin^m(t) dt` by the reduction formula
/// `J_m = -sin^(m-1) cos / m + (m-1)/m J_(m-2)`.
pub fn cap_angle_integral(m: usize, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let mut acc = if m.is_multiple_of(2) { theta } else { 1.0 - c };
    let mut k = if m.is_multiple_of(2) { 2 } else { 3 };
    let mut s_pow = if m.is_multiple_of(2) { s } else { s * s };
    while k <= m {
        acc = -s_pow * c / k as f64 + (k as f64 - 1.0) / k as f64 * acc;
        s_pow *= s * s;
        k += 2;
    }
    acc
}

/// Adaptive Simpson evaluation of `int_0^theta sin^m(t) dt` to absolute
/// tolerance `tol`. Reference path for [`cap_angle_integral`].
pub fn cap_angle_integral_simpson(m: usize, theta: f64, tol: f64) -> f64 {
    let f = |t: f64| t.sin().powi(m as i32);
    let (fa, fm, fb) = (f(0.0), f(0.5 * theta), f(theta));
    let whole = theta / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(&f, 0.0, theta, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Evaluates the fraction of the sphere `{|x| = r}` in `R^d` that lies in a ball.
#[derive(Debug, Clone, Copy)]
pub struct SphereInBall {
    d: usize,
    /// `J_(d-2)(pi)`, the full angular integral.
    full_angle: f64,
}

impl SphereInBall {
    pub fn new(d: usize) -> Self {
        let full_angle = if d >= 2 {
            cap_angle_integral(d - 2, std::f64::consts::PI)
        } else {
            1.0
        };
        Self { d, full_angle }
    }

    /// Cosine of the half-angle of the cap `{|x| = r} cap B(a, R)`, clamped to `[-1, 1]`.
    pub fn cap_cosine(a: f64, radius: f64, r: f64) -> f64 {
        (((a - radius) * (a + radius) + r * r) / (2.0 * a * r)).clamp(-1.0, 1.0)
    }

    /// Fraction in `[0, 1]` of the sphere of radius `r` inside the ball.
    pub fn fraction(&self, ball: &Ball, r: f64) -> f64 {
        let (a, radius) = (ball.center_dist(), ball.radius());
        if r <= radius - a {
            return 1.0;
        }
        if r >= radius + a {
            return 0.0;
        }
        self.partial_fraction(a, radius, r)
    }

    /// Fraction for `|R - a| < r < R + a` (no range checks).
    pub(crate) fn partial_fraction(&self, a: f64, radius: f64, r: f64) -> f64 {
        if self.d == 1 {
            // Exactly one of the two points +-r lies in the interval.
            return 0.5;
        }
        let theta = Self::cap_cosine(a, radius, r).acos();
        (cap_angle_integral(self.d - 2, theta) / self.full_angle).clamp(0.0, 1.0)
    }

    /// Surface measure `A_d(r; a, R)` of the part of `{|x| = r}` inside the ball.
    pub fn measure(&self, ball: &Ball, r: f64) -> f64 {
        let area = sphere_area(self.d).expect("d >= 1");
        area * r.powi(self.d as i32 - 1) * self.fraction(ball, r)
    }
}
