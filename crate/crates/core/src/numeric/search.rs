//! Two-stage supremum search over balls `B(a, R)`: a `(ln R, a/R)` grid
//! followed by Nelder-Mead refinement from the best cells.
//!
//! The search window is derived from the profile rather than fixed:
//!
//! * balls with `R` beyond the outermost boundary are dominated by the
//!   centered ball at that boundary (same integral at most, larger volume);
//! * a ball with `t = a/R > 1` misses the origin, so on it
//!   `|profile| <= c_max (a - R)^(-d/q)` and its quantity is at most
//!   `c_max kappa^(1/q) (t - 1)^(-d/q)`. Once that bound drops below the best
//!   centered value the ball cannot win, which caps `t` at `T`;
//! * a ball with `(T + 1) R` below the innermost positive boundary either
//!   sits in the central hole or inside the innermost pure-power piece, where
//!   the centered balls already achieve the maximum.

use rayon::prelude::*;

use crate::closedform::morrey_quantity;
use crate::domain::{Ball, NormMethod, NormReport, PiecewiseRadialPower};
use crate::error::{MorreyError, Result};

use super::integrate::BallIntegrator;
use super::SearchConfig;

/// Upper cap on `a/R`.
const T_CAP: f64 = 1e4;
const N_STARTS: usize = 4;
const NM_MAX_ITER: usize = 400;
const NM_FTOL: f64 = 1e-14;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi <= lo {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Center offsets `t = a/R`: three quarters of the points on `[0, min(T, 2)]`,
/// the rest geometric up to `T`.
fn offset_grid(t_max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    let near = t_max.min(2.0);
    if t_max <= 2.0 {
        return (0..n).map(|i| near * i as f64 / (n - 1) as f64).collect();
    }
    let n_near = (3 * n / 4).max(2);
    let mut out: Vec<f64> = (0..n_near)
        .map(|i| near * i as f64 / (n_near - 1) as f64)
        .collect();
    let n_far = n - n_near;
    if n_far > 0 {
        let (a, b) = (near.ln(), t_max.ln());
        out.extend((1..=n_far).map(|i| (a + (b - a) * i as f64 / n_far as f64).exp()));
    }
    out
}

fn merge_sorted(mut pts: Vec<f64>, extra: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    pts.extend(extra.iter().copied().filter(|&r| r >= lo && r <= hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

struct Objective<'a> {
    profile: &'a PiecewiseRadialPower,
    integrator: BallIntegrator,
}

impl Objective<'_> {
    fn eval(&self, radius: f64, t: f64) -> f64 {
        let ball = Ball::from_parts(t * radius, radius);
        morrey_quantity(
            self.profile.params(),
            radius,
            self.integrator.integrate(self.profile, &ball),
        )
    }
}

/// Nelder-Mead maximization in two variables, clamped to a box.
/// Returns the best point, its value and the final spread of simplex values.
fn nelder_mead_max<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    bounds: [(f64, f64); 2],
) -> ([f64; 2], f64, f64) {
    let clamp = |x: [f64; 2]| {
        [
            x[0].clamp(bounds[0].0, bounds[0].1),
            x[1].clamp(bounds[1].0, bounds[1].1),
        ]
    };
    let g = |x: [f64; 2]| -f(clamp(x));
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut vals = simplex.map(g);
    for _ in 0..NM_MAX_ITER {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        let spread = vals[w] - vals[b];
        if spread <= NM_FTOL * vals[b].abs().max(1e-300) {
            break;
        }
        let centroid = [
            0.5 * (simplex[b][0] + simplex[m][0]),
            0.5 * (simplex[b][1] + simplex[m][1]),
        ];
        let along = |coef: f64| {
            [
                centroid[0] + coef * (simplex[w][0] - centroid[0]),
                centroid[1] + coef * (simplex[w][1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = g(xr);
        if fr < vals[b] {
            let xe = along(-2.0);
            let fe = g(xe);
            if fe < fr {
                simplex[w] = xe;
                vals[w] = fe;
            } else {
                simplex[w] = xr;
                vals[w] = fr;
            }
        } else if fr < vals[m] {
            simplex[w] = xr;
            vals[w] = fr;
        } else {
            let xc = if fr < vals[w] { along(-0.5) } else { along(0.5) };
            let fc = g(xc);
            if fc < vals[w].min(fr) {
                simplex[w] = xc;
                vals[w] = fc;
            } else {
                for i in [m, w] {
                    simplex[i] = [
                        simplex[b][0] + 0.5 * (simplex[i][0] - simplex[b][0]),
                        simplex[b][1] + 0.5 * (simplex[i][1] - simplex[b][1]),
                    ];
                    vals[i] = g(simplex[i]);
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .expect("three vertices");
    let worst = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (clamp(simplex[best]), -vals[best], worst - vals[best])
}

fn centered_only(obj: &Objective<'_>, cfg: &SearchConfig) -> Result<NormReport> {
    let breaks = obj.profile.breakpoints();
    let (lo, hi) = match (breaks.first(), breaks.last()) {
        (Some(&a), Some(&b)) => (a / 10.0, b * 10.0),
        _ => (1e-3, 1e3),
    };
    let radii = merge_sorted(log_grid(lo, hi, cfg.radius_grid), &breaks, lo, hi);
    let values: Vec<f64> = radii.iter().map(|&r| obj.eval(r, 0.0)).collect();
    let (best_i, &best) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let last = values.len() - 1;
    if best_i == last && last > 0 && values[last] > values[last - 1] * (1.0 + 1e-12) {
        return Err(MorreyError::Divergent(format!(
            "centered objective still increasing at r = {:e}",
            radii[last]
        )));
    }
    let neighbour = [best_i.checked_sub(1), (best_i < last).then_some(best_i + 1)]
        .into_iter()
        .flatten()
        .map(|i| values[i])
        .fold(best, f64::min);
    Ok(NormReport {
        value: best,
        argmax_ball: Ball::centered(radii[best_i])?,
        method: NormMethod::CenteredSearch,
        abs_uncertainty: best - neighbour,
    })
}

pub(super) fn search(profile: &PiecewiseRadialPower, cfg: &SearchConfig) -> Result<NormReport> {
    let params = *profile.params();
    let obj = Objective {
        profile,
        integrator: BallIntegrator::new(params, cfg.quad_points),
    };
    if !profile.is_bounded() {
        return centered_only(&obj, cfg);
    }

    let breaks = profile.breakpoints();
    let r_small = breaks[0];
    let r_max = *breaks.last().expect("bounded profile has a boundary");

    let centered_radii = merge_sorted(log_grid(r_small, r_max, cfg.radius_grid), &breaks, r_small, r_max);
    let best_centered = centered_radii
        .par_iter()
        .map(|&r| obj.eval(r, 0.0))
        .reduce(|| 0.0, f64::max);
    if best_centered <= 0.0 {
        return Ok(NormReport {
            value: 0.0,
            argmax_ball: Ball::centered(r_max)?,
            method: NormMethod::OffcenterSearch,
            abs_uncertainty: 0.0,
        });
    }

    let c_max = profile.max_abs_coeff();
    let envelope = c_max * params.unit_ball_volume().powf(1.0 / params.q());
    let t_max = (1.0 + (envelope / best_centered).powf(params.q() / params.d() as f64)).min(T_CAP);
    let r_min = r_small / (t_max + 1.0);

    let radii = merge_sorted(log_grid(r_min, r_max, cfg.radius_grid), &breaks, r_min, r_max);
    let offsets = offset_grid(t_max, cfg.center_grid);
    let grid: Vec<(f64, f64, f64)> = radii
        .par_iter()
        .flat_map_iter(|&r| offsets.iter().map(move |&t| (r, t)).collect::<Vec<_>>())
        .map(|(r, t)| (r, t, obj.eval(r, t)))
        .collect();

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| grid[j].2.total_cmp(&grid[i].2).then(i.cmp(&j)));

    let ln_step = if radii.len() > 1 {
        ((r_max / r_min).ln() / (radii.len() - 1) as f64).max(1e-6)
    } else {
        0.1
    };
    let t_step = if offsets.len() > 1 {
        (t_max.min(2.0) / (offsets.len() - 1) as f64).max(1e-6)
    } else {
        0.01
    };
    let bounds = [(r_min.ln(), r_max.ln()), (0.0, t_max)];

    let refined: Vec<([f64; 2], f64, f64)> = order
        .iter()
        .take(N_STARTS)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| {
            let (r, t, _) = grid[i];
            nelder_mead_max(
                |x| obj.eval(x[0].exp(), x[1]),
                [r.ln(), t],
                [ln_step, t_step],
                bounds,
            )
        })
        .collect();

    let (grid_r, grid_t, grid_best) = grid[order[0]];
    let mut best = (grid_r, grid_t, grid_best, 0.0);
    for (x, v, spread) in refined {
        if v > best.2 {
            best = (x[0].exp(), x[1], v, spread);
        }
    }
    let (r, t, value, spread) = best;
    if !value.is_finite() {
        return Err(MorreyError::Numerical(format!(
            "ball objective not finite at R = {r:e}, a/R = {t}"
        )));
    }
    Ok(NormReport {
        value,
        argmax_ball: Ball::new(t * r, r)?,
        method: NormMethod::OffcenterSearch,
        abs_uncertainty: spread.max(0.0),
    })
}
