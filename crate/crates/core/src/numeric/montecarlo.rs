//! Rejection-sampling Monte Carlo estimate of `int_{B(a,R)} |profile|^p`.
//!
//! Samples are drawn uniformly from the bounding cube of the ball in fixed
//! chunks; chunk `i` uses ChaCha stream `i` of the configured seed, so the
//! result depends only on the seed and the sample count, not on the number
//! of worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{Ball, PiecewiseRadialPower};
use crate::error::{MorreyError, Result};

const CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

pub fn ball_p_integral_mc(
    profile: &PiecewiseRadialPower,
    ball: &Ball,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(MorreyError::InvalidArgument("need at least one sample".into()));
    }
    let params = profile.params();
    let d = params.d();
    let p = params.p();
    let (a, radius) = (ball.center_dist(), ball.radius());
    let chunks = samples.div_ceil(CHUNK);

    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = CHUNK.min(samples - chunk * CHUNK);
            let mut x = vec![0.0; d];
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                for xi in x.iter_mut() {
                    *xi = radius * (2.0 * rng.random::<f64>() - 1.0);
                }
                let in_ball = x.iter().map(|v| v * v).sum::<f64>() < radius * radius;
                if !in_ball {
                    continue;
                }
                // Ball center sits at (a, 0, ..., 0).
                let r = (x.iter().map(|v| v * v).sum::<f64>() + 2.0 * a * x[0] + a * a).sqrt();
                let h = profile.value_at(r).abs().powf(p);
                sum += h;
                sum_sq += h * h;
            }
            (sum, sum_sq)
        })
        .collect();

    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |acc, &(s, s2)| (acc.0 + s, acc.1 + s2));
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let cube = (2.0 * radius).powi(d as i32);
    Ok(McEstimate {
        value: cube * mean,
        std_err: cube * (var / n).sqrt(),
        samples,
    })
}
