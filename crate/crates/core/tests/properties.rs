use approx::assert_relative_eq;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use morrey_core::closedform::centered_quantity;
use morrey_core::constants::{combination_coefficients, j_nj_inequality_check, min_signed_norm};
use morrey_core::numeric::{ball_p_integral_mc, ball_quantity, SphereInBall};
use morrey_core::*;

fn fixed(cases: u32, seed: u64) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn any_params() -> impl Strategy<Value = MorreyParams> {
    (1.0f64..3.0, 0.05f64..4.0, 1usize..=4)
        .prop_map(|(p, gap, d)| MorreyParams::new(p, p + gap, d).unwrap())
}

fn oracle_params() -> impl Strategy<Value = MorreyParams> {
    prop_oneof![Just((1.0, 2.0, 1)), Just((1.0, 2.0, 2)), Just((2.0, 3.0, 1))]
        .prop_map(|(p, q, d)| MorreyParams::new(p, q, d).unwrap())
}

/// Contiguous segments from the origin with nonincreasing positive
/// coefficients, which makes `|f|` radially nonincreasing.
fn monotone_profile() -> impl Strategy<Value = PiecewiseRadialPower> {
    (
        oracle_params(),
        0.01f64..0.5,
        prop::collection::vec((1.2f64..3.0, 0.2f64..1.0), 1..5),
    )
        .prop_map(|(params, r0, steps)| {
            let mut lo = 0.0;
            let mut hi = r0;
            let mut coeff = 2.0;
            let mut segs = Vec::new();
            for (ratio, shrink) in steps {
                hi *= ratio;
                segs.push(Segment::new(Annulus::new(lo, hi).unwrap(), coeff));
                lo = hi;
                coeff *= shrink;
            }
            PiecewiseRadialPower::new(params, segs).unwrap()
        })
}

/// Bounded profiles with a hole at the origin and arbitrary signs and gaps.
fn holed_profile(d_max: usize) -> impl Strategy<Value = PiecewiseRadialPower> {
    (
        1usize..=d_max,
        0.05f64..0.5,
        prop::collection::vec((0.0f64..0.3, 0.1f64..0.8, -2.0f64..2.0), 1..4),
    )
        .prop_map(|(d, r0, segs)| {
            let params = MorreyParams::new(1.0, 2.0, d).unwrap();
            let mut r = r0;
            let mut out = Vec::new();
            for (gap, width, c) in segs {
                let lo = r + gap;
                let hi = lo + width;
                out.push(Segment::new(Annulus::new(lo, hi).unwrap(), c));
                r = hi;
            }
            PiecewiseRadialPower::new(params, out).unwrap()
        })
}

proptest! {
    #![proptest_config(fixed(256, 1))]

    #[test]
    fn params_have_positive_alpha_and_area(params in any_params()) {
        prop_assert!(params.alpha() > 0.0);
        prop_assert!(params.sphere_area() > 0.0);
        prop_assert!(power_norm_exact(&params).is_finite());
    }

    #[test]
    fn local_quantity_is_scale_invariant(
        params in any_params(),
        r in 1.01f64..100.0,
        c1 in -3.0f64..3.0,
        c2 in -3.0f64..3.0,
    ) {
        let (c1, c2) = (10f64.powf(c1), 10f64.powf(c2));
        let a = local_quantity(&params, c1 * r, &Annulus::new(c1, c1 * r).unwrap()).unwrap();
        let b = local_quantity(&params, c2 * r, &Annulus::new(c2, c2 * r).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{a} vs {b}");
    }

    #[test]
    fn centered_chunk_norm_respects_lower_bound(
        params in any_params(),
        eps in 0.02f64..0.98,
        k in 0u32..=8,
    ) {
        let chunk = PiecewiseRadialPower::chunk(params, eps, k).unwrap();
        let got = centered_norm(&chunk).unwrap().value;
        let bound = chunk_lower_bound(&params, eps).unwrap();
        prop_assert!(got >= bound - 1e-9 * bound.max(1.0), "{got} < {bound}");
    }

    #[test]
    fn centered_norm_is_dilation_invariant(profile in monotone_profile(), c in -2.0f64..2.0) {
        let c = 10f64.powf(c);
        let base = centered_norm(&profile).unwrap();
        let moved = centered_norm(&profile.dilated(c).unwrap()).unwrap();
        prop_assert!((base.value - moved.value).abs() <= 1e-9 * base.value);
    }

    #[test]
    fn centered_norm_is_homogeneous(profile in holed_profile(3), c in 0.01f64..100.0) {
        let base = centered_norm(&profile).unwrap().value;
        let scaled = centered_norm(&profile.scaled(c)).unwrap().value;
        prop_assert!((scaled - c * base).abs() <= 1e-12 * (c * base).max(1e-300));
    }

    #[test]
    fn centered_norm_below_upper_envelope(profile in holed_profile(3)) {
        let got = centered_norm(&profile).unwrap().value;
        let cap = profile.max_abs_coeff() * power_norm_exact(profile.params());
        prop_assert!(got <= cap * (1.0 + 1e-12));
    }

    #[test]
    fn sphere_measure_integrates_to_ball_volume(
        d in 1usize..=3,
        a in 0.0f64..3.0,
        radius in 0.05f64..3.0,
    ) {
        let params = MorreyParams::new(1.0, 2.0, d).unwrap();
        let ball = Ball::new(a, radius).unwrap();
        let sphere = SphereInBall::new(d);
        let want = params.ball_volume(radius);

        // Whole spheres for r < R - a, then the shell by r = mid - half cos(phi).
        let inner = (radius - a).max(0.0);
        let mut total = params.sphere_area() * inner.powi(d as i32) / d as f64;
        let (lo, hi) = ((radius - a).abs(), a + radius);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let n = 4000;
        let h = std::f64::consts::PI / n as f64;
        let g = |phi: f64| {
            let r = mid - half * phi.cos();
            sphere.measure(&ball, r) * half * phi.sin()
        };
        let mut simpson = g(0.0) + g(std::f64::consts::PI);
        for i in 1..n {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        total += simpson * h / 3.0;
        prop_assert!((total - want).abs() <= 1e-8 * want, "{total} vs {want}");
    }

    #[test]
    fn euclidean_tuples_are_hilbertian(
        vecs in (2usize..=5, 1usize..=6).prop_flat_map(|(n, m)| {
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, m), n)
        }),
    ) {
        prop_assume!(vecs.iter().all(|v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6));
        let t = FiniteVectorTuple::new(vecs, VectorNorm::Euclidean).unwrap();
        let r = nj_ratio(&t).unwrap();
        prop_assert!((r - 1.0).abs() <= 1e-12, "{r}");
        let unit = t.normalized().unwrap();
        prop_assert!(j_nj_inequality_check(&[unit]).unwrap().holds);
    }

    #[test]
    fn lp_tuples_respect_generic_caps(
        p in 1.0f64..6.0,
        vecs in (2usize..=5, 1usize..=6).prop_flat_map(|(n, m)| {
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, m), n)
        }),
    ) {
        prop_assume!(vecs.iter().all(|v| v.iter().map(|x| x.abs()).sum::<f64>() > 1e-3));
        let t = FiniteVectorTuple::new(vecs, VectorNorm::Lp(p)).unwrap().normalized().unwrap();
        let n = t.len() as f64;
        let r = nj_ratio(&t).unwrap();
        prop_assert!(r <= n * (1.0 + 1e-12));
        prop_assert!(j_nj_inequality_check(&[t]).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(fixed(50, 2))]

    #[test]
    fn numeric_norm_matches_centered_on_monotone_profiles(profile in monotone_profile()) {
        prop_assert!(monotone_profile_check(&profile));
        let closed = centered_norm(&profile).unwrap();
        let numeric = morrey_norm_numeric(&profile, &SearchConfig::default()).unwrap();
        let rel = (closed.value - numeric.value).abs() / closed.value;
        prop_assert!(rel < 1e-3, "closed {} numeric {}", closed.value, numeric.value);
    }
}

proptest! {
    #![proptest_config(fixed(20, 3))]

    #[test]
    fn off_center_balls_never_beat_centered_on_monotone_profiles(profile in monotone_profile()) {
        let cfg = SearchConfig::default();
        let closed = centered_norm(&profile).unwrap().value;
        let numeric = morrey_norm_numeric(&profile, &cfg).unwrap();
        prop_assert!(numeric.value <= closed * (1.0 + 1e-9));
        // An off-center argmax may only tie with the centered value.
        if numeric.argmax_ball.center_dist() > 0.0 {
            let centered_same_radius =
                centered_quantity(&profile, numeric.argmax_ball.radius());
            prop_assert!(centered_same_radius >= numeric.value * (1.0 - 1e-3));
        }
    }
}

proptest! {
    #![proptest_config(fixed(16, 4))]

    #[test]
    fn quadrature_agrees_with_monte_carlo(
        profile in holed_profile(2),
        a in 0.0f64..2.0,
        radius in 0.1f64..2.0,
    ) {
        let ball = Ball::new(a, radius).unwrap();
        let cfg = SearchConfig::default();
        let quad = ball_p_integral(&profile, &ball, &cfg).unwrap();
        let mc = ball_p_integral_mc(&profile, &ball, 1_000_000, 0x5eed).unwrap();
        if mc.std_err == 0.0 {
            prop_assert!(quad.abs() < 1e-12);
        } else {
            let z = (mc.value - quad) / mc.std_err;
            prop_assert!(z.abs() <= 3.0, "quad {quad} mc {} se {} z {z}", mc.value, mc.std_err);
        }
    }
}

#[test]
fn sign_matrix_rows_are_walsh_orthogonal() {
    for n in 2..=10 {
        let m = sign_matrix(n).unwrap();
        let k = m.columns();
        for i in 1..n {
            for j in (i + 1)..n {
                let minus = (0..k).filter(|&c| m.get(i, c) * m.get(j, c) < 0).count();
                assert_eq!(minus, k / 2, "n={n} rows {i},{j}");
            }
        }
        let mut seen: Vec<Vec<i8>> = (0..k).map(|c| m.column(c)[1..].to_vec()).collect();
        assert!(m.row(0).iter().all(|&s| s == 1));
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), k, "columns repeat for n={n}");
    }
}

#[test]
fn each_pattern_dominates_exactly_one_annulus() {
    for n in 2..=12 {
        let m = sign_matrix(n).unwrap();
        for pattern in 0..m.columns() {
            let coeffs = combination_coefficients(&m, pattern);
            assert_eq!(coeffs.iter().filter(|c| c.unsigned_abs() as usize == n).count(), 1);
            assert!(coeffs.iter().all(|c| c.unsigned_abs() as usize <= n));
        }
    }
}

#[test]
fn off_center_interval_beats_centered_balls() {
    // In d = 1 the ball (0.9, 1) is exactly the support of f chi_(0.9, 1):
    // |B|^(-1/2) int_0.9^1 x^(-1/2) dx = 0.1^(-1/2) * 2 (1 - sqrt 0.9).
    let params = MorreyParams::new(1.0, 2.0, 1).unwrap();
    let prof = PiecewiseRadialPower::restricted_power(params, Annulus::new(0.9, 1.0).unwrap());
    let want = 0.1f64.powf(-0.5) * 2.0 * (1.0 - 0.9f64.sqrt());
    let got = morrey_norm_numeric(&prof, &SearchConfig::default()).unwrap();
    assert_relative_eq!(got.value, want, max_relative = 1e-6);
    assert_relative_eq!(got.argmax_ball.center_dist(), 0.95, max_relative = 1e-4);
    assert!(centered_norm(&prof).unwrap().value < 0.5 * want);
}

#[test]
fn off_center_argmax_confirmed_by_monte_carlo() {
    // A thin ring with q = 4 in the plane: small balls sitting on the ring
    // beat every centered ball.
    let params = MorreyParams::new(1.0, 4.0, 2).unwrap();
    let prof = PiecewiseRadialPower::restricted_power(params, Annulus::new(0.95, 1.0).unwrap());
    let cfg = SearchConfig::default();
    let got = morrey_norm_numeric(&prof, &cfg).unwrap();
    assert!(got.argmax_ball.center_dist() > 0.9);
    assert!(got.argmax_ball.radius() < 0.1);
    assert!(got.value > centered_norm(&prof).unwrap().value);
    let quad = ball_quantity(&prof, &got.argmax_ball, &cfg).unwrap();
    assert_relative_eq!(quad, got.value, max_relative = 1e-12);
    let mc = numeric::ball_quantity_mc(&prof, &got.argmax_ball, &cfg).unwrap();
    assert!((mc.value - quad).abs() <= 3.0 * mc.abs_uncertainty);
    // Local maximality against nearby balls.
    let (a, r) = (got.argmax_ball.center_dist(), got.argmax_ball.radius());
    for (da, dr) in [(1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3)] {
        let ball = Ball::new(a + da, r + dr).unwrap();
        assert!(ball_quantity(&prof, &ball, &cfg).unwrap() <= got.value * (1.0 + 1e-9));
    }
}

#[test]
fn smaller_epsilon_gives_larger_minimum() {
    let params = MorreyParams::new(1.0, 2.0, 1).unwrap();
    let cfg = SearchConfig::coarse();
    let mut prev = 0.0;
    for eps in [0.2, 0.05, 0.01, 1e-3, 1e-4] {
        let fam = build_witnesses(params, 3, 0.6, Some(eps), &cfg).unwrap();
        let min = min_signed_norm(&fam, &cfg).unwrap().min_over_patterns;
        assert!(min > prev, "eps {eps}: {min} <= {prev}");
        prev = min;
    }
}

#[test]
fn witness_families_satisfy_the_mean_square_chain() {
    let cfg = SearchConfig::coarse();
    let mut reports = Vec::new();
    for (p, q, d) in [(1.0, 2.0, 1), (1.0, 2.0, 2), (2.0, 3.0, 1)] {
        let params = MorreyParams::new(p, q, d).unwrap();
        for n in 2..=4 {
            let fam = build_witnesses(params, n, 0.1, None, &cfg).unwrap();
            reports.push(min_signed_norm(&fam, &cfg).unwrap());
        }
    }
    let check = j_nj_inequality_check(&reports).unwrap();
    assert!(check.holds, "worst ratio {}", check.worst_ratio);
    assert!(check.worst_ratio <= 1.0 + 1e-12);
}
