//! Witness families showing `M^p_q` is not uniformly non-`l^1_n`, and the
//! lower-bound estimators for the n-th James and Von Neumann-Jordan
//! constants built on them.
//!
//! A family for `n` uses the `K = 2^(n-1)` annuli `(eps^(k+1), eps^k)`.
//! Function `i` carries sign `M[i][K-1-k]` on annulus `k`, where `M` is the
//! block-alternating [`SignMatrix`]. Profiles store segments innermost
//! first, so segment `s` holds annulus `K-1-s` and therefore takes sign
//! `M[i][s]`. Sign patterns `(+1, s_2, .., s_n)` are indexed by `m` in
//! `0..K` with `s_i = -1` iff bit `n - i` of `m` is set; pattern `m` puts
//! coefficient magnitude `n` on segment `m` alone.

use log::warn;
use rayon::prelude::*;

use crate::closedform::{chunk_lower_bound, epsilon_upper_bound, power_norm_exact};
use crate::domain::{
    geometric_annulus, Annulus, FiniteVectorTuple, MorreyParams, NormReport, PiecewiseRadialPower,
    Segment, SignMatrix, WitnessFamily,
};
use crate::error::{MorreyError, Result};
use crate::numeric::{morrey_norm_numeric, SearchConfig};

/// Relative slack for the sandwich and `<= n` sanity checks on numeric norms.
pub const ENVELOPE_RTOL: f64 = 1e-6;

/// Signs `(s_1, .., s_n)` of pattern `m`, with `s_1 = +1`.
pub fn pattern_signs(n: usize, m: usize) -> Vec<i8> {
    (0..n)
        .map(|i| {
            if i == 0 || (m >> (n - 1 - i)) & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Per-segment coefficients of `f_1 + s_2 f_2 + .. + s_n f_n` before normalization.
pub fn combination_coefficients(signs: &SignMatrix, pattern: usize) -> Vec<i32> {
    let s = pattern_signs(signs.n(), pattern);
    (0..signs.columns())
        .map(|col| {
            (0..signs.n())
                .map(|row| s[row] as i32 * signs.get(row, col) as i32)
                .sum()
        })
        .collect()
}

fn witness_annuli(epsilon: f64, k_count: usize) -> Result<Vec<Annulus>> {
    (0..k_count)
        .map(|s| geometric_annulus(epsilon, (k_count - 1 - s) as u32))
        .collect()
}

fn profile_with(params: MorreyParams, annuli: &[Annulus], coeffs: impl Iterator<Item = f64>) -> Result<PiecewiseRadialPower> {
    PiecewiseRadialPower::new(
        params,
        annuli.iter().zip(coeffs).map(|(a, c)| Segment::new(*a, c)).collect(),
    )
}

/// Builds the normalized witnesses `F_i = f_i / ||f chi_(eps^K, 1)||`.
///
/// `epsilon` defaults to half of [`epsilon_upper_bound`]. The shared norm
/// comes from the numeric off-center search.
pub fn build_witnesses(
    params: MorreyParams,
    n: usize,
    delta: f64,
    epsilon: Option<f64>,
    cfg: &SearchConfig,
) -> Result<WitnessFamily> {
    let bound = epsilon_upper_bound(&params, delta)?;
    let epsilon = epsilon.unwrap_or(0.5 * bound);
    if !(epsilon > 0.0 && epsilon < bound) {
        return Err(MorreyError::InvalidArgument(format!(
            "epsilon {epsilon} outside (0, {bound}) for delta = {delta}"
        )));
    }
    let signs = SignMatrix::new(n)?;
    let k_count = signs.columns();

    let ln_tail = params.alpha() * k_count as f64 * epsilon.ln();
    if ln_tail < 1e-300f64.ln() {
        warn!(
            "eps^(alpha K) = exp({ln_tail:.1}) is below 1e-300; innermost annuli carry negligible mass"
        );
    }
    let annuli = witness_annuli(epsilon, k_count)?;
    let support = Annulus::new(annuli[0].r_lo(), 1.0)?;
    let shared_norm =
        morrey_norm_numeric(&PiecewiseRadialPower::restricted_power(params, support), cfg)?.value;
    if !(shared_norm > 0.0) {
        return Err(MorreyError::Numerical(format!(
            "shared norm {shared_norm} is not positive"
        )));
    }

    let functions = (0..n)
        .map(|i| profile_with(params, &annuli, signs.row(i).iter().map(|&s| s as f64 / shared_norm)))
        .collect::<Result<Vec<_>>>()?;

    Ok(WitnessFamily {
        params,
        n,
        delta,
        epsilon,
        functions,
        shared_norm,
        signs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternNorm {
    /// `(s_1, .., s_n)` with `s_1 = +1`.
    pub signs: Vec<i8>,
    /// Unnormalized integer coefficients per segment, innermost first.
    pub coefficients: Vec<i32>,
    /// Norm of `F_1 + s_2 F_2 + .. + s_n F_n`.
    pub report: NormReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedCombinationReport {
    pub n: usize,
    pub patterns: Vec<PatternNorm>,
    pub min_over_patterns: f64,
    pub argmin: usize,
}

impl SignedCombinationReport {
    pub fn norms(&self) -> Vec<f64> {
        self.patterns.iter().map(|p| p.report.value).collect()
    }
}

/// Norms of all `2^(n-1)` signed combinations of the normalized witnesses.
pub fn min_signed_norm(family: &WitnessFamily, cfg: &SearchConfig) -> Result<SignedCombinationReport> {
    let n = family.n();
    let k_count = family.annuli();
    let annuli: Vec<Annulus> = family.functions()[0]
        .segments()
        .iter()
        .map(|s| s.annulus)
        .collect();
    let scale = 1.0 / family.shared_norm();

    let patterns = (0..k_count)
        .into_par_iter()
        .map(|m| {
            let coefficients = combination_coefficients(family.sign_matrix(), m);
            let profile = profile_with(
                *family.params(),
                &annuli,
                coefficients.iter().map(|&c| c as f64 * scale),
            )?;
            let report = morrey_norm_numeric(&profile, cfg)?;
            Ok(PatternNorm {
                signs: pattern_signs(n, m),
                coefficients,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (argmin, min_over_patterns) = patterns
        .iter()
        .map(|p| p.report.value)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two patterns");
    Ok(SignedCombinationReport {
        n,
        patterns,
        min_over_patterns,
        argmin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVerification {
    pub family: WitnessFamily,
    pub combinations: SignedCombinationReport,
    /// `n (1 - delta)`.
    pub threshold: f64,
    /// `n (1 - eps^alpha)^(1/p) ||f|| / shared_norm`.
    pub theoretical_lower_bound: f64,
    /// Every unnormalized combination norm lies in
    /// `[n (1 - eps^alpha)^(1/p) ||f||, n shared_norm]` up to [`ENVELOPE_RTOL`].
    pub sandwich_holds: bool,
    /// `min_over_patterns > threshold`.
    pub passed: bool,
}

/// Builds a witness family and checks `||F_1 +- .. +- F_n|| > n (1 - delta)`
/// for every choice of signs.
pub fn verify_non_ell1n(
    params: MorreyParams,
    n: usize,
    delta: f64,
    epsilon: Option<f64>,
    cfg: &SearchConfig,
) -> Result<WitnessVerification> {
    verify_family(build_witnesses(params, n, delta, epsilon, cfg)?, cfg)
}

/// Checks an already built family; see [`verify_non_ell1n`].
pub fn verify_family(family: WitnessFamily, cfg: &SearchConfig) -> Result<WitnessVerification> {
    let (params, n, delta) = (*family.params(), family.n(), family.delta());
    let combinations = min_signed_norm(&family, cfg)?;
    let nf = n as f64;
    let lower = nf * chunk_lower_bound(&params, family.epsilon())?;
    let upper = nf * family.shared_norm();
    let sandwich_holds = combinations.patterns.iter().all(|p| {
        let raw = p.report.value * family.shared_norm();
        raw >= lower * (1.0 - ENVELOPE_RTOL) && raw <= upper * (1.0 + ENVELOPE_RTOL)
    });
    let threshold = nf * (1.0 - delta);
    Ok(WitnessVerification {
        theoretical_lower_bound: lower / family.shared_norm(),
        passed: combinations.min_over_patterns > threshold,
        threshold,
        sandwich_holds,
        combinations,
        family,
    })
}

/// Anything with `n` elements whose signed combinations have norms.
pub trait SignedTuple {
    fn order(&self) -> usize;
    fn element_norms(&self) -> Result<Vec<f64>>;
    /// Norms of `x_1 + s_2 x_2 + .. + s_n x_n` over all `2^(n-1)` patterns.
    fn signed_norms(&self) -> Result<Vec<f64>>;
}

impl SignedTuple for FiniteVectorTuple {
    fn order(&self) -> usize {
        self.len()
    }

    fn element_norms(&self) -> Result<Vec<f64>> {
        Ok(self.vectors().iter().map(|v| self.norm_kind().norm(v)).collect())
    }

    fn signed_norms(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let dim = self.vectors()[0].len();
        let mut buf = vec![0.0; dim];
        Ok((0..1usize << (n - 1))
            .map(|m| {
                buf.iter_mut().for_each(|b| *b = 0.0);
                for (s, v) in pattern_signs(n, m).into_iter().zip(self.vectors()) {
                    for (b, x) in buf.iter_mut().zip(v) {
                        *b += s as f64 * x;
                    }
                }
                self.norm_kind().norm(&buf)
            })
            .collect())
    }
}

/// A computed signed-combination report viewed as a tuple of unit vectors.
impl SignedTuple for SignedCombinationReport {
    fn order(&self) -> usize {
        self.n
    }

    /// Witnesses are normalized by construction: `|F_i| = f chi / shared_norm`.
    fn element_norms(&self) -> Result<Vec<f64>> {
        Ok(vec![1.0; self.n])
    }

    fn signed_norms(&self) -> Result<Vec<f64>> {
        Ok(self.norms())
    }
}

/// A witness family paired with the search settings for its norms.
pub struct WitnessTuple<'a> {
    pub family: &'a WitnessFamily,
    pub cfg: SearchConfig,
}

impl SignedTuple for WitnessTuple<'_> {
    fn order(&self) -> usize {
        self.family.n()
    }

    fn element_norms(&self) -> Result<Vec<f64>> {
        Ok(vec![1.0; self.family.n()])
    }

    fn signed_norms(&self) -> Result<Vec<f64>> {
        Ok(min_signed_norm(self.family, &self.cfg)?.norms())
    }
}

/// `sum_+- ||x_1 +- .. +- x_n||^2 / (2^(n-1) sum_i ||x_i||^2)`.
pub fn nj_ratio<T: SignedTuple + ?Sized>(tuple: &T) -> Result<f64> {
    let elems = tuple.element_norms()?;
    if elems.contains(&0.0) {
        return Err(MorreyError::InvalidArgument("tuple has a zero element".into()));
    }
    let signed = tuple.signed_norms()?;
    let num: f64 = signed.iter().map(|s| s * s).sum();
    let den = signed.len() as f64 * elems.iter().map(|e| e * e).sum::<f64>();
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    James,
    VonNeumannJordan,
}

impl ConstantKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantKind::James => "james",
            ConstantKind::VonNeumannJordan => "von_neumann_jordan",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub kind: ConstantKind,
    pub n: usize,
    /// `max(witness_value, 1)`; every Banach space has both constants >= 1.
    pub lower_bound: f64,
    /// Best value achieved by an explicit witness.
    pub witness_value: f64,
    /// Human-readable description of the achieving tuple.
    pub witness: String,
}

impl ConstantEstimate {
    fn new(kind: ConstantKind, n: usize, witness_value: f64, witness: String) -> Result<Self> {
        let cap = n as f64 * (1.0 + ENVELOPE_RTOL);
        if !(witness_value <= cap) {
            return Err(MorreyError::Numerical(format!(
                "{} estimate {witness_value} exceeds the generic bound n = {n}",
                kind.as_str()
            )));
        }
        Ok(Self {
            kind,
            n,
            lower_bound: witness_value.max(1.0),
            witness_value,
            witness,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderRow {
    pub delta: f64,
    pub epsilon: f64,
    pub shared_norm: f64,
    pub theoretical_lower_bound: f64,
    pub min_signed_norm: f64,
    pub nj_ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantLadder {
    pub params: MorreyParams,
    pub n: usize,
    pub rows: Vec<LadderRow>,
    pub james: ConstantEstimate,
    pub von_neumann_jordan: ConstantEstimate,
}

fn check_delta_ladder(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(MorreyError::InvalidArgument("empty delta sequence".into()));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(MorreyError::InvalidArgument("deltas must lie in (0, 1)".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(MorreyError::InvalidArgument(
            "deltas must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Runs the witness construction for each `delta` and collects lower bounds
/// on both n-th constants.
pub fn constants_ladder(
    params: MorreyParams,
    n: usize,
    deltas: &[f64],
    cfg: &SearchConfig,
) -> Result<ConstantLadder> {
    check_delta_ladder(deltas)?;
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let v = verify_non_ell1n(params, n, delta, None, cfg)?;
        rows.push(LadderRow {
            delta,
            epsilon: v.family.epsilon(),
            shared_norm: v.family.shared_norm(),
            theoretical_lower_bound: v.theoretical_lower_bound,
            min_signed_norm: v.combinations.min_over_patterns,
            nj_ratio: nj_ratio(&v.combinations)?,
            passed: v.passed,
        });
    }
    let describe = |r: &LadderRow| {
        format!(
            "witness family p={} q={} d={} n={n} delta={} eps={:e}",
            params.p(),
            params.q(),
            params.d(),
            r.delta,
            r.epsilon
        )
    };
    let best_j = rows
        .iter()
        .max_by(|a, b| a.min_signed_norm.total_cmp(&b.min_signed_norm))
        .expect("nonempty");
    let best_nj = rows
        .iter()
        .max_by(|a, b| a.nj_ratio.total_cmp(&b.nj_ratio))
        .expect("nonempty");
    let james = ConstantEstimate::new(ConstantKind::James, n, best_j.min_signed_norm, describe(best_j))?;
    let von_neumann_jordan =
        ConstantEstimate::new(ConstantKind::VonNeumannJordan, n, best_nj.nj_ratio, describe(best_nj))?;
    Ok(ConstantLadder {
        params,
        n,
        rows,
        james,
        von_neumann_jordan,
    })
}

/// Certified lower bound on the n-th James constant of `M^p_q` from a
/// strictly decreasing `delta` sequence.
pub fn james_lower_bound(
    params: MorreyParams,
    n: usize,
    deltas: &[f64],
    cfg: &SearchConfig,
) -> Result<ConstantEstimate> {
    Ok(constants_ladder(params, n, deltas, cfg)?.james)
}

/// Lower bound on the n-th Von Neumann-Jordan constant from the same ladder.
pub fn nj_lower_bound(
    params: MorreyParams,
    n: usize,
    deltas: &[f64],
    cfg: &SearchConfig,
) -> Result<ConstantEstimate> {
    Ok(constants_ladder(params, n, deltas, cfg)?.von_neumann_jordan)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub holds: bool,
    /// Largest `m^2 / (n * nj_ratio)` seen; at most 1 when the inequality holds.
    pub worst_ratio: f64,
    pub violating: Option<usize>,
}

/// Checks `m^2 <= mean_+- ||x_1 +- .. +- x_n||^2 = n * nj_ratio` on every
/// tuple of unit vectors, where `m` is the smallest signed norm.
pub fn j_nj_inequality_check<T: SignedTuple>(tuples: &[T]) -> Result<InequalityReport> {
    const RTOL: f64 = 1e-12;
    let mut worst_ratio = 0.0f64;
    let mut violating = None;
    for (idx, t) in tuples.iter().enumerate() {
        let n = t.order() as f64;
        let elems = t.element_norms()?;
        if elems.iter().any(|e| (e - 1.0).abs() > 1e-9) {
            return Err(MorreyError::InvalidArgument(format!(
                "tuple {idx} is not made of unit vectors"
            )));
        }
        let signed = t.signed_norms()?;
        let m = signed.iter().copied().fold(f64::INFINITY, f64::min);
        let mean_sq = signed.iter().map(|s| s * s).sum::<f64>() / signed.len() as f64;
        let nj = mean_sq / elems.iter().map(|e| e * e).sum::<f64>();
        let ratio = m * m / (n * nj);
        if ratio > worst_ratio {
            worst_ratio = ratio;
        }
        if m * m > mean_sq * (1.0 + RTOL) && violating.is_none() {
            violating = Some(idx);
        }
    }
    Ok(InequalityReport {
        holds: violating.is_none(),
        worst_ratio,
        violating,
    })
}

/// `n (1 - eps^alpha)^(1/p) ||f||`, the unnormalized lower envelope.
pub fn combination_lower_envelope(params: &MorreyParams, n: usize, epsilon: f64) -> Result<f64> {
    Ok(n as f64 * chunk_lower_bound(params, epsilon)?)
}

/// `n ||f||`, an upper envelope for every unnormalized combination.
pub fn combination_upper_envelope(params: &MorreyParams, n: usize) -> f64 {
    n as f64 * power_norm_exact(params)
}
