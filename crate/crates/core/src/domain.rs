//! Shared domain types: Morrey exponents, annuli, radial power profiles,
//! balls, the block-alternating sign matrix and norm reports.
//!
//! Every type validates its invariants on construction and is immutable
//! afterwards, so values can be shared freely across worker threads.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{MorreyError, Result};

/// Largest `n` accepted by [`SignMatrix`]. Annuli of width `eps^(2^(n-1))`
/// underflow long before this.
pub const MAX_SIGN_MATRIX_N: usize = 20;

/// Surface area of the unit sphere in `R^d`, `2 pi^(d/2) / Gamma(d/2)`.
pub fn sphere_area(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(MorreyError::InvalidDimension(d));
    }
    let half = d as f64 / 2.0;
    Ok((std::f64::consts::LN_2 + half * PI.ln() - ln_gamma(half)).exp())
}

/// Exponent triple `(p, q, d)` of the Morrey space `M^p_q(R^d)`, restricted
/// to `1 <= p < q < inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorreyParams {
    p: f64,
    q: f64,
    d: usize,
    sphere_area: f64,
    alpha: f64,
}

impl MorreyParams {
    pub fn new(p: f64, q: f64, d: usize) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && p >= 1.0 && p < q) {
            return Err(MorreyError::InvalidExponents { p, q });
        }
        let sphere_area = sphere_area(d)?;
        let df = d as f64;
        let alpha = df - df * p / q;
        Ok(Self {
            p,
            q,
            d,
            sphere_area,
            alpha,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `omega_{d-1}`, the area of the unit sphere in `R^d`.
    pub fn sphere_area(&self) -> f64 {
        self.sphere_area
    }

    /// Decay exponent `d - d p / q`; strictly positive.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exponent of the power profile, `|x|^(-d/q)`.
    pub fn power_exponent(&self) -> f64 {
        self.d as f64 / self.q
    }

    /// `1/q - 1/p`, the (negative) exponent applied to ball volumes.
    pub fn volume_exponent(&self) -> f64 {
        1.0 / self.q - 1.0 / self.p
    }

    /// Volume of the unit ball, `omega_{d-1} / d`.
    pub fn unit_ball_volume(&self) -> f64 {
        self.sphere_area / self.d as f64
    }

    pub fn ball_volume(&self, radius: f64) -> f64 {
        self.unit_ball_volume() * radius.powi(self.d as i32)
    }
}

/// Open annulus `{x : r_lo < |x| < r_hi}`. `r_hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    r_lo: f64,
    r_hi: f64,
}

impl Annulus {
    pub fn new(r_lo: f64, r_hi: f64) -> Result<Self> {
        if !(r_lo.is_finite() && r_lo >= 0.0 && r_hi > r_lo) {
            return Err(MorreyError::InvalidAnnulus { lo: r_lo, hi: r_hi });
        }
        Ok(Self { r_lo, r_hi })
    }

    /// The whole punctured space `(0, inf)`.
    pub fn everything() -> Self {
        Self {
            r_lo: 0.0,
            r_hi: f64::INFINITY,
        }
    }

    pub fn r_lo(&self) -> f64 {
        self.r_lo
    }

    pub fn r_hi(&self) -> f64 {
        self.r_hi
    }

    pub fn is_bounded(&self) -> bool {
        self.r_hi.is_finite()
    }

    pub fn contains(&self, r: f64) -> bool {
        self.r_lo < r && r < self.r_hi
    }

    /// Intersection with the centered ball `B(0, radius)`, if nonempty.
    pub fn clip_to(&self, radius: f64) -> Option<Self> {
        let hi = self.r_hi.min(radius);
        (hi > self.r_lo).then_some(Self {
            r_lo: self.r_lo,
            r_hi: hi,
        })
    }

    pub fn dilate(&self, factor: f64) -> Result<Self> {
        Self::new(self.r_lo * factor, self.r_hi * factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub annulus: Annulus,
    pub coeff: f64,
}

impl Segment {
    pub fn new(annulus: Annulus, coeff: f64) -> Self {
        Self { annulus, coeff }
    }
}

/// `x -> sum_k coeff_k |x|^(-d/q) chi_{annulus_k}(x)`.
///
/// Segments are sorted by inner radius and pairwise disjoint (touching is
/// allowed). Only the outermost segment may be unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseRadialPower {
    params: MorreyParams,
    segments: Vec<Segment>,
}

impl PiecewiseRadialPower {
    pub fn new(params: MorreyParams, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(MorreyError::InvalidProfile("no segments".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            // Re-validate: the annulus may have been deserialized.
            Annulus::new(seg.annulus.r_lo, seg.annulus.r_hi)?;
            if !seg.coeff.is_finite() {
                return Err(MorreyError::InvalidProfile(format!(
                    "segment {i}: coefficient {} is not finite",
                    seg.coeff
                )));
            }
            if let Some(next) = segments.get(i + 1) {
                if !seg.annulus.is_bounded() {
                    return Err(MorreyError::InvalidProfile(format!(
                        "segment {i}: only the last segment may be unbounded"
                    )));
                }
                if next.annulus.r_lo < seg.annulus.r_hi {
                    return Err(MorreyError::InvalidProfile(format!(
                        "segments {i} and {} overlap or are out of order",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { params, segments })
    }

    /// The pure power function `|x|^(-d/q)` on all of `R^d`.
    pub fn pure_power(params: MorreyParams) -> Self {
        Self {
            params,
            segments: vec![Segment::new(Annulus::everything(), 1.0)],
        }
    }

    /// `|x|^(-d/q)` restricted to a single annulus.
    pub fn restricted_power(params: MorreyParams, annulus: Annulus) -> Self {
        Self {
            params,
            segments: vec![Segment::new(annulus, 1.0)],
        }
    }

    /// The chunk `|x|^(-d/q)` on `eps^(k+1) < |x| < eps^k`.
    pub fn chunk(params: MorreyParams, epsilon: f64, k: u32) -> Result<Self> {
        let annulus = geometric_annulus(epsilon, k)?;
        Ok(Self::restricted_power(params, annulus))
    }

    pub fn params(&self) -> &MorreyParams {
        &self.params
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_bounded(&self) -> bool {
        self.segments.last().is_some_and(|s| s.annulus.is_bounded())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.coeff.abs())
            .fold(0.0, f64::max)
    }

    /// Inner radius of the innermost segment.
    pub fn inner_radius(&self) -> f64 {
        self.segments[0].annulus.r_lo
    }

    /// Outer radius of the outermost segment (possibly infinite).
    pub fn outer_radius(&self) -> f64 {
        self.segments[self.segments.len() - 1].annulus.r_hi
    }

    /// All finite, strictly positive annulus boundaries, ascending, deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.annulus.r_lo, s.annulus.r_hi])
            .filter(|r| r.is_finite() && *r > 0.0)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Value of the profile at any point with `|x| = r`.
    pub fn value_at(&self, r: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.annulus.contains(r))
            .map_or(0.0, |s| s.coeff * r.powf(-self.params.power_exponent()))
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            params: self.params,
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.annulus, s.coeff * factor))
                .collect(),
        }
    }

    /// Dilates every annulus by `factor > 0`, keeping coefficients.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(MorreyError::InvalidArgument(format!(
                "dilation factor {factor} must be positive"
            )));
        }
        let segments = self
            .segments
            .iter()
            .map(|s| Ok(Segment::new(s.annulus.dilate(factor)?, s.coeff)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.params, segments)
    }
}

/// `(eps^(k+1), eps^k)`, computed in log domain.
pub fn geometric_annulus(epsilon: f64, k: u32) -> Result<Annulus> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(MorreyError::InvalidArgument(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    let ln_eps = epsilon.ln();
    let lo = ((k as f64 + 1.0) * ln_eps).exp();
    let hi = (k as f64 * ln_eps).exp();
    if lo <= 0.0 {
        return Err(MorreyError::Underflow(format!(
            "eps^{} underflows for eps = {epsilon}",
            k + 1
        )));
    }
    Annulus::new(lo, hi)
}

/// Open ball `B(a, R)`; only `|a|` is stored since all profiles are radial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center_dist: f64,
    radius: f64,
}

impl Ball {
    pub fn new(center_dist: f64, radius: f64) -> Result<Self> {
        if !(center_dist.is_finite() && center_dist >= 0.0 && radius.is_finite() && radius > 0.0) {
            return Err(MorreyError::InvalidBall {
                center_dist,
                radius,
            });
        }
        Ok(Self {
            center_dist,
            radius,
        })
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_parts(center_dist: f64, radius: f64) -> Self {
        debug_assert!(center_dist >= 0.0 && radius > 0.0);
        Self {
            center_dist,
            radius,
        }
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new(0.0, radius)
    }

    pub fn center_dist(&self) -> f64 {
        self.center_dist
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// `n x 2^(n-1)` matrix of signs. Row `i` (0-based) alternates blocks of
/// `+1` and `-1` of length `2^(n-1-i)`, so row 0 is all `+1` and the
/// columns restricted to rows `1..n` run through every sign pattern once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_SIGN_MATRIX_N).contains(&n) {
            return Err(MorreyError::InvalidArgument(format!(
                "sign matrix order {n} outside [2, {MAX_SIGN_MATRIX_N}]"
            )));
        }
        let cols = 1usize << (n - 1);
        let mut entries = Vec::with_capacity(n * cols);
        for row in 0..n {
            let shift = n - 1 - row;
            entries.extend((0..cols).map(|j| if (j >> shift) & 1 == 0 { 1i8 } else { -1 }));
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> usize {
        1 << (self.n - 1)
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.columns() + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        let cols = self.columns();
        &self.entries[row * cols..(row + 1) * cols]
    }

    pub fn column(&self, col: usize) -> Vec<i8> {
        (0..self.n).map(|row| self.get(row, col)).collect()
    }
}

pub fn sign_matrix(n: usize) -> Result<SignMatrix> {
    SignMatrix::new(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    ClosedForm,
    CenteredSearch,
    OffcenterSearch,
    MonteCarlo,
}

impl NormMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMethod::ClosedForm => "closed_form",
            NormMethod::CenteredSearch => "centered_search",
            NormMethod::OffcenterSearch => "offcenter_search",
            NormMethod::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub argmax_ball: Ball,
    pub method: NormMethod,
    pub abs_uncertainty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorNorm {
    Euclidean,
    Lp(f64),
}

impl VectorNorm {
    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            VectorNorm::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            VectorNorm::Lp(p) if p.is_infinite() => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            VectorNorm::Lp(p) => v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }
}

/// `n` vectors in `R^m` under a fixed vector norm.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteVectorTuple {
    vectors: Vec<Vec<f64>>,
    norm: VectorNorm,
}

impl FiniteVectorTuple {
    pub fn new(vectors: Vec<Vec<f64>>, norm: VectorNorm) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(MorreyError::InvalidArgument(
                "a tuple needs at least two vectors".into(),
            ));
        }
        if vectors.len() > MAX_SIGN_MATRIX_N {
            return Err(MorreyError::InvalidArgument(format!(
                "tuple length {} exceeds {MAX_SIGN_MATRIX_N}",
                vectors.len()
            )));
        }
        let m = vectors[0].len();
        if m == 0 || vectors.iter().any(|v| v.len() != m) {
            return Err(MorreyError::InvalidArgument(
                "vectors must share a positive dimension".into(),
            ));
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(MorreyError::InvalidArgument("non-finite entry".into()));
        }
        if let VectorNorm::Lp(p) = norm {
            if !(p >= 1.0) {
                return Err(MorreyError::InvalidArgument(format!(
                    "l^p exponent {p} must be >= 1"
                )));
            }
        }
        Ok(Self { vectors, norm })
    }

    /// Rescales every vector to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let len = self.norm.norm(v);
                if len == 0.0 {
                    return Err(MorreyError::InvalidArgument("zero vector".into()));
                }
                Ok(v.iter().map(|x| x / len).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            vectors,
            norm: self.norm,
        })
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn norm_kind(&self) -> VectorNorm {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `n` unit-norm witnesses `F_i = f_i / ||f_i||` built on the annuli
/// `(eps^(k+1), eps^k)`, `k = 0..2^(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessFamily {
    pub(crate) params: MorreyParams,
    pub(crate) n: usize,
    pub(crate) delta: f64,
    pub(crate) epsilon: f64,
    pub(crate) functions: Vec<PiecewiseRadialPower>,
    pub(crate) shared_norm: f64,
    pub(crate) signs: SignMatrix,
}

impl WitnessFamily {
    pub fn params(&self) -> &MorreyParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Normalized witnesses; segments are stored innermost first.
    pub fn functions(&self) -> &[PiecewiseRadialPower] {
        &self.functions
    }

    /// Common Morrey norm of the unnormalized `f_i`.
    pub fn shared_norm(&self) -> f64 {
        self.shared_norm
    }

    pub fn sign_matrix(&self) -> &SignMatrix {
        &self.signs
    }

    /// Number of annuli, `2^(n-1)`.
    pub fn annuli(&self) -> usize {
        self.signs.columns()
    }
}
