//! TOML profile documents:
//!
//! ```toml
//! format_version = 1
//! p = 1.0
//! q = 2.0
//! d = 1
//!
//! [[segments]]
//! r_lo = 0.25
//! r_hi = 1.0
//! coeff = 1.0
//! ```
//!
//! `r_hi = inf` marks the unbounded outer segment.

use serde::{Deserialize, Serialize};

use crate::domain::{Annulus, MorreyParams, PiecewiseRadialPower, Segment};

pub const PROFILE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub r_lo: f64,
    pub r_hi: f64,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub p: f64,
    pub q: f64,
    pub d: usize,
    pub segments: Vec<SegmentDoc>,
}

fn default_version() -> u32 {
    PROFILE_FORMAT_VERSION
}

#[derive(Debug, thiserror::Error)]
pub enum ProfileDocError {
    #[error("profile document: {0}")]
    Syntax(String),
    #[error("profile document, field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl ProfileDocument {
    pub fn from_profile(profile: &PiecewiseRadialPower) -> Self {
        let params = profile.params();
        Self {
            format_version: PROFILE_FORMAT_VERSION,
            p: params.p(),
            q: params.q(),
            d: params.d(),
            segments: profile
                .segments()
                .iter()
                .map(|s| SegmentDoc {
                    r_lo: s.annulus.r_lo(),
                    r_hi: s.annulus.r_hi(),
                    coeff: s.coeff,
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ProfileDocError> {
        // toml's message already carries the line and column.
        toml::from_str(text).map_err(|e| ProfileDocError::Syntax(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("profile documents always serialize")
    }

    pub fn to_profile(&self) -> Result<PiecewiseRadialPower, ProfileDocError> {
        if self.format_version != PROFILE_FORMAT_VERSION {
            return Err(ProfileDocError::Field {
                field: "format_version".into(),
                message: format!("unsupported version {}", self.format_version),
            });
        }
        let params = MorreyParams::new(self.p, self.q, self.d).map_err(|e| ProfileDocError::Field {
            field: "p/q/d".into(),
            message: e.to_string(),
        })?;
        if self.segments.is_empty() {
            return Err(ProfileDocError::Field {
                field: "segments".into(),
                message: "at least one segment is required".into(),
            });
        }
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Annulus::new(s.r_lo, s.r_hi)
                    .map(|a| Segment::new(a, s.coeff))
                    .map_err(|e| ProfileDocError::Field {
                        field: format!("segments[{i}]"),
                        message: e.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        PiecewiseRadialPower::new(params, segments).map_err(|e| ProfileDocError::Field {
            field: "segments".into(),
            message: e.to_string(),
        })
    }
}

pub fn parse_profile(text: &str) -> Result<PiecewiseRadialPower, ProfileDocError> {
    ProfileDocument::parse(text)?.to_profile()
}
