//! Synthetic commuter workload.
//!
//! Popularity within each content class is Zipf over ranks `1..=M`, sizes are
//! Gamma distributed per class and fixed at catalog build, and the consumed
//! fraction of a video is a clamped exponential draw. Non-video content is
//! always consumed whole. Classes are interleaved by a per-request Bernoulli
//! draw so that, on average, `r_v` non-video requests accompany each video
//! request.

mod catalog;
mod sampling;
mod trace;
mod zipf;

pub use catalog::{ClassSegment, ContentCatalog};
pub use sampling::{sample_size, sample_view_ratio, MIN_SIZE_MB, VIEW_RATIO_FLOOR};
pub use trace::{generate_trace, Request, Trace, TraceDocument, TraceRow};
pub use zipf::{expected_unique, harmonic, zipf_pmf, Zipf};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContentClass {
    NonVideo,
    Video,
}

impl ContentClass {
    pub const ALL: [ContentClass; 2] = [ContentClass::NonVideo, ContentClass::Video];

    pub fn as_str(self) -> &'static str {
        match self {
            ContentClass::NonVideo => "non-video",
            ContentClass::Video => "video",
        }
    }
}

impl fmt::Display for ContentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContentClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "video" => Ok(ContentClass::Video),
            "non-video" | "nonvideo" | "non_video" => Ok(ContentClass::NonVideo),
            other => Err(Error::domain("content class", format!("`{other}`"))),
        }
    }
}

/// Opaque content identifier, unique within a catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContentId(pub u64);

impl fmt::Display for ContentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentItem {
    pub id: ContentId,
    pub class: ContentClass,
    /// 1-based popularity rank within the class.
    pub rank: u64,
    pub size_mb: f64,
}

/// Zipf exponent `s` and catalog size `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipfParams {
    pub s: f64,
    pub m: u64,
}

impl ZipfParams {
    pub fn new(s: f64, m: u64) -> Result<Self> {
        let p = ZipfParams { s, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.s.is_finite() && self.s >= 0.0, "zipf exponent", || {
            format!("s = {} (must be >= 0)", self.s)
        })?;
        ensure(self.m >= 1, "catalog size", || "m = 0 (must be >= 1)".into())
    }
}

/// Gamma size distribution; `shape * scale` is the mean size in MB.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeParams {
    pub shape: f64,
    pub scale: f64,
}

impl SizeParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        let p = SizeParams { shape, scale };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.shape.is_finite() && self.shape > 0.0, "size shape", || {
            format!("{} (must be > 0)", self.shape)
        })?;
        ensure(self.scale.is_finite() && self.scale > 0.0, "size scale", || {
            format!("{} (must be > 0)", self.scale)
        })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewParams {
    pub lambda_e: f64,
}

impl ViewParams {
    pub fn new(lambda_e: f64) -> Result<Self> {
        let p = ViewParams { lambda_e };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.lambda_e.is_finite() && self.lambda_e > 0.0, "view-ratio rate", || {
            format!("lambda_e = {} (must be > 0)", self.lambda_e)
        })
    }
}

/// Per-class distribution parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassWorkload {
    pub zipf: ZipfParams,
    pub size: SizeParams,
    pub view: ViewParams,
}

impl ClassWorkload {
    pub fn validate(&self) -> Result<()> {
        self.zipf.validate()?;
        self.size.validate()?;
        self.view.validate()
    }
}

/// Catalog size that reproduces both classes' expected-unique counts at the
/// reference request volumes with `s = 0.716`.
pub const DEFAULT_CATALOG_SIZE: u64 = 2_680_000;
pub const DEFAULT_ZIPF_S: f64 = 0.716;
/// Non-video requests per bus over four weeks.
pub const REFERENCE_NON_VIDEO_REQUESTS: u64 = 120_627;
pub const REFERENCE_VIDEO_REQUESTS: u64 = 1_418;
pub const DEFAULT_R_V: f64 = 80.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub non_video: ClassWorkload,
    pub video: ClassWorkload,
    /// Non-video requests per video request.
    pub r_v: f64,
    pub n_requests: u64,
    pub seed: u64,
    /// Give every item the class mean size instead of a Gamma draw.
    #[serde(default)]
    pub constant_sizes: bool,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        WorkloadConfig {
            non_video: ClassWorkload {
                zipf: ZipfParams {
                    s: DEFAULT_ZIPF_S,
                    m: DEFAULT_CATALOG_SIZE,
                },
                size: SizeParams {
                    shape: 0.0006,
                    scale: crate::units::kilobytes(2102.0),
                },
                view: ViewParams { lambda_e: 1.0 },
            },
            video: ClassWorkload {
                zipf: ZipfParams {
                    s: DEFAULT_ZIPF_S,
                    m: DEFAULT_CATALOG_SIZE,
                },
                size: SizeParams {
                    shape: 0.64,
                    scale: crate::units::kilobytes(194_061.0),
                },
                view: ViewParams { lambda_e: 2.77 },
            },
            r_v: DEFAULT_R_V,
            n_requests: requests_for_non_video_volume(REFERENCE_NON_VIDEO_REQUESTS, DEFAULT_R_V),
            seed: 42,
            constant_sizes: false,
        }
    }
}

/// Total request count whose expected non-video share equals `non_video`.
pub fn requests_for_non_video_volume(non_video: u64, r_v: f64) -> u64 {
    (non_video as f64 * (1.0 + 1.0 / r_v)).round() as u64
}

impl WorkloadConfig {
    pub fn validate(&self) -> Result<()> {
        self.non_video.validate()?;
        self.video.validate()?;
        ensure(self.r_v.is_finite() && self.r_v > 0.0, "mixing ratio", || {
            format!("r_v = {} (must be > 0)", self.r_v)
        })?;
        ensure(self.n_requests >= 1, "request count", || "n_requests = 0".into())
    }

    pub fn class(&self, class: ContentClass) -> &ClassWorkload {
        match class {
            ContentClass::NonVideo => &self.non_video,
            ContentClass::Video => &self.video,
        }
    }

    pub fn class_mut(&mut self, class: ContentClass) -> &mut ClassWorkload {
        match class {
            ContentClass::NonVideo => &mut self.non_video,
            ContentClass::Video => &mut self.video,
        }
    }

    /// Probability that a request is for video content.
    pub fn video_probability(&self) -> f64 {
        1.0 / (1.0 + self.r_v)
    }
}
