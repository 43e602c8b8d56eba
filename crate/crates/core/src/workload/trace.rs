use std::collections::HashSet;
use std::io::{Read, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sample_view_ratio, ContentCatalog, ContentClass, ContentId, ContentItem, WorkloadConfig};
use crate::error::{ensure, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub index: u64,
    pub content_id: ContentId,
    /// Consumed fraction of the item, in (0, 1].
    pub view_ratio: f64,
}

/// Ordered requests plus the catalog they refer to.
#[derive(Clone, Debug)]
pub struct Trace {
    pub catalog: Arc<ContentCatalog>,
    pub requests: Vec<Request>,
    /// Generating configuration, when known.
    pub config: Option<WorkloadConfig>,
}

/// Draws a catalog and then `cfg.n_requests` requests from a single stream.
pub fn generate_trace<R: Rng + ?Sized>(cfg: &WorkloadConfig, rng: &mut R) -> Result<Trace> {
    let catalog = Arc::new(ContentCatalog::generate(cfg, rng)?);
    Trace::with_catalog(catalog, cfg, rng)
}

const CATALOG_STREAM: u64 = 0;
const REQUEST_STREAM: u64 = 1;

impl Trace {
    /// Seeded generation. The catalog and the request sequence use separate
    /// ChaCha streams of `cfg.seed`, so [`Trace::catalog_for`] reproduces
    /// the same catalog for sweeps that only change request-side parameters.
    pub fn generate(cfg: &WorkloadConfig) -> Result<Trace> {
        let catalog = Arc::new(Self::catalog_for(cfg)?);
        Self::generate_with_catalog(catalog, cfg)
    }

    pub fn catalog_for(cfg: &WorkloadConfig) -> Result<ContentCatalog> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(CATALOG_STREAM);
        ContentCatalog::generate(cfg, &mut rng)
    }

    pub fn generate_with_catalog(catalog: Arc<ContentCatalog>, cfg: &WorkloadConfig) -> Result<Trace> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(REQUEST_STREAM);
        Self::with_catalog(catalog, cfg, &mut rng)
    }

    pub fn with_catalog<R: Rng + ?Sized>(
        catalog: Arc<ContentCatalog>,
        cfg: &WorkloadConfig,
        rng: &mut R,
    ) -> Result<Trace> {
        cfg.validate()?;
        let p_video = cfg.video_probability();
        let mut requests = Vec::with_capacity(cfg.n_requests as usize);
        for index in 0..cfg.n_requests {
            let class = if rng.random::<f64>() < p_video {
                ContentClass::Video
            } else {
                ContentClass::NonVideo
            };
            let seg = catalog
                .segment(class)
                .ok_or_else(|| Error::domain("catalog", "request generation needs a generated catalog"))?;
            let rank = seg.zipf.sample_rank(rng);
            let view_ratio = sample_view_ratio(&cfg.class(class).view, class, rng);
            requests.push(Request {
                index,
                content_id: seg.id_of(rank),
                view_ratio,
            });
        }
        Ok(Trace {
            catalog,
            requests,
            config: Some(cfg.clone()),
        })
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn item(&self, req: &Request) -> Result<ContentItem> {
        self.catalog.item(req.content_id)
    }

    pub fn unique_contents(&self) -> usize {
        self.requests.iter().map(|r| r.content_id).collect::<HashSet<_>>().len()
    }

    pub fn count_class(&self, class: ContentClass) -> usize {
        self.requests
            .iter()
            .filter(|r| self.catalog.get(r.content_id).map(|i| i.class) == Some(class))
            .count()
    }

    /// Checks that every request refers to a catalog item and has a view
    /// ratio in (0, 1].
    pub fn validate(&self) -> Result<()> {
        for r in &self.requests {
            self.catalog.item(r.content_id)?;
            ensure(r.view_ratio > 0.0 && r.view_ratio <= 1.0, "view ratio", || {
                format!("request {} has view ratio {}", r.index, r.view_ratio)
            })?;
        }
        Ok(())
    }

    pub fn rows(&self) -> Result<Vec<TraceRow>> {
        self.requests
            .iter()
            .map(|r| {
                let item = self.item(r)?;
                Ok(TraceRow {
                    index: r.index,
                    content_id: r.content_id,
                    class: item.class,
                    rank: item.rank,
                    size_mb: item.size_mb,
                    view_ratio: r.view_ratio,
                })
            })
            .collect()
    }

    fn from_rows(rows: Vec<TraceRow>, config: Option<WorkloadConfig>) -> Result<Trace> {
        let catalog = ContentCatalog::from_items(rows.iter().map(|r| ContentItem {
            id: r.content_id,
            class: r.class,
            rank: r.rank,
            size_mb: r.size_mb,
        }))?;
        let requests = rows
            .iter()
            .map(|r| Request {
                index: r.index,
                content_id: r.content_id,
                view_ratio: r.view_ratio,
            })
            .collect();
        let trace = Trace {
            catalog: Arc::new(catalog),
            requests,
            config,
        };
        trace.validate()?;
        Ok(trace)
    }

    /// CSV with header `index,content_id,class,rank,size_mb,view_ratio`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in self.rows()? {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Trace> {
        let mut rdr = csv::Reader::from_reader(r);
        let rows = rdr.deserialize().collect::<Result<Vec<TraceRow>, _>>()?;
        Self::from_rows(rows, None)
    }

    pub fn to_document(&self) -> Result<TraceDocument> {
        Ok(TraceDocument {
            seed: self.config.as_ref().map(|c| c.seed),
            config: self.config.clone(),
            requests: self.rows()?,
        })
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.to_document()?)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Trace> {
        let doc: TraceDocument = serde_json::from_reader(r)?;
        Self::from_rows(doc.requests, doc.config)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub index: u64,
    pub content_id: ContentId,
    pub class: ContentClass,
    pub rank: u64,
    pub size_mb: f64,
    pub view_ratio: f64,
}

/// JSON form of a trace, embedding the generating config and seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceDocument {
    pub seed: Option<u64>,
    pub config: Option<WorkloadConfig>,
    pub requests: Vec<TraceRow>,
}
