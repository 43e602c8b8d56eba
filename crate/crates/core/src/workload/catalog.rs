use std::collections::HashMap;

use rand::Rng;

use super::{sample_size, ContentClass, ContentId, ContentItem, WorkloadConfig, Zipf};
use crate::error::{Error, Result};

/// One class's slice of a generated catalog. Item ids are contiguous: rank `k`
/// maps to id `offset + k - 1`.
#[derive(Clone, Debug)]
pub struct ClassSegment {
    pub class: ContentClass,
    pub offset: u64,
    pub zipf: Zipf,
    sizes: Vec<f64>,
}

impl ClassSegment {
    pub fn len(&self) -> u64 {
        self.sizes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn id_of(&self, rank: u64) -> ContentId {
        ContentId(self.offset + rank - 1)
    }

    fn get(&self, id: ContentId) -> Option<ContentItem> {
        let idx = id.0.checked_sub(self.offset)?;
        let size_mb = *self.sizes.get(idx as usize)?;
        Some(ContentItem {
            id,
            class: self.class,
            rank: idx + 1,
            size_mb,
        })
    }
}

#[derive(Clone, Debug)]
enum Storage {
    Generated { segments: [ClassSegment; 2] },
    Listed(HashMap<ContentId, ContentItem>),
}

/// The universe of content a trace draws from.
#[derive(Clone, Debug)]
pub struct ContentCatalog {
    storage: Storage,
}

impl ContentCatalog {
    /// Builds both class segments, drawing each item's size once.
    /// Non-video ids come first, then video.
    pub fn generate<R: Rng + ?Sized>(cfg: &WorkloadConfig, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        let mut offset = 0;
        let mut build = |class: ContentClass, rng: &mut R| -> Result<ClassSegment> {
            let cw = cfg.class(class);
            let zipf = Zipf::new(cw.zipf)?;
            let sizes = if cfg.constant_sizes {
                vec![cw.size.mean(); cw.zipf.m as usize]
            } else {
                (0..cw.zipf.m).map(|_| sample_size(&cw.size, rng)).collect()
            };
            let seg = ClassSegment {
                class,
                offset,
                zipf,
                sizes,
            };
            offset += cw.zipf.m;
            Ok(seg)
        };
        let non_video = build(ContentClass::NonVideo, rng)?;
        let video = build(ContentClass::Video, rng)?;
        Ok(ContentCatalog {
            storage: Storage::Generated {
                segments: [non_video, video],
            },
        })
    }

    /// Catalog holding exactly the given items, e.g. reconstructed from a
    /// trace file. Duplicate ids must agree.
    pub fn from_items(items: impl IntoIterator<Item = ContentItem>) -> Result<Self> {
        let mut map: HashMap<ContentId, ContentItem> = HashMap::new();
        for item in items {
            if item.size_mb.is_nan() || item.size_mb <= 0.0 {
                return Err(Error::domain("content size", format!("item {} has size {}", item.id, item.size_mb)));
            }
            if let Some(prev) = map.insert(item.id, item) {
                if prev != item {
                    return Err(Error::domain(
                        "content item",
                        format!("id {} listed with conflicting attributes", item.id),
                    ));
                }
            }
        }
        Ok(ContentCatalog {
            storage: Storage::Listed(map),
        })
    }

    pub fn get(&self, id: ContentId) -> Option<ContentItem> {
        match &self.storage {
            Storage::Generated { segments } => segments.iter().find_map(|s| s.get(id)),
            Storage::Listed(map) => map.get(&id).copied(),
        }
    }

    pub fn item(&self, id: ContentId) -> Result<ContentItem> {
        self.get(id).ok_or(Error::UnknownContent(id.0))
    }

    /// Generated segment for `class`; `None` for listed catalogs.
    pub fn segment(&self, class: ContentClass) -> Option<&ClassSegment> {
        match &self.storage {
            Storage::Generated { segments } => segments.iter().find(|s| s.class == class),
            Storage::Listed(_) => None,
        }
    }

    pub fn len(&self) -> u64 {
        match &self.storage {
            Storage::Generated { segments } => segments.iter().map(ClassSegment::len).sum(),
            Storage::Listed(map) => map.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
