use std::collections::BTreeMap;

use kh_core::{PlanarDiagram, SpectralResult};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramInfo {
    pub name: String,
    pub pd: String,
    /// sha256 of the canonical PD text, basepoint included.
    pub hash: String,
    pub crossings: usize,
    pub components: usize,
}

impl DiagramInfo {
    pub fn new(name: &str, d: &PlanarDiagram) -> Self {
        let pd = d.render();
        DiagramInfo {
            name: name.to_string(),
            hash: diagram_hash(d),
            pd,
            crossings: d.crossing_count(),
            components: d.component_count(),
        }
    }
}

pub fn diagram_hash(d: &PlanarDiagram) -> String {
    hex::encode(Sha256::digest(d.render().as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub build_us: u64,
    pub pages_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub tool_version: String,
    pub consistent: bool,
    /// Whether `(∂_1 + … + ∂_i)² = 0`, for `i = 1..=n`.
    pub truncation_squares: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub diagram: DiagramInfo,
    pub flavor: String,
    /// `r → "h,q" → dim`, nonzero entries only, from `E^2` to `E^∞`.
    pub pages: BTreeMap<usize, BTreeMap<String, usize>>,
    pub collapse_page: usize,
    pub total_homology: BTreeMap<i32, usize>,
    pub meta: Meta,
}

impl RunRecord {
    pub fn new(info: DiagramInfo, s: &SpectralResult, truncation_squares: Vec<bool>) -> Self {
        let last = s.pages.len().max(2);
        let pages = (2..=last)
            .map(|r| {
                let entries = s.page(r).support().into_iter().map(|((h, q), d)| (format!("{h},{q}"), d)).collect();
                (r, entries)
            })
            .collect();
        RunRecord {
            diagram: info,
            flavor: s.flavor.name().to_string(),
            pages,
            collapse_page: s.collapse_page,
            total_homology: s.total_homology.iter().filter(|(_, &d)| d > 0).map(|(&q, &d)| (q, d)).collect(),
            meta: Meta { tool_version: TOOL_VERSION.to_string(), consistent: s.consistent, truncation_squares, timings: None },
        }
    }

    pub fn truncated(mut self, max_page: Option<usize>) -> Self {
        if let Some(r) = max_page {
            self.pages.retain(|&k, _| k <= r);
        }
        self
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("r,h,q,dim\n");
        for (r, entries) in &self.pages {
            for (hq, d) in entries {
                out.push_str(&format!("{r},{hq},{d}\n"));
            }
        }
        out
    }
}
