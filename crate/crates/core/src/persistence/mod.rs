//! Persistence diagrams of Reeb graphs: ordinary 0-dimensional pairs of the sublevel and
//! superlevel sweeps, plus the extended 0- and 1-dimensional classes.

mod degeneracy;
mod reduction;
mod sweep;

pub use degeneracy::{critical_count, default_epsilon, is_critical, resolve_degeneracies, Degree};
pub use reduction::compute_reeb_pd;
pub use sweep::sweep_pd0;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    Ordinary0,
    Extended0,
    Extended1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePoint {
    pub birth: f64,
    pub death: f64,
    pub kind: Kind,
    /// Ordinary pair of the superlevel sweep (up-fork, maximum), stored as
    /// `(saddle value, maximum value)`.
    #[serde(default)]
    pub superlevel: bool,
}

impl PersistencePoint {
    pub fn new(birth: f64, death: f64, kind: Kind) -> Self {
        Self {
            birth,
            death,
            kind,
            superlevel: false,
        }
    }

    pub fn dim(&self) -> u8 {
        match self.kind {
            Kind::Extended1 => 1,
            _ => 0,
        }
    }

    /// `[min(birth, death), max(birth, death)]`.
    pub fn interval(&self) -> (f64, f64) {
        (self.birth.min(self.death), self.birth.max(self.death))
    }

    pub fn persistence(&self) -> f64 {
        (self.death - self.birth).abs()
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.superlevel.cmp(&other.superlevel))
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

#[derive(Serialize)]
struct PointJson {
    birth: f64,
    death: f64,
    dim: u8,
    kind: Kind,
    superlevel: bool,
}

/// Points are kept in a canonical order so equal multisets compare equal.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    points: Vec<PersistencePoint>,
}

impl PersistenceDiagram {
    pub fn new(mut points: Vec<PersistencePoint>) -> Self {
        points.sort_by(PersistencePoint::sort_key_cmp);
        Self { points }
    }

    pub fn points(&self) -> &[PersistencePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn of_kind(&self, kind: Kind) -> impl Iterator<Item = &PersistencePoint> {
        self.points.iter().filter(move |p| p.kind == kind)
    }

    pub fn of_dim(&self, dim: u8) -> impl Iterator<Item = &PersistencePoint> {
        self.points.iter().filter(move |p| p.dim() == dim)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let pts: Vec<PointJson> = self
            .points
            .iter()
            .map(|p| PointJson {
                birth: p.birth,
                death: p.death,
                dim: p.dim(),
                kind: p.kind,
                superlevel: p.superlevel,
            })
            .collect();
        serde_json::to_string_pretty(&pts)
    }
}
