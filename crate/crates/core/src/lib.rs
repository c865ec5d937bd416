//! Topological distance between multi-fields.
//!
//! Pipeline: a [`MultiField`] is quantized into a [`JointContourNet`], decomposed into a
//! multi-dimensional Reeb graph ([`Mdrg`]), each Reeb graph gets a persistence diagram,
//! and the diagrams are assembled into a multi-dimensional persistence diagram
//! ([`Mdpd`]). Two MDPDs are compared with [`mdrg_distance`], a constrained
//! Wasserstein distance solved with the Hungarian algorithm.

pub mod assignment;
pub mod distance;
pub mod error;
pub mod fields;
pub mod jcn;
pub mod mdpd;
pub mod mdrg;
pub mod mesh;
mod partial_matching;
pub mod persistence;
pub mod pipeline;
pub mod refine;
pub mod retrieval;
pub mod synth;
mod union_find;

pub use assignment::{hungarian, Assignment, CostMatrix};
pub use distance::{mdrg_distance, reeb_wasserstein, DistanceResult};
pub use error::{Error, Result};
pub use fields::{euclidean_field, geodesic_field};
pub use jcn::{build_jcn, FieldQuantization, JointContourNet, QuantizationSpec};
pub use mdpd::{construct_mdpd, DiagramTree, Mdpd, MdpdPoint};
pub use mdrg::{build_mdrg, extract_reeb, Mdrg, ReebGraph, ReebNode};
pub use mesh::{Carrier, MultiField, RegularGrid, SimplicialMesh, VertexField};
pub use persistence::{
    compute_reeb_pd, resolve_degeneracies, Kind, PersistenceDiagram, PersistencePoint,
};
pub use pipeline::{mdpd_of, Pipeline};
pub use refine::refine_for_quantization;
pub use retrieval::{distance_matrix, evaluate, DistanceMatrix, RetrievalScores};
