//! End-to-end composition: multi-field → JCN → MDRG → resolved MDRG → diagrams → MDPD.

use crate::error::{Error, Result};
use crate::jcn::{build_jcn, JointContourNet, QuantizationSpec};
use crate::mdpd::{construct_mdpd, DiagramTree, Mdpd};
use crate::mdrg::{build_mdrg, Mdrg};
use crate::mesh::MultiField;
use crate::persistence::{default_epsilon, resolve_degeneracies};

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub spec: QuantizationSpec,
    pub jcn: JointContourNet,
    pub mdrg: Mdrg,
    pub resolved: Mdrg,
    pub diagrams: DiagramTree,
}

impl Pipeline {
    /// `epsilon` is the degeneracy-resolution offset; `None` uses `1e-6` of each field's
    /// level width.
    pub fn run(mf: &MultiField, spec: &QuantizationSpec, epsilon: Option<f64>) -> Result<Self> {
        if let Some(e) = epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidEpsilon(e));
            }
        }
        let jcn = build_jcn(mf, spec)?;
        let mdrg = build_mdrg(&jcn);
        let resolved = mdrg.try_map(&|rg| {
            resolve_degeneracies(rg, epsilon.unwrap_or_else(|| default_epsilon(rg.width)))
        })?;
        let diagrams = DiagramTree::compute(&resolved)?;
        Ok(Self {
            spec: spec.clone(),
            jcn,
            mdrg,
            resolved,
            diagrams,
        })
    }

    /// Needs at least two fields.
    pub fn mdpd(&self) -> Result<Mdpd> {
        construct_mdpd(&self.spec, &self.resolved, &self.diagrams)
    }
}

/// Shorthand for [`Pipeline::run`] followed by [`Pipeline::mdpd`].
pub fn mdpd_of(mf: &MultiField, spec: &QuantizationSpec, epsilon: Option<f64>) -> Result<Mdpd> {
    Pipeline::run(mf, spec, epsilon)?.mdpd()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcn::FieldQuantization;
    use crate::mesh::{Carrier, RegularGrid, VertexField};

    fn toy() -> (MultiField, QuantizationSpec) {
        let grid = RegularGrid::new(4, 4, 1);
        let f0 = (0..16).map(|i| (i % 4) as f64).collect();
        let f1 = (0..16).map(|i| ((i / 4) as f64 - 1.5).abs()).collect();
        let mf = MultiField::new(
            Carrier::Grid(grid),
            vec![
                VertexField::new("a", f0).unwrap(),
                VertexField::new("b", f1).unwrap(),
            ],
        )
        .unwrap();
        let spec = QuantizationSpec::new(vec![
            FieldQuantization::new(0.0, 3.0, 3).unwrap(),
            FieldQuantization::new(0.0, 1.5, 3).unwrap(),
        ])
        .unwrap();
        (mf, spec)
    }

    #[test]
    fn toy_grid_runs_end_to_end() {
        let (mf, spec) = toy();
        let p = Pipeline::run(&mf, &spec, None).unwrap();
        assert_eq!(p.resolved.children.len(), p.mdrg.graph.node_count());
        let m = p.mdpd().unwrap();
        assert!(!m.is_empty());
        assert_eq!(m.field_count(), 2);
    }

    #[test]
    fn bad_epsilon() {
        let (mf, spec) = toy();
        assert!(matches!(
            Pipeline::run(&mf, &spec, Some(0.0)),
            Err(Error::InvalidEpsilon(_))
        ));
    }
}
