//! Loading meshes, grids, field files and corpus manifests.

use std::path::{Path, PathBuf};

use mdpd::{
    euclidean_field, geodesic_field, Carrier, MultiField, RegularGrid, SimplicialMesh, VertexField,
};

use crate::error::{CliError, CliResult};

/// Field sources for a mesh when `--fields` is not given.
pub const DEFAULT_MESH_FIELDS: [&str; 2] = ["geodesic", "euclidean"];

fn is_off(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("off"))
}

/// A mesh (`.off`) or a `GRID` file.
///
/// For meshes each `fields` entry is `geodesic`, `euclidean` or a `vertex_id,value` CSV path.
/// For grids the entries select stored fields by name (`f0`, `f1`, ...); empty means all.
pub fn load_object(path: &Path, fields: &[String]) -> CliResult<MultiField> {
    if is_off(path) {
        let mesh = SimplicialMesh::load_off(path)?;
        let names: Vec<String> = if fields.is_empty() {
            DEFAULT_MESH_FIELDS.iter().map(|s| s.to_string()).collect()
        } else {
            fields.to_vec()
        };
        let values = names
            .iter()
            .map(|name| mesh_field(&mesh, path, name))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(MultiField::new(Carrier::Mesh(mesh), values)?)
    } else {
        let (grid, stored) = RegularGrid::load(path)?;
        let values = if fields.is_empty() {
            stored
        } else {
            fields
                .iter()
                .map(|name| {
                    stored
                        .iter()
                        .find(|f| &f.name == name)
                        .cloned()
                        .ok_or_else(|| {
                            CliError::Input(format!("{}: no field `{name}`", path.display()))
                        })
                })
                .collect::<CliResult<Vec<_>>>()?
        };
        Ok(MultiField::new(Carrier::Grid(grid), values)?)
    }
}

fn mesh_field(mesh: &SimplicialMesh, mesh_path: &Path, name: &str) -> CliResult<VertexField> {
    Ok(match name {
        "geodesic" => geodesic_field(mesh)?,
        "euclidean" => euclidean_field(mesh)?,
        csv => {
            let p = mesh_path.parent().unwrap_or(Path::new(".")).join(csv);
            let p = if Path::new(csv).is_absolute() || !p.exists() {
                PathBuf::from(csv)
            } else {
                p
            };
            let stem = p
                .file_stem()
                .map_or(csv.to_string(), |s| s.to_string_lossy().into());
            VertexField::load_csv(stem, &p, mesh.vertex_count())?
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub id: String,
    pub path: PathBuf,
    pub label: String,
}

/// `id, path, label` lines; paths are relative to the manifest. Blank lines and lines
/// starting with `#` are skipped.
pub fn read_manifest(path: &Path) -> CliResult<Vec<Entry>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries: Vec<Entry> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |msg: &str| CliError::Input(format!("{}:{}: {msg}", path.display(), n + 1));
        if cols.len() != 3 {
            return Err(bad("expected `id, path, label`"));
        }
        if cols[2].is_empty() {
            return Err(bad("missing label"));
        }
        if entries.iter().any(|e| e.id == cols[0]) {
            return Err(bad(&format!("duplicate id `{}`", cols[0])));
        }
        entries.push(Entry {
            id: cols[0].to_string(),
            path: base.join(cols[1]),
            label: cols[2].to_string(),
        });
    }
    if entries.is_empty() {
        return Err(CliError::Input(format!(
            "{}: empty manifest",
            path.display()
        )));
    }
    Ok(entries)
}
