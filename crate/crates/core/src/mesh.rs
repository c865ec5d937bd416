//! Carriers (simplicial meshes, regular grids) and the per-vertex fields they hold.
//!
//! Supported inputs:
//! - ASCII OFF with triangular faces;
//! - a grid text format: header `GRID nx ny nz nfields`, then whitespace separated
//!   values, field-major, x varying fastest;
//! - per-vertex field CSV with rows `vertex_id,value` (an optional header row is skipped).

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triangulated carrier. Simplices may be edges, triangles or tetrahedra; the edge
/// graph is derived from all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialMesh {
    vertices: Vec<[f64; 3]>,
    simplices: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl SimplicialMesh {
    pub fn new(vertices: Vec<[f64; 3]>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        if simplices.is_empty() {
            return Err(Error::NoSimplices);
        }
        let count = vertices.len();
        let mut edges = BTreeSet::new();
        for (s, simplex) in simplices.iter().enumerate() {
            for &index in simplex {
                if index >= count {
                    return Err(Error::DanglingIndex {
                        simplex: s,
                        index,
                        count,
                    });
                }
            }
            for (i, &a) in simplex.iter().enumerate() {
                for &b in &simplex[i + 1..] {
                    if a == b {
                        return Err(Error::DegenerateSimplex(s));
                    }
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
        Ok(Self {
            vertices,
            simplices,
            edges: edges.into_iter().collect(),
        })
    }

    pub fn from_triangles(vertices: Vec<[f64; 3]>, triangles: &[[usize; 3]]) -> Result<Self> {
        Self::new(vertices, triangles.iter().map(|t| t.to_vec()).collect())
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    /// Sorted, deduplicated edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.simplices
            .iter()
            .filter(|s| s.len() == 3)
            .map(|s| [s[0], s[1], s[2]])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles().count()
    }

    /// Apply `x -> R x + t`.
    pub fn transformed(&self, rotation: [[f64; 3]; 3], translation: [f64; 3]) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|p| {
                let mut out = translation;
                for (r, o) in rotation.iter().zip(out.iter_mut()) {
                    *o += r[0] * p[0] + r[1] * p[1] + r[2] * p[2];
                }
                out
            })
            .collect();
        Self {
            vertices,
            simplices: self.simplices.clone(),
            edges: self.edges.clone(),
        }
    }

    pub fn load_off(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_off(&text)
    }

    pub fn parse_off(text: &str) -> Result<Self> {
        let tokens: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| {
                let content = line.split('#').next().unwrap_or("");
                content.split_whitespace().map(move |t| (i + 1, t))
            })
            .collect();
        let mut tokens = tokens.into_iter();

        match tokens.next() {
            Some((_, "OFF")) => {}
            Some((line, other)) => {
                return Err(Error::parse(
                    line,
                    format!("expected `OFF`, found `{other}`"),
                ))
            }
            None => return Err(Error::parse(1, "empty file")),
        }
        let mut next = |what: &str| -> Result<(usize, &str)> {
            tokens
                .next()
                .ok_or_else(|| Error::parse(0, format!("unexpected end of file reading {what}")))
        };
        fn int(line: usize, tok: &str, what: &str) -> Result<usize> {
            tok.parse()
                .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
        }

        let (l, t) = next("vertex count")?;
        let nv = int(l, t, "vertex count")?;
        let (l, t) = next("face count")?;
        let nf = int(l, t, "face count")?;
        let (l, t) = next("edge count")?;
        int(l, t, "edge count")?;

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let mut p = [0.0; 3];
            for c in p.iter_mut() {
                let (line, tok) = next("coordinate")?;
                *c = tok
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(line, format!("invalid coordinate `{tok}`")))?;
            }
            vertices.push(p);
        }
        if nf == 0 {
            return Err(Error::NoSimplices);
        }
        let mut faces = Vec::with_capacity(nf);
        for face in 0..nf {
            let (l, t) = next("face arity")?;
            let arity = int(l, t, "face arity")?;
            if arity != 3 {
                return Err(Error::NonTriangularFace { face, arity });
            }
            let mut tri = Vec::with_capacity(3);
            for _ in 0..3 {
                let (l, t) = next("vertex index")?;
                tri.push(int(l, t, "vertex index")?);
            }
            faces.push(tri);
        }
        Self::new(vertices, faces)
    }

    pub fn write_off(&self, mut out: impl Write) -> std::io::Result<()> {
        let tris: Vec<_> = self.triangles().collect();
        writeln!(out, "OFF")?;
        writeln!(out, "{} {} 0", self.vertices.len(), tris.len())?;
        for v in &self.vertices {
            writeln!(out, "{} {} {}", v[0], v[1], v[2])?;
        }
        for t in tris {
            writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

/// Regular grid with unit spacing and 6-neighbourhood adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularGrid {
    pub dims: [usize; 3],
}

impl RegularGrid {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self { dims: [nx, ny, nz] }
    }

    pub fn vertex_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    pub fn coords(&self, i: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [i % nx, (i / nx) % ny, i / (nx * ny)]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let [nx, ny, nz] = self.dims;
        let mut edges = Vec::new();
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let i = self.index(x, y, z);
                    if x + 1 < nx {
                        edges.push((i, self.index(x + 1, y, z)));
                    }
                    if y + 1 < ny {
                        edges.push((i, self.index(x, y + 1, z)));
                    }
                    if z + 1 < nz {
                        edges.push((i, self.index(x, y, z + 1)));
                    }
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Parse a grid file and return the grid with its fields named `f0`, `f1`, ...
    pub fn parse(text: &str) -> Result<(Self, Vec<VertexField>)> {
        let mut tokens = text.split_whitespace();
        match tokens.next() {
            Some("GRID") => {}
            other => {
                return Err(Error::parse(
                    1,
                    format!("expected `GRID` header, found {other:?}"),
                ))
            }
        }
        let mut header = [0usize; 4];
        for h in header.iter_mut() {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::parse(1, "truncated GRID header"))?;
            *h = tok
                .parse()
                .map_err(|_| Error::parse(1, format!("invalid header value `{tok}`")))?;
        }
        let [nx, ny, nz, nfields] = header;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::EmptyMesh);
        }
        if nfields == 0 {
            return Err(Error::NoFields);
        }
        let grid = Self::new(nx, ny, nz);
        let values = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::parse(0, format!("invalid value `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = grid.vertex_count();
        if values.len() != n * nfields {
            return Err(Error::GridSizeMismatch {
                expected: n * nfields,
                found: values.len(),
            });
        }
        let fields = values
            .chunks(n)
            .enumerate()
            .map(|(i, chunk)| VertexField::new(format!("f{i}"), chunk.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok((grid, fields))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, Vec<VertexField>)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, fields: &[VertexField], mut out: impl Write) -> std::io::Result<()> {
        let [nx, ny, nz] = self.dims;
        writeln!(out, "GRID {nx} {ny} {nz} {}", fields.len())?;
        for f in fields {
            for row in f.values.chunks(nx) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Scalar values attached to the vertices of a carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexField {
    pub name: String,
    pub values: Vec<f64>,
}

impl VertexField {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if let Some(vertex) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { name, vertex });
        }
        Ok(Self { name, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(min, max)` of the values; `None` when empty.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().copied();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    pub fn amplitude(&self) -> f64 {
        self.range().map_or(0.0, |(lo, hi)| hi - lo)
    }

    /// Reads `vertex_id,value` rows. Every vertex in `0..vertex_count` must appear once.
    pub fn read_csv(
        name: impl Into<String>,
        reader: impl std::io::Read,
        vertex_count: usize,
    ) -> Result<Self> {
        let name = name.into();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut values = vec![None; vertex_count];
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::parse(row + 1, "expected `vertex_id,value`"));
            }
            let id = match record[0].parse::<usize>() {
                Ok(id) => id,
                Err(_) if row == 0 => continue,
                Err(_) => return Err(Error::parse(row + 1, "invalid vertex id")),
            };
            let value: f64 = record[1]
                .parse()
                .map_err(|_| Error::parse(row + 1, "invalid value"))?;
            let slot = values.get_mut(id).ok_or(Error::DanglingIndex {
                simplex: row,
                index: id,
                count: vertex_count,
            })?;
            if slot.replace(value).is_some() {
                return Err(Error::parse(row + 1, format!("duplicate vertex {id}")));
            }
        }
        let found = values.iter().filter(|v| v.is_some()).count();
        if found != vertex_count {
            return Err(Error::FieldLength {
                name,
                expected: vertex_count,
                found,
            });
        }
        Self::new(name, values.into_iter().map(Option::unwrap).collect())
    }

    pub fn load_csv(
        name: impl Into<String>,
        path: impl AsRef<Path>,
        vertex_count: usize,
    ) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(name, file, vertex_count)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["vertex_id", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            wtr.write_record([i.to_string(), v.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Carrier {
    Mesh(SimplicialMesh),
    Grid(RegularGrid),
}

impl Carrier {
    pub fn vertex_count(&self) -> usize {
        match self {
            Carrier::Mesh(m) => m.vertex_count(),
            Carrier::Grid(g) => g.vertex_count(),
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            Carrier::Mesh(m) => m.edges().to_vec(),
            Carrier::Grid(g) => g.edges(),
        }
    }
}

/// A carrier with `n >= 1` aligned vertex fields; field order is `f1, ..., fn`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiField {
    carrier: Carrier,
    fields: Vec<VertexField>,
}

impl MultiField {
    pub fn new(carrier: Carrier, fields: Vec<VertexField>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::NoFields);
        }
        let expected = carrier.vertex_count();
        for f in &fields {
            if f.len() != expected {
                return Err(Error::FieldLength {
                    name: f.name.clone(),
                    expected,
                    found: f.len(),
                });
            }
        }
        Ok(Self { carrier, fields })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn fields(&self) -> &[VertexField] {
        &self.fields
    }

    pub fn field_count(&self) -> usize {
        self.fields.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.carrier.vertex_count()
    }

    /// Fields rearranged so that the new `i`-th field is the old `order[i]`-th.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let n = self.fields.len();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidOrder(order.to_vec()));
        }
        Ok(Self {
            carrier: self.carrier.clone(),
            fields: order.iter().map(|&i| self.fields[i].clone()).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle_off() {
        let mesh = SimplicialMesh::parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
        assert_eq!(mesh.vertex_count(), 3);
        assert_eq!(mesh.triangle_count(), 1);
        assert_eq!(mesh.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn off_with_comments_and_header_counts() {
        let text = "OFF # header\n# a comment\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n3 0 1 2\n3 1 3 2 # second\n";
        let mesh = SimplicialMesh::parse_off(text).unwrap();
        assert_eq!(mesh.triangle_count(), 2);
        assert_eq!(mesh.edges().len(), 5);
    }

    #[test]
    fn off_without_faces_is_rejected() {
        let err = SimplicialMesh::parse_off("OFF\n3 0 0\n0 0 0\n1 0 0\n0 1 0\n").unwrap_err();
        assert!(matches!(err, Error::NoSimplices));
        assert_eq!(err.to_string(), "no simplices");
    }

    #[test]
    fn off_rejects_quads_and_dangling_indices() {
        let quad = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(
            SimplicialMesh::parse_off(quad),
            Err(Error::NonTriangularFace { face: 0, arity: 4 })
        ));
        let dangling = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n";
        assert!(matches!(
            SimplicialMesh::parse_off(dangling),
            Err(Error::DanglingIndex { index: 7, .. })
        ));
        assert!(matches!(
            SimplicialMesh::parse_off("PLY\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn small_grid() {
        let (grid, fields) = RegularGrid::parse("GRID 2 2 1 1\n0 1\n2 3\n").unwrap();
        assert_eq!(grid.vertex_count(), 4);
        assert_eq!(grid.edges().len(), 4);
        assert_eq!(fields.len(), 1);
        assert_eq!(fields[0].values, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn grid_value_count_mismatch() {
        let text = format!("GRID 2 2 2 1\n{}", "1 ".repeat(7));
        assert!(matches!(
            RegularGrid::parse(&text),
            Err(Error::GridSizeMismatch {
                expected: 8,
                found: 7
            })
        ));
    }

    #[test]
    fn grid_edges_are_six_neighbourhood() {
        let g = RegularGrid::new(3, 3, 3);
        // 3 directions * (2 * 3 * 3) edges each
        assert_eq!(g.edges().len(), 54);
        assert_eq!(g.coords(g.index(2, 1, 2)), [2, 1, 2]);
    }

    #[test]
    fn grid_round_trips_through_text() {
        let grid = RegularGrid::new(3, 2, 1);
        let f = VertexField::new("a", vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0]).unwrap();
        let g = VertexField::new("b", vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        grid.write(&[f.clone(), g.clone()], &mut buf).unwrap();
        let (back, fields) = RegularGrid::parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, grid);
        assert_eq!(fields[0].values, f.values);
        assert_eq!(fields[1].values, g.values);
    }

    #[test]
    fn field_csv_round_trip_and_errors() {
        let f = VertexField::new("x", vec![0.25, -1.0, 3.5]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = VertexField::read_csv("x", buf.as_slice(), 3).unwrap();
        assert_eq!(back, f);

        let missing = "0,1.0\n2,3.0\n";
        assert!(matches!(
            VertexField::read_csv("x", missing.as_bytes(), 3),
            Err(Error::FieldLength { found: 2, .. })
        ));
        assert!(VertexField::new("bad", vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn multifield_checks_lengths_and_order() {
        let carrier = Carrier::Grid(RegularGrid::new(2, 1, 1));
        let a = VertexField::new("a", vec![0.0, 1.0]).unwrap();
        let b = VertexField::new("b", vec![2.0, 3.0]).unwrap();
        let short = VertexField::new("c", vec![0.0]).unwrap();
        assert!(MultiField::new(carrier.clone(), vec![]).is_err());
        assert!(MultiField::new(carrier.clone(), vec![a.clone(), short]).is_err());
        let mf = MultiField::new(carrier, vec![a, b]).unwrap();
        let swapped = mf.reordered(&[1, 0]).unwrap();
        assert_eq!(swapped.fields()[0].name, "b");
        assert!(mf.reordered(&[0, 0]).is_err());
        assert!(mf.reordered(&[0]).is_err());
    }
}
