//! Mesh file formats.
//!
//! Two formats are supported:
//! * a plain-text interchange format: first line `V T`, then `V` lines
//!   `x y b` (b = 1 marks a Dirichlet boundary vertex), then `T` lines
//!   `i j k` with zero-based CCW vertex indices. Import re-validates every
//!   mesh invariant.
//! * legacy-VTK ASCII unstructured grids for visualization, with any number
//!   of point scalar fields attached.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::TriMesh;

impl TriMesh {
    /// Writes the plain-text format. Coordinates round-trip exactly.
    pub fn write_plain<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.vertices.len(), self.triangles.len())?;
        for (v, p) in self.vertices.iter().enumerate() {
            writeln!(out, "{} {} {}", p[0], p[1], u8::from(self.boundary[v]))?;
        }
        for tri in &self.triangles {
            writeln!(out, "{} {} {}", tri[0], tri[1], tri[2])?;
        }
        Ok(())
    }

    /// Reads the plain-text format and validates all mesh invariants.
    pub fn read_plain<R: BufRead>(input: R) -> Result<TriMesh> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Mesh("empty mesh file".into()))??;
        let mut counts = header.split_whitespace();
        let nv: usize = parse_field(counts.next(), "vertex count")?;
        let nt: usize = parse_field(counts.next(), "triangle count")?;

        let mut vertices = Vec::with_capacity(nv);
        let mut boundary = Vec::with_capacity(nv);
        for i in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| Error::Mesh(format!("missing vertex line {i}")))??;
            let mut fields = line.split_whitespace();
            let x: f64 = parse_field(fields.next(), "x")?;
            let y: f64 = parse_field(fields.next(), "y")?;
            let b: u8 = parse_field(fields.next(), "boundary flag")?;
            if b > 1 {
                return Err(Error::Mesh(format!("boundary flag must be 0 or 1, got {b}")));
            }
            vertices.push([x, y]);
            boundary.push(b == 1);
        }
        let mut triangles = Vec::with_capacity(nt);
        for i in 0..nt {
            let line = lines
                .next()
                .ok_or_else(|| Error::Mesh(format!("missing triangle line {i}")))??;
            let mut fields = line.split_whitespace();
            let a: usize = parse_field(fields.next(), "i")?;
            let b: usize = parse_field(fields.next(), "j")?;
            let c: usize = parse_field(fields.next(), "k")?;
            triangles.push([a, b, c]);
        }

        let mut mesh = TriMesh {
            vertices,
            triangles,
            boundary,
            h: 0.0,
            domain: None,
        };
        mesh.h = mesh.max_edge_length();
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn export_plain<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_plain(std::io::BufWriter::new(file))
    }

    pub fn import_plain<P: AsRef<Path>>(path: P) -> Result<TriMesh> {
        let file = std::fs::File::open(path)?;
        TriMesh::read_plain(std::io::BufReader::new(file))
    }

    /// Writes a legacy-VTK ASCII unstructured grid with optional per-vertex
    /// scalar fields.
    pub fn write_vtk<W: Write>(&self, mut out: W, fields: &[(&str, &[f64])]) -> Result<()> {
        for (name, values) in fields {
            if values.len() != self.vertices.len() {
                return Err(Error::Mesh(format!(
                    "field '{name}' has {} values for {} vertices",
                    values.len(),
                    self.vertices.len()
                )));
            }
        }
        writeln!(out, "# vtk DataFile Version 3.0")?;
        writeln!(out, "plap mesh")?;
        writeln!(out, "ASCII")?;
        writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
        writeln!(out, "POINTS {} double", self.vertices.len())?;
        for p in &self.vertices {
            writeln!(out, "{} {} 0", p[0], p[1])?;
        }
        writeln!(out, "CELLS {} {}", self.triangles.len(), 4 * self.triangles.len())?;
        for tri in &self.triangles {
            writeln!(out, "3 {} {} {}", tri[0], tri[1], tri[2])?;
        }
        writeln!(out, "CELL_TYPES {}", self.triangles.len())?;
        for _ in &self.triangles {
            writeln!(out, "5")?;
        }
        writeln!(out, "POINT_DATA {}", self.vertices.len())?;
        writeln!(out, "SCALARS boundary int 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for &b in &self.boundary {
            writeln!(out, "{}", u8::from(b))?;
        }
        for (name, values) in fields {
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for v in *values {
                writeln!(out, "{v}")?;
            }
        }
        Ok(())
    }

    pub fn export_vtk<P: AsRef<Path>>(&self, path: P, fields: &[(&str, &[f64])]) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_vtk(std::io::BufWriter::new(file), fields)
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, name: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Mesh(format!("missing field '{name}'")))?
        .parse()
        .map_err(|_| Error::Mesh(format!("cannot parse field '{name}'")))
}
