//! Legacy ASCII VTK unstructured-grid writer.
//!
//! Point data: `displacement` (3-vector), `phi`, `von_mises`. Reference
//! coordinates are written; viewers warp by the displacement vector.

use std::io::Write;
use std::path::Path;

use super::fmt::sci9;
use crate::error::Result;
use crate::fem::{ElementKind, MeshModel};

/// Per-step file name `<prefix>_<step:05>.vtk`.
pub fn step_filename(prefix: &str, step: usize) -> String {
    format!("{prefix}_{step:05}.vtk")
}

/// Writes one snapshot. `u` is node-major with the mesh dimension,
/// `phi` and `von_mises` one scalar per node.
pub fn write_vtk(
    mesh: &MeshModel,
    u: &[f64],
    phi: &[f64],
    von_mises: &[f64],
    path: impl AsRef<Path>,
) -> Result<()> {
    let dim = mesh.dim();
    let n = mesh.n_nodes();
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "chainfield snapshot")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {n} double")?;
    for p in &mesh.nodes {
        writeln!(out, "{} {} {}", sci9(p[0]), sci9(p[1]), sci9(p[2]))?;
    }
    let per = mesh.kind.n_nodes();
    writeln!(out, "CELLS {} {}", mesh.elements.len(), mesh.elements.len() * (per + 1))?;
    for conn in &mesh.elements {
        let mut line = vec![per.to_string()];
        line.extend(conn.iter().map(|k| k.to_string()));
        writeln!(out, "{}", line.join(" "))?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.elements.len())?;
    let cell_type = match mesh.kind {
        ElementKind::Hex8 => 12,
        ElementKind::Quad4 => 9,
    };
    for _ in &mesh.elements {
        writeln!(out, "{cell_type}")?;
    }
    writeln!(out, "POINT_DATA {n}")?;
    writeln!(out, "VECTORS displacement double")?;
    for k in 0..n {
        let ux = u[k * dim];
        let uy = u[k * dim + 1];
        let uz = if dim > 2 { u[k * dim + 2] } else { 0.0 };
        writeln!(out, "{} {} {}", sci9(ux), sci9(uy), sci9(uz))?;
    }
    writeln!(out, "SCALARS phi double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for &v in phi {
        writeln!(out, "{}", sci9(v))?;
    }
    writeln!(out, "SCALARS von_mises double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for &v in von_mises {
        writeln!(out, "{}", sci9(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::meshgen;

    #[test]
    fn filenames_are_zero_padded() {
        assert_eq!(step_filename("run", 7), "run_00007.vtk");
        assert_eq!(step_filename("tear", 12345), "tear_12345.vtk");
    }

    #[test]
    fn writer_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = meshgen::strip(2, 1, 2.0, 1.0);
        let u = vec![0.001; mesh.n_nodes() * 2];
        let phi = vec![1.0; mesh.n_nodes()];
        let vm = vec![0.5; mesh.n_nodes()];
        let a = dir.path().join("a.vtk");
        let b = dir.path().join("b.vtk");
        write_vtk(&mesh, &u, &phi, &vm, &a).unwrap();
        write_vtk(&mesh, &u, &phi, &vm, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn undeformed_strip_matches_golden_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = meshgen::strip(1, 1, 1.0, 1.0);
        let path = dir.path().join("golden.vtk");
        write_vtk(
            &mesh,
            &vec![0.0; 8],
            &vec![1.0; 4],
            &vec![0.0; 4],
            &path,
        )
        .unwrap();
        let got = std::fs::read_to_string(&path).unwrap();
        let want = "\
# vtk DataFile Version 3.0
chainfield snapshot
ASCII
DATASET UNSTRUCTURED_GRID
POINTS 4 double
0.00000000e+00 0.00000000e+00 0.00000000e+00
1.00000000e+00 0.00000000e+00 0.00000000e+00
0.00000000e+00 1.00000000e+00 0.00000000e+00
1.00000000e+00 1.00000000e+00 0.00000000e+00
CELLS 1 5
4 0 1 3 2
CELL_TYPES 1
9
POINT_DATA 4
VECTORS displacement double
0.00000000e+00 0.00000000e+00 0.00000000e+00
0.00000000e+00 0.00000000e+00 0.00000000e+00
0.00000000e+00 0.00000000e+00 0.00000000e+00
0.00000000e+00 0.00000000e+00 0.00000000e+00
SCALARS phi double 1
LOOKUP_TABLE default
1.00000000e+00
1.00000000e+00
1.00000000e+00
1.00000000e+00
SCALARS von_mises double 1
LOOKUP_TABLE default
0.00000000e+00
0.00000000e+00
0.00000000e+00
0.00000000e+00
";
        assert_eq!(got, want);
    }
}
