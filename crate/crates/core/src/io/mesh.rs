//! ASCII mesh format.
//!
//! ```text
//! polyfem-mesh 1
//! nodes <N>
//! <x> <y> <z>              (N lines)
//! elements <M> <hex8|quad4>
//! <i0> <i1> ...            (M lines, 0-based indices)
//! nodeset <name> <count>   (zero or more blocks)
//! <index>                  (count lines)
//! ```

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::fmt::sci9;
use crate::error::{Error, Result};
use crate::fem::{ElementKind, MeshModel};

struct Lines<'a> {
    path: &'a str,
    inner: std::iter::Enumerate<std::io::Lines<BufReader<std::fs::File>>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, String)> {
        for (idx, line) in self.inner.by_ref() {
            let line = line?;
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                return Ok((idx + 1, trimmed.to_string()));
            }
        }
        Err(Error::Parse {
            path: self.path.to_string(),
            line: 0,
            message: "unexpected end of file".to_string(),
        })
    }

    fn maybe_next_line(&mut self) -> Option<(usize, String)> {
        for (idx, line) in self.inner.by_ref() {
            let Ok(line) = line else { return None };
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                return Some((idx + 1, trimmed.to_string()));
            }
        }
        None
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_string(),
            line,
            message: message.into(),
        }
    }
}

/// Reads and validates a mesh file.
pub fn read_mesh(path: impl AsRef<Path>) -> Result<MeshModel> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = std::fs::File::open(path)?;
    let mut lines = Lines {
        path: &display,
        inner: BufReader::new(file).lines().enumerate(),
    };

    let (ln, header) = lines.next_line()?;
    if header != "polyfem-mesh 1" {
        return Err(lines.err(ln, format!("expected 'polyfem-mesh 1', got '{header}'")));
    }
    let (ln, nodes_header) = lines.next_line()?;
    let n_nodes: usize = match nodes_header.strip_prefix("nodes ") {
        Some(rest) => rest
            .trim()
            .parse()
            .map_err(|_| lines.err(ln, format!("bad node count '{rest}'")))?,
        None => return Err(lines.err(ln, format!("expected 'nodes <N>', got '{nodes_header}'"))),
    };
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, line) = lines.next_line()?;
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| lines.err(ln, format!("bad coordinate: {e}")))?;
        if coords.len() != 3 {
            return Err(lines.err(ln, format!("expected 3 coordinates, got {}", coords.len())));
        }
        nodes.push([coords[0], coords[1], coords[2]]);
    }

    let (ln, el_header) = lines.next_line()?;
    let parts: Vec<&str> = el_header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "elements" {
        return Err(lines.err(ln, format!("expected 'elements <M> <kind>', got '{el_header}'")));
    }
    let n_elems: usize = parts[1]
        .parse()
        .map_err(|_| lines.err(ln, format!("bad element count '{}'", parts[1])))?;
    let kind = match parts[2] {
        "hex8" => ElementKind::Hex8,
        "quad4" => ElementKind::Quad4,
        other => return Err(lines.err(ln, format!("unknown element kind '{other}'"))),
    };
    let mut elements = Vec::with_capacity(n_elems);
    for _ in 0..n_elems {
        let (ln, line) = lines.next_line()?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| lines.err(ln, format!("bad node index: {e}")))?;
        if idx.len() != kind.n_nodes() {
            return Err(lines.err(
                ln,
                format!("expected {} indices, got {}", kind.n_nodes(), idx.len()),
            ));
        }
        elements.push(idx);
    }

    let mut node_sets = BTreeMap::new();
    while let Some((ln, line)) = lines.maybe_next_line() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "nodeset" {
            return Err(lines.err(ln, format!("expected 'nodeset <name> <count>', got '{line}'")));
        }
        let name = parts[1].to_string();
        let count: usize = parts[2]
            .parse()
            .map_err(|_| lines.err(ln, format!("bad node set count '{}'", parts[2])))?;
        let mut set = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, line) = lines.next_line()?;
            set.push(
                line.parse::<usize>()
                    .map_err(|e| lines.err(ln, format!("bad node index: {e}")))?,
            );
        }
        node_sets.insert(name, set);
    }

    let mesh = MeshModel {
        nodes,
        kind,
        elements,
        node_sets,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Writes the mesh in the same format (nine-digit scientific coordinates).
pub fn write_mesh(mesh: &MeshModel, path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "polyfem-mesh 1")?;
    writeln!(out, "nodes {}", mesh.nodes.len())?;
    for p in &mesh.nodes {
        writeln!(out, "{} {} {}", sci9(p[0]), sci9(p[1]), sci9(p[2]))?;
    }
    writeln!(out, "elements {} {}", mesh.elements.len(), mesh.kind.name())?;
    for conn in &mesh.elements {
        let line: Vec<String> = conn.iter().map(|k| k.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    for (name, set) in &mesh.node_sets {
        writeln!(out, "nodeset {name} {}", set.len())?;
        for k in set {
            writeln!(out, "{k}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::meshgen;

    #[test]
    fn unit_cube_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.mesh");
        let mesh = meshgen::block(1, 1, 1, 1.0, 1.0, 1.0);
        write_mesh(&mesh, &path).unwrap();
        let back = read_mesh(&path).unwrap();
        assert_eq!(back.nodes.len(), 8);
        assert_eq!(back.elements.len(), 1);
        assert_eq!(back.elements[0], mesh.elements[0]);
        assert_eq!(back.node_sets.len(), mesh.node_sets.len());
    }

    #[test]
    fn inverted_element_names_the_culprit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.mesh");
        let mut mesh = meshgen::strip(1, 1, 1.0, 1.0);
        mesh.elements[0].swap(0, 1);
        // bypass the generator's validity by writing directly
        write_mesh(&mesh, &path).unwrap();
        let err = read_mesh(&path).unwrap_err();
        assert!(err.to_string().contains("element 0"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.mesh");
        std::fs::write(&path, "polyfem-mesh 1\nnodes 2\n0 0 0\n").unwrap();
        let err = read_mesh(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        let path2 = dir.path().join("badnum.mesh");
        std::fs::write(&path2, "polyfem-mesh 1\nnodes 1\n0 zero 0\n").unwrap();
        let err = read_mesh(&path2).unwrap_err();
        assert!(err.to_string().contains(":3:"), "{err}");
    }
}
