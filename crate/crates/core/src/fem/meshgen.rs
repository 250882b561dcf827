//! Structured mesh generators for the shipped benchmarks.

use std::collections::BTreeMap;

use super::{ElementKind, MeshModel};

/// Uniform quad4 strip on `[0, lx] × [0, ly]` with `nx × ny` elements.
///
/// Node sets: `left`, `right`, `bottom`, `top`, `all`.
pub fn strip(nx: usize, ny: usize, lx: f64, ly: f64) -> MeshModel {
    let xs: Vec<f64> = (0..=nx).map(|i| lx * i as f64 / nx as f64).collect();
    let ys: Vec<f64> = (0..=ny).map(|j| ly * j as f64 / ny as f64).collect();
    quad_grid(&xs, &ys)
}

/// Tensor-product quad4 mesh over explicit coordinate lines.
pub fn quad_grid(xs: &[f64], ys: &[f64]) -> MeshModel {
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for &y in ys {
        for &x in xs {
            nodes.push([x, y, 0.0]);
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    sets.insert("left".into(), (0..=ny).map(|j| id(0, j)).collect());
    sets.insert("right".into(), (0..=ny).map(|j| id(nx, j)).collect());
    sets.insert("bottom".into(), (0..=nx).map(|i| id(i, 0)).collect());
    sets.insert("top".into(), (0..=nx).map(|i| id(i, ny)).collect());
    sets.insert("all".into(), (0..nodes.len()).collect());
    MeshModel {
        nodes,
        kind: ElementKind::Quad4,
        elements,
        node_sets: sets,
    }
}

/// Uniform hex8 block on `[0,lx] × [0,ly] × [0,lz]`.
///
/// Node sets: `xmin`, `xmax`, `ymin`, `ymax`, `zmin`, `zmax`, `all`.
pub fn block(nx: usize, ny: usize, nz: usize, lx: f64, ly: f64, lz: f64) -> MeshModel {
    let id = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;
    let mut nodes = Vec::new();
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([
                    lx * i as f64 / nx as f64,
                    ly * j as f64 / ny as f64,
                    lz * k as f64 / nz as f64,
                ]);
            }
        }
    }
    let mut elements = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                elements.push(vec![
                    id(i, j, k),
                    id(i + 1, j, k),
                    id(i + 1, j + 1, k),
                    id(i, j + 1, k),
                    id(i, j, k + 1),
                    id(i + 1, j, k + 1),
                    id(i + 1, j + 1, k + 1),
                    id(i, j + 1, k + 1),
                ]);
            }
        }
    }
    let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut push_face = |name: &str, pred: &dyn Fn(usize, usize, usize) -> bool| {
        let mut v = Vec::new();
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    if pred(i, j, k) {
                        v.push(id(i, j, k));
                    }
                }
            }
        }
        sets.insert(name.into(), v);
    };
    push_face("xmin", &|i, _, _| i == 0);
    push_face("xmax", &|i, _, _| i == nx);
    push_face("ymin", &|_, j, _| j == 0);
    push_face("ymax", &|_, j, _| j == ny);
    push_face("zmin", &|_, _, k| k == 0);
    push_face("zmax", &|_, _, k| k == nz);
    sets.insert("all".into(), (0..nodes.len()).collect());
    MeshModel {
        nodes,
        kind: ElementKind::Hex8,
        elements,
        node_sets: sets,
    }
}

/// Parameters of the angle-specimen benchmark panel.
#[derive(Debug, Clone, Copy)]
pub struct NotchedPanelSpec {
    /// Ligament direction extent (crack runs along x), mm.
    pub width: f64,
    /// Loading direction extent, mm.
    pub height: f64,
    /// Seeded crack length from the x = 0 edge, mm.
    pub crack_len: f64,
    /// Element size inside the refined band around the crack plane, mm.
    pub h_fine: f64,
    /// Cap on the element size far from the crack plane, mm.
    pub h_max: f64,
    /// Half-width of the refined band, mm.
    pub band: f64,
}

impl Default for NotchedPanelSpec {
    fn default() -> Self {
        Self {
            width: 19.0,
            height: 46.0,
            crack_len: 9.31,
            h_fine: 1.0,
            h_max: 4.0,
            band: 6.0,
        }
    }
}

/// Rectangular panel with a y-graded structured mesh and the node sets of
/// the tear benchmark: the seeded crack lives on the mid-plane as a
/// `crack` set (φ = 0 Dirichlet), `notch` collects nodes near the crack
/// tip, `ligament_end` sits at the far side of the crack plane, `bottom`
/// and `top` carry the clamps.
pub fn notched_panel(spec: NotchedPanelSpec) -> MeshModel {
    let nx = (spec.width / spec.h_fine).round().max(2.0) as usize;
    let xs: Vec<f64> = (0..=nx)
        .map(|i| spec.width * i as f64 / nx as f64)
        .collect();

    // symmetric y-grading: uniform h_fine inside the band, geometric
    // growth capped at h_max outside
    let yc = spec.height / 2.0;
    let mut offsets = vec![0.0f64];
    let mut y = 0.0;
    let mut h = spec.h_fine;
    while y < yc - 1e-9 {
        if y >= spec.band {
            h = (h * 1.45).min(spec.h_max);
        }
        y = (y + h).min(yc);
        // avoid a sliver at the boundary
        if yc - y < 0.35 * h {
            y = yc;
        }
        offsets.push(y);
    }
    let mut ys: Vec<f64> = offsets.iter().rev().map(|d| yc - d).collect();
    ys.extend(offsets.iter().skip(1).map(|d| yc + d));

    let mut mesh = quad_grid(&xs, &ys);

    let tol = 1e-9;
    let crack: Vec<usize> = mesh
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, p)| (p[1] - yc).abs() < tol && p[0] <= spec.crack_len + tol)
        .map(|(k, _)| k)
        .collect();
    let tip_x = crack
        .iter()
        .map(|&k| mesh.nodes[k][0])
        .fold(0.0f64, f64::max);
    let notch_radius = 2.5 * spec.h_fine;
    let notch: Vec<usize> = mesh
        .nodes
        .iter()
        .enumerate()
        .filter(|(k, p)| {
            !crack.contains(k)
                && ((p[0] - tip_x).powi(2) + (p[1] - yc).powi(2)).sqrt() <= notch_radius
        })
        .map(|(k, _)| k)
        .collect();
    let ligament_end: Vec<usize> = mesh
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, p)| (p[1] - yc).abs() < 1.5 * spec.h_fine && p[0] >= spec.width - tol)
        .map(|(k, _)| k)
        .collect();
    mesh.node_sets.insert("crack".into(), crack);
    mesh.node_sets.insert("notch".into(), notch);
    mesh.node_sets.insert("ligament_end".into(), ligament_end);
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_counts_and_validity() {
        let m = strip(4, 2, 4.0, 2.0);
        assert_eq!(m.nodes.len(), 15);
        assert_eq!(m.elements.len(), 8);
        m.validate().unwrap();
        assert_eq!(m.node_set("left").unwrap().len(), 3);
        assert_eq!(m.node_set("top").unwrap().len(), 5);
    }

    #[test]
    fn block_counts_and_validity() {
        let m = block(2, 2, 2, 1.0, 1.0, 1.0);
        assert_eq!(m.nodes.len(), 27);
        assert_eq!(m.elements.len(), 8);
        m.validate().unwrap();
        assert_eq!(m.node_set("zmin").unwrap().len(), 9);
    }

    #[test]
    fn notched_panel_sets_are_coherent() {
        let spec = NotchedPanelSpec::default();
        let m = notched_panel(spec);
        m.validate().unwrap();
        let crack = m.node_set("crack").unwrap();
        assert!(!crack.is_empty());
        // crack nodes sit on the mid-plane, inside the seeded length
        for &k in crack {
            assert!((m.nodes[k][1] - spec.height / 2.0).abs() < 1e-9);
            assert!(m.nodes[k][0] <= spec.crack_len + 1e-9);
        }
        // refined band resolves the reference ratio h <= 1.23
        assert!(m.local_mesh_size(crack) <= 1.23);
        assert!(!m.node_set("notch").unwrap().is_empty());
        assert!(!m.node_set("ligament_end").unwrap().is_empty());
        assert!(super::super::mesh_rule_warning(&m, "crack", spec.crack_len).is_none());
    }
}
