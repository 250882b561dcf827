//! Isoparametric shape functions and Gauss quadrature.
//!
//! Corner ordering follows the legacy VTK convention:
//! quad4 `(−1,−1) (1,−1) (1,1) (−1,1)`, hex8 the same quadrilateral at
//! ζ = −1 then ζ = +1.

use crate::error::{Error, Result};

/// One quadrature point in reference coordinates.
#[derive(Debug, Clone, Copy)]
pub struct GaussPoint {
    pub xi: [f64; 3],
    pub weight: f64,
}

/// Full Gauss rule: 2x2x2 for hex8, 2x2 for quad4.
pub fn gauss_points(kind: super::ElementKind) -> Vec<GaussPoint> {
    let g = 1.0 / 3.0f64.sqrt();
    match kind {
        super::ElementKind::Quad4 => {
            let mut pts = Vec::with_capacity(4);
            for &eta in &[-g, g] {
                for &xi in &[-g, g] {
                    pts.push(GaussPoint {
                        xi: [xi, eta, 0.0],
                        weight: 1.0,
                    });
                }
            }
            pts
        }
        super::ElementKind::Hex8 => {
            let mut pts = Vec::with_capacity(8);
            for &zeta in &[-g, g] {
                for &eta in &[-g, g] {
                    for &xi in &[-g, g] {
                        pts.push(GaussPoint {
                            xi: [xi, eta, zeta],
                            weight: 1.0,
                        });
                    }
                }
            }
            pts
        }
    }
}

const QUAD_CORNERS: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Shape values and reference-coordinate gradients at `xi`.
pub fn shape_functions(kind: super::ElementKind, xi: &[f64; 3]) -> (Vec<f64>, Vec<[f64; 3]>) {
    match kind {
        super::ElementKind::Quad4 => {
            let mut n = Vec::with_capacity(4);
            let mut dn = Vec::with_capacity(4);
            for c in QUAD_CORNERS {
                let (sx, sy) = (c[0], c[1]);
                n.push(0.25 * (1.0 + sx * xi[0]) * (1.0 + sy * xi[1]));
                dn.push([
                    0.25 * sx * (1.0 + sy * xi[1]),
                    0.25 * sy * (1.0 + sx * xi[0]),
                    0.0,
                ]);
            }
            (n, dn)
        }
        super::ElementKind::Hex8 => {
            let mut n = Vec::with_capacity(8);
            let mut dn = Vec::with_capacity(8);
            for &sz in &[-1.0f64, 1.0] {
                for c in QUAD_CORNERS {
                    let (sx, sy) = (c[0], c[1]);
                    n.push(
                        0.125 * (1.0 + sx * xi[0]) * (1.0 + sy * xi[1]) * (1.0 + sz * xi[2]),
                    );
                    dn.push([
                        0.125 * sx * (1.0 + sy * xi[1]) * (1.0 + sz * xi[2]),
                        0.125 * sy * (1.0 + sx * xi[0]) * (1.0 + sz * xi[2]),
                        0.125 * sz * (1.0 + sx * xi[0]) * (1.0 + sy * xi[1]),
                    ]);
                }
            }
            (n, dn)
        }
    }
}

/// Shape data mapped through the element geometry: values, material-frame
/// gradients and the Jacobian determinant.
#[derive(Debug, Clone)]
pub struct MappedShapes {
    pub n: Vec<f64>,
    /// Gradients w.r.t. material coordinates X (z-slot zero for quad4).
    pub grad: Vec<[f64; 3]>,
    pub det_j: f64,
}

/// Maps reference gradients through the element geometry at `xi`.
pub fn geometry(
    kind: super::ElementKind,
    conn: &[usize],
    nodes: &[[f64; 3]],
    xi: &[f64; 3],
) -> Result<MappedShapes> {
    let (n, dn) = shape_functions(kind, xi);
    let dim = kind.dim();
    // J[a][b] = Σ_k X_k[a] dN_k/dξ[b]
    let mut jac = [[0.0f64; 3]; 3];
    for (k, &node) in conn.iter().enumerate() {
        let x = nodes[node];
        for a in 0..dim {
            for b in 0..dim {
                jac[a][b] += x[a] * dn[k][b];
            }
        }
    }
    let (det, inv) = invert(dim, &jac)?;
    let mut grad = Vec::with_capacity(conn.len());
    for d in &dn {
        let mut g = [0.0f64; 3];
        for a in 0..dim {
            for b in 0..dim {
                // ∇_X N = J^{-T} ∇_ξ N
                g[a] += inv[b][a] * d[b];
            }
        }
        grad.push(g);
    }
    Ok(MappedShapes { n, grad, det_j: det })
}

fn invert(dim: usize, j: &[[f64; 3]; 3]) -> Result<(f64, [[f64; 3]; 3])> {
    let mut inv = [[0.0f64; 3]; 3];
    let det = match dim {
        2 => {
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() > 0.0 {
                inv[0][0] = j[1][1] / det;
                inv[0][1] = -j[0][1] / det;
                inv[1][0] = -j[1][0] / det;
                inv[1][1] = j[0][0] / det;
            }
            det
        }
        _ => {
            let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
                - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
                + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
            if det.abs() > 0.0 {
                let d = det;
                inv[0][0] = (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / d;
                inv[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / d;
                inv[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / d;
                inv[1][0] = (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / d;
                inv[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / d;
                inv[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / d;
                inv[2][0] = (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / d;
                inv[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / d;
                inv[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / d;
            }
            det
        }
    };
    if det == 0.0 || !det.is_finite() {
        return Err(Error::InvalidMesh(format!(
            "singular element geometry (det J = {det})"
        )));
    }
    Ok((det, inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::ElementKind;

    #[test]
    fn hex8_partition_of_unity() {
        let (n, _) = shape_functions(ElementKind::Hex8, &[0.0, 0.0, 0.0]);
        assert!(n.iter().all(|&v| (v - 0.125).abs() < 1e-15));
        // interpolation property at corners
        let corners: Vec<[f64; 3]> = (0..8)
            .map(|k| {
                let base = QUAD_CORNERS[k % 4];
                [base[0], base[1], if k < 4 { -1.0 } else { 1.0 }]
            })
            .collect();
        for (k, c) in corners.iter().enumerate() {
            let (n, _) = shape_functions(ElementKind::Hex8, c);
            for (i, &v) in n.iter().enumerate() {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14, "N_{i} at corner {k}");
            }
        }
    }

    #[test]
    fn gradient_partition_of_unity() {
        for kind in [ElementKind::Hex8, ElementKind::Quad4] {
            for xi in [[0.3, -0.7, 0.2], [-0.9, 0.1, 0.8], [0.0, 0.5, -0.5]] {
                let (n, dn) = shape_functions(kind, &xi);
                assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                for b in 0..3 {
                    let s: f64 = dn.iter().map(|g| g[b]).sum();
                    assert!(s.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn mapped_gradients_reproduce_linear_fields() {
        // distorted quad: gradients of a linear field must be exact
        let nodes = vec![
            [0.0, 0.0, 0.0],
            [2.1, 0.2, 0.0],
            [2.4, 1.9, 0.0],
            [-0.3, 1.6, 0.0],
        ];
        let conn = [0usize, 1, 2, 3];
        let coeff = [0.7, -1.3];
        let vals: Vec<f64> = nodes.iter().map(|p| coeff[0] * p[0] + coeff[1] * p[1]).collect();
        for gp in gauss_points(ElementKind::Quad4) {
            let m = geometry(ElementKind::Quad4, &conn, &nodes, &gp.xi).unwrap();
            assert!(m.det_j > 0.0);
            let mut g = [0.0f64; 2];
            for (k, grad) in m.grad.iter().enumerate() {
                g[0] += vals[k] * grad[0];
                g[1] += vals[k] * grad[1];
            }
            assert!((g[0] - coeff[0]).abs() < 1e-13);
            assert!((g[1] - coeff[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn hex_volume_by_quadrature() {
        // unit cube scaled to 2x3x4 has volume 24
        let mut nodes = Vec::new();
        for &z in &[0.0, 4.0] {
            for c in [[0.0, 0.0], [2.0, 0.0], [2.0, 3.0], [0.0, 3.0]] {
                nodes.push([c[0], c[1], z]);
            }
        }
        let conn = [0usize, 1, 2, 3, 4, 5, 6, 7];
        let mut vol = 0.0;
        for gp in gauss_points(ElementKind::Hex8) {
            let m = geometry(ElementKind::Hex8, &conn, &nodes, &gp.xi).unwrap();
            vol += m.det_j * gp.weight;
        }
        assert!((vol - 24.0).abs() < 1e-12);
    }
}
