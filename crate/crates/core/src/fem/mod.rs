//! Spatial discretization and the monolithic coupled solver.
//!
//! Displacements and the phase field share trilinear hex8 (3D) or bilinear
//! quad4 (plane strain) interpolation with full Gauss quadrature. The
//! coupled nonlinear system is solved monolithically by Newton's method on
//! the block system
//!
//! ```text
//! [ K_uu  K_uφ ] [ du ]   [ -r_u ]
//! [ K_φu  K_φφ ] [ dφ ] = [ -r_φ ]
//! ```
//!
//! with symmetric elimination of Dirichlet constraints and a nodal clamp
//! for damage irreversibility.

mod assemble;
pub mod linsys;
pub mod meshgen;
mod newton;
pub mod shape;

pub use assemble::{assemble_system, nodal_von_mises, Assembled, Discretization};
pub use newton::{
    mesh_rule_warning, reaction_force, run_simulation, solve_step, StepDiagnostics,
};

use std::collections::BTreeMap;

use crate::constitutive::MaxwellState;
use crate::error::{Error, Result};

/// Supported element kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    /// 8-node trilinear hexahedron, 2x2x2 Gauss points.
    Hex8,
    /// 4-node bilinear quadrilateral in plane strain, 2x2 Gauss points.
    Quad4,
}

impl ElementKind {
    pub fn n_nodes(self) -> usize {
        match self {
            ElementKind::Hex8 => 8,
            ElementKind::Quad4 => 4,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ElementKind::Hex8 => 3,
            ElementKind::Quad4 => 2,
        }
    }

    pub fn n_quad_points(self) -> usize {
        match self {
            ElementKind::Hex8 => 8,
            ElementKind::Quad4 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Hex8 => "hex8",
            ElementKind::Quad4 => "quad4",
        }
    }
}

/// Mesh with named node sets for boundary conditions.
#[derive(Debug, Clone)]
pub struct MeshModel {
    /// Node coordinates, mm (z = 0 for plane meshes).
    pub nodes: Vec<[f64; 3]>,
    pub kind: ElementKind,
    /// Element connectivity with the fixed corner-ordering convention of
    /// [`shape`].
    pub elements: Vec<Vec<usize>>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
}

impl MeshModel {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Checks index ranges and positivity of every quadrature Jacobian.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for (e, conn) in self.elements.iter().enumerate() {
            if conn.len() != self.kind.n_nodes() {
                return Err(Error::InvalidMesh(format!(
                    "element {e} has {} nodes, expected {}",
                    conn.len(),
                    self.kind.n_nodes()
                )));
            }
            let mut seen = conn.to_vec();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != conn.len() {
                return Err(Error::InvalidMesh(format!("element {e} repeats a node")));
            }
            for &a in conn {
                if a >= n {
                    return Err(Error::InvalidMesh(format!(
                        "element {e} references node {a} out of {n}"
                    )));
                }
            }
            for (q, gp) in shape::gauss_points(self.kind).iter().enumerate() {
                let det = shape::geometry(self.kind, conn, &self.nodes, &gp.xi)?.det_j;
                if det <= 0.0 {
                    return Err(Error::InvalidMesh(format!(
                        "element {e} has non-positive Jacobian {det:.3e} at quadrature point {q}"
                    )));
                }
            }
        }
        for (name, set) in &self.node_sets {
            for &a in set {
                if a >= n {
                    return Err(Error::InvalidMesh(format!(
                        "node set '{name}' references node {a} out of {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize]> {
        self.node_sets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::validation(format!("unknown node set '{name}'")))
    }

    /// Shortest element edge among elements touching the given node set.
    pub fn local_mesh_size(&self, set: &[usize]) -> f64 {
        let mark: std::collections::BTreeSet<usize> = set.iter().copied().collect();
        let mut h = f64::INFINITY;
        for conn in &self.elements {
            if !conn.iter().any(|a| mark.contains(a)) {
                continue;
            }
            for (i, &a) in conn.iter().enumerate() {
                for &b in conn.iter().skip(i + 1) {
                    let pa = self.nodes[a];
                    let pb = self.nodes[b];
                    let d = ((pa[0] - pb[0]).powi(2)
                        + (pa[1] - pb[1]).powi(2)
                        + (pa[2] - pb[2]).powi(2))
                    .sqrt();
                    h = h.min(d);
                }
            }
        }
        h
    }
}

/// Linear solver selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    /// Banded LU with partial pivoting after reverse Cuthill–McKee
    /// reordering (default for desk-scale meshes).
    #[default]
    DirectSparse,
    /// Jacobi-preconditioned BiCGSTAB, relative residual 1e-8.
    PreconditionedIterative,
}

/// Which spatial tangent enters the stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TangentKind {
    /// Analytic Oldroyd tangents; branch internal variables frozen.
    #[default]
    Analytic,
    /// Per-point finite differences of the full stress update (for
    /// convergence studies).
    Numeric,
}

/// Time-step and Newton controls.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Absolute Euclidean norm tolerance on the free-dof residual.
    pub newton_tol: f64,
    pub newton_max: usize,
    pub linear_solver: LinearSolver,
    pub clamp_irreversibility: bool,
    pub tangent: TangentKind,
    /// Out-of-plane thickness for plane-strain meshes, mm.
    pub thickness: f64,
    /// Successive dt halvings allowed on Newton failure before aborting.
    pub max_halvings: u32,
    /// Node set over which reactions are reported.
    pub reaction_set: Option<String>,
    /// Initial crack length for the mesh-resolution rule check, mm.
    pub crack_length: Option<f64>,
}

impl SolveConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::validation(format!("dt must be > 0, got {dt}")));
        }
        if !(t_end >= 0.0) {
            return Err(Error::validation(format!("t_end must be >= 0, got {t_end}")));
        }
        Ok(Self {
            dt,
            t_end,
            newton_tol: 1e-6,
            newton_max: 25,
            linear_solver: LinearSolver::DirectSparse,
            clamp_irreversibility: true,
            tangent: TangentKind::Analytic,
            thickness: 1.0,
            max_halvings: 5,
            reaction_set: None,
            crack_length: None,
        })
    }
}

/// Per-quadrature-point history.
#[derive(Debug, Clone)]
pub struct QuadPointState {
    pub maxwell: MaxwellState,
    /// Critical energy release rate frozen at the start of the step
    /// (survival-scaled mode evaluates it from the converged Ī₁ of the
    /// previous step).
    pub ec: f64,
    /// Chain stretch √(Ī₁/3) of the last committed state; source of the
    /// next step's frozen `ec`.
    pub lambda_c: f64,
}

/// Primary unknowns plus history.
#[derive(Debug, Clone)]
pub struct SystemState {
    /// Nodal displacements, node-major `[node*dim + comp]`, mm.
    pub u: Vec<f64>,
    /// Nodal phase field, 1 = intact.
    pub phi: Vec<f64>,
    /// Nodal irreversibility bounds (previous accepted φ).
    pub phi_bound: Vec<f64>,
    /// Element-major quadrature history `[element*n_qp + q]`.
    pub qp: Vec<QuadPointState>,
    pub t: f64,
}

impl SystemState {
    /// Virgin state: zero displacement, intact damage field, identity
    /// internal variables, `E_c` at its unstrained value.
    pub fn virgin(mesh: &MeshModel, n_branches: usize, ec0: f64) -> Self {
        let n = mesh.n_nodes();
        Self {
            u: vec![0.0; n * mesh.dim()],
            phi: vec![1.0; n],
            phi_bound: vec![1.0; n],
            qp: vec![
                QuadPointState {
                    maxwell: MaxwellState::virgin(n_branches),
                    ec: ec0,
                    lambda_c: 1.0,
                };
                mesh.elements.len() * mesh.kind.n_quad_points()
            ],
            t: 0.0,
        }
    }
}

/// Scalar time functions for Dirichlet programs.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeFunction {
    Constant(f64),
    /// value = rate · t
    Linear { rate: f64 },
    /// Piecewise-linear interpolation of `(t, value)` knots, clamped at the
    /// ends.
    Table(Vec<(f64, f64)>),
}

impl TimeFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant(v) => *v,
            TimeFunction::Linear { rate } => rate * t,
            TimeFunction::Table(knots) => {
                if knots.is_empty() {
                    return 0.0;
                }
                if t <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    if t <= w[1].0 {
                        let s = (t - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 + s * (w[1].1 - w[0].1);
                    }
                }
                knots.last().unwrap().1
            }
        }
    }
}

/// Constrained component of a Dirichlet specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofComp {
    X,
    Y,
    Z,
    Phi,
}

impl DofComp {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(DofComp::X),
            "y" => Ok(DofComp::Y),
            "z" => Ok(DofComp::Z),
            "phi" => Ok(DofComp::Phi),
            _ => Err(Error::validation(format!(
                "unknown dof component '{s}' (expected x|y|z|phi)"
            ))),
        }
    }
}

/// One Dirichlet line of the boundary program.
#[derive(Debug, Clone)]
pub struct BcSpec {
    pub node_set: String,
    pub comp: DofComp,
    pub value: TimeFunction,
}

/// Per-step output of the simulation driver.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub t: f64,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    /// Reaction force components on `SolveConfig::reaction_set`, N.
    pub reaction: [f64; 3],
    /// Value of the driving Dirichlet function at this step, mm.
    pub applied: f64,
    pub newton_iters: usize,
    /// Degraded stored energy ∫ g(φ) W₀ dV, mJ.
    pub strain_energy: f64,
    /// Fracture surface energy ∫ E_c γ dV, mJ.
    pub surface_energy: f64,
}
