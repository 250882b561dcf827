//! Element loops: residual vectors, the four stiffness blocks, and energy
//! bookkeeping.
//!
//! The displacement equation is assembled in total-Lagrangian form with the
//! Kirchhoff stress contracted against spatial test-function gradients
//! (`∇ₓN = F⁻ᵀ∇_X N`), so the exact stiffness is the material block
//! `∇ₓN·κ·∇ₓN` plus the geometric term `(∇ₓN·τ·∇ₓN)·I`. The phase-field
//! equation lives in the material frame. The `K_φφ` block carries the
//! factor `2(1−ζ)W₀ N_i N_j`, the true derivative of the damage residual.
//!
//! Element contributions are computed in parallel and scattered
//! sequentially in element order, keeping assembly deterministic.

use std::sync::OnceLock;

use rayon::prelude::*;

use super::linsys::{rcm_permutation, BandMatrix};
use super::shape::{gauss_points, geometry, MappedShapes};
use super::{MeshModel, QuadPointState, SolveConfig, TangentKind};
use crate::constitutive::{
    decompose, evolve, numeric_tangent, stress_and_tangent, MaterialParams,
};
use crate::error::{Error, Result};
use crate::math::{dev, Mat3, Vec3, Voigt6};
use crate::phase_field::{degradation, FractureParams};

/// Element-loop worker pool; `CHAINFIELD_THREADS` caps its size.
pub(crate) fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = std::env::var("CHAINFIELD_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool construction")
    })
}

/// Node-interleaved dof numbering on RCM-permuted nodes:
/// `dof(node, comp) = slot[node]·(dim+1) + comp`, `comp == dim` is φ.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub dim: usize,
    pub comps: usize,
    pub node_slot: Vec<usize>,
    pub slot_node: Vec<usize>,
    pub n_dofs: usize,
    pub half_bandwidth: usize,
}

impl DofMap {
    pub fn build(mesh: &MeshModel) -> Self {
        let n = mesh.n_nodes();
        let mut adj = vec![Vec::new(); n];
        for conn in &mesh.elements {
            for (i, &a) in conn.iter().enumerate() {
                for &b in conn.iter().skip(i + 1) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let node_slot = rcm_permutation(n, &adj);
        let mut slot_node = vec![0usize; n];
        for (node, &slot) in node_slot.iter().enumerate() {
            slot_node[slot] = node;
        }
        let comps = mesh.dim() + 1;
        let mut max_spread = 0usize;
        for conn in &mesh.elements {
            let slots: Vec<usize> = conn.iter().map(|&a| node_slot[a]).collect();
            let lo = *slots.iter().min().unwrap();
            let hi = *slots.iter().max().unwrap();
            max_spread = max_spread.max(hi - lo);
        }
        DofMap {
            dim: mesh.dim(),
            comps,
            node_slot,
            slot_node,
            n_dofs: n * comps,
            half_bandwidth: max_spread * comps + comps - 1,
        }
    }

    #[inline]
    pub fn dof(&self, node: usize, comp: usize) -> usize {
        self.node_slot[node] * self.comps + comp
    }

    #[inline]
    pub fn phi_dof(&self, node: usize) -> usize {
        self.dof(node, self.dim)
    }
}

/// Mesh-fixed discretization data: mapped shapes and effective quadrature
/// weights (det J × Gauss weight × thickness).
#[derive(Debug, Clone)]
pub struct Discretization {
    pub dofmap: DofMap,
    shapes: Vec<Vec<MappedShapes>>,
    weights: Vec<Vec<f64>>,
    pub n_qp: usize,
}

impl Discretization {
    pub fn new(mesh: &MeshModel, thickness: f64) -> Result<Self> {
        mesh.validate()?;
        let gps = gauss_points(mesh.kind);
        let mut shapes = Vec::with_capacity(mesh.elements.len());
        let mut weights = Vec::with_capacity(mesh.elements.len());
        for conn in &mesh.elements {
            let mut per_el = Vec::with_capacity(gps.len());
            let mut w_el = Vec::with_capacity(gps.len());
            for gp in &gps {
                let m = geometry(mesh.kind, conn, &mesh.nodes, &gp.xi)?;
                w_el.push(m.det_j * gp.weight * thickness);
                per_el.push(m);
            }
            shapes.push(per_el);
            weights.push(w_el);
        }
        Ok(Self {
            dofmap: DofMap::build(mesh),
            shapes,
            weights,
            n_qp: gps.len(),
        })
    }
}

/// Output of one assembly pass.
pub struct Assembled {
    /// Gradient of the total potential, dof-ordered.
    pub residual: Vec<f64>,
    /// Exact Jacobian (elastic parts), band storage.
    pub matrix: BandMatrix,
    /// Trial internal states produced by the branch evolution.
    pub qp_trial: Vec<QuadPointState>,
    /// ∫ g(φ) W₀ dV.
    pub strain_energy: f64,
    /// ∫ E_c γ(φ, ∇φ) dV.
    pub surface_energy: f64,
}

struct ElementOut {
    local_r: Vec<f64>,
    local_k: Vec<f64>,
    qp: Vec<QuadPointState>,
    strain_energy: f64,
    surface_energy: f64,
}

/// Assembles residual and stiffness at nodal fields `(u, phi)`.
///
/// `dt = Some(Δt)` advances the Maxwell branches from the committed states
/// in `qp_committed` (the trial states are returned, not committed);
/// `dt = None` evaluates at frozen internal variables.
#[allow(clippy::too_many_arguments)]
pub fn assemble_system(
    mesh: &MeshModel,
    disc: &Discretization,
    u: &[f64],
    phi: &[f64],
    qp_committed: &[QuadPointState],
    dt: Option<f64>,
    material: &MaterialParams,
    fracture: &FractureParams,
    config: &SolveConfig,
) -> Result<Assembled> {
    let dim = mesh.dim();
    let comps = dim + 1;
    let n_qp = disc.n_qp;
    let per_element: Vec<Result<ElementOut>> = thread_pool().install(|| {
        mesh.elements
            .par_iter()
            .enumerate()
            .map(|(e, conn)| {
                element_kernel(
                    e,
                    conn,
                    mesh,
                    disc,
                    u,
                    phi,
                    &qp_committed[e * n_qp..(e + 1) * n_qp],
                    dt,
                    material,
                    fracture,
                    config,
                )
            })
            .collect()
    });

    let dofmap = &disc.dofmap;
    let mut residual = vec![0.0; dofmap.n_dofs];
    let mut matrix = BandMatrix::zeros(
        dofmap.n_dofs,
        dofmap.half_bandwidth,
        dofmap.half_bandwidth,
    );
    let mut qp_trial = Vec::with_capacity(mesh.elements.len() * n_qp);
    let mut strain_energy = 0.0;
    let mut surface_energy = 0.0;
    for (conn, out) in mesh.elements.iter().zip(per_element) {
        let out = out?;
        let n_en = conn.len();
        let gdof: Vec<usize> = (0..n_en * comps)
            .map(|l| dofmap.dof(conn[l / comps], l % comps))
            .collect();
        for (l, &g) in gdof.iter().enumerate() {
            residual[g] += out.local_r[l];
            for (m, &h) in gdof.iter().enumerate() {
                let v = out.local_k[l * n_en * comps + m];
                if v != 0.0 {
                    matrix.add(g, h, v);
                }
            }
        }
        qp_trial.extend(out.qp);
        strain_energy += out.strain_energy;
        surface_energy += out.surface_energy;
    }
    Ok(Assembled {
        residual,
        matrix,
        qp_trial,
        strain_energy,
        surface_energy,
    })
}

#[allow(clippy::too_many_arguments)]
fn element_kernel(
    _e: usize,
    conn: &[usize],
    mesh: &MeshModel,
    disc: &Discretization,
    u: &[f64],
    phi: &[f64],
    qp_committed: &[QuadPointState],
    dt: Option<f64>,
    material: &MaterialParams,
    fracture: &FractureParams,
    config: &SolveConfig,
) -> Result<ElementOut> {
    let dim = mesh.dim();
    let comps = dim + 1;
    let n_en = conn.len();
    let nloc = n_en * comps;
    let mut local_r = vec![0.0; nloc];
    let mut local_k = vec![0.0; nloc * nloc];
    let mut qp_out = Vec::with_capacity(disc.n_qp);
    let mut strain_energy = 0.0;
    let mut surface_energy = 0.0;
    let zeta = fracture.zeta;
    let ell = fracture.ell_f;

    let shapes = &disc.shapes[_e];
    let weights = &disc.weights[_e];
    for q in 0..disc.n_qp {
        let sh = &shapes[q];
        let w = weights[q];

        // kinematics
        let mut grad_u = Mat3::zeros();
        for (a, &node) in conn.iter().enumerate() {
            for i in 0..dim {
                let ui = u[node * dim + i];
                for b in 0..dim {
                    grad_u[(i, b)] += ui * sh.grad[a][b];
                }
            }
        }
        let f = Mat3::identity() + grad_u;
        let ds = decompose(&f).map_err(|err| match err {
            Error::SingularDeformation { det } => Error::InvalidMesh(format!(
                "element {_e}, quadrature point {q}: deformation Jacobian {det:.3e} <= 0"
            )),
            other => other,
        })?;

        // damage field
        let mut phi_q = 0.0;
        let mut grad_phi = Vec3::zeros();
        for (a, &node) in conn.iter().enumerate() {
            phi_q += sh.n[a] * phi[node];
            for b in 0..dim {
                grad_phi[b] += phi[node] * sh.grad[a][b];
            }
        }
        let (g_phi, _) = degradation(phi_q, zeta);
        let two_1mz_phi = 2.0 * (1.0 - zeta) * phi_q;

        // constitutive update
        let committed = &qp_committed[q];
        let mw = match dt {
            Some(dt) => evolve(&committed.maxwell, &ds.c_bar(), dt, material)?,
            None => committed.maxwell.clone(),
        };
        let st = stress_and_tangent(&ds, &mw, material)?;
        let kappa: Voigt6 = match config.tangent {
            TangentKind::Analytic => st.kappa,
            TangentKind::Numeric => numeric_tangent(&f, &committed.maxwell, dt, material)?,
        };
        let ec = committed.qp_ec(fracture);
        let tau = st.t;
        let w0 = st.w0;

        // spatial gradients of the displacement test functions
        let f_inv_t = f
            .try_inverse()
            .expect("det F > 0 checked above")
            .transpose();
        let gx: Vec<Vec3> = (0..n_en)
            .map(|a| f_inv_t * Vec3::new(sh.grad[a][0], sh.grad[a][1], sh.grad[a][2]))
            .collect();
        let tau_gx: Vec<Vec3> = gx.iter().map(|g| tau * g).collect();

        // residuals
        for a in 0..n_en {
            for i in 0..dim {
                local_r[a * comps + i] += w * g_phi * tau_gx[a][i];
            }
            let mut grad_dot = 0.0;
            for b in 0..dim {
                grad_dot += grad_phi[b] * sh.grad[a][b];
            }
            local_r[a * comps + dim] += w
                * (two_1mz_phi * sh.n[a] * w0
                    + ec * (-(1.0 - phi_q) / ell * sh.n[a] + ell * grad_dot));
        }

        // stiffness blocks
        for a in 0..n_en {
            for b in 0..n_en {
                let geo = gx[a].dot(&tau_gx[b]);
                for i in 0..dim {
                    for jj in 0..dim {
                        let mut kuu = kappa_block(&kappa, &gx[a], &gx[b], i, jj);
                        if i == jj {
                            kuu += geo;
                        }
                        local_k[(a * comps + i) * nloc + b * comps + jj] += w * g_phi * kuu;
                    }
                    // K_uφ and K_φu couple through g'(φ) τ
                    local_k[(a * comps + i) * nloc + b * comps + dim] +=
                        w * two_1mz_phi * tau_gx[a][i] * sh.n[b];
                    local_k[(a * comps + dim) * nloc + b * comps + i] +=
                        w * two_1mz_phi * sh.n[a] * tau_gx[b][i];
                }
                let mut grad_ab = 0.0;
                for c in 0..dim {
                    grad_ab += sh.grad[a][c] * sh.grad[b][c];
                }
                local_k[(a * comps + dim) * nloc + b * comps + dim] += w
                    * (2.0 * (1.0 - zeta) * w0 * sh.n[a] * sh.n[b]
                        + ec * (sh.n[a] * sh.n[b] / ell + ell * grad_ab));
            }
        }

        // energy bookkeeping
        strain_energy += w * g_phi * w0;
        let mut gp2 = 0.0;
        for b in 0..dim {
            gp2 += grad_phi[b] * grad_phi[b];
        }
        surface_energy += w * ec * crate::phase_field::crack_density(phi_q, gp2, ell);

        qp_out.push(QuadPointState {
            maxwell: mw,
            ec,
            lambda_c: (ds.i1_bar / 3.0).sqrt(),
        });
    }

    Ok(ElementOut {
        local_r,
        local_k,
        qp: qp_out,
        strain_energy,
        surface_energy,
    })
}

impl QuadPointState {
    /// Per-point critical energy release rate: the frozen value carried in
    /// the state (survival-scaled mode) or the constant `g_c`.
    fn qp_ec(&self, fracture: &FractureParams) -> f64 {
        match fracture.ec_mode {
            crate::phase_field::EcMode::Constant => fracture.g_c,
            crate::phase_field::EcMode::SurvivalScaled => self.ec,
        }
    }
}

/// Contraction `(∇N_a · κ · ∇N_b)_{ij} = ∇N_a[p] κ_{ipjq} ∇N_b[q]` from the
/// Voigt tangent.
#[inline]
fn kappa_block(kappa: &Voigt6, ga: &Vec3, gb: &Vec3, i: usize, j: usize) -> f64 {
    const V: [[usize; 3]; 3] = [[0, 3, 5], [3, 1, 4], [5, 4, 2]];
    let mut acc = 0.0;
    for p in 0..3 {
        if ga[p] == 0.0 {
            continue;
        }
        let row = V[i][p];
        let mut inner = 0.0;
        for q in 0..3 {
            inner += kappa[(row, V[j][q])] * gb[q];
        }
        acc += ga[p] * inner;
    }
    acc
}

/// Degraded Cauchy von-Mises stress averaged to nodes (for output files).
pub fn nodal_von_mises(
    mesh: &MeshModel,
    disc: &Discretization,
    u: &[f64],
    phi: &[f64],
    qp: &[QuadPointState],
    material: &MaterialParams,
    fracture: &FractureParams,
) -> Result<Vec<f64>> {
    let dim = mesh.dim();
    let mut acc = vec![0.0; mesh.n_nodes()];
    let mut count = vec![0usize; mesh.n_nodes()];
    for (e, conn) in mesh.elements.iter().enumerate() {
        for q in 0..disc.n_qp {
            let sh = &disc.shapes[e][q];
            let mut grad_u = Mat3::zeros();
            let mut phi_q = 0.0;
            for (a, &node) in conn.iter().enumerate() {
                phi_q += sh.n[a] * phi[node];
                for i in 0..dim {
                    for b in 0..dim {
                        grad_u[(i, b)] += u[node * dim + i] * sh.grad[a][b];
                    }
                }
            }
            let f = Mat3::identity() + grad_u;
            let ds = decompose(&f)?;
            let st = stress_and_tangent(&ds, &qp[e * disc.n_qp + q].maxwell, material)?;
            let (g_phi, _) = degradation(phi_q, fracture.zeta);
            let sigma = st.t * (g_phi / ds.j);
            let s = dev(&sigma);
            let vm = (1.5 * s.dot(&s)).sqrt();
            for &node in conn {
                acc[node] += vm;
                count[node] += 1;
            }
        }
    }
    Ok(acc
        .iter()
        .zip(&count)
        .map(|(&a, &c)| if c > 0 { a / c as f64 } else { 0.0 })
        .collect())
}
