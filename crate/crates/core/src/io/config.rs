//! Flat key–value run configuration with bracketed section headers.
//!
//! ```text
//! [material]
//! c10 = 9.183            # MPa
//! branch = 0.5 5.223     # tau_s  c10j_MPa   (repeatable, any order)
//! Q = 1.001
//! lambda_M = 1.194
//! D = 0.011266           # MPa^-1
//! survival = on
//!
//! [fracture]
//! g_c = 4.185            # N/mm
//! ell_f = 2.0            # mm
//! zeta = 1e-5
//! ec_mode = constant     # or survival-scaled
//!
//! [solver]
//! dt = 0.5
//! t_end = 43.0
//! newton_tol = 1e-6
//! newton_max = 25
//! linear_solver = direct-sparse    # or preconditioned-iterative
//! clamp_irreversibility = true
//! tangent = analytic               # or numeric
//! thickness = 2.0
//! max_halvings = 5
//! reaction_set = top
//! crack_length = 9.31
//!
//! [mesh]
//! path = assets/angle_specimen.mesh
//!
//! [bc]
//! dirichlet = top y linear 0.2
//! dirichlet = top x constant 0
//! dirichlet = crack phi constant 0
//! # table form: dirichlet = top y table 0:0;20:4;43:8.6
//!
//! [output]
//! dir = out
//! stride = 1
//! prefix = run
//! ```
//!
//! Units follow the rest of the crate: MPa, mm, s, N.

use std::path::{Path, PathBuf};

use crate::constitutive::{MaterialParams, MaxwellBranch};
use crate::error::{Error, Result};
use crate::fem::{BcSpec, DofComp, LinearSolver, MeshModel, SolveConfig, TangentKind, TimeFunction};
use crate::phase_field::{EcMode, FractureParams};
use crate::WesslauParams;

/// Fully parsed run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub material: MaterialParams,
    pub fracture: FractureParams,
    pub solver: SolveConfig,
    pub mesh_path: PathBuf,
    pub bcs: Vec<BcSpec>,
    pub output_dir: PathBuf,
    pub stride: usize,
    pub prefix: String,
}

impl RunConfig {
    /// Checks the mesh-dependent invariants: referenced node sets exist and
    /// table-form time functions cover `[0, t_end]`.
    pub fn validate_against(&self, mesh: &MeshModel) -> Result<()> {
        for bc in &self.bcs {
            mesh.node_set(&bc.node_set)?;
            if let TimeFunction::Table(knots) = &bc.value {
                let first = knots.first().map(|k| k.0).unwrap_or(f64::INFINITY);
                let last = knots.last().map(|k| k.0).unwrap_or(f64::NEG_INFINITY);
                if first > 0.0 || last < self.solver.t_end {
                    return Err(Error::validation(format!(
                        "time table for '{}' covers [{first}, {last}], run needs [0, {}]",
                        bc.node_set, self.solver.t_end
                    )));
                }
            }
        }
        if let Some(set) = &self.solver.reaction_set {
            mesh.node_set(set)?;
        }
        Ok(())
    }
}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

fn parse_entries(path: &Path) -> Result<Vec<Entry>> {
    let text = std::fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut section = String::new();
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Parse {
                path: display.clone(),
                line,
                message: format!("unterminated section header '{content}'"),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            path: display.clone(),
            line,
            message: format!("expected 'key = value', got '{content}'"),
        })?;
        entries.push(Entry {
            line,
            section: section.clone(),
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(entries)
}

struct Section<'a> {
    path: &'a str,
    entries: Vec<&'a Entry>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries.iter().find(|e| e.key == key).copied()
    }

    fn parse_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                path: self.path.to_string(),
                line: e.line,
                message: format!("'{key}' is not a number: '{}'", e.value),
            }),
        }
    }

    fn require_f64(&self, key: &str, section: &str) -> Result<f64> {
        self.parse_f64(key)?.ok_or_else(|| {
            Error::validation(format!("missing '{key}' in [{section}]"))
        })
    }
}

fn time_function(tokens: &[&str]) -> Result<TimeFunction> {
    match tokens {
        ["constant", v] => Ok(TimeFunction::Constant(v.parse().map_err(|_| {
            Error::validation(format!("bad constant value '{v}'"))
        })?)),
        ["linear", r] => Ok(TimeFunction::Linear {
            rate: r
                .parse()
                .map_err(|_| Error::validation(format!("bad rate '{r}'")))?,
        }),
        ["table", spec] => {
            let mut knots = Vec::new();
            for pair in spec.split(';') {
                let (t, v) = pair.split_once(':').ok_or_else(|| {
                    Error::validation(format!("bad table knot '{pair}' (want t:v)"))
                })?;
                knots.push((
                    t.parse()
                        .map_err(|_| Error::validation(format!("bad knot time '{t}'")))?,
                    v.parse()
                        .map_err(|_| Error::validation(format!("bad knot value '{v}'")))?,
                ));
            }
            if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::validation(
                    "table knots must have strictly increasing times".to_string(),
                ));
            }
            Ok(TimeFunction::Table(knots))
        }
        other => Err(Error::validation(format!(
            "unknown time function '{}' (want constant|linear|table)",
            other.join(" ")
        ))),
    }
}

/// Reads a run configuration. The mesh itself is loaded separately;
/// cross-checks happen in [`RunConfig::validate_against`].
pub fn read_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let entries = parse_entries(path)?;
    let section = |name: &str| Section {
        path: &display,
        entries: entries.iter().filter(|e| e.section == name).collect(),
    };

    // [material]
    let mat = section("material");
    let c10 = mat.require_f64("c10", "material")?;
    let q = mat.require_f64("Q", "material")?;
    let lambda_mass = mat.require_f64("lambda_M", "material")?;
    let d_vol = match mat.parse_f64("D")? {
        Some(d) => d,
        None => crate::constitutive::d_for_poisson(c10, 0.45),
    };
    let mut branches = Vec::new();
    for e in mat.entries.iter().filter(|e| e.key == "branch") {
        let toks: Vec<&str> = e.value.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                path: display.clone(),
                line: e.line,
                message: format!("branch wants '<tau> <c10j>', got '{}'", e.value),
            });
        }
        branches.push(MaxwellBranch {
            tau: toks[0].parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: e.line,
                message: format!("bad tau '{}'", toks[0]),
            })?,
            c10: toks[1].parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: e.line,
                message: format!("bad c10j '{}'", toks[1]),
            })?,
        });
    }
    let wesslau = WesslauParams::derive(q, lambda_mass)?;
    if wesslau.mass_defect().abs() > 1e-3 {
        eprintln!(
            "warning: chain distribution mass 2C deviates from 1 by {:.3e}",
            wesslau.mass_defect()
        );
    }
    let mut material = MaterialParams::new(c10, branches, d_vol, wesslau)?;
    if let Some(e) = mat.get("survival") {
        material.survival_active = match e.value.as_str() {
            "on" => true,
            "off" => false,
            other => {
                return Err(Error::Parse {
                    path: display.clone(),
                    line: e.line,
                    message: format!("survival wants on|off, got '{other}'"),
                })
            }
        };
    }
    if let (Some(qv), Some(lmv)) = (mat.parse_f64("Q_vol")?, mat.parse_f64("lambda_M_vol")?) {
        material = material.with_volumetric_wesslau(WesslauParams::derive(qv, lmv)?);
    }

    // [fracture]
    let fr = section("fracture");
    let ec_mode = match fr.get("ec_mode").map(|e| e.value.as_str()) {
        None | Some("constant") => EcMode::Constant,
        Some("survival-scaled") => EcMode::SurvivalScaled,
        Some(other) => {
            return Err(Error::validation(format!(
                "ec_mode wants constant|survival-scaled, got '{other}'"
            )))
        }
    };
    let fracture = FractureParams::new(
        fr.require_f64("g_c", "fracture")?,
        fr.require_f64("ell_f", "fracture")?,
        fr.parse_f64("zeta")?.unwrap_or(1e-5),
        ec_mode,
    )?;

    // [solver]
    let so = section("solver");
    let mut solver = SolveConfig::new(
        so.require_f64("dt", "solver")?,
        so.require_f64("t_end", "solver")?,
    )?;
    if let Some(v) = so.parse_f64("newton_tol")? {
        solver.newton_tol = v;
    }
    if let Some(v) = so.parse_f64("newton_max")? {
        solver.newton_max = v as usize;
    }
    if let Some(v) = so.parse_f64("thickness")? {
        solver.thickness = v;
    }
    if let Some(v) = so.parse_f64("max_halvings")? {
        solver.max_halvings = v as u32;
    }
    if let Some(v) = so.parse_f64("crack_length")? {
        solver.crack_length = Some(v);
    }
    if let Some(e) = so.get("linear_solver") {
        solver.linear_solver = match e.value.as_str() {
            "direct-sparse" => LinearSolver::DirectSparse,
            "preconditioned-iterative" => LinearSolver::PreconditionedIterative,
            other => {
                return Err(Error::validation(format!(
                    "linear_solver wants direct-sparse|preconditioned-iterative, got '{other}'"
                )))
            }
        };
    }
    if let Some(e) = so.get("tangent") {
        solver.tangent = match e.value.as_str() {
            "analytic" => TangentKind::Analytic,
            "numeric" => TangentKind::Numeric,
            other => {
                return Err(Error::validation(format!(
                    "tangent wants analytic|numeric, got '{other}'"
                )))
            }
        };
    }
    if let Some(e) = so.get("clamp_irreversibility") {
        solver.clamp_irreversibility = match e.value.as_str() {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::validation(format!(
                    "clamp_irreversibility wants true|false, got '{other}'"
                )))
            }
        };
    }
    if let Some(e) = so.get("reaction_set") {
        solver.reaction_set = Some(e.value.clone());
    }

    // [mesh]
    let mesh_path = section("mesh")
        .get("path")
        .map(|e| {
            let p = PathBuf::from(&e.value);
            if p.is_relative() {
                path.parent().unwrap_or(Path::new(".")).join(p)
            } else {
                p
            }
        })
        .ok_or_else(|| Error::validation("missing 'path' in [mesh]".to_string()))?;

    // [bc]
    let mut bcs = Vec::new();
    for e in section("bc").entries.iter().filter(|e| e.key == "dirichlet") {
        let toks: Vec<&str> = e.value.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(Error::Parse {
                path: display.clone(),
                line: e.line,
                message: format!(
                    "dirichlet wants '<set> <comp> <timefunc…>', got '{}'",
                    e.value
                ),
            });
        }
        bcs.push(BcSpec {
            node_set: toks[0].to_string(),
            comp: DofComp::parse(toks[1])?,
            value: time_function(&toks[2..])?,
        });
    }

    // [output]
    let out = section("output");
    let output_dir = out
        .get("dir")
        .map(|e| PathBuf::from(&e.value))
        .unwrap_or_else(|| PathBuf::from("out"));
    let stride = out.parse_f64("stride")?.unwrap_or(1.0).max(1.0) as usize;
    let prefix = out
        .get("prefix")
        .map(|e| e.value.clone())
        .unwrap_or_else(|| "run".to_string());

    Ok(RunConfig {
        material,
        fracture,
        solver,
        mesh_path,
        bcs,
        output_dir,
        stride,
        prefix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
# tear benchmark
[material]
c10 = 9.183
branch = 0.5 5.223
branch = 10 4.152
Q = 1.001
lambda_M = 1.194
survival = on

[fracture]
g_c = 4.185
ell_f = 2.0
zeta = 1e-5
ec_mode = constant

[solver]
dt = 0.5
t_end = 43.0
thickness = 2.0
reaction_set = top
crack_length = 9.31

[mesh]
path = specimen.mesh

[bc]
dirichlet = top y linear 0.2
dirichlet = top x constant 0
dirichlet = bottom y constant 0
dirichlet = bottom x constant 0
dirichlet = crack phi constant 0

[output]
dir = results
stride = 2
prefix = tear
"#;

    #[test]
    fn parses_complete_configuration() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, SAMPLE).unwrap();
        let cfg = read_config(&path).unwrap();
        assert_eq!(cfg.material.branches.len(), 2);
        assert_eq!(cfg.material.branches[0].tau, 0.5);
        assert!((cfg.material.d_vol - crate::constitutive::d_for_poisson(9.183, 0.45)).abs() < 1e-15);
        assert_eq!(cfg.fracture.g_c, 4.185);
        assert_eq!(cfg.solver.thickness, 2.0);
        assert_eq!(cfg.solver.crack_length, Some(9.31));
        assert_eq!(cfg.bcs.len(), 5);
        assert_eq!(cfg.stride, 2);
        assert_eq!(cfg.prefix, "tear");
        assert!(cfg.mesh_path.ends_with("specimen.mesh"));
    }

    #[test]
    fn validates_against_mesh_sets() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, SAMPLE).unwrap();
        let cfg = read_config(&path).unwrap();
        let mesh = crate::fem::meshgen::strip(2, 2, 1.0, 1.0);
        // strip has no 'crack' set
        assert!(cfg.validate_against(&mesh).is_err());
    }

    #[test]
    fn table_coverage_is_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        let text = SAMPLE.replace(
            "dirichlet = top y linear 0.2",
            "dirichlet = top y table 0:0;10:2",
        );
        std::fs::write(&path, text).unwrap();
        let cfg = read_config(&path).unwrap();
        let mesh = crate::fem::meshgen::notched_panel(Default::default());
        let err = cfg.validate_against(&mesh).unwrap_err();
        assert!(err.to_string().contains("covers"), "{err}");
    }

    #[test]
    fn bad_lines_report_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cfg");
        std::fs::write(&path, "[material]\nc10 9.183\n").unwrap();
        let err = read_config(&path).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }
}
