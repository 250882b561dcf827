// temporary rate-calibration harness for the tear benchmark (deleted before ship)
use chainfield::constitutive::MaterialParams;
use chainfield::fem::{meshgen, run_simulation, BcSpec, DofComp, SolveConfig, TimeFunction};
use chainfield::phase_field::{EcMode, FractureParams};

#[test]
#[ignore]
fn scan_rates() {
    let mesh = meshgen::notched_panel(Default::default());
    println!(
        "mesh: {} nodes, {} elements",
        mesh.n_nodes(),
        mesh.elements.len()
    );
    let material = MaterialParams::reference_polyurethane();
    let fracture = FractureParams::new(4.185, 2.0, 1e-5, EcMode::Constant).unwrap();
    let rate = std::env::var("RATE").ok().and_then(|s| s.parse().ok()).unwrap_or(0.4);
    let mut config = SolveConfig::new(0.5, 43.0).unwrap();
    config.newton_tol = 1e-6;
    config.newton_max = 30;
    config.thickness = 2.0;
    config.reaction_set = Some("top".into());
    config.crack_length = Some(9.31);
    let bcs = vec![
        BcSpec { node_set: "bottom".into(), comp: DofComp::X, value: TimeFunction::Constant(0.0) },
        BcSpec { node_set: "bottom".into(), comp: DofComp::Y, value: TimeFunction::Constant(0.0) },
        BcSpec { node_set: "top".into(), comp: DofComp::X, value: TimeFunction::Constant(0.0) },
        BcSpec { node_set: "top".into(), comp: DofComp::Y, value: TimeFunction::Linear { rate } },
        BcSpec { node_set: "crack".into(), comp: DofComp::Phi, value: TimeFunction::Constant(0.0) },
    ];
    let crack: Vec<usize> = mesh.node_set("crack").unwrap().to_vec();
    let start = std::time::Instant::now();
    let mut init_time = None;
    let results = run_simulation(&mesh, &material, &fracture, &config, &bcs, |r| {
        let broken = r
            .phi
            .iter()
            .enumerate()
            .filter(|&(k, &p)| p < 0.05 && !crack.contains(&k))
            .count();
        if broken > 0 && init_time.is_none() {
            init_time = Some(r.t);
        }
        println!(
            "t={:6.2}  u={:6.3}  F={:9.3}  iters={}  broken={}  E_el={:9.3} E_s={:8.3}",
            r.t, r.applied, r.reaction[1], r.newton_iters, broken, r.strain_energy, r.surface_energy
        );
    })
    .unwrap();
    let peak = results.iter().map(|r| r.reaction[1]).fold(0.0f64, f64::max);
    let last = results.last().unwrap().reaction[1];
    println!(
        "rate={rate}  init={init_time:?}  peak={peak:.2} N  final={last:.3} N ({:.1}% of peak)  wall={:.1?}",
        100.0 * last / peak,
        start.elapsed()
    );
}
