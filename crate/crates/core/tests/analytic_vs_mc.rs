//! Cross-validation of the closed forms against the Monte-Carlo oracle at
//! reduced trial counts. The full-scale runs with pinned tolerances live
//! in the acceptance suite; these catch structural disagreements fast.

use vanet_core::channel::{LosModel, NodeKind};
use vanet_core::config::{Access, Scheme, SystemConfig, User};
use vanet_core::laplace::{laplace_composite, receiver_sources, InterferenceSourceSpec};
use vanet_core::montecarlo::{laplace_mc_oracle, Simulator};
use vanet_core::numerics::RngStream;
use vanet_core::outage::OutageModel;

/// Forced-NLOS Rayleigh configuration: the Alzer expansion is exact at
/// m = 1, so analytic and simulated OP may differ only by MC noise.
fn rayleigh_cfg() -> SystemConfig {
    let mut cfg = SystemConfig::default();
    cfg.set_path("los.mode", "force_nlos").unwrap();
    cfg.fading.m_nlos = 1;
    cfg.fading.alpha_nlos = 4.0;
    cfg
}

#[test]
fn op_matches_mc_exactly_at_m1() {
    let trials = 20_000;
    for (scheme, access) in [
        (Scheme::Dt, Access::Noma),
        (Scheme::Rt, Access::Noma),
        (Scheme::Ht, Access::Noma),
        (Scheme::Dt, Access::Oma),
        (Scheme::Rt, Access::Oma),
        (Scheme::Ht, Access::Oma),
    ] {
        let mut cfg = rayleigh_cfg();
        cfg.scenario.scheme = scheme;
        cfg.scenario.access = access;
        let model = OutageModel::new(&cfg).unwrap();
        let sim = Simulator::new(&cfg).unwrap();
        let mc = sim.run(trials, 2024);
        for (user, est) in [(User::D1, mc.op_d1), (User::D2, mc.op_d2)] {
            let ana = model.op_for(scheme, access, user, &cfg.noma).unwrap();
            let dev = (ana - est.mean).abs();
            assert!(
                dev <= 3.0 * est.half_width_95,
                "{scheme:?}/{access:?}/{user:?}: analytic {ana:.4} vs mc {:.4} +- {:.4}",
                est.mean,
                est.half_width_95
            );
        }
    }
}

#[test]
fn op_matches_mc_with_lsm_and_beamforming() {
    // Full Table-style model: LOS mixture, steering error, gain marks.
    // m_los = 2 invokes the Alzer approximation; at these parameters the
    // bound is tight, so a modest absolute guard rides on top of the MC
    // interval.
    let trials = 20_000;
    let mut cfg = SystemConfig::default();
    cfg.scenario.scheme = Scheme::Rt;
    let model = OutageModel::new(&cfg).unwrap();
    let sim = Simulator::new(&cfg).unwrap();
    let mc = sim.run(trials, 4096);
    for (user, est) in [(User::D1, mc.op_d1), (User::D2, mc.op_d2)] {
        let ana = model
            .op_for(Scheme::Rt, Access::Noma, user, &cfg.noma)
            .unwrap();
        let dev = (ana - est.mean).abs();
        assert!(
            dev <= 3.0 * est.half_width_95 + 0.02,
            "{user:?}: analytic {ana:.4} vs mc {:.4} +- {:.4}",
            est.mean,
            est.half_width_95
        );
    }
}

#[test]
fn laplace_transforms_match_mc_for_all_sources() {
    let cfg = SystemConfig::default();
    let realizations = 30_000;
    let s_grid = [1e2, 1e3, 1e4];

    // Baseline Rayleigh, LSM mixture, and beamforming-marked variants for
    // each of the three source kinds.
    let z = 0.0;
    let g = &cfg.geometry;
    let rayleigh = vanet_core::channel::FadingParams {
        m_los: 1,
        m_nlos: 1,
        alpha_los: 2.0,
        alpha_nlos: 2.0,
    };
    let terrestrial = LosModel::Terrestrial { beta: cfg.los.beta };
    let aerial = LosModel::Aerial {
        a: cfg.los.a,
        b: cfg.los.b,
    };

    let baseline = vec![
        InterferenceSourceSpec::fixed_line(
            g.lambda_v,
            z,
            g.window_radius,
            rayleigh,
            LosModel::AlwaysNlos,
        ),
        InterferenceSourceSpec::cox_lines(
            g.lambda_l,
            g.lambda_v,
            z,
            g.window_radius,
            rayleigh,
            LosModel::AlwaysNlos,
        ),
        InterferenceSourceSpec::uav_bpp(
            g.n_uav,
            g.disk_radius,
            g.h_uav,
            rayleigh,
            LosModel::AlwaysNlos,
        ),
    ];
    let lsm = vec![
        InterferenceSourceSpec::fixed_line(g.lambda_v, z, g.window_radius, cfg.fading, terrestrial),
        InterferenceSourceSpec::cox_lines(
            g.lambda_l,
            g.lambda_v,
            z,
            g.window_radius,
            cfg.fading,
            terrestrial,
        ),
        InterferenceSourceSpec::uav_bpp(g.n_uav, g.disk_radius, g.h_uav, cfg.fading, aerial),
    ];
    let marked: Vec<_> = lsm
        .iter()
        .map(|spec| spec.clone().with_beamforming(cfg.beamforming()))
        .collect();

    let mut stream = 1u64;
    for (label, specs) in [("baseline", &baseline), ("lsm", &lsm), ("marked", &marked)] {
        for spec in specs {
            let mc = laplace_mc_oracle(
                std::slice::from_ref(spec),
                &s_grid,
                realizations,
                RngStream::new(777, stream),
            );
            stream += realizations;
            for point in mc {
                let ana = spec.laplace(point.s, &cfg.quadrature).unwrap();
                let dev = (ana - point.mean).abs();
                let tol = (3.0 * point.std_error).max(0.01 * point.mean);
                assert!(
                    dev <= tol,
                    "{label} {:?} s={}: analytic {ana:.5} vs mc {:.5} (se {:.5})",
                    spec.kind,
                    point.s,
                    point.mean,
                    point.std_error
                );
            }
        }
    }
}

#[test]
fn independent_sources_factorize() {
    // E[e^{-s(I_V + I_U)}] equals the product of the individual
    // transforms, asserted on the MC oracle.
    let cfg = SystemConfig::default();
    let specs = receiver_sources(&cfg, NodeKind::Vehicle, 0.0);
    let s_grid = [5e2, 5e3];
    let joint = laplace_mc_oracle(&specs, &s_grid, 30_000, RngStream::new(99, 0));
    for point in joint {
        let product = laplace_composite(
            &specs
                .iter()
                .map(|sp| InterferenceSourceSpec {
                    beamforming: None,
                    ..sp.clone()
                })
                .collect::<Vec<_>>(),
            &cfg.beamforming(),
            point.s,
            &cfg.quadrature,
        )
        .unwrap();
        let dev = (product - point.mean).abs();
        assert!(
            dev <= 3.0 * point.std_error + 0.002,
            "s={}: product {product:.5} vs joint mc {:.5} (se {:.5})",
            point.s,
            point.mean,
            point.std_error
        );
    }
}
