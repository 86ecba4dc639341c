//! Whole-pipeline checks through the public API: configuration text in,
//! trajectories, steady states, observables, and sweep tables out.

use ringqb_core::config::{default_config, parse_config_str};
use ringqb_core::dynamics::{evolve, steady_state, PopulationState};
use ringqb_core::error::Error;
use ringqb_core::sweep::{run_sweep, Figure, SweepSpec};
use ringqb_core::thermo::{ordering_epochs, sector_energy, snapshot, Sector};

#[test]
fn default_battery_charges_from_ground_to_an_active_steady_state() {
    let cfg = default_config();
    let point = cfg.assemble_base().unwrap();
    let grid = cfg.dynamics.time_grid();
    let traj = evolve(
        &point.generator,
        &PopulationState::ground(),
        &grid,
        point.gamma_plus_eff,
    )
    .unwrap();

    // the battery fills its storage manifold: the dark/auxiliary sector ends
    // up holding most of the population
    let last = traj.states.last().unwrap();
    assert!(last.p_alpha > 0.5, "storage level holds {}", last.p_alpha);
    assert!(last.p_g < 0.5);

    // the steady state is active: work is extractable and the work mode runs
    let ss = steady_state(&point.generator).unwrap();
    let snap = snapshot(&ss, &point.energies, &point.branching, &cfg.reservoirs, 0.0);
    assert!(snap.ergotropy > 0.0);
    assert!(snap.capacity >= snap.ergotropy);
    assert!(snap.flux > 0.0);
    let zeta = snap.zeta.unwrap();
    assert!(zeta > 1.0, "work supplier regime expected, zeta = {zeta}");
    assert!(snap.power.unwrap() > 0.0);

    // storage stays above charging at every time once populations exist
    for state in &traj.states[1..] {
        let e_c = sector_energy(state, &point.energies, Sector::Charging);
        let e_s = sector_energy(state, &point.energies, Sector::Storage);
        assert!(e_s >= e_c);
    }

    // the trajectory settles into a stable passive ordering
    let epochs = ordering_epochs(&traj, &point.energies).unwrap();
    assert!(epochs.len() >= 2);
    let final_epoch = epochs.last().unwrap();
    assert!(final_epoch.end - final_epoch.start > 1.0);
}

#[test]
fn config_text_to_sweep_table_round_trip() {
    let cfg = parse_config_str(
        "[ring]\nn_ring = 5\nj_d = 1.5\n\
         [sweep]\nn_ring_values = 3,5,9\nj_d_values = 1.5\n\
         [dynamics]\nt_max = 1.0\nn_points = 6\n",
    )
    .unwrap();
    let spec = SweepSpec::from_config(cfg.clone(), Figure::Fig3Ratios);
    let result = run_sweep(&spec, 2).unwrap();
    // time block: 1 coupling x 6 grid points; steady block: 3 ring sizes
    assert_eq!(result.rows.len(), 6 + 3);
    assert!(result
        .rows
        .iter()
        .all(|r| r.config_hash == cfg.provenance.hash));
    // the first time-block row is the bare initial state: 0/0 ratios are NaN
    let idx = result.column_index("ratio_storage_charging").unwrap();
    let first = result.rows[0].cells[idx].as_f64().unwrap();
    assert!(first.is_nan());
    let second = result.rows[1].cells[idx].as_f64().unwrap();
    assert!(second >= 1.0);
}

#[test]
fn signed_width_rule_surfaces_invalid_rate() {
    let cfg = parse_config_str("[ring]\ngamma0_rule = half_collective_signed\n").unwrap();
    match cfg.assemble_base() {
        Err(Error::InvalidRate { .. }) => {}
        other => panic!("expected invalid-rate, got {other:?}"),
    }
}

#[test]
fn explicit_gamma0_with_literal_widths_also_fails_downstream() {
    // an explicit nonnegative gamma0 does not rescue the negative collective
    // width of the literal diagonal convention
    let cfg = parse_config_str("[ring]\ngamma0_rule = explicit\ngamma0_value = 0.4\n").unwrap();
    assert!(matches!(
        cfg.assemble_base(),
        Err(Error::InvalidRate { .. })
    ));
}
