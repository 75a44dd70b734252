mod common;

use common::{random_walk, reference_max, Quantity};
use ergocap::capacitance::{
    chi, concave_envelope, finite_n_check, max_output_ergotropy, max_output_total_ergotropy,
    output_curve, uniform_grid, CapacitanceSweep, Objective, OptimizerConfig,
};
use ergocap::channels::{make_depolarizing, make_mad, make_qubit_ad, make_remad, MadParams};
use ergocap::qops::{Hamiltonian, KrausChannel};
use ergocap::{Error, Execution};

fn qutrit() -> Hamiltonian {
    Hamiltonian::from_levels(&[0.0, 1.0, 2.0]).unwrap()
}

fn mad() -> KrausChannel {
    make_mad(MadParams::new(0.3, 0.2, 0.6).unwrap()).unwrap()
}

fn remad() -> KrausChannel {
    make_remad(MadParams::new(0.3, 0.2, 0.6).unwrap()).unwrap()
}

fn fast() -> OptimizerConfig {
    OptimizerConfig {
        n_starts: 8,
        ..OptimizerConfig::default()
    }
}

// Reference maxima from the grid + 200-start random-walk search in tests/common.
const MAD_E1_SAT: f64 = 0.412_870_929_2;
const MAD_E1_TOT_SAT: f64 = 0.453_568_231_0;
const REMAD_E1_SAT: f64 = 0.444_710_343_0;
const REMAD_E1_TOT_SAT: f64 = 0.461_392_351_3;

#[test]
fn mad_matches_live_reference_at_unit_energy() {
    let h = qutrit();
    let ch = mad();
    let reference = random_walk(&ch, &h, 1.0, 200, 11, Quantity::Ergotropy);
    let found = max_output_ergotropy(&ch, &h, 1.0, &OptimizerConfig::default()).unwrap();
    assert!((found - reference).abs() < 1e-4, "{found} vs {reference}");
}

#[test]
fn frozen_saturation_values() {
    let h = qutrit();
    let cfg = OptimizerConfig::default();
    for (ch, e1, tot) in [
        (mad(), MAD_E1_SAT, MAD_E1_TOT_SAT),
        (remad(), REMAD_E1_SAT, REMAD_E1_TOT_SAT),
    ] {
        let a = max_output_ergotropy(&ch, &h, 2.0, &cfg).unwrap();
        let b = max_output_total_ergotropy(&ch, &h, 2.0, &cfg).unwrap();
        assert!((a - e1).abs() < 1e-4, "{a} vs {e1}");
        assert!((b - tot).abs() < 1e-4, "{b} vs {tot}");
    }
}

#[test]
fn interior_point_not_below_reference() {
    let h = qutrit();
    let ch = remad();
    let reference = reference_max(&ch, &h, 0.5, 40, Quantity::Ergotropy);
    let found = max_output_ergotropy(&ch, &h, 0.5, &OptimizerConfig::default()).unwrap();
    assert!(found >= reference - 1e-4, "{found} < {reference}");
}

#[test]
fn identity_channel_returns_all_energy() {
    let h = qutrit();
    let c = chi(&KrausChannel::identity(3), &h, 8, &fast()).unwrap();
    for (e, v) in c.e_grid.iter().zip(&c.values) {
        assert!((v - e).abs() < 1e-5, "chi({e}) = {v}");
    }
}

#[test]
fn fully_depolarizing_gives_nothing() {
    let h = qutrit();
    let ch = make_depolarizing(3, 1.0).unwrap();
    let c = chi(&ch, &h, 4, &fast()).unwrap();
    assert!(c.values.iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn qubit_total_equals_ergotropy() {
    let h = Hamiltonian::from_levels(&[0.0, 1.0]).unwrap();
    let ch = make_qubit_ad(0.4).unwrap();
    let cfg = fast();
    for e in [0.3, 0.7, 1.0] {
        let a = max_output_ergotropy(&ch, &h, e, &cfg).unwrap();
        let b = max_output_total_ergotropy(&ch, &h, e, &cfg).unwrap();
        assert!((a - b).abs() < 1e-6, "e = {e}: {a} vs {b}");
    }
}

#[test]
fn sweep_ordering_chain_and_gap_shape() {
    let h = qutrit();
    let sweep = CapacitanceSweep::run(&mad(), &h, 8, &fast(), Execution::default(), "mad").unwrap();
    assert_eq!(sweep.chi.len(), 9);
    for i in 0..9 {
        let raw = sweep.e1.curve.values[i];
        assert!(sweep.e1_tot.curve.values[i] >= raw - 1e-9);
        assert!(sweep.chi.values[i] >= raw - 1e-9);
        assert!(sweep.chi_tot.values[i] >= sweep.chi.values[i] - 1e-9);
        assert!(sweep.gap.values[i] >= -1e-9);
    }
    assert!(sweep.gap.values[0].abs() < 1e-5);
    assert!(sweep.gap.values.iter().cloned().fold(0.0, f64::max) > 1e-3);
    assert!(sweep
        .e1
        .points
        .iter()
        .all(|p| p.feasibility_residual <= 1e-9));
    assert_eq!(sweep.chi.meta.quantity, "chi");
}

#[test]
fn envelope_of_mad_curve_is_close_to_raw() {
    let h = qutrit();
    let raw = output_curve(
        &mad(),
        &h,
        8,
        Objective::Ergotropy,
        &fast(),
        Execution::default(),
    )
    .unwrap();
    let env = concave_envelope(&raw.curve).unwrap();
    for (a, b) in env.values.iter().zip(&raw.curve.values) {
        assert!(a - b < 1e-3);
    }
    assert_eq!(raw.inputs.len(), 9);
}

#[test]
fn runs_are_deterministic_and_mode_independent() {
    let h = qutrit();
    let cfg = fast();
    let a = output_curve(
        &remad(),
        &h,
        4,
        Objective::TotalErgotropy,
        &cfg,
        Execution::Sequential,
    )
    .unwrap();
    let b = output_curve(
        &remad(),
        &h,
        4,
        Objective::TotalErgotropy,
        &cfg,
        Execution::Parallel,
    )
    .unwrap();
    let c = output_curve(
        &remad(),
        &h,
        4,
        Objective::TotalErgotropy,
        &cfg,
        Execution::Parallel,
    )
    .unwrap();
    assert_eq!(a.curve.values, b.curve.values);
    assert_eq!(b.curve.values, c.curve.values);
}

#[test]
fn finite_n_two_cells_match_envelope() {
    let h = qutrit();
    let r = finite_n_check(&mad(), &h, 2, 1.0, 8, &fast()).unwrap();
    assert_eq!(r.n, 2);
    assert!(r.ok);
    assert!(r.lhs_per_cell <= r.chi_at_e + 1e-3);
    assert!(r.lhs_per_cell >= r.chi_at_e - 5e-3);
    let total: f64 = r.cell_energies.iter().sum();
    assert!(total <= 2.0 + 1e-9);
}

#[test]
fn finite_n_rejects_large_n() {
    let h = qutrit();
    assert!(matches!(
        finite_n_check(&mad(), &h, 4, 1.0, 8, &fast()),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn bad_inputs_are_rejected() {
    let h = qutrit();
    assert!(matches!(
        max_output_ergotropy(&mad(), &h, 3.0, &fast()),
        Err(Error::EnergyOutOfRange { .. })
    ));
    let qubit_h = Hamiltonian::from_levels(&[0.0, 1.0]).unwrap();
    assert!(matches!(
        max_output_ergotropy(&mad(), &qubit_h, 0.5, &fast()),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(chi(&mad(), &h, 1, &fast()).is_err());
    let bad = OptimizerConfig {
        n_starts: 0,
        ..fast()
    };
    assert!(max_output_ergotropy(&mad(), &h, 0.5, &bad).is_err());
}

#[test]
fn grid_spans_full_range() {
    let g = uniform_grid(2.0, 8);
    assert_eq!(g.len(), 9);
    assert_eq!(g[0], 0.0);
    assert_eq!(g[8], 2.0);
}
