//! Prints the MAD and ReMAD capacitance curves for γ = (0.3, 0.2, 0.6) on the
//! qutrit Hamiltonian diag(0, 1, 2).
//!
//! cargo run --release -p ergocap --example qutrit_sweep [grid_size]

use std::time::Instant;

use ergocap::capacitance::{CapacitanceSweep, OptimizerConfig};
use ergocap::channels::{make_mad, make_remad, MadParams};
use ergocap::qops::Hamiltonian;
use ergocap::Execution;

fn main() -> ergocap::Result<()> {
    let grid_size: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(16);
    let h = Hamiltonian::from_levels(&[0.0, 1.0, 2.0])?;
    let params = MadParams::new(0.3, 0.2, 0.6)?;
    let cfg = OptimizerConfig::default();
    for (name, ch) in [("mad", make_mad(params)?), ("remad", make_remad(params)?)] {
        let clock = Instant::now();
        let sweep = CapacitanceSweep::run(&ch, &h, grid_size, &cfg, Execution::Parallel, name)?;
        println!("# {name} ({:.1} s)", clock.elapsed().as_secs_f64());
        println!("e,e1,e1_tot,chi,chi_tot,gap,diag_in");
        for i in 0..sweep.gap.len() {
            println!(
                "{:.4},{:.8},{:.8},{:.8},{:.8},{:.8},{}",
                sweep.gap.e_grid[i],
                sweep.e1.curve.values[i],
                sweep.e1_tot.curve.values[i],
                sweep.chi.values[i],
                sweep.chi_tot.values[i],
                sweep.gap.values[i],
                sweep.e1.points[i].diagonal_input,
            );
        }
    }
    Ok(())
}
