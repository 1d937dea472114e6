//! Subspace simulation against the full 2^n reference, plus the validation table.

use constrained_qaoa::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use constrained_qaoa::oracle::{embed, full_space_run, max_deviation_up_to_phase};
use constrained_qaoa::qaoa::{run_qaoa, AngleSchedule, Variant};
use constrained_qaoa::validate::run_validation;

fn main() -> constrained_qaoa::Result<()> {
    let inst = ProblemInstance::new(generate_erdos_renyi(6, 0.5, 9)?, ProblemKind::Bisection, 3)?;
    let schedule = AngleSchedule::new(vec![0.3, 1.1, 2.0], vec![0.7, 0.2, 1.6])?;
    for variant in Variant::ALL {
        let th = variant.uses_threshold().then_some(1);
        let sub = run_qaoa(&inst, variant, &schedule, th)?.final_state.expect("state kept");
        let full = full_space_run(&inst, variant, &schedule, th)?;
        let lifted = embed(6, 3, sub.amplitudes())?;
        println!("{variant:>10}: max amplitude deviation {:.2e}", max_deviation_up_to_phase(&lifted.amplitudes, &full.amplitudes));
    }
    println!("{}", run_validation(&[4, 6], 5, 1)?);
    Ok(())
}
