//! Fitting rounds-to-target against problem size.

use constrained_qaoa::harness::{fit_scaling, Ansatz};

fn main() -> constrained_qaoa::Result<()> {
    let ns: Vec<f64> = (4..=16).step_by(2).map(f64::from).collect();
    let means: Vec<f64> = ns.iter().map(|&n| 0.8 * n.powf(0.6) + 1.5 + 0.05 * (n * 7.0).sin()).collect();
    let sds = vec![0.7; ns.len()];
    for ansatz in [Ansatz::Log, Ansatz::Power, Ansatz::Monomial] {
        let fit = fit_scaling(&ns, &means, &sds, ansatz)?;
        println!(
            "{ansatz:>8}: params {:?} residual {:.3e} 95% CI on b {:?}",
            fit.params, fit.residual, fit.b_confidence_95
        );
    }
    Ok(())
}
