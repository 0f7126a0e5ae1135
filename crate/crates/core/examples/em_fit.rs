//! Fit a two-component Gamma mixture with EM and print the log-likelihood
//! trace.

use mixchan::{em_fit, gamma_mle, Family, FitConfig, MixtureModel};

fn main() -> mixchan::Result<()> {
    let truth = MixtureModel::from_triples(Family::Gamma, &[(0.4, 3.0, 1.0), (0.6, 40.0, 0.2)])?;
    let xs = truth.sample(10_000, 1)?;

    let config = FitConfig::default().with_restarts(4).with_seed(7);
    let report = em_fit(&xs, Family::Gamma, 2, &config)?;
    println!(
        "stopped after {} iterations ({:?}), restart {}",
        report.iterations, report.stop_reason, report.restart_index
    );
    for (i, ll) in report.loglik_trace.iter().enumerate().take(10) {
        println!("  iter {i:>3}  lnL {ll:.3}");
    }
    for c in report.model.components() {
        println!("w = {:.3}  shape = {:.3}  scale = {:.4}", c.weight, c.params.p1(), c.params.p2());
    }

    let single = gamma_mle(&xs)?;
    println!("single-Gamma MLE: shape {:.3} scale {:.4}", single.shape(), single.scale());
    Ok(())
}
