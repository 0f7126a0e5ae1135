//! Score a fitted mixture against the data with WMRD, KL divergence and the
//! Kolmogorov–Smirnov test.

use mixchan::gof::{build_histogram, evaluate_on, ks_test, DEFAULT_SIGNIFICANCE};
use mixchan::{em_fit, Binning, Family, FitConfig, MixtureModel};

fn main() -> mixchan::Result<()> {
    let truth = MixtureModel::from_triples(Family::Gamma, &[(0.540, 72.285, 0.0824), (0.460, 67.904, 0.115)])?;
    let xs = truth.sample(4_000, 9)?;
    let hist = build_histogram(&xs, &Binning::FreedmanDiaconis)?;
    println!("{} Freedman–Diaconis bins", hist.n_bins());

    for family in Family::ALL {
        let fit = em_fit(&xs, family, 2, &FitConfig::default())?;
        let m = evaluate_on(&fit.model, &xs, &hist)?;
        println!(
            "{:<8} WMRD {:.4}  KL {:.5}  KS {:.4} (crit {:.4}, {})",
            family.as_str(),
            m.wmrd,
            m.kl_nats,
            m.ks_stat,
            m.ks_critical,
            if m.ks_passed { "pass" } else { "reject" }
        );
    }

    let wrong = MixtureModel::from_triples(Family::Gamma, &[(1.0, 20.0, 0.4)])?;
    let ks = ks_test(&xs, &wrong, DEFAULT_SIGNIFICANCE)?;
    println!("misspecified model: D = {:.4}, passed = {}", ks.statistic, ks.passed);
    Ok(())
}
