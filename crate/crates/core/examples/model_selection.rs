//! Pick the number of mixture components by BIC.

use mixchan::estimation::bic;
use mixchan::{select_components, Family, FitConfig, MixtureModel};

fn main() -> mixchan::Result<()> {
    let truth = MixtureModel::from_triples(Family::Gamma, &[(0.5, 2.0, 1.0), (0.5, 50.0, 0.1)])?;
    let xs = truth.sample(5_000, 3)?;

    let sel = select_components(&xs, Family::Gamma, 1..=4, &FitConfig::default().with_restarts(4))?;
    for entry in &sel.entries {
        match &entry.outcome {
            Ok(r) => println!(
                "m = {}  lnL {:>10.2}  BIC {:>10.2}",
                entry.m,
                r.final_loglik(),
                bic(r.final_loglik(), r.model.n_free_params(), xs.len())
            ),
            Err(e) => println!("m = {}  failed: {e}", entry.m),
        }
    }
    println!("selected m = {}", sel.best_m);
    Ok(())
}
