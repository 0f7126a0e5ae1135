//! Draw from a two-component Gamma mixture and compare sample moments with
//! the closed-form ones.

use mixchan::{Family, MixtureModel};

fn main() -> mixchan::Result<()> {
    let model = MixtureModel::from_triples(Family::Gamma, &[(0.540, 72.285, 0.0824), (0.460, 67.904, 0.115)])?;
    let xs = model.sample(100_000, 42)?;

    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let (m, v) = model.moments();
    println!("mean     {mean:.4}  (model {m:.4})");
    println!("variance {var:.4}  (model {v:.4})");

    for x in [4.0, 6.0, 8.0, 10.0] {
        println!("x = {x:>4}: pdf {:.4}  cdf {:.4}", model.pdf(x), model.cdf(x));
    }
    Ok(())
}
