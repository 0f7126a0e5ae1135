use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::em::{check_fit_inputs, m_step, CollapseFloors, ResponsibilityMatrix};
use super::InitStrategy;
use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::mixture::{Component, MixtureModel};
use crate::rng::{seeded_stream, SeededRng};

/// Builds a starting model for EM.
///
/// * `Quantile`: sorted samples are cut into `m` equal-count slices, each
///   slice is moment-fitted and every weight is 1/m. The seed is unused.
/// * `RandomResponsibility`: every sample gets a flat-Dirichlet membership
///   row, then one M-step turns the matrix into a model.
pub fn initialize(
    samples: &[f64],
    family: Family,
    m: usize,
    strategy: InitStrategy,
    seed: u64,
) -> Result<MixtureModel> {
    check_fit_inputs(samples, family, m)?;
    let floors = CollapseFloors::for_samples(samples, &super::FitConfig::default());
    initialize_restart(samples, family, m, strategy, seed, 0, &floors)
}

/// Starting model for restart `restart`. Restart 0 of the quantile strategy
/// is the plain equal-count split; later restarts draw random slice sizes,
/// each slice keeping at least half of its equal share.
pub(crate) fn initialize_restart(
    samples: &[f64],
    family: Family,
    m: usize,
    strategy: InitStrategy,
    seed: u64,
    restart: usize,
    floors: &CollapseFloors,
) -> Result<MixtureModel> {
    if m == 1 {
        let ones = ResponsibilityMatrix::from_row_major(samples.len(), 1, vec![1.0; samples.len()])?;
        return m_step(samples, &ones, family, floors);
    }
    let mut rng = seeded_stream(seed, restart as u64);
    match strategy {
        InitStrategy::Quantile => {
            let sizes = if restart == 0 {
                equal_sizes(samples.len(), m)
            } else {
                random_sizes(samples.len(), m, &mut rng)
            };
            let model = slice_fit(samples, family, &sizes, floors)?;
            if restart == 0 {
                let components = model
                    .components()
                    .iter()
                    .map(|c| Component::new(1.0 / m as f64, c.params))
                    .collect();
                MixtureModel::new(components)
            } else {
                Ok(model)
            }
        }
        InitStrategy::RandomResponsibility => {
            let mut data = Vec::with_capacity(samples.len() * m);
            for _ in 0..samples.len() {
                let row: Vec<f64> = (0..m).map(|_| Exp1.sample(&mut rng)).collect::<Vec<f64>>();
                let total: f64 = row.iter().sum();
                data.extend(row.iter().map(|v| v / total));
            }
            let resp = ResponsibilityMatrix::from_row_major(samples.len(), m, data)?;
            m_step(samples, &resp, family, floors)
        }
    }
}

fn equal_sizes(n: usize, m: usize) -> Vec<usize> {
    (0..m).map(|k| (k + 1) * n / m - k * n / m).collect()
}

fn random_sizes(n: usize, m: usize, rng: &mut SeededRng) -> Vec<usize> {
    let base = n / (2 * m);
    let spare = n - base * m;
    let props: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = props.iter().sum();
    let mut sizes: Vec<usize> = props.iter().map(|p| base + (p / total * spare as f64) as usize).collect();
    let assigned: usize = sizes.iter().sum();
    sizes[m - 1] += n - assigned;
    sizes
}

// Hard-assigns consecutive slices of the sorted samples to components and
// runs one M-step on that 0/1 responsibility matrix.
fn slice_fit(samples: &[f64], family: Family, sizes: &[usize], floors: &CollapseFloors) -> Result<MixtureModel> {
    let m = sizes.len();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut data = vec![0.0; sorted.len() * m];
    let mut start = 0;
    for (k, &size) in sizes.iter().enumerate() {
        if size < 2 {
            return Err(Error::domain(format!("quantile slice {k} holds {size} samples")));
        }
        for i in start..start + size {
            data[i * m + k] = 1.0;
        }
        start += size;
    }
    let resp = ResponsibilityMatrix::from_row_major(sorted.len(), m, data)?;
    m_step(&sorted, &resp, family, floors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::em::mean_var;
    use crate::distributions::Density;

    fn slice_means(samples: &[f64], m: usize) -> Vec<f64> {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut start = 0;
        equal_sizes(sorted.len(), m)
            .into_iter()
            .map(|size| {
                let slice = &sorted[start..start + size];
                start += size;
                mean_var(slice).0
            })
            .collect()
    }

    fn synthetic() -> Vec<f64> {
        MixtureModel::from_triples(Family::Gamma, &[(0.5, 2.0, 1.0), (0.5, 50.0, 0.1)])
            .unwrap()
            .sample(50_000, 99)
            .unwrap()
    }

    #[test]
    fn single_component_is_full_moment_fit() {
        let xs = synthetic();
        let (mean, var) = mean_var(&xs);
        for strategy in [InitStrategy::Quantile, InitStrategy::RandomResponsibility] {
            let model = initialize(&xs, Family::Gamma, 1, strategy, 3).unwrap();
            let (m, v) = model.moments();
            assert!((m / mean - 1.0).abs() < 1e-12 && (v / var - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let xs = synthetic();
        for strategy in [InitStrategy::Quantile, InitStrategy::RandomResponsibility] {
            let a = initialize(&xs, Family::Gamma, 3, strategy, 5).unwrap();
            let b = initialize(&xs, Family::Gamma, 3, strategy, 5).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn quantile_init_orders_means_near_truth() {
        let xs = synthetic();
        let model = initialize(&xs, Family::Gamma, 2, InitStrategy::Quantile, 0).unwrap();
        assert_eq!(model.weights(), vec![0.5, 0.5]);
        let mut means: Vec<f64> = model.components().iter().map(|c| c.params.moments().0).collect();
        means.sort_by(f64::total_cmp);
        // true component means are 2 and 5
        assert!(means[0] < means[1]);
        assert!(means[0] > 1.0 && means[0] < 4.0, "{means:?}");
        assert!(means[1] > 2.5 && means[1] < 10.0, "{means:?}");
        let direct = slice_means(&xs, 2);
        assert!((means[0] - direct[0]).abs() < 1e-9 * direct[0]);
    }

    #[test]
    fn random_slice_sizes_cover_all_samples() {
        let mut rng = seeded_stream(1, 1);
        for m in 2..6 {
            let sizes = random_sizes(1003, m, &mut rng);
            assert_eq!(sizes.iter().sum::<usize>(), 1003);
            assert!(sizes.iter().all(|&s| s >= 1003 / (2 * m)));
        }
        assert_eq!(equal_sizes(10, 3), vec![3, 3, 4]);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            initialize(&[1.0; 19], Family::Gamma, 2, InitStrategy::Quantile, 0),
            Err(Error::Domain(_))
        ));
    }
}
