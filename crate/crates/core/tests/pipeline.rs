use std::fs;

use mixchan::commands::{self, CompareArgs, DataOptions, FitArgs, SynthArgs};
use mixchan::ingest::{self, write_power_list};
use mixchan::report::{CompareDocument, FitDocument};
use mixchan::{select_components, ComponentParams, Family, FitConfig, MixtureModel};

fn separated() -> MixtureModel {
    MixtureModel::from_triples(Family::Gamma, &[(0.5, 2.0, 1.0), (0.5, 50.0, 0.1)]).unwrap()
}

#[test]
fn compare_ranks_generating_family_first() {
    let dir = tempfile::tempdir().unwrap();
    let mut gamma_first = 0;
    for seed in 0..20 {
        let input = dir.path().join(format!("s{seed}.txt"));
        let xs = separated().sample(2000, 500 + seed).unwrap();
        write_power_list(&xs, fs::File::create(&input).unwrap()).unwrap();
        let args = CompareArgs {
            data: DataOptions {
                seed,
                restarts: 4,
                ..DataOptions::new(&input)
            },
            families: Family::ALL.to_vec(),
            components: 2,
        };
        let outcome = commands::compare(&args).unwrap();
        let doc: CompareDocument = serde_json::from_str(&outcome.report).unwrap();
        assert!(doc.failures.is_empty() || doc.ranking.len() + doc.failures.len() == 3);
        if doc.ranking[0].family == Family::Gamma {
            gamma_first += 1;
        }
    }
    assert!(gamma_first >= 18, "gamma ranked first in {gamma_first}/20");
}

#[test]
fn synth_then_fit_recovers_weights() {
    let dir = tempfile::tempdir().unwrap();
    let truth = MixtureModel::from_triples(Family::Gamma, &[(0.540, 72.285, 0.0824), (0.460, 67.904, 0.115)]).unwrap();
    let model_path = dir.path().join("model.json");
    ingest::write_model(&truth, &model_path).unwrap();
    let samples = dir.path().join("synth.txt");
    commands::synth(&SynthArgs {
        model: model_path,
        n: 50_000,
        seed: 11,
        out: samples.clone(),
    })
    .unwrap();

    let outcome = commands::fit(&FitArgs {
        data: DataOptions {
            seed: 3,
            ..DataOptions::new(&samples)
        },
        family: Family::Gamma,
        components: 2,
    })
    .unwrap();
    let doc: FitDocument = serde_json::from_str(&outcome.report).unwrap();
    let fitted = doc.fit.model.weights();
    for (f, t) in fitted.iter().zip(truth.weights()) {
        assert!((f - t).abs() <= 0.05, "fitted {fitted:?} vs {:?}", truth.weights());
    }
    assert!(doc.fit.metrics.ks_passed);
}

#[test]
fn bic_prefers_one_component_for_single_gamma() {
    let truth = MixtureModel::single(ComponentParams::gamma(30.084, 0.227).unwrap());
    let config = FitConfig::default().with_restarts(4);
    let mut ones = 0;
    for seed in 0..20 {
        let xs = truth.sample(1000, 900 + seed).unwrap();
        let sel = select_components(&xs, Family::Gamma, 1..=3, &config.clone().with_seed(seed)).unwrap();
        if sel.best_m == 1 {
            ones += 1;
        }
    }
    assert!(ones >= 18, "m = 1 selected in {ones}/20");
}

#[test]
fn bic_finds_two_separated_components() {
    let xs = separated().sample(5000, 21).unwrap();
    let sel = select_components(&xs, Family::Gamma, 1..=4, &FitConfig::default().with_restarts(4)).unwrap();
    assert_eq!(sel.best_m, 2);
    assert_eq!(sel.entries.len(), 4);
}

#[test]
fn mixture_beats_single_gamma_on_bimodal_data() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bimodal.txt");
    write_power_list(&separated().sample(4096, 2).unwrap(), fs::File::create(&input).unwrap()).unwrap();
    let outcome = commands::fit(&FitArgs {
        data: DataOptions::new(&input),
        family: Family::Gamma,
        components: 2,
    })
    .unwrap();
    let doc: FitDocument = serde_json::from_str(&outcome.report).unwrap();
    let baseline = doc.mle_baseline.expect("gamma fits carry a baseline");
    assert!(doc.fit.metrics.kl_nats < baseline.metrics.kl_nats);
    assert!(doc.fit.metrics.wmrd < baseline.metrics.wmrd);
    assert!(doc.fit.final_loglik() > baseline.loglik);
}
