//! The `fit`, `compare`, `select` and `synth` commands as library calls.
//!
//! Each command returns an [`Outcome`]: the JSON report, a short text
//! summary and the files written. With no output directory the caller is
//! expected to print the report itself.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::estimation::{em_fit, gamma_log_likelihood, gamma_mle, select_components, FitConfig, InitStrategy};
use crate::gof::{build_histogram, evaluate_on, Binning, Histogram};
use crate::ingest::{self, load_samples_with_band, InputKind, PowerSamples};
use crate::mixture::MixtureModel;
use crate::report::{
    to_json, BaselineSection, BicRow, CompareDocument, FamilyFailure, FitDocument, FitSection, RankedFit,
    RunManifest, SampleSummary, SelectDocument, SCHEMA_VERSION,
};

pub const PLOT_GRID_POINTS: usize = 512;
pub const FIT_REPORT_FILE: &str = "fit_report.json";
pub const FIT_PLOT_FILE: &str = "fit_plot.csv";
pub const COMPARE_REPORT_FILE: &str = "compare_report.json";
pub const SELECT_REPORT_FILE: &str = "select_report.json";

/// Options shared by the commands that fit data.
#[derive(Debug, Clone, PartialEq)]
pub struct DataOptions {
    pub input: PathBuf,
    pub restarts: usize,
    pub seed: u64,
    pub bins: Binning,
    /// Frequency band in Hz applied to sweep inputs.
    pub band: Option<(f64, f64)>,
    pub init: InitStrategy,
    pub max_iterations: usize,
    pub out: Option<PathBuf>,
}

impl DataOptions {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        let defaults = FitConfig::default();
        Self {
            input: input.into(),
            restarts: defaults.restarts,
            seed: defaults.seed,
            bins: Binning::FreedmanDiaconis,
            band: None,
            init: defaults.init_strategy,
            max_iterations: defaults.max_iterations,
            out: None,
        }
    }

    fn config(&self) -> FitConfig {
        FitConfig {
            restarts: self.restarts,
            seed: self.seed,
            init_strategy: self.init,
            max_iterations: self.max_iterations,
            ..FitConfig::default()
        }
    }

    fn manifest(&self, command: &str, families: Vec<Family>, components: Vec<usize>, emitted: &[&str]) -> RunManifest {
        let out = self.out.as_deref();
        RunManifest {
            command: command.into(),
            inputs: vec![self.input.display().to_string()],
            families,
            components,
            config: self.config(),
            binning: self.bins.to_string(),
            band_hz: self.band,
            output_dir: out.map(|p| p.display().to_string()).unwrap_or_default(),
            emitted: out
                .map(|dir| emitted.iter().map(|f| dir.join(f).display().to_string()).collect())
                .unwrap_or_default(),
        }
    }

    fn load(&self) -> Result<(PowerSamples, InputKind)> {
        load_samples_with_band(&self.input, self.band)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub summary: String,
    pub written: Vec<PathBuf>,
}

fn summary_of(samples: &PowerSamples, kind: InputKind) -> SampleSummary {
    SampleSummary {
        input_kind: kind.to_string(),
        source_label: samples.source_label.clone(),
        n_samples: samples.values.len(),
        dropped_records: samples.dropped,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(contents.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn emit(out: Option<&Path>, files: &[(&str, &str)]) -> Result<Vec<PathBuf>> {
    let Some(dir) = out else {
        return Ok(Vec::new());
    };
    fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|(name, contents)| {
            let path = dir.join(name);
            write_file(&path, contents)?;
            Ok(path)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitArgs {
    pub data: DataOptions,
    pub family: Family,
    pub components: usize,
}

/// Plot data as `series,x,y` rows: histogram bar heights at bin centres,
/// then each density curve on an evenly spaced grid over the histogram range.
pub fn plot_table(hist: &Histogram, curves: &[(&str, &MixtureModel)]) -> String {
    let mut s = String::from("series,x,y\n");
    for (x, y) in hist.centers().iter().zip(hist.densities()) {
        writeln!(s, "histogram,{x:e},{y:e}").unwrap();
    }
    let edges = hist.edges();
    let (lo, hi) = (edges[0], edges[edges.len() - 1]);
    for (name, model) in curves {
        for i in 0..PLOT_GRID_POINTS {
            let x = lo + (hi - lo) * i as f64 / (PLOT_GRID_POINTS - 1) as f64;
            writeln!(s, "{name},{x:e},{:e}", model.pdf(x)).unwrap();
        }
    }
    s
}

pub fn fit(args: &FitArgs) -> Result<Outcome> {
    let (samples, kind) = args.data.load()?;
    let xs = &samples.values;
    let config = args.data.config();
    let report = em_fit(xs, args.family, args.components, &config)?;
    let hist = build_histogram(xs, &args.data.bins)?;
    let metrics = evaluate_on(&report.model, xs, &hist)?;

    let baseline = if args.family == Family::Gamma {
        let params = gamma_mle(xs)?;
        let model = MixtureModel::single(params);
        Some(BaselineSection {
            metrics: evaluate_on(&model, xs, &hist)?,
            loglik: gamma_log_likelihood(xs, params.shape(), params.scale()),
            model,
        })
    } else {
        None
    };

    let mut curves = vec![("mixture_pdf", &report.model)];
    if let Some(b) = &baseline {
        curves.push(("mle_pdf", &b.model));
    }
    let plot = plot_table(&hist, &curves);

    let doc = FitDocument {
        schema_version: SCHEMA_VERSION,
        manifest: args.data.manifest(
            "fit",
            vec![args.family],
            vec![args.components],
            &[FIT_REPORT_FILE, FIT_PLOT_FILE],
        ),
        samples: summary_of(&samples, kind),
        fit: FitSection::from_report(&report, metrics),
        mle_baseline: baseline,
    };
    let json = to_json(&doc);
    let written = emit(args.data.out.as_deref(), &[(FIT_REPORT_FILE, &json), (FIT_PLOT_FILE, &plot)])?;

    let m = &doc.fit.metrics;
    let mut summary = format!(
        "{} m={} n={} loglik={:.6} iterations={} converged={}\nwmrd={:.4} kl={:.4} ks={:.4} (critical {:.4}, {})\n",
        args.family,
        args.components,
        xs.len(),
        doc.fit.final_loglik(),
        doc.fit.iterations,
        doc.fit.converged,
        m.wmrd,
        m.kl_nats,
        m.ks_stat,
        m.ks_critical,
        if m.ks_passed { "passed" } else { "failed" },
    );
    if let Some(b) = &doc.mle_baseline {
        writeln!(
            summary,
            "single-gamma mle: wmrd={:.4} kl={:.4} ks={:.4}",
            b.metrics.wmrd, b.metrics.kl_nats, b.metrics.ks_stat
        )
        .unwrap();
    }
    Ok(Outcome {
        report: json,
        summary,
        written,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareArgs {
    pub data: DataOptions,
    pub families: Vec<Family>,
    pub components: usize,
}

pub fn compare(args: &CompareArgs) -> Result<Outcome> {
    if args.families.is_empty() {
        return Err(Error::domain("compare needs at least one family"));
    }
    let (samples, kind) = args.data.load()?;
    let xs = &samples.values;
    let config = args.data.config();
    let hist = build_histogram(xs, &args.data.bins)?;

    let mut ranking = Vec::new();
    let mut failures = Vec::new();
    for &family in &args.families {
        let outcome = em_fit(xs, family, args.components, &config)
            .and_then(|r| evaluate_on(&r.model, xs, &hist).map(|m| FitSection::from_report(&r, m)));
        match outcome {
            Ok(fit) => ranking.push(RankedFit {
                rank: 0,
                family,
                kl_nats: fit.metrics.kl_nats,
                wmrd: fit.metrics.wmrd,
                ks_stat: fit.metrics.ks_stat,
                ks_passed: fit.metrics.ks_passed,
                loglik: fit.final_loglik(),
                fit,
            }),
            Err(e) => failures.push(FamilyFailure {
                family,
                error: e.to_string(),
            }),
        }
    }
    if ranking.is_empty() {
        return Err(Error::FitFailed {
            diagnostics: failures.iter().map(|f| format!("{}: {}", f.family, f.error)).collect(),
        });
    }
    // stable: equal KL keeps the requested family order
    ranking.sort_by(|a, b| a.kl_nats.total_cmp(&b.kl_nats));
    for (i, r) in ranking.iter_mut().enumerate() {
        r.rank = i + 1;
    }

    let doc = CompareDocument {
        schema_version: SCHEMA_VERSION,
        manifest: args
            .data
            .manifest("compare", args.families.clone(), vec![args.components], &[COMPARE_REPORT_FILE]),
        samples: summary_of(&samples, kind),
        ranking,
        failures,
    };
    let json = to_json(&doc);
    let written = emit(args.data.out.as_deref(), &[(COMPARE_REPORT_FILE, &json)])?;

    let mut summary = format!("{:<5} {:<9} {:>10} {:>10} {:>10} {:>6}\n", "rank", "family", "kl_nats", "wmrd", "ks_stat", "ks");
    for r in &doc.ranking {
        writeln!(
            summary,
            "{:<5} {:<9} {:>10.4} {:>10.4} {:>10.4} {:>6}",
            r.rank,
            r.family.as_str(),
            r.kl_nats,
            r.wmrd,
            r.ks_stat,
            if r.ks_passed { "pass" } else { "fail" }
        )
        .unwrap();
    }
    for f in &doc.failures {
        writeln!(summary, "-     {:<9} failed: {}", f.family.as_str(), f.error).unwrap();
    }
    Ok(Outcome {
        report: json,
        summary,
        written,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectArgs {
    pub data: DataOptions,
    pub family: Family,
    pub max_components: usize,
}

pub fn select(args: &SelectArgs) -> Result<Outcome> {
    let (samples, kind) = args.data.load()?;
    let xs = &samples.values;
    let config = args.data.config();
    let selection = select_components(xs, args.family, 1..=args.max_components, &config)?;
    let hist = build_histogram(xs, &args.data.bins)?;

    let mut bic_table = Vec::new();
    let mut reports = Vec::new();
    for entry in &selection.entries {
        let n_params = 3 * entry.m - 1;
        match &entry.outcome {
            Ok(report) => {
                bic_table.push(BicRow {
                    m: entry.m,
                    n_params,
                    loglik: Some(report.final_loglik()),
                    bic: entry.bic,
                    error: None,
                });
                reports.push(FitSection::from_report(report, evaluate_on(&report.model, xs, &hist)?));
            }
            Err(msg) => bic_table.push(BicRow {
                m: entry.m,
                n_params,
                loglik: None,
                bic: None,
                error: Some(msg.clone()),
            }),
        }
    }

    let doc = SelectDocument {
        schema_version: SCHEMA_VERSION,
        manifest: args.data.manifest(
            "select",
            vec![args.family],
            (1..=args.max_components).collect(),
            &[SELECT_REPORT_FILE],
        ),
        samples: summary_of(&samples, kind),
        selected_m: selection.best_m,
        bic_table,
        reports,
    };
    let json = to_json(&doc);
    let written = emit(args.data.out.as_deref(), &[(SELECT_REPORT_FILE, &json)])?;

    let mut summary = format!("{:>3} {:>14} {:>14}\n", "m", "loglik", "bic");
    for row in &doc.bic_table {
        match (row.loglik, row.bic) {
            (Some(ll), Some(b)) => {
                let mark = if row.m == doc.selected_m { " *" } else { "" };
                writeln!(summary, "{:>3} {ll:>14.4} {b:>14.4}{mark}", row.m).unwrap();
            }
            _ => writeln!(summary, "{:>3} excluded: {}", row.m, row.error.as_deref().unwrap_or("")).unwrap(),
        }
    }
    writeln!(summary, "selected m = {}", doc.selected_m).unwrap();
    Ok(Outcome {
        report: json,
        summary,
        written,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthArgs {
    pub model: PathBuf,
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn synth(args: &SynthArgs) -> Result<Outcome> {
    if args.n == 0 {
        return Err(Error::domain("synth needs n >= 1"));
    }
    let model = ingest::read_model(&args.model)?;
    let xs = model.sample(args.n, args.seed)?;
    let mut text = Vec::new();
    ingest::write_power_list(&xs, &mut text)?;
    let text = String::from_utf8(text).expect("numbers are ascii");
    if let Some(dir) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_file(&args.out, &text)?;
    Ok(Outcome {
        report: String::new(),
        summary: format!("wrote {} samples to {}\n", args.n, args.out.display()),
        written: vec![args.out.clone()],
    })
}

/// Runs the command recorded in `manifest` again.
pub fn replay(manifest: &RunManifest) -> Result<Outcome> {
    let input = manifest
        .inputs
        .first()
        .ok_or_else(|| Error::Load("manifest lists no input".into()))?;
    let data = DataOptions {
        input: input.into(),
        restarts: manifest.config.restarts,
        seed: manifest.config.seed,
        bins: manifest.binning.parse()?,
        band: manifest.band_hz,
        init: manifest.config.init_strategy,
        max_iterations: manifest.config.max_iterations,
        out: (!manifest.output_dir.is_empty()).then(|| manifest.output_dir.clone().into()),
    };
    let first_family = || {
        manifest
            .families
            .first()
            .copied()
            .ok_or_else(|| Error::Load("manifest lists no family".into()))
    };
    let components = manifest.components.iter().copied();
    match manifest.command.as_str() {
        "fit" => fit(&FitArgs {
            data,
            family: first_family()?,
            components: components.max().unwrap_or(1),
        }),
        "compare" => compare(&CompareArgs {
            data,
            families: manifest.families.clone(),
            components: components.max().unwrap_or(1),
        }),
        "select" => select(&SelectArgs {
            data,
            family: first_family()?,
            max_components: components.max().unwrap_or(1),
        }),
        other => Err(Error::Load(format!("cannot replay command '{other}'"))),
    }
}
