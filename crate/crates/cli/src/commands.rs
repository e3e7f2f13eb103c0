use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use svdd_core::baselines::{GnbModel, LdaModel, SvmModel};
use svdd_core::dataio::{
    binarize_target, drop_invalid, gen_synthetic, histogram, load_table_inferred, resample_uniform,
    split_leave_one_well_out, LabeledDataset, NormStats, SplitPlan, SyntheticConfig,
};
use svdd_core::eval::{compare_report, confusion, timed, Report, RunRecord, Scores};
use svdd_core::relief::{relief_weights, select_top};
use svdd_core::svdd::{self, SvddTrainConfig};
use svdd_core::{Classifier, Error, Label};

use crate::config::{ClassifierKind, RunConfig};
use crate::CliError;

const CLASS_COLUMN: &str = "class";

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))?;
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn synth(cfg: &RunConfig) -> Result<(), CliError> {
    let table = gen_synthetic(&SyntheticConfig {
        n_wells: cfg.wells,
        rows_per_well: cfg.rows,
        skew: cfg.skew,
        d: cfg.features,
        seed: cfg.seed,
    })?;
    let path = cfg.input_path();
    let mut out = create(&path)?;
    table.write_csv(&mut out)?;
    out.flush().map_err(|e| CliError::io(&path, e))?;
    println!("wrote {} rows in {} wells to {}", table.len(), table.wells().len(), path.display());
    Ok(())
}

pub fn prepare(cfg: &RunConfig) -> Result<(), CliError> {
    let raw = load_table_inferred(cfg.input_path(), &cfg.target, &[CLASS_COLUMN])?;
    let clean = drop_invalid(&raw)?;
    let table = resample_uniform(&clean, cfg.spacing)?;
    let data = binarize_target(&table, cfg.threshold)?;

    let path = cfg.prepared_path();
    let mut out = create(&path)?;
    let mut body = Vec::new();
    table.write_csv(&mut body)?;
    let body = String::from_utf8(body).expect("csv output is utf-8");
    for (i, line) in body.lines().enumerate() {
        let class = if i == 0 { CLASS_COLUMN.to_string() } else { data.y[i - 1].to_string() };
        writeln!(out, "{line},{class}").map_err(|e| CliError::io(&path, e))?;
    }
    out.flush().map_err(|e| CliError::io(&path, e))?;

    let targets: Vec<f64> = table.rows.iter().filter_map(|r| r.target).collect();
    let hist = histogram(&targets, cfg.bins)?;
    let hist_path = cfg.out.join("histogram.csv");
    let mut hout = create(&hist_path)?;
    hist.write_csv(&mut hout)?;
    hout.flush().map_err(|e| CliError::io(&hist_path, e))?;

    let n = data.len() as f64;
    let (low, high) = (data.count(Label::Low), data.count(Label::High));
    println!(
        "rows: {} read, {} valid, {} after resampling ({} wells)",
        raw.len(),
        clean.len(),
        table.len(),
        table.wells().len()
    );
    println!("Class low: {low} ({:.1}%)", 100.0 * low as f64 / n);
    println!("Class high: {high} ({:.1}%)", 100.0 * high as f64 / n);
    println!("wrote {} and {}", path.display(), hist_path.display());
    Ok(())
}

/// Loads the prepared table and takes labels from its class column.
pub fn load_prepared(cfg: &RunConfig) -> Result<LabeledDataset, CliError> {
    let path = cfg.prepared_path();
    let table = load_table_inferred(&path, &cfg.target, &[CLASS_COLUMN])?;
    let mut data = binarize_target(&table, cfg.threshold)?;
    let mut reader = csv::Reader::from_path(&path).map_err(Error::from)?;
    let col = reader
        .headers()
        .map_err(Error::from)?
        .iter()
        .position(|h| h.trim() == CLASS_COLUMN)
        .ok_or_else(|| Error::MalformedFile { path: path.clone(), reason: "no class column".into() })?;
    data.y = reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(Error::from)?;
            match rec.get(col).map(str::trim) {
                Some("LOW") => Ok(Label::Low),
                Some("HIGH") => Ok(Label::High),
                other => Err(Error::MalformedFile {
                    path: path.clone(),
                    reason: format!("row {}: bad class {other:?}", i + 1),
                }),
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(data)
}

pub fn features(cfg: &RunConfig) -> Result<(), CliError> {
    let data = load_prepared(cfg)?;
    let weights = relief_weights(data.x.view(), &data.y, &data.feature_names)?;
    let top = select_top(&weights, cfg.relief_k)?;

    let weights_path = cfg.out.join("relief.csv");
    let mut out = create(&weights_path)?;
    weights.write_csv(&mut out)?;
    out.flush().map_err(|e| CliError::io(&weights_path, e))?;

    let names: Vec<&str> = top.iter().map(|&i| data.feature_names[i].as_str()).collect();
    let selected_path = cfg.out.join("selected.txt");
    write_text(&selected_path, &format!("{}\n", names.join("\n")))?;
    for (rank, &i) in top.iter().enumerate() {
        println!("{}. {} {:.6}", rank + 1, data.feature_names[i], weights.weights[i]);
    }
    println!("wrote {} and {}", weights_path.display(), selected_path.display());
    Ok(())
}

/// Restricts the dataset to the features listed in `<out>/selected.txt`,
/// when that file exists.
fn apply_selection(cfg: &RunConfig, data: LabeledDataset) -> Result<LabeledDataset, CliError> {
    let path = cfg.out.join("selected.txt");
    if !path.exists() {
        return Ok(data);
    }
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let cols = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|name| {
            data.feature_names
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| CliError::Usage(format!("selected feature `{name}` is not in the prepared table")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(data.select_features(&cols)?)
}

/// Trains one classifier on one split and scores it on the split's test
/// rows.
fn evaluate(
    kind: ClassifierKind,
    cfg: &RunConfig,
    data: &LabeledDataset,
    plan: &SplitPlan,
    norm: &NormStats,
) -> Result<(Box<dyn Classifier>, Scores), Error> {
    let (model, train_seconds): (Box<dyn Classifier>, f64) = match kind {
        ClassifierKind::Svdd => {
            let (x, _) = data.rows(&plan.train_rows);
            let svdd_cfg = SvddTrainConfig { max_passes: cfg.max_passes, ..SvddTrainConfig::new(cfg.kernel, cfg.cost) };
            let (m, t) = timed(|| svdd::train_normalized(x.view(), norm.clone(), &svdd_cfg))?;
            (Box::new(m), t)
        }
        other => {
            let (x, y) = data.rows(&plan.supervised_rows(data));
            match other {
                ClassifierKind::Svm => {
                    let (m, t) =
                        timed(|| SvmModel::train_normalized(x.view(), &y, cfg.kernel, cfg.svm_cost, norm.clone()))?;
                    (Box::new(m), t)
                }
                ClassifierKind::NaiveBayes => {
                    let (m, t) = timed(|| GnbModel::train_normalized(x.view(), &y, norm.clone()))?;
                    (Box::new(m), t)
                }
                _ => {
                    let (m, t) = timed(|| LdaModel::train_normalized(x.view(), &y, norm.clone()))?;
                    (Box::new(m), t)
                }
            }
        }
    };
    let (x_test, y_test) = data.rows(&plan.test_rows);
    let (pred, test_seconds) = timed(|| model.predict_labels(x_test.view()))?;
    let scores = Scores::from_counts(&confusion(&y_test, &pred)?, train_seconds, test_seconds)?;
    Ok((model, scores))
}

/// Leave-one-well-out comparison. Runs that fail to converge are reported
/// as `NA`; the report is still written and the first such failure is
/// returned afterwards.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let data = apply_selection(cfg, load_prepared(cfg)?)?;
    let wells: Vec<String> = data.wells().into_iter().map(String::from).collect();
    if wells.len() < 2 {
        return Err(CliError::Usage(format!(
            "leave-one-well-out needs at least 2 wells, found {}",
            wells.len()
        )));
    }
    let test_wells = match &cfg.test_wells {
        None => wells.clone(),
        Some(list) => {
            for w in list {
                if !wells.contains(w) {
                    return Err(Error::UnknownWell(w.clone()).into());
                }
            }
            list.clone()
        }
    };
    println!("features: {}", data.feature_names.join(","));

    let models_dir = cfg.out.join("models");
    let mut records = Vec::new();
    let mut deferred: Option<Error> = None;
    for well in &test_wells {
        let plan = split_leave_one_well_out(&data, well)?;
        let norm = NormStats::fit(data.x.view(), &plan.supervised_rows(&data))?;
        for &kind in &cfg.classifiers {
            let scores = match evaluate(kind, cfg, &data, &plan, &norm) {
                Ok((model, scores)) => {
                    write_text(&models_dir.join(format!("{kind}_{well}.model")), &model.to_text())?;
                    Some(scores)
                }
                Err(e @ (Error::NonConvergence { .. } | Error::UndefinedClassAccuracy(_))) => {
                    eprintln!("{kind} on well {well}: {e}");
                    if matches!(e, Error::NonConvergence { .. }) && deferred.is_none() {
                        deferred = Some(e);
                    }
                    None
                }
                Err(e) => return Err(e.into()),
            };
            records.push(RunRecord { classifier: kind.to_string(), well: well.clone(), scores });
        }
    }
    // Group by classifier in the requested order, wells in test order.
    records.sort_by_key(|r| cfg.classifiers.iter().position(|k| k.name() == r.classifier));
    let report = compare_report(&records)?;
    let report_path = cfg.out.join("report.csv");
    write_text(&report_path, &report.to_csv())?;
    print!("{}", report.to_csv());
    println!("wrote {}", report_path.display());
    match deferred {
        Some(e) => Err(e.into()),
        None => Ok(report),
    }
}
