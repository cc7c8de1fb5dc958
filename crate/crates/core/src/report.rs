//! JSON/CSV artefacts written by the experiment commands.
//!
//! Every report carries `schema_version`. Run-dependent wall-clock data is
//! confined to the top-level `timing` object so the rest of a report is
//! byte-identical across repeated runs with the same configuration.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::datastream::{CvOptions, CvOutcome, Dataset, FoldResult, ModelSpec};
use crate::driftsim::{DriftConfig, DriftReport};
use crate::error::{Error, Result};
use crate::multiclass::Scheme;
use crate::scalar::Scalar;
use crate::tracker::{emit_trace, rule_label, TraceFormat};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct DatasetInfo<'a> {
    name: &'a str,
    instances: usize,
    classes: &'a [String],
    dims: usize,
    feature_names: &'a [String],
}

#[derive(Serialize)]
struct CvEntry<'a> {
    model: String,
    spec: &'a ModelSpec,
    mean_accuracy: f64,
    std_accuracy: f64,
    folds: &'a [FoldResult],
}

/// Report for one or more cross-validated models on a dataset.
pub fn bench_report<T: Scalar>(ds: &Dataset<T>, opts: &CvOptions, outcomes: &[CvOutcome<T>]) -> Value {
    let results: Vec<CvEntry> = outcomes
        .iter()
        .map(|o| CvEntry {
            model: o.spec.to_string(),
            spec: &o.spec,
            mean_accuracy: o.mean_accuracy,
            std_accuracy: o.std_accuracy,
            folds: &o.folds,
        })
        .collect();
    let timing: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "model": o.spec.to_string(),
                "wall_time_s": o.wall_time_s,
                "fold_times_s": o.fold_times_s,
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": "bench",
        "dataset": DatasetInfo {
            name: &ds.name,
            instances: ds.len(),
            classes: &ds.classes,
            dims: ds.dim(),
            feature_names: &ds.feature_names,
        },
        "protocol": opts,
        "results": results,
        "timing": { "results": timing },
    })
}

/// `model,dataset,mean_accuracy,std,mean_time_s` rows, one per outcome.
pub fn write_results_csv<T: Scalar>(path: &Path, dataset: &str, outcomes: &[CvOutcome<T>]) -> Result<()> {
    let mut out = String::from("model,dataset,mean_accuracy,std,mean_time_s\n");
    for o in outcomes {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6}\n",
            o.spec, dataset, o.mean_accuracy, o.std_accuracy, o.wall_time_s
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Report for drift runs sharing one configuration.
pub fn drift_report<T: Scalar>(config: &DriftConfig, reports: &[DriftReport<T>], wall_time_s: &[f64]) -> Result<Value> {
    let mut runs = Vec::with_capacity(reports.len());
    for r in reports {
        let rb = r
            .model
            .rule_base()
            .ok_or_else(|| Error::invalid("drift model has no rule base"))?;
        let mut traces = Vec::with_capacity(r.traces.len());
        for tr in &r.traces {
            let records = tr
                .entries
                .iter()
                .map(|e| {
                    Ok(json!({
                        "t": e.t,
                        "argmax": e.argmax,
                        "argmin": e.argmin,
                        "argmax_label": rule_label(rb, e.argmax)?,
                        "argmin_label": rule_label(rb, e.argmin)?,
                        "max_c": e.max_c.as_f64(),
                        "min_c": e.min_c.as_f64(),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            traces.push(json!({ "classifier": tr.classifier, "records": records }));
        }
        runs.push(json!({
            "scheme": r.scheme,
            "m": r.m,
            "accuracy": r.accuracy(),
            "correct": r.correct,
            "total": r.total,
            "step_accuracy": r.step_accuracy,
            "traces": traces,
        }));
    }
    let timing: Vec<Value> = reports
        .iter()
        .zip(wall_time_s)
        .map(|(r, s)| json!({ "scheme": r.scheme, "wall_time_s": s }))
        .collect();
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "drift",
        "config": config,
        "runs": runs,
        "timing": { "runs": timing },
    }))
}

/// File-name stem for a drift classifier, e.g. `ovr_f_1`.
pub fn trace_id(scheme: Scheme, classifier: &str) -> String {
    format!("{}_{}", scheme.name().to_ascii_lowercase(), classifier)
}

/// Writes `trace_<id>.csv` for every classifier plus a combined
/// `traces.csv` (`t,classifier,argmax_label,argmin_label`).
pub fn write_drift_traces<T: Scalar>(dir: &Path, reports: &[DriftReport<T>]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut combined = String::from("t,classifier,argmax_label,argmin_label\n");
    for r in reports {
        let rb = r
            .model
            .rule_base()
            .ok_or_else(|| Error::invalid("drift model has no rule base"))?;
        for tr in &r.traces {
            let id = trace_id(r.scheme, &tr.classifier);
            let path = dir.join(format!("trace_{id}.csv"));
            emit_trace(tr, rb, TraceFormat::Csv, &path)?;
            written.push(path);
            for e in &tr.entries {
                combined.push_str(&format!(
                    "{},{},{},{}\n",
                    e.t,
                    id,
                    rule_label(rb, e.argmax)?,
                    rule_label(rb, e.argmin)?
                ));
            }
        }
    }
    let path = dir.join("traces.csv");
    std::fs::write(&path, combined).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Serialises `value` as pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `value` without its `timing` field, for reproducibility comparisons.
pub fn without_timing(value: &Value) -> Value {
    let mut v = value.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing");
    }
    v
}
