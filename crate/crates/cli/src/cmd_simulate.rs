use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use kmsel_core::simulation::{run_power, run_type1, ExperimentConfig, TestRecord};
use kmsel_core::stats::uniform_qq;
use serde_json::{json, Value};
use toml::Table;

use crate::error::{CliError, CliResult};
use crate::io::{format_float, print_stdout, sha256_hex};
use crate::manifest::RunManifest;
use crate::{SimulateArgs, SimulationKind};

const FLOAT_KEYS: [&str; 3] = ["sigma", "alpha", "delta"];

fn load_table(args: &SimulateArgs) -> CliResult<(Table, Option<String>)> {
    let Some(path) = &args.config else {
        return Ok((Table::new(), None));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let table: Table =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((table, Some(sha256_hex(text.as_bytes()))))
}

fn apply_flags(table: &mut Table, args: &SimulateArgs) {
    let mut set = |key: &str, v: Option<toml::Value>| {
        if let Some(v) = v {
            table.insert(key.to_string(), v);
        }
    };
    let int = |v: Option<usize>| v.map(|v| toml::Value::Integer(v as i64));
    set("model", args.model.clone().map(toml::Value::String));
    set("n", int(args.n));
    set("q", int(args.q));
    set("k", int(args.k));
    set("t_max", int(args.t_max));
    set("replicates", int(args.replicates));
    set("sigma", args.sigma.map(toml::Value::Float));
    set("alpha", args.alpha.map(toml::Value::Float));
    set(
        "base_seed",
        args.seed.map(|s| toml::Value::Integer(s as i64)),
    );
    set(
        "pair_policy",
        args.pair_policy.clone().map(toml::Value::String),
    );
    set(
        "delta",
        args.delta
            .clone()
            .map(|d| toml::Value::Array(d.into_iter().map(toml::Value::Float).collect())),
    );
    set(
        "p_value_method",
        args.method
            .clone()
            .map(|m| toml::Value::Array(m.into_iter().map(toml::Value::String).collect())),
    );
}

// integers are accepted where floats are expected
fn as_float(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(f) => Some(*f),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

/// One experiment configuration per requested effect size.
fn configs(mut table: Table) -> CliResult<Vec<ExperimentConfig>> {
    for key in FLOAT_KEYS {
        if let Some(v) = table.get(key) {
            if let Some(f) = as_float(v) {
                table.insert(key.to_string(), toml::Value::Float(f));
            }
        }
    }
    let deltas = match table.remove("delta") {
        None => vec![0.0],
        Some(toml::Value::Array(items)) => items
            .iter()
            .map(|v| {
                as_float(v).ok_or_else(|| CliError::Usage("delta entries must be numbers".into()))
            })
            .collect::<CliResult<Vec<f64>>>()?,
        Some(v) => {
            vec![as_float(&v).ok_or_else(|| CliError::Usage("delta must be a number".into()))?]
        }
    };
    if deltas.is_empty() {
        return Err(CliError::Usage("delta list is empty".into()));
    }
    deltas
        .into_iter()
        .map(|d| {
            let mut t = table.clone();
            t.insert("delta".into(), toml::Value::Float(d));
            let config: ExperimentConfig =
                toml::Value::Table(t)
                    .try_into()
                    .map_err(|e: toml::de::Error| {
                        CliError::Usage(format!("invalid configuration: {}", e.message()))
                    })?;
            config.validate()?;
            Ok(config)
        })
        .collect()
}

fn write_pvalues(path: &Path, runs: &[(f64, &[TestRecord])]) -> CliResult<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(
        out,
        "replicate,method,p,stat,recovered,delta,k1,k2,effect,sigma_hat"
    )?;
    for (delta, records) in runs {
        for r in *records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.replicate,
                r.method.name(),
                format_float(r.p_value),
                format_float(r.stat),
                r.recovered,
                format_float(*delta),
                r.pair.0 + 1,
                r.pair.1 + 1,
                format_float(r.effect),
                r.sigma_hat.map(format_float).unwrap_or_default()
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_qq(
    path: &Path,
    runs: &[(f64, &[TestRecord])],
    configs: &[ExperimentConfig],
) -> CliResult<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "delta,method,p,uniform_quantile")?;
    for ((delta, records), config) in runs.iter().zip(configs) {
        for &method in &config.methods {
            let p: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method)
                .map(|r| r.p_value)
                .collect();
            for (v, u) in uniform_qq(&p) {
                writeln!(
                    out,
                    "{},{},{},{}",
                    format_float(*delta),
                    method.name(),
                    format_float(v),
                    format_float(u)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn without_records(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("records");
    }
    v
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let (mut table, digest) = load_table(args)?;
    apply_flags(&mut table, args);
    let configs = configs(table)?;
    fs::create_dir_all(&args.out_dir)?;

    let mut manifest = RunManifest::new(match args.kind {
        SimulationKind::Type1 => "simulate type1",
        SimulationKind::Power => "simulate power",
    })
    .seed("base_seed", configs[0].base_seed);
    if let (Some(path), Some(d)) = (&args.config, digest) {
        manifest = manifest.input(&path.display().to_string(), d);
    }

    let mut records: Vec<Vec<TestRecord>> = Vec::new();
    let mut reports = Vec::new();
    for config in &configs {
        let (report, recs) = match args.kind {
            SimulationKind::Type1 => {
                let r = run_type1(config)?;
                (serde_json::to_value(&r)?, r.records)
            }
            SimulationKind::Power => {
                let r = run_power(config)?;
                (serde_json::to_value(&r)?, r.records)
            }
        };
        reports.push(json!({ "delta": config.delta, "report": without_records(report) }));
        records.push(recs);
    }

    let runs: Vec<(f64, &[TestRecord])> = configs
        .iter()
        .zip(&records)
        .map(|(c, r)| (c.delta, r.as_slice()))
        .collect();
    write_pvalues(&args.out_dir.join("pvalues.csv"), &runs)?;
    write_qq(&args.out_dir.join("qq.csv"), &runs, &configs)?;
    let report = json!({
        "schema": "kmsel.simulate.v1",
        "kind": match args.kind {
            SimulationKind::Type1 => "type1",
            SimulationKind::Power => "power",
        },
        "runs": reports,
        "manifest": manifest,
    });
    fs::write(
        args.out_dir.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    print_stdout(&serde_json::to_string_pretty(&report["runs"])?)?;
    Ok(())
}
