//! Subcommand implementations. Files written here are deterministic given
//! the flags; wall-clock timings only go to stdout or an explicit timing file.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use vqasvm::data::{generate_bloch_toy, load_csv, preprocess, Balance, DatasetFile, PreprocessRules, Scaling, ToyDatasetConfig};
use vqasvm::engine::{infer, parse_c, residual_loss, train_with_warm_start, Model};
use vqasvm::multiplexer::{entangler_count, multiplexed_rotation};
use vqasvm::reference::{brute_force_simplex_oracle, kernel_matrix, solve_dual_svm, solve_probability_simplex_qp};
use vqasvm::scaling::{linear_fit, loss_circuit_metrics, random_training_set};
use vqasvm::spsa::{OptimizationTrace, SpsaConfig};
use vqasvm::{AnsatzSpec, Axis, EstimatorConfig, FeatureMapSpec, Hyperparams, SimPath, TrainingEstimator, TrainingSet};

use crate::args::*;

pub const SCHEMA_VERSION: u32 = 1;
pub const TRACE_SCHEMA: &str = "# schema: vqasvm-trace v1";
pub const PREDICTIONS_SCHEMA: &str = "# schema: vqasvm-predictions v1";
pub const SCALING_SCHEMA: &str = "# schema: vqasvm-scaling v1";
pub const TIMING_SCHEMA: &str = "# schema: vqasvm-timing v1";

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// CSV body preceded by a `# schema:` comment line.
fn csv_with_schema<F>(schema: &str, fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w)?;
    let body = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
    Ok(format!("{schema}\n{body}"))
}

/// Compact float form that round-trips exactly.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn fmap_spec(args: &FmapArgs, feature_dim: Option<usize>) -> Result<FeatureMapSpec> {
    let spec = match args.fmap {
        FmapArg::Bloch => FeatureMapSpec::bloch(),
        FmapArg::Zz => {
            let n = args.qubits.or(feature_dim).unwrap_or(4);
            FeatureMapSpec::zz(n, args.reps)?
        }
    };
    if let Some(d) = feature_dim {
        if d != spec.feature_dim() {
            bail!("dataset has {d} features but the {:?} map expects {}", args.fmap, spec.feature_dim());
        }
    }
    Ok(spec)
}

fn hyperparams(args: &HyperArgs) -> Result<Hyperparams> {
    Ok(Hyperparams::new(args.lambda, parse_c(&args.c)?)?)
}

fn estimator(args: &EstimatorArgs) -> Result<EstimatorConfig> {
    let config = match args.shots {
        Some(r) => EstimatorConfig::shots(r, args.seed)?,
        None => EstimatorConfig { seed: args.seed, ..EstimatorConfig::exact() },
    };
    Ok(config.with_path(match args.path {
        PathArg::Direct => SimPath::Direct,
        PathArg::Circuit => SimPath::Circuit,
    }))
}

fn load_training_set(path: &Path) -> Result<TrainingSet> {
    let file = DatasetFile::from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.training_set().with_context(|| format!("training set {}", path.display()))?)
}

pub fn generate_toy(args: &GenerateToyArgs) -> Result<Value> {
    let config = ToyDatasetConfig {
        seed: args.seed,
        balance: match args.balance {
            BalanceArg::Balanced => Balance::Balanced,
            BalanceArg::Unbalanced => Balance::Unbalanced,
        },
        num_test: args.num_test,
        cluster_spread: args.spread,
    };
    let toy = generate_bloch_toy(&config)?;
    let scaling = Scaling::identity(2);
    let train = args.out_dir.join("train.json");
    let test = args.out_dir.join("test.json");
    let manifest = args.out_dir.join("manifest.json");
    write_json(&train, &DatasetFile::new(toy.train.dataset(), &scaling))?;
    write_json(&test, &DatasetFile::new(&toy.test, &scaling))?;
    write_json(
        &manifest,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "config": config,
            "longitude": toy.longitude,
            "center_a": toy.center_a,
            "center_b": toy.center_b,
            "train_rows": toy.train.len(),
            "test_rows": toy.test.len(),
        }),
    )?;
    Ok(json!({
        "command": "generate-toy",
        "train": train, "test": test, "manifest": manifest,
        "train_rows": toy.train.len(), "test_rows": toy.test.len(),
    }))
}

pub fn prepare_csv(args: &PrepareCsvArgs) -> Result<Value> {
    let table = load_csv(&args.input, &args.label_column)?;
    let rules = PreprocessRules { positive_labels: args.positive.clone(), m: args.m, seed: args.seed };
    let split = preprocess(&table, &rules)?;
    let train = args.out_dir.join("train.json");
    write_json(&train, &DatasetFile::new(split.train.dataset(), &split.scaling))?;
    let test = match &split.test {
        Some(ds) => {
            let p = args.out_dir.join("test.json");
            write_json(&p, &DatasetFile::new(ds, &split.scaling))?;
            Some(p)
        }
        None => None,
    };
    Ok(json!({
        "command": "prepare-csv",
        "features": table.feature_names,
        "train": train, "test": test,
        "train_rows": split.train.len(),
        "test_rows": split.test.as_ref().map_or(0, |d| d.len()),
    }))
}

pub fn trace_csv(trace: &OptimizationTrace) -> Result<String> {
    csv_with_schema(TRACE_SCHEMA, |w| {
        w.write_record(["iteration", "value", "accepted", "theta_hash", "eval_index"])?;
        for r in &trace.records {
            w.write_record([
                r.iteration.to_string(),
                num(r.value),
                r.accepted.to_string(),
                format!("{:016x}", r.theta_hash),
                r.eval_index.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn train(args: &TrainArgs) -> Result<Value> {
    let set = load_training_set(&args.train)?;
    let fmap = fmap_spec(&args.fmap, Some(set.dim()))?;
    let hp = hyperparams(&args.hyper)?;
    let est = estimator(&args.estimator)?;
    let ansatz = AnsatzSpec::new(set.m(), args.layers)?;
    let spsa = SpsaConfig {
        a: args.spsa_a,
        c: args.spsa_c,
        max_iter: args.max_iter,
        blocking: !args.no_blocking,
        early_stop: !args.no_early_stop,
        sigma_samples: args.sigma_samples,
        seed: args.estimator.seed,
        ..SpsaConfig::default()
    };
    let (cheap, handoff) = match args.warm_start_shots {
        Some(r) => (EstimatorConfig::shots(r, args.estimator.seed)?.with_path(est.path), args.handoff),
        None => (est, 0),
    };
    let start = Instant::now();
    let out = train_with_warm_start(&set, &fmap, &ansatz, &hp, &cheap, &est, &spsa, handoff)?;
    let elapsed = start.elapsed().as_secs_f64();
    let residual = residual_loss(&out.model, &set, &hp)?;
    let final_objective = TrainingEstimator::new(&set, &fmap, &ansatz, &hp, &EstimatorConfig::exact())?
        .objective(&out.model.theta_star, 0)?;

    let model_path = args.out_dir.join("model.json");
    let trace_path = args.out_dir.join("trace.csv");
    write_json(&model_path, &out.model)?;
    write_text(&trace_path, &trace_csv(&out.trace)?)?;
    let s = &out.model.trace_summary;
    Ok(json!({
        "command": "train",
        "model": model_path, "trace": trace_path,
        "final_objective": final_objective,
        "oracle_objective": final_objective - residual,
        "residual": residual,
        "iterations": s.iterations, "accepted": s.accepted, "stopped_early": s.stopped_early,
        "sigma": s.sigma,
        "loss_evaluations": s.loss_evaluations,
        "regularizer_evaluations": s.regularizer_evaluations,
        "wall_time_s": elapsed,
    }))
}

#[derive(Deserialize)]
struct PointsFile {
    points: Vec<Vec<f64>>,
    #[serde(default)]
    labels: Option<Vec<i8>>,
}

pub fn classify(args: &ClassifyArgs) -> Result<Value> {
    let model = Model::from_json(&read_text(&args.model)?).with_context(|| format!("model {}", args.model.display()))?;
    let input: PointsFile =
        serde_json::from_str(&read_text(&args.test)?).with_context(|| format!("parsing {}", args.test.display()))?;
    if input.points.is_empty() {
        bail!("test file {} contains no points", args.test.display());
    }
    if let Some(l) = &input.labels {
        if l.len() != input.points.len() {
            bail!("test file has {} points but {} labels", input.points.len(), l.len());
        }
    }
    let out = infer(&model, &input.points, &estimator(&args.estimator)?)?;
    let text = csv_with_schema(PREDICTIONS_SCHEMA, |w| {
        let mut header = vec!["id", "decision", "label"];
        if input.labels.is_some() {
            header.push("true_label");
        }
        w.write_record(&header)?;
        for (k, (v, l)) in out.values.iter().zip(&out.labels).enumerate() {
            let mut row = vec![k.to_string(), num(*v), l.to_string()];
            if let Some(t) = &input.labels {
                row.push(t[k].to_string());
            }
            w.write_record(&row)?;
        }
        Ok(())
    })?;
    write_text(&args.out, &text)?;
    let accuracy = input.labels.as_ref().map(|t| {
        out.labels.iter().zip(t).filter(|(p, t)| p == t).count() as f64 / t.len() as f64
    });
    Ok(json!({
        "command": "classify", "out": args.out, "rows": out.values.len(), "accuracy": accuracy,
    }))
}

fn reference_row(set: &TrainingSet, fmap: &FeatureMapSpec, hp: &Hyperparams) -> Result<Value> {
    let k = kernel_matrix(set, fmap)?;
    let y = set.labels();
    let simplex = solve_probability_simplex_qp(&k, y, hp);
    let dual = solve_dual_svm(&k, y, hp);
    let mut row = json!({ "lambda": hp.lambda, "C": if hp.is_hard_margin() { json!("inf") } else { json!(hp.c) } });
    match &simplex {
        Ok(s) => {
            row["alpha"] = json!(s.alpha);
            row["d_tilde"] = json!(s.objective);
            row["b"] = json!(s.bias);
            row["simplex_converged"] = json!(s.converged);
        }
        Err(e) => {
            row["simplex_converged"] = json!(false);
            row["simplex_error"] = json!(e.to_string());
        }
    }
    match &dual {
        Ok(d) => {
            row["beta"] = json!(d.beta);
            row["d_star"] = json!(d.value);
            row["dual_converged"] = json!(d.converged);
        }
        Err(e) => {
            row["dual_converged"] = json!(false);
            row["dual_error"] = json!(e.to_string());
        }
    }
    if let (Ok(s), Ok(d)) = (&simplex, &dual) {
        row["bridge"] = json!(d.value * 2.0 * s.objective);
    }
    Ok(row)
}

pub fn reference_solve(args: &ReferenceArgs) -> Result<Value> {
    let set = load_training_set(&args.train)?;
    let fmap = fmap_spec(&args.fmap, Some(set.dim()))?;
    let hp = hyperparams(&args.hyper)?;
    let mut doc = reference_row(&set, &fmap, &hp)?;
    if set.len() <= 4 {
        let k = kernel_matrix(&set, &fmap)?;
        let resolution = if set.len() <= 2 { 1e-4 } else { 1e-2 };
        let (alpha, value) = brute_force_simplex_oracle(&k, set.labels(), &hp, resolution)?;
        doc["grid"] = json!({ "resolution": resolution, "alpha": alpha, "d_tilde": value });
    }
    let sweep = args
        .lambda_sweep
        .iter()
        .map(|&l| reference_row(&set, &fmap, &Hyperparams::new(l, hp.c)?))
        .collect::<Result<Vec<_>>>()?;
    doc["sweep"] = json!(sweep);
    doc["schema_version"] = json!(SCHEMA_VERSION);
    write_json(&args.out, &doc)?;
    Ok(json!({
        "command": "reference-solve", "out": args.out,
        "d_tilde": doc.get("d_tilde"), "d_star": doc.get("d_star"), "bridge": doc.get("bridge"),
        "sweep_rows": sweep.len(),
    }))
}

pub fn scaling_bench(args: &ScalingArgs) -> Result<Value> {
    if args.m_list.is_empty() {
        bail!("empty M list");
    }
    let fmap = fmap_spec(&args.fmap, None)?;
    let rows = args
        .m_list
        .iter()
        .map(|&mm| loss_circuit_metrics(mm, &fmap, args.layers, args.seed).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    // Per-multiplexer (CZ entanglers, all two-qubit gates including the closing diagonal).
    let mux_counts: Vec<(usize, usize)> = args
        .m_list
        .iter()
        .map(|&mm| {
            let m = mm.trailing_zeros() as usize;
            let controls: Vec<usize> = (0..m).collect();
            let angles: Vec<f64> = (0..mm).map(|i| 0.1 + i as f64).collect();
            multiplexed_rotation(&angles, Axis::Y, &controls, m)
                .map(|g| (entangler_count(&g), g.iter().filter(|gate| gate.qubits().len() == 2).count()))
        })
        .collect::<vqasvm::Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.m_size as f64).collect();
    let fit = if rows.len() >= 2 {
        Some(linear_fit(&xs, &rows.iter().map(|r| r.depth as f64).collect::<Vec<_>>())?)
    } else {
        None
    };
    let table = csv_with_schema(SCALING_SCHEMA, |w| {
        w.write_record(["m", "qubits", "depth", "cnots", "gates", "mux_entanglers", "mux_two_qubit"])?;
        for (r, mc) in rows.iter().zip(&mux_counts) {
            w.write_record([r.m_size, r.qubits, r.depth, r.cnots, r.gates, mc.0, mc.1].map(|v| v.to_string()))?;
        }
        Ok(())
    })?;
    write_text(&args.out, &table)?;

    let mut timings = Vec::new();
    for &mm in &args.m_list {
        let set = random_training_set(mm, &fmap, args.seed)?;
        let ansatz = AnsatzSpec::new(set.m(), args.layers)?;
        let est = TrainingEstimator::new(&set, &fmap, &ansatz, &Hyperparams::default(), &EstimatorConfig::exact())?;
        let theta = vec![0.3; ansatz.num_params()];
        let reps = args.timing_reps.max(1);
        let start = Instant::now();
        for k in 0..reps {
            est.loss(&theta, k as u64)?;
        }
        timings.push((mm, start.elapsed().as_secs_f64() / reps as f64));
    }
    if let Some(path) = &args.timing_out {
        let text = csv_with_schema(TIMING_SCHEMA, |w| {
            w.write_record(["m", "seconds_per_loss_eval"])?;
            for (mm, t) in &timings {
                w.write_record([mm.to_string(), num(*t)])?;
            }
            Ok(())
        })?;
        write_text(path, &text)?;
    }
    Ok(json!({
        "command": "scaling-bench", "out": args.out,
        "depth_fit": fit.map(|f| json!({"slope": f.slope, "intercept": f.intercept, "r2": f.r2})),
        "seconds_per_loss_eval": timings.iter().map(|(mm, t)| json!({"m": mm, "seconds": t})).collect::<Vec<_>>(),
    }))
}

