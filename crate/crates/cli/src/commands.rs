use std::fmt::Write as _;

use dipoed::container::Container;
use dipoed::design::{exhaustive_select, greedy_select, random_design};
use dipoed::dipnet::{l2_accuracy_of, train, whitened_encoder, Dataset, DipNet, DipNetConfig, TrainConfig};
use dipoed::eig::{
    eig_closed_form_linear_gaussian, eig_dlmc, eig_with_inner, simulate_outer_samples, InnerMode, InnerOutputs,
    NoiseModel,
};
use dipoed::models::{Evaluator, ObservableMap, SolveCounts};
use dipoed::reduction::{as_basis, energy_rank, estimate_as_operator, pod_basis, pod_from_outputs, ReducedBases};
use dipoed::rng::{stream_rng, Stream};
use dipoed::verify::{bound_sweep, PerturbedMap, SweepEntry, SweepSettings};
use dipoed::{GaussianPrior, Result};
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::artifacts::Workspace;
use crate::config::{EvaluatorChoice, RunConfig};
use crate::setup::{self, Prior};
use crate::{CliError, Outcome, Step};

const DATASET: &str = "dataset";
const BASES: &str = "bases";

pub fn execute(step: Step, cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let mut ws = Workspace::open(cfg, step)?;
    match step {
        Step::SamplePrior => sample_prior(cfg, &mut ws),
        Step::GenData => gen_data(cfg, &mut ws),
        Step::BuildBases => build_bases(cfg, &mut ws),
        Step::Train => train_network(cfg, &mut ws),
        Step::EstimateEig => estimate_eig(cfg, &mut ws),
        Step::Greedy => greedy(cfg, &mut ws),
        Step::Verify => verify(cfg, &mut ws),
        Step::Oracle => oracle(cfg, &mut ws),
    }
    .and_then(|(seeds, solves, summary)| ws.finish(seeds, solves, summary))
}

type StepResult = std::result::Result<(Value, Value, String), CliError>;

fn counts_json(c: &SolveCounts) -> Value {
    json!({
        "pde_solves": c.forward_solves + c.linearized_solves,
        "forward_solves": c.forward_solves,
        "linearized_solves": c.linearized_solves,
        "factorizations": c.factorizations,
    })
}

fn no_solves() -> Value {
    counts_json(&SolveCounts::default())
}

fn fmt_indices(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn sample_prior(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let prior = setup::prior(cfg).map_err(&core)?;
    let p = prior.as_dyn();
    let n = cfg.sample_prior.n.expect("validated");
    let samples: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| p.sample(&mut stream_rng(cfg.seed, Stream::PriorSamples, i as u64)))
        .collect();
    let dim = p.dim();
    let mut c = Container::new("prior-samples", json!({ "samples": n, "dim": dim, "seed": cfg.seed }));
    c.push("samples", n, dim, samples.concat());
    c.save(&ws.path("prior_samples.json")).map_err(&core)?;
    ws.saved_container("prior_samples");
    match &prior {
        Prior::Field(f) => f.save(&ws.path("prior.json")),
        Prior::Dense(d) => d.save(&ws.path("prior.json")),
    }
    .map_err(&core)?;
    ws.saved_container("prior");
    let var = samples
        .iter()
        .map(|s| s.iter().zip(p.mean()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / dim as f64)
        .sum::<f64>()
        / n as f64;
    let summary = format!("sample-prior: {n} samples of dimension {dim}, mean pointwise variance {var:.6e}");
    Ok((json!({ "seed": cfg.seed }), no_solves(), summary))
}

fn gen_data(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let prior = setup::prior(cfg).map_err(&core)?;
    let map = setup::map(cfg).map_err(&core)?;
    let t = &cfg.training;
    let before = map.solve_counts();
    let data = Dataset::generate(
        &map,
        prior.as_dyn(),
        t.n_samples.expect("validated"),
        t.n_test.unwrap_or(0),
        t.validation_fraction.unwrap_or(0.2),
        cfg.seed,
    )
    .map_err(&core)?;
    let used = map.solve_counts().saturating_sub(before);
    data.save(&ws.path(&format!("{DATASET}.json"))).map_err(&core)?;
    ws.saved_container(DATASET);
    let summary = format!(
        "gen-data: {} samples ({} train, {} validation, {} test) of a {}-parameter {} model, {} PDE solves",
        data.len(),
        data.train.len(),
        data.validation.len(),
        data.test.len(),
        data.input_dim(),
        map.kind_name(),
        used.forward_solves + used.linearized_solves,
    );
    Ok((json!({ "seed": cfg.seed }), counts_json(&used), summary))
}

fn build_bases(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let r = &cfg.reduction;
    let dataset_path = match r.n_samples_pod {
        None => Some(ws.input(&format!("{DATASET}.json"))?),
        Some(_) => None,
    };
    let prior = setup::prior(cfg).map_err(&core)?;
    let p = prior.as_dyn();
    let map = setup::map(cfg).map_err(&core)?;
    let n_as = r.n_samples_as.unwrap_or(256);

    let c0 = map.solve_counts();
    let h = estimate_as_operator(&map, p, n_as, cfg.seed).map_err(&core)?;
    let c1 = map.solve_counts();
    let energy = r.energy.unwrap_or(1.0);
    let (v, lambda_as) = match r.r_m {
        Some(rm) => as_basis(&h, p, rm),
        None => as_basis(&h, p, map.n()).map(|(v, l)| truncate(v, l, energy)),
    }
    .map_err(&core)?;

    let (pod_outputs, n_pod) = match &dataset_path {
        Some(path) => {
            let data = Dataset::load(path).map_err(&core)?;
            let outputs = data.subset_outputs(&data.train);
            let n = outputs.len();
            (Some(outputs), n)
        }
        None => (None, r.n_samples_pod.expect("checked above")),
    };
    let rf_full = map.d().min(n_pod);
    let pod = |rf: usize| match &pod_outputs {
        Some(outputs) => pod_from_outputs(outputs, rf),
        None => pod_basis(&map, p, n_pod, rf, cfg.seed),
    };
    let (phi, lambda_pod) = match r.r_f {
        Some(rf) => pod(rf),
        None => pod(rf_full).map(|(f, l)| truncate(f, l, energy)),
    }
    .map_err(&core)?;
    let c2 = map.solve_counts();

    let bases = ReducedBases {
        v,
        lambda_as,
        phi,
        lambda_pod,
        n_samples_as: n_as,
        n_samples_pod: n_pod,
        seed: cfg.seed,
    };
    bases.save(&ws.path(&format!("{BASES}.json"))).map_err(&core)?;
    ws.saved_container(BASES);
    let mut csv = String::from("index,lambda_as,lambda_pod\n");
    for i in 0..bases.r_m().max(bases.r_f()) {
        let cell = |v: &[f64]| v.get(i).map(|x| format!("{x:.16e}")).unwrap_or_default();
        let _ = writeln!(csv, "{i},{},{}", cell(&bases.lambda_as), cell(&bases.lambda_pod));
    }
    ws.write_text("spectra.csv", &csv)?;

    let as_counts = c1.saturating_sub(c0);
    let pod_counts = c2.saturating_sub(c1);
    let total = c2.saturating_sub(c0);
    let summary = format!(
        "build-bases: r_M = {} from {n_as} Jacobian samples, r_F = {} from {n_pod} {}, {} PDE solves",
        bases.r_m(),
        bases.r_f(),
        if dataset_path.is_some() {
            "training outputs"
        } else {
            "fresh samples"
        },
        total.forward_solves + total.linearized_solves,
    );
    let solves = json!({
        "total": counts_json(&total),
        "active_subspace": counts_json(&as_counts),
        "pod": counts_json(&pod_counts),
    });
    Ok((json!({ "seed": cfg.seed }), solves, summary))
}

fn truncate(basis: DMatrix<f64>, spectrum: Vec<f64>, energy: f64) -> (DMatrix<f64>, Vec<f64>) {
    let r = energy_rank(&spectrum, energy);
    (basis.columns(0, r).into_owned(), spectrum[..r].to_vec())
}

fn train_network(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let data_path = ws.input(&format!("{DATASET}.json"))?;
    let bases_path = ws.input(&format!("{BASES}.json"))?;
    let prior = setup::prior(cfg).map_err(&core)?;
    let data = Dataset::load(&data_path).map_err(&core)?;
    let bases = ReducedBases::load(&bases_path).map_err(&core)?;
    let nw = &cfg.network;
    let breadth = nw.breadth.expect("validated");
    if breadth > bases.r_m() {
        return Err(CliError::Config(vec![format!(
            "network.breadth: {breadth} exceeds the {} active-subspace directions in {BASES}.json",
            bases.r_m()
        )]));
    }
    let v = bases.v.columns(0, breadth).into_owned();
    let encoder = whitened_encoder(&v, prior.as_dyn()).map_err(&core)?;
    let net_cfg = DipNetConfig {
        breadth,
        depth: nw.depth.unwrap_or(1),
        layer_rank: nw.layer_rank.expect("validated"),
        activation: nw.activation.unwrap_or_default(),
        adaptive: nw.adaptive.unwrap_or(false),
        max_depth: nw.max_depth,
    };
    let mut net = DipNet::new(net_cfg, &encoder, &bases.phi, cfg.seed).map_err(&core)?;
    let t = &cfg.training;
    let base = TrainConfig::default();
    let tc = TrainConfig {
        epochs: t.epochs.unwrap_or(base.epochs),
        batch_size: t.batch.unwrap_or(base.batch_size),
        learning_rate: t.lr.unwrap_or(base.learning_rate),
        final_learning_rate: t.final_lr,
        patience: t.patience.unwrap_or(base.patience),
        min_improvement: t.min_improvement.unwrap_or(base.min_improvement),
        early_stopping: t.early_stopping.unwrap_or(base.early_stopping),
        seed: cfg.seed,
        ..base
    };
    let report = train(&mut net, &data, &tc).map_err(&core)?;

    let mut summary_json = report.summary();
    let mut accuracy = None;
    if !data.test.is_empty() {
        let inputs = data.subset_inputs(&data.test);
        let truth = data.subset_outputs(&data.test);
        let pred: Vec<Vec<f64>> = inputs
            .iter()
            .map(|m| net.forward(m))
            .collect::<Result<_>>()
            .map_err(&core)?;
        let acc = l2_accuracy_of(&pred, &truth).map_err(&core)?;
        let sq: f64 = pred
            .iter()
            .zip(&truth)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            .sum();
        let rms = (sq / truth.len() as f64).sqrt();
        summary_json["test_l2_accuracy"] = json!(acc);
        summary_json["test_rms_error"] = json!(rms);
        summary_json["n_test"] = json!(truth.len());
        accuracy = Some(acc);
    }
    net.set_training_summary(summary_json);
    let name = cfg.network_name();
    net.save(&ws.path(&format!("{name}.json"))).map_err(&core)?;
    ws.saved_container(&name);
    ws.write_json(&format!("{name}_report.json"), &report)?;
    let mut csv = String::from("epoch,train_loss,validation_loss\n");
    for (e, (a, b)) in report.train_loss.iter().zip(&report.validation_loss).enumerate() {
        let _ = writeln!(csv, "{e},{a:.16e},{b:.16e}");
    }
    ws.write_text(&format!("{name}_loss.csv"), &csv)?;

    let acc_text = accuracy.map_or("no test split".to_string(), |a| format!("test l2 accuracy {a:.2}%"));
    let summary = format!(
        "train: breadth {breadth}, depth {}, {} epochs, best validation loss {:.6e}, {acc_text}",
        report.final_depth, report.epochs_run, report.best_validation_loss
    );
    Ok((json!({ "seed": cfg.seed }), no_solves(), summary))
}

/// The evaluator selected for a DLMC step.
enum Chosen {
    TrueMap(ObservableMap),
    Surrogate(DipNet),
}

impl Chosen {
    fn as_dyn(&self) -> &dyn Evaluator {
        match self {
            Chosen::TrueMap(m) => m,
            Chosen::Surrogate(n) => n,
        }
    }

    fn solve_counts(&self) -> SolveCounts {
        match self {
            Chosen::TrueMap(m) => m.solve_counts(),
            Chosen::Surrogate(_) => SolveCounts::default(),
        }
    }
}

fn load_network(cfg: &RunConfig, ws: &Workspace) -> std::result::Result<DipNet, CliError> {
    let name = cfg.eig.network.clone().unwrap_or_else(|| cfg.network_name());
    let path = ws.input(&format!("{name}.json"))?;
    DipNet::load(&path).map_err(ws.core())
}

/// With the surrogate, outer data are simulated with the surrogate too, so
/// the whole estimate runs without PDE solves.
fn choose(cfg: &RunConfig, ws: &Workspace, choice: EvaluatorChoice) -> std::result::Result<Chosen, CliError> {
    match choice {
        EvaluatorChoice::Surrogate => load_network(cfg, ws).map(Chosen::Surrogate),
        _ => setup::map(cfg).map(Chosen::TrueMap).map_err(ws.core()),
    }
}

fn check_dims(
    ws: &Workspace,
    eval: &dyn Evaluator,
    prior: &dyn GaussianPrior,
    d: usize,
) -> std::result::Result<(), CliError> {
    if eval.input_dim() != prior.dim() || eval.output_dim() != d {
        return Err(ws.core()(dipoed::Error::Shape(format!(
            "evaluator maps {} -> {} but the config describes {} parameters and {d} sensors",
            eval.input_dim(),
            eval.output_dim(),
            prior.dim()
        ))));
    }
    Ok(())
}

fn estimate_eig(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let choice = cfg.eig.evaluator.unwrap_or_default();
    let chosen = choose(cfg, ws, choice)?;
    let prior = setup::prior(cfg).map_err(&core)?;
    let d = cfg.sensor_count().expect("validated");
    let noise = setup::noise(cfg, d).map_err(&core)?;
    let eval = chosen.as_dyn();
    check_dims(ws, eval, prior.as_dyn(), d)?;
    let design = cfg.eig.design.clone().expect("validated");
    let (n_out, n_in) = (cfg.eig.n_out.expect("validated"), cfg.eig.n_in.expect("validated"));
    let mode = cfg.eig.inner_mode.unwrap_or_default();

    let before = chosen.solve_counts();
    let bank = simulate_outer_samples(prior.as_dyn(), eval, &noise, n_out, cfg.seed).map_err(&core)?;
    let est = eig_dlmc(eval, prior.as_dyn(), &noise, &bank, &design, n_in, cfg.seed, mode).map_err(&core)?;
    let used = chosen.solve_counts().saturating_sub(before);

    let mut out = serde_json::to_value(&est).map_err(|e| core(e.into()))?;
    out["evaluator"] = json!(choice.name());
    out["outer_pde_solves"] = json!(n_out as u64 * eval.solves_per_evaluation());
    ws.write_json("eig.json", &out)?;
    ws.write_text("eig_terms.csv", &est.terms_csv())?;
    let summary = format!(
        "estimate-eig: EIG {:.6} ± {:.6} for design {} (n_out {n_out}, n_in {n_in}, {} evaluator, {} PDE solves)",
        est.value,
        est.stderr,
        fmt_indices(&design),
        choice.name(),
        est.pde_solves,
    );
    let mut solves = counts_json(&used);
    solves["inner_pde_solves"] = json!(est.pde_solves);
    Ok((
        json!({ "seed": cfg.seed, "outer_stream_seed": cfg.seed, "inner_stream_seed": cfg.seed }),
        solves,
        summary,
    ))
}

fn closed_form_parts(
    cfg: &RunConfig,
    ws: &Workspace,
) -> std::result::Result<(DMatrix<f64>, DMatrix<f64>, NoiseModel), CliError> {
    let core = ws.core();
    let map = setup::map(cfg).map_err(&core)?;
    let Prior::Dense(prior) = setup::prior(cfg).map_err(&core)? else {
        unreachable!("validated: linear model uses a dense prior")
    };
    let ObservableMap::Linear(lin) = &map else {
        unreachable!("validated: linear model")
    };
    let noise = setup::noise(cfg, lin.d()).map_err(&core)?;
    Ok((lin.matrix().clone(), prior.covariance().clone(), noise))
}

fn greedy(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let r = cfg.greedy.r.expect("validated");
    let d = cfg.sensor_count().expect("validated");
    let choice = cfg.greedy.evaluator.or(cfg.eig.evaluator).unwrap_or_default();
    let (result, solves, kind) = if choice == EvaluatorChoice::ClosedForm {
        let (g, cov, noise) = closed_form_parts(cfg, ws)?;
        let res =
            greedy_select(|s: &[usize]| eig_closed_form_linear_gaussian(&g, &cov, &noise, s), d, r).map_err(&core)?;
        (res, no_solves(), "closed_form_linear_gaussian".to_string())
    } else {
        let chosen = choose(cfg, ws, choice)?;
        let prior = setup::prior(cfg).map_err(&core)?;
        let noise = setup::noise(cfg, d).map_err(&core)?;
        let eval = chosen.as_dyn();
        check_dims(ws, eval, prior.as_dyn(), d)?;
        let (n_out, n_in) = (cfg.eig.n_out.expect("validated"), cfg.eig.n_in.expect("validated"));
        let mode = cfg.eig.inner_mode.unwrap_or_default();
        let before = chosen.solve_counts();
        // one frozen bank of outer and inner samples serves every candidate
        let bank = simulate_outer_samples(prior.as_dyn(), eval, &noise, n_out, cfg.seed).map_err(&core)?;
        let inner = InnerOutputs::build(eval, prior.as_dyn(), mode, n_out, n_in, cfg.seed).map_err(&core)?;
        let res = greedy_select(
            |s: &[usize]| eig_with_inner(&bank, &inner, &noise, s).map(|e| e.value),
            d,
            r,
        )
        .map_err(&core)?;
        let used = chosen.solve_counts().saturating_sub(before);
        (res, counts_json(&used), format!("dlmc_{}", choice.name()))
    };
    let out = json!({
        "d": d,
        "r": r,
        "indices": result.design.indices,
        "per_step_eig": result.per_step_eig,
        "eig_eval_kind": kind,
        "seed": cfg.seed,
    });
    ws.write_json("greedy.json", &out)?;
    let mut csv = String::from("step,sensor,eig\n");
    for (t, (s, v)) in result.design.indices.iter().zip(&result.per_step_eig).enumerate() {
        let _ = writeln!(csv, "{},{s},{v:.16e}", t + 1);
    }
    ws.write_text("greedy_trace.csv", &csv)?;
    let summary = format!(
        "greedy: sensors {} of {d}, EIG {:.6} ({kind})",
        fmt_indices(&result.design.indices),
        result.per_step_eig.last().copied().unwrap_or(0.0),
    );
    Ok((json!({ "seed": cfg.seed }), solves, summary))
}

fn verify(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let v = &cfg.verify;
    // resolve every input before computing anything
    let mut networks = Vec::new();
    for s in &v.surrogates {
        if let Some(name) = &s.network {
            networks.push(Some(ws.input(&format!("{name}.json"))?));
        } else {
            networks.push(None);
        }
    }
    let prior = setup::prior(cfg).map_err(&core)?;
    let map = setup::map(cfg).map_err(&core)?;
    let d = map.d();
    let noise = setup::noise(cfg, d).map_err(&core)?;
    let designs: Vec<Vec<usize>> = match (&v.designs, &v.random_designs) {
        (Some(list), _) => list.clone(),
        (None, Some(rd)) => (0..rd.count)
            .map(|k| random_design(&mut stream_rng(cfg.seed, Stream::Designs, k as u64), d, rd.r).map(|x| x.indices))
            .collect::<Result<_>>()
            .map_err(&core)?,
        (None, None) => unreachable!("validated"),
    };
    let mut rng = stream_rng(cfg.seed, Stream::Perturbation, 0);
    let direction: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();

    let mut perturbed = Vec::new();
    let mut nets = Vec::new();
    for (s, path) in v.surrogates.iter().zip(&networks) {
        match (s.epsilon, path) {
            (Some(eps), _) => perturbed.push(PerturbedMap::new(&map, &direction, eps).map_err(&core)?),
            (None, Some(path)) => {
                let net = DipNet::load(path).map_err(&core)?;
                check_dims(ws, &net, prior.as_dyn(), d)?;
                nets.push(net);
            }
            _ => unreachable!("validated"),
        }
    }
    let (mut pi, mut ni) = (perturbed.iter(), nets.iter());
    let entries: Vec<SweepEntry> = v
        .surrogates
        .iter()
        .enumerate()
        .map(|(i, s)| match s.epsilon {
            Some(_) => SweepEntry {
                id: s.id.clone().unwrap_or_else(|| format!("eps{i}")),
                breadth: None,
                l2_accuracy: None,
                evaluator: pi.next().expect("one map per epsilon entry"),
            },
            None => {
                let net = ni.next().expect("one network per network entry");
                SweepEntry {
                    id: s.id.clone().unwrap_or_else(|| s.network.clone().unwrap_or_default()),
                    breadth: Some(net.r()),
                    l2_accuracy: net
                        .training_summary()
                        .and_then(|t| t.get("test_l2_accuracy"))
                        .and_then(Value::as_f64),
                    evaluator: net,
                }
            }
        })
        .collect();
    let settings = SweepSettings {
        n_out: v.n_out.or(cfg.eig.n_out).expect("validated"),
        n_in: v.n_in.or(cfg.eig.n_in).expect("validated"),
        inner_mode: v.inner_mode.or(cfg.eig.inner_mode).unwrap_or(InnerMode::SharedBank),
        outer_seed: cfg.seed,
        inner_seed: cfg.seed,
    };
    let before = map.solve_counts();
    let report = bound_sweep(&entries, &map, prior.as_dyn(), &noise, &designs, settings).map_err(&core)?;
    let used = map.solve_counts().saturating_sub(before);
    ws.write_json("verify.json", &report)?;
    ws.write_text("verify.csv", &report.to_csv())?;
    let summary = format!(
        "verify: {} surrogates over {} designs, slope {:.4}{}, C_i {:.4e}, C {:.4e}",
        report.records.len(),
        designs.len(),
        report.slope,
        if report.spans_decade {
            ""
        } else {
            " (epsilon spans less than a decade)"
        },
        report.c_i_hat,
        report.c_hat,
    );
    Ok((json!({ "seed": cfg.seed }), counts_json(&used), summary))
}

fn oracle(cfg: &RunConfig, ws: &mut Workspace) -> StepResult {
    let core = ws.core();
    let (g, cov, noise) = closed_form_parts(cfg, ws)?;
    let d = g.nrows();
    let eval = |s: &[usize]| eig_closed_form_linear_gaussian(&g, &cov, &noise, s);
    let mut out = json!({ "d": d, "n": g.ncols(), "seed": cfg.seed });
    let mut parts = Vec::new();
    if let Some(design) = &cfg.eig.design {
        let value = eval(design).map_err(&core)?;
        out["design"] = json!({ "indices": design, "eig": value });
        parts.push(format!("EIG {value:.6} for design {}", fmt_indices(design)));
    }
    if let Some(r) = cfg.greedy.r {
        let (best, value) = exhaustive_select(eval, d, r).map_err(&core)?;
        let gr = greedy_select(eval, d, r).map_err(&core)?;
        out["exhaustive"] = json!({ "r": r, "indices": best.indices, "eig": value });
        out["greedy"] = json!({ "r": r, "indices": gr.design.indices, "per_step_eig": gr.per_step_eig });
        parts.push(format!(
            "optimal {r}-sensor design {} with EIG {value:.6}",
            fmt_indices(&best.indices)
        ));
    }
    ws.write_json("oracle.json", &out)?;
    Ok((
        json!({ "seed": cfg.seed }),
        no_solves(),
        format!("oracle: {}", parts.join("; ")),
    ))
}
