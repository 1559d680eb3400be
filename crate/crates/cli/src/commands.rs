use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use anyhow::{anyhow, Context};
use deconflict::conflict::{detect_all, ConflictSet, SeparationParams};
use deconflict::graph::{build_conflict_graph, extract_instances, graph_stats, Instance};
use deconflict::qubo::{
    build_departure_qubo, build_exclusive_qubo, build_flexible_qubo, build_global_qubo, build_interstitial_qubo,
    export_qubo, export_variables, sufficient_penalties, sufficient_penalties_with, to_ising, DecodedSolution, Discretization,
    FlightConflictTable, GlobalModel, PenaltyWeights, QuboModel,
};
use deconflict::solve::{
    brute_force_qubo, discretization_sweep, penalty_validity_sweep, simulated_annealing, solve as run_solver,
    success_probability, time_to_solution_99, AnnealSchedule, SolveError, Solver, SweepSolver,
};
use deconflict::trajectory::{generate_synthetic, load_trajectories, SyntheticConfig};
use deconflict::FlightSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{BuildArgs, Common, DetectArgs, ModelArgs, ModelKind, SolveArgs, SolverKind, StatsArgs};
use crate::output::{csv_text, opt, write_atomic, write_json};
use crate::seed::sub_seed;
use crate::{Failure, InputContext, InternalContext, Outcome};

fn load_flights(common: &Common) -> Result<FlightSet, Failure> {
    if let Some(path) = &common.source.input {
        let file = File::open(path)
            .with_context(|| format!("opening {}", path.display()))
            .input()?;
        load_trajectories(BufReader::new(file))
            .with_context(|| format!("reading {}", path.display()))
            .input()
    } else {
        let path = common.source.synthetic.as_ref().expect("clap enforces one source");
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("opening {}", path.display()))
            .input()?;
        let mut config: SyntheticConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .input()?;
        if let Some(root) = common.seed {
            config.seed = sub_seed(root, "synthetic");
        }
        generate_synthetic(&config).input()
    }
}

fn separation(common: &Common) -> Result<SeparationParams, Failure> {
    SeparationParams::new(common.horizontal_nm, common.temporal_min, common.vertical_ft).input()
}

fn check_dmax(d_max: i64) -> Outcome {
    if d_max < 0 {
        return Err(Failure::Input(anyhow!("maximum delay must be non-negative, got {d_max}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct DetectSummary {
    flights: usize,
    conflicts: usize,
    potential_pairs: usize,
    d_max: i64,
}

pub fn detect(a: &DetectArgs) -> Outcome {
    check_dmax(a.dmax)?;
    let params = separation(&a.common)?;
    let flights = load_flights(&a.common)?;
    let conflicts = detect_all(&flights, &params, a.dmax);
    let summary = DetectSummary {
        flights: flights.len(),
        conflicts: conflicts.len(),
        potential_pairs: conflicts.total_pairs(),
        d_max: a.dmax,
    };
    let out = &a.common.out;
    let mut text = conflicts.to_json().internal()?.into_bytes();
    text.push(b'\n');
    write_atomic(&out.join("conflicts.json"), &text).internal()?;
    write_json(&out.join("summary.json"), &summary).internal()?;
    println!(
        "flights={} conflicts={} potential_pairs={}",
        summary.flights, summary.conflicts, summary.potential_pairs
    );
    Ok(())
}

#[derive(Serialize)]
struct StatsRecord {
    d_max: i64,
    flights: usize,
    conflicts: usize,
    components: usize,
    nontrivial_instances: usize,
    alpha: Option<f64>,
    alpha_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_note: Option<String>,
    treewidth_slope: Option<f64>,
    treewidth_slope_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    treewidth_note: Option<String>,
}

pub fn stats(a: &StatsArgs) -> Outcome {
    if a.dmax.is_empty() {
        return Err(Failure::Input(anyhow!("no maximum delay given")));
    }
    for &d in &a.dmax {
        check_dmax(d)?;
    }
    let params = separation(&a.common)?;
    let flights = load_flights(&a.common)?;

    let mut records = Vec::new();
    let (mut components_rows, mut size_rows, mut degree_rows, mut tw_rows) = (vec![], vec![], vec![], vec![]);
    for &d_max in &a.dmax {
        let conflicts = detect_all(&flights, &params, d_max);
        let graph = build_conflict_graph(&flights, &conflicts, d_max).internal()?;
        let nontrivial = extract_instances(&graph, &conflicts, false);
        let st = graph_stats(graph.graph(), a.min_size);

        components_rows.push(vec![
            d_max.to_string(),
            st.components.len().to_string(),
            nontrivial.len().to_string(),
        ]);
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for inst in &nontrivial {
            *sizes.entry(inst.num_flights()).or_default() += 1;
        }
        size_rows.extend(sizes.iter().map(|(s, c)| vec![d_max.to_string(), s.to_string(), c.to_string()]));
        degree_rows.extend(
            st.degrees
                .histogram
                .iter()
                .map(|(d, c)| vec![d_max.to_string(), d.to_string(), c.to_string()]),
        );
        tw_rows.extend(
            st.components
                .iter()
                .filter(|(size, _)| *size >= 2)
                .map(|(s, tw)| vec![d_max.to_string(), s.to_string(), tw.to_string()]),
        );

        let (alpha, alpha_stderr, alpha_note) = match &st.degrees.fit {
            Ok(f) => (Some(f.alpha), f.alpha_stderr, None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        let (slope, slope_stderr, tw_note) = match &st.treewidth_slope {
            Ok(f) => (Some(f.slope), f.slope_stderr, None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        records.push(StatsRecord {
            d_max,
            flights: flights.len(),
            conflicts: conflicts.len(),
            components: st.components.len(),
            nontrivial_instances: nontrivial.len(),
            alpha,
            alpha_stderr,
            alpha_note,
            treewidth_slope: slope,
            treewidth_slope_stderr: slope_stderr,
            treewidth_note: tw_note,
        });
        println!(
            "d_max={d_max} components={} nontrivial={} alpha={}",
            st.components.len(),
            nontrivial.len(),
            alpha.map_or("undefined".to_string(), |x| format!("{x:.4}"))
        );
    }

    let out = &a.common.out;
    write_atomic(
        &out.join("components.csv"),
        &csv_text(&["d_max", "components", "nontrivial_instances"], components_rows),
    )
    .internal()?;
    write_atomic(&out.join("sizes.csv"), &csv_text(&["d_max", "size", "count"], size_rows)).internal()?;
    write_atomic(&out.join("degrees.csv"), &csv_text(&["d_max", "degree", "count"], degree_rows)).internal()?;
    write_atomic(&out.join("treewidth.csv"), &csv_text(&["d_max", "size", "treewidth"], tw_rows)).internal()?;
    write_json(&out.join("stats.json"), &records).internal()?;
    Ok(())
}

/// Everything needed to compile the instances of one run.
struct Prepared {
    instances: Vec<Instance>,
    disc: Discretization,
    /// `None` derives sufficient weights per instance.
    weights: Option<PenaltyWeights<f64>>,
    global: Option<GlobalModel>,
}

fn parse_weights(text: &str) -> Result<Option<PenaltyWeights<f64>>, Failure> {
    if text.trim() == "auto" {
        return Ok(None);
    }
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("weights must be `auto` or three numbers, got {text:?}"))
        .input()?;
    match values.as_slice() {
        &[e, c, s] => PenaltyWeights::new(e, c, s).map(Some).input(),
        _ => Err(Failure::Input(anyhow!("weights must be `auto` or three numbers, got {text:?}"))),
    }
}

fn prepare(common: &Common, m: &ModelArgs) -> Result<Prepared, Failure> {
    check_dmax(m.dmax)?;
    let disc = Discretization::from_max(m.delta_d, m.dmax).input()?;
    let weights = parse_weights(&m.weights)?;
    match m.model {
        ModelKind::Exclusive | ModelKind::Flexible if m.maneuver_delay.is_none() => {
            return Err(Failure::Input(anyhow!("--maneuver-delay is required for this model")));
        }
        ModelKind::Interstitial if m.bound.is_none() => {
            return Err(Failure::Input(anyhow!("--bound is required for the interstitial model")));
        }
        _ => {}
    }
    if m.global_model.is_some() && m.model != ModelKind::Global {
        return Err(Failure::Input(anyhow!("--global-model only applies to the global model")));
    }
    let params = separation(common)?;
    let flights = load_flights(common)?;
    let conflicts: ConflictSet = detect_all(&flights, &params, m.dmax);
    let graph = build_conflict_graph(&flights, &conflicts, m.dmax).internal()?;
    let instances = extract_instances(&graph, &conflicts, m.include_trivial);
    log::info!(
        "{} flights, {} conflicts, {} instances",
        flights.len(),
        conflicts.len(),
        instances.len()
    );
    let global = match &m.global_model {
        None => None,
        Some(path) => {
            if instances.len() != 1 {
                return Err(Failure::Input(anyhow!(
                    "--global-model needs exactly one instance, found {}",
                    instances.len()
                )));
            }
            let file = File::open(path)
                .with_context(|| format!("opening {}", path.display()))
                .input()?;
            let model: GlobalModel = serde_json::from_reader(BufReader::new(file))
                .with_context(|| format!("parsing {}", path.display()))
                .input()?;
            Some(model)
        }
    };
    Ok(Prepared {
        instances,
        disc,
        weights,
        global,
    })
}

/// Compiles one instance; also returns the penalty weights it used.
fn compile(
    p: &Prepared,
    m: &ModelArgs,
    instance: &Instance,
) -> Result<(QuboModel<f64>, PenaltyWeights<f64>), Failure> {
    let disc = &p.disc;
    let pick = |auto: PenaltyWeights<f64>| p.weights.unwrap_or(auto);
    let built = match m.model {
        ModelKind::Departure => {
            let w = pick(sufficient_penalties(instance, disc));
            build_departure_qubo(instance, disc, &w).map(|q| (q, w))
        }
        ModelKind::Global => {
            let model = p.global.clone().unwrap_or_else(|| GlobalModel::from_instance(instance, disc));
            let w = pick(model.sufficient_penalties());
            build_global_qubo(instance, &model, &w).map(|q| (q, w))
        }
        ModelKind::Exclusive => {
            let table = FlightConflictTable::uniform(instance, m.maneuver_delay.unwrap_or_default());
            let w = pick(sufficient_penalties_with(instance, disc, &table));
            build_exclusive_qubo(instance, &table, disc, &w).map(|q| (q, w))
        }
        ModelKind::Flexible => {
            let table = FlightConflictTable::uniform(instance, m.maneuver_delay.unwrap_or_default());
            let w = pick(sufficient_penalties_with(instance, disc, &table));
            build_flexible_qubo(instance, &table, disc, &w, m.allow_both).map(|q| (q, w))
        }
        ModelKind::Interstitial => {
            let table = FlightConflictTable::uniform(instance, m.bound.unwrap_or_default());
            let w = pick(sufficient_penalties_with(instance, disc, &table));
            build_interstitial_qubo(instance, &table, disc, &w).map(|q| (q, w))
        }
    };
    built
        .with_context(|| format!("compiling instance starting at flight {}", first_flight(instance)))
        .input()
}

fn first_flight(instance: &Instance) -> &str {
    instance.flights().first().map_or("<none>", String::as_str)
}

fn model_name(m: ModelKind) -> &'static str {
    match m {
        ModelKind::Departure => "departure",
        ModelKind::Global => "global",
        ModelKind::Exclusive => "exclusive",
        ModelKind::Flexible => "flexible",
        ModelKind::Interstitial => "interstitial",
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    index: usize,
    flights: Vec<String>,
    conflicts: usize,
    variables: usize,
    weights: PenaltyWeights<f64>,
    linear_terms: usize,
    quadratic_terms: usize,
    /// Maximum coefficient ratio of the Ising form; absent when all coefficients vanish.
    c_max: Option<f64>,
    qubo: String,
    variables_file: String,
    instance_file: String,
}

#[derive(Serialize)]
struct Manifest {
    model: &'static str,
    d_max: i64,
    delta_d: i64,
    /// `null` when weights were derived per instance.
    weights: Option<PenaltyWeights<f64>>,
    instances: Vec<ManifestEntry>,
}

pub fn build(a: &BuildArgs) -> Outcome {
    let p = prepare(&a.common, &a.model)?;
    let compiled: Vec<(QuboModel<f64>, PenaltyWeights<f64>)> = p
        .instances
        .par_iter()
        .map(|inst| compile(&p, &a.model, inst))
        .collect::<Result<_, _>>()?;

    let dir = a.common.out.join("instances");
    let mut entries = Vec::with_capacity(compiled.len());
    for (index, (inst, (model, weights))) in p.instances.iter().zip(&compiled).enumerate() {
        let stem = format!("instance_{index:04}");
        let (qubo, vars, json) = (format!("{stem}.qubo"), format!("{stem}.vars.json"), format!("{stem}.json"));
        let mut text = Vec::new();
        export_qubo(&model.form, &mut text).internal()?;
        write_atomic(&dir.join(&qubo), &text).internal()?;
        let mut text = Vec::new();
        export_variables(&model.form, &mut text).internal()?;
        text.push(b'\n');
        write_atomic(&dir.join(&vars), &text).internal()?;
        write_json(&dir.join(&json), inst).internal()?;
        entries.push(ManifestEntry {
            index,
            flights: inst.flights().to_vec(),
            conflicts: inst.num_conflicts(),
            variables: model.num_variables(),
            weights: *weights,
            linear_terms: model.form.num_linear(),
            quadratic_terms: model.form.num_quadratic(),
            c_max: to_ising(&model.form).max_coefficient_ratio().ok(),
            qubo: format!("instances/{qubo}"),
            variables_file: format!("instances/{vars}"),
            instance_file: format!("instances/{json}"),
        });
    }
    let manifest = Manifest {
        model: model_name(a.model.model),
        d_max: a.model.dmax,
        delta_d: a.model.delta_d,
        weights: p.weights,
        instances: entries,
    };
    write_json(&a.common.out.join("manifest.json"), &manifest).internal()?;
    println!("instances={}", manifest.instances.len());
    Ok(())
}

#[derive(Serialize)]
struct Maneuver {
    conflict: usize,
    flight: String,
}

#[derive(Serialize, Default)]
struct InstanceResult {
    index: usize,
    flights: Vec<String>,
    conflicts: usize,
    variables: usize,
    weights: Option<PenaltyWeights<f64>>,
    status: String,
    energy: Option<f64>,
    feasible: Option<bool>,
    total_delay: Option<i64>,
    delays: BTreeMap<String, Option<i64>>,
    maneuvers: Vec<Maneuver>,
    encoding_ok: Option<bool>,
    consistency_ok: Option<bool>,
    /// Conflict ids (forbidden-combination indices for the global model) left unresolved.
    violated: Vec<usize>,
}

#[derive(Serialize)]
struct Results {
    model: &'static str,
    solver: &'static str,
    d_max: i64,
    delta_d: i64,
    /// `null` when weights were derived per instance.
    weights: Option<PenaltyWeights<f64>>,
    instances: Vec<InstanceResult>,
}

fn fill_decoded(r: &mut InstanceResult, inst: &Instance, d: &DecodedSolution, global: bool) {
    r.feasible = Some(d.feasible());
    r.total_delay = d.total_delay;
    r.encoding_ok = Some(d.encoding_ok);
    r.consistency_ok = Some(d.consistency_ok);
    r.delays = inst.flights().iter().cloned().zip(d.delays.iter().copied()).collect();
    r.maneuvers = d
        .maneuvers
        .iter()
        .map(|&(k, f)| Maneuver {
            conflict: inst.conflicts()[k].id(),
            flight: inst.flights()[f].clone(),
        })
        .collect();
    r.violated = if global {
        d.violated_conflicts.clone()
    } else {
        d.violated_conflicts.iter().map(|&k| inst.conflicts()[k].id()).collect()
    };
}

fn is_guard(e: &SolveError) -> bool {
    matches!(e, SolveError::TooManyVariables { .. } | SolveError::TooManyAssignments { .. })
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let p = prepare(&a.common, &a.model)?;
    let root = a.common.seed.unwrap_or(0);
    let schedule = |name: String| AnnealSchedule {
        sweeps: a.sweeps,
        restarts: a.restarts,
        seed: sub_seed(root, &name),
        ..Default::default()
    };
    if a.solver == SolverKind::Sa || a.tts_trials > 0 {
        schedule(String::new())
            .validate()
            .context("annealing schedule")
            .input()?;
    }
    if a.sweep_delta_d.is_empty() != a.sweep_dmax.is_empty() {
        return Err(Failure::Input(anyhow!("--sweep-delta-d and --sweep-dmax must be given together")));
    }
    for w in &a.validity_grid {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Failure::Input(anyhow!("validity weights must be finite and non-negative")));
        }
    }
    let global = a.model.model == ModelKind::Global;

    let compiled: Vec<(QuboModel<f64>, PenaltyWeights<f64>)> = p
        .instances
        .par_iter()
        .map(|inst| compile(&p, &a.model, inst))
        .collect::<Result<_, _>>()?;

    let outcomes: Vec<(InstanceResult, Vec<String>)> = p
        .instances
        .par_iter()
        .zip(&compiled)
        .enumerate()
        .map(|(index, (inst, (model, weights)))| {
            let mut r = InstanceResult {
                index,
                flights: inst.flights().to_vec(),
                conflicts: inst.num_conflicts(),
                variables: model.num_variables(),
                weights: Some(*weights),
                ..Default::default()
            };
            let solver = match a.solver {
                SolverKind::Exact => Solver::BruteForce,
                SolverKind::Sa => Solver::Anneal(schedule(format!("anneal/{index}"))),
            };
            let mut problems = Vec::new();
            match run_solver(model, &solver) {
                Ok(res) => {
                    r.status = "ok".into();
                    r.energy = Some(res.energy);
                    fill_decoded(&mut r, inst, res.decoded.as_ref().expect("decoded"), global);
                }
                Err(e) => {
                    r.status = format!("skipped: {e}");
                    problems.push(format!("instance {index}: {e}"));
                }
            }
            (r, problems)
        })
        .collect();

    let mut problems = Vec::new();
    let mut instances = Vec::with_capacity(outcomes.len());
    for (r, pr) in outcomes {
        instances.push(r);
        problems.extend(pr);
    }

    let out = &a.common.out;
    if !a.sweep_delta_d.is_empty() {
        let mut rows = Vec::new();
        for (index, inst) in p.instances.iter().enumerate() {
            match discretization_sweep(inst, &a.sweep_delta_d, &a.sweep_dmax, &SweepSolver::Enumeration) {
                Ok(t) => rows.extend(t.rows.iter().map(|row| {
                    vec![
                        index.to_string(),
                        row.delta_d.to_string(),
                        row.d_max.to_string(),
                        opt(row.min_total_delay),
                        row.feasible.to_string(),
                    ]
                })),
                Err(e) if is_guard(&e) => problems.push(format!("sweep of instance {index}: {e}")),
                Err(e) => return Err(Failure::Input(e.into())),
            }
        }
        let header = ["instance", "delta_d", "d_max", "min_total_delay", "feasible"];
        write_atomic(&out.join("sweep.csv"), &csv_text(&header, rows)).internal()?;
    }

    if !a.validity_grid.is_empty() {
        let mut rows = Vec::new();
        for (index, inst) in p.instances.iter().enumerate() {
            match penalty_validity_sweep(inst, &p.disc, &a.validity_grid, &a.validity_grid) {
                Ok(map) => rows.extend(map.cells.iter().map(|c| {
                    vec![
                        index.to_string(),
                        c.lambda_conflict.to_string(),
                        c.lambda_encoding.to_string(),
                        c.valid.to_string(),
                        c.min_energy.to_string(),
                    ]
                })),
                Err(e) if is_guard(&e) => problems.push(format!("validity map of instance {index}: {e}")),
                Err(e) => return Err(Failure::Input(e.into())),
            }
        }
        let header = ["instance", "lambda_conflict", "lambda_encoding", "valid", "min_energy"];
        write_atomic(&out.join("validity.csv"), &csv_text(&header, rows)).internal()?;
    }

    if a.tts_trials > 0 {
        let mut rows = Vec::new();
        for (index, (model, _)) in compiled.iter().enumerate() {
            let exact = match brute_force_qubo(&model.form) {
                Ok(r) => r.energy,
                Err(e) => {
                    problems.push(format!("success probability of instance {index}: {e}"));
                    continue;
                }
            };
            let runs = (0..a.tts_trials)
                .map(|t| simulated_annealing(&model.form, &schedule(format!("tts/{index}/{t}"))))
                .collect::<Result<Vec<_>, _>>()
                .internal()?;
            let p99 = success_probability(&runs, exact);
            rows.push(vec![
                index.to_string(),
                model.num_variables().to_string(),
                exact.to_string(),
                a.tts_trials.to_string(),
                p99.to_string(),
                time_to_solution_99(p99, 1.0).to_string(),
            ]);
        }
        let header = ["instance", "variables", "exact_energy", "trials", "success_probability", "t99_runs"];
        write_atomic(&out.join("tts.csv"), &csv_text(&header, rows)).internal()?;
    }

    let csv_rows = instances.iter().map(|r| {
        vec![
            r.index.to_string(),
            r.flights.len().to_string(),
            r.conflicts.to_string(),
            r.variables.to_string(),
            opt(r.energy),
            opt(r.feasible),
            opt(r.total_delay),
            r.status.clone(),
        ]
    });
    let header = ["instance", "flights", "conflicts", "variables", "energy", "feasible", "total_delay", "status"];
    write_atomic(&out.join("results.csv"), &csv_text(&header, csv_rows)).internal()?;

    let results = Results {
        model: model_name(a.model.model),
        solver: match a.solver {
            SolverKind::Exact => "exact",
            SolverKind::Sa => "sa",
        },
        d_max: a.model.dmax,
        delta_d: a.model.delta_d,
        weights: p.weights,
        instances,
    };
    let solved = results.instances.iter().filter(|r| r.status == "ok").count();
    let total_delay: i64 = results.instances.iter().filter_map(|r| r.total_delay).sum();
    write_json(&out.join("results.json"), &results).internal()?;
    println!(
        "instances={} solved={solved} total_delay={total_delay}",
        results.instances.len()
    );

    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Partial(problems.join("; ")))
    }
}
