use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use planted_qubo::bench::{
    self, pool_records, run_sweep, sa_params, sa_solver_id, score_samples, summarize, BenchError, BenchRecord,
    SolverSpec, POOLED_SA_ID,
};
use planted_qubo::exact::{branch_and_bound, brute_force};
use planted_qubo::graph::{chimera_graph, load_edge_list};
use planted_qubo::planting::{
    build_planted_instance, verify_brute_force, verify_flip_scan, GeneratorConfig, PlantedInstance, VerifyMode,
};
use planted_qubo::qubo::to_coo;
use planted_qubo::sa::{self, SaConfig, SampleSet};
use planted_qubo::seed::{derive_seed, LABEL_INSTANCE};
use planted_qubo::{CoefficientSet, Graph, Qubo};

use crate::output::{sha256_hex, to_pretty_json, write_atomic, RunManifest};
use crate::{
    BenchArgs, CheckFailed, ExactMethod, ExportArgs, ExportFormat, GenerateArgs, ReportArgs, SolveExactArgs,
    SolveSaArgs, VerifyArgs,
};

/// Parse `chimera:M,N,T` or `file:PATH`; returns the graph and a stable id.
pub fn parse_topology(spec: &str) -> Result<(Graph, String)> {
    if let Some(dims) = spec.strip_prefix("chimera:") {
        let parts: Vec<u32> = dims
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("bad chimera dimensions {dims:?}"))?;
        let [m, n, t] = parts[..] else { bail!("chimera needs three dimensions M,N,T, got {dims:?}") };
        let g = chimera_graph(m, n, t)?;
        Ok((g, format!("chimera:{m},{n},{t}")))
    } else if let Some(path) = spec.strip_prefix("file:") {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let g = load_edge_list(&text).with_context(|| format!("parsing {path}"))?;
        let name = Path::new(path).file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        Ok((g, format!("file:{name}@sha256:{}", &sha256_hex(text.as_bytes())[..16])))
    } else {
        bail!("unknown topology {spec:?}; expected chimera:M,N,T or file:PATH")
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<PlantedInstance> {
    PlantedInstance::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn instance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into())
}

/// Accept either a bare QUBO document or a planted instance.
fn load_qubo(path: &Path) -> Result<Qubo> {
    let text = read(path)?;
    let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if v.get("planted").is_some() {
        Ok(load_instance(path)?.qubo)
    } else {
        Qubo::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Instance files in `dir` (every `*.json` except manifests and run records), by name.
fn instance_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            name.ends_with(".json") && !name.ends_with(".manifest.json") && !name.ends_with(".sa.json")
        })
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    if a.count == 0 {
        bail!("--count must be at least 1");
    }
    if a.alpha.raw() <= 0 {
        bail!("--alpha must be positive");
    }
    if !(a.sub_solver_limit >= 0.0 && a.sub_solver_limit.is_finite()) {
        bail!("--sub-solver-limit must be a nonnegative number of seconds");
    }
    let (graph, topology_id) = parse_topology(&a.topology)?;
    let cfg = GeneratorConfig {
        max_part_size: a.max_part_size,
        cset: CoefficientSet::from_tag(a.cset),
        alpha: a.alpha,
        batch_size: a.batch_size,
        max_clauses: a.max_clauses,
        unit_clauses: !a.no_unit_clauses,
        sub_solver_limit: Duration::from_secs_f64(a.sub_solver_limit),
        brute_force_cap: a.brute_force_cap,
        topology_id: topology_id.clone(),
    };
    let mut manifest = RunManifest::new("generate", &a.out, Some(a.seed));
    manifest
        .param("topology", &topology_id)
        .param("count", a.count)
        .param("cset", a.cset.to_string())
        .param("alpha", a.alpha)
        .param("max_part_size", a.max_part_size)
        .param("batch_size", a.batch_size)
        .param("max_clauses", a.max_clauses)
        .param("sub_solver_limit_s", a.sub_solver_limit)
        .param("unit_clauses", !a.no_unit_clauses)
        .param("brute_force_cap", a.brute_force_cap);

    let width = (a.count - 1).to_string().len().max(4);
    for i in 0..a.count {
        let name = format!("instance-{i:0width$}");
        let seed = derive_seed(a.seed, LABEL_INSTANCE, i);
        match build_planted_instance(&graph, &cfg, seed) {
            Ok(inst) if inst.is_certified() => {
                manifest.emit(&format!("{name}.json"), inst.to_json().as_bytes())?;
                println!(
                    "{name}: {} variables, planted energy {}, {} clauses, certified by {}",
                    inst.qubo.num_variables(),
                    inst.planted_energy,
                    inst.formula_stats.clauses,
                    inst.certification.method
                );
            }
            Ok(inst) => {
                let c = &inst.certification;
                let why = format!(
                    "not certified (parts proved: {}, flip scan: {}, unique: {})",
                    c.parts_proved, c.flip_scan_passed, c.unique_verified
                );
                eprintln!("{name}: {why}");
                manifest.fail(name, why);
            }
            Err(e) => {
                eprintln!("{name}: {e}");
                manifest.fail(name, e);
            }
        }
    }
    let failed = manifest.failures.len();
    let path = manifest.finish()?;
    log::info!("manifest written to {}", path.display());
    if failed > 0 {
        return Err(CheckFailed(format!("{failed} of {} instances failed", a.count)).into());
    }
    Ok(())
}

/// One grid point of a solve-sa run, enough to rebuild its [`SampleSet`].
#[derive(Debug, Serialize, Deserialize)]
pub struct SaRunEntry {
    pub samples_csv: String,
    pub config: SaConfig,
    pub wall_time_per_read: f64,
    pub success_count: u64,
    pub best_energy: planted_qubo::Milli,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SaRunDoc {
    pub instance_id: String,
    pub instance_sha256: String,
    pub planted_energy: planted_qubo::Milli,
    pub runs: Vec<SaRunEntry>,
}

pub fn solve_sa(a: &SolveSaArgs) -> Result<()> {
    if a.sweeps.is_empty() {
        bail!("--sweeps must list at least one value");
    }
    let text = read(&a.instance)?;
    let inst = PlantedInstance::from_json(&text).with_context(|| format!("parsing {}", a.instance.display()))?;
    let id = instance_id(&a.instance);
    let planted = inst.planted_bitstring();
    let mut manifest = RunManifest::new("solve-sa", &a.out, Some(a.seed));
    manifest
        .param("instance", a.instance.display().to_string())
        .param("sweeps", &a.sweeps)
        .param("reads", a.reads)
        .param("beta_min", a.beta_min)
        .param("beta_max", a.beta_max);
    let mut runs = Vec::new();
    let mut undercuts = Vec::new();
    for &s in &a.sweeps {
        let mut cfg = SaConfig::for_qubo(&inst.qubo, s, a.reads, a.seed)?;
        cfg.beta_min = a.beta_min.unwrap_or(cfg.beta_min);
        cfg.beta_max = a.beta_max.unwrap_or(cfg.beta_max);
        let samples = sa::sample(&inst.qubo, &cfg)?;
        let best = samples.lowest().map(|r| r.energy).ok_or_else(|| anyhow!("no samples"))?;
        if inst.is_certified() && best < inst.planted_energy {
            undercuts.push(format!("{s} sweeps: energy {best} below planted {}", inst.planted_energy));
        }
        let success = samples.occurrences_of(&planted);
        let csv_name = format!("{id}.sweeps{s}.csv");
        manifest.emit(&csv_name, samples.to_csv().as_bytes())?;
        println!(
            "{id} sweeps={s}: {success}/{} planted, best {best}, {:.3e} s/read",
            samples.num_samples(),
            samples.wall_time_per_read
        );
        runs.push(SaRunEntry {
            samples_csv: csv_name,
            config: cfg,
            wall_time_per_read: samples.wall_time_per_read,
            success_count: success,
            best_energy: best,
        });
    }
    let doc = SaRunDoc {
        instance_id: id.clone(),
        instance_sha256: sha256_hex(text.as_bytes()),
        planted_energy: inst.planted_energy,
        runs,
    };
    manifest.emit(&format!("{id}.sa.json"), &to_pretty_json(&doc))?;
    manifest.finish()?;
    if !undercuts.is_empty() {
        return Err(CheckFailed(format!(
            "below the planted optimum of a certified instance: {}",
            undercuts.join("; ")
        ))
        .into());
    }
    Ok(())
}

fn emit_or_print(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

pub fn solve_exact(a: &SolveExactArgs) -> Result<()> {
    let q = load_qubo(&a.input)?;
    let r = match a.method {
        ExactMethod::Bnb => {
            if !(a.time_limit >= 0.0 && a.time_limit.is_finite()) {
                bail!("--time-limit must be a nonnegative number of seconds");
            }
            branch_and_bound(&q, Duration::from_secs_f64(a.time_limit))
        }
        ExactMethod::BruteForce => brute_force(&q, a.all)?,
    };
    if !r.proved {
        log::warn!("search stopped at the time limit; the reported energy is an upper bound");
    }
    emit_or_print(a.out.as_deref(), &to_pretty_json(&r.report(&q)))
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let rep = match a.mode {
        VerifyMode::FlipScan => verify_flip_scan(&inst)?,
        VerifyMode::BruteForce => verify_brute_force(&inst)?,
    };
    emit_or_print(a.out.as_deref(), &to_pretty_json(&rep))?;
    match &rep.violation {
        None => Ok(()),
        Some(v) => Err(CheckFailed(format!(
            "{} failed: {}; witness {} at energy {}",
            rep.mode, v.reason, v.bitstring, v.energy
        ))
        .into()),
    }
}

fn benchmark_failure(e: BenchError) -> anyhow::Error {
    match e {
        BenchError::Undercut { .. } | BenchError::EnergyMismatch { .. } => CheckFailed(e.to_string()).into(),
        other => other.into(),
    }
}

fn write_reports(manifest: &mut RunManifest, records: &[BenchRecord]) -> Result<()> {
    let mut csv = Vec::new();
    bench::write_results_csv(records, &mut csv)?;
    manifest.emit("results.csv", &csv)?;
    let summary = summarize(records);
    for c in &summary.configs {
        println!("{:<16} {}", c.solver_id, c.cell);
    }
    manifest.emit("summary.json", &to_pretty_json(&summary))?;
    Ok(())
}

pub fn bench(a: &BenchArgs) -> Result<()> {
    let paths = instance_paths(&a.instances)?;
    if paths.is_empty() {
        bail!("no instance files in {}", a.instances.display());
    }
    let instances: Vec<(String, PlantedInstance)> =
        paths.iter().map(|p| Ok((instance_id(p), load_instance(p)?))).collect::<Result<_>>()?;
    let mut grid: Vec<SolverSpec> = a.sweeps.iter().map(|&s| SolverSpec::sa(s, a.reads, a.seed)).collect();
    if let Some(t) = a.exact_time_limit {
        grid.push(SolverSpec::BranchAndBound { time_limit_s: t });
    }
    let mut manifest = RunManifest::new("bench", &a.out, Some(a.seed));
    manifest
        .param("instances", a.instances.display().to_string())
        .param("sweeps", &a.sweeps)
        .param("reads", a.reads)
        .param("exact_time_limit_s", a.exact_time_limit);
    let records = run_sweep(&instances, &grid).map_err(benchmark_failure)?;
    write_reports(&mut manifest, &records)?;
    manifest.finish()?;
    Ok(())
}

pub fn report(a: &ReportArgs) -> Result<()> {
    let mut runs: Vec<PathBuf> = fs::read_dir(&a.results)
        .with_context(|| format!("listing {}", a.results.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".sa.json"))
        .collect();
    runs.sort();
    if runs.is_empty() {
        bail!("no solve-sa run records (*.sa.json) in {}", a.results.display());
    }
    let out = a.out.clone().unwrap_or_else(|| a.results.clone());
    let mut manifest = RunManifest::new("report", &out, None);
    manifest.param("instances", a.instances.display().to_string()).param("results", a.results.display().to_string());
    let mut records = Vec::new();
    for run_path in runs {
        let doc: SaRunDoc =
            serde_json::from_str(&read(&run_path)?).with_context(|| format!("parsing {}", run_path.display()))?;
        let inst_path = a.instances.join(format!("{}.json", doc.instance_id));
        if !inst_path.exists() {
            bail!("planted reference {} for {} is missing", inst_path.display(), run_path.display());
        }
        let inst = load_instance(&inst_path)?;
        let mut per_instance = Vec::new();
        for run in &doc.runs {
            let csv_path = a.results.join(&run.samples_csv);
            let file = fs::File::open(&csv_path).with_context(|| format!("opening {}", csv_path.display()))?;
            let samples = SampleSet {
                variables: inst.qubo.variables().to_vec(),
                records: SampleSet::read_csv_records(file)
                    .with_context(|| format!("parsing {}", csv_path.display()))?,
                config: run.config.clone(),
                wall_time_per_read: run.wall_time_per_read,
            };
            let rec = score_samples(
                &doc.instance_id,
                &inst,
                &sa_solver_id(run.config.num_sweeps),
                sa_params(&run.config),
                &samples,
            )
            .map_err(benchmark_failure)?;
            per_instance.push(rec);
        }
        let pooled = pool_records(&per_instance, POOLED_SA_ID, inst.planted_energy);
        records.extend(per_instance);
        records.extend(pooled);
    }
    write_reports(&mut manifest, &records)?;
    manifest.finish()?;
    Ok(())
}

pub fn export(a: &ExportArgs) -> Result<()> {
    let q = load_qubo(&a.input)?;
    let text = match a.format {
        ExportFormat::Coo => to_coo(&q),
        ExportFormat::Json => q.to_json(),
    };
    emit_or_print(a.out.as_deref(), text.as_bytes())
}
