use std::path::{Path, PathBuf};

use hsicinf::harness::{run_grid_persisted, CurvePoint, ExperimentGrid};
use hsicinf::ScenarioKind;
use hsicinf::{median_heuristic, run, InferenceReport, KernelSpec, Method, PipelineConfig, Response, Scenario};

use crate::args::{CommonArgs, GenArgs, InferArgs, SimulateArgs};
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::ingest::{ingest_csv, write_dataset, RoleSpec};
use crate::report::{format_table, write_csv, write_json, REPORT_CSV, REPORT_JSON, REPORT_TABLE};

pub const FIG_FPR: &str = "fig_fpr_comparison.csv";
pub const FIG_TPR: &str = "fig_tpr_panels.csv";
pub const FIG_BLOCK_SWEEP: &str = "fig_block_sweep.csv";

/// Settings shared by every subcommand after merging flags and file.
#[derive(Debug, Clone, PartialEq)]
pub struct Common {
    pub seed: u64,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

fn resolve_common(args: &CommonArgs, file: &FileConfig) -> CliResult<Common> {
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(Common {
        seed: args.seed.or(file.seed).unwrap_or(0),
        threads,
        out_dir: args.out_dir.clone().or_else(|| file.out_dir.clone()).unwrap_or_else(|| PathBuf::from(".")),
    })
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn parse_method(name: &str) -> CliResult<Method> {
    name.parse().map_err(|_| CliError::Usage(format!("unknown method '{name}'")))
}

fn parse_scenario(name: &str) -> CliResult<ScenarioKind> {
    name.parse().map_err(|_| CliError::Usage(format!("unknown scenario '{name}'")))
}

fn non_empty<T: Clone>(flag: &[T], file: &Option<Vec<T>>) -> Option<Vec<T>> {
    if !flag.is_empty() {
        Some(flag.to_vec())
    } else {
        file.clone().filter(|v| !v.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferPlan {
    pub input: PathBuf,
    pub roles: RoleSpec,
    pub config: PipelineConfig,
    /// Response bandwidth; `None` picks the default for the response type.
    pub output_bandwidth: Option<f64>,
    pub common: Common,
}

pub fn resolve_infer(args: &InferArgs, file: &FileConfig) -> CliResult<InferPlan> {
    let common = resolve_common(&args.common, file)?;
    let response =
        non_empty(&args.response, &file.response).ok_or_else(|| CliError::Usage("--response is required".into()))?;
    let roles = RoleSpec {
        response,
        ids: non_empty(&args.ids, &file.ids).unwrap_or_default(),
        classes: args.classes.or(file.classes),
    };
    let defaults = PipelineConfig::default();
    let method = match args.method.as_ref().or(file.method.as_ref()) {
        Some(m) => parse_method(m)?,
        None => defaults.method,
    };
    let bandwidth = args.bandwidth.or(file.bandwidth).unwrap_or(1.0);
    let config = PipelineConfig {
        k: args.k.or(file.k).unwrap_or(defaults.k),
        block_size: args.block_size.or(file.block_size).unwrap_or(defaults.block_size),
        alpha: args.alpha.or(file.alpha).unwrap_or(defaults.alpha),
        shrinkage: args.shrinkage.or(file.shrinkage).unwrap_or(defaults.shrinkage),
        spec_x: KernelSpec::gaussian(bandwidth)?,
        spec_y: defaults.spec_y,
        method,
        seed: common.seed,
    };
    Ok(InferPlan {
        input: args.input.clone(),
        roles,
        config,
        output_bandwidth: args.output_bandwidth.or(file.output_bandwidth),
        common,
    })
}

fn output_kernel(response: &Response, bandwidth: Option<f64>) -> CliResult<KernelSpec> {
    Ok(match (response, bandwidth) {
        (Response::Categorical { classes, .. }, _) => KernelSpec::delta(*classes)?,
        (_, Some(bw)) => KernelSpec::gaussian(bw)?,
        (Response::Multivariate(y), None) => KernelSpec::gaussian(median_heuristic(y.view())?)?,
        (Response::Univariate(_), None) => KernelSpec::gaussian(1.0)?,
    })
}

/// Loads the data, runs the pipeline and writes `report.csv`,
/// `report.json` and `report.txt` into the output directory.
pub fn execute_infer(plan: &InferPlan) -> CliResult<InferenceReport> {
    let data = ingest_csv(&plan.input, &plan.roles)?;
    let mut cfg = plan.config.clone();
    cfg.spec_y = output_kernel(&data.response, plan.output_bandwidth)?;
    cfg.validate(data.d())?;
    let report = with_threads(plan.common.threads, || run(&data, &cfg))??;
    write_report_files(&plan.common.out_dir, &report)?;
    Ok(report)
}

pub fn write_report_files(dir: &Path, report: &InferenceReport) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(std::fs::File::create(dir.join(REPORT_CSV))?, report)?;
    write_json(std::fs::File::create(dir.join(REPORT_JSON))?, report)?;
    std::fs::write(dir.join(REPORT_TABLE), format_table(report))?;
    Ok(())
}

pub fn cmd_infer(args: &InferArgs) -> CliResult<String> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let plan = resolve_infer(args, &file)?;
    let report = execute_infer(&plan)?;
    Ok(format_table(&report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatePlan {
    pub grid: ExperimentGrid,
    pub common: Common,
}

pub fn resolve_simulate(args: &SimulateArgs, file: &FileConfig) -> CliResult<SimulatePlan> {
    let common = resolve_common(&args.common, file)?;
    let names: Vec<String> = non_empty(&args.scenario, &file.scenarios)
        .unwrap_or_default()
        .into_iter()
        .filter(|s| !s.trim().is_empty())
        .collect();
    if names.is_empty() {
        return Err(CliError::Usage("--scenario needs at least one scenario".into()));
    }
    let scenarios = names.iter().map(|s| parse_scenario(s)).collect::<CliResult<Vec<_>>>()?;
    let defaults = ExperimentGrid::default();
    let methods = match non_empty(&args.methods, &file.methods) {
        Some(ms) => ms.iter().map(|m| parse_method(m)).collect::<CliResult<Vec<_>>>()?,
        None => defaults.methods,
    };
    let grid = ExperimentGrid {
        scenarios,
        sample_sizes: non_empty(&args.n, &file.sample_sizes).unwrap_or(defaults.sample_sizes),
        block_sizes: non_empty(&args.b_sweep, &file.block_sizes).unwrap_or(defaults.block_sizes),
        methods,
        trials: args.trials.or(file.trials).unwrap_or(defaults.trials),
        base_seed: common.seed,
        k: args.k.or(file.k).unwrap_or(defaults.k),
        alpha: args.alpha.or(file.alpha).unwrap_or(defaults.alpha),
        shrinkage: args.shrinkage.or(file.shrinkage).unwrap_or(defaults.shrinkage),
    };
    grid.validate()?;
    Ok(SimulatePlan { grid, common })
}

pub fn execute_simulate(plan: &SimulatePlan) -> CliResult<Vec<CurvePoint>> {
    let dir = &plan.common.out_dir;
    let points = with_threads(plan.common.threads, || run_grid_persisted(&plan.grid, dir))??;
    write_figures(dir, &points)?;
    Ok(points)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Tidy long-format files: FPR by method over n, TPR panels per scenario,
/// and both metrics over the block size.
pub fn write_figures(dir: &Path, points: &[CurvePoint]) -> CliResult<()> {
    let mut fpr = csv::Writer::from_path(dir.join(FIG_FPR))?;
    fpr.write_record(["scenario", "method", "block_size", "n", "mean_fpr", "se_fpr", "trials"])?;
    let mut tpr = csv::Writer::from_path(dir.join(FIG_TPR))?;
    tpr.write_record(["scenario", "method", "block_size", "n", "mean_tpr", "se_tpr", "trials"])?;
    let mut sweep = csv::Writer::from_path(dir.join(FIG_BLOCK_SWEEP))?;
    sweep.write_record(["scenario", "method", "n", "block_size", "metric", "mean", "se"])?;
    for p in points {
        let head = [p.scenario.name().to_string(), p.method.name().to_string()];
        let (b, n, t) = (p.block_size.to_string(), p.n.to_string(), p.trials.to_string());
        fpr.write_record([&head[0], &head[1], &b, &n, &opt(p.mean_fpr), &opt(p.se_fpr), &t])?;
        if p.mean_tpr.is_some() {
            tpr.write_record([&head[0], &head[1], &b, &n, &opt(p.mean_tpr), &opt(p.se_tpr), &t])?;
            sweep.write_record([&head[0], &head[1], &n, &b, "tpr", &opt(p.mean_tpr), &opt(p.se_tpr)])?;
        }
        sweep.write_record([&head[0], &head[1], &n, &b, "fpr", &opt(p.mean_fpr), &opt(p.se_fpr)])?;
    }
    fpr.flush()?;
    tpr.flush()?;
    sweep.flush()?;
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let plan = resolve_simulate(args, &file)?;
    let points = execute_simulate(&plan)?;
    let flagged = points.iter().filter(|p| p.flagged).count();
    Ok(format!(
        "{} cells written to {} ({} flagged for failures)\n",
        points.len(),
        plan.common.out_dir.display(),
        flagged
    ))
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<String> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &file)?;
    let kind = parse_scenario(&args.scenario)?;
    let data = Scenario::new(kind, args.n, common.seed).generate()?;
    let path = match &args.output {
        Some(p) => p.clone(),
        None => {
            std::fs::create_dir_all(&common.out_dir)?;
            common.out_dir.join(format!("{}.csv", kind.name()))
        }
    };
    write_dataset(std::fs::File::create(&path)?, &data.dataset)?;
    Ok(format!("wrote {} rows to {}\n", args.n, path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn infer_args() -> InferArgs {
        InferArgs { input: "data.csv".into(), response: vec!["y".into()], ..Default::default() }
    }

    #[test]
    fn defaults_apply() {
        let plan = resolve_infer(&infer_args(), &FileConfig::default()).unwrap();
        assert_eq!(plan.config.k, 10);
        assert_eq!(plan.config.block_size, 10);
        assert_eq!(plan.config.alpha, 0.05);
        assert_eq!(plan.config.shrinkage, 0.1);
        assert_eq!(plan.config.method, Method::HsicInf);
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig { k: Some(5), block_size: Some(20), seed: Some(9), ..Default::default() };
        let args = InferArgs { k: Some(3), ..infer_args() };
        let plan = resolve_infer(&args, &file).unwrap();
        assert_eq!(plan.config.k, 3);
        assert_eq!(plan.config.block_size, 20);
        assert_eq!(plan.config.seed, 9);
    }

    #[test]
    fn missing_response_is_usage_error() {
        let args = InferArgs { response: vec![], ..infer_args() };
        assert_eq!(resolve_infer(&args, &FileConfig::default()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn empty_scenario_list_is_usage_error() {
        let args = SimulateArgs { scenario: vec!["".into()], ..Default::default() };
        assert_eq!(resolve_simulate(&args, &FileConfig::default()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn b_sweep_sets_block_sizes() {
        let args = SimulateArgs { scenario: vec!["linear".into()], b_sweep: vec![5, 10, 20], ..Default::default() };
        let plan = resolve_simulate(&args, &FileConfig::default()).unwrap();
        assert_eq!(plan.grid.block_sizes, vec![5, 10, 20]);
        assert_eq!(plan.grid.scenarios, vec![ScenarioKind::Linear]);
    }
}
