//! Monte-Carlo experiment runner.
//!
//! A grid is the product of scenarios, sample sizes, block sizes and
//! methods; each cell runs `trials` independent pipeline executions on
//! freshly generated data. Every trial's seed is derived from the base seed
//! and the cell coordinates alone (see [`trial_seed`]), so results do not
//! depend on scheduling or thread count.
//!
//! Persisted runs append one row per trial to `trials.csv`, a whole cell at a
//! time, and rewrite the file in grid order once every cell is done. On
//! restart, cells whose rows are all present are reused and the rest are
//! rerun.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HsicError, Result};
use crate::gaussian_model::DEFAULT_SHRINKAGE;
use crate::kernel::KernelSpec;
use crate::pipeline::{evaluate_report, run, InferenceReport, Method, PipelineConfig};
use crate::synthdata::{Scenario, ScenarioKind};

pub const TRIALS_FILE: &str = "trials.csv";
pub const CURVES_FILE: &str = "curves.csv";

/// Share of failed trials above which a cell is flagged.
pub const FAILURE_FLAG_RATE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub scenarios: Vec<ScenarioKind>,
    pub sample_sizes: Vec<usize>,
    pub block_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub base_seed: u64,
    pub k: usize,
    pub alpha: f64,
    pub shrinkage: f64,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            scenarios: vec![ScenarioKind::Null],
            sample_sizes: (1..=10).map(|i| 300 * i).collect(),
            block_sizes: vec![5, 10],
            methods: Method::ALL.to_vec(),
            trials: 100,
            base_seed: 0,
            k: 10,
            alpha: 0.05,
            shrinkage: DEFAULT_SHRINKAGE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub scenario: ScenarioKind,
    pub method: Method,
    pub n: usize,
    pub block_size: usize,
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        let empty = |what: &'static str| HsicError::UnknownName { kind: "empty grid axis", name: what.into() };
        if self.scenarios.is_empty() {
            return Err(empty("scenarios"));
        }
        if self.sample_sizes.is_empty() {
            return Err(empty("sample sizes"));
        }
        if self.block_sizes.is_empty() {
            return Err(empty("block sizes"));
        }
        if self.methods.is_empty() {
            return Err(empty("methods"));
        }
        if self.trials == 0 {
            return Err(empty("trials"));
        }
        if let Some(&b) = self.block_sizes.iter().find(|&&b| b < crate::block_hsic::MIN_BLOCK_SIZE) {
            return Err(HsicError::BlockSizeTooSmall(b));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(HsicError::InvalidAlpha(self.alpha));
        }
        Ok(())
    }

    /// Cells in a fixed order: scenario, method, block size, then n.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &scenario in &self.scenarios {
            for &method in &self.methods {
                for &block_size in &self.block_sizes {
                    for &n in &self.sample_sizes {
                        out.push(Cell { scenario, method, n, block_size });
                    }
                }
            }
        }
        out
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed of one trial: SplitMix64 folded over the base seed and the
/// coordinates `(scenario name, n, B, method name, trial)`, with names
/// hashed by 64-bit FNV-1a. The trial's data is generated from this seed;
/// the pipeline shuffle uses `splitmix64(seed)`.
pub fn trial_seed(base_seed: u64, cell: &Cell, trial: usize) -> u64 {
    [fnv1a(cell.scenario.name()), cell.n as u64, cell.block_size as u64, fnv1a(cell.method.name()), trial as u64]
        .iter()
        .fold(splitmix64(base_seed), |h, &v| splitmix64(h ^ v))
}

/// One persisted trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: ScenarioKind,
    pub method: Method,
    pub n: usize,
    pub block_size: usize,
    pub trial: usize,
    pub seed: u64,
    pub ok: bool,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub rejected: Option<usize>,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn cell(&self) -> Cell {
        Cell { scenario: self.scenario, method: self.method, n: self.n, block_size: self.block_size }
    }
}

/// Runs one trial and returns its report alongside the evaluation row.
pub fn run_trial(grid: &ExperimentGrid, cell: &Cell, trial: usize) -> (TrialRecord, Result<InferenceReport>) {
    let seed = trial_seed(grid.base_seed, cell, trial);
    let result = execute(grid, cell, seed);
    let mut record = TrialRecord {
        scenario: cell.scenario,
        method: cell.method,
        n: cell.n,
        block_size: cell.block_size,
        trial,
        seed,
        ok: false,
        tpr: None,
        fpr: None,
        rejected: None,
        error: None,
    };
    match &result {
        Ok((report, relevant)) => {
            let eval = evaluate_report(report, relevant);
            record.ok = true;
            record.tpr = eval.tpr;
            record.fpr = Some(eval.fpr);
            record.rejected = Some(report.rejected().count());
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    (record, result.map(|(r, _)| r))
}

fn execute(grid: &ExperimentGrid, cell: &Cell, seed: u64) -> Result<(InferenceReport, Vec<usize>)> {
    let scenario = Scenario::new(cell.scenario, cell.n, seed);
    let synthetic = scenario.generate()?;
    let cfg = PipelineConfig {
        k: grid.k,
        block_size: cell.block_size,
        alpha: grid.alpha,
        shrinkage: grid.shrinkage,
        spec_x: KernelSpec::Gaussian { bandwidth: 1.0 },
        spec_y: scenario.output_kernel(&synthetic.dataset)?,
        method: cell.method,
        seed: splitmix64(seed),
    };
    let report = run(&synthetic.dataset, &cfg)?;
    Ok((report, synthetic.relevant))
}

/// All trials of one cell, in trial order.
pub fn run_cell(grid: &ExperimentGrid, cell: &Cell) -> Vec<(TrialRecord, Result<InferenceReport>)> {
    (0..grid.trials).into_par_iter().map(|t| run_trial(grid, cell, t)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub scenario: ScenarioKind,
    pub method: Method,
    pub n: usize,
    pub block_size: usize,
    /// Successful trials.
    pub trials: usize,
    pub failures: usize,
    pub mean_tpr: Option<f64>,
    pub se_tpr: Option<f64>,
    pub mean_fpr: Option<f64>,
    pub se_fpr: Option<f64>,
    pub flagged: bool,
}

fn mean_and_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let se = if values.len() < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    (Some(mean), Some(se))
}

/// Aggregates the records of one cell. Failed trials are excluded from the
/// means and counted separately.
pub fn aggregate(cell: &Cell, records: &[TrialRecord]) -> CurvePoint {
    let ok: Vec<&TrialRecord> = records.iter().filter(|r| r.ok).collect();
    let failures = records.len() - ok.len();
    let tprs: Vec<f64> = ok.iter().filter_map(|r| r.tpr).collect();
    let fprs: Vec<f64> = ok.iter().filter_map(|r| r.fpr).collect();
    let (mean_tpr, se_tpr) = mean_and_se(&tprs);
    let (mean_fpr, se_fpr) = mean_and_se(&fprs);
    CurvePoint {
        scenario: cell.scenario,
        method: cell.method,
        n: cell.n,
        block_size: cell.block_size,
        trials: ok.len(),
        failures,
        mean_tpr,
        se_tpr,
        mean_fpr,
        se_fpr,
        flagged: failures as f64 > FAILURE_FLAG_RATE * records.len() as f64,
    }
}

/// Runs every cell in memory.
pub fn run_grid(grid: &ExperimentGrid) -> Result<Vec<CurvePoint>> {
    grid.validate()?;
    Ok(grid
        .cells()
        .par_iter()
        .map(|cell| {
            let records: Vec<TrialRecord> = run_cell(grid, cell).into_iter().map(|(r, _)| r).collect();
            aggregate(cell, &records)
        })
        .collect())
}

/// Reads trial rows, skipping any line that does not parse (for example a
/// row cut short by an interrupted write).
pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().filter_map(|row| row.ok()).collect())
}

fn group_by_cell(records: Vec<TrialRecord>) -> HashMap<Cell, Vec<TrialRecord>> {
    let mut map: HashMap<Cell, Vec<TrialRecord>> = HashMap::new();
    for r in records {
        map.entry(r.cell()).or_default().push(r);
    }
    map
}

fn complete(records: &mut [TrialRecord], trials: usize) -> bool {
    records.sort_by_key(|r| r.trial);
    records.len() == trials && records.iter().enumerate().all(|(i, r)| r.trial == i)
}

/// Runs the grid persisting per-trial rows to `out_dir/trials.csv` and the
/// aggregates to `out_dir/curves.csv`. Complete cells already present in
/// `trials.csv` are not rerun.
pub fn run_grid_persisted(grid: &ExperimentGrid, out_dir: &Path) -> Result<Vec<CurvePoint>> {
    grid.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let trials_path = out_dir.join(TRIALS_FILE);

    let mut done: HashMap<Cell, Vec<TrialRecord>> =
        if trials_path.exists() { group_by_cell(read_trials(&trials_path)?) } else { HashMap::new() };
    let cells = grid.cells();
    done.retain(|cell, rows| cells.contains(cell) && complete(rows, grid.trials));

    // keep only the complete cells so partial ones do not duplicate
    write_trials(&trials_path, &cells, &done)?;

    let sink = Mutex::new(TrialSink::open(&trials_path)?);
    let fresh: Vec<(Cell, Vec<TrialRecord>)> = cells
        .par_iter()
        .filter(|c| !done.contains_key(c))
        .map(|cell| {
            let records: Vec<TrialRecord> = run_cell(grid, cell).into_iter().map(|(r, _)| r).collect();
            sink.lock().expect("trial sink poisoned").append(&records)?;
            Ok((*cell, records))
        })
        .collect::<Result<_>>()?;
    done.extend(fresh);
    // cells finish in scheduling order; the final file is in grid order
    write_trials(&trials_path, &cells, &done)?;

    let points: Vec<CurvePoint> = cells.iter().map(|c| aggregate(c, &done[c])).collect();
    write_curves(&out_dir.join(CURVES_FILE), &points)?;
    Ok(points)
}

fn write_trials(path: &Path, cells: &[Cell], done: &HashMap<Cell, Vec<TrialRecord>>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for cell in cells {
        for row in done.get(cell).into_iter().flatten() {
            writer.serialize(row)?;
        }
    }
    if done.is_empty() {
        write_trials_header(&mut writer)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_trials_header(writer: &mut csv::Writer<File>) -> Result<()> {
    writer.write_record([
        "scenario",
        "method",
        "n",
        "block_size",
        "trial",
        "seed",
        "ok",
        "tpr",
        "fpr",
        "rejected",
        "error",
    ])?;
    Ok(())
}

struct TrialSink {
    path: PathBuf,
}

impl TrialSink {
    fn open(path: &Path) -> Result<Self> {
        Ok(TrialSink { path: path.to_path_buf() })
    }

    fn append(&mut self, records: &[TrialRecord]) -> Result<()> {
        let mut buf = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for r in records {
            buf.serialize(r)?;
        }
        let bytes = buf.into_inner().map_err(|e| HsicError::Io(e.to_string()))?;
        let mut file = OpenOptions::new().append(true).open(&self.path)?;
        file.write_all(&bytes)?;
        file.flush()?;
        Ok(())
    }
}

pub fn write_curves(path: &Path, points: &[CurvePoint]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for p in points {
        writer.serialize(p)?;
    }
    writer.flush()?;
    Ok(())
}

/// Recomputes aggregates from persisted trial rows, in grid order.
pub fn aggregate_from_file(grid: &ExperimentGrid, trials_path: &Path) -> Result<Vec<CurvePoint>> {
    let by_cell = group_by_cell(read_trials(trials_path)?);
    let ordered: BTreeMap<usize, CurvePoint> = grid
        .cells()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            by_cell.get(c).map(|rows| {
                let mut rows = rows.clone();
                rows.sort_by_key(|r| r.trial);
                (i, aggregate(c, &rows))
            })
        })
        .collect();
    Ok(ordered.into_values().collect())
}
