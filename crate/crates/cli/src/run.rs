//! Scenario execution: validate everything, compute, then write reports.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analysis::{check_spec, eigen_options, run_level, Inputs, LevelOutput};
use crate::error::{CliError, Result};
use crate::report::{csv_trace, number, to_json_bytes, LevelReport, SCHEMA};
use crate::scenario::{Scenario, ANALYSES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Run only this analysis; all analyses of the scenario when `None`.
    pub only: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    /// `(dim, points, side)`.
    pub grid: Option<(usize, usize, Option<f64>)>,
    pub levels: Option<Vec<usize>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            only: None,
            out: None,
            format: Format::Both,
            tol: None,
            seed: None,
            grid: None,
            levels: None,
        }
    }
}

/// Files written and the exit code of a run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    pub messages: Vec<String>,
}

struct Outcome {
    analysis: String,
    levels: Vec<LevelReport>,
    sidecars: Vec<(String, formlab::field::io::FieldFile)>,
    error: Option<CliError>,
}

impl Outcome {
    fn status(&self) -> &'static str {
        match &self.error {
            None => "completed",
            Some(e) if e.exit_code() == 3 => "no_convergence",
            Some(_) => "error",
        }
    }
}

fn apply_overrides(scenario: &mut Scenario, opts: &RunOptions) {
    if let Some(seed) = opts.seed {
        scenario.seed = seed;
    }
    if let Some((dim, points, side)) = opts.grid {
        scenario.grid.dim = dim;
        scenario.grid.points = points;
        if let Some(s) = side {
            scenario.grid.side = s;
        }
    }
    if let Some(levels) = &opts.levels {
        scenario.refinement.levels = levels.clone();
    }
}

fn selected(scenario: &Scenario, opts: &RunOptions) -> Result<Vec<String>> {
    match &opts.only {
        Some(a) if ANALYSES.contains(&a.as_str()) => Ok(vec![a.clone()]),
        Some(a) => Err(CliError::scenario(format!("unknown analysis `{a}`"))),
        None if scenario.analysis.is_empty() => Err(CliError::scenario("scenario lists no analyses")),
        None => Ok(scenario.analysis.keys().cloned().collect()),
    }
}

fn compute(scenario: &Scenario, analysis: &str, inputs: &[Inputs], tol: Option<f64>) -> Outcome {
    let spec = scenario.analysis_spec(analysis);
    let opts = eigen_options(&spec, tol);
    let mut levels = Vec::new();
    let mut sidecars = Vec::new();
    let mut error = None;
    for input in inputs {
        match run_level(analysis, &spec, input, &opts) {
            Ok(LevelOutput {
                result,
                quantities,
                sidecars: fields,
            }) => {
                let n = input.grid.points_per_axis();
                let mut names = Vec::new();
                for (name, field) in fields {
                    let file = format!("{analysis}.{name}.n{n}.flf");
                    names.push(file.clone());
                    sidecars.push((file, field));
                }
                levels.push(LevelReport {
                    points: n,
                    spacing: input.grid.min_spacing(),
                    result,
                    quantities,
                    sidecars: names,
                });
            }
            Err(e) => {
                error = Some(e);
                break;
            }
        }
    }
    Outcome {
        analysis: analysis.to_string(),
        levels,
        sidecars,
        error,
    }
}

fn report_value(scenario: &Scenario, outcome: &Outcome) -> Value {
    let levels: Vec<Value> = outcome.levels.iter().map(LevelReport::to_value).collect();
    json!({
        "schema": SCHEMA,
        "scenario": scenario.display_name(),
        "analysis": outcome.analysis,
        "status": outcome.status(),
        "error": outcome.error.as_ref().map(|e| e.to_string()),
        "seed": scenario.seed,
        "grid": {
            "dim": scenario.grid.dim,
            "side": number(scenario.grid.side),
            "inner_fraction": number(scenario.grids().ok().and_then(|g| g.first().map(|g| g.inner_fraction())).unwrap_or(f64::NAN)),
        },
        "levels": levels,
    })
}

fn write(path: &Path, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(path, bytes)?;
    files.push(path.to_path_buf());
    Ok(())
}

/// Runs `scenario`. Scenario errors are returned before any file is written;
/// solver and I/O failures are reported per analysis and reflected in the
/// exit code, with the completed levels kept.
pub fn run_scenario(mut scenario: Scenario, opts: &RunOptions) -> Result<RunSummary> {
    apply_overrides(&mut scenario, opts);
    let analyses = selected(&scenario, opts)?;
    let grids = scenario.grids()?;
    let mut prepared = Vec::new();
    for a in &analyses {
        check_spec(a, &scenario.analysis_spec(a))?;
        let inputs = grids
            .iter()
            .map(|g| Inputs::prepare(&scenario, a, *g))
            .collect::<Result<Vec<_>>>()?;
        prepared.push((a.clone(), inputs));
    }
    let out_dir = opts
        .out
        .clone()
        .or_else(|| scenario.output.dir.clone().map(|d| scenario.base_dir.join(d)))
        .unwrap_or_else(|| PathBuf::from("formlab-out"));

    let outcomes: Vec<Outcome> = prepared
        .par_iter()
        .map(|(a, inputs)| compute(&scenario, a, inputs, opts.tol))
        .collect();

    std::fs::create_dir_all(&out_dir)?;
    let mut files = Vec::new();
    let mut messages = Vec::new();
    let mut exit_code = 0;
    for o in &outcomes {
        if opts.format.json() {
            for (name, field) in &o.sidecars {
                write(&out_dir.join(name), &field.to_bytes(), &mut files)?;
            }
            let bytes = to_json_bytes(&report_value(&scenario, o))?;
            write(&out_dir.join(format!("{}.json", o.analysis)), &bytes, &mut files)?;
        }
        if opts.format.csv() {
            let mut quantities: Vec<&String> = o.levels.iter().flat_map(|l| l.quantities.keys()).collect();
            quantities.sort();
            quantities.dedup();
            for q in quantities {
                let csv = csv_trace(&o.levels, q);
                write(&out_dir.join(format!("{}.{q}.csv", o.analysis)), csv.as_bytes(), &mut files)?;
            }
        }
        if let Some(e) = &o.error {
            messages.push(format!("{}: {e}", o.analysis));
            exit_code = exit_code.max(if e.exit_code() == 3 { 3 } else { 1 });
        }
    }
    Ok(RunSummary {
        exit_code,
        files,
        messages,
    })
}
