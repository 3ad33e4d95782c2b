//! Dataset subcommands: mine, split, eval, metrics.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use simplikit_core::corpus::{self, commits_from_git, read_jsonl_file, CommitRecord, DatasetRecord, ProjectLayout, Split};
use simplikit_core::evalharness::{aggregate, evaluate, render_table, Prediction, SIMSCORE_NOTE};
use simplikit_core::metrics::{measure, quality_delta, Metrics, MetricsDelta};
use simplikit_core::syntax::parse_method;

use crate::error::{read_input, CliError};
use crate::output::Jsonl;
use crate::{EvalArgs, MetricsArgs, MineArgs, SplitArgs};

pub fn mine(args: MineArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve()?;
    let commits: Vec<CommitRecord> = match (&args.git, &args.commits) {
        (Some(repo), None) => {
            let layout = if args.per_directory {
                ProjectLayout::TopLevelDirs
            } else {
                let name = args.project_name.clone().unwrap_or_else(|| {
                    std::fs::canonicalize(repo)
                        .ok()
                        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
                        .unwrap_or_else(|| "project".into())
                });
                ProjectLayout::Single(name)
            };
            commits_from_git(repo, &layout)?
        }
        (None, Some(path)) => read_jsonl_file(path)?,
        _ => return Err(CliError::Config("mine needs --git or --commits".into())),
    };
    let total = commits.len();
    let kept = corpus::filter_commits(commits);
    let kept_count = kept.len();
    let (records, stats) = corpus::mine(kept);
    let mut out = Jsonl::open(cfg.out.as_deref())?;
    for r in &records {
        out.emit(r)?;
    }
    out.finish()?;
    eprintln!(
        "{kept_count} of {total} commits kept; {} pairs; skipped: {} unparseable, {} unmatched, {} over limit, {} unaltered, {} not simpler",
        records.len(),
        stats.unparseable,
        stats.unmatched,
        stats.over_limit,
        stats.unaltered,
        stats.not_simpler
    );
    Ok(())
}

pub fn split(args: SplitArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve()?;
    let mut records: Vec<DatasetRecord> = read_jsonl_file(&args.input)?;
    corpus::split(&mut records, cfg.seed);
    let mut out = Jsonl::open(cfg.out.as_deref())?;
    for r in &records {
        out.emit(r)?;
    }
    out.finish()?;
    let mut projects: BTreeMap<Split, std::collections::BTreeSet<&str>> = BTreeMap::new();
    let mut counts: BTreeMap<Split, usize> = BTreeMap::new();
    for r in &records {
        let s = r.split.expect("split assigns every record");
        projects.entry(s).or_default().insert(&r.project);
        *counts.entry(s).or_default() += 1;
    }
    for s in [Split::Train, Split::Validation, Split::Test] {
        eprintln!(
            "{s:?}: {} projects, {} records",
            projects.get(&s).map_or(0, |p| p.len()),
            counts.get(&s).copied().unwrap_or(0)
        );
    }
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve()?;
    let preds: Vec<Prediction> = read_jsonl_file(&args.pred)?;
    let gold: Vec<DatasetRecord> = read_jsonl_file(&args.gold)?;
    let by_id: HashMap<String, &DatasetRecord> = gold.iter().map(|r| (r.id(), r)).collect();
    let mut rows = Vec::with_capacity(preds.len());
    for p in &preds {
        let g = by_id
            .get(&p.record_id)
            .ok_or_else(|| CliError::Config(format!("prediction for unknown record {:?}", p.record_id)))?;
        rows.push(evaluate(p, g));
    }
    let mut out = Jsonl::open(cfg.out.as_deref())?;
    for r in &rows {
        out.emit(r)?;
    }
    out.finish()?;
    eprintln!("{SIMSCORE_NOTE}");
    eprint!("{}", render_table(&aggregate(&rows)));
    Ok(())
}

#[derive(Debug, Serialize)]
struct MetricsRecord {
    file: String,
    method: String,
    #[serde(flatten)]
    metrics: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<MetricsDelta>,
}

pub fn metrics(args: MetricsArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve()?;
    if args.against.is_some() && args.inputs.len() != 1 {
        return Err(CliError::Config("--against takes exactly one input".into()));
    }
    let against = args
        .against
        .as_ref()
        .map(|p| parse_method(&read_input(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))))
        .transpose()?;
    let mut recs = Vec::new();
    for p in &args.inputs {
        let unit = parse_method(&read_input(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
        recs.push(MetricsRecord {
            file: p.display().to_string(),
            method: unit.name().to_string(),
            metrics: measure(&unit),
            delta: against.as_ref().map(|a| quality_delta(&unit, a)),
        });
    }
    let mut out = Jsonl::open(cfg.out.as_deref())?;
    for r in &recs {
        out.emit(r)?;
    }
    out.finish()?;
    let width = recs.iter().map(|r| r.method.len()).max().unwrap_or(6).max(6);
    eprintln!("{:width$}  {:>5}  {:>6}  {:>10}  {:>9}", "method", "sloc", "tokens", "cyclomatic", "cognitive");
    for r in &recs {
        let m = r.metrics;
        eprintln!(
            "{:width$}  {:>5}  {:>6}  {:>10}  {:>9}",
            r.method, m.sloc, m.tokens, m.cyclomatic, m.cognitive
        );
    }
    Ok(())
}
