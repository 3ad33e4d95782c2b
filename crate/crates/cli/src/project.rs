//! Subcommands that work against a project: simplify, reduce, validate.

use std::path::{Path, PathBuf};

use serde::Serialize;
use simplikit_core::corpus::{mark_valid, read_jsonl_file, DatasetRecord, Validity};
use simplikit_core::gateway::{
    filter_unaltered, rank, Candidate, CandidateSet, Gateway, GeneratorRequest, Provenance, RegistryConfig,
};
use simplikit_core::localization::encode_heuristic;
use simplikit_core::reducer::{ddmin_reduce_with, Granularity, ReduceError, ReductionTrace};
use simplikit_core::syntax::scan::find_methods;
use simplikit_core::syntax::{parse_method, token_equal, MethodUnit};
use simplikit_core::validator::{
    check_equivalence, pristine, validate_candidates, validate_one, MethodSite, ProjectConfig, ValidationReport,
    Verdict,
};

use crate::error::{read_input, CliError};
use crate::output::Jsonl;
use crate::settings::RunConfig;
use crate::{GranularityArg, Localize, ReduceArgs, SimplifyArgs, ValidateArgs};

pub const REDUCER: &str = "reducer";

fn parse(text: &str, what: &str) -> Result<MethodUnit, CliError> {
    parse_method(text).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn load_project(cfg: &RunConfig) -> Result<Option<ProjectConfig>, CliError> {
    cfg.project.as_deref().map(|p| Ok(ProjectConfig::load(p)?)).transpose()
}

fn need_project(cfg: &RunConfig, what: &str) -> Result<ProjectConfig, CliError> {
    load_project(cfg)?.ok_or_else(|| CliError::Config(format!("{what} needs --project")))
}

/// Finds the method of the project whose tokens equal `text`.
pub fn locate(project: &ProjectConfig, text: &str) -> Result<MethodSite, CliError> {
    let root = &project.root;
    let walker = walkdir::WalkDir::new(root).sort_by_file_name().into_iter().filter_entry(|e| {
        e.depth() != 1 || !project.exclude.iter().any(|x| e.file_name() == x.as_str())
    });
    for entry in walker.filter_map(Result::ok) {
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|x| x != "java") {
            continue;
        }
        let Ok(src) = std::fs::read_to_string(entry.path()) else { continue };
        let rel = entry.path().strip_prefix(root).expect("walk stays under root").to_path_buf();
        for loc in find_methods(&src) {
            let site = MethodSite {
                file: rel.clone(),
                start: loc.start,
                end: loc.end,
            };
            if site.read(root).is_ok_and(|t| token_equal(&t, text)) {
                return Ok(site);
            }
        }
    }
    Err(CliError::Config(format!("method not found under {}", root.display())))
}

/// Makes sure the unmodified project builds and passes, the precondition of
/// every equivalence check.
fn check_pristine(project: &ProjectConfig) -> Result<(), CliError> {
    let ws = pristine(project)?;
    let eq = check_equivalence(ws.root(), project)?;
    if eq.test_equivalent() {
        return Ok(());
    }
    let tail: String = eq.log.lines().rev().take(20).collect::<Vec<_>>().into_iter().rev().collect::<Vec<_>>().join("\n");
    Err(CliError::Infra(format!(
        "the unmodified project at {} does not build and pass its tests (compiled: {}, timed out: {}, outcome: {}/{} passed)\n{tail}",
        project.root.display(),
        eq.compiled,
        eq.timed_out,
        eq.outcome.passed,
        eq.outcome.total
    )))
}

struct Job {
    id: String,
    original: MethodUnit,
    /// Generator input; differs from the original when localized.
    input: String,
    site: Option<MethodSite>,
}

/// Resolves the method(s) named by the input/`--file`/`--method` flags.
fn single_method(
    input: Option<&Path>,
    file: Option<&PathBuf>,
    method: Option<&String>,
    project: Option<&ProjectConfig>,
) -> Result<(String, MethodUnit, Option<MethodSite>), CliError> {
    match (input, file.zip(method), project) {
        (Some(path), None, p) => {
            let text = read_input(path)?;
            let unit = parse(&text, &path.display().to_string())?;
            let site = p.map(|p| locate(p, &unit.source)).transpose()?;
            Ok((path.display().to_string(), unit, site))
        }
        (input, Some((file, method)), Some(p)) => {
            let site = MethodSite::find(&p.root, file, method)?;
            let text = match input {
                Some(path) => read_input(path)?,
                None => site.read(&p.root)?,
            };
            let unit = parse(&text, method)?;
            Ok((format!("{}#{method}", file.display()), unit, Some(site)))
        }
        (_, Some(_), None) => Err(CliError::Config("--file/--method need --project".into())),
        (None, None, _) => Err(CliError::Config("no input method given".into())),
    }
}

fn jobs(args: &SimplifyArgs, project: Option<&ProjectConfig>) -> Result<Vec<Job>, CliError> {
    let dataset = args.input.as_deref().filter(|p| p.extension().is_some_and(|x| x == "jsonl"));
    if let Some(path) = dataset {
        let records: Vec<DatasetRecord> = read_jsonl_file(path)?;
        return records
            .into_iter()
            .map(|r| {
                let original = parse(&r.original, &r.id())?;
                let input = match args.localize {
                    Localize::None => original.source.clone(),
                    Localize::Heuristic => encode_heuristic(&original),
                    Localize::Perfect => r.localized_original.clone(),
                };
                let site = project
                    .map(|p| MethodSite::find(&p.root, &r.file_path, &r.method_name))
                    .transpose()?;
                Ok(Job {
                    id: r.id(),
                    original,
                    input,
                    site,
                })
            })
            .collect();
    }
    if args.localize == Localize::Perfect {
        return Err(CliError::Config("--localize perfect needs dataset input".into()));
    }
    let (id, original, site) = single_method(args.input.as_deref(), args.file.as_ref(), args.method.as_ref(), project)?;
    let input = match args.localize {
        Localize::Heuristic => encode_heuristic(&original),
        _ => original.source.clone(),
    };
    Ok(vec![Job {
        id,
        original,
        input,
        site,
    }])
}

#[derive(Debug, Serialize)]
struct SimplifyRecord {
    id: String,
    backend: String,
    original: String,
    /// Filtered and ranked candidates.
    candidates: Vec<Candidate>,
    unaltered_removed: usize,
    accepted: Option<String>,
    reports: Vec<ValidationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<ReductionTrace>,
}

fn registry(cfg: &RunConfig) -> Result<RegistryConfig, CliError> {
    match &cfg.registry {
        None => Ok(RegistryConfig::default()),
        Some(p) => Ok(RegistryConfig::from_toml(&read_input(p)?).map_err(|e| CliError::Config(e.to_string()))?),
    }
}

fn reduce_job(
    job: &Job,
    project: &ProjectConfig,
    granularity: Granularity,
) -> Result<(MethodUnit, ReductionTrace), CliError> {
    let site = job.site.as_ref().ok_or_else(|| CliError::Config("the reducer needs a project site".into()))?;
    let oracle = simplikit_core::validator::as_oracle(project, site, &job.original);
    ddmin_reduce_with(&job.original, granularity, |u: &MethodUnit| oracle.check(u)).map_err(|e| match e {
        ReduceError::InitialFails => CliError::Infra(format!("{}: the original method fails its tests", job.id)),
        ReduceError::Oracle { source, .. } => CliError::Infra(source.to_string()),
    })
}

struct Shared<'a> {
    cfg: &'a RunConfig,
    registry: &'a RegistryConfig,
    project: Option<&'a ProjectConfig>,
    extra: &'a [Candidate],
}

fn simplify_job(job: &Job, gateway: &Gateway, s: &Shared) -> Result<SimplifyRecord, CliError> {
    let mut trace = None;
    let mut generated = if s.cfg.backend == REDUCER {
        let project = s.project.ok_or_else(|| CliError::Config("backend reducer needs --project".into()))?;
        let (reduced, t) = reduce_job(job, project, Granularity::Statement)?;
        trace = Some(t);
        vec![Candidate {
            text: reduced.source,
            score: None,
            provenance: Provenance::Deletion,
        }]
    } else {
        let mut req = GeneratorRequest::new(s.cfg.backend.clone(), job.input.clone(), s.cfg.beam);
        req.max_len = s.cfg.max_len;
        gateway.generate(&req)?.candidates
    };
    generated.extend(s.extra.iter().cloned());
    let (set, removed) = filter_unaltered(CandidateSet::from_candidates(generated), &job.original);
    let set = rank(set, &job.original);
    let (accepted, reports) = match (s.project, &job.site) {
        (Some(p), Some(site)) => {
            let (acc, reports) = validate_candidates(&job.original, site, &set, p);
            (acc.map(|u| u.source), reports)
        }
        _ => (None, Vec::new()),
    };
    Ok(SimplifyRecord {
        id: job.id.clone(),
        backend: s.cfg.backend.clone(),
        original: job.original.source.clone(),
        candidates: set.candidates,
        unaltered_removed: removed,
        accepted,
        reports,
        trace,
    })
}

fn gateway_for(s: &Shared) -> Result<Gateway, CliError> {
    let g = Gateway::from_config(s.registry)?;
    if s.cfg.backend != REDUCER && !g.has(&s.cfg.backend) {
        return Err(CliError::Config(format!("unknown backend {:?}", s.cfg.backend)));
    }
    Ok(g)
}

/// Runs jobs on `workers` threads; results keep job order.
fn run_jobs(jobs: &[Job], s: &Shared) -> Vec<Result<SimplifyRecord, CliError>> {
    let workers = s.cfg.workers.min(jobs.len()).max(1);
    if workers == 1 {
        return match gateway_for(s) {
            Ok(g) => jobs.iter().map(|j| simplify_job(j, &g, s)).collect(),
            Err(e) => vec![Err(e)],
        };
    }
    let mut slots: Vec<Option<Result<SimplifyRecord, CliError>>> = (0..jobs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let g = match gateway_for(s) {
                        Ok(g) => g,
                        Err(e) => return vec![(w, Err(e))],
                    };
                    (w..jobs.len())
                        .step_by(workers)
                        .map(|i| (i, simplify_job(&jobs[i], &g, s)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().flatten().collect()
}

fn rules_of(c: &Candidate) -> String {
    match &c.provenance {
        Provenance::Rules(r) => r.iter().map(|r| r.code()).collect::<Vec<_>>().join("+"),
        Provenance::Deletion => "deletion".into(),
        Provenance::Neural => "neural".into(),
        Provenance::External => "external".into(),
    }
}

fn infra_errors(reports: &[ValidationReport]) -> Vec<String> {
    reports.iter().filter_map(|r| r.error.clone()).collect()
}

pub fn simplify(args: SimplifyArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve()?;
    let project = load_project(&cfg)?;
    let registry = registry(&cfg)?;
    // Fail on a bad backend id before any work.
    let shared_probe = Shared {
        cfg: &cfg,
        registry: &registry,
        project: project.as_ref(),
        extra: &[],
    };
    gateway_for(&shared_probe)?;
    if args.write_method.is_some() && args.input.as_deref().is_some_and(|p| p.extension().is_some_and(|x| x == "jsonl")) {
        return Err(CliError::Config("--write-method takes a single method input".into()));
    }
    let extra: Vec<Candidate> = args
        .candidates
        .iter()
        .map(|p| {
            let text = read_input(p)?;
            parse(&text, &p.display().to_string())?;
            Ok(Candidate {
                text,
                score: None,
                provenance: Provenance::External,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let jobs = jobs(&args, project.as_ref())?;
    if let Some(p) = &project {
        check_pristine(p)?;
    }
    let shared = Shared {
        extra: &extra,
        ..shared_probe
    };
    let results = run_jobs(&jobs, &shared);

    let mut out = Jsonl::open(cfg.out.as_deref())?;
    let mut first_err = None;
    let mut infra = Vec::new();
    let mut summary = Vec::new();
    for r in results {
        match r {
            Ok(rec) => {
                out.emit(&rec)?;
                infra.extend(infra_errors(&rec.reports));
                let status = match (&rec.accepted, project.is_some()) {
                    (_, false) => "not validated".to_string(),
                    (None, true) => format!("none of {} accepted", rec.reports.len()),
                    (Some(_), true) => {
                        let k = rec.reports.len() - 1;
                        format!("accepted candidate {k} ({})", rules_of(&rec.candidates[k]))
                    }
                };
                summary.push(format!(
                    "{}: {} candidates, {} unaltered removed, {status}",
                    rec.id,
                    rec.candidates.len(),
                    rec.unaltered_removed
                ));
                if let Some(path) = &args.write_method {
                    let best = rec.accepted.clone().or_else(|| {
                        project.is_none().then(|| rec.candidates.first().map(|c| c.text.clone())).flatten()
                    });
                    if let Some(text) = best {
                        std::fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                    }
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    out.finish()?;
    for line in summary {
        eprintln!("{line}");
    }
    if let Some(e) = first_err {
        return Err(e);
    }
    if !infra.is_empty() {
        return Err(CliError::Infra(infra.join("; ")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReduceRecord {
    id: String,
    original: String,
    reduced: String,
    kept_units: Vec<usize>,
    trace: ReductionTrace,
}

pub fn reduce(args: ReduceArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve()?;
    let project = need_project(&cfg, "reduce")?;
    let (id, original, site) = single_method(args.input.as_deref(), args.file.as_ref(), args.method.as_ref(), Some(&project))?;
    let job = Job {
        id,
        input: original.source.clone(),
        original,
        site,
    };
    let granularity = match args.granularity {
        GranularityArg::Statement => Granularity::Statement,
        GranularityArg::Line => Granularity::Line,
    };
    let (reduced, trace) = reduce_job(&job, &project, granularity)?;
    let rec = ReduceRecord {
        id: job.id,
        original: job.original.source.clone(),
        reduced: reduced.source.clone(),
        kept_units: trace.final_units.clone(),
        trace,
    };
    let mut out = Jsonl::open(cfg.out.as_deref())?;
    out.emit(&rec)?;
    out.finish()?;
    eprintln!(
        "{}: sloc {} -> {}, {} oracle calls over {} steps",
        rec.id,
        job.original.sloc,
        reduced.sloc,
        rec.trace.oracle_calls,
        rec.trace.steps.len()
    );
    Ok(())
}

pub fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve()?;
    let project = need_project(&cfg, "validate")?;
    let mut out = Jsonl::open(cfg.out.as_deref())?;
    if let Some(path) = &args.dataset {
        let records: Vec<DatasetRecord> = read_jsonl_file(path)?;
        let mut valid = 0;
        let total = records.len();
        for r in records {
            let r = mark_valid(r, &project);
            valid += usize::from(r.validity == Validity::Valid);
            out.emit(&r)?;
        }
        out.finish()?;
        eprintln!("{valid} of {total} records valid");
        return Ok(());
    }
    if args.candidates.is_empty() {
        return Err(CliError::Config("no candidate files given".into()));
    }
    let (_, original, site) =
        single_method(args.original.as_deref(), args.file.as_ref(), args.method.as_ref(), Some(&project))?;
    let site = site.expect("project given");
    check_pristine(&project)?;
    let mut reports = Vec::new();
    for p in &args.candidates {
        let text = read_input(p)?;
        let r = validate_one(&p.display().to_string(), &original, &site, &text, &project);
        out.emit(&r)?;
        reports.push(r);
    }
    out.finish()?;
    for r in &reports {
        let verdict = match (r.verdict, r.reason) {
            (Verdict::Accepted, _) => "accepted".to_string(),
            (_, Some(reason)) => format!("rejected ({})", serde_json::to_value(reason).expect("serializes").as_str().unwrap_or("?")),
            _ => "rejected".to_string(),
        };
        eprintln!("{}: {verdict}, sloc {} -> {}", r.candidate_id, r.sloc.0, r.sloc.1);
    }
    let infra = infra_errors(&reports);
    if !infra.is_empty() {
        return Err(CliError::Infra(infra.join("; ")));
    }
    Ok(())
}
