//! Candidate generation behind one interface: the rule catalog, the
//! deletion reducer and remote neural backends speaking the JSON wire
//! protocol. Also prompt construction, unaltered filtering and ranking.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{enumerate_derivations, RuleId};
use crate::localization::{strip_markers, ORIGINAL_OPEN, SIMPLIFIED_CLOSE, SIMPLIFIED_OPEN};
use crate::reducer::{ddmin_reduce, ReduceError};
use crate::syntax::{parse_method, significant_texts, sloc, token_count, MethodUnit};

pub const PROMPT_PREFIX: &str = "Simplify the following java method: ";
pub const PROMPT_SUFFIX: &str = ", the simplified version is: ";
pub const MAX_BEAM: usize = 64;
pub const DEFAULT_MAX_LEN: usize = 512;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

pub fn build_prompt(method_text: &str) -> String {
    format!("{PROMPT_PREFIX}{method_text}{PROMPT_SUFFIX}")
}

/// Inverse of `build_prompt`, lenient about trailing whitespace.
pub fn prompt_method(prompt: &str) -> Option<&str> {
    prompt.strip_prefix(PROMPT_PREFIX)?.trim_end().strip_suffix(PROMPT_SUFFIX.trim_end())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRequest {
    /// Raw method text, or localized text carrying `<original>` markers.
    pub input: String,
    pub beam_size: usize,
    pub max_len: usize,
    pub backend: String,
}

impl GeneratorRequest {
    pub fn new(backend: impl Into<String>, input: impl Into<String>, beam_size: usize) -> Self {
        GeneratorRequest {
            input: input.into(),
            beam_size,
            max_len: DEFAULT_MAX_LEN,
            backend: backend.into(),
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if !(1..=MAX_BEAM).contains(&self.beam_size) {
            return Err(GatewayError::InvalidRequest(format!("beam size {} outside 1..={MAX_BEAM}", self.beam_size)));
        }
        if self.max_len == 0 {
            return Err(GatewayError::InvalidRequest("max_len must be positive".into()));
        }
        Ok(())
    }

    pub fn is_localized(&self) -> bool {
        self.input.contains(ORIGINAL_OPEN)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rules", rename_all = "snake_case")]
pub enum Provenance {
    Rules(Vec<RuleId>),
    Deletion,
    Neural,
    /// Supplied directly by the caller rather than a backend.
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub text: String,
    /// Backend score, higher is better.
    pub score: Option<f64>,
    pub provenance: Provenance,
}

/// Candidates in backend order with distinct significant-token sequences.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn from_candidates(cands: impl IntoIterator<Item = Candidate>) -> Self {
        let mut set = CandidateSet::default();
        let mut seen = HashSet::new();
        for c in cands {
            if seen.insert(key(&c.text)) {
                set.candidates.push(c);
            }
        }
        set
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn truncate(&mut self, n: usize) {
        self.candidates.truncate(n);
    }
}

fn key(text: &str) -> Vec<String> {
    significant_texts(text).into_iter().map(str::to_owned).collect()
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("unknown backend {0:?}")]
    UnknownBackend(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("backend protocol error: {0}")]
    Protocol(String),
    #[error("backend timed out after {0:?}")]
    Timeout(Duration),
    #[error("backend failed: {0}")]
    Backend(String),
}

pub trait Backend {
    fn generate(&self, request: &GeneratorRequest) -> Result<CandidateSet, GatewayError>;
}

/// Lines (1-based, in the stripped text) carrying an `<original>` marker.
fn marked_lines(localized: &str) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut n = 0;
    for line in localized.lines() {
        let t = line.trim();
        if t.starts_with(SIMPLIFIED_OPEN) && t.ends_with(SIMPLIFIED_CLOSE) {
            continue;
        }
        n += 1;
        if line.contains(ORIGINAL_OPEN) {
            out.insert(n);
        }
    }
    out
}

fn line_of(src: &str, off: usize) -> usize {
    src[..off].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Enumerates catalog derivations breadth first. Localized input restricts
/// the first rewrite to the marked lines.
#[derive(Debug, Clone, Copy, Default)]
pub struct CatalogBackend;

impl Backend for CatalogBackend {
    fn generate(&self, req: &GeneratorRequest) -> Result<CandidateSet, GatewayError> {
        req.validate()?;
        let (text, marked) = if req.is_localized() {
            let stripped = strip_markers(&req.input).map_err(|e| GatewayError::InvalidRequest(e.to_string()))?;
            (stripped, Some(marked_lines(&req.input)))
        } else {
            (req.input.clone(), None)
        };
        let unit = parse_method(&text).map_err(|e| GatewayError::InvalidRequest(e.to_string()))?;
        let derivations = enumerate_derivations(&unit, req.beam_size * 4, |rw| match &marked {
            None => true,
            Some(lines) => {
                let first = line_of(&unit.source, rw.node_span.start);
                let last = line_of(&unit.source, rw.node_span.end.max(rw.node_span.start + 1) - 1);
                lines.range(first..=last).next().is_some()
            }
        });
        let mut set = CandidateSet::from_candidates(
            derivations
                .into_iter()
                .filter(|d| d.unit.token_count <= req.max_len)
                .map(|d| Candidate {
                    text: d.unit.source,
                    score: None,
                    provenance: Provenance::Rules(d.rules),
                }),
        );
        set.truncate(req.beam_size);
        Ok(set)
    }
}

pub type BoxedOracle = Box<dyn Fn(&MethodUnit) -> Result<bool, OracleFailure> + Send + Sync>;

#[derive(Debug, Error)]
#[error("{0}")]
pub struct OracleFailure(pub String);

/// Statement-level ddmin driven by `oracle`; yields at most one candidate.
pub struct ReducerBackend {
    pub oracle: BoxedOracle,
}

impl Backend for ReducerBackend {
    fn generate(&self, req: &GeneratorRequest) -> Result<CandidateSet, GatewayError> {
        req.validate()?;
        let text = if req.is_localized() {
            strip_markers(&req.input).map_err(|e| GatewayError::InvalidRequest(e.to_string()))?
        } else {
            req.input.clone()
        };
        let unit = parse_method(&text).map_err(|e| GatewayError::InvalidRequest(e.to_string()))?;
        let (reduced, _) = ddmin_reduce(&unit, |u: &MethodUnit| (self.oracle)(u)).map_err(|e| match e {
            ReduceError::InitialFails => GatewayError::Backend("original method fails the oracle".into()),
            ReduceError::Oracle { source, .. } => GatewayError::Backend(source.to_string()),
        })?;
        let cands = (reduced.token_count <= req.max_len).then_some(Candidate {
            text: reduced.source,
            score: None,
            provenance: Provenance::Deletion,
        });
        Ok(CandidateSet::from_candidates(cands))
    }
}

/// Request body of `POST /v1/generate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireRequest {
    pub prompt: String,
    pub beam_size: usize,
    pub max_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireCandidate {
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub candidates: Vec<WireCandidate>,
}

pub struct RemoteBackend {
    pub base_url: String,
    pub timeout: Duration,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(base_url: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        RemoteBackend {
            base_url: base_url.into(),
            timeout,
            agent,
        }
    }

    fn endpoint(&self) -> String {
        format!("{}/v1/generate", self.base_url.trim_end_matches('/'))
    }
}

impl Backend for RemoteBackend {
    fn generate(&self, req: &GeneratorRequest) -> Result<CandidateSet, GatewayError> {
        req.validate()?;
        let body = WireRequest {
            prompt: build_prompt(&req.input),
            beam_size: req.beam_size,
            max_len: req.max_len,
        };
        let resp: WireResponse = self
            .agent
            .post(&self.endpoint())
            .send_json(&body)
            .and_then(|mut r| r.body_mut().read_json())
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => GatewayError::Timeout(self.timeout),
                ureq::Error::Io(_) | ureq::Error::ConnectionFailed | ureq::Error::HostNotFound => {
                    GatewayError::Unreachable(format!("{}: {e}", self.endpoint()))
                }
                other => GatewayError::Protocol(other.to_string()),
            })?;
        let mut set = CandidateSet::from_candidates(resp.candidates.into_iter().map(|c| Candidate {
            text: c.text,
            score: Some(c.score),
            provenance: Provenance::Neural,
        }));
        set.truncate(req.beam_size);
        Ok(set)
    }
}

/// Registry file entry: either a builtin backend or a remote base URL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BackendSpec {
    Builtin { builtin: String },
    Remote { url: String, timeout_secs: Option<u64> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryConfig {
    #[serde(default)]
    pub backends: BTreeMap<String, BackendSpec>,
}

impl RegistryConfig {
    pub fn from_toml(text: &str) -> Result<Self, GatewayError> {
        toml::from_str(text).map_err(|e| GatewayError::InvalidRequest(format!("backend registry: {e}")))
    }
}

/// Backends by id. `catalog` is always registered.
pub struct Gateway {
    backends: BTreeMap<String, Box<dyn Backend>>,
}

impl Default for Gateway {
    fn default() -> Self {
        let mut g = Gateway {
            backends: BTreeMap::new(),
        };
        g.register("catalog", Box::new(CatalogBackend));
        g
    }
}

impl Gateway {
    pub fn register(&mut self, id: impl Into<String>, backend: Box<dyn Backend>) {
        self.backends.insert(id.into(), backend);
    }

    /// Adds the remote and catalog entries of `config`. Builtins needing
    /// extra context (the reducer's oracle) are registered by the caller.
    pub fn from_config(config: &RegistryConfig) -> Result<Self, GatewayError> {
        let mut g = Gateway::default();
        for (id, spec) in &config.backends {
            match spec {
                BackendSpec::Remote { url, timeout_secs } => {
                    let t = timeout_secs.map_or(DEFAULT_TIMEOUT, Duration::from_secs);
                    g.register(id.clone(), Box::new(RemoteBackend::new(url.clone(), t)));
                }
                BackendSpec::Builtin { builtin } if builtin == "catalog" => {
                    g.register(id.clone(), Box::new(CatalogBackend));
                }
                BackendSpec::Builtin { builtin } if builtin == "reducer" => {}
                BackendSpec::Builtin { builtin } => {
                    return Err(GatewayError::UnknownBackend(builtin.clone()));
                }
            }
        }
        Ok(g)
    }

    pub fn has(&self, id: &str) -> bool {
        self.backends.contains_key(id)
    }

    pub fn generate(&self, request: &GeneratorRequest) -> Result<CandidateSet, GatewayError> {
        let backend = self
            .backends
            .get(&request.backend)
            .ok_or_else(|| GatewayError::UnknownBackend(request.backend.clone()))?;
        let mut set = backend.generate(request)?;
        set = CandidateSet::from_candidates(set.candidates);
        set.truncate(request.beam_size);
        Ok(set)
    }
}

/// Drops candidates whose significant tokens equal the original's. Returns
/// the kept set and the number removed.
pub fn filter_unaltered(set: CandidateSet, original: &MethodUnit) -> (CandidateSet, usize) {
    let orig = key(&original.source);
    let before = set.len();
    let kept: Vec<Candidate> = set.candidates.into_iter().filter(|c| key(&c.text) != orig).collect();
    let removed = before - kept.len();
    (CandidateSet { candidates: kept }, removed)
}

/// Orders by score (absent scores last), then SLOC reduction, then token
/// reduction, then text.
pub fn rank(mut set: CandidateSet, original: &MethodUnit) -> CandidateSet {
    let sloc_red = |c: &Candidate| original.sloc as i64 - sloc(&c.text) as i64;
    let tok_red = |c: &Candidate| original.token_count as i64 - token_count(&c.text) as i64;
    set.candidates.sort_by(|a, b| {
        let score = match (a.score, b.score) {
            (Some(x), Some(y)) => y.total_cmp(&x),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        };
        score
            .then_with(|| sloc_red(b).cmp(&sloc_red(a)))
            .then_with(|| tok_red(b).cmp(&tok_red(a)))
            .then_with(|| a.text.cmp(&b.text))
    });
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::{encode_localized, LocalizedPair};
    use crate::syntax::token_equal;
    use crate::test_fixtures::*;

    fn cand(text: &str, score: Option<f64>) -> Candidate {
        Candidate {
            text: text.into(),
            score,
            provenance: Provenance::Neural,
        }
    }

    #[test]
    fn prompt_template() {
        let p = build_prompt(AUDIT_LOGS);
        assert!(p.starts_with("Simplify the following java method: public Collection"));
        assert!(p.ends_with(", the simplified version is: "));
        assert_eq!(prompt_method(&p), Some(AUDIT_LOGS));
        assert_eq!(build_prompt(""), format!("{PROMPT_PREFIX}{PROMPT_SUFFIX}"));
        let localized = LocalizedPair::perfect(&parse_method(FIND_PRODUCT).unwrap(), &parse_method(FIND_PRODUCT_SIMPLE).unwrap());
        assert!(build_prompt(&localized.localized_original).contains("<original>"));
    }

    #[test]
    fn catalog_backend_inlines_return() {
        let g = Gateway::default();
        for (orig, simple) in [(CREATE, CREATE_SIMPLE), (CREATE_TOKEN, CREATE_TOKEN_SIMPLE)] {
            let set = g.generate(&GeneratorRequest::new("catalog", orig, 10)).unwrap();
            assert!(set.len() <= 10);
            assert!(set.candidates.iter().any(|c| token_equal(&c.text, simple)));
        }
        let one = g.generate(&GeneratorRequest::new("catalog", AUDIT_LOGS, 1)).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn catalog_backend_localized_foreach() {
        let orig = parse_method(FIND_PRODUCT).unwrap();
        let simple = parse_method(FIND_PRODUCT_SIMPLE).unwrap();
        let hunks = crate::localization::diff(&orig, &simple);
        let localized = encode_localized(&orig.source, &hunks, false);
        let set = CatalogBackend.generate(&GeneratorRequest::new("catalog", localized, 10)).unwrap();
        assert!(set.candidates.iter().any(|c| token_equal(&c.text, FIND_PRODUCT_SIMPLE)));
    }

    #[test]
    fn unknown_backend_and_bad_beam() {
        let g = Gateway::default();
        assert!(matches!(g.generate(&GeneratorRequest::new("nope", AUDIT_LOGS, 1)), Err(GatewayError::UnknownBackend(_))));
        assert!(matches!(g.generate(&GeneratorRequest::new("catalog", AUDIT_LOGS, 0)), Err(GatewayError::InvalidRequest(_))));
        assert!(matches!(g.generate(&GeneratorRequest::new("catalog", AUDIT_LOGS, 65)), Err(GatewayError::InvalidRequest(_))));
    }

    #[test]
    fn reducer_backend_trivial_oracle() {
        let b = ReducerBackend {
            oracle: Box::new(|_| Ok(true)),
        };
        let set = b
            .generate(&GeneratorRequest::new("reducer", "void f() {\n    a();\n    b();\n}\n", 5))
            .unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.candidates[0].text, "void f() {\n}\n");
        assert_eq!(set.candidates[0].provenance, Provenance::Deletion);
    }

    #[test]
    fn unaltered_filtering() {
        let orig = parse_method(AUDIT_LOGS).unwrap();
        let reformatted = AUDIT_LOGS.replace("    ", "\t");
        let set = CandidateSet::from_candidates([cand(&reformatted, Some(0.9)), cand(AUDIT_LOGS_SIMPLE, Some(0.5))]);
        let (kept, removed) = filter_unaltered(set, &orig);
        assert_eq!(removed, 1);
        assert_eq!(kept.candidates[0].text, AUDIT_LOGS_SIMPLE);
        let (none, removed) = filter_unaltered(CandidateSet::from_candidates([cand(AUDIT_LOGS, None)]), &orig);
        assert!(none.is_empty());
        assert_eq!(removed, 1);
    }

    #[test]
    fn dedup_by_significant_tokens() {
        let set = CandidateSet::from_candidates([cand("void f() { }", None), cand("void f() {}\n", None)]);
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn ranking() {
        let orig = parse_method("int f() {\n    int a = 1;\n    int b = 2;\n    return a + b;\n}\n").unwrap();
        let lo = cand("int f() {\n    return 3;\n}\n", Some(0.5));
        let hi = cand("int f() {\n    int b = 2;\n    return 1 + b;\n}\n", Some(0.9));
        let r = rank(CandidateSet::from_candidates([lo.clone(), hi.clone()]), &orig);
        assert_eq!(r.candidates, [hi.clone(), lo.clone()]);
        let three = cand("int f() {\n    int b = 2;\n    return 1 + b;\n}\n", Some(0.7));
        let four = cand("int f() {\n    int a = 1;\n    int b = 2;\n    return a+b+0;\n}\n", Some(0.7));
        let r = rank(CandidateSet::from_candidates([four.clone(), three.clone()]), &orig);
        assert_eq!(r.candidates[0], three);
        let x = cand("int f() { return x; }", None);
        let y = cand("int f() { return y; }", None);
        let r1 = rank(CandidateSet::from_candidates([y.clone(), x.clone()]), &orig);
        let r2 = rank(CandidateSet::from_candidates([x.clone(), y.clone()]), &orig);
        assert_eq!(r1, r2);
        assert_eq!(r1.candidates[0], x);
    }

    #[test]
    fn registry_toml() {
        let cfg = RegistryConfig::from_toml(
            "[backends.catalog]\nbuiltin = \"catalog\"\n\n[backends.t5]\nurl = \"http://127.0.0.1:9000\"\ntimeout_secs = 30\n",
        )
        .unwrap();
        assert_eq!(
            cfg.backends["t5"],
            BackendSpec::Remote {
                url: "http://127.0.0.1:9000".into(),
                timeout_secs: Some(30)
            }
        );
        let g = Gateway::from_config(&cfg).unwrap();
        assert!(g.has("t5") && g.has("catalog"));
        let bad = RegistryConfig::from_toml("[backends.x]\nbuiltin = \"magic\"\n").unwrap();
        assert!(Gateway::from_config(&bad).is_err());
    }
}
