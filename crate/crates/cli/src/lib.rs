//! The `hott` command line: batch checks over the kernel, the groupoid
//! model and the denotation of checked definitions.

pub mod config;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use grpd_tribe::corpus::{corpus, Corpus, CorpusKind};
use grpd_tribe::eq::univalence_check;
use grpd_tribe::exchange::{parse_spec, Document};
use grpd_tribe::fibration::homotopy_mono_check;
use grpd_tribe::functor::ho_hom_classes;
use grpd_tribe::omega::{classify_homotopy_mono, omega_classifier, sets_universe};
use grpd_tribe::suite::{document_suite, tribe_axiom_suite, CheckRecord, Outcome, Report as TribeReport, SuiteLimits};
use grpd_tribe::TribeError;
use hott_core::checker::{check_source, Report, Signature};
use hott_core::parser::print_term;
use hott_core::stdlib::{build_embedded, build_sources, parse_manifest, read_manifest};
use hott_denote::{DenoteError, Model};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{Cli, Command, Format, KernelFlags, ModelCommand};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Fail = 1,
    Usage = 2,
    ResourceCap = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Frontend(String),
    #[error(transparent)]
    Tribe(#[from] TribeError),
    #[error(transparent)]
    Denote(#[from] DenoteError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Frontend(_) => "frontend",
            CliError::Tribe(TribeError::ResourceCap { .. }) => "resource-cap",
            CliError::Tribe(_) => "tribe",
            CliError::Denote(e) => e.kind(),
        }
    }

    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage(_) => Exit::Usage,
            CliError::Tribe(TribeError::ResourceCap { .. }) => Exit::ResourceCap,
            CliError::Denote(e) if e.is_resource_cap() => Exit::ResourceCap,
            _ => Exit::Fail,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

/// A finished command: its verdict and both renderings of the report.
#[derive(Debug)]
pub struct Run {
    pub exit: Exit,
    pub json: Value,
    pub text: String,
}

impl Run {
    fn new(passed: bool, json: Value, text: String) -> Run {
        Run {
            exit: if passed { Exit::Pass } else { Exit::Fail },
            json,
            text,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("reports serialize"),
            Format::Text => self.text.clone(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Run, CliError> {
    if let Some(n) = cli.max_objects {
        std::env::set_var("HOTT_MAX_OBJECTS", n.to_string());
    }
    match &cli.command {
        Command::Check { files, kernel } => check_files(files, kernel),
        Command::Norm { file, name, kernel } => norm(file, name, kernel),
        Command::Stdlib { manifest, kernel } => stdlib(manifest.as_deref(), kernel),
        Command::Model(m) => match m {
            ModelCommand::Axioms { corpus } => axioms(corpus, cli.seed),
            ModelCommand::Univalent { k } => univalent(*k),
            ModelCommand::Omega { k, corpus } => omega(*k, corpus, cli.seed),
            ModelCommand::Ho { lhs, rhs } => ho(lhs, rhs),
        },
        Command::Denote { file, name, k, kernel } => denote(file, name, *k, kernel),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Files listed before `path` in a `manifest.txt` next to it.
fn prelude(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let manifest = dir.join("manifest.txt");
    if !manifest.is_file() {
        return Ok(Vec::new());
    }
    let Some(file) = path.file_name().and_then(|f| f.to_str()) else {
        return Ok(Vec::new());
    };
    let entries = parse_manifest(&read(&manifest)?);
    Ok(match entries.iter().position(|e| e == file) {
        Some(i) => entries[..i].iter().map(|e| dir.join(e)).collect(),
        None => Vec::new(),
    })
}

/// Checks files into one signature, loading manifest predecessors first.
struct Loader {
    sig: Signature,
    reports: HashMap<PathBuf, Report>,
    loaded: HashSet<PathBuf>,
}

impl Loader {
    fn new(kernel: &KernelFlags) -> Loader {
        Loader {
            sig: Signature::new(kernel.flags()),
            reports: HashMap::new(),
            loaded: HashSet::new(),
        }
    }

    fn key(path: &Path) -> PathBuf {
        path.canonicalize().unwrap_or_else(|_| path.to_path_buf())
    }

    fn check_one(&mut self, path: &Path) -> Result<Report, CliError> {
        let key = Loader::key(path);
        if let Some(r) = self.reports.get(&key) {
            return Ok(r.clone());
        }
        let src = read(path)?;
        let name = path.display().to_string();
        let report = match check_source(&mut self.sig, &name, &src, false) {
            Ok(r) => r,
            Err(e) => Report {
                decls: Vec::new(),
                frontend_errors: vec![format!("{name}: {e}")],
            },
        };
        self.loaded.insert(key.clone());
        self.reports.insert(key, report.clone());
        Ok(report)
    }

    fn load(&mut self, path: &Path) -> Result<Report, CliError> {
        for p in prelude(path)? {
            if !self.loaded.contains(&Loader::key(&p)) {
                let r = self.check_one(&p)?;
                if !r.frontend_errors.is_empty() {
                    return Err(CliError::Frontend(r.frontend_errors.join("; ")));
                }
            }
        }
        self.check_one(path)
    }
}

fn report_text(report: &Report) -> String {
    let mut out = String::new();
    for d in &report.decls {
        match &d.error {
            None => writeln!(out, "PASS {} ({:.1} ms)", d.name, d.elapsed_ms),
            Some(e) => writeln!(out, "FAIL {} [{}] {e}", d.name, d.error_kind.as_deref().unwrap_or("error")),
        }
        .expect("string write");
    }
    for e in &report.frontend_errors {
        writeln!(out, "FAIL {e}").expect("string write");
    }
    let failed = report.decls.iter().filter(|d| !d.passed).count() + report.frontend_errors.len();
    write!(out, "{} checked, {failed} failed", report.decls.len()).expect("string write");
    out
}

fn check_files(files: &[PathBuf], kernel: &KernelFlags) -> Result<Run, CliError> {
    let start = Instant::now();
    let mut loader = Loader::new(kernel);
    let mut report = Report::default();
    for f in files {
        report.extend(loader.load(f)?);
    }
    let passed = report.passed();
    let json = json!({
        "command": "check",
        "result": passed,
        "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "report": report,
        "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0,
    });
    Ok(Run::new(passed, json, report_text(&report)))
}

fn norm(file: &Path, name: &str, kernel: &KernelFlags) -> Result<Run, CliError> {
    let mut loader = Loader::new(kernel);
    let report = loader.load(file)?;
    if !report.frontend_errors.is_empty() {
        return Err(CliError::Frontend(report.frontend_errors.join("; ")));
    }
    if let Some(e) = loader.sig.failure(name) {
        let json = json!({ "command": "norm", "def": name, "result": false, "error": e.to_string(), "error_kind": e.root_cause().kind() });
        return Ok(Run::new(false, json, format!("FAIL {name} [{}] {e}", e.root_cause().kind())));
    }
    let nf = loader
        .sig
        .normal_form(name)
        .ok_or_else(|| CliError::Usage(format!("no definition named `{name}` in {}", file.display())))?;
    let ty = loader.sig.normal_type(name).expect("checked definitions have a type");
    let (nf, ty) = (print_term(&nf), print_term(&ty));
    let json = json!({ "command": "norm", "def": name, "result": true, "type": ty, "normal_form": nf });
    Ok(Run::new(true, json, format!("{name} : {ty}\n  = {nf}")))
}

fn stdlib(manifest: Option<&Path>, kernel: &KernelFlags) -> Result<Run, CliError> {
    let start = Instant::now();
    let mut sig = Signature::new(kernel.flags());
    let build = match manifest {
        None => build_embedded(&mut sig),
        Some(path) => {
            let files = read_manifest(path).map_err(|e| CliError::Io {
                path: e.path.clone(),
                source: e.source,
            })?;
            build_sources(&mut sig, files.iter().map(|(f, s)| (f.as_str(), s.as_str())))
        }
    };
    let passed = build.passed();
    let json = json!({
        "command": "stdlib",
        "result": passed,
        "report": build.report,
        "missing_required": build.missing_required,
        "missing_stretch": build.missing_stretch,
        "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0,
    });
    let mut text = report_text(&build.report);
    for m in &build.missing_required {
        write!(text, "\nMISSING required {m}").expect("string write");
    }
    for m in &build.missing_stretch {
        write!(text, "\nmissing stretch {m}").expect("string write");
    }
    Ok(Run::new(passed, json, text))
}

fn load_corpus(spec: &str) -> Result<Result<Corpus, Document>, CliError> {
    match spec {
        "default" => Ok(Ok(corpus(CorpusKind::Default))),
        "small" => Ok(Ok(corpus(CorpusKind::Small))),
        path if Path::new(path).is_file() => {
            let doc: Document = serde_json::from_str(&read(Path::new(path))?)
                .map_err(|e| CliError::Tribe(TribeError::Exchange(format!("{path}: {e}"))))?;
            Ok(Err(doc))
        }
        other => Err(CliError::Usage(format!(
            "unknown corpus `{other}`: expected default, small or a JSON file"
        ))),
    }
}

fn records_json(records: &[CheckRecord]) -> Value {
    serde_json::to_value(records).expect("records serialize")
}

fn records_text(records: &[CheckRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let verdict = if r.result { "PASS" } else { "FAIL" };
        write!(out, "{verdict} {} {}", r.check, r.instance).expect("string write");
        if let Some(w) = &r.witness {
            write!(out, ": {w}").expect("string write");
        }
        out.push('\n');
    }
    let failed = records.iter().filter(|r| !r.result).count();
    write!(out, "{} checks, {failed} failed", records.len()).expect("string write");
    out
}

fn sorted(mut report: TribeReport) -> TribeReport {
    report
        .records
        .sort_by(|a, b| (&a.instance, &a.check).cmp(&(&b.instance, &b.check)));
    report
}

fn axioms(spec: &str, seed: u64) -> Result<Run, CliError> {
    let start = Instant::now();
    let limits = SuiteLimits::default();
    let report = match load_corpus(spec)? {
        Ok(mut c) => {
            c.fibrations.shuffle(&mut StdRng::seed_from_u64(seed));
            tribe_axiom_suite(&c, &limits)
        }
        Err(doc) => document_suite(&doc, &limits),
    };
    let report = sorted(report);
    let passed = report.passed();
    let json = json!({
        "command": "model axioms",
        "corpus": spec,
        "result": passed,
        "records": records_json(&report.records),
        "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0,
    });
    Ok(Run::new(passed, json, records_text(&report.records)))
}

fn univalent(k: usize) -> Result<Run, CliError> {
    let start = Instant::now();
    let u = sets_universe(k)?;
    let v = univalence_check(&u.fib)?;
    let passed = v.arrows && v.agrees();
    let json = json!({
        "command": "model univalent",
        "check": "univalence",
        "instance": format!("U{k}"),
        "result": passed,
        "path_objects_agree": v.agrees(),
        "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0,
    });
    let text = format!(
        "{} univalence U{k} (path objects agree: {})",
        if passed { "PASS" } else { "FAIL" },
        v.agrees()
    );
    Ok(Run::new(passed, json, text))
}

fn omega(k: usize, spec: &str, seed: u64) -> Result<Run, CliError> {
    let start = Instant::now();
    let u = sets_universe(k)?;
    let om = omega_classifier(&u.fib)?;
    let mut report = TribeReport::default();
    let instance = format!("U{k}");
    report.run("omega-propositions-mono", instance.clone(), || {
        Ok(verdict(homotopy_mono_check(&om.pr)?, "Pr -> Ω is not a homotopy mono"))
    });
    report.run("omega-top-univalent", instance.clone(), || {
        let v = univalence_check(om.top())?;
        Ok(verdict(v.arrows && v.agrees(), "⊤ is not univalent"))
    });
    let mut c = match load_corpus(spec)? {
        Ok(c) => c,
        Err(doc) => {
            let mut c = Corpus {
                groupoids: Vec::new(),
                fibrations: Vec::new(),
            };
            for name in doc.functors.keys() {
                c.fibrations.push((name.clone(), doc.fibration(name)?));
            }
            c
        }
    };
    c.fibrations.shuffle(&mut StdRng::seed_from_u64(seed));
    for (name, f) in &c.fibrations {
        report.run("omega-classifies", name.clone(), || {
            let mono = homotopy_mono_check(f)?;
            let class = classify_homotopy_mono(&om, f)?;
            Ok(match (mono, class) {
                (false, None) => Outcome::Pass,
                (false, Some(_)) => Outcome::Fail("a non-mono was classified".into()),
                (true, None) => Outcome::Fail("no classifying map".into()),
                (true, Some(c)) if c.unique_up_to_homotopy && c.closed_under_homotopy => Outcome::Pass,
                (true, Some(_)) => Outcome::Fail("classifying map is not homotopy-unique".into()),
            })
        });
    }
    let report = sorted(report);
    let passed = report.passed();
    let json = json!({
        "command": "model omega",
        "k": k,
        "result": passed,
        "records": records_json(&report.records),
        "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0,
    });
    Ok(Run::new(passed, json, records_text(&report.records)))
}

fn verdict(ok: bool, why: &str) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(why.into())
    }
}

fn ho(lhs: &str, rhs: &str) -> Result<Run, CliError> {
    let (a, b) = (parse_spec(lhs)?, parse_spec(rhs)?);
    let classes = ho_hom_classes(&a, &b);
    let json = json!({ "command": "model ho", "lhs": lhs, "rhs": rhs, "result": true, "classes": classes });
    Ok(Run::new(true, json, format!("[{lhs}, {rhs}] has {classes} classes")))
}

fn denote(file: &Path, name: &str, k: u32, kernel: &KernelFlags) -> Result<Run, CliError> {
    let start = Instant::now();
    let mut loader = Loader::new(kernel);
    let report = loader.load(file)?;
    if !report.frontend_errors.is_empty() {
        return Err(CliError::Frontend(report.frontend_errors.join("; ")));
    }
    if loader.sig.get(name).is_none() {
        return Err(CliError::Usage(format!("no checked definition named `{name}` in {}", file.display())));
    }
    let model = Model::new(&loader.sig, k)?;
    let d = model.denote_decl(name)?;
    let (ctx, total) = (&d.context.groupoid, &d.extension.total.groupoid);
    let values: Vec<String> = d.values().iter().map(|v| v.to_string()).collect();
    let json = json!({
        "command": "denote",
        "def": name,
        "k": k,
        "result": true,
        "context": { "objects": ctx.object_count(), "morphisms": ctx.morphism_count() },
        "total": { "objects": total.object_count(), "morphisms": total.morphism_count() },
        "section": { "objects": d.section.obj, "morphisms": d.section.mor },
        "values": values,
        "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0,
    });
    let mut text = format!(
        "PASS denote {name} at k = {k}: context {}/{}, type {}/{} (objects/morphisms)",
        ctx.object_count(),
        ctx.morphism_count(),
        total.object_count(),
        total.morphism_count()
    );
    for (o, v) in values.iter().enumerate() {
        write!(text, "\n  {o} |-> {v}").expect("string write");
    }
    Ok(Run::new(true, json, text))
}
