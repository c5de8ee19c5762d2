//! Command-line front end. `run` parses arguments, dispatches to the
//! library and renders text, JSON or CSV.
//!
//! Exit codes: 0 success, 1 conformance failure or I/O error, 2 usage,
//! 3 engine inconsistency, 4 search exhaustion, 5 known discrepancies only.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::conformance::{self, words, ConformanceOptions, SetDiff, SigmaEntry};
use crate::ekor::{
    admissible_set, calibrate, closure_down_set, ekor_set, is_basic, newton_point, sigma_k,
    support, Convention, EkorError, FiberRelation, GeneratorSet, SigmaError,
};
use crate::golden;
use crate::lattice::{
    enumerate_web, find_base_points, partner_report, spin_index, FieldSpec, Inclusion,
    LatticeDisplay, LatticeError, LatticeExport, Model, SearchConfig, Side, Stratum,
};
use crate::weyl::{Coweight, Element};

pub const CONFIG_ENV: &str = "PARAHORIC_CONFIG";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "parahoric",
    version,
    about = "EKOR strata and lattice fibers in type C2-tilde"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value config file; overrides the environment variable.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct LevelArg {
    /// iwahori, paramodular or siegel.
    #[arg(long, conflicts_with = "k")]
    pub level: Option<String>,
    /// Explicit generator subset such as `s0,s2`.
    #[arg(long = "K", id = "k", alias = "k")]
    pub k: Option<String>,
}

impl LevelArg {
    fn resolve(&self, default: Option<GeneratorSet>) -> Result<GeneratorSet, CliError> {
        match (&self.level, &self.k, default) {
            (Some(s), _, _) | (None, Some(s), _) => GeneratorSet::parse_level(s).map_err(usage),
            (None, None, Some(d)) => Ok(d),
            (None, None, None) => Err(CliError::Usage("one of --level or --K is required".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissible elements with length, support, basic flag and Newton point.
    Adm {
        #[arg(long, default_value = "1/2,1/2")]
        mu: String,
        #[arg(long)]
        basic_only: bool,
    },
    /// EKOR index set at a level.
    Ekor {
        #[command(flatten)]
        level: LevelArg,
        /// Include non-basic elements.
        #[arg(long)]
        all: bool,
        /// A convention tuple such as `left:s-w-sigma:twisted`, or `auto`.
        #[arg(long)]
        convention: Option<String>,
    },
    /// Fibers of the level map from the Iwahori level.
    Fibers {
        #[arg(long, default_value = "iwahori")]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        convention: Option<String>,
    },
    /// `Σ_K` of one element.
    SigmaK {
        #[arg(long)]
        w: String,
        #[command(flatten)]
        level: LevelArg,
        #[arg(long)]
        convention: Option<String>,
    },
    /// Admissible Bruhat down-set of one element.
    Closure {
        #[arg(long)]
        w: String,
        #[arg(long)]
        all: bool,
    },
    /// Newton point of one element.
    Newton {
        #[arg(long)]
        w: String,
    },
    /// Lattice model.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Calibration, reference-table diffs and lattice counts.
    Conformance {
        #[arg(long)]
        convention: Option<String>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<usize>,
        /// Skip the lattice section.
        #[arg(long)]
        no_lattice: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum LatticeCommand {
    /// Base points of a stratum and their retained web pairs.
    Fibers {
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        stratum: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of base points.
        #[arg(long, default_value_t = 1)]
        sample: usize,
        #[arg(long)]
        budget: Option<usize>,
        /// Write a certificate of every retained pair: JSON for a `.json`
        /// path, plain text otherwise.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Engine(String),
    #[error("{0}")]
    Exhausted(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Engine(_) => 3,
            CliError::Exhausted(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_err<E: std::fmt::Display>(path: &Path, e: E) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::NotFound { .. } => CliError::Exhausted(e.to_string()),
            LatticeError::UnsupportedField { .. }
            | LatticeError::FieldTooSmall { .. }
            | LatticeError::UnknownStratum(_)
            | LatticeError::WrongStratum(_) => CliError::Usage(e.to_string()),
            _ => CliError::Engine(e.to_string()),
        }
    }
}

/// Values read from a `key=value` config file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub convention: Option<String>,
    pub p: Option<u32>,
    pub j: Option<u32>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub format: Option<Format>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut c = Config::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| CliError::Usage(format!("config line {}: {what}", n + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            let value = value.trim();
            let num = |what: &str| bad(&format!("bad {what} `{value}`"));
            match key.trim() {
                "convention" => c.convention = Some(value.to_string()),
                "p" => c.p = Some(value.parse().map_err(|_| num("p"))?),
                "j" => c.j = Some(value.parse().map_err(|_| num("j"))?),
                "seed" => c.seed = Some(value.parse().map_err(|_| num("seed"))?),
                "budget" => c.budget = Some(value.parse().map_err(|_| num("budget"))?),
                "format" => {
                    c.format = Some(Format::from_str(value, true).map_err(|_| num("format"))?)
                }
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Config::parse(&text)
    }
}

/// Envelope shared by every JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub command: String,
    pub convention: Option<Convention>,
    pub result: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmRecord {
    pub element: String,
    pub length: usize,
    pub support: GeneratorSet,
    pub basic: bool,
    pub newton: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmResult {
    pub mu: Coweight,
    pub basic_only: bool,
    pub records: Vec<AdmRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EkorRecord {
    pub element: String,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EkorResult {
    pub level: GeneratorSet,
    pub basic_only: bool,
    pub records: Vec<EkorRecord>,
    /// Diff against the reference table, when one exists for this level.
    pub reference: Option<SetDiff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberRecord {
    pub target: String,
    pub fiber: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibersResult {
    pub from: GeneratorSet,
    pub to: GeneratorSet,
    pub rows: Vec<FiberRecord>,
    pub defects: Vec<SigmaEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaResultRecord {
    pub element: String,
    pub level: GeneratorSet,
    pub value: Result<Vec<String>, SigmaError>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureResult {
    pub element: String,
    pub basic_only: bool,
    pub records: Vec<EkorRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonResult {
    pub element: String,
    pub newton: String,
    pub numerators: [i64; 2],
    pub denominator: i64,
    pub basic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: LatticeExport,
    pub description: String,
    pub stratum: Stratum,
    pub count: usize,
    pub expected: usize,
    pub certified: bool,
    pub spin_index: usize,
    pub s_multiplicities: Vec<usize>,
    pub t_multiplicities: Vec<usize>,
    pub partners_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeResult {
    pub field: FieldSpec,
    pub stratum: Stratum,
    pub seed: u64,
    pub budget: usize,
    pub points: Vec<PointRecord>,
    pub certificate: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedPair {
    pub s0: LatticeExport,
    pub t0: LatticeExport,
    pub inclusions: Vec<Inclusion>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedWeb {
    pub point: LatticeExport,
    pub pairs: Vec<CertifiedPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub field: FieldSpec,
    pub stratum: Stratum,
    pub webs: Vec<CertifiedWeb>,
}

impl Certificate {
    /// One line per lattice and per verified inclusion, indented by nesting.
    pub fn to_text(&self) -> String {
        let show = |e: &LatticeExport| LatticeDisplay(e.clone()).to_string();
        let f = &self.field;
        let mut s = format!(
            "certificate v{} p={} j={} Q={} modulus={:?} stratum={}\n",
            self.schema_version, f.p, f.j, f.q, f.modulus, self.stratum
        );
        for (i, web) in self.webs.iter().enumerate() {
            s += &format!(
                "web {i} M0 {} pairs {}\n",
                show(&web.point),
                web.pairs.len()
            );
            for (k, pair) in web.pairs.iter().enumerate() {
                s += &format!("  pair {k} S0 {} T0 {}\n", show(&pair.s0), show(&pair.t0));
                for inc in &pair.inclusions {
                    s += &format!("    {} index {}\n", inc.name, inc.index);
                }
            }
        }
        s
    }
}

/// A rendered command result and its exit code.
struct Output {
    json: Value,
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
    code: i32,
}

impl Output {
    fn new<T: Serialize>(command: &str, convention: Option<Convention>, result: &T) -> Output {
        let report = Report {
            schema_version: conformance::SCHEMA_VERSION,
            command: command.into(),
            convention,
            result,
        };
        Output {
            json: serde_json::to_value(&report).expect("report serializes"),
            headers: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
            code: 0,
        }
    }

    fn table(mut self, headers: Vec<&'static str>, rows: Vec<Vec<String>>) -> Output {
        self.headers = headers;
        self.rows = rows;
        self
    }

    fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                Ok(serde_json::to_string_pretty(&self.json).expect("json value") + "\n")
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&self.headers).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("utf-8 csv"))
            }
            Format::Text => {
                let mut widths: Vec<usize> =
                    self.headers.iter().map(|h| h.chars().count()).collect();
                for r in &self.rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: Vec<&str>| -> String {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                        .collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut s = line(self.headers.clone());
                for r in &self.rows {
                    s += &line(r.iter().map(String::as_str).collect());
                }
                for n in &self.notes {
                    s += n;
                    s += "\n";
                }
                Ok(s)
            }
        }
    }
}

/// Settings after merging flags, config and defaults.
struct Settings {
    config: Config,
}

impl Settings {
    fn convention(&self, flag: &Option<String>) -> Result<Convention, CliError> {
        match flag.as_deref().or(self.config.convention.as_deref()) {
            None | Some("auto") => {
                let adm = admissible_set(golden::MU).expect("μ is dominant");
                Ok(calibrate(&adm, &golden::paramodular_anchors()).chosen)
            }
            Some(s) => s.parse().map_err(CliError::Usage),
        }
    }

    fn search(&self, seed: Option<u64>, budget: Option<usize>, sample: usize) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            seed: seed.or(self.config.seed).unwrap_or(d.seed),
            budget: budget.or(self.config.budget).unwrap_or(d.budget),
            sample_size: sample,
        }
    }

    fn field(&self, p: Option<u32>, j: Option<u32>) -> (u32, u32) {
        (
            p.or(self.config.p).unwrap_or(3),
            j.or(self.config.j).unwrap_or(2),
        )
    }
}

fn parse_word(w: &str) -> Result<Element, CliError> {
    w.parse::<Element>().map_err(usage)
}

fn ekor_error(e: EkorError) -> CliError {
    match e {
        EkorError::NotDominant(_) | EkorError::OffLattice(_) | EkorError::UnknownLevel(_) => {
            usage(e)
        }
        _ => CliError::Engine(e.to_string()),
    }
}

fn reference_table(level: GeneratorSet) -> Option<&'static [&'static str]> {
    if level == GeneratorSet::paramodular() {
        Some(golden::PARAMODULAR_TABLE)
    } else if level == GeneratorSet::iwahori() {
        Some(golden::IWAHORI_TABLE)
    } else if level == GeneratorSet::siegel() {
        Some(golden::SIEGEL_TABLE)
    } else {
        None
    }
}

fn cmd_adm(mu: &str, basic_only: bool) -> Result<Output, CliError> {
    let mu: Coweight = mu.parse().map_err(usage)?;
    let adm = admissible_set(mu).map_err(ekor_error)?;
    let mut records = Vec::new();
    for w in adm.sorted() {
        let basic = is_basic(&w);
        if basic_only && !basic {
            continue;
        }
        let newton = newton_point(&w).map_err(ekor_error)?;
        records.push(AdmRecord {
            element: w.word_string(),
            length: w.length(),
            support: support(&w),
            basic,
            newton: newton.to_string(),
        });
    }
    let rows = records
        .iter()
        .map(|r| {
            vec![
                r.element.clone(),
                r.length.to_string(),
                r.support.to_string(),
                r.basic.to_string(),
                r.newton.clone(),
            ]
        })
        .collect();
    let result = AdmResult {
        mu,
        basic_only,
        records,
    };
    Ok(Output::new("adm", None, &result).table(
        vec!["element", "length", "support", "basic", "newton"],
        rows,
    ))
}

fn cmd_ekor(level: GeneratorSet, all: bool, convention: Convention) -> Result<Output, CliError> {
    let adm = admissible_set(golden::MU).expect("μ is dominant");
    let set = ekor_set(&adm, level, !all, convention.coset);
    let records: Vec<EkorRecord> = set
        .sorted()
        .iter()
        .map(|w| EkorRecord {
            element: w.word_string(),
            dimension: w.length(),
        })
        .collect();
    let reference = reference_table(level)
        .filter(|_| !all)
        .map(|t| SetDiff::new(&set.elements, &golden::parse_set(t)));
    let rows = records
        .iter()
        .map(|r| vec![r.element.clone(), r.dimension.to_string()])
        .collect();
    let mut out = Output::new(
        "ekor",
        Some(convention),
        &EkorResult {
            level,
            basic_only: !all,
            records,
            reference: reference.clone(),
        },
    )
    .table(vec!["element", "dimension"], rows);
    if let Some(d) = reference.filter(|d| !d.is_match()) {
        let tag = if level == GeneratorSet::siegel() {
            "KNOWN_DISCREPANCY"
        } else {
            "DISCREPANCY"
        };
        out.notes.push(format!(
            "{tag} against reference table: missing [{}], extra [{}]",
            d.missing.join(", "),
            d.extra.join(", ")
        ));
    }
    Ok(out)
}

fn cmd_fibers(from: &str, to: GeneratorSet, convention: Convention) -> Result<Output, CliError> {
    let from = GeneratorSet::parse_level(from).map_err(usage)?;
    if from != GeneratorSet::iwahori() {
        return Err(CliError::Usage("only --from iwahori is supported".into()));
    }
    let adm = admissible_set(golden::MU).expect("μ is dominant");
    let relation = FiberRelation::compute(&adm, to, convention);
    let rows: Vec<FiberRecord> = conformance::fiber_rows(&relation)
        .into_iter()
        .map(|(target, fiber)| FiberRecord { target, fiber })
        .collect();
    let defects: Vec<SigmaEntry> = relation
        .defects()
        .iter()
        .map(|(w, r)| SigmaEntry {
            element: w.word_string(),
            value: r.as_ref().map(words).map_err(|e| e.to_string()),
        })
        .collect();
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.target.clone(),
                r.fiber.len().to_string(),
                r.fiber.join("; "),
            ]
        })
        .collect();
    let mut out = Output::new(
        "fibers",
        Some(convention),
        &FibersResult {
            from,
            to,
            rows,
            defects: defects.clone(),
        },
    )
    .table(vec!["target", "size", "fiber"], table);
    for d in &defects {
        let what = match &d.value {
            Ok(v) => format!("MULTI_VALUED: Σ({}) = {{{}}}", d.element, v.join(", ")),
            Err(e) => format!("NON_CONFLUENT: {e}"),
        };
        out.notes.push(what);
    }
    if !defects.is_empty() {
        out.code = 3;
    }
    Ok(out)
}

fn cmd_sigma_k(w: &str, level: GeneratorSet, convention: Convention) -> Result<Output, CliError> {
    let w = parse_word(w)?;
    let value = sigma_k(&w, level, convention);
    let record = SigmaResultRecord {
        element: w.word_string(),
        level,
        value: value.as_ref().map(words).map_err(Clone::clone),
    };
    let shown = match &record.value {
        Ok(v) => format!("{{{}}}", v.join(", ")),
        Err(e) => e.to_string(),
    };
    let mut out = Output::new("sigma-k", Some(convention), &record).table(
        vec!["element", "level", "sigma"],
        vec![vec![record.element.clone(), level.to_string(), shown]],
    );
    match &value {
        Ok(v) if v.len() == 1 => {}
        Ok(v) => {
            out.notes.push(format!("MULTI_VALUED: {} values", v.len()));
            out.code = 3;
        }
        Err(e) => {
            out.notes.push(format!("NON_CONFLUENT: {e}"));
            out.code = 3;
        }
    }
    Ok(out)
}

fn cmd_closure(w: &str, all: bool) -> Result<Output, CliError> {
    let w = parse_word(w)?;
    let adm = admissible_set(golden::MU).expect("μ is dominant");
    if !adm.contains(&w) {
        return Err(CliError::Usage(format!(
            "{} is not admissible",
            w.word_string()
        )));
    }
    let down = closure_down_set(&adm, &w, !all);
    let records: Vec<EkorRecord> = crate::weyl::sorted_for_display(down)
        .iter()
        .map(|v| EkorRecord {
            element: v.word_string(),
            dimension: v.length(),
        })
        .collect();
    let rows = records
        .iter()
        .map(|r| vec![r.element.clone(), r.dimension.to_string()])
        .collect();
    let result = ClosureResult {
        element: w.word_string(),
        basic_only: !all,
        records,
    };
    Ok(Output::new("closure", None, &result).table(vec!["element", "dimension"], rows))
}

fn cmd_newton(w: &str) -> Result<Output, CliError> {
    let w = parse_word(w)?;
    let nu = newton_point(&w).map_err(ekor_error)?;
    let result = NewtonResult {
        element: w.word_string(),
        newton: nu.to_string(),
        numerators: nu.numerators,
        denominator: nu.denominator,
        basic: is_basic(&w),
    };
    let row = vec![
        result.element.clone(),
        result.newton.clone(),
        result.basic.to_string(),
    ];
    Ok(Output::new("newton", None, &result).table(vec!["element", "newton", "basic"], vec![row]))
}

fn cmd_lattice(
    (p, j): (u32, u32),
    stratum: &str,
    config: SearchConfig,
    certificate: Option<&Path>,
) -> Result<Output, CliError> {
    let stratum: Stratum = stratum.parse()?;
    if stratum == Stratum::Outside {
        return Err(CliError::Usage(
            "stratum must be superspecial, type0, type2 or type02".into(),
        ));
    }
    let model = Model::new(p, j)?;
    let points = find_base_points(&model, stratum, &config)?;
    let mut records = Vec::new();
    let mut webs = Vec::new();
    for m in &points {
        let web = enumerate_web(&model, m)?;
        let s = partner_report(&web, Side::S);
        let t = partner_report(&web, Side::T);
        records.push(PointRecord {
            point: model.export(m),
            description: model.describe(m).to_string(),
            stratum: web.stratum,
            count: web.count(),
            expected: stratum.expected_web_count(model.q()).unwrap_or(0),
            certified: web.all_certified(),
            spin_index: spin_index(&model, m)?,
            s_multiplicities: s.multiplicities,
            t_multiplicities: t.multiplicities,
            partners_ok: conformance::partners_ok(&web),
        });
        webs.push(CertifiedWeb {
            point: model.export(m),
            pairs: web
                .pairs
                .iter()
                .map(|p| CertifiedPair {
                    s0: model.export(&p.s0),
                    t0: model.export(&p.t0),
                    inclusions: p.inclusions.clone(),
                })
                .collect(),
        });
    }
    if let Some(path) = certificate {
        let cert = Certificate {
            schema_version: conformance::SCHEMA_VERSION,
            field: model.field_spec().clone(),
            stratum,
            webs,
        };
        let text = if path.extension().is_some_and(|e| e == "json") {
            serde_json::to_string_pretty(&cert).expect("certificate serializes")
        } else {
            cert.to_text()
        };
        fs::write(path, text).map_err(|e| io_err(path, e))?;
    }
    let rows = records
        .iter()
        .map(|r| {
            vec![
                r.description.clone(),
                r.count.to_string(),
                r.expected.to_string(),
                r.certified.to_string(),
                r.spin_index.to_string(),
                r.partners_ok.to_string(),
            ]
        })
        .collect();
    let bad: Vec<String> = records
        .iter()
        .filter(|r| !(r.certified && r.spin_index <= 1 && r.partners_ok))
        .map(|r| r.description.clone())
        .collect();
    let result = LatticeResult {
        field: model.field_spec().clone(),
        stratum,
        seed: config.seed,
        budget: config.budget,
        points: records,
        certificate: certificate.map(Path::to_path_buf),
    };
    let mut out = Output::new("lattice fibers", None, &result).table(
        vec![
            "point",
            "count",
            "expected",
            "certified",
            "spin",
            "partners_ok",
        ],
        rows,
    );
    out.notes.push(format!(
        "Q = {}, stratum {stratum}, seed {}",
        model.q(),
        config.seed
    ));
    if let Some(path) = certificate {
        out.notes.push(format!("certificate: {}", path.display()));
    }
    if !bad.is_empty() {
        out.notes
            .push(format!("certificate check failed for {}", bad.join(", ")));
        out.code = 3;
    }
    Ok(out)
}

fn cmd_conformance(
    settings: &Settings,
    convention: &Option<String>,
    field: (u32, u32),
    config: SearchConfig,
    no_lattice: bool,
) -> Result<Output, CliError> {
    let convention = match convention
        .as_deref()
        .or(settings.config.convention.as_deref())
    {
        None | Some("auto") => None,
        Some(s) => Some(s.parse::<Convention>().map_err(CliError::Usage)?),
    };
    let options = ConformanceOptions {
        convention,
        lattice: (!no_lattice).then_some((field.0, field.1, config)),
    };
    let report = conformance::run(&options)?;
    let rows = report
        .statuses()
        .into_iter()
        .map(|(name, status)| {
            vec![
                name,
                serde_json::to_value(status)
                    .unwrap()
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
            ]
        })
        .collect();
    let mut out = Output {
        json: serde_json::to_value(&report).expect("report serializes"),
        headers: vec!["target", "status"],
        rows,
        notes: Vec::new(),
        code: report.exit_code,
    };
    out.notes.push(format!(
        "convention {} (score {})",
        report.convention, report.calibration.max_score
    ));
    for f in report
        .fibers
        .iter()
        .filter(|f| f.status != conformance::Status::Match)
    {
        for r in f.rows.iter().filter(|r| !r.diff.is_match()) {
            out.notes.push(format!(
                "{} ({}) row {}: missing [{}], extra [{}]",
                f.name,
                f.reading,
                r.target,
                r.diff.missing.join(", "),
                r.diff.extra.join(", ")
            ));
        }
        for r in &f.unlisted {
            out.notes.push(format!(
                "{} ({}) unlisted target {}: [{}]",
                f.name,
                f.reading,
                r.target,
                r.diff.extra.join(", ")
            ));
        }
    }
    for t in report
        .tables
        .iter()
        .filter(|t| t.status != conformance::Status::Match)
    {
        out.notes.push(format!(
            "{}: missing [{}], extra [{}]",
            t.name,
            t.diff.missing.join(", "),
            t.diff.extra.join(", ")
        ));
    }
    if let Some(l) = &report.lattice {
        for c in &l.counts {
            let widened = if c.widened_from.is_empty() {
                String::new()
            } else {
                format!(" (none at Q in {:?})", c.widened_from)
            };
            out.notes.push(format!(
                "lattice {}: Q = {}, count {}, expected {}{widened}",
                c.stratum,
                c.q,
                c.count.map_or("NOT_FOUND".into(), |n| n.to_string()),
                c.expected
            ));
        }
    }
    out.notes.push(format!("exit {}", report.exit_code));
    Ok(out)
}

fn dispatch(cli: &Cli, settings: &Settings) -> Result<Output, CliError> {
    match &cli.command {
        Command::Adm { mu, basic_only } => cmd_adm(mu, *basic_only),
        Command::Ekor {
            level,
            all,
            convention,
        } => cmd_ekor(level.resolve(None)?, *all, settings.convention(convention)?),
        Command::Fibers {
            from,
            to,
            convention,
        } => cmd_fibers(
            from,
            GeneratorSet::parse_level(to).map_err(usage)?,
            settings.convention(convention)?,
        ),
        Command::SigmaK {
            w,
            level,
            convention,
        } => cmd_sigma_k(w, level.resolve(None)?, settings.convention(convention)?),
        Command::Closure { w, all } => cmd_closure(w, *all),
        Command::Newton { w } => cmd_newton(w),
        Command::Lattice {
            command:
                LatticeCommand::Fibers {
                    p,
                    j,
                    stratum,
                    seed,
                    sample,
                    budget,
                    certificate,
                },
        } => {
            let config = settings.search(*seed, *budget, (*sample).max(1));
            cmd_lattice(
                settings.field(*p, *j),
                stratum,
                config,
                certificate.as_deref(),
            )
        }
        Command::Conformance {
            convention,
            p,
            j,
            seed,
            budget,
            no_lattice,
        } => {
            let config = settings.search(*seed, *budget, 1);
            cmd_conformance(
                settings,
                convention,
                settings.field(*p, *j),
                config,
                *no_lattice,
            )
        }
    }
}

/// Runs one invocation. `env_config` stands in for the config environment
/// variable.
pub fn run_with<I, T>(
    args: I,
    env_config: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = (|| {
        let config = match cli.config.clone().or(env_config) {
            Some(path) => Config::load(&path)?,
            None => Config::default(),
        };
        let format = cli.format.or(config.format).unwrap_or_default();
        let settings = Settings { config };
        let output = dispatch(&cli, &settings)?;
        let text = output.render(format)?;
        match &cli.out {
            Some(path) => fs::write(path, &text).map_err(|e| io_err(path, e))?,
            None => out
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?,
        }
        if output.code != 0 {
            let flagged = ["MULTI_VALUED", "NON_CONFLUENT", "failed"];
            for n in output
                .notes
                .iter()
                .filter(|n| flagged.iter().any(|f| n.contains(f)))
            {
                let _ = writeln!(err, "{n}");
            }
        }
        Ok::<i32, CliError>(output.code)
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one invocation, reading the config path from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        std::env::var_os(CONFIG_ENV).map(PathBuf::from),
        out,
        err,
    )
}
