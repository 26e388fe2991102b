//! Command-line front end: job configuration, the four pipelines, and
//! report output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automorphic::{
    assemble_hecke, assemble_in, classical_brandt, commutator_check, fundamental_domains, BlockMatrix, Convention,
    Degrees, GlobalSpace, Layout, LayoutChoice,
};
use crate::error::{Error, Result};
use crate::fredholm::{
    classicality_compare, family_series, fredholm_series, link_invariance, small_slope_bound, stabilization_scan,
    FredholmSeries, SlopeTable, Verdict,
};
use crate::induced::{ModuleSpec, Weight};
use crate::padic::modular::{is_odd_prime, val_i128, Zmod};
use crate::quaternion::{build_double_quotient, enumerate_norm, hecke_coset_data, DoubleQuotient, HeckeCosetData, Level, Operator};
use crate::weight::{TorusCharacter, WeightDisc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("format `{s}`: expected json or csv"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// A family of weights: center * <u>^s on |s| <= p^-valuation, with the
/// algebraic shifts n at which to specialize. `order` overrides the
/// configured s-order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub center: String,
    pub valuation: u32,
    pub order: Option<usize>,
    pub at: Vec<i64>,
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// `[center=]n1,n2[,tame=e1:e2] [radius=r] [order=S] [at=n|n|...]`;
    /// `v=` is accepted for `radius=`.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace().peekable();
        let first = tokens.next().ok_or_else(|| Error::Config("empty family".into()))?;
        let center = first.strip_prefix("center=").unwrap_or(first).to_string();
        center.parse::<TorusCharacter>().map_err(|e| Error::Config(e.to_string()))?;
        let mut spec = FamilySpec { center, valuation: 0, order: None, at: vec![0] };
        for tok in tokens {
            let bad = || Error::Config(format!("family token `{tok}`: expected radius=r, order=S or at=n|n|..."));
            let (k, v) = tok.split_once('=').ok_or_else(bad)?;
            match k {
                "v" | "radius" => spec.valuation = v.parse().map_err(|_| bad())?,
                "order" => spec.order = Some(v.parse().map_err(|_| bad())?),
                "at" => {
                    spec.at = v.split('|').map(|x| x.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<_>>()?
                }
                _ => return Err(bad()),
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at: Vec<String> = self.at.iter().map(|n| n.to_string()).collect();
        write!(f, "center={} radius={}", self.center, self.valuation)?;
        if let Some(o) = self.order {
            write!(f, " order={o}")?;
        }
        write!(f, " at={}", at.join("|"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobConfig {
    pub p: u64,
    pub level: Level,
    pub weight: String,
    pub family: Option<FamilySpec>,
    pub ops: Vec<String>,
    pub degree_cutoff: usize,
    pub t_degree: usize,
    pub s_order: usize,
    pub precision: u32,
    pub radius: Option<u32>,
    pub normalized: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub cosets: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            p: 3,
            level: Level::Iwahori,
            weight: "0,0".into(),
            family: None,
            ops: vec!["U".into()],
            degree_cutoff: 50,
            t_degree: 12,
            s_order: 8,
            precision: 30,
            radius: None,
            normalized: false,
            format: Format::Json,
            out: None,
            cosets: None,
        }
    }
}

const KEYS: &[&str] = &[
    "p",
    "level",
    "weight",
    "family",
    "ops",
    "degree-cutoff",
    "t-degree",
    "s-order",
    "precision",
    "radius",
    "normalized",
    "format",
    "out",
    "cosets",
];

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("boolean `{s}`: expected true or false"))),
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key} = `{v}` is not a valid number")))
}

impl JobConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "p" => self.p = num(key, v)?,
            "level" => self.level = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "weight" => self.weight = v.to_string(),
            "family" => self.family = if v.is_empty() { None } else { Some(v.parse()?) },
            "ops" => self.ops = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "degree-cutoff" => self.degree_cutoff = num(key, v)?,
            "t-degree" => self.t_degree = num(key, v)?,
            "s-order" => self.s_order = num(key, v)?,
            "precision" => self.precision = num(key, v)?,
            "radius" => self.radius = if v.is_empty() { None } else { Some(num(key, v)?) },
            "normalized" => self.normalized = parse_bool(v)?,
            "format" => self.format = v.parse()?,
            "out" => self.out = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "cosets" => self.cosets = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Read `key = value` lines; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut c = JobConfig::default();
        c.apply_kv(text)?;
        Ok(c)
    }

    pub fn to_kv(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|x| x.display().to_string()).unwrap_or_default();
        let vals: BTreeMap<&str, String> = [
            ("p", self.p.to_string()),
            ("level", self.level.to_string()),
            ("weight", self.weight.clone()),
            ("family", self.family.as_ref().map(|f| f.to_string()).unwrap_or_default()),
            ("ops", self.ops.join(",")),
            ("degree-cutoff", self.degree_cutoff.to_string()),
            ("t-degree", self.t_degree.to_string()),
            ("s-order", self.s_order.to_string()),
            ("precision", self.precision.to_string()),
            ("radius", self.radius.map(|r| r.to_string()).unwrap_or_default()),
            ("normalized", self.normalized.to_string()),
            ("format", self.format.to_string()),
            ("out", path(&self.out)),
            ("cosets", path(&self.cosets)),
        ]
        .into_iter()
        .collect();
        KEYS.iter().map(|k| format!("{k} = {}\n", vals[k])).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 2 {
            return Err(Error::RamifiedPlace);
        }
        if !is_odd_prime(self.p) {
            return Err(Error::NotOddPrime(self.p));
        }
        if self.degree_cutoff == 0 || self.t_degree == 0 || self.precision == 0 {
            return Err(Error::Config("degree-cutoff, t-degree and precision must be positive".into()));
        }
        self.weight_character()?;
        self.operators()?;
        let max = Zmod::max_digits(self.p);
        if self.precision + self.k() + 4 > max {
            return Err(Error::Config(format!("precision {} is too large at p = {}", self.precision, self.p)));
        }
        Ok(())
    }

    pub fn weight_character(&self) -> Result<TorusCharacter> {
        self.weight.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn operators(&self) -> Result<Vec<Operator>> {
        let mut out = Vec::new();
        for s in &self.ops {
            let op = Operator::parse(s, self.p).map_err(|e| Error::Config(e.to_string()))?;
            if !out.contains(&op) {
                out.push(op);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no operators given".into()));
        }
        Ok(out)
    }

    pub fn k(&self) -> u32 {
        self.radius.unwrap_or(1).max(1)
    }

    pub fn convention(&self) -> Convention {
        if self.normalized {
            Convention::Normalized
        } else {
            Convention::Indicator
        }
    }
}

/// Exit code for an error: 2 for configuration problems, 3 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse(_)
        | Error::NotOddPrime(_)
        | Error::RamifiedPlace
        | Error::InvalidOperator(_)
        | Error::NonDominant { .. }
        | Error::PrimeMismatch(..)
        | Error::PrecisionTooLarge { .. } => EXIT_CONFIG,
        _ => EXIT_CERTIFICATION,
    }
}

/// What a pipeline produced: the report and, when a check failed, the
/// reason (exit code 3 after the report is written).
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub csv: String,
    pub failure: Option<String>,
}

fn report_header(cmd: &str, cfg: &JobConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("artifact".into(), json!(env!("CARGO_PKG_NAME")));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(cmd));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m.insert("convention".into(), json!(cfg.convention().tag()));
    m
}

fn csv_rows(label: &str, weight: &str, table: &SlopeTable) -> String {
    table
        .slopes
        .iter()
        .map(|e| format!("{label},\"{weight}\",{}/{},{}\n", e.slope.numer(), e.slope.denom(), e.mult))
        .collect()
}

const CSV_HEADER: &str = "operator,weight,slope,mult\n";

fn load_cosets(cfg: &JobConfig, op: Operator, dq: &DoubleQuotient) -> Result<HeckeCosetData> {
    if let Some(path) = &cfg.cosets {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let all: Vec<HeckeCosetData> = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(c) = all.into_iter().find(|c| c.operator == op && c.p == cfg.p) {
            c.validate(dq)?;
            return Ok(c);
        }
    }
    hecke_coset_data(op, dq)
}

/// Working setup shared by the overconvergent pipelines.
struct Setup {
    dq: DoubleQuotient,
    /// Digits carried by assembled matrices.
    working: u32,
    projector: bool,
}

fn setup(cfg: &JobConfig) -> Result<Setup> {
    if cfg.level != Level::Iwahori {
        return Err(Error::Config("overconvergent spaces are built at Iwahori level; use `classical` for maximal level".into()));
    }
    let k = cfg.k();
    let probe = build_double_quotient(cfg.p, Level::Iwahori, cfg.precision + k + 4)?;
    let projector = fundamental_domains(&probe, k)?.is_none();
    // the projector layout divides by p^v(L) once per power of t
    let mut working = cfg.precision;
    if projector {
        let l = probe.stabilizers_mod_center.iter().map(|s| s.len() as i128).fold(1, num_integer::lcm);
        let v = val_i128(l, cfg.p).unwrap_or(0);
        working = (cfg.precision + cfg.t_degree as u32 * v).min(Zmod::max_digits(cfg.p) - k - 4);
    }
    let dq = if working == cfg.precision { probe } else { build_double_quotient(cfg.p, Level::Iwahori, working + k + 4)? };
    Ok(Setup { dq, working, projector })
}

fn global_space(cfg: &JobConfig, s: &Setup, weight: Weight, k: u32, degree: usize) -> Result<GlobalSpace> {
    let spec = ModuleSpec::new(cfg.p, k, degree, s.working, weight)?;
    let choice = if s.projector { LayoutChoice::Projector } else { LayoutChoice::Auto };
    GlobalSpace::new(spec, s.dq.clone(), choice)
}

fn layout_name(gs: &GlobalSpace) -> &'static str {
    match gs.layout {
        Layout::Reduced { .. } => "reduced",
        Layout::Projector { .. } => "projector",
    }
}

fn series_json(s: &FredholmSeries) -> Value {
    json!({
        "coefficients": s.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "stable": s.stable,
        "trusted_t_degree": s.trusted_degree(),
        "degree_cutoff": s.degree_cutoff,
    })
}

/// Cap every coefficient at the requested precision N.
fn cap_to(s: &mut FredholmSeries, n: u32) {
    for c in s.coeffs.iter_mut().skip(1) {
        *c = c.cap_abs(n as i64);
    }
}

fn cutoff_list(d: usize) -> Vec<usize> {
    let step = (d / 5).max(1);
    let mut v: Vec<usize> = [d.saturating_sub(2 * step), d.saturating_sub(step), d].into_iter().filter(|&x| x > 0).collect();
    v.dedup();
    while v.len() < 3 {
        let last = *v.last().unwrap();
        v.push(last + 1);
    }
    v
}

fn scan_up(cfg: &JobConfig, s: &Setup, w: &TorusCharacter, up: &HeckeCosetData, k: u32) -> Result<crate::fredholm::ScanResult> {
    let conv = cfg.convention();
    let build = |d: usize| -> Result<FredholmSeries> {
        let gs = global_space(cfg, s, Weight::Point(w.clone()), k, d)?;
        let b = assemble_hecke(&gs, up, conv)?;
        let mut f = fredholm_series(&b, cfg.t_degree)?;
        cap_to(&mut f, cfg.precision);
        Ok(f)
    };
    stabilization_scan(build, &cutoff_list(cfg.degree_cutoff), cfg.t_degree)
}

fn guard_degree(cfg: &JobConfig, k: u32) -> usize {
    let step = k as usize + 1;
    cfg.degree_cutoff + (cfg.precision as usize).div_ceil(step)
}

/// v(U T - T U) with guard-band products; `None` means zero at working
/// precision.
fn commutator(gs: &GlobalSpace, w: &TorusCharacter, a: &HeckeCosetData, b: &HeckeCosetData, conv: Convention, dp: usize) -> Result<Option<i64>> {
    let ctx = gs.spec.ctx();
    let d = gs.spec.degree;
    let wide = Degrees { target: d, source: dp };
    let tall = Degrees { target: dp, source: d };
    let am: [BlockMatrix<u128>; 2] = [
        assemble_in(&ctx, w, gs, a, wide, conv)?,
        assemble_in(&ctx, w, gs, a, tall, conv)?,
    ];
    let bm: [BlockMatrix<u128>; 2] = [
        assemble_in(&ctx, w, gs, b, wide, conv)?,
        assemble_in(&ctx, w, gs, b, tall, conv)?,
    ];
    commutator_check(&am[0], &bm[1], &bm[0], &am[1])
}

fn brandt_table(cfg: &JobConfig, w: &TorusCharacter, cosets: &HeckeCosetData, dq: &DoubleQuotient) -> Result<Option<(SlopeTable, usize, Vec<String>)>> {
    let Some((n1, n2)) = w.algebraic_part() else { return Ok(None) };
    if w.k1.tame != 0 || w.k2.tame != 0 || n1 < n2 {
        return Ok(None);
    }
    let b = classical_brandt(cosets, (n1, n2), dq)?;
    let table = SlopeTable::from_brandt(&b, cfg.p, cfg.convention())?;
    let coeffs = b.fredholm.iter().map(|c| c.to_string()).collect();
    Ok(Some((table, b.classical_dim, coeffs)))
}

pub fn run_slopes(cfg: &JobConfig) -> Result<Outcome> {
    cfg.validate()?;
    let w = cfg.weight_character()?;
    let ops = cfg.operators()?;
    let s = setup(cfg)?;
    let k = cfg.k();
    let mut rep = report_header("slopes", cfg);
    let mut csv = String::from(CSV_HEADER);
    if w.parity() != 1 {
        rep.insert("space".into(), json!({"zero": true, "reason": "the weight is odd on -1, so the space is zero"}));
        return Ok(Outcome { report: Value::Object(rep), csv, failure: None });
    }
    let gs = global_space(cfg, &s, Weight::Point(w.clone()), k, cfg.degree_cutoff)?;
    rep.insert(
        "space".into(),
        json!({"zero": false, "layout": layout_name(&gs), "dim": gs.dim(), "t": gs.t(), "radius": k, "working_precision": s.working}),
    );
    let up = load_cosets(cfg, Operator::Up, &s.dq)?;
    let scan = scan_up(cfg, &s, &w, &up, k)?;
    let table = SlopeTable::from_series(&scan.series, cfg.convention())?;
    let poly = scan.series.newton_polygon()?;
    let label = Operator::Up.label(cfg.p);
    csv.push_str(&csv_rows(&label, &cfg.weight, &table));
    let mut failure = None;
    let mut operators = vec![json!({
        "operator": label,
        "series": series_json(&scan.series),
        "scan": {"cutoffs": scan.cutoffs, "agreements": scan.agreements},
        "slopes": table,
        "newton_vertices": poly.vertices,
    })];
    let mut classical_dim = None;
    if let Some((ct, dim, _)) = brandt_table(cfg, &w, &up, &s.dq)? {
        let mut bound = small_slope_bound(&w, 1)?;
        if cfg.normalized {
            bound -= 1;
        }
        classical_dim = Some(dim);
        match classicality_compare(&table, &ct, bound) {
            Ok(r) => {
                if r.verdict == Verdict::Fail {
                    failure = Some(format!("classicality comparison failed below {bound}"));
                }
                rep.insert("classicality".into(), json!({"report": r, "classical": ct, "classical_dim": dim}));
            }
            Err(e) => {
                rep.insert("classicality".into(), json!({"error": e.to_string(), "classical": ct}));
            }
        }
    }
    let dp = guard_degree(cfg, k);
    for op in ops.iter().filter(|o| **o != Operator::Up) {
        let tq = load_cosets(cfg, *op, &s.dq)?;
        let comm = commutator(&gs, &w, &up, &tq, cfg.convention(), dp)?;
        let mut entry = json!({"operator": op.label(cfg.p), "commutator_valuation": comm.map_or(json!("inf"), |v| json!(v))});
        if let Some((_, _, coeffs)) = brandt_table(cfg, &w, &tq, &s.dq)? {
            entry["classical_fredholm"] = json!(coeffs);
            entry["small_slope_count"] = json!(classical_dim);
        }
        if comm.is_some_and(|v| v < cfg.precision as i64 - 5) {
            failure.get_or_insert(format!("{} does not commute with {label}", op.label(cfg.p)));
        }
        operators.push(entry);
    }
    rep.insert("operators".into(), Value::Array(operators));
    Ok(Outcome { report: Value::Object(rep), csv, failure })
}

pub fn run_classical(cfg: &JobConfig) -> Result<Outcome> {
    cfg.validate()?;
    let w = cfg.weight_character()?;
    let (n1, n2) = w
        .algebraic_part()
        .ok_or_else(|| Error::Config("classical spaces need an algebraic weight".into()))?;
    if w.k1.tame != 0 || w.k2.tame != 0 {
        return Err(Error::Config("classical spaces are computed for trivial tame characters only".into()));
    }
    w.dominant_n()?;
    let dq = build_double_quotient(cfg.p, cfg.level, cfg.precision + cfg.k() + 4)?;
    let mut rep = report_header("classical", cfg);
    let mut csv = String::from(CSV_HEADER);
    rep.insert("t".into(), json!(dq.t()));
    rep.insert("mass".into(), json!(dq.mass().to_string()));
    let mut ops = Vec::new();
    for op in cfg.operators()? {
        let cosets = load_cosets(cfg, op, &dq)?;
        cosets.validate(&dq)?;
        let b = classical_brandt(&cosets, (n1, n2), &dq)?;
        if b.classical_dim == 0 {
            rep.insert("space".into(), json!({"zero": true}));
        }
        let table = SlopeTable::from_brandt(&b, cfg.p, cfg.convention())?;
        csv.push_str(&csv_rows(&op.label(cfg.p), &cfg.weight, &table));
        let entries: Vec<Vec<String>> = (0..b.matrix.rows())
            .map(|i| b.matrix.row(i).iter().map(|g| format!("{}+{}i", g.re, g.im)).collect())
            .collect();
        ops.push(json!({
            "operator": op.label(cfg.p),
            "classical_dim": b.classical_dim,
            "matrix": entries,
            "fredholm": b.fredholm.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "slopes": table,
        }));
    }
    rep.insert("operators".into(), Value::Array(ops));
    Ok(Outcome { report: Value::Object(rep), csv, failure: None })
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
    warning: Option<String>,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name, pass, detail: detail.into(), warning: None }
}

pub fn run_verify(cfg: &JobConfig) -> Result<Outcome> {
    cfg.validate()?;
    let w = cfg.weight_character()?;
    let p = cfg.p;
    let k = cfg.k();
    let n = cfg.precision as i64;
    let mut checks = Vec::new();

    checks.push(check("unit-count", enumerate_norm(1).len() == 24, format!("{} units", enumerate_norm(1).len())));
    let counts: Vec<(u64, usize)> = [3u64, 5, 7].iter().map(|&q| (q, enumerate_norm(q).len())).collect();
    checks.push(check(
        "norm-counts",
        counts.iter().all(|&(q, c)| c == 24 * (q as usize + 1)),
        format!("{counts:?}"),
    ));
    let maximal = build_double_quotient(p, Level::Maximal, 8)?;
    checks.push(check("mass-formula", maximal.mass() == Ratio::new(1, 12), format!("mass {}", maximal.mass())));

    let s = setup(cfg)?;
    let ops = cfg.operators()?;
    let mut all_ops = vec![Operator::Up];
    all_ops.extend(ops.iter().copied().filter(|o| *o != Operator::Up));
    let mut cosets = Vec::new();
    let mut degree_detail = Vec::new();
    let mut degree_ok = true;
    for op in &all_ops {
        let c = load_cosets(cfg, *op, &s.dq)?;
        match c.validate(&s.dq) {
            Ok(()) => degree_detail.push(format!("{} ok", op.label(p))),
            Err(e) => {
                degree_ok = false;
                degree_detail.push(e.to_string());
            }
        }
        cosets.push(c);
    }
    checks.push(check("degree-identities", degree_ok, degree_detail.join("; ")));
    if !degree_ok {
        return finish_verify(cfg, checks);
    }
    if w.parity() != 1 {
        checks.push(check("parity", true, "the weight is odd on -1; the space is zero and the remaining checks are vacuous"));
        return finish_verify(cfg, checks);
    }
    let up = &cosets[0];
    let conv = cfg.convention();

    let gs = global_space(cfg, &s, Weight::Point(w.clone()), k, cfg.degree_cutoff)?;
    let dp = guard_degree(cfg, k);
    let mut comm_detail = Vec::new();
    let mut comm_ok = true;
    for c in &cosets[1..] {
        let v = commutator(&gs, &w, up, c, conv, dp)?;
        comm_ok &= v.map_or(true, |v| v >= n - 5);
        comm_detail.push(format!("{}: {}", c.operator.label(p), v.map_or("inf".to_string(), |v| v.to_string())));
    }
    checks.push(check("commutator", comm_ok, comm_detail.join("; ")));

    let scan = scan_up(cfg, &s, &w, up, k)?;
    let scan_next = scan_up(cfg, &s, &w, up, k + 1)?;
    let lt = cfg.t_degree.min(8);
    let link = link_invariance(&scan.series, &scan_next.series, lt);
    // agreement is capped by the claimed precision, which D may keep below N
    let claimed = (0..=lt.min(scan.series.t_degree()).min(scan_next.series.t_degree()))
        .map(|m| scan.series.coeffs[m].abs_precision().min(scan_next.series.coeffs[m].abs_precision()))
        .min()
        .unwrap_or(i64::MAX);
    checks.push(check(
        "link-invariance",
        link.map_or(true, |v| v >= (n - 5).min(claimed)),
        format!("radii {k},{} agree to {} through t^{lt}", k + 1, link.map_or("inf".into(), |v| v.to_string())),
    ));

    let want = cfg.t_degree.min(10);
    let mut st = check(
        "stabilization",
        true,
        format!("trusted through t^{} over cutoffs {:?}", scan.trusted_degree, scan.cutoffs),
    );
    if scan.trusted_degree < want {
        st.warning = Some(format!("certified range shrank to t^{} (wanted t^{want})", scan.trusted_degree));
    }
    checks.push(st);

    let table = SlopeTable::from_series(&scan.series, conv)?;
    match brandt_table(cfg, &w, up, &s.dq)? {
        Some((ct, _, _)) => {
            let mut bound = small_slope_bound(&w, 1)?;
            if cfg.normalized {
                bound -= 1;
            }
            match classicality_compare(&table, &ct, bound) {
                Ok(r) => {
                    let mut c = check(
                        "classicality",
                        r.verdict == Verdict::Pass,
                        format!("below {bound}: overconvergent {table}, classical {ct}"),
                    );
                    if !r.rigorous {
                        c.warning = Some("proven slope range ends below the bound; endpoint-certified slopes used".into());
                    }
                    checks.push(c);
                }
                Err(e) => {
                    let mut c = check("classicality", true, e.to_string());
                    c.warning = Some("slope table too short to compare".into());
                    checks.push(c);
                }
            }
        }
        None => checks.push(check("classicality", true, "weight is not classical; skipped")),
    }

    // the family through this weight, compared at its center and one step
    // along the disc, to the precision it claims
    let disc = WeightDisc::new(p, w.clone(), 0, cfg.s_order.min(4))?;
    let fk = k.max(Weight::Family(disc).min_radius());
    let fd = cfg.degree_cutoff.min(30);
    let fam = family_run(cfg, &s, &disc, up, fk, fd)?;
    let mut fam_ok = true;
    let mut fam_detail = Vec::new();
    for shift in [0i64, p as i64 - 1] {
        let s0 = disc.algebraic_point(shift)?;
        let spec_series = fam.specialize(s0)?;
        let direct = direct_series(cfg, &s, &disc.specialize(s0)?, up, fk, fd)?;
        let agree = link_invariance(&spec_series, &direct, cfg.t_degree.min(8));
        let claimed = claimed_precision(&spec_series, &direct, cfg.t_degree.min(8));
        fam_ok &= agree.map_or(true, |a| a >= claimed);
        fam_detail.push(format!(
            "s={s0}: agree {} claimed {claimed}",
            agree.map_or("inf".into(), |a| a.to_string())
        ));
    }
    checks.push(check("family-specialization", fam_ok, fam_detail.join("; ")));
    finish_verify(cfg, checks)
}

fn claimed_precision(a: &FredholmSeries, b: &FredholmSeries, t: usize) -> i64 {
    (1..=t.min(a.t_degree()).min(b.t_degree()))
        .map(|m| a.coeffs[m].abs_precision().min(b.coeffs[m].abs_precision()))
        .min()
        .unwrap_or(i64::MAX)
}

fn finish_verify(cfg: &JobConfig, checks: Vec<Check>) -> Result<Outcome> {
    let mut rep = report_header("verify", cfg);
    let failure = checks.iter().find(|c| !c.pass).map(|c| format!("check `{}` failed: {}", c.name, c.detail));
    let mut csv = String::from("check,status,detail\n");
    for c in &checks {
        let status = match (c.pass, &c.warning) {
            (false, _) => "FAIL",
            (true, Some(_)) => "WARN",
            (true, None) => "PASS",
        };
        csv.push_str(&format!("{},{status},\"{}\"\n", c.name, c.detail.replace('"', "'")));
    }
    rep.insert("checks".into(), serde_json::to_value(&checks).expect("checks serialize"));
    rep.insert("all_pass".into(), json!(failure.is_none()));
    Ok(Outcome { report: Value::Object(rep), csv, failure })
}

fn family_run(
    cfg: &JobConfig,
    s: &Setup,
    disc: &WeightDisc,
    up: &HeckeCosetData,
    k: u32,
    degree: usize,
) -> Result<crate::fredholm::FamilySeries> {
    let gs = global_space(cfg, s, Weight::Family(disc.clone()), k, degree)?;
    let ring = disc.series_ring(gs.spec.ctx());
    let b = assemble_in(&ring, disc, &gs, up, Degrees::square(degree), cfg.convention())?;
    family_series(&b, &ring, cfg.t_degree)
}

fn direct_series(cfg: &JobConfig, s: &Setup, w: &TorusCharacter, up: &HeckeCosetData, k: u32, degree: usize) -> Result<FredholmSeries> {
    let gs = global_space(cfg, s, Weight::Point(w.clone()), k, degree)?;
    let b = assemble_hecke(&gs, up, cfg.convention())?;
    let mut f = fredholm_series(&b, cfg.t_degree)?;
    cap_to(&mut f, cfg.precision);
    Ok(f)
}

pub fn run_family(cfg: &JobConfig) -> Result<Outcome> {
    cfg.validate()?;
    let fam = cfg
        .family
        .as_ref()
        .ok_or_else(|| Error::Config("the family command needs --family".into()))?;
    let center: TorusCharacter = fam.center.parse()?;
    let disc = WeightDisc::new(cfg.p, center, fam.valuation, fam.order.unwrap_or(cfg.s_order))?;
    let s = setup(cfg)?;
    let k = cfg.k().max(Weight::Family(disc).min_radius());
    let mut rep = report_header("family", cfg);
    let mut csv = String::from(CSV_HEADER);
    if disc.parity() != 1 {
        rep.insert("space".into(), json!({"zero": true, "reason": "the family is odd on -1, so the space is zero"}));
        return Ok(Outcome { report: Value::Object(rep), csv, failure: None });
    }
    let up = load_cosets(cfg, Operator::Up, &s.dq)?;
    let series = family_run(cfg, &s, &disc, &up, k, cfg.degree_cutoff)?;
    rep.insert("series".into(), series.to_json());
    rep.insert("s_degree".into(), json!(series.s_degree()));
    let mut specs = Vec::new();
    for &n in &fam.at {
        let s0 = disc.algebraic_point(n)?;
        let w = disc.specialize(s0)?;
        let sp = series.specialize(s0)?;
        let direct = direct_series(cfg, &s, &w, &up, k, cfg.degree_cutoff)?;
        let t = cfg.t_degree.min(8);
        let agree = link_invariance(&sp, &direct, t);
        let table = SlopeTable::from_series(&sp, cfg.convention())?;
        let weight = format!("s={s0}");
        csv.push_str(&csv_rows(&Operator::Up.label(cfg.p), &weight, &table));
        specs.push(json!({
            "shift": n,
            "s": s0.to_string(),
            "weight": w.to_string(),
            "truncation_floor": series.truncation_floor(s0).min(cfg.precision as i64),
            "agreement_with_direct": agree.map_or(json!("inf"), |a| json!(a)),
            "claimed_precision": claimed_precision(&sp, &direct, t),
            "slopes": table,
            "direct_slopes": SlopeTable::from_series(&direct, cfg.convention())?,
        }));
    }
    rep.insert("specializations".into(), Value::Array(specs));
    Ok(Outcome { report: Value::Object(rep), csv, failure: None })
}

#[derive(Debug, Parser)]
#[command(name = "overconvergent", version, about = "Slopes of overconvergent automorphic forms on the Hurwitz quaternions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// U_p slopes of the overconvergent space, with the classical comparison
    Slopes(Flags),
    /// Exact Brandt matrices and their slopes
    Classical(Flags),
    /// Run the consistency suite
    Verify(Flags),
    /// Two-variable characteristic series over a weight disc
    Family(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Key-value configuration file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u64>,
    /// maximal or iwahori
    #[arg(long)]
    pub level: Option<String>,
    /// n1,n2[,tame=e1:e2]
    #[arg(long)]
    pub weight: Option<String>,
    /// "n1,n2 [v=r] [at=n|n|...]"
    #[arg(long)]
    pub family: Option<String>,
    /// Comma-separated operators, e.g. U,T5,T7
    #[arg(long)]
    pub ops: Option<String>,
    #[arg(long = "degree-cutoff")]
    pub degree_cutoff: Option<usize>,
    #[arg(long = "t-degree")]
    pub t_degree: Option<usize>,
    #[arg(long = "s-order")]
    pub s_order: Option<usize>,
    #[arg(long)]
    pub precision: Option<u32>,
    /// Radius index k of the local module
    #[arg(long)]
    pub radius: Option<u32>,
    /// Divide U_p by p
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub normalized: Option<bool>,
    /// json or csv
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON list of coset data to use instead of computing it
    #[arg(long)]
    pub cosets: Option<PathBuf>,
}

impl Flags {
    pub fn resolve(&self) -> Result<JobConfig> {
        let mut cfg = JobConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_kv(&text)?;
        }
        let path = |p: &PathBuf| p.display().to_string();
        let overrides: [(&str, Option<String>); 14] = [
            ("p", self.p.map(|x| x.to_string())),
            ("level", self.level.clone()),
            ("weight", self.weight.clone()),
            ("family", self.family.clone()),
            ("ops", self.ops.clone()),
            ("degree-cutoff", self.degree_cutoff.map(|x| x.to_string())),
            ("t-degree", self.t_degree.map(|x| x.to_string())),
            ("s-order", self.s_order.map(|x| x.to_string())),
            ("precision", self.precision.map(|x| x.to_string())),
            ("radius", self.radius.map(|x| x.to_string())),
            ("normalized", self.normalized.map(|x| x.to_string())),
            ("format", self.format.clone()),
            ("out", self.out.as_ref().map(path)),
            ("cosets", self.cosets.as_ref().map(path)),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        Ok(cfg)
    }
}

fn write_output(cfg: &JobConfig, out: &Outcome) -> Result<()> {
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&out.report).expect("report serializes") + "\n",
        Format::Csv => out.csv.clone(),
    };
    match &cfg.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Run one command with resolved configuration.
pub fn execute(command: &Command) -> (i32, Option<Outcome>, Option<Error>) {
    let (flags, run): (&Flags, fn(&JobConfig) -> Result<Outcome>) = match command {
        Command::Slopes(f) => (f, run_slopes),
        Command::Classical(f) => (f, run_classical),
        Command::Verify(f) => (f, run_verify),
        Command::Family(f) => (f, run_family),
    };
    let cfg = match flags.resolve() {
        Ok(c) => c,
        Err(e) => return (exit_code(&e), None, Some(e)),
    };
    match run(&cfg) {
        Ok(out) => {
            if let Err(e) = write_output(&cfg, &out) {
                return (exit_code(&e), Some(out), Some(e));
            }
            let code = if out.failure.is_some() { EXIT_CERTIFICATION } else { EXIT_OK };
            (code, Some(out), None)
        }
        Err(e) => (exit_code(&e), None, Some(e)),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (code, out, err) = execute(&cli.command);
    if let Some(e) = err {
        eprintln!("error: {e}");
    }
    if let Some(f) = out.and_then(|o| o.failure) {
        eprintln!("certification failure: {f}");
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let mut c = JobConfig::default();
        c.family = Some("0,0 v=1 at=0|2".parse().unwrap());
        c.ops = vec!["U".into(), "T5".into()];
        c.normalized = true;
        c.out = Some(PathBuf::from("/tmp/x.json"));
        let back = JobConfig::from_kv(&c.to_kv()).unwrap();
        assert_eq!(back, c);
        let js: JobConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(js, c);
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("oc-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("job.cfg");
        std::fs::write(&path, "p = 5\nweight = 2,0 # comment\nprecision = 20\n").unwrap();
        let flags = Flags { config: Some(path), precision: Some(12), ..Default::default() };
        let c = flags.resolve().unwrap();
        assert_eq!((c.p, c.weight.as_str(), c.precision), (5, "2,0", 12));
    }

    #[test]
    fn invalid_configs() {
        let c = JobConfig { p: 2, ..Default::default() };
        let e = c.validate().unwrap_err();
        assert_eq!(e, Error::RamifiedPlace);
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        let c = JobConfig { ops: vec!["T3".into()], ..Default::default() };
        assert_eq!(exit_code(&c.validate().unwrap_err()), EXIT_CONFIG);
        assert!(JobConfig::from_kv("bogus = 1").is_err());
    }

    #[test]
    fn cutoffs_ascend() {
        assert_eq!(cutoff_list(50), vec![30, 40, 50]);
        assert_eq!(cutoff_list(2), vec![1, 2, 3]);
    }
}
