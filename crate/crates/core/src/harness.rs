//! Experiment configuration, single runs, convergence studies and the
//! artifacts they write.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::cases::{exact_solution, ExperimentSpec, InitMode, InitialCondition};
use crate::diagnostics::{observed_order, ErrorReport, Norm};
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::io::{self, ErrorRow, OrderRow, ReportRow};
use crate::limiters::LimiterKind;
use crate::solver::{Scheme, Simulation, StageRecord};
use crate::timestepping::SspScheme;
use crate::velocity::StreamCase;

pub const FIELD_FILE: &str = "field.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const STAGES_FILE: &str = "stages.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const ORDERS_FILE: &str = "orders.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Ordered `key = value` settings, from a config file and/or flags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    /// Parse `key = value` lines. Blank lines and lines starting with `#`
    /// are ignored; a repeated key is an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {line:?}", n + 1)))?;
            let k = k.trim();
            if s.0.contains_key(k) {
                return Err(Error::Config(format!("line {}: duplicate key {k:?}", n + 1)));
            }
            s.set(k, v.trim());
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Later settings win.
    pub fn merged(mut self, overrides: &Settings) -> Self {
        for (k, v) in &overrides.0 {
            self.0.insert(k.clone(), v.clone());
        }
        self
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!(
                "unknown key {k:?} (expected one of {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        self.get(key)
            .map(|v| parse(v).ok_or_else(|| Error::Config(format!("invalid value for {key}: {v:?}"))))
            .transpose()
    }

    fn list<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<Vec<T>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        parse(item.trim()).ok_or_else(|| Error::Config(format!("invalid entry in {key}: {item:?}")))
                    })
                    .collect()
            })
            .transpose()
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Option<T> {
    s.parse().ok()
}

/// Initial condition used when none is configured: the C¹ bump for FV2
/// and the C⁴ bump for FV4.
pub fn default_ic(scheme: Scheme) -> InitialCondition {
    match scheme {
        Scheme::Fv2 => InitialCondition::CosBump,
        Scheme::Fv4 => InitialCondition::CosSqBump,
    }
}

/// Everything that determines one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: ExperimentSpec,
}

impl RunConfig {
    pub const KEYS: [&'static str; 12] = [
        "scheme", "limiter", "case", "ic", "init", "time", "res", "nx", "ny", "cn", "end", "steps",
    ];

    pub fn from_settings(s: &Settings) -> Result<Self> {
        s.check_keys(&Self::KEYS)?;
        let scheme = s.parsed("scheme", Scheme::parse)?.unwrap_or(Scheme::Fv2);
        let limiter = s
            .parsed("limiter", LimiterKind::parse)?
            .unwrap_or(LimiterKind::Unlimited);
        let case = s.parsed("case", StreamCase::parse)?.unwrap_or(StreamCase::diag());
        let ic = s.parsed("ic", InitialCondition::parse)?.unwrap_or(default_ic(scheme));
        let res = s.parsed("res", parse_num::<usize>)?.unwrap_or(64);
        let mut spec = ExperimentSpec::new(scheme, limiter, case, ic, res);
        if let Some(n) = s.parsed("nx", parse_num)? {
            spec.nx = n;
        }
        if let Some(n) = s.parsed("ny", parse_num)? {
            spec.ny = n;
        }
        if let Some(m) = s.parsed("init", InitMode::parse)? {
            spec.init_mode = m;
        }
        if let Some(t) = s.parsed("time", SspScheme::parse)? {
            spec.time_scheme = t;
        }
        if let Some(cn) = s.parsed("cn", parse_num)? {
            spec.courant_target = cn;
        }
        if let Some(end) = s.parsed("end", parse_num)? {
            spec.end_time = end;
        }
        spec.steps = s.parsed("steps", parse_num)?;
        spec.validate()?;
        // The report compares against the exact solution at the end time.
        if let Err(Error::NoExactSolution { case, t }) = exact_solution(&spec, spec.end_time) {
            return Err(Error::Config(format!(
                "{case} has a closed-form solution only at whole periods, not at end = {t}"
            )));
        }
        Ok(Self { spec })
    }

    /// Fully resolved settings, one `key = value` line each, in a fixed
    /// order. Equal configs give equal text.
    pub fn canonical(&self) -> String {
        let s = &self.spec;
        let mut out = format!(
            "scheme = {}\nlimiter = {}\ncase = {}\nic = {}\ninit = {}\ntime = {}\nnx = {}\nny = {}\ncn = {:?}\nend = {:?}\n",
            s.scheme,
            s.limiter,
            s.stream.name(),
            s.ic.name(),
            s.init_mode.name(),
            s.time_scheme,
            s.nx,
            s.ny,
            s.courant_target,
            s.end_time,
        );
        if let Some(n) = s.steps {
            out.push_str(&format!("steps = {n}\n"));
        }
        out
    }

    pub fn digest(&self) -> String {
        sha256_hex(&self.canonical())
    }

    /// Non-fatal notes about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let s = &self.spec;
        let bound = s.scheme.stage_bound(true);
        let mut w = Vec::new();
        if s.limiter.is_limited() && s.courant_target > bound {
            w.push(format!(
                "courant target {} exceeds the {} stage bound {}; the maximum principle is not guaranteed",
                s.courant_target, s.scheme, bound
            ));
        }
        w
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Outcome of one completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub spec: ExperimentSpec,
    pub dt: f64,
    pub n_steps: usize,
    pub time: f64,
    pub report: ErrorReport,
    pub field: CellField,
    pub stages: Vec<StageRecord>,
}

impl RunResult {
    pub fn report_row(&self) -> ReportRow {
        ReportRow {
            scheme: self.spec.scheme.name().into(),
            limiter: self.spec.limiter.name().into(),
            case: self.spec.stream.name().into(),
            ic: self.spec.ic.name().into(),
            nx: self.spec.nx,
            ny: self.spec.ny,
            n_steps: self.n_steps,
            dt: self.dt,
            time: self.time,
            report: self.report.clone(),
        }
    }
}

/// Run `spec` to its end time.
pub fn execute(spec: &ExperimentSpec) -> Result<RunResult> {
    let mut sim = Simulation::new(spec.clone())?;
    sim.run()?;
    let report = sim.report()?;
    Ok(RunResult {
        spec: spec.clone(),
        dt: sim.plan().dt,
        n_steps: sim.plan().n_steps,
        time: sim.time(),
        report,
        stages: sim.stage_log().to_vec(),
        field: sim.state().clone(),
    })
}

/// Completed runs keyed by their spec, so that studies sharing
/// configurations run each one once.
#[derive(Debug, Default)]
pub struct RunCache {
    runs: HashMap<String, RunResult>,
}

impl RunCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_run(&mut self, spec: &ExperimentSpec) -> Result<&RunResult> {
        use std::collections::hash_map::Entry;
        match self.runs.entry(format!("{spec:?}")) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(execute(spec)?)),
        }
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RunResult> {
        self.runs.values()
    }
}

/// Files produced by a command, relative to its output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

fn manifest(digest: &str, entries: &[(&str, String)], files: &[&str], warnings: &[String]) -> String {
    let mut m = format!("config_digest = {digest}\n");
    for (k, v) in entries {
        m.push_str(&format!("{k} = {v}\n"));
    }
    m.push_str("deterministic = true\n");
    m.push_str(&format!("outputs = {}\n", files.join(",")));
    for w in warnings {
        m.push_str(&format!("warning = {w}\n"));
    }
    m
}

/// Execute one configured run and write its field snapshot, report row,
/// stage log and manifest into `dir`. Nothing is written if the run fails.
pub fn run(config: &RunConfig, dir: &Path) -> Result<(RunResult, Artifacts)> {
    let result = execute(&config.spec)?;
    let grid = config.spec.grid()?;
    let field = io::field_csv(&result.field, &grid)?;
    let report = io::report_csv(&[result.report_row()])?;
    let stages = io::stages_csv(&result.stages)?;
    let s = &config.spec;
    let files = [FIELD_FILE, REPORT_FILE, STAGES_FILE];
    let entries = [
        ("scheme", s.scheme.name().to_string()),
        ("limiter", s.limiter.name().to_string()),
        ("case", s.stream.name().to_string()),
        ("ic", s.ic.name().to_string()),
        ("init", s.init_mode.name().to_string()),
        ("time", s.time_scheme.name().to_string()),
        ("resolution", format!("{}x{}", s.nx, s.ny)),
        ("cn", format!("{:?}", s.courant_target)),
        ("end", format!("{:?}", s.end_time)),
        ("dt", io::fmt_f64(result.dt)),
        ("n_steps", result.n_steps.to_string()),
    ];
    let manifest = manifest(&config.digest(), &entries, &files, &config.warnings());
    io::write_all(
        dir,
        &[
            (FIELD_FILE, &field),
            (REPORT_FILE, &report),
            (STAGES_FILE, &stages),
            (MANIFEST_FILE, &manifest),
        ],
    )?;
    let mut names: Vec<String> = files.iter().map(|f| f.to_string()).collect();
    names.push(MANIFEST_FILE.into());
    Ok((
        result,
        Artifacts {
            dir: dir.to_path_buf(),
            files: names,
        },
    ))
}

/// A grid-refinement study over several limiters and flows.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub scheme: Scheme,
    pub limiters: Vec<LimiterKind>,
    pub cases: Vec<StreamCase>,
    pub ic: InitialCondition,
    pub init_mode: Option<InitMode>,
    pub time_scheme: SspScheme,
    pub courant_target: f64,
    pub resolutions: Vec<usize>,
    pub norms: Vec<Norm>,
}

impl ConvergenceConfig {
    pub const KEYS: [&'static str; 9] = [
        "scheme", "limiters", "cases", "ic", "init", "time", "cn", "res", "norms",
    ];

    pub fn from_settings(s: &Settings) -> Result<Self> {
        s.check_keys(&Self::KEYS)?;
        let scheme = s.parsed("scheme", Scheme::parse)?.unwrap_or(Scheme::Fv2);
        let cfg = Self {
            scheme,
            limiters: s
                .list("limiters", LimiterKind::parse)?
                .unwrap_or(vec![LimiterKind::Unlimited]),
            cases: s.list("cases", StreamCase::parse)?.unwrap_or(StreamCase::ALL.to_vec()),
            ic: s.parsed("ic", InitialCondition::parse)?.unwrap_or(default_ic(scheme)),
            init_mode: s.parsed("init", InitMode::parse)?,
            time_scheme: s
                .parsed("time", SspScheme::parse)?
                .unwrap_or(scheme.default_time_scheme()),
            courant_target: s.parsed("cn", parse_num)?.unwrap_or(0.5),
            resolutions: s.list("res", parse_num)?.unwrap_or(vec![128, 256]),
            norms: s.list("norms", Norm::parse)?.unwrap_or(vec![Norm::L2]),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolutions.len() < 2 {
            return Err(Error::Config(
                "a convergence study needs at least two resolutions".into(),
            ));
        }
        if let Some(w) = self.resolutions.windows(2).find(|w| w[1] != 2 * w[0]) {
            return Err(Error::Config(format!(
                "resolutions must double, got {} then {}",
                w[0], w[1]
            )));
        }
        for what in [self.limiters.is_empty(), self.cases.is_empty(), self.norms.is_empty()] {
            if what {
                return Err(Error::Config("limiters, cases and norms must be non-empty".into()));
            }
        }
        for spec in self.specs() {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn spec(&self, limiter: LimiterKind, case: StreamCase, n: usize) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(self.scheme, limiter, case, self.ic, n).with_courant(self.courant_target);
        spec.time_scheme = self.time_scheme;
        if let Some(m) = self.init_mode {
            spec.init_mode = m;
        }
        spec
    }

    /// Every run of the study.
    pub fn specs(&self) -> impl Iterator<Item = ExperimentSpec> + '_ {
        self.limiters.iter().flat_map(move |&l| {
            self.cases
                .iter()
                .flat_map(move |&c| self.resolutions.iter().map(move |&n| self.spec(l, c, n)))
        })
    }

    pub fn canonical(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        format!(
            "scheme = {}\nlimiters = {}\ncases = {}\nic = {}\ninit = {}\ntime = {}\ncn = {:?}\nres = {}\nnorms = {}\n",
            self.scheme,
            join(self.limiters.iter().map(|l| l.name().to_string()).collect()),
            join(self.cases.iter().map(|c| c.name().to_string()).collect()),
            self.ic.name(),
            self.init_mode.map_or("default", |m| m.name()),
            self.time_scheme,
            self.courant_target,
            join(self.resolutions.iter().map(|n| n.to_string()).collect()),
            join(self.norms.iter().map(|p| p.name().to_string()).collect()),
        )
    }
}

/// Errors of every run and the observed orders between successive
/// resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub errors: Vec<ErrorRow>,
    pub orders: Vec<OrderRow>,
}

impl ConvergenceTable {
    pub fn order(&self, limiter: LimiterKind, norm: Norm, case: StreamCase) -> Option<f64> {
        self.orders
            .iter()
            .rfind(|r| r.limiter == limiter.name() && r.norm == norm)
            .and_then(|r| r.order(case))
    }
}

pub fn convergence_with(cfg: &ConvergenceConfig, cache: &mut RunCache) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let mut errors = Vec::new();
    let mut orders = Vec::new();
    for &limiter in &cfg.limiters {
        let mut by_case: Vec<Vec<ErrorReport>> = Vec::new();
        for &case in &cfg.cases {
            let mut reports = Vec::new();
            for &n in &cfg.resolutions {
                let r = cache.get_or_run(&cfg.spec(limiter, case, n))?;
                errors.push(ErrorRow {
                    scheme: cfg.scheme.name().into(),
                    limiter: limiter.name().into(),
                    case,
                    n,
                    report: r.report.clone(),
                });
                reports.push(r.report.clone());
            }
            by_case.push(reports);
        }
        for &norm in &cfg.norms {
            for (p, pair) in cfg.resolutions.windows(2).enumerate() {
                let mut row = OrderRow {
                    scheme: cfg.scheme.name().into(),
                    limiter: limiter.name().into(),
                    norm,
                    n_coarse: pair[0],
                    n_fine: pair[1],
                    orders: [None; 4],
                };
                for (case, reports) in cfg.cases.iter().zip(&by_case) {
                    let o = observed_order(reports[p].error(norm), reports[p + 1].error(norm))?;
                    row.orders[io::case_column(*case)] = Some(o);
                }
                orders.push(row);
            }
        }
    }
    Ok(ConvergenceTable { errors, orders })
}

/// Run the study and write `errors.csv`, `orders.csv` and the manifest.
pub fn convergence(cfg: &ConvergenceConfig, dir: &Path) -> Result<(ConvergenceTable, Artifacts)> {
    let table = convergence_with(cfg, &mut RunCache::new())?;
    let errors = io::errors_csv(&table.errors)?;
    let orders = io::orders_csv(&table.orders)?;
    let files = [ERRORS_FILE, ORDERS_FILE];
    let canonical = cfg.canonical();
    let entries: Vec<(&str, String)> = canonical
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k, v.to_string()))
        .collect();
    let manifest = manifest(&sha256_hex(&canonical), &entries, &files, &[]);
    io::write_all(
        dir,
        &[
            (ERRORS_FILE, &errors),
            (ORDERS_FILE, &orders),
            (MANIFEST_FILE, &manifest),
        ],
    )?;
    let mut names: Vec<String> = files.iter().map(|f| f.to_string()).collect();
    names.push(MANIFEST_FILE.into());
    Ok((
        table,
        Artifacts {
            dir: dir.to_path_buf(),
            files: names,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_parsing() {
        let s = Settings::parse("# comment\nscheme = fv4\n\n limiter=n2n \n").unwrap();
        assert_eq!(s.get("scheme"), Some("fv4"));
        assert_eq!(s.get("limiter"), Some("n2n"));
        assert!(Settings::parse("scheme fv2").is_err());
        assert!(Settings::parse("a = 1\na = 2").is_err());
        let mut o = Settings::default();
        o.set("scheme", "fv2");
        assert_eq!(s.merged(&o).get("scheme"), Some("fv2"));
    }

    #[test]
    fn run_config_defaults_and_errors() {
        let c = RunConfig::from_settings(&Settings::parse("scheme = fv4\nres = 16").unwrap()).unwrap();
        assert_eq!(c.spec.ic, InitialCondition::CosSqBump);
        assert_eq!(c.spec.time_scheme, SspScheme::Ssp33);
        assert_eq!((c.spec.nx, c.spec.ny), (16, 16));
        for bad in [
            "colour = red",
            "res = abc",
            "res = 3",
            "cn = 1.5",
            "scheme = fv4\nlimiter = kuzmin",
            "case = sin\nend = 0.5",
        ] {
            assert!(
                RunConfig::from_settings(&Settings::parse(bad).unwrap()).is_err(),
                "{bad}"
            );
        }
        assert!(RunConfig::from_settings(&Settings::parse("case = quad\nend = 2").unwrap()).is_ok());
        assert!(RunConfig::from_settings(&Settings::parse("case = sbr\nend = 0.3").unwrap()).is_ok());
    }

    #[test]
    fn digest_tracks_resolved_config() {
        let a = RunConfig::from_settings(&Settings::parse("res = 16").unwrap()).unwrap();
        let b = RunConfig::from_settings(&Settings::parse("nx = 16\nny = 16\ncn = 0.5").unwrap()).unwrap();
        let c = RunConfig::from_settings(&Settings::parse("res = 32").unwrap()).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn stage_bound_warning() {
        let w = |text: &str| {
            RunConfig::from_settings(&Settings::parse(text).unwrap())
                .unwrap()
                .warnings()
        };
        assert!(w("scheme = fv4\nlimiter = n2n\ncn = 0.5").len() == 1);
        assert!(w("scheme = fv4\nlimiter = n2n\ncn = 0.25").is_empty());
        assert!(w("scheme = fv4\nlimiter = unlimited\ncn = 0.5").is_empty());
    }

    #[test]
    fn convergence_config_checks() {
        let ok = |t: &str| ConvergenceConfig::from_settings(&Settings::parse(t).unwrap());
        assert!(ok("res = 16").is_err());
        assert!(ok("res = 16,24").is_err());
        assert!(ok("res = 16,32\nlimiters = bj,nk").is_ok());
        assert!(ok("res = 16,32\nnorms = l3").is_err());
    }

    #[test]
    fn smoke_convergence_single_case() {
        let cfg = ConvergenceConfig::from_settings(
            &Settings::parse("cases = diag\nres = 16,32\nlimiters = n2n\nnorms = l1,l2,linf").unwrap(),
        )
        .unwrap();
        let t = convergence_with(&cfg, &mut RunCache::new()).unwrap();
        assert_eq!(t.errors.len(), 2);
        assert_eq!(t.orders.len(), 3);
        let o = t.order(LimiterKind::N2n, Norm::L2, StreamCase::diag()).unwrap();
        assert!(o.is_finite() && o > 0.5, "{o}");
        assert_eq!(t.order(LimiterKind::N2n, Norm::L2, StreamCase::sbr()), None);
    }

    #[test]
    fn cache_runs_each_spec_once() {
        let spec = ExperimentSpec::new(
            Scheme::Fv2,
            LimiterKind::Bj,
            StreamCase::diag(),
            InitialCondition::CosBump,
            8,
        )
        .with_end_time(0.05);
        let mut cache = RunCache::new();
        let a = cache.get_or_run(&spec).unwrap().clone();
        let b = cache.get_or_run(&spec).unwrap().clone();
        assert_eq!(cache.len(), 1);
        assert_eq!(a, b);
    }
}
