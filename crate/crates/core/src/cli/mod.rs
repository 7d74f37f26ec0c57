//! Batch front-end: a TOML config in, a versioned JSON report and per-probe
//! CSV tables out.

pub mod config;

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bohr::{one_half, BohrParams};
use crate::characterize::{describe_prefix, verify, CharacterizeOptions, Characterization, Expectation, GroupSpec};
use crate::circle::{decimal_string, CircleElement, CircleError, NormOrdering, Precision, PreparedElement, Rational, Threshold};
use crate::density::{quotient_stats, thicken, thin, IntervalPartition};
use crate::error::Error;
use crate::filters::{divergence_witnesses, iterated_witnesses, FilterBasis};
use crate::homomorphism::{check_solvable, classify_limit, interleave, realize_sequence, HomTarget};
use crate::lattice::order_modulo;
use crate::padic::{build_sequence, circle_convergence_set, padic_limit_check, DigitRule, PadicSpec};
use crate::sequence::{CharSequence, Provenance};

pub use config::{Command, ConfigError, RunConfig, SymbolTable};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Run { context: String, source: Error },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 1 for validation problems, 2 for exhausted budgets or undecidable
    /// comparisons, 3 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 3,
            CliError::Run { source, .. } => match source {
                Error::Invalid(_)
                | Error::RelationViolation { .. }
                | Error::NotInComplement(_)
                | Error::LengthMismatch(..)
                | Error::ExhaustedSource(_)
                | Error::Circle(CircleError::InvalidSigma(_) | CircleError::ZeroCharacter) => 1,
                Error::BudgetExceeded { .. }
                | Error::UndecidableMembership(_)
                | Error::NotFound { .. }
                | Error::DegenerateSpacing(..)
                | Error::Circle(CircleError::Undecidable { .. } | CircleError::OracleFailure { .. }) => 2,
            },
        }
    }
}

fn ctx(context: impl Into<String>) -> impl FnOnce(Error) -> CliError {
    let context = context.into();
    move |source| CliError::Run { context, source }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides (or must agree with) the config's `command`.
    pub command: Option<Command>,
    /// Adds wall time to the report, which makes it non-reproducible.
    pub timing: bool,
}

/// One CSV file of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub command: Command,
    pub json: String,
    pub tables: Vec<CsvTable>,
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema_version: u32,
    tool: Value,
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<u128>,
}

struct Probe {
    label: String,
    element: CircleElement,
    expectation: Option<Expectation>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    table: SymbolTable,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn opt_rational(n: Option<&config::Num>, path: &str, default: Rational) -> Result<Rational, ConfigError> {
    n.map_or(Ok(default), |n| n.to_rational(path))
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl Ctx<'_> {
    fn element(&self, expr: &str, path: &str) -> Result<CircleElement, ConfigError> {
        self.table.element(expr, path)
    }

    fn elements(&self, exprs: &[String], path: &str) -> Result<Vec<CircleElement>, ConfigError> {
        exprs.iter().enumerate().map(|(i, e)| self.element(e, &format!("{path}[{i}]"))).collect()
    }

    fn group(&self) -> Result<GroupSpec, ConfigError> {
        let g = self.cfg.group.as_ref().ok_or_else(|| ConfigError::new("group", "section required"))?;
        if g.generators.is_empty() {
            return Err(ConfigError::new("group.generators", "need at least one generator"));
        }
        let gens = self.elements(&g.generators, "group.generators")?;
        GroupSpec::generated_by(gens).map_err(|e| ConfigError::new("group.generators", e.to_string()))
    }

    fn char_options(&self) -> Result<CharacterizeOptions, ConfigError> {
        let c = self.cfg.characterize.clone().unwrap_or_default();
        let sigma = opt_rational(c.sigma.as_ref(), "characterize.sigma", r(1, 4))?;
        check_sigma("characterize.sigma", &sigma)?;
        let stages = c.stages.unwrap_or(4);
        if stages == 0 {
            return Err(ConfigError::new("characterize.stages", "must be positive"));
        }
        let mut opts = CharacterizeOptions::new(sigma, stages);
        if let Some(b) = c.budget {
            if b == 0 {
                return Err(ConfigError::new("characterize.budget", "budgets must be positive"));
            }
            opts.budget = b;
        }
        if let Some(m) = c.max_m {
            if m == 0 {
                return Err(ConfigError::new("characterize.max_m", "budgets must be positive"));
            }
            opts.max_m = m;
        }
        if let Some(cap) = c.precision_cap {
            if cap < 64 {
                return Err(ConfigError::new("characterize.precision_cap", "must be at least 64 bits"));
            }
            opts.precision_cap = cap;
        }
        Ok(opts)
    }

    /// Runs the configured stages; with `floors`, one further stage padded
    /// above every floor.
    fn characterization(&self, floors: &[i64]) -> Result<Characterization, CliError> {
        let g = self.group()?;
        let opts = self.char_options()?;
        let stages = opts.stages;
        let mut c = Characterization::new(g, opts).map_err(ctx("characterize"))?;
        for _ in 0..stages {
            c.push_stage(&[]).map_err(ctx("characterize"))?;
        }
        if !floors.is_empty() {
            c.push_stage(floors).map_err(ctx("characterize: padding stage"))?;
        }
        Ok(c)
    }

    fn input_sequence(&self, floors: &[i64]) -> Result<(CharSequence, &'static str), CliError> {
        let s = self.cfg.sequence.clone().unwrap_or_default();
        match (s.terms, s.report) {
            (Some(_), Some(_)) => Err(ConfigError::new("sequence", "give terms or report, not both").into()),
            (Some(terms), None) => Ok((
                CharSequence::external(terms).map_err(|e| ConfigError::new("sequence.terms", e.to_string()))?,
                "terms",
            )),
            (None, Some(path)) => {
                let full = self.cfg.resolve_path(&path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| ConfigError::new("sequence.report", format!("{}: {e}", full.display())))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| ConfigError::new("sequence.report", e.to_string()))?;
                let terms = v
                    .pointer("/result/sequence/terms")
                    .and_then(Value::as_array)
                    .and_then(|a| a.iter().map(Value::as_i64).collect::<Option<Vec<i64>>>())
                    .ok_or_else(|| ConfigError::new("sequence.report", "no result.sequence.terms in report"))?;
                let seq = CharSequence::external(terms).map_err(|e| ConfigError::new("sequence.report", e.to_string()))?;
                Ok((seq, "report"))
            }
            (None, None) => Ok((self.characterization(floors)?.sequence(), "characterize")),
        }
    }

    fn probe_section(&self) -> config::ProbesSection {
        self.cfg.probes.clone().unwrap_or_default()
    }

    fn probes(&self, group: Option<&GroupSpec>) -> Result<Vec<Probe>, ConfigError> {
        let p = self.probe_section();
        let mut out = Vec::new();
        let classify = |path: &str, e: &CircleElement| -> Result<Expectation, ConfigError> {
            let g = group.ok_or_else(|| ConfigError::new(path, "classifying probes needs [group]"))?;
            Ok(if order_modulo(g.generators(), e).is_one() { Expectation::Converge0 } else { Expectation::Diverge })
        };
        for (i, s) in p.list.iter().enumerate() {
            let path = format!("probes.list[{i}]");
            let e = self.element(s, &path)?;
            let exp = classify(&path, &e)?;
            out.push(Probe { label: s.clone(), element: e, expectation: Some(exp) });
        }
        for (list, exp, name) in [(&p.converge, Expectation::Converge0, "converge"), (&p.diverge, Expectation::Diverge, "diverge")] {
            for (i, s) in list.iter().enumerate() {
                let e = self.element(s, &format!("probes.{name}[{i}]"))?;
                out.push(Probe { label: s.clone(), element: e, expectation: Some(exp) });
            }
        }
        if p.sample > 0 {
            let max_den = p.max_denominator.unwrap_or(50);
            if max_den < 2 {
                return Err(ConfigError::new("probes.max_denominator", "must be at least 2"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
            for _ in 0..p.sample {
                let den = rng.gen_range(2..=max_den);
                let num = rng.gen_range(1..den);
                let q = Rational::new(BigInt::from(num), BigInt::from(den));
                let e = CircleElement::rational(q.clone());
                let exp = classify("probes.sample", &e)?;
                out.push(Probe { label: q.to_string(), element: e, expectation: Some(exp) });
            }
        }
        if out.is_empty() {
            if let Some(g) = group {
                for e in g.generators() {
                    out.push(Probe { label: e.to_string(), element: e.clone(), expectation: Some(Expectation::Converge0) });
                }
            }
        }
        Ok(out)
    }

    fn verify_sigma(&self, default: Rational) -> Result<Rational, ConfigError> {
        let sigma = opt_rational(self.probe_section().sigma.as_ref(), "probes.sigma", default)?;
        check_sigma("probes.sigma", &sigma)?;
        Ok(sigma)
    }

    fn partition(&self) -> Result<IntervalPartition, ConfigError> {
        let p = self.cfg.partition.clone().ok_or_else(|| ConfigError::new("partition", "section required"))?;
        match (p.squares, p.cuts) {
            (Some(n), None) => IntervalPartition::squares(n, p.offset.unwrap_or(2))
                .map_err(|e| ConfigError::new("partition.squares", e.to_string())),
            (None, Some(cuts)) => {
                let dens = p.densities.ok_or_else(|| ConfigError::new("partition.densities", "required with cuts"))?;
                let dens = dens
                    .iter()
                    .enumerate()
                    .map(|(i, d)| d.to_rational(&format!("partition.densities[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                IntervalPartition::new(cuts, dens).map_err(|e| ConfigError::new("partition", e.to_string()))
            }
            _ => Err(ConfigError::new("partition", "give either squares or cuts")),
        }
    }

    fn thin_bounds(&self) -> Result<Vec<i64>, ConfigError> {
        let t = self.cfg.thin.clone().ok_or_else(|| ConfigError::new("thin", "section required"))?;
        let count = || t.count.ok_or_else(|| ConfigError::new("thin.count", "required"));
        let overflow = || ConfigError::new("thin.count", "bounds overflow 64-bit integers");
        let m = match (t.bounds, t.powers_of, t.self_powers) {
            (Some(b), None, false) => b,
            (None, Some(base), false) => {
                if base < 2 {
                    return Err(ConfigError::new("thin.powers_of", "base must be at least 2"));
                }
                (1..=count()?).map(|n| (base as i64).checked_pow(n).ok_or_else(overflow)).collect::<Result<_, _>>()?
            }
            (None, None, true) => {
                (1..=count()?).map(|n| (n as i64).checked_pow(n).ok_or_else(overflow)).collect::<Result<_, _>>()?
            }
            _ => return Err(ConfigError::new("thin", "give exactly one of bounds, powers_of, self_powers")),
        };
        if m.len() < 2 {
            return Err(ConfigError::new("thin", "need at least two bounds"));
        }
        if m.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::new("thin", "bounds must increase strictly"));
        }
        Ok(m)
    }

    fn hom_target(&self, pairs: &[[String; 2]], path: &str) -> Result<HomTarget, ConfigError> {
        let pairs = pairs
            .iter()
            .enumerate()
            .map(|(i, [a, b])| {
                Ok((self.element(a, &format!("{path}[{i}][0]"))?, self.element(b, &format!("{path}[{i}][1]"))?))
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        HomTarget::new(pairs).map_err(|e| ConfigError::new(path, e.to_string()))
    }

    fn realized(&self) -> Result<(HomTarget, Vec<i64>, Value), CliError> {
        let rs = self.cfg.realize.clone().ok_or_else(|| ConfigError::new("realize", "section required"))?;
        let target = self.hom_target(&rs.pairs, "realize.pairs")?;
        let n_max = rs.n_max.unwrap_or(10);
        if n_max == 0 {
            return Err(ConfigError::new("realize.n_max", "must be positive").into());
        }
        let bound = rs.search_bound.unwrap_or(10_000_000);
        check_solvable(&target).map_err(|e| ConfigError::new("realize.pairs", e.to_string()))?;
        let chi = realize_sequence(&target, n_max, bound).map_err(ctx("realize"))?;
        let mut rows = Vec::with_capacity(n_max);
        for (i, &x) in chi.iter().enumerate() {
            let n = i + 1;
            let radius = Threshold::new(r(1, n as i64));
            let mut residuals = Vec::new();
            let mut certified = true;
            for (a, b) in target.pairs.iter().take(n) {
                let pa = PreparedElement::new(a.clone());
                let pb = PreparedElement::new(b.clone());
                let centre = (!b.is_zero()).then_some(&pb);
                let ord = pa.order_norm_shifted(x, centre, &radius, Precision::default()).map_err(|e| ctx("realize")(e.into()))?;
                certified &= ord == NormOrdering::Less;
                let diff = &a.mul_int(x) - b;
                let hi = PreparedElement::new(diff).norm(1, 96).map_err(|e| ctx("realize")(e.into()))?.hi;
                residuals.push(decimal_string(&hi, 20, true));
            }
            rows.push(json!({ "n": n, "chi": x, "residual_upper": residuals, "certified_below_1_over_n": certified }));
        }
        let echo = json!({
            "pairs": target.pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
            "relation_lattice": to_value(&target.lattice()),
            "search_bound": bound,
            "realized": rows,
        });
        Ok((target, chi, echo))
    }
}

fn check_sigma(path: &str, sigma: &Rational) -> Result<(), ConfigError> {
    if *sigma <= Rational::zero() {
        return Err(ConfigError::new(path, "σ must be > 0"));
    }
    if *sigma >= r(1, 3) {
        return Err(ConfigError::new(path, format!("σ must be < 1/3 (got {sigma})")));
    }
    Ok(())
}

/// `n, k, norm_lower, norm_upper` for every term, bounds rounded outward.
fn probe_table(name: String, seq: &[i64], probe: &CircleElement) -> Result<CsvTable, CliError> {
    let p = PreparedElement::new(probe.clone());
    let mut rows = Vec::with_capacity(seq.len());
    for (i, &k) in seq.iter().enumerate() {
        let b = p.norm(k, 96).map_err(|e| ctx(format!("probe {probe}"))(e.into()))?;
        rows.push(vec![(i + 1).to_string(), k.to_string(), decimal_string(&b.lo, 20, false), decimal_string(&b.hi, 20, true)]);
    }
    Ok(CsvTable { name, header: ["n", "k", "norm_lower", "norm_upper"].map(String::from).to_vec(), rows })
}

fn probe_tables(seq: &[i64], probes: &[Probe]) -> Result<Vec<CsvTable>, CliError> {
    probes.iter().enumerate().map(|(i, p)| probe_table(format!("probe_{}.csv", i + 1), seq, &p.element)).collect()
}

fn probe_index(probes: &[Probe]) -> Value {
    Value::Array(
        probes
            .iter()
            .enumerate()
            .map(|(i, p)| {
                json!({
                    "csv": format!("probe_{}.csv", i + 1),
                    "probe": p.label,
                    "element": p.element.to_string(),
                    "expected": p.expectation.map(|e| to_value(&e)),
                })
            })
            .collect(),
    )
}

fn expected(probes: &[Probe]) -> Vec<(CircleElement, Expectation)> {
    probes.iter().filter_map(|p| p.expectation.map(|e| (p.element.clone(), e))).collect()
}

/// Executes a run without touching the filesystem (except to read inputs
/// named by the config).
pub fn execute(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let command = match (opts.command, cfg.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(ConfigError::new("command", format!("config is for {}, not {}", b.name(), a.name())).into())
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(ConfigError::new("command", "no command given").into()),
    };
    let start = Instant::now();
    let c = Ctx { cfg, table: cfg.symbol_table()? };
    let (result, tables) = match command {
        Command::Characterize => run_characterize(&c)?,
        Command::Verify => run_verify(&c)?,
        Command::Thicken => run_thicken(&c)?,
        Command::Thin => run_thin(&c)?,
        Command::Realize => {
            let (_, _, echo) = c.realized()?;
            (echo, Vec::new())
        }
        Command::Interleave => run_interleave(&c)?,
        Command::Filter => run_filter(&c)?,
        Command::PadicDemo => run_padic(&c)?,
        Command::Stats => run_stats(&c)?,
    };
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        tool: json!({ "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") }),
        command: command.name(),
        seed: cfg.seed,
        config: cfg,
        result,
        wall_time_ms: opts.timing.then(|| start.elapsed().as_millis()),
    };
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    json.push('\n');
    Ok(RunOutput { command, json, tables })
}

/// Writes the report and CSV tables where the config's `[output]` asks
/// (defaults: `report.json` and `csv/` next to the config).
pub fn write_outputs(cfg: &RunConfig, out: &RunOutput) -> Result<Vec<PathBuf>, CliError> {
    let o = cfg.output.clone().unwrap_or_default();
    let json_path = cfg.resolve_path(o.json.as_deref().unwrap_or(Path::new("report.json")));
    let csv_dir = cfg.resolve_path(o.csv_dir.as_deref().unwrap_or(Path::new("csv")));
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    if let Some(parent) = json_path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
    }
    std::fs::write(&json_path, &out.json).map_err(|e| io(&json_path, e))?;
    let mut written = vec![json_path];
    if !out.tables.is_empty() {
        std::fs::create_dir_all(&csv_dir).map_err(|e| io(&csv_dir, e))?;
        for t in &out.tables {
            let p = csv_dir.join(&t.name);
            std::fs::write(&p, t.to_csv()?).map_err(|e| io(&p, e))?;
            written.push(p);
        }
    }
    Ok(written)
}

/// Loads, executes and writes one config file.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<(RunOutput, Vec<PathBuf>), CliError> {
    let cfg = RunConfig::load(path)?;
    let out = execute(&cfg, opts)?;
    let written = write_outputs(&cfg, &out)?;
    Ok((out, written))
}

type CommandOutput = (Value, Vec<CsvTable>);

fn run_characterize(c: &Ctx) -> Result<CommandOutput, CliError> {
    let ch = c.characterization(&[])?;
    let g = &ch.group;
    let probes = c.probes(Some(g))?;
    let seq = ch.sequence();
    let late: Vec<i64> = seq
        .iter()
        .filter(|(_, p)| matches!(p, Provenance::Stage { stage } | Provenance::Padding { stage } if *stage >= 2))
        .map(|(k, _)| k)
        .collect();
    let checked = if late.is_empty() { seq.terms().to_vec() } else { late };
    let ps = c.probe_section();
    let sigma = c.verify_sigma(ch.options.sigma.clone())?;
    let report = verify(&checked, &expected(&probes), &sigma, ps.tail_window.unwrap_or(checked.len()), ps.block.unwrap_or(50))
        .map_err(ctx("verify"))?;
    let certified = ch.certify().map_err(ctx("certify"))?;
    let result = json!({
        "group": describe_prefix(g, ch.stages.len()),
        "sigma": ch.options.sigma.to_string(),
        "stages": to_value(&ch.stages),
        "certified": certified,
        "sequence": to_value(&seq),
        "late_terms": checked.len(),
        "probes": probe_index(&probes),
        "verify": to_value(&report),
    });
    Ok((result, probe_tables(seq.terms(), &probes)?))
}

fn run_verify(c: &Ctx) -> Result<CommandOutput, CliError> {
    let (seq, source) = c.input_sequence(&[])?;
    let group = c.cfg.group.as_ref().map(|_| c.group()).transpose()?;
    let probes = c.probes(group.as_ref())?;
    if probes.is_empty() {
        return Err(ConfigError::new("probes", "no probes to verify").into());
    }
    let default_sigma = match &c.cfg.characterize {
        Some(_) => c.char_options()?.sigma,
        None => r(1, 4),
    };
    let sigma = c.verify_sigma(default_sigma)?;
    let ps = c.probe_section();
    let report = verify(seq.terms(), &expected(&probes), &sigma, ps.tail_window.unwrap_or(seq.len()), ps.block.unwrap_or(50))
        .map_err(ctx("verify"))?;
    let result = json!({
        "source": source,
        "sequence": to_value(&seq),
        "probes": probe_index(&probes),
        "verify": to_value(&report),
    });
    Ok((result, probe_tables(seq.terms(), &probes)?))
}

fn run_thicken(c: &Ctx) -> Result<CommandOutput, CliError> {
    let g = c.group()?;
    let partition = c.partition()?;
    let (base, source) = c.input_sequence(&[])?;
    let (seq, plan) = thicken(&base, &partition, &g).map_err(ctx("thicken"))?;
    let tail = (seq.len() / 4).max(1);
    let stats = quotient_stats(seq.terms(), tail, Some(&partition)).map_err(ctx("thicken: stats"))?;
    let density_met = stats.per_interval.iter().all(|i| i.count >= i.required);
    let probes = c.probes(Some(&g))?;
    let result = json!({
        "source": source,
        "base_len": base.len(),
        "partition": {
            "cuts": (0..=partition.len()).map(|j| if j < partition.len() { partition.interval(j).0 } else { partition.end() }).collect::<Vec<_>>(),
            "densities": (0..partition.len()).map(|j| partition.density(j).to_string()).collect::<Vec<_>>(),
        },
        "levels": plan.level_curve(),
        "plan": to_value(&plan),
        "sequence": to_value(&seq),
        "stats": to_value(&stats),
        "density_met": density_met,
        "probes": probe_index(&probes),
    });
    Ok((result, probe_tables(seq.terms(), &probes)?))
}

fn run_thin(c: &Ctx) -> Result<CommandOutput, CliError> {
    let m = c.thin_bounds()?;
    let (base, source) = c.input_sequence(&m)?;
    let seq = thin(&base, &m).map_err(ctx("thin"))?;
    let k = seq.terms();
    // output index i + 2 sits at position i
    let bounds_respected = k.iter().enumerate().all(|(i, &x)| m.get(i + 1).is_none_or(|&b| b < x));
    let difference_identity = (0..k.len() / 2).all(|n| k[2 * n + 1] - k[2 * n] == base.terms()[n]);
    let stats = quotient_stats(k, (k.len() / 4).max(1), None).map_err(ctx("thin: stats"))?;
    let group = c.cfg.group.as_ref().map(|_| c.group()).transpose()?;
    let probes = c.probes(group.as_ref())?;
    let verify_report = if probes.iter().any(|p| p.expectation.is_some()) {
        let ps = c.probe_section();
        let sigma = c.verify_sigma(match &c.cfg.characterize {
            Some(_) => c.char_options()?.sigma,
            None => r(1, 4),
        })?;
        Some(verify(k, &expected(&probes), &sigma, ps.tail_window.unwrap_or(k.len()), ps.block.unwrap_or(50)).map_err(ctx("verify"))?)
    } else {
        None
    };
    let result = json!({
        "source": source,
        "bounds": m,
        "base_len": base.len(),
        "first_index": 2,
        "sequence": to_value(&seq),
        "bounds_respected": bounds_respected,
        "difference_identity": difference_identity,
        "stats": to_value(&stats),
        "probes": probe_index(&probes),
        "verify": verify_report.as_ref().map(to_value),
    });
    Ok((result, probe_tables(k, &probes)?))
}

fn run_interleave(c: &Ctx) -> Result<CommandOutput, CliError> {
    let (target, chi, realized) = c.realized()?;
    let (maker, source) = c.input_sequence(&[])?;
    let s = c.cfg.interleave.clone().unwrap_or_default();
    let (primary, divergence): (&[i64], &[i64]) = match s.align.as_deref().unwrap_or("strict") {
        "strict" => (&chi, maker.terms()),
        "tail" => {
            let n = chi.len().min(maker.len());
            (&chi[chi.len() - n..], &maker.terms()[maker.len() - n..])
        }
        other => return Err(ConfigError::new("interleave.align", format!("unknown alignment {other:?}")).into()),
    };
    let seq = interleave(primary, divergence).map_err(ctx("interleave"))?;
    let gap = opt_rational(s.gap.as_ref(), "interleave.gap", r(1, 4))?;
    if gap <= Rational::zero() || gap > one_half() {
        return Err(ConfigError::new("interleave.gap", "must lie in (0, 1/2]").into());
    }
    let tolerance = opt_rational(s.tolerance.as_ref(), "interleave.tolerance", &gap / Rational::from_integer(2.into()))?;
    if tolerance <= Rational::zero() {
        return Err(ConfigError::new("interleave.tolerance", "must be positive").into());
    }
    let tail_window = s.tail_window.unwrap_or(8);
    let group = c.cfg.group.as_ref().map(|_| c.group()).transpose()?;
    let probes = c.probes(group.as_ref())?;
    let mut limits = Vec::new();
    for p in &probes {
        let rep = classify_limit(&seq, &p.element, tail_window, &gap, &tolerance).map_err(ctx(format!("classify {}", p.label)))?;
        let image = target.pairs.iter().find(|(a, _)| *a == p.element).map(|(_, b)| b.clone());
        let contains = image.as_ref().map(|b| rep.hull_contains(b)).transpose().map_err(ctx("classify"))?;
        limits.push(json!({
            "probe": p.label,
            "image": image.map(|b| b.to_string()),
            "hull_contains_image": contains,
            "report": to_value(&rep),
        }));
    }
    let result = json!({
        "realize": realized,
        "source": source,
        "aligned_len": primary.len(),
        "primary": primary,
        "divergence_maker": divergence,
        "interleaved": seq,
        "probes": probe_index(&probes),
        "limits": limits,
    });
    Ok((result, probe_tables(&seq, &probes)?))
}

fn run_filter(c: &Ctx) -> Result<CommandOutput, CliError> {
    let f = c.cfg.filter.clone().ok_or_else(|| ConfigError::new("filter", "section required"))?;
    let eps = f.epsilon.to_rational("filter.epsilon")?;
    if eps <= Rational::zero() || eps >= one_half() {
        return Err(ConfigError::new("filter.epsilon", "ε must lie in (0, 1/2)").into());
    }
    let basis = match f.kind.as_str() {
        "subgroup" => {
            let gens = match &f.generators {
                Some(g) => c.elements(g, "filter.generators")?,
                None => c.group()?.generators().to_vec(),
            };
            if gens.is_empty() {
                return Err(ConfigError::new("filter.generators", "need at least one generator").into());
            }
            let p = BohrParams::new(gens, eps).map_err(|e| ConfigError::new("filter", e.to_string()))?;
            FilterBasis::Subgroup(p.excluding(f.excluded.iter().copied()))
        }
        "homomorphism" => {
            let pairs = f.pairs.as_ref().ok_or_else(|| ConfigError::new("filter.pairs", "required for homomorphism"))?;
            let t = c.hom_target(pairs, "filter.pairs")?;
            check_solvable(&t).map_err(|e| ConfigError::new("filter.pairs", e.to_string()))?;
            FilterBasis::homomorphism(t, eps).map_err(|e| ConfigError::new("filter.epsilon", e.to_string()))?
        }
        other => return Err(ConfigError::new("filter.kind", format!("unknown kind {other:?}")).into()),
    };
    let bound = f.search_bound.unwrap_or(10_000_000);
    let members = iterated_witnesses(&basis, f.witnesses.unwrap_or(5), bound).map_err(ctx("filter: witnesses"))?;
    let target = match &f.target {
        Some(t) => c.element(t, "filter.target")?,
        None => CircleElement::zero(),
    };
    let gap = opt_rational(f.gap.as_ref(), "filter.gap", r(1, 4))?;
    if gap <= Rational::zero() || gap > one_half() {
        return Err(ConfigError::new("filter.gap", "must lie in (0, 1/2]").into());
    }
    let mut divergence = Vec::new();
    for (i, s) in f.probes.iter().enumerate() {
        let beta = c.element(s, &format!("filter.probes[{i}]"))?;
        let w = divergence_witnesses(&basis, &beta, &target, &gap, f.divergence_count.unwrap_or(5), bound)
            .map_err(ctx(format!("filter: probe {s}")))?;
        divergence.push(json!({ "probe": s, "witnesses": to_value(&w) }));
    }
    let result = json!({
        "kind": f.kind,
        "epsilon": basis.epsilon().to_string(),
        "members": members,
        "target": target.to_string(),
        "gap": gap.to_string(),
        "divergence": divergence,
        "search_bound": bound,
    });
    Ok((result, Vec::new()))
}

fn run_padic(c: &Ctx) -> Result<CommandOutput, CliError> {
    let p = c.cfg.padic.clone().ok_or_else(|| ConfigError::new("padic", "section required"))?;
    let rule = match p.rule.as_deref().unwrap_or("all-ones") {
        "all-ones" => DigitRule::AllOnes,
        "periodic" => DigitRule::Periodic(p.pattern.clone().ok_or_else(|| ConfigError::new("padic.pattern", "required"))?),
        "custom" => DigitRule::Custom {
            digits: p.digits.clone().ok_or_else(|| ConfigError::new("padic.digits", "required"))?,
            certificate: p.certificate.clone().unwrap_or_default(),
        },
        other => return Err(ConfigError::new("padic.rule", format!("unknown rule {other:?}")).into()),
    };
    let spec = PadicSpec::new(p.p, rule).map_err(|e| ConfigError::new("padic", e.to_string()))?;
    let n_max = p.n_max.unwrap_or(20);
    let l_max = p.l_max.unwrap_or(3);
    if n_max == 0 || l_max == 0 {
        return Err(ConfigError::new("padic", "n_max and l_max must be positive").into());
    }
    let extra = p
        .extra
        .iter()
        .enumerate()
        .map(|(i, s)| {
            config::parse_rational(s).ok_or_else(|| ConfigError::new(format!("padic.extra[{i}]"), "expected a rational"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let terms = build_sequence(&spec, n_max).map_err(ctx("padic"))?;
    let limit = padic_limit_check(&spec, n_max).map_err(ctx("padic"))?;
    let conv = circle_convergence_set(&spec, l_max, n_max, &extra).map_err(ctx("padic"))?;
    let mut rows = Vec::new();
    for probe in &conv.probes {
        for (i, cn) in terms.iter().enumerate() {
            let v = crate::circle::rational_norm(&(&probe.alpha * Rational::from_integer(cn.clone())));
            rows.push(vec![
                probe.l.to_string(),
                probe.a.to_string(),
                (i + 1).to_string(),
                cn.to_string(),
                v.to_string(),
                decimal_string(&v, 20, false),
                decimal_string(&v, 20, true),
            ]);
        }
    }
    let table = CsvTable {
        name: "padic.csv".into(),
        header: ["l", "a", "n", "c_n", "norm", "norm_lower", "norm_upper"].map(String::from).to_vec(),
        rows,
    };
    let result = json!({
        "p": spec.p,
        "terms": terms.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "limit_check": to_value(&limit),
        "convergence": to_value(&conv),
    });
    Ok((result, vec![table]))
}

fn run_stats(c: &Ctx) -> Result<CommandOutput, CliError> {
    let (seq, source) = c.input_sequence(&[])?;
    let partition = c.cfg.partition.as_ref().map(|_| c.partition()).transpose()?;
    let tail = c.cfg.stats.as_ref().and_then(|s| s.tail_window).unwrap_or((seq.len() / 4).max(1));
    let stats = quotient_stats(seq.terms(), tail, partition.as_ref()).map_err(ctx("stats"))?;
    let result = json!({
        "source": source,
        "sequence": to_value(&seq),
        "stats": to_value(&stats),
    });
    Ok((result, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Result<RunOutput, CliError> {
        execute(&RunConfig::parse(text, ".").unwrap(), &RunOptions::default())
    }

    #[test]
    fn sigma_validation_message() {
        let err = run("command = \"characterize\"\n[group]\ngenerators = [\"1/5\"]\n[characterize]\nsigma = 0.4\n").unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let msg = err.to_string();
        assert!(msg.contains("σ must be < 1/3") && msg.starts_with("characterize.sigma"), "{msg}");
    }

    #[test]
    fn characterize_report() {
        let out = run(
            "command = \"characterize\"\n[group]\ngenerators = [\"1/5\"]\n[probes]\nlist = [\"1/5\", \"1/7\"]\n",
        )
        .unwrap();
        let v: Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["result"]["certified"], true);
        let probes = v["result"]["verify"]["probes"].as_array().unwrap();
        assert_eq!(probes[0]["expected"], "Converge0");
        assert_eq!(probes[0]["sup"], "0.00000000000000000000");
        assert_eq!(probes[1]["expected"], "Diverge");
        assert_eq!(probes[1]["every_block_witnessed"], true);
        assert_eq!(out.tables.len(), 2);
        assert_eq!(out.tables[0].header, ["n", "k", "norm_lower", "norm_upper"]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run("command = \"thin\"\n").unwrap_err().exit_code(), 1);
        let budget = run(
            "command = \"characterize\"\n[group]\ngenerators = [\"sqrt2\", \"sqrt3\"]\n[characterize]\nbudget = 1\nmax_m = 1\n",
        )
        .unwrap_err();
        assert_eq!(budget.exit_code(), 2, "{budget}");
        let bad = run("command = \"realize\"\n[realize]\npairs = [[\"1/4\", \"1/3\"]]\n").unwrap_err();
        assert_eq!(bad.exit_code(), 1);
    }

    #[test]
    fn padic_demo_matches_module() {
        let out = run("command = \"padic-demo\"\n[padic]\np = 3\nl_max = 3\n").unwrap();
        let v: Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(v["result"]["terms"].as_array().unwrap()[..4], [json!("3"), json!("12"), json!("30"), json!("93")]);
        assert_eq!(v["result"]["convergence"]["converge0"], json!(["0", "1/3", "2/3"]));
        assert_eq!(out.tables[0].rows.len(), 39 * 20);
    }

    #[test]
    fn sampled_probes_follow_seed() {
        let cfg = "command = \"verify\"\nseed = 11\n[group]\ngenerators = [\"1/6\"]\n[sequence]\nterms = [6, 12, 18, 24]\n[probes]\nsample = 4\n";
        let a = run(cfg).unwrap();
        assert_eq!(a.json, run(cfg).unwrap().json);
        let other = run(&cfg.replace("seed = 11", "seed = 12")).unwrap();
        assert_ne!(a.json, other.json);
    }
}
