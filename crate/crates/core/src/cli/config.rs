//! TOML run configuration.
//!
//! Numbers that must stay exact are written as strings (`"3/10"`,
//! `"0.25"`); bare TOML numbers are accepted and read through their
//! shortest decimal form. Group elements are small expressions such as
//! `"1/6 + sqrt2"` or `"2*sqrt3 - 1/4"`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{CircleElement, IrrationalSymbol, Rational};
use crate::constants::{builtin, sqrt5, DecimalExpansion};

/// A configuration problem, located by its field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Characterize,
    Verify,
    Thicken,
    Thin,
    Realize,
    Interleave,
    Filter,
    PadicDemo,
    Stats,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Characterize => "characterize",
            Command::Verify => "verify",
            Command::Thicken => "thicken",
            Command::Thin => "thin",
            Command::Realize => "realize",
            Command::Interleave => "interleave",
            Command::Filter => "filter",
            Command::PadicDemo => "padic-demo",
            Command::Stats => "stats",
        }
    }
}

/// A rational written as text or as a TOML number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn to_rational(&self, path: &str) -> ConfigResult<Rational> {
        let text = match self {
            Num::Int(i) => return Ok(Rational::from_integer((*i).into())),
            Num::Float(f) if f.is_finite() => f.to_string(),
            Num::Float(_) => return Err(ConfigError::new(path, "not a finite number")),
            Num::Text(s) => s.clone(),
        };
        parse_rational(&text).ok_or_else(|| ConfigError::new(path, format!("cannot read {text:?} as an exact rational")))
    }
}

/// `"a/b"`, an integer, or a terminating decimal.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let q = if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = parse_digits(a.trim())?;
        let b: BigInt = parse_digits(b.trim())?;
        if b.is_zero() {
            return None;
        }
        Rational::new(a, b)
    } else if let Some((int, frac)) = t.split_once('.') {
        if (int.is_empty() && frac.is_empty()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { parse_digits(int)? };
        let den = BigInt::from(10).pow(frac.len() as u32);
        let frac: BigInt = if frac.is_empty() { BigInt::zero() } else { parse_digits(frac)? };
        Rational::new(int * &den + frac, den)
    } else {
        Rational::from_integer(parse_digits(t)?)
    };
    Some(if neg { -q } else { q })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// A user symbol: a decimal expansion given inline or in a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSource {
    pub digits: Option<String>,
    pub digits_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterizeSection {
    pub sigma: Option<Num>,
    pub stages: Option<usize>,
    pub budget: Option<u64>,
    pub max_m: Option<u64>,
    pub precision_cap: Option<u32>,
}

/// Where an input sequence comes from. With no field set, the sequence is
/// built by `characterize` from `[group]` and `[characterize]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSection {
    pub terms: Option<Vec<i64>>,
    /// A JSON report whose `result.sequence.terms` is read.
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbesSection {
    /// Probes classified against `[group]`.
    #[serde(default)]
    pub list: Vec<String>,
    #[serde(default)]
    pub converge: Vec<String>,
    #[serde(default)]
    pub diverge: Vec<String>,
    /// Number of random rational probes drawn with the run seed.
    #[serde(default)]
    pub sample: usize,
    pub max_denominator: Option<u64>,
    pub sigma: Option<Num>,
    pub tail_window: Option<usize>,
    pub block: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    /// Cuts `j²` for `j ≤ squares + 1` with densities `1/(j + offset)`.
    pub squares: Option<usize>,
    pub offset: Option<i64>,
    pub cuts: Option<Vec<i64>>,
    pub densities: Option<Vec<Num>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinSection {
    /// Explicit bounds `m₁, m₂, …`.
    pub bounds: Option<Vec<i64>>,
    /// `mₙ = baseⁿ` for `n ≤ count`.
    pub powers_of: Option<u32>,
    /// `mₙ = nⁿ` for `n ≤ count`.
    #[serde(default)]
    pub self_powers: bool,
    pub count: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizeSection {
    /// `[source, image]` pairs.
    pub pairs: Vec<[String; 2]>,
    pub n_max: Option<usize>,
    pub search_bound: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterleaveSection {
    /// `"strict"` (lengths must agree) or `"tail"` (keep the last terms of
    /// the longer input).
    pub align: Option<String>,
    pub tail_window: Option<usize>,
    pub gap: Option<Num>,
    pub tolerance: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    /// `"subgroup"` or `"homomorphism"`.
    pub kind: String,
    pub generators: Option<Vec<String>>,
    pub pairs: Option<Vec<[String; 2]>>,
    pub epsilon: Num,
    #[serde(default)]
    pub excluded: Vec<i64>,
    pub witnesses: Option<usize>,
    #[serde(default)]
    pub probes: Vec<String>,
    pub target: Option<String>,
    pub gap: Option<Num>,
    pub divergence_count: Option<usize>,
    pub search_bound: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadicSection {
    pub p: u32,
    /// `"all-ones"`, `"periodic"` or `"custom"`.
    pub rule: Option<String>,
    pub pattern: Option<Vec<u32>>,
    pub digits: Option<Vec<u32>>,
    pub certificate: Option<String>,
    pub n_max: Option<usize>,
    pub l_max: Option<u32>,
    #[serde(default)]
    pub extra: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsSection {
    pub tail_window: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub json: Option<PathBuf>,
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub symbols: BTreeMap<String, SymbolSource>,
    pub group: Option<GroupSection>,
    pub characterize: Option<CharacterizeSection>,
    pub sequence: Option<SequenceSection>,
    pub probes: Option<ProbesSection>,
    pub partition: Option<PartitionSection>,
    pub thin: Option<ThinSection>,
    pub realize: Option<RealizeSection>,
    pub interleave: Option<InterleaveSection>,
    pub filter: Option<FilterSection>,
    pub padic: Option<PadicSection>,
    pub stats: Option<StatsSection>,
    pub output: Option<OutputSection>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> ConfigResult<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            ConfigError::new("", format!("invalid config: {msg}"))
        })?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, dir)
    }

    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Built-in and user symbols by name.
    pub fn symbol_table(&self) -> ConfigResult<SymbolTable> {
        let mut table = SymbolTable::default();
        for (name, src) in &self.symbols {
            let path = format!("symbols.{name}");
            if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || name.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(ConfigError::new(path, "symbol names are alphanumeric and start with a letter"));
            }
            if table.lookup(name).is_some() {
                return Err(ConfigError::new(path, "name clashes with a built-in constant"));
            }
            let text = match (&src.digits, &src.digits_file) {
                (Some(d), None) => d.clone(),
                (None, Some(f)) => std::fs::read_to_string(self.resolve_path(f))
                    .map_err(|e| ConfigError::new(format!("{path}.digits_file"), e.to_string()))?,
                _ => return Err(ConfigError::new(path, "give exactly one of digits or digits_file")),
            };
            let exp = DecimalExpansion::parse(&text)
                .ok_or_else(|| ConfigError::new(path.clone(), "not a decimal expansion"))?;
            if exp.max_bits() < 64 {
                return Err(ConfigError::new(path, "need at least 20 decimal digits"));
            }
            table.user.insert(name.clone(), exp.into_symbol(name.clone()));
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    user: BTreeMap<String, IrrationalSymbol>,
}

impl SymbolTable {
    /// A name as a circle element; the golden ratio is `1/2 + sqrt5/2`.
    pub fn lookup(&self, name: &str) -> Option<CircleElement> {
        let canonical = match name {
            "√2" => "sqrt2",
            "√3" => "sqrt3",
            "√5" => "sqrt5",
            "π" => "pi",
            "ln2" | "log_2" => "log2",
            "φ" | "phi" | "golden" => {
                let half = Rational::new(BigInt::one(), BigInt::from(2));
                return Some(CircleElement::from_parts(half.clone(), [(sqrt5(), half)]));
            }
            other => other,
        };
        builtin(canonical)
            .or_else(|| self.user.get(canonical).cloned())
            .map(|s| CircleElement::symbol(&s))
    }

    /// Parses `term (± term)*` where a term is a rational, a name, or
    /// `coef*name` / `name/den`.
    pub fn element(&self, expr: &str, path: &str) -> ConfigResult<CircleElement> {
        let err = |m: String| ConfigError::new(path, m);
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut neg = false;
        for ch in expr.chars() {
            if (ch == '+' || ch == '-') && !current.trim().is_empty() && !current.trim_end().ends_with('*') {
                terms.push((neg, std::mem::take(&mut current)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && current.trim().is_empty() {
                neg ^= ch == '-';
            } else {
                current.push(ch);
            }
        }
        terms.push((neg, current));
        let mut acc = CircleElement::zero();
        for (neg, term) in terms {
            let term = term.trim();
            if term.is_empty() {
                return Err(err(format!("empty term in {expr:?}")));
            }
            let mut value = self.term(term).ok_or_else(|| err(format!("cannot read {term:?} in {expr:?}")))?;
            if neg {
                value = -&value;
            }
            acc = &acc + &value;
        }
        Ok(acc)
    }

    fn term(&self, term: &str) -> Option<CircleElement> {
        if let Some(q) = parse_rational(term) {
            return Some(CircleElement::rational(q));
        }
        let (coef, atom) = match term.split_once('*') {
            Some((c, a)) => (parse_rational(c)?, a.trim()),
            None => (Rational::one(), term),
        };
        let (atom, den) = match atom.split_once('/') {
            Some((a, d)) => (a.trim(), parse_digits(d.trim()).filter(|d| !d.is_zero())?),
            None => (atom, BigInt::one()),
        };
        let base = self.lookup(atom)?;
        Some(scale(&base, &(coef / Rational::from_integer(den))))
    }
}

/// `q·x` for a rational `q`.
pub fn scale(x: &CircleElement, q: &Rational) -> CircleElement {
    let coeffs = x.coefficients().iter().map(|(s, c)| (s.clone(), c * q));
    CircleElement::from_parts(x.rational_part() * q, coeffs)
}
