//! Flat `key = value` run configuration with per-algorithm sections.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use distapprox::general::Provider;
use distapprox::graph::{GraphKind, WeightMode};
use distapprox::matching::SolverMode;

use crate::CliError;

/// Pipelines the runner can execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    MwvcBipartite,
    MwvcGeneral,
    MwmRandomized,
    MwmDeterministic,
    ClusterOnly,
    FractionalOnly,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::MwvcBipartite,
        Algorithm::MwvcGeneral,
        Algorithm::MwmRandomized,
        Algorithm::MwmDeterministic,
        Algorithm::ClusterOnly,
        Algorithm::FractionalOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MwvcBipartite => "mwvc-bipartite",
            Algorithm::MwvcGeneral => "mwvc-general",
            Algorithm::MwmRandomized => "mwm-rand",
            Algorithm::MwmDeterministic => "mwm-det",
            Algorithm::ClusterOnly => "cluster-only",
            Algorithm::FractionalOnly => "fractional-only",
        }
    }

    /// Weights generated graphs carry for this algorithm.
    pub fn weight_mode(self) -> WeightMode {
        match self {
            Algorithm::MwmRandomized | Algorithm::MwmDeterministic => WeightMode::Edge,
            _ => WeightMode::Node,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm `{s}`, expected one of {}", names.join(", "))
            })
    }
}

/// Where the graphs of a run come from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Generated(GraphKind),
    File(PathBuf),
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub source: GraphSource,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub trials: usize,
    pub oracle: bool,
    pub out: PathBuf,
    pub max_weight: u64,
    pub bit_budget: Option<usize>,
    pub timing: bool,
    pub provider: Provider,
    pub iterations: Option<usize>,
    pub family_k: Option<usize>,
    pub solver: SolverMode,
    pub threads: Option<usize>,
}

/// Raw key-value settings; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

const KEYS: [&str; 16] = [
    "alg",
    "gen",
    "graph",
    "eps",
    "delta",
    "seed",
    "trials",
    "oracle",
    "out",
    "max_weight",
    "bit_budget",
    "no_timing",
    "provider",
    "iterations",
    "family_k",
    "solver",
];

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalize_key(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }
}

/// Parsed config file: global keys plus one table per `[section]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub global: Settings,
    pub sections: BTreeMap<String, Settings>,
}

impl ConfigFile {
    /// Parses `key = value` lines, `#` comments and `[section]` headers.
    /// Keys before any header or under `[run]` are global.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut file = ConfigFile::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                section = if name == "run" { None } else { Some(name.to_string()) };
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected `key = value`", i + 1)));
            };
            let key = normalize_key(key);
            if !KEYS.contains(&key.as_str()) && key != "threads" {
                return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            let target = match &section {
                None => &mut file.global,
                Some(name) => file.sections.entry(name.clone()).or_default(),
            };
            target.set(&key, value.trim());
        }
        Ok(file)
    }
}

fn parse_value<T: FromStr>(settings: &Settings, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: fmt::Display,
{
    match settings.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|e| CliError::Usage(format!("bad value `{v}` for {key}: {e}"))),
    }
}

fn parse_bool(settings: &Settings, key: &str) -> Result<bool, CliError> {
    match settings.get(key) {
        None => Ok(false),
        Some("true" | "yes" | "1") => Ok(true),
        Some("false" | "no" | "0") => Ok(false),
        Some(v) => Err(CliError::Usage(format!("bad value `{v}` for {key}: expected true or false"))),
    }
}

fn parse_provider(s: &str) -> Result<Provider, CliError> {
    match s {
        "greedy" => Ok(Provider::GreedyColoring),
        "two-coloring" | "two_coloring" => Ok(Provider::TwoColoring),
        "auto" => Ok(Provider::Auto),
        _ => Err(CliError::Usage(format!("unknown provider `{s}`, expected greedy, two-coloring or auto"))),
    }
}

fn parse_solver(s: &str) -> Result<SolverMode, CliError> {
    match s {
        "exact" => Ok(SolverMode::Exact),
        "throttled" => Ok(SolverMode::Throttled),
        _ => Err(CliError::Usage(format!("unknown solver `{s}`, expected exact or throttled"))),
    }
}

/// Layers file globals, the chosen algorithm's section, then `flags`.
pub fn resolve(file: Option<&ConfigFile>, flags: &Settings) -> Result<RunConfig, CliError> {
    let mut settings = Settings::default();
    if let Some(f) = file {
        settings.merge(&f.global);
    }
    let alg_name = flags
        .get("alg")
        .or_else(|| settings.get("alg"))
        .ok_or_else(|| CliError::Usage("missing algorithm (--alg)".into()))?
        .to_string();
    let algorithm: Algorithm = alg_name.parse().map_err(CliError::Usage)?;
    if let Some(section) = file.and_then(|f| f.sections.get(algorithm.name())) {
        settings.merge(section);
    }
    settings.merge(flags);

    let source = match (settings.get("gen"), settings.get("graph")) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --gen or --graph, not both".into())),
        (Some(spec), None) => GraphSource::Generated(
            spec.parse().map_err(|e: distapprox::Error| CliError::Usage(e.to_string()))?,
        ),
        (None, Some(path)) => GraphSource::File(PathBuf::from(path)),
        (None, None) => return Err(CliError::Usage("missing graph source (--gen or --graph)".into())),
    };
    let epsilon: f64 = parse_value(&settings, "eps")?.ok_or_else(|| CliError::Usage("missing ε (--eps)".into()))?;
    let trials = parse_value(&settings, "trials")?.unwrap_or(1);
    if trials == 0 {
        return Err(CliError::Usage("trials must be positive".into()));
    }
    Ok(RunConfig {
        algorithm,
        source,
        epsilon,
        delta: parse_value(&settings, "delta")?.unwrap_or(0.25),
        seed: parse_value(&settings, "seed")?.unwrap_or(0),
        trials,
        oracle: parse_bool(&settings, "oracle")?,
        out: PathBuf::from(settings.get("out").unwrap_or("results")),
        max_weight: parse_value(&settings, "max_weight")?.unwrap_or(20),
        bit_budget: parse_value(&settings, "bit_budget")?,
        timing: !parse_bool(&settings, "no_timing")?,
        provider: settings.get("provider").map(parse_provider).transpose()?.unwrap_or_default(),
        iterations: parse_value(&settings, "iterations")?,
        family_k: parse_value(&settings, "family_k")?,
        solver: settings.get("solver").map(parse_solver).transpose()?.unwrap_or_default(),
        threads: parse_value(&settings, "threads")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> Settings {
        let mut s = Settings::default();
        for (k, v) in pairs {
            s.set(k, *v);
        }
        s
    }

    #[test]
    fn sections_and_flags_layer() {
        let file = ConfigFile::parse(
            "# defaults\neps = 0.5\ngen = path:4\ntrials = 3\n\n[mwvc-bipartite]\neps = 0.25\n\n[mwm-rand]\ntrials = 9\n",
        )
        .unwrap();
        let c = resolve(Some(&file), &flags(&[("alg", "mwvc-bipartite")])).unwrap();
        assert_eq!(c.epsilon, 0.25);
        assert_eq!(c.trials, 3);
        let c = resolve(Some(&file), &flags(&[("alg", "mwvc-bipartite"), ("eps", "0.1")])).unwrap();
        assert_eq!(c.epsilon, 0.1);
        let c = resolve(Some(&file), &flags(&[("alg", "mwm-rand")])).unwrap();
        assert_eq!((c.epsilon, c.trials), (0.5, 9));
    }

    #[test]
    fn missing_epsilon_is_usage_error() {
        let err = resolve(None, &flags(&[("alg", "mwvc-bipartite"), ("gen", "path:3")])).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn rejects_unknown_keys_and_algorithms() {
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("no equals sign").is_err());
        assert!(resolve(None, &flags(&[("alg", "mst"), ("gen", "path:3"), ("eps", "0.5")])).is_err());
    }

    #[test]
    fn dashed_keys_are_accepted() {
        let file = ConfigFile::parse("bit-budget = 0\nno-timing = true").unwrap();
        let c = resolve(Some(&file), &flags(&[("alg", "mwm-det"), ("gen", "path:3"), ("eps", "0.5")])).unwrap();
        assert_eq!(c.bit_budget, Some(0));
        assert!(!c.timing);
    }
}
