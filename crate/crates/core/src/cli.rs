//! The `qmetro` command line.
//!
//! Values are resolved as: command-line flag, then `--config` file
//! (`key = value` lines, `#` comments), then built-in default. The seed
//! additionally falls back to `QMETRO_SEED` before the default.
//!
//! Exit status: 0 on success, 1 on a computation or output error, 2 on a
//! usage error.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::error::Error;
use crate::estimation::{
    ancilla_qfi_closed, cfi, crossover_noise, qfi_numeric, single_probe_qfi_closed, DEFAULT_FD_STEP,
};
use crate::montecarlo::{
    convergence_study, run_experiment, sweep_noise, with_threads, Estimator, ExperimentConfig,
};
use crate::strategies::{
    circuit_distribution, closed_form_distribution, make_family, measurement_povm, StrategyConfig,
    StrategyKind,
};
use crate::table::{emit_table, Cell, Destination, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SEED_ENV: &str = "QMETRO_SEED";

const DEFAULT_ETA_GRID: &str = "0:0.9:0.1";
const DEFAULT_EVENTS_GRID: &str = "10,100,1000,2000,10000";
const ASYMPTOTIC_TOL: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Probs,
    Fisher,
    Simulate,
    Sweep,
    Converge,
}

impl Subcommand {
    fn name(self) -> &'static str {
        match self {
            Self::Probs => "probs",
            Self::Fisher => "fisher",
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
            Self::Converge => "converge",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Self::Probs => "Outcome probabilities from the circuit and from the closed forms",
            Self::Fisher => "Closed-form and numerical quantum/classical Fisher information",
            Self::Simulate => "One repeated-acquisition counting experiment",
            Self::Sweep => "Phase SD against damping rate (theory and simulation)",
            Self::Converge => "Normalized variance against events per acquisition",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        const SIM: &[&str] = &[
            "kind",
            "eta",
            "v",
            "phi",
            "events",
            "repetitions",
            "seed",
            "estimator",
            "threads",
        ];
        match self {
            Self::Probs => &["kind", "eta", "v", "phi"],
            Self::Fisher => &["eta", "eta-grid", "v", "phi", "step"],
            Self::Simulate => SIM,
            Self::Sweep => &[
                "kind",
                "eta-grid",
                "v",
                "phi",
                "events",
                "repetitions",
                "seed",
                "estimator",
                "threads",
                "include-single",
            ],
            Self::Converge => &[
                "kind",
                "eta",
                "v",
                "phi",
                "events-grid",
                "repetitions",
                "seed",
                "estimator",
                "threads",
            ],
        }
    }

    const ALL: [Subcommand; 5] = [
        Self::Probs,
        Self::Fisher,
        Self::Simulate,
        Self::Sweep,
        Self::Converge,
    ];
}

fn help_for(key: &str) -> &'static str {
    match key {
        "kind" => "Strategy: single or ancilla [default: ancilla]",
        "eta" => "Damping rate in [0, 1]",
        "eta-grid" => "Damping rates, start:stop:step or a comma list [default: 0:0.9:0.1]",
        "v" => "Interferometer visibility in [0, 1] [default: 1]",
        "phi" => "True phase in radians; accepts pi, 0.5pi, pi/2 [default: pi]",
        "events" => "Events per acquisition [default: 2000]",
        "events-grid" => "Events per acquisition, ascending [default: 10,100,1000,2000,10000]",
        "repetitions" => "Acquisitions per configuration, at least 2 [default: 50]",
        "seed" => "Master RNG seed [default: $QMETRO_SEED, else 42]",
        "estimator" => "Phase estimator: inversion or mle [default: inversion]",
        "threads" => "Worker threads, 0 = all cores [default: 0]",
        "step" => "Finite-difference step in radians [default: 1e-5]",
        "include-single" => "Also simulate the single-probe strategy",
        _ => "",
    }
}

/// Fully resolved and validated command-line configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub subcommand: Subcommand,
    pub kind: StrategyKind,
    pub eta: Option<f64>,
    pub eta_grid: Vec<f64>,
    pub v: f64,
    pub phi: f64,
    pub events: u64,
    pub events_grid: Vec<u64>,
    pub repetitions: usize,
    pub seed: u64,
    pub estimator: Estimator,
    pub step: f64,
    pub threads: usize,
    pub include_single: bool,
    pub format: Format,
    pub output: Destination,
}

impl CliConfig {
    fn experiment(&self, eta: f64) -> Result<ExperimentConfig, Error> {
        let strategy = StrategyConfig::new(self.kind, eta, self.v, self.phi)?;
        Ok(ExperimentConfig::new(strategy)
            .with_events(self.events)
            .with_repetitions(self.repetitions)
            .with_seed(self.seed)
            .with_estimator(self.estimator))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// `--help`/`--version` text; not an error for the caller.
    Help(String),
    Usage(String),
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Help(_) => EXIT_OK,
            Self::Usage(_) => EXIT_USAGE,
            Self::Computation(_) => EXIT_COMPUTATION,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Computation(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn command() -> Command {
    let mut cmd = Command::new("qmetro")
        .about("Single-probe vs ancilla-assisted phase estimation under amplitude damping")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("PATH")
                .help("Read `key = value` defaults from a file"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .global(true)
                .value_name("csv|json")
                .help("Output format [default: csv]"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .short('o')
                .global(true)
                .value_name("PATH")
                .help("Write the table to PATH instead of standard output"),
        );
    for sub in Subcommand::ALL {
        let mut sc = Command::new(sub.name()).about(sub.about());
        for &key in sub.keys() {
            let arg = Arg::new(key).long(key).help(help_for(key));
            let arg = if key == "include-single" {
                arg.action(ArgAction::SetTrue)
            } else {
                arg.value_name("VALUE")
                    .allow_negative_numbers(true)
                    .allow_hyphen_values(true)
            };
            sc = sc.arg(arg);
        }
        cmd = cmd.subcommand(sc);
    }
    cmd
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let known: Vec<&str> = Subcommand::ALL
        .iter()
        .flat_map(|s| s.keys().iter().copied())
        .chain(["format", "output"])
        .collect();
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            ))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !known.contains(&key.as_str()) {
            return Err(usage(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Parses an angle in radians: a number, or `[k][*]pi[/d]` such as `pi`,
/// `0.5pi`, `-pi/4` or `3*pi/2`.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || usage(format!("malformed angle `{s}`"));
    let value = match t.split_once("pi") {
        Some((k, rest)) => {
            let k = match k.trim_end_matches('*') {
                "" | "+" => 1.0,
                "-" => -1.0,
                k => k.parse::<f64>().map_err(|_| bad())?,
            };
            let d = match rest {
                "" => 1.0,
                r => r
                    .strip_prefix('/')
                    .and_then(|d| d.parse::<f64>().ok())
                    .ok_or_else(bad)?,
            };
            k * PI / d
        }
        None => t.parse::<f64>().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Parses `start:stop:step` (inclusive within half a step) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| usage(format!("malformed grid `{s}`: {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| bad("non-numeric bound"))
            };
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
                return Err(bad("step must be positive and bounds finite"));
            }
            if stop < start {
                return Err(bad("stop is below start"));
            }
            let count = ((stop - start) / step + 0.5).floor() as usize + 1;
            (0..count).map(|k| start + k as f64 * step).collect()
        }
        [_] => s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| bad("non-numeric entry"))
            })
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad("expected start:stop:step or a comma list")),
    };
    if values.is_empty() || values.iter().any(|x| !x.is_finite()) {
        return Err(bad("no finite values"));
    }
    Ok(values)
}

fn parse_events_grid(s: &str) -> Result<Vec<u64>, CliError> {
    let grid = parse_grid(s)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
                Ok(x as u64)
            } else {
                Err(usage(format!(
                    "events grid entry {x} is not a positive integer"
                )))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("events grid must be strictly ascending"));
    }
    Ok(grid)
}

fn unit_interval(name: &str, x: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(usage(format!("--{name} {x} is outside [0, 1]")))
    }
}

fn parse_number<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse::<T>()
        .map_err(|_| usage(format!("--{name}: cannot parse `{s}`")))
}

fn parse_bool(name: &str, s: &str) -> Result<bool, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(usage(format!(
            "--{name}: expected true or false, got `{s}`"
        ))),
    }
}

struct Sources<'a> {
    flags: &'a ArgMatches,
    file: BTreeMap<String, String>,
}

impl Sources<'_> {
    fn get(&self, key: &str) -> Option<String> {
        self.flags
            .try_get_one::<String>(key)
            .ok()
            .flatten()
            .cloned()
            .or_else(|| self.file.get(key).cloned())
    }
}

/// Parses and validates a full argument vector (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = command().try_get_matches_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp
            | ErrorKind::DisplayVersion
            | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                CliError::Help(e.render().to_string())
            }
            _ => {
                let text = e.render().to_string();
                let first = text.lines().next().unwrap_or("usage error").to_string();
                CliError::Usage(first)
            }
        }
    })?;
    let (name, sub_matches) = matches.subcommand().expect("subcommand required");
    let subcommand = Subcommand::ALL
        .into_iter()
        .find(|s| s.name() == name)
        .expect("registered subcommand");

    let config_path = sub_matches.get_one::<String>("config").cloned();
    let file = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| usage(format!("cannot read config `{path}`: {e}")))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    let src = Sources {
        flags: sub_matches,
        file,
    };

    let kind = match src.get("kind") {
        Some(s) => s
            .parse::<StrategyKind>()
            .map_err(|e| usage(e.to_string()))?,
        None => StrategyKind::AncillaAssisted,
    };
    let eta = src
        .get("eta")
        .map(|s| parse_number::<f64>("eta", &s).and_then(|x| unit_interval("eta", x)))
        .transpose()?;
    let eta_grid = parse_grid(
        &src.get("eta-grid")
            .unwrap_or_else(|| DEFAULT_ETA_GRID.into()),
    )?;
    for &x in &eta_grid {
        unit_interval("eta-grid", x)?;
    }
    let v = match src.get("v") {
        Some(s) => unit_interval("v", parse_number("v", &s)?)?,
        None => 1.0,
    };
    let phi = match src.get("phi") {
        Some(s) => parse_angle(&s)?,
        None => PI,
    };
    let events = match src.get("events") {
        Some(s) => parse_number::<u64>("events", &s)?,
        None => ExperimentConfig::DEFAULT_EVENTS,
    };
    if events < 1 {
        return Err(usage("--events must be at least 1"));
    }
    let events_grid = parse_events_grid(
        &src.get("events-grid")
            .unwrap_or_else(|| DEFAULT_EVENTS_GRID.into()),
    )?;
    let repetitions = match src.get("repetitions") {
        Some(s) => parse_number::<usize>("repetitions", &s)?,
        None => ExperimentConfig::DEFAULT_REPETITIONS,
    };
    if repetitions < 2 {
        return Err(usage("--repetitions must be at least 2"));
    }
    let seed = match src.get("seed") {
        Some(s) => parse_number::<u64>("seed", &s)?,
        None => match std::env::var(SEED_ENV) {
            Ok(s) => s
                .trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("{SEED_ENV}: cannot parse `{s}` as a seed")))?,
            Err(_) => ExperimentConfig::DEFAULT_SEED,
        },
    };
    let estimator = match src.get("estimator") {
        Some(s) => s.parse::<Estimator>().map_err(|e| usage(e.to_string()))?,
        None => Estimator::Inversion,
    };
    let step = match src.get("step") {
        Some(s) => parse_number::<f64>("step", &s)?,
        None => DEFAULT_FD_STEP,
    };
    if !(step > 0.0 && step.is_finite()) {
        return Err(usage("--step must be positive"));
    }
    let threads = match src.get("threads") {
        Some(s) => parse_number::<usize>("threads", &s)?,
        None => 0,
    };
    let include_single = sub_matches
        .try_get_one::<bool>("include-single")
        .ok()
        .flatten()
        .copied()
        .unwrap_or(false)
        || match src.file.get("include-single") {
            Some(s) => parse_bool("include-single", s)?,
            None => false,
        };
    let format = match src.get("format") {
        Some(s) => s.parse::<Format>().map_err(|e| usage(e.to_string()))?,
        None => Format::Csv,
    };
    let output = match src.get("output") {
        Some(p) if p != "-" => Destination::File(PathBuf::from(p)),
        _ => Destination::Stdout,
    };

    let needs_eta = matches!(
        subcommand,
        Subcommand::Probs | Subcommand::Simulate | Subcommand::Converge
    );
    if needs_eta && eta.is_none() {
        return Err(usage(format!("{} requires --eta", subcommand.name())));
    }

    Ok(CliConfig {
        subcommand,
        kind,
        eta,
        eta_grid,
        v,
        phi,
        events,
        events_grid,
        repetitions,
        seed,
        estimator,
        step,
        threads,
        include_single,
        format,
        output,
    })
}

/// Computes the configured table and a one-line summary.
pub fn compute(cfg: &CliConfig) -> Result<(Table, String), Error> {
    match cfg.subcommand {
        Subcommand::Probs => probs_table(cfg),
        Subcommand::Fisher => fisher_table(cfg),
        Subcommand::Simulate => with_threads(cfg.threads, || simulate_table(cfg))?,
        Subcommand::Sweep => with_threads(cfg.threads, || sweep_table(cfg))?,
        Subcommand::Converge => with_threads(cfg.threads, || converge_table(cfg))?,
    }
}

fn probs_table(cfg: &CliConfig) -> Result<(Table, String), Error> {
    let eta = cfg.eta.expect("validated");
    let strategy = StrategyConfig::new(cfg.kind, eta, cfg.v, cfg.phi)?;
    let circuit = circuit_distribution(&strategy)?;
    let closed = closed_form_distribution(&strategy)?;
    let mut table = Table::new([
        "kind",
        "eta",
        "v",
        "phi",
        "outcome",
        "p_circuit",
        "p_closed_form",
    ]);
    let mut worst = 0.0_f64;
    for ((label, pc), pf) in circuit.iter().zip(closed.probs()) {
        worst = worst.max((pc - pf).abs());
        table.push(vec![
            strategy.kind.as_str().into(),
            strategy.eta.into(),
            strategy.v.into(),
            strategy.phi.into(),
            label.into(),
            pc.into(),
            (*pf).into(),
        ])?;
    }
    Ok((table, format!("max |circuit - closed form| = {worst:.3e}")))
}

fn fisher_table(cfg: &CliConfig) -> Result<(Table, String), Error> {
    let etas = match cfg.eta {
        Some(eta) => vec![eta],
        None => cfg.eta_grid.clone(),
    };
    let crossover = crossover_noise(cfg.v)?;
    let mut table = Table::new([
        "eta",
        "v",
        "phi",
        "f_single_closed",
        "f_ancilla_closed",
        "qfi_single_numeric",
        "qfi_ancilla_numeric",
        "cfi_single",
        "cfi_ancilla",
        "crossover_eta",
    ]);
    for eta in etas {
        let single = make_family(StrategyKind::SingleProbe, eta, 1.0)?;
        let ancilla = make_family(StrategyKind::AncillaAssisted, eta, cfg.v)?;
        table.push(vec![
            eta.into(),
            cfg.v.into(),
            cfg.phi.into(),
            single_probe_qfi_closed(eta)?.value().into(),
            ancilla_qfi_closed(eta, cfg.v)?.value().into(),
            qfi_numeric(&single, cfg.phi, cfg.step)?.value().into(),
            qfi_numeric(&ancilla, cfg.phi, cfg.step)?.value().into(),
            cfi(
                &measurement_povm(StrategyKind::SingleProbe),
                &single,
                cfg.phi,
                cfg.step,
            )?
            .value()
            .into(),
            cfi(
                &measurement_povm(StrategyKind::AncillaAssisted),
                &ancilla,
                cfg.phi,
                cfg.step,
            )?
            .value()
            .into(),
            crossover.into(),
        ])?;
    }
    Ok((
        table,
        format!("crossover eta* = {crossover} at v = {}", cfg.v),
    ))
}

fn simulate_table(cfg: &CliConfig) -> Result<(Table, String), Error> {
    let exp = cfg.experiment(cfg.eta.expect("validated"))?;
    let r = run_experiment(&exp)?;
    let inverse_qfi = 1.0 / exp.strategy.qfi()?.value();
    let mut table = Table::new([
        "kind",
        "eta",
        "v",
        "phi",
        "events",
        "repetitions",
        "estimator",
        "seed",
        "mean_estimate",
        "sample_variance",
        "sd",
        "sd_stderr",
        "normalized_variance",
        "qcrb_reference",
        "inverse_qfi",
    ]);
    table.push(vec![
        exp.strategy.kind.as_str().into(),
        exp.strategy.eta.into(),
        exp.strategy.v.into(),
        exp.strategy.phi.into(),
        exp.events_per_rep.into(),
        exp.repetitions.into(),
        exp.estimator.as_str().into(),
        exp.seed.into(),
        r.mean_estimate().into(),
        r.sample_variance.into(),
        r.sd.into(),
        r.sd_stderr().into(),
        r.normalized_variance.into(),
        r.qcrb_reference.into(),
        inverse_qfi.into(),
    ])?;
    Ok((
        table,
        format!(
            "sd = {:.6} rad (bound {:.6} rad); normalized variance {:.4} vs 1/F = {:.4}",
            r.sd,
            r.qcrb_reference.sqrt(),
            r.normalized_variance,
            inverse_qfi
        ),
    ))
}

fn sweep_table(cfg: &CliConfig) -> Result<(Table, String), Error> {
    let base = cfg.experiment(cfg.eta_grid[0])?;
    let rows = sweep_noise(&cfg.eta_grid, &base, cfg.include_single)?;
    let mut columns = vec![
        "eta",
        "sd_single_theory",
        "sd_ancilla_theory",
        "sd_simulated",
        "sd_sim_stderr",
    ];
    if cfg.include_single {
        columns.extend(["sd_single_simulated", "sd_single_stderr"]);
    }
    let mut table = Table::new(columns);
    for row in &rows {
        let mut cells: Vec<Cell> = vec![
            row.eta.into(),
            row.sd_single_theory.into(),
            row.sd_ancilla_theory.into(),
            row.sd_simulated.into(),
            row.sd_sim_stderr.into(),
        ];
        if let Some((sd, se)) = row.single_simulated {
            cells.extend([sd.into(), se.into()]);
        }
        table.push(cells)?;
    }
    let summary = match crossover_noise(cfg.v) {
        Ok(x) => format!(
            "{} points; ancilla theory beats single-probe theory for eta > {x} at v = {}",
            rows.len(),
            cfg.v
        ),
        Err(_) => format!("{} points; no crossover at v = {}", rows.len(), cfg.v),
    };
    Ok((table, summary))
}

fn converge_table(cfg: &CliConfig) -> Result<(Table, String), Error> {
    let exp = cfg.experiment(cfg.eta.expect("validated"))?;
    let study = convergence_study(&exp, &cfg.events_grid)?;
    let mut table = Table::new([
        "events",
        "normalized_variance",
        "inverse_qfi",
        "relative_deviation",
    ]);
    for p in &study.points {
        table.push(vec![
            p.events.into(),
            p.normalized_variance.into(),
            study.target.into(),
            ((p.normalized_variance - study.target) / study.target).into(),
        ])?;
    }
    let summary = match study.asymptotic_from(ASYMPTOTIC_TOL) {
        Some(n) => format!(
            "normalized variance within 10% of 1/F = {:.4} from N = {n}",
            study.target
        ),
        None => format!(
            "normalized variance not within 10% of 1/F = {:.4} at the largest N",
            study.target
        ),
    };
    Ok((table, summary))
}

/// Executes a parsed configuration; returns the process exit status.
pub fn run(cfg: &CliConfig) -> i32 {
    match compute(cfg) {
        Ok((table, summary)) => match emit_table(&table, cfg.format, &cfg.output) {
            Ok(()) => {
                eprintln!("{summary}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_COMPUTATION
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_COMPUTATION
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cfg) => run(&cfg),
        Err(CliError::Help(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e @ (CliError::Usage(_) | CliError::Computation(_))) => {
            let msg = match &e {
                CliError::Usage(m) | CliError::Computation(m) => m,
                CliError::Help(_) => unreachable!(),
            };
            let msg = msg.strip_prefix("error: ").unwrap_or(msg);
            eprintln!("error: {msg}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<CliConfig, CliError> {
        parse_args(std::iter::once("qmetro").chain(args.iter().copied()))
    }

    #[test]
    fn sweep_grid_and_defaults() {
        let cfg = parse(&["sweep", "--eta-grid", "0:0.9:0.1", "--v", "0.95"]).unwrap();
        assert_eq!(cfg.eta_grid.len(), 10);
        assert!((cfg.eta_grid[9] - 0.9).abs() < 1e-12);
        assert_eq!(cfg.v, 0.95);
        assert_eq!(cfg.events, 2000);
        assert_eq!(cfg.repetitions, 50);
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn simulate_defaults() {
        let cfg = parse(&["simulate", "--eta", "0.5", "--seed", "42"]).unwrap();
        assert_eq!(cfg.subcommand, Subcommand::Simulate);
        assert_eq!(cfg.eta, Some(0.5));
        assert_eq!((cfg.repetitions, cfg.events), (50, 2000));
        assert_eq!(cfg.phi, PI);
        assert_eq!(cfg.estimator, Estimator::Inversion);
        assert_eq!(cfg.kind, StrategyKind::AncillaAssisted);
    }

    #[test]
    fn range_errors_are_usage_errors() {
        let err = parse(&["probs", "--eta", "2.0"]).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        assert_eq!(
            parse(&["probs", "--eta", "0.5", "--v", "-1"])
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            parse(&["simulate", "--eta", "0.5", "--repetitions", "1"])
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            parse(&["probs", "--bogus", "1"]).unwrap_err().exit_code(),
            2
        );
        assert_eq!(
            parse(&["sweep", "--eta-grid", "0:x:0.1"])
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(parse(&["probs"]).unwrap_err().exit_code(), 2);
        // --events-grid belongs to converge only.
        assert_eq!(
            parse(&["sweep", "--events-grid", "10"])
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3*pi/2").unwrap(), 3.0 * PI / 2.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pi2").is_err());
        assert_eq!(parse_angle("3.0").unwrap(), 3.0);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1,0.5, 0.9").unwrap(), vec![0.1, 0.5, 0.9]);
        let g = parse_grid("0:1:0.25").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        // Stop within half a step of the last point is included.
        assert_eq!(parse_grid("0:0.99:0.25").unwrap().len(), 5);
        assert_eq!(parse_grid("0:0.8:0.25").unwrap().len(), 4);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_events_grid("100,10").is_err());
        assert!(parse_events_grid("10,10.5").is_err());
        assert_eq!(parse_events_grid("10,100,1000,2000").unwrap().len(), 4);
    }

    #[test]
    fn config_file_values_and_overrides() {
        let map = parse_config_file("# comment\neta = 0.3\nv=0.9 # trailing\n\nestimator = mle\n")
            .unwrap();
        assert_eq!(map["eta"], "0.3");
        assert_eq!(map["v"], "0.9");
        assert!(parse_config_file("nonsense\n").is_err());
        assert!(parse_config_file("colour = red\n").is_err());
    }

    #[test]
    fn json_format_flag() {
        let cfg = parse(&["fisher", "--eta", "0.5", "--format", "json"]).unwrap();
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(
            parse(&["fisher", "--format", "xml"])
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn help_is_not_an_error() {
        assert_eq!(parse(&["--help"]).unwrap_err().exit_code(), EXIT_OK);
    }
}
