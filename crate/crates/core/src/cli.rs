//! Command-line front end: argument parsing, instance loading, and
//! table/CSV/JSON reports.
//!
//! Tables and CSV print numbers with four decimals; JSON carries full
//! precision. CSV output is a long-format listing (`section,id,field,value`)
//! holding the same numbers, in the same order, as the table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::game::{
    default_initial_profile, Game, GameError, Grid, PayoffBasis, Schedule, DEFAULT_BUDGET,
};
use crate::model::{Instance, LoadError, ParticipationProfile, ValidationErrors};
use crate::redistribution::{redistribute, RedistributionError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;
pub const EXIT_COMPUTE: i32 = 6;
pub const EXIT_NOT_CONVERGED: i32 = 7;

#[derive(Debug, Parser)]
#[command(name = "solidarity", version, about = "Redistribution game solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance file against the schema and model invariants.
    Validate(CommonArgs),
    /// Clear one scenario (or all) under a participation profile.
    Solve(SolveArgs),
    /// Expected-shortfall payoffs of a profile, against the no-cooperation baseline.
    Evaluate(EvaluateArgs),
    /// Iterate best responses until no player wants to move.
    BestResponse(BestResponseArgs),
    /// List every pure equilibrium on the integer grid.
    Equilibria(EquilibriaArgs),
    /// Check one profile for profitable unilateral deviations.
    Nash(NashArgs),
    /// Export the demand curves as step-function corner points.
    Curves(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum BasisArg {
    #[default]
    Uc,
    #[value(name = "uc_plus_uf")]
    UcPlusUf,
}

impl From<BasisArg> for PayoffBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Uc => PayoffBasis::Uc,
            BasisArg::UcPlusUf => PayoffBasis::UcPlusUf,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Instance file (JSON).
    #[arg(long, value_name = "PATH")]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Override the instance's expected-shortfall level.
    #[arg(long, value_name = "F")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Participation levels, comma separated, one per node.
    #[arg(long, value_name = "a,b,c")]
    pub profile: String,
    /// Scenario id; all scenarios when omitted.
    #[arg(long, value_name = "K")]
    pub scenario: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_name = "a,b,c")]
    pub profile: String,
    #[arg(long, value_enum, default_value_t = BasisArg::Uc)]
    pub basis: BasisArg,
}

#[derive(Debug, Args)]
pub struct BestResponseArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial profile; defaults to each player's last demand step width.
    #[arg(long, value_name = "a,b,c")]
    pub profile: Option<String>,
    #[arg(long, value_enum, default_value_t = BasisArg::Uc)]
    pub basis: BasisArg,
    /// Grid bound: one integer for all players or one per player.
    /// Defaults to each player's total demand.
    #[arg(long, value_name = "K")]
    pub max_level: Option<String>,
    #[arg(long, value_name = "N", default_value_t = 50)]
    pub max_rounds: usize,
    /// Update all players at once instead of round-robin.
    #[arg(long)]
    pub simultaneous: bool,
}

#[derive(Debug, Args)]
pub struct EquilibriaArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = BasisArg::Uc)]
    pub basis: BasisArg,
    #[arg(long, value_name = "K")]
    pub max_level: Option<String>,
    /// Maximum number of profiles to evaluate.
    #[arg(long, value_name = "K", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct NashArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_name = "a,b,c")]
    pub profile: String,
    #[arg(long, value_enum, default_value_t = BasisArg::Uc)]
    pub basis: BasisArg,
    #[arg(long, value_name = "K")]
    pub max_level: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("`{path}` is not a valid instance: {errors}")]
    Validation {
        path: String,
        errors: ValidationErrors,
    },
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("best-response iteration did not converge within {rounds} rounds")]
    NotConverged { rounds: usize, report: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
            CliError::NotConverged { .. } => EXIT_NOT_CONVERGED,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<RedistributionError> for CliError {
    fn from(e: RedistributionError) -> Self {
        CliError::Compute(e.to_string())
    }
}

/// Reads and validates an instance file.
pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    Instance::from_json_slice(&bytes).map_err(|e| match e {
        LoadError::Parse(err) => CliError::Parse {
            path: shown,
            message: err.to_string(),
        },
        LoadError::Invalid(errors) => CliError::Validation {
            path: shown,
            errors,
        },
    })
}

/// Parses `a,b,c` into nonnegative participation levels.
pub fn parse_levels(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty list".into());
    }
    text.split(',')
        .enumerate()
        .map(|(i, part)| {
            let v: f64 = part
                .trim()
                .parse()
                .map_err(|_| format!("entry {} (`{}`) is not a number", i + 1, part.trim()))?;
            if !v.is_finite() || v < 0.0 {
                return Err(format!(
                    "entry {} (`{}`) must be finite and >= 0",
                    i + 1,
                    part.trim()
                ));
            }
            Ok(v)
        })
        .collect()
}

/// Parses `a,b,c` into integer grid levels.
pub fn parse_grid_levels(text: &str) -> Result<Vec<u32>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty list".into());
    }
    text.split(',')
        .enumerate()
        .map(|(i, part)| {
            part.trim().parse::<u32>().map_err(|_| {
                format!(
                    "entry {} (`{}`) is not a nonnegative integer",
                    i + 1,
                    part.trim()
                )
            })
        })
        .collect()
}

fn grid_for(instance: &Instance, max_level: Option<&str>) -> Result<Grid, CliError> {
    let n = instance.node_count();
    match max_level {
        None => Ok(Grid::total_demand(instance)),
        Some(text) => {
            let levels = parse_grid_levels(text)
                .map_err(|e| CliError::Usage(format!("--max-level: {e}")))?;
            match levels.len() {
                1 => Ok(Grid::uniform(n, levels[0])),
                k if k == n => Ok(Grid::new(levels)),
                k => Err(CliError::Usage(format!(
                    "--max-level has {k} entries; give 1 or {n}"
                ))),
            }
        }
    }
}

fn profile_for(instance: &Instance, text: &str) -> Result<ParticipationProfile, CliError> {
    let levels = parse_levels(text).map_err(|e| CliError::Usage(format!("--profile: {e}")))?;
    if levels.len() != instance.node_count() {
        return Err(CliError::Usage(format!(
            "--profile has {} entries for {} nodes",
            levels.len(),
            instance.node_count()
        )));
    }
    ParticipationProfile::new(levels).map_err(|e| CliError::Usage(format!("--profile: {e}")))
}

fn grid_profile_for(instance: &Instance, text: &str, grid: &Grid) -> Result<Vec<u32>, CliError> {
    let levels = parse_grid_levels(text).map_err(|e| CliError::Usage(format!("--profile: {e}")))?;
    if levels.len() != instance.node_count() {
        return Err(CliError::Usage(format!(
            "--profile has {} entries for {} nodes",
            levels.len(),
            instance.node_count()
        )));
    }
    if !grid.contains(&levels) {
        return Err(CliError::Usage(format!(
            "--profile {levels:?} lies outside the grid bounds {:?}",
            grid.bounds()
        )));
    }
    Ok(levels)
}

fn load_with_alpha(common: &CommonArgs) -> Result<Instance, CliError> {
    if let Some(a) = common.alpha {
        if !(a > 0.0 && a <= 1.0) {
            return Err(CliError::Usage(format!("--alpha {a} must lie in (0, 1]")));
        }
    }
    let instance = load_instance(&common.instance)?;
    match common.alpha {
        Some(a) => instance
            .with_alpha(a)
            .map_err(|e| CliError::Usage(e.to_string())),
        None => Ok(instance),
    }
}

/// Runs one subcommand and returns the rendered report.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Validate(args) => {
            let instance = load_with_alpha(args)?;
            Ok(render(&ValidateReport::new(&instance), args.format))
        }
        Command::Curves(args) => {
            let instance = load_with_alpha(args)?;
            Ok(render(&CurvesReport::new(&instance), args.format))
        }
        Command::Solve(args) => {
            let instance = load_with_alpha(&args.common)?;
            let profile = profile_for(&instance, &args.profile)?;
            let scenarios: Vec<_> = match args.scenario {
                Some(id) => vec![instance.scenario(id).ok_or_else(|| {
                    CliError::Usage(format!(
                        "--scenario {id} does not exist (instance has {})",
                        instance.scenarios.len()
                    ))
                })?],
                None => instance.scenarios.iter().collect(),
            };
            let mut report = SolveReport {
                profile: profile.levels().to_vec(),
                scenarios: Vec::new(),
            };
            for s in scenarios {
                let o = redistribute(&instance, s, &profile)?;
                report
                    .scenarios
                    .push(ScenarioReport::new(&instance, s.id, &o));
            }
            Ok(render(&report, args.common.format))
        }
        Command::Evaluate(args) => {
            let instance = load_with_alpha(&args.common)?;
            let profile = profile_for(&instance, &args.profile)?;
            let basis = PayoffBasis::from(args.basis);
            let with = crate::game::evaluate_profile(&instance, &profile, basis)?;
            let without = crate::game::evaluate_profile(
                &instance,
                &ParticipationProfile::zeros(instance.node_count()),
                basis,
            )?;
            let report = EvaluateReport {
                profile: profile.levels().to_vec(),
                alpha: instance.alpha,
                basis,
                players: (0..instance.node_count())
                    .map(|i| PlayerPayoff {
                        player: i + 1,
                        es: with.payoffs[i],
                        es_baseline: without.payoffs[i],
                        gain: with.payoffs[i] - without.payoffs[i],
                    })
                    .collect(),
            };
            Ok(render(&report, args.common.format))
        }
        Command::BestResponse(args) => {
            let instance = load_with_alpha(&args.common)?;
            let grid = grid_for(&instance, args.max_level.as_deref())?;
            let initial = match &args.profile {
                Some(text) => {
                    let levels = parse_grid_levels(text)
                        .map_err(|e| CliError::Usage(format!("--profile: {e}")))?;
                    if levels.len() != instance.node_count() {
                        return Err(CliError::Usage(format!(
                            "--profile has {} entries for {} nodes",
                            levels.len(),
                            instance.node_count()
                        )));
                    }
                    levels
                }
                None => default_initial_profile(&instance),
            };
            if args.max_rounds == 0 {
                return Err(CliError::Usage("--max-rounds must be at least 1".into()));
            }
            let basis = PayoffBasis::from(args.basis);
            let schedule = if args.simultaneous {
                Schedule::Simultaneous
            } else {
                Schedule::RoundRobin
            };
            let game = Game::new(&instance, basis);
            let trace = game.best_response_iteration(&initial, &grid, schedule, args.max_rounds)?;
            let last = trace.iterations.last().cloned().unwrap_or_default();
            let report = BestResponseReport {
                basis,
                schedule,
                grid: grid.bounds().to_vec(),
                rounds: trace.rounds(),
                converged: trace.converged,
                payoffs: game.payoffs(&last)?,
                iterations: trace.iterations,
            };
            let text = render(&report, args.common.format);
            if report.converged {
                Ok(text)
            } else {
                Err(CliError::NotConverged {
                    rounds: report.rounds,
                    report: text,
                })
            }
        }
        Command::Equilibria(args) => {
            let instance = load_with_alpha(&args.common)?;
            let grid = grid_for(&instance, args.max_level.as_deref())?;
            let basis = PayoffBasis::from(args.basis);
            let game = Game::new(&instance, basis);
            let found = game.enumerate_equilibria(&grid, args.budget)?;
            let mut equilibria = Vec::with_capacity(found.len());
            for p in found {
                let payoffs = game.payoffs(&p)?;
                equilibria.push(EquilibriumRow {
                    profile: p,
                    payoffs,
                });
            }
            let report = EquilibriaReport {
                basis,
                grid: grid.bounds().to_vec(),
                profiles_checked: grid.profile_count() as u64,
                equilibria,
            };
            Ok(render(&report, args.common.format))
        }
        Command::Nash(args) => {
            let instance = load_with_alpha(&args.common)?;
            let grid = grid_for(&instance, args.max_level.as_deref())?;
            let profile = grid_profile_for(&instance, &args.profile, &grid)?;
            let basis = PayoffBasis::from(args.basis);
            let verdict = Game::new(&instance, basis).is_nash(&profile, &grid)?;
            let report = NashReport {
                profile,
                basis,
                grid: grid.bounds().to_vec(),
                is_nash: verdict.is_nash,
                payoffs: verdict.payoffs,
                deviations: verdict
                    .deviations
                    .into_iter()
                    .map(|d| DeviationRow {
                        player: d.player,
                        level: d.level,
                        payoff: d.payoff,
                        current_payoff: d.current_payoff,
                    })
                    .collect(),
            };
            Ok(render(&report, args.common.format))
        }
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Four-decimal rendering with negative zero folded into zero.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt4).unwrap_or_else(|| "n/a".into())
}

fn join_levels(levels: &[u32]) -> String {
    levels
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_reals(levels: &[f64]) -> String {
    levels
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

trait Report: Serialize {
    fn table(&self) -> String;
    fn csv_rows(&self) -> Vec<[String; 4]>;
}

fn render<R: Report>(report: &R, format: Format) -> String {
    match format {
        Format::Table => report.table(),
        Format::Csv => {
            let mut out = String::from("section,id,field,value\n");
            for row in report.csv_rows() {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialise");
            s.push('\n');
            s
        }
    }
}

fn row(section: &str, id: impl ToString, field: &str, value: String) -> [String; 4] {
    [
        section.to_string(),
        id.to_string(),
        field.to_string(),
        value,
    ]
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    valid: bool,
    nodes: usize,
    edges: usize,
    scenarios: usize,
    alpha: f64,
}

impl ValidateReport {
    fn new(instance: &Instance) -> Self {
        ValidateReport {
            valid: true,
            nodes: instance.node_count(),
            edges: instance.edge_count(),
            scenarios: instance.scenarios.len(),
            alpha: instance.alpha,
        }
    }
}

impl Report for ValidateReport {
    fn table(&self) -> String {
        format!(
            "instance is valid\nnodes      {}\nedges      {}\nscenarios  {}\nalpha      {}\n",
            self.nodes,
            self.edges,
            self.scenarios,
            fmt4(self.alpha)
        )
    }

    fn csv_rows(&self) -> Vec<[String; 4]> {
        vec![
            row("instance", "", "nodes", self.nodes.to_string()),
            row("instance", "", "edges", self.edges.to_string()),
            row("instance", "", "scenarios", self.scenarios.to_string()),
            row("instance", "", "alpha", fmt4(self.alpha)),
        ]
    }
}

#[derive(Debug, Serialize)]
struct CurvesReport {
    curves: Vec<CurvePoints>,
}

#[derive(Debug, Serialize)]
struct CurvePoints {
    node: usize,
    name: String,
    points: Vec<(f64, f64)>,
}

impl CurvesReport {
    fn new(instance: &Instance) -> Self {
        CurvesReport {
            curves: instance
                .network
                .nodes
                .iter()
                .map(|n| CurvePoints {
                    node: n.id,
                    name: n.name.clone(),
                    points: n.demand.points(),
                })
                .collect(),
        }
    }
}

impl Report for CurvesReport {
    fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.curves {
            let _ = writeln!(out, "node {} ({})", c.node, c.name);
            let _ = writeln!(out, "{:>12} {:>12}", "quantity", "price");
            for (q, p) in &c.points {
                let _ = writeln!(out, "{:>12} {:>12}", fmt4(*q), fmt4(*p));
            }
        }
        out
    }

    fn csv_rows(&self) -> Vec<[String; 4]> {
        let mut rows = Vec::new();
        for c in &self.curves {
            for (q, p) in &c.points {
                rows.push(row("curve", c.node, "quantity", fmt4(*q)));
                rows.push(row("curve", c.node, "price", fmt4(*p)));
            }
        }
        rows
    }
}

#[derive(Debug, Serialize)]
struct SolveReport {
    profile: Vec<f64>,
    scenarios: Vec<ScenarioReport>,
}

#[derive(Debug, Serialize)]
struct ScenarioReport {
    scenario: usize,
    probability: f64,
    flows: Vec<FlowRow>,
    nodes: Vec<NodeRow>,
    rcp: Option<f64>,
}

#[derive(Debug, Serialize)]
struct FlowRow {
    edge: usize,
    from: usize,
    to: usize,
    flow: f64,
}

#[derive(Debug, Serialize)]
struct NodeRow {
    node: usize,
    resources: f64,
    consumed: f64,
    net_received: f64,
    uc: f64,
    uc_reference: f64,
    mu: f64,
    uf: f64,
    net_gain: f64,
}

impl ScenarioReport {
    fn new(
        instance: &Instance,
        id: usize,
        o: &crate::redistribution::RedistributionOutcome,
    ) -> Self {
        let scenario = instance.scenario(id).expect("scenario exists");
        let consumed = o.consumed();
        let gain = o.net_gain();
        ScenarioReport {
            scenario: id,
            probability: scenario.probability,
            flows: instance
                .network
                .edges
                .iter()
                .zip(&o.flows)
                .map(|(e, &f)| FlowRow {
                    edge: e.id,
                    from: e.from,
                    to: e.to,
                    flow: f,
                })
                .collect(),
            nodes: (0..instance.node_count())
                .map(|i| NodeRow {
                    node: i + 1,
                    resources: scenario.resources[i],
                    consumed: consumed[i],
                    net_received: o.net_received[i],
                    uc: o.uc[i],
                    uc_reference: o.uc_reference[i],
                    mu: o.mu[i],
                    uf: o.uf[i],
                    net_gain: gain[i],
                })
                .collect(),
            rcp: o.rcp,
        }
    }
}

impl Report for SolveReport {
    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "profile: {}", join_reals(&self.profile));
        for s in &self.scenarios {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "scenario {}  probability {}",
                s.scenario,
                fmt4(s.probability)
            );
            let _ = writeln!(
                out,
                "{:>6} {:>6} {:>6} {:>12}",
                "edge", "from", "to", "flow"
            );
            for f in &s.flows {
                let _ = writeln!(
                    out,
                    "{:>6} {:>6} {:>6} {:>12}",
                    f.edge,
                    f.from,
                    f.to,
                    fmt4(f.flow)
                );
            }
            let _ = writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>12} {:>12} {:>14} {:>12} {:>12} {:>12}",
                "node",
                "resources",
                "consumed",
                "received",
                "U^c",
                "(reference)",
                "mu",
                "U^f",
                "dU^c+U^f"
            );
            for n in &s.nodes {
                let _ = writeln!(
                    out,
                    "{:>6} {:>12} {:>12} {:>12} {:>12} {:>14} {:>12} {:>12} {:>12}",
                    n.node,
                    fmt4(n.resources),
                    fmt4(n.consumed),
                    fmt4(n.net_received),
                    fmt4(n.uc),
                    format!("({})", fmt4(n.uc_reference)),
                    fmt4(n.mu),
                    fmt4(n.uf),
                    fmt4(n.net_gain)
                );
            }
            let _ = writeln!(out, "RCP {}", fmt_opt(s.rcp));
        }
        out
    }

    fn csv_rows(&self) -> Vec<[String; 4]> {
        let mut rows = Vec::new();
        for s in &self.scenarios {
            rows.push(row(
                "scenario",
                s.scenario,
                "probability",
                fmt4(s.probability),
            ));
            for f in &s.flows {
                rows.push(row("edge", f.edge, "flow", fmt4(f.flow)));
            }
            for n in &s.nodes {
                for (field, v) in [
                    ("resources", n.resources),
                    ("consumed", n.consumed),
                    ("net_received", n.net_received),
                    ("uc", n.uc),
                    ("uc_reference", n.uc_reference),
                    ("mu", n.mu),
                    ("uf", n.uf),
                    ("net_gain", n.net_gain),
                ] {
                    rows.push(row("node", n.node, field, fmt4(v)));
                }
            }
            rows.push(row("scenario", s.scenario, "rcp", fmt_opt(s.rcp)));
        }
        rows
    }
}

#[derive(Debug, Serialize)]
struct EvaluateReport {
    profile: Vec<f64>,
    alpha: f64,
    basis: PayoffBasis,
    players: Vec<PlayerPayoff>,
}

#[derive(Debug, Serialize)]
struct PlayerPayoff {
    player: usize,
    es: f64,
    es_baseline: f64,
    gain: f64,
}

impl Report for EvaluateReport {
    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "profile: {}", join_reals(&self.profile));
        let _ = writeln!(
            out,
            "basis: {}  alpha {}",
            self.basis.name(),
            fmt4(self.alpha)
        );
        let _ = writeln!(
            out,
            "{:>6} {:>12} {:>12} {:>12}",
            "player", "ES", "ES baseline", "gain"
        );
        for p in &self.players {
            let _ = writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>12}",
                p.player,
                fmt4(p.es),
                fmt4(p.es_baseline),
                fmt4(p.gain)
            );
        }
        out
    }

    fn csv_rows(&self) -> Vec<[String; 4]> {
        let mut rows = vec![row("meta", "", "alpha", fmt4(self.alpha))];
        for p in &self.players {
            rows.push(row("player", p.player, "es", fmt4(p.es)));
            rows.push(row("player", p.player, "es_baseline", fmt4(p.es_baseline)));
            rows.push(row("player", p.player, "gain", fmt4(p.gain)));
        }
        rows
    }
}

#[derive(Debug, Serialize)]
struct BestResponseReport {
    basis: PayoffBasis,
    schedule: Schedule,
    grid: Vec<u32>,
    iterations: Vec<Vec<u32>>,
    rounds: usize,
    converged: bool,
    /// Payoffs at the last profile of the trace.
    payoffs: Vec<f64>,
}

impl Report for BestResponseReport {
    fn table(&self) -> String {
        let mut out = String::new();
        let schedule = match self.schedule {
            Schedule::RoundRobin => "round-robin",
            Schedule::Simultaneous => "simultaneous",
        };
        let _ = writeln!(
            out,
            "basis: {}  schedule: {}  grid max: {}",
            self.basis.name(),
            schedule,
            join_levels(&self.grid)
        );
        let _ = writeln!(out, "{:>6}  profile", "round");
        for (k, p) in self.iterations.iter().enumerate() {
            let _ = writeln!(out, "{:>6}  {}", k, join_levels(p));
        }
        let _ = writeln!(
            out,
            "{} after {} round(s)",
            if self.converged {
                "converged"
            } else {
                "NOT converged"
            },
            self.rounds
        );
        let _ = writeln!(
            out,
            "payoffs: {}",
            self.payoffs
                .iter()
                .map(|v| fmt4(*v))
                .collect::<Vec<_>>()
                .join(" ")
        );
        out
    }

    fn csv_rows(&self) -> Vec<[String; 4]> {
        let mut rows = Vec::new();
        for (k, p) in self.iterations.iter().enumerate() {
            for (i, l) in p.iter().enumerate() {
                rows.push(row("round", k, &format!("level_{}", i + 1), l.to_string()));
            }
        }
        rows.push(row("meta", "", "converged", self.converged.to_string()));
        for (i, v) in self.payoffs.iter().enumerate() {
            rows.push(row("payoff", i + 1, "es", fmt4(*v)));
        }
        rows
    }
}

#[derive(Debug, Serialize)]
struct EquilibriaReport {
    basis: PayoffBasis,
    grid: Vec<u32>,
    profiles_checked: u64,
    equilibria: Vec<EquilibriumRow>,
}

#[derive(Debug, Serialize)]
struct EquilibriumRow {
    profile: Vec<u32>,
    payoffs: Vec<f64>,
}

impl Report for EquilibriaReport {
    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "basis: {}  grid max: {}  profiles checked: {}",
            self.basis.name(),
            join_levels(&self.grid),
            self.profiles_checked
        );
        let _ = writeln!(out, "equilibria: {}", self.equilibria.len());
        for e in &self.equilibria {
            let _ = writeln!(
                out,
                "{:<16} {}",
                join_levels(&e.profile),
                e.payoffs
                    .iter()
                    .map(|v| fmt4(*v))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        out
    }

    fn csv_rows(&self) -> Vec<[String; 4]> {
        let mut rows = Vec::new();
        for (k, e) in self.equilibria.iter().enumerate() {
            for (i, l) in e.profile.iter().enumerate() {
                rows.push(row(
                    "equilibrium",
                    k + 1,
                    &format!("level_{}", i + 1),
                    l.to_string(),
                ));
            }
            for (i, v) in e.payoffs.iter().enumerate() {
                rows.push(row(
                    "equilibrium",
                    k + 1,
                    &format!("es_{}", i + 1),
                    fmt4(*v),
                ));
            }
        }
        rows
    }
}

#[derive(Debug, Serialize)]
struct NashReport {
    profile: Vec<u32>,
    basis: PayoffBasis,
    grid: Vec<u32>,
    is_nash: bool,
    payoffs: Vec<f64>,
    deviations: Vec<DeviationRow>,
}

#[derive(Debug, Serialize)]
struct DeviationRow {
    player: usize,
    level: u32,
    payoff: f64,
    current_payoff: f64,
}

impl Report for NashReport {
    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "profile: {}  basis: {}  grid max: {}",
            join_levels(&self.profile),
            self.basis.name(),
            join_levels(&self.grid)
        );
        let _ = writeln!(
            out,
            "payoffs: {}",
            self.payoffs
                .iter()
                .map(|v| fmt4(*v))
                .collect::<Vec<_>>()
                .join(" ")
        );
        let _ = writeln!(out, "nash: {}", if self.is_nash { "yes" } else { "no" });
        if !self.deviations.is_empty() {
            let _ = writeln!(
                out,
                "{:>6} {:>6} {:>12} {:>12}",
                "player", "level", "payoff", "current"
            );
            for d in &self.deviations {
                let _ = writeln!(
                    out,
                    "{:>6} {:>6} {:>12} {:>12}",
                    d.player,
                    d.level,
                    fmt4(d.payoff),
                    fmt4(d.current_payoff)
                );
            }
        }
        out
    }

    fn csv_rows(&self) -> Vec<[String; 4]> {
        let mut rows = Vec::new();
        for (i, v) in self.payoffs.iter().enumerate() {
            rows.push(row("payoff", i + 1, "es", fmt4(*v)));
        }
        rows.push(row("meta", "", "is_nash", self.is_nash.to_string()));
        for (k, d) in self.deviations.iter().enumerate() {
            rows.push(row("deviation", k + 1, "player", d.player.to_string()));
            rows.push(row("deviation", k + 1, "level", d.level.to_string()));
            rows.push(row("deviation", k + 1, "payoff", fmt4(d.payoff)));
            rows.push(row(
                "deviation",
                k + 1,
                "current_payoff",
                fmt4(d.current_payoff),
            ));
        }
        rows
    }
}
