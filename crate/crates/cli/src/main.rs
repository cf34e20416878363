use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use akalab::attacks::{attack_matrix, distinguisher, run_matrix, Expect, ATTACK_NAMES};
use akalab::error::{OracleError, TraceError};
use akalab::game::{run_game, CoinTape, Distinguisher, GameReport, GameSession, SigmaUpdate};
use akalab::scenario::honest_session;
use akalab::traces::{format_trace, parse_trace, ufresh, validate_trace, ActionId};
use akalab::transcript::Transcript;
use akalab::types::ProtocolMode;
use akalab::world::{World, WorldConfig, DEFAULT_WINDOW_C};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "akalab", version, about = "Protocol laboratory for the 5G-AKA family")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// 5g-aka, 5g-aka-legacy, priv-aka, aka-plus or aka-plus-minus
    #[arg(long, default_value = "aka-plus", value_parser = parse_mode)]
    protocol: ProtocolMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WINDOW_C)]
    window_c: u64,
    /// Write transcripts here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct GameArgs {
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Oracle-call budget q; defaults to what the script needs.
    #[arg(long)]
    q_budget: Option<usize>,
    /// none or unlink; defaults to the script's own setting.
    #[arg(long, value_parser = parse_sigma)]
    sigma: Option<SigmaUpdate>,
    /// Threads for game trials.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run honest sessions for every subscriber and print the transcript.
    Honest {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        subscribers: usize,
        /// Rounds; each round runs one session per subscriber.
        #[arg(long, default_value_t = 2)]
        rounds: usize,
    },
    /// Run a named attack and check it against its expected outcome.
    Attack {
        name: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Estimate the advantage of a named script, without a verdict.
    Game {
        script: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Check or rename a trace file.
    Trace {
        #[command(subcommand)]
        op: TraceOp,
    },
    /// Run every attack against every protocol it targets.
    Matrix {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write a JSON line per row here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum TraceOp {
    /// Print "valid" or "invalid at N".
    Validate { file: PathBuf },
    /// Print the trace with renewed identities renamed.
    Ufresh {
        file: PathBuf,
        /// Copies per identity; defaults to the number of NS actions.
        #[arg(long)]
        copies: Option<u32>,
    },
}

fn parse_mode(s: &str) -> Result<ProtocolMode, String> {
    ProtocolMode::from_name(s).ok_or_else(|| format!("unknown protocol {s:?}"))
}

fn parse_sigma(s: &str) -> Result<SigmaUpdate, String> {
    SigmaUpdate::from_name(s).ok_or_else(|| format!("unknown sigma {s:?}"))
}

#[derive(Debug)]
enum Failure {
    Verdict(String),
    Usage(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// A script with the world and budget adjusted from the command line.
struct Tuned<'a> {
    inner: &'a dyn Distinguisher,
    q: Option<usize>,
    window_c: u64,
}

impl Distinguisher for Tuned<'_> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn budget(&self) -> usize {
        self.q.unwrap_or_else(|| self.inner.budget())
    }

    fn world_config(&self) -> WorldConfig {
        WorldConfig { window_c: self.window_c, ..self.inner.world_config() }
    }

    fn guess(&self, g: &mut GameSession, coins: &mut CoinTape) -> Result<bool, OracleError> {
        self.inner.guess(g, coins)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn honest(c: &Common, subscribers: usize, rounds: usize) -> Result<(), Failure> {
    let cfg = WorldConfig { window_c: c.window_c, ..WorldConfig::new(c.protocol, subscribers) };
    let mut w = World::new(&cfg, c.seed, 0).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut failed = 0;
    for _ in 0..rounds {
        for idx in 0..subscribers {
            let ok = honest_session(&mut w, idx).map_err(|e| Failure::Usage(e.to_string()))?;
            failed += usize::from(!ok);
        }
    }
    emit(&c.out, &w.transcript().to_jsonl())?;
    let violations = w.monitor().len();
    if failed > 0 || violations > 0 {
        return Err(Failure::Verdict(format!("{failed} sessions failed, {violations} monitor violations")));
    }
    Ok(())
}

fn play(name: &str, c: &Common, g: &GameArgs, sigma: SigmaUpdate) -> Result<GameReport, Failure> {
    let (d, _) = distinguisher(name, c.protocol).ok_or_else(|| unknown_script(name))?;
    let tuned = Tuned { inner: d.as_ref(), q: g.q_budget, window_c: c.window_c };
    let report = run_game(&tuned, sigma, g.trials, c.seed, g.jobs)?;
    if let Some(p) = &c.out {
        fs::write(p, &report.first_transcript)?;
    }
    println!("{}", report.result_line());
    Ok(report)
}

fn unknown_script(name: &str) -> Failure {
    Failure::Usage(format!("unknown script {name:?}; known: {}", ATTACK_NAMES.join(", ")))
}

fn attack(name: &str, c: &Common, g: &GameArgs) -> Result<(), Failure> {
    let (d, default_sigma) = distinguisher(name, c.protocol).ok_or_else(|| unknown_script(name))?;
    let mode = d.world_config().mode;
    let row = attack_matrix()
        .into_iter()
        .find(|e| e.attack.name() == name && e.mode() == mode && g.sigma.is_none_or(|s| s == e.sigma));
    let sigma = g.sigma.or(row.as_ref().map(|e| e.sigma)).unwrap_or(default_sigma);
    let report = play(name, c, g, sigma)?;
    match row.map(|e| e.expect) {
        Some(expect) if !expect.holds(report.advantage) => Err(Failure::Verdict(format!(
            "expected {} against {mode}, got advantage {:.4}",
            match expect {
                Expect::Wins => "a win",
                Expect::CoinFlip => "a coin flip",
            },
            report.advantage
        ))),
        _ => Ok(()),
    }
}

fn matrix(trials: u64, seed: u64, jobs: usize, out: &Option<PathBuf>) -> Result<(), Failure> {
    let rows = run_matrix(trials, seed, jobs)?;
    let mut summary = String::new();
    for r in &rows {
        println!("{}", r.line());
        let j = serde_json::json!({
            "attack": r.attack,
            "protocol": r.mode.name(),
            "sigma": r.sigma.name(),
            "expect": format!("{:?}", r.expect),
            "advantage": r.report.advantage,
            "ci": r.report.halfwidth,
            "trials": r.report.trials,
            "voided": r.report.voided,
            "digest": r.report.digest,
            "pass": r.pass,
        });
        summary.push_str(&j.to_string());
        summary.push('\n');
    }
    if let Some(p) = out {
        fs::write(p, summary)?;
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure::Verdict(format!("{failed} of {} rows failed", rows.len())));
    }
    Ok(())
}

/// Reads either a JSONL transcript or whitespace-separated actions.
fn read_trace(p: &Path) -> Result<Vec<ActionId>, Failure> {
    let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    if text.trim_start().starts_with('{') {
        Ok(Transcript::from_jsonl(&text)?.actions())
    } else {
        Ok(parse_trace(&text)?)
    }
}

fn trace(op: &TraceOp) -> Result<(), Failure> {
    match op {
        TraceOp::Validate { file } => {
            let v = validate_trace(&read_trace(file)?);
            match v.first_violation {
                None => {
                    println!("valid");
                    Ok(())
                }
                Some(i) => {
                    println!("invalid at {i}");
                    Err(Failure::Verdict(String::new()))
                }
            }
        }
        TraceOp::Ufresh { file, copies } => {
            let t = read_trace(file)?;
            let n = copies.unwrap_or_else(|| t.iter().filter(|a| matches!(a, ActionId::Ns(..))).count() as u32);
            println!("{}", format_trace(&ufresh(&t, n)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Honest { common, subscribers, rounds } => honest(common, *subscribers, *rounds),
        Cmd::Attack { name, common, game } => attack(name, common, game),
        Cmd::Game { script, common, game } => {
            distinguisher(script, common.protocol)
                .ok_or_else(|| unknown_script(script))
                .and_then(|(_, s)| play(script, common, game, game.sigma.unwrap_or(s)).map(|_| ()))
        }
        Cmd::Trace { op } => trace(op),
        Cmd::Matrix { trials, seed, jobs, out } => matrix(*trials, *seed, *jobs, out),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict(msg)) => {
            if !msg.is_empty() {
                eprintln!("akalab: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("akalab: {msg}");
            ExitCode::from(2)
        }
    }
}
