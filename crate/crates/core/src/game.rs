//! The q- and σ-unlinkability games.
//!
//! A [`GameSession`] wraps a [`World`] behind the oracle interface. The
//! adversary never learns which subscriber a virtual handler aliases; it
//! only sees oracle replies.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::entropy::stream_rng;
use crate::error::{HarnessError, OracleError};
use crate::traces::validate_trace;
use crate::transcript::Endpoint;
use crate::types::{Identity, SubIndex};
use crate::world::{Dominance, World, WorldConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SigmaUpdate {
    /// Plain q-unlinkability.
    #[default]
    None,
    /// `success_ue := false` on the drawn subscriber.
    SigmaUnlink,
}

impl SigmaUpdate {
    pub fn name(self) -> &'static str {
        match self {
            SigmaUpdate::None => "none",
            SigmaUpdate::SigmaUnlink => "unlink",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "none" | "plain" => Some(SigmaUpdate::None),
            "unlink" | "sigma" => Some(SigmaUpdate::SigmaUnlink),
            _ => None,
        }
    }
}

/// A virtual handler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vh(usize);

#[derive(Clone, Copy, Debug)]
struct Handler {
    target: SubIndex,
    removed: (SubIndex, SubIndex),
}

pub struct GameSession {
    world: World,
    b: bool,
    sigma: SigmaUpdate,
    handlers: Vec<Option<Handler>>,
    free: BTreeSet<SubIndex>,
    calls: usize,
    q: usize,
}

impl GameSession {
    pub fn new(world: World, b: bool, q: usize, sigma: SigmaUpdate) -> Self {
        let free = (0..world.subscribers().len()).collect();
        Self { world, b, sigma, handlers: Vec::new(), free, calls: 0, q }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        if self.calls >= self.q {
            return Err(OracleError::BudgetExceeded);
        }
        self.calls += 1;
        Ok(())
    }

    fn handler(&self, vh: Vh) -> Result<Handler, OracleError> {
        self.handlers.get(vh.0).copied().flatten().ok_or(OracleError::DeadHandler(vh.0))
    }

    fn lookup(&self, id: &Identity) -> Result<SubIndex, OracleError> {
        self.world.index_of(id).ok_or_else(|| HarnessError::UnknownSubscriber(id.to_string()).into())
    }

    pub fn start_session(&mut self) -> Result<usize, OracleError> {
        self.tick()?;
        Ok(self.world.start_session()?)
    }

    pub fn send_ue(&mut self, vh: Vh, m: &[u8]) -> Result<Vec<u8>, OracleError> {
        self.tick()?;
        let h = self.handler(vh)?;
        Ok(self.world.send_ue(h.target, m)?)
    }

    pub fn send_hn(&mut self, j: usize, m: &[u8]) -> Result<Vec<u8>, OracleError> {
        self.tick()?;
        Ok(self.world.send_hn(j, m)?)
    }

    pub fn result_hn(&mut self, j: usize) -> Result<bool, OracleError> {
        self.tick()?;
        Ok(self.world.result_hn(j)?)
    }

    pub fn result_ue(&mut self, vh: Vh) -> Result<bool, OracleError> {
        self.tick()?;
        let h = self.handler(vh)?;
        Ok(self.world.result_ue(h.target)?)
    }

    /// `DrawUE_σ(id0, id1)`.
    pub fn draw_ue(&mut self, id0: &Identity, id1: &Identity) -> Result<Vh, OracleError> {
        self.tick()?;
        let (i0, i1) = (self.lookup(id0)?, self.lookup(id1)?);
        for (i, id) in [(i0, id0), (i1, id1)] {
            if !self.free.contains(&i) {
                return Err(OracleError::NotFree(id.to_string()));
            }
        }
        self.free.remove(&i0);
        self.free.remove(&i1);
        let target = if self.b { i1 } else { i0 };
        self.world.renew(target, self.sigma == SigmaUpdate::SigmaUnlink)?;
        self.handlers.push(Some(Handler { target, removed: (i0, i1) }));
        Ok(Vh(self.handlers.len() - 1))
    }

    pub fn free_ue(&mut self, vh: Vh) -> Result<(), OracleError> {
        self.tick()?;
        let h = self.handler(vh)?;
        if self.world.subscriber(h.target)?.phase.mid_session() {
            return Err(OracleError::MidSession);
        }
        self.handlers[vh.0] = None;
        self.free.insert(h.removed.0);
        self.free.insert(h.removed.1);
        Ok(())
    }

    /// Notes that the adversary withheld a message sent by `vh`. Not an
    /// oracle call: withholding is the absence of one.
    pub fn drop_from_ue(&mut self, vh: Vh, m: &[u8]) -> Result<(), OracleError> {
        let h = self.handler(vh)?;
        let id = self.world.subscriber(h.target)?.id.clone();
        self.world.mark_dropped(Endpoint::Ue(id), m);
        Ok(())
    }

    pub fn drop_from_hn(&mut self, j: usize, m: &[u8]) {
        self.world.mark_dropped(Endpoint::Hn(j), m);
    }

    pub fn calls_made(&self) -> usize {
        self.calls
    }

    pub fn budget(&self) -> usize {
        self.q
    }

    /// Identities currently in the free list.
    pub fn free_list(&self) -> Vec<Identity> {
        self.free.iter().map(|&i| self.world.subscribers()[i].id.clone()).collect()
    }

    /// The world behind the oracles. Distinguishers must not use this.
    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn into_world(self) -> World {
        self.world
    }
}

/// Per-trial random coins available to a distinguisher.
pub struct CoinTape(ChaCha20Rng);

impl CoinTape {
    pub fn new(rng: ChaCha20Rng) -> Self {
        Self(rng)
    }

    pub fn flip(&mut self) -> bool {
        self.0.random()
    }
}

/// A scripted adversary. `guess` returns its guess of the hidden bit.
pub trait Distinguisher: Sync {
    fn name(&self) -> String;
    /// Oracle calls the script needs.
    fn budget(&self) -> usize;
    fn world_config(&self) -> WorldConfig;
    fn guess(&self, g: &mut GameSession, coins: &mut CoinTape) -> Result<bool, OracleError>;
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub b: bool,
    pub guess: bool,
    pub won: bool,
    pub voided: bool,
    pub world: World,
}

/// Plays one trial. Every random choice comes from `seed` and `trial`.
pub fn play_trial(
    d: &dyn Distinguisher,
    sigma: SigmaUpdate,
    seed: u64,
    trial: u64,
) -> Result<TrialOutcome, OracleError> {
    let world = World::new(&d.world_config(), seed, trial * 4)?;
    let b: bool = stream_rng(seed, trial * 4 + 1).random();
    let mut coins = CoinTape::new(stream_rng(seed, trial * 4 + 2));
    let mut g = GameSession::new(world, b, d.budget(), sigma);
    let (guess, voided) = match d.guess(&mut g, &mut coins) {
        Ok(guess) => (guess, false),
        Err(OracleError::BudgetExceeded) => {
            let fair: bool = stream_rng(seed, trial * 4 + 3).random();
            (fair == b, true)
        }
        Err(e) => return Err(e),
    };
    Ok(TrialOutcome { b, guess, won: guess == b, voided, world: g.into_world() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameReport {
    pub name: String,
    pub sigma: SigmaUpdate,
    pub trials: u64,
    pub wins: u64,
    pub voided: u64,
    pub advantage: f64,
    pub halfwidth: f64,
    pub auth_violations: usize,
    pub invalid_traces: usize,
    pub dominance: Dominance,
    /// SHA-256 over all trial transcripts, in trial order.
    pub digest: String,
    /// Transcript of trial 0.
    pub first_transcript: String,
}

impl GameReport {
    pub fn result_line(&self) -> String {
        format!(
            "RESULT name={} advantage={:.4} ci={:.4} trials={}",
            self.name, self.advantage, self.halfwidth, self.trials
        )
    }
}

/// Hoeffding 95% half-width on the advantage for `n` trials.
pub fn halfwidth(n: u64) -> f64 {
    2.0 * ((2.0f64 / 0.05).ln() / (2.0 * n as f64)).sqrt()
}

/// Runs `trials` independent trials. `jobs > 1` spreads them over that
/// many threads; the report does not depend on `jobs`.
pub fn run_game(
    d: &dyn Distinguisher,
    sigma: SigmaUpdate,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<GameReport, OracleError> {
    if trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()).into());
    }
    let one = |t: u64| -> Result<(bool, bool, usize, bool, Dominance, String), OracleError> {
        let o = play_trial(d, sigma, seed, t)?;
        let w = &o.world;
        Ok((
            o.won,
            o.voided,
            w.monitor().len(),
            validate_trace(&w.action_trace()).valid,
            w.dominance(),
            w.transcript().to_jsonl(),
        ))
    };
    let outcomes: Vec<_> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        pool.install(|| (0..trials).into_par_iter().map(one).collect::<Result<_, _>>())?
    } else {
        (0..trials).map(one).collect::<Result<_, _>>()?
    };

    let mut report = GameReport {
        name: d.name(),
        sigma,
        trials,
        wins: 0,
        voided: 0,
        advantage: 0.0,
        halfwidth: halfwidth(trials),
        auth_violations: 0,
        invalid_traces: 0,
        dominance: Dominance::default(),
        digest: String::new(),
        first_transcript: String::new(),
    };
    let mut hasher = Sha256::new();
    for (t, (won, voided, viol, valid, dom, jsonl)) in outcomes.into_iter().enumerate() {
        report.wins += u64::from(won);
        report.voided += u64::from(voided);
        report.auth_violations += viol;
        report.invalid_traces += usize::from(!valid);
        report.dominance += dom;
        hasher.update(jsonl.as_bytes());
        if t == 0 {
            report.first_transcript = jsonl;
        }
    }
    report.advantage = (2.0 * report.wins as f64 / trials as f64 - 1.0).abs();
    report.digest = hex::encode(hasher.finalize());
    Ok(report)
}
