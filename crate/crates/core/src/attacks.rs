//! Scripted adversaries.
//!
//! Distinguishers act only through the game oracles. The IMSI catcher and
//! the PRIV-AKA desynchronization are demonstrations over a bare
//! [`World`] and report what they achieved.

use crate::error::{HarnessError, OracleError};
use crate::game::{run_game, CoinTape, Distinguisher, GameReport, GameSession, SigmaUpdate, Vh};
use crate::message::{decode_message, Message, StartKind};
use crate::protocol::priv_aka::{priv_hn_confirm, priv_run_to_confirm, PrivRunError};
use crate::protocol::Verdict;
use crate::transcript::Endpoint;
use crate::types::{Identity, ProtocolMode, SubIndex};
use crate::world::{World, WorldConfig};

pub const WIN_THRESHOLD: f64 = 0.99;
pub const FLIP_THRESHOLD: f64 = 0.25;

const SCRIPT_BUDGET: usize = 48;

fn a() -> Identity {
    Identity::nth(0)
}

fn b() -> Identity {
    Identity::nth(1)
}

fn start(g: &mut GameSession, vh: Vh, kind: StartKind) -> Result<Vec<u8>, OracleError> {
    g.send_ue(vh, &Message::Start(kind).encode())
}

fn decodes_to(bytes: &[u8], f: impl Fn(&Message) -> bool) -> bool {
    decode_message(bytes).is_ok_and(|m| f(&m))
}

/// AKA+ SUPI session followed by Refresh, relayed faithfully.
fn supi_refresh(g: &mut GameSession, vh: Vh) -> Result<(), OracleError> {
    let j = g.start_session()?;
    let mut m = start(g, vh, StartKind::Supi)?;
    for _ in 0..3 {
        m = g.send_hn(j, &m)?;
        m = g.send_ue(vh, &m)?;
    }
    Ok(())
}

/// Opens an AKA+ GUTI session and lets the UE answer the vector. Returns
/// the HN session, the vector and the UE's confirmation.
fn guti_open(g: &mut GameSession, vh: Vh) -> Result<(usize, Vec<u8>, Vec<u8>), OracleError> {
    let j = g.start_session()?;
    let m = start(g, vh, StartKind::Guti)?;
    let vector = g.send_hn(j, &m)?;
    let confirm = g.send_ue(vh, &vector)?;
    Ok((j, vector, confirm))
}

/// Delivers the confirmation and runs Refresh. The refresh message reaches
/// the UE only if `deliver_refresh`.
fn guti_close(g: &mut GameSession, vh: Vh, j: usize, confirm: &[u8], deliver_refresh: bool) -> Result<(), OracleError> {
    let ok = g.send_hn(j, confirm)?;
    let refresh = g.send_hn(j, &ok)?;
    if deliver_refresh {
        g.send_ue(vh, &refresh)?;
    } else {
        g.drop_from_hn(j, &refresh);
    }
    Ok(())
}

/// A 5G-AKA session with GUTI assignment. Returns the authentication vector.
fn fiveg_full(g: &mut GameSession, vh: Vh) -> Result<Vec<u8>, OracleError> {
    let j = g.start_session()?;
    let id = start(g, vh, StartKind::Auto)?;
    let vector = g.send_hn(j, &id)?;
    let res = g.send_ue(vh, &vector)?;
    let assign = g.send_hn(j, &res)?;
    g.send_ue(vh, &assign)?;
    Ok(vector)
}

/// Replays a vector recorded in a session of A to the drawn handler and
/// reads the failure message.
pub struct FailureMessage {
    pub mode: ProtocolMode,
}

impl Distinguisher for FailureMessage {
    fn name(&self) -> String {
        "failure-message".into()
    }

    fn budget(&self) -> usize {
        SCRIPT_BUDGET
    }

    fn world_config(&self) -> WorldConfig {
        WorldConfig::new(self.mode, 2)
    }

    fn guess(&self, g: &mut GameSession, coins: &mut CoinTape) -> Result<bool, OracleError> {
        let vh = g.draw_ue(&a(), &a())?;
        let t_auth = if self.mode.is_aka_plus() {
            supi_refresh(g, vh)?;
            let (j, vector, confirm) = guti_open(g, vh)?;
            guti_close(g, vh, j, &confirm, true)?;
            vector
        } else {
            fiveg_full(g, vh)?
        };
        g.free_ue(vh)?;

        let vh = g.draw_ue(&a(), &b())?;
        let kind = if self.mode.is_aka_plus() { StartKind::Guti } else { StartKind::Auto };
        start(g, vh, kind)?;
        let reply = g.send_ue(vh, &t_auth)?;
        Ok(match decode_message(&reply) {
            Ok(Message::ResyncRequest { .. }) => false,
            Ok(Message::AuthFailure) => true,
            _ => coins.flip(),
        })
    }
}

/// Substitutes A's recorded identification for the drawn handler's.
pub struct SupiReplay {
    pub mode: ProtocolMode,
}

impl Distinguisher for SupiReplay {
    fn name(&self) -> String {
        "encrypted-supi-replay".into()
    }

    fn budget(&self) -> usize {
        SCRIPT_BUDGET
    }

    fn world_config(&self) -> WorldConfig {
        WorldConfig::new(self.mode, 2)
    }

    fn guess(&self, g: &mut GameSession, _: &mut CoinTape) -> Result<bool, OracleError> {
        let vh = g.draw_ue(&a(), &a())?;
        let j = g.start_session()?;
        let stored = if self.mode.is_aka_plus() {
            let m = start(g, vh, StartKind::Supi)?;
            let n = g.send_hn(j, &m)?;
            let resp = g.send_ue(vh, &n)?;
            let m = g.send_hn(j, &resp)?;
            let m = g.send_ue(vh, &m)?;
            let m = g.send_hn(j, &m)?;
            g.send_ue(vh, &m)?;
            resp
        } else {
            let id = start(g, vh, StartKind::Auto)?;
            let v = g.send_hn(j, &id)?;
            let res = g.send_ue(vh, &v)?;
            let assign = g.send_hn(j, &res)?;
            g.send_ue(vh, &assign)?;
            id
        };
        g.free_ue(vh)?;

        let vh = g.draw_ue(&a(), &b())?;
        let j = g.start_session()?;
        if self.mode.is_aka_plus() {
            let m = start(g, vh, StartKind::Supi)?;
            let n = g.send_hn(j, &m)?;
            g.send_ue(vh, &n)?;
            g.send_hn(j, &stored)?;
            Ok(!g.result_hn(j)?)
        } else {
            start(g, vh, StartKind::Auto)?;
            let v = g.send_hn(j, &stored)?;
            g.send_ue(vh, &v)?;
            Ok(!g.result_ue(vh)?)
        }
    }
}

/// Leaves A without a temporary identity by intercepting its refresh, then
/// asks the drawn handler for its temporary identity.
pub struct GutiLinkability {
    pub intercept: bool,
}

impl Distinguisher for GutiLinkability {
    fn name(&self) -> String {
        if self.intercept { "guti-linkability" } else { "guti-linkability-no-intercept" }.into()
    }

    fn budget(&self) -> usize {
        SCRIPT_BUDGET
    }

    fn world_config(&self) -> WorldConfig {
        WorldConfig::new(ProtocolMode::AkaPlus, 2)
    }

    fn guess(&self, g: &mut GameSession, _: &mut CoinTape) -> Result<bool, OracleError> {
        let vh = g.draw_ue(&a(), &a())?;
        supi_refresh(g, vh)?;
        let (j, _, confirm) = guti_open(g, vh)?;
        guti_close(g, vh, j, &confirm, !self.intercept)?;
        g.free_ue(vh)?;

        let vh = g.draw_ue(&b(), &b())?;
        supi_refresh(g, vh)?;
        g.free_ue(vh)?;

        let vh = g.draw_ue(&a(), &b())?;
        let m = start(g, vh, StartKind::Guti)?;
        Ok(decodes_to(&m, |m| matches!(m, Message::GutiId(_))))
    }
}

/// Withholds A's GUTI confirmation across a draw and a SUPI session of the
/// drawn handler, then tests whether the handler still runs GUTI sessions.
pub struct Subtle {
    pub mode: ProtocolMode,
    /// Deliver the withheld confirmation before the SUPI session.
    pub early: bool,
}

impl Distinguisher for Subtle {
    fn name(&self) -> String {
        if self.early { "subtle-attack-early" } else { "subtle-attack" }.into()
    }

    fn budget(&self) -> usize {
        SCRIPT_BUDGET
    }

    fn world_config(&self) -> WorldConfig {
        WorldConfig::new(self.mode, 2)
    }

    fn guess(&self, g: &mut GameSession, _: &mut CoinTape) -> Result<bool, OracleError> {
        let vh = g.draw_ue(&a(), &a())?;
        supi_refresh(g, vh)?;
        let (j, _, t_auth) = guti_open(g, vh)?;
        g.drop_from_ue(vh, &t_auth)?;
        if self.early {
            g.send_hn(j, &t_auth)?;
        }
        g.free_ue(vh)?;

        let vh = g.draw_ue(&b(), &b())?;
        supi_refresh(g, vh)?;
        g.free_ue(vh)?;

        let vh = g.draw_ue(&a(), &b())?;
        supi_refresh(g, vh)?;
        if !self.early {
            g.send_hn(j, &t_auth)?;
        }
        let (_, _, reply) = guti_open(g, vh)?;
        Ok(decodes_to(&reply, |m| matches!(m, Message::GutiConfirm(_))))
    }
}

/// Guesses from its coin tape without calling any oracle.
pub struct RandomGuess {
    pub mode: ProtocolMode,
}

impl Distinguisher for RandomGuess {
    fn name(&self) -> String {
        "random-guess".into()
    }

    fn budget(&self) -> usize {
        0
    }

    fn world_config(&self) -> WorldConfig {
        WorldConfig::new(self.mode, 2)
    }

    fn guess(&self, _: &mut GameSession, coins: &mut CoinTape) -> Result<bool, OracleError> {
        Ok(coins.flip())
    }
}

pub const ATTACK_NAMES: [&str; 7] = [
    "failure-message",
    "encrypted-supi-replay",
    "guti-linkability",
    "guti-linkability-no-intercept",
    "subtle-attack",
    "subtle-attack-early",
    "random-guess",
];

/// Builds a distinguisher by name together with the game it is meant for.
/// Attacks tied to AKA+ ignore the 5G modes and use `aka-plus`.
pub fn distinguisher(name: &str, mode: ProtocolMode) -> Option<(Box<dyn Distinguisher>, SigmaUpdate)> {
    let plus = if mode.is_aka_plus() { mode } else { ProtocolMode::AkaPlus };
    Some(match name {
        "failure-message" => (Box::new(FailureMessage { mode }), SigmaUpdate::None),
        "encrypted-supi-replay" => (Box::new(SupiReplay { mode }), SigmaUpdate::None),
        "guti-linkability" => (Box::new(GutiLinkability { intercept: true }), SigmaUpdate::None),
        "guti-linkability-no-intercept" => (Box::new(GutiLinkability { intercept: false }), SigmaUpdate::None),
        "subtle-attack" => (Box::new(Subtle { mode: plus, early: false }), SigmaUpdate::SigmaUnlink),
        "subtle-attack-early" => (Box::new(Subtle { mode: plus, early: true }), SigmaUpdate::SigmaUnlink),
        "random-guess" => (Box::new(RandomGuess { mode }), SigmaUpdate::None),
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    /// Advantage at least [`WIN_THRESHOLD`].
    Wins,
    /// Advantage at most [`FLIP_THRESHOLD`].
    CoinFlip,
}

impl Expect {
    pub fn holds(self, advantage: f64) -> bool {
        match self {
            Expect::Wins => advantage >= WIN_THRESHOLD,
            Expect::CoinFlip => advantage <= FLIP_THRESHOLD,
        }
    }
}

pub struct MatrixEntry {
    pub attack: Box<dyn Distinguisher>,
    pub sigma: SigmaUpdate,
    pub expect: Expect,
}

impl MatrixEntry {
    pub fn mode(&self) -> ProtocolMode {
        self.attack.world_config().mode
    }
}

/// Every attack against the mode it breaks and the mode that fixes it.
pub fn attack_matrix() -> Vec<MatrixEntry> {
    use ProtocolMode::*;
    use SigmaUpdate::{None as Plain, SigmaUnlink as Unlink};
    let e = |attack: Box<dyn Distinguisher>, sigma, expect| MatrixEntry { attack, sigma, expect };
    vec![
        e(Box::new(FailureMessage { mode: FiveGAka }), Plain, Expect::Wins),
        e(Box::new(FailureMessage { mode: AkaPlus }), Plain, Expect::CoinFlip),
        e(Box::new(SupiReplay { mode: FiveGAka }), Plain, Expect::Wins),
        e(Box::new(SupiReplay { mode: AkaPlus }), Plain, Expect::CoinFlip),
        e(Box::new(GutiLinkability { intercept: true }), Plain, Expect::Wins),
        e(Box::new(GutiLinkability { intercept: true }), Unlink, Expect::CoinFlip),
        e(Box::new(GutiLinkability { intercept: false }), Plain, Expect::CoinFlip),
        e(Box::new(Subtle { mode: AkaPlusMinus, early: false }), Unlink, Expect::Wins),
        e(Box::new(Subtle { mode: AkaPlus, early: false }), Unlink, Expect::CoinFlip),
        e(Box::new(Subtle { mode: AkaPlusMinus, early: true }), Unlink, Expect::CoinFlip),
        e(Box::new(Subtle { mode: AkaPlus, early: true }), Unlink, Expect::CoinFlip),
        e(Box::new(RandomGuess { mode: AkaPlus }), Plain, Expect::CoinFlip),
    ]
}

#[derive(Clone, Debug)]
pub struct MatrixResult {
    pub attack: String,
    pub mode: ProtocolMode,
    pub sigma: SigmaUpdate,
    pub expect: Expect,
    pub report: GameReport,
    pub pass: bool,
}

impl MatrixResult {
    pub fn line(&self) -> String {
        format!(
            "{} attack={} protocol={} sigma={} expect={:?} advantage={:.4} ci={:.4} trials={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.attack,
            self.mode,
            self.sigma.name(),
            self.expect,
            self.report.advantage,
            self.report.halfwidth,
            self.report.trials
        )
    }
}

pub fn run_matrix(trials: u64, seed: u64, jobs: usize) -> Result<Vec<MatrixResult>, OracleError> {
    attack_matrix()
        .into_iter()
        .map(|e| {
            let report = run_game(e.attack.as_ref(), e.sigma, trials, seed, jobs)?;
            Ok(MatrixResult {
                attack: e.attack.name(),
                mode: e.mode(),
                sigma: e.sigma,
                expect: e.expect,
                pass: e.expect.holds(report.advantage),
                report,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImsiOutcome {
    Captured(Identity),
    Inapplicable,
}

/// Intercepts the identification of subscriber `idx`; a temporary
/// identity is answered with a permanent identity request.
pub fn attack_imsi_catcher(world: &mut World, idx: SubIndex) -> Result<ImsiOutcome, HarnessError> {
    if world.mode() != ProtocolMode::FiveGAkaLegacyPlainImsi {
        return Ok(ImsiOutcome::Inapplicable);
    }
    let id = world.subscriber(idx)?.id.clone();
    let m = world.start_ue(idx, StartKind::Auto)?;
    world.mark_dropped(Endpoint::Ue(id), &m);
    let m = match decode_message(&m) {
        Ok(Message::Tmsi(_)) => decode_message(&world.send_ue(idx, &Message::PermanentIdRequest.encode())?),
        other => other,
    };
    match m {
        Ok(Message::PlainImsi(id)) => Ok(ImsiOutcome::Captured(id)),
        other => Err(HarnessError::Config(format!("unexpected identification {other:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DesyncReport {
    /// `sqn_hn - sqn_ue` after the script.
    pub delta: i128,
    /// Whether the three honest sessions run afterwards all failed.
    pub subsequent_runs_fail: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DesyncError {
    #[error("the attack needs a priv-aka world")]
    Inapplicable,
    #[error("an honest session of the script failed")]
    SessionFailed,
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

impl From<PrivRunError> for DesyncError {
    fn from(e: PrivRunError) -> Self {
        match e {
            PrivRunError::Aborted => DesyncError::SessionFailed,
            PrivRunError::Harness(h) => DesyncError::Harness(h),
        }
    }
}

fn priv_full(world: &mut World, idx: SubIndex) -> Result<bool, DesyncError> {
    let (c, j) = match priv_run_to_confirm(world, idx) {
        Ok(x) => x,
        Err(PrivRunError::Aborted) => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    Ok(priv_hn_confirm(world, j, &c)? == Verdict::Success)
}

/// Holds two confirmations across full sessions and delivers them late.
/// With `hold = false` the same number of sessions runs undisturbed.
pub fn attack_privaka_desync(world: &mut World, idx: SubIndex, hold: bool) -> Result<DesyncReport, DesyncError> {
    if world.mode() != ProtocolMode::PrivAka {
        return Err(DesyncError::Inapplicable);
    }
    let id = world.subscriber(idx)?.id.clone();
    if hold {
        let mut held = Vec::new();
        for _ in 0..2 {
            let (c, j) = priv_run_to_confirm(world, idx)?;
            world.mark_dropped(Endpoint::Ue(id.clone()), &c.encode());
            held.push((c, j));
            if !priv_full(world, idx)? {
                return Err(DesyncError::SessionFailed);
            }
        }
        for (c, j) in held {
            priv_hn_confirm(world, j, &c)?;
        }
    } else {
        for _ in 0..4 {
            if !priv_full(world, idx)? {
                return Err(DesyncError::SessionFailed);
            }
        }
    }
    let delta = i128::from(world.network().records[idx].sqn_hn.0) - i128::from(world.subscriber(idx)?.sqn_ue.0);
    let mut all_fail = true;
    for _ in 0..3 {
        all_fail &= !priv_full(world, idx)?;
    }
    Ok(DesyncReport { delta, subsequent_runs_fail: all_fail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::play_trial;

    fn both_worlds(d: &dyn Distinguisher, sigma: SigmaUpdate) -> Vec<(bool, bool)> {
        (0..8).map(|t| {
            let o = play_trial(d, sigma, 21, t).unwrap();
            assert!(!o.voided);
            (o.b, o.guess)
        })
        .collect()
    }

    #[test]
    fn failure_message_wins_against_five_g() {
        for (b, guess) in both_worlds(&FailureMessage { mode: ProtocolMode::FiveGAka }, SigmaUpdate::None) {
            assert_eq!(b, guess);
        }
    }

    #[test]
    fn failure_message_same_subscriber_sees_resync() {
        let mut g = GameSession::new(
            World::new(&WorldConfig::new(ProtocolMode::FiveGAka, 1), 2, 0).unwrap(),
            false,
            30,
            SigmaUpdate::None,
        );
        let vh = g.draw_ue(&a(), &a()).unwrap();
        let t = fiveg_full(&mut g, vh).unwrap();
        start(&mut g, vh, StartKind::Auto).unwrap();
        let r = g.send_ue(vh, &t).unwrap();
        assert!(decodes_to(&r, |m| matches!(m, Message::ResyncRequest { .. })));
    }

    #[test]
    fn failure_message_aka_plus_sees_identical_errors() {
        let replies: Vec<Vec<u8>> = [false, true]
            .into_iter()
            .map(|bit| {
                let w = World::new(&WorldConfig::new(ProtocolMode::AkaPlus, 2), 5, 0).unwrap();
                let mut g = GameSession::new(w, bit, SCRIPT_BUDGET, SigmaUpdate::None);
                let vh = g.draw_ue(&a(), &a()).unwrap();
                supi_refresh(&mut g, vh).unwrap();
                let (j, v, c) = guti_open(&mut g, vh).unwrap();
                guti_close(&mut g, vh, j, &c, true).unwrap();
                g.free_ue(vh).unwrap();
                let vh = g.draw_ue(&a(), &b()).unwrap();
                start(&mut g, vh, StartKind::Guti).unwrap();
                g.send_ue(vh, &v).unwrap()
            })
            .collect();
        assert_eq!(replies[0], replies[1]);
        assert_eq!(replies[0], Message::Error.encode());
    }

    #[test]
    fn supi_replay_wins_against_five_g() {
        for (b, guess) in both_worlds(&SupiReplay { mode: ProtocolMode::FiveGAka }, SigmaUpdate::None) {
            assert_eq!(b, guess);
        }
    }

    #[test]
    fn supi_replay_fails_even_for_the_victim_under_aka_plus() {
        for bit in [false, true] {
            let w = World::new(&WorldConfig::new(ProtocolMode::AkaPlus, 2), 8, 0).unwrap();
            let mut g = GameSession::new(w, bit, SCRIPT_BUDGET, SigmaUpdate::None);
            let guess = SupiReplay { mode: ProtocolMode::AkaPlus }
                .guess(&mut g, &mut CoinTape::new(crate::entropy::stream_rng(0, 0)))
                .unwrap();
            assert!(guess, "the replayed response is rejected whatever the handler");
            assert!(!g.world().result_hn(g.world().network().sessions.len() - 1).unwrap());
        }
    }

    #[test]
    fn guti_linkability_plain_and_sigma() {
        for (b, guess) in both_worlds(&GutiLinkability { intercept: true }, SigmaUpdate::None) {
            assert_eq!(b, guess);
        }
        for (_, guess) in both_worlds(&GutiLinkability { intercept: true }, SigmaUpdate::SigmaUnlink) {
            assert!(!guess, "both handlers answer NoSuci");
        }
        for (_, guess) in both_worlds(&GutiLinkability { intercept: false }, SigmaUpdate::None) {
            assert!(guess, "both handlers answer GutiId");
        }
    }

    #[test]
    fn subtle_attack_only_breaks_aka_plus_minus() {
        let sigma = SigmaUpdate::SigmaUnlink;
        for (b, guess) in both_worlds(&Subtle { mode: ProtocolMode::AkaPlusMinus, early: false }, sigma) {
            assert_eq!(b, guess);
        }
        for mode in [ProtocolMode::AkaPlus, ProtocolMode::AkaPlusMinus] {
            let early = both_worlds(&Subtle { mode, early: true }, sigma);
            assert!(early.iter().all(|&(_, guess)| guess), "{mode} early");
        }
        let late = both_worlds(&Subtle { mode: ProtocolMode::AkaPlus, early: false }, sigma);
        assert!(late.iter().all(|&(_, guess)| guess));
    }

    #[test]
    fn attack_transcripts_have_valid_traces_and_no_auth_violations() {
        for e in attack_matrix() {
            let r = run_game(e.attack.as_ref(), e.sigma, 10, 77, 1).unwrap();
            assert_eq!(r.auth_violations, 0, "{}", e.attack.name());
            assert_eq!(r.invalid_traces, 0, "{}", e.attack.name());
            assert_eq!(r.voided, 0, "{}", e.attack.name());
        }
    }

    #[test]
    fn distinguisher_lookup() {
        for name in ATTACK_NAMES {
            assert!(distinguisher(name, ProtocolMode::AkaPlus).is_some());
        }
        assert!(distinguisher("nope", ProtocolMode::AkaPlus).is_none());
        let (d, s) = distinguisher("subtle-attack", ProtocolMode::FiveGAka).unwrap();
        assert_eq!((d.world_config().mode, s), (ProtocolMode::AkaPlus, SigmaUpdate::SigmaUnlink));
    }

    #[test]
    fn imsi_catcher_both_branches_and_inapplicable() {
        let cfg = WorldConfig::new(ProtocolMode::FiveGAkaLegacyPlainImsi, 2);
        let mut w = World::new(&cfg, 1, 0).unwrap();
        assert_eq!(attack_imsi_catcher(&mut w, 1).unwrap(), ImsiOutcome::Captured(b()));

        let mut w = World::new(&cfg, 1, 0).unwrap();
        crate::scenario::honest_session(&mut w, 0).unwrap();
        assert!(w.subscriber(0).unwrap().guti_ue.is_some());
        assert_eq!(attack_imsi_catcher(&mut w, 0).unwrap(), ImsiOutcome::Captured(a()));

        let mut w = World::new(&WorldConfig::new(ProtocolMode::FiveGAka, 1), 1, 0).unwrap();
        assert_eq!(attack_imsi_catcher(&mut w, 0).unwrap(), ImsiOutcome::Inapplicable);
    }

    #[test]
    fn privaka_desync_and_control() {
        let cfg = WorldConfig::new(ProtocolMode::PrivAka, 1);
        let mut w = World::new(&cfg, 4, 0).unwrap();
        let r = attack_privaka_desync(&mut w, 0, true).unwrap();
        assert_eq!(r, DesyncReport { delta: 2, subsequent_runs_fail: true });
        assert!(w.monitor().is_empty());

        let mut w = World::new(&cfg, 4, 0).unwrap();
        let r = attack_privaka_desync(&mut w, 0, false).unwrap();
        assert_eq!(r, DesyncReport { delta: 0, subsequent_runs_fail: false });

        let mut w = World::new(&WorldConfig::new(ProtocolMode::AkaPlus, 1), 4, 0).unwrap();
        assert_eq!(attack_privaka_desync(&mut w, 0, true), Err(DesyncError::Inapplicable));
    }
}
