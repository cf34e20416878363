//! The Dolev-Yao network: every message between UEs and HN sessions passes
//! through the caller, who may relay, drop, store, replay or forge it.

use std::collections::{HashMap, HashSet};

use crate::crypto::{pke_keygen, ConfKey, MacKey};
use crate::entropy::Entropy;
use crate::error::HarnessError;
use crate::message::{decode_message, Message, StartKind};
use crate::monitor::{monitor_auth, AuthEvent, AuthLog, Violation};
use crate::protocol::{aka_plus, fiveg, priv_aka, HnAct, UeAct};
use crate::traces::{ActionId, TraceIdentity};
use crate::transcript::{Direction, Endpoint, Transcript};
use crate::types::{
    HnAuth, HnRecord, HnSession, Identity, NetworkState, ProtocolMode, Sqn, SubIndex, SubscriberState,
    UeAuth, UePhase,
};

pub const DEFAULT_WINDOW_C: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldConfig {
    pub mode: ProtocolMode,
    pub subscribers: usize,
    /// Width of the 5G sequence number window.
    pub window_c: u64,
}

impl WorldConfig {
    pub fn new(mode: ProtocolMode, subscribers: usize) -> Self {
        Self { mode, subscribers, window_c: DEFAULT_WINDOW_C }
    }
}

/// Counts of `sqn_hn <= sqn_ue` checks, taken after every step of an AKA+
/// world.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Dominance {
    pub steps: u64,
    pub violations: u64,
}

impl std::ops::AddAssign for Dominance {
    fn add_assign(&mut self, rhs: Self) {
        self.steps += rhs.steps;
        self.violations += rhs.violations;
    }
}

#[derive(Clone, Debug)]
pub struct World {
    mode: ProtocolMode,
    window_c: u64,
    subs: Vec<SubscriberState>,
    hn: NetworkState,
    entropy: Entropy,
    transcript: Transcript,
    auth_log: AuthLog,
    /// Current symbolic session number of each UE.
    ue_session: Vec<u32>,
    next_ue_session: u32,
    /// Everything honest parties have sent, to tell relays from injections.
    emitted_by_ue: HashSet<Vec<u8>>,
    emitted_by_hn: HashSet<Vec<u8>>,
    /// HN sessions are numbered in traces by the order of their first action.
    hn_symbolic: HashMap<usize, u32>,
    dominance: Dominance,
}

impl World {
    pub fn new(cfg: &WorldConfig, seed: u64, stream: u64) -> Result<Self, HarnessError> {
        if cfg.subscribers == 0 {
            return Err(HarnessError::Config("at least one subscriber is required".into()));
        }
        let mut entropy = Entropy::new(seed, stream);
        let kp = pke_keygen(entropy.rng());
        let pk = kp.pk;
        let (sqn_ue, sqn_hn) = if cfg.mode.is_five_g() { (Sqn(0), Sqn(1)) } else { (Sqn(0), Sqn(0)) };
        let mut subs = Vec::with_capacity(cfg.subscribers);
        let mut records = Vec::with_capacity(cfg.subscribers);
        for i in 0..cfg.subscribers {
            let id = Identity::nth(i);
            let k = ConfKey::random(entropy.rng());
            let mk = MacKey::random(entropy.rng());
            let mut st = SubscriberState::new(id.clone(), k, mk, pk);
            st.sqn_ue = sqn_ue;
            subs.push(st);
            records.push(HnRecord { id, k, mk, sqn_hn, guti_hn: None, s_auth: None });
        }
        let dummy = HnRecord {
            id: Identity::new("dummy").expect("valid literal"),
            k: ConfKey::random(entropy.rng()),
            mk: MacKey::random(entropy.rng()),
            sqn_hn: Sqn(0),
            guti_hn: None,
            s_auth: None,
        };
        let hn = NetworkState { sk_hn: kp.sk, records, dummy, sessions: Vec::new(), next_epoch: 0 };
        Ok(Self {
            mode: cfg.mode,
            window_c: cfg.window_c,
            ue_session: vec![0; subs.len()],
            subs,
            hn,
            entropy,
            transcript: Transcript::new(),
            auth_log: AuthLog::new(),
            next_ue_session: 0,
            emitted_by_ue: HashSet::new(),
            emitted_by_hn: HashSet::new(),
            hn_symbolic: HashMap::new(),
            dominance: Dominance::default(),
        })
    }

    pub fn mode(&self) -> ProtocolMode {
        self.mode
    }

    pub fn subscriber(&self, idx: SubIndex) -> Result<&SubscriberState, HarnessError> {
        self.subs.get(idx).ok_or_else(|| HarnessError::UnknownSubscriber(idx.to_string()))
    }

    pub fn subscribers(&self) -> &[SubscriberState] {
        &self.subs
    }

    pub fn index_of(&self, id: &Identity) -> Option<SubIndex> {
        self.subs.iter().position(|s| &s.id == id)
    }

    pub fn network(&self) -> &NetworkState {
        &self.hn
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn auth_log(&self) -> &AuthLog {
        &self.auth_log
    }

    pub fn action_trace(&self) -> Vec<ActionId> {
        self.transcript.actions()
    }

    pub fn monitor(&self) -> Vec<Violation> {
        monitor_auth(&self.auth_log, &self.hn)
    }

    pub fn dominance(&self) -> Dominance {
        self.dominance
    }

    /// Overrides both sequence numbers of a subscriber.
    pub fn set_sqn(&mut self, idx: SubIndex, ue: Sqn, hn: Sqn) -> Result<(), HarnessError> {
        self.subscriber(idx)?;
        self.subs[idx].sqn_ue = ue;
        self.hn.records[idx].sqn_hn = hn;
        Ok(())
    }

    /// Opens HN session `j = sessions.len()` with a fresh challenge and a
    /// fresh temporary identity to hand out.
    pub fn start_session(&mut self) -> Result<usize, HarnessError> {
        let nonce = self.entropy.nonce()?;
        let guti = self.entropy.guti_value()?;
        self.hn.sessions.push(HnSession::new(nonce, guti));
        Ok(self.hn.sessions.len() - 1)
    }

    /// Replaces the UE behind a handler with a fresh agent: logs the `NS`
    /// action, closes whatever session the UE had pending and, if
    /// `unlink` is set, invalidates its temporary identity.
    pub fn renew(&mut self, idx: SubIndex, unlink: bool) -> Result<(), HarnessError> {
        self.subscriber(idx)?;
        let j = self.bump_ue_session(idx);
        let st = &mut self.subs[idx];
        st.phase = UePhase::Idle;
        if unlink {
            st.success_ue = false;
        }
        let action = ActionId::Ns(TraceIdentity::base(st.id.clone()), j);
        self.transcript.push(Direction::Draw, Endpoint::Ue(st.id.clone()), Vec::new(), Some(action));
        Ok(())
    }

    /// Records that the adversary withheld `bytes` on their way out of
    /// `from`.
    pub fn mark_dropped(&mut self, from: Endpoint, bytes: &[u8]) {
        self.transcript.push(Direction::Dropped, from, bytes.to_vec(), None);
    }

    fn bump_ue_session(&mut self, idx: SubIndex) -> u32 {
        let j = self.next_ue_session;
        self.next_ue_session += 1;
        self.ue_session[idx] = j;
        j
    }

    /// Delivers `bytes` to subscriber `idx` and returns its reply.
    pub fn send_ue(&mut self, idx: SubIndex, bytes: &[u8]) -> Result<Vec<u8>, HarnessError> {
        self.subscriber(idx)?;
        let id = self.subs[idx].id.clone();
        let dir = if self.emitted_by_hn.contains(bytes) { Direction::NetToUe } else { Direction::Injected };
        self.transcript.push(dir, Endpoint::Ue(id.clone()), bytes.to_vec(), None);

        let (b0, e0) = (self.subs[idx].b_auth, self.subs[idx].e_auth);
        let (reply, act) = match decode_message(bytes) {
            Ok(m) => self.ue_dispatch(idx, &m)?,
            Err(_) => (Message::Error, None),
        };
        let action = act.map(|a| {
            let (tid, j) = (TraceIdentity::base(id.clone()), self.ue_session[idx]);
            match a {
                UeAct::Puai(i) => ActionId::Puai(tid, j, i),
                UeAct::Cuai(i) => ActionId::Cuai(tid, j, i),
                UeAct::Fuai => ActionId::Fuai(tid, j),
            }
        });

        let (b1, e1) = (self.subs[idx].b_auth, self.subs[idx].e_auth);
        let ue_session = self.ue_session[idx];
        if let UeAuth::Nonce(nonce) = b1 {
            if b1 != b0 {
                self.auth_log.push(AuthEvent::UeBegin { id: idx, ue_session, nonce });
            }
        }
        if let UeAuth::Nonce(nonce) = e1 {
            if e1 != e0 {
                self.auth_log.push(AuthEvent::UeAccept { id: idx, ue_session, nonce });
            }
        }

        let out = reply.encode();
        self.emitted_by_ue.insert(out.clone());
        self.transcript.push(Direction::UeToNet, Endpoint::Ue(id), out.clone(), action);
        self.check_dominance();
        Ok(out)
    }

    fn ue_dispatch(&mut self, idx: SubIndex, m: &Message) -> Result<(Message, Option<UeAct>), HarnessError> {
        let mode = self.mode;
        if let Message::Start(kind) = m {
            self.bump_ue_session(idx);
            let st = &mut self.subs[idx];
            return Ok(match mode {
                ProtocolMode::AkaPlus | ProtocolMode::AkaPlusMinus => {
                    let (msg, act) = aka_plus::ue_begin(st, *kind);
                    (msg, Some(act))
                }
                ProtocolMode::PrivAka => (priv_aka::ue_begin(st, &mut self.entropy)?, None),
                _ => (fiveg::ue_begin(st, mode, &mut self.entropy)?, None),
            });
        }
        let st = &mut self.subs[idx];
        Ok(match mode {
            ProtocolMode::AkaPlus | ProtocolMode::AkaPlusMinus => aka_plus::ue_step(st, m, mode, &mut self.entropy)?,
            ProtocolMode::PrivAka => (priv_aka::ue_step(st, m), None),
            _ => (fiveg::ue_step(st, m, mode, self.window_c), None),
        })
    }

    /// Delivers `bytes` to HN session `j` and returns its reply.
    pub fn send_hn(&mut self, j: usize, bytes: &[u8]) -> Result<Vec<u8>, HarnessError> {
        let (b0, e0) = {
            let s = self.hn.session(j)?;
            (s.b_auth, s.e_auth)
        };
        let dir = if self.emitted_by_ue.contains(bytes) { Direction::UeToNet } else { Direction::Injected };
        self.transcript.push(dir, Endpoint::Hn(j), bytes.to_vec(), None);

        let mode = self.mode;
        let (reply, act) = match decode_message(bytes) {
            Err(_) | Ok(Message::Start(_)) => (Message::Error, None),
            Ok(m) => match mode {
                ProtocolMode::AkaPlus | ProtocolMode::AkaPlusMinus => aka_plus::hn_step(&mut self.hn, j, &m, mode)?,
                ProtocolMode::PrivAka => (priv_aka::hn_step(&mut self.hn, j, &m)?, None),
                _ => (fiveg::hn_step(&mut self.hn, j, &m, mode)?, None),
            },
        };
        let action = act.map(|a| {
            let next = self.hn_symbolic.len() as u32;
            let sj = *self.hn_symbolic.entry(j).or_insert(next);
            match a {
                HnAct::Pnai(i) => ActionId::Pnai(sj, i),
                HnAct::Cnai(i) => ActionId::Cnai(sj, i),
                HnAct::Fnai => ActionId::Fnai(sj),
            }
        });

        let s = self.hn.session(j)?;
        if let (None, Some(id)) = (b0, s.b_auth) {
            self.auth_log.push(AuthEvent::HnBegin { j, id });
        }
        if let HnAuth::Id(id) = s.e_auth {
            if e0 != s.e_auth {
                self.auth_log.push(AuthEvent::HnAccept { j, id });
            }
        }

        let out = reply.encode();
        self.emitted_by_hn.insert(out.clone());
        self.transcript.push(Direction::NetToUe, Endpoint::Hn(j), out.clone(), action);
        self.check_dominance();
        Ok(out)
    }

    /// Asks subscriber `idx` to open a session of the given kind.
    pub fn start_ue(&mut self, idx: SubIndex, kind: StartKind) -> Result<Vec<u8>, HarnessError> {
        self.send_ue(idx, &Message::Start(kind).encode())
    }

    /// Whether HN session `j` ended authenticating a real identity.
    pub fn result_hn(&self, j: usize) -> Result<bool, HarnessError> {
        Ok(matches!(self.hn.session(j)?.e_auth, HnAuth::Id(_)))
    }

    /// Whether subscriber `idx` currently holds a successful authentication.
    pub fn result_ue(&self, idx: SubIndex) -> Result<bool, HarnessError> {
        Ok(matches!(self.subscriber(idx)?.e_auth, UeAuth::Nonce(_)))
    }

    fn check_dominance(&mut self) {
        if self.mode != ProtocolMode::AkaPlus {
            return;
        }
        self.dominance.steps += 1;
        let bad = self.subs.iter().zip(&self.hn.records).any(|(s, r)| r.sqn_hn > s.sqn_ue);
        if bad {
            self.dominance.violations += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traces::validate_trace;

    fn world(mode: ProtocolMode, n: usize) -> World {
        World::new(&WorldConfig::new(mode, n), 11, 0).unwrap()
    }

    fn decode(b: &[u8]) -> Message {
        decode_message(b).unwrap()
    }

    #[test]
    fn honest_aka_plus_supi_then_guti() {
        let mut w = world(ProtocolMode::AkaPlus, 2);
        let j = w.start_session().unwrap();
        let m = w.start_ue(0, StartKind::Auto).unwrap();
        assert_eq!(decode(&m), Message::ChallengeRequest);
        let m = w.send_hn(j, &m).unwrap();
        let m = w.send_ue(0, &m).unwrap();
        let m = w.send_hn(j, &m).unwrap();
        assert!(matches!(decode(&m), Message::SupiConfirm(_)));
        let m = w.send_ue(0, &m).unwrap();
        assert_eq!(decode(&m), Message::Ok);
        let m = w.send_hn(j, &m).unwrap();
        let m = w.send_ue(0, &m).unwrap();
        assert_eq!(decode(&m), Message::Ok);
        assert!(w.result_hn(j).unwrap() && w.result_ue(0).unwrap());
        assert!(w.subscriber(0).unwrap().success_ue);

        let j = w.start_session().unwrap();
        let m = w.start_ue(0, StartKind::Auto).unwrap();
        assert!(matches!(decode(&m), Message::GutiId(_)));
        let m = w.send_hn(j, &m).unwrap();
        let m = w.send_ue(0, &m).unwrap();
        assert!(matches!(decode(&m), Message::GutiConfirm(_)));
        let m = w.send_hn(j, &m).unwrap();
        assert_eq!(decode(&m), Message::Ok);
        let m = w.send_hn(j, &m).unwrap();
        let m = w.send_ue(0, &m).unwrap();
        assert_eq!(decode(&m), Message::Ok);
        assert!(w.result_hn(j).unwrap());
        assert_eq!(w.subscriber(0).unwrap().sqn_ue, Sqn(2));
        assert_eq!(w.network().records[0].sqn_hn, Sqn(2));

        assert!(validate_trace(&w.action_trace()).valid, "{:?}", w.action_trace());
        assert!(w.monitor().is_empty());
        assert_eq!(w.dominance().violations, 0);
        assert!(w.dominance().steps > 0);
    }

    #[test]
    fn honest_five_g_with_guti_assignment() {
        for mode in [ProtocolMode::FiveGAka, ProtocolMode::FiveGAkaLegacyPlainImsi] {
            let mut w = world(mode, 1);
            for round in 0..3 {
                let j = w.start_session().unwrap();
                let m = w.start_ue(0, StartKind::Auto).unwrap();
                if round > 0 {
                    assert!(matches!(decode(&m), Message::FiveGId(_) | Message::Tmsi(_)));
                }
                let m = w.send_hn(j, &m).unwrap();
                let m = w.send_ue(0, &m).unwrap();
                assert!(matches!(decode(&m), Message::FiveGRes(_)), "{mode} round {round}");
                let m = w.send_hn(j, &m).unwrap();
                let m = w.send_ue(0, &m).unwrap();
                assert_eq!(decode(&m), Message::Ok);
                assert!(w.result_hn(j).unwrap());
            }
            assert!(w.monitor().is_empty());
        }
    }

    #[test]
    fn five_g_resync_after_desync() {
        let mut w = world(ProtocolMode::FiveGAka, 1);
        w.set_sqn(0, Sqn(100), Sqn(3)).unwrap();
        let j = w.start_session().unwrap();
        let m = w.start_ue(0, StartKind::Auto).unwrap();
        let m = w.send_hn(j, &m).unwrap();
        let m = w.send_ue(0, &m).unwrap();
        assert!(matches!(decode(&m), Message::ResyncRequest { .. }));
        w.send_hn(j, &m).unwrap();
        assert_eq!(w.network().records[0].sqn_hn, Sqn(101));
        let j = w.start_session().unwrap();
        let m = w.start_ue(0, StartKind::Auto).unwrap();
        let m = w.send_hn(j, &m).unwrap();
        let m = w.send_ue(0, &m).unwrap();
        assert!(matches!(decode(&m), Message::FiveGRes(_)));
    }

    #[test]
    fn five_g_wrong_key_gives_auth_failure() {
        let mut w = world(ProtocolMode::FiveGAka, 2);
        let j = w.start_session().unwrap();
        let m = w.start_ue(0, StartKind::Auto).unwrap();
        let v = w.send_hn(j, &m).unwrap();
        w.start_ue(1, StartKind::Auto).unwrap();
        let r = w.send_ue(1, &v).unwrap();
        assert_eq!(decode(&r), Message::AuthFailure);
    }

    #[test]
    fn priv_aka_honest_and_tolerance() {
        let mut w = world(ProtocolMode::PrivAka, 1);
        for _ in 0..3 {
            let (c, j) = priv_aka::priv_run_to_confirm(&mut w, 0).unwrap();
            assert_eq!(priv_aka::priv_hn_confirm(&mut w, j, &c).unwrap(), crate::protocol::Verdict::Success);
        }
        assert_eq!(w.subscriber(0).unwrap().sqn_ue, Sqn(3));
        assert_eq!(w.network().records[0].sqn_hn, Sqn(3));
        assert_eq!(
            priv_aka::priv_hn_confirm(&mut w, 99, &Message::Ok).unwrap(),
            crate::protocol::Verdict::Failed
        );
        w.set_sqn(0, Sqn(0), Sqn(2)).unwrap();
        assert_eq!(priv_aka::priv_run_to_confirm(&mut w, 0), Err(priv_aka::PrivRunError::Aborted));
        assert!(w.monitor().is_empty());
    }

    #[test]
    fn garbage_is_answered_with_error_without_state_change() {
        let mut w = world(ProtocolMode::AkaPlus, 1);
        w.start_ue(0, StartKind::Supi).unwrap();
        let before = w.subscriber(0).unwrap().clone();
        let r = w.send_ue(0, &[0xff, 0x00, 0x01]).unwrap();
        assert_eq!(decode(&r), Message::Error);
        assert_eq!(w.subscriber(0).unwrap(), &before);
        let ev = &w.transcript().events()[w.transcript().len() - 2];
        assert_eq!(ev.direction, Direction::Injected);
    }

    #[test]
    fn relayed_messages_are_logged_as_relays() {
        let mut w = world(ProtocolMode::AkaPlus, 1);
        let j = w.start_session().unwrap();
        let m = w.start_ue(0, StartKind::Supi).unwrap();
        w.send_hn(j, &m).unwrap();
        let ev = &w.transcript().events()[2];
        assert_eq!((ev.direction, &ev.endpoint), (Direction::UeToNet, &Endpoint::Hn(j)));
    }

    #[test]
    fn renew_logs_ns_and_unlinks() {
        let mut w = world(ProtocolMode::AkaPlus, 1);
        w.subs[0].success_ue = true;
        w.renew(0, true).unwrap();
        assert!(!w.subscriber(0).unwrap().success_ue);
        let t = w.action_trace();
        assert_eq!(t.len(), 1);
        assert!(matches!(t[0], ActionId::Ns(_, 0)));
    }

    #[test]
    fn hn_sessions_are_renumbered_by_first_action() {
        let mut w = world(ProtocolMode::AkaPlus, 1);
        let _j0 = w.start_session().unwrap();
        let j1 = w.start_session().unwrap();
        let m = w.start_ue(0, StartKind::Supi).unwrap();
        w.send_hn(j1, &m).unwrap();
        assert!(matches!(w.action_trace()[1], ActionId::Pnai(0, 0)));
        assert!(validate_trace(&w.action_trace()).valid);
    }

    #[test]
    fn zero_subscribers_rejected() {
        assert!(World::new(&WorldConfig::new(ProtocolMode::AkaPlus, 0), 1, 0).is_err());
    }

    #[test]
    fn same_seed_same_transcript() {
        let run = || {
            let mut w = world(ProtocolMode::AkaPlus, 1);
            let j = w.start_session().unwrap();
            let m = w.start_ue(0, StartKind::Auto).unwrap();
            let m = w.send_hn(j, &m).unwrap();
            w.send_ue(0, &m).unwrap();
            w.transcript().to_jsonl()
        };
        assert_eq!(run(), run());
    }
}
