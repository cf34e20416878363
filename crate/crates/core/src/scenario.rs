//! Honest executions: every message is relayed unmodified, but sessions
//! of different subscribers interleave at random.

use rand::Rng;

use crate::entropy::stream_rng;
use crate::error::HarnessError;
use crate::message::{decode_message, Message, StartKind};
use crate::types::{HnPhase, ProtocolMode, SubIndex, UePhase};
use crate::world::{World, WorldConfig};

/// Messages a single relayed session may take before it is abandoned.
const FLOW_CAP: u32 = 16;

/// One session in flight: the next message and where it goes.
#[derive(Clone, Debug)]
struct Flow {
    idx: SubIndex,
    j: usize,
    pending: Vec<u8>,
    to_hn: bool,
    steps: u32,
}

impl Flow {
    fn begin(world: &mut World, idx: SubIndex) -> Result<Self, HarnessError> {
        let j = world.start_session()?;
        let pending = world.start_ue(idx, StartKind::Auto)?;
        Ok(Self { idx, j, pending, to_hn: true, steps: 0 })
    }

    /// Delivers the pending message. Returns whether the session is over.
    fn advance(&mut self, world: &mut World) -> Result<bool, HarnessError> {
        self.steps += 1;
        if self.to_hn {
            let r = world.send_hn(self.j, &self.pending)?;
            let phase = world.network().session(self.j)?.phase;
            let done = world.mode() == ProtocolMode::PrivAka && phase == HnPhase::Done;
            // An AKA+ GUTI confirmation is answered with `Ok`; the refresh
            // that follows is triggered by the next message to the HN.
            let poke = world.mode().is_aka_plus()
                && phase == HnPhase::AwaitRefresh
                && decode_message(&r) == Ok(Message::Ok);
            self.pending = r;
            self.to_hn = poke;
            Ok(done || self.steps >= FLOW_CAP)
        } else {
            let r = world.send_ue(self.idx, &self.pending)?;
            let idle = world.subscriber(self.idx)?.phase == UePhase::Idle;
            let confirm = matches!(decode_message(&r), Ok(Message::PrivConfirm(_)));
            self.pending = r;
            self.to_hn = true;
            Ok((idle && !confirm) || self.steps >= FLOW_CAP)
        }
    }
}

/// Runs one session of subscriber `idx` to completion and reports whether
/// the HN accepted it.
pub fn honest_session(world: &mut World, idx: SubIndex) -> Result<bool, HarnessError> {
    let mut f = Flow::begin(world, idx)?;
    while !f.advance(world)? {}
    world.result_hn(f.j)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleConfig {
    pub world: WorldConfig,
    /// Sessions started over the whole schedule.
    pub sessions: usize,
    /// Chance, in percent, that an idle subscriber is renewed before a session.
    pub renew_percent: u32,
}

impl ScheduleConfig {
    pub fn new(mode: ProtocolMode, subscribers: usize, sessions: usize) -> Self {
        Self { world: WorldConfig::new(mode, subscribers), sessions, renew_percent: 20 }
    }
}

/// A random interleaving of honest sessions. At most one session per
/// subscriber is in flight; renewals go through the same `NS` path as
/// `DrawUE`, with the unlinking update applied half of the time.
pub fn random_schedule(cfg: &ScheduleConfig, seed: u64) -> Result<World, HarnessError> {
    let mut world = World::new(&cfg.world, seed, 0)?;
    let mut rng = stream_rng(seed, 1 << 32);
    let mut flows: Vec<Flow> = Vec::new();
    let mut started = 0;
    while started < cfg.sessions || !flows.is_empty() {
        let idle: Vec<SubIndex> =
            (0..cfg.world.subscribers).filter(|i| flows.iter().all(|f| f.idx != *i)).collect();
        let open = started < cfg.sessions && !idle.is_empty() && (flows.is_empty() || rng.random_bool(0.3));
        if open {
            let idx = idle[rng.random_range(0..idle.len())];
            if rng.random_ratio(cfg.renew_percent, 100) {
                let unlink = rng.random_bool(0.5);
                world.renew(idx, unlink)?;
            }
            flows.push(Flow::begin(&mut world, idx)?);
            started += 1;
        } else {
            let k = rng.random_range(0..flows.len());
            if flows[k].advance(&mut world)? {
                flows.swap_remove(k);
            }
        }
    }
    Ok(world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traces::validate_trace;

    #[test]
    fn honest_sessions_succeed_in_every_mode() {
        for mode in ProtocolMode::ALL {
            let mut w = World::new(&WorldConfig::new(mode, 2), 6, 0).unwrap();
            for round in 0..4 {
                for idx in 0..2 {
                    assert!(honest_session(&mut w, idx).unwrap(), "{mode} round {round}");
                }
            }
            assert!(w.monitor().is_empty(), "{mode}");
            assert!(validate_trace(&w.action_trace()).valid, "{mode}");
        }
    }

    #[test]
    fn aka_plus_alternates_supi_then_guti() {
        let mut w = World::new(&WorldConfig::new(ProtocolMode::AkaPlus, 1), 6, 0).unwrap();
        honest_session(&mut w, 0).unwrap();
        honest_session(&mut w, 0).unwrap();
        let names: Vec<&str> = w
            .transcript()
            .events()
            .iter()
            .filter(|e| e.direction == crate::transcript::Direction::UeToNet)
            .filter_map(|e| decode_message(&e.bytes).ok())
            .map(|m| m.name())
            .collect();
        assert_eq!(names.first(), Some(&"ChallengeRequest"));
        assert!(names.contains(&"GutiId"));
    }

    #[test]
    fn random_schedules_are_honest_and_valid() {
        for mode in ProtocolMode::ALL {
            for seed in 0..5 {
                let w = random_schedule(&ScheduleConfig::new(mode, 3, 12), seed).unwrap();
                assert_eq!(w.network().sessions.len(), 12);
                for j in 0..12 {
                    assert!(w.result_hn(j).unwrap(), "{mode} seed {seed} session {j}");
                }
                assert!(w.monitor().is_empty());
                assert!(validate_trace(&w.action_trace()).valid, "{mode} seed {seed}");
                assert_eq!(w.dominance().violations, 0);
            }
        }
    }

    #[test]
    fn schedules_are_deterministic() {
        let cfg = ScheduleConfig::new(ProtocolMode::AkaPlus, 3, 10);
        let a = random_schedule(&cfg, 42).unwrap().transcript().to_jsonl();
        let b = random_schedule(&cfg, 42).unwrap().transcript().to_jsonl();
        assert_eq!(a, b);
    }
}
