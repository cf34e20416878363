//! Test-side oracles and generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use akalab::crypto::{Ciphertext, MacValue, Nonce, BLOCK};
use akalab::message::{IdPayload, Message, StartKind, SQN_LEN};
use akalab::traces::{ActionId, TraceIdentity, TraceValidator};
use akalab::types::{GutiValue, Identity};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Kinds of UE-automaton states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum U {
    P0,
    P1,
    P2,
    C0,
    C1,
    F,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum H {
    P0,
    P1,
    C0,
    C1,
    F,
}

/// States a UE may enter from its initial state or from any state of an
/// earlier session.
const U_ENTRY: [U; 4] = [U::P0, U::P1, U::C0, U::N];
/// Edges inside one UE session.
const U_EDGES: [(U, U); 5] = [(U::P0, U::P1), (U::P1, U::P2), (U::P2, U::F), (U::C0, U::C1), (U::C1, U::F)];
const H_ENTRY: [H; 2] = [H::P0, H::C0];
const H_EDGES: [(H, H); 4] = [(H::P0, H::P1), (H::P1, H::F), (H::C0, H::C1), (H::C1, H::F)];

/// Explicit product of one UE automaton per identity and one HN automaton
/// per session, plus the session-ordering side condition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Product {
    ue: BTreeMap<TraceIdentity, (u32, U)>,
    hn: BTreeMap<u32, H>,
    dead: bool,
}

fn classify(a: &ActionId) -> Result<(TraceIdentity, u32, U), (u32, H)> {
    match a {
        ActionId::Ns(id, j) => Ok((id.clone(), *j, U::N)),
        ActionId::Puai(id, j, i) => Ok((id.clone(), *j, [U::P0, U::P1, U::P2][*i as usize])),
        ActionId::Cuai(id, j, i) => Ok((id.clone(), *j, [U::C0, U::C1][*i as usize])),
        ActionId::Fuai(id, j) => Ok((id.clone(), *j, U::F)),
        ActionId::Pnai(j, i) => Err((*j, [H::P0, H::P1][*i as usize])),
        ActionId::Cnai(j, i) => Err((*j, [H::C0, H::C1][*i as usize])),
        ActionId::Fnai(j) => Err((*j, H::F)),
    }
}

impl Product {
    pub fn step(&mut self, a: &ActionId) -> bool {
        if self.dead {
            return false;
        }
        let ok = match classify(a) {
            Ok((id, j, u)) => {
                let ok = match self.ue.get(&id) {
                    None => U_ENTRY.contains(&u),
                    Some(&(pj, pu)) => (pj < j && U_ENTRY.contains(&u)) || (pj == j && U_EDGES.contains(&(pu, u))),
                };
                if ok {
                    self.ue.insert(id, (j, u));
                }
                ok
            }
            Err((j, h)) => {
                let ordered = j == 0 || self.hn.contains_key(&(j - 1));
                let ok = ordered
                    && match self.hn.get(&j) {
                        None => H_ENTRY.contains(&h),
                        Some(&ph) => H_EDGES.contains(&(ph, h)),
                    };
                if ok {
                    self.hn.insert(j, h);
                }
                ok
            }
        };
        self.dead = !ok;
        ok
    }

    pub fn accepts(t: &[ActionId]) -> bool {
        let mut p = Product::default();
        t.iter().all(|a| p.step(a))
    }
}

pub fn ident(s: &str) -> TraceIdentity {
    TraceIdentity::base(Identity::new(s).unwrap())
}

/// Every action over the given identities and session numbers.
pub fn alphabet(ids: &[TraceIdentity], sessions: u32) -> Vec<ActionId> {
    let mut out = Vec::new();
    for j in 0..sessions {
        for id in ids {
            out.push(ActionId::Ns(id.clone(), j));
            for i in 0..3 {
                out.push(ActionId::Puai(id.clone(), j, i));
            }
            for i in 0..2 {
                out.push(ActionId::Cuai(id.clone(), j, i));
            }
            out.push(ActionId::Fuai(id.clone(), j));
        }
        for i in 0..2 {
            out.push(ActionId::Pnai(j, i));
            out.push(ActionId::Cnai(j, i));
        }
        out.push(ActionId::Fnai(j));
    }
    out
}

#[derive(Debug, Default)]
pub struct Exploration {
    /// Number of valid traces of each length.
    pub valid_by_len: Vec<u64>,
    /// First disagreement found, if any.
    pub mismatch: Option<Vec<ActionId>>,
    pub pair_states: usize,
}

/// Walks all traces up to `depth` over `letters`, running the library
/// checker and the product oracle side by side. Traces reaching the same
/// pair of states are merged, so every trace is covered while only
/// distinct pairs are expanded.
pub fn explore(letters: &[ActionId], depth: usize) -> Exploration {
    let mut level: HashMap<(TraceValidator, Product), (u64, Vec<ActionId>)> = HashMap::new();
    level.insert((TraceValidator::new(), Product::default()), (1, Vec::new()));
    let mut out = Exploration { valid_by_len: vec![1], ..Default::default() };
    for _ in 0..depth {
        let mut next: HashMap<(TraceValidator, Product), (u64, Vec<ActionId>)> = HashMap::new();
        for ((c, p), (count, witness)) in &level {
            for a in letters {
                let (mut c2, mut p2) = (c.clone(), p.clone());
                let (vc, vp) = (c2.push(a), p2.step(a));
                if vc != vp {
                    let mut w = witness.clone();
                    w.push(a.clone());
                    out.mismatch.get_or_insert(w);
                    continue;
                }
                if vc {
                    let e = next.entry((c2, p2)).or_insert_with(|| {
                        let mut w = witness.clone();
                        w.push(a.clone());
                        (0, w)
                    });
                    e.0 += count;
                }
            }
        }
        out.pair_states += next.len();
        out.valid_by_len.push(next.values().map(|v| v.0).sum());
        level = next;
    }
    out
}

/// A random valid trace: at each step one of the letters the oracle
/// accepts is picked uniformly.
pub fn random_valid_trace<R: Rng>(rng: &mut R, letters: &[ActionId], len: usize) -> Vec<ActionId> {
    let mut p = Product::default();
    let mut t = Vec::new();
    for _ in 0..len {
        let ok: Vec<&ActionId> = letters.iter().filter(|a| p.clone().step(a)).collect();
        let Some(a) = ok.choose(rng) else { break };
        p.step(a);
        t.push((*a).clone());
    }
    t
}

fn block<R: Rng>(rng: &mut R) -> [u8; BLOCK] {
    let mut b = [0u8; BLOCK];
    rng.fill(&mut b);
    b
}

fn sqn<R: Rng>(rng: &mut R) -> [u8; SQN_LEN] {
    let mut b = [0u8; SQN_LEN];
    rng.fill(&mut b);
    b
}

fn ct<R: Rng>(rng: &mut R) -> Ciphertext {
    let len = rng.random_range(0..80);
    let body = (0..len).map(|_| rng.random()).collect();
    Ciphertext { r: Nonce::from_bytes(block(rng)), body, tag: block(rng) }
}

/// A uniformly chosen message variant with random contents.
pub fn random_message<R: Rng>(rng: &mut R) -> Message {
    let mac = |rng: &mut R| MacValue::from_bytes(block(rng));
    let nonce = |rng: &mut R| Nonce::from_bytes(block(rng));
    match rng.random_range(0..21) {
        0 => Message::ChallengeRequest,
        1 => Message::HnNonce(nonce(rng)),
        2 => Message::SupiResponse { ct: ct(rng), mac: mac(rng) },
        3 => Message::SupiConfirm(mac(rng)),
        4 => Message::GutiId(GutiValue(block(rng))),
        5 => Message::NoSuci,
        6 => Message::GutiAuthVector { n: nonce(rng), masked_sqn: sqn(rng), mac: mac(rng) },
        7 => Message::GutiConfirm(mac(rng)),
        8 => Message::RefreshAssign { masked_guti: block(rng), mac: mac(rng) },
        9 => Message::Ok,
        10 => Message::Error,
        11 => Message::AuthFailure,
        12 => Message::ResyncRequest { masked_sqn: sqn(rng), mac: mac(rng) },
        13 => {
            let len = rng.random_range(1..=32);
            let s: String = (0..len)
                .map(|_| *b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-.".choose(rng).unwrap() as char)
                .collect();
            Message::PlainImsi(Identity::new(s).unwrap())
        }
        14 => Message::Tmsi(GutiValue(block(rng))),
        15 => Message::PermanentIdRequest,
        16 if rng.random() => Message::FiveGId(IdPayload::Concealed(ct(rng))),
        16 => Message::FiveGId(IdPayload::Guti(GutiValue(block(rng)))),
        17 => Message::FiveGAuthVector { n: nonce(rng), masked_sqn: sqn(rng), mac: mac(rng) },
        18 => Message::FiveGRes(mac(rng)),
        19 => Message::PrivConfirm(mac(rng)),
        _ => Message::Start(*[StartKind::Auto, StartKind::Supi, StartKind::Guti].choose(rng).unwrap()),
    }
}
