//! Symbolic action traces: validity, identity renewal, copy accounting.
//!
//! A trace is valid when it interleaves one run per UE identity and one run
//! per HN session of the automata below, and every action of HN session
//! `j >= 1` comes after some action of session `j - 1`.
//!
//! ```text
//! UE:  start -> PUAI(j,0) -> PUAI(j,1) -> PUAI(j,2) -> FUAI(j)
//!      start -> PUAI(j,1)
//!      start -> CUAI(j,0) -> CUAI(j,1) -> FUAI(j)
//!      start -> NS(j)
//! HN:  PNAI(j,0) -> PNAI(j,1) -> FNAI(j)
//!      CNAI(j,0) -> CNAI(j,1) -> FNAI(j)
//! ```
//!
//! A UE may take a `start` edge from its initial state or from any state
//! whose session number is smaller than `j`. Every state is final.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::TraceError;
use crate::types::Identity;

/// A base identity or one of its numbered copies. Copy 0 is the base.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceIdentity {
    pub base: Identity,
    pub copy: u32,
}

impl TraceIdentity {
    pub fn base(id: Identity) -> Self {
        Self { base: id, copy: 0 }
    }

    pub fn fresh(&self) -> Self {
        Self { base: self.base.clone(), copy: self.copy + 1 }
    }
}

impl fmt::Display for TraceIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.copy == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}#{}", self.base, self.copy)
        }
    }
}

impl FromStr for TraceIdentity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, copy) = match s.split_once('#') {
            Some((b, c)) => (b, c.parse::<u32>().map_err(|_| format!("bad copy index in `{s}`"))?),
            None => (s, 0),
        };
        let base = Identity::new(base).map_err(|e| e.to_string())?;
        Ok(Self { base, copy })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionId {
    Ns(TraceIdentity, u32),
    Puai(TraceIdentity, u32, u8),
    Cuai(TraceIdentity, u32, u8),
    Fuai(TraceIdentity, u32),
    Pnai(u32, u8),
    Cnai(u32, u8),
    Fnai(u32),
}

impl ActionId {
    /// The UE identity an action belongs to, if it is a UE action.
    pub fn identity(&self) -> Option<&TraceIdentity> {
        match self {
            ActionId::Ns(id, _) | ActionId::Puai(id, ..) | ActionId::Cuai(id, ..) | ActionId::Fuai(id, _) => {
                Some(id)
            }
            _ => None,
        }
    }

    fn identity_mut(&mut self) -> Option<&mut TraceIdentity> {
        match self {
            ActionId::Ns(id, _) | ActionId::Puai(id, ..) | ActionId::Cuai(id, ..) | ActionId::Fuai(id, _) => {
                Some(id)
            }
            _ => None,
        }
    }

    /// The HN session an action belongs to, if it is an HN action.
    pub fn hn_session(&self) -> Option<u32> {
        match self {
            ActionId::Pnai(j, _) | ActionId::Cnai(j, _) | ActionId::Fnai(j) => Some(*j),
            _ => None,
        }
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionId::Ns(id, j) => write!(f, "NS({id},{j})"),
            ActionId::Puai(id, j, i) => write!(f, "PUAI({id},{j},{i})"),
            ActionId::Cuai(id, j, i) => write!(f, "CUAI({id},{j},{i})"),
            ActionId::Fuai(id, j) => write!(f, "FUAI({id},{j})"),
            ActionId::Pnai(j, i) => write!(f, "PNAI({j},{i})"),
            ActionId::Cnai(j, i) => write!(f, "CNAI({j},{i})"),
            ActionId::Fnai(j) => write!(f, "FNAI({j})"),
        }
    }
}

fn parse_one(name: &str, args: &[&str]) -> Result<ActionId, String> {
    let num = |s: &str| s.parse::<u32>().map_err(|_| format!("bad number `{s}`"));
    let idx = |s: &str, max: u8| match s.parse::<u8>() {
        Ok(i) if i <= max => Ok(i),
        _ => Err(format!("step index `{s}` out of range")),
    };
    let id = |s: &str| s.parse::<TraceIdentity>();
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{name} takes {n} arguments"))
        }
    };
    match name {
        "NS" => arity(2).and_then(|_| Ok(ActionId::Ns(id(args[0])?, num(args[1])?))),
        "PUAI" => arity(3).and_then(|_| Ok(ActionId::Puai(id(args[0])?, num(args[1])?, idx(args[2], 2)?))),
        "CUAI" => arity(3).and_then(|_| Ok(ActionId::Cuai(id(args[0])?, num(args[1])?, idx(args[2], 1)?))),
        "FUAI" => arity(2).and_then(|_| Ok(ActionId::Fuai(id(args[0])?, num(args[1])?))),
        "PNAI" => arity(2).and_then(|_| Ok(ActionId::Pnai(num(args[0])?, idx(args[1], 1)?))),
        "CNAI" => arity(2).and_then(|_| Ok(ActionId::Cnai(num(args[0])?, idx(args[1], 1)?))),
        "FNAI" => arity(1).and_then(|_| Ok(ActionId::Fnai(num(args[0])?))),
        other => Err(format!("unknown action `{other}`")),
    }
}

/// Parses whitespace-separated action literals such as
/// `PNAI(0,0) PUAI(A,0,1) NS(A#1,3)`.
pub fn parse_trace(s: &str) -> Result<Vec<ActionId>, TraceError> {
    let mut out = Vec::new();
    let mut rest = s.trim_start();
    while !rest.is_empty() {
        let index = out.len();
        let err = |msg: String| TraceError::Parse { index, msg };
        let open = rest.find('(').ok_or_else(|| err("missing `(`".into()))?;
        let close = rest.find(')').ok_or_else(|| err("missing `)`".into()))?;
        if close < open {
            return Err(err("unbalanced parentheses".into()));
        }
        let name = rest[..open].trim();
        let args: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
        out.push(parse_one(name, &args).map_err(err)?);
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

impl FromStr for ActionId {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_trace(s)?.as_slice() {
            [a] => Ok(a.clone()),
            _ => Err(TraceError::Parse { index: 0, msg: "expected exactly one action".into() }),
        }
    }
}

pub fn format_trace(t: &[ActionId]) -> String {
    t.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum UeStep {
    P0,
    P1,
    P2,
    C0,
    C1,
    F,
    Ns,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum HnStep {
    P0,
    P1,
    C0,
    C1,
    F,
}

/// Incremental validity checker. Feeding a trace action by action gives the
/// same answer as [`validate_trace`]; once an action is rejected every
/// extension is rejected too.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TraceValidator {
    ue: BTreeMap<TraceIdentity, (u32, UeStep)>,
    hn: BTreeMap<u32, HnStep>,
    failed: bool,
}

impl TraceValidator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    /// Feeds one action; returns whether the trace so far is still valid.
    pub fn push(&mut self, a: &ActionId) -> bool {
        if !self.failed && !self.step(a) {
            self.failed = true;
        }
        !self.failed
    }

    fn step(&mut self, a: &ActionId) -> bool {
        let (id, j, step) = match a {
            ActionId::Ns(id, j) => (id, *j, UeStep::Ns),
            ActionId::Puai(id, j, 0) => (id, *j, UeStep::P0),
            ActionId::Puai(id, j, 1) => (id, *j, UeStep::P1),
            ActionId::Puai(id, j, 2) => (id, *j, UeStep::P2),
            ActionId::Cuai(id, j, 0) => (id, *j, UeStep::C0),
            ActionId::Cuai(id, j, 1) => (id, *j, UeStep::C1),
            ActionId::Fuai(id, j) => (id, *j, UeStep::F),
            ActionId::Pnai(j, i) | ActionId::Cnai(j, i) if *i > 1 => return false,
            ActionId::Pnai(..) | ActionId::Cnai(..) | ActionId::Fnai(_) => return self.hn_step(a),
            _ => return false,
        };
        let prev = self.ue.get(id).copied();
        let fresh = prev.is_none_or(|(pj, _)| pj < j);
        let ok = match step {
            UeStep::P0 | UeStep::C0 | UeStep::Ns => fresh,
            UeStep::P1 => fresh || prev == Some((j, UeStep::P0)),
            UeStep::P2 => prev == Some((j, UeStep::P1)),
            UeStep::C1 => prev == Some((j, UeStep::C0)),
            UeStep::F => prev == Some((j, UeStep::P2)) || prev == Some((j, UeStep::C1)),
        };
        if ok {
            self.ue.insert(id.clone(), (j, step));
        }
        ok
    }

    fn hn_step(&mut self, a: &ActionId) -> bool {
        let (j, step) = match a {
            ActionId::Pnai(j, 0) => (*j, HnStep::P0),
            ActionId::Pnai(j, _) => (*j, HnStep::P1),
            ActionId::Cnai(j, 0) => (*j, HnStep::C0),
            ActionId::Cnai(j, _) => (*j, HnStep::C1),
            ActionId::Fnai(j) => (*j, HnStep::F),
            _ => unreachable!("ue actions handled by caller"),
        };
        if j > 0 && !self.hn.contains_key(&(j - 1)) {
            return false;
        }
        let prev = self.hn.get(&j).copied();
        let ok = match step {
            HnStep::P0 | HnStep::C0 => prev.is_none(),
            HnStep::P1 => prev == Some(HnStep::P0),
            HnStep::C1 => prev == Some(HnStep::C0),
            HnStep::F => matches!(prev, Some(HnStep::P1 | HnStep::C1)),
        };
        if ok {
            self.hn.insert(j, step);
        }
        ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceVerdict {
    pub valid: bool,
    pub first_violation: Option<usize>,
}

pub fn validate_trace(t: &[ActionId]) -> TraceVerdict {
    let mut v = TraceValidator::new();
    for (i, a) in t.iter().enumerate() {
        if !v.push(a) {
            return TraceVerdict { valid: false, first_violation: Some(i) };
        }
    }
    TraceVerdict { valid: true, first_violation: None }
}

/// Renames identities so that every `NS` switches its agent to the next
/// copy, both in the `NS` itself and in everything after it.
///
/// `copies` is the number of copies available besides the base identity;
/// an identity renewed more often than that is an error.
pub fn ufresh(t: &[ActionId], copies: u32) -> Result<Vec<ActionId>, TraceError> {
    let mut out = t.to_vec();
    for i in 0..out.len() {
        let ActionId::Ns(id, _) = &out[i] else { continue };
        let old = id.clone();
        let new = old.fresh();
        if new.copy > copies {
            return Err(TraceError::CopyBudget(old.to_string()));
        }
        for a in &mut out[i..] {
            if let Some(x) = a.identity_mut() {
                if *x == old {
                    *x = new.clone();
                }
            }
        }
    }
    Ok(out)
}

/// The copy of `id` that is current after `t`: copy `l` where `l` counts
/// the `NS` actions of `id` in `t`.
pub fn nu(t: &[ActionId], id: &Identity) -> TraceIdentity {
    let base = TraceIdentity::base(id.clone());
    let l = t.iter().filter(|a| matches!(a, ActionId::Ns(x, _) if *x == base)).count();
    TraceIdentity { base: id.clone(), copy: l as u32 }
}

/// Relabels copies of each base identity in order of first appearance,
/// so that traces equal up to a renaming of copies compare equal.
pub fn canonicalize(t: &[ActionId]) -> Vec<ActionId> {
    let mut map: BTreeMap<TraceIdentity, TraceIdentity> = BTreeMap::new();
    let mut next: BTreeMap<Identity, u32> = BTreeMap::new();
    let mut out = t.to_vec();
    for a in &mut out {
        if let Some(x) = a.identity_mut() {
            let renamed = map.entry(x.clone()).or_insert_with(|| {
                let n = next.entry(x.base.clone()).or_insert(0);
                let r = TraceIdentity { base: x.base.clone(), copy: *n };
                *n += 1;
                r
            });
            *x = renamed.clone();
        }
    }
    out
}
