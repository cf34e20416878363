//! Append-only log of adversary-visible events and its JSONL form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TraceError;
use crate::traces::ActionId;
use crate::types::Identity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "ue->net")]
    UeToNet,
    #[serde(rename = "net->ue")]
    NetToUe,
    #[serde(rename = "injected")]
    Injected,
    #[serde(rename = "dropped")]
    Dropped,
    /// A `DrawUE` call; carries no bytes.
    #[serde(rename = "draw")]
    Draw,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Ue(Identity),
    Hn(usize),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Ue(id) => write!(f, "ue:{id}"),
            Endpoint::Hn(j) => write!(f, "hn:{j}"),
        }
    }
}

impl std::str::FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(id) = s.strip_prefix("ue:") {
            Identity::new(id).map(Endpoint::Ue).map_err(|e| e.to_string())
        } else if let Some(j) = s.strip_prefix("hn:") {
            j.parse().map(Endpoint::Hn).map_err(|_| format!("bad session `{j}`"))
        } else {
            Err(format!("bad endpoint `{s}`"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub index: usize,
    pub direction: Direction,
    pub endpoint: Endpoint,
    pub bytes: Vec<u8>,
    pub action: Option<ActionId>,
}

#[derive(Serialize, Deserialize)]
struct Line {
    i: usize,
    dir: Direction,
    endpoint: String,
    hex: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    action: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        direction: Direction,
        endpoint: Endpoint,
        bytes: Vec<u8>,
        action: Option<ActionId>,
    ) -> usize {
        let index = self.events.len();
        self.events.push(Event { index, direction, endpoint, bytes, action });
        index
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The action identifiers attached to events, in order.
    pub fn actions(&self) -> Vec<ActionId> {
        self.events.iter().filter_map(|e| e.action.clone()).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let line = Line {
                i: e.index,
                dir: e.direction,
                endpoint: e.endpoint.to_string(),
                hex: hex::encode(&e.bytes),
                action: e.action.as_ref().map(ToString::to_string),
            };
            out.push_str(&serde_json::to_string(&line).expect("plain struct serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(s: &str) -> Result<Self, TraceError> {
        let mut t = Transcript::new();
        for (n, raw) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let err = |msg: String| TraceError::Transcript { line: n + 1, msg };
            let line: Line = serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
            if line.i != t.len() {
                return Err(err(format!("index {} out of order", line.i)));
            }
            let endpoint = line.endpoint.parse().map_err(err)?;
            let bytes = hex::decode(&line.hex).map_err(|e| err(e.to_string()))?;
            let action = match line.action {
                Some(a) => Some(a.parse().map_err(|e: TraceError| err(e.to_string()))?),
                None => None,
            };
            t.push(line.dir, endpoint, bytes, action);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traces::TraceIdentity;

    #[test]
    fn indices_are_dense() {
        let mut t = Transcript::new();
        assert_eq!(t.push(Direction::UeToNet, Endpoint::Hn(0), vec![1], None), 0);
        assert_eq!(t.push(Direction::NetToUe, Endpoint::Hn(0), vec![2], None), 1);
        assert!(t.events().iter().enumerate().all(|(i, e)| e.index == i));
    }

    #[test]
    fn jsonl_round_trip() {
        let a = Identity::new("A").unwrap();
        let mut t = Transcript::new();
        t.push(Direction::Draw, Endpoint::Ue(a.clone()), vec![], Some(ActionId::Ns(TraceIdentity::base(a.clone()), 0)));
        t.push(Direction::UeToNet, Endpoint::Ue(a), vec![0x01], None);
        t.push(Direction::Injected, Endpoint::Hn(3), vec![0xde, 0xad], None);
        let text = t.to_jsonl();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().starts_with(r#"{"i":1,"dir":"ue->net","endpoint":"ue:A","hex":"01"}"#));
        assert_eq!(Transcript::from_jsonl(&text).unwrap(), t);
    }

    #[test]
    fn jsonl_rejects_gaps() {
        let text = r#"{"i":1,"dir":"dropped","endpoint":"hn:0","hex":""}"#;
        assert!(Transcript::from_jsonl(text).is_err());
    }
}
