//! Post-hoc mutual-authentication monitors.

use std::collections::HashMap;

use crate::crypto::Nonce;
use crate::types::{HnAuth, NetworkState, SubIndex};

/// State changes relevant to authentication, logged by the world as they
/// happen. `ue_session` is the UE-side session counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuthEvent {
    /// The UE stored `nonce` as the challenge it is answering.
    UeBegin { id: SubIndex, ue_session: u32, nonce: Nonce },
    /// The UE ended authentication of the network with `nonce`.
    UeAccept { id: SubIndex, ue_session: u32, nonce: Nonce },
    /// HN session `j` recorded `id` as the claimed identity.
    HnBegin { j: usize, id: SubIndex },
    /// HN session `j` authenticated `id`.
    HnAccept { j: usize, id: SubIndex },
}

pub type AuthLog = Vec<AuthEvent>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// HN session `j` ended on `id` without that UE ever answering `n^j`.
    UserNotAuthenticated { j: usize, id: SubIndex },
    /// A UE accepted a challenge no HN session issued for it.
    NetworkNotAuthenticated { id: SubIndex, ue_session: u32 },
    /// Two UE sessions accepted the same challenge.
    NotInjective { nonce: Nonce },
}

/// Checks both authentication directions.
///
/// (a) For every HN session whose final `e_auth` names an identity, the
/// log holds an earlier `UeBegin` of that identity on the session nonce.
/// (b) Every `UeAccept` on a nonce `n` is preceded by an `HnBegin` of a
/// session whose nonce is `n` and whose claimed identity is that UE, and
/// no two UE sessions accept the same nonce.
pub fn monitor_auth(log: &[AuthEvent], hn: &NetworkState) -> Vec<Violation> {
    let mut out = Vec::new();

    for (j, s) in hn.sessions.iter().enumerate() {
        if let HnAuth::Id(id) = s.e_auth {
            let began = log
                .iter()
                .any(|e| matches!(e, AuthEvent::UeBegin { id: i, nonce, .. } if *i == id && *nonce == s.nonce));
            if !began {
                out.push(Violation::UserNotAuthenticated { j, id });
            }
        }
    }

    let mut accepted: HashMap<Nonce, (SubIndex, u32)> = HashMap::new();
    for (pos, e) in log.iter().enumerate() {
        let AuthEvent::UeAccept { id, ue_session, nonce } = e else { continue };
        let matched = log[..pos].iter().any(|b| match b {
            AuthEvent::HnBegin { j, id: i } => {
                i == id && hn.sessions.get(*j).is_some_and(|s| s.nonce == *nonce)
            }
            _ => false,
        });
        if !matched {
            out.push(Violation::NetworkNotAuthenticated { id: *id, ue_session: *ue_session });
        }
        match accepted.get(nonce) {
            Some(prev) if *prev != (*id, *ue_session) => out.push(Violation::NotInjective { nonce: *nonce }),
            Some(_) => {}
            None => {
                accepted.insert(*nonce, (*id, *ue_session));
            }
        }
    }
    out
}
