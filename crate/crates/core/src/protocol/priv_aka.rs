//! Abstract PRIV-AKA model.
//!
//! Only two behaviours are modelled: the HN commits a sequence number
//! increment when the UE's confirmation arrives, and the UE accepts any
//! proposal at most one step away from the HN's committed value as seen
//! from its own counter (`sqn_r - sqn_ue` in `0..=2`).

use crate::crypto::{mask_f, pke_dec, pke_enc, tuple, MacValue, Nonce};
use crate::entropy::Entropy;
use crate::error::HarnessError;
use crate::message::{IdPayload, Message, StartKind, SQN_LEN};
use crate::protocol::{mac, mask_sqn, unmask_sqn, Half, Verdict};
use crate::types::{
    sqn_suc, HnAuth, HnPhase, Identity, NetworkState, PrivSession, SubIndex, SubscriberState, UeAuth,
    UePhase,
};
use crate::world::World;

/// Largest accepted `sqn_r - sqn_ue`.
pub const PRIV_TOLERANCE: u64 = 2;

pub fn priv_ue_identify(st: &mut SubscriberState, e: Nonce) -> Message {
    st.b_auth = UeAuth::Unset;
    st.e_auth = UeAuth::Unset;
    st.phase = UePhase::AwaitVector;
    Message::FiveGId(IdPayload::Concealed(pke_enc(st.id.as_str().as_bytes(), &st.pk_hn, &e)))
}

/// Emits a vector proposing `sqn_hn + 1` without committing it.
pub fn priv_hn_vector(hn: &mut NetworkState, j: usize, m: &Message) -> Result<Message, HarnessError> {
    if hn.session(j)?.phase != HnPhase::Fresh {
        return Err(HarnessError::SessionReused(j));
    }
    let found = match m {
        Message::FiveGId(IdPayload::Concealed(ct)) => pke_dec(ct, &hn.sk_hn)
            .ok()
            .and_then(|pt| String::from_utf8(pt).ok())
            .and_then(|s| Identity::new(s).ok())
            .and_then(|id| hn.find(&id)),
        _ => None,
    };
    let Some(idx) = found else {
        let s = hn.session_mut(j)?;
        s.e_auth = HnAuth::Unknown;
        s.phase = HnPhase::Done;
        return Ok(Message::Error);
    };
    let n = hn.session(j)?.nonce;
    let r = &hn.records[idx];
    let proposed = sqn_suc(r.sqn_hn)?;
    let vector = Message::FiveGAuthVector {
        n,
        masked_sqn: mask_sqn(proposed, &mask_f(&n, &r.k), Half::Low),
        mac: mac(1, &tuple(&[&proposed.to_be_bytes(), n.as_bytes()]), &r.mk),
    };
    let expected = mac(2, &tuple(&[n.as_bytes(), &proposed.to_be_bytes()]), &r.mk);
    let s = hn.session_mut(j)?;
    s.b_auth = Some(idx);
    s.phase = HnPhase::AwaitConfirm;
    s.privs = Some(PrivSession { j, id: idx, pending_increment: true, confirm_mac_expected: expected });
    Ok(vector)
}

pub fn priv_ue_verify(st: &mut SubscriberState, n: Nonce, masked_sqn: &[u8; SQN_LEN], m: &MacValue) -> Message {
    st.b_auth = UeAuth::Nonce(n);
    st.phase = UePhase::Idle;
    let sqn_r = unmask_sqn(masked_sqn, &mask_f(&n, &st.k), Half::Low);
    let b_mac = *m == mac(1, &tuple(&[&sqn_r.to_be_bytes(), n.as_bytes()]), &st.mk);
    let in_window = sqn_r >= st.sqn_ue && sqn_r.0 - st.sqn_ue.0 <= PRIV_TOLERANCE;
    if !(b_mac && in_window) {
        st.e_auth = UeAuth::Fail;
        return Message::Error;
    }
    st.sqn_ue = sqn_r;
    st.e_auth = UeAuth::Nonce(n);
    Message::PrivConfirm(mac(2, &tuple(&[n.as_bytes(), &sqn_r.to_be_bytes()]), &st.mk))
}

/// HN side of the confirmation. A valid confirmation commits the
/// increment and closes the session; anything else changes nothing.
pub fn priv_hn_confirm_step(hn: &mut NetworkState, j: usize, m: &Message) -> Result<(Message, Verdict), HarnessError> {
    let s = hn.session(j)?;
    let (HnPhase::AwaitConfirm, Some(ps), Message::PrivConfirm(mac)) = (s.phase, &s.privs, m) else {
        return Ok((Message::Error, Verdict::Failed));
    };
    if !ps.pending_increment || *mac != ps.confirm_mac_expected {
        return Ok((Message::Error, Verdict::Failed));
    }
    let idx = ps.id;
    hn.records[idx].sqn_hn = sqn_suc(hn.records[idx].sqn_hn)?;
    let s = hn.session_mut(j)?;
    s.e_auth = HnAuth::Id(idx);
    s.phase = HnPhase::Done;
    if let Some(ps) = s.privs.as_mut() {
        ps.pending_increment = false;
    }
    Ok((Message::Ok, Verdict::Success))
}

pub fn ue_begin(st: &mut SubscriberState, entropy: &mut Entropy) -> Result<Message, HarnessError> {
    Ok(priv_ue_identify(st, entropy.nonce()?))
}

pub fn ue_step(st: &mut SubscriberState, m: &Message) -> Message {
    match (st.phase, m) {
        (UePhase::AwaitVector, Message::FiveGAuthVector { n, masked_sqn, mac }) => {
            priv_ue_verify(st, *n, masked_sqn, mac)
        }
        _ => Message::Error,
    }
}

pub fn hn_step(hn: &mut NetworkState, j: usize, m: &Message) -> Result<Message, HarnessError> {
    match (hn.session(j)?.phase, m) {
        (HnPhase::Fresh, Message::FiveGId(_)) => priv_hn_vector(hn, j, m),
        (HnPhase::AwaitConfirm, _) => Ok(priv_hn_confirm_step(hn, j, m)?.0),
        _ => Ok(Message::Error),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PrivRunError {
    #[error("session aborted: the UE rejected the authentication vector")]
    Aborted,
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

/// Runs an honest session of subscriber `idx` up to, not including, the
/// delivery of the UE's confirmation, which is returned to the caller
/// together with the HN session number.
pub fn priv_run_to_confirm(world: &mut World, idx: SubIndex) -> Result<(Message, usize), PrivRunError> {
    let id_msg = world.send_ue(idx, &Message::Start(StartKind::Auto).encode())?;
    let j = world.start_session()?;
    let vector = world.send_hn(j, &id_msg)?;
    let reply = world.send_ue(idx, &vector)?;
    match crate::message::decode_message(&reply) {
        Ok(m @ Message::PrivConfirm(_)) => Ok((m, j)),
        _ => Err(PrivRunError::Aborted),
    }
}

/// Delivers a confirmation to HN session `j`; unknown sessions fail.
pub fn priv_hn_confirm(world: &mut World, j: usize, m: &Message) -> Result<Verdict, HarnessError> {
    if j >= world.network().sessions.len() {
        return Ok(Verdict::Failed);
    }
    let reply = world.send_hn(j, &m.encode())?;
    Ok(if reply == Message::Ok.encode() { Verdict::Success } else { Verdict::Failed })
}
