//! AKA+: the SUPI, GUTI and Refresh sub-protocols.
//!
//! MAC inputs are built with [`tuple`]. Tag assignment:
//! `Mac1(<enc, n>)`, `Mac2(<n, sqn+1>)`, `Mac3(<n, sqn, guti>)`,
//! `Mac4(n)`, `Mac5(<guti, n>)`. Sequence numbers are masked with the low
//! half of `f(n, k)`; temporary identities with `f^r(n, k)`.

use crate::crypto::{pke_dec, pke_enc, tuple, untuple, Ciphertext, MacValue, Nonce, BLOCK};
use crate::entropy::Entropy;
use crate::error::HarnessError;
use crate::message::{Message, StartKind, SQN_LEN};
use crate::protocol::{mac, mask_guti, mask_sqn, unmask_sqn, Half, HnAct, UeAct};
use crate::types::{
    range_check, sqn_suc, Guti, GutiValue, HnAuth, HnPhase, NetworkState, ProtocolMode, Sqn,
    SubscriberState, UeAuth, UePhase,
};

fn supi_plaintext(st: &SubscriberState) -> Vec<u8> {
    tuple(&[st.id.as_str().as_bytes(), &st.sqn_ue.to_be_bytes()])
}

pub fn ue_supi_start(st: &mut SubscriberState) -> Message {
    st.b_auth = UeAuth::Unset;
    st.e_auth = UeAuth::Unset;
    st.success_ue = false;
    st.guti_ue = None;
    st.uet_success = false;
    st.session_guti = None;
    st.phase = UePhase::SupiAwaitNonce;
    Message::ChallengeRequest
}

/// Answers the challenge `n_r` with the concealed identity and sequence
/// number; `e` is the encryption randomness.
pub fn ue_supi_respond(st: &mut SubscriberState, n_r: Nonce, e: Nonce) -> Result<Message, HarnessError> {
    st.b_auth = UeAuth::Nonce(n_r);
    st.e_auth = UeAuth::Fail;
    st.success_ue = false;
    st.guti_ue = None;
    let ct = pke_enc(&supi_plaintext(st), &st.pk_hn, &e);
    let mac1 = mac(1, &tuple(&[&ct.to_bytes(), n_r.as_bytes()]), &st.mk);
    st.sqn_ue = sqn_suc(st.sqn_ue)?;
    st.phase = UePhase::SupiAwaitConfirm;
    Ok(Message::SupiResponse { ct, mac: mac1 })
}

pub fn ue_supi_confirm(st: &mut SubscriberState, m: &MacValue) -> Message {
    let b_ok = match st.b_auth {
        UeAuth::Nonce(n) => *m == mac(2, &tuple(&[n.as_bytes(), &st.sqn_ue.to_be_bytes()]), &st.mk),
        _ => false,
    };
    st.e_auth = if b_ok { st.b_auth } else { UeAuth::Fail };
    st.sync_ue |= b_ok;
    st.phase = UePhase::AwaitRefresh;
    if b_ok {
        Message::Ok
    } else {
        Message::Error
    }
}

pub fn ue_guti_start(st: &mut SubscriberState) -> Message {
    st.uet_success = st.success_ue;
    st.session_guti = if st.success_ue { st.guti_ue.map(|g| g.value) } else { None };
    st.success_ue = false;
    st.b_auth = UeAuth::Fail;
    st.e_auth = UeAuth::Fail;
    st.phase = UePhase::GutiAwaitVector;
    match st.session_guti {
        Some(g) => Message::GutiId(g),
        None => Message::NoSuci,
    }
}

pub fn ue_guti_respond(
    st: &mut SubscriberState,
    n: Nonce,
    masked_sqn: &[u8; SQN_LEN],
    m: &MacValue,
    mode: ProtocolMode,
) -> Result<Message, HarnessError> {
    let sqn_r = unmask_sqn(masked_sqn, &crate::crypto::mask_f(&n, &st.k), Half::Low);
    let accept = st.uet_success
        && st.session_guti.is_some_and(|g| {
            *m == mac(3, &tuple(&[n.as_bytes(), &sqn_r.to_be_bytes(), &g.0]), &st.mk)
        })
        && range_check(st.sqn_ue, sqn_r, mode, 1);
    st.phase = UePhase::AwaitRefresh;
    if accept {
        st.b_auth = UeAuth::Nonce(n);
        st.e_auth = UeAuth::Nonce(n);
        st.sqn_ue = sqn_suc(st.sqn_ue)?;
        Ok(Message::GutiConfirm(mac(4, n.as_bytes(), &st.mk)))
    } else {
        st.b_auth = UeAuth::Fail;
        st.e_auth = UeAuth::Fail;
        Ok(Message::Error)
    }
}

pub fn ue_refresh(st: &mut SubscriberState, masked_guti: &[u8; BLOCK], m: &MacValue) -> Message {
    st.phase = UePhase::Idle;
    let accepted = match st.e_auth {
        UeAuth::Nonce(n) => {
            let g = mask_guti(masked_guti, &n, &st.k);
            (*m == mac(5, &tuple(&[&g, n.as_bytes()]), &st.mk)).then_some(GutiValue(g))
        }
        _ => None,
    };
    match accepted {
        Some(value) => {
            st.guti_ue = Some(Guti { value, epoch: st.gutis_received });
            st.gutis_received += 1;
            st.success_ue = true;
            Message::Ok
        }
        None => {
            st.guti_ue = None;
            st.success_ue = false;
            Message::Error
        }
    }
}

fn fresh_session(hn: &NetworkState, j: usize) -> Result<(), HarnessError> {
    match hn.session(j)?.phase {
        HnPhase::Fresh => Ok(()),
        _ => Err(HarnessError::SessionReused(j)),
    }
}

pub fn hn_supi_challenge(hn: &mut NetworkState, j: usize) -> Result<Message, HarnessError> {
    fresh_session(hn, j)?;
    let s = hn.session_mut(j)?;
    s.phase = HnPhase::SupiVerify;
    Ok(Message::HnNonce(s.nonce))
}

pub fn hn_supi_verify(
    hn: &mut NetworkState,
    j: usize,
    ct: &Ciphertext,
    m: &MacValue,
) -> Result<Message, HarnessError> {
    let n = hn.session(j)?.nonce;
    hn.session_mut(j)?.phase = HnPhase::AwaitRefresh;

    let opened = pke_dec(ct, &hn.sk_hn).ok().and_then(|pt| {
        let parts = untuple(&pt)?;
        let [id, sqn] = parts.as_slice() else { return None };
        let sqn = Sqn::from_be_bytes((*sqn).try_into().ok()?);
        let idx = hn.records.iter().position(|r| r.id.as_str().as_bytes() == *id)?;
        Some((idx, sqn))
    });
    let matched = opened.filter(|&(idx, _)| {
        *m == mac(1, &tuple(&[&ct.to_bytes(), n.as_bytes()]), &hn.records[idx].mk)
    });
    let Some((idx, sqn_r)) = matched else {
        hn.session_mut(j)?.e_auth = HnAuth::Unknown;
        return Ok(Message::Error);
    };

    let next = sqn_suc(sqn_r)?;
    let guti_j = hn.session(j)?.guti;
    {
        let s = hn.session_mut(j)?;
        s.b_auth = Some(idx);
        s.e_auth = HnAuth::Id(idx);
    }
    if sqn_r >= hn.records[idx].sqn_hn {
        let g = hn.issue(guti_j);
        let r = &mut hn.records[idx];
        r.sqn_hn = next;
        r.s_auth = Some(n);
        r.guti_hn = Some(g);
    }
    let confirm = mac(2, &tuple(&[n.as_bytes(), &next.to_be_bytes()]), &hn.records[idx].mk);
    Ok(Message::SupiConfirm(confirm))
}

/// `guti` is `None` when the UE sent `NoSuci`.
pub fn hn_guti_challenge(
    hn: &mut NetworkState,
    j: usize,
    guti: Option<GutiValue>,
) -> Result<Message, HarnessError> {
    fresh_session(hn, j)?;
    let n = hn.session(j)?.nonce;
    hn.session_mut(j)?.phase = HnPhase::GutiConfirm;
    let hit = guti.and_then(|g| hn.find_guti(&g));
    let shown = guti.unwrap_or(GutiValue([0; BLOCK]));
    let rec = match hit {
        Some(idx) => {
            hn.session_mut(j)?.b_auth = Some(idx);
            let r = &mut hn.records[idx];
            r.guti_hn = None;
            r.s_auth = Some(n);
            r.clone()
        }
        None => hn.dummy.clone(),
    };
    let masked_sqn = mask_sqn(rec.sqn_hn, &crate::crypto::mask_f(&n, &rec.k), Half::Low);
    let mac3 = mac(3, &tuple(&[n.as_bytes(), &rec.sqn_hn.to_be_bytes(), &shown.0]), &rec.mk);
    Ok(Message::GutiAuthVector { n, masked_sqn, mac: mac3 })
}

pub fn hn_guti_confirm(
    hn: &mut NetworkState,
    j: usize,
    m: &MacValue,
    mode: ProtocolMode,
) -> Result<Message, HarnessError> {
    let (n, guti_j, b_auth) = {
        let s = hn.session(j)?;
        (s.nonce, s.guti, s.b_auth)
    };
    hn.session_mut(j)?.phase = HnPhase::AwaitRefresh;
    let idx = b_auth.filter(|&i| *m == mac(4, n.as_bytes(), &hn.records[i].mk));
    let Some(idx) = idx else {
        hn.session_mut(j)?.e_auth = HnAuth::Fail;
        return Ok(Message::Error);
    };
    hn.session_mut(j)?.e_auth = HnAuth::Id(idx);
    let b_inc = match mode {
        ProtocolMode::AkaPlusMinus => true,
        _ => hn.records[idx].s_auth == Some(n),
    };
    if b_inc {
        let g = hn.issue(guti_j);
        let r = &mut hn.records[idx];
        r.sqn_hn = sqn_suc(r.sqn_hn)?;
        r.guti_hn = Some(g);
    }
    Ok(Message::Ok)
}

pub fn hn_refresh(hn: &mut NetworkState, j: usize) -> Result<Message, HarnessError> {
    let s = hn.session_mut(j)?;
    s.phase = HnPhase::Done;
    let (n, guti_j, e_auth) = (s.nonce, s.guti, s.e_auth);
    match e_auth {
        HnAuth::Id(idx) => {
            let r = &hn.records[idx];
            Ok(Message::RefreshAssign {
                masked_guti: mask_guti(&guti_j.0, &n, &r.k),
                mac: mac(5, &tuple(&[&guti_j.0, n.as_bytes()]), &r.mk),
            })
        }
        _ => Ok(Message::Error),
    }
}

/// Opens a UE session of the requested kind.
pub fn ue_begin(st: &mut SubscriberState, kind: StartKind) -> (Message, UeAct) {
    let guti = match kind {
        StartKind::Supi => false,
        StartKind::Guti => true,
        StartKind::Auto => st.success_ue,
    };
    if guti {
        (ue_guti_start(st), UeAct::Cuai(0))
    } else {
        (ue_supi_start(st), UeAct::Puai(0))
    }
}

/// Feeds one decoded message to the UE. Inputs that do not fit the
/// current phase are answered with `Error` and change nothing.
pub fn ue_step(
    st: &mut SubscriberState,
    m: &Message,
    mode: ProtocolMode,
    entropy: &mut Entropy,
) -> Result<(Message, Option<UeAct>), HarnessError> {
    Ok(match (st.phase, m) {
        (UePhase::SupiAwaitNonce, Message::HnNonce(n)) => {
            let e = entropy.nonce()?;
            (ue_supi_respond(st, *n, e)?, Some(UeAct::Puai(1)))
        }
        (UePhase::SupiAwaitConfirm, Message::SupiConfirm(mac)) => (ue_supi_confirm(st, mac), Some(UeAct::Puai(2))),
        (UePhase::GutiAwaitVector, Message::GutiAuthVector { n, masked_sqn, mac }) => {
            (ue_guti_respond(st, *n, masked_sqn, mac, mode)?, Some(UeAct::Cuai(1)))
        }
        (UePhase::AwaitRefresh, Message::RefreshAssign { masked_guti, mac }) => {
            (ue_refresh(st, masked_guti, mac), Some(UeAct::Fuai))
        }
        _ => (Message::Error, None),
    })
}

/// Feeds one decoded message to HN session `j`.
pub fn hn_step(
    hn: &mut NetworkState,
    j: usize,
    m: &Message,
    mode: ProtocolMode,
) -> Result<(Message, Option<HnAct>), HarnessError> {
    let phase = hn.session(j)?.phase;
    Ok(match (phase, m) {
        (HnPhase::Fresh, Message::ChallengeRequest) => (hn_supi_challenge(hn, j)?, Some(HnAct::Pnai(0))),
        (HnPhase::Fresh, Message::GutiId(g)) => (hn_guti_challenge(hn, j, Some(*g))?, Some(HnAct::Cnai(0))),
        (HnPhase::Fresh, Message::NoSuci) => (hn_guti_challenge(hn, j, None)?, Some(HnAct::Cnai(0))),
        (HnPhase::SupiVerify, Message::SupiResponse { ct, mac }) => {
            (hn_supi_verify(hn, j, ct, mac)?, Some(HnAct::Pnai(1)))
        }
        (HnPhase::GutiConfirm, Message::GutiConfirm(mac)) => {
            (hn_guti_confirm(hn, j, mac, mode)?, Some(HnAct::Cnai(1)))
        }
        (HnPhase::AwaitRefresh, _) => (hn_refresh(hn, j)?, Some(HnAct::Fnai)),
        _ => (Message::Error, None),
    })
}
