//! 5G-AKA with re-synchronization and GUTI assignment, plus the legacy
//! variant that identifies in plain text.
//!
//! Function realization: `f1 = Mac1(<sqn, n>)`, `f2 = Mac2(n)`,
//! `f1* = Mac3(<sqn, n>)`, GUTI assignment `Mac5(<guti, n>)`. `f5` and
//! `f5*` are the low and high halves of `f(n, k)`; the assigned GUTI is
//! masked with `f^r(n, k)`.

use crate::crypto::{mask_f, pke_dec, pke_enc, tuple, MacValue, Nonce, BLOCK};
use crate::entropy::Entropy;
use crate::error::HarnessError;
use crate::message::{IdPayload, Message, SQN_LEN};
use crate::protocol::{mac, mask_guti, mask_sqn, unmask_sqn, Half, Verdict};
use crate::types::{
    range_check, sqn_suc, Guti, GutiValue, HnAuth, HnPhase, Identity, NetworkState, ProtocolMode,
    SubIndex, SubscriberState, UeAuth, UePhase,
};

/// Opens a session by identifying. A stored GUTI is used at most once.
pub fn fg_ue_identify(st: &mut SubscriberState, mode: ProtocolMode, e: Nonce) -> Message {
    st.b_auth = UeAuth::Unset;
    st.e_auth = UeAuth::Unset;
    st.phase = UePhase::AwaitVector;
    let legacy = mode == ProtocolMode::FiveGAkaLegacyPlainImsi;
    match st.guti_ue.take() {
        Some(g) => {
            st.success_ue = false;
            if legacy {
                Message::Tmsi(g.value)
            } else {
                Message::FiveGId(IdPayload::Guti(g.value))
            }
        }
        None if legacy => Message::PlainImsi(st.id.clone()),
        None => Message::FiveGId(IdPayload::Concealed(pke_enc(st.id.as_str().as_bytes(), &st.pk_hn, &e))),
    }
}

pub fn fg_ue_handle_permanent_id_request(st: &SubscriberState, mode: ProtocolMode) -> Message {
    match mode {
        ProtocolMode::FiveGAkaLegacyPlainImsi => Message::PlainImsi(st.id.clone()),
        _ => Message::Error,
    }
}

fn resolve(hn: &mut NetworkState, id_msg: &Message) -> Option<SubIndex> {
    let by_guti = |hn: &mut NetworkState, v: &GutiValue| {
        let idx = hn.find_guti(v)?;
        hn.records[idx].guti_hn = None;
        Some(idx)
    };
    match id_msg {
        Message::FiveGId(IdPayload::Guti(v)) | Message::Tmsi(v) => by_guti(hn, v),
        Message::FiveGId(IdPayload::Concealed(ct)) => {
            let pt = pke_dec(ct, &hn.sk_hn).ok()?;
            let id = Identity::new(String::from_utf8(pt).ok()?).ok()?;
            hn.find(&id)
        }
        Message::PlainImsi(id) => hn.find(id),
        _ => None,
    }
}

pub fn fg_hn_auth_vector(hn: &mut NetworkState, j: usize, id_msg: &Message) -> Result<Message, HarnessError> {
    if hn.session(j)?.phase != HnPhase::Fresh {
        return Err(HarnessError::SessionReused(j));
    }
    let Some(idx) = resolve(hn, id_msg) else {
        let s = hn.session_mut(j)?;
        s.e_auth = HnAuth::Unknown;
        s.phase = HnPhase::Done;
        return Ok(Message::Error);
    };
    let n = hn.session(j)?.nonce;
    {
        let s = hn.session_mut(j)?;
        s.b_auth = Some(idx);
        s.phase = HnPhase::AwaitResponse;
    }
    let r = &mut hn.records[idx];
    let sqn = r.sqn_hn;
    let v = Message::FiveGAuthVector {
        n,
        masked_sqn: mask_sqn(sqn, &mask_f(&n, &r.k), Half::Low),
        mac: mac(1, &tuple(&[&sqn.to_be_bytes(), n.as_bytes()]), &r.mk),
    };
    r.sqn_hn = sqn_suc(sqn)?;
    Ok(v)
}

pub fn fg_ue_verify(
    st: &mut SubscriberState,
    n: Nonce,
    masked_sqn: &[u8; SQN_LEN],
    m: &MacValue,
    window_c: u64,
) -> Message {
    st.b_auth = UeAuth::Nonce(n);
    let stream = mask_f(&n, &st.k);
    let sqn_r = unmask_sqn(masked_sqn, &stream, Half::Low);
    let b_mac = *m == mac(1, &tuple(&[&sqn_r.to_be_bytes(), n.as_bytes()]), &st.mk);
    let b_sqn = range_check(st.sqn_ue, sqn_r, ProtocolMode::FiveGAka, window_c);
    if b_mac && b_sqn {
        st.sqn_ue = sqn_r;
        st.e_auth = UeAuth::Nonce(n);
        st.phase = UePhase::AwaitGuti;
        return Message::FiveGRes(mac(2, n.as_bytes(), &st.mk));
    }
    st.e_auth = UeAuth::Fail;
    st.phase = UePhase::Idle;
    if !b_mac {
        return Message::AuthFailure;
    }
    Message::ResyncRequest {
        masked_sqn: mask_sqn(st.sqn_ue, &stream, Half::High),
        mac: mac(3, &tuple(&[&st.sqn_ue.to_be_bytes(), n.as_bytes()]), &st.mk),
    }
}

/// Completes HN session `j` on the UE's answer to the vector.
pub fn fg_hn_finalize(hn: &mut NetworkState, j: usize, m: &Message) -> Result<(Message, Verdict), HarnessError> {
    let (n, guti_j, b_auth, phase) = {
        let s = hn.session(j)?;
        (s.nonce, s.guti, s.b_auth, s.phase)
    };
    let (HnPhase::AwaitResponse, Some(idx)) = (phase, b_auth) else {
        return Ok((Message::Error, Verdict::Failed));
    };
    if !matches!(m, Message::FiveGRes(_) | Message::ResyncRequest { .. } | Message::AuthFailure) {
        return Ok((Message::Error, Verdict::Failed));
    }
    let (k, mk) = (hn.records[idx].k, hn.records[idx].mk);
    {
        let s = hn.session_mut(j)?;
        s.phase = HnPhase::Done;
        s.e_auth = HnAuth::Fail;
    }
    match m {
        Message::FiveGRes(res) if *res == mac(2, n.as_bytes(), &mk) => {
            hn.session_mut(j)?.e_auth = HnAuth::Id(idx);
            let g = hn.issue(guti_j);
            hn.records[idx].guti_hn = Some(g);
            let reply = Message::RefreshAssign {
                masked_guti: mask_guti(&guti_j.0, &n, &k),
                mac: mac(5, &tuple(&[&guti_j.0, n.as_bytes()]), &mk),
            };
            Ok((reply, Verdict::Success))
        }
        Message::ResyncRequest { masked_sqn, mac: m1 } => {
            let sqn_star = unmask_sqn(masked_sqn, &mask_f(&n, &k), Half::High);
            if *m1 == mac(3, &tuple(&[&sqn_star.to_be_bytes(), n.as_bytes()]), &mk) {
                hn.records[idx].sqn_hn = sqn_suc(sqn_star)?;
            }
            Ok((Message::Error, Verdict::Failed))
        }
        _ => Ok((Message::Error, Verdict::Failed)),
    }
}

/// UE side of GUTI assignment after a successful authentication.
pub fn fg_ue_guti(st: &mut SubscriberState, masked_guti: &[u8; BLOCK], m: &MacValue) -> Message {
    st.phase = UePhase::Idle;
    let Some(n) = st.e_auth.nonce() else { return Message::Error };
    let g = mask_guti(masked_guti, &n, &st.k);
    if *m != mac(5, &tuple(&[&g, n.as_bytes()]), &st.mk) {
        return Message::Error;
    }
    st.guti_ue = Some(Guti { value: GutiValue(g), epoch: st.gutis_received });
    st.gutis_received += 1;
    st.success_ue = true;
    Message::Ok
}

pub fn ue_begin(st: &mut SubscriberState, mode: ProtocolMode, entropy: &mut Entropy) -> Result<Message, HarnessError> {
    let e = entropy.nonce()?;
    Ok(fg_ue_identify(st, mode, e))
}

pub fn ue_step(st: &mut SubscriberState, m: &Message, mode: ProtocolMode, window_c: u64) -> Message {
    match (st.phase, m) {
        (_, Message::PermanentIdRequest) => fg_ue_handle_permanent_id_request(st, mode),
        (UePhase::AwaitVector, Message::FiveGAuthVector { n, masked_sqn, mac }) => {
            fg_ue_verify(st, *n, masked_sqn, mac, window_c)
        }
        (UePhase::AwaitGuti, Message::RefreshAssign { masked_guti, mac }) => fg_ue_guti(st, masked_guti, mac),
        _ => Message::Error,
    }
}

pub fn hn_step(hn: &mut NetworkState, j: usize, m: &Message, mode: ProtocolMode) -> Result<Message, HarnessError> {
    let legacy = mode == ProtocolMode::FiveGAkaLegacyPlainImsi;
    match (hn.session(j)?.phase, m) {
        (HnPhase::Fresh, Message::FiveGId(_)) if !legacy => fg_hn_auth_vector(hn, j, m),
        (HnPhase::Fresh, Message::Tmsi(_) | Message::PlainImsi(_)) if legacy => fg_hn_auth_vector(hn, j, m),
        (HnPhase::AwaitResponse, _) => Ok(fg_hn_finalize(hn, j, m)?.0),
        _ => Ok(Message::Error),
    }
}
