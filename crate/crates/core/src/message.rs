//! The wire-format union of every protocol message and its codec.
//!
//! Layout: one variant tag byte, then each field as a big-endian `u16`
//! length followed by the field bytes, in declaration order.

use crate::crypto::{Ciphertext, MacValue, Nonce, BLOCK};
use crate::error::DecodeError;
use crate::types::{GutiValue, Identity};

/// Width of a masked sequence number on the wire.
pub const SQN_LEN: usize = 8;

/// How a UE is asked to open a session. Only the AKA+ modes distinguish
/// the kinds; other modes identify in all three cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StartKind {
    /// SUPI if the UE holds no valid temporary identity, GUTI otherwise.
    Auto,
    Supi,
    Guti,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IdPayload {
    Concealed(Ciphertext),
    Guti(GutiValue),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Message {
    ChallengeRequest,
    HnNonce(Nonce),
    SupiResponse { ct: Ciphertext, mac: MacValue },
    SupiConfirm(MacValue),
    GutiId(GutiValue),
    NoSuci,
    GutiAuthVector { n: Nonce, masked_sqn: [u8; SQN_LEN], mac: MacValue },
    GutiConfirm(MacValue),
    RefreshAssign { masked_guti: [u8; BLOCK], mac: MacValue },
    Ok,
    Error,
    AuthFailure,
    ResyncRequest { masked_sqn: [u8; SQN_LEN], mac: MacValue },
    PlainImsi(Identity),
    Tmsi(GutiValue),
    PermanentIdRequest,
    FiveGId(IdPayload),
    FiveGAuthVector { n: Nonce, masked_sqn: [u8; SQN_LEN], mac: MacValue },
    FiveGRes(MacValue),
    PrivConfirm(MacValue),
    /// Adversary trigger that makes an idle UE open a session.
    Start(StartKind),
}

impl Message {
    pub fn tag(&self) -> u8 {
        match self {
            Message::ChallengeRequest => 0x01,
            Message::HnNonce(_) => 0x02,
            Message::SupiResponse { .. } => 0x03,
            Message::SupiConfirm(_) => 0x04,
            Message::GutiId(_) => 0x05,
            Message::NoSuci => 0x06,
            Message::GutiAuthVector { .. } => 0x07,
            Message::GutiConfirm(_) => 0x08,
            Message::RefreshAssign { .. } => 0x09,
            Message::Ok => 0x0a,
            Message::Error => 0x0b,
            Message::AuthFailure => 0x0c,
            Message::ResyncRequest { .. } => 0x0d,
            Message::PlainImsi(_) => 0x0e,
            Message::Tmsi(_) => 0x0f,
            Message::PermanentIdRequest => 0x10,
            Message::FiveGId(_) => 0x11,
            Message::FiveGAuthVector { .. } => 0x12,
            Message::FiveGRes(_) => 0x13,
            Message::PrivConfirm(_) => 0x14,
            Message::Start(_) => 0x20,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Message::ChallengeRequest => "ChallengeRequest",
            Message::HnNonce(_) => "HnNonce",
            Message::SupiResponse { .. } => "SupiResponse",
            Message::SupiConfirm(_) => "SupiConfirm",
            Message::GutiId(_) => "GutiId",
            Message::NoSuci => "NoSuci",
            Message::GutiAuthVector { .. } => "GutiAuthVector",
            Message::GutiConfirm(_) => "GutiConfirm",
            Message::RefreshAssign { .. } => "RefreshAssign",
            Message::Ok => "Ok",
            Message::Error => "Error",
            Message::AuthFailure => "AuthFailure",
            Message::ResyncRequest { .. } => "ResyncRequest",
            Message::PlainImsi(_) => "PlainImsi",
            Message::Tmsi(_) => "Tmsi",
            Message::PermanentIdRequest => "PermanentIdRequest",
            Message::FiveGId(_) => "FiveGId",
            Message::FiveGAuthVector { .. } => "FiveGAuthVector",
            Message::FiveGRes(_) => "FiveGRes",
            Message::PrivConfirm(_) => "PrivConfirm",
            Message::Start(_) => "Start",
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        encode_message(self)
    }
}

fn push_field(out: &mut Vec<u8>, field: &[u8]) {
    let len = u16::try_from(field.len()).expect("message field shorter than 64 KiB");
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(field);
}

pub fn encode_message(m: &Message) -> Vec<u8> {
    let mut out = vec![m.tag()];
    let mut f = |b: &[u8]| push_field(&mut out, b);
    match m {
        Message::ChallengeRequest
        | Message::NoSuci
        | Message::Ok
        | Message::Error
        | Message::AuthFailure
        | Message::PermanentIdRequest => {}
        Message::HnNonce(n) => f(n.as_bytes()),
        Message::SupiResponse { ct, mac } => {
            f(&ct.to_bytes());
            f(mac.as_bytes());
        }
        Message::SupiConfirm(mac)
        | Message::GutiConfirm(mac)
        | Message::FiveGRes(mac)
        | Message::PrivConfirm(mac) => f(mac.as_bytes()),
        Message::GutiId(g) | Message::Tmsi(g) => f(&g.0),
        Message::GutiAuthVector { n, masked_sqn, mac }
        | Message::FiveGAuthVector { n, masked_sqn, mac } => {
            f(n.as_bytes());
            f(masked_sqn);
            f(mac.as_bytes());
        }
        Message::RefreshAssign { masked_guti, mac } => {
            f(masked_guti);
            f(mac.as_bytes());
        }
        Message::ResyncRequest { masked_sqn, mac } => {
            f(masked_sqn);
            f(mac.as_bytes());
        }
        Message::PlainImsi(id) => f(id.as_str().as_bytes()),
        Message::FiveGId(IdPayload::Concealed(ct)) => {
            f(&[0]);
            f(&ct.to_bytes());
        }
        Message::FiveGId(IdPayload::Guti(g)) => {
            f(&[1]);
            f(&g.0);
        }
        Message::Start(kind) => f(&[match kind {
            StartKind::Auto => 0,
            StartKind::Supi => 1,
            StartKind::Guti => 2,
        }]),
    }
    debug_assert!(out.len() < 1 << 16);
    out
}

fn split_fields(mut b: &[u8]) -> Result<Vec<&[u8]>, DecodeError> {
    let mut fields = Vec::new();
    while !b.is_empty() {
        if b.len() < 2 {
            return Err(DecodeError::Truncated);
        }
        let len = u16::from_be_bytes([b[0], b[1]]) as usize;
        if b.len() < 2 + len {
            return Err(DecodeError::Truncated);
        }
        fields.push(&b[2..2 + len]);
        b = &b[2 + len..];
    }
    Ok(fields)
}

fn fixed<const N: usize>(b: &[u8], name: &'static str) -> Result<[u8; N], DecodeError> {
    b.try_into().map_err(|_| DecodeError::BadField(name))
}

fn nonce(b: &[u8]) -> Result<Nonce, DecodeError> {
    fixed(b, "nonce").map(Nonce::from_bytes)
}

fn mac(b: &[u8]) -> Result<MacValue, DecodeError> {
    fixed(b, "mac").map(MacValue::from_bytes)
}

fn guti(b: &[u8]) -> Result<GutiValue, DecodeError> {
    fixed(b, "guti").map(GutiValue)
}

fn ciphertext(b: &[u8]) -> Result<Ciphertext, DecodeError> {
    Ciphertext::from_bytes(b).map_err(|_| DecodeError::BadField("ciphertext"))
}

pub fn decode_message(b: &[u8]) -> Result<Message, DecodeError> {
    let (&tag, rest) = b.split_first().ok_or(DecodeError::Empty)?;
    let arity = match tag {
        0x01 | 0x06 | 0x0a | 0x0b | 0x0c | 0x10 => 0,
        0x02 | 0x04 | 0x05 | 0x08 | 0x0e | 0x0f | 0x13 | 0x14 | 0x20 => 1,
        0x03 | 0x09 | 0x0d | 0x11 => 2,
        0x07 | 0x12 => 3,
        other => return Err(DecodeError::UnknownTag(other)),
    };
    let fs = split_fields(rest)?;
    if fs.len() > arity {
        return Err(DecodeError::TrailingBytes);
    }
    if fs.len() < arity {
        return Err(DecodeError::FieldCount { expected: arity, got: fs.len() });
    }
    let m = match tag {
        0x01 => Message::ChallengeRequest,
        0x02 => Message::HnNonce(nonce(fs[0])?),
        0x03 => Message::SupiResponse { ct: ciphertext(fs[0])?, mac: mac(fs[1])? },
        0x04 => Message::SupiConfirm(mac(fs[0])?),
        0x05 => Message::GutiId(guti(fs[0])?),
        0x06 => Message::NoSuci,
        0x07 => Message::GutiAuthVector {
            n: nonce(fs[0])?,
            masked_sqn: fixed(fs[1], "masked_sqn")?,
            mac: mac(fs[2])?,
        },
        0x08 => Message::GutiConfirm(mac(fs[0])?),
        0x09 => Message::RefreshAssign { masked_guti: fixed(fs[0], "masked_guti")?, mac: mac(fs[1])? },
        0x0a => Message::Ok,
        0x0b => Message::Error,
        0x0c => Message::AuthFailure,
        0x0d => Message::ResyncRequest { masked_sqn: fixed(fs[0], "masked_sqn")?, mac: mac(fs[1])? },
        0x0e => {
            let s = std::str::from_utf8(fs[0]).map_err(|_| DecodeError::BadField("identity"))?;
            Message::PlainImsi(Identity::new(s).map_err(|_| DecodeError::BadField("identity"))?)
        }
        0x0f => Message::Tmsi(guti(fs[0])?),
        0x10 => Message::PermanentIdRequest,
        0x11 => match fs[0] {
            [0] => Message::FiveGId(IdPayload::Concealed(ciphertext(fs[1])?)),
            [1] => Message::FiveGId(IdPayload::Guti(guti(fs[1])?)),
            _ => return Err(DecodeError::BadField("id kind")),
        },
        0x12 => Message::FiveGAuthVector {
            n: nonce(fs[0])?,
            masked_sqn: fixed(fs[1], "masked_sqn")?,
            mac: mac(fs[2])?,
        },
        0x13 => Message::FiveGRes(mac(fs[0])?),
        0x14 => Message::PrivConfirm(mac(fs[0])?),
        0x20 => match fs[0] {
            [0] => Message::Start(StartKind::Auto),
            [1] => Message::Start(StartKind::Supi),
            [2] => Message::Start(StartKind::Guti),
            _ => return Err(DecodeError::BadField("start kind")),
        },
        _ => unreachable!("tag checked above"),
    };
    Ok(m)
}
