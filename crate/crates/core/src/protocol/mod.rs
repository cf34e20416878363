//! Step functions of the three protocol families.
//!
//! Each step reads and updates one party's state and returns the reply
//! message. Steps that open or advance a symbolic action also report it so
//! the world can project transcripts onto action traces.

pub mod aka_plus;
pub mod fiveg;
pub mod priv_aka;

use crate::crypto::{ConfKey, Nonce, BLOCK};
use crate::message::SQN_LEN;
use crate::types::Sqn;

/// UE-side symbolic step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UeAct {
    Puai(u8),
    Cuai(u8),
    Fuai,
}

/// HN-side symbolic step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HnAct {
    Pnai(u8),
    Cnai(u8),
    Fnai,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Success,
    Failed,
}

/// Which half of a 16-byte keystream masks a sequence number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Half {
    Low,
    High,
}

pub(crate) fn mask_sqn(sqn: Sqn, stream: &[u8; BLOCK], half: Half) -> [u8; SQN_LEN] {
    let off = match half {
        Half::Low => 0,
        Half::High => SQN_LEN,
    };
    let mut out = sqn.to_be_bytes();
    for (o, s) in out.iter_mut().zip(&stream[off..off + SQN_LEN]) {
        *o ^= s;
    }
    out
}

pub(crate) fn unmask_sqn(masked: &[u8; SQN_LEN], stream: &[u8; BLOCK], half: Half) -> Sqn {
    let off = match half {
        Half::Low => 0,
        Half::High => SQN_LEN,
    };
    let mut b = *masked;
    for (o, s) in b.iter_mut().zip(&stream[off..off + SQN_LEN]) {
        *o ^= s;
    }
    Sqn::from_be_bytes(b)
}

pub(crate) fn mask_guti(guti: &[u8; BLOCK], n: &Nonce, k: &ConfKey) -> [u8; BLOCK] {
    crate::crypto::xor_block(guti, &crate::crypto::mask_fr(n, k))
}

/// MAC with a tag known to be in range.
pub(crate) fn mac(tag: u8, msg: &[u8], key: &crate::crypto::MacKey) -> crate::crypto::MacValue {
    crate::crypto::mac_tagged(tag, msg, key).expect("protocol tags are in 1..=5")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqn_mask_round_trip_both_halves() {
        let stream = [0xa5u8; BLOCK];
        for half in [Half::Low, Half::High] {
            let m = mask_sqn(Sqn(123456), &stream, half);
            assert_eq!(unmask_sqn(&m, &stream, half), Sqn(123456));
        }
        let mut s2 = [0u8; BLOCK];
        s2[8..].fill(0xff);
        assert_eq!(mask_sqn(Sqn(0), &s2, Half::Low), [0; SQN_LEN]);
        assert_eq!(mask_sqn(Sqn(0), &s2, Half::High), [0xff; SQN_LEN]);
    }
}
