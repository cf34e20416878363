//! Keyed primitives shared by every protocol model.
//!
//! Everything here is built from one keyed pseudorandom function,
//! HMAC-SHA256 truncated to 16 bytes. The five integrity functions and the
//! two masking functions are the same PRF with a one-byte domain tag
//! prepended to the input, so `prf(k, tag || msg)` for distinct tags behave
//! as independent random functions.
//!
//! Public-key encryption is simulated. The home network is the only party
//! that ever decrypts and adversary scripts only ever see ciphertexts, so a
//! randomized authenticated stream cipher keyed from the public handle is
//! enough to drive the unlinkability games. It offers no secrecy against a
//! party that holds `pk`.

use hmac::{Hmac, KeyInit, Mac};
use rand::RngCore;
use sha2::Sha256;

use crate::error::CryptoError;

/// Width in bytes of keys, nonces, tags and masks.
pub const BLOCK: usize = 16;

/// Domain tag of the `f` masking function.
pub const TAG_MASK_F: u8 = 6;
/// Domain tag of the `f^r` masking function.
pub const TAG_MASK_FR: u8 = 7;

const TAG_PKE_PUBLIC: u8 = 0x10;
const TAG_PKE_STREAM: u8 = 0x11;
const TAG_PKE_AUTH: u8 = 0x12;

type HmacSha256 = Hmac<Sha256>;

/// The single keyed PRF every primitive in this module reduces to.
fn prf(key: &[u8], tag: u8, parts: &[&[u8]]) -> [u8; BLOCK] {
    let mut mac = HmacSha256::new_from_slice(key).expect("hmac accepts any key length");
    mac.update(&[tag]);
    for part in parts {
        mac.update(part);
    }
    let full = mac.finalize().into_bytes();
    let mut out = [0u8; BLOCK];
    out.copy_from_slice(&full[..BLOCK]);
    out
}

macro_rules! block_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name([u8; BLOCK]);

        impl $name {
            pub const fn from_bytes(bytes: [u8; BLOCK]) -> Self {
                Self(bytes)
            }

            pub const fn as_bytes(&self) -> &[u8; BLOCK] {
                &self.0
            }

            /// Draws a value from `rng`.
            pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
                let mut bytes = [0u8; BLOCK];
                rng.fill_bytes(&mut bytes);
                Self(bytes)
            }
        }

        impl TryFrom<&[u8]> for $name {
            type Error = CryptoError;

            fn try_from(value: &[u8]) -> Result<Self, Self::Error> {
                let bytes: [u8; BLOCK] = value
                    .try_into()
                    .map_err(|_| CryptoError::BadLength { expected: BLOCK, got: value.len() })?;
                Ok(Self(bytes))
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), hex::encode(&self.0[..4]))
            }
        }
    };
}

block_newtype!(
    /// Integrity key `mk`, used by the five tagged MACs.
    MacKey
);
block_newtype!(
    /// Confidentiality key `k`, used by the two masking functions.
    ConfKey
);
block_newtype!(
    /// A fresh random value: challenges, encryption randomness.
    Nonce
);
block_newtype!(
    /// Output of [`mac_tagged`].
    MacValue
);
block_newtype!(
    /// Home-network public handle.
    PublicKey
);
block_newtype!(
    /// Home-network decryption key.
    SecretKey
);

/// A home-network key pair. `pk` is a deterministic function of `sk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub pk: PublicKey,
    pub sk: SecretKey,
}

impl SecretKey {
    /// Recomputes the public handle for this secret.
    pub fn public(&self) -> PublicKey {
        PublicKey(prf(&self.0, TAG_PKE_PUBLIC, &[b"akalab public key"]))
    }
}

/// A simulated asymmetric ciphertext: randomness, masked body, auth tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ciphertext {
    pub r: Nonce,
    pub body: Vec<u8>,
    pub tag: [u8; BLOCK],
}

impl Ciphertext {
    /// Total serialized size: 16 + |body| + 16.
    pub fn len(&self) -> usize {
        2 * BLOCK + self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Serialized as `r || tag || body`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(self.r.as_bytes());
        out.extend_from_slice(&self.tag);
        out.extend_from_slice(&self.body);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, CryptoError> {
        if b.len() < 2 * BLOCK {
            return Err(CryptoError::BadLength { expected: 2 * BLOCK, got: b.len() });
        }
        let r = Nonce::try_from(&b[..BLOCK])?;
        let mut tag = [0u8; BLOCK];
        tag.copy_from_slice(&b[BLOCK..2 * BLOCK]);
        Ok(Self { r, body: b[2 * BLOCK..].to_vec(), tag })
    }
}

/// `Mac^tag(msg, key)` for tag in `1..=5`.
pub fn mac_tagged(tag: u8, msg: &[u8], key: &MacKey) -> Result<MacValue, CryptoError> {
    if !(1..=5).contains(&tag) {
        return Err(CryptoError::BadTag(tag));
    }
    Ok(MacValue(prf(&key.0, tag, &[msg])))
}

/// Keystream `f(n, k)`.
pub fn mask_f(n: &Nonce, key: &ConfKey) -> [u8; BLOCK] {
    prf(&key.0, TAG_MASK_F, &[&n.0])
}

/// Keystream `f^r(n, k)`.
pub fn mask_fr(n: &Nonce, key: &ConfKey) -> [u8; BLOCK] {
    prf(&key.0, TAG_MASK_FR, &[&n.0])
}

/// Byte-wise xor of two blocks.
pub fn xor_block(a: &[u8; BLOCK], b: &[u8; BLOCK]) -> [u8; BLOCK] {
    let mut out = [0u8; BLOCK];
    for (o, (x, y)) in out.iter_mut().zip(a.iter().zip(b)) {
        *o = x ^ y;
    }
    out
}

/// Injective tuple encoding used for MAC inputs: each part is prefixed
/// with its length as a big-endian `u16`.
pub fn tuple(parts: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::with_capacity(parts.iter().map(|p| p.len() + 2).sum());
    for part in parts {
        let len = u16::try_from(part.len()).expect("tuple component shorter than 64 KiB");
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(part);
    }
    out
}

/// Inverse of [`tuple`]; `None` on malformed input.
pub fn untuple(mut b: &[u8]) -> Option<Vec<&[u8]>> {
    let mut parts = Vec::new();
    while !b.is_empty() {
        let len = u16::from_be_bytes([*b.first()?, *b.get(1)?]) as usize;
        parts.push(b.get(2..2 + len)?);
        b = &b[2 + len..];
    }
    Some(parts)
}

pub fn pke_keygen<R: RngCore + ?Sized>(rng: &mut R) -> KeyPair {
    let sk = SecretKey::random(rng);
    KeyPair { pk: sk.public(), sk }
}

fn keystream(pk: &PublicKey, r: &Nonce, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    let mut counter: u32 = 0;
    while out.len() < len {
        let block = prf(&pk.0, TAG_PKE_STREAM, &[&r.0, &counter.to_be_bytes()]);
        let take = (len - out.len()).min(BLOCK);
        out.extend_from_slice(&block[..take]);
        counter += 1;
    }
    out
}

fn pke_tag(pk: &PublicKey, r: &Nonce, body: &[u8]) -> [u8; BLOCK] {
    prf(&pk.0, TAG_PKE_AUTH, &[&r.0, body])
}

/// Randomized encryption `enc(m, pk; r)`.
pub fn pke_enc(m: &[u8], pk: &PublicKey, r: &Nonce) -> Ciphertext {
    let body: Vec<u8> = m.iter().zip(keystream(pk, r, m.len())).map(|(a, b)| a ^ b).collect();
    let tag = pke_tag(pk, r, &body);
    Ciphertext { r: *r, body, tag }
}

/// Decryption with the secret key; fails on any authentication mismatch.
pub fn pke_dec(c: &Ciphertext, sk: &SecretKey) -> Result<Vec<u8>, CryptoError> {
    let pk = sk.public();
    let expected = pke_tag(&pk, &c.r, &c.body);
    if expected != c.tag {
        return Err(CryptoError::DecryptFailure);
    }
    Ok(c
        .body
        .iter()
        .zip(keystream(&pk, &c.r, c.body.len()))
        .map(|(a, b)| a ^ b)
        .collect())
}
