//! Identities, sequence numbers and the persistent state of both parties.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crypto::{ConfKey, MacKey, MacValue, Nonce, PublicKey, SecretKey, BLOCK};
use crate::error::HarnessError;

/// A permanent subscriber identity.
///
/// Restricted to 1..=32 bytes of ASCII letters, digits, `_`, `-` and `.`
/// so that identities can appear verbatim in trace literals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Identity(String);

impl Identity {
    pub fn new(s: impl Into<String>) -> Result<Self, HarnessError> {
        let s = s.into();
        let ok = !s.is_empty()
            && s.len() <= 32
            && s.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'));
        if ok {
            Ok(Self(s))
        } else {
            Err(HarnessError::InvalidIdentity(s))
        }
    }

    /// The default name of the `i`-th subscriber of a world: `A`..`Z`,
    /// then `A1`, `B1`, ...
    pub fn nth(i: usize) -> Self {
        let letter = char::from(b'A' + (i % 26) as u8);
        if i < 26 {
            Self(letter.to_string())
        } else {
            Self(format!("{letter}{}", i / 26))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Identity {
    type Error = HarnessError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Identity> for String {
    fn from(value: Identity) -> Self {
        value.0
    }
}

impl fmt::Debug for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The 16 bytes of a temporary identity, as carried on the wire.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GutiValue(pub [u8; BLOCK]);

impl fmt::Debug for GutiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GutiValue({})", hex::encode(&self.0[..4]))
    }
}

/// A temporary identity together with its issuance counter. The epoch is
/// bookkeeping and never goes on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Guti {
    pub value: GutiValue,
    pub epoch: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sqn(pub u64);

impl Sqn {
    pub fn to_be_bytes(self) -> [u8; 8] {
        self.0.to_be_bytes()
    }

    pub fn from_be_bytes(b: [u8; 8]) -> Self {
        Self(u64::from_be_bytes(b))
    }
}

/// Successor of a sequence number.
pub fn sqn_suc(s: Sqn) -> Result<Sqn, HarnessError> {
    s.0.checked_add(1).map(Sqn).ok_or(HarnessError::SqnOverflow)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolMode {
    FiveGAka,
    FiveGAkaLegacyPlainImsi,
    PrivAka,
    AkaPlus,
    AkaPlusMinus,
}

impl ProtocolMode {
    pub const ALL: [ProtocolMode; 5] = [
        ProtocolMode::FiveGAka,
        ProtocolMode::FiveGAkaLegacyPlainImsi,
        ProtocolMode::PrivAka,
        ProtocolMode::AkaPlus,
        ProtocolMode::AkaPlusMinus,
    ];

    pub fn is_five_g(self) -> bool {
        matches!(self, Self::FiveGAka | Self::FiveGAkaLegacyPlainImsi)
    }

    pub fn is_aka_plus(self) -> bool {
        matches!(self, Self::AkaPlus | Self::AkaPlusMinus)
    }

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Self::FiveGAka => "5g-aka",
            Self::FiveGAkaLegacyPlainImsi => "5g-aka-legacy",
            Self::PrivAka => "priv-aka",
            Self::AkaPlus => "aka-plus",
            Self::AkaPlusMinus => "aka-plus-minus",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for ProtocolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The UE-side sequence number check.
///
/// 5G modes accept `sqn_ue < sqn_r <= sqn_ue + window_c`; the AKA+ modes
/// accept only equality. PRIV-AKA uses its own tolerance window and does
/// not go through this function.
pub fn range_check(sqn_ue: Sqn, sqn_r: Sqn, mode: ProtocolMode, window_c: u64) -> bool {
    match mode {
        ProtocolMode::AkaPlus | ProtocolMode::AkaPlusMinus => sqn_ue == sqn_r,
        _ => sqn_ue < sqn_r && sqn_r.0 <= sqn_ue.0.saturating_add(window_c),
    }
}

/// UE-side authentication record: a challenge nonce, `fail`, or unset (⊥).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum UeAuth {
    #[default]
    Unset,
    Fail,
    Nonce(Nonce),
}

impl UeAuth {
    pub fn nonce(self) -> Option<Nonce> {
        match self {
            UeAuth::Nonce(n) => Some(n),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum UePhase {
    #[default]
    Idle,
    SupiAwaitNonce,
    SupiAwaitConfirm,
    GutiAwaitVector,
    AwaitRefresh,
    AwaitVector,
    AwaitGuti,
}

impl UePhase {
    /// Whether the UE is waiting for an authentication message. A
    /// subscriber in such a phase cannot be released by `FreeUE`.
    pub fn mid_session(self) -> bool {
        matches!(
            self,
            UePhase::SupiAwaitNonce
                | UePhase::SupiAwaitConfirm
                | UePhase::GutiAwaitVector
                | UePhase::AwaitVector
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubscriberState {
    pub id: Identity,
    pub k: ConfKey,
    pub mk: MacKey,
    pub pk_hn: PublicKey,
    pub sqn_ue: Sqn,
    pub guti_ue: Option<Guti>,
    pub success_ue: bool,
    pub b_auth: UeAuth,
    pub e_auth: UeAuth,
    /// Test-only phantom: set once a SUPI confirmation has been accepted.
    pub sync_ue: bool,
    pub phase: UePhase,
    /// Value of `success_ue` when the current GUTI session started.
    pub uet_success: bool,
    /// Temporary identity sent at the start of the current GUTI session.
    pub session_guti: Option<GutiValue>,
    /// Number of temporary identities accepted so far; the epoch of the next.
    pub gutis_received: u64,
}

impl SubscriberState {
    pub fn new(id: Identity, k: ConfKey, mk: MacKey, pk_hn: PublicKey) -> Self {
        Self {
            id,
            k,
            mk,
            pk_hn,
            sqn_ue: Sqn(0),
            guti_ue: None,
            success_ue: false,
            b_auth: UeAuth::Unset,
            e_auth: UeAuth::Unset,
            sync_ue: false,
            phase: UePhase::Idle,
            uet_success: false,
            session_guti: None,
            gutis_received: 0,
        }
    }
}

/// Index of a subscriber record inside a [`NetworkState`].
pub type SubIndex = usize;

/// HN-side per-subscriber record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnRecord {
    pub id: Identity,
    pub k: ConfKey,
    pub mk: MacKey,
    pub sqn_hn: Sqn,
    pub guti_hn: Option<Guti>,
    /// Challenge of the last session that legitimately advanced this record.
    pub s_auth: Option<Nonce>,
}

/// HN-side end-of-authentication record for one session.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HnAuth {
    #[default]
    Unset,
    Id(SubIndex),
    Unknown,
    Fail,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HnPhase {
    #[default]
    Fresh,
    SupiVerify,
    GutiConfirm,
    AwaitRefresh,
    AwaitResponse,
    AwaitConfirm,
    Done,
}

/// Book-keeping of an open PRIV-AKA session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivSession {
    pub j: usize,
    pub id: SubIndex,
    pub pending_increment: bool,
    pub confirm_mac_expected: MacValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnSession {
    pub nonce: Nonce,
    /// Temporary identity handed out if this session refreshes one.
    pub guti: GutiValue,
    pub b_auth: Option<SubIndex>,
    pub e_auth: HnAuth,
    pub phase: HnPhase,
    pub privs: Option<PrivSession>,
}

impl HnSession {
    pub fn new(nonce: Nonce, guti: GutiValue) -> Self {
        Self { nonce, guti, b_auth: None, e_auth: HnAuth::Unset, phase: HnPhase::Fresh, privs: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkState {
    pub sk_hn: SecretKey,
    pub records: Vec<HnRecord>,
    /// Target of decoy messages; never drawn and never honest.
    pub dummy: HnRecord,
    pub sessions: Vec<HnSession>,
    pub next_epoch: u64,
}

impl NetworkState {
    pub fn find(&self, id: &Identity) -> Option<SubIndex> {
        self.records.iter().position(|r| &r.id == id)
    }

    pub fn find_guti(&self, v: &GutiValue) -> Option<SubIndex> {
        self.records.iter().position(|r| r.guti_hn.map(|g| g.value) == Some(*v))
    }

    /// Wraps a value into a freshly issued temporary identity.
    pub fn issue(&mut self, value: GutiValue) -> Guti {
        let g = Guti { value, epoch: self.next_epoch };
        self.next_epoch += 1;
        g
    }

    pub fn session(&self, j: usize) -> Result<&HnSession, HarnessError> {
        self.sessions.get(j).ok_or(HarnessError::UnknownSession(j))
    }

    pub fn session_mut(&mut self, j: usize) -> Result<&mut HnSession, HarnessError> {
        self.sessions.get_mut(j).ok_or(HarnessError::UnknownSession(j))
    }
}
