use thiserror::Error;

use crate::model::Tick;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node id must not be empty")]
    EmptyNodeId,
    #[error("node id is {0} characters long, limit is {limit}", limit = crate::model::NodeId::MAX_LEN)]
    NodeIdTooLong(usize),
    #[error("rssi {0} dBm outside [-120, 0]")]
    RssiOutOfRange(i32),
    #[error("observation at tick {found} does not belong to snapshot tick {expected}")]
    MixedTicks { expected: Tick, found: Tick },

    #[error("rssi interval low bound {low} exceeds high bound {high}")]
    InvertedInterval { low: i16, high: i16 },
    #[error("fingerprint needs at least one clause")]
    EmptyFingerprint,
    #[error("fingerprint names node `{0}` more than once")]
    DuplicateClauseNode(String),
    #[error("action payload must not be empty")]
    EmptyActionPayload,
    #[error("rule id must not be empty")]
    EmptyRuleId,
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),

    #[error("invalid membership function: {0}")]
    InvalidMembership(String),
    #[error("linguistic variable `{0}` defines no terms")]
    EmptyVariable(String),
    #[error("term `{0}` is defined more than once")]
    DuplicateTerm(String),
    #[error("unknown fuzzy term `{0}`")]
    UnknownTerm(String),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("dwell count must be at least 1")]
    ZeroDwell,
    #[error("fence `{fence}` got tick {found} which does not advance past {last}")]
    NonMonotonicTick { fence: String, last: Tick, found: Tick },
    #[error("duplicate fence id `{0}`")]
    DuplicateFenceId(String),

    #[error("unknown content ref `{0}`")]
    UnknownContentRef(String),
    #[error("duplicate content ref `{0}`")]
    DuplicateContentRef(String),
    #[error("content ref must not be empty")]
    EmptyContentRef,
    #[error("user id must not be empty")]
    EmptyUserId,
    #[error("user id too long for a beacon identity ({0} characters encoded)")]
    IdTooLong(usize),

    #[error("ttl must be at least 1")]
    ZeroTtl,
    #[error("payload is {0} characters, limit is {limit}", limit = crate::relay::MAX_PAYLOAD)]
    PayloadTooLong(usize),

    #[error("unknown device `{0}`")]
    UnknownDevice(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("invalid radio parameters: {0}")]
    InvalidRadioParams(String),
    #[error("invalid world: {0}")]
    InvalidWorld(String),
}
