use std::io;

use thiserror::Error;

pub type Result<T, E = HandshakeError> = std::result::Result<T, E>;

/// Reason byte carried by an `Error` frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    UnsupportedGroup,
    Decode,
    Tag,
    UnexpectedMessage,
    GroupMismatch,
    Internal,
    Other(u8),
}

impl Reason {
    pub fn code(self) -> u8 {
        match self {
            Reason::UnsupportedGroup => 1,
            Reason::Decode => 2,
            Reason::Tag => 3,
            Reason::UnexpectedMessage => 4,
            Reason::GroupMismatch => 5,
            Reason::Internal => 6,
            Reason::Other(c) => c,
        }
    }

    pub fn from_code(c: u8) -> Reason {
        match c {
            1 => Reason::UnsupportedGroup,
            2 => Reason::Decode,
            3 => Reason::Tag,
            4 => Reason::UnexpectedMessage,
            5 => Reason::GroupMismatch,
            6 => Reason::Internal,
            c => Reason::Other(c),
        }
    }
}

#[derive(Debug, Error)]
pub enum HandshakeError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("timed out waiting for the peer")]
    Timeout,
    #[error("connection closed in the middle of a frame")]
    Truncated,
    #[error("peer closed the connection")]
    Closed,
    #[error("frame of {0} bytes exceeds the 4096-byte limit")]
    FrameTooLarge(usize),
    #[error("unknown message type {0:#04x}")]
    UnknownMessage(u8),
    #[error("unexpected message: expected {expected}, got {found}")]
    UnexpectedMessage {
        expected: &'static str,
        found: String,
    },
    #[error("malformed {what}: {detail}")]
    Decode { what: &'static str, detail: String },
    #[error("unsupported group {0:#04x}")]
    UnsupportedGroup(u8),
    #[error("group mismatch: expected {expected:#04x}, got {found:#04x}")]
    GroupMismatch { expected: u8, found: u8 },
    #[error("Finished tag does not verify")]
    TagMismatch,
    #[error("peer aborted the handshake (reason {0:?})")]
    Peer(Reason),
    #[error(transparent)]
    Core(#[from] sntrup_core::Error),
    #[error("sample {sample}, connection {connection}: {source}")]
    Sample {
        sample: usize,
        connection: usize,
        #[source]
        source: Box<HandshakeError>,
    },
}

impl HandshakeError {
    /// Reason to report to the peer, or `None` when no Error frame should
    /// be sent (the peer already aborted or the transport is gone).
    pub fn reason(&self) -> Option<Reason> {
        match self {
            HandshakeError::Io(_)
            | HandshakeError::Timeout
            | HandshakeError::Closed
            | HandshakeError::Peer(_) => None,
            HandshakeError::Truncated
            | HandshakeError::FrameTooLarge(_)
            | HandshakeError::UnknownMessage(_)
            | HandshakeError::Decode { .. } => Some(Reason::Decode),
            HandshakeError::UnexpectedMessage { .. } => Some(Reason::UnexpectedMessage),
            HandshakeError::UnsupportedGroup(_) => Some(Reason::UnsupportedGroup),
            HandshakeError::GroupMismatch { .. } => Some(Reason::GroupMismatch),
            HandshakeError::TagMismatch => Some(Reason::Tag),
            HandshakeError::Core(_) | HandshakeError::Sample { .. } => Some(Reason::Internal),
        }
    }
}
