//! A minimal KEM key exchange over TCP, a concurrent responder and a
//! sequential connection timer.
//!
//! The initiator sends a public key, the responder encapsulates against it
//! and both sides confirm the session key with tags over the transcript.
//! The protocol code treats key shares as opaque bytes, so every parameter
//! set runs through the same path. There is no authentication.

mod error;
pub mod frame;
pub mod protocol;
pub mod server;
pub mod timer;

pub use error::{HandshakeError, Reason, Result};
pub use protocol::{initiate, respond, KeySource};
pub use server::{Server, ServerHandle, ServerStats};
pub use timer::{timer_run, TimerReport};
