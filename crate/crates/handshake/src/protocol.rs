//! The two-message key exchange plus key confirmation.
//!
//! ```text
//! initiator                               responder
//!   KeyShare        gid || pk        ->
//!                                    <-   CiphertextShare  gid || ct
//!                                    <-   Finished  H(k || 'S' || T)
//!   Finished  H(k || 'C' || T')      ->
//!                                    <-   close
//! ```
//!
//! `T` is every frame exchanged before the tag is computed, headers
//! included; `T'` additionally contains the responder's Finished.

use std::io::{Read, Write};
use std::sync::Arc;

use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};
use sntrup_core::kem::{decode_ct_for, decode_pk_for, encode_ct, encode_pk};
use sntrup_core::{decap, encap, keygen, KeyPair, KeyPool, ParamSet, SharedKey};

use crate::frame::{read_frame, write_frame, Frame, MsgType};
use crate::{HandshakeError, Reason, Result};

pub const RESPONDER_LABEL: u8 = 0x53;
pub const INITIATOR_LABEL: u8 = 0x43;
pub const TAG_LEN: usize = 32;

/// Where the initiator gets its key pair.
#[derive(Clone, Debug)]
pub enum KeySource {
    /// A fresh single [`keygen`] per handshake.
    Fresh,
    /// The next key pair from a shared pool.
    Pool(Arc<KeyPool>),
}

impl KeySource {
    /// A pool sized by `NTRUP_POOL_SIZE`.
    pub fn pool(params: ParamSet) -> Result<KeySource> {
        Ok(KeySource::Pool(Arc::new(KeyPool::new(params)?)))
    }

    pub fn is_pool(&self) -> bool {
        matches!(self, KeySource::Pool(_))
    }

    fn key_pair<R: RngCore + CryptoRng + ?Sized>(
        &self,
        params: ParamSet,
        rng: &mut R,
    ) -> Result<KeyPair> {
        match self {
            KeySource::Fresh => Ok(keygen(rng, params)?),
            KeySource::Pool(pool) if pool.params() == params => Ok(pool.take(rng)?),
            KeySource::Pool(pool) => Err(sntrup_core::Error::ParamMismatch {
                left: params.p(),
                right: pool.params().p(),
            }
            .into()),
        }
    }
}

pub fn finished_tag(key: &SharedKey, label: u8, transcript: &[u8]) -> [u8; TAG_LEN] {
    let mut h = Sha256::new();
    h.update(key.as_bytes());
    h.update([label]);
    h.update(transcript);
    h.finalize().into()
}

fn tags_equal(a: &[u8], b: &[u8; TAG_LEN]) -> bool {
    a.len() == TAG_LEN && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

fn kind_name(kind: MsgType) -> &'static str {
    match kind {
        MsgType::KeyShare => "KeyShare",
        MsgType::CiphertextShare => "CiphertextShare",
        MsgType::Finished => "Finished",
        MsgType::Error => "Error",
    }
}

fn decode_error(what: &'static str) -> impl Fn(sntrup_core::Error) -> HandshakeError {
    move |e| HandshakeError::Decode {
        what,
        detail: e.to_string(),
    }
}

struct Conn<'a, S: ?Sized> {
    stream: &'a mut S,
    transcript: Vec<u8>,
}

impl<S: Read + Write + ?Sized> Conn<'_, S> {
    fn send(&mut self, kind: MsgType, payload: Vec<u8>) -> Result<()> {
        let frame = Frame::new(kind, payload)?;
        write_frame(self.stream, &frame)?;
        self.transcript.extend_from_slice(&frame.to_bytes());
        Ok(())
    }

    fn recv(&mut self, expected: MsgType) -> Result<Vec<u8>> {
        let frame = read_frame(self.stream)?.ok_or(HandshakeError::Closed)?;
        if frame.kind == MsgType::Error {
            let code = frame.payload.first().copied().unwrap_or(0);
            return Err(HandshakeError::Peer(Reason::from_code(code)));
        }
        if frame.kind != expected {
            return Err(HandshakeError::UnexpectedMessage {
                expected: kind_name(expected),
                found: kind_name(frame.kind).into(),
            });
        }
        self.transcript.extend_from_slice(&frame.to_bytes());
        Ok(frame.payload)
    }

    /// Best-effort Error frame before giving up.
    fn abort(&mut self, err: HandshakeError) -> HandshakeError {
        if let Some(reason) = err.reason() {
            let frame = Frame {
                kind: MsgType::Error,
                payload: vec![reason.code()],
            };
            if let Err(e) = write_frame(self.stream, &frame) {
                log::debug!("could not send error frame: {e}");
            }
        }
        err
    }
}

/// Runs the initiating side: sends a public key, decapsulates, confirms.
/// Returns after the responder has closed the connection.
pub fn initiate<S, R>(
    stream: &mut S,
    params: ParamSet,
    source: &KeySource,
    rng: &mut R,
) -> Result<SharedKey>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let mut conn = Conn {
        stream,
        transcript: Vec::new(),
    };
    initiate_inner(&mut conn, params, source, rng).map_err(|e| conn.abort(e))
}

fn initiate_inner<S, R>(
    conn: &mut Conn<'_, S>,
    params: ParamSet,
    source: &KeySource,
    rng: &mut R,
) -> Result<SharedKey>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let kp = source.key_pair(params, rng)?;
    let gid = params.group_id();
    let mut share = vec![gid];
    share.extend_from_slice(&encode_pk(&kp.public));
    conn.send(MsgType::KeyShare, share)?;

    let payload = conn.recv(MsgType::CiphertextShare)?;
    let (&found, ct) = payload.split_first().ok_or(HandshakeError::Decode {
        what: "ciphertext share",
        detail: "empty payload".into(),
    })?;
    if found != gid {
        return Err(HandshakeError::GroupMismatch {
            expected: gid,
            found,
        });
    }
    let ct = decode_ct_for(params, ct).map_err(decode_error("ciphertext"))?;
    let key = decap(&kp.secret, &ct);

    let expected = finished_tag(&key, RESPONDER_LABEL, &conn.transcript);
    if !tags_equal(&conn.recv(MsgType::Finished)?, &expected) {
        return Err(HandshakeError::TagMismatch);
    }
    let own = finished_tag(&key, INITIATOR_LABEL, &conn.transcript);
    conn.send(MsgType::Finished, own.to_vec())?;

    match read_frame(conn.stream)? {
        None => Ok(key),
        Some(f) if f.kind == MsgType::Error => Err(HandshakeError::Peer(Reason::from_code(
            f.payload.first().copied().unwrap_or(0),
        ))),
        Some(f) => Err(HandshakeError::UnexpectedMessage {
            expected: "end of stream",
            found: kind_name(f.kind).into(),
        }),
    }
}

/// Runs the responding side for any of the `allowed` parameter sets:
/// encapsulates against the received key and confirms. The caller closes
/// the stream afterwards.
pub fn respond<S, R>(stream: &mut S, allowed: &[ParamSet], rng: &mut R) -> Result<SharedKey>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let mut conn = Conn {
        stream,
        transcript: Vec::new(),
    };
    respond_inner(&mut conn, allowed, rng).map_err(|e| conn.abort(e))
}

fn respond_inner<S, R>(conn: &mut Conn<'_, S>, allowed: &[ParamSet], rng: &mut R) -> Result<SharedKey>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let payload = conn.recv(MsgType::KeyShare)?;
    let (&gid, pk) = payload.split_first().ok_or(HandshakeError::Decode {
        what: "key share",
        detail: "empty payload".into(),
    })?;
    let params = *allowed
        .iter()
        .find(|p| p.group_id() == gid)
        .ok_or(HandshakeError::UnsupportedGroup(gid))?;
    let pk = decode_pk_for(params, pk).map_err(decode_error("public key"))?;
    let (ct, key) = encap(&pk, rng)?;

    let mut share = vec![gid];
    share.extend_from_slice(&encode_ct(&ct));
    conn.send(MsgType::CiphertextShare, share)?;
    let tag = finished_tag(&key, RESPONDER_LABEL, &conn.transcript);
    conn.send(MsgType::Finished, tag.to_vec())?;

    let expected = finished_tag(&key, INITIATOR_LABEL, &conn.transcript);
    if !tags_equal(&conn.recv(MsgType::Finished)?, &expected) {
        return Err(HandshakeError::TagMismatch);
    }
    Ok(key)
}
