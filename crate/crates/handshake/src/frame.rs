//! Framing: a type byte, a big-endian `u16` payload length, the payload.

use std::io::{self, Read, Write};

use crate::{HandshakeError, Result};

/// Largest frame on the wire, header included.
pub const MAX_FRAME: usize = 4096;
pub const HEADER_LEN: usize = 3;
pub const MAX_PAYLOAD: usize = MAX_FRAME - HEADER_LEN;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgType {
    KeyShare = 0x01,
    CiphertextShare = 0x02,
    Finished = 0x03,
    Error = 0x7F,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Option<MsgType> {
        match b {
            0x01 => Some(MsgType::KeyShare),
            0x02 => Some(MsgType::CiphertextShare),
            0x03 => Some(MsgType::Finished),
            0x7F => Some(MsgType::Error),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub kind: MsgType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: MsgType, payload: Vec<u8>) -> Result<Frame> {
        if payload.len() > MAX_PAYLOAD {
            return Err(HandshakeError::FrameTooLarge(HEADER_LEN + payload.len()));
        }
        Ok(Frame { kind, payload })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.push(self.kind as u8);
        out.extend_from_slice(&(self.payload.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }
}

pub(crate) fn io_error(e: io::Error) -> HandshakeError {
    match e.kind() {
        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => HandshakeError::Timeout,
        io::ErrorKind::UnexpectedEof => HandshakeError::Truncated,
        _ => HandshakeError::Io(e),
    }
}

/// Reads one frame. Returns `Ok(None)` on a clean end of stream before
/// the first header byte.
pub fn read_frame<R: Read + ?Sized>(r: &mut R) -> Result<Option<Frame>> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        match r.read(&mut header[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(HandshakeError::Truncated),
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(io_error(e)),
        }
    }
    let kind = MsgType::from_byte(header[0]).ok_or(HandshakeError::UnknownMessage(header[0]))?;
    let len = u16::from_be_bytes([header[1], header[2]]) as usize;
    if len > MAX_PAYLOAD {
        return Err(HandshakeError::FrameTooLarge(HEADER_LEN + len));
    }
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload).map_err(io_error)?;
    Ok(Some(Frame { kind, payload }))
}

pub fn write_frame<W: Write + ?Sized>(w: &mut W, frame: &Frame) -> Result<()> {
    w.write_all(&frame.to_bytes()).map_err(io_error)?;
    w.flush().map_err(io_error)
}
