//! Simple Binary Communication Protocol.
//!
//! Frames are `[FF, class, id, len, instruction, params.., checksum]` with
//! `len = params + 2` and `checksum = !(id + len + instruction + Σparams)`.
//! The class byte sits outside the checksum so that class `0xFF` frames are
//! byte-identical to Dynamixel v1 packets.

mod bus;
mod frame;

use thiserror::Error;

pub use bus::{
    demo, write_trace_csv, Actor, Bus, BusConfig, Event, EventKind, FaultMode, FrameOutcome,
    Outcome, PacketGroup, SimSlave, TraceRecord, TransactReport, Transmission, BITS_PER_BYTE,
    MAX_GROUP,
};
pub use frame::{
    checksum, class, class_name, decode, decode_packet, decode_stream, decode_with, encode,
    instruction, instruction_name, parse_hex, status, ClassPolicy, Frame, BROADCAST_ID, MAX_PARAMS,
    OVERHEAD, PREAMBLE,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("expected preamble 0xFF, found 0x{0:02X}")]
    BadPreamble(u8),
    #[error("frame truncated, {needed} more byte(s) needed")]
    Truncated { needed: usize },
    #[error("checksum mismatch: expected 0x{expected:02X}, got 0x{got:02X}")]
    ChecksumMismatch { expected: u8, got: u8 },
    #[error("length byte 0x{0:02X} out of range")]
    InvalidLength(u8),
    #[error("unregistered class id 0x{0:02X}")]
    UnknownClass(u8),
    #[error("{0} byte(s) after the frame")]
    TrailingBytes(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SbcpError {
    #[error("{0} parameter bytes exceed the 250-byte limit")]
    FrameTooLarge(usize),
    #[error("group of {0} frames exceeds the limit of 8")]
    GroupTooLarge(usize),
    #[error("invalid packet group: {0}")]
    InvalidGroup(String),
    #[error("duplicate slave class 0x{class_id:02X} id 0x{device_id:02X}")]
    DuplicateSlave { class_id: u8, device_id: u8 },
    #[error("invalid bus configuration: {0}")]
    InvalidConfig(String),
    #[error("hex input: {0}")]
    Hex(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}
