use std::fmt;

use super::{DecodeError, SbcpError};

pub const PREAMBLE: u8 = 0xFF;
pub const MAX_PARAMS: usize = 250;
/// Device id addressing every slave; broadcasts get no reply.
pub const BROADCAST_ID: u8 = 0xFE;
/// Frame bytes besides the parameters.
pub const OVERHEAD: usize = 6;

pub mod instruction {
    pub const PING: u8 = 0x01;
    pub const READ: u8 = 0x02;
    pub const WRITE: u8 = 0x03;
    pub const SYNC_WRITE: u8 = 0x83;
}

/// Status error bits, as in Dynamixel v1 status packets.
pub mod status {
    pub const OK: u8 = 0x00;
    pub const RANGE_ERROR: u8 = 0x08;
    pub const CHECKSUM_ERROR: u8 = 0x10;
    pub const INSTRUCTION_ERROR: u8 = 0x40;
}

pub mod class {
    pub const MASTER_BOARD: u8 = 0x03;
    pub const MOTOR_DRIVER: u8 = 0x10;
    pub const POWER_BOARD: u8 = 0x21;
    /// Legacy Dynamixel devices: the frame is then a plain v1 packet.
    pub const BIOLOID: u8 = 0xFF;
}

/// One SBCP packet. Length and checksum are derived on encode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    pub class_id: u8,
    pub device_id: u8,
    /// Instruction code, or the error byte of a status frame.
    pub instruction: u8,
    pub params: Vec<u8>,
}

impl Frame {
    pub fn new(class_id: u8, device_id: u8, instruction: u8, params: Vec<u8>) -> Self {
        Self {
            class_id,
            device_id,
            instruction,
            params,
        }
    }

    pub fn ping(class_id: u8, device_id: u8) -> Self {
        Self::new(class_id, device_id, instruction::PING, Vec::new())
    }

    pub fn read(class_id: u8, device_id: u8, address: u8, count: u8) -> Self {
        Self::new(class_id, device_id, instruction::READ, vec![address, count])
    }

    pub fn write(class_id: u8, device_id: u8, address: u8, data: &[u8]) -> Self {
        let mut params = vec![address];
        params.extend_from_slice(data);
        Self::new(class_id, device_id, instruction::WRITE, params)
    }

    /// Broadcast write of `len` bytes at `address` to several devices:
    /// params are `address, len, (id, data...)*`.
    pub fn sync_write(
        class_id: u8,
        address: u8,
        entries: &[(u8, Vec<u8>)],
    ) -> Result<Self, SbcpError> {
        let len = entries.first().map_or(0, |e| e.1.len());
        if entries.iter().any(|e| e.1.len() != len) {
            return Err(SbcpError::InvalidGroup(
                "sync write entries must have equal data length".into(),
            ));
        }
        let mut params = vec![address, len as u8];
        for (id, data) in entries {
            params.push(*id);
            params.extend_from_slice(data);
        }
        Ok(Self::new(
            class_id,
            BROADCAST_ID,
            instruction::SYNC_WRITE,
            params,
        ))
    }

    /// Status reply; the error byte takes the instruction slot.
    pub fn status(class_id: u8, device_id: u8, error: u8, params: Vec<u8>) -> Self {
        Self::new(class_id, device_id, error, params)
    }

    /// Value of the length byte.
    pub fn length(&self) -> usize {
        self.params.len() + 2
    }

    pub fn wire_len(&self) -> usize {
        self.params.len() + OVERHEAD
    }

    /// Whether the addressed slave is expected to answer.
    pub fn expects_response(&self) -> bool {
        self.device_id != BROADCAST_ID && self.instruction != instruction::SYNC_WRITE
    }

    pub fn checksum(&self) -> u8 {
        checksum(
            self.device_id,
            self.length() as u8,
            self.instruction,
            &self.params,
        )
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "class 0x{:02X} ({}), id 0x{:02X}, instruction 0x{:02X} ({}), {} param(s)",
            self.class_id,
            class_name(self.class_id),
            self.device_id,
            self.instruction,
            instruction_name(self.instruction),
            self.params.len()
        )?;
        if !self.params.is_empty() {
            write!(f, ": {}", hex_string(&self.params, " "))?;
        }
        write!(f, ", checksum 0x{:02X}", self.checksum())
    }
}

pub fn class_name(c: u8) -> &'static str {
    match c {
        class::MASTER_BOARD => "master board",
        class::MOTOR_DRIVER => "motor driver",
        class::POWER_BOARD => "power board",
        class::BIOLOID => "bioloid",
        _ => "unregistered",
    }
}

pub fn instruction_name(i: u8) -> &'static str {
    match i {
        instruction::PING => "PING",
        instruction::READ => "READ",
        instruction::WRITE => "WRITE",
        instruction::SYNC_WRITE => "SYNC_WRITE",
        _ => "other",
    }
}

pub(crate) fn hex_string(bytes: &[u8], sep: &str) -> String {
    bytes
        .iter()
        .map(|b| format!("{b:02X}"))
        .collect::<Vec<_>>()
        .join(sep)
}

/// Complement of the byte sum of id, length, instruction and params.
/// The class byte is not covered.
pub fn checksum(device_id: u8, length: u8, instruction: u8, params: &[u8]) -> u8 {
    let sum = params.iter().fold(
        device_id.wrapping_add(length).wrapping_add(instruction),
        |acc, &b| acc.wrapping_add(b),
    );
    !sum
}

pub fn encode(frame: &Frame) -> Result<Vec<u8>, SbcpError> {
    if frame.params.len() > MAX_PARAMS {
        return Err(SbcpError::FrameTooLarge(frame.params.len()));
    }
    let mut out = Vec::with_capacity(frame.wire_len());
    out.extend_from_slice(&[
        PREAMBLE,
        frame.class_id,
        frame.device_id,
        frame.length() as u8,
        frame.instruction,
    ]);
    out.extend_from_slice(&frame.params);
    out.push(frame.checksum());
    Ok(out)
}

/// Class ids a decoder accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassPolicy {
    /// Only the listed classes. Registered ids are pairwise at least two
    /// bits apart, so a single bit flip of the unchecksummed class byte
    /// always lands on an unknown class.
    Registered(Vec<u8>),
    Any,
}

impl Default for ClassPolicy {
    fn default() -> Self {
        ClassPolicy::Registered(vec![
            class::MASTER_BOARD,
            class::MOTOR_DRIVER,
            class::POWER_BOARD,
            class::BIOLOID,
        ])
    }
}

impl ClassPolicy {
    pub fn accepts(&self, c: u8) -> bool {
        match self {
            ClassPolicy::Registered(list) => list.contains(&c),
            ClassPolicy::Any => true,
        }
    }
}

/// Decodes one frame from the start of `buf` with the default class policy.
/// Returns the result and the number of bytes consumed: a full frame on
/// success, 0 when more bytes are needed, 1 on any other error so that
/// the caller resynchronizes on the next byte.
pub fn decode(buf: &[u8]) -> (Result<Frame, DecodeError>, usize) {
    decode_with(buf, &ClassPolicy::default())
}

pub fn decode_with(buf: &[u8], policy: &ClassPolicy) -> (Result<Frame, DecodeError>, usize) {
    if buf.is_empty() {
        return (Err(DecodeError::Truncated { needed: 1 }), 0);
    }
    if buf[0] != PREAMBLE {
        return (Err(DecodeError::BadPreamble(buf[0])), 1);
    }
    if buf.len() < 4 {
        return (
            Err(DecodeError::Truncated {
                needed: 4 - buf.len(),
            }),
            0,
        );
    }
    let class_id = buf[1];
    if !policy.accepts(class_id) {
        return (Err(DecodeError::UnknownClass(class_id)), 1);
    }
    let length = buf[3] as usize;
    if !(2..=MAX_PARAMS + 2).contains(&length) {
        return (Err(DecodeError::InvalidLength(buf[3])), 1);
    }
    let total = 4 + length;
    if buf.len() < total {
        return (
            Err(DecodeError::Truncated {
                needed: total - buf.len(),
            }),
            0,
        );
    }
    let device_id = buf[2];
    let instruction = buf[4];
    let params = &buf[5..total - 1];
    let expected = checksum(device_id, buf[3], instruction, params);
    let got = buf[total - 1];
    if expected != got {
        return (Err(DecodeError::ChecksumMismatch { expected, got }), 1);
    }
    (
        Ok(Frame::new(
            class_id,
            device_id,
            instruction,
            params.to_vec(),
        )),
        total,
    )
}

/// Decodes a buffer that must hold exactly one frame.
pub fn decode_packet(buf: &[u8]) -> Result<Frame, DecodeError> {
    let (res, used) = decode(buf);
    let frame = res?;
    if used != buf.len() {
        return Err(DecodeError::TrailingBytes(buf.len() - used));
    }
    Ok(frame)
}

/// Scans a finite buffer, returning every frame recovered and the errors
/// skipped on the way. A truncated tail is skipped byte by byte.
pub fn decode_stream(buf: &[u8], policy: &ClassPolicy) -> (Vec<Frame>, Vec<DecodeError>) {
    let mut frames = Vec::new();
    let mut errors = Vec::new();
    let mut pos = 0;
    while pos < buf.len() {
        let (res, used) = decode_with(&buf[pos..], policy);
        match res {
            Ok(f) => frames.push(f),
            Err(e) => errors.push(e),
        }
        pos += used.max(1);
    }
    (frames, errors)
}

/// Parses hex text such as `FF10010201FB` or `ff 10 01`.
pub fn parse_hex(text: &str) -> Result<Vec<u8>, SbcpError> {
    let clean: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ':' && *c != ',')
        .collect();
    let clean = clean.strip_prefix("0x").unwrap_or(&clean);
    if !clean.len().is_multiple_of(2) {
        return Err(SbcpError::Hex("odd number of hex digits".into()));
    }
    (0..clean.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&clean[i..i + 2], 16)
                .map_err(|_| SbcpError::Hex(format!("invalid hex byte {:?}", &clean[i..i + 2])))
        })
        .collect()
}
