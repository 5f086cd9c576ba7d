//! Discrete-event model of the half-duplex RS-485 bus.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frame::{decode_packet, encode, hex_string, instruction, status, Frame, BROADCAST_ID};
use super::{DecodeError, SbcpError};

/// Bits on the wire per byte: start, 8 data, stop.
pub const BITS_PER_BYTE: f64 = 10.0;
/// Most frames the master sends in one group.
pub const MAX_GROUP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusConfig {
    /// Line rate (bit/s).
    pub baud: f64,
    /// Master-side delivery latency (s).
    pub base_latency: f64,
    /// Upper bound of the uniform master-side jitter (s).
    pub jitter_max: f64,
    /// Time the master waits for a reply to start after its request is
    /// delivered (s).
    pub slave_timeout: f64,
    pub rng_seed: u64,
}

impl Default for BusConfig {
    fn default() -> Self {
        Self {
            baud: 3.3e6,
            base_latency: 12e-6,
            jitter_max: 2.2e-6,
            slave_timeout: 100e-6,
            rng_seed: 0,
        }
    }
}

impl BusConfig {
    pub fn validate(&self) -> Result<(), SbcpError> {
        let ok = self.baud > 0.0
            && self.baud.is_finite()
            && self.base_latency >= 0.0
            && self.jitter_max >= 0.0
            && self.slave_timeout > 0.0
            && self.slave_timeout.is_finite();
        if ok {
            Ok(())
        } else {
            Err(SbcpError::InvalidConfig(format!("{self:?}")))
        }
    }

    /// Time to clock `bytes` onto the wire (s).
    pub fn wire_time(&self, bytes: usize) -> f64 {
        bytes as f64 * BITS_PER_BYTE / self.baud
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultMode {
    Responsive,
    /// Never replies.
    Silent,
    /// Replies with a damaged checksum.
    Corrupting,
}

/// Simulated slave with a byte-addressed register map.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSlave {
    pub class_id: u8,
    pub device_id: u8,
    pub registers: Vec<u8>,
    /// Delay between receiving a request and starting the reply (s).
    pub response_latency: f64,
    pub fault: FaultMode,
}

impl SimSlave {
    pub fn new(class_id: u8, device_id: u8) -> Self {
        Self {
            class_id,
            device_id,
            registers: vec![0; 256],
            response_latency: 5e-6,
            fault: FaultMode::Responsive,
        }
    }

    pub fn with_fault(mut self, fault: FaultMode) -> Self {
        self.fault = fault;
        self
    }

    pub fn with_latency(mut self, latency: f64) -> Self {
        self.response_latency = latency;
        self
    }

    fn addressed_by(&self, f: &Frame) -> bool {
        f.class_id == self.class_id
            && (f.device_id == self.device_id || f.device_id == BROADCAST_ID)
    }

    /// Executes a request and returns the status reply, if any.
    pub fn handle(&mut self, f: &Frame) -> Option<Frame> {
        if !self.addressed_by(f) {
            return None;
        }
        let reply =
            |err: u8, params: Vec<u8>| Frame::status(self.class_id, self.device_id, err, params);
        let out = match f.instruction {
            instruction::PING => reply(status::OK, Vec::new()),
            instruction::READ => match f.params.as_slice() {
                &[addr, count] if addr as usize + count as usize <= self.registers.len() => {
                    let a = addr as usize;
                    reply(status::OK, self.registers[a..a + count as usize].to_vec())
                }
                _ => reply(status::RANGE_ERROR, Vec::new()),
            },
            instruction::WRITE => match f.params.split_first() {
                Some((&addr, data)) if addr as usize + data.len() <= self.registers.len() => {
                    let a = addr as usize;
                    self.registers[a..a + data.len()].copy_from_slice(data);
                    reply(status::OK, Vec::new())
                }
                _ => reply(status::RANGE_ERROR, Vec::new()),
            },
            instruction::SYNC_WRITE => {
                self.apply_sync_write(&f.params);
                return None;
            }
            _ => reply(status::INSTRUCTION_ERROR, Vec::new()),
        };
        f.expects_response().then_some(out)
    }

    fn apply_sync_write(&mut self, params: &[u8]) {
        let (addr, len) = match params {
            [a, l, ..] => (*a as usize, *l as usize),
            _ => return,
        };
        for entry in params[2..].chunks(len + 1) {
            if entry.len() == len + 1
                && entry[0] == self.device_id
                && addr + len <= self.registers.len()
            {
                self.registers[addr..addr + len].copy_from_slice(&entry[1..]);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Actor {
    Master,
    Slave { class_id: u8, device_id: u8 },
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Actor::Master => f.write_str("master"),
            Actor::Slave {
                class_id,
                device_id,
            } => write!(f, "slave_{class_id:02X}_{device_id:02X}"),
        }
    }
}

/// One transmission occupying the wire over `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub actor: Actor,
    pub bytes: Vec<u8>,
    pub start: f64,
    pub end: f64,
    pub corrupted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// A transmission reaches its receivers.
    Deliver { tx: usize },
    /// A slave starts its reply.
    SlaveReply { slave: usize, seq: usize },
    /// The master's wait for frame `index` of the current group expires.
    Timeout { index: usize },
}

/// Scheduled event; ordered by time, then by scheduling order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed so the max-heap pops the earliest event
        other
            .t
            .total_cmp(&self.t)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub actor: String,
    pub event: &'static str,
    pub bytes: Vec<u8>,
}

pub fn write_trace_csv<W: io::Write>(out: W, trace: &[TraceRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_us", "actor", "event", "bytes_hex"])?;
    for r in trace {
        w.write_record([
            format!("{:.4}", r.t * 1e6),
            r.actor.clone(),
            r.event.to_string(),
            hex_string(&r.bytes, ""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Response(Frame),
    Timeout,
    /// A reply arrived damaged, by collision or decode failure.
    Corrupt(Option<DecodeError>),
    /// Broadcasts and sync writes get no reply.
    NoResponseExpected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub outcome: Outcome,
    pub sent_at: f64,
    pub completed_at: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransactReport {
    pub outcomes: Vec<FrameOutcome>,
    pub started_at: f64,
    pub finished_at: f64,
}

impl TransactReport {
    pub fn elapsed(&self) -> f64 {
        self.finished_at - self.started_at
    }
}

/// Frames the master sends back to back, 1 to 8 of them.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketGroup {
    frames: Vec<Frame>,
    expect_reply: Vec<bool>,
}

impl PacketGroup {
    pub fn new(frames: Vec<Frame>) -> Result<Self, SbcpError> {
        let flags = frames.iter().map(Frame::expects_response).collect();
        Self::with_flags(frames, flags)
    }

    pub fn with_flags(frames: Vec<Frame>, expect_reply: Vec<bool>) -> Result<Self, SbcpError> {
        if frames.len() > MAX_GROUP {
            return Err(SbcpError::GroupTooLarge(frames.len()));
        }
        if frames.is_empty() {
            return Err(SbcpError::InvalidGroup("empty group".into()));
        }
        if frames.len() != expect_reply.len() {
            return Err(SbcpError::InvalidGroup("one reply flag per frame".into()));
        }
        for f in &frames {
            encode(f)?;
        }
        Ok(Self {
            frames,
            expect_reply,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Awaiting {
    index: usize,
    class_id: u8,
    device_id: u8,
    reply_started: bool,
}

/// Bus with its slaves, clock, event queue and trace.
#[derive(Debug, Clone)]
pub struct Bus {
    cfg: BusConfig,
    rng: ChaCha8Rng,
    slaves: Vec<SimSlave>,
    queue: BinaryHeap<Event>,
    next_seq: u64,
    now: f64,
    transmissions: Vec<Transmission>,
    pending_replies: Vec<Option<(usize, Vec<u8>)>>,
    trace: Vec<TraceRecord>,
    awaiting: Option<Awaiting>,
    inbox: Vec<(usize, Outcome, f64)>,
}

impl Bus {
    pub fn new(cfg: BusConfig, slaves: Vec<SimSlave>) -> Result<Self, SbcpError> {
        cfg.validate()?;
        for (i, a) in slaves.iter().enumerate() {
            if slaves[i + 1..]
                .iter()
                .any(|b| a.class_id == b.class_id && a.device_id == b.device_id)
            {
                return Err(SbcpError::DuplicateSlave {
                    class_id: a.class_id,
                    device_id: a.device_id,
                });
            }
        }
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            cfg,
            slaves,
            queue: BinaryHeap::new(),
            next_seq: 0,
            now: 0.0,
            transmissions: Vec::new(),
            pending_replies: Vec::new(),
            trace: Vec::new(),
            awaiting: None,
            inbox: Vec::new(),
        })
    }

    pub fn config(&self) -> &BusConfig {
        &self.cfg
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn slaves(&self) -> &[SimSlave] {
        &self.slaves
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn transmissions(&self) -> &[Transmission] {
        &self.transmissions
    }

    fn schedule(&mut self, t: f64, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Event { t, seq, kind });
    }

    fn record(&mut self, t: f64, actor: Actor, event: &'static str, bytes: Vec<u8>) {
        self.trace.push(TraceRecord {
            t,
            actor: actor.to_string(),
            event,
            bytes,
        });
    }

    fn jitter(&mut self) -> f64 {
        if self.cfg.jitter_max > 0.0 {
            self.rng.gen::<f64>() * self.cfg.jitter_max
        } else {
            0.0
        }
    }

    /// Puts `bytes` on the wire at `start` and schedules their delivery.
    /// Overlapping transmissions are all marked corrupted. Returns the
    /// delivery time.
    pub fn transmit(&mut self, actor: Actor, bytes: Vec<u8>, start: f64) -> f64 {
        let end = start + self.cfg.wire_time(bytes.len());
        let delivery = match actor {
            Actor::Master => end + self.cfg.base_latency + self.jitter(),
            Actor::Slave { .. } => end,
        };
        let id = self.transmissions.len();
        let mut corrupted = false;
        for k in 0..id {
            let other = &mut self.transmissions[k];
            if other.start < end && start < other.end {
                other.corrupted = true;
                corrupted = true;
            }
        }
        if corrupted {
            self.record(start, actor, "collision", Vec::new());
        }
        self.record(start, actor, "tx_start", bytes.clone());
        self.transmissions.push(Transmission {
            actor,
            bytes,
            start,
            end,
            corrupted,
        });
        self.schedule(delivery, EventKind::Deliver { tx: id });
        delivery
    }

    /// Pops and applies the next event, advancing the clock.
    pub fn bus_step(&mut self) -> Option<Event> {
        let ev = self.queue.pop()?;
        self.now = self.now.max(ev.t);
        match ev.kind {
            EventKind::Deliver { tx } => self.on_deliver(ev.t, tx),
            EventKind::SlaveReply { slave, seq } => {
                if let Some((s, bytes)) = self.pending_replies.get_mut(seq).and_then(Option::take) {
                    debug_assert_eq!(s, slave);
                    let sl = &self.slaves[slave];
                    let actor = Actor::Slave {
                        class_id: sl.class_id,
                        device_id: sl.device_id,
                    };
                    if let Some(a) = self.awaiting.as_mut() {
                        if a.class_id == sl.class_id && a.device_id == sl.device_id {
                            a.reply_started = true;
                        }
                    }
                    self.transmit(actor, bytes, ev.t);
                }
            }
            EventKind::Timeout { index } => {
                let expired =
                    matches!(&self.awaiting, Some(a) if a.index == index && !a.reply_started);
                if expired {
                    self.awaiting = None;
                    self.record(ev.t, Actor::Master, "timeout", Vec::new());
                    self.inbox.push((index, Outcome::Timeout, ev.t));
                }
            }
        }
        Some(ev)
    }

    fn on_deliver(&mut self, t: f64, tx: usize) {
        let Transmission {
            actor,
            bytes,
            corrupted,
            ..
        } = self.transmissions[tx].clone();
        // the collision flag may have been set after scheduling
        self.record(
            t,
            actor,
            if corrupted {
                "deliver_corrupt"
            } else {
                "deliver"
            },
            bytes.clone(),
        );
        match actor {
            Actor::Master => {
                if corrupted {
                    return;
                }
                let Ok(frame) = decode_packet(&bytes) else {
                    return;
                };
                for i in 0..self.slaves.len() {
                    if let Some(reply) = self.slaves[i].handle(&frame) {
                        let mut out = encode(&reply).expect("status frames fit");
                        match self.slaves[i].fault {
                            FaultMode::Silent => continue,
                            FaultMode::Corrupting => {
                                let last = out.len() - 1;
                                out[last] ^= 0x5A;
                            }
                            FaultMode::Responsive => {}
                        }
                        let seq = self.pending_replies.len();
                        self.pending_replies.push(Some((i, out)));
                        let at = t + self.slaves[i].response_latency;
                        self.schedule(at, EventKind::SlaveReply { slave: i, seq });
                    }
                }
            }
            Actor::Slave {
                class_id,
                device_id,
            } => {
                let Some(a) = self.awaiting.clone() else {
                    self.record(t, Actor::Master, "rx_ignored", Vec::new());
                    return;
                };
                if a.class_id != class_id || a.device_id != device_id {
                    self.record(t, Actor::Master, "rx_ignored", Vec::new());
                    return;
                }
                self.awaiting = None;
                let outcome = if corrupted {
                    Outcome::Corrupt(None)
                } else {
                    match decode_packet(&bytes) {
                        Ok(f) => Outcome::Response(f),
                        Err(e) => Outcome::Corrupt(Some(e)),
                    }
                };
                self.inbox.push((a.index, outcome, t));
            }
        }
    }

    /// Runs queued events until the queue is empty.
    pub fn drain(&mut self) {
        while self.bus_step().is_some() {}
    }

    /// Sends a group of 1 to 8 frames strictly one after another and
    /// collects one outcome per frame, in order.
    pub fn transact(&mut self, frames: &[Frame]) -> Result<TransactReport, SbcpError> {
        let group = PacketGroup::new(frames.to_vec())?;
        self.transact_group(&group)
    }

    pub fn transact_group(&mut self, group: &PacketGroup) -> Result<TransactReport, SbcpError> {
        let started_at = self.now;
        let mut t = started_at;
        let mut outcomes = Vec::with_capacity(group.frames.len());
        for (index, (frame, &expect)) in group.frames.iter().zip(&group.expect_reply).enumerate() {
            let bytes = encode(frame)?;
            let delivered = self.transmit(Actor::Master, bytes, t);
            if !expect {
                // let the request land before moving on
                while self.queue.peek().is_some_and(|e| e.t <= delivered) {
                    self.bus_step();
                }
                self.now = self.now.max(delivered);
                outcomes.push(FrameOutcome {
                    outcome: Outcome::NoResponseExpected,
                    sent_at: t,
                    completed_at: delivered,
                });
                t = delivered;
                continue;
            }
            self.awaiting = Some(Awaiting {
                index,
                class_id: frame.class_id,
                device_id: frame.device_id,
                reply_started: false,
            });
            self.schedule(
                delivered + self.cfg.slave_timeout,
                EventKind::Timeout { index },
            );
            let (outcome, done) = loop {
                if let Some(pos) = self.inbox.iter().position(|m| m.0 == index) {
                    let (_, o, at) = self.inbox.remove(pos);
                    break (o, at);
                }
                if self.bus_step().is_none() {
                    // nothing left that could complete the wait
                    break (Outcome::Timeout, self.now);
                }
            };
            self.inbox.clear();
            outcomes.push(FrameOutcome {
                outcome,
                sent_at: t,
                completed_at: done,
            });
            t = done;
        }
        Ok(TransactReport {
            outcomes,
            started_at,
            finished_at: t,
        })
    }
}

/// Bus with `n` motor-driver slaves (ids 1..=n) answering a ping and a
/// register read each, for demonstrations and benchmarks.
pub fn demo(n: usize, cfg: BusConfig) -> Result<(TransactReport, Bus), SbcpError> {
    use super::frame::class::MOTOR_DRIVER;
    if n == 0 || n > MAX_GROUP {
        return Err(SbcpError::InvalidGroup(format!(
            "demo needs 1 to {MAX_GROUP} slaves, got {n}"
        )));
    }
    let slaves = (1..=n as u8)
        .map(|id| {
            let mut s = SimSlave::new(MOTOR_DRIVER, id);
            s.registers[0x24] = id;
            s.registers[0x25] = 0x02;
            s
        })
        .collect();
    let mut bus = Bus::new(cfg, slaves)?;
    let frames: Vec<Frame> = (1..=n as u8)
        .map(|id| Frame::read(MOTOR_DRIVER, id, 0x24, 2))
        .collect();
    let report = bus.transact(&frames)?;
    Ok((report, bus))
}
