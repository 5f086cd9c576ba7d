use std::fmt;
use std::str::FromStr;

/// One of the four legs. Ordering (`LF, RF, LH, RH`) is the index order used
/// for every per-leg array in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LegId {
    LF,
    RF,
    LH,
    RH,
}

impl LegId {
    pub const ALL: [LegId; 4] = [LegId::LF, LegId::RF, LegId::LH, LegId::RH];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_front(self) -> bool {
        matches!(self, LegId::LF | LegId::RF)
    }

    pub fn is_left(self) -> bool {
        matches!(self, LegId::LF | LegId::LH)
    }

    /// Trot phase of the leg's hip oscillator relative to LF (rad).
    /// Diagonal pairs share a phase; adjacent legs are in antiphase.
    pub fn trot_phase(self) -> f64 {
        match self {
            LegId::LF | LegId::RH => 0.0,
            LegId::RF | LegId::LH => std::f64::consts::PI,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LegId::LF => "LF",
            LegId::RF => "RF",
            LegId::LH => "LH",
            LegId::RH => "RH",
        }
    }
}

impl fmt::Display for LegId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LegId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "LF" => Ok(LegId::LF),
            "RF" => Ok(LegId::RF),
            "LH" => Ok(LegId::LH),
            "RH" => Ok(LegId::RH),
            other => Err(format!("unknown leg `{other}`")),
        }
    }
}
