use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of Level-2A spectral bands used as features.
pub const BAND_COUNT: usize = 12;

/// Sentinel-2 Level-2A band identifiers. B10 (cirrus) is not distributed at
/// Level-2A and has no variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BandId {
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
    B8A,
    B9,
    B11,
    B12,
}

impl BandId {
    /// Canonical feature order: column `i` of every feature vector is `ALL[i]`.
    pub const ALL: [BandId; BAND_COUNT] = [
        BandId::B1,
        BandId::B2,
        BandId::B3,
        BandId::B4,
        BandId::B5,
        BandId::B6,
        BandId::B7,
        BandId::B8,
        BandId::B8A,
        BandId::B9,
        BandId::B11,
        BandId::B12,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<BandId> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BandId::B1 => "B1",
            BandId::B2 => "B2",
            BandId::B3 => "B3",
            BandId::B4 => "B4",
            BandId::B5 => "B5",
            BandId::B6 => "B6",
            BandId::B7 => "B7",
            BandId::B8 => "B8",
            BandId::B8A => "B8A",
            BandId::B9 => "B9",
            BandId::B11 => "B11",
            BandId::B12 => "B12",
        }
    }

    /// Native ground sampling distance in metres.
    pub fn native_resolution_m(self) -> u32 {
        match self {
            BandId::B2 | BandId::B3 | BandId::B4 | BandId::B8 => 10,
            BandId::B5 | BandId::B6 | BandId::B7 | BandId::B8A | BandId::B11 | BandId::B12 => 20,
            BandId::B1 | BandId::B9 => 60,
        }
    }
}

/// Position of a band in the canonical feature order.
pub fn canonical_band_index(id: BandId) -> usize {
    id.index()
}

impl fmt::Display for BandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownBand(pub String);

impl fmt::Display for UnknownBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown Level-2A band `{}`", self.0)
    }
}

impl std::error::Error for UnknownBand {}

impl FromStr for BandId {
    type Err = UnknownBand;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|b| b.name() == s)
            .ok_or_else(|| UnknownBand(s.to_string()))
    }
}
