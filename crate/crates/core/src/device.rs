//! CNTFET parameter model.
//!
//! A device is described by its polarity and the zigzag chirality index `n`
//! of its single nanotube. Diameter grows linearly with `n`, and the
//! threshold voltage magnitude is inversely proportional to the diameter.
//! N and P devices of equal chirality share the same `|Vth|`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;

/// Calibration of the chirality-to-geometry laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceCalibration<T> {
    /// Diameter per unit of chirality index, in nm.
    pub nm_per_index: T,
    /// `|Vth| * diameter`, in V·nm.
    pub vth_nm: T,
}

impl<T: Scalar> Default for DeviceCalibration<T> {
    fn default() -> Self {
        Self {
            nm_per_index: T::lit(0.0783),
            vth_nm: T::lit(0.436),
        }
    }
}

impl<T: Scalar> DeviceCalibration<T> {
    pub fn diameter(&self, chirality: Chirality) -> T {
        self.nm_per_index * T::lit(f64::from(chirality.get()))
    }

    pub fn threshold_voltage(&self, chirality: Chirality) -> T {
        self.vth_nm / self.diameter(chirality)
    }
}

/// Tube diameter in nm under the default calibration.
pub fn diameter<T: Scalar>(chirality: Chirality) -> T {
    DeviceCalibration::default().diameter(chirality)
}

/// Threshold voltage magnitude in V under the default calibration.
pub fn threshold_voltage<T: Scalar>(chirality: Chirality) -> T {
    DeviceCalibration::default().threshold_voltage(chirality)
}

/// The reference rows the calibration is fitted to: `(n, diameter nm, |Vth| V)`.
pub const REFERENCE_TABLE: [(u32, f64, f64); 6] = [
    (8, 0.626, 0.696),
    (10, 0.783, 0.557),
    (13, 1.018, 0.428),
    (19, 1.487, 0.293),
    (29, 2.27, 0.192),
    (37, 2.896, 0.150),
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeviceError {
    #[error("chirality index must be >= 1")]
    ZeroChirality,
    #[error("unknown polarity `{0}` (expected N or P)")]
    BadPolarity(String),
}

/// Zigzag chirality index, always `>= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chirality(u32);

impl Chirality {
    pub const fn new(n: u32) -> Result<Self, DeviceError> {
        if n == 0 {
            Err(DeviceError::ZeroChirality)
        } else {
            Ok(Self(n))
        }
    }

    /// Panics on zero; for the fixed chirality menu used by the generators.
    pub const fn of(n: u32) -> Self {
        assert!(n > 0, "chirality index must be >= 1");
        Self(n)
    }

    pub const fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    N,
    P,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::N => "N",
            Polarity::P => "P",
        })
    }
}

impl FromStr for Polarity {
    type Err = DeviceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" | "n" => Ok(Polarity::N),
            "P" | "p" => Ok(Polarity::P),
            other => Err(DeviceError::BadPolarity(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CntfetSpec {
    pub polarity: Polarity,
    pub chirality: Chirality,
}

impl CntfetSpec {
    pub const fn n(chirality: u32) -> Self {
        Self {
            polarity: Polarity::N,
            chirality: Chirality::of(chirality),
        }
    }

    pub const fn p(chirality: u32) -> Self {
        Self {
            polarity: Polarity::P,
            chirality: Chirality::of(chirality),
        }
    }

    pub fn diameter<T: Scalar>(&self) -> T {
        diameter(self.chirality)
    }

    pub fn threshold_voltage<T: Scalar>(&self) -> T {
        threshold_voltage(self.chirality)
    }
}
