//! Radix-r digit algebra, voltage maps and the arithmetic oracles.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("unsupported radix {0} (expected 2, 3 or 4)")]
    Radix(u32),
    #[error("digit {digit} out of range for radix {radix}")]
    Digit { radix: u32, digit: u32 },
    #[error("carry {0} is not binary")]
    Carry(u32),
    #[error("successor offset {k} out of range for radix {radix}")]
    Offset { radix: u32, k: u32 },
    #[error("value {value} does not fit in {width} digits of radix {radix}")]
    Overflow { radix: u32, value: u64, width: usize },
}

/// Digit radix; only 2, 3 and 4 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Radix(u8);

impl Radix {
    pub const BINARY: Radix = Radix(2);
    pub const TERNARY: Radix = Radix(3);
    pub const QUATERNARY: Radix = Radix(4);

    pub fn new(r: u32) -> Result<Self, LogicError> {
        match r {
            2..=4 => Ok(Radix(r as u8)),
            _ => Err(LogicError::Radix(r)),
        }
    }

    pub const fn get(self) -> u32 {
        self.0 as u32
    }

    pub const fn max_digit(self) -> u32 {
        self.0 as u32 - 1
    }

    pub fn check(self, digit: u32) -> Result<u32, LogicError> {
        if digit < self.get() {
            Ok(digit)
        } else {
            Err(LogicError::Digit {
                radix: self.get(),
                digit,
            })
        }
    }

    pub fn digits(self) -> impl Iterator<Item = u32> + Clone {
        0..self.get()
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LogicLevel {
    radix: Radix,
    digit: u32,
}

impl LogicLevel {
    pub fn new(radix: Radix, digit: u32) -> Result<Self, LogicError> {
        Ok(Self {
            radix,
            digit: radix.check(digit)?,
        })
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn digit(&self) -> u32 {
        self.digit
    }
}

/// Decoding band half-width, as a fraction of the full-scale voltage.
pub const FULL_SWING_TOLERANCE: f64 = 0.05;

/// Evenly spaced levels: digit `k` sits at `k * full_scale / (radix - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltageMap {
    pub full_scale: f64,
    pub radix: Radix,
}

impl VoltageMap {
    pub fn new(radix: Radix, full_scale: f64) -> Self {
        Self { full_scale, radix }
    }

    pub fn step(&self) -> f64 {
        self.full_scale / f64::from(self.radix.max_digit())
    }

    pub fn encode(&self, digit: u32) -> f64 {
        f64::from(digit) * self.step()
    }

    pub fn level(&self, level: LogicLevel) -> f64 {
        self.encode(level.digit())
    }

    /// Nearest level, accepted only within the full-swing band.
    pub fn decode(&self, volts: f64) -> Option<u32> {
        let k = (volts / self.step()).round();
        if k < 0.0 || k > f64::from(self.radix.max_digit()) {
            return None;
        }
        let digit = k as u32;
        let err = (volts - self.encode(digit)).abs();
        (err <= FULL_SWING_TOLERANCE * self.full_scale).then_some(digit)
    }
}

/// Voltage pair used for the binary carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CarrySwing {
    /// Carry 1 at `vdd / (radix - 1)`.
    Reduced,
    /// Carry 1 at `vdd`.
    Full,
}

impl CarrySwing {
    pub fn one_voltage(self, radix: Radix, vdd: f64) -> f64 {
        match self {
            CarrySwing::Reduced => vdd / f64::from(radix.max_digit()),
            CarrySwing::Full => vdd,
        }
    }

    pub fn map(self, radix: Radix, vdd: f64) -> VoltageMap {
        VoltageMap::new(Radix::BINARY, self.one_voltage(radix, vdd))
    }
}

impl fmt::Display for CarrySwing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CarrySwing::Reduced => "reduced",
            CarrySwing::Full => "full",
        })
    }
}

/// `(sum, carry)` of a one-digit addition.
pub fn full_adder_oracle(radix: Radix, a: u32, b: u32, cin: u32) -> Result<(u32, u32), LogicError> {
    radix.check(a)?;
    radix.check(b)?;
    if cin > 1 {
        return Err(LogicError::Carry(cin));
    }
    let t = a + b + cin;
    Ok((t % radix.get(), t / radix.get()))
}

/// `(a + k) mod radix` for `1 <= k < radix`.
pub fn succ(radix: Radix, a: u32, k: u32) -> Result<u32, LogicError> {
    radix.check(a)?;
    if k == 0 || k >= radix.get() {
        return Err(LogicError::Offset { radix: radix.get(), k });
    }
    Ok((a + k) % radix.get())
}

/// Negative ternary inverter: 2 only for input 0.
pub fn ni(a: u32) -> Result<u32, LogicError> {
    Ok(match Radix::TERNARY.check(a)? {
        0 => 2,
        _ => 0,
    })
}

/// Positive ternary inverter: 0 only for input 2.
pub fn pi(a: u32) -> Result<u32, LogicError> {
    Ok(match Radix::TERNARY.check(a)? {
        2 => 0,
        _ => 2,
    })
}

/// Little-endian positional value.
pub fn digits_to_value(radix: Radix, digits: &[u32]) -> Result<u64, LogicError> {
    digits.iter().rev().try_fold(0u64, |acc, &d| {
        Ok(acc * u64::from(radix.get()) + u64::from(radix.check(d)?))
    })
}

pub fn value_to_digits(radix: Radix, value: u64, width: usize) -> Result<Vec<u32>, LogicError> {
    let r = u64::from(radix.get());
    let mut rest = value;
    let mut out = Vec::with_capacity(width);
    for _ in 0..width {
        out.push((rest % r) as u32);
        rest /= r;
    }
    if rest != 0 {
        return Err(LogicError::Overflow {
            radix: radix.get(),
            value,
            width,
        });
    }
    Ok(out)
}

/// `radix ^ width`.
pub fn capacity(radix: Radix, width: usize) -> u64 {
    u64::from(radix.get()).pow(width as u32)
}
