//! Simulated time.
//!
//! Time is unitless and stored as an integer count of nanoticks (10⁻⁹ of a
//! simulated unit). Integer ticks give a total order, exact delay sums and a
//! lossless nine-decimal text form.

use core::fmt;
use core::ops::{Add, Sub};
use core::str::FromStr;

/// Ticks per simulated time unit.
pub const TICKS_PER_UNIT: u64 = 1_000_000_000;

/// A point in (or span of) simulated time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_ticks(ticks: u64) -> Self {
        SimTime(ticks)
    }

    pub const fn ticks(self) -> u64 {
        self.0
    }

    /// Converts a real number of time units, rounding to the nearest tick.
    /// Returns `None` for negative, NaN or out-of-range input.
    pub fn from_units(units: f64) -> Option<Self> {
        if !units.is_finite() || units < 0.0 {
            return None;
        }
        let ticks = libm::round(units * TICKS_PER_UNIT as f64);
        if ticks >= u64::MAX as f64 {
            return None;
        }
        Some(SimTime(ticks as u64))
    }

    /// Like [`SimTime::from_units`] but clamps instead of failing.
    pub fn saturating_from_units(units: f64) -> Self {
        if units.is_nan() || units <= 0.0 {
            return SimTime::ZERO;
        }
        SimTime::from_units(units).unwrap_or(SimTime::MAX)
    }

    pub fn as_units(self) -> f64 {
        (self.0 / TICKS_PER_UNIT) as f64 + (self.0 % TICKS_PER_UNIT) as f64 / TICKS_PER_UNIT as f64
    }

    pub fn saturating_add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_add(rhs.0))
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        self.saturating_add(rhs)
    }
}

impl Sub for SimTime {
    type Output = SimTime;

    fn sub(self, rhs: SimTime) -> SimTime {
        self.saturating_sub(rhs)
    }
}

/// Fixed nine-decimal rendering, e.g. `12.500000000`.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:09}", self.0 / TICKS_PER_UNIT, self.0 % TICKS_PER_UNIT)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed time value")]
pub struct ParseTimeError;

/// Parses the exact `<int>.<9 digits>` form produced by `Display`. Plain
/// integers and shorter fractions are accepted as well.
impl FromStr for SimTime {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s, ""),
        };
        if whole.is_empty() || frac.len() > 9 {
            return Err(ParseTimeError);
        }
        if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseTimeError);
        }
        let whole: u64 = whole.parse().map_err(|_| ParseTimeError)?;
        let mut nanos: u64 = 0;
        for (i, b) in frac.bytes().enumerate() {
            nanos += u64::from(b - b'0') * 10u64.pow(8 - i as u32);
        }
        whole
            .checked_mul(TICKS_PER_UNIT)
            .and_then(|t| t.checked_add(nanos))
            .map(SimTime)
            .ok_or(ParseTimeError)
    }
}

/// Half-open interval `[start, end)` of simulated time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    pub start: SimTime,
    pub end: SimTime,
}

impl Window {
    pub fn new(start: SimTime, end: SimTime) -> Self {
        Window { start, end }
    }

    pub fn contains(&self, t: SimTime) -> bool {
        self.start <= t && t < self.end
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn length(&self) -> SimTime {
        self.end - self.start
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::{SimTime, Window};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    impl Serialize for SimTime {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_f64(self.as_units())
        }
    }

    impl<'de> Deserialize<'de> for SimTime {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let units = f64::deserialize(d)?;
            SimTime::from_units(units)
                .ok_or_else(|| D::Error::custom("time must be a finite nonnegative number"))
        }
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct WindowRepr {
        start: SimTime,
        end: SimTime,
    }

    impl Serialize for Window {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            WindowRepr { start: self.start, end: self.end }.serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Window {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let w = WindowRepr::deserialize(d)?;
            Ok(Window::new(w.start, w.end))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_is_nine_decimals() {
        assert_eq!(SimTime::from_units(2.5).unwrap().to_string(), "2.500000000");
        assert_eq!(SimTime::ZERO.to_string(), "0.000000000");
    }

    #[test]
    fn parse_round_trips_display() {
        for ticks in [0, 1, 999_999_999, 1_000_000_000, 123_456_789_012] {
            let t = SimTime::from_ticks(ticks);
            assert_eq!(t.to_string().parse::<SimTime>().unwrap(), t);
        }
        assert_eq!("3".parse::<SimTime>().unwrap(), SimTime::from_ticks(3 * TICKS_PER_UNIT));
        assert!("-1.0".parse::<SimTime>().is_err());
        assert!("1.0000000001".parse::<SimTime>().is_err());
        assert!("".parse::<SimTime>().is_err());
    }

    #[test]
    fn negative_and_nan_rejected() {
        assert!(SimTime::from_units(-0.5).is_none());
        assert!(SimTime::from_units(f64::NAN).is_none());
        assert_eq!(SimTime::saturating_from_units(-3.0), SimTime::ZERO);
    }

    #[test]
    fn window_is_half_open() {
        let w = Window::new(SimTime::from_ticks(10), SimTime::from_ticks(20));
        assert!(w.contains(SimTime::from_ticks(10)));
        assert!(!w.contains(SimTime::from_ticks(20)));
        assert!(Window::new(SimTime::from_ticks(5), SimTime::from_ticks(5)).is_empty());
    }
}
