//! Partial calendar dates and the date grammar accepted by genealogy sources.
//!
//! Profiles rarely carry complete dates; a [`PartialDate`] always has a year
//! and optionally a month and day. Ages are exact (fractional years over the
//! mean Gregorian year) when both dates are complete, and fall back to a year
//! difference otherwise.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Mean length of the Gregorian year, used to convert day spans to years.
pub const DAYS_PER_YEAR: f64 = 365.2425;

/// A CE calendar date with optional month/day precision.
///
/// Invariants: a day is only present together with a month, and a complete
/// (year, month, day) triple is a valid Gregorian date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialDate {
    year: i32,
    month: Option<u8>,
    day: Option<u8>,
}

impl PartialDate {
    /// Builds a date, returning `None` when the invariants would be violated.
    pub fn new(year: i32, month: Option<u8>, day: Option<u8>) -> Option<Self> {
        if !(1..=9999).contains(&year) {
            return None;
        }
        match (month, day) {
            (None, Some(_)) => None,
            (None, None) => Some(Self { year, month: None, day: None }),
            (Some(m), None) => (1..=12).contains(&m).then_some(Self { year, month, day: None }),
            (Some(m), Some(d)) => {
                if !(1..=12).contains(&m) || d == 0 || d > days_in_month(year, m) {
                    return None;
                }
                Some(Self { year, month, day })
            }
        }
    }

    pub fn year_only(year: i32) -> Option<Self> {
        Self::new(year, None, None)
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> Option<u8> {
        self.month
    }

    pub fn day(&self) -> Option<u8> {
        self.day
    }

    /// True when year, month, and day are all present.
    pub fn is_complete(&self) -> bool {
        self.day.is_some()
    }

    /// Day number in the proleptic Gregorian calendar (1970-01-01 = 0), for
    /// complete dates only.
    pub fn day_number(&self) -> Option<i64> {
        match (self.month, self.day) {
            (Some(m), Some(d)) => Some(days_from_civil(self.year, m as u32, d as u32)),
            _ => None,
        }
    }

    pub fn from_day_number(days: i64) -> Option<Self> {
        let (y, m, d) = civil_from_days(days);
        Self::new(y, Some(m as u8), Some(d as u8))
    }
}

impl fmt::Display for PartialDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.month, self.day) {
            (Some(m), Some(d)) => write!(f, "{:04}-{:02}-{:02}", self.year, m, d),
            (Some(m), None) => write!(f, "{:04}-{:02}", self.year, m),
            _ => write!(f, "{:04}", self.year),
        }
    }
}

impl FromStr for PartialDate {
    type Err = ();

    /// Strict ISO form only: `YYYY`, `YYYY-MM`, or `YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self, ()> {
        let mut parts = s.split('-');
        let year = parts.next().ok_or(())?;
        if year.is_empty() || year.len() > 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        let year: i32 = year.parse().map_err(|_| ())?;
        let num = |p: Option<&str>| -> Result<Option<u8>, ()> {
            match p {
                None => Ok(None),
                Some(t) if t.len() <= 2 && !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) => {
                    Ok(Some(t.parse().map_err(|_| ())?))
                }
                Some(_) => Err(()),
            }
        };
        let month = num(parts.next())?;
        let day = num(parts.next())?;
        if parts.next().is_some() {
            return Err(());
        }
        PartialDate::new(year, month, day).ok_or(())
    }
}

impl Serialize for PartialDate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartialDate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|_| D::Error::custom(format!("invalid date `{s}`")))
    }
}

/// Lenient `Option<PartialDate>` field deserializer for profile records:
/// unparseable or qualified date strings become absent rather than errors,
/// matching the cleaning philosophy of dropping unreliable values.
pub(crate) fn deserialize_lenient_date<'de, D>(deserializer: D) -> Result<Option<PartialDate>, D::Error>
where
    D: Deserializer<'de>,
{
    let raw: Option<String> = Option::deserialize(deserializer)?;
    Ok(raw.as_deref().and_then(parse_date))
}

const GEDCOM_QUALIFIERS: &[&str] = &[
    "ABT", "ABOUT", "CIRCA", "EST", "CAL", "BEF", "AFT", "BET", "AND", "FROM", "TO", "INT",
];

const MONTHS: &[&str] = &[
    "JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC",
];

const MONTHS_FULL: &[&str] = &[
    "JANUARY", "FEBRUARY", "MARCH", "APRIL", "MAY", "JUNE", "JULY", "AUGUST", "SEPTEMBER",
    "OCTOBER", "NOVEMBER", "DECEMBER",
];

/// Parses a date string in ISO (`YYYY[-MM[-DD]]`) or GEDCOM (`DD MON YYYY`,
/// `MON YYYY`, `YYYY`) form. Qualified or ranged dates (`ABT 1850`,
/// `BET 1850 AND 1860`) and anything unparseable yield `None`.
pub fn parse_date(text: &str) -> Option<PartialDate> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Ok(date) = text.parse() {
        return Some(date);
    }
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let upper: Vec<String> = tokens.iter().map(|t| t.to_ascii_uppercase()).collect();
    if upper.iter().any(|t| GEDCOM_QUALIFIERS.contains(&t.as_str())) {
        return None;
    }
    let month_of = |t: &str| -> Option<u8> {
        MONTHS
            .iter()
            .position(|m| *m == t)
            .or_else(|| MONTHS_FULL.iter().position(|m| *m == t))
            .map(|i| i as u8 + 1)
    };
    let year_of = |t: &str| -> Option<i32> {
        (t.len() <= 4 && t.bytes().all(|b| b.is_ascii_digit())).then(|| t.parse().ok())?
    };
    match upper.as_slice() {
        [y] => PartialDate::new(year_of(y)?, None, None),
        [m, y] => PartialDate::new(year_of(y)?, Some(month_of(m)?), None),
        [d, m, y] => {
            let day: u8 = (d.len() <= 2 && d.bytes().all(|b| b.is_ascii_digit()))
                .then(|| d.parse().ok())
                .flatten()?;
            PartialDate::new(year_of(y)?, Some(month_of(m)?), Some(day))
        }
        _ => None,
    }
}

/// Age in years between two dates: exact day arithmetic when both dates are
/// complete, year difference otherwise. `None` only when a date is missing a
/// year, which cannot happen for a constructed `PartialDate`.
pub fn age_between(birth: &PartialDate, death: &PartialDate) -> f64 {
    match (birth.day_number(), death.day_number()) {
        (Some(b), Some(d)) => (d - b) as f64 / DAYS_PER_YEAR,
        _ => (death.year() - birth.year()) as f64,
    }
}

fn is_leap(year: i32) -> bool {
    year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

/// Days since 1970-01-01 for a proleptic Gregorian civil date.
pub(crate) fn days_from_civil(y: i32, m: u32, d: u32) -> i64 {
    let y = (if m <= 2 { y - 1 } else { y }) as i64;
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = if m > 2 { m - 3 } else { m + 9 } as i64;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

/// Inverse of [`days_from_civil`].
pub(crate) fn civil_from_days(z: i64) -> (i32, u32, u32) {
    let z = z + 719468;
    let era = if z >= 0 { z } else { z - 146096 } / 146097;
    let doe = z - era * 146097;
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = (if mp < 10 { mp + 3 } else { mp - 9 }) as u32;
    ((if m <= 2 { y + 1 } else { y }) as i32, m, d)
}
