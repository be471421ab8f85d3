//! Lifespan variation statistics: quarter-century age-of-death distributions
//! and per-year mean/median lifespan trends.

use crate::features::{FeatureColumn, FeatureTable, TableError};
use crate::graph::MAX_AGE_YEARS;
use crate::profile::Gender;
use serde::Serialize;
use std::io::Write;
use std::ops::RangeInclusive;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("quarter start {0} is not a 25-year anchor between 1650 and 1875")]
    InvalidQuarter(i32),
    #[error("empty year range")]
    EmptyYearRange,
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub const QUARTER_ANCHOR: i32 = 1650;
pub const LAST_QUARTER: i32 = 1875;
/// Integer ages 0..=122 inclusive.
pub const AGE_BINS: usize = MAX_AGE_YEARS as usize + 1;

/// Age-of-death distribution of one birth quarter-century cohort.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSeries {
    pub quarter_start: i32,
    /// Deaths at each integer age 0..=122 (fractional ages floored).
    pub counts: Vec<u64>,
    /// `100 * counts[i] / n`; all zero when the cohort is empty.
    pub percents: Vec<f64>,
    pub n: u64,
}

/// Per-year lifespan central tendency for an optional gender slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSeries {
    pub gender: Option<Gender>,
    pub rows: Vec<TrendRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub birth_year: i32,
    pub n: u64,
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

/// Bins the ages of death of everyone born in `[quarter_start, quarter_start+24]`.
///
/// Rows without a birth year or age, or with an age outside `[0, 122]`
/// (possible only on uncleaned inputs), are not part of the cohort.
pub fn lifespan_distribution(
    table: &FeatureTable,
    quarter_start: i32,
) -> Result<DistributionSeries, StatsError> {
    if !(QUARTER_ANCHOR..=LAST_QUARTER).contains(&quarter_start)
        || (quarter_start - QUARTER_ANCHOR) % 25 != 0
    {
        return Err(StatsError::InvalidQuarter(quarter_start));
    }
    table.require(FeatureColumn::BirthYear)?;
    let mut counts = vec![0u64; AGE_BINS];
    let mut n = 0u64;
    for row in table.rows() {
        let f = &row.features;
        let (Some(year), Some(age)) = (f.birth_year, f.age_of_death) else { continue };
        if year < quarter_start || year > quarter_start + 24 {
            continue;
        }
        if !(0.0..=MAX_AGE_YEARS).contains(&age) {
            continue;
        }
        counts[age.floor() as usize] += 1;
        n += 1;
    }
    let percents = counts
        .iter()
        .map(|&c| if n > 0 { 100.0 * c as f64 / n as f64 } else { 0.0 })
        .collect();
    Ok(DistributionSeries { quarter_start, counts, percents, n })
}

/// Mean and median age of death per birth year over the requested range,
/// optionally restricted to one gender. Years with no samples carry absent
/// central tendencies.
pub fn yearly_central_tendency(
    table: &FeatureTable,
    years: RangeInclusive<i32>,
    gender: Option<Gender>,
) -> Result<TrendSeries, StatsError> {
    if years.is_empty() {
        return Err(StatsError::EmptyYearRange);
    }
    table.require(FeatureColumn::BirthYear)?;
    if gender.is_some() {
        table.require(FeatureColumn::Gender)?;
    }
    let (start, end) = (*years.start(), *years.end());
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); (end - start + 1) as usize];
    for row in table.rows() {
        let f = &row.features;
        let (Some(year), Some(age)) = (f.birth_year, f.age_of_death) else { continue };
        if year < start || year > end {
            continue;
        }
        if let Some(g) = gender {
            if f.gender_code != g.code() {
                continue;
            }
        }
        samples[(year - start) as usize].push(age);
    }
    let rows = samples
        .into_iter()
        .enumerate()
        .map(|(i, mut ages)| {
            let n = ages.len() as u64;
            let (mean, median) = if ages.is_empty() {
                (None, None)
            } else {
                let mean = ages.iter().sum::<f64>() / ages.len() as f64;
                ages.sort_unstable_by(f64::total_cmp);
                (Some(mean), Some(median_of_sorted(&ages)))
            };
            TrendRow { birth_year: start + i as i32, n, mean, median }
        })
        .collect();
    Ok(TrendSeries { gender, rows })
}

/// Midpoint-average median of a sorted sample.
pub fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Plot-ready CSV: `age,count,percent`.
pub fn write_distribution_csv<W: Write>(series: &DistributionSeries, mut out: W) -> std::io::Result<()> {
    writeln!(out, "age,count,percent")?;
    for (age, (count, pct)) in series.counts.iter().zip(&series.percents).enumerate() {
        writeln!(out, "{age},{count},{pct}")?;
    }
    Ok(())
}

/// Plot-ready CSV: `year,n,mean,median` with empty cells for years without
/// samples.
pub fn write_trend_csv<W: Write>(series: &TrendSeries, mut out: W) -> std::io::Result<()> {
    writeln!(out, "year,n,mean,median")?;
    for row in &series.rows {
        let mean = row.mean.map(|v| v.to_string()).unwrap_or_default();
        let median = row.median.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", row.birth_year, row.n, mean, median)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureRow, FeatureSet, FeatureVector};

    fn table(rows: &[(i32, f64)]) -> FeatureTable {
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, (year, age))| {
                let mut f = FeatureVector::default();
                f.birth_year = Some(*year);
                f.age_of_death = Some(*age);
                FeatureRow { id: format!("r{i:04}"), features: f }
            })
            .collect();
        FeatureTable::from_rows(FeatureSet::Full, rows)
    }

    #[test]
    fn point_mass_distribution() {
        let t = table(&[(1700, 60.0), (1710, 60.0), (1724, 60.0)]);
        let d = lifespan_distribution(&t, 1700).unwrap();
        assert_eq!(d.n, 3);
        assert_eq!(d.percents[60], 100.0);
        assert_eq!(d.counts.iter().sum::<u64>(), 3);
        assert!((d.percents.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn fractional_ages_floor_into_bins() {
        let t = table(&[(1700, 10.0), (1700, 10.0), (1700, 70.0), (1700, 70.9)]);
        let d = lifespan_distribution(&t, 1700).unwrap();
        assert_eq!(d.percents[10], 50.0);
        assert_eq!(d.percents[70], 50.0);
    }

    #[test]
    fn quarter_boundaries_inclusive() {
        let t = table(&[(1699, 50.0), (1700, 50.0), (1724, 50.0), (1725, 50.0)]);
        let d = lifespan_distribution(&t, 1700).unwrap();
        assert_eq!(d.n, 2);
    }

    #[test]
    fn quarter_validation() {
        let t = table(&[]);
        assert!(lifespan_distribution(&t, 1640).is_err());
        assert!(lifespan_distribution(&t, 1712).is_err());
        assert!(lifespan_distribution(&t, 1900).is_err());
        assert!(lifespan_distribution(&t, 1875).is_ok());
    }

    #[test]
    fn trend_mean_and_median() {
        let t = table(&[(1800, 60.0), (1800, 62.0), (1800, 64.0), (1801, 10.0), (1801, 90.0)]);
        let s = yearly_central_tendency(&t, 1800..=1802, None).unwrap();
        assert_eq!(s.rows.len(), 3);
        assert_eq!(s.rows[0].mean, Some(62.0));
        assert_eq!(s.rows[0].median, Some(62.0));
        assert_eq!(s.rows[1].mean, Some(50.0));
        assert_eq!(s.rows[1].median, Some(50.0));
        assert_eq!(s.rows[2].n, 0);
        assert_eq!(s.rows[2].mean, None);
    }

    #[test]
    fn empty_range_is_error() {
        let t = table(&[]);
        assert!(matches!(
            yearly_central_tendency(&t, 1800..=1799, None),
            Err(StatsError::EmptyYearRange)
        ));
    }

    #[test]
    fn merged_cohorts_add() {
        let a = table(&[(1700, 30.0), (1700, 40.0)]);
        let b = table(&[(1710, 50.0), (1710, 60.0), (1710, 70.0)]);
        let da = lifespan_distribution(&a, 1700).unwrap();
        let db = lifespan_distribution(&b, 1700).unwrap();
        let mut both_rows: Vec<(i32, f64)> = vec![(1700, 30.0), (1700, 40.0), (1710, 50.0), (1710, 60.0), (1710, 70.0)];
        let dc = lifespan_distribution(&table(&both_rows), 1700).unwrap();
        both_rows.clear();
        for age in 0..AGE_BINS {
            assert_eq!(dc.counts[age], da.counts[age] + db.counts[age]);
        }
        let mean = |d: &DistributionSeries| {
            d.counts.iter().enumerate().map(|(a, c)| a as f64 * *c as f64).sum::<f64>() / d.n as f64
        };
        let weighted = (mean(&da) * da.n as f64 + mean(&db) * db.n as f64) / (da.n + db.n) as f64;
        assert!((mean(&dc) - weighted).abs() < 1e-12);
    }
}
