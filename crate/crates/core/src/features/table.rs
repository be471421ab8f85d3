//! Feature columns, the four named feature sets, and table storage with CSV
//! round-tripping.

use crate::profile::Gender;
use serde::Serialize;
use std::fmt;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("column `{column}` is not part of the {set} feature set")]
    ColumnNotAvailable { column: &'static str, set: &'static str },
    #[error("column `{0}` is not numeric")]
    NonNumeric(&'static str),
    #[error("unknown feature column `{0}`")]
    UnknownColumn(String),
    #[error("unknown feature set `{0}`")]
    UnknownSet(String),
    #[error("csv header does not match a known feature set: {0}")]
    HeaderMismatch(String),
    #[error("row {row}: bad value in column `{column}`: {message}")]
    InvalidValue { row: usize, column: &'static str, message: String },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

macro_rules! feature_columns {
    ($($variant:ident => $name:literal),+ $(,)?) => {
        /// One of the 21 per-vertex features.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum FeatureColumn {
            $($variant),+
        }

        impl FeatureColumn {
            pub const ALL: &'static [FeatureColumn] = &[$(FeatureColumn::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $(FeatureColumn::$variant => $name),+
                }
            }

            pub fn from_name(name: &str) -> Option<Self> {
                match name {
                    $($name => Some(FeatureColumn::$variant),)+
                    _ => None,
                }
            }
        }
    };
}

feature_columns! {
    FullName => "full_name",
    BirthYear => "birth_year",
    DeathYear => "death_year",
    Gender => "gender",
    BirthCountry => "birth_country",
    DeathCountry => "death_country",
    AgeOfDeath => "age_of_death",
    ChildrenNumber => "children_number",
    SpouseNumber => "spouse_number",
    MinSpouseAgeOfDeath => "min_spouse_age_of_death",
    MaxSpouseAgeOfDeath => "max_spouse_age_of_death",
    AvgSpouseAgeOfDeath => "avg_spouse_age_of_death",
    FatherAgeOfDeath => "father_age_of_death",
    MotherAgeOfDeath => "mother_age_of_death",
    PaternalGrandfatherAgeOfDeath => "paternal_grandfather_age_of_death",
    MaternalGrandfatherAgeOfDeath => "maternal_grandfather_age_of_death",
    PaternalGrandmotherAgeOfDeath => "paternal_grandmother_age_of_death",
    MaternalGrandmotherAgeOfDeath => "maternal_grandmother_age_of_death",
    SiblingNumber => "sibling_number",
    MaxSiblingAgeOfDeath => "max_sibling_age_of_death",
    AvgSiblingAgeOfDeath => "avg_sibling_age_of_death",
}

impl FeatureColumn {
    /// Whether the column carries a numeric value (gender counts via its
    /// 0/1/2 coding; names and country tags do not).
    pub fn is_numeric(self) -> bool {
        !matches!(
            self,
            FeatureColumn::FullName | FeatureColumn::BirthCountry | FeatureColumn::DeathCountry
        )
    }
}

impl fmt::Display for FeatureColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The named column subsets used by the analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSet {
    Full,
    AllNumeric,
    Heritage,
    NuclearFamily,
}

use FeatureColumn::*;

const ALL_NUMERIC_COLUMNS: &[FeatureColumn] = &[
    BirthYear,
    Gender,
    AgeOfDeath,
    ChildrenNumber,
    SpouseNumber,
    MinSpouseAgeOfDeath,
    MaxSpouseAgeOfDeath,
    AvgSpouseAgeOfDeath,
    FatherAgeOfDeath,
    MotherAgeOfDeath,
    PaternalGrandfatherAgeOfDeath,
    MaternalGrandfatherAgeOfDeath,
    PaternalGrandmotherAgeOfDeath,
    MaternalGrandmotherAgeOfDeath,
    SiblingNumber,
    MaxSiblingAgeOfDeath,
    AvgSiblingAgeOfDeath,
];

const HERITAGE_COLUMNS: &[FeatureColumn] = &[
    BirthYear,
    Gender,
    FatherAgeOfDeath,
    MotherAgeOfDeath,
    PaternalGrandfatherAgeOfDeath,
    MaternalGrandfatherAgeOfDeath,
    PaternalGrandmotherAgeOfDeath,
    MaternalGrandmotherAgeOfDeath,
    SiblingNumber,
    MaxSiblingAgeOfDeath,
    AvgSiblingAgeOfDeath,
];

const NUCLEAR_COLUMNS: &[FeatureColumn] = &[
    BirthYear,
    Gender,
    ChildrenNumber,
    SpouseNumber,
    MinSpouseAgeOfDeath,
    MaxSpouseAgeOfDeath,
    AvgSpouseAgeOfDeath,
];

impl FeatureSet {
    pub fn columns(self) -> &'static [FeatureColumn] {
        match self {
            FeatureSet::Full => FeatureColumn::ALL,
            FeatureSet::AllNumeric => ALL_NUMERIC_COLUMNS,
            FeatureSet::Heritage => HERITAGE_COLUMNS,
            FeatureSet::NuclearFamily => NUCLEAR_COLUMNS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Full => "full",
            FeatureSet::AllNumeric => "all-numeric",
            FeatureSet::Heritage => "heritage",
            FeatureSet::NuclearFamily => "nuclear-family",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Some(FeatureSet::Full),
            "all-numeric" | "all_numeric" | "allnumeric" => Some(FeatureSet::AllNumeric),
            "heritage" => Some(FeatureSet::Heritage),
            "nuclear-family" | "nuclear_family" | "nuclear" => Some(FeatureSet::NuclearFamily),
            _ => None,
        }
    }

    pub fn contains(self, col: FeatureColumn) -> bool {
        self.columns().contains(&col)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The 21 features of one vertex; a missing value is represented as absent,
/// never as a sentinel.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    pub full_name: Option<String>,
    pub birth_year: Option<i32>,
    pub death_year: Option<i32>,
    pub gender_code: u8,
    pub birth_country: Option<String>,
    pub death_country: Option<String>,
    pub age_of_death: Option<f64>,
    pub children_number: u32,
    pub spouse_number: u32,
    pub min_spouse_age_of_death: Option<f64>,
    pub max_spouse_age_of_death: Option<f64>,
    pub avg_spouse_age_of_death: Option<f64>,
    pub father_age_of_death: Option<f64>,
    pub mother_age_of_death: Option<f64>,
    pub paternal_grandfather_age_of_death: Option<f64>,
    pub maternal_grandfather_age_of_death: Option<f64>,
    pub paternal_grandmother_age_of_death: Option<f64>,
    pub maternal_grandmother_age_of_death: Option<f64>,
    pub sibling_number: u32,
    pub max_sibling_age_of_death: Option<f64>,
    pub avg_sibling_age_of_death: Option<f64>,
}

impl FeatureVector {
    /// Numeric view of a column; `None` for a missing value or a non-numeric
    /// column. Gender reads as its 0/1/2 code, counts as exact integers.
    pub fn numeric(&self, col: FeatureColumn) -> Option<f64> {
        match col {
            BirthYear => self.birth_year.map(f64::from),
            DeathYear => self.death_year.map(f64::from),
            Gender => Some(f64::from(self.gender_code)),
            AgeOfDeath => self.age_of_death,
            ChildrenNumber => Some(f64::from(self.children_number)),
            SpouseNumber => Some(f64::from(self.spouse_number)),
            MinSpouseAgeOfDeath => self.min_spouse_age_of_death,
            MaxSpouseAgeOfDeath => self.max_spouse_age_of_death,
            AvgSpouseAgeOfDeath => self.avg_spouse_age_of_death,
            FatherAgeOfDeath => self.father_age_of_death,
            MotherAgeOfDeath => self.mother_age_of_death,
            PaternalGrandfatherAgeOfDeath => self.paternal_grandfather_age_of_death,
            MaternalGrandfatherAgeOfDeath => self.maternal_grandfather_age_of_death,
            PaternalGrandmotherAgeOfDeath => self.paternal_grandmother_age_of_death,
            MaternalGrandmotherAgeOfDeath => self.maternal_grandmother_age_of_death,
            SiblingNumber => Some(f64::from(self.sibling_number)),
            MaxSiblingAgeOfDeath => self.max_sibling_age_of_death,
            AvgSiblingAgeOfDeath => self.avg_sibling_age_of_death,
            FullName | BirthCountry | DeathCountry => None,
        }
    }

    /// Column-specific missingness: unknown gender is missing, counts never
    /// are, optional values are missing when absent.
    pub fn is_missing(&self, col: FeatureColumn) -> bool {
        match col {
            FullName => self.full_name.is_none(),
            BirthYear => self.birth_year.is_none(),
            DeathYear => self.death_year.is_none(),
            Gender => self.gender_code == 0,
            BirthCountry => self.birth_country.is_none(),
            DeathCountry => self.death_country.is_none(),
            ChildrenNumber | SpouseNumber | SiblingNumber => false,
            _ => self.numeric(col).is_none(),
        }
    }

    fn clear(&mut self, col: FeatureColumn) {
        match col {
            FullName => self.full_name = None,
            BirthYear => self.birth_year = None,
            DeathYear => self.death_year = None,
            Gender => self.gender_code = 0,
            BirthCountry => self.birth_country = None,
            DeathCountry => self.death_country = None,
            AgeOfDeath => self.age_of_death = None,
            ChildrenNumber => self.children_number = 0,
            SpouseNumber => self.spouse_number = 0,
            MinSpouseAgeOfDeath => self.min_spouse_age_of_death = None,
            MaxSpouseAgeOfDeath => self.max_spouse_age_of_death = None,
            AvgSpouseAgeOfDeath => self.avg_spouse_age_of_death = None,
            FatherAgeOfDeath => self.father_age_of_death = None,
            MotherAgeOfDeath => self.mother_age_of_death = None,
            PaternalGrandfatherAgeOfDeath => self.paternal_grandfather_age_of_death = None,
            MaternalGrandfatherAgeOfDeath => self.maternal_grandfather_age_of_death = None,
            PaternalGrandmotherAgeOfDeath => self.paternal_grandmother_age_of_death = None,
            MaternalGrandmotherAgeOfDeath => self.maternal_grandmother_age_of_death = None,
            SiblingNumber => self.sibling_number = 0,
            MaxSiblingAgeOfDeath => self.max_sibling_age_of_death = None,
            AvgSiblingAgeOfDeath => self.avg_sibling_age_of_death = None,
        }
    }

    fn cell(&self, col: FeatureColumn) -> String {
        match col {
            FullName => self.full_name.clone().unwrap_or_default(),
            BirthYear => self.birth_year.map(|v| v.to_string()).unwrap_or_default(),
            DeathYear => self.death_year.map(|v| v.to_string()).unwrap_or_default(),
            Gender => self.gender_code.to_string(),
            BirthCountry => self.birth_country.clone().unwrap_or_default(),
            DeathCountry => self.death_country.clone().unwrap_or_default(),
            ChildrenNumber => self.children_number.to_string(),
            SpouseNumber => self.spouse_number.to_string(),
            SiblingNumber => self.sibling_number.to_string(),
            _ => self.numeric(col).map(|v| v.to_string()).unwrap_or_default(),
        }
    }

    fn set_cell(&mut self, col: FeatureColumn, raw: &str, row: usize) -> Result<(), TableError> {
        if raw.is_empty() {
            self.clear(col);
            if matches!(col, ChildrenNumber | SpouseNumber | SiblingNumber) {
                return Err(TableError::InvalidValue {
                    row,
                    column: col.name(),
                    message: "count columns cannot be empty".into(),
                });
            }
            return Ok(());
        }
        let bad = |message: String| TableError::InvalidValue { row, column: col.name(), message };
        match col {
            FullName => self.full_name = Some(raw.to_string()),
            BirthCountry => self.birth_country = Some(raw.to_string()),
            DeathCountry => self.death_country = Some(raw.to_string()),
            BirthYear => self.birth_year = Some(raw.parse().map_err(|e| bad(format!("{e}")))?),
            DeathYear => self.death_year = Some(raw.parse().map_err(|e| bad(format!("{e}")))?),
            Gender => {
                let code: u8 = raw.parse().map_err(|e| bad(format!("{e}")))?;
                if Gender::from_code(code).is_none() {
                    return Err(bad(format!("gender code {code} out of range")));
                }
                self.gender_code = code;
            }
            ChildrenNumber => self.children_number = raw.parse().map_err(|e| bad(format!("{e}")))?,
            SpouseNumber => self.spouse_number = raw.parse().map_err(|e| bad(format!("{e}")))?,
            SiblingNumber => self.sibling_number = raw.parse().map_err(|e| bad(format!("{e}")))?,
            _ => {
                let v: f64 = raw.parse().map_err(|e| bad(format!("{e}")))?;
                match col {
                    AgeOfDeath => self.age_of_death = Some(v),
                    MinSpouseAgeOfDeath => self.min_spouse_age_of_death = Some(v),
                    MaxSpouseAgeOfDeath => self.max_spouse_age_of_death = Some(v),
                    AvgSpouseAgeOfDeath => self.avg_spouse_age_of_death = Some(v),
                    FatherAgeOfDeath => self.father_age_of_death = Some(v),
                    MotherAgeOfDeath => self.mother_age_of_death = Some(v),
                    PaternalGrandfatherAgeOfDeath => self.paternal_grandfather_age_of_death = Some(v),
                    MaternalGrandfatherAgeOfDeath => self.maternal_grandfather_age_of_death = Some(v),
                    PaternalGrandmotherAgeOfDeath => self.paternal_grandmother_age_of_death = Some(v),
                    MaternalGrandmotherAgeOfDeath => self.maternal_grandmother_age_of_death = Some(v),
                    MaxSiblingAgeOfDeath => self.max_sibling_age_of_death = Some(v),
                    AvgSiblingAgeOfDeath => self.avg_sibling_age_of_death = Some(v),
                    _ => unreachable!("numeric fallthrough"),
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub features: FeatureVector,
}

/// Rows of (vertex id, features) under a named column set. The age-of-death
/// column is carried by every table regardless of set: it is the response
/// variable of every analysis and the base predicate of every dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    set: FeatureSet,
    rows: Vec<FeatureRow>,
}

impl FeatureTable {
    /// Builds a table, masking any column outside the set (age of death stays).
    pub fn from_rows(set: FeatureSet, mut rows: Vec<FeatureRow>) -> Self {
        mask_rows(set, &mut rows);
        FeatureTable { set, rows }
    }

    pub fn set(&self) -> FeatureSet {
        self.set
    }

    pub fn columns(&self) -> &'static [FeatureColumn] {
        self.set.columns()
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Whether a column's values are available on this table.
    pub fn carries(&self, col: FeatureColumn) -> bool {
        col == FeatureColumn::AgeOfDeath || self.set.contains(col)
    }

    pub(crate) fn require(&self, col: FeatureColumn) -> Result<(), TableError> {
        if self.carries(col) {
            Ok(())
        } else {
            Err(TableError::ColumnNotAvailable { column: col.name(), set: self.set.name() })
        }
    }

    /// Extracts a numeric column (missing as `None`).
    pub fn numeric_column(&self, col: FeatureColumn) -> Result<Vec<Option<f64>>, TableError> {
        self.require(col)?;
        if !col.is_numeric() {
            return Err(TableError::NonNumeric(col.name()));
        }
        Ok(self.rows.iter().map(|r| r.features.numeric(col)).collect())
    }

    /// Re-tags the table under a (sub)set, masking values outside it. Every
    /// requested column must be available on this table.
    pub fn project(&self, set: FeatureSet) -> Result<FeatureTable, TableError> {
        for col in set.columns() {
            self.require(*col)?;
        }
        Ok(FeatureTable::from_rows(set, self.rows.clone()))
    }

    pub(crate) fn retain_rows(&self, keep: impl Fn(&FeatureRow) -> bool) -> FeatureTable {
        FeatureTable {
            set: self.set,
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    /// Writes the table as CSV: `id` first, then the set's columns in order;
    /// empty cell means missing; gender is exported as 0/1/2.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), TableError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["id"];
        header.extend(self.set.columns().iter().map(|c| c.name()));
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for row in &self.rows {
            record.clear();
            record.push(row.id.clone());
            for col in self.set.columns() {
                record.push(row.features.cell(*col));
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv), inferring the
    /// feature set from the exact header.
    pub fn read_csv<R: Read>(input: R) -> Result<FeatureTable, TableError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        let names: Vec<&str> = headers.iter().collect();
        if names.first() != Some(&"id") {
            return Err(TableError::HeaderMismatch("first column must be `id`".into()));
        }
        let set = [FeatureSet::Full, FeatureSet::AllNumeric, FeatureSet::Heritage, FeatureSet::NuclearFamily]
            .into_iter()
            .find(|s| {
                let cols = s.columns();
                names.len() == cols.len() + 1
                    && cols.iter().zip(&names[1..]).all(|(c, n)| c.name() == *n)
            })
            .ok_or_else(|| TableError::HeaderMismatch(names.join(",")))?;
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let mut features = FeatureVector::default();
            let id = record.get(0).unwrap_or("").to_string();
            for (j, col) in set.columns().iter().enumerate() {
                features.set_cell(*col, record.get(j + 1).unwrap_or(""), i + 1)?;
            }
            rows.push(FeatureRow { id, features });
        }
        // A loaded table carries exactly what the file held; no masking needed
        // beyond what the column set implies for values never written.
        Ok(FeatureTable { set, rows })
    }
}

pub(crate) fn mask_rows(set: FeatureSet, rows: &mut [FeatureRow]) {
    if set == FeatureSet::Full {
        return;
    }
    for row in rows.iter_mut() {
        for col in FeatureColumn::ALL {
            if *col != FeatureColumn::AgeOfDeath && !set.contains(*col) {
                row.features.clear(*col);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_definitions() {
        assert_eq!(FeatureColumn::ALL.len(), 21);
        assert_eq!(FeatureSet::Full.columns().len(), 21);
        assert_eq!(FeatureSet::AllNumeric.columns().len(), 17);
        assert_eq!(FeatureSet::Heritage.columns().len(), 11);
        assert_eq!(FeatureSet::NuclearFamily.columns().len(), 7);
        // The all-numeric set drops death year plus every non-numeric column.
        assert!(!FeatureSet::AllNumeric.contains(DeathYear));
        assert!(!FeatureSet::AllNumeric.contains(FullName));
        assert!(!FeatureSet::AllNumeric.contains(BirthCountry));
        assert!(!FeatureSet::AllNumeric.contains(DeathCountry));
        assert!(FeatureSet::AllNumeric.contains(AgeOfDeath));
        // Heritage keeps the extended family features plus birth year/gender.
        assert!(FeatureSet::Heritage.contains(MaxSiblingAgeOfDeath));
        assert!(!FeatureSet::Heritage.contains(SpouseNumber));
        assert!(FeatureSet::NuclearFamily.contains(AvgSpouseAgeOfDeath));
        assert!(!FeatureSet::NuclearFamily.contains(FatherAgeOfDeath));
    }

    fn sample_row(id: &str) -> FeatureRow {
        let mut f = FeatureVector::default();
        f.full_name = Some("A Name".into());
        f.birth_year = Some(1820);
        f.death_year = Some(1890);
        f.gender_code = 1;
        f.birth_country = Some("united-states".into());
        f.age_of_death = Some(70.25);
        f.children_number = 3;
        f.spouse_number = 1;
        f.avg_spouse_age_of_death = Some(66.5);
        f.sibling_number = 2;
        f.max_sibling_age_of_death = Some(81.0);
        FeatureRow { id: id.into(), features: f }
    }

    #[test]
    fn csv_round_trip_full() {
        let table = FeatureTable::from_rows(FeatureSet::Full, vec![sample_row("a"), sample_row("b")]);
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let back = FeatureTable::read_csv(&buf[..]).unwrap();
        assert_eq!(back.set(), FeatureSet::Full);
        assert_eq!(back.rows(), table.rows());
    }

    #[test]
    fn projection_masks_columns_but_keeps_age() {
        let table = FeatureTable::from_rows(FeatureSet::Full, vec![sample_row("a")]);
        let heritage = table.project(FeatureSet::Heritage).unwrap();
        let row = &heritage.rows()[0].features;
        assert_eq!(row.spouse_number, 0);
        assert_eq!(row.avg_spouse_age_of_death, None);
        assert_eq!(row.age_of_death, Some(70.25));
        assert_eq!(row.birth_year, Some(1820));
        assert!(heritage.numeric_column(SpouseNumber).is_err());
        assert!(heritage.numeric_column(AgeOfDeath).is_ok());
    }

    #[test]
    fn heritage_csv_lacks_age_of_death() {
        let table = FeatureTable::from_rows(FeatureSet::Heritage, vec![sample_row("a")]);
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        assert!(!header.contains(&"age_of_death"));
        let back = FeatureTable::read_csv(&buf[..]).unwrap();
        assert_eq!(back.set(), FeatureSet::Heritage);
        assert_eq!(back.rows()[0].features.age_of_death, None);
    }

    #[test]
    fn unknown_header_rejected() {
        let err = FeatureTable::read_csv("id,bogus\na,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, TableError::HeaderMismatch(_)));
    }
}
