//! Row filters over feature tables: the named study datasets.
//!
//! Every dataset keeps only rows with a present age of death; the remaining
//! predicates (birth country, gender, minimum lifespan, married, feature
//! present, no missing values, born by a cutoff year) stack on top. Named
//! specs reproduce the datasets the analyses are defined on.

use crate::features::{FeatureColumn, FeatureRow, FeatureTable, TableError};
use crate::profile::Gender;
use serde::Serialize;
use std::fmt;

/// A conjunction of row predicates over a feature table.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DatasetSpec {
    pub country: Option<String>,
    pub gender: Option<Gender>,
    pub min_age_of_death: Option<f64>,
    pub require_married: bool,
    #[serde(serialize_with = "serialize_column")]
    pub require_feature_present: Option<FeatureColumn>,
    pub require_no_missing: bool,
    pub max_birth_year: Option<i32>,
}

fn serialize_column<S: serde::Serializer>(
    col: &Option<FeatureColumn>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match col {
        Some(c) => s.serialize_some(c.name()),
        None => s.serialize_none(),
    }
}

impl DatasetSpec {
    /// Resolves a kebab-case dataset name like `all`, `us-50`,
    /// `female-children-number-50`, or `no-missing-10`.
    pub fn named(name: &str) -> Option<DatasetSpec> {
        let mut spec = DatasetSpec::default();
        let lower = name.to_ascii_lowercase();
        let mut tokens: Vec<&str> = lower.split('-').filter(|t| !t.is_empty()).collect();
        if tokens.is_empty() {
            return None;
        }
        if let Some(last) = tokens.last() {
            if let Ok(age) = last.parse::<u32>() {
                if age != 10 && age != 50 {
                    return None;
                }
                spec.min_age_of_death = Some(f64::from(age));
                tokens.pop();
            }
        }
        if tokens.first() == Some(&"male") {
            spec.gender = Some(Gender::Male);
            tokens.remove(0);
        } else if tokens.first() == Some(&"female") {
            spec.gender = Some(Gender::Female);
            tokens.remove(0);
        }
        let mut i = 0;
        while i < tokens.len() {
            match tokens[i] {
                "all" => i += 1,
                "us" => {
                    spec.country = Some(crate::country::UNITED_STATES.to_string());
                    i += 1;
                }
                "united" if tokens.get(i + 1) == Some(&"states") => {
                    spec.country = Some(crate::country::UNITED_STATES.to_string());
                    i += 2;
                }
                "married" => {
                    spec.require_married = true;
                    i += 1;
                }
                "children" if tokens.get(i + 1) == Some(&"number") => {
                    spec.require_feature_present = Some(FeatureColumn::ChildrenNumber);
                    i += 2;
                }
                "no" if tokens.get(i + 1) == Some(&"missing") => {
                    spec.require_no_missing = true;
                    i += 2;
                }
                _ => return None,
            }
        }
        Some(spec)
    }

    /// Human-readable predicate expansion for help text and manifests.
    pub fn describe(&self) -> String {
        let mut parts = vec!["age_of_death present".to_string()];
        if let Some(c) = &self.country {
            parts.push(format!("birth_country = {c}"));
        }
        if let Some(g) = self.gender {
            parts.push(format!("gender = {}", g.code()));
        }
        if let Some(a) = self.min_age_of_death {
            parts.push(format!("age_of_death >= {a}"));
        }
        if self.require_married {
            parts.push("spouse_number >= 1".to_string());
        }
        if let Some(f) = self.require_feature_present {
            parts.push(format!("{} present", f.name()));
        }
        if self.require_no_missing {
            parts.push("no missing value in any column, gender known".to_string());
        }
        if let Some(y) = self.max_birth_year {
            parts.push(format!("birth_year <= {y}"));
        }
        parts.join(", ")
    }
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// The named datasets the analyses reference, with their expansions.
pub fn named_catalog() -> Vec<(&'static str, DatasetSpec)> {
    [
        "all", "us", "all-10", "us-10", "all-50", "us-50", "male-10", "female-10", "male-us-10",
        "female-us-10", "married", "children-number-50", "male-children-number-50",
        "female-children-number-50", "no-missing-10", "no-missing-50",
    ]
    .into_iter()
    .map(|n| (n, DatasetSpec::named(n).expect("catalog names resolve")))
    .collect()
}

/// Keeps the rows satisfying every active predicate. Errors when a predicate
/// references a column the table does not carry.
pub fn filter_dataset(table: &FeatureTable, spec: &DatasetSpec) -> Result<FeatureTable, TableError> {
    table.require(FeatureColumn::AgeOfDeath)?;
    if spec.country.is_some() {
        table.require(FeatureColumn::BirthCountry)?;
    }
    if spec.gender.is_some() {
        table.require(FeatureColumn::Gender)?;
    }
    if spec.require_married {
        table.require(FeatureColumn::SpouseNumber)?;
    }
    if let Some(col) = spec.require_feature_present {
        table.require(col)?;
    }
    if spec.max_birth_year.is_some() {
        table.require(FeatureColumn::BirthYear)?;
    }

    let keep = |row: &FeatureRow| -> bool {
        let f = &row.features;
        let Some(age) = f.age_of_death else { return false };
        if let Some(min) = spec.min_age_of_death {
            if age < min {
                return false;
            }
        }
        if let Some(country) = &spec.country {
            if f.birth_country.as_deref() != Some(country.as_str()) {
                return false;
            }
        }
        if let Some(gender) = spec.gender {
            if f.gender_code != gender.code() {
                return false;
            }
        }
        if spec.require_married && f.spouse_number < 1 {
            return false;
        }
        if let Some(col) = spec.require_feature_present {
            if f.is_missing(col) {
                return false;
            }
        }
        if spec.require_no_missing && table.columns().iter().any(|c| f.is_missing(*c)) {
            return false;
        }
        if let Some(max_year) = spec.max_birth_year {
            match f.birth_year {
                Some(y) if y <= max_year => {}
                _ => return false,
            }
        }
        true
    };

    Ok(table.retain_rows(keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureSet, FeatureVector};

    fn row(id: &str, age: Option<f64>, spouses: u32) -> FeatureRow {
        let mut f = FeatureVector::default();
        f.age_of_death = age;
        f.spouse_number = spouses;
        f.birth_year = Some(1850);
        f.gender_code = 1;
        FeatureRow { id: id.into(), features: f }
    }

    fn table(rows: Vec<FeatureRow>) -> FeatureTable {
        FeatureTable::from_rows(FeatureSet::Full, rows)
    }

    #[test]
    fn base_dataset_requires_age_present() {
        let t = table(vec![row("a", Some(60.0), 0), row("b", None, 1)]);
        let out = filter_dataset(&t, &DatasetSpec::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.rows()[0].id, "a");
    }

    #[test]
    fn married_dataset_by_hand() {
        let rows = vec![
            row("a", Some(60.0), 1),
            row("b", Some(61.0), 0),
            row("c", Some(62.0), 2),
            row("d", Some(63.0), 0),
            row("e", Some(64.0), 1),
        ];
        let t = table(rows);
        let spec = DatasetSpec::named("married").unwrap();
        assert_eq!(filter_dataset(&t, &spec).unwrap().len(), 3);
    }

    #[test]
    fn named_specs_expand() {
        let us50 = DatasetSpec::named("us-50").unwrap();
        assert_eq!(us50.country.as_deref(), Some("united-states"));
        assert_eq!(us50.min_age_of_death, Some(50.0));
        assert!(!us50.require_married);

        let f = DatasetSpec::named("female-children-number-50").unwrap();
        assert_eq!(f.gender, Some(Gender::Female));
        assert_eq!(f.require_feature_present, Some(FeatureColumn::ChildrenNumber));
        assert_eq!(f.min_age_of_death, Some(50.0));

        let nm = DatasetSpec::named("no-missing-10").unwrap();
        assert!(nm.require_no_missing);
        assert_eq!(nm.min_age_of_death, Some(10.0));

        assert!(DatasetSpec::named("us-42").is_none());
        assert!(DatasetSpec::named("bogus").is_none());
    }

    #[test]
    fn filters_nest_and_are_idempotent() {
        let rows: Vec<FeatureRow> = (0..100)
            .map(|i| row(&format!("r{i:03}"), Some(f64::from(i)), i % 3))
            .collect();
        let t = table(rows);
        let all = filter_dataset(&t, &DatasetSpec::named("all").unwrap()).unwrap();
        let d10 = filter_dataset(&t, &DatasetSpec::named("all-10").unwrap()).unwrap();
        let d50 = filter_dataset(&t, &DatasetSpec::named("all-50").unwrap()).unwrap();
        assert!(d50.len() <= d10.len() && d10.len() <= all.len());
        let again = filter_dataset(&d50, &DatasetSpec::named("all-50").unwrap()).unwrap();
        assert_eq!(again.rows(), d50.rows());
    }

    #[test]
    fn missing_column_is_an_error() {
        let t = table(vec![row("a", Some(60.0), 1)]);
        let nuclear = t.project(FeatureSet::NuclearFamily).unwrap();
        let spec = DatasetSpec::named("us-50").unwrap();
        assert!(filter_dataset(&nuclear, &spec).is_err());
    }
}
