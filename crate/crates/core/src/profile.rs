//! Profile records and the JSON-lines interchange schema.
//!
//! One profile per line, field names fixed by the interchange contract:
//! `id`, `name`, `gender`, `birth_date`, `death_date`, `birth_location`,
//! `death_location`, `private`, `parents`, `children`, `spouses`, `siblings`.
//! Absent fields are omitted on write and default on read, so a serialized
//! stream re-parses to an identical stream.

use crate::date::{deserialize_lenient_date, PartialDate};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    #[default]
    Unknown,
}

impl Gender {
    /// Integer coding used everywhere downstream: male 1, female 2, unknown 0.
    pub fn code(self) -> u8 {
        match self {
            Gender::Unknown => 0,
            Gender::Male => 1,
            Gender::Female => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Gender::Unknown),
            1 => Some(Gender::Male),
            2 => Some(Gender::Female),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "male" | "m" | "1" => Some(Gender::Male),
            "female" | "f" | "2" => Some(Gender::Female),
            "unknown" | "u" | "0" | "" => Some(Gender::Unknown),
            _ => None,
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// One parsed genealogy profile.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub id: String,
    #[serde(rename = "name", default, skip_serializing_if = "String::is_empty")]
    pub full_name: String,
    #[serde(default)]
    pub gender: Gender,
    #[serde(
        rename = "birth_date",
        default,
        deserialize_with = "deserialize_lenient_date",
        skip_serializing_if = "Option::is_none"
    )]
    pub birth: Option<PartialDate>,
    #[serde(
        rename = "death_date",
        default,
        deserialize_with = "deserialize_lenient_date",
        skip_serializing_if = "Option::is_none"
    )]
    pub death: Option<PartialDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth_location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death_location: Option<String>,
    #[serde(rename = "private", default, skip_serializing_if = "is_false")]
    pub is_private: bool,
    #[serde(rename = "parents", default, skip_serializing_if = "Vec::is_empty")]
    pub parent_ids: Vec<String>,
    #[serde(rename = "children", default, skip_serializing_if = "Vec::is_empty")]
    pub child_ids: Vec<String>,
    #[serde(rename = "spouses", default, skip_serializing_if = "Vec::is_empty")]
    pub spouse_ids: Vec<String>,
    #[serde(rename = "siblings", default, skip_serializing_if = "Vec::is_empty")]
    pub sibling_ids: Vec<String>,
}

impl ProfileRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), ..Default::default() }
    }

    /// All four kin lists with their reference roles, in a fixed order.
    pub fn kin_lists(&self) -> [(KinRole, &[String]); 4] {
        [
            (KinRole::Parent, &self.parent_ids),
            (KinRole::Child, &self.child_ids),
            (KinRole::Spouse, &self.spouse_ids),
            (KinRole::Sibling, &self.sibling_ids),
        ]
    }
}

/// The role a referenced profile plays for the referencing profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinRole {
    Parent,
    Child,
    Spouse,
    Sibling,
}

/// Serializes profiles one JSON object per line.
pub fn write_jsonl<'a, W: Write>(
    profiles: impl IntoIterator<Item = &'a ProfileRecord>,
    mut out: W,
) -> std::io::Result<()> {
    for p in profiles {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_field_names() {
        let mut p = ProfileRecord::new("x1");
        p.full_name = "Ada".into();
        p.gender = Gender::Female;
        p.birth = crate::date::parse_date("1815-12-10");
        p.parent_ids = vec!["x2".into()];
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"id":"x1","name":"Ada","gender":"female","birth_date":"1815-12-10","parents":["x2"]}"#
        );
        let back: ProfileRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn lenient_dates_on_read() {
        let p: ProfileRecord =
            serde_json::from_str(r#"{"id":"a","birth_date":"ABT 1850","death_date":"1900"}"#).unwrap();
        assert_eq!(p.birth, None);
        assert_eq!(p.death, PartialDate::year_only(1900));
    }

    #[test]
    fn missing_fields_default() {
        let p: ProfileRecord = serde_json::from_str(r#"{"id":"a"}"#).unwrap();
        assert_eq!(p.gender, Gender::Unknown);
        assert!(!p.is_private);
        assert!(p.parent_ids.is_empty());
    }
}
