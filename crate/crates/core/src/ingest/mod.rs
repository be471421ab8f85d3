//! Source parsing: JSON-lines (canonical) and a GEDCOM 5.5 subset.
//!
//! Malformed records are counted and skipped; they never abort the stream.
//! Duplicate ids keep the first occurrence. Self-references are stripped from
//! kin lists so every accepted record satisfies the profile invariants.

mod gedcom;

use crate::profile::ProfileRecord;
use serde::Serialize;
use std::collections::HashSet;
use std::io::BufRead;
use thiserror::Error;

pub use gedcom::parse_gedcom;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error reading source: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    JsonLines,
    Gedcom,
}

impl SourceFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json-lines" | "jsonlines" => Some(SourceFormat::JsonLines),
            "gedcom" | "ged" => Some(SourceFormat::Gedcom),
            _ => None,
        }
    }
}

const MAX_MESSAGES: usize = 50;

/// Tally of what a parse accepted, fixed up, and rejected.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    /// Records accepted into the stream.
    pub records: usize,
    /// Records rejected as structurally malformed.
    pub malformed: usize,
    /// Records rejected because their id already appeared.
    pub duplicates: usize,
    /// Kin-list entries dropped for referencing the record's own id.
    pub self_references: usize,
    /// First few diagnostics, capped so reports stay small.
    pub messages: Vec<String>,
}

impl ParseReport {
    fn note(&mut self, msg: String) {
        if self.messages.len() < MAX_MESSAGES {
            self.messages.push(msg);
        }
    }
}

/// Parses a source into validated profiles plus a report.
pub fn parse_profiles<R: BufRead>(
    reader: R,
    format: SourceFormat,
) -> Result<(Vec<ProfileRecord>, ParseReport), IngestError> {
    match format {
        SourceFormat::JsonLines => parse_jsonl(reader),
        SourceFormat::Gedcom => parse_gedcom(reader),
    }
}

fn parse_jsonl<R: BufRead>(reader: R) -> Result<(Vec<ProfileRecord>, ParseReport), IngestError> {
    let mut report = ParseReport::default();
    let mut profiles = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let record: ProfileRecord = match serde_json::from_str(trimmed) {
            Ok(r) => r,
            Err(e) => {
                report.malformed += 1;
                report.note(format!("line {}: {}", lineno + 1, e));
                continue;
            }
        };
        accept(record, lineno + 1, &mut seen, &mut profiles, &mut report);
    }
    report.records = profiles.len();
    Ok((profiles, report))
}

/// Shared record validation: id checks, duplicate rejection, kin-list fixups.
pub(crate) fn accept(
    mut record: ProfileRecord,
    position: usize,
    seen: &mut HashSet<String>,
    profiles: &mut Vec<ProfileRecord>,
    report: &mut ParseReport,
) {
    if record.id.is_empty() {
        report.malformed += 1;
        report.note(format!("record {position}: empty id"));
        return;
    }
    if !seen.insert(record.id.clone()) {
        report.duplicates += 1;
        report.note(format!("record {position}: duplicate id `{}`", record.id));
        return;
    }
    let id = record.id.clone();
    for list in [
        &mut record.parent_ids,
        &mut record.child_ids,
        &mut record.spouse_ids,
        &mut record.sibling_ids,
    ] {
        let before = list.len();
        list.retain(|r| *r != id);
        report.self_references += before - list.len();
        // Within-list duplicates collapse to one reference.
        let mut dedup = HashSet::new();
        list.retain(|r| dedup.insert(r.clone()));
    }
    profiles.push(record);
}
