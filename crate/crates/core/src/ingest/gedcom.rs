//! GEDCOM 5.5 subset importer.
//!
//! Recognized structure: HEAD, INDI (NAME, SEX, BIRT/DEAT with DATE and PLAC),
//! FAM (HUSB, WIFE, CHIL), FAMC, FAMS, TRLR. Family records are resolved into
//! parent/child/spouse references, and siblings are derived as distinct
//! individuals sharing a family as child. Everything else is ignored.

use super::{accept, IngestError, ParseReport};
use crate::date::parse_date;
use crate::profile::{Gender, ProfileRecord};
use std::collections::{HashMap, HashSet};
use std::io::BufRead;

#[derive(Debug, Default)]
struct Individual {
    id: String,
    name: String,
    gender: Gender,
    birth_date: Option<String>,
    birth_place: Option<String>,
    death_date: Option<String>,
    death_place: Option<String>,
    child_of: Vec<String>,
    spouse_in: Vec<String>,
    order: usize,
}

#[derive(Debug, Default)]
struct Family {
    husband: Option<String>,
    wife: Option<String>,
    children: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    None,
    Indi,
    Fam,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    None,
    Birth,
    Death,
}

pub fn parse_gedcom<R: BufRead>(reader: R) -> Result<(Vec<ProfileRecord>, ParseReport), IngestError> {
    let mut report = ParseReport::default();
    let mut individuals: Vec<Individual> = Vec::new();
    let mut indi_index: HashMap<String, usize> = HashMap::new();
    let mut families: Vec<(String, Family)> = Vec::new();
    let mut fam_index: HashMap<String, usize> = HashMap::new();

    let mut section = Section::None;
    let mut event = Event::None;
    // Index of the family currently being filled; valid only inside Section::Fam.
    let mut current_fam: usize = 0;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some(parsed) = parse_line(trimmed) else {
            report.malformed += 1;
            report.note(format!("line {}: unparseable gedcom line", lineno + 1));
            continue;
        };
        let GedcomLine { level, xref, tag, value } = parsed;

        if level == 0 {
            event = Event::None;
            section = match tag {
                "INDI" => {
                    if let Some(id) = xref {
                        if indi_index.contains_key(id) {
                            report.duplicates += 1;
                            report.note(format!("line {}: duplicate INDI `{id}`", lineno + 1));
                            Section::Other
                        } else {
                            indi_index.insert(id.to_string(), individuals.len());
                            individuals.push(Individual {
                                id: id.to_string(),
                                order: individuals.len(),
                                ..Default::default()
                            });
                            Section::Indi
                        }
                    } else {
                        report.malformed += 1;
                        report.note(format!("line {}: INDI without xref", lineno + 1));
                        Section::Other
                    }
                }
                "FAM" => {
                    if let Some(id) = xref {
                        // Repeated FAM ids merge into the earlier record.
                        let ix = *fam_index.entry(id.to_string()).or_insert_with(|| {
                            families.push((id.to_string(), Family::default()));
                            families.len() - 1
                        });
                        current_fam = ix;
                        Section::Fam
                    } else {
                        report.malformed += 1;
                        report.note(format!("line {}: FAM without xref", lineno + 1));
                        Section::Other
                    }
                }
                _ => Section::Other, // HEAD, TRLR, SUBM, ...
            };
            continue;
        }

        match section {
            Section::Indi => {
                let indi = individuals.last_mut().expect("in INDI section");
                if level == 1 {
                    event = Event::None;
                    match tag {
                        "NAME" => indi.name = clean_name(value),
                        "SEX" => {
                            indi.gender = match value.trim() {
                                "M" | "m" => Gender::Male,
                                "F" | "f" => Gender::Female,
                                _ => Gender::Unknown,
                            }
                        }
                        "BIRT" => event = Event::Birth,
                        "DEAT" => event = Event::Death,
                        "FAMC" => {
                            if let Some(id) = strip_xref(value) {
                                indi.child_of.push(id);
                            }
                        }
                        "FAMS" => {
                            if let Some(id) = strip_xref(value) {
                                indi.spouse_in.push(id);
                            }
                        }
                        _ => {}
                    }
                } else if level == 2 {
                    match (event, tag) {
                        (Event::Birth, "DATE") => indi.birth_date = Some(value.to_string()),
                        (Event::Birth, "PLAC") => indi.birth_place = Some(value.to_string()),
                        (Event::Death, "DATE") => indi.death_date = Some(value.to_string()),
                        (Event::Death, "PLAC") => indi.death_place = Some(value.to_string()),
                        _ => {}
                    }
                }
            }
            Section::Fam => {
                if level == 1 {
                    let fam = &mut families[current_fam].1;
                    match tag {
                        "HUSB" => fam.husband = strip_xref(value),
                        "WIFE" => fam.wife = strip_xref(value),
                        "CHIL" => {
                            if let Some(id) = strip_xref(value) {
                                fam.children.push(id);
                            }
                        }
                        _ => {}
                    }
                }
            }
            _ => {}
        }
    }

    // Resolve family structure into kin references. A family's child set is
    // the union of its CHIL entries and individuals pointing at it via FAMC.
    let mut fam_children: HashMap<String, Vec<String>> = HashMap::new();
    for (fam_id, fam) in &families {
        let entry = fam_children.entry(fam_id.clone()).or_default();
        for c in &fam.children {
            if !entry.contains(c) {
                entry.push(c.clone());
            }
        }
    }
    for indi in &individuals {
        for fam_id in &indi.child_of {
            let entry = fam_children.entry(fam_id.clone()).or_default();
            if !entry.contains(&indi.id) {
                entry.push(indi.id.clone());
            }
        }
    }

    let mut parents: HashMap<String, Vec<String>> = HashMap::new();
    let mut children: HashMap<String, Vec<String>> = HashMap::new();
    let mut spouses: HashMap<String, Vec<String>> = HashMap::new();
    let mut siblings: HashMap<String, Vec<String>> = HashMap::new();

    for (fam_id, fam) in &families {
        let kids = fam_children.get(fam_id).cloned().unwrap_or_default();
        let couple: Vec<&String> = [fam.husband.as_ref(), fam.wife.as_ref()].into_iter().flatten().collect();
        if let [h, w] = couple.as_slice() {
            spouses.entry((*h).clone()).or_default().push((*w).clone());
            spouses.entry((*w).clone()).or_default().push((*h).clone());
        }
        for kid in &kids {
            for p in &couple {
                parents.entry(kid.clone()).or_default().push((*p).clone());
                children.entry((*p).clone()).or_default().push(kid.clone());
            }
            for other in &kids {
                if other != kid {
                    siblings.entry(kid.clone()).or_default().push(other.clone());
                }
            }
        }
    }

    let mut records = Vec::with_capacity(individuals.len());
    let mut seen: HashSet<String> = HashSet::new();
    for indi in individuals {
        let record = ProfileRecord {
            id: indi.id.clone(),
            full_name: indi.name,
            gender: indi.gender,
            birth: indi.birth_date.as_deref().and_then(parse_date),
            death: indi.death_date.as_deref().and_then(parse_date),
            birth_location: indi.birth_place,
            death_location: indi.death_place,
            is_private: false,
            parent_ids: parents.remove(&indi.id).unwrap_or_default(),
            child_ids: children.remove(&indi.id).unwrap_or_default(),
            spouse_ids: spouses.remove(&indi.id).unwrap_or_default(),
            sibling_ids: siblings.remove(&indi.id).unwrap_or_default(),
        };
        accept(record, indi.order + 1, &mut seen, &mut records, &mut report);
    }
    report.records = records.len();
    Ok((records, report))
}

struct GedcomLine<'a> {
    level: u32,
    xref: Option<&'a str>,
    tag: &'a str,
    value: &'a str,
}

fn parse_line(line: &str) -> Option<GedcomLine<'_>> {
    let mut rest = line;
    let level_end = rest.find(' ').unwrap_or(rest.len());
    let level: u32 = rest[..level_end].parse().ok()?;
    rest = rest[level_end..].trim_start();
    let mut xref = None;
    if rest.starts_with('@') {
        let end = rest[1..].find('@')? + 1;
        xref = Some(&rest[1..end]);
        rest = rest[end + 1..].trim_start();
    }
    if rest.is_empty() {
        return None;
    }
    let tag_end = rest.find(' ').unwrap_or(rest.len());
    let tag = &rest[..tag_end];
    let value = rest[tag_end..].trim_start();
    Some(GedcomLine { level, xref, tag, value })
}

fn strip_xref(value: &str) -> Option<String> {
    let v = value.trim().trim_start_matches('@').trim_end_matches('@');
    (!v.is_empty()).then(|| v.to_string())
}

fn clean_name(raw: &str) -> String {
    raw.replace('/', " ").split_whitespace().collect::<Vec<_>>().join(" ")
}
