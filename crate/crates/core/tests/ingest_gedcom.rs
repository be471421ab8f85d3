//! GEDCOM import against a hand-resolved family fixture.

use kinspan::date::parse_date;
use kinspan::ingest::{parse_profiles, SourceFormat};
use kinspan::profile::{Gender, ProfileRecord};
use std::io::Cursor;

const FAMILY: &str = "\
0 HEAD
1 SOUR test
0 @I1@ INDI
1 NAME John /Smith/
1 SEX M
1 BIRT
2 DATE 14 NOV 1900
2 PLAC Boston, Massachusetts, United States
1 FAMS @F1@
0 @I2@ INDI
1 NAME Mary /Jones/
1 SEX F
1 FAMS @F1@
0 @I3@ INDI
1 NAME Alice /Smith/
1 SEX F
1 FAMC @F1@
0 @I4@ INDI
1 NAME Bob /Smith/
1 SEX M
1 BIRT
2 DATE 1930
1 DEAT
2 DATE ABT 1990
1 FAMC @F1@
0 @F1@ FAM
1 HUSB @I1@
1 WIFE @I2@
1 CHIL @I3@
1 CHIL @I4@
0 TRLR
";

fn by_id<'a>(profiles: &'a [ProfileRecord], id: &str) -> &'a ProfileRecord {
    profiles.iter().find(|p| p.id == id).unwrap()
}

#[test]
fn family_links_resolve() {
    let (profiles, report) = parse_profiles(Cursor::new(FAMILY), SourceFormat::Gedcom).unwrap();
    assert_eq!(report.records, 4);
    assert_eq!(report.malformed, 0);

    let h = by_id(&profiles, "I1");
    assert_eq!(h.full_name, "John Smith");
    assert_eq!(h.gender, Gender::Male);
    assert_eq!(h.birth, parse_date("1900-11-14"));
    assert_eq!(h.birth_location.as_deref(), Some("Boston, Massachusetts, United States"));
    assert_eq!(h.spouse_ids, vec!["I2"]);
    assert_eq!(h.child_ids, vec!["I3", "I4"]);

    let w = by_id(&profiles, "I2");
    assert_eq!(w.spouse_ids, vec!["I1"]);
    assert_eq!(w.child_ids, vec!["I3", "I4"]);

    let c1 = by_id(&profiles, "I3");
    assert_eq!(c1.parent_ids, vec!["I1", "I2"]);
    assert_eq!(c1.sibling_ids, vec!["I4"]);

    let c2 = by_id(&profiles, "I4");
    assert_eq!(c2.parent_ids, vec!["I1", "I2"]);
    assert_eq!(c2.sibling_ids, vec!["I3"]);
    // Qualified death date stays absent.
    assert_eq!(c2.death, None);
    assert_eq!(c2.birth, parse_date("1930"));
}

#[test]
fn sibling_derivation_is_symmetric() {
    let (profiles, _) = parse_profiles(Cursor::new(FAMILY), SourceFormat::Gedcom).unwrap();
    for p in &profiles {
        for s in &p.sibling_ids {
            assert!(by_id(&profiles, s).sibling_ids.contains(&p.id), "{} <-> {s}", p.id);
        }
    }
}

#[test]
fn malformed_lines_are_counted_not_fatal() {
    let src = "0 HEAD\nnot a gedcom line\n0 @I1@ INDI\n1 NAME A /B/\n0 TRLR\n";
    let (profiles, report) = parse_profiles(Cursor::new(src), SourceFormat::Gedcom).unwrap();
    assert_eq!(profiles.len(), 1);
    assert_eq!(report.malformed, 1);
}

#[test]
fn duplicate_individuals_rejected() {
    let src = "0 @I1@ INDI\n1 NAME First /One/\n0 @I1@ INDI\n1 NAME Second /Two/\n0 TRLR\n";
    let (profiles, report) = parse_profiles(Cursor::new(src), SourceFormat::Gedcom).unwrap();
    assert_eq!(profiles.len(), 1);
    assert_eq!(profiles[0].full_name, "First One");
    assert_eq!(report.duplicates, 1);
}

#[test]
fn dangling_family_references_survive_as_kin_ids() {
    // The family references children that have no INDI record; the ids stay
    // so the graph can turn them into placeholders.
    let src = "\
0 @I1@ INDI
1 NAME Solo /Parent/
1 SEX F
0 @F1@ FAM
1 WIFE @I1@
1 CHIL @MISSING@
0 TRLR
";
    let (profiles, _) = parse_profiles(Cursor::new(src), SourceFormat::Gedcom).unwrap();
    assert_eq!(profiles[0].child_ids, vec!["MISSING"]);
}
