//! Extraction of the 21 per-vertex features from the kinship multigraph.
//!
//! General features come from the vertex's own attributes; nuclear family
//! features aggregate over spouse and child links (placeholders included in
//! the counts); extended family features resolve parents by gender and
//! compose two hops for grandparents. Aggregates over relatives with no known
//! age of death stay absent — a zero-fill belongs to export time, not here.

mod table;

pub use table::{FeatureColumn, FeatureRow, FeatureSet, FeatureTable, FeatureVector, TableError};

use crate::country::normalize_country;
use crate::graph::{LinkType, Multigraph};
use crate::profile::Gender;
use rayon::prelude::*;
use serde::Serialize;

/// Extraction diagnostics. Ambiguity counts record vertices whose father or
/// mother feature was left absent because several same-gender parents exist.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractReport {
    pub rows: usize,
    pub ambiguous_father: usize,
    pub ambiguous_mother: usize,
}

/// Computes one feature row per non-placeholder vertex, in id order.
pub fn feature_matrix(graph: &Multigraph, set: FeatureSet) -> (FeatureTable, ExtractReport) {
    let n = graph.vertex_count();

    // Pass 1: ages for every vertex (placeholders have no dates) and
    // per-vertex parent resolution.
    let ages: Vec<Option<f64>> = (0..n).map(|ix| graph.vertex(ix as u32).age_of_death()).collect();

    #[derive(Default, Clone, Copy)]
    struct Parents {
        father: Option<u32>,
        mother: Option<u32>,
        ambiguous_father: bool,
        ambiguous_mother: bool,
    }

    let parents: Vec<Parents> = (0..n as u32)
        .into_par_iter()
        .map(|ix| {
            let mut p = Parents::default();
            let mut fathers = 0u32;
            let mut mothers = 0u32;
            for link in graph.outgoing(ix) {
                if link.link_type != LinkType::Parent {
                    continue;
                }
                match graph.vertex(link.target).gender {
                    Gender::Male => {
                        fathers += 1;
                        p.father = Some(link.target);
                    }
                    Gender::Female => {
                        mothers += 1;
                        p.mother = Some(link.target);
                    }
                    Gender::Unknown => {}
                }
            }
            if fathers > 1 {
                p.father = None;
                p.ambiguous_father = true;
            }
            if mothers > 1 {
                p.mother = None;
                p.ambiguous_mother = true;
            }
            p
        })
        .collect();

    let father_of = |ix: u32| parents[ix as usize].father;
    let mother_of = |ix: u32| parents[ix as usize].mother;
    let age_of = |ix: Option<u32>| ix.and_then(|i| ages[i as usize]);

    let mut rows: Vec<FeatureRow> = (0..n as u32)
        .into_par_iter()
        .filter(|ix| !graph.vertex(*ix).placeholder)
        .map(|ix| {
            let v = graph.vertex(ix);
            let mut f = FeatureVector {
                full_name: (!v.full_name.is_empty()).then(|| v.full_name.clone()),
                birth_year: v.birth.map(|d| d.year()),
                death_year: v.death.map(|d| d.year()),
                gender_code: v.gender.code(),
                birth_country: v
                    .birth_location
                    .as_deref()
                    .and_then(normalize_country)
                    .map(str::to_string),
                death_country: v
                    .death_location
                    .as_deref()
                    .and_then(normalize_country)
                    .map(str::to_string),
                age_of_death: ages[ix as usize],
                ..Default::default()
            };

            let mut spouse_ages = Aggregate::default();
            let mut sibling_ages = Aggregate::default();
            for link in graph.outgoing(ix) {
                match link.link_type {
                    LinkType::Child => f.children_number += 1,
                    LinkType::Spouse => {
                        f.spouse_number += 1;
                        spouse_ages.push(ages[link.target as usize]);
                    }
                    LinkType::Sibling => {
                        f.sibling_number += 1;
                        sibling_ages.push(ages[link.target as usize]);
                    }
                    LinkType::Parent => {}
                }
            }
            f.min_spouse_age_of_death = spouse_ages.min;
            f.max_spouse_age_of_death = spouse_ages.max;
            f.avg_spouse_age_of_death = spouse_ages.avg();
            f.max_sibling_age_of_death = sibling_ages.max;
            f.avg_sibling_age_of_death = sibling_ages.avg();

            let father = father_of(ix);
            let mother = mother_of(ix);
            f.father_age_of_death = age_of(father);
            f.mother_age_of_death = age_of(mother);
            f.paternal_grandfather_age_of_death = age_of(father.and_then(father_of));
            f.paternal_grandmother_age_of_death = age_of(father.and_then(mother_of));
            f.maternal_grandfather_age_of_death = age_of(mother.and_then(father_of));
            f.maternal_grandmother_age_of_death = age_of(mother.and_then(mother_of));

            FeatureRow { id: v.id.clone(), features: f }
        })
        .collect();

    rows.sort_unstable_by(|a, b| a.id.cmp(&b.id));

    let report = ExtractReport {
        rows: rows.len(),
        ambiguous_father: (0..n)
            .filter(|&i| !graph.vertex(i as u32).placeholder && parents[i].ambiguous_father)
            .count(),
        ambiguous_mother: (0..n)
            .filter(|&i| !graph.vertex(i as u32).placeholder && parents[i].ambiguous_mother)
            .count(),
    };

    (FeatureTable::from_rows(set, rows), report)
}

#[derive(Default)]
struct Aggregate {
    min: Option<f64>,
    max: Option<f64>,
    sum: f64,
    count: u32,
}

impl Aggregate {
    fn push(&mut self, age: Option<f64>) {
        let Some(age) = age else { return };
        self.min = Some(self.min.map_or(age, |m| m.min(age)));
        self.max = Some(self.max.map_or(age, |m| m.max(age)));
        self.sum += age;
        self.count += 1;
    }

    fn avg(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / f64::from(self.count))
    }
}
