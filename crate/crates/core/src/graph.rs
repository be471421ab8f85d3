//! The directed kinship multigraph: construction from profile streams,
//! private-profile placeholders, the three cleaning rules, and persistence.
//!
//! A link's type names the *target's* role relative to the source:
//! `(u, v, Parent)` records that `v` is a parent of `u`, and every stored
//! relation is closed under reciprocity (`Parent`/`Child` pairs, symmetric
//! `Spouse`/`Sibling` pairs). Two-sided source references — u lists v as a
//! child and v lists u as a parent — describe one relation and materialize
//! exactly one reciprocal link pair.

use crate::date::{age_between, PartialDate};
use crate::profile::{Gender, KinRole, ProfileRecord};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use thiserror::Error;

/// Maximum recorded human age; anything older is treated as a data error.
pub const MAX_AGE_YEARS: f64 = 122.0;

/// Minimum plausible age for someone recorded as having children.
pub const MIN_PARENT_AGE_YEARS: f64 = 5.0;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("graph stream line {line}: {message}")]
    Stream { line: usize, message: String },
    #[error("link endpoint `{0}` is not a known vertex")]
    UnknownEndpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkType {
    Spouse,
    Child,
    Parent,
    Sibling,
}

impl LinkType {
    pub const ALL: [LinkType; 4] = [LinkType::Spouse, LinkType::Child, LinkType::Parent, LinkType::Sibling];

    pub fn name(self) -> &'static str {
        match self {
            LinkType::Spouse => "spouse",
            LinkType::Child => "child",
            LinkType::Parent => "parent",
            LinkType::Sibling => "sibling",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spouse" => Some(LinkType::Spouse),
            "child" => Some(LinkType::Child),
            "parent" => Some(LinkType::Parent),
            "sibling" => Some(LinkType::Sibling),
            _ => None,
        }
    }
}

impl fmt::Display for LinkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A directed link `(source, target, type, created)`. `created` carries the
/// child's birth date on Parent/Child pairs and is absent otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub source: u32,
    pub target: u32,
    pub link_type: LinkType,
    pub created: Option<PartialDate>,
}

/// One graph vertex: a public profile's attributes, or a bare placeholder
/// standing in for a privacy-restricted profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub placeholder: bool,
    pub full_name: String,
    pub gender: Gender,
    pub birth: Option<PartialDate>,
    pub death: Option<PartialDate>,
    pub birth_location: Option<String>,
    pub death_location: Option<String>,
}

impl Vertex {
    fn private_placeholder(id: String) -> Self {
        Vertex {
            id,
            placeholder: true,
            full_name: String::new(),
            gender: Gender::Unknown,
            birth: None,
            death: None,
            birth_location: None,
            death_location: None,
        }
    }

    /// Age of death in years, or `None` when either date is missing.
    pub fn age_of_death(&self) -> Option<f64> {
        match (&self.birth, &self.death) {
            (Some(b), Some(d)) => Some(age_between(b, d)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub placeholders: usize,
    pub self_links_dropped: usize,
    pub duplicate_profile_ids: usize,
}

/// Counts and ids of vertices hit by each cleaning rule. A vertex can appear
/// under more than one rule; its dates are erased once.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CleanReport {
    pub negative_age: Vec<String>,
    pub over_max_age: Vec<String>,
    pub child_under_five: Vec<String>,
}

impl CleanReport {
    pub fn negative_age_count(&self) -> usize {
        self.negative_age.len()
    }

    pub fn over_max_age_count(&self) -> usize {
        self.over_max_age.len()
    }

    pub fn child_under_five_count(&self) -> usize {
        self.child_under_five.len()
    }

    pub fn total_affected(&self) -> usize {
        let mut ids: Vec<&String> = self
            .negative_age
            .iter()
            .chain(&self.over_max_age)
            .chain(&self.child_under_five)
            .collect();
        ids.sort();
        ids.dedup();
        ids.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkTypeCounts {
    pub spouse: usize,
    pub child: usize,
    pub parent: usize,
    pub sibling: usize,
}

/// Summary counts persisted next to the graph.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub vertices: usize,
    pub links: usize,
    pub public_vertices: usize,
    pub placeholder_vertices: usize,
    pub estimated_distinct_private: usize,
    pub links_by_type: LinkTypeCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cleaned: Option<CleanCounts>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CleanCounts {
    pub negative_age: usize,
    pub over_max_age: usize,
    pub child_under_five: usize,
}

impl From<&CleanReport> for CleanCounts {
    fn from(r: &CleanReport) -> Self {
        CleanCounts {
            negative_age: r.negative_age_count(),
            over_max_age: r.over_max_age_count(),
            child_under_five: r.child_under_five_count(),
        }
    }
}

/// The directed multigraph. Links are stored sorted by source with a CSR
/// offset index, so per-vertex scans are contiguous; the finished graph is
/// immutable apart from date erasure during cleaning.
#[derive(Debug, Clone, Default)]
pub struct Multigraph {
    vertices: Vec<Vertex>,
    index_of: HashMap<String, u32>,
    links: Vec<Link>,
    offsets: Vec<u32>,
}

impl Multigraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, ix: u32) -> &Vertex {
        &self.vertices[ix as usize]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.index_of.get(id).copied()
    }

    /// Outgoing links of a vertex, sorted by (type, target).
    pub fn outgoing(&self, ix: u32) -> &[Link] {
        let lo = self.offsets[ix as usize] as usize;
        let hi = self.offsets[ix as usize + 1] as usize;
        &self.links[lo..hi]
    }

    pub fn meta(&self, clean: Option<&CleanReport>) -> GraphMeta {
        let mut by_type = LinkTypeCounts::default();
        for l in &self.links {
            match l.link_type {
                LinkType::Spouse => by_type.spouse += 1,
                LinkType::Child => by_type.child += 1,
                LinkType::Parent => by_type.parent += 1,
                LinkType::Sibling => by_type.sibling += 1,
            }
        }
        let placeholders = self.vertices.iter().filter(|v| v.placeholder).count();
        GraphMeta {
            vertices: self.vertices.len(),
            links: self.links.len(),
            public_vertices: self.vertices.len() - placeholders,
            placeholder_vertices: placeholders,
            estimated_distinct_private: estimate_distinct_private(self),
            links_by_type: by_type,
            cleaned: clean.map(CleanCounts::from),
        }
    }

    fn finish(vertices: Vec<Vertex>, index_of: HashMap<String, u32>, mut links: Vec<Link>) -> Self {
        links.sort_unstable_by_key(|l| (l.source, l.link_type, l.target));
        let mut offsets = vec![0u32; vertices.len() + 1];
        for l in &links {
            offsets[l.source as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        Multigraph { vertices, index_of, links, offsets }
    }
}

/// Canonical undirected relation, deduplicated before links materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Relation {
    /// (parent, child)
    ParentChild(u32, u32),
    /// unordered, stored (min, max)
    Spouse(u32, u32),
    /// unordered, stored (min, max)
    Sibling(u32, u32),
}

/// Builds the multigraph: one vertex per profile, one reciprocal link pair per
/// relation, and a fresh single-link placeholder vertex for every reference to
/// an id absent from the stream.
pub fn build_multigraph(profiles: Vec<ProfileRecord>) -> (Multigraph, BuildReport) {
    let mut report = BuildReport::default();
    let mut vertices: Vec<Vertex> = Vec::with_capacity(profiles.len());
    let mut index_of: HashMap<String, u32> = HashMap::with_capacity(profiles.len() * 2);

    struct KinRefs {
        source: u32,
        parents: Vec<String>,
        children: Vec<String>,
        spouses: Vec<String>,
        siblings: Vec<String>,
    }

    let mut refs: Vec<KinRefs> = Vec::with_capacity(profiles.len());
    for profile in profiles {
        let ix = vertices.len() as u32;
        if index_of.contains_key(&profile.id) {
            report.duplicate_profile_ids += 1;
            continue;
        }
        index_of.insert(profile.id.clone(), ix);
        refs.push(KinRefs {
            source: ix,
            parents: profile.parent_ids,
            children: profile.child_ids,
            spouses: profile.spouse_ids,
            siblings: profile.sibling_ids,
        });
        vertices.push(Vertex {
            id: profile.id,
            placeholder: false,
            full_name: profile.full_name,
            gender: profile.gender,
            birth: profile.birth,
            death: profile.death,
            birth_location: profile.birth_location,
            death_location: profile.death_location,
        });
    }

    let mut relations: Vec<Relation> = Vec::new();
    let mut placeholder_seq = 0usize;
    {
        let mut resolve = |target_id: &str, vertices: &mut Vec<Vertex>| -> u32 {
            if let Some(&ix) = index_of.get(target_id) {
                return ix;
            }
            // Unknown id: a fresh private placeholder per reference.
            let mut id = format!("~private:{placeholder_seq}");
            while index_of.contains_key(&id) {
                placeholder_seq += 1;
                id = format!("~private:{placeholder_seq}");
            }
            placeholder_seq += 1;
            let ix = vertices.len() as u32;
            index_of.insert(id.clone(), ix);
            vertices.push(Vertex::private_placeholder(id));
            report.placeholders += 1;
            ix
        };

        for kin in &refs {
            let u = kin.source;
            let own_id = vertices[u as usize].id.clone();
            let lists: [(KinRole, &[String]); 4] = [
                (KinRole::Parent, &kin.parents),
                (KinRole::Child, &kin.children),
                (KinRole::Spouse, &kin.spouses),
                (KinRole::Sibling, &kin.siblings),
            ];
            for (role, ids) in lists {
                for target_id in ids {
                    if *target_id == own_id {
                        report.self_links_dropped += 1;
                        continue;
                    }
                    let v = resolve(target_id, &mut vertices);
                    if v == u {
                        report.self_links_dropped += 1;
                        continue;
                    }
                    relations.push(match role {
                        KinRole::Parent => Relation::ParentChild(v, u),
                        KinRole::Child => Relation::ParentChild(u, v),
                        KinRole::Spouse => Relation::Spouse(u.min(v), u.max(v)),
                        KinRole::Sibling => Relation::Sibling(u.min(v), u.max(v)),
                    });
                }
            }
        }
    }

    relations.sort_unstable();
    relations.dedup();

    let mut links = Vec::with_capacity(relations.len() * 2);
    for rel in relations {
        match rel {
            Relation::ParentChild(parent, child) => {
                let created = vertices[child as usize].birth;
                links.push(Link { source: child, target: parent, link_type: LinkType::Parent, created });
                links.push(Link { source: parent, target: child, link_type: LinkType::Child, created });
            }
            Relation::Spouse(a, b) => {
                links.push(Link { source: a, target: b, link_type: LinkType::Spouse, created: None });
                links.push(Link { source: b, target: a, link_type: LinkType::Spouse, created: None });
            }
            Relation::Sibling(a, b) => {
                links.push(Link { source: a, target: b, link_type: LinkType::Sibling, created: None });
                links.push(Link { source: b, target: a, link_type: LinkType::Sibling, created: None });
            }
        }
    }

    (Multigraph::finish(vertices, index_of, links), report)
}

/// Applies the three data-cleaning rules, erasing birth and death dates of
/// inconsistent vertices: (a) negative age of death, (b) age over 122,
/// (c) recorded children at an age under five. Vertices and links remain.
pub fn clean_inconsistent(graph: &mut Multigraph) -> CleanReport {
    let mut report = CleanReport::default();
    let mut erase: Vec<u32> = Vec::new();
    for ix in 0..graph.vertices.len() as u32 {
        let vertex = &graph.vertices[ix as usize];
        let Some(age) = vertex.age_of_death() else { continue };
        let mut hit = false;
        if age < 0.0 {
            report.negative_age.push(vertex.id.clone());
            hit = true;
        }
        if age > MAX_AGE_YEARS {
            report.over_max_age.push(vertex.id.clone());
            hit = true;
        }
        if age < MIN_PARENT_AGE_YEARS
            && graph.outgoing(ix).iter().any(|l| l.link_type == LinkType::Child)
        {
            report.child_under_five.push(vertex.id.clone());
            hit = true;
        }
        if hit {
            erase.push(ix);
        }
    }
    for ix in erase {
        let v = &mut graph.vertices[ix as usize];
        v.birth = None;
        v.death = None;
    }
    report
}

/// Lower bound on distinct private profiles behind the placeholder vertices.
///
/// Each placeholder has a single link pair; its outgoing link type names its
/// public neighbor's role, so an outgoing `Child` link marks the placeholder
/// as someone's parent. A private parent appears once per referencing child
/// but a person has at most two parents, so that class divides by two; every
/// other role divides by one.
pub fn estimate_distinct_private(graph: &Multigraph) -> usize {
    let mut by_type = [0usize; 4];
    for (ix, vertex) in graph.vertices.iter().enumerate() {
        if !vertex.placeholder {
            continue;
        }
        if let Some(link) = graph.outgoing(ix as u32).first() {
            by_type[link.link_type as usize] += 1;
        }
    }
    let spouse = by_type[LinkType::Spouse as usize];
    let parent_role = by_type[LinkType::Child as usize]; // outgoing Child ⇒ placeholder is a parent
    let child_role = by_type[LinkType::Parent as usize];
    let sibling = by_type[LinkType::Sibling as usize];
    spouse + child_role + sibling + parent_role.div_ceil(2)
}

// ---------------------------------------------------------------------------
// Persistence: a line-oriented JSON stream (pipe-friendly, loadable) and a
// CSV pair + JSON metadata sidecar (export).
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum StreamLine {
    Meta(GraphMeta),
    Vertex {
        id: String,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        placeholder: bool,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        name: String,
        #[serde(default)]
        gender: Gender,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        birth: Option<PartialDate>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        death: Option<PartialDate>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        birth_location: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        death_location: Option<String>,
    },
    Link {
        u: String,
        v: String,
        t: LinkType,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<PartialDate>,
    },
}

/// Writes the graph as a JSON-lines stream: one meta line, then vertices in
/// index order, then links in multiset order.
pub fn write_graph_stream<W: Write>(graph: &Multigraph, meta: &GraphMeta, mut out: W) -> std::io::Result<()> {
    let mut emit = |line: &StreamLine| -> std::io::Result<()> {
        serde_json::to_writer(&mut out, line)?;
        out.write_all(b"\n")
    };
    emit(&StreamLine::Meta(meta.clone()))?;
    for v in &graph.vertices {
        emit(&StreamLine::Vertex {
            id: v.id.clone(),
            placeholder: v.placeholder,
            name: v.full_name.clone(),
            gender: v.gender,
            birth: v.birth,
            death: v.death,
            birth_location: v.birth_location.clone(),
            death_location: v.death_location.clone(),
        })?;
    }
    for l in &graph.links {
        emit(&StreamLine::Link {
            u: graph.vertices[l.source as usize].id.clone(),
            v: graph.vertices[l.target as usize].id.clone(),
            t: l.link_type,
            c: l.created,
        })?;
    }
    Ok(())
}

/// Reads a graph stream written by [`write_graph_stream`].
pub fn read_graph_stream<R: BufRead>(reader: R) -> Result<(Multigraph, GraphMeta), GraphError> {
    let mut meta = GraphMeta::default();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut index_of: HashMap<String, u32> = HashMap::new();
    let mut raw_links: Vec<(String, String, LinkType, Option<PartialDate>)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: StreamLine = serde_json::from_str(&line).map_err(|e| GraphError::Stream {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        match parsed {
            StreamLine::Meta(m) => meta = m,
            StreamLine::Vertex { id, placeholder, name, gender, birth, death, birth_location, death_location } => {
                let ix = vertices.len() as u32;
                index_of.insert(id.clone(), ix);
                vertices.push(Vertex {
                    id,
                    placeholder,
                    full_name: name,
                    gender,
                    birth,
                    death,
                    birth_location,
                    death_location,
                });
            }
            StreamLine::Link { u, v, t, c } => raw_links.push((u, v, t, c)),
        }
    }
    let mut links = Vec::with_capacity(raw_links.len());
    for (u, v, t, c) in raw_links {
        let su = *index_of.get(&u).ok_or(GraphError::UnknownEndpoint(u))?;
        let tv = *index_of.get(&v).ok_or(GraphError::UnknownEndpoint(v))?;
        links.push(Link { source: su, target: tv, link_type: t, created: c });
    }
    Ok((Multigraph::finish(vertices, index_of, links), meta))
}

fn date_cell(d: &Option<PartialDate>) -> String {
    d.map(|d| d.to_string()).unwrap_or_default()
}

/// Writes `vertices.csv`, `links.csv`, and `meta.json` into a directory.
pub fn write_csv_dir(graph: &Multigraph, meta: &GraphMeta, dir: &Path) -> Result<(), GraphError> {
    std::fs::create_dir_all(dir)?;
    let mut vw = csv::Writer::from_path(dir.join("vertices.csv")).map_err(io_of_csv)?;
    vw.write_record(["id", "private", "name", "gender", "birth_date", "death_date", "birth_location", "death_location"])
        .map_err(io_of_csv)?;
    for v in &graph.vertices {
        vw.write_record([
            v.id.as_str(),
            if v.placeholder { "1" } else { "0" },
            v.full_name.as_str(),
            &v.gender.code().to_string(),
            &date_cell(&v.birth),
            &date_cell(&v.death),
            v.birth_location.as_deref().unwrap_or(""),
            v.death_location.as_deref().unwrap_or(""),
        ])
        .map_err(io_of_csv)?;
    }
    vw.flush()?;

    let mut lw = csv::Writer::from_path(dir.join("links.csv")).map_err(io_of_csv)?;
    lw.write_record(["u", "v", "type", "created"]).map_err(io_of_csv)?;
    for l in &graph.links {
        lw.write_record([
            graph.vertices[l.source as usize].id.as_str(),
            graph.vertices[l.target as usize].id.as_str(),
            l.link_type.name(),
            &date_cell(&l.created),
        ])
        .map_err(io_of_csv)?;
    }
    lw.flush()?;

    let json = serde_json::to_string_pretty(meta).expect("meta serializes");
    std::fs::write(dir.join("meta.json"), json + "\n")?;
    Ok(())
}

fn io_of_csv(e: csv::Error) -> GraphError {
    GraphError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::date::parse_date;

    fn profile(id: &str) -> ProfileRecord {
        ProfileRecord::new(id)
    }

    #[test]
    fn empty_stream_builds_empty_graph() {
        let (g, report) = build_multigraph(Vec::new());
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.link_count(), 0);
        assert_eq!(report.placeholders, 0);
    }

    #[test]
    fn parent_child_pair_carries_child_birth_date() {
        // Child references parent; link types name the target's role, and the
        // pair carries the child's birth date.
        let mut parent = profile("elizabeth");
        parent.gender = Gender::Female;
        parent.child_ids = vec!["charles".into()];
        let mut child = profile("charles");
        child.gender = Gender::Male;
        child.birth = parse_date("1948-11-14");
        child.parent_ids = vec!["elizabeth".into()];

        let (g, report) = build_multigraph(vec![parent, child]);
        assert_eq!(report.placeholders, 0);
        assert_eq!(g.vertex_count(), 2);
        // Two-sided references collapse into one relation: exactly two links.
        assert_eq!(g.link_count(), 2);
        let e = g.index_of("elizabeth").unwrap();
        let c = g.index_of("charles").unwrap();
        let created = parse_date("1948-11-14");
        assert_eq!(
            g.outgoing(e),
            &[Link { source: e, target: c, link_type: LinkType::Child, created }]
        );
        assert_eq!(
            g.outgoing(c),
            &[Link { source: c, target: e, link_type: LinkType::Parent, created }]
        );
    }

    #[test]
    fn unknown_spouse_creates_placeholder_pair() {
        let mut p = profile("u");
        p.spouse_ids = vec!["ghost".into()];
        let (g, report) = build_multigraph(vec![p]);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(report.placeholders, 1);
        let u = g.index_of("u").unwrap();
        let out = g.outgoing(u);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].link_type, LinkType::Spouse);
        assert_eq!(out[0].created, None);
        let p_ix = out[0].target;
        assert!(g.vertex(p_ix).placeholder);
        let back = g.outgoing(p_ix);
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].target, u);
        assert_eq!(back[0].link_type, LinkType::Spouse);
    }

    #[test]
    fn same_unknown_id_yields_fresh_placeholders() {
        let mut a = profile("a");
        a.parent_ids = vec!["ghost".into()];
        let mut b = profile("b");
        b.parent_ids = vec!["ghost".into()];
        let (g, report) = build_multigraph(vec![a, b]);
        assert_eq!(report.placeholders, 2);
        assert_eq!(g.vertex_count(), 4);
        // Every placeholder keeps a single incident link pair.
        for (ix, v) in g.vertices().iter().enumerate() {
            if v.placeholder {
                assert_eq!(g.outgoing(ix as u32).len(), 1);
            }
        }
    }

    fn dated(id: &str, birth: &str, death: &str) -> ProfileRecord {
        let mut p = profile(id);
        p.birth = parse_date(birth);
        p.death = parse_date(death);
        p
    }

    #[test]
    fn cleaning_rules_erase_dates_only() {
        let reversed = dated("rev", "1900", "1850");
        let ancient = dated("old", "1700", "1823");
        let mut young_parent = dated("kidparent", "2000", "2004");
        young_parent.child_ids = vec!["kid".into()];
        let kid = profile("kid");
        let fine = dated("ok", "1800", "1900");

        let (mut g, _) = build_multigraph(vec![reversed, ancient, young_parent, kid, fine]);
        let report = clean_inconsistent(&mut g);
        assert_eq!(report.negative_age, vec!["rev".to_string()]);
        assert_eq!(report.over_max_age, vec!["old".to_string()]);
        assert_eq!(report.child_under_five, vec!["kidparent".to_string()]);

        for id in ["rev", "old", "kidparent"] {
            let v = g.vertex(g.index_of(id).unwrap());
            assert!(v.birth.is_none() && v.death.is_none(), "{id} dates erased");
        }
        let ok = g.vertex(g.index_of("ok").unwrap());
        assert_eq!(ok.age_of_death(), Some(100.0));
        // Structure untouched.
        assert_eq!(g.vertex_count(), 5);
    }

    #[test]
    fn consistent_profiles_untouched() {
        let (mut g, _) = build_multigraph(vec![dated("ok", "1800", "1900")]);
        let report = clean_inconsistent(&mut g);
        assert_eq!(report.negative_age_count(), 0);
        assert_eq!(report.over_max_age_count(), 0);
        assert_eq!(report.child_under_five_count(), 0);
    }

    #[test]
    fn age_exactly_122_survives_cleaning() {
        let (mut g, _) = build_multigraph(vec![dated("max", "1700", "1822")]);
        let report = clean_inconsistent(&mut g);
        assert_eq!(report.over_max_age_count(), 0);
        assert_eq!(g.vertex(0).age_of_death(), Some(122.0));
    }

    #[test]
    fn private_estimate_divides_parent_placeholders_by_two() {
        // Four children each referencing one unknown parent: placeholder
        // parents stand for at least two distinct people.
        let mut profiles = Vec::new();
        for (i, ghost) in ["g1", "g2", "g3", "g4"].iter().enumerate() {
            let mut p = profile(&format!("c{i}"));
            p.parent_ids = vec![ghost.to_string()];
            profiles.push(p);
        }
        let (g, _) = build_multigraph(profiles);
        assert_eq!(estimate_distinct_private(&g), 2);
    }

    #[test]
    fn private_estimate_keeps_other_roles() {
        let mut profiles = Vec::new();
        for i in 0..3 {
            let mut p = profile(&format!("s{i}"));
            p.spouse_ids = vec![format!("ghost{i}")];
            profiles.push(p);
        }
        let (g, _) = build_multigraph(profiles);
        assert_eq!(estimate_distinct_private(&g), 3);
        let (empty, _) = build_multigraph(vec![]);
        assert_eq!(estimate_distinct_private(&empty), 0);
    }

    #[test]
    fn stream_round_trip() {
        let mut a = profile("a");
        a.gender = Gender::Male;
        a.birth = parse_date("1800-02-03");
        a.death = parse_date("1870");
        a.spouse_ids = vec!["b".into(), "ghost".into()];
        let mut b = profile("b");
        b.gender = Gender::Female;
        b.child_ids = vec!["c".into()];
        let c = dated("c", "1830-01-01", "1900-06-07");
        let (g, _) = build_multigraph(vec![a, b, c]);
        let meta = g.meta(None);
        let mut buf = Vec::new();
        write_graph_stream(&g, &meta, &mut buf).unwrap();
        let (g2, meta2) = read_graph_stream(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(meta, meta2);
        assert_eq!(g.vertices(), g2.vertices());
        assert_eq!(g.links(), g2.links());
    }
}
