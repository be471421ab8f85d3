//! Subcommand implementations: thin wiring from CLI arguments to the library,
//! writing data to the primary output and diagnostics to stderr.

use crate::output::{open_input, open_output, HashingWriter, RunManifest};
use crate::{
    DatasetArgs, FeaturesExtractArgs, GraphBuildArgs, IngestArgs, LearnCvArgs, LearnRankArgs,
    RegressSimpleArgs, RegressStepwiseArgs, StatsDistArgs, StatsTrendArgs, SynthArgs,
};
use anyhow::{anyhow, bail, Context, Result};
use kinspan::country::canonical_country_tag;
use kinspan::datasets::{filter_dataset, DatasetSpec};
use kinspan::features::{feature_matrix, FeatureColumn, FeatureSet, FeatureTable};
use kinspan::graph::{build_multigraph, clean_inconsistent, read_graph_stream, write_csv_dir, write_graph_stream};
use kinspan::ingest::{parse_profiles, SourceFormat};
use kinspan::learn::{cross_validate, information_gain_ranking, ClassifierKind, ClassifierSpec, LabeledTable};
use kinspan::profile::{write_jsonl, Gender};
use kinspan::regress::{simple_feature_regression, stepwise_feature_regression, SimpleFit};
use kinspan::stats::{lifespan_distribution, write_distribution_csv, write_trend_csv, yearly_central_tendency};
use kinspan::synth::{generate_population, SynthConfig};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

fn parse_gender(s: &str) -> Result<Gender> {
    Gender::parse(s).ok_or_else(|| anyhow!("unknown gender `{s}`"))
}

impl DatasetArgs {
    /// Resolves to a (label, spec) pair; `None` when no selection was made.
    fn resolve(&self) -> Result<Option<(String, DatasetSpec)>> {
        let mut spec = match &self.dataset {
            Some(name) => DatasetSpec::named(name)
                .ok_or_else(|| anyhow!("unknown dataset name `{name}`"))?,
            None => DatasetSpec::default(),
        };
        let mut selected = self.dataset.is_some();
        if let Some(c) = &self.country {
            spec.country = Some(canonical_country_tag(c));
            selected = true;
        }
        if let Some(g) = &self.gender {
            spec.gender = Some(parse_gender(g)?);
            selected = true;
        }
        if let Some(a) = self.min_age {
            spec.min_age_of_death = Some(a);
            selected = true;
        }
        if self.married {
            spec.require_married = true;
            selected = true;
        }
        if let Some(f) = &self.feature_present {
            let col = FeatureColumn::from_name(f)
                .ok_or_else(|| anyhow!("unknown feature column `{f}`"))?;
            spec.require_feature_present = Some(col);
            selected = true;
        }
        if self.no_missing {
            spec.require_no_missing = true;
            selected = true;
        }
        if let Some(y) = self.max_birth_year {
            spec.max_birth_year = Some(y);
            selected = true;
        }
        if !selected {
            return Ok(None);
        }
        let label = self.dataset.clone().unwrap_or_else(|| "custom".to_string());
        Ok(Some((label, spec)))
    }
}

fn load_table(input: &str) -> Result<FeatureTable> {
    let reader = open_input(input)?;
    FeatureTable::read_csv(reader).with_context(|| format!("read feature table from {input}"))
}

fn load_filtered(input: &str, args: &DatasetArgs) -> Result<(FeatureTable, Option<String>)> {
    let table = load_table(input)?;
    match args.resolve()? {
        None => Ok((table, None)),
        Some((label, spec)) => {
            let filtered = filter_dataset(&table, &spec)?;
            eprintln!(
                "kinspan: dataset {label} ({}) keeps {} of {} rows",
                spec.describe(),
                filtered.len(),
                table.len()
            );
            Ok((filtered, Some(label)))
        }
    }
}

pub fn ingest(args: IngestArgs, manifest_path: Option<&Path>) -> Result<()> {
    let format = SourceFormat::parse(&args.format).expect("validated by clap");
    let reader = open_input(&args.input)?;
    let (profiles, report) = parse_profiles(reader, format)?;
    let mut manifest = RunManifest::new("ingest");
    manifest.inputs.push(args.input.clone());
    let mut out = open_output(args.out.as_ref())?;
    write_jsonl(&profiles, &mut out)?;
    out.finish(&mut manifest)?;
    eprintln!(
        "kinspan: ingest accepted {} records ({} malformed, {} duplicates, {} self references)",
        report.records, report.malformed, report.duplicates, report.self_references
    );
    for msg in &report.messages {
        eprintln!("kinspan:   {msg}");
    }
    if let Some(path) = &args.report {
        let mut w = HashingWriter::new(std::fs::File::create(path)?, path.display().to_string());
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
        w.finish(&mut manifest)?;
    }
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

pub fn graph_build(args: GraphBuildArgs, manifest_path: Option<&Path>) -> Result<()> {
    let reader = open_input(&args.input)?;
    let (profiles, parse_report) = parse_profiles(reader, SourceFormat::JsonLines)?;
    if parse_report.malformed > 0 {
        eprintln!("kinspan: {} malformed profile lines skipped", parse_report.malformed);
    }
    let (mut graph, build_report) = build_multigraph(profiles);
    let clean_report = if args.no_clean { None } else { Some(clean_inconsistent(&mut graph)) };
    let meta = graph.meta(clean_report.as_ref());
    eprintln!(
        "kinspan: graph has {} vertices ({} placeholders, at least {} distinct private) and {} links",
        meta.vertices, meta.placeholder_vertices, meta.estimated_distinct_private, meta.links
    );
    if build_report.self_links_dropped > 0 {
        eprintln!("kinspan: dropped {} self-referencing links", build_report.self_links_dropped);
    }
    if let Some(clean) = &clean_report {
        eprintln!(
            "kinspan: cleaning erased dates on {} vertices (negative age {}, over max age {}, children under five {})",
            clean.total_affected(),
            clean.negative_age_count(),
            clean.over_max_age_count(),
            clean.child_under_five_count()
        );
    }

    let mut manifest = RunManifest::new("graph build");
    manifest.inputs.push(args.input.clone());
    match &args.out_dir {
        Some(dir) => {
            write_csv_dir(&graph, &meta, dir)?;
            for name in ["vertices.csv", "links.csv", "meta.json"] {
                manifest.record_file(&dir.join(name))?;
            }
            if let Some(out) = &args.out {
                let mut w = open_output(Some(out))?;
                write_graph_stream(&graph, &meta, &mut w)?;
                w.finish(&mut manifest)?;
            }
        }
        None => {
            let mut w = open_output(args.out.as_ref())?;
            write_graph_stream(&graph, &meta, &mut w)?;
            w.finish(&mut manifest)?;
        }
    }
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

pub fn features_extract(args: FeaturesExtractArgs, manifest_path: Option<&Path>) -> Result<()> {
    let set = FeatureSet::parse(&args.set).expect("validated by clap");
    let reader = open_input(&args.input)?;
    let (graph, _) = read_graph_stream(reader)?;
    let (table, report) = feature_matrix(&graph, set);
    eprintln!(
        "kinspan: extracted {} rows under the {} set ({} ambiguous fathers, {} ambiguous mothers)",
        report.rows,
        set.name(),
        report.ambiguous_father,
        report.ambiguous_mother
    );
    let mut manifest = RunManifest::new("features extract");
    manifest.inputs.push(args.input.clone());
    let mut w = open_output(args.out.as_ref())?;
    match args.format.as_str() {
        "json" => write_table_json(&table, &mut w)?,
        _ => table.write_csv(&mut w)?,
    }
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

fn write_table_json<W: Write>(table: &FeatureTable, mut out: W) -> Result<()> {
    for row in table.rows() {
        let mut object = serde_json::Map::new();
        object.insert("id".into(), serde_json::Value::String(row.id.clone()));
        for col in table.columns() {
            let value = match col {
                FeatureColumn::FullName => {
                    row.features.full_name.clone().map(serde_json::Value::String)
                }
                FeatureColumn::BirthCountry => {
                    row.features.birth_country.clone().map(serde_json::Value::String)
                }
                FeatureColumn::DeathCountry => {
                    row.features.death_country.clone().map(serde_json::Value::String)
                }
                _ => row.features.numeric(*col).and_then(|v| serde_json::Number::from_f64(v).map(serde_json::Value::Number)),
            };
            object.insert(col.name().into(), value.unwrap_or(serde_json::Value::Null));
        }
        serde_json::to_writer(&mut out, &serde_json::Value::Object(object))?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn stats_dist(args: StatsDistArgs, manifest_path: Option<&Path>) -> Result<()> {
    let (table, dataset) = load_filtered(&args.input, &args.dataset)?;
    let series = lifespan_distribution(&table, args.quarter)?;
    eprintln!("kinspan: quarter {} cohort has {} people", args.quarter, series.n);
    let mut manifest = RunManifest::new("stats dist");
    manifest.inputs.push(args.input.clone());
    manifest.dataset = dataset;
    let mut w = open_output(args.out.as_ref())?;
    match args.format.as_str() {
        "json" => {
            serde_json::to_writer_pretty(&mut w, &series)?;
            writeln!(w)?;
        }
        _ => write_distribution_csv(&series, &mut w)?,
    }
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

pub fn stats_trend(args: StatsTrendArgs, manifest_path: Option<&Path>) -> Result<()> {
    let (table, dataset) = load_filtered(&args.input, &args.dataset)?;
    // The dataset's gender predicate doubles as the series slice tag.
    let gender = args.dataset.gender.as_deref().map(parse_gender).transpose()?;
    let series = yearly_central_tendency(&table, args.from..=args.to, gender)?;
    let mut manifest = RunManifest::new("stats trend");
    manifest.inputs.push(args.input.clone());
    manifest.dataset = dataset;
    let mut w = open_output(args.out.as_ref())?;
    match args.format.as_str() {
        "json" => {
            serde_json::to_writer_pretty(&mut w, &series)?;
            writeln!(w)?;
        }
        _ => write_trend_csv(&series, &mut w)?,
    }
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

/// The reference single-feature regressions: each extended-family feature on
/// its feature-present dataset at minimum lifespan 10, the spouse aggregates
/// on the married dataset, and children-number at minimum lifespan 50.
fn sweep_plan() -> Vec<(FeatureColumn, String, DatasetSpec)> {
    use FeatureColumn::*;
    let mut plan = Vec::new();
    for col in [
        FatherAgeOfDeath,
        MotherAgeOfDeath,
        PaternalGrandfatherAgeOfDeath,
        MaternalGrandfatherAgeOfDeath,
        PaternalGrandmotherAgeOfDeath,
        MaternalGrandmotherAgeOfDeath,
        SiblingNumber,
        MaxSiblingAgeOfDeath,
        AvgSiblingAgeOfDeath,
    ] {
        let spec = DatasetSpec {
            min_age_of_death: Some(10.0),
            require_feature_present: Some(col),
            ..Default::default()
        };
        plan.push((col, format!("{}-dataset-10", col.name()), spec));
    }
    for col in [AvgSpouseAgeOfDeath, MaxSpouseAgeOfDeath, MinSpouseAgeOfDeath] {
        let spec = DatasetSpec {
            require_married: true,
            require_feature_present: Some(col),
            ..Default::default()
        };
        plan.push((col, "married-dataset".to_string(), spec));
    }
    let spec = DatasetSpec {
        min_age_of_death: Some(50.0),
        require_feature_present: Some(ChildrenNumber),
        ..Default::default()
    };
    plan.push((ChildrenNumber, "children-number-dataset-50".to_string(), spec));
    plan
}

#[derive(Serialize)]
struct SimpleRow<'a> {
    feature: &'a str,
    dataset: &'a str,
    n: usize,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    p_value: f64,
}

fn display_p(p: f64) -> String {
    if p < 2.2e-16 {
        "<2.2e-16".to_string()
    } else {
        format!("{p:.4e}")
    }
}

pub fn regress_simple(args: RegressSimpleArgs, manifest_path: Option<&Path>) -> Result<()> {
    let table = load_table(&args.input)?;
    let custom = args.dataset.resolve()?;

    let plan: Vec<(FeatureColumn, String, DatasetSpec)> = match &args.x {
        Some(name) => {
            let col = FeatureColumn::from_name(name)
                .ok_or_else(|| anyhow!("unknown feature column `{name}`"))?;
            match &custom {
                Some((label, spec)) => vec![(col, label.clone(), spec.clone())],
                None => {
                    let mut spec = DatasetSpec::default();
                    spec.require_feature_present = Some(col);
                    vec![(col, "all".to_string(), spec)]
                }
            }
        }
        None => match &custom {
            Some((label, spec)) => sweep_plan()
                .into_iter()
                .map(|(col, _, _)| (col, label.clone(), spec.clone()))
                .collect(),
            None => sweep_plan(),
        },
    };

    let mut fits: Vec<(FeatureColumn, String, SimpleFit)> = Vec::new();
    for (col, label, spec) in plan {
        let filtered = filter_dataset(&table, &spec)?;
        match simple_feature_regression(&filtered, col) {
            Ok(fit) => {
                eprintln!(
                    "kinspan: {} on {label}: n={} slope={:.6} r2={:.6} p={}",
                    col.name(),
                    fit.n,
                    fit.beta,
                    fit.r_squared,
                    display_p(fit.p_value)
                );
                fits.push((col, label, fit));
            }
            Err(e) => eprintln!("kinspan: {} on {label}: skipped ({e})", col.name()),
        }
    }
    if fits.is_empty() {
        bail!("no regression could be fitted");
    }

    let mut manifest = RunManifest::new("regress simple");
    manifest.inputs.push(args.input.clone());
    manifest.dataset = custom.map(|(label, _)| label);
    let mut w = open_output(args.out.as_ref())?;
    let rows: Vec<SimpleRow> = fits
        .iter()
        .map(|(col, label, fit)| SimpleRow {
            feature: col.name(),
            dataset: label,
            n: fit.n,
            slope: fit.beta,
            intercept: fit.alpha,
            r_squared: fit.r_squared,
            p_value: fit.p_value,
        })
        .collect();
    match args.format.as_str() {
        "json" => {
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
        _ => {
            writeln!(w, "feature,dataset,n,slope,intercept,r_squared,p_value")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    r.feature, r.dataset, r.n, r.slope, r.intercept, r.r_squared, r.p_value
                )?;
            }
        }
    }
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

pub fn regress_stepwise(args: RegressStepwiseArgs, manifest_path: Option<&Path>) -> Result<()> {
    let set = FeatureSet::parse(&args.set).expect("validated by clap");
    let table = load_table(&args.input)?;
    // Reference dataset: complete cases born by 1900, lifespan >= 10
    // (>= 50 for the nuclear-family set).
    let (label, spec) = match args.dataset.resolve()? {
        Some(pair) => pair,
        None => {
            let name = if set == FeatureSet::NuclearFamily { "no-missing-50" } else { "no-missing-10" };
            let mut spec = DatasetSpec::named(name).expect("catalog name");
            spec.max_birth_year = Some(1900);
            (name.to_string(), spec)
        }
    };
    let projected = table.project(set)?;
    let filtered = filter_dataset(&projected, &spec)?;
    eprintln!(
        "kinspan: stepwise {} over {label} ({}): {} rows",
        set.name(),
        spec.describe(),
        filtered.len()
    );
    let out = stepwise_feature_regression(&filtered, set, args.alpha)?;

    for step in &out.eliminated {
        eprintln!("kinspan: eliminated {} (p={})", step.name, display_p(step.p_value));
    }
    eprintln!(
        "kinspan: final model: intercept {:.4}, {} predictors, R2={:.4} adjR2={:.4} RSE={:.4} F p={}",
        out.fit.intercept.value,
        out.fit.terms.len(),
        out.fit.multiple_r_squared,
        out.fit.adjusted_r_squared,
        out.fit.rse,
        out.fit.f_p_value.map_or("n/a".to_string(), display_p)
    );
    for term in &out.fit.terms {
        eprintln!("kinspan:   {:+.4} * {} (p={})", term.value, term.name, display_p(term.p_value));
    }

    let mut manifest = RunManifest::new("regress stepwise");
    manifest.inputs.push(args.input.clone());
    manifest.dataset = Some(label);
    let mut w = open_output(args.out.as_ref())?;
    match args.format.as_str() {
        "csv" => {
            writeln!(w, "term,coefficient,std_err,t_value,p_value")?;
            let i = &out.fit.intercept;
            writeln!(w, "{},{},{},{},{}", i.name, i.value, i.std_err, i.t_value, i.p_value)?;
            for t in &out.fit.terms {
                writeln!(w, "{},{},{},{},{}", t.name, t.value, t.std_err, t.t_value, t.p_value)?;
            }
        }
        _ => {
            serde_json::to_writer_pretty(&mut w, &out)?;
            writeln!(w)?;
        }
    }
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CvReport<'a> {
    classifier: &'a str,
    dataset: Option<&'a str>,
    folds: usize,
    seed: u64,
    rows: usize,
    positive_rows: usize,
    positive_age: f64,
    metrics: &'a kinspan::learn::EvalMetrics,
}

pub fn learn_cv(args: LearnCvArgs, manifest_path: Option<&Path>) -> Result<()> {
    let kind = ClassifierKind::parse(&args.classifier).expect("validated by clap");
    let (filtered, dataset) = load_filtered(&args.input, &args.dataset)?;
    let data = LabeledTable::from_feature_table(&filtered, args.positive_age)?;
    let spec = ClassifierSpec {
        k: args.k,
        tree_count: args.trees,
        min_bucket: args.min_bucket,
        seed: args.seed,
        ..ClassifierSpec::new(kind)
    };
    let metrics = cross_validate(&spec, &data, args.folds, args.seed)?;
    eprintln!(
        "kinspan: {} {}-fold cv: tp_rate={:.4} fp_rate={:.4} f_measure={:.4} auc={:.4}",
        kind.name(),
        args.folds,
        metrics.tp_rate,
        metrics.fp_rate,
        metrics.f_measure,
        metrics.auc
    );
    let mut manifest = RunManifest::new("learn cv");
    manifest.inputs.push(args.input.clone());
    manifest.dataset = dataset.clone();
    manifest.seed = Some(args.seed);
    let mut w = open_output(args.out.as_ref())?;
    let report = CvReport {
        classifier: kind.name(),
        dataset: dataset.as_deref(),
        folds: args.folds,
        seed: args.seed,
        rows: data.n_rows(),
        positive_rows: data.positive_count(),
        positive_age: args.positive_age,
        metrics: &metrics,
    };
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

pub fn learn_rank(args: LearnRankArgs, manifest_path: Option<&Path>) -> Result<()> {
    let (filtered, dataset) = load_filtered(&args.input, &args.dataset)?;
    let data = LabeledTable::from_feature_table(&filtered, args.positive_age)?;
    let ranked = information_gain_ranking(&data);
    let mut manifest = RunManifest::new("learn rank");
    manifest.inputs.push(args.input.clone());
    manifest.dataset = dataset;
    let mut w = open_output(args.out.as_ref())?;
    match args.format.as_str() {
        "json" => {
            let rows: Vec<serde_json::Value> = ranked
                .iter()
                .enumerate()
                .map(|(i, (feature, gain))| {
                    serde_json::json!({ "rank": i + 1, "feature": feature, "gain": gain })
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
        _ => {
            writeln!(w, "rank,feature,gain")?;
            for (i, (feature, gain)) in ranked.iter().enumerate() {
                writeln!(w, "{},{},{}", i + 1, feature, gain)?;
            }
        }
    }
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}

pub fn synth(args: SynthArgs, manifest_path: Option<&Path>) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("read config {}", path.display()))?;
            serde_json::from_str::<SynthConfig>(&text)
                .with_context(|| format!("parse config {}", path.display()))?
        }
        None => SynthConfig::default(),
    };
    macro_rules! override_field {
        ($($flag:ident => $field:ident),+ $(,)?) => {
            $(if let Some(v) = args.$flag { cfg.$field = v; })+
        };
    }
    override_field! {
        founders => founders,
        generations => generations,
        seed => seed,
        mean_children => mean_children,
        remarriage_rate => remarriage_rate,
        missing_rate => missing_rate,
        infant_mortality => infant_mortality,
        adult_mode => adult_mode,
        adult_spread => adult_spread,
        adult_skew => adult_skew,
        parent_child_slope => parent_child_slope,
        spouse_corr => spouse_corr,
        birth_year_start => birth_year_start,
        birth_year_span => birth_year_span,
    }
    if let Some(loc) = &args.location {
        cfg.birth_location = Some(loc.clone());
    }
    let profiles = generate_population(&cfg)?;
    eprintln!("kinspan: generated {} profiles (seed {})", profiles.len(), cfg.seed);
    let mut manifest = RunManifest::new("synth");
    manifest.seed = Some(cfg.seed);
    let mut w = open_output(args.out.as_ref())?;
    write_jsonl(&profiles, &mut w)?;
    w.finish(&mut manifest)?;
    if let Some(p) = manifest_path {
        manifest.write(p)?;
    }
    Ok(())
}
