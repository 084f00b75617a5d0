//! The full workflow: ingest → preprocess → topics, graph, dynamics and term
//! network per camp, plus a combined polarization section. All artifacts are
//! rendered in memory and written at the end.

mod config;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::Duration;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{metric_series, slice_by_window, write_combined_series_csv, write_series_csv, MetricSeries, SeriesOptions};
use crate::graph::{
    modularity_score, network_metrics_with_partition, write_edge_csv, write_gexf, GexfAttribute, NetworkMetrics,
    Partition, SocialGraph,
};
use crate::ingest::time::parse_utc_offset;
use crate::ingest::{
    filter_noise, interactions_of, parse_records, partition_by_camp, write_interactions_csv, Interaction,
    InteractionKind, NoiseReport, OverlapReport, ParseOptions, SkippedRow, TweetRecord,
};
use crate::textnet::{
    build_term_network, term_communities, top_relations, write_term_edges_csv, write_term_gexf, write_term_nodes_csv,
    TermRelation,
};
use crate::textprep::{read_normalization, read_word_list, write_token_lists_jsonl, Preprocessor, Stemmer, Stoplist, TokenList};
use crate::topics::{build_corpus, fit_lda, topic_report, TopicReport};
use crate::FORMAT_VERSION;

pub use config::{config_problems, validate_config, DynamicsSettings, LdaSettings, PipelineConfig, TextnetSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Preprocess,
    Topics,
    Graph,
    Dynamics,
    Textnet,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Preprocess => "preprocess",
            Stage::Topics => "topics",
            Stage::Graph => "graph",
            Stage::Dynamics => "dynamics",
            Stage::Textnet => "textnet",
            Stage::Write => "write",
        })
    }
}

fn camp_suffix(camp: &Option<String>) -> String {
    camp.as_ref().map(|c| format!(" (camp `{c}`)")).unwrap_or_default()
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("{stage} stage failed{}: {cause}", camp_suffix(.camp))]
    Stage {
        stage: Stage,
        camp: Option<String>,
        cause: String,
    },
}

impl ReportError {
    pub fn is_validation(&self) -> bool {
        matches!(self, ReportError::Config(_))
    }

    fn stage(stage: Stage, camp: Option<&str>, cause: impl fmt::Display) -> Self {
        ReportError::Stage {
            stage,
            camp: camp.map(str::to_string),
            cause: cause.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub parsed: usize,
    pub skipped: usize,
    /// The first few skipped rows with their reasons.
    pub skipped_examples: Vec<SkippedRecord>,
    /// Records whose id already appeared in an earlier input file.
    pub duplicate_ids: usize,
    pub unassigned: usize,
    pub overlap: OverlapReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRecord {
    pub file: String,
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub file: String,
    pub windows: usize,
    pub empty_windows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextnetSummary {
    pub terms: usize,
    pub edges: usize,
    pub communities: Option<usize>,
    pub top_relations: Vec<TermRelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampReport {
    pub label: String,
    pub hashtags: Vec<String>,
    pub tweets_matched: usize,
    pub noise: NoiseReport,
    /// Matched tweets minus noise removals.
    pub tweets_analyzed: usize,
    pub interactions: usize,
    pub interactions_by_kind: BTreeMap<InteractionKind, usize>,
    pub documents: usize,
    pub vocabulary: usize,
    pub topics: Option<TopicReport>,
    pub network: Option<NetworkMetrics>,
    pub series: SeriesSummary,
    pub textnet: TextnetSummary,
    /// Artifact paths relative to the output directory.
    pub files: Vec<String>,
    /// Why a section is missing, when it is.
    pub notes: Vec<String>,
}

/// How strongly the merged graph of all camps separates along camp lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationSummary {
    pub actors: usize,
    pub edges: usize,
    /// Edges whose endpoints have different camp labels.
    pub cross_camp_edges: usize,
    pub network: NetworkMetrics,
    /// Modularity of the camp labelling itself.
    pub camp_modularity: Option<f64>,
    /// Actors labelled with the camp they tweet for most.
    pub labelled_actors: usize,
    /// Share of labelled actors whose camp is the majority camp of their
    /// Louvain community.
    pub camp_recovery_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format_version: u32,
    pub tool_version: String,
    pub seed: u64,
    /// The configuration without the output location, so reports written
    /// to different places stay comparable.
    pub config: serde_json::Value,
    pub ingest: IngestSummary,
    pub camps: Vec<CampReport>,
    pub combined: Option<PolarizationSummary>,
    pub notes: Vec<String>,
}

/// A rendered output file, path relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

pub const REPORT_FILE: &str = "report.json";

/// Labels each actor with the camp it authored most tweets for; ties go to
/// the camp listed first.
pub fn author_camps(camps: &[(String, Vec<TweetRecord>)]) -> BTreeMap<String, String> {
    let mut counts: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, (_, records)) in camps.iter().enumerate() {
        for r in records {
            counts.entry(&r.author).or_insert_with(|| vec![0; camps.len()])[i] += 1;
        }
    }
    counts
        .into_iter()
        .map(|(author, c)| {
            let best = (0..c.len()).fold(0, |b, i| if c[i] > c[b] { i } else { b });
            (author.to_string(), camps[best].0.clone())
        })
        .collect()
}

/// Share of labelled nodes whose label is the most common label in their
/// community. `None` when no node is labelled.
pub fn camp_recovery_accuracy(g: &SocialGraph, partition: &Partition, labels: &BTreeMap<String, String>) -> Option<f64> {
    let mut tally: HashMap<(usize, &str), usize> = HashMap::new();
    let mut labelled = 0usize;
    for u in 0..g.node_count() {
        if let Some(camp) = labels.get(g.label(u)) {
            *tally.entry((partition.community(u), camp.as_str())).or_insert(0) += 1;
            labelled += 1;
        }
    }
    if labelled == 0 {
        return None;
    }
    let mut best: HashMap<usize, usize> = HashMap::new();
    for (&(c, _), &n) in &tally {
        let b = best.entry(c).or_insert(0);
        *b = (*b).max(n);
    }
    Some(best.values().sum::<usize>() as f64 / labelled as f64)
}

fn csv_bytes<F>(f: F) -> Result<Vec<u8>, String>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), String>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Stoplist and stemmer from the configured files, falling back to the
/// bundled Indonesian resources.
pub fn load_preprocessor(cfg: &PipelineConfig) -> Result<Preprocessor, ReportError> {
    let err = |e: &dyn fmt::Display| ReportError::stage(Stage::Preprocess, None, e);
    let open = |p: &Path| File::open(p).map(BufReader::new).map_err(|e| err(&format!("{}: {e}", p.display())));
    let stoplist = match &cfg.stoplist {
        Some(p) => Stoplist::from_reader(open(p)?).map_err(|e| err(&e))?,
        None => Stoplist::indonesian(),
    };
    let bundled = Stemmer::indonesian();
    let normalization = match &cfg.normalization {
        Some(p) => read_normalization(open(p)?).map_err(|e| err(&e))?,
        None => bundled.normalization().clone(),
    };
    let roots = match &cfg.root_words {
        Some(p) => read_word_list(open(p)?).map_err(|e| err(&e))?,
        None => bundled.roots().clone(),
    };
    let mut pre = Preprocessor::new(stoplist, Stemmer::new(normalization, roots).map_err(|e| err(&e))?);
    // Camp hashtags are on every tweet of their camp and would dominate.
    pre.drop = cfg.camps.iter().flat_map(|c| c.hashtags.iter().cloned()).collect();
    Ok(pre)
}

struct Ingested {
    summary: IngestSummary,
    camps: Vec<(String, Vec<TweetRecord>)>,
}

fn ingest(cfg: &PipelineConfig) -> Result<Ingested, ReportError> {
    let tz = parse_utc_offset(&cfg.timezone).map_err(|e| ReportError::Config(vec![e.to_string()]))?;
    let opts = ParseOptions {
        format: cfg.format,
        columns: cfg.columns.clone(),
        timezone: tz,
    };
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    let (mut rows, mut skipped, mut duplicate_ids) = (0, 0, 0);
    let mut skipped_examples = Vec::new();
    for path in &cfg.inputs {
        let file = File::open(path).map_err(|e| ReportError::stage(Stage::Ingest, None, format!("{}: {e}", path.display())))?;
        let outcome = parse_records(BufReader::new(file), &opts)
            .map_err(|e| ReportError::stage(Stage::Ingest, None, format!("{}: {e}", path.display())))?;
        rows += outcome.rows;
        skipped += outcome.skipped_count();
        for SkippedRow { row, reason } in outcome.skipped.into_iter().take(10 - skipped_examples.len().min(10)) {
            skipped_examples.push(SkippedRecord {
                file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
                row,
                reason,
            });
        }
        for r in outcome.records {
            if seen.insert(r.tweet_id.clone()) {
                records.push(r);
            } else {
                duplicate_ids += 1;
            }
        }
    }
    let partition = partition_by_camp(&records, &cfg.camps);
    Ok(Ingested {
        summary: IngestSummary {
            rows,
            parsed: records.len(),
            skipped,
            skipped_examples,
            duplicate_ids,
            unassigned: partition.unassigned.len(),
            overlap: partition.overlap.clone(),
        },
        camps: partition.camps,
    })
}

struct CampOutput {
    report: CampReport,
    series: MetricSeries,
    analyzed: Vec<TweetRecord>,
    artifacts: Vec<Artifact>,
}

fn analyze_camp(
    cfg: &PipelineConfig,
    pre: &Preprocessor,
    label: &str,
    matched: &[TweetRecord],
) -> Result<CampOutput, ReportError> {
    let fail = |stage: Stage| move |e: String| ReportError::stage(stage, Some(label), e);
    let tz = parse_utc_offset(&cfg.timezone).map_err(|e| ReportError::Config(vec![e.to_string()]))?;
    let mut notes = Vec::new();
    let mut artifacts = Vec::new();
    let mut add = |name: &str, bytes: Vec<u8>| {
        artifacts.push(Artifact {
            path: Path::new(label).join(name),
            bytes,
        })
    };

    let (records, noise) = filter_noise(matched, &cfg.noise);
    let interactions = interactions_of(&records);
    let mut by_kind = BTreeMap::new();
    for i in &interactions {
        *by_kind.entry(i.kind).or_insert(0) += 1;
    }
    add(
        "interactions.csv",
        csv_bytes(|b| write_interactions_csv(&interactions, b).map_err(|e| e.to_string())).map_err(fail(Stage::Ingest))?,
    );

    // Topics.
    let docs: Vec<TokenList> = records.iter().map(|r| pre.document(r)).collect();
    add(
        "tokens.jsonl",
        csv_bytes(|b| write_token_lists_jsonl(&docs, b).map_err(|e| e.to_string())).map_err(fail(Stage::Preprocess))?,
    );
    let (topics, documents, vocabulary) = match build_corpus(&docs) {
        Ok(corpus) => {
            let state = fit_lda(&corpus, &cfg.lda.params(cfg.seed)).map_err(|e| fail(Stage::Topics)(e.to_string()))?;
            let report = topic_report(&state, &corpus, cfg.lda.top_terms, None);
            add(
                "topics.csv",
                csv_bytes(|b| write_topics_csv(&report, b).map_err(|e| e.to_string())).map_err(fail(Stage::Topics))?,
            );
            (Some(report), corpus.docs.len(), corpus.vocab_size())
        }
        Err(e) => {
            notes.push(format!("topics: {e}"));
            (None, 0, 0)
        }
    };

    // Actor graph.
    let graph = SocialGraph::from_interactions(&interactions);
    add(
        "edges.csv",
        csv_bytes(|b| write_edge_csv(&graph, b).map_err(|e| e.to_string())).map_err(fail(Stage::Graph))?,
    );
    let network = match network_metrics_with_partition(&graph, cfg.seed, &cfg.graph) {
        Ok((metrics, partition)) => {
            add("graph.gexf", gexf_bytes(&graph, &partition).map_err(fail(Stage::Graph))?);
            Some(metrics)
        }
        Err(e) => {
            notes.push(format!("network metrics: {e}"));
            None
        }
    };

    // Dynamics.
    let windows = slice_by_window(&interactions, Duration::hours(cfg.dynamics.window_hours), tz)
        .map_err(|e| fail(Stage::Dynamics)(e.to_string()))?;
    let series = metric_series(
        label,
        &windows,
        cfg.seed,
        SeriesOptions {
            weighted_modularity: cfg.graph.weighted_modularity,
            cumulative: cfg.dynamics.cumulative,
        },
    );
    add(
        "series.csv",
        csv_bytes(|b| write_series_csv(&series, tz, b).map_err(|e| e.to_string())).map_err(fail(Stage::Dynamics))?,
    );
    let series_summary = SeriesSummary {
        file: format!("{label}/series.csv"),
        windows: series.entries.len(),
        empty_windows: series.entries.iter().filter(|e| e.interactions == 0).count(),
    };

    // Term network.
    let net = build_term_network(&docs, &cfg.textnet.network);
    let communities = match term_communities(&net, cfg.seed) {
        Ok(p) => Some(p),
        Err(e) => {
            notes.push(format!("term communities: {e}"));
            None
        }
    };
    let relations = top_relations(&net, cfg.textnet.top_relations);
    let textnet_err = fail(Stage::Textnet);
    add(
        "term_edges.csv",
        csv_bytes(|b| write_term_edges_csv(&net, b).map_err(|e| e.to_string())).map_err(&textnet_err)?,
    );
    add(
        "term_nodes.csv",
        csv_bytes(|b| write_term_nodes_csv(&net, communities.as_ref(), b).map_err(|e| e.to_string()))
            .map_err(&textnet_err)?,
    );
    add(
        "terms.gexf",
        csv_bytes(|b| write_term_gexf(&net, communities.as_ref(), b).map_err(|e| e.to_string())).map_err(&textnet_err)?,
    );

    let files = artifacts.iter().map(|a| a.path.to_string_lossy().replace('\\', "/")).collect();
    let camp_spec = cfg.camps.iter().find(|c| c.label == label);
    Ok(CampOutput {
        report: CampReport {
            label: label.to_string(),
            hashtags: camp_spec.map(|c| c.hashtags.iter().cloned().collect()).unwrap_or_default(),
            tweets_matched: matched.len(),
            tweets_analyzed: records.len(),
            noise,
            interactions: interactions.len(),
            interactions_by_kind: by_kind,
            documents,
            vocabulary,
            topics,
            network,
            series: series_summary,
            textnet: TextnetSummary {
                terms: net.term_count(),
                edges: net.edge_count(),
                communities: communities.as_ref().map(Partition::community_count),
                top_relations: relations,
            },
            files,
            notes,
        },
        series,
        analyzed: records,
        artifacts,
    })
}

fn write_topics_csv(report: &TopicReport, out: &mut Vec<u8>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["topic", "weight", "rank", "term", "prob", "within_freq", "overall_freq"])?;
    for t in &report.topics {
        for (rank, s) in t.terms.iter().enumerate() {
            w.write_record([
                t.topic.to_string(),
                t.weight.to_string(),
                (rank + 1).to_string(),
                s.term.clone(),
                s.prob.to_string(),
                s.within_freq.to_string(),
                s.overall_freq.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn gexf_bytes(g: &SocialGraph, partition: &Partition) -> Result<Vec<u8>, String> {
    let degree: Vec<u64> = (0..g.node_count()).map(|u| g.degree(u) as u64).collect();
    let mut buf = Vec::new();
    write_gexf(
        g,
        Some(partition),
        &[GexfAttribute {
            title: "degree",
            values: &degree,
        }],
        &mut buf,
    )
    .map_err(|e| e.to_string())?;
    Ok(buf)
}

fn combined_section(
    cfg: &PipelineConfig,
    analyzed: &[(String, Vec<TweetRecord>)],
    artifacts: &mut Vec<Artifact>,
    notes: &mut Vec<String>,
) -> Result<Option<PolarizationSummary>, ReportError> {
    let fail = |e: String| ReportError::stage(Stage::Graph, Some("combined"), e);
    // A record matched by several camps counts once.
    let mut seen = HashSet::new();
    let mut interactions: Vec<Interaction> = Vec::new();
    for (_, records) in analyzed {
        for r in records {
            if seen.insert(r.tweet_id.as_str()) {
                interactions.extend(crate::ingest::extract_interactions(r));
            }
        }
    }
    let graph = SocialGraph::from_interactions(&interactions);
    let labels = author_camps(analyzed);
    artifacts.push(Artifact {
        path: PathBuf::from("combined/edges.csv"),
        bytes: csv_bytes(|b| write_edge_csv(&graph, b).map_err(|e| e.to_string())).map_err(fail)?,
    });
    let (network, partition) = match network_metrics_with_partition(&graph, cfg.seed, &cfg.graph) {
        Ok(v) => v,
        Err(e) => {
            notes.push(format!("combined graph: {e}"));
            return Ok(None);
        }
    };
    artifacts.push(Artifact {
        path: PathBuf::from("combined/graph.gexf"),
        bytes: gexf_bytes(&graph, &partition).map_err(fail)?,
    });
    let actors = csv_bytes(|b| {
        let mut w = csv::Writer::from_writer(b);
        let io = |e: csv::Error| e.to_string();
        w.write_record(["handle", "camp", "community", "degree"]).map_err(io)?;
        for u in 0..graph.node_count() {
            let camp = labels.get(graph.label(u)).map(String::as_str).unwrap_or("");
            w.write_record([
                graph.label(u),
                camp,
                &partition.community(u).to_string(),
                &graph.degree(u).to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| e.to_string())
    })
    .map_err(fail)?;
    artifacts.push(Artifact {
        path: PathBuf::from("combined/actors.csv"),
        bytes: actors,
    });

    let camp_index: HashMap<&str, usize> = cfg.camps.iter().enumerate().map(|(i, c)| (c.label.as_str(), i)).collect();
    let node_camp: Vec<Option<usize>> = (0..graph.node_count())
        .map(|u| labels.get(graph.label(u)).map(|c| camp_index[c.as_str()]))
        .collect();
    let cross_camp_edges = graph
        .edges()
        .filter(|&(u, v, _)| matches!((node_camp[u], node_camp[v]), (Some(a), Some(b)) if a != b))
        .count();
    // Unlabelled actors (only ever mentioned) each get their own block.
    let camp_partition = Partition::from_labels(
        &node_camp
            .iter()
            .enumerate()
            .map(|(u, c)| c.unwrap_or(cfg.camps.len() + u))
            .collect::<Vec<_>>(),
    );
    Ok(Some(PolarizationSummary {
        actors: graph.node_count(),
        edges: graph.edge_count(),
        cross_camp_edges,
        camp_modularity: modularity_score(&graph, &camp_partition, cfg.graph.weighted_modularity).ok(),
        labelled_actors: node_camp.iter().flatten().count(),
        camp_recovery_accuracy: camp_recovery_accuracy(&graph, &partition, &labels),
        network,
    }))
}

/// Runs every stage and renders all artifacts without touching the output
/// directory. The report itself is the last artifact.
pub fn analyze(cfg: &PipelineConfig) -> Result<(AnalysisReport, Vec<Artifact>), ReportError> {
    validate_config(cfg)?;
    let tz = parse_utc_offset(&cfg.timezone).map_err(|e| ReportError::Config(vec![e.to_string()]))?;
    let pre = load_preprocessor(cfg)?;
    let ingested = ingest(cfg)?;

    let outputs: Vec<CampOutput> = ingested
        .camps
        .par_iter()
        .map(|(label, records)| analyze_camp(cfg, &pre, label, records))
        .collect::<Result<_, _>>()?;

    let mut artifacts: Vec<Artifact> = Vec::new();
    let mut notes = Vec::new();
    let analyzed: Vec<(String, Vec<TweetRecord>)> =
        outputs.iter().map(|o| (o.report.label.clone(), o.analyzed.clone())).collect();
    let combined = combined_section(cfg, &analyzed, &mut artifacts, &mut notes)?;

    let all_series: Vec<MetricSeries> = outputs.iter().map(|o| o.series.clone()).collect();
    artifacts.push(Artifact {
        path: PathBuf::from("series.csv"),
        bytes: csv_bytes(|b| write_combined_series_csv(&all_series, tz, b).map_err(|e| e.to_string()))
            .map_err(|e| ReportError::stage(Stage::Dynamics, None, e))?,
    });

    let mut camps = Vec::with_capacity(outputs.len());
    for o in outputs {
        artifacts.extend(o.artifacts);
        camps.push(o.report);
    }

    let mut config = serde_json::to_value(cfg).map_err(|e| ReportError::stage(Stage::Write, None, e))?;
    if let Some(map) = config.as_object_mut() {
        map.remove("output_dir");
    }
    let report = AnalysisReport {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config,
        ingest: ingested.summary,
        camps,
        combined,
        notes,
    };
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| ReportError::stage(Stage::Write, None, e))?;
    json.push(b'\n');
    artifacts.push(Artifact {
        path: PathBuf::from(REPORT_FILE),
        bytes: json,
    });
    Ok((report, artifacts))
}

/// Writes artifacts under `dir`. On failure every file and directory
/// created by this call is removed again.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), ReportError> {
    let mut created_dirs: Vec<PathBuf> = Vec::new();
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> std::io::Result<()> {
        for a in artifacts {
            let path = dir.join(&a.path);
            let parent = path.parent().unwrap_or(dir);
            let mut missing: Vec<&Path> = parent.ancestors().take_while(|p| !p.as_os_str().is_empty() && !p.exists()).collect();
            fs::create_dir_all(parent)?;
            missing.reverse();
            created_dirs.extend(missing.into_iter().map(Path::to_path_buf));
            fs::write(&path, &a.bytes)?;
            written.push(path);
        }
        Ok(())
    })();
    if let Err(e) = result {
        for f in &written {
            let _ = fs::remove_file(f);
        }
        for d in created_dirs.iter().rev() {
            let _ = fs::remove_dir(d);
        }
        return Err(ReportError::stage(Stage::Write, None, e));
    }
    Ok(())
}

/// [`analyze`] followed by [`write_artifacts`] into `cfg.output_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<AnalysisReport, ReportError> {
    let (report, artifacts) = analyze(cfg)?;
    write_artifacts(&cfg.output_dir, &artifacts)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_errors_name_stage_and_camp() {
        let e = ReportError::stage(Stage::Topics, Some("pro"), "boom");
        assert_eq!(e.to_string(), "topics stage failed (camp `pro`): boom");
        assert!(!e.is_validation());
        assert!(ReportError::Config(vec!["K must be ≥ 1".into()]).is_validation());
    }

    #[test]
    fn recovery_accuracy_uses_community_majorities() {
        let g = SocialGraph::from_edges(
            ["a", "b", "c", "d", "e"].map(String::from).to_vec(),
            [(0, 1, 1), (1, 2, 1), (3, 4, 1)],
        );
        let p = Partition::from_labels(&[0, 0, 0, 1, 1]);
        let labels: BTreeMap<String, String> =
            [("a", "x"), ("b", "x"), ("c", "y"), ("d", "y")].map(|(h, c)| (h.to_string(), c.to_string())).into();
        assert_eq!(camp_recovery_accuracy(&g, &p, &labels), Some(0.75));
        assert_eq!(camp_recovery_accuracy(&g, &p, &BTreeMap::new()), None);
    }

    #[test]
    fn author_camp_majority_and_ties() {
        let rec = |author: &str| TweetRecord {
            tweet_id: String::new(),
            author: author.into(),
            text: String::new(),
            created_at: chrono::Utc::now(),
            reply_to: None,
            is_reply: false,
            is_quote: false,
        };
        let camps = vec![
            ("p".to_string(), vec![rec("a"), rec("b")]),
            ("q".to_string(), vec![rec("a"), rec("b"), rec("b")]),
        ];
        let labels = author_camps(&camps);
        assert_eq!(labels["a"], "p");
        assert_eq!(labels["b"], "q");
    }

    #[test]
    fn failed_write_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("out");
        // The second artifact's parent is an existing file, so it fails.
        let artifacts = vec![
            Artifact { path: "x/a.txt".into(), bytes: b"a".to_vec() },
            Artifact { path: "x/a.txt/b.txt".into(), bytes: b"b".to_vec() },
        ];
        assert!(write_artifacts(&root, &artifacts).is_err());
        assert!(!root.exists());
    }
}
