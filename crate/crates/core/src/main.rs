use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::Duration;
use clap::{Args, Parser, Subcommand};

use polarscope::dynamics::{metric_series, slice_by_window, write_series_csv, SeriesOptions};
use polarscope::graph::{network_metrics_with_partition, write_edge_csv, write_gexf, GexfAttribute, MetricsOptions};
use polarscope::ingest::time::parse_utc_offset;
use polarscope::ingest::{
    filter_noise, interactions_of, parse_records, partition_by_camp, read_interactions_csv, write_interactions_csv,
    write_records_csv, CampConfig, InputFormat, NoiseConfig, ParseOptions,
};
use polarscope::report::{analyze, load_preprocessor, write_artifacts, Artifact, PipelineConfig, ReportError};
use polarscope::synthetic::{polarized_dataset, PolarizedConfig};
use polarscope::textnet::{
    build_term_network, term_communities, top_relations, write_term_edges_csv, write_term_gexf, write_term_nodes_csv,
    TermNetworkOptions,
};
use polarscope::textprep::{read_token_lists_jsonl, write_token_lists_jsonl};
use polarscope::topics::{build_corpus, fit_lda, topic_report, LdaParams};

const OUTPUT_ENV: &str = "POLARSCOPE_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "polarscope", version, about = "Polarization analysis of hashtag camps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, env = OUTPUT_ENV, default_value = "polarscope-out")]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline from a JSON config.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long, env = OUTPUT_ENV)]
        output: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse raw records into per-camp interaction CSV and token-list files.
    Ingest {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Camp config JSON (`{"camps": [{"label", "hashtags"}]}`); one
        /// camp `all` without it.
        #[arg(long)]
        camps: Option<PathBuf>,
        #[arg(long, default_value = "+07:00")]
        timezone: String,
        #[command(flatten)]
        common: Common,
    },
    /// Fit LDA to a token-list file.
    Topics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        topics: usize,
        /// Defaults to 50 / topics.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        beta: f64,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 200)]
        burn_in: usize,
        #[arg(long, default_value_t = 10)]
        top_terms: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Network properties of an interaction file.
    Graph {
        #[arg(long)]
        input: PathBuf,
        /// Use merged edge weights for modularity.
        #[arg(long)]
        weighted: bool,
        #[arg(long, default_value_t = 10)]
        top_actors: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Per-window metric series of an interaction file.
    Dynamics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 24)]
        window_hours: i64,
        #[arg(long, default_value = "+07:00")]
        timezone: String,
        #[arg(long)]
        cumulative: bool,
        #[arg(long)]
        weighted: bool,
        #[arg(long, default_value = "all")]
        camp: String,
        #[command(flatten)]
        common: Common,
    },
    /// Term co-occurrence network of a token-list file.
    Textnet {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        min_term_freq: u64,
        #[arg(long, default_value_t = 300)]
        max_terms: usize,
        #[arg(long, default_value_t = 20)]
        top: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded synthetic two-camp dataset and a matching config.
    Synth {
        #[arg(long, default_value_t = 500)]
        tweets_per_camp: usize,
        #[arg(long, default_value_t = 0.05)]
        cross_camp_rate: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

enum CliError {
    Validation(String),
    Runtime(String),
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn render<F>(path: &str, f: F) -> Result<Artifact, CliError>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), String>,
{
    let mut bytes = Vec::new();
    f(&mut bytes).map_err(runtime)?;
    Ok(Artifact {
        path: path.into(),
        bytes,
    })
}

fn json<T: serde::Serialize>(path: &str, value: &T) -> Result<Artifact, CliError> {
    render(path, |b| {
        serde_json::to_writer_pretty(&mut *b, value).map_err(|e| e.to_string())?;
        b.push(b'\n');
        Ok(())
    })
}

fn finish(out: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    write_artifacts(out, artifacts)?;
    for a in artifacts {
        println!("wrote {}", out.join(&a.path).display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { config, output, seed } => {
            let mut cfg = PipelineConfig::from_file(&config)?;
            if let Some(out) = output {
                cfg.output_dir = out;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let (report, artifacts) = analyze(&cfg)?;
            write_artifacts(&cfg.output_dir, &artifacts)?;
            for camp in &report.camps {
                println!(
                    "{}: {} tweets analyzed, {} interactions",
                    camp.label, camp.tweets_analyzed, camp.interactions
                );
            }
            if let Some(c) = &report.combined {
                println!(
                    "combined: modularity {:.4}, {} communities",
                    c.network.modularity, c.network.communities
                );
            }
            println!("report written to {}", cfg.output_dir.join("report.json").display());
            Ok(())
        }
        Command::Ingest {
            input,
            format,
            camps,
            timezone,
            common,
        } => {
            let tz = parse_utc_offset(&timezone).map_err(invalid)?;
            let camp_cfg = match &camps {
                Some(p) => CampConfig::from_reader(open(p)?).map_err(invalid)?,
                None => CampConfig {
                    camps: Vec::new(),
                    allow_overlap: false,
                },
            };
            let format = match format {
                FormatArg::Csv => InputFormat::Csv,
                FormatArg::Jsonl => InputFormat::Jsonl,
            };
            let opts = ParseOptions {
                timezone: tz,
                ..ParseOptions::new(format)
            };
            let mut records = Vec::new();
            let mut skipped = 0;
            for path in &input {
                let outcome = parse_records(open(path)?, &opts).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
                skipped += outcome.skipped_count();
                records.extend(outcome.records);
            }
            let groups = if camp_cfg.camps.is_empty() {
                vec![("all".to_string(), records.clone())]
            } else {
                partition_by_camp(&records, &camp_cfg.camps).camps
            };
            let mut pipeline_cfg = PipelineConfig::new(Vec::new(), camp_cfg.camps.clone(), common.seed);
            pipeline_cfg.timezone = timezone;
            let pre = load_preprocessor(&pipeline_cfg)?;
            let mut artifacts = Vec::new();
            let mut summary = serde_json::Map::new();
            summary.insert("parsed".into(), records.len().into());
            summary.insert("skipped".into(), skipped.into());
            for (label, matched) in &groups {
                let (kept, noise) = filter_noise(matched, &NoiseConfig::default());
                let interactions = interactions_of(&kept);
                let docs: Vec<_> = kept.iter().map(|r| pre.document(r)).collect();
                artifacts.push(render(&format!("{label}/interactions.csv"), |b| {
                    write_interactions_csv(&interactions, b).map_err(|e| e.to_string())
                })?);
                artifacts.push(render(&format!("{label}/tokens.jsonl"), |b| {
                    write_token_lists_jsonl(&docs, b).map_err(|e| e.to_string())
                })?);
                summary.insert(
                    label.clone(),
                    serde_json::json!({
                        "matched": matched.len(),
                        "noise": noise,
                        "kept": kept.len(),
                        "interactions": interactions.len(),
                    }),
                );
            }
            artifacts.push(json("ingest.json", &summary)?);
            finish(&common.output, &artifacts)
        }
        Command::Topics {
            input,
            topics,
            alpha,
            beta,
            iters,
            burn_in,
            top_terms,
            common,
        } => {
            let params = LdaParams {
                alpha: alpha.unwrap_or(50.0 / topics.max(1) as f64),
                beta,
                iters,
                burn_in,
                seed: common.seed,
                ..LdaParams::with_topics(topics)
            };
            params.validate().map_err(invalid)?;
            let docs = read_token_lists_jsonl(open(&input)?).map_err(invalid)?;
            let corpus = build_corpus(&docs).map_err(runtime)?;
            let state = fit_lda(&corpus, &params).map_err(runtime)?;
            let report = topic_report(&state, &corpus, top_terms, None);
            finish(&common.output, &[json("topics.json", &report)?])
        }
        Command::Graph {
            input,
            weighted,
            top_actors,
            common,
        } => {
            let interactions = read_interactions_csv(open(&input)?).map_err(invalid)?;
            let g = polarscope::graph::build_graph(&interactions);
            let opts = MetricsOptions {
                weighted_modularity: weighted,
                top_actors,
            };
            let (metrics, partition) = network_metrics_with_partition(&g, common.seed, &opts).map_err(runtime)?;
            let degree: Vec<u64> = (0..g.node_count()).map(|u| g.degree(u) as u64).collect();
            let artifacts = [
                json("metrics.json", &metrics)?,
                render("edges.csv", |b| write_edge_csv(&g, b).map_err(|e| e.to_string()))?,
                render("graph.gexf", |b| {
                    let attr = GexfAttribute {
                        title: "degree",
                        values: &degree,
                    };
                    write_gexf(&g, Some(&partition), &[attr], b).map_err(|e| e.to_string())
                })?,
            ];
            finish(&common.output, &artifacts)
        }
        Command::Dynamics {
            input,
            window_hours,
            timezone,
            cumulative,
            weighted,
            camp,
            common,
        } => {
            let tz = parse_utc_offset(&timezone).map_err(invalid)?;
            if window_hours < 1 {
                return Err(invalid(format!("--window-hours must be ≥ 1, got {window_hours}")));
            }
            let interactions = read_interactions_csv(open(&input)?).map_err(invalid)?;
            let windows = slice_by_window(&interactions, Duration::hours(window_hours), tz).map_err(runtime)?;
            let series = metric_series(
                &camp,
                &windows,
                common.seed,
                SeriesOptions {
                    weighted_modularity: weighted,
                    cumulative,
                },
            );
            let csv = render("series.csv", |b| write_series_csv(&series, tz, b).map_err(|e| e.to_string()))?;
            finish(&common.output, &[csv])
        }
        Command::Textnet {
            input,
            min_term_freq,
            max_terms,
            top,
            common,
        } => {
            if min_term_freq < 1 {
                return Err(invalid("--min-term-freq must be ≥ 1"));
            }
            let docs = read_token_lists_jsonl(open(&input)?).map_err(invalid)?;
            let net = build_term_network(
                &docs,
                &TermNetworkOptions {
                    min_term_freq,
                    max_terms,
                },
            );
            let communities = term_communities(&net, common.seed).ok();
            let artifacts = [
                render("term_edges.csv", |b| write_term_edges_csv(&net, b).map_err(|e| e.to_string()))?,
                render("term_nodes.csv", |b| {
                    write_term_nodes_csv(&net, communities.as_ref(), b).map_err(|e| e.to_string())
                })?,
                render("terms.gexf", |b| write_term_gexf(&net, communities.as_ref(), b).map_err(|e| e.to_string()))?,
                json("relations.json", &top_relations(&net, top))?,
            ];
            finish(&common.output, &artifacts)
        }
        Command::Synth {
            tweets_per_camp,
            cross_camp_rate,
            common,
        } => {
            if !(0.0..=1.0).contains(&cross_camp_rate) {
                return Err(invalid("--cross-camp-rate must be in [0, 1]"));
            }
            let data = polarized_dataset(&PolarizedConfig {
                seed: common.seed,
                tweets_per_camp,
                cross_camp_rate,
                ..PolarizedConfig::default()
            });
            let mut cfg = PipelineConfig::new(vec!["tweets.csv".into()], data.camps.camps.clone(), common.seed);
            cfg.output_dir = "report".into();
            let planted: Vec<_> = data.planted.iter().collect();
            let artifacts = [
                render("tweets.csv", |b| write_records_csv(&data.records, b).map_err(|e| e.to_string()))?,
                json("config.json", &cfg)?,
                render("planted.csv", |b| {
                    let mut w = csv::Writer::from_writer(b);
                    w.write_record(["handle", "camp"]).map_err(|e| e.to_string())?;
                    for (h, c) in planted {
                        w.write_record([h, c]).map_err(|e| e.to_string())?;
                    }
                    w.flush().map_err(|e| e.to_string())
                })?,
            ];
            finish(&common.output, &artifacts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
