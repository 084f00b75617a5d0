//! Day-by-day slicing of interactions and the per-window metric series.

use std::io::Write;

use chrono::{DateTime, Duration, FixedOffset, NaiveTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    average_degree, density, diameter_lcc, louvain_partition, modularity_score, NetworkMetrics, SocialGraph,
};
use crate::ingest::Interaction;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("window duration must be positive, got {0}")]
    NonPositiveDuration(Duration),
    #[error("writing series: {0}")]
    Csv(#[from] csv::Error),
}

/// Half-open interval `[start, end)` and the interactions inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub interactions: Vec<Interaction>,
}

/// Splits interactions into contiguous windows aligned to local midnight in
/// `tz`. Windows between the first and last interaction are kept even when
/// empty; interaction order within a window follows the input.
pub fn slice_by_window(
    interactions: &[Interaction],
    duration: Duration,
    tz: FixedOffset,
) -> Result<Vec<TimeWindow>, DynamicsError> {
    if duration <= Duration::zero() {
        return Err(DynamicsError::NonPositiveDuration(duration));
    }
    let (Some(first), Some(last)) = (
        interactions.iter().map(|i| i.at).min(),
        interactions.iter().map(|i| i.at).max(),
    ) else {
        return Ok(Vec::new());
    };
    let origin = first
        .with_timezone(&tz)
        .date_naive()
        .and_time(NaiveTime::MIN)
        .and_local_timezone(tz)
        .single()
        .expect("fixed offsets have no gaps")
        .with_timezone(&Utc);
    let step = duration.num_milliseconds().max(1);
    let slot = |at: DateTime<Utc>| ((at - origin).num_milliseconds() / step) as usize;

    let mut windows: Vec<TimeWindow> = (0..=slot(last))
        .map(|i| {
            let start = origin + duration * i as i32;
            TimeWindow {
                start,
                end: start + duration,
                interactions: Vec::new(),
            }
        })
        .collect();
    for i in interactions {
        windows[slot(i.at)].interactions.push(i.clone());
    }
    Ok(windows)
}

/// Network properties of one window; a metric that is undefined for the
/// window's graph is `None`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WindowMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub average_degree: Option<f64>,
    pub diameter: Option<usize>,
    pub density: Option<f64>,
    pub modularity: Option<f64>,
    pub communities: Option<usize>,
}

impl WindowMetrics {
    pub fn of_graph(g: &SocialGraph, seed: u64, weighted: bool) -> Self {
        let (modularity, communities) = match louvain_partition(g, seed, weighted) {
            Ok(p) => (modularity_score(g, &p, weighted).ok(), Some(p.community_count())),
            Err(_) => (None, None),
        };
        WindowMetrics {
            nodes: g.node_count(),
            edges: g.edge_count(),
            average_degree: average_degree(g).ok(),
            diameter: diameter_lcc(g).ok(),
            density: density(g).ok(),
            modularity,
            communities,
        }
    }
}

impl From<&NetworkMetrics> for WindowMetrics {
    fn from(m: &NetworkMetrics) -> Self {
        WindowMetrics {
            nodes: m.nodes,
            edges: m.edges,
            average_degree: Some(m.average_degree),
            diameter: Some(m.diameter),
            density: Some(m.density),
            modularity: Some(m.modularity),
            communities: Some(m.communities),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub window_start: DateTime<Utc>,
    pub interactions: usize,
    pub metrics: WindowMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub camp: String,
    pub entries: Vec<SeriesEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SeriesOptions {
    pub weighted_modularity: bool,
    /// Each window's graph includes all earlier windows.
    pub cumulative: bool,
}

/// One entry per window. Each window's graph is built from its own
/// interactions only (or from everything so far in cumulative mode);
/// windows are computed in parallel.
pub fn metric_series(camp: &str, windows: &[TimeWindow], seed: u64, opts: SeriesOptions) -> MetricSeries {
    let entries = windows
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let g = if opts.cumulative {
                let all: Vec<Interaction> = windows[..=i].iter().flat_map(|w| w.interactions.iter().cloned()).collect();
                SocialGraph::from_interactions(&all)
            } else {
                SocialGraph::from_interactions(&w.interactions)
            };
            SeriesEntry {
                window_start: w.start,
                interactions: w.interactions.len(),
                metrics: WindowMetrics::of_graph(&g, seed, opts.weighted_modularity),
            }
        })
        .collect();
    MetricSeries {
        camp: camp.to_string(),
        entries,
    }
}

pub const SERIES_COLUMNS: [&str; 8] = [
    "window_start",
    "nodes",
    "edges",
    "avg_degree",
    "diameter",
    "density",
    "modularity",
    "communities",
];

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Metric cells of one entry, with `window_start` rendered in `tz`.
pub fn series_row(entry: &SeriesEntry, tz: FixedOffset) -> Vec<String> {
    let m = &entry.metrics;
    vec![
        entry.window_start.with_timezone(&tz).to_rfc3339(),
        m.nodes.to_string(),
        m.edges.to_string(),
        cell(m.average_degree),
        cell(m.diameter),
        cell(m.density),
        cell(m.modularity),
        cell(m.communities),
    ]
}

/// CSV for one camp; undefined metrics are empty cells.
pub fn write_series_csv<W: Write>(series: &MetricSeries, tz: FixedOffset, out: W) -> Result<(), DynamicsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_COLUMNS)?;
    for e in &series.entries {
        w.write_record(series_row(e, tz))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// All camps in one CSV with a leading `camp` column, camps in the given
/// order.
pub fn write_combined_series_csv<W: Write>(
    series: &[MetricSeries],
    tz: FixedOffset,
    out: W,
) -> Result<(), DynamicsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("camp").chain(SERIES_COLUMNS))?;
    for s in series {
        for e in &s.entries {
            w.write_record(std::iter::once(s.camp.clone()).chain(series_row(e, tz)))?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
