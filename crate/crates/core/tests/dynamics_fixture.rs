mod common;

use chrono::{Duration, TimeZone, Utc};
use common::*;
use polarscope::dynamics::{
    metric_series, slice_by_window, write_combined_series_csv, SeriesOptions, WindowMetrics,
};
use polarscope::graph::{basic_metrics, diameter_lcc, SocialGraph};
use polarscope::ingest::time::default_offset;
use polarscope::ingest::{Interaction, InteractionKind};

#[test]
fn ten_days_two_camps_give_twenty_rows() {
    let xs = ten_day_interactions();
    let tz = default_offset();
    let windows = slice_by_window(&xs, Duration::days(1), tz).unwrap();
    assert_eq!(windows.len(), 10);
    let series = vec![
        metric_series("pro", &windows, 1, SeriesOptions::default()),
        metric_series("contra", &windows, 1, SeriesOptions::default()),
    ];
    let mut first = Vec::new();
    write_combined_series_csv(&series, tz, &mut first).unwrap();
    let mut second = Vec::new();
    write_combined_series_csv(&series, tz, &mut second).unwrap();
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert_eq!(
        text.lines().next().unwrap(),
        "camp,window_start,nodes,edges,avg_degree,diameter,density,modularity,communities"
    );
    assert!(text.contains("pro,2018-04-04T00:00:00+07:00,0,0,,,,,"));
}

#[test]
fn per_window_metrics_match_independent_recomputation() {
    let at = |day, hour| default_offset().with_ymd_and_hms(2018, 5, day, hour, 0, 0).unwrap().with_timezone(&Utc);
    let edge = |s: &str, t: &str, day, hour| Interaction {
        source: s.into(),
        target: t.into(),
        at: at(day, hour),
        kind: InteractionKind::Reply,
    };
    // Day 1: path a-b-c-d. Day 2: triangle x-y-z plus repeated a→x.
    let xs = vec![
        edge("a", "b", 1, 9),
        edge("b", "c", 1, 10),
        edge("c", "d", 1, 23),
        edge("x", "y", 2, 0),
        edge("y", "z", 2, 1),
        edge("z", "x", 2, 2),
        edge("a", "x", 2, 3),
        edge("x", "a", 2, 4),
    ];
    let windows = slice_by_window(&xs, Duration::days(1), default_offset()).unwrap();
    let series = metric_series("c", &windows, 9, SeriesOptions::default());
    assert_eq!(series.entries.len(), 2);
    for (w, e) in windows.iter().zip(&series.entries) {
        let g = SocialGraph::from_interactions(&w.interactions);
        let edges: Vec<(usize, usize)> = g.edges().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(e.metrics.diameter, Some(floyd_warshall_lcc_diameter(g.node_count(), &edges)));
        assert_eq!(diameter_lcc(&g).ok(), e.metrics.diameter);
        let (avg, dens) = basic_metrics(&g).unwrap();
        assert_eq!((e.metrics.average_degree, e.metrics.density), (Some(avg), Some(dens)));
        assert_eq!(e.metrics, WindowMetrics::of_graph(&g, 9, false));
    }
    assert_eq!((series.entries[0].metrics.nodes, series.entries[0].metrics.edges), (4, 3));
    assert_eq!((series.entries[1].metrics.nodes, series.entries[1].metrics.edges), (4, 4));
    assert_eq!(series.entries[0].metrics.diameter, Some(3));
    assert_eq!(series.entries[1].metrics.diameter, Some(2));
}

#[test]
fn union_nodes_bounded_by_window_sum() {
    let xs = ten_day_interactions();
    let windows = slice_by_window(&xs, Duration::days(1), default_offset()).unwrap();
    let series = metric_series("x", &windows, 0, SeriesOptions::default());
    let sum: usize = series.entries.iter().map(|e| e.metrics.nodes).sum();
    assert!(SocialGraph::from_interactions(&xs).node_count() <= sum);
}
