use std::io::{self, Write};

use super::{Partition, SocialGraph};

/// `source,target,weight` rows, one per undirected edge, source < target
/// by node index.
pub fn write_edge_csv<W: Write>(g: &SocialGraph, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target", "weight"])?;
    for (u, v, weight) in g.edges() {
        w.write_record([g.label(u), g.label(v), &weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// An integer node attribute column for GEXF export.
pub struct GexfAttribute<'a> {
    pub title: &'a str,
    pub values: &'a [u64],
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}

/// GEXF 1.3 undirected graph with a `community` node attribute plus any
/// extra integer attributes.
pub fn write_gexf<W: Write>(
    g: &SocialGraph,
    partition: Option<&Partition>,
    extra: &[GexfAttribute<'_>],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<gexf xmlns="http://gexf.net/1.3" version="1.3">"#)?;
    writeln!(out, r#"  <graph mode="static" defaultedgetype="undirected">"#)?;
    let mut titles: Vec<&str> = Vec::new();
    if partition.is_some() {
        titles.push("community");
    }
    titles.extend(extra.iter().map(|a| a.title));
    if !titles.is_empty() {
        writeln!(out, r#"    <attributes class="node">"#)?;
        for (i, t) in titles.iter().enumerate() {
            writeln!(out, r#"      <attribute id="{i}" title="{}" type="integer"/>"#, escape(t))?;
        }
        writeln!(out, "    </attributes>")?;
    }
    writeln!(out, "    <nodes>")?;
    for u in 0..g.node_count() {
        let label = escape(g.label(u));
        if titles.is_empty() {
            writeln!(out, r#"      <node id="{u}" label="{label}"/>"#)?;
            continue;
        }
        writeln!(out, r#"      <node id="{u}" label="{label}">"#)?;
        writeln!(out, "        <attvalues>")?;
        let mut values: Vec<u64> = Vec::with_capacity(titles.len());
        if let Some(p) = partition {
            values.push(p.community(u) as u64);
        }
        values.extend(extra.iter().map(|a| a.values[u]));
        for (i, v) in values.iter().enumerate() {
            writeln!(out, r#"          <attvalue for="{i}" value="{v}"/>"#)?;
        }
        writeln!(out, "        </attvalues>")?;
        writeln!(out, "      </node>")?;
    }
    writeln!(out, "    </nodes>")?;
    writeln!(out, "    <edges>")?;
    for (i, (u, v, w)) in g.edges().enumerate() {
        writeln!(out, r#"      <edge id="{i}" source="{u}" target="{v}" weight="{w}"/>"#)?;
    }
    writeln!(out, "    </edges>")?;
    writeln!(out, "  </graph>")?;
    writeln!(out, "</gexf>")?;
    Ok(())
}
