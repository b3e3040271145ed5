//! GraphML and CSV writers. Floating-point CSV fields use four decimals.

use std::io::Write;

use crate::error::Result;
use crate::growth::{Comparison, SimResult};
use crate::ingest::CitedRefKey;
use crate::metrics::{CorrelationMatrix, NodeMetrics};
use crate::network::{CitationRing, CoCitationNetwork};

pub const METRICS_HEADER: [&str; 11] = [
    "author",
    "year",
    "source",
    "volume",
    "page",
    "citations",
    "rho_burst",
    "rho_centrality",
    "rho_citation",
    "sigma2",
    "sigma3",
];

pub const RANKING_EXTRA_HEADER: [&str; 4] = [
    "centrality_raw",
    "burst_raw",
    "burst_ratio",
    "burst_periods",
];

pub const EDGES_HEADER: [&str; 4] = ["source", "target", "weight", "first_year"];

pub const SIMULATION_HEADER: [&str; 6] =
    ["run", "mechanism", "node", "step", "degree", "betweenness"];

pub fn ranking_header() -> Vec<String> {
    std::iter::once("rank")
        .chain(METRICS_HEADER)
        .chain(RANKING_EXTRA_HEADER)
        .map(String::from)
        .collect()
}

pub fn correlation_header(matrix: &CorrelationMatrix) -> Vec<String> {
    std::iter::once("metric".to_string())
        .chain(matrix.columns.iter().map(|c| c.name().to_string()))
        .collect()
}

pub fn summary_header(cmp: &Comparison) -> Vec<String> {
    vec![
        "run".into(),
        "rng_seed".into(),
        format!("median_{}", cmp.first),
        format!("median_{}", cmp.second),
        "ratio".into(),
    ]
}

pub fn fmt4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn opt4(x: Option<f64>) -> String {
    x.map(fmt4).unwrap_or_else(|| "undefined".to_string())
}

pub fn ring_string(ring: &CitationRing) -> String {
    ring.iter()
        .map(|(y, c)| format!("{y}:{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn key_fields(key: &CitedRefKey) -> [String; 5] {
    [
        key.first_author.clone(),
        key.year.map(|y| y.to_string()).unwrap_or_default(),
        key.source.clone(),
        key.volume.clone().unwrap_or_default(),
        key.page.clone().unwrap_or_default(),
    ]
}

fn metric_fields(m: &NodeMetrics) -> Vec<String> {
    let mut row: Vec<String> = key_fields(&m.key).into();
    row.push(m.citation_raw.to_string());
    row.extend(
        [
            m.rho.burst,
            m.rho.centrality,
            m.rho.citation,
            m.sigma2,
            m.sigma3,
        ]
        .into_iter()
        .map(fmt4),
    );
    row
}

pub fn write_metrics_csv<W: Write>(out: W, metrics: &[NodeMetrics]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    for m in metrics {
        w.write_record(metric_fields(m))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_ranking_csv<W: Write>(out: W, ranked: &[&NodeMetrics]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ranking_header())?;
    for (i, m) in ranked.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(metric_fields(m));
        row.push(fmt4(m.centrality_raw));
        row.push(fmt4(m.burst_raw));
        row.push(fmt4(m.burst_ratio));
        row.push(
            m.bursts
                .iter()
                .map(|b| format!("{}-{}", b.start_year, b.end_year))
                .collect::<Vec<_>>()
                .join(";"),
        );
        w.write_record(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Upper triangle (with diagonal) of the matrix; cells below the diagonal
/// are empty, undefined entries read `undefined`.
pub fn write_correlation_csv<W: Write>(out: W, matrix: &CorrelationMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(correlation_header(matrix))?;
    for (i, col) in matrix.columns.iter().enumerate() {
        let mut row = vec![col.name().to_string()];
        for j in 0..matrix.columns.len() {
            row.push(if j < i {
                String::new()
            } else {
                opt4(matrix.values[i][j])
            });
        }
        w.write_record(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_edges_csv<W: Write>(out: W, network: &CoCitationNetwork) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EDGES_HEADER)?;
    for (key, edge) in &network.edges {
        w.write_record([
            key.first().to_string(),
            key.second().to_string(),
            edge.cocite_count.to_string(),
            edge.first_year.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_simulation_csv<'a, W, I>(out: W, runs: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (usize, &'a SimResult)>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIMULATION_HEADER)?;
    for (run, result) in runs {
        for a in &result.added {
            w.write_record([
                run.to_string(),
                a.mechanism.to_string(),
                a.node.to_string(),
                a.step.to_string(),
                a.degree.to_string(),
                fmt4(a.betweenness),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, cmp: &Comparison) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(summary_header(cmp))?;
    for r in &cmp.runs {
        w.write_record([
            r.run.to_string(),
            r.rng_seed.to_string(),
            opt4(r.median_first),
            opt4(r.median_second),
            opt4(r.ratio),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const GRAPHML_OPEN: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";

pub fn write_network_graphml<W: Write>(
    mut out: W,
    network: &CoCitationNetwork,
) -> std::io::Result<()> {
    out.write_all(GRAPHML_OPEN.as_bytes())?;
    writeln!(
        out,
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>"
    )?;
    writeln!(out, "  <key id=\"total_citations\" for=\"node\" attr.name=\"total_citations\" attr.type=\"int\"/>")?;
    writeln!(
        out,
        "  <key id=\"ring\" for=\"node\" attr.name=\"ring\" attr.type=\"string\"/>"
    )?;
    writeln!(out, "  <key id=\"first_seen_slice\" for=\"node\" attr.name=\"first_seen_slice\" attr.type=\"int\"/>")?;
    writeln!(
        out,
        "  <key id=\"cocite_count\" for=\"edge\" attr.name=\"cocite_count\" attr.type=\"int\"/>"
    )?;
    writeln!(
        out,
        "  <key id=\"first_year\" for=\"edge\" attr.name=\"first_year\" attr.type=\"int\"/>"
    )?;
    writeln!(
        out,
        "  <graph id=\"cocitation\" edgedefault=\"undirected\">"
    )?;
    let mut ids = std::collections::HashMap::new();
    for (i, (key, node)) in network.nodes.iter().enumerate() {
        ids.insert(key, i);
        writeln!(out, "    <node id=\"n{i}\">")?;
        writeln!(
            out,
            "      <data key=\"label\">{}</data>",
            xml_escape(&key.to_string())
        )?;
        writeln!(
            out,
            "      <data key=\"total_citations\">{}</data>",
            node.total_citations()
        )?;
        writeln!(
            out,
            "      <data key=\"ring\">{}</data>",
            ring_string(&node.citation_ring)
        )?;
        writeln!(
            out,
            "      <data key=\"first_seen_slice\">{}</data>",
            node.first_seen_slice
        )?;
        writeln!(out, "    </node>")?;
    }
    for (i, (key, edge)) in network.edges.iter().enumerate() {
        writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\">",
            ids[key.first()],
            ids[key.second()]
        )?;
        writeln!(
            out,
            "      <data key=\"cocite_count\">{}</data>",
            edge.cocite_count
        )?;
        writeln!(
            out,
            "      <data key=\"first_year\">{}</data>",
            edge.first_year
        )?;
        writeln!(out, "    </edge>")?;
    }
    writeln!(out, "  </graph>\n</graphml>")?;
    Ok(())
}

pub fn write_sim_graphml<W: Write>(mut out: W, result: &SimResult) -> std::io::Result<()> {
    out.write_all(GRAPHML_OPEN.as_bytes())?;
    writeln!(
        out,
        "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>"
    )?;
    writeln!(
        out,
        "  <key id=\"added_step\" for=\"node\" attr.name=\"added_step\" attr.type=\"int\"/>"
    )?;
    writeln!(out, "  <graph id=\"growth\" edgedefault=\"undirected\">")?;
    let steps: std::collections::HashMap<usize, usize> =
        result.added.iter().map(|a| (a.node, a.step)).collect();
    for (v, community) in result.community.iter().enumerate() {
        writeln!(out, "    <node id=\"n{v}\">")?;
        if let Some(c) = community {
            writeln!(out, "      <data key=\"community\">{c}</data>")?;
        }
        if let Some(step) = steps.get(&v) {
            writeln!(out, "      <data key=\"added_step\">{step}</data>")?;
        }
        writeln!(out, "    </node>")?;
    }
    let mut e = 0;
    for (v, nbrs) in result.adjacency.iter().enumerate() {
        for &w in nbrs.iter().filter(|&&w| w > v) {
            writeln!(
                out,
                "    <edge id=\"e{e}\" source=\"n{v}\" target=\"n{w}\"/>"
            )?;
            e += 1;
        }
    }
    writeln!(out, "  </graph>\n</graphml>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{Metric, Rho};
    use std::collections::BTreeMap;

    #[test]
    fn metrics_csv_has_exact_header() {
        let m = NodeMetrics::from_rho(
            CitedRefKey::new("THOMAS KR", Some(1987), "CELL", Some("51"), Some("503")),
            268,
            Rho {
                citation: 0.5,
                burst: 0.851,
                centrality: 0.537,
            },
        );
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[m]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "author,year,source,volume,page,citations,rho_burst,rho_centrality,rho_citation,sigma2,sigma3"
        );
        assert_eq!(
            lines.next().unwrap(),
            "THOMAS KR,1987,CELL,51,503,268,0.8510,0.5370,0.5000,0.6760,0.6114"
        );
    }

    #[test]
    fn correlation_csv_is_upper_triangle() {
        let matrix = CorrelationMatrix {
            columns: vec![Metric::Citation, Metric::Burst],
            values: vec![vec![Some(1.0), Some(0.8026)], vec![Some(0.8026), None]],
        };
        let mut buf = Vec::new();
        write_correlation_csv(&mut buf, &matrix).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "metric,rho_citation,rho_burst\nrho_citation,1.0000,0.8026\nrho_burst,,undefined\n"
        );
    }

    #[test]
    fn graphml_escapes_labels() {
        let key = CitedRefKey::new("A&B <C>", Some(2000), "J", None, None);
        let net = CoCitationNetwork {
            nodes: BTreeMap::from([(
                key,
                crate::network::NodeRecord {
                    citation_ring: CitationRing::from([(2001, 2), (2003, 1)]),
                    first_seen_slice: 0,
                },
            )]),
            edges: BTreeMap::new(),
        };
        let mut buf = Vec::new();
        write_network_graphml(&mut buf, &net).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("A&amp;B &lt;C&gt;, 2000, J"));
        assert!(text.contains("<data key=\"ring\">2001:2;2003:1</data>"));
        assert!(text.contains("<data key=\"total_citations\">3</data>"));
    }

    #[test]
    fn negative_zero_is_printed_as_zero() {
        assert_eq!(fmt4(-0.00001), "0.0000");
        assert_eq!(fmt4(0.23288), "0.2329");
    }
}
