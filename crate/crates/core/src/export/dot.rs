use std::io::Write;

use super::RunManifest;
use crate::error::Result;
use crate::graph::Exposome;
use crate::temporal::ProjectionOverlay;

/// Node width and height, in inches, per observation.
pub const NODE_SIZE_BASE: f64 = 0.25;

// marker shape per selected projection code, in selection order
const MARKERS: &[&str] = &["box", "circle", "triangle", "diamond", "pentagon", "hexagon", "octagon", "star"];

#[derive(Debug, Clone, Copy, Default)]
pub struct DotOptions<'a> {
    pub overlay: Option<&'a ProjectionOverlay>,
    pub manifest: Option<&'a RunManifest>,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
}

/// Writes the exposome as an undirected Graphviz graph. Node size is
/// proportional to weight; with an overlay, nodes carrying a selected code
/// are filled black and drawn with that code's marker shape.
pub fn write_dot<W: Write>(mut out: W, g: &Exposome, options: DotOptions<'_>) -> Result<()> {
    let mut s = String::new();
    if let Some(m) = options.manifest {
        s.push_str(&format!("// {}\n", m.reference()));
    }
    let p = g.params();
    s.push_str(&format!(
        "// W={} V={} L={} D={} eta={}\n",
        g.total_weight(),
        g.node_count(),
        g.edge_count(),
        p.d,
        p.eta
    ));
    s.push_str("graph exposome {\n");
    s.push_str("  node [shape=circle, style=filled, fillcolor=white, fixedsize=true];\n");
    if let Some(overlay) = options.overlay {
        for (i, code) in overlay.codes.iter().enumerate() {
            s.push_str(&format!(
                "  // marker {} = {} {}\n",
                MARKERS[i % MARKERS.len()],
                overlay.axis,
                code
            ));
        }
    }
    for (i, n) in g.nodes().iter().enumerate() {
        let size = NODE_SIZE_BASE * n.weight as f64;
        let mut attrs = vec![
            format!("label={}", quote(&n.key.to_string())),
            format!("width={size}"),
            format!("height={size}"),
            format!("weight_ohp={}", n.weight),
        ];
        if let Some(overlay) = options.overlay {
            if let Some(code) = overlay.dominant(i) {
                let marker = overlay.codes.iter().position(|c| c == code).unwrap_or(0);
                attrs.push(format!("shape={}", MARKERS[marker % MARKERS.len()]));
                attrs.push("fillcolor=black".into());
                attrs.push("fontcolor=white".into());
                let counts: Vec<String> =
                    overlay.counts[&i].iter().map(|(c, k)| format!("{c}:{k}")).collect();
                attrs.push(format!("xlabel={}", quote(&counts.join(" "))));
            }
        }
        s.push_str(&format!("  n{i} [{}];\n", attrs.join(", ")));
    }
    for e in g.edges() {
        let shared: Vec<&str> = g.shared_codes(e).map(|c| c.raw()).collect();
        s.push_str(&format!(
            "  n{} -- n{} [label={}, penwidth={}];\n",
            e.source(),
            e.target(),
            quote(&shared.join(" x ")),
            e.strength()
        ));
    }
    s.push_str("}\n");
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}
