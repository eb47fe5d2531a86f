use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use quick_xml::escape::{escape, resolve_predefined_entity};
use quick_xml::events::Event;
use quick_xml::Reader;

use super::RunManifest;
use crate::codes::{parse_code, Axis, Code, DEFAULT_SEPARATOR};
use crate::error::{Error, Result};
use crate::graph::{Exposome, ExposomeParams};
use crate::ingest::{Multiset, Node, NodeKey};

// (id, for, name, type)
const KEYS: &[(&str, &str, &str, &str)] = &[
    ("g_d", "graph", "D", "int"),
    ("g_eta", "graph", "eta", "long"),
    ("g_w", "graph", "W", "long"),
    ("g_v", "graph", "V", "long"),
    ("g_l", "graph", "L", "long"),
    ("g_sep", "graph", "separators", "string"),
    ("g_manifest", "graph", "manifest", "string"),
    ("n_id", "node", "node_id", "long"),
    ("n_label", "node", "label", "string"),
    ("n_disease", "node", "disease", "string"),
    ("n_weight", "node", "weight", "long"),
    ("n_cortege", "node", "cortege", "string"),
    ("n_years", "node", "years", "string"),
    ("n_occupations", "node", "occupations", "string"),
    ("n_sectors", "node", "sectors", "string"),
    ("n_key_occupation", "node", "key_occupation", "string"),
    ("n_key_sector", "node", "key_sector", "string"),
    ("e_shared", "edge", "shared", "string"),
    ("e_strength", "edge", "strength", "int"),
];

fn json_codes<'a>(codes: impl Iterator<Item = &'a Code>) -> String {
    serde_json::to_string(&codes.map(Code::raw).collect::<Vec<_>>()).expect("strings serialize")
}

fn separators(g: &Exposome) -> BTreeMap<Axis, char> {
    let mut seps: BTreeMap<Axis, char> = Axis::ALL.iter().map(|&a| (a, DEFAULT_SEPARATOR)).collect();
    if let Some(n) = g.nodes().first() {
        seps.insert(Axis::Disease, n.key.disease.separator());
        if let Some(e) = n.key.exposures.first() {
            seps.insert(Axis::Exposure, e.separator());
        }
        if let Some((o, _)) = n.occupations.iter().next() {
            seps.insert(Axis::Occupation, o.separator());
        }
        if let Some((s, _)) = n.sectors.iter().next() {
            seps.insert(Axis::Sector, s.separator());
        }
    }
    seps
}

/// Writes the exposome as GraphML. Multi-valued attributes (cortege,
/// histograms) are JSON-encoded strings.
pub fn write_graphml<W: Write>(mut out: W, g: &Exposome, manifest: Option<&RunManifest>) -> Result<()> {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, target, name, ty) in KEYS {
        s.push_str(&format!("  <key id=\"{id}\" for=\"{target}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>\n"));
    }
    s.push_str("  <graph id=\"exposome\" edgedefault=\"undirected\">\n");
    let data = |s: &mut String, indent: &str, key: &str, value: &str| {
        s.push_str(&format!("{indent}<data key=\"{key}\">{}</data>\n", escape(value)));
    };
    let p = g.params();
    let seps: BTreeMap<String, String> =
        separators(g).into_iter().map(|(a, c)| (a.name().to_string(), c.to_string())).collect();
    data(&mut s, "    ", "g_d", &p.d.to_string());
    data(&mut s, "    ", "g_eta", &p.eta.to_string());
    data(&mut s, "    ", "g_w", &g.total_weight().to_string());
    data(&mut s, "    ", "g_v", &g.node_count().to_string());
    data(&mut s, "    ", "g_l", &g.edge_count().to_string());
    data(&mut s, "    ", "g_sep", &serde_json::to_string(&seps)?);
    if let Some(m) = manifest {
        data(&mut s, "    ", "g_manifest", &m.to_json());
    }
    for (i, n) in g.nodes().iter().enumerate() {
        s.push_str(&format!("    <node id=\"n{i}\">\n"));
        data(&mut s, "      ", "n_id", &n.id.to_string());
        data(&mut s, "      ", "n_label", &n.key.to_string());
        data(&mut s, "      ", "n_disease", n.key.disease.raw());
        data(&mut s, "      ", "n_weight", &n.weight.to_string());
        data(&mut s, "      ", "n_cortege", &json_codes(n.key.exposures.iter()));
        data(&mut s, "      ", "n_years", &serde_json::to_string(&n.years)?);
        data(&mut s, "      ", "n_occupations", &serde_json::to_string(&n.occupations)?);
        data(&mut s, "      ", "n_sectors", &serde_json::to_string(&n.sectors)?);
        if let Some((o, sec)) = &n.key.strict_extra {
            data(&mut s, "      ", "n_key_occupation", o.raw());
            data(&mut s, "      ", "n_key_sector", sec.raw());
        }
        s.push_str("    </node>\n");
    }
    for (k, e) in g.edges().enumerate() {
        s.push_str(&format!("    <edge id=\"e{k}\" source=\"n{}\" target=\"n{}\">\n", e.source(), e.target()));
        data(&mut s, "      ", "e_shared", &json_codes(g.shared_codes(e)));
        data(&mut s, "      ", "e_strength", &e.strength().to_string());
        s.push_str("    </edge>\n");
    }
    s.push_str("  </graph>\n</graphml>\n");
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[derive(Default)]
struct Element {
    id: String,
    source: String,
    target: String,
    data: HashMap<String, String>,
}

fn xml_err(e: impl std::fmt::Display) -> Error {
    Error::Xml(e.to_string())
}

/// Reads GraphML produced by [`write_graphml`] back into an exposome. Every
/// graph invariant is re-checked.
pub fn read_graphml(text: &str) -> Result<Exposome> {
    let mut reader = Reader::from_str(text);

    let mut key_names: HashMap<String, String> = HashMap::new();
    let mut graph_data: HashMap<String, String> = HashMap::new();
    let mut nodes: Vec<Element> = Vec::new();
    let mut edges: Vec<Element> = Vec::new();
    // innermost open element kind and data key
    let mut current: Option<&'static str> = None;
    let mut data_key: Option<String> = None;
    let mut text_buf = String::new();

    loop {
        match reader.read_event().map_err(xml_err)? {
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"key" => {
                let mut id = String::new();
                let mut name = String::new();
                for a in e.attributes() {
                    let a = a.map_err(xml_err)?;
                    let v = a.unescape_value().map_err(xml_err)?.into_owned();
                    match a.key.as_ref() {
                        b"id" => id = v,
                        b"attr.name" => name = v,
                        _ => {}
                    }
                }
                key_names.insert(id, name);
            }
            Event::Start(e) if matches!(e.name().as_ref(), b"node" | b"edge") => {
                let mut el = Element::default();
                for a in e.attributes() {
                    let a = a.map_err(xml_err)?;
                    let v = a.unescape_value().map_err(xml_err)?.into_owned();
                    match a.key.as_ref() {
                        b"id" => el.id = v,
                        b"source" => el.source = v,
                        b"target" => el.target = v,
                        _ => {}
                    }
                }
                if e.name().as_ref() == b"node" {
                    nodes.push(el);
                    current = Some("node");
                } else {
                    edges.push(el);
                    current = Some("edge");
                }
            }
            Event::Empty(e) if e.name().as_ref() == b"node" => {
                return Err(Error::Xml("node without attributes".into()));
            }
            Event::Start(e) if e.name().as_ref() == b"data" => {
                for a in e.attributes() {
                    let a = a.map_err(xml_err)?;
                    if a.key.as_ref() == b"key" {
                        data_key = Some(a.unescape_value().map_err(xml_err)?.into_owned());
                    }
                }
                text_buf.clear();
            }
            Event::Text(t) if data_key.is_some() => {
                text_buf.push_str(&t.xml_content().map_err(xml_err)?);
            }
            Event::GeneralRef(r) if data_key.is_some() => {
                if let Some(c) = r.resolve_char_ref().map_err(xml_err)? {
                    text_buf.push(c);
                } else {
                    let name = r.decode().map_err(xml_err)?;
                    let resolved = resolve_predefined_entity(&name)
                        .ok_or_else(|| Error::Xml(format!("unknown entity &{name};")))?;
                    text_buf.push_str(resolved);
                }
            }
            Event::End(e) if e.name().as_ref() == b"data" => {
                let key = data_key.take().unwrap_or_default();
                let name = key_names.get(&key).cloned().unwrap_or(key);
                let value = std::mem::take(&mut text_buf);
                match current {
                    Some("node") => nodes.last_mut().expect("open node").data.insert(name, value),
                    Some("edge") => edges.last_mut().expect("open edge").data.insert(name, value),
                    _ => graph_data.insert(name, value),
                };
            }
            Event::End(e) if matches!(e.name().as_ref(), b"node" | b"edge") => current = None,
            Event::Eof => break,
            _ => {}
        }
    }

    let field = |map: &HashMap<String, String>, name: &str| -> Result<String> {
        map.get(name).cloned().ok_or_else(|| Error::InvalidGraph(format!("missing attribute {name}")))
    };
    let number = |map: &HashMap<String, String>, name: &str| -> Result<u64> {
        field(map, name)?.trim().parse().map_err(|_| Error::InvalidGraph(format!("attribute {name} is not a number")))
    };

    let params = ExposomeParams::new(number(&graph_data, "D")? as usize, number(&graph_data, "eta")?)?;
    let seps: BTreeMap<String, String> = match graph_data.get("separators") {
        Some(s) => serde_json::from_str(s)?,
        None => BTreeMap::new(),
    };
    let sep = |axis: Axis| seps.get(axis.name()).and_then(|s| s.chars().next()).unwrap_or(DEFAULT_SEPARATOR);
    let code = |axis: Axis, text: &str| parse_code(axis, text, sep(axis));
    let codes = |axis: Axis, json: &str| -> Result<Vec<Code>> {
        let raw: Vec<String> = serde_json::from_str(json)?;
        raw.iter().map(|t| code(axis, t)).collect()
    };
    let histogram = |axis: Axis, json: &str| -> Result<Multiset<Code>> {
        let raw: BTreeMap<String, u64> = serde_json::from_str(json)?;
        let mut m = Multiset::new();
        for (t, n) in raw {
            m.insert_n(code(axis, &t)?, n);
        }
        Ok(m)
    };

    let mut position: HashMap<String, usize> = HashMap::new();
    let mut parsed_nodes = Vec::with_capacity(nodes.len());
    for (i, el) in nodes.iter().enumerate() {
        position.insert(el.id.clone(), i);
        let d = &el.data;
        let mut exposures = codes(Axis::Exposure, &field(d, "cortege")?)?;
        exposures.sort();
        let strict_extra = match (d.get("key_occupation"), d.get("key_sector")) {
            (Some(o), Some(s)) => Some((code(Axis::Occupation, o)?, code(Axis::Sector, s)?)),
            _ => None,
        };
        let years_raw: BTreeMap<String, u64> = serde_json::from_str(&field(d, "years")?)?;
        let mut years = Multiset::new();
        for (y, n) in years_raw {
            let y: i32 = y.parse().map_err(|_| Error::InvalidGraph(format!("bad year {y:?}")))?;
            years.insert_n(y, n);
        }
        parsed_nodes.push(Node {
            id: number(d, "node_id")? as usize,
            key: NodeKey { disease: code(Axis::Disease, &field(d, "disease")?)?, exposures, strict_extra },
            weight: number(d, "weight")?,
            years,
            occupations: histogram(Axis::Occupation, &field(d, "occupations")?)?,
            sectors: histogram(Axis::Sector, &field(d, "sectors")?)?,
        });
    }
    let mut links = Vec::with_capacity(edges.len());
    for el in &edges {
        let end = |id: &str| {
            position.get(id).copied().ok_or_else(|| Error::InvalidGraph(format!("edge refers to unknown node {id:?}")))
        };
        links.push((end(&el.source)?, end(&el.target)?, codes(Axis::Exposure, &field(&el.data, "shared")?)?));
    }
    let g = Exposome::from_parts(params, parsed_nodes, links)?;
    let declared = (number(&graph_data, "W")?, number(&graph_data, "V")?, number(&graph_data, "L")?);
    if declared != (g.total_weight(), g.node_count() as u64, g.edge_count() as u64) {
        return Err(Error::InvalidGraph(format!(
            "declared W/V/L {declared:?} disagree with the graph content"
        )));
    }
    Ok(g)
}
