//! Record parsing and deduplication into weighted nodes.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::codes::{aggregate, parse_code, Axis, Code, Tables};
use crate::error::{Error, Result};

/// Upper bound on exposures attached to one observation.
pub const MAX_EXPOSURES: usize = 5;

pub const CSV_HEADER: [&str; 10] = [
    "record_id",
    "year",
    "disease",
    "exposure1",
    "exposure2",
    "exposure3",
    "exposure4",
    "exposure5",
    "occupation",
    "sector",
];

/// Multiset backed by an ordered map of element counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Multiset<T: Ord>(BTreeMap<T, u64>);

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset(BTreeMap::new())
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: T) {
        self.insert_n(item, 1);
    }

    pub fn insert_n(&mut self, item: T, n: u64) {
        if n > 0 {
            *self.0.entry(item).or_insert(0) += n;
        }
    }

    pub fn count(&self, item: &T) -> u64 {
        self.0.get(item).copied().unwrap_or(0)
    }

    /// Total multiplicity.
    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for item in iter {
            m.insert(item);
        }
        m
    }
}

/// One observed occupational health problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OhpRecord {
    pub record_id: String,
    pub year: i32,
    pub disease: Code,
    pub exposures: BTreeSet<Code>,
    pub occupation: Code,
    pub sector: Code,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyMode {
    /// Nodes are keyed on (disease, exposure set).
    #[default]
    Cortege,
    /// Nodes are keyed on (disease, exposure set, occupation, sector).
    Strict,
}

impl std::str::FromStr for KeyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cortege" => Ok(KeyMode::Cortege),
            "strict" => Ok(KeyMode::Strict),
            other => Err(Error::InvalidParams(format!("unknown key mode {other:?}"))),
        }
    }
}

impl fmt::Display for KeyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyMode::Cortege => "cortege",
            KeyMode::Strict => "strict",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeKey {
    pub disease: Code,
    /// Sorted, duplicate-free.
    pub exposures: Vec<Code>,
    /// `(occupation, sector)`, present in strict mode only.
    pub strict_extra: Option<(Code, Code)>,
}

impl NodeKey {
    pub fn of(record: &OhpRecord, mode: KeyMode) -> NodeKey {
        NodeKey {
            disease: record.disease.clone(),
            exposures: record.exposures.iter().cloned().collect(),
            strict_extra: match mode {
                KeyMode::Cortege => None,
                KeyMode::Strict => Some((record.occupation.clone(), record.sector.clone())),
            },
        }
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.disease)?;
        for e in &self.exposures {
            write!(f, " x {e}")?;
        }
        if let Some((o, s)) = &self.strict_extra {
            write!(f, " [{o}/{s}]")?;
        }
        Ok(())
    }
}

/// A deduplicated observation with its multiplicity.
///
/// `weight` equals the total of each attribute multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: usize,
    pub key: NodeKey,
    pub weight: u64,
    pub years: Multiset<i32>,
    pub occupations: Multiset<Code>,
    pub sectors: Multiset<Code>,
}

impl Node {
    pub fn exposures(&self) -> &[Code] {
        &self.key.exposures
    }

    pub fn disease(&self) -> &Code {
        &self.key.disease
    }

    pub fn attributes(&self, axis: Axis) -> Option<&Multiset<Code>> {
        match axis {
            Axis::Occupation => Some(&self.occupations),
            Axis::Sector => Some(&self.sectors),
            Axis::Disease | Axis::Exposure => None,
        }
    }
}

/// Collapses records into one node per distinct key. Node ids follow the
/// order in which keys first appear.
pub fn dedupe(records: &[OhpRecord], mode: KeyMode) -> Vec<Node> {
    let mut index: HashMap<NodeKey, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    for record in records {
        let key = NodeKey::of(record, mode);
        let id = *index.entry(key).or_insert_with_key(|key| {
            nodes.push(Node {
                id: nodes.len(),
                key: key.clone(),
                weight: 0,
                years: Multiset::new(),
                occupations: Multiset::new(),
                sectors: Multiset::new(),
            });
            nodes.len() - 1
        });
        let node = &mut nodes[id];
        node.weight += 1;
        node.years.insert(record.year);
        node.occupations.insert(record.occupation.clone());
        node.sectors.insert(record.sector.clone());
    }
    nodes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail")]
pub enum RejectReason {
    MissingField(String),
    TooManyExposures(usize),
    BadCode { field: String, message: String },
    BadYear(String),
    DuplicateRecordId(String),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::MissingField(field) => write!(f, "MissingField: {field}"),
            RejectReason::TooManyExposures(n) => {
                write!(f, "TooManyExposures: {n} distinct exposures (max {MAX_EXPOSURES})")
            }
            RejectReason::BadCode { field, message } => write!(f, "BadCode: {field}: {message}"),
            RejectReason::BadYear(y) => write!(f, "BadYear: {y}"),
            RejectReason::DuplicateRecordId(id) => write!(f, "DuplicateRecordId: {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    /// 1-based index among the data rows of the input.
    pub row: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Parsed {
    pub records: Vec<OhpRecord>,
    pub rejects: Vec<Reject>,
}

impl Parsed {
    pub fn rows(&self) -> usize {
        self.records.len() + self.rejects.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    /// One JSON object per line, same field names as the CSV header.
    JsonLines,
}

impl RecordFormat {
    /// `.jsonl` / `.ndjson` are JSON lines, everything else CSV.
    pub fn from_path(path: &Path) -> RecordFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("ndjson") => {
                RecordFormat::JsonLines
            }
            _ => RecordFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    pub tables: Tables,
    /// Aggregation level per axis, indexed like [`Axis::ALL`].
    pub agg_levels: [Option<usize>; 4],
    pub years: RangeInclusive<i32>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            tables: Tables::default(),
            agg_levels: [None; 4],
            years: 1990..=2100,
        }
    }
}

impl IngestOptions {
    pub fn with_tables(mut self, tables: Tables) -> Self {
        self.tables = tables;
        self
    }

    pub fn with_aggregation(mut self, axis: Axis, level: usize) -> Self {
        self.agg_levels[axis as usize] = Some(level);
        self
    }

    pub fn agg_level(&self, axis: Axis) -> Option<usize> {
        self.agg_levels[axis as usize]
    }

    fn code(&self, axis: Axis, field: &str, text: &str) -> std::result::Result<Code, RejectReason> {
        let code = parse_code(axis, text, self.tables.separator(axis)).map_err(|e| RejectReason::BadCode {
            field: field.to_string(),
            message: format!("{e} ({text:?})"),
        })?;
        Ok(match self.agg_level(axis) {
            Some(level) => aggregate(&code, level),
            None => code,
        })
    }
}

#[derive(Default)]
struct RawRow {
    record_id: Option<String>,
    year: Option<String>,
    disease: Option<String>,
    exposures: [Option<String>; MAX_EXPOSURES],
    occupation: Option<String>,
    sector: Option<String>,
}

fn required<'a>(value: &'a Option<String>, field: &str) -> std::result::Result<&'a str, RejectReason> {
    match value.as_deref().map(str::trim) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(RejectReason::MissingField(field.to_string())),
    }
}

fn validate(raw: &RawRow, options: &IngestOptions) -> std::result::Result<OhpRecord, RejectReason> {
    let record_id = required(&raw.record_id, "record_id")?;
    let year_text = required(&raw.year, "year")?;
    let disease = required(&raw.disease, "disease")?;
    let occupation = required(&raw.occupation, "occupation")?;
    let sector = required(&raw.sector, "sector")?;

    // a cell may hold several exposures separated by ';'
    let exposure_texts: Vec<(usize, &str)> = raw
        .exposures
        .iter()
        .enumerate()
        .filter_map(|(i, cell)| cell.as_deref().map(|c| (i, c)))
        .flat_map(|(i, cell)| cell.split(';').map(move |p| (i, p.trim())))
        .filter(|(_, p)| !p.is_empty())
        .collect();
    if exposure_texts.is_empty() {
        return Err(RejectReason::MissingField("exposure1".into()));
    }

    let year: i32 = year_text
        .parse()
        .map_err(|_| RejectReason::BadYear(year_text.to_string()))?;
    if !options.years.contains(&year) {
        return Err(RejectReason::BadYear(year_text.to_string()));
    }

    let sep = options.tables.separator(Axis::Exposure);
    let mut raw_exposures = BTreeSet::new();
    for (i, text) in &exposure_texts {
        let field = format!("exposure{}", i + 1);
        let code = parse_code(Axis::Exposure, text, sep).map_err(|e| RejectReason::BadCode {
            field,
            message: format!("{e} ({text:?})"),
        })?;
        raw_exposures.insert(code);
    }
    if raw_exposures.len() > MAX_EXPOSURES {
        return Err(RejectReason::TooManyExposures(raw_exposures.len()));
    }
    let exposures = match options.agg_level(Axis::Exposure) {
        Some(level) => raw_exposures.iter().map(|c| aggregate(c, level)).collect(),
        None => raw_exposures,
    };

    Ok(OhpRecord {
        record_id: record_id.to_string(),
        year,
        disease: options.code(Axis::Disease, "disease", disease)?,
        exposures,
        occupation: options.code(Axis::Occupation, "occupation", occupation)?,
        sector: options.code(Axis::Sector, "sector", sector)?,
    })
}

/// Parses a record stream. Row-level problems are collected as rejects; only
/// a stream that cannot be read at all is an error.
pub fn parse_records<R: Read>(input: R, format: RecordFormat, options: &IngestOptions) -> Result<Parsed> {
    let rows = match format {
        RecordFormat::Csv => csv_rows(input)?,
        RecordFormat::JsonLines => jsonl_rows(input)?,
    };
    let mut parsed = Parsed::default();
    let mut seen_ids = HashSet::new();
    for (i, raw) in rows.iter().enumerate() {
        let row = i + 1;
        let outcome = validate(raw, options).and_then(|record| {
            if seen_ids.insert(record.record_id.clone()) {
                Ok(record)
            } else {
                Err(RejectReason::DuplicateRecordId(record.record_id))
            }
        });
        match outcome {
            Ok(record) => parsed.records.push(record),
            Err(reason) => parsed.rejects.push(Reject { row, reason }),
        }
    }
    Ok(parsed)
}

fn csv_rows<R: Read>(input: R) -> Result<Vec<RawRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let mut idx = [None; 10];
    for (slot, name) in idx.iter_mut().zip(CSV_HEADER) {
        *slot = column(name);
    }
    for name in ["record_id", "year", "disease", "exposure1", "occupation", "sector"] {
        if column(name).is_none() {
            return Err(Error::Format {
                line: 1,
                message: format!("missing column {name:?}"),
            });
        }
    }

    let mut rows = Vec::new();
    for result in rdr.records() {
        let rec = result?;
        let get = |i: Option<usize>| i.and_then(|i| rec.get(i)).map(str::to_string);
        rows.push(RawRow {
            record_id: get(idx[0]),
            year: get(idx[1]),
            disease: get(idx[2]),
            exposures: [get(idx[3]), get(idx[4]), get(idx[5]), get(idx[6]), get(idx[7])],
            occupation: get(idx[8]),
            sector: get(idx[9]),
        });
    }
    Ok(rows)
}

fn jsonl_rows<R: Read>(input: R) -> Result<Vec<RawRow>> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let format_err = |message: String| Error::Format { line: i as u64 + 1, message };
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| format_err(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| format_err("expected a JSON object".into()))?;
        let get = |name: &str| match obj.get(name) {
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            Some(serde_json::Value::Number(n)) => Some(n.to_string()),
            _ => None,
        };
        rows.push(RawRow {
            record_id: get("record_id"),
            year: get("year"),
            disease: get("disease"),
            exposures: [
                get("exposure1"),
                get("exposure2"),
                get("exposure3"),
                get("exposure4"),
                get("exposure5"),
            ],
            occupation: get("occupation"),
            sector: get("sector"),
        });
    }
    Ok(rows)
}

/// Reads a record file, picking the format from its extension.
pub fn read_records_file(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Parsed> {
    let path = path.as_ref();
    parse_records(File::open(path)?, RecordFormat::from_path(path), options)
}

/// Path of the sidecar reject report for `input`.
pub fn rejects_path(input: &Path) -> PathBuf {
    let mut name = input.as_os_str().to_owned();
    name.push(".rejects");
    PathBuf::from(name)
}

pub fn write_rejects<W: Write>(out: W, rejects: &[Reject]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["row", "reason"])?;
    for r in rejects {
        wtr.write_record([r.row.to_string(), r.reason.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes records as CSV with the canonical header. Exposures beyond the
/// fifth column never occur because records hold at most five.
pub fn write_records_csv<W: Write>(out: W, records: &[OhpRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(CSV_HEADER)?;
    for r in records {
        let mut row = vec![r.record_id.clone(), r.year.to_string(), r.disease.raw().to_string()];
        let mut exposures: Vec<String> = r.exposures.iter().map(|c| c.raw().to_string()).collect();
        exposures.resize(MAX_EXPOSURES, String::new());
        row.extend(exposures);
        row.push(r.occupation.raw().to_string());
        row.push(r.sector.raw().to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "record_id,year,disease,exposure1,exposure2,exposure3,exposure4,exposure5,occupation,sector\n";

    fn parse(body: &str) -> Parsed {
        parse_records(format!("{HEADER}{body}").as_bytes(), RecordFormat::Csv, &IngestOptions::default()).unwrap()
    }

    #[test]
    fn duplicate_exposures_collapse() {
        let p = parse("r1,2004,C82,X;X;Y,,,,,O1,S1\n");
        assert!(p.rejects.is_empty());
        let names: Vec<_> = p.records[0].exposures.iter().map(|c| c.raw()).collect();
        assert_eq!(names, ["X", "Y"]);
    }

    #[test]
    fn six_exposures_rejected() {
        let p = parse("r1,2004,C82,A;B,C,D,E,F,O1,S1\n");
        assert_eq!(p.records.len(), 0);
        assert_eq!(
            p.rejects,
            vec![Reject { row: 1, reason: RejectReason::TooManyExposures(6) }]
        );
    }

    #[test]
    fn row_level_errors() {
        let p = parse(
            "r1,2004,,A,,,,,O1,S1\n\
             r2,19x4,C82,A,,,,,O1,S1\n\
             r3,1850,C82,A,,,,,O1,S1\n\
             r4,2004,C82,A..B,,,,,O1,S1\n\
             r5,2004,C82,,,,,,O1,S1\n\
             r6,2004,C82,A,,,,,O1,S1\n\
             r6,2005,C82,A,,,,,O1,S1\n\
             r7,2004,C82,A\n",
        );
        assert_eq!(p.records.len(), 1);
        let reasons: Vec<_> = p.rejects.iter().map(|r| (r.row, r.reason.to_string())).collect();
        assert_eq!(reasons[0], (1, "MissingField: disease".to_string()));
        assert!(matches!(p.rejects[1].reason, RejectReason::BadYear(_)));
        assert!(matches!(p.rejects[2].reason, RejectReason::BadYear(_)));
        assert!(matches!(p.rejects[3].reason, RejectReason::BadCode { .. }));
        assert_eq!(p.rejects[4].reason, RejectReason::MissingField("exposure1".into()));
        assert_eq!(p.rejects[5].reason, RejectReason::DuplicateRecordId("r6".into()));
        assert_eq!(p.rejects[6].reason, RejectReason::MissingField("occupation".into()));
        assert_eq!(p.rows(), 8);
    }

    #[test]
    fn missing_header_column_is_fatal() {
        let err = parse_records("a,b\n1,2\n".as_bytes(), RecordFormat::Csv, &IngestOptions::default());
        assert!(matches!(err, Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn aggregation_applies_per_axis() {
        let opts = IngestOptions::default().with_aggregation(Axis::Exposure, 1);
        let body = format!("{HEADER}r1,2004,C82.1,02.03,02.04,05.01,,,O1.2,S1\n");
        let p = parse_records(body.as_bytes(), RecordFormat::Csv, &opts).unwrap();
        let r = &p.records[0];
        let names: Vec<_> = r.exposures.iter().map(|c| c.raw()).collect();
        assert_eq!(names, ["02", "05"]);
        assert_eq!(r.disease.raw(), "C82.1");
        assert_eq!(r.occupation.raw(), "O1.2");
    }

    #[test]
    fn json_lines_input() {
        let text = r#"{"record_id":"a","year":2003,"disease":"C82","exposure1":"X","exposure2":null,"occupation":"O","sector":"S"}

{"record_id":"b","year":"2004","disease":"C82","exposure1":"X;Y","occupation":"O","sector":"S"}
{"record_id":"c","year":2004,"disease":"C82","occupation":"O","sector":"S"}
"#;
        let p = parse_records(text.as_bytes(), RecordFormat::JsonLines, &IngestOptions::default()).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.rejects.len(), 1);
        assert_eq!(p.rejects[0].row, 3);
        assert_eq!(p.records[1].year, 2004);

        let bad = parse_records("[1,2]\n".as_bytes(), RecordFormat::JsonLines, &IngestOptions::default());
        assert!(matches!(bad, Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn dedupe_key_modes() {
        let p = parse(
            "r1,2004,C82,A,B,,,,O1,S1\n\
             r2,2005,C82,B,A,,,,O2,S1\n",
        );
        let nodes = dedupe(&p.records, KeyMode::Cortege);
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].weight, 2);
        assert_eq!(nodes[0].occupations.distinct(), 2);
        assert_eq!(nodes[0].years.total(), 2);
        assert_eq!(dedupe(&p.records, KeyMode::Strict).len(), 2);
    }

    #[test]
    fn rejects_sidecar_format() {
        let mut out = Vec::new();
        write_rejects(&mut out, &[Reject { row: 3, reason: RejectReason::BadYear("x".into()) }]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "row,reason\n3,BadYear: x\n");
        assert_eq!(rejects_path(Path::new("data/in.csv")), PathBuf::from("data/in.csv.rejects"));
    }

    #[test]
    fn csv_writer_round_trips() {
        let p = parse("r1,2004,C82,A;B,,,,,O1,S1\nr2,2005,C83,C,,,,,O2,S2\n");
        let mut out = Vec::new();
        write_records_csv(&mut out, &p.records).unwrap();
        let again = parse_records(out.as_slice(), RecordFormat::Csv, &IngestOptions::default()).unwrap();
        assert_eq!(again.records, p.records);
    }
}
