//! Hierarchical classification codes.
//!
//! Every observation is coded along four axes (disease, exposure, occupation,
//! activity sector). Codes are hierarchical: `02.03.01` is a child of `02.03`,
//! which is a child of `02`. A [`Code`] keeps its segments most-general first
//! so that truncating it with [`aggregate`] moves it up the hierarchy.
//!
//! Classification tables are user-supplied. A table carries the separator used
//! by its codes, the size of the code space (the denominator for coverage
//! statistics) and optional labels.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::hash::{Hash, Hasher};
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub const DEFAULT_SEPARATOR: char = '.';

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Disease,
    Exposure,
    Occupation,
    Sector,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::Disease, Axis::Exposure, Axis::Occupation, Axis::Sector];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Disease => "disease",
            Axis::Exposure => "exposure",
            Axis::Occupation => "occupation",
            Axis::Sector => "sector",
        }
    }

    /// Size of the national code space for this axis, used when a table
    /// does not declare its own.
    pub fn default_declared_size(self) -> usize {
        match self {
            Axis::Disease => 1716,
            Axis::Exposure => 6722,
            Axis::Occupation => 390,
            Axis::Sector => 61,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disease" => Ok(Axis::Disease),
            "exposure" => Ok(Axis::Exposure),
            "occupation" => Ok(Axis::Occupation),
            "sector" => Ok(Axis::Sector),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}

/// A canonicalized hierarchical code.
///
/// Equality, ordering and hashing only look at the axis and the segments, so
/// the same code written with two different separators compares equal.
#[derive(Clone)]
pub struct Code {
    axis: Axis,
    raw: String,
    separator: char,
    // byte offset of the end of each segment in `raw`
    ends: SmallVec<[u32; 4]>,
}

impl Code {
    /// Builds a code from already-split segments. Segments are canonicalized
    /// the same way as [`parse_code`] does.
    pub fn from_segments<S: AsRef<str>>(axis: Axis, segments: &[S], separator: char) -> Result<Code> {
        if segments.is_empty() {
            return Err(Error::EmptyCode);
        }
        let mut raw = String::new();
        let mut ends = SmallVec::new();
        for (i, seg) in segments.iter().enumerate() {
            let seg = seg.as_ref().trim();
            if seg.is_empty() || seg.contains(separator) {
                let joined: Vec<&str> = segments.iter().map(|s| s.as_ref()).collect();
                return Err(Error::EmptySegment { raw: joined.join(&separator.to_string()) });
            }
            if i > 0 {
                raw.push(separator);
            }
            raw.extend(seg.chars().flat_map(char::to_uppercase));
            ends.push(raw.len() as u32);
        }
        Ok(Code { axis, raw, separator, ends })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// Canonical text form (segments joined with the separator).
    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn separator(&self) -> char {
        self.separator
    }

    /// Number of hierarchy levels.
    pub fn depth(&self) -> usize {
        self.ends.len()
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> + '_ {
        let sep_len = self.separator.len_utf8();
        let mut start = 0usize;
        self.ends.iter().map(move |&end| {
            let seg = &self.raw[start..end as usize];
            start = end as usize + sep_len;
            seg
        })
    }

    pub fn is_ancestor_of(&self, other: &Code) -> bool {
        self.axis == other.axis
            && self.depth() <= other.depth()
            && self.segments().zip(other.segments()).all(|(a, b)| a == b)
    }
}

impl PartialEq for Code {
    fn eq(&self, other: &Self) -> bool {
        self.axis == other.axis
            && self.depth() == other.depth()
            && self.segments().eq(other.segments())
    }
}

impl Eq for Code {}

impl Hash for Code {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.axis.hash(state);
        self.depth().hash(state);
        for seg in self.segments() {
            seg.hash(state);
        }
    }
}

impl Ord for Code {
    fn cmp(&self, other: &Self) -> Ordering {
        self.axis
            .cmp(&other.axis)
            .then_with(|| self.segments().cmp(other.segments()))
    }
}

impl PartialOrd for Code {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.raw)
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.axis, self.raw)
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.raw)
    }
}

/// Parses a raw code: trims it, splits it on `separator`, trims and
/// uppercases every segment.
pub fn parse_code(axis: Axis, text: &str, separator: char) -> Result<Code> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::EmptyCode);
    }
    let segments: Vec<&str> = trimmed.split(separator).map(str::trim).collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySegment { raw: trimmed.to_string() });
    }
    Code::from_segments(axis, &segments, separator)
}

/// Truncates `code` to its first `level` segments. Levels at or beyond the
/// code's depth return it unchanged; level 0 is treated as 1.
pub fn aggregate(code: &Code, level: usize) -> Code {
    let level = level.max(1);
    if level >= code.depth() {
        return code.clone();
    }
    let end = code.ends[level - 1] as usize;
    Code {
        axis: code.axis,
        raw: code.raw[..end].to_string(),
        separator: code.separator,
        ends: code.ends[..level].iter().copied().collect(),
    }
}

/// Share of a code space taken up by the codes actually observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    pub used: usize,
    pub available: usize,
    pub percent: f64,
}

impl Coverage {
    /// Percentage rounded half away from zero to `decimals` places.
    pub fn rounded(&self, decimals: i32) -> f64 {
        let scale = 10f64.powi(decimals);
        (self.percent * scale).round() / scale
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}%", self.percent)
    }
}

pub fn coverage(used_distinct: usize, available: usize) -> Result<Coverage> {
    if available == 0 || used_distinct > available {
        return Err(Error::CoverageDomain { used: used_distinct, available });
    }
    Ok(Coverage {
        used: used_distinct,
        available,
        percent: 100.0 * used_distinct as f64 / available as f64,
    })
}

/// A user-supplied classification for one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationTable {
    axis: Axis,
    separator: char,
    declared_size: usize,
    entries: BTreeMap<Code, String>,
}

impl ClassificationTable {
    pub fn new(axis: Axis, declared_size: usize, separator: char) -> Result<Self> {
        if declared_size == 0 {
            return Err(Error::InvalidTable(format!("{axis}: declared size must be positive")));
        }
        Ok(ClassificationTable {
            axis,
            separator,
            declared_size,
            entries: BTreeMap::new(),
        })
    }

    /// Empty table with the axis's default code-space size and `.` separator.
    pub fn default_for(axis: Axis) -> Self {
        ClassificationTable {
            axis,
            separator: DEFAULT_SEPARATOR,
            declared_size: axis.default_declared_size(),
            entries: BTreeMap::new(),
        }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn separator(&self) -> char {
        self.separator
    }

    pub fn declared_size(&self) -> usize {
        self.declared_size
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn label(&self, code: &Code) -> Option<&str> {
        self.entries.get(code).map(String::as_str)
    }

    pub fn insert(&mut self, code_text: &str, label: &str) -> Result<()> {
        let code = parse_code(self.axis, code_text, self.separator)?;
        self.entries.insert(code, label.trim().to_string());
        if self.entries.len() > self.declared_size {
            return Err(Error::InvalidTable(format!(
                "{}: {} entries exceed declared size {}",
                self.axis,
                self.entries.len(),
                self.declared_size
            )));
        }
        Ok(())
    }

    /// Reads a table file: a metadata line `axis,declared_size,separator`
    /// followed by `code,label` rows. A literal column-name line before the
    /// metadata or before the rows is skipped. An empty declared size or
    /// separator falls back to the axis defaults.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = rdr.records();

        let mut meta = next_row(&mut rows)?
            .ok_or_else(|| Error::InvalidTable("empty table file".into()))?;
        if meta.get(0).is_some_and(|f| f.eq_ignore_ascii_case("axis")) {
            meta = next_row(&mut rows)?
                .ok_or_else(|| Error::InvalidTable("missing metadata line".into()))?;
        }
        let axis: Axis = meta
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| Error::InvalidTable(e.to_string()))?;
        let declared_size = match meta.get(1).unwrap_or_default() {
            "" => axis.default_declared_size(),
            s => s
                .parse()
                .map_err(|_| Error::InvalidTable(format!("bad declared size {s:?}")))?,
        };
        let separator = match meta.get(2).unwrap_or_default() {
            "" => DEFAULT_SEPARATOR,
            s => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => c,
                    _ => return Err(Error::InvalidTable(format!("separator must be one character, got {s:?}"))),
                }
            }
        };

        let mut table = ClassificationTable::new(axis, declared_size, separator)?;
        let mut first = true;
        while let Some(row) = next_row(&mut rows)? {
            let code = row.get(0).unwrap_or_default();
            let label = row.get(1).unwrap_or_default();
            if first && code.eq_ignore_ascii_case("code") && label.eq_ignore_ascii_case("label") {
                first = false;
                continue;
            }
            first = false;
            if code.is_empty() {
                continue;
            }
            table.insert(code, label)?;
        }
        Ok(table)
    }
}

fn next_row<R: Read>(rows: &mut csv::StringRecordsIter<'_, R>) -> Result<Option<csv::StringRecord>> {
    match rows.next() {
        Some(row) => Ok(Some(row?)),
        None => Ok(None),
    }
}

/// One classification table per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Tables {
    tables: [ClassificationTable; 4],
}

impl Default for Tables {
    fn default() -> Self {
        Tables {
            tables: Axis::ALL.map(ClassificationTable::default_for),
        }
    }
}

impl Tables {
    pub fn get(&self, axis: Axis) -> &ClassificationTable {
        &self.tables[axis.index()]
    }

    pub fn set(&mut self, table: ClassificationTable) {
        let i = table.axis().index();
        self.tables[i] = table;
    }

    pub fn separator(&self, axis: Axis) -> char {
        self.get(axis).separator()
    }

    /// Loads every `*.csv` file in `dir` as a classification table. Axes
    /// without a file keep their defaults; two files for one axis is an error.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let mut paths: Vec<_> = fs::read_dir(dir.as_ref())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")))
            .collect();
        paths.sort();
        let mut tables = Tables::default();
        let mut seen = [false; 4];
        for path in paths {
            let table = ClassificationTable::from_reader(fs::File::open(&path)?)
                .map_err(|e| Error::InvalidTable(format!("{}: {e}", path.display())))?;
            let i = table.axis().index();
            if seen[i] {
                return Err(Error::InvalidTable(format!(
                    "more than one table for axis {} ({})",
                    table.axis(),
                    path.display()
                )));
            }
            seen[i] = true;
            tables.set(table);
        }
        Ok(tables)
    }
}
