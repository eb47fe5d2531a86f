//! Code-space coverage statistics over a record set.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::codes::{coverage, Axis, Code, Coverage, Tables};
use crate::error::Result;
use crate::ingest::OhpRecord;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub axis: Axis,
    /// `None` for the whole record set.
    pub year: Option<i32>,
    #[serde(flatten)]
    pub coverage: Coverage,
}

fn distinct(records: &[&OhpRecord], axis: Axis) -> BTreeSet<Code> {
    let mut out = BTreeSet::new();
    for r in records {
        match axis {
            Axis::Disease => {
                out.insert(r.disease.clone());
            }
            Axis::Exposure => out.extend(r.exposures.iter().cloned()),
            Axis::Occupation => {
                out.insert(r.occupation.clone());
            }
            Axis::Sector => {
                out.insert(r.sector.clone());
            }
        }
    }
    out
}

fn rows(records: &[&OhpRecord], tables: &Tables, year: Option<i32>) -> Result<Vec<CoverageRow>> {
    Axis::ALL
        .iter()
        .map(|&axis| {
            let used = distinct(records, axis).len();
            Ok(CoverageRow { axis, year, coverage: coverage(used, tables.get(axis).declared_size())? })
        })
        .collect()
}

/// Distinct codes used per axis against each table's declared code-space
/// size: the data behind a polar coverage chart.
pub fn coverage_table(records: &[OhpRecord], tables: &Tables) -> Result<Vec<CoverageRow>> {
    let all: Vec<&OhpRecord> = records.iter().collect();
    rows(&all, tables, None)
}

/// [`coverage_table`] restricted to each observed year.
pub fn coverage_by_year(records: &[OhpRecord], tables: &Tables) -> Result<Vec<CoverageRow>> {
    let mut by_year: BTreeMap<i32, Vec<&OhpRecord>> = BTreeMap::new();
    for r in records {
        by_year.entry(r.year).or_default().push(r);
    }
    let mut out = Vec::new();
    for (year, recs) in by_year {
        out.extend(rows(&recs, tables, Some(year))?);
    }
    Ok(out)
}

/// Per-disease marginal counts. Each coverage is relative to the number of
/// distinct codes of that axis in the whole record set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiseaseProfile {
    pub disease: Code,
    pub ohp: Coverage,
    pub exposures: Coverage,
    pub occupations: Coverage,
    pub sectors: Coverage,
}

/// Profiles sorted by observation count descending, then disease code.
pub fn disease_profiles(records: &[OhpRecord]) -> Result<Vec<DiseaseProfile>> {
    let all: Vec<&OhpRecord> = records.iter().collect();
    let totals = [Axis::Exposure, Axis::Occupation, Axis::Sector].map(|a| distinct(&all, a).len());
    let mut by_disease: BTreeMap<&Code, Vec<&OhpRecord>> = BTreeMap::new();
    for r in records {
        by_disease.entry(&r.disease).or_default().push(r);
    }
    let mut out = Vec::new();
    for (disease, recs) in by_disease {
        out.push(DiseaseProfile {
            disease: disease.clone(),
            ohp: coverage(recs.len(), records.len())?,
            exposures: coverage(distinct(&recs, Axis::Exposure).len(), totals[0])?,
            occupations: coverage(distinct(&recs, Axis::Occupation).len(), totals[1])?,
            sectors: coverage(distinct(&recs, Axis::Sector).len(), totals[2])?,
        });
    }
    out.sort_by(|a, b| b.ohp.used.cmp(&a.ohp.used).then_with(|| a.disease.cmp(&b.disease)));
    Ok(out)
}
