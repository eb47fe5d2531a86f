//! How much of each classification's code space a record set uses, overall
//! and per year, plus per-disease profiles.
//!
//!     cargo run --example code_coverage

use std::path::PathBuf;

use exposome::coverage::{coverage_by_year, coverage_table, disease_profiles};
use exposome::ingest::read_records_file;
use exposome::{IngestOptions, Tables};

fn main() -> exposome::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let tables = Tables::load_dir(root.join("tables"))?;
    let records = read_records_file(root.join("temporal_77.csv"), &IngestOptions::default())?.records;

    for row in coverage_table(&records, &tables)? {
        println!("{:<10} {:>4} / {:<5} {}", row.axis, row.coverage.used, row.coverage.available, row.coverage);
    }
    println!();
    for row in coverage_by_year(&records, &tables)? {
        println!("{} {:<10} {}", row.year.unwrap_or_default(), row.axis, row.coverage);
    }
    println!("\n{:<6} {:>4} {:>9} {:>11} {:>7}", "disease", "ohp", "exposures", "occupations", "sectors");
    for p in disease_profiles(&records)? {
        println!("{:<7} {:>4} {:>9} {:>11} {:>7}", p.disease.raw(), p.ohp, p.exposures, p.occupations, p.sectors);
    }
    Ok(())
}
