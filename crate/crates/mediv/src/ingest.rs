//! CSV ingestion and dataset construction.
//!
//! The estimators in `mediv-core` want an outcome, a binary treatment, a
//! binary mediator, a binary instrument, and a covariate matrix with a
//! leading intercept. Observational files rarely arrive in that shape, so
//! this module handles the plumbing:
//!
//! * [`load_csv`] reads the referenced columns, dropping rows with missing
//!   cells (listwise deletion) and counting the drops;
//! * [`empirical_quantile`] computes the lower empirical quantile used to
//!   binarize the mediator and instrument source columns;
//! * [`build_dataset`] applies per-column transforms and assembles a
//!   [`Dataset`], reporting the quantile cuts and indicator shares.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use mediv_core::{Dataset, Matrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Per-column preprocessing applied before the design is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// Use the column as is.
    #[default]
    None,
    /// Replace v with ln(1 + v); requires v > −1.
    Log1p,
    /// Divide by the sample standard deviation (n−1 denominator). The mean
    /// is left alone so the column keeps its location.
    Standardize,
}

/// Names of the columns the estimators consume, plus per-column transforms.
///
/// The mediator and instrument columns are *sources*: continuous scores that
/// get binarized against an empirical quantile. Transforms listed for them
/// are ignored, because a monotone transform never changes a quantile
/// indicator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub outcome: String,
    pub treatment: String,
    pub mediator_source: String,
    pub instrument_source: String,
    pub covariates: Vec<String>,
    #[serde(default)]
    pub transforms: BTreeMap<String, Transform>,
}

impl ColumnSpec {
    /// Default schema for the class-size study extract: outcome `y3`
    /// (standardized), treatment `d`, mediator source `y2`, instrument
    /// source `y1`, covariates `blk`, `boy`, `expi` (as ln(expi+1)), and
    /// `lunch`.
    pub fn star_default() -> Self {
        let mut transforms = BTreeMap::new();
        transforms.insert("y3".to_owned(), Transform::Standardize);
        transforms.insert("expi".to_owned(), Transform::Log1p);
        Self {
            outcome: "y3".to_owned(),
            treatment: "d".to_owned(),
            mediator_source: "y2".to_owned(),
            instrument_source: "y1".to_owned(),
            covariates: vec![
                "blk".to_owned(),
                "boy".to_owned(),
                "expi".to_owned(),
                "lunch".to_owned(),
            ],
            transforms,
        }
    }

    /// Reads a spec from a JSON file.
    pub fn from_json_file(path: &Path) -> Result<Self, IngestError> {
        let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec: Self = serde_json::from_str(&text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// All referenced column names in loading order, without duplicates.
    fn referenced(&self) -> Vec<&str> {
        let mut names: Vec<&str> = vec![
            self.outcome.as_str(),
            self.treatment.as_str(),
            self.mediator_source.as_str(),
            self.instrument_source.as_str(),
        ];
        for c in &self.covariates {
            names.push(c.as_str());
        }
        names
    }

    /// The four role columns and the covariates must be distinct and
    /// non-empty.
    pub fn validate(&self) -> Result<(), IngestError> {
        let names = self.referenced();
        if names.iter().any(|n| n.is_empty()) {
            return Err(IngestError::InvalidColumns(
                "column names must be non-empty".to_owned(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            if !seen.insert(*n) {
                return Err(IngestError::InvalidColumns(format!(
                    "column `{n}` is referenced twice"
                )));
            }
        }
        Ok(())
    }
}

/// Everything that can go wrong between a CSV path and a [`Dataset`].
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed column mapping: {0}")]
    Mapping(#[from] serde_json::Error),
    #[error("invalid column mapping: {0}")]
    InvalidColumns(String),
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("data row {row}, column `{column}`: cannot parse value as a number")]
    Parse { row: usize, column: String },
    #[error("no rows left after dropping rows with missing values")]
    EmptyAfterFiltering,
    #[error("empty input")]
    EmptyInput,
    #[error("quantile probability must lie strictly between 0 and 1")]
    InvalidProbability,
    #[error("column `{column}` cannot be transformed: {reason}")]
    TransformDomain { column: String, reason: &'static str },
    #[error("mediator indicator is constant after binarization")]
    DegenerateMediator,
    #[error("instrument indicator is constant after binarization")]
    DegenerateInstrument,
    #[error(transparent)]
    Invalid(#[from] mediv_core::Error),
}

/// The referenced columns of one CSV file, parsed and filtered.
///
/// Rows with a missing cell in any referenced column are dropped;
/// [`LoadedTable::dropped`] counts them.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTable {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    /// Rows removed by listwise deletion.
    pub dropped: usize,
    /// Rows kept.
    pub rows: usize,
}

impl LoadedTable {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    fn required(&self, name: &str) -> Result<&[f64], IngestError> {
        self.column(name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_owned()))
    }
}

/// Cell values treated as missing rather than malformed.
fn is_missing(cell: &str) -> bool {
    matches!(
        cell,
        "" | "." | "NA" | "na" | "N/A" | "n/a" | "NaN" | "nan" | "NAN" | "null" | "NULL"
    )
}

/// Reads the columns referenced by `spec` from a headered CSV file.
///
/// Rows with any missing referenced cell are dropped and counted. A
/// non-missing cell that does not parse as a finite number is an error, not
/// a drop.
pub fn load_csv(path: &Path, spec: &ColumnSpec) -> Result<LoadedTable, IngestError> {
    spec.validate()?;
    let file = fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let header = reader.headers()?.clone();
    let wanted = spec.referenced();
    let mut indices = Vec::with_capacity(wanted.len());
    for name in &wanted {
        match header.iter().position(|h| h == *name) {
            Some(idx) => indices.push(idx),
            None => return Err(IngestError::MissingColumn((*name).to_owned())),
        }
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); wanted.len()];
    let mut dropped = 0usize;
    let mut parsed_row: Vec<f64> = Vec::with_capacity(wanted.len());
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        parsed_row.clear();
        let mut missing = false;
        for (slot, &col_idx) in indices.iter().enumerate() {
            let cell = record.get(col_idx).unwrap_or("");
            if is_missing(cell) {
                missing = true;
                break;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => parsed_row.push(v),
                _ => {
                    return Err(IngestError::Parse {
                        row: row_idx + 1,
                        column: wanted[slot].to_owned(),
                    })
                }
            }
        }
        if missing {
            dropped += 1;
            continue;
        }
        for (slot, v) in parsed_row.iter().enumerate() {
            columns[slot].push(*v);
        }
    }

    let rows = columns.first().map_or(0, Vec::len);
    if rows == 0 {
        return Err(IngestError::EmptyAfterFiltering);
    }
    Ok(LoadedTable {
        names: wanted.into_iter().map(str::to_owned).collect(),
        columns,
        dropped,
        rows,
    })
}

/// Writes a [`LoadedTable`] back out as CSV with full float round-tripping,
/// so that loading the result reproduces the table exactly.
pub fn write_table(path: &Path, table: &LoadedTable) -> Result<(), IngestError> {
    let file = fs::File::create(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(&table.names)?;
    let mut record: Vec<String> = Vec::with_capacity(table.names.len());
    for row in 0..table.rows {
        record.clear();
        for col in &table.columns {
            record.push(col[row].to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

/// Lower empirical quantile: the smallest observed value `v` such that
/// `count(values ≤ v) / n ≥ p`. Deterministic under ties.
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64, IngestError> {
    if values.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(IngestError::InvalidProbability);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("loaded values are finite"));
    let n = sorted.len();
    // Smallest index i (1-based) with i/n ≥ p is ceil(p·n); any strictly
    // smaller observed value covers fewer than p·n observations. The two
    // nudge loops keep the count definition exact even when p·n rounds
    // across an integer boundary.
    let mut rank = ((p * n as f64).ceil().max(1.0) as usize).min(n);
    while rank > 1 && (rank - 1) as f64 / n as f64 >= p {
        rank -= 1;
    }
    while rank < n && (rank as f64 / n as f64) < p {
        rank += 1;
    }
    Ok(sorted[rank - 1])
}

/// A constructed analysis sample plus the bookkeeping a caller reports.
#[derive(Debug, Clone)]
pub struct BuiltDataset {
    pub data: Dataset,
    /// Quantile cut applied to the mediator source.
    pub mediator_cut: f64,
    /// Quantile cut applied to the instrument source.
    pub instrument_cut: f64,
    /// Share of mediator indicators equal to 1.
    pub mediator_share: f64,
    /// Share of instrument indicators equal to 1.
    pub instrument_share: f64,
    /// Rows dropped during loading (carried through for reporting).
    pub dropped: usize,
}

fn apply_transform(
    name: &str,
    values: &[f64],
    transform: Transform,
) -> Result<Vec<f64>, IngestError> {
    match transform {
        Transform::None => Ok(values.to_vec()),
        Transform::Log1p => {
            if values.iter().any(|&v| v <= -1.0) {
                return Err(IngestError::TransformDomain {
                    column: name.to_owned(),
                    reason: "log1p requires every value > -1",
                });
            }
            Ok(values.iter().map(|&v| v.ln_1p()).collect())
        }
        Transform::Standardize => {
            let n = values.len();
            if n < 2 {
                return Err(IngestError::TransformDomain {
                    column: name.to_owned(),
                    reason: "standardizing needs at least two rows",
                });
            }
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (n as f64 - 1.0);
            if var <= 0.0 {
                return Err(IngestError::TransformDomain {
                    column: name.to_owned(),
                    reason: "standardizing a constant column",
                });
            }
            let sd = var.sqrt();
            Ok(values.iter().map(|&v| v / sd).collect())
        }
    }
}

/// Binarizes a source column against its lower empirical p-quantile:
/// indicator 1[q_p < value]. Values tied with the cut sit at 0.
fn binarize(values: &[f64], p: f64) -> Result<(Vec<f64>, f64), IngestError> {
    let cut = empirical_quantile(values, p)?;
    let indicator = values
        .iter()
        .map(|&v| if cut < v { 1.0 } else { 0.0 })
        .collect();
    Ok((indicator, cut))
}

/// Assembles the analysis sample from a loaded table: transforms the
/// outcome and covariates, binarizes the mediator and instrument sources at
/// the p-quantile, and prepends the intercept column.
pub fn build_dataset(
    table: &LoadedTable,
    spec: &ColumnSpec,
    p: f64,
) -> Result<BuiltDataset, IngestError> {
    spec.validate()?;
    let transform_of = |name: &str| spec.transforms.get(name).copied().unwrap_or_default();

    let y = apply_transform(
        &spec.outcome,
        table.required(&spec.outcome)?,
        transform_of(&spec.outcome),
    )?;
    let d = table.required(&spec.treatment)?.to_vec();

    let (m, mediator_cut) = binarize(table.required(&spec.mediator_source)?, p)?;
    if m.iter().all(|&v| v == m[0]) {
        return Err(IngestError::DegenerateMediator);
    }
    let (z, instrument_cut) = binarize(table.required(&spec.instrument_source)?, p)?;
    if z.iter().all(|&v| v == z[0]) {
        return Err(IngestError::DegenerateInstrument);
    }

    let n = table.rows;
    let k = 1 + spec.covariates.len();
    let mut xdata = vec![0.0; n * k];
    for row in xdata.chunks_exact_mut(k) {
        row[0] = 1.0;
    }
    for (j, name) in spec.covariates.iter().enumerate() {
        let col = apply_transform(name, table.required(name)?, transform_of(name))?;
        for (i, v) in col.into_iter().enumerate() {
            xdata[i * k + 1 + j] = v;
        }
    }
    let x = Matrix::new(n, k, xdata)?;

    let mediator_share = m.iter().sum::<f64>() / n as f64;
    let instrument_share = z.iter().sum::<f64>() / n as f64;
    let data = Dataset::new(y, d, m, z, x)?;
    Ok(BuiltDataset {
        data,
        mediator_cut,
        instrument_cut,
        mediator_share,
        instrument_share,
        dropped: table.dropped,
    })
}

/// [`build_dataset`] with the default class-size schema.
pub fn build_star_dataset(table: &LoadedTable, p: f64) -> Result<BuiltDataset, IngestError> {
    build_dataset(table, &ColumnSpec::star_default(), p)
}

/// Sample correlation between two equal-length columns; 0 when either is
/// constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let ma = a.iter().take(n).sum::<f64>() / nf;
    let mb = b.iter().take(n).sum::<f64>() / nf;
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let da = a[i] - ma;
        let db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_matches_small_cases() {
        assert_eq!(
            empirical_quantile(&[10.0, 20.0, 30.0, 40.0, 50.0], 0.5).unwrap(),
            30.0
        );
        let centiles: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(empirical_quantile(&centiles, 0.1).unwrap(), 10.0);
    }

    #[test]
    fn quantile_rejects_bad_inputs() {
        assert!(matches!(
            empirical_quantile(&[], 0.5),
            Err(IngestError::EmptyInput)
        ));
        assert!(matches!(
            empirical_quantile(&[1.0], 0.0),
            Err(IngestError::InvalidProbability)
        ));
        assert!(matches!(
            empirical_quantile(&[1.0], 1.0),
            Err(IngestError::InvalidProbability)
        ));
    }

    #[test]
    fn tied_source_saturates_to_degenerate_mediator() {
        // All values equal: the cut equals the common value, the strict
        // indicator is identically zero, and dataset construction refuses it.
        let (ind, cut) = binarize(&[7.0; 5], 0.3).unwrap();
        assert_eq!(cut, 7.0);
        assert!(ind.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn transforms_cover_their_domains() {
        let log = apply_transform("c", &[0.0, 1.0], Transform::Log1p).unwrap();
        assert!((log[1] - core::f64::consts::LN_2).abs() < 1e-15);
        assert!(apply_transform("c", &[-1.0], Transform::Log1p).is_err());
        let std = apply_transform("c", &[2.0, 4.0], Transform::Standardize).unwrap();
        // SD of (2,4) with the n−1 denominator is √2; location is kept.
        assert!((std[0] - 2.0 / core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(apply_transform("c", &[3.0, 3.0], Transform::Standardize).is_err());
    }
}
