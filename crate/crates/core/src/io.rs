//! Reading trial records and writing fitted results.
//!
//! Records are delimiter-separated text with the header
//! `examiner_id,pair_id,truth,response`. Truth tokens are `s`/`d` (or
//! `same`/`different`), responses `ID`/`IN`/`EX` (or the full words); both
//! are case-insensitive. Rows and columns in error messages are 1-based and
//! count the header as row 1.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::calibration::ExaminerModel;
use crate::error::{Error, Result};
use crate::model::{expected_theta, BetaHyper, CountTable, PriorMode, ResponseCategory, TruthLabel};
use crate::report::{format_bf, log2_bf};

pub const RECORD_COLUMNS: [&str; 4] = ["examiner_id", "pair_id", "truth", "response"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub examiner_id: String,
    pub pair_id: String,
    pub truth: TruthLabel,
    pub response: ResponseCategory,
}

/// Records gathered under one set of conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    condition_label: String,
    records: Vec<ResponseRecord>,
}

impl Dataset {
    pub fn new(condition_label: impl Into<String>, records: Vec<ResponseRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut seen: HashMap<(&str, &str), u64> = HashMap::new();
        for (i, rec) in records.iter().enumerate() {
            let row = i as u64 + 2;
            if let Some(&first_row) = seen.get(&(rec.examiner_id.as_str(), rec.pair_id.as_str())) {
                return Err(Error::DuplicateRecord {
                    row,
                    first_row,
                    examiner: rec.examiner_id.clone(),
                    pair: rec.pair_id.clone(),
                });
            }
            seen.insert((&rec.examiner_id, &rec.pair_id), row);
        }
        Ok(Dataset { condition_label: condition_label.into(), records })
    }

    pub fn condition_label(&self) -> &str {
        &self.condition_label
    }

    pub fn records(&self) -> &[ResponseRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ResponseRecord> {
        self.records
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordFormat {
    pub delimiter: u8,
}

impl Default for RecordFormat {
    fn default() -> Self {
        RecordFormat { delimiter: b',' }
    }
}

pub fn parse_records<R: Read>(input: R, format: RecordFormat, condition_label: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = reader.records();

    let header = match rows.next() {
        Some(h) => h?,
        None => {
            return Err(Error::MissingColumn { row: 1, column: 1, name: RECORD_COLUMNS[0].into() })
        }
    };
    let mut positions = [0usize; 4];
    for (slot, name) in positions.iter_mut().zip(RECORD_COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn {
                row: 1,
                column: RECORD_COLUMNS.iter().position(|c| *c == name).unwrap() + 1,
                name: name.into(),
            })?;
    }

    let mut records = Vec::new();
    let mut first_seen: HashMap<(String, String), u64> = HashMap::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.iter().all(str::is_empty) {
            continue;
        }
        let field = |k: usize| -> Result<&str> {
            let col = positions[k];
            match row.get(col) {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(Error::MissingColumn { row: line, column: col + 1, name: RECORD_COLUMNS[k].into() }),
            }
        };
        let examiner_id = field(0)?.to_owned();
        let pair_id = field(1)?.to_owned();
        let truth = field(2)?.parse::<TruthLabel>().map_err(|message| Error::Parse {
            row: line,
            column: positions[2] + 1,
            name: RECORD_COLUMNS[2].into(),
            message,
        })?;
        let response = field(3)?.parse::<ResponseCategory>().map_err(|message| Error::Parse {
            row: line,
            column: positions[3] + 1,
            name: RECORD_COLUMNS[3].into(),
            message,
        })?;
        let key = (examiner_id.clone(), pair_id.clone());
        if let Some(&first_row) = first_seen.get(&key) {
            return Err(Error::DuplicateRecord { row: line, first_row, examiner: examiner_id, pair: pair_id });
        }
        first_seen.insert(key, line);
        records.push(ResponseRecord { examiner_id, pair_id, truth, response });
    }
    Dataset::new(condition_label, records)
}

/// Writes records in the input format, in dataset order.
pub fn write_records(records: &[ResponseRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([r.examiner_id.as_str(), r.pair_id.as_str(), r.truth.code(), r.response.code()])?;
    }
    Ok(into_string(w))
}

/// Per-examiner count tables, sorted by examiner id.
pub fn aggregate(ds: &Dataset) -> Vec<(String, CountTable)> {
    let mut tables: BTreeMap<&str, CountTable> = BTreeMap::new();
    for r in ds.records() {
        tables.entry(&r.examiner_id).or_default().record(r.response, r.truth);
    }
    tables.into_iter().map(|(id, t)| (id.to_owned(), t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// JSON document
    Structured,
    /// comma-separated, one row per examiner
    Tabular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub models: Vec<ExportedModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedModel {
    pub examiner_id: String,
    pub prior_mode: PriorMode,
    pub table: CountTable,
    pub cells: Vec<ExportedCell>,
    pub bayes_factors: Vec<ExportedBayesFactor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedCell {
    pub category: ResponseCategory,
    pub truth: TruthLabel,
    pub count: u64,
    pub prior: BetaHyper,
    pub posterior: BetaHyper,
    pub expected_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedBayesFactor {
    pub category: ResponseCategory,
    pub raw: f64,
    pub display: String,
    pub log2: f64,
}

impl ExportedModel {
    pub fn from_model(m: &ExaminerModel) -> Result<Self> {
        let mut cells = Vec::with_capacity(6);
        for t in TruthLabel::ALL {
            for cat in ResponseCategory::ALL {
                let posterior = m.posteriors.get(cat, t);
                cells.push(ExportedCell {
                    category: cat,
                    truth: t,
                    count: m.table.count(cat, t),
                    prior: m.priors.get(cat, t),
                    posterior,
                    expected_theta: expected_theta(posterior),
                });
            }
        }
        let bayes_factors = m
            .bayes_factors
            .iter()
            .map(|(category, raw)| {
                Ok(ExportedBayesFactor { category, raw, display: format_bf(raw)?, log2: log2_bf(raw)? })
            })
            .collect::<Result<_>>()?;
        Ok(ExportedModel {
            examiner_id: m.examiner_id.clone(),
            prior_mode: m.mode(),
            table: m.table,
            cells,
            bayes_factors,
        })
    }
}

fn sorted_by_examiner(models: &[ExaminerModel]) -> Vec<&ExaminerModel> {
    let mut sorted: Vec<&ExaminerModel> = models.iter().collect();
    sorted.sort_by(|a, b| a.examiner_id.cmp(&b.examiner_id));
    sorted
}

pub fn tabular_header() -> Vec<String> {
    let mut cols: Vec<String> =
        ["examiner_id", "prior_mode", "n_same", "n_diff"].iter().map(|s| s.to_string()).collect();
    for t in TruthLabel::ALL {
        for cat in ResponseCategory::ALL {
            let cell = format!("{}_{}", cat.code(), t.code());
            for field in ["count", "prior_a", "prior_b", "post_a", "post_b", "theta"] {
                cols.push(format!("{field}_{cell}"));
            }
        }
    }
    for field in ["bf", "bf_display", "log2_bf"] {
        for cat in ResponseCategory::ALL {
            cols.push(format!("{field}_{}", cat.code()));
        }
    }
    cols
}

/// Serializes fitted models sorted by examiner id. Output depends only on
/// the models, so identical inputs give identical bytes.
pub fn export_results(models: &[ExaminerModel], format: ExportFormat) -> Result<String> {
    let sorted = sorted_by_examiner(models);
    match format {
        ExportFormat::Structured => {
            let doc = ResultsDocument {
                models: sorted.into_iter().map(ExportedModel::from_model).collect::<Result<_>>()?,
            };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            Ok(s)
        }
        ExportFormat::Tabular => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(tabular_header())?;
            for m in sorted {
                let e = ExportedModel::from_model(m)?;
                let mut row = vec![
                    e.examiner_id.clone(),
                    e.prior_mode.to_string(),
                    e.table.n_same().to_string(),
                    e.table.n_diff().to_string(),
                ];
                for c in &e.cells {
                    row.push(c.count.to_string());
                    row.push(c.prior.a().to_string());
                    row.push(c.prior.b().to_string());
                    row.push(c.posterior.a().to_string());
                    row.push(c.posterior.b().to_string());
                    row.push(c.expected_theta.to_string());
                }
                row.extend(e.bayes_factors.iter().map(|b| b.raw.to_string()));
                row.extend(e.bayes_factors.iter().map(|b| b.display.clone()));
                row.extend(e.bayes_factors.iter().map(|b| b.log2.to_string()));
                w.write_record(&row)?;
            }
            Ok(into_string(w))
        }
    }
}

/// Recovers the count tables from a structured results document.
pub fn read_structured_tables(text: &str) -> Result<Vec<(String, CountTable)>> {
    let doc: ResultsDocument = serde_json::from_str(text)?;
    Ok(doc.models.into_iter().map(|m| (m.examiner_id, m.table)).collect())
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("flushing an in-memory writer cannot fail");
    String::from_utf8(bytes).expect("csv output built from UTF-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::fit_uninformative;
    use ResponseCategory::*;
    use TruthLabel::*;

    fn parse(text: &str) -> Result<Dataset> {
        parse_records(text.as_bytes(), RecordFormat::default(), "test")
    }

    #[test]
    fn parses_a_row() {
        let ds = parse("examiner_id,pair_id,truth,response\nE01,P03,s,ID\n").unwrap();
        assert_eq!(
            ds.records(),
            &[ResponseRecord { examiner_id: "E01".into(), pair_id: "P03".into(), truth: SameSource, response: Identification }]
        );
        assert_eq!(ds.condition_label(), "test");
    }

    #[test]
    fn accepts_long_forms_and_case() {
        let ds = parse("examiner_id,pair_id,truth,response\nE01,P1,Same,exclusion\nE01,P2,D,Inconclusive\n").unwrap();
        assert_eq!(ds.records()[0].truth, SameSource);
        assert_eq!(ds.records()[0].response, Exclusion);
        assert_eq!(ds.records()[1].truth, DifferentSource);
        assert_eq!(ds.records()[1].response, Inconclusive);
    }

    #[test]
    fn bad_token_names_row_and_column() {
        let err = parse("examiner_id,pair_id,truth,response\nE01,P01,s,ID\nE01,P03,maybe,ID\n").unwrap_err();
        match err {
            Error::Parse { row, column, ref name, .. } => {
                assert_eq!((row, column, name.as_str()), (3, 3, "truth"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(err.to_string().contains("row 3, column 3"));
    }

    #[test]
    fn duplicate_record_rejected() {
        let err = parse("examiner_id,pair_id,truth,response\nE01,P03,s,ID\nE01,P03,s,IN\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateRecord { row: 3, first_row: 2, .. }));
    }

    #[test]
    fn missing_columns() {
        let err = parse("examiner_id,pair_id,response\nE01,P03,ID\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn { row: 1, column: 3, .. }));
        let err = parse("examiner_id,pair_id,truth,response\nE01,P03,s\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn { row: 2, column: 4, .. }));
        assert!(matches!(parse("examiner_id,pair_id,truth,response\n"), Err(Error::EmptyDataset)));
    }

    #[test]
    fn honours_header_order_and_delimiter() {
        let text = "response;truth;pair_id;examiner_id\nEX;d;P1;A\n";
        let ds = parse_records(text.as_bytes(), RecordFormat { delimiter: b';' }, "x").unwrap();
        assert_eq!(ds.records()[0].examiner_id, "A");
        assert_eq!(ds.records()[0].response, Exclusion);
    }

    #[test]
    fn aggregate_singleton_and_interleaved() {
        let ds = parse("examiner_id,pair_id,truth,response\nE01,P1,s,ID\n").unwrap();
        let tables = aggregate(&ds);
        assert_eq!(tables, vec![("E01".to_string(), CountTable::new([1, 0, 0], [0, 0, 0]))]);

        let ds = parse("examiner_id,pair_id,truth,response\nB,P1,s,ID\nA,P1,d,EX\nB,P2,d,IN\nA,P2,s,IN\n").unwrap();
        let tables = aggregate(&ds);
        assert_eq!(tables[0], ("A".to_string(), CountTable::new([0, 1, 0], [0, 0, 1])));
        assert_eq!(tables[1], ("B".to_string(), CountTable::new([1, 0, 0], [0, 1, 0])));
    }

    #[test]
    fn tabular_export_shapes() {
        let empty = export_results(&[], ExportFormat::Tabular).unwrap();
        assert_eq!(empty.lines().count(), 1);
        assert!(empty.starts_with("examiner_id,prior_mode,n_same,n_diff,"));

        let m = fit_uninformative("E01", &CountTable::new([5, 1, 1], [0, 1, 4])).unwrap();
        let out = export_results(&[m], ExportFormat::Tabular).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        let header: Vec<&str> = lines[0].split(',').collect();
        let row: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(header.len(), row.len());
        assert_eq!(header.iter().filter(|h| h.starts_with("bf_") && !h.starts_with("bf_display")).count(), 3);
        for display in ["9.57", "1/1.25", "1/3.91"] {
            assert!(row.contains(&display), "missing {display} in {row:?}");
        }
    }

    #[test]
    fn structured_export_sorted_and_readable() {
        let b = fit_uninformative("B", &CountTable::new([1, 1, 1], [0, 1, 1])).unwrap();
        let a = fit_uninformative("A", &CountTable::new([5, 1, 1], [0, 1, 4])).unwrap();
        let out = export_results(&[b.clone(), a.clone()], ExportFormat::Structured).unwrap();
        let tables = read_structured_tables(&out).unwrap();
        assert_eq!(tables, vec![("A".into(), a.table), ("B".into(), b.table)]);
        let empty = export_results(&[], ExportFormat::Structured).unwrap();
        assert_eq!(empty, "{\n  \"models\": []\n}\n");
    }
}
