//! Display formatting, conversion tables, swarm-chart data and curve files.

use serde::Serialize;

use crate::calibration::ExaminerModel;
use crate::error::{Error, Result};
use crate::numerics::DensityCurve;
use crate::model::{ResponseCategory, TruthLabel};

/// Renders a Bayes factor at 3 significant figures, with values below 1
/// written as `1/x`.
///
/// Ties are rounded half to even. Only values exactly representable in binary
/// can tie, e.g. `1.125 → "1.12"`.
pub fn format_bf(value: f64) -> Result<String> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Domain { what: "Bayes factor", value });
    }
    if value >= 1.0 {
        Ok(three_significant(value))
    } else {
        Ok(format!("1/{}", three_significant(1.0 / value)))
    }
}

fn three_significant(x: f64) -> String {
    // `{:e}` formats the exact binary value; precision rounding is half to even
    let sci = format!("{x:.2e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    match exp {
        e if e >= 2 => format!("{digits}{}", "0".repeat((e - 2) as usize)),
        1 => format!("{}.{}", &digits[..2], &digits[2..]),
        0 => format!("{}.{}", &digits[..1], &digits[1..]),
        e => format!("0.{}{digits}", "0".repeat((-e - 1) as usize)),
    }
}

pub fn log2_bf(value: f64) -> Result<f64> {
    if value.is_nan() || value <= 0.0 {
        return Err(Error::Domain { what: "Bayes factor", value });
    }
    Ok(value.log2())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionRow {
    pub examiner_id: String,
    pub category: ResponseCategory,
    pub bf_raw: f64,
    pub bf_display: String,
    pub log2_bf: f64,
}

/// Lookup table from categorical response to Bayes factor, per examiner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionTable {
    pub condition_label: String,
    pub rows: Vec<ConversionRow>,
}

pub const CONVERSION_HEADER: [&str; 5] = ["examiner_id", "category", "bf_raw", "bf_display", "log2_bf"];

impl ConversionTable {
    /// Rows sorted by examiner id, then ID, IN, EX.
    pub fn from_models(condition_label: &str, models: &[ExaminerModel]) -> Result<Self> {
        let mut sorted: Vec<&ExaminerModel> = models.iter().collect();
        sorted.sort_by(|a, b| a.examiner_id.cmp(&b.examiner_id));
        let mut rows = Vec::with_capacity(3 * sorted.len());
        for m in sorted {
            for (category, raw) in m.bayes_factors.iter() {
                rows.push(ConversionRow {
                    examiner_id: m.examiner_id.clone(),
                    category,
                    bf_raw: raw,
                    bf_display: format_bf(raw)?,
                    log2_bf: log2_bf(raw)?,
                });
            }
        }
        Ok(ConversionTable { condition_label: condition_label.to_owned(), rows })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CONVERSION_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.examiner_id.clone(),
                r.category.code().to_owned(),
                r.bf_raw.to_string(),
                r.bf_display.clone(),
                r.log2_bf.to_string(),
            ])?;
        }
        let bytes = w.into_inner().expect("in-memory writer");
        Ok(String::from_utf8(bytes).expect("utf-8 fields"))
    }
}

/// Per-category `(examiner_id, log2 B)` points for a swarm chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwarmData {
    pub categories: [Vec<(String, f64)>; 3],
}

impl SwarmData {
    pub fn get(&self, cat: ResponseCategory) -> &[(String, f64)] {
        &self.categories[cat.index()]
    }

    /// Long-format CSV: `category,examiner_id,log2_bf`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["category", "examiner_id", "log2_bf"])?;
        for cat in ResponseCategory::ALL {
            for (id, v) in self.get(cat) {
                w.write_record([cat.code(), id.as_str(), v.to_string().as_str()])?;
            }
        }
        let bytes = w.into_inner().expect("in-memory writer");
        Ok(String::from_utf8(bytes).expect("utf-8 fields"))
    }
}

/// Each list is sorted by value, ties broken by examiner id.
pub fn swarm_data(models: &[ExaminerModel]) -> Result<SwarmData> {
    if models.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let mut categories: [Vec<(String, f64)>; 3] = Default::default();
    for cat in ResponseCategory::ALL {
        let list = &mut categories[cat.index()];
        for m in models {
            list.push((m.examiner_id.clone(), log2_bf(m.bayes_factors.get(cat))?));
        }
        list.sort_by(|x, y| x.1.total_cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
    }
    Ok(SwarmData { categories })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveStage {
    Prior,
    Posterior,
}

impl CurveStage {
    pub fn name(self) -> &'static str {
        match self {
            CurveStage::Prior => "prior",
            CurveStage::Posterior => "posterior",
        }
    }
}

/// A density curve as `theta,density` text with a one-line comment header.
pub fn curve_file(
    examiner_id: &str,
    category: ResponseCategory,
    truth: TruthLabel,
    stage: CurveStage,
    curve: &DensityCurve,
) -> String {
    let mut out = format!(
        "# examiner={examiner_id} category={} truth={truth} stage={} a={} b={}\ntheta,density\n",
        category.code(),
        stage.name(),
        curve.hyper.a(),
        curve.hyper.b(),
    );
    for (theta, density) in &curve.points {
        out.push_str(&format!("{theta},{density}\n"));
    }
    out
}
