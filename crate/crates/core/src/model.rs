//! Beta-binomial model of an examiner's categorical responses.
//!
//! Each response category is modelled independently: for truth label `t`,
//! the probability that the examiner gives response `RS` is `θ(RS|t)` with a
//! `Beta(a_t, b_t)` prior. Observing `c(RS|t)` such responses out of `n_t`
//! trials gives the conjugate posterior `Beta(c + a_t, n_t − c + b_t)`, and
//! the Bayes factor for `RS` is the ratio of posterior expected values under
//! same-source and different-source truth.
//!
//! Because the categories are modelled separately, the three expected values
//! for one truth label need not sum to one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResponseCategory {
    #[serde(rename = "ID")]
    Identification,
    #[serde(rename = "IN")]
    Inconclusive,
    #[serde(rename = "EX")]
    Exclusion,
}

impl ResponseCategory {
    pub const ALL: [ResponseCategory; 3] = [
        ResponseCategory::Identification,
        ResponseCategory::Inconclusive,
        ResponseCategory::Exclusion,
    ];

    pub fn index(self) -> usize {
        match self {
            ResponseCategory::Identification => 0,
            ResponseCategory::Inconclusive => 1,
            ResponseCategory::Exclusion => 2,
        }
    }

    /// Short code used in files: `ID`, `IN` or `EX`.
    pub fn code(self) -> &'static str {
        match self {
            ResponseCategory::Identification => "ID",
            ResponseCategory::Inconclusive => "IN",
            ResponseCategory::Exclusion => "EX",
        }
    }
}

impl fmt::Display for ResponseCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ResponseCategory {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "id" | "identification" => Ok(ResponseCategory::Identification),
            "in" | "inconclusive" => Ok(ResponseCategory::Inconclusive),
            "ex" | "exclusion" => Ok(ResponseCategory::Exclusion),
            _ => Err(format!("unknown response {s:?}, expected ID, IN or EX")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruthLabel {
    SameSource,
    DifferentSource,
}

impl TruthLabel {
    pub const ALL: [TruthLabel; 2] = [TruthLabel::SameSource, TruthLabel::DifferentSource];

    pub fn index(self) -> usize {
        match self {
            TruthLabel::SameSource => 0,
            TruthLabel::DifferentSource => 1,
        }
    }

    /// Short code used in record files: `s` or `d`.
    pub fn code(self) -> &'static str {
        match self {
            TruthLabel::SameSource => "s",
            TruthLabel::DifferentSource => "d",
        }
    }

    pub fn other(self) -> TruthLabel {
        match self {
            TruthLabel::SameSource => TruthLabel::DifferentSource,
            TruthLabel::DifferentSource => TruthLabel::SameSource,
        }
    }
}

impl fmt::Display for TruthLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthLabel::SameSource => "same-source",
            TruthLabel::DifferentSource => "different-source",
        })
    }
}

impl FromStr for TruthLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" | "same" => Ok(TruthLabel::SameSource),
            "d" | "different" => Ok(TruthLabel::DifferentSource),
            _ => Err(format!("unknown truth label {s:?}, expected s or d")),
        }
    }
}

/// One value per (truth label, response category) cell, rows ordered
/// same-source then different-source, columns ordered ID, IN, EX.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Cells<T> {
    pub same_source: [T; 3],
    pub different_source: [T; 3],
}

impl<T> Cells<T> {
    pub fn from_fn(mut f: impl FnMut(ResponseCategory, TruthLabel) -> T) -> Self {
        Cells {
            same_source: ResponseCategory::ALL.map(|cat| f(cat, TruthLabel::SameSource)),
            different_source: ResponseCategory::ALL.map(|cat| f(cat, TruthLabel::DifferentSource)),
        }
    }

    pub fn try_from_fn<E>(
        mut f: impl FnMut(ResponseCategory, TruthLabel) -> std::result::Result<T, E>,
    ) -> std::result::Result<Self, E>
    where
        T: Copy + Default,
    {
        let mut out = Cells::<T>::default();
        for t in TruthLabel::ALL {
            for cat in ResponseCategory::ALL {
                *out.get_mut(cat, t) = f(cat, t)?;
            }
        }
        Ok(out)
    }

    pub fn row(&self, t: TruthLabel) -> &[T; 3] {
        match t {
            TruthLabel::SameSource => &self.same_source,
            TruthLabel::DifferentSource => &self.different_source,
        }
    }

    pub fn get(&self, cat: ResponseCategory, t: TruthLabel) -> &T {
        &self.row(t)[cat.index()]
    }

    pub fn get_mut(&mut self, cat: ResponseCategory, t: TruthLabel) -> &mut T {
        let row = match t {
            TruthLabel::SameSource => &mut self.same_source,
            TruthLabel::DifferentSource => &mut self.different_source,
        };
        &mut row[cat.index()]
    }

    /// Exchanges the same-source and different-source rows.
    pub fn swapped(self) -> Self {
        Cells { same_source: self.different_source, different_source: self.same_source }
    }
}

/// Per-examiner 2×3 table of response counts.
///
/// Row totals are always derived from the cells, so `Σ c(RS|t) = n_t` holds
/// by construction. Deserialization checks stated totals against the cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "CountTableRepr", into = "CountTableRepr")]
pub struct CountTable {
    counts: Cells<u64>,
}

#[derive(Serialize, Deserialize)]
struct CountTableRepr {
    n_same: u64,
    n_diff: u64,
    same_source: [u64; 3],
    different_source: [u64; 3],
}

impl TryFrom<CountTableRepr> for CountTable {
    type Error = Error;

    fn try_from(r: CountTableRepr) -> Result<Self> {
        CountTable::with_totals(r.same_source, r.different_source, r.n_same, r.n_diff)
    }
}

impl From<CountTable> for CountTableRepr {
    fn from(t: CountTable) -> Self {
        CountTableRepr {
            n_same: t.n_same(),
            n_diff: t.n_diff(),
            same_source: t.counts.same_source,
            different_source: t.counts.different_source,
        }
    }
}

impl CountTable {
    /// Builds a table from `[ID, IN, EX]` counts for each truth label.
    pub fn new(same_source: [u64; 3], different_source: [u64; 3]) -> Self {
        CountTable { counts: Cells { same_source, different_source } }
    }

    /// Like [`CountTable::new`], but checks the cells against stated totals.
    pub fn with_totals(
        same_source: [u64; 3],
        different_source: [u64; 3],
        n_same: u64,
        n_diff: u64,
    ) -> Result<Self> {
        let table = CountTable::new(same_source, different_source);
        for (t, total) in [(TruthLabel::SameSource, n_same), (TruthLabel::DifferentSource, n_diff)] {
            let sum = table.total(t);
            if sum != total {
                return Err(Error::TotalMismatch { truth: t, sum, total });
            }
        }
        Ok(table)
    }

    pub fn count(&self, cat: ResponseCategory, t: TruthLabel) -> u64 {
        *self.counts.get(cat, t)
    }

    /// `c(¬RS|t) = n_t − c(RS|t)`.
    pub fn complement(&self, cat: ResponseCategory, t: TruthLabel) -> u64 {
        self.total(t) - self.count(cat, t)
    }

    pub fn total(&self, t: TruthLabel) -> u64 {
        self.counts.row(t).iter().sum()
    }

    pub fn n_same(&self) -> u64 {
        self.total(TruthLabel::SameSource)
    }

    pub fn n_diff(&self) -> u64 {
        self.total(TruthLabel::DifferentSource)
    }

    pub fn cells(&self) -> &Cells<u64> {
        &self.counts
    }

    pub fn record(&mut self, cat: ResponseCategory, t: TruthLabel) {
        *self.counts.get_mut(cat, t) += 1;
    }

    pub fn merged(&self, other: &CountTable) -> CountTable {
        CountTable {
            counts: Cells::from_fn(|cat, t| self.count(cat, t) + other.count(cat, t)),
        }
    }

    /// Exchanges the same-source and different-source rows.
    pub fn swapped(&self) -> CountTable {
        CountTable { counts: self.counts.swapped() }
    }
}

/// Shape parameters of a beta distribution, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BetaHyperRepr")]
pub struct BetaHyper {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct BetaHyperRepr {
    a: f64,
    b: f64,
}

impl TryFrom<BetaHyperRepr> for BetaHyper {
    type Error = Error;

    fn try_from(r: BetaHyperRepr) -> Result<Self> {
        BetaHyper::new(r.a, r.b)
    }
}

impl Default for BetaHyper {
    fn default() -> Self {
        BetaHyper { a: 1.0, b: 1.0 }
    }
}

impl BetaHyper {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 {
            Ok(BetaHyper { a, b })
        } else {
            Err(Error::InvalidHyper { a, b })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Pseudo-count `m = a + b`.
    pub fn mass(&self) -> f64 {
        self.a + self.b
    }

    pub fn mean(&self) -> f64 {
        expected_theta(*self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorMode {
    Uninformative,
    Informative,
}

impl fmt::Display for PriorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriorMode::Uninformative => "uninformative",
            PriorMode::Informative => "informative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSet {
    mode: PriorMode,
    hypers: Cells<BetaHyper>,
}

impl PriorSet {
    /// Checks that uninformative sets share one prior per truth label.
    pub fn new(hypers: Cells<BetaHyper>, mode: PriorMode) -> Result<Self> {
        if mode == PriorMode::Uninformative {
            for t in TruthLabel::ALL {
                let row = hypers.row(t);
                for cat in &ResponseCategory::ALL[1..] {
                    if row[cat.index()] != row[0] {
                        return Err(Error::NonUniformPrior {
                            truth: t,
                            first: ResponseCategory::Identification,
                            other: *cat,
                        });
                    }
                }
            }
        }
        Ok(PriorSet { mode, hypers })
    }

    pub fn informative(hypers: Cells<BetaHyper>) -> Self {
        PriorSet { mode: PriorMode::Informative, hypers }
    }

    pub fn mode(&self) -> PriorMode {
        self.mode
    }

    pub fn get(&self, cat: ResponseCategory, t: TruthLabel) -> BetaHyper {
        *self.hypers.get(cat, t)
    }

    pub fn cells(&self) -> &Cells<BetaHyper> {
        &self.hypers
    }

    pub fn swapped(&self) -> PriorSet {
        PriorSet { mode: self.mode, hypers: self.hypers.swapped() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSet {
    hypers: Cells<BetaHyper>,
}

impl PosteriorSet {
    pub fn from_cells(hypers: Cells<BetaHyper>) -> Self {
        PosteriorSet { hypers }
    }

    pub fn get(&self, cat: ResponseCategory, t: TruthLabel) -> BetaHyper {
        *self.hypers.get(cat, t)
    }

    /// `m*_t = a*_t + b*_t` for one cell.
    pub fn m_star(&self, cat: ResponseCategory, t: TruthLabel) -> f64 {
        self.get(cat, t).mass()
    }

    pub fn expected_theta(&self, cat: ResponseCategory, t: TruthLabel) -> f64 {
        expected_theta(self.get(cat, t))
    }

    pub fn cells(&self) -> &Cells<BetaHyper> {
        &self.hypers
    }
}

/// A ratio of sample proportions, which may be degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ExtendedRatio {
    Finite(f64),
    /// positive / 0
    PositiveInfinite,
    /// 0 / positive
    Zero,
    /// 0 / 0
    Undefined,
}

impl ExtendedRatio {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedRatio::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for ExtendedRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRatio::Finite(v) => write!(f, "{v}"),
            ExtendedRatio::PositiveInfinite => f.write_str("+inf"),
            ExtendedRatio::Zero => f.write_str("0"),
            ExtendedRatio::Undefined => f.write_str("undefined"),
        }
    }
}

/// Bayes factors `B_RS` for the three response categories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesFactorSet {
    values: [f64; 3],
}

impl BayesFactorSet {
    pub fn get(&self, cat: ResponseCategory) -> f64 {
        self.values[cat.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ResponseCategory, f64)> + '_ {
        ResponseCategory::ALL.into_iter().map(|cat| (cat, self.get(cat)))
    }
}

/// `c(RS|t) / n_t`.
pub fn sample_proportion(table: &CountTable, cat: ResponseCategory, t: TruthLabel) -> Result<f64> {
    let n = table.total(t);
    if n == 0 {
        return Err(Error::EmptySample(t));
    }
    Ok(table.count(cat, t) as f64 / n as f64)
}

/// Ratio of same-source to different-source sample proportions.
///
/// Zero counts give the degenerate kinds rather than IEEE infinities or NaN.
pub fn likelihood_ratio(table: &CountTable, cat: ResponseCategory) -> Result<ExtendedRatio> {
    let num = sample_proportion(table, cat, TruthLabel::SameSource)?;
    let den = sample_proportion(table, cat, TruthLabel::DifferentSource)?;
    Ok(match (num > 0.0, den > 0.0) {
        (true, true) => ExtendedRatio::Finite(num / den),
        (true, false) => ExtendedRatio::PositiveInfinite,
        (false, true) => ExtendedRatio::Zero,
        (false, false) => ExtendedRatio::Undefined,
    })
}

/// Weighted Jeffreys priors: `a_t = b_t = n_t / (n_s + n_d)` in every cell.
///
/// With `n_s = n_d` this is `Beta(0.5, 0.5)` throughout.
pub fn uninformative_priors(n_same: u64, n_diff: u64) -> Result<PriorSet> {
    if n_same == 0 || n_diff == 0 {
        return Err(Error::ZeroTotals { n_same, n_diff });
    }
    let total = (n_same + n_diff) as f64;
    let w_same = n_same as f64 / total;
    let w_diff = n_diff as f64 / total;
    let same = BetaHyper::new(w_same, w_same)?;
    let diff = BetaHyper::new(w_diff, w_diff)?;
    Ok(PriorSet {
        mode: PriorMode::Uninformative,
        hypers: Cells { same_source: [same; 3], different_source: [diff; 3] },
    })
}

/// Conjugate update: `(a, b) → (c + a, (n − c) + b)`.
pub fn posterior_update(prior: BetaHyper, count: u64, total: u64) -> Result<BetaHyper> {
    if count > total {
        return Err(Error::InconsistentCount { count, total });
    }
    BetaHyper::new(count as f64 + prior.a, (total - count) as f64 + prior.b)
}

pub fn posterior_set(table: &CountTable, priors: &PriorSet) -> Result<PosteriorSet> {
    if table.n_same() == 0 && table.n_diff() == 0 {
        return Err(Error::ZeroTotals { n_same: 0, n_diff: 0 });
    }
    let hypers = Cells::try_from_fn(|cat, t| {
        posterior_update(priors.get(cat, t), table.count(cat, t), table.total(t))
    })?;
    Ok(PosteriorSet { hypers })
}

/// Mean of a beta distribution, `a / (a + b)`.
pub fn expected_theta(hyper: BetaHyper) -> f64 {
    hyper.a / (hyper.a + hyper.b)
}

pub fn bayes_factor(post: &PosteriorSet, cat: ResponseCategory) -> f64 {
    post.expected_theta(cat, TruthLabel::SameSource)
        / post.expected_theta(cat, TruthLabel::DifferentSource)
}

pub fn bayes_factor_set(post: &PosteriorSet) -> BayesFactorSet {
    BayesFactorSet { values: ResponseCategory::ALL.map(|cat| bayes_factor(post, cat)) }
}

/// Largest Bayes factor a perfect examiner can reach; its reciprocal is the
/// smallest.
///
/// The informative figure assumes every group member responded perfectly.
pub fn max_attainable_bf(n_same: u64, n_diff: u64, mode: PriorMode) -> f64 {
    let n = (n_same + n_diff) as f64;
    match mode {
        PriorMode::Uninformative => n + 1.0,
        PriorMode::Informative => 2.0 * n + 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ResponseCategory::*;
    use TruthLabel::*;

    fn table2() -> CountTable {
        CountTable::new([5, 1, 1], [0, 1, 4])
    }

    fn hyper(a: f64, b: f64) -> BetaHyper {
        BetaHyper::new(a, b).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn parse_tokens() {
        assert_eq!("id".parse::<ResponseCategory>().unwrap(), Identification);
        assert_eq!("Inconclusive".parse::<ResponseCategory>().unwrap(), Inconclusive);
        assert_eq!("EX".parse::<ResponseCategory>().unwrap(), Exclusion);
        assert!("maybe".parse::<ResponseCategory>().is_err());
        assert_eq!("S".parse::<TruthLabel>().unwrap(), SameSource);
        assert_eq!("different".parse::<TruthLabel>().unwrap(), DifferentSource);
        assert!("x".parse::<TruthLabel>().is_err());
    }

    #[test]
    fn sample_proportions() {
        let t = table2();
        assert!(close(sample_proportion(&t, Identification, SameSource).unwrap(), 5.0 / 7.0, 1e-15));
        assert_eq!(sample_proportion(&t, Identification, DifferentSource).unwrap(), 0.0);
        let full = CountTable::new([3, 0, 0], [0, 0, 2]);
        assert_eq!(sample_proportion(&full, Identification, SameSource).unwrap(), 1.0);
        let empty_diff = CountTable::new([3, 0, 0], [0, 0, 0]);
        assert!(matches!(
            sample_proportion(&empty_diff, Exclusion, DifferentSource),
            Err(Error::EmptySample(DifferentSource))
        ));
    }

    #[test]
    fn likelihood_ratio_kinds() {
        let t = table2();
        let inc = likelihood_ratio(&t, Inconclusive).unwrap().finite().unwrap();
        assert!(close(inc, 5.0 / 7.0, 1e-15));
        assert_eq!(likelihood_ratio(&t, Identification).unwrap(), ExtendedRatio::PositiveInfinite);
        let t = CountTable::new([0, 3, 4], [2, 3, 0]);
        assert_eq!(likelihood_ratio(&t, Identification).unwrap(), ExtendedRatio::Zero);
        let t = CountTable::new([3, 4, 0], [2, 3, 0]);
        assert_eq!(likelihood_ratio(&t, Exclusion).unwrap(), ExtendedRatio::Undefined);
    }

    #[test]
    fn uninformative_prior_values() {
        let p = uninformative_priors(7, 5).unwrap();
        assert_eq!(p.mode(), PriorMode::Uninformative);
        for cat in ResponseCategory::ALL {
            assert_eq!(p.get(cat, SameSource), hyper(7.0 / 12.0, 7.0 / 12.0));
            assert_eq!(p.get(cat, DifferentSource), hyper(5.0 / 12.0, 5.0 / 12.0));
        }
        let p = uninformative_priors(6, 6).unwrap();
        assert_eq!(p.get(Inconclusive, DifferentSource), hyper(0.5, 0.5));
        let p = uninformative_priors(1, 1).unwrap();
        assert_eq!(p.get(Exclusion, SameSource), hyper(0.5, 0.5));
        assert!(matches!(uninformative_priors(0, 5), Err(Error::ZeroTotals { .. })));
    }

    #[test]
    fn prior_set_rejects_non_uniform_uninformative_rows() {
        let mut cells = *uninformative_priors(7, 5).unwrap().cells();
        cells.same_source[2] = hyper(1.0, 2.0);
        assert!(PriorSet::new(cells, PriorMode::Uninformative).is_err());
        assert!(PriorSet::new(cells, PriorMode::Informative).is_ok());
    }

    #[test]
    fn posterior_update_examples() {
        let p = posterior_update(hyper(7.0 / 12.0, 7.0 / 12.0), 5, 7).unwrap();
        assert!(close(p.a(), 5.0 + 7.0 / 12.0, 1e-12));
        assert!(close(p.b(), 2.0 + 7.0 / 12.0, 1e-12));
        let p = posterior_update(hyper(5.0 / 12.0, 5.0 / 12.0), 0, 5).unwrap();
        assert!(close(p.a(), 0.41667, 1e-5));
        assert!(close(p.b(), 5.41667, 1e-5));
        let prior = hyper(0.3, 2.7);
        assert_eq!(posterior_update(prior, 0, 0).unwrap(), prior);
        assert!(matches!(posterior_update(prior, 4, 3), Err(Error::InconsistentCount { count: 4, total: 3 })));
    }

    #[test]
    fn posterior_set_worked_example() {
        let post = posterior_set(&table2(), &uninformative_priors(7, 5).unwrap()).unwrap();
        let s = post.get(Identification, SameSource);
        let d = post.get(Identification, DifferentSource);
        assert!(close(s.a(), 5.583, 5e-4) && close(s.b(), 2.583, 5e-4));
        assert!(close(d.a(), 0.417, 5e-4) && close(d.b(), 5.417, 5e-4));
        // m*_t = n_t + m_t for every cell sharing a truth label
        for cat in ResponseCategory::ALL {
            assert!(close(post.m_star(cat, SameSource), 7.0 + 14.0 / 12.0, 1e-12));
            assert!(close(post.m_star(cat, DifferentSource), 5.0 + 10.0 / 12.0, 1e-12));
        }

        let mut cells = *uninformative_priors(7, 5).unwrap().cells();
        cells.same_source[0] = hyper(4.93, 3.24);
        cells.different_source[0] = hyper(0.591, 5.24);
        let post = posterior_set(&table2(), &PriorSet::informative(cells)).unwrap();
        let s = post.get(Identification, SameSource);
        let d = post.get(Identification, DifferentSource);
        assert!(close(s.a(), 9.93, 1e-12) && close(s.b(), 5.24, 1e-12));
        assert!(close(d.a(), 0.591, 1e-12) && close(d.b(), 10.24, 1e-12));

        let empty = CountTable::default();
        assert!(posterior_set(&empty, &uninformative_priors(7, 5).unwrap()).is_err());
    }

    #[test]
    fn expected_theta_examples() {
        assert!(close(expected_theta(hyper(5.0 + 7.0 / 12.0, 2.0 + 7.0 / 12.0)), 0.68367, 1e-5));
        assert!(close(expected_theta(hyper(5.0 / 12.0, 5.0 + 5.0 / 12.0)), 0.07143, 1e-5));
        for x in [0.01, 0.5, 3.0, 1e6] {
            assert_eq!(expected_theta(hyper(x, x)), 0.5);
        }
    }

    #[test]
    fn bayes_factor_worked_example() {
        let post = posterior_set(&table2(), &uninformative_priors(7, 5).unwrap()).unwrap();
        let bf = bayes_factor_set(&post);
        assert!(close(bf.get(Identification), 9.5714, 5e-4));
        // (1.583/8.167) / (1.417/5.833)
        let inc = ((1.0 + 7.0 / 12.0) / (7.0 + 7.0 / 6.0)) / ((1.0 + 5.0 / 12.0) / (5.0 + 5.0 / 6.0));
        assert!(close(bf.get(Inconclusive), inc, 1e-12));
        assert!(close(1.0 / bf.get(Inconclusive), 1.2525, 5e-4));
        assert!(close(1.0 / bf.get(Exclusion), 3.91, 5e-3));
    }

    #[test]
    fn symmetric_table_gives_unit_factors() {
        let t = CountTable::new([2, 3, 1], [2, 3, 1]);
        let post = posterior_set(&t, &uninformative_priors(6, 6).unwrap()).unwrap();
        for (_, b) in bayes_factor_set(&post).iter() {
            assert!(close(b, 1.0, 1e-15));
        }
    }

    #[test]
    fn perfect_table_hits_bounds() {
        let t = CountTable::new([7, 0, 0], [0, 0, 5]);
        let post = posterior_set(&t, &uninformative_priors(7, 5).unwrap()).unwrap();
        let bf = bayes_factor_set(&post);
        assert!(close(bf.get(Identification), 13.0, 1e-9));
        assert!(close(bf.get(Exclusion), 1.0 / 13.0, 1e-9));
    }

    #[test]
    fn attainable_bounds() {
        assert_eq!(max_attainable_bf(7, 5, PriorMode::Uninformative), 13.0);
        assert_eq!(max_attainable_bf(7, 5, PriorMode::Informative), 25.0);
        assert_eq!(max_attainable_bf(1, 1, PriorMode::Uninformative), 3.0);
    }

    #[test]
    fn count_table_totals_checked_on_deserialize() {
        let json = r#"{"n_same":7,"n_diff":5,"same_source":[5,1,1],"different_source":[0,1,4]}"#;
        let t: CountTable = serde_json::from_str(json).unwrap();
        assert_eq!(t, table2());
        assert_eq!(t.complement(Identification, SameSource), 2);
        let bad = r#"{"n_same":8,"n_diff":5,"same_source":[5,1,1],"different_source":[0,1,4]}"#;
        assert!(serde_json::from_str::<CountTable>(bad).is_err());
    }

    #[test]
    fn beta_hyper_rejects_non_positive() {
        assert!(BetaHyper::new(0.0, 1.0).is_err());
        assert!(BetaHyper::new(1.0, -2.0).is_err());
        assert!(BetaHyper::new(f64::NAN, 1.0).is_err());
        assert!(BetaHyper::new(f64::INFINITY, 1.0).is_err());
        assert!(serde_json::from_str::<BetaHyper>(r#"{"a":0,"b":1}"#).is_err());
        assert_eq!(hyper(2.0, 3.0).mass(), 5.0);
    }
}
