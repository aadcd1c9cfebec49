//! Per-examiner model fitting, leave-one-out informative priors and
//! incremental updating.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::ResponseRecord;
use crate::model::{
    bayes_factor_set, posterior_set, posterior_update, uninformative_priors, BayesFactorSet,
    BetaHyper, Cells, CountTable, PosteriorSet, PriorMode, PriorSet, TruthLabel,
};

/// A fitted model for one examiner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExaminerModel {
    pub examiner_id: String,
    pub table: CountTable,
    pub priors: PriorSet,
    pub posteriors: PosteriorSet,
    pub bayes_factors: BayesFactorSet,
}

impl ExaminerModel {
    pub fn mode(&self) -> PriorMode {
        self.priors.mode()
    }
}

pub fn fit_examiner(examiner_id: &str, table: &CountTable, priors: &PriorSet) -> Result<ExaminerModel> {
    let posteriors = posterior_set(table, priors)?;
    Ok(ExaminerModel {
        examiner_id: examiner_id.to_owned(),
        table: *table,
        priors: *priors,
        bayes_factors: bayes_factor_set(&posteriors),
        posteriors,
    })
}

/// Fit with uninformative priors built from the examiner's own trial totals.
pub fn fit_uninformative(examiner_id: &str, table: &CountTable) -> Result<ExaminerModel> {
    let priors = uninformative_priors(table.n_same(), table.n_diff())?;
    fit_examiner(examiner_id, table, &priors)
}

/// Examiners whose results are pooled to build informative priors. Which
/// examiners belong together is the caller's decision.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDataset {
    condition_label: String,
    tables: Vec<(String, CountTable)>,
}

impl GroupDataset {
    pub fn new(condition_label: impl Into<String>, tables: Vec<(String, CountTable)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (id, _) in &tables {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateExaminer(id.clone()));
            }
        }
        Ok(GroupDataset { condition_label: condition_label.into(), tables })
    }

    pub fn condition_label(&self) -> &str {
        &self.condition_label
    }

    pub fn tables(&self) -> &[(String, CountTable)] {
        &self.tables
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

/// Component-wise mean of `a` and of `b`, optionally weighted.
pub fn mean_hypers(hypers: &[BetaHyper], weights: Option<&[f64]>) -> Result<BetaHyper> {
    if hypers.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if let Some(ws) = weights {
        if ws.len() != hypers.len() {
            return Err(Error::WeightCount { expected: hypers.len(), found: ws.len() });
        }
        if let Some(&w) = ws.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeight(w));
        }
    }
    // Accumulate deviations from the first member, so identical members
    // average to exactly that member.
    let origin = hypers[0];
    let (mut dev_a, mut dev_b, mut sum_w) = (0.0, 0.0, 0.0);
    for (i, h) in hypers.iter().enumerate() {
        let w = weights.map_or(1.0, |ws| ws[i]);
        dev_a += w * (h.a() - origin.a());
        dev_b += w * (h.b() - origin.b());
        sum_w += w;
    }
    BetaHyper::new(origin.a() + dev_a / sum_w, origin.b() + dev_b / sum_w)
}

/// Informative priors for `held_out`, built only from the other members.
///
/// Every other member is fitted with uninformative priors from their own
/// totals; each prior cell is then the mean of the members' posterior cells.
/// When the members' totals `n_t` differ, the mean is weighted by each
/// member's posterior pseudo-count `m*_t`.
pub fn loo_informative_priors(group: &GroupDataset, held_out: &str) -> Result<PriorSet> {
    if group.len() < 2 {
        return Err(Error::GroupTooSmall(group.len()));
    }
    if !group.tables.iter().any(|(id, _)| id == held_out) {
        return Err(Error::UnknownExaminer(held_out.to_owned()));
    }
    let others: Vec<(&CountTable, PosteriorSet)> = group
        .tables
        .iter()
        .filter(|(id, _)| id != held_out)
        .map(|(_, table)| {
            let priors = uninformative_priors(table.n_same(), table.n_diff())?;
            Ok((table, posterior_set(table, &priors)?))
        })
        .collect::<Result<_>>()?;

    let hypers = Cells::try_from_fn(|cat, t| {
        let cells: Vec<BetaHyper> = others.iter().map(|(_, post)| post.get(cat, t)).collect();
        let first_total = others[0].0.total(t);
        if others.iter().all(|(table, _)| table.total(t) == first_total) {
            mean_hypers(&cells, None)
        } else {
            let weights: Vec<f64> = cells.iter().map(BetaHyper::mass).collect();
            mean_hypers(&cells, Some(&weights))
        }
    })?;
    Ok(PriorSet::informative(hypers))
}

/// Fits every member with informative priors that exclude that member.
///
/// Folds are independent, so they run on scoped threads; results keep the
/// group's member order.
pub fn loo_group_fit(group: &GroupDataset) -> Result<Vec<ExaminerModel>> {
    if group.len() < 2 {
        return Err(Error::GroupTooSmall(group.len()));
    }
    let fit_one = |(id, table): &(String, CountTable)| {
        let priors = loo_informative_priors(group, id)?;
        fit_examiner(id, table, &priors)
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(group.len());
    if workers <= 1 {
        return group.tables.iter().map(fit_one).collect();
    }
    let chunk = group.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = group
            .tables
            .chunks(chunk)
            .map(|members| scope.spawn(move || members.iter().map(fit_one).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("leave-one-out worker panicked"))
            .collect()
    })
}

/// Folds new responses into a fitted model, keeping its original priors.
///
/// The posterior is updated in place of a refit; by conjugacy the result
/// matches a one-shot fit of the merged table.
pub fn sequential_update(model: &ExaminerModel, new_records: &[ResponseRecord]) -> Result<ExaminerModel> {
    let mut delta = CountTable::default();
    for rec in new_records {
        if rec.examiner_id != model.examiner_id {
            return Err(Error::ExaminerMismatch {
                expected: model.examiner_id.clone(),
                found: rec.examiner_id.clone(),
            });
        }
        delta.record(rec.response, rec.truth);
    }
    let posteriors = PosteriorSet::from_cells(Cells::try_from_fn(|cat, t: TruthLabel| {
        posterior_update(model.posteriors.get(cat, t), delta.count(cat, t), delta.total(t))
    })?);
    Ok(ExaminerModel {
        examiner_id: model.examiner_id.clone(),
        table: model.table.merged(&delta),
        priors: model.priors,
        bayes_factors: bayes_factor_set(&posteriors),
        posteriors,
    })
}
