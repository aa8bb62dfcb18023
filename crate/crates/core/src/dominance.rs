//! Dominance tests and the skyline operators.

use std::cmp::Ordering;

use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{CriterionSet, Relation, RowId, Tuple};
use crate::partition::{Block, Partition};

/// Rows of one skyline, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkylineResult {
    pub criteria: CriterionSet,
    pub rows: Vec<RowId>,
}

impl SkylineResult {
    pub fn empty(criteria: CriterionSet) -> Self {
        SkylineResult {
            criteria,
            rows: Vec::new(),
        }
    }

    /// `{"criteria":"EC","rows":[4]}`
    pub fn to_json(&self, r: &Relation) -> serde_json::Value {
        json!({
            "criteria": r.format_set(self.criteria),
            "rows": self.rows.iter().map(|id| id.0).collect::<Vec<_>>(),
        })
    }
}

/// Kernel used by [`skyline_with`]. Both produce identical results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SkylineAlgorithm {
    /// Every tuple against every other.
    #[default]
    Pairwise,
    /// Presort by a monotone key (sum of values, then lexicographic), then
    /// compare each tuple only against the skyline found so far.
    SortFilter,
}

fn require_criteria(c: CriterionSet) -> Result<()> {
    if c.is_empty() {
        Err(Error::contract("dominance needs a non-empty criterion set"))
    } else {
        Ok(())
    }
}

/// Weak dominance: `t` is no worse than `t2` on every criterion of `c`.
pub fn dominates(t: &Tuple, t2: &Tuple, c: CriterionSet) -> Result<bool> {
    require_criteria(c)?;
    Ok(weakly(t, t2, c))
}

/// Strict dominance: weak dominance plus a strictly better value somewhere.
pub fn strictly_dominates(t: &Tuple, t2: &Tuple, c: CriterionSet) -> Result<bool> {
    require_criteria(c)?;
    Ok(strictly(t, t2, c))
}

/// Dominance when no two tuples in play share their projection on `c`: weak
/// and strict dominance coincide, so only `≤` is tested.
///
/// The non-agreement condition is the caller's contract; debug builds check
/// it for the pair at hand.
pub fn dominates_under_cna(t: &Tuple, t2: &Tuple, c: CriterionSet) -> bool {
    debug_assert!(t.rowid != t2.rowid, "dominance under CNA compares distinct tuples");
    debug_assert!(
        c.is_empty() || !t.agrees_on(t2, c),
        "rows {} and {} agree on the criteria; CNA does not hold",
        t.rowid,
        t2.rowid
    );
    weakly(t, t2, c)
}

fn weakly(t: &Tuple, t2: &Tuple, c: CriterionSet) -> bool {
    c.iter().all(|i| t.crits[i] <= t2.crits[i])
}

fn strictly(t: &Tuple, t2: &Tuple, c: CriterionSet) -> bool {
    let mut better = false;
    for i in c.iter() {
        let (a, b) = (t.crits[i], t2.crits[i]);
        if a > b {
            return false;
        }
        better |= a < b;
    }
    better
}

/// Tuples of `r` not strictly dominated on `c` by any other tuple of `r`.
/// The empty criterion set yields the empty skyline.
pub fn skyline(r: &Relation, c: CriterionSet) -> SkylineResult {
    skyline_with(r, c, SkylineAlgorithm::Pairwise)
}

pub fn skyline_with(r: &Relation, c: CriterionSet, algorithm: SkylineAlgorithm) -> SkylineResult {
    let all: Vec<&Tuple> = r.tuples().iter().collect();
    skyline_within(&all, c, algorithm)
}

/// Skyline of an arbitrary tuple subset, dominance decided inside the subset.
pub fn skyline_within(tuples: &[&Tuple], c: CriterionSet, algorithm: SkylineAlgorithm) -> SkylineResult {
    if c.is_empty() {
        return SkylineResult::empty(c);
    }
    let mut rows = match algorithm {
        SkylineAlgorithm::Pairwise => tuples
            .iter()
            .filter(|t| !tuples.iter().any(|o| strictly(o, t, c)))
            .map(|t| t.rowid)
            .collect::<Vec<_>>(),
        SkylineAlgorithm::SortFilter => sort_filter(tuples, c),
    };
    rows.sort_unstable();
    SkylineResult { criteria: c, rows }
}

fn sort_filter(tuples: &[&Tuple], c: CriterionSet) -> Vec<RowId> {
    // A dominator always sorts strictly before what it dominates: its sum is
    // no larger (rounding is monotone) and on equal sums its projection is
    // lexicographically smaller.
    let mut keyed: Vec<(f64, Vec<f64>, &Tuple)> = tuples
        .iter()
        .map(|t| {
            let proj = t.project(c);
            (proj.iter().sum(), proj, *t)
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| cmp_lex(&a.1, &b.1))
            .then_with(|| a.2.rowid.cmp(&b.2.rowid))
    });
    let mut window: Vec<&Tuple> = Vec::new();
    for (_, _, t) in keyed {
        if !window.iter().any(|w| strictly(w, t, c)) {
            window.push(t);
        }
    }
    window.into_iter().map(|t| t.rowid).collect()
}

fn cmp_lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Blocks of `pi` whose tuples belong to the skyline on `c`.
///
/// `pi` must partition `Tid(r)` into classes of tuples agreeing on `c` (the
/// partition induced by `c` or by its closure). One representative per block,
/// the smallest id, is tested against the representatives of all other
/// blocks. The empty criterion set keeps no block.
pub fn pi_sky(pi: &Partition, c: CriterionSet, r: &Relation) -> Result<Vec<Block>> {
    r.check_set(c)?;
    if pi.universe() != r.tid() {
        return Err(Error::contract(format!(
            "partition `{pi}` does not cover the row ids of `{}`",
            r.name()
        )));
    }
    for block in pi.blocks() {
        let rep = r.tuple_unchecked(block[0]);
        if let Some(id) = block[1..]
            .iter()
            .find(|&&id| !r.tuple_unchecked(id).agrees_on(rep, c))
        {
            return Err(Error::contract(format!(
                "rows {} and {id} share a block but differ on the criteria",
                block[0]
            )));
        }
    }
    if c.is_empty() {
        return Ok(Vec::new());
    }
    let reps: Vec<&Tuple> = pi.reps().into_iter().map(|id| r.tuple_unchecked(id)).collect();
    Ok(pi
        .blocks()
        .iter()
        .zip(&reps)
        .filter(|(_, rep)| !reps.iter().any(|o| strictly(o, rep, c)))
        .map(|(b, _)| b.clone())
        .collect())
}

/// Non-agreement condition: no two distinct tuples share their projection on
/// `c`.
pub fn is_cna<'a, I>(tuples: I, c: CriterionSet) -> Result<bool>
where
    I: IntoIterator<Item = &'a Tuple>,
{
    require_criteria(c)?;
    let mut seen = std::collections::HashSet::new();
    Ok(tuples.into_iter().all(|t| seen.insert(t.projection_key(c))))
}
