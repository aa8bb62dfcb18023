//! Agree sets and the Galois connection between criterion sets and
//! partitions of the row identifiers.
//!
//! `g` maps a criterion set to the partition of its equivalence classes and
//! `f` maps a partition to the criteria on which every block agrees. Their
//! composites are the closure operators `h = f ∘ g` on criterion sets and
//! `h' = g ∘ f` on partitions.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CriterionSet, Relation, RowId, Tuple};
use crate::partition::Partition;

/// Distinct agree sets of all tuple pairs of a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreeSetFamily {
    pub sets: BTreeSet<CriterionSet>,
    pub source: String,
}

impl AgreeSetFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, set: CriterionSet) -> bool {
        self.sets.contains(&set)
    }

    /// Closure of `c` as the intersection of every agree set containing it;
    /// `all` when none does.
    pub fn closure(&self, c: CriterionSet, all: CriterionSet) -> CriterionSet {
        self.sets
            .iter()
            .filter(|s| c.is_subset(**s))
            .fold(all, |acc, s| acc & *s)
    }

    /// Sorted list of canonical strings, shortest first then alphabetical:
    /// `["", "C", "E", "P", "V", "PV", "ECV"]`.
    pub fn to_json(&self, r: &Relation) -> serde_json::Value {
        let mut names: Vec<String> = self.sets.iter().map(|s| r.format_set(*s)).collect();
        names.sort_by(|a, b| a.chars().count().cmp(&b.chars().count()).then_with(|| a.cmp(b)));
        serde_json::Value::from(names)
    }
}

/// Criteria on which two distinct tuples carry equal values.
pub fn acc_pair(t: &Tuple, t2: &Tuple) -> Result<CriterionSet> {
    if t.rowid == t2.rowid {
        return Err(Error::contract(format!(
            "agree set of row {} with itself",
            t.rowid
        )));
    }
    Ok(agree(t, t2))
}

fn agree(t: &Tuple, t2: &Tuple) -> CriterionSet {
    CriterionSet::from_indices(
        t.crits
            .iter()
            .zip(&t2.crits)
            .enumerate()
            .filter(|(_, (a, b))| a == b)
            .map(|(i, _)| i),
    )
}

/// Criteria shared by every tuple of `tuples`. A single tuple agrees with
/// itself everywhere, so it yields all of its criteria.
pub fn acc_set(tuples: &[&Tuple]) -> Result<CriterionSet> {
    let Some((first, rest)) = tuples.split_first() else {
        return Err(Error::contract("agree set of an empty tuple set"));
    };
    let all = CriterionSet::full(first.crits.len());
    Ok(rest.iter().fold(all, |acc, t| acc & agree(first, t)))
}

/// Agree sets of every unordered pair. Empty for fewer than two tuples.
pub fn agree_sets(r: &Relation) -> AgreeSetFamily {
    let tuples = r.tuples();
    let sets = (0..tuples.len())
        .into_par_iter()
        .map(|i| {
            tuples[i + 1..]
                .iter()
                .map(|t2| agree(&tuples[i], t2))
                .collect::<BTreeSet<_>>()
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    AgreeSetFamily {
        sets,
        source: r.name().to_string(),
    }
}

/// `[t]_C`: ids of the tuples sharing `t`'s projection on `c`.
pub fn equiv_class(t: &Tuple, c: CriterionSet, r: &Relation) -> Result<Vec<RowId>> {
    if !r.contains(t) {
        return Err(Error::contract(format!(
            "row {} is not a tuple of `{}`",
            t.rowid,
            r.name()
        )));
    }
    r.check_set(c)?;
    Ok(r.tuples()
        .iter()
        .filter(|o| o.agrees_on(t, c))
        .map(|o| o.rowid)
        .collect())
}

/// `g(C) = π_C`, the partition of `Tid(r)` into classes agreeing on `c`.
pub fn g_map(c: CriterionSet, r: &Relation) -> Partition {
    let mut classes: HashMap<Vec<u64>, Vec<RowId>> = HashMap::new();
    for t in r.tuples() {
        classes.entry(t.projection_key(c)).or_default().push(t.rowid);
    }
    Partition::new(classes.into_values().collect()).expect("classes are disjoint")
}

/// `f(π)`: intersection over the blocks of the criteria each block agrees on.
/// Singleton blocks contribute every criterion.
pub fn f_map(pi: &Partition, r: &Relation) -> Result<CriterionSet> {
    check_partition(pi, r)?;
    let all = r.all_criteria();
    Ok(pi.blocks().iter().fold(all, |acc, block| {
        let first = r.tuple_unchecked(block[0]);
        block[1..]
            .iter()
            .fold(acc, |acc, &id| acc & agree(first, r.tuple_unchecked(id)))
    }))
}

/// `h(C) = f(g(C))`, the largest superset of `c` inducing the same partition.
pub fn h_closure(c: CriterionSet, r: &Relation) -> CriterionSet {
    f_map(&g_map(c, r), r).expect("g produces a partition of Tid(r)")
}

/// `h'(π) = g(f(π))`.
pub fn h_prime(pi: &Partition, r: &Relation) -> Result<Partition> {
    Ok(g_map(f_map(pi, r)?, r))
}

/// Every fixpoint of `h`, by cardinality then canonical order. Always ends
/// with the full criterion set.
pub fn closed_sets(r: &Relation) -> Vec<CriterionSet> {
    let family = agree_sets(r);
    let all = r.all_criteria();
    let mut closed: Vec<CriterionSet> = CriterionSet::all_subsets(r.dimensionality())
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&c| family.closure(c, all) == c)
        .collect();
    closed.sort_by(CriterionSet::canonical_cmp);
    closed
}

fn check_partition(pi: &Partition, r: &Relation) -> Result<()> {
    if pi.universe() == r.tid() {
        Ok(())
    } else {
        Err(Error::contract(format!(
            "partition `{pi}` does not cover the row ids of `{}`",
            r.name()
        )))
    }
}
