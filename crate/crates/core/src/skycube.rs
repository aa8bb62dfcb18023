//! Full Skycube materialization, and partial materialization through the
//! skyline-concept lattice.
//!
//! A partial Skycube stores one cuboid per closed criterion set. Any other
//! cuboid `C` is rebuilt from the stored cuboid of its closure `h(C)`: the
//! closure induces the same partition as `C`, its skyline contains the one
//! on `C`, and representatives of distinct blocks never agree on `C`, so a
//! plain `≤` scan over one representative per stored block is enough.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::dominance::{dominates_under_cna, skyline, SkylineResult};
use crate::error::{Error, Result};
use crate::galois::{agree_sets, AgreeSetFamily};
use crate::lattice::{build_skyline_lattice, wide_ids, ConceptLattice, SkylineConcept};
use crate::model::{CriterionSet, Relation, RowId, Tuple};
use crate::partition::parse_blocks;

fn fingerprint(r: &Relation) -> u64 {
    let mut h = DefaultHasher::new();
    r.name().hash(&mut h);
    for c in r.criteria() {
        c.name.hash(&mut h);
    }
    for t in r.tuples() {
        t.rowid.hash(&mut h);
        for v in &t.crits {
            v.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

/// Skyline of every non-empty criterion subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skycube {
    relation: u64,
    dimensionality: usize,
    cuboids: BTreeMap<CriterionSet, SkylineResult>,
}

impl Skycube {
    pub fn get(&self, c: CriterionSet) -> Option<&SkylineResult> {
        self.cuboids.get(&c)
    }

    pub fn len(&self) -> usize {
        self.cuboids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuboids.is_empty()
    }

    /// Cuboids by cardinality, then canonical order.
    pub fn cuboids(&self) -> Vec<&SkylineResult> {
        let mut all: Vec<&SkylineResult> = self.cuboids.values().collect();
        all.sort_by(|a, b| a.criteria.canonical_cmp(&b.criteria));
        all
    }

    /// Total number of row ids over all cuboids.
    pub fn stored_rows(&self) -> usize {
        self.cuboids.values().map(|s| s.rows.len()).sum()
    }

    /// `{"criteria":[…],"cuboids":{"P":[2,5],…}}`
    pub fn to_json(&self, r: &Relation) -> serde_json::Value {
        let cuboids: serde_json::Map<String, serde_json::Value> = self
            .cuboids()
            .into_iter()
            .map(|s| {
                (
                    r.format_set(s.criteria),
                    json!(s.rows.iter().map(|id| id.0).collect::<Vec<_>>()),
                )
            })
            .collect();
        json!({
            "criteria": r.criteria().iter().map(|c| c.name.as_str()).collect::<Vec<_>>(),
            "cuboids": cuboids,
        })
    }
}

pub fn build_skycube(r: &Relation) -> Result<Skycube> {
    let d = r.dimensionality();
    if d == 0 {
        return Err(Error::contract("a Skycube needs at least one criterion"));
    }
    let cuboids = CriterionSet::all_subsets(d)
        .skip(1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|c| (c, skyline(r, c)))
        .collect();
    Ok(Skycube {
        relation: fingerprint(r),
        dimensionality: d,
        cuboids,
    })
}

/// What one reconstruction touched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReconstructionCost {
    pub closure: CriterionSet,
    /// Served verbatim from a stored concept.
    pub stored: bool,
    pub representatives: usize,
    pub comparisons: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialSkycube {
    relation: Relation,
    agree_sets: AgreeSetFamily,
    lattice: ConceptLattice<SkylineConcept>,
}

pub fn materialize_partial(r: &Relation) -> PartialSkycube {
    PartialSkycube {
        relation: r.clone(),
        agree_sets: agree_sets(r),
        lattice: build_skyline_lattice(r),
    }
}

impl PartialSkycube {
    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn lattice(&self) -> &ConceptLattice<SkylineConcept> {
        &self.lattice
    }

    pub fn agree_sets(&self) -> &AgreeSetFamily {
        &self.agree_sets
    }

    /// `h(C)`, as the intersection of the agree sets containing `C`.
    pub fn closure(&self, c: CriterionSet) -> CriterionSet {
        self.agree_sets.closure(c, self.relation.all_criteria())
    }

    /// Stored concepts that answer a cuboid query (the empty intension is
    /// kept only to complete the lattice).
    pub fn stored_cuboids(&self) -> usize {
        self.lattice
            .concepts()
            .iter()
            .filter(|c| !c.intension.is_empty())
            .count()
    }

    pub fn stored_rows(&self) -> usize {
        self.lattice
            .concepts()
            .iter()
            .filter(|c| !c.intension.is_empty())
            .map(|c| c.sky_blocks.iter().map(Vec::len).sum::<usize>())
            .sum()
    }

    pub fn reconstruct_cuboid(&self, c: CriterionSet) -> Result<SkylineResult> {
        self.reconstruct_counted(c).map(|(res, _)| res)
    }

    pub fn reconstruct_counted(&self, c: CriterionSet) -> Result<(SkylineResult, ReconstructionCost)> {
        let r = &self.relation;
        r.check_set(c)?;
        let closure = self.closure(c);
        let mut cost = ReconstructionCost {
            closure,
            stored: closure == c,
            representatives: 0,
            comparisons: 0,
        };
        if c.is_empty() {
            return Ok((SkylineResult::empty(c), cost));
        }
        let concept = self
            .lattice
            .get(closure)
            .ok_or_else(|| Error::contract("closure has no stored concept"))?;
        if cost.stored {
            return Ok((SkylineResult { criteria: c, rows: concept.rows() }, cost));
        }

        let reps: Vec<&Tuple> = concept
            .sky_blocks
            .iter()
            .map(|b| r.tuple_unchecked(b[0]))
            .collect();
        cost.representatives = reps.len();
        let mut rows: Vec<RowId> = Vec::new();
        for (block, rep) in concept.sky_blocks.iter().zip(&reps) {
            let mut dominated = false;
            for other in &reps {
                if other.rowid == rep.rowid {
                    continue;
                }
                cost.comparisons += 1;
                if dominates_under_cna(other, rep, c) {
                    dominated = true;
                    break;
                }
            }
            if !dominated {
                rows.extend_from_slice(block);
            }
        }
        rows.sort_unstable();
        Ok((SkylineResult { criteria: c, rows }, cost))
    }

    /// `{"relation":{…},"concepts":[…],"edges":[…]}`
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.lattice.to_json(&self.relation);
        let obj = v.as_object_mut().expect("lattice json is an object");
        let mut out = serde_json::Map::new();
        out.insert(
            "relation".into(),
            serde_json::to_value(&self.relation).expect("relation serializes"),
        );
        out.extend(std::mem::take(obj));
        serde_json::Value::Object(out)
    }

    /// Reloads a store written by [`PartialSkycube::to_json`], checking that
    /// its concepts are exactly the closed sets of the embedded relation.
    pub fn from_json(value: &serde_json::Value) -> Result<PartialSkycube> {
        let relation: Relation = serde_json::from_value(value["relation"].clone())?;
        let concepts = value["concepts"]
            .as_array()
            .ok_or_else(|| Error::Schema("store has no concept list".into()))?;
        let wide = wide_ids(&relation);
        let mut parsed = Vec::with_capacity(concepts.len());
        for c in concepts {
            let field = |k: &str| {
                c[k].as_str()
                    .ok_or_else(|| Error::Schema(format!("concept without `{k}`")))
            };
            parsed.push(SkylineConcept {
                intension: relation.parse_set(field("intension")?)?,
                sky_blocks: parse_blocks(field("extension")?, wide)?,
            });
        }
        let fresh = materialize_partial(&relation);
        if parsed.as_slice() != fresh.lattice.concepts() {
            return Err(Error::Schema(
                "stored concepts do not match the embedded relation".into(),
            ));
        }
        let edges: Vec<(usize, usize)> = serde_json::from_value(value["edges"].clone())?;
        if edges.as_slice() != fresh.lattice.edges() {
            return Err(Error::Schema("stored cover edges are inconsistent".into()));
        }
        Ok(fresh)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuboidMismatch {
    pub criteria: CriterionSet,
    pub expected: Vec<RowId>,
    pub actual: Vec<RowId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub checked: usize,
    pub mismatches: Vec<CuboidMismatch>,
}

impl EquivalenceReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} cuboids equal",
            self.checked - self.mismatches.len(),
            self.checked
        )
    }
}

/// Rebuilds every non-empty cuboid from the partial store and compares it
/// with the fully materialized one.
pub fn verify_equivalence(p: &PartialSkycube, full: &Skycube) -> Result<EquivalenceReport> {
    if fingerprint(&p.relation) != full.relation {
        return Err(Error::contract(
            "partial and full Skycubes come from different relations",
        ));
    }
    let subsets: Vec<CriterionSet> = p.relation.subsets().into_iter().skip(1).collect();
    let mismatches: Vec<CuboidMismatch> = subsets
        .par_iter()
        .map(|&c| -> Result<Option<CuboidMismatch>> {
            let actual = p.reconstruct_cuboid(c)?.rows;
            let expected = full.get(c).map(|s| s.rows.clone()).unwrap_or_default();
            Ok((actual != expected).then_some(CuboidMismatch {
                criteria: c,
                expected,
                actual,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(EquivalenceReport {
        checked: subsets.len(),
        mismatches,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    /// Concepts of the skyline lattice, empty intension included.
    pub concepts: usize,
    /// Concepts answering a cuboid query.
    pub stored_cuboids: usize,
    /// `2^d − 1`.
    pub cuboids: usize,
    pub stored_rows_partial: usize,
    pub stored_rows_full: usize,
    pub rows: usize,
    /// Queries answered from a stored concept versus rebuilt.
    pub direct_queries: usize,
    pub rebuilt_queries: usize,
    pub max_representatives: usize,
    pub reconstruction_comparisons: usize,
    /// Dominance tests the plain pairwise scan spends on the same queries.
    pub baseline_comparisons: usize,
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "concepts={} cuboids={}", self.concepts, self.cuboids)?;
        writeln!(f, "stored_cuboids={}", self.stored_cuboids)?;
        writeln!(
            f,
            "stored_rows partial={} full={}",
            self.stored_rows_partial, self.stored_rows_full
        )?;
        writeln!(
            f,
            "queries stored={} rebuilt={}",
            self.direct_queries, self.rebuilt_queries
        )?;
        writeln!(
            f,
            "representatives max={} rows={}",
            self.max_representatives, self.rows
        )?;
        write!(
            f,
            "comparisons reconstruction={} baseline={}",
            self.reconstruction_comparisons, self.baseline_comparisons
        )
    }
}

pub fn stats(p: &PartialSkycube, full: &Skycube) -> Result<StatsReport> {
    if fingerprint(&p.relation) != full.relation {
        return Err(Error::contract(
            "partial and full Skycubes come from different relations",
        ));
    }
    let r = &p.relation;
    let mut report = StatsReport {
        concepts: p.lattice.len(),
        stored_cuboids: p.stored_cuboids(),
        cuboids: (1usize << full.dimensionality) - 1,
        stored_rows_partial: p.stored_rows(),
        stored_rows_full: full.stored_rows(),
        rows: r.len(),
        direct_queries: 0,
        rebuilt_queries: 0,
        max_representatives: 0,
        reconstruction_comparisons: 0,
        baseline_comparisons: 0,
    };
    for c in r.subsets().into_iter().skip(1) {
        let (_, cost) = p.reconstruct_counted(c)?;
        if cost.stored {
            report.direct_queries += 1;
        } else {
            report.rebuilt_queries += 1;
            report.max_representatives = report.max_representatives.max(cost.representatives);
            report.reconstruction_comparisons += cost.comparisons;
            report.baseline_comparisons += pairwise_comparisons(r, c);
        }
    }
    Ok(report)
}

// Dominance tests made by the pairwise scan, stopping at the first dominator.
fn pairwise_comparisons(r: &Relation, c: CriterionSet) -> usize {
    let tuples = r.tuples();
    let mut count = 0;
    for t in tuples {
        for o in tuples {
            if o.rowid == t.rowid {
                continue;
            }
            count += 1;
            let strictly = c.iter().all(|i| o.crits[i] <= t.crits[i])
                && c.iter().any(|i| o.crits[i] < t.crits[i]);
            if strictly {
                break;
            }
        }
    }
    count
}
