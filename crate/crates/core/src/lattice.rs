//! Agree-concept and skyline-concept lattices.
//!
//! Concepts are enumerated from the closed criterion sets, so both lattices
//! share their node order and cover edges. Node `0` is the bottom and the
//! last node is the top (intension = every criterion).

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::json;

use crate::dominance::pi_sky;
use crate::error::{Error, Result};
use crate::galois::{closed_sets, f_map, g_map, h_closure, h_prime};
use crate::model::{CriterionSet, Relation};
use crate::partition::{format_blocks, product_all, sum_all, Block, Partition};

/// A closed criterion set paired with the partition it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreeConcept {
    pub intension: CriterionSet,
    pub extension: Partition,
}

/// A closed criterion set paired with the blocks of its partition whose
/// tuples are skyline points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkylineConcept {
    pub intension: CriterionSet,
    pub sky_blocks: Vec<Block>,
}

pub trait Concept {
    fn intension(&self) -> CriterionSet;
    fn blocks(&self) -> &[Block];
}

impl Concept for AgreeConcept {
    fn intension(&self) -> CriterionSet {
        self.intension
    }
    fn blocks(&self) -> &[Block] {
        self.extension.blocks()
    }
}

impl Concept for SkylineConcept {
    fn intension(&self) -> CriterionSet {
        self.intension
    }
    fn blocks(&self) -> &[Block] {
        &self.sky_blocks
    }
}

impl SkylineConcept {
    /// All ids of the kept blocks, ascending.
    pub fn rows(&self) -> Vec<crate::model::RowId> {
        let mut rows: Vec<_> = self.sky_blocks.iter().flatten().copied().collect();
        rows.sort_unstable();
        rows
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptLattice<C> {
    concepts: Vec<C>,
    /// Cover pairs `(lower, upper)` as indices into `concepts`.
    edges: Vec<(usize, usize)>,
}

impl<C: Concept> ConceptLattice<C> {
    pub(crate) fn from_parts(concepts: Vec<C>) -> Self {
        let intensions: Vec<CriterionSet> = concepts.iter().map(Concept::intension).collect();
        let edges = cover_edges(&intensions);
        ConceptLattice { concepts, edges }
    }

    pub fn concepts(&self) -> &[C] {
        &self.concepts
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Meet of the empty family.
    pub fn top(&self) -> &C {
        self.concepts.last().expect("a lattice has a top")
    }

    /// Join of the empty family.
    pub fn bottom(&self) -> &C {
        &self.concepts[0]
    }

    pub fn index_of(&self, intension: CriterionSet) -> Option<usize> {
        self.concepts
            .binary_search_by(|c| c.intension().canonical_cmp(&intension))
            .ok()
    }

    pub fn get(&self, intension: CriterionSet) -> Option<&C> {
        self.index_of(intension).map(|i| &self.concepts[i])
    }

    /// `{"concepts":[{"intension":"ECV","extension":"1|2|35|4"},…],"edges":[[i,j],…]}`
    pub fn to_json(&self, r: &Relation) -> serde_json::Value {
        let wide = wide_ids(r);
        json!({
            "concepts": self.concepts.iter().map(|c| json!({
                "intension": r.format_set(c.intension()),
                "extension": format_blocks(c.blocks(), wide),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn wide_ids(r: &Relation) -> bool {
    r.len() >= 10
}

/// Transitive reduction of `⊂` over distinct intensions given in canonical
/// order.
fn cover_edges(intensions: &[CriterionSet]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (i, &lo) in intensions.iter().enumerate() {
        for (j, &hi) in intensions.iter().enumerate() {
            if !lo.is_proper_subset(hi) {
                continue;
            }
            let covered = intensions
                .iter()
                .any(|&mid| lo.is_proper_subset(mid) && mid.is_proper_subset(hi));
            if !covered {
                edges.push((i, j));
            }
        }
    }
    edges
}

pub fn build_agree_lattice(r: &Relation) -> ConceptLattice<AgreeConcept> {
    let concepts = closed_sets(r)
        .into_par_iter()
        .map(|c| AgreeConcept {
            intension: c,
            extension: g_map(c, r),
        })
        .collect();
    ConceptLattice::from_parts(concepts)
}

/// Same nodes and edges as the agree lattice, each extension filtered by the
/// partition skyline. The node with the empty intension keeps its whole
/// one-block partition for display; cuboid queries on the empty set still
/// answer with the empty skyline.
pub fn build_skyline_lattice(r: &Relation) -> ConceptLattice<SkylineConcept> {
    skyline_lattice_from(&build_agree_lattice(r), r)
}

pub(crate) fn skyline_lattice_from(
    agree: &ConceptLattice<AgreeConcept>,
    r: &Relation,
) -> ConceptLattice<SkylineConcept> {
    let concepts = agree
        .concepts
        .par_iter()
        .map(|c| SkylineConcept {
            intension: c.intension,
            sky_blocks: if c.intension.is_empty() {
                c.extension.blocks().to_vec()
            } else {
                pi_sky(&c.extension, c.intension, r).expect("extension is g(intension)")
            },
        })
        .collect();
    ConceptLattice {
        concepts,
        edges: agree.edges.clone(),
    }
}

/// Infimum: intersection of intensions, closure `h'` of the sum of
/// extensions.
pub fn concept_meet(family: &[&AgreeConcept], r: &Relation) -> Result<AgreeConcept> {
    if family.is_empty() {
        return Err(Error::contract(
            "meet of an empty family; use ConceptLattice::top",
        ));
    }
    let intension = family
        .iter()
        .fold(r.all_criteria(), |acc, c| acc & c.intension);
    let sum = sum_all(family.iter().map(|c| &c.extension))?.expect("family is non-empty");
    Ok(AgreeConcept {
        intension,
        extension: h_prime(&sum, r)?,
    })
}

/// Supremum: closure `h` of the union of intensions, product of extensions.
pub fn concept_join(family: &[&AgreeConcept], r: &Relation) -> Result<AgreeConcept> {
    if family.is_empty() {
        return Err(Error::contract(
            "join of an empty family; use ConceptLattice::bottom",
        ));
    }
    let union = family
        .iter()
        .fold(CriterionSet::EMPTY, |acc, c| acc | c.intension);
    r.check_set(union)?;
    let extension = product_all(family.iter().map(|c| &c.extension))?.expect("family is non-empty");
    if extension.universe() != r.tid() {
        return Err(Error::contract("concept extensions do not partition Tid(r)"));
    }
    Ok(AgreeConcept {
        intension: h_closure(union, r),
        extension,
    })
}

/// True when `(intension, extension)` is a fixpoint pair of the connection.
pub fn is_agree_concept(c: &AgreeConcept, r: &Relation) -> bool {
    g_map(c.intension, r) == c.extension
        && f_map(&c.extension, r).is_ok_and(|i| i == c.intension)
}

/// Graphviz rendering, bottom to top, one node per concept labelled
/// `(ECV, 1|2|35|4)`.
pub fn export_dot<C: Concept>(lattice: &ConceptLattice<C>, r: &Relation, graph_name: &str) -> String {
    let wide = wide_ids(r);
    let mut out = String::new();
    writeln!(out, "digraph \"{graph_name}\" {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=plaintext];").unwrap();
    for (i, c) in lattice.concepts().iter().enumerate() {
        let intension = if c.intension().is_empty() {
            "∅".to_string()
        } else {
            r.format_set(c.intension())
        };
        let extension = format_blocks(c.blocks(), wide);
        writeln!(out, "  c{i} [label=\"({intension}, {extension})\"];").unwrap();
    }
    for &(lo, hi) in lattice.edges() {
        writeln!(out, "  c{lo} -> c{hi};").unwrap();
    }
    out.push_str("}\n");
    out
}
