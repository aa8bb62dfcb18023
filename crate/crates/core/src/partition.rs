//! Partitions of a set of row identifiers and the partition lattice:
//! refinement order, product (meet) and sum (join).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::RowId;

pub type Block = Vec<RowId>;

/// A family of non-empty, pairwise disjoint blocks. Always kept canonical:
/// ids ascending within a block, blocks ordered by their smallest member, so
/// structural equality is partition equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Block>,
}

impl Partition {
    pub fn new(blocks: Vec<Block>) -> Result<Partition> {
        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(Error::contract("partition blocks must be non-empty"));
            }
            block.sort_unstable();
            for &id in &block {
                if !seen.insert(id) {
                    return Err(Error::contract(format!(
                        "row {id} appears in more than one block"
                    )));
                }
            }
            canonical.push(block);
        }
        canonical.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { blocks: canonical })
    }

    /// One block holding the whole universe (no block when it is empty).
    pub fn single_block(universe: &[RowId]) -> Partition {
        if universe.is_empty() {
            return Partition::default();
        }
        let mut block = universe.to_vec();
        block.sort_unstable();
        block.dedup();
        Partition { blocks: vec![block] }
    }

    /// One singleton block per element.
    pub fn discrete(universe: &[RowId]) -> Partition {
        let mut ids = universe.to_vec();
        ids.sort_unstable();
        ids.dedup();
        Partition {
            blocks: ids.into_iter().map(|id| vec![id]).collect(),
        }
    }

    /// Reads the text form `"1|2|35|4"`. When `wide` is set, ids inside a
    /// block are comma-separated (`"1|2,13|4"`); otherwise each digit is an id.
    pub fn parse(text: &str, wide: bool) -> Result<Partition> {
        Partition::new(parse_blocks(text, wide)?)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn universe(&self) -> Vec<RowId> {
        let mut all: Vec<RowId> = self.blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    pub fn block_of(&self, id: RowId) -> Option<&Block> {
        self.blocks.iter().find(|b| b.binary_search(&id).is_ok())
    }

    /// `self ⊑ other`: every block of `self` lies inside a block of `other`.
    pub fn finer_than(&self, other: &Partition) -> Result<bool> {
        self.check_universe(other)?;
        let owner = other.owner_map();
        Ok(self.blocks.iter().all(|b| {
            let home = owner[&b[0]];
            b.iter().all(|id| owner[id] == home)
        }))
    }

    /// Product `self • other`: all non-empty pairwise block intersections,
    /// the infimum for `⊑`.
    pub fn product(&self, other: &Partition) -> Result<Partition> {
        self.check_universe(other)?;
        let owner = other.owner_map();
        let mut out = Vec::new();
        for block in &self.blocks {
            let mut split: Vec<(usize, Block)> = Vec::new();
            for &id in block {
                let key = owner[&id];
                match split.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, b)) => b.push(id),
                    None => split.push((key, vec![id])),
                }
            }
            out.extend(split.into_iter().map(|(_, b)| b));
        }
        Partition::new(out)
    }

    /// Sum `self + other`, the supremum for `⊑`, computed by iterating
    /// `S_n = max⊆ { R(e, S_{n-1}) | e ∈ E }` from `S_0 = max⊆ (self ∪ other)`
    /// until the family stops changing.
    pub fn sum(&self, other: &Partition) -> Result<Partition> {
        self.check_universe(other)?;
        let universe = self.universe();
        let start = self
            .blocks
            .iter()
            .chain(other.blocks.iter())
            .map(|b| b.iter().copied().collect::<BTreeSet<_>>());
        let mut family = maximal_sets(start);
        loop {
            let next = maximal_sets(universe.iter().map(|&e| r_helper(e, &family)));
            if next == family {
                break;
            }
            family = next;
        }
        Partition::new(
            family
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
        )
    }

    /// Smallest id of each block, ascending.
    pub fn reps(&self) -> Vec<RowId> {
        self.blocks.iter().map(|b| b[0]).collect()
    }

    fn owner_map(&self) -> HashMap<RowId, usize> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.iter().map(move |&id| (id, i)))
            .collect()
    }

    fn check_universe(&self, other: &Partition) -> Result<()> {
        if self.universe() == other.universe() {
            Ok(())
        } else {
            Err(Error::contract("partitions are over different universes"))
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.blocks.iter().flatten().any(|id| id.0 >= 10);
        f.write_str(&format_blocks(&self.blocks, wide))
    }
}

/// `R(e, F)`: the union of the members of `family` that contain `e`.
pub fn r_helper<'a, F>(e: RowId, family: F) -> BTreeSet<RowId>
where
    F: IntoIterator<Item = &'a BTreeSet<RowId>>,
{
    family
        .into_iter()
        .filter(|s| s.contains(&e))
        .flat_map(|s| s.iter().copied())
        .collect()
}

/// Product of every partition in `parts`; `None` when `parts` is empty.
pub fn product_all<'a, I>(parts: I) -> Result<Option<Partition>>
where
    I: IntoIterator<Item = &'a Partition>,
{
    let mut it = parts.into_iter();
    let Some(first) = it.next() else {
        return Ok(None);
    };
    it.try_fold(first.clone(), |acc, p| acc.product(p)).map(Some)
}

/// Sum of every partition in `parts`; `None` when `parts` is empty.
pub fn sum_all<'a, I>(parts: I) -> Result<Option<Partition>>
where
    I: IntoIterator<Item = &'a Partition>,
{
    let mut it = parts.into_iter();
    let Some(first) = it.next() else {
        return Ok(None);
    };
    it.try_fold(first.clone(), |acc, p| acc.sum(p)).map(Some)
}

/// Text form of a family of blocks: blocks joined by `|`. Ids inside a block
/// are concatenated, or comma-separated when `wide`.
pub fn format_blocks(blocks: &[Block], wide: bool) -> String {
    let sep = if wide { "," } else { "" };
    blocks
        .iter()
        .map(|b| {
            b.iter()
                .map(RowId::to_string)
                .collect::<Vec<_>>()
                .join(sep)
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// Inverse of [`format_blocks`]; does not check disjointness.
pub fn parse_blocks(text: &str, wide: bool) -> Result<Vec<Block>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let bad = |part: &str| Error::contract(format!("malformed block `{part}` in `{text}`"));
    text.split('|')
        .map(|part| {
            let part = part.trim();
            let ids: Option<Vec<RowId>> = if wide {
                part.split(',')
                    .map(|s| s.trim().parse::<u32>().ok().filter(|&v| v > 0).map(RowId))
                    .collect()
            } else {
                part.chars()
                    .map(|c| c.to_digit(10).filter(|&v| v > 0).map(RowId))
                    .collect()
            };
            match ids {
                Some(ids) if !ids.is_empty() => Ok(ids),
                _ => Err(bad(part)),
            }
        })
        .collect()
}

fn maximal_sets<I>(sets: I) -> BTreeSet<BTreeSet<RowId>>
where
    I: IntoIterator<Item = BTreeSet<RowId>>,
{
    let distinct: BTreeSet<BTreeSet<RowId>> = sets.into_iter().collect();
    distinct
        .iter()
        .filter(|s| {
            !distinct
                .iter()
                .any(|t| t.len() > s.len() && s.is_subset(t))
        })
        .cloned()
        .collect()
}
