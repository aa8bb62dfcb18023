//! Test-only oracles and generators. Nothing here calls into the library's
//! dominance, partition or closure code paths.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skylattice::{CriterionSet, Partition, Relation, RowId};

pub const CORPUS_SEED: u64 = 0x5eed_c0be;
pub const CORPUS_SIZE: usize = 500;

/// Relation with `n ∈ [2, 64]`, `d ∈ [1, 6]` and integer values in `[0, 7]`,
/// so that agreements are frequent.
pub fn random_relation(rng: &mut ChaCha8Rng, tag: usize) -> Relation {
    let n = rng.gen_range(2..=64);
    let d = rng.gen_range(1..=6);
    random_relation_sized(rng, tag, n, d, 7)
}

pub fn random_relation_sized(rng: &mut ChaCha8Rng, tag: usize, n: usize, d: usize, max: u32) -> Relation {
    let names: Vec<String> = (0..d).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
    let rows = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(0..=max) as f64).collect())
        .collect();
    Relation::from_rows(format!("random-{tag}"), &names, rows).unwrap()
}

pub fn corpus() -> Vec<Relation> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE).map(|i| random_relation(&mut rng, i)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Skyline straight from the definition: `t` survives unless some other
/// tuple is `≤` everywhere on `c` and `<` somewhere.
pub fn brute_skyline(r: &Relation, c: CriterionSet) -> Vec<RowId> {
    if c.is_empty() {
        return Vec::new();
    }
    let idx: Vec<usize> = c.iter().collect();
    let tuples = r.tuples();
    let mut out = Vec::new();
    for t in tuples {
        let mut dominated = false;
        for o in tuples {
            if o.rowid == t.rowid {
                continue;
            }
            let le = idx.iter().all(|&i| o.crits[i] <= t.crits[i]);
            let lt = idx.iter().any(|&i| o.crits[i] < t.crits[i]);
            if le && lt {
                dominated = true;
                break;
            }
        }
        if !dominated {
            out.push(t.rowid);
        }
    }
    out
}

/// Partition of row ids by equal projection, computed by pairwise scan.
pub fn brute_classes(r: &Relation, c: CriterionSet) -> Partition {
    let mut blocks: Vec<Vec<RowId>> = Vec::new();
    for t in r.tuples() {
        match blocks.iter_mut().find(|b| {
            let rep = r.tuple(b[0]).unwrap();
            c.iter().all(|i| rep.crits[i] == t.crits[i])
        }) {
            Some(b) => b.push(t.rowid),
            None => blocks.push(vec![t.rowid]),
        }
    }
    Partition::new(blocks).unwrap()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Join of two partitions as connected components of "shares a block".
pub fn union_find_sum(p: &Partition, q: &Partition) -> Partition {
    let universe = p.universe();
    let pos: BTreeMap<RowId, usize> = universe.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut uf = UnionFind::new(universe.len());
    for b in p.blocks().iter().chain(q.blocks()) {
        for w in b.windows(2) {
            uf.union(pos[&w[0]], pos[&w[1]]);
        }
    }
    let mut comps: BTreeMap<usize, Vec<RowId>> = BTreeMap::new();
    for (i, &id) in universe.iter().enumerate() {
        comps.entry(uf.find(i)).or_default().push(id);
    }
    Partition::new(comps.into_values().collect()).unwrap()
}

/// Refinement by definition: ids sharing a block of `p` share one of `q`.
pub fn brute_finer(p: &Partition, q: &Partition) -> bool {
    p.blocks().iter().all(|b| {
        q.blocks()
            .iter()
            .any(|qb| b.iter().all(|id| qb.contains(id)))
    })
}

/// Every partition of `{1, …, n}` via restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Partition>) {
        if prefix.len() == n {
            let k = prefix.iter().max().map_or(0, |m| m + 1);
            let mut blocks = vec![Vec::new(); k];
            for (i, &b) in prefix.iter().enumerate() {
                blocks[b].push(RowId(i as u32 + 1));
            }
            out.push(Partition::new(blocks).unwrap());
            return;
        }
        let limit = prefix.iter().max().map_or(0, |m| m + 1);
        for b in 0..=limit {
            prefix.push(b);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// A random partition of `Tid(r)`.
pub fn random_partition(rng: &mut ChaCha8Rng, r: &Relation) -> Partition {
    let k = rng.gen_range(1..=r.len().max(1));
    let mut blocks = vec![Vec::new(); k];
    for id in r.tid() {
        blocks[rng.gen_range(0..k)].push(id);
    }
    Partition::new(blocks.into_iter().filter(|b| !b.is_empty()).collect()).unwrap()
}

pub fn ids(v: &[u32]) -> Vec<RowId> {
    v.iter().copied().map(RowId).collect()
}
