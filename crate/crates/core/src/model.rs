//! Relations, criteria and tuples.
//!
//! Every criterion is minimized internally. Columns declared as maximized are
//! negated once at ingest and negated back when a relation is written out, so
//! the rest of the crate only ever deals with "smaller is better".

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::ops::{BitAnd, BitOr};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of declared criteria, so that a
/// [`CriterionSet`] fits in one machine word.
pub const MAX_CRITERIA: usize = 63;

/// A subset of the declared criteria, stored as a bit mask over criterion
/// indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CriterionSet(u64);

impl CriterionSet {
    pub const EMPTY: CriterionSet = CriterionSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        CriterionSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All `d` criteria.
    pub fn full(d: usize) -> Self {
        assert!(d <= MAX_CRITERIA, "at most {MAX_CRITERIA} criteria");
        CriterionSet((1u64 << d) - 1)
    }

    pub fn singleton(index: usize) -> Self {
        assert!(index < MAX_CRITERIA, "criterion index {index} out of range");
        CriterionSet(1u64 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(Self::EMPTY, |acc, i| acc | Self::singleton(i))
    }

    pub fn with(self, index: usize) -> Self {
        self | Self::singleton(index)
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: CriterionSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: CriterionSet) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn union(self, other: CriterionSet) -> Self {
        CriterionSet(self.0 | other.0)
    }

    pub fn intersection(self, other: CriterionSet) -> Self {
        CriterionSet(self.0 & other.0)
    }

    pub fn difference(self, other: CriterionSet) -> Self {
        CriterionSet(self.0 & !other.0)
    }

    /// Complement relative to the `d` declared criteria.
    pub fn complement(self, d: usize) -> Self {
        Self::full(d).difference(self)
    }

    /// Member indices, ascending.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Every subset of the `d` declared criteria, including the empty set.
    pub fn all_subsets(d: usize) -> impl Iterator<Item = CriterionSet> {
        let full = Self::full(d).0;
        (0..=full).map(CriterionSet)
    }

    /// Order used for every listing in this crate: by cardinality, then by
    /// the ascending list of member indices.
    pub fn canonical_cmp(&self, other: &CriterionSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl BitOr for CriterionSet {
    type Output = CriterionSet;
    fn bitor(self, rhs: CriterionSet) -> CriterionSet {
        self.union(rhs)
    }
}

impl BitAnd for CriterionSet {
    type Output = CriterionSet;
    fn bitand(self, rhs: CriterionSet) -> CriterionSet {
        self.intersection(rhs)
    }
}

impl fmt::Debug for CriterionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Position and label of a declared criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionId {
    pub index: usize,
    pub name: String,
}

/// Tuple identifier, assigned 1..n in ingestion order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RowId(pub u32);

impl RowId {
    pub(crate) fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tuple {
    pub rowid: RowId,
    /// Non-criterion columns, carried as text and never compared.
    pub dims: Vec<String>,
    /// Criterion values in declaration order, already oriented for
    /// minimization.
    pub crits: Vec<f64>,
}

impl Tuple {
    pub fn value(&self, criterion: usize) -> f64 {
        self.crits[criterion]
    }

    /// Values at the members of `set`, ascending criterion index.
    pub fn project(&self, set: CriterionSet) -> Vec<f64> {
        set.iter().map(|i| self.crits[i]).collect()
    }

    /// True when both tuples carry identical values on every member of `set`.
    pub fn agrees_on(&self, other: &Tuple, set: CriterionSet) -> bool {
        set.iter().all(|i| self.crits[i] == other.crits[i])
    }

    /// Hashable form of [`Tuple::project`]. Signed zeros are normalized at
    /// ingest, so bit equality coincides with numeric equality here.
    pub(crate) fn projection_key(&self, set: CriterionSet) -> Vec<u64> {
        set.iter().map(|i| self.crits[i].to_bits()).collect()
    }
}

/// Free-function form of [`Tuple::project`].
pub fn project(t: &Tuple, set: CriterionSet) -> Vec<f64> {
    t.project(set)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
enum Column {
    Dim(usize),
    Criterion(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RelationRepr", into = "RelationRepr")]
pub struct Relation {
    name: String,
    criteria: Vec<CriterionId>,
    maximized: Vec<bool>,
    dim_names: Vec<String>,
    layout: Vec<Column>,
    tuples: Vec<Tuple>,
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    name: String,
    criteria: Vec<CriterionId>,
    maximized: Vec<bool>,
    dim_names: Vec<String>,
    layout: Vec<Column>,
    tuples: Vec<Tuple>,
}

impl From<Relation> for RelationRepr {
    fn from(r: Relation) -> Self {
        RelationRepr {
            name: r.name,
            criteria: r.criteria,
            maximized: r.maximized,
            dim_names: r.dim_names,
            layout: r.layout,
            tuples: r.tuples,
        }
    }
}

impl TryFrom<RelationRepr> for Relation {
    type Error = Error;

    fn try_from(r: RelationRepr) -> Result<Self> {
        let relation = Relation {
            name: r.name,
            criteria: r.criteria,
            maximized: r.maximized,
            dim_names: r.dim_names,
            layout: r.layout,
            tuples: r.tuples,
        };
        relation.validate()?;
        Ok(relation)
    }
}

impl Relation {
    /// Builds a relation with criterion columns only, all minimized.
    pub fn from_rows<S: AsRef<str>>(
        name: impl Into<String>,
        criteria: &[S],
        rows: Vec<Vec<f64>>,
    ) -> Result<Relation> {
        let names: Vec<String> = criteria.iter().map(|s| s.as_ref().to_string()).collect();
        let criteria = declare_criteria(&names)?;
        let d = criteria.len();
        let mut tuples = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::Schema(format!(
                    "row {} has {} criterion values, expected {d}",
                    i + 1,
                    row.len()
                )));
            }
            let mut crits = Vec::with_capacity(d);
            for (j, v) in row.into_iter().enumerate() {
                crits.push(check_finite(v, i + 1, &names[j])?);
            }
            tuples.push(Tuple {
                rowid: RowId(i as u32 + 1),
                dims: Vec::new(),
                crits,
            });
        }
        Ok(Relation {
            name: name.into(),
            maximized: vec![false; d],
            layout: (0..d).map(Column::Criterion).collect(),
            criteria,
            dim_names: Vec::new(),
            tuples,
        })
    }

    /// Reads a CSV document with a header row. `criteria` fixes the
    /// declaration order; columns in `maximize` are negated at ingest.
    pub fn read_csv<R: Read, S: AsRef<str>>(
        name: impl Into<String>,
        reader: R,
        criteria: &[S],
        maximize: &[S],
    ) -> Result<Relation> {
        let names: Vec<String> = criteria.iter().map(|s| s.as_ref().to_string()).collect();
        let declared = declare_criteria(&names)?;
        let mut maximized = vec![false; names.len()];
        for m in maximize {
            let m = m.as_ref();
            match names.iter().position(|n| n == m) {
                Some(i) => maximized[i] = true,
                None => {
                    return Err(Error::Schema(format!(
                        "maximized column `{m}` is not a declared criterion"
                    )))
                }
            }
        }

        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut seen = HashSet::new();
        for h in &header {
            if !seen.insert(h.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{h}`")));
            }
        }

        let mut crit_col = vec![usize::MAX; names.len()];
        for (i, n) in names.iter().enumerate() {
            crit_col[i] = header
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| Error::Schema(format!("missing column `{n}`")))?;
        }
        let mut layout = Vec::with_capacity(header.len());
        let mut dim_names = Vec::new();
        for (col, h) in header.iter().enumerate() {
            match crit_col.iter().position(|&c| c == col) {
                Some(ci) => layout.push(Column::Criterion(ci)),
                None => {
                    layout.push(Column::Dim(dim_names.len()));
                    dim_names.push(h.clone());
                }
            }
        }

        let mut tuples = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let mut dims = Vec::with_capacity(dim_names.len());
            let mut crits = vec![0.0; names.len()];
            for (col, kind) in layout.iter().enumerate() {
                let cell = record.get(col).unwrap_or("");
                match *kind {
                    Column::Dim(_) => dims.push(cell.to_string()),
                    Column::Criterion(ci) => {
                        let v: f64 = cell.trim().parse().map_err(|_| Error::Value {
                            row,
                            column: names[ci].clone(),
                            reason: format!("`{cell}` is not a number"),
                        })?;
                        let v = check_finite(v, row, &names[ci])?;
                        crits[ci] = if maximized[ci] { normalize(-v) } else { v };
                    }
                }
            }
            tuples.push(Tuple {
                rowid: RowId(row as u32),
                dims,
                crits,
            });
        }

        Ok(Relation {
            name: name.into(),
            criteria: declared,
            maximized,
            dim_names,
            layout,
            tuples,
        })
    }

    /// Writes the relation back in its original column order and value
    /// orientation.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let header: Vec<&str> = self
            .layout
            .iter()
            .map(|c| match *c {
                Column::Dim(i) => self.dim_names[i].as_str(),
                Column::Criterion(i) => self.criteria[i].name.as_str(),
            })
            .collect();
        wtr.write_record(&header)?;
        for t in &self.tuples {
            let record: Vec<String> = self
                .layout
                .iter()
                .map(|c| match *c {
                    Column::Dim(i) => t.dims[i].clone(),
                    Column::Criterion(i) => {
                        let v = if self.maximized[i] { -t.crits[i] } else { t.crits[i] };
                        normalize(v).to_string()
                    }
                })
                .collect();
            wtr.write_record(&record)?;
        }
        wtr.flush().map_err(|source| Error::Io {
            path: "<csv writer>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn criteria(&self) -> &[CriterionId] {
        &self.criteria
    }

    /// Number of declared criteria.
    pub fn dimensionality(&self) -> usize {
        self.criteria.len()
    }

    pub fn all_criteria(&self) -> CriterionSet {
        CriterionSet::full(self.criteria.len())
    }

    pub fn is_maximized(&self, criterion: usize) -> bool {
        self.maximized[criterion]
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Tid(r), ascending.
    pub fn tid(&self) -> Vec<RowId> {
        self.tuples.iter().map(|t| t.rowid).collect()
    }

    pub fn tuple(&self, id: RowId) -> Option<&Tuple> {
        if id.0 == 0 {
            return None;
        }
        self.tuples.get(id.slot())
    }

    pub(crate) fn tuple_unchecked(&self, id: RowId) -> &Tuple {
        &self.tuples[id.slot()]
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.tuple(t.rowid).is_some_and(|own| own == t)
    }

    pub fn criterion_index(&self, name: &str) -> Result<usize> {
        self.criteria
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCriterion(name.to_string()))
    }

    /// True when every criterion name is a single character, which enables
    /// the concatenated notation ("ECV").
    pub fn compact_names(&self) -> bool {
        self.criteria.iter().all(|c| c.name.chars().count() == 1)
    }

    /// Canonical text for a criterion set: names in declaration order,
    /// concatenated when every name is a single character and comma-joined
    /// otherwise. The empty set renders as the empty string.
    pub fn format_set(&self, set: CriterionSet) -> String {
        let sep = if self.compact_names() { "" } else { "," };
        set.iter()
            .map(|i| self.criteria[i].name.as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`Relation::format_set`]. Comma-separated names are always
    /// accepted; without commas and with single-character names, each
    /// character is a name.
    pub fn parse_set(&self, text: &str) -> Result<CriterionSet> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(CriterionSet::EMPTY);
        }
        if !text.contains(',') && self.compact_names() && self.criterion_index(text).is_err() {
            let mut set = CriterionSet::EMPTY;
            for ch in text.chars() {
                set = set.with(self.criterion_index(&ch.to_string())?);
            }
            return Ok(set);
        }
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .try_fold(CriterionSet::EMPTY, |acc, name| {
                Ok(acc.with(self.criterion_index(name)?))
            })
    }

    /// Every subset of the declared criteria in canonical order.
    pub fn subsets(&self) -> Vec<CriterionSet> {
        let mut all: Vec<_> = CriterionSet::all_subsets(self.dimensionality()).collect();
        all.sort_by(CriterionSet::canonical_cmp);
        all
    }

    pub(crate) fn check_set(&self, set: CriterionSet) -> Result<()> {
        if set.is_subset(self.all_criteria()) {
            Ok(())
        } else {
            Err(Error::contract(format!(
                "criterion set {set:?} names undeclared criteria (d = {})",
                self.dimensionality()
            )))
        }
    }

    fn validate(&self) -> Result<()> {
        declare_criteria(&self.criteria.iter().map(|c| c.name.clone()).collect::<Vec<_>>())?;
        let d = self.criteria.len();
        if self.criteria.iter().enumerate().any(|(i, c)| c.index != i) {
            return Err(Error::Schema("criterion indices out of order".into()));
        }
        if self.maximized.len() != d {
            return Err(Error::Schema("maximize flags do not match criteria".into()));
        }
        for (i, t) in self.tuples.iter().enumerate() {
            if t.rowid != RowId(i as u32 + 1) {
                return Err(Error::Schema(format!("row ids must run 1..n, found {}", t.rowid)));
            }
            if t.crits.len() != d || t.dims.len() != self.dim_names.len() {
                return Err(Error::Schema(format!("row {} has the wrong arity", t.rowid)));
            }
            for (j, &v) in t.crits.iter().enumerate() {
                check_finite(v, i + 1, &self.criteria[j].name)?;
            }
        }
        Ok(())
    }
}

/// Reads `path` as CSV; the relation is named after the file stem.
pub fn load_csv<S: AsRef<str>>(
    path: impl AsRef<Path>,
    criteria: &[S],
    maximize: &[S],
) -> Result<Relation> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Relation::read_csv(name, std::io::BufReader::new(file), criteria, maximize)
}

fn declare_criteria(names: &[String]) -> Result<Vec<CriterionId>> {
    if names.len() > MAX_CRITERIA {
        return Err(Error::Schema(format!(
            "{} criteria declared, at most {MAX_CRITERIA} supported",
            names.len()
        )));
    }
    let mut seen = HashSet::new();
    names
        .iter()
        .enumerate()
        .map(|(index, name)| {
            if name.is_empty() {
                return Err(Error::Schema("criterion names must be non-empty".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("criterion `{name}` declared twice")));
            }
            Ok(CriterionId {
                index,
                name: name.clone(),
            })
        })
        .collect()
}

fn check_finite(v: f64, row: usize, column: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(normalize(v))
    } else {
        Err(Error::Value {
            row,
            column: column.to_string(),
            reason: format!("{v} is not a finite number"),
        })
    }
}

// Folds -0.0 into +0.0.
fn normalize(v: f64) -> f64 {
    v + 0.0
}
