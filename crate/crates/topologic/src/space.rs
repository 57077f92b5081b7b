//! Finite subset spaces, topologies and models.
//!
//! Points are identified by strings; internally a set of points is a `u64`
//! bitmask over the sorted point list (at most 64 points). All orderings are
//! canonical so reports and counterexamples are reproducible.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const MAX_POINTS: usize = 64;

/// A finite subset space (X, O). `opens` is sorted ascending by bitmask and
/// duplicate-free. The full point set is required by `new`; `new_partial`
/// skips that requirement (used when reconstructing a space from a frame,
/// where the empty open is unrecoverable and a top open needs condition 8).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSpace {
    points: Vec<String>,
    opens: Vec<u64>,
}

impl SubsetSpace {
    pub fn new(points: Vec<String>, opens: Vec<u64>) -> Result<SubsetSpace> {
        let s = Self::new_partial(points, opens)?;
        if !s.opens.contains(&s.full_set()) {
            return Err(Error::InvalidModel(
                "the full point set X must be one of the opens".into(),
            ));
        }
        Ok(s)
    }

    pub fn new_partial(mut points: Vec<String>, mut opens: Vec<u64>) -> Result<SubsetSpace> {
        points.sort();
        points.dedup();
        if points.is_empty() {
            return Err(Error::InvalidModel("point set must be nonempty".into()));
        }
        if points.len() > MAX_POINTS {
            return Err(Error::InvalidModel(format!(
                "at most {MAX_POINTS} points supported"
            )));
        }
        let full = full_mask(points.len());
        if opens.iter().any(|o| o & !full != 0) {
            return Err(Error::InvalidModel(
                "an open refers to a point outside X".into(),
            ));
        }
        opens.sort_unstable();
        opens.dedup();
        Ok(SubsetSpace { points, opens })
    }

    /// Builds a space from point names and opens given as point-name lists.
    pub fn from_names(points: Vec<String>, opens: &[Vec<String>]) -> Result<SubsetSpace> {
        let mut sorted = points.clone();
        sorted.sort();
        sorted.dedup();
        let mut masks = Vec::with_capacity(opens.len());
        for open in opens {
            let mut m = 0u64;
            for p in open {
                let i = sorted
                    .binary_search(p)
                    .map_err(|_| Error::InvalidModel(format!("unknown point id {p:?}")))?;
                m |= 1 << i;
            }
            masks.push(m);
        }
        SubsetSpace::new(sorted, masks)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn opens(&self) -> &[u64] {
        &self.opens
    }

    pub fn full_set(&self) -> u64 {
        full_mask(self.points.len())
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    pub fn open_index(&self, mask: u64) -> Option<usize> {
        self.opens.binary_search(&mask).ok()
    }

    pub fn point_names(&self, mask: u64) -> Vec<String> {
        self.points
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect()
    }

    /// Least superset of `opens` closed under the selected pairwise
    /// operations; adjoining the empty set is a separate flag.
    pub fn close_under(&self, union: bool, intersection: bool, adjoin_empty: bool) -> SubsetSpace {
        let mut opens = self.opens.clone();
        if adjoin_empty && !opens.contains(&0) {
            opens.push(0);
        }
        loop {
            let mut added = false;
            let n = opens.len();
            for i in 0..n {
                for j in i + 1..n {
                    let mut candidates = [None, None];
                    if union {
                        candidates[0] = Some(opens[i] | opens[j]);
                    }
                    if intersection {
                        candidates[1] = Some(opens[i] & opens[j]);
                    }
                    for c in candidates.into_iter().flatten() {
                        if !opens.contains(&c) {
                            opens.push(c);
                            added = true;
                        }
                    }
                }
            }
            if !added {
                break;
            }
        }
        opens.sort_unstable();
        opens.dedup();
        SubsetSpace {
            points: self.points.clone(),
            opens,
        }
    }

    pub fn is_closed_under_union(&self) -> bool {
        self.opens
            .iter()
            .all(|&a| self.opens.iter().all(|&b| self.opens.contains(&(a | b))))
    }

    pub fn is_closed_under_intersection(&self) -> bool {
        self.opens
            .iter()
            .all(|&a| self.opens.iter().all(|&b| self.opens.contains(&(a & b))))
    }

    /// Empty set and X present, opens closed under pairwise union and
    /// intersection. On a finite space pairwise closure suffices.
    pub fn is_topology(&self) -> bool {
        self.opens.contains(&0)
            && self.opens.contains(&self.full_set())
            && self.is_closed_under_union()
            && self.is_closed_under_intersection()
    }

    fn require_topology(&self) -> Result<()> {
        if self.is_topology() {
            Ok(())
        } else {
            Err(Error::NotATopology(
                "interior/closure require a topology".into(),
            ))
        }
    }

    /// Union of the opens contained in `set`.
    pub fn interior(&self, set: u64) -> Result<u64> {
        self.require_topology()?;
        Ok(self
            .opens
            .iter()
            .filter(|&&o| o & !set == 0)
            .fold(0, |acc, &o| acc | o))
    }

    /// Complement of the interior of the complement.
    pub fn closure(&self, set: u64) -> Result<u64> {
        let full = self.full_set();
        Ok(full & !self.interior(full & !set)?)
    }
}

/// A model: a subset space plus an initial interpretation of atoms. Atoms
/// absent from the valuation denote the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub space: SubsetSpace,
    valuation: BTreeMap<String, u64>,
}

impl Model {
    pub fn new(space: SubsetSpace, valuation: BTreeMap<String, u64>) -> Result<Model> {
        let full = space.full_set();
        for (atom, &set) in &valuation {
            if crate::formula::RESERVED_WORDS.contains(&atom.as_str()) {
                return Err(Error::InvalidModel(format!(
                    "reserved word {atom:?} used as an atom"
                )));
            }
            if set & !full != 0 {
                return Err(Error::InvalidModel(format!(
                    "valuation of {atom:?} refers to a point outside X"
                )));
            }
        }
        Ok(Model { space, valuation })
    }

    pub fn valuation(&self) -> &BTreeMap<String, u64> {
        &self.valuation
    }

    pub fn atom_set(&self, name: &str) -> u64 {
        self.valuation.get(name).copied().unwrap_or(0)
    }

    /// The pointed product: all (point, open) pairs with the point inside the
    /// open, ordered by (point index, open index). The empty open hosts no
    /// worlds.
    pub fn worlds(&self) -> Vec<World> {
        let mut out = Vec::new();
        for point in 0..self.space.point_count() {
            for (open, &mask) in self.space.opens().iter().enumerate() {
                if mask >> point & 1 == 1 {
                    out.push(World { point, open });
                }
            }
        }
        out
    }

    pub fn is_world(&self, w: World) -> bool {
        w.point < self.space.point_count()
            && w.open < self.space.opens().len()
            && self.space.opens()[w.open] >> w.point & 1 == 1
    }

    pub fn world_name(&self, w: World) -> String {
        format!(
            "{}@{{{}}}",
            self.space.points()[w.point],
            self.space.point_names(self.space.opens()[w.open]).join(",")
        )
    }
}

/// A world of the pointed product, by point index and open index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World {
    pub point: usize,
    pub open: usize,
}

pub fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

// ---------------------------------------------------------------------------
// model file format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

impl Model {
    pub fn from_json(text: &str) -> Result<Model> {
        let file: ModelFile = serde_json::from_str(text)?;
        let space = SubsetSpace::from_names(file.points, &file.opens)?;
        let mut valuation = BTreeMap::new();
        for (atom, points) in file.valuation {
            let mut m = 0u64;
            for p in &points {
                let i = space
                    .point_index(p)
                    .ok_or_else(|| Error::InvalidModel(format!("unknown point id {p:?}")))?;
                m |= 1 << i;
            }
            valuation.insert(atom, m);
        }
        Model::new(space, valuation)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            points: self.space.points().to_vec(),
            opens: self
                .space
                .opens()
                .iter()
                .map(|&o| self.space.point_names(o))
                .collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(a, &s)| (a.clone(), self.space.point_names(s)))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }
}
