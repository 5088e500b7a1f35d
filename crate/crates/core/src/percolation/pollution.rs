use std::collections::HashSet;

use super::PercolationError;

/// Family of `(d + 1)`-subsets through which an edge may not be added.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PollutionSet {
    d: usize,
    members: HashSet<Vec<usize>>,
}

impl PollutionSet {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            members: HashSet::new(),
        }
    }

    pub fn from_members(
        d: usize,
        members: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, PercolationError> {
        let mut set = Self::new(d);
        for m in members {
            set.insert(m)?;
        }
        Ok(set)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Inserts a subset in any order; returns whether it was new.
    pub fn insert(&mut self, mut subset: Vec<usize>) -> Result<bool, PercolationError> {
        subset.sort_unstable();
        subset.dedup();
        if subset.len() != self.d + 1 {
            return Err(PercolationError::BaseSize {
                expected: self.d + 1,
                got: subset.len(),
            });
        }
        Ok(self.members.insert(subset))
    }

    /// Membership test for a sorted subset.
    pub fn contains_sorted(&self, subset: &[usize]) -> bool {
        self.members.contains(subset)
    }

    pub fn contains(&self, subset: &[usize]) -> bool {
        let mut key = subset.to_vec();
        key.sort_unstable();
        self.contains_sorted(&key)
    }

    /// Members in lexicographic order.
    pub fn sorted_members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.members.iter().cloned().collect();
        out.sort_unstable();
        out
    }

    pub fn is_subset_of(&self, other: &PollutionSet) -> bool {
        self.members.iter().all(|m| other.members.contains(m))
    }

    /// JSON array of sorted vertex arrays, members in lexicographic order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.sorted_members()).expect("serializing integer arrays")
    }

    pub fn from_json(text: &str, d: usize) -> Result<Self, PercolationError> {
        let members: Vec<Vec<usize>> =
            serde_json::from_str(text).map_err(|e| PercolationError::Json(e.to_string()))?;
        Self::from_members(d, members)
    }
}
