use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GeometryError;

/// A multiset of `n` points in `R^dim`. Repeated points are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointConfig {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        for p in &points {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        Ok(Self { dim, points })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
        }
    }

    pub fn from_integer_points(dim: usize, points: &[Vec<i64>]) -> Result<Self, GeometryError> {
        Self::new(
            dim,
            points
                .iter()
                .map(|p| p.iter().map(|&x| x as f64).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        squared_distance(&self.points[i], &self.points[j])
    }

    /// Sub-multiset in the order given by `indices`.
    pub fn select(&self, indices: &[usize]) -> PointConfig {
        PointConfig {
            dim: self.dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    /// Full matrix of pairwise squared distances.
    pub fn distance_matrix(&self) -> SquaredDistanceMatrix {
        let n = self.len();
        let mut m = SquaredDistanceMatrix::unknown(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set(i, j, self.squared_distance(i, j));
            }
        }
        m
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Serialize for PointConfig {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let points = Vec::<Vec<f64>>::deserialize(d)?;
        let dim = points.first().map_or(0, Vec::len);
        PointConfig::new(dim, points).map_err(D::Error::custom)
    }
}

/// Symmetric `n x n` store of squared distances; `None` marks an unknown entry.
///
/// The diagonal is always zero and known.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix {
    n: usize,
    entries: Vec<Option<f64>>,
}

impl SquaredDistanceMatrix {
    pub fn unknown(n: usize) -> Self {
        let mut entries = vec![None; n * n];
        for i in 0..n {
            entries[i * n + i] = Some(0.0);
        }
        Self { n, entries }
    }

    /// Builds a complete matrix from row-major values.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeometryError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().copied().map(Some));
        }
        let m = Self { n, entries };
        m.validate()?;
        Ok(m)
    }

    /// Builds from explicit entries (row-major, `None` for unknown).
    pub fn from_entries(n: usize, entries: Vec<Option<f64>>) -> Result<Self, GeometryError> {
        if entries.len() != n * n {
            return Err(GeometryError::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        let m = Self { n, entries };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let n = self.n;
        for i in 0..n {
            match self.entries[i * n + i] {
                Some(v) if v == 0.0 => {}
                other => {
                    return Err(GeometryError::NonZeroDiagonal {
                        i,
                        value: other.unwrap_or(f64::NAN),
                    })
                }
            }
            for j in (i + 1)..n {
                let a = self.entries[i * n + j];
                let b = self.entries[j * n + i];
                if a != b {
                    return Err(GeometryError::Asymmetric(i, j));
                }
                if let Some(v) = a {
                    if v < 0.0 || !v.is_finite() {
                        return Err(GeometryError::NegativeDistance { i, j, value: v });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.n + j]
    }

    /// Panics if the entry is unknown; intended for complete matrices.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j].expect("unknown distance entry")
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if i == j {
            return;
        }
        self.entries[i * self.n + j] = Some(value);
        self.entries[j * self.n + i] = Some(value);
    }

    pub fn clear(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.entries[i * self.n + j] = None;
        self.entries[j * self.n + i] = None;
    }

    pub fn entries(&self) -> &[Option<f64>] {
        &self.entries
    }

    /// Unknown off-diagonal pairs `(i, j)` with `i < j`.
    pub fn missing_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j).is_none() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    pub fn require_complete(&self) -> Result<(), GeometryError> {
        match self.missing_pairs().first() {
            Some(&(i, j)) => Err(GeometryError::Incomplete(i, j)),
            None => Ok(()),
        }
    }

    /// Restriction to `indices`, in that order.
    pub fn submatrix(&self, indices: &[usize]) -> SquaredDistanceMatrix {
        let k = indices.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                entries.push(self.get(i, j));
            }
        }
        SquaredDistanceMatrix { n: k, entries }
    }

    /// Largest known entry, used as a scale for relative thresholds.
    pub fn scale(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, &v| acc.max(v))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<Option<f64>>,
}

impl Serialize for SquaredDistanceMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            n: self.n,
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SquaredDistanceMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        SquaredDistanceMatrix::from_entries(repr.n, repr.entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_config_json_is_array_of_arrays() {
        let p = PointConfig::new(2, vec![vec![0.0, 1.0], vec![2.5, -3.0]]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[0.0,1.0],[2.5,-3.0]]");
        let back: PointConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn ragged_points_are_rejected() {
        assert!(serde_json::from_str::<PointConfig>("[[0,1],[2]]").is_err());
        assert!(PointConfig::new(3, vec![vec![1.0]]).is_err());
    }

    #[test]
    fn matrix_json_uses_row_major_entries_with_null_for_unknown() {
        let mut m = SquaredDistanceMatrix::unknown(2);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"entries":[0.0,null,null,0.0]}"#);
        m.set(0, 1, 4.0);
        let back: SquaredDistanceMatrix =
            serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back.get(1, 0), Some(4.0));
    }

    #[test]
    fn asymmetric_or_negative_matrices_fail_validation() {
        let bad = r#"{"n":2,"entries":[0,1,2,0]}"#;
        assert!(serde_json::from_str::<SquaredDistanceMatrix>(bad).is_err());
        let neg = SquaredDistanceMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        assert!(matches!(neg, Err(GeometryError::NegativeDistance { .. })));
    }
}
