use rayon::prelude::*;

use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-9;

/// Dissimilarity used to compare observations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    L1,
    /// Frobenius norm of the difference of two matrices. Identical to
    /// `Euclidean` on the flattened entries.
    Frobenius,
    /// The sequence carries its own distance matrix.
    Precomputed,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::L1 => "l1",
            Metric::Frobenius => "frobenius",
            Metric::Precomputed => "precomputed",
        }
    }
}

/// An ordered sequence of observations sharing one representation.
#[derive(Clone, Debug, PartialEq)]
pub enum ObservationSeq {
    /// `n` real vectors of length `dim`, stored row-major.
    Vectors { dim: usize, data: Vec<f64> },
    /// `n` real `rows × cols` matrices, each stored row-major.
    Matrices { rows: usize, cols: usize, data: Vec<f64> },
    /// Opaque observations known only through their pairwise distances.
    Indexed(DistanceMatrix),
}

impl ObservationSeq {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::InvalidInput("observations must have dimension >= 1".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::vectors(dim, data)
    }

    pub fn vectors(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, found: data.len() });
        }
        check_finite(&data, "observations")?;
        Ok(ObservationSeq::Vectors { dim, data })
    }

    pub fn matrices(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let size = rows * cols;
        if size == 0 || data.len() % size != 0 {
            return Err(Error::DimensionMismatch { expected: size, found: data.len() });
        }
        check_finite(&data, "observations")?;
        Ok(ObservationSeq::Matrices { rows, cols, data })
    }

    pub fn len(&self) -> usize {
        match self {
            ObservationSeq::Vectors { dim, data } => data.len() / dim,
            ObservationSeq::Matrices { rows, cols, data } => data.len() / (rows * cols),
            ObservationSeq::Indexed(d) => d.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flattened length of one observation (0 for indexed sequences).
    pub fn item_size(&self) -> usize {
        match self {
            ObservationSeq::Vectors { dim, .. } => *dim,
            ObservationSeq::Matrices { rows, cols, .. } => rows * cols,
            ObservationSeq::Indexed(_) => 0,
        }
    }

    /// Flattened entries of observation `i`.
    pub fn item(&self, i: usize) -> &[f64] {
        let size = self.item_size();
        match self {
            ObservationSeq::Vectors { data, .. } | ObservationSeq::Matrices { data, .. } => {
                &data[i * size..(i + 1) * size]
            }
            ObservationSeq::Indexed(_) => &[],
        }
    }

    /// Contiguous sub-sequence `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> ObservationSeq {
        let size = self.item_size();
        match self {
            ObservationSeq::Vectors { dim, data } => ObservationSeq::Vectors {
                dim: *dim,
                data: data[start * size..end * size].to_vec(),
            },
            ObservationSeq::Matrices { rows, cols, data } => ObservationSeq::Matrices {
                rows: *rows,
                cols: *cols,
                data: data[start * size..end * size].to_vec(),
            },
            ObservationSeq::Indexed(d) => ObservationSeq::Indexed(d.submatrix(start, end)),
        }
    }
}

fn check_finite(data: &[f64], what: &str) -> Result<()> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteInput { what: what.to_string() })
    }
}

/// Symmetric `n × n` dissimilarities with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    /// Validates a user-supplied row-major matrix. Entries must be finite and
    /// nonnegative, the diagonal zero and the matrix symmetric to within
    /// `1e-9` (relative to the entry magnitude); the stored copy is exactly
    /// symmetric.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        check_finite(&data, "distance matrix")?;
        let mut data = data;
        for i in 0..n {
            if data[i * n + i].abs() > SYMMETRY_TOL {
                return Err(Error::InvalidInput(format!(
                    "distance matrix diagonal entry ({i},{i}) is {} instead of 0",
                    data[i * n + i]
                )));
            }
            data[i * n + i] = 0.0;
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if a < 0.0 || b < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "distance matrix entry ({i},{j}) is negative"
                    )));
                }
                let diff = (a - b).abs();
                if diff > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::AsymmetricInput { i: j, j: i, diff });
                }
                let m = 0.5 * (a + b);
                data[i * n + j] = m;
                data[j * n + i] = m;
            }
        }
        Ok(DistanceMatrix { n, data, metric: Metric::Precomputed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Off-diagonal entries `(i, j, d_ij)` with `i < j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    /// Distances among observations `[start, end)`.
    pub fn submatrix(&self, start: usize, end: usize) -> DistanceMatrix {
        let m = end - start;
        let mut data = Vec::with_capacity(m * m);
        for i in start..end {
            data.extend_from_slice(&self.row(i)[start..end]);
        }
        DistanceMatrix { n: m, data, metric: self.metric }
    }

    /// True when every off-diagonal distance is zero.
    pub fn all_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

/// Pairwise distances of `seq` under `metric`.
///
/// `Metric::Precomputed` only accepts an indexed sequence, whose matrix is
/// returned as is (it was validated on construction).
pub fn compute_distances(seq: &ObservationSeq, metric: Metric) -> Result<DistanceMatrix> {
    match (seq, metric) {
        (ObservationSeq::Indexed(d), Metric::Precomputed) => Ok(d.clone()),
        (ObservationSeq::Indexed(_), m) => Err(Error::MetricMismatch(format!(
            "indexed observations only support the precomputed metric, not {}",
            m.name()
        ))),
        (_, Metric::Precomputed) => Err(Error::MetricMismatch(
            "precomputed metric requires a distance matrix as input".into(),
        )),
        (_, metric) => {
            let n = seq.len();
            let dist = |a: &[f64], b: &[f64]| -> f64 {
                match metric {
                    Metric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
                    _ => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
                }
            };
            let upper: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let xi = seq.item(i);
                    ((i + 1)..n).map(|j| dist(xi, seq.item(j))).collect()
                })
                .collect();
            let mut data = vec![0.0; n * n];
            for (i, row) in upper.iter().enumerate() {
                for (off, &v) in row.iter().enumerate() {
                    let j = i + 1 + off;
                    data[i * n + j] = v;
                    data[j * n + i] = v;
                }
            }
            check_finite(&data, "distances")?;
            Ok(DistanceMatrix { n, data, metric })
        }
    }
}
