//! Similarity and typicality norms.
//!
//! Matrices are read from wide CSV: the first row holds category labels, each
//! following row starts with its label and lists one rating per column. The
//! diagonal may be left blank; self-similarity is always the scale maximum.
//! Files may carry more categories than the domain uses (norm databases list
//! many more), but every domain category must be present.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};

pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub min: f64,
    pub max: f64,
}

impl Scale {
    /// The 0–20 rating scale of the Leuven norms.
    pub const RATING_0_20: Scale = Scale { min: 0.0, max: 20.0 };
    pub const UNIT: Scale = Scale { min: 0.0, max: 1.0 };

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::Degenerate(format!("scale [{min}, {max}] has no width")));
        }
        Ok(Scale { min, max })
    }

    fn contains(&self, v: f64) -> bool {
        v >= self.min - SYMMETRY_TOLERANCE && v <= self.max + SYMMETRY_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Average `m[i][j]` and `m[j][i]` instead of rejecting asymmetric input.
    pub symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    domain: Domain,
    values: Vec<f64>,
    scale: Scale,
    index: HashMap<String, usize>,
}

impl SimilarityMatrix {
    /// Builds a matrix from a dense row-major table in domain order.
    pub fn from_rows(
        domain: Domain,
        rows: Vec<Vec<f64>>,
        scale: Scale,
        options: LoadOptions,
    ) -> Result<Self> {
        let n = domain.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Schema(format!(
                "matrix for {} must be {n}x{n}",
                domain.name
            )));
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = rows[i][j];
            }
        }
        Self::build(domain, values, scale, options)
    }

    fn build(domain: Domain, mut values: Vec<f64>, scale: Scale, options: LoadOptions) -> Result<Self> {
        let n = domain.len();
        let cats = &domain.categories;
        for i in 0..n {
            values[i * n + i] = scale.max;
            for j in (i + 1)..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::Validation(format!(
                        "non-finite rating for pair ({}, {})",
                        cats[i], cats[j]
                    )));
                }
                if (a - b).abs() > SYMMETRY_TOLERANCE {
                    if !options.symmetrize {
                        return Err(Error::AsymmetricPair {
                            row: cats[i].clone(),
                            col: cats[j].clone(),
                            forward: a,
                            backward: b,
                        });
                    }
                    let mean = 0.5 * (a + b);
                    values[i * n + j] = mean;
                    values[j * n + i] = mean;
                }
                let v = values[i * n + j];
                if !scale.contains(v) {
                    return Err(Error::Validation(format!(
                        "rating {v} for pair ({}, {}) outside [{}, {}]",
                        cats[i], cats[j], scale.min, scale.max
                    )));
                }
            }
        }
        let index = cats.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(SimilarityMatrix {
            domain,
            values,
            scale,
            index,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn categories(&self) -> &[String] {
        &self.domain.categories
    }

    pub fn index_of(&self, category: &str) -> Result<usize> {
        self.index
            .get(category)
            .copied()
            .ok_or_else(|| Error::UnknownCategory {
                category: category.to_string(),
                domain: self.domain.name.clone(),
            })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn sim(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.at(self.index_of(a)?, self.index_of(b)?))
    }

    /// Distinct off-diagonal pairs `(i, j)` with `i < j`, row-major.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }

    pub fn pair_values(&self) -> Vec<((usize, usize), f64)> {
        self.pairs().map(|(i, j)| ((i, j), self.at(i, j))).collect()
    }

    /// Affine map of every entry onto `[0, 1]`.
    pub fn normalize(&self) -> Result<SimilarityMatrix> {
        let Scale { min, max } = Scale::new(self.scale.min, self.scale.max)?;
        let width = max - min;
        let values = self.values.iter().map(|v| (v - min) / width).collect();
        Ok(SimilarityMatrix {
            domain: self.domain.clone(),
            values,
            scale: Scale::UNIT,
            index: self.index.clone(),
        })
    }

    /// Writes the matrix in the wide CSV format read by [`load_similarity`].
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("category");
        for c in self.categories() {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, c) in self.categories().iter().enumerate() {
            out.push_str(c);
            for j in 0..self.len() {
                let _ = write!(out, ",{}", self.at(i, j));
            }
            out.push('\n');
        }
        out
    }

    /// Two matrices are close if all entries agree within `tol`.
    pub fn approx_eq(&self, other: &SimilarityMatrix, tol: f64) -> bool {
        self.domain == other.domain
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Parses a wide similarity table for `domain`.
pub fn load_similarity(
    text: &str,
    domain: &Domain,
    scale: Scale,
    options: LoadOptions,
) -> Result<SimilarityMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Schema("similarity file is empty".into()))??;
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut col_index = HashMap::new();
    for (j, c) in columns.iter().enumerate() {
        if col_index.insert(c.clone(), j).is_some() {
            return Err(Error::Schema(format!("column `{c}` listed twice")));
        }
    }

    let mut rows: HashMap<String, Vec<Option<f64>>> = HashMap::new();
    for (line, record) in records.enumerate() {
        let record = record?;
        let label = record
            .get(0)
            .ok_or_else(|| Error::Schema(format!("row {} has no label", line + 2)))?
            .to_string();
        if record.len() != columns.len() + 1 {
            return Err(Error::Schema(format!(
                "row `{label}` has {} ratings, expected {}",
                record.len().saturating_sub(1),
                columns.len()
            )));
        }
        let mut cells = Vec::with_capacity(columns.len());
        for (j, cell) in record.iter().skip(1).enumerate() {
            if cell.is_empty() {
                cells.push(None);
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::Schema(format!("row `{label}`, column `{}`: `{cell}` is not a number", columns[j]))
                })?;
                cells.push(Some(v));
            }
        }
        if rows.insert(label.clone(), cells).is_some() {
            return Err(Error::Schema(format!("row `{label}` listed twice")));
        }
    }

    let missing: Vec<&str> = domain
        .categories
        .iter()
        .filter(|c| !col_index.contains_key(*c) || !rows.contains_key(*c))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "missing categories for domain {}: {}",
            domain.name,
            missing.join(", ")
        )));
    }

    let n = domain.len();
    let mut values = vec![0.0; n * n];
    for (i, a) in domain.categories.iter().enumerate() {
        let row = &rows[a];
        for (j, b) in domain.categories.iter().enumerate() {
            if i == j {
                continue;
            }
            values[i * n + j] = row[col_index[b]].ok_or_else(|| {
                Error::Schema(format!("missing rating for pair ({a}, {b})"))
            })?;
        }
    }
    SimilarityMatrix::build(domain.clone(), values, scale, options)
}

pub fn load_similarity_file(
    path: impl AsRef<Path>,
    domain: &Domain,
    scale: Scale,
    options: LoadOptions,
) -> Result<SimilarityMatrix> {
    load_similarity(&std::fs::read_to_string(path)?, domain, scale, options)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypicalityVector {
    domain: Domain,
    values: Vec<f64>,
    mean: f64,
    sd: f64,
}

#[derive(Deserialize)]
struct TypicalityRow {
    category: String,
    rating: f64,
}

impl TypicalityVector {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Schema(format!(
                "typicality vector for {} has {} entries, expected {}",
                domain.name,
                values.len(),
                domain.len()
            )));
        }
        let (mean, sd) = mean_sd(&values)?;
        Ok(TypicalityVector {
            domain,
            values,
            mean,
            sd,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn get(&self, category: &str) -> Result<f64> {
        self.domain
            .index_of(category)
            .map(|i| self.values[i])
            .ok_or_else(|| Error::UnknownCategory {
                category: category.into(),
                domain: self.domain.name.clone(),
            })
    }

    pub fn partition(&self, threshold: f64) -> Result<Partition<usize>> {
        let items: Vec<(usize, f64)> = self.values.iter().copied().enumerate().collect();
        zscore_partition(&items, threshold)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("category,rating\n");
        for (c, v) in self.domain.categories.iter().zip(&self.values) {
            let _ = writeln!(out, "{c},{v}");
        }
        out
    }
}

/// Parses `(category, rating)` rows for `domain`. Extra categories are ignored.
pub fn load_typicality(text: &str, domain: &Domain) -> Result<TypicalityVector> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut ratings = HashMap::new();
    for row in reader.deserialize::<TypicalityRow>() {
        let row = row?;
        if ratings.insert(row.category.clone(), row.rating).is_some() {
            return Err(Error::Schema(format!("category `{}` rated twice", row.category)));
        }
    }
    let mut values = Vec::with_capacity(domain.len());
    let mut missing = Vec::new();
    for c in &domain.categories {
        match ratings.get(c) {
            Some(v) => values.push(*v),
            None => missing.push(c.as_str()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "missing typicality ratings for domain {}: {}",
            domain.name,
            missing.join(", ")
        )));
    }
    TypicalityVector::new(domain.clone(), values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition<K> {
    pub high: Vec<K>,
    pub low: Vec<K>,
    pub mean: f64,
    pub sd: f64,
    pub threshold: f64,
}

impl<K: PartialEq> Partition<K> {
    pub fn is_high(&self, key: &K) -> bool {
        self.high.contains(key)
    }

    pub fn is_low(&self, key: &K) -> bool {
        self.low.contains(key)
    }
}

/// Mean and sample (n − 1) standard deviation.
pub fn mean_sd(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 values for a standard deviation, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// Splits items into those at least `threshold` sample SDs above the mean and
/// those at least `threshold` SDs below it; everything in between is dropped.
pub fn zscore_partition<K: Clone>(items: &[(K, f64)], threshold: f64) -> Result<Partition<K>> {
    if !(threshold > 0.0) {
        return Err(Error::Degenerate(format!("threshold must be positive, got {threshold}")));
    }
    let values: Vec<f64> = items.iter().map(|(_, v)| *v).collect();
    let (mean, sd) = mean_sd(&values)?;
    if !(sd > 0.0) {
        return Err(Error::Degenerate("all values are equal (sd = 0)".into()));
    }
    let hi = mean + threshold * sd;
    let lo = mean - threshold * sd;
    let high = items.iter().filter(|(_, v)| *v >= hi).map(|(k, _)| k.clone()).collect();
    let low = items.iter().filter(|(_, v)| *v <= lo).map(|(k, _)| k.clone()).collect();
    Ok(Partition {
        high,
        low,
        mean,
        sd,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn domain(n: usize) -> Domain {
        Domain::new("T", "things", (0..n).map(|i| format!("c{i}")).collect()).unwrap()
    }

    #[test]
    fn accepts_symmetric_input() {
        let text = "x,a,b,c\na,,5,7\nb,5,,2\nc,7,2,\n";
        let d = Domain::new("T", "things", vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let m = load_similarity(text, &d, Scale::RATING_0_20, LoadOptions::default()).unwrap();
        assert_eq!(m.sim("a", "c").unwrap(), 7.0);
        assert_eq!(m.sim("b", "b").unwrap(), 20.0);
    }

    #[test]
    fn rejects_asymmetric_pair() {
        let text = "x,a,b\na,,5\nb,7,\n";
        let d = Domain::new("T", "things", vec!["a".into(), "b".into()]).unwrap();
        let err = load_similarity(text, &d, Scale::RATING_0_20, LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::AsymmetricPair { .. }));
        assert!(err.to_string().contains("asymmetric pair (a, b)"));
    }

    #[test]
    fn symmetrize_averages() {
        let text = "x,a,b\na,,5\nb,7,\n";
        let d = Domain::new("T", "things", vec!["a".into(), "b".into()]).unwrap();
        let m = load_similarity(text, &d, Scale::RATING_0_20, LoadOptions { symmetrize: true }).unwrap();
        assert_eq!(m.sim("a", "b").unwrap(), 6.0);
        assert_eq!(m.sim("b", "a").unwrap(), 6.0);
    }

    #[test]
    fn missing_category_is_schema_error() {
        let text = "x,a,b\na,,5\nb,5,\n";
        let d = Domain::new("T", "things", vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let err = load_similarity(text, &d, Scale::RATING_0_20, LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Schema(ref m) if m.contains("c")));
    }

    #[test]
    fn superset_file_is_restricted_to_domain() {
        let text = "x,a,b,z\na,,5,1\nb,5,,2\nz,1,2,\n";
        let d = Domain::new("T", "things", vec!["b".into(), "a".into()]).unwrap();
        let m = load_similarity(text, &d, Scale::RATING_0_20, LoadOptions::default()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.categories(), &["b".to_string(), "a".to_string()]);
        assert_eq!(m.at(0, 1), 5.0);
    }

    #[test]
    fn out_of_range_rating_rejected() {
        let text = "x,a,b\na,,25\nb,25,\n";
        let d = Domain::new("T", "things", vec!["a".into(), "b".into()]).unwrap();
        assert!(load_similarity(text, &d, Scale::RATING_0_20, LoadOptions::default()).is_err());
    }

    #[test]
    fn twenty_four_categories_have_276_pairs() {
        let d = domain(24);
        let rows = vec![vec![10.0; 24]; 24];
        let m = SimilarityMatrix::from_rows(d, rows, Scale::RATING_0_20, LoadOptions::default()).unwrap();
        // 24 * 23 / 2 by enumeration
        let mut count = 0;
        for i in 0..24 {
            for j in 0..24 {
                if i < j {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 276);
        assert_eq!(m.pairs().count(), count);
    }

    #[test]
    fn normalize_examples() {
        let d = domain(3);
        let rows = vec![
            vec![20.0, 0.0, 10.0],
            vec![0.0, 20.0, 13.0],
            vec![10.0, 13.0, 20.0],
        ];
        let m = SimilarityMatrix::from_rows(d, rows, Scale::RATING_0_20, LoadOptions::default()).unwrap();
        let n = m.normalize().unwrap();
        assert_eq!(n.at(0, 1), 0.0);
        assert_eq!(n.at(0, 2), 0.5);
        assert_eq!(n.at(1, 1), 1.0);
        assert!((n.at(1, 2) - 0.65).abs() < 1e-15);
        assert_eq!(n.normalize().unwrap(), n);
    }

    #[test]
    fn degenerate_scale_rejected() {
        assert!(Scale::new(5.0, 5.0).is_err());
    }

    #[test]
    fn zscore_partition_unit_example() {
        // mean 0 and sample sd 1: 2a^2 + 2 * 0.75^2 = 4
        let a = (1.4375f64).sqrt();
        let items = vec![("lo", -a), ("m", -0.75), ("zero", 0.0), ("p", 0.75), ("hi", a)];
        let p = zscore_partition(&items, 0.75).unwrap();
        assert!(p.mean.abs() < 1e-15);
        assert!((p.sd - 1.0).abs() < 1e-15);
        assert_eq!(p.high, vec!["p", "hi"]);
        assert_eq!(p.low, vec!["lo", "m"]);
        assert!(!p.is_high(&"zero") && !p.is_low(&"zero"));
    }

    #[test]
    fn zscore_partition_one_to_ten() {
        // mean 5.5, sample sd sqrt(55/6) ~ 3.0277; cut points 5.5 -/+ 2.2708
        let items: Vec<(u32, f64)> = (1..=10).map(|v| (v, v as f64)).collect();
        let p = zscore_partition(&items, 0.75).unwrap();
        assert!((p.sd - (55.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert_eq!(p.high, vec![8, 9, 10]);
        assert_eq!(p.low, vec![1, 2, 3]);
    }

    #[test]
    fn zscore_partition_errors() {
        assert!(zscore_partition(&[("a", 1.0)], 0.75).is_err());
        assert!(zscore_partition(&[("a", 1.0), ("b", 1.0), ("c", 1.0)], 0.75).is_err());
        assert!(zscore_partition(&[("a", 1.0), ("b", 2.0)], 0.0).is_err());
    }

    #[test]
    fn typicality_loads_and_orders() {
        let d = Domain::new("T", "things", vec!["b".into(), "a".into()]).unwrap();
        let t = load_typicality("category,rating\na,3\nb,5\nz,1\n", &d).unwrap();
        assert_eq!(t.values(), &[5.0, 3.0]);
        assert!(load_typicality("category,rating\na,3\n", &d).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = SimilarityMatrix> {
        (2usize..7).prop_flat_map(|n| {
            proptest::collection::vec(0.0f64..20.0, n * (n - 1) / 2).prop_map(move |upper| {
                let mut rows = vec![vec![20.0; n]; n];
                let mut k = 0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        rows[i][j] = upper[k];
                        rows[j][i] = upper[k];
                        k += 1;
                    }
                }
                SimilarityMatrix::from_rows(domain(n), rows, Scale::RATING_0_20, LoadOptions::default()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip(m in arb_matrix()) {
            let text = m.to_csv_string();
            let back = load_similarity(&text, m.domain(), m.scale(), LoadOptions::default()).unwrap();
            prop_assert_eq!(back, m);
        }

        #[test]
        fn normalize_is_idempotent(m in arb_matrix()) {
            let once = m.normalize().unwrap();
            prop_assert_eq!(once.normalize().unwrap(), once.clone());
            for i in 0..once.len() {
                prop_assert_eq!(once.at(i, i), 1.0);
                for j in 0..once.len() {
                    prop_assert!((0.0..=1.0).contains(&once.at(i, j)));
                }
            }
        }

        #[test]
        fn partitions_are_disjoint(values in proptest::collection::vec(-50.0f64..50.0, 2..40), t in 0.01f64..3.0) {
            let items: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
            if let Ok(p) = zscore_partition(&items, t) {
                for k in &p.high {
                    prop_assert!(!p.low.contains(k));
                }
            }
        }
    }
}
