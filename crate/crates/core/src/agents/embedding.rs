//! Similarity from embedding vectors.

use std::collections::HashMap;
use std::path::Path;

use super::scoring::cosine;
use super::transport::{Payload, Request, Transport};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::similarity::{LoadOptions, Scale, SimilarityMatrix};

pub trait EmbeddingSource {
    fn embed(&self, text: &str) -> Result<Vec<f64>>;
}

pub struct RemoteEmbedder<T> {
    model: String,
    transport: T,
}

impl<T: Transport> RemoteEmbedder<T> {
    pub fn new(model: &str, transport: T) -> Self {
        RemoteEmbedder {
            model: model.into(),
            transport,
        }
    }
}

impl<T: Transport> EmbeddingSource for RemoteEmbedder<T> {
    fn embed(&self, text: &str) -> Result<Vec<f64>> {
        let resp = self.transport.send(&Request::Embedding {
            model: self.model.clone(),
            input: text.into(),
        })?;
        match resp.payload {
            Payload::Embedding { vector } => Ok(vector),
            _ => Err(Error::Transport("expected an embedding payload".into())),
        }
    }
}

/// Vectors read from a CSV file: a `category` column followed by the
/// vector components.
#[derive(Debug, Clone, Default)]
pub struct VectorTable {
    vectors: HashMap<String, Vec<f64>>,
}

impl VectorTable {
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let mut vectors = HashMap::new();
        let mut width = None;
        for (n, row) in reader.records().enumerate() {
            let row = row?;
            let name = row.get(0).unwrap_or_default().trim().to_string();
            let values = row
                .iter()
                .skip(1)
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Schema(format!("vector row {}: {e}", n + 2)))?;
            if *width.get_or_insert(values.len()) != values.len() {
                return Err(Error::Schema(format!("vector row {} has {} components", n + 2, values.len())));
            }
            if vectors.insert(name.clone(), values).is_some() {
                return Err(Error::Schema(format!("duplicate vector for `{name}`")));
            }
        }
        Ok(VectorTable { vectors })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn insert(&mut self, category: &str, vector: Vec<f64>) {
        self.vectors.insert(category.into(), vector);
    }
}

impl EmbeddingSource for VectorTable {
    fn embed(&self, text: &str) -> Result<Vec<f64>> {
        self.vectors
            .get(text)
            .cloned()
            .ok_or_else(|| Error::Validation(format!("no vector for `{text}`")))
    }
}

pub fn embedding_similarity(source: &dyn EmbeddingSource, a: &str, b: &str) -> Result<f64> {
    cosine(&source.embed(a)?, &source.embed(b)?)
}

/// Cosine similarities for every category pair of `domain`, on a [−1, 1]
/// scale. Each category is embedded once.
pub fn embedding_matrix(source: &dyn EmbeddingSource, domain: &Domain) -> Result<SimilarityMatrix> {
    let vectors = domain
        .categories
        .iter()
        .map(|c| source.embed(c))
        .collect::<Result<Vec<_>>>()?;
    let n = vectors.len();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = cosine(&vectors[i], &vectors[j])
                .map_err(|e| Error::Degenerate(format!("{} / {}: {e}", domain.categories[i], domain.categories[j])))?;
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SimilarityMatrix::from_rows(domain.clone(), rows, Scale::new(-1.0, 1.0)?, LoadOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::transport::{Response, ScriptedTransport};

    #[test]
    fn table_cosines() {
        let t = VectorTable::from_csv_str("category,d1,d2\ndog,1,0\nwolf,1,1\ncat,0,1\n").unwrap();
        assert!((embedding_similarity(&t, "dog", "wolf").unwrap() - 0.7071067811865475).abs() < 1e-12);
        assert_eq!(embedding_similarity(&t, "dog", "cat").unwrap(), 0.0);
        assert!(embedding_similarity(&t, "dog", "eel").is_err());
        assert!(VectorTable::from_csv_str("category,d1,d2\ndog,1\n").is_err());
    }

    #[test]
    fn matrix_over_a_domain() {
        let d = Domain::new("Tiny", "tiny things", vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let mut t = VectorTable::default();
        t.insert("a", vec![1.0, 0.0]);
        t.insert("b", vec![1.0, 1.0]);
        t.insert("c", vec![-1.0, 0.0]);
        let m = embedding_matrix(&t, &d).unwrap();
        assert_eq!(m.sim("a", "c").unwrap(), -1.0);
        assert_eq!(m.sim("a", "a").unwrap(), 1.0);
        t.insert("c", vec![0.0, 0.0]);
        assert!(embedding_matrix(&t, &d).is_err());
    }

    #[test]
    fn remote_embedder_sends_embedding_requests() {
        let t = ScriptedTransport::new(|r| match r {
            Request::Embedding { input, .. } => Ok(Response {
                payload: Payload::Embedding {
                    vector: vec![input.len() as f64, 1.0],
                },
                timestamp: None,
            }),
            _ => Err(Error::Transport("unexpected".into())),
        });
        let e = RemoteEmbedder::new("emb", t);
        assert_eq!(e.embed("dog").unwrap(), [3.0, 1.0]);
    }
}
