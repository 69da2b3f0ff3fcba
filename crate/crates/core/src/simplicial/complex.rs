//! Finite simplicial complexes with faces oriented by increasing vertex order.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    facets: Vec<Vec<usize>>,
    faces: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// Builds the face lattice generated by the given maximal simplices.
    pub fn build(facets: Vec<Vec<usize>>) -> Result<Self> {
        if facets.is_empty() || facets.iter().all(|f| f.is_empty()) {
            return Err(Error::EmptyComplex);
        }
        let mut sorted_facets = Vec::with_capacity(facets.len());
        let mut seen = BTreeSet::new();
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            if s.is_empty() {
                return Err(Error::MalformedSimplex {
                    simplex: f,
                    reason: "empty simplex".into(),
                });
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedSimplex {
                    simplex: f,
                    reason: "repeated vertex".into(),
                });
            }
            if !seen.insert(s.clone()) {
                return Err(Error::MalformedSimplex {
                    simplex: f,
                    reason: "duplicate simplex".into(),
                });
            }
            sorted_facets.push(s);
        }
        let top = sorted_facets.iter().map(Vec::len).max().unwrap_or(0) - 1;
        let mut layers: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); top + 1];
        for f in &sorted_facets {
            let n = f.len();
            for mask in 1u64..(1u64 << n) {
                let face: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                layers[face.len() - 1].insert(face);
            }
        }
        let vertex_count = layers[0].len();
        if let Some(v) = layers[0].iter().map(|v| v[0]).enumerate().find(|(i, v)| i != v) {
            return Err(Error::MalformedSimplex {
                simplex: vec![v.1],
                reason: format!("vertex indices must be 0..{vertex_count} without gaps"),
            });
        }
        let faces: Vec<Vec<Vec<usize>>> = layers.into_iter().map(|l| l.into_iter().collect()).collect();
        let index = faces
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Ok(Self {
            facets: sorted_facets,
            faces,
            index,
        })
    }

    /// One maximal simplex per line as space-separated 0-based vertex indices;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut facets = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let simplex = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: n + 1,
                    message: format!("bad vertex index: {e}"),
                })?;
            facets.push(simplex);
        }
        Self::build(facets)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facets {
            let line: Vec<String> = f.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.faces[0].len()
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Faces of dimension `k`, sorted lexicographically.
    pub fn faces(&self, k: usize) -> &[Vec<usize>] {
        self.faces.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn face_index(&self, simplex: &[usize]) -> Option<usize> {
        self.index.get(simplex.len().checked_sub(1)?)?.get(simplex).copied()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        self.faces(1)
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        crate::report::euler_sum(&self.f_vector())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_and_sphere() {
        let c = SimplicialComplex::build(vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(c.f_vector(), vec![3, 3]);
        assert_eq!(c.euler_characteristic(), 0);
        let s = SimplicialComplex::parse("0 1 2\n0 1 3\n0 2 3\n1 2 3\n").unwrap();
        assert_eq!(s.f_vector(), vec![4, 6, 4]);
        assert_eq!(s.euler_characteristic(), 2);
        assert_eq!(s.face_index(&[0, 3]), Some(2));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(SimplicialComplex::build(vec![]), Err(Error::EmptyComplex)));
        assert!(matches!(
            SimplicialComplex::build(vec![vec![0, 1, 1]]),
            Err(Error::MalformedSimplex { .. })
        ));
        assert!(matches!(
            SimplicialComplex::build(vec![vec![0, 2]]),
            Err(Error::MalformedSimplex { .. })
        ));
        assert!(matches!(
            SimplicialComplex::parse("0 x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let text = "0 1 3\n0 1 5\n2 4 6\n";
        assert_eq!(SimplicialComplex::parse(text).unwrap().to_text(), text);
    }
}
