//! Undirected multigraphs given by edge lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge list over vertices `0..n`; loops and parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge {i} = ({u},{v}) has an endpoint outside 0..{n}")));
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph { n, edges }
    }

    pub fn cycle(n: usize) -> Graph {
        Graph { n, edges: (0..n).map(|i| (i, (i + 1) % n)).collect() }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(self.n);
        let mut parts = self.n;
        for &(u, v) in &self.edges {
            if uf.union(u, v) {
                parts -= 1;
            }
        }
        parts == 1
    }
}
