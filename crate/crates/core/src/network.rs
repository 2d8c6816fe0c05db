//! Newman-Watts-Strogatz small-world graphs.
//!
//! A ring lattice where every node links to its `k/2` nearest neighbours on
//! each side, plus random shortcuts. Each lattice edge gets one shortcut trial
//! with probability `beta`; a successful trial joins two uniformly chosen
//! distinct, not yet adjacent nodes. Lattice edges are never removed, so every
//! degree is at least `k` and the graph stays connected.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpec {
    pub n: usize,
    /// Lattice degree; even, `k/2` neighbours on each side.
    pub k: usize,
    pub beta: f64,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || !self.k.is_multiple_of(2) {
            return Err(invalid("k", "lattice degree must be even and positive"));
        }
        if self.k >= self.n {
            return Err(invalid("k", "lattice degree must be below the node count"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(invalid("beta", "shortcut probability must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Undirected simple graph stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Distance-1 neighbourhood of `node`, ascending.
    pub fn neighbors(&self, node: usize) -> Result<&[usize]> {
        self.adjacency
            .get(node)
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange {
                node,
                n: self.node_count(),
            })
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|adj| adj.binary_search(&b).is_ok())
    }

    /// Inserts `a -- b`. Returns false for self-loops and existing edges.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        match self.adjacency[a].binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                self.adjacency[a].insert(pos, b);
                let pos = self.adjacency[b].binary_search(&a).unwrap_err();
                self.adjacency[b].insert(pos, a);
                true
            }
        }
    }

    /// Every edge once as `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| {
            adj.iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    fn bfs_distances(&self, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut dist = vec![0; n];
        self.bfs_distances(0, &mut dist, &mut VecDeque::new());
        dist.iter().all(|&d| d != usize::MAX)
    }

    /// Mean shortest-path length over all ordered pairs of distinct nodes, or
    /// `None` if the graph is disconnected or has fewer than two nodes.
    pub fn average_path_length(&self) -> Option<f64> {
        let n = self.node_count();
        if n < 2 {
            return None;
        }
        let mut dist = vec![0; n];
        let mut queue = VecDeque::with_capacity(n);
        let mut total: u64 = 0;
        for source in 0..n {
            self.bfs_distances(source, &mut dist, &mut queue);
            for &d in &dist {
                if d == usize::MAX {
                    return None;
                }
                total += d as u64;
            }
        }
        Some(total as f64 / (n * (n - 1)) as f64)
    }
}

/// Ring lattice of degree `k` on `n` nodes.
pub fn ring_lattice(n: usize, k: usize) -> Graph {
    let mut graph = Graph::empty(n);
    for i in 0..n {
        for offset in 1..=k / 2 {
            graph.add_edge(i, (i + offset) % n);
        }
    }
    graph
}

pub fn generate_nws<R: Rng + ?Sized>(spec: &NetworkSpec, rng: &mut R) -> Result<Graph> {
    spec.validate()?;
    let n = spec.n;
    let mut graph = ring_lattice(n, spec.k);
    let lattice_edges = n * spec.k / 2;
    let max_edges = n * (n - 1) / 2;
    let mut edges = graph.edge_count();
    for _ in 0..lattice_edges {
        if !rng.random_bool(spec.beta) {
            continue;
        }
        if edges >= max_edges {
            break;
        }
        loop {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if graph.add_edge(a, b) {
                edges += 1;
                break;
            }
        }
    }
    Ok(graph)
}
