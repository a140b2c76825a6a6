//! Per-page word co-occurrence graphs and their aggregated metrics.

use std::collections::{BTreeSet, HashMap};

/// Undirected simple graph over unique tokens.
///
/// Nodes keep first-appearance order; neighbour sets are ordered by node
/// index, so every metric is computed in a fixed order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<BTreeSet<usize>>,
    edges: usize,
}

impl WordGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, token: &str) -> usize {
        if let Some(&i) = self.index.get(token) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(token.to_string());
        self.index.insert(token.to_string(), i);
        self.adjacency.push(BTreeSet::new());
        i
    }

    /// Adds the edge `{u, v}`. Self-loops and repeats are ignored.
    pub fn add_edge(&mut self, u: &str, v: &str) -> bool {
        let a = self.add_node(u);
        let b = self.add_node(v);
        if a == b || !self.adjacency[a].insert(b) {
            return false;
        }
        self.adjacency[b].insert(a);
        self.edges += 1;
        true
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        match (self.index.get(u), self.index.get(v)) {
            (Some(&a), Some(&b)) => self.adjacency[a].contains(&b),
            _ => false,
        }
    }

    pub fn neighbors(&self, token: &str) -> impl Iterator<Item = &str> {
        self.index
            .get(token)
            .into_iter()
            .flat_map(|&i| self.adjacency[i].iter().map(|&j| self.nodes[j].as_str()))
    }

    pub fn degree(&self, token: &str) -> usize {
        self.index
            .get(token)
            .map_or(0, |&i| self.adjacency[i].len())
    }

    fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(BTreeSet::len)
    }

    /// Number of edges among the neighbours of node `i`.
    fn triangles_at(&self, i: usize) -> usize {
        let nbrs: Vec<usize> = self.adjacency[i].iter().copied().collect();
        let mut count = 0;
        for (k, &a) in nbrs.iter().enumerate() {
            let adj_a = &self.adjacency[a];
            count += nbrs[k + 1..].iter().filter(|b| adj_a.contains(b)).count();
        }
        count
    }
}

/// Connects every pair of distinct tokens that fall inside some run of
/// `window` consecutive tokens.
pub fn build_word_graph(tokens: &[String], window: usize) -> WordGraph {
    let window = window.max(2);
    let mut g = WordGraph::new();
    for (i, t) in tokens.iter().enumerate() {
        g.add_node(t);
        for prev in &tokens[i.saturating_sub(window - 1)..i] {
            g.add_edge(prev, t);
        }
    }
    g
}

pub fn average_degree(g: &WordGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    g.degrees().sum::<usize>() as f64 / n as f64
}

pub fn density(g: &WordGraph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        return 0.0;
    }
    2.0 * g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0))
}

/// Mean local clustering; nodes of degree below two contribute zero.
pub fn clustering_coefficient(g: &WordGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let total: f64 = (0..n)
        .map(|i| {
            let d = g.adjacency[i].len();
            if d < 2 {
                0.0
            } else {
                g.triangles_at(i) as f64 / (d * (d - 1) / 2) as f64
            }
        })
        .sum();
    total / n as f64
}

/// Mean and maximum of `deg(v) / (|V| - 1)`.
pub fn degree_centrality_stats(g: &WordGraph) -> (f64, f64) {
    let n = g.node_count();
    if n < 2 {
        return (0.0, 0.0);
    }
    let denom = (n - 1) as f64;
    let (sum, max) = g
        .degrees()
        .fold((0usize, 0usize), |(s, m), d| (s + d, m.max(d)));
    (sum as f64 / denom / n as f64, max as f64 / denom)
}

/// Metrics of one page's graph.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PageGraphMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub average_degree: f64,
    pub clustering: f64,
    pub degree_centrality_mean: f64,
    pub degree_centrality_max: f64,
}

impl PageGraphMetrics {
    pub fn of(g: &WordGraph) -> Self {
        let (dc_mean, dc_max) = degree_centrality_stats(g);
        Self {
            nodes: g.node_count(),
            edges: g.edge_count(),
            density: density(g),
            average_degree: average_degree(g),
            clustering: clustering_coefficient(g),
            degree_centrality_mean: dc_mean,
            degree_centrality_max: dc_max,
        }
    }
}

/// Document-level graph features.
///
/// Each per-page property is summarised by its mean and maximum over pages;
/// `degree_centrality_peak` is the largest single-node centrality seen on
/// any page.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GraphFeatureBlock {
    pub node_count_total: usize,
    pub edge_count_total: usize,
    pub density_mean: f64,
    pub density_max: f64,
    pub avg_degree_mean: f64,
    pub avg_degree_max: f64,
    pub clustering_mean: f64,
    pub clustering_max: f64,
    pub degree_centrality_mean: f64,
    pub degree_centrality_max: f64,
    pub degree_centrality_peak: f64,
}

impl GraphFeatureBlock {
    pub const LEN: usize = 11;

    pub fn to_values(&self) -> Vec<f64> {
        vec![
            self.node_count_total as f64,
            self.edge_count_total as f64,
            self.density_mean,
            self.density_max,
            self.avg_degree_mean,
            self.avg_degree_max,
            self.clustering_mean,
            self.clustering_max,
            self.degree_centrality_mean,
            self.degree_centrality_max,
            self.degree_centrality_peak,
        ]
    }
}

pub fn aggregate_page_graphs(per_page: &[PageGraphMetrics]) -> GraphFeatureBlock {
    if per_page.is_empty() {
        return GraphFeatureBlock::default();
    }
    let n = per_page.len() as f64;
    let mean = |f: fn(&PageGraphMetrics) -> f64| per_page.iter().map(f).sum::<f64>() / n;
    let max = |f: fn(&PageGraphMetrics) -> f64| per_page.iter().map(f).fold(0.0, f64::max);
    GraphFeatureBlock {
        node_count_total: per_page.iter().map(|p| p.nodes).sum(),
        edge_count_total: per_page.iter().map(|p| p.edges).sum(),
        density_mean: mean(|p| p.density),
        density_max: max(|p| p.density),
        avg_degree_mean: mean(|p| p.average_degree),
        avg_degree_max: max(|p| p.average_degree),
        clustering_mean: mean(|p| p.clustering),
        clustering_max: max(|p| p.clustering),
        degree_centrality_mean: mean(|p| p.degree_centrality_mean),
        degree_centrality_max: max(|p| p.degree_centrality_mean),
        degree_centrality_peak: max(|p| p.degree_centrality_max),
    }
}
