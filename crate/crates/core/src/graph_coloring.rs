//! Monochromatic edges under a uniform random vertex coloring.
//!
//! For a simple graph `G` with `m` edges and i.i.d. uniform colors on `c`
//! values, `T₂ = Σ_{ij ∈ E} 1{X_i = X_j}` has mean `m/c` and variance
//! `(m/c)(1 − 1/c)`. Its standardization is a degenerate U-statistic of order
//! two with kernel [`psi_kernel`].

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{BoundMetadata, BoundReport, Term};
use crate::error::{Error, Result};
use crate::math::{powf, sqrt, SQRT_2_OVER_PI};
use crate::product_space::{DiscreteDistribution, Functional, ProductSpace, DEFAULT_MAX_OUTCOMES};

/// A simple undirected graph on vertices `0..n`; edges are stored with `u < v`
/// in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for (line, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(alloc::format!("edge ({a}, {b}) outside 0..{n}")));
            }
            if a == b {
                return Err(Error::SelfLoop { line: line + 1 });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if adjacency[u].contains(&v) {
                return Err(Error::DuplicateEdge { line: line + 1 });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            normalized.push((u, v));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { n, edges: normalized, adjacency })
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle of length at least 3 is simple")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
        Self::new(n, &edges).expect("path is simple")
    }

    /// Star with center `0` and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::new(leaves + 1, &edges).expect("star is simple")
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// `Σ_{(u,v) ∈ E} 1{colors[u] = colors[v]}`.
    pub fn monochromatic_edges(&self, colors: &[usize]) -> usize {
        self.edges.iter().filter(|&&(u, v)| colors[u] == colors[v]).count()
    }

    pub fn stats(&self) -> GraphStats {
        let sorted = degree_sort(self);
        let (s1, s2) = sorted.wedge_sums();
        GraphStats { n: self.n, m: self.edges.len(), c4_count: count_c4(self), wedge_sums: (s1, s2) }
    }

    /// `(Σ_{i<j<k} a_ik a_jk, Σ_{i<j<k} a_ij a_jk)` in the current labeling.
    pub fn wedge_sums(&self) -> (u64, u64) {
        let mut s1 = 0u64;
        let mut s2 = 0u64;
        for v in 0..self.n {
            let lower = self.adjacency[v].iter().filter(|&&u| u < v).count() as u64;
            let higher = self.adjacency[v].len() as u64 - lower;
            s1 += lower * lower.saturating_sub(1) / 2;
            s2 += lower * higher;
        }
        (s1, s2)
    }
}

/// Parses `u v` lines with 0-based ids; blank lines and `#` comments are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let mut next_id = || -> Result<usize> {
            let token = parts
                .next()
                .ok_or_else(|| Error::ParseError { line, message: String::from("expected two vertex ids") })?;
            token
                .parse::<usize>()
                .map_err(|_| Error::ParseError { line, message: alloc::format!("invalid vertex id {token:?}") })
        };
        let u = next_id()?;
        let v = next_id()?;
        if parts.next().is_some() {
            return Err(Error::ParseError { line, message: String::from("expected exactly two vertex ids") });
        }
        if u == v {
            return Err(Error::SelfLoop { line });
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v));
        lines.push(line);
    }
    Graph::new(n, &edges).map_err(|e| match e {
        Error::DuplicateEdge { line } => Error::DuplicateEdge { line: lines[line - 1] },
        Error::SelfLoop { line } => Error::SelfLoop { line: lines[line - 1] },
        other => other,
    })
}

/// Relabels vertices so that degrees are non-increasing; ties keep the original order.
pub fn degree_sort(g: &Graph) -> Graph {
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut new_label = vec![0usize; g.n];
    for (label, &old) in order.iter().enumerate() {
        new_label[old] = label;
    }
    let edges: Vec<_> = g.edges.iter().map(|&(u, v)| (new_label[u], new_label[v])).collect();
    Graph::new(g.n, &edges).expect("relabeling preserves simplicity")
}

/// Number of 4-cycles. Summing `C(codeg(u, v), 2)` over vertex pairs counts
/// every 4-cycle once per diagonal, hence the final halving.
pub fn count_c4(g: &Graph) -> u64 {
    let mut codeg = vec![0u64; g.n];
    let mut touched = Vec::new();
    let mut total = 0u64;
    for u in 0..g.n {
        for &w in &g.adjacency[u] {
            for &v in &g.adjacency[w] {
                if v > u {
                    if codeg[v] == 0 {
                        touched.push(v);
                    }
                    codeg[v] += 1;
                }
            }
        }
        for v in touched.drain(..) {
            let c = codeg[v];
            total += c * (c - 1) / 2;
            codeg[v] = 0;
        }
    }
    total / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub c4_count: u64,
    /// Both path sums after degree-sorted relabeling.
    pub wedge_sums: (u64, u64),
}

fn check_colors(c: usize) -> Result<()> {
    if c < 2 {
        return Err(Error::BadColors(c));
    }
    Ok(())
}

/// `(E[T₂], Var(T₂)) = (m/c, (m/c)(1 − 1/c))`.
pub fn t2_moments(m: usize, c: usize) -> Result<(f64, f64)> {
    check_colors(c)?;
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let mean = m as f64 / c as f64;
    Ok((mean, mean * (1.0 - 1.0 / c as f64)))
}

/// `ψ(x, y) = 1{x = y} − 1/c`.
pub fn psi_kernel(c: usize, x: usize, y: usize) -> f64 {
    (x == y) as u8 as f64 - 1.0 / c as f64
}

/// `ρ(x, y, z) = 1{x = y = z} − (1/c)(1{x = y} + 1{x = z} + 1{y = z}) + 2/c²`.
pub fn rho_kernel(c: usize, x: usize, y: usize, z: usize) -> f64 {
    let c = c as f64;
    let eq = |a: usize, b: usize| (a == b) as u8 as f64;
    eq(x, y) * eq(y, z) - (eq(x, y) + eq(x, z) + eq(y, z)) / c + 2.0 / (c * c)
}

/// The product space of `n` uniform colors `0..c` and the standardized count
/// `(T₂ − m/c)/σ`.
pub fn mono_edge_functional(g: &Graph, c: usize) -> Result<(Arc<ProductSpace>, Functional)> {
    mono_edge_functional_with_cap(g, c, DEFAULT_MAX_OUTCOMES)
}

pub fn mono_edge_functional_with_cap(g: &Graph, c: usize, cap: usize) -> Result<(Arc<ProductSpace>, Functional)> {
    let (mean, var) = t2_moments(g.num_edges(), c)?;
    let colors = DiscreteDistribution::uniform((0..c).map(|x| x as f64).collect())?;
    let space = Arc::new(ProductSpace::with_cap(vec![colors; g.num_vertices()], cap)?);
    let sigma = sqrt(var);
    let f = Functional::from_digits_fn(&space, |digits| (g.monochromatic_edges(digits) as f64 - mean) / sigma)?;
    Ok((space, f))
}

/// The explicit Wasserstein bound for the standardized monochromatic-edge count.
pub fn mono_bound(stats: &GraphStats, c: usize) -> Result<BoundReport> {
    check_colors(c)?;
    if stats.m == 0 {
        return Err(Error::EmptyGraph);
    }
    let m = stats.m as f64;
    let cf = c as f64;
    let rm = sqrt(m);
    let r2 = sqrt(2.0);
    let n4 = stats.c4_count as f64;
    let inner_first =
        3.0 * (cf - 2.0) / m + 10.0 * r2 / rm + 15.0 * r2 / (rm * (cf - 1.0)) + 30.0 * n4 / (m * m * (cf - 1.0));
    let inner_second = (cf - 1.0) / m + 5.0 * r2 / (rm * (cf - 1.0)) + 7.0 * r2 / rm;
    let terms = vec![
        Term { label: "first".to_string(), value: SQRT_2_OVER_PI * sqrt(inner_first), included: true },
        Term { label: "second".to_string(), value: r2 * sqrt(inner_second), included: true },
    ];
    let meta = BoundMetadata {
        params: vec![("c".to_string(), cf), ("m".to_string(), m), ("c4_count".to_string(), n4)],
        ..BoundMetadata::default()
    };
    Ok(BoundReport::new("mono_wasserstein", terms, meta))
}

/// Fang's Wasserstein bound `3√(c/m) + 10√2/√c + 2^{7/4}/(√π·m^{1/4})`.
pub fn fang_bound(m: usize, c: usize) -> f64 {
    let (m, c) = (m as f64, c as f64);
    3.0 * sqrt(c / m) + 10.0 * sqrt(2.0) / sqrt(c) + powf(2.0, 1.75) / (sqrt(core::f64::consts::PI) * powf(m, 0.25))
}
