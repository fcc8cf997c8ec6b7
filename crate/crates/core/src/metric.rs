//! Weighted graphs, the shortest-path metrics they induce, geodesic
//! enumeration and set distances.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_traits::Zero;

use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Rational,
}

/// Undirected graph with positive rational edge weights.
///
/// Edges are stored with `u < v`; adjacency lists are sorted by neighbour
/// index so every traversal visits children in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, Rational)>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, Rational)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        let mut out = Vec::new();
        for (u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if w <= Rational::zero() {
                return Err(Error::InvalidWeight { u, v, w });
            }
            let (u, v) = (u.min(v), u.max(v));
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
            out.push(Edge { u, v, w });
        }
        for list in &mut adj {
            list.sort_by_key(|&(x, _)| x);
        }
        Ok(Graph { n, edges: out, adj })
    }

    /// Unit-weight graph.
    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(u, v)| (u, v, rational::int(1))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, Rational)] {
        &self.adj[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<Rational> {
        let list = self.adj.get(u)?;
        list.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| list[i].1)
    }

    /// Largest edge weight, or 1 for an edgeless graph.
    pub fn max_weight(&self) -> Rational {
        self.edges.iter().map(|e| e.w).max().unwrap_or_else(|| rational::int(1))
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() == self.n - 1 && self.is_connected()
    }
}

/// Point set `0..n` with an exact symmetric distance table.
///
/// Distances are stored as integers over one common denominator `scale`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    n: usize,
    scale: i64,
    table: Vec<i64>,
}

impl FiniteMetricSpace {
    /// Builds a space from an explicit table, checking every metric axiom.
    pub fn from_table(rows: &[Vec<Rational>]) -> Result<Self> {
        let n = rows.len();
        let mut scale = 1i64;
        for row in rows {
            if row.len() != n {
                return Err(Error::NotAMetric("table is not square".into()));
            }
            for r in row {
                scale = rational::lcm_checked(scale, *r.denom()).ok_or(Error::Overflow)?;
            }
        }
        let mut table = Vec::with_capacity(n * n);
        for row in rows {
            for r in row {
                table.push(r.numer().checked_mul(scale / r.denom()).ok_or(Error::Overflow)?);
            }
        }
        let space = FiniteMetricSpace { n, scale, table };
        space.check_axioms()?;
        Ok(space)
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.raw(i, i) != 0 {
                return Err(Error::NotAMetric(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                if self.raw(i, j) != self.raw(j, i) {
                    return Err(Error::NotAMetric(format!("d({i},{j}) != d({j},{i})")));
                }
                if i != j && self.raw(i, j) <= 0 {
                    return Err(Error::NotAMetric(format!("d({i},{j}) <= 0")));
                }
                for k in 0..n {
                    if self.raw(i, k) > self.raw(i, j) + self.raw(j, k) {
                        return Err(Error::NotAMetric(format!("triangle inequality fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.raw(i, j), self.scale)
    }

    /// Distance times [`scale`](Self::scale).
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> i64 {
        self.table[i * self.n + j]
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn from_raw(&self, raw: i64) -> Rational {
        Rational::new(raw, self.scale)
    }

    /// Same space with every distance multiplied by `s > 0`.
    pub fn scaled_by(&self, s: Rational) -> Result<Self> {
        if s <= Rational::zero() {
            return Err(Error::NotAMetric("scale factor must be positive".into()));
        }
        let scale = self.scale.checked_mul(*s.denom()).ok_or(Error::Overflow)?;
        let table = self
            .table
            .iter()
            .map(|&d| d.checked_mul(*s.numer()).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteMetricSpace {
            n: self.n,
            scale,
            table,
        })
    }

    pub fn rational_table(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    pub(crate) fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.n {
            Err(Error::VertexOutOfRange { vertex: x, n: self.n })
        } else {
            Ok(())
        }
    }

    pub(crate) fn raw_point_to_set(&self, x: usize, set: &[usize]) -> i64 {
        set.iter().map(|&s| self.raw(x, s)).min().unwrap_or(i64::MAX)
    }

    pub(crate) fn raw_hausdorff(&self, a: &[usize], b: &[usize]) -> i64 {
        let one = a.iter().map(|&x| self.raw_point_to_set(x, b)).max().unwrap_or(0);
        let two = b.iter().map(|&y| self.raw_point_to_set(y, a)).max().unwrap_or(0);
        one.max(two)
    }
}

/// All-pairs shortest-path distances of a connected graph.
pub fn build_space(g: &Graph) -> Result<FiniteMetricSpace> {
    let (scale, adj) = scaled_adjacency(g)?;
    let n = g.n();
    let mut table = vec![0i64; n * n];
    for s in 0..n {
        let d = dijkstra(&adj, s)?;
        for (t, dt) in d.into_iter().enumerate() {
            match dt {
                Some(v) => table[s * n + t] = v,
                None => return Err(Error::DisconnectedGraph(s.min(t), s.max(t))),
            }
        }
    }
    Ok(FiniteMetricSpace { n, scale, table })
}

type RawAdjacency = Vec<Vec<(usize, i64)>>;

fn scaled_adjacency(g: &Graph) -> Result<(i64, RawAdjacency)> {
    let mut scale = 1i64;
    for e in g.edges() {
        scale = rational::lcm_checked(scale, *e.w.denom()).ok_or(Error::Overflow)?;
    }
    let adj = (0..g.n())
        .map(|u| {
            g.neighbors(u)
                .iter()
                .map(|&(v, w)| {
                    w.numer()
                        .checked_mul(scale / w.denom())
                        .map(|x| (v, x))
                        .ok_or(Error::Overflow)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((scale, adj))
}

fn dijkstra(adj: &RawAdjacency, s: usize) -> Result<Vec<Option<i64>>> {
    let mut dist: Vec<Option<i64>> = vec![None; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(0);
    heap.push(Reverse((0i64, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|cur| cur < d) {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d.checked_add(w).ok_or(Error::Overflow)?;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    Ok(dist)
}

/// Nonempty walk along graph edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexPath(Vec<usize>);

impl VertexPath {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("vertex path is empty".into()));
        }
        Ok(VertexPath(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Geodesics between two vertices, possibly cut off at the enumeration cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geodesics {
    pub paths: Vec<VertexPath>,
    pub truncated: bool,
}

/// A connected graph together with its shortest-path metric.
#[derive(Debug, Clone)]
pub struct GeodesicSpace {
    graph: Graph,
    metric: FiniteMetricSpace,
    adj: RawAdjacency,
}

impl GeodesicSpace {
    pub fn new(graph: Graph) -> Result<Self> {
        let metric = build_space(&graph)?;
        let (scale, adj) = scaled_adjacency(&graph)?;
        debug_assert_eq!(scale, metric.scale());
        Ok(GeodesicSpace { graph, metric, adj })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn metric(&self) -> &FiniteMetricSpace {
        &self.metric
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn dist(&self, i: usize, j: usize) -> Rational {
        self.metric.dist(i, j)
    }

    pub fn max_weight(&self) -> Rational {
        self.graph.max_weight()
    }

    /// Sum of edge weights along `path`; errors if a step is not an edge.
    pub fn path_length(&self, path: &VertexPath) -> Result<Rational> {
        let mut total = Rational::zero();
        for (i, pair) in path.vertices().windows(2).enumerate() {
            self.metric.check_point(pair[0])?;
            let w = self
                .graph
                .weight(pair[0], pair[1])
                .ok_or_else(|| Error::InvalidPath(format!("step {i}: {} and {} are not adjacent", pair[0], pair[1])))?;
            total += w;
        }
        self.metric.check_point(path.last())?;
        Ok(total)
    }

    pub fn is_geodesic(&self, path: &VertexPath) -> bool {
        self.path_length(path)
            .is_ok_and(|len| len == self.dist(path.first(), path.last()))
    }

    /// Shortest `a`–`b` paths by DFS over the shortest-path DAG, children in
    /// vertex-index order. At most `cap` paths are returned; `truncated` is
    /// set when more exist.
    pub fn geodesics(&self, a: usize, b: usize, cap: usize) -> Geodesics {
        let mut paths = Vec::new();
        let mut truncated = false;
        if cap == 0 {
            return Geodesics { paths, truncated: true };
        }
        let mut stack = vec![a];
        self.geodesic_dfs(a, b, cap, &mut stack, &mut paths, &mut truncated);
        Geodesics { paths, truncated }
    }

    fn geodesic_dfs(
        &self,
        a: usize,
        b: usize,
        cap: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<VertexPath>,
        truncated: &mut bool,
    ) {
        let u = *stack.last().expect("nonempty stack");
        if u == b {
            if out.len() == cap {
                *truncated = true;
            } else {
                out.push(VertexPath(stack.clone()));
            }
            return;
        }
        let m = &self.metric;
        let target = m.raw(a, b);
        for &(v, w) in &self.adj[u] {
            if *truncated {
                return;
            }
            if m.raw(a, u) + w == m.raw(a, v) && m.raw(a, v) + m.raw(v, b) == target {
                stack.push(v);
                self.geodesic_dfs(a, b, cap, stack, out, truncated);
                stack.pop();
            }
        }
    }

    /// Shortest path from `a` to `b` using only vertices in `allowed`, ties
    /// broken toward the lowest-index predecessor. `None` if unreachable.
    pub fn induced_shortest_path(&self, allowed: &[bool], a: usize, b: usize) -> Option<VertexPath> {
        if !allowed[a] || !allowed[b] {
            return None;
        }
        let n = self.n();
        let mut dist: Vec<Option<i64>> = vec![None; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[a] = Some(0);
        heap.push(Reverse((0i64, a)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, w) in &self.adj[u] {
                if !allowed[v] || done[v] {
                    continue;
                }
                let nd = d + w;
                let better = match dist[v] {
                    None => true,
                    Some(cur) => nd < cur || (nd == cur && pred[v].is_some_and(|p| u < p)),
                };
                if better {
                    dist[v] = Some(nd);
                    pred[v] = Some(u);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        dist[b]?;
        let mut rev = vec![b];
        let mut cur = b;
        while cur != a {
            cur = pred[cur]?;
            rev.push(cur);
        }
        rev.reverse();
        Some(VertexPath(rev))
    }
}

/// Hausdorff distance between two nonempty point sets.
pub fn hausdorff_distance(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<Rational> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    for &x in a.iter().chain(b) {
        space.check_point(x)?;
    }
    Ok(space.from_raw(space.raw_hausdorff(a, b)))
}

pub fn dist_point_to_set(space: &FiniteMetricSpace, x: usize, set: &[usize]) -> Result<Rational> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    space.check_point(x)?;
    for &s in set {
        space.check_point(s)?;
    }
    Ok(space.from_raw(space.raw_point_to_set(x, set)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn cycle(n: usize) -> Graph {
        Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::unweighted(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn grid(k: usize) -> Graph {
        let mut e = Vec::new();
        for r in 0..k {
            for c in 0..k {
                if c + 1 < k {
                    e.push((r * k + c, r * k + c + 1));
                }
                if r + 1 < k {
                    e.push((r * k + c, (r + 1) * k + c));
                }
            }
        }
        Graph::unweighted(k * k, e).unwrap()
    }

    /// Enumerates every simple path and keeps the shortest ones.
    fn brute_geodesics(g: &Graph, a: usize, b: usize) -> (Rational, Vec<Vec<usize>>) {
        fn go(g: &Graph, b: usize, cur: &mut Vec<usize>, len: Rational, out: &mut Vec<(Rational, Vec<usize>)>) {
            let u = *cur.last().unwrap();
            if u == b {
                out.push((len, cur.clone()));
                return;
            }
            for &(v, w) in g.neighbors(u) {
                if !cur.contains(&v) {
                    cur.push(v);
                    go(g, b, cur, len + w, out);
                    cur.pop();
                }
            }
        }
        let mut all = Vec::new();
        go(g, b, &mut vec![a], Rational::zero(), &mut all);
        let best = all.iter().map(|p| p.0).min().unwrap();
        let mut paths: Vec<_> = all.into_iter().filter(|p| p.0 == best).map(|p| p.1).collect();
        paths.sort();
        (best, paths)
    }

    #[test]
    fn path_graph_distance() {
        let s = build_space(&path(3)).unwrap();
        assert_eq!(s.dist(0, 2), int(2));
    }

    #[test]
    fn single_vertex_space() {
        let s = build_space(&Graph::unweighted(1, []).unwrap()).unwrap();
        assert_eq!(s.rational_table(), vec![vec![int(0)]]);
    }

    #[test]
    fn cycle5_matches_path_enumeration() {
        let g = cycle(5);
        let s = build_space(&g).unwrap();
        assert_eq!(brute_geodesics(&g, 0, 2).0, int(2));
        assert_eq!(brute_geodesics(&g, 0, 3).0, int(2));
        assert_eq!(s.dist(0, 2), int(2));
        assert_eq!(s.dist(0, 3), int(2));
    }

    #[test]
    fn rejects_bad_graphs() {
        assert_eq!(
            build_space(&Graph::unweighted(3, [(0, 1)]).unwrap()),
            Err(Error::DisconnectedGraph(0, 2))
        );
        assert!(matches!(
            Graph::new(2, [(0, 1, int(0))]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            Graph::new(2, [(0, 1, int(-1))]),
            Err(Error::InvalidWeight { .. })
        ));
        assert_eq!(Graph::unweighted(2, [(1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(Graph::unweighted(2, [(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(
            Graph::unweighted(2, [(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        );
    }

    #[test]
    fn rational_weights_use_common_denominator() {
        let g = Graph::new(
            3,
            [(0, 1, Rational::new(1, 2)), (1, 2, Rational::new(1, 3)), (0, 2, int(1))],
        )
        .unwrap();
        let s = build_space(&g).unwrap();
        assert_eq!(s.scale(), 6);
        assert_eq!(s.dist(0, 2), Rational::new(5, 6));
    }

    #[test]
    fn geodesics_small_cases() {
        let sp = GeodesicSpace::new(path(3)).unwrap();
        let g = sp.geodesics(0, 2, 10);
        assert_eq!(g.paths, vec![VertexPath(vec![0, 1, 2])]);
        assert!(!g.truncated);

        let sp = GeodesicSpace::new(cycle(4)).unwrap();
        let g = sp.geodesics(0, 2, 10);
        assert_eq!(g.paths, vec![VertexPath(vec![0, 1, 2]), VertexPath(vec![0, 3, 2])]);

        let g = sp.geodesics(1, 1, 10);
        assert_eq!(g.paths, vec![VertexPath(vec![1])]);
    }

    #[test]
    fn grid_corner_geodesics_match_dfs_oracle() {
        let graph = grid(3);
        let (len, oracle) = brute_geodesics(&graph, 0, 8);
        assert_eq!(oracle.len(), 6);
        assert_eq!(len, int(4));
        let sp = GeodesicSpace::new(graph).unwrap();
        let g = sp.geodesics(0, 8, 10);
        assert!(!g.truncated);
        let got: Vec<Vec<usize>> = g.paths.iter().map(|p| p.vertices().to_vec()).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn geodesic_cap_truncates() {
        let sp = GeodesicSpace::new(grid(3)).unwrap();
        let g = sp.geodesics(0, 8, 4);
        assert_eq!(g.paths.len(), 4);
        assert!(g.truncated);
        let g = sp.geodesics(0, 8, 6);
        assert_eq!(g.paths.len(), 6);
        assert!(!g.truncated);
    }

    #[test]
    fn set_distances() {
        let p3 = build_space(&path(3)).unwrap();
        assert_eq!(hausdorff_distance(&p3, &[0, 1], &[1, 0]).unwrap(), int(0));
        assert_eq!(hausdorff_distance(&p3, &[0], &[2]).unwrap(), int(2));
        assert_eq!(dist_point_to_set(&p3, 0, &[2]).unwrap(), int(2));
        assert_eq!(dist_point_to_set(&p3, 1, &[0, 1]).unwrap(), int(0));
        assert_eq!(hausdorff_distance(&p3, &[], &[0]), Err(Error::EmptySet));
        assert_eq!(dist_point_to_set(&p3, 0, &[]), Err(Error::EmptySet));

        let c6 = build_space(&cycle(6)).unwrap();
        // Oracle: every interior vertex of one arc is one step from an endpoint.
        let a = [0, 1, 2, 3];
        let b = [0, 5, 4, 3];
        let mut worst = 0;
        for &x in &a {
            worst = worst.max(b.iter().map(|&y| c6.raw(x, y)).min().unwrap());
        }
        for &y in &b {
            worst = worst.max(a.iter().map(|&x| c6.raw(x, y)).min().unwrap());
        }
        assert_eq!(worst, 1);
        assert_eq!(hausdorff_distance(&c6, &a, &b).unwrap(), int(1));
        assert_eq!(
            dist_point_to_set(&c6, 3, &[0, 1]).unwrap(),
            int(c6.raw(3, 0).min(c6.raw(3, 1)))
        );
        assert_eq!(dist_point_to_set(&c6, 3, &[0, 1]).unwrap(), int(2));
    }

    #[test]
    fn from_table_checks_axioms() {
        let bad = vec![
            vec![int(0), int(1), int(5)],
            vec![int(1), int(0), int(1)],
            vec![int(5), int(1), int(0)],
        ];
        assert!(matches!(FiniteMetricSpace::from_table(&bad), Err(Error::NotAMetric(_))));
        let good = build_space(&cycle(5)).unwrap();
        assert_eq!(FiniteMetricSpace::from_table(&good.rational_table()).unwrap(), good);
    }

    #[test]
    fn induced_path_respects_allowed_set() {
        let sp = GeodesicSpace::new(cycle(6)).unwrap();
        let mut allowed = vec![true; 6];
        allowed[1] = false;
        let p = sp.induced_shortest_path(&allowed, 0, 2).unwrap();
        assert_eq!(p.vertices(), &[0, 5, 4, 3, 2]);
        allowed[4] = false;
        assert!(sp.induced_shortest_path(&allowed, 0, 2).is_none());
    }
}
