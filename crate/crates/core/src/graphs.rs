//! Stable weighted multigraphs and their invariants.
//!
//! Edges are labelled by their index and carry an orientation (tail, head)
//! used only for cycle-space bookkeeping; as a multigraph the edges are
//! unordered pairs. Self-edges are allowed. Isomorphisms respect vertex
//! weights and act on edge labels.

use crate::exactlin::{rational_rank, RatMatrix};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid edge index {0}")]
    InvalidEdge(usize),
    #[error("Laplacian undefined for weighted graphs")]
    WeightedLaplacian,
    #[error("graph must be connected")]
    Disconnected,
    #[error("{0}")]
    Invalid(String),
}

/// Finite multigraph with non-negative integer vertex weights.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub weights: Vec<u32>,
    /// (tail, head) pairs; the index in this list is the edge label.
    pub edges: Vec<(usize, usize)>,
}

impl WeightedGraph {
    pub fn new(weights: Vec<u32>, edges: Vec<(usize, usize)>) -> Self {
        let n = weights.len();
        assert!(edges.iter().all(|&(u, v)| u < n && v < n), "edge endpoint out of range");
        WeightedGraph { weights, edges }
    }

    /// Unweighted graph on `n` vertices.
    pub fn unweighted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Self::new(vec![0; n], edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn total_weight(&self) -> u32 {
        self.weights.iter().sum()
    }

    pub fn components(&self) -> Vec<usize> {
        component_labels(self.n_vertices(), self.edges.iter().copied())
    }

    pub fn n_components(&self) -> usize {
        let labels = self.components();
        labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.n_vertices() <= 1 || self.n_components() == 1
    }

    /// First Betti number h = |E| - |V| + #components.
    pub fn loop_number(&self) -> usize {
        self.n_edges() + self.n_components() - self.n_vertices()
    }

    /// genus = h + total weight.
    pub fn genus(&self) -> usize {
        self.loop_number() + self.total_weight() as usize
    }

    /// Every vertex of weight 0 has degree >= 3 and every vertex of weight 1
    /// has degree >= 1.
    pub fn is_stable(&self) -> bool {
        (0..self.n_vertices()).all(|v| match self.weights[v] {
            0 => self.degree(v) >= 3,
            1 => self.degree(v) >= 1,
            _ => true,
        })
    }

    /// Same graph with all weights set to zero.
    pub fn underlying(&self) -> WeightedGraph {
        WeightedGraph { weights: vec![0; self.n_vertices()], edges: self.edges.clone() }
    }

    /// Contract edge `e`. Merging endpoints adds their weights; removing a
    /// self-edge bumps the weight of its vertex by one. Genus is preserved.
    pub fn contract_edge(&self, e: usize) -> Result<WeightedGraph, GraphError> {
        let (g, _) = self.contract_edge_with_map(e)?;
        Ok(g)
    }

    /// Contraction together with the (monotone) old-label -> new-label map.
    pub fn contract_edge_with_map(
        &self,
        e: usize,
    ) -> Result<(WeightedGraph, Vec<Option<usize>>), GraphError> {
        let &(u, v) = self.edges.get(e).ok_or(GraphError::InvalidEdge(e))?;
        let mut weights = self.weights.clone();
        let vmap: Vec<usize>;
        if u == v {
            weights[u] += 1;
            vmap = (0..self.n_vertices()).collect();
        } else {
            // merge v into u, then drop v
            let (keep, drop) = if u < v { (u, v) } else { (v, u) };
            weights[keep] += weights[drop];
            weights.remove(drop);
            vmap = (0..self.n_vertices())
                .map(|w| {
                    if w == drop {
                        keep
                    } else if w > drop {
                        w - 1
                    } else {
                        w
                    }
                })
                .collect();
        }
        let mut edges = Vec::with_capacity(self.n_edges() - 1);
        let mut emap = vec![None; self.n_edges()];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if i == e {
                continue;
            }
            emap[i] = Some(edges.len());
            edges.push((vmap[a], vmap[b]));
        }
        Ok((WeightedGraph { weights, edges }, emap))
    }

    /// Contract every edge in `set` (quotient graph). Each merged vertex
    /// receives the summed weights of its component plus the component's
    /// loop number.
    pub fn contract_set(&self, set: &BTreeSet<usize>) -> (WeightedGraph, Vec<Option<usize>>) {
        for &e in set {
            assert!(e < self.n_edges(), "invalid edge in contraction set");
        }
        let labels =
            component_labels(self.n_vertices(), set.iter().map(|&e| self.edges[e]));
        let ncomp = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut weights = vec![0u32; ncomp];
        for v in 0..self.n_vertices() {
            weights[labels[v]] += self.weights[v];
        }
        // loop number of the contracted part, per component
        let mut comp_edges = vec![0usize; ncomp];
        for &e in set {
            comp_edges[labels[self.edges[e].0]] += 1;
        }
        let mut comp_verts = vec![0usize; ncomp];
        for v in 0..self.n_vertices() {
            comp_verts[labels[v]] += 1;
        }
        // A component of (V, set) with k vertices and m edges (m may be 0 for
        // isolated vertices) has loop number m - k + 1.
        for c in 0..ncomp {
            let h = comp_edges[c] + 1 - comp_verts[c].min(comp_edges[c] + 1);
            weights[c] += h as u32;
        }
        let mut edges = Vec::new();
        let mut emap = vec![None; self.n_edges()];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if set.contains(&i) {
                continue;
            }
            emap[i] = Some(edges.len());
            edges.push((labels[a], labels[b]));
        }
        (WeightedGraph { weights, edges }, emap)
    }

    /// Edge-induced subgraph as a standalone graph (vertices restricted to
    /// the endpoints of `set`), plus maps back to parent vertices/edges.
    pub fn edge_subgraph(&self, set: &BTreeSet<usize>) -> (WeightedGraph, Vec<usize>, Vec<usize>) {
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        for &e in set {
            verts.insert(self.edges[e].0);
            verts.insert(self.edges[e].1);
        }
        let vlist: Vec<usize> = verts.into_iter().collect();
        let vidx: BTreeMap<usize, usize> = vlist.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut elist = Vec::new();
        for &e in set {
            let (a, b) = self.edges[e];
            edges.push((vidx[&a], vidx[&b]));
            elist.push(e);
        }
        let weights = vlist.iter().map(|&v| self.weights[v]).collect();
        (WeightedGraph { weights, edges }, vlist, elist)
    }

    /// Bridges of the subgraph spanned by `set` (edge labels).
    pub fn bridges(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        let n = self.n_vertices();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &e in set {
            let (u, v) = self.edges[e];
            if u != v {
                adj[u].push((v, e));
                adj[v].push((u, e));
            }
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut time = 0usize;
        let mut bridges = Vec::new();
        // iterative DFS, skipping the entering edge id (parallel edges fine)
        for root in 0..n {
            if disc[root] != usize::MAX || adj[root].is_empty() {
                continue;
            }
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            while let Some(&mut (v, pe, ref mut idx)) = stack.last_mut() {
                if *idx < adj[v].len() {
                    let (to, e) = adj[v][*idx];
                    *idx += 1;
                    if e == pe {
                        continue;
                    }
                    if disc[to] == usize::MAX {
                        disc[to] = time;
                        low[to] = time;
                        time += 1;
                        stack.push((to, e, 0));
                    } else {
                        low[v] = low[v].min(disc[to]);
                    }
                } else {
                    stack.pop();
                    if let Some(&mut (parent, _, _)) = stack.last_mut() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            bridges.push(pe);
                        }
                    }
                }
            }
        }
        bridges.sort_unstable();
        bridges
    }

    /// A subgraph is core when it has no bridges.
    pub fn is_core(&self, set: &BTreeSet<usize>) -> bool {
        self.bridges(set).is_empty()
    }

    /// Largest core subgraph of `set`: iteratively remove bridges.
    pub fn max_core(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut cur = set.clone();
        loop {
            let b = self.bridges(&cur);
            if b.is_empty() {
                return cur;
            }
            for e in b {
                cur.remove(&e);
            }
        }
    }

    /// Loop number of the subgraph spanned by `set`.
    pub fn subgraph_loop_number(&self, set: &BTreeSet<usize>) -> usize {
        if set.is_empty() {
            return 0;
        }
        let (sub, _, _) = self.edge_subgraph(set);
        sub.loop_number()
    }

    /// G is 3-edge-connected when it is connected and no removal of one or
    /// two non-self-edges disconnects it. Self-edges never enter a cut.
    pub fn is_three_edge_connected(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        let non_loops: Vec<usize> =
            (0..self.n_edges()).filter(|&e| self.edges[e].0 != self.edges[e].1).collect();
        let connected_without = |skip: &[usize]| -> bool {
            let it = self
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !skip.contains(i))
                .map(|(_, &e)| e);
            let labels = component_labels(self.n_vertices(), it);
            labels.iter().copied().max().map_or(true, |m| m == 0)
        };
        for (i, &e) in non_loops.iter().enumerate() {
            if !connected_without(&[e]) {
                return false;
            }
            for &f in &non_loops[i + 1..] {
                if !connected_without(&[e, f]) {
                    return false;
                }
            }
        }
        true
    }

    /// Deterministic fundamental cycle basis from a BFS spanning forest.
    ///
    /// Returns one signed incidence vector in ℤ^E per independent cycle;
    /// non-tree edges are taken in ascending label order, each with
    /// coefficient +1 on itself.
    pub fn cycle_basis(&self) -> Vec<Vec<i64>> {
        let n = self.n_vertices();
        let m = self.n_edges();
        let mut parent: Vec<Option<(usize, usize, i64)>> = vec![None; n]; // (vertex, edge, sign)
        let mut seen = vec![false; n];
        let mut tree = vec![false; m];
        let mut order: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if u != v {
                order[u].push((v, e));
                order[v].push((u, e));
            }
        }
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(to, e) in &order[v] {
                    if !seen[to] {
                        seen[to] = true;
                        tree[e] = true;
                        // sign +1 when the stored orientation points v -> to
                        let sign = if self.edges[e] == (v, to) { 1 } else { -1 };
                        parent[to] = Some((v, e, sign));
                        queue.push_back(to);
                    }
                }
            }
        }
        let depth = |mut v: usize| -> usize {
            let mut d = 0;
            while let Some((p, _, _)) = parent[v] {
                v = p;
                d += 1;
            }
            d
        };
        let mut basis = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if tree[e] {
                continue;
            }
            let mut cyc = vec![0i64; m];
            cyc[e] = 1;
            if u != v {
                // close the cycle along the tree path from v (head) back to
                // u (tail); climbing child->parent traverses a tree edge
                // against its stored sign on the head side, with it on the
                // tail side
                let (mut a, mut b) = (v, u);
                let (mut da, mut db) = (depth(a), depth(b));
                while da > db {
                    let (p, pe, s) = parent[a].unwrap();
                    cyc[pe] -= s;
                    a = p;
                    da -= 1;
                }
                while db > da {
                    let (p, pe, s) = parent[b].unwrap();
                    cyc[pe] += s;
                    b = p;
                    db -= 1;
                }
                while a != b {
                    let (pa, ea, sa) = parent[a].unwrap();
                    let (pb, eb, sb) = parent[b].unwrap();
                    cyc[ea] -= sa;
                    cyc[eb] += sb;
                    a = pa;
                    b = pb;
                }
            }
            basis.push(cyc);
        }
        basis
    }

    /// All spanning trees (as sorted edge-index lists) of a connected graph.
    pub fn spanning_trees(&self) -> Vec<Vec<usize>> {
        assert!(self.is_connected());
        let n = self.n_vertices();
        if n <= 1 {
            return vec![vec![]];
        }
        let non_loops: Vec<usize> =
            (0..self.n_edges()).filter(|&e| self.edges[e].0 != self.edges[e].1).collect();
        let need = n - 1;
        let mut out = Vec::new();
        let mut choice = Vec::with_capacity(need);
        fn rec(
            g: &WeightedGraph,
            non_loops: &[usize],
            start: usize,
            need: usize,
            choice: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if choice.len() == need {
                let labels = component_labels(g.n_vertices(), choice.iter().map(|&e| g.edges[e]));
                if labels.iter().copied().max() == Some(0) {
                    out.push(choice.clone());
                }
                return;
            }
            if non_loops.len() - start < need - choice.len() {
                return;
            }
            for i in start..non_loops.len() {
                choice.push(non_loops[i]);
                // prune: partial selection must stay acyclic
                if is_forest(g, choice) {
                    rec(g, non_loops, i + 1, need, choice, out);
                }
                choice.pop();
            }
        }
        rec(self, &non_loops, 0, need, &mut choice, &mut out);
        out
    }
}

fn is_forest(g: &WeightedGraph, edges: &[usize]) -> bool {
    let mut uf: Vec<usize> = (0..g.n_vertices()).collect();
    fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for &e in edges {
        let (u, v) = g.edges[e];
        let (ru, rv) = (find(&mut uf, u), find(&mut uf, v));
        if ru == rv {
            return false;
        }
        uf[ru] = rv;
    }
    true
}

fn component_labels(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for (u, v) in edges {
        let (ru, rv) = (find(&mut uf, u), find(&mut uf, v));
        if ru != rv {
            uf[ru] = rv;
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        let r = find(&mut uf, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        label[v] = label[r];
    }
    label
}

/// Edge subset of a parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph<'a> {
    pub parent: &'a WeightedGraph,
    pub edge_set: BTreeSet<usize>,
}

impl<'a> Subgraph<'a> {
    pub fn new(parent: &'a WeightedGraph, edge_set: BTreeSet<usize>) -> Self {
        Subgraph { parent, edge_set }
    }

    pub fn is_core(&self) -> bool {
        self.parent.is_core(&self.edge_set)
    }

    pub fn max_core(&self) -> Subgraph<'a> {
        Subgraph { parent: self.parent, edge_set: self.parent.max_core(&self.edge_set) }
    }
}

// ---------------------------------------------------------------------------
// Multilinear polynomials in edge variables
// ---------------------------------------------------------------------------

/// Polynomial with integer coefficients in the edge variables x_0..x_{n-1},
/// stored as exponent-vector -> coefficient. No zero coefficients kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    pub n_vars: usize,
    pub terms: BTreeMap<Vec<u8>, i64>,
}

impl MultilinearPoly {
    pub fn zero(n_vars: usize) -> Self {
        MultilinearPoly { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: i64) -> Self {
        let mut p = Self::zero(n_vars);
        if c != 0 {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    pub fn monomial(n_vars: usize, vars: &[usize], c: i64) -> Self {
        let mut exp = vec![0u8; n_vars];
        for &v in vars {
            exp[v] += 1;
        }
        let mut p = Self::zero(n_vars);
        if c != 0 {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: Vec<u8>, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(exp).or_insert(0);
        *entry = entry.checked_add(c).expect("coefficient overflow");
        if *entry == 0 {
            let exp: Vec<u8> = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .unwrap();
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = Self::zero(self.n_vars);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let exp: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(exp, c1.checked_mul(c2).expect("coefficient overflow"));
            }
        }
        out
    }

    pub fn scale(&self, c: i64) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    /// Substitute x_v = 0.
    pub fn set_var_zero(&self, v: usize) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, &c) in &self.terms {
            if e[v] == 0 {
                out.add_term(e.clone(), c);
            }
        }
        out
    }

    /// Reinterpret in `n_vars` variables via an injective variable map.
    pub fn relabel(&self, n_vars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.n_vars);
        let mut out = Self::zero(n_vars);
        for (e, &c) in &self.terms {
            let mut exp = vec![0u8; n_vars];
            for (v, &p) in e.iter().enumerate() {
                if p > 0 {
                    exp[map[v]] += p;
                }
            }
            out.add_term(exp, c);
        }
        out
    }

    /// Evaluate at integer arguments.
    pub fn eval_i64(&self, x: &[i64]) -> i64 {
        assert_eq!(x.len(), self.n_vars);
        let mut sum: i64 = 0;
        for (e, &c) in &self.terms {
            let mut t = c;
            for (v, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t = t.checked_mul(x[v]).expect("overflow");
                }
            }
            sum = sum.checked_add(t).expect("overflow");
        }
        sum
    }

    /// Total degree of every monomial when homogeneous, else None.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for e in self.terms.keys() {
            let d: usize = e.iter().map(|&p| p as usize).sum();
            match deg {
                None => deg = Some(d),
                Some(x) if x == d => {}
                _ => return None,
            }
        }
        deg
    }

    /// Degree of a monomial in the variables of `set`.
    pub fn monomial_degrees_in(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        self.terms
            .keys()
            .map(|e| set.iter().map(|&v| e[v] as usize).sum())
            .collect()
    }
}

/// Kirchhoff (graph) polynomial: sum over spanning trees of the product of
/// the variables not in the tree; product over components; zero when the
/// total weight is positive.
pub fn graph_polynomial(g: &WeightedGraph) -> MultilinearPoly {
    let m = g.n_edges();
    if g.total_weight() > 0 {
        return MultilinearPoly::zero(m);
    }
    let labels = g.components();
    let ncomp = labels.iter().copied().max().map_or(0, |x| x + 1);
    let mut poly = MultilinearPoly::constant(m, 1);
    for c in 0..ncomp {
        let comp_edges: BTreeSet<usize> = (0..m)
            .filter(|&e| labels[g.edges[e].0] == c)
            .collect();
        let (sub, _, elist) = g.edge_subgraph(&comp_edges);
        if sub.n_vertices() == 0 {
            continue;
        }
        let mut comp_poly = MultilinearPoly::zero(m);
        if sub.n_edges() <= 12 {
            for tree in sub.spanning_trees() {
                let tset: HashSet<usize> = tree.into_iter().collect();
                let vars: Vec<usize> = (0..sub.n_edges())
                    .filter(|e| !tset.contains(e))
                    .map(|e| elist[e])
                    .collect();
                comp_poly = comp_poly.add(&MultilinearPoly::monomial(m, &vars, 1));
            }
        } else {
            // determinant of the symbolic Laplacian
            let lap = symbolic_laplacian(&sub, None).expect("connected weight-0 component");
            comp_poly = lap.det().relabel(m, &elist);
        }
        poly = poly.mul(&comp_poly);
    }
    poly
}

// ---------------------------------------------------------------------------
// Symbolic graph Laplacian
// ---------------------------------------------------------------------------

/// h x h matrix of integer linear forms in the edge variables, together with
/// the cycle basis that produced it. Entry (i,j) = Σ_e ⟨ci,e⟩⟨cj,e⟩ x_e.
#[derive(Debug, Clone)]
pub struct SymbolicLaplacian {
    pub n_edges: usize,
    pub cycle_basis: Vec<Vec<i64>>,
    /// entry[i][j][e] = coefficient of x_e
    pub entry: Vec<Vec<Vec<i64>>>,
}

impl SymbolicLaplacian {
    pub fn rank(&self) -> usize {
        self.cycle_basis.len()
    }

    pub fn det(&self) -> MultilinearPoly {
        let h = self.rank();
        let m = self.n_edges;
        // Leibniz expansion; h is small at desk scale.
        let mut out = MultilinearPoly::zero(m);
        let mut perm: Vec<usize> = (0..h).collect();
        loop {
            let sign = permutation_sign(&perm);
            let mut prod = MultilinearPoly::constant(m, sign as i64);
            for (i, &j) in perm.iter().enumerate() {
                let mut lin = MultilinearPoly::zero(m);
                for e in 0..m {
                    let c = self.entry[i][j][e];
                    if c != 0 {
                        lin.add_term(
                            {
                                let mut exp = vec![0u8; m];
                                exp[e] = 1;
                                exp
                            },
                            c,
                        );
                    }
                }
                prod = prod.mul(&lin);
                if prod.is_zero() {
                    break;
                }
            }
            out = out.add(&prod);
            if !next_permutation(&mut perm) {
                break;
            }
        }
        out
    }

    /// Evaluate at rational edge lengths, yielding a symmetric matrix.
    pub fn eval(&self, x: &[crate::exactlin::Rat]) -> RatMatrix {
        assert_eq!(x.len(), self.n_edges);
        let h = self.rank();
        let mut m = RatMatrix::zeros(h, h);
        for i in 0..h {
            for j in 0..h {
                let mut s = crate::exactlin::rat(0);
                for e in 0..self.n_edges {
                    let c = self.entry[i][j][e];
                    if c != 0 {
                        s += crate::exactlin::rat(c) * &x[e];
                    }
                }
                m.set(i, j, s);
            }
        }
        m
    }
}

pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Graph Laplacian with respect to a cycle basis (default: fundamental BFS
/// basis). Defined for connected graphs of total weight zero.
pub fn symbolic_laplacian(
    g: &WeightedGraph,
    basis: Option<Vec<Vec<i64>>>,
) -> Result<SymbolicLaplacian, GraphError> {
    if g.total_weight() > 0 {
        return Err(GraphError::WeightedLaplacian);
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let m = g.n_edges();
    let basis = basis.unwrap_or_else(|| g.cycle_basis());
    for c in &basis {
        if c.len() != m {
            return Err(GraphError::Invalid("cycle vector length mismatch".into()));
        }
    }
    let h = basis.len();
    let mut entry = vec![vec![vec![0i64; m]; h]; h];
    for i in 0..h {
        for j in 0..h {
            for e in 0..m {
                entry[i][j][e] = basis[i][e] * basis[j][e];
            }
        }
    }
    Ok(SymbolicLaplacian { n_edges: m, cycle_basis: basis, entry })
}

/// The linear map λ_G as a matrix: rows indexed by the d_h = h(h+1)/2 upper
/// triangle entries of the quadratic form, columns by edges.
pub fn torelli_matrix(lap: &SymbolicLaplacian) -> RatMatrix {
    let h = lap.rank();
    let m = lap.n_edges;
    let mut rows = Vec::new();
    for i in 0..h {
        for j in i..h {
            let row: Vec<crate::exactlin::Rat> =
                (0..m).map(|e| crate::exactlin::rat(lap.entry[i][j][e])).collect();
            rows.push(row);
        }
    }
    RatMatrix::from_rows(rows)
}

/// rank of λ_G over ℚ.
pub fn torelli_rank(g: &WeightedGraph) -> Result<usize, GraphError> {
    let lap = symbolic_laplacian(&g.underlying(), None)?;
    Ok(rational_rank(&torelli_matrix(&lap)))
}

// ---------------------------------------------------------------------------
// Canonical labelling and automorphisms
// ---------------------------------------------------------------------------

/// Canonical encoding of a weighted multigraph with optional edge colours.
/// Two graphs are weighted-isomorphic (respecting colours) iff their
/// encodings are equal.
pub fn canonical_label(g: &WeightedGraph, colors: Option<&[u32]>) -> Vec<u64> {
    let default = vec![0u32; g.n_edges()];
    let colors = colors.unwrap_or(&default);
    assert_eq!(colors.len(), g.n_edges());
    let mut best: Option<Vec<u64>> = None;
    for_each_class_permutation(g, colors, &mut |perm| {
        let enc = encode(g, colors, perm);
        if best.as_ref().map_or(true, |b| enc < *b) {
            best = Some(enc);
        }
    });
    best.expect("at least the identity permutation")
}

fn encode(g: &WeightedGraph, colors: &[u32], perm: &[usize]) -> Vec<u64> {
    let mut enc: Vec<u64> = Vec::with_capacity(1 + g.n_vertices() + 3 * g.n_edges());
    enc.push(g.n_vertices() as u64);
    let mut w = vec![0u64; g.n_vertices()];
    for v in 0..g.n_vertices() {
        w[perm[v]] = g.weights[v] as u64;
    }
    enc.extend_from_slice(&w);
    let mut edges: Vec<(u64, u64, u64)> = g
        .edges
        .iter()
        .zip(colors)
        .map(|(&(u, v), &c)| {
            let (a, b) = (perm[u].min(perm[v]) as u64, perm[u].max(perm[v]) as u64);
            (a, b, c as u64)
        })
        .collect();
    edges.sort_unstable();
    for (a, b, c) in edges {
        enc.push(a);
        enc.push(b);
        enc.push(c);
    }
    enc
}

/// Canonical label together with a vertex permutation realising it.
pub fn canonical_label_with_perm(
    g: &WeightedGraph,
    colors: Option<&[u32]>,
) -> (Vec<u64>, Vec<usize>) {
    let default = vec![0u32; g.n_edges()];
    let colors = colors.unwrap_or(&default);
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    for_each_class_permutation(g, colors, &mut |perm| {
        let enc = encode(g, colors, perm);
        if best.as_ref().map_or(true, |(b, _)| enc < *b) {
            best = Some((enc, perm.to_vec()));
        }
    });
    best.expect("at least the identity permutation")
}

/// An isomorphism g1 -> g2 respecting weights and edge colours, as an edge
/// bijection (index into g1's edges -> index into g2's edges), or None.
///
/// When several isomorphisms exist an arbitrary one is returned; they differ
/// by automorphisms of g2.
pub fn find_isomorphism(
    g1: &WeightedGraph,
    colors1: Option<&[u32]>,
    g2: &WeightedGraph,
    colors2: Option<&[u32]>,
) -> Option<Vec<usize>> {
    if g1.n_vertices() != g2.n_vertices() || g1.n_edges() != g2.n_edges() {
        return None;
    }
    let (enc1, p1) = canonical_label_with_perm(g1, colors1);
    let (enc2, p2) = canonical_label_with_perm(g2, colors2);
    if enc1 != enc2 {
        return None;
    }
    // vertex map v -> p2⁻¹(p1(v))
    let mut p2_inv = vec![0usize; g2.n_vertices()];
    for (v, &s) in p2.iter().enumerate() {
        p2_inv[s] = v;
    }
    let vmap: Vec<usize> = (0..g1.n_vertices()).map(|v| p2_inv[p1[v]]).collect();
    // edge bijection: match within (endpoints, colour) classes in label order
    let d1 = vec![0u32; g1.n_edges()];
    let c1 = colors1.unwrap_or(&d1);
    let d2 = vec![0u32; g2.n_edges()];
    let c2 = colors2.unwrap_or(&d2);
    let mut pool: BTreeMap<(usize, usize, u32), Vec<usize>> = BTreeMap::new();
    for e in (0..g2.n_edges()).rev() {
        let (u, v) = g2.edges[e];
        pool.entry((u.min(v), u.max(v), c2[e])).or_default().push(e);
    }
    let mut emap = vec![0usize; g1.n_edges()];
    for e in 0..g1.n_edges() {
        let (u, v) = g1.edges[e];
        let (a, b) = (vmap[u].min(vmap[v]), vmap[u].max(vmap[v]));
        let slot = pool.get_mut(&(a, b, c1[e]))?;
        emap[e] = slot.pop()?;
    }
    Some(emap)
}

/// Invariant-based vertex partition: permutations are only taken within
/// classes of equal (weight, degree, loop count, colour profile).
fn vertex_classes(g: &WeightedGraph, colors: &[u32]) -> Vec<Vec<usize>> {
    let mut keys: Vec<(Vec<u64>, usize)> = (0..g.n_vertices())
        .map(|v| {
            let loops = g.edges.iter().filter(|&&(a, b)| a == v && b == v).count();
            let mut profile: Vec<u64> = g
                .edges
                .iter()
                .zip(colors)
                .filter(|(&(a, b), _)| a == v || b == v)
                .map(|(_, &c)| c as u64)
                .collect();
            profile.sort_unstable();
            let mut key = vec![g.weights[v] as u64, g.degree(v) as u64, loops as u64];
            key.extend(profile);
            (key, v)
        })
        .collect();
    keys.sort();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut cur_key: Option<&Vec<u64>> = None;
    for (key, v) in &keys {
        if cur_key != Some(key) {
            classes.push(Vec::new());
        }
        classes.last_mut().unwrap().push(*v);
        cur_key = Some(key);
    }
    classes
}

/// Run `f` on every vertex permutation compatible with the invariant
/// partition. The permutation is given as a mapping old -> new index.
fn for_each_class_permutation(
    g: &WeightedGraph,
    colors: &[u32],
    f: &mut impl FnMut(&[usize]),
) {
    let classes = vertex_classes(g, colors);
    // positions assigned to every class are contiguous in class order
    let mut offsets = Vec::with_capacity(classes.len());
    let mut acc = 0;
    for c in &classes {
        offsets.push(acc);
        acc += c.len();
    }
    let mut perm = vec![0usize; g.n_vertices()];
    fn rec(
        classes: &[Vec<usize>],
        offsets: &[usize],
        k: usize,
        perm: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if k == classes.len() {
            f(perm);
            return;
        }
        let mut members = classes[k].clone();
        permute_all(&mut members, 0, &mut |arrangement| {
            for (slot, &v) in arrangement.iter().enumerate() {
                perm[v] = offsets[k] + slot;
            }
            rec(classes, offsets, k + 1, perm, f);
        });
    }
    rec(&classes, &offsets, 0, &mut perm, f);
}

/// Run `f` on every vertex permutation of the ORIGINAL labels that maps each
/// invariant class onto itself (candidates for automorphisms).
fn for_each_class_automorphism(
    g: &WeightedGraph,
    colors: &[u32],
    f: &mut impl FnMut(&[usize]),
) {
    let classes = vertex_classes(g, colors);
    let mut perm: Vec<usize> = (0..g.n_vertices()).collect();
    fn rec(
        classes: &[Vec<usize>],
        k: usize,
        perm: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if k == classes.len() {
            f(perm);
            return;
        }
        let members = classes[k].clone();
        let mut arrangement = members.clone();
        permute_all(&mut arrangement, 0, &mut |arr| {
            for (i, &v) in members.iter().enumerate() {
                perm[v] = arr[i];
            }
            rec(classes, k + 1, perm, f);
        });
    }
    rec(&classes, 0, &mut perm, f);
}

fn permute_all(items: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        f(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute_all(items, start + 1, f);
        items.swap(start, i);
    }
}

/// An automorphism, recorded by its action on vertices and on edge labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
}

impl Automorphism {
    pub fn edge_sign(&self) -> i32 {
        permutation_sign(&self.edge_perm)
    }
}

/// All automorphisms of a weighted multigraph with optional edge colours,
/// as pairs (vertex permutation, edge permutation). Parallel edges of equal
/// colour may be permuted freely within their class.
pub fn automorphisms(g: &WeightedGraph, colors: Option<&[u32]>) -> Vec<Automorphism> {
    let default = vec![0u32; g.n_edges()];
    let colors = colors.unwrap_or(&default);
    let mut out = Vec::new();
    // group edges by (endpoints, colour)
    let edge_key = |e: usize, perm: &[usize]| -> (usize, usize, u32) {
        let (u, v) = g.edges[e];
        let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
        (a, b, colors[e])
    };
    let ident: Vec<usize> = (0..g.n_vertices()).collect();
    let mut class_of: BTreeMap<(usize, usize, u32), Vec<usize>> = BTreeMap::new();
    for e in 0..g.n_edges() {
        class_of.entry(edge_key(e, &ident)).or_default().push(e);
    }
    for_each_class_automorphism(g, colors, &mut |perm| {
        let mut image: BTreeMap<(usize, usize, u32), Vec<usize>> = BTreeMap::new();
        for e in 0..g.n_edges() {
            image.entry(edge_key(e, perm)).or_default().push(e);
        }
        // the permutation is a graph automorphism iff the image classes match
        // the identity classes in size, key by key
        let ok = image.len() == class_of.len()
            && image.iter().all(|(k, v)| class_of.get(k).map_or(false, |c| c.len() == v.len()));
        if !ok {
            return;
        }
        // expand: any bijection from each source class to its image class
        let keys: Vec<(usize, usize, u32)> = class_of.keys().cloned().collect();
        let sources: Vec<Vec<usize>> = keys.iter().map(|k| image[k].clone()).collect();
        let targets: Vec<Vec<usize>> = keys.iter().map(|k| class_of[k].clone()).collect();
        // `sources[c]` (edges mapping INTO key c under perm) biject onto
        // `targets[c]` (edges already at key c).
        let mut edge_perm = vec![usize::MAX; g.n_edges()];
        fn assign(
            c: usize,
            sources: &[Vec<usize>],
            targets: &[Vec<usize>],
            vperm: &[usize],
            edge_perm: &mut Vec<usize>,
            out: &mut Vec<Automorphism>,
        ) {
            if c == sources.len() {
                out.push(Automorphism {
                    vertex_perm: vperm.to_vec(),
                    edge_perm: edge_perm.clone(),
                });
                return;
            }
            let mut tgt = targets[c].clone();
            permute_all(&mut tgt, 0, &mut |arr| {
                for (i, &e) in sources[c].iter().enumerate() {
                    edge_perm[e] = arr[i];
                }
                assign(c + 1, sources, targets, vperm, edge_perm, out);
            });
        }
        assign(0, &sources, &targets, perm, &mut edge_perm, &mut out);
    });
    out
}

/// True when some automorphism (respecting colours) induces an odd edge
/// permutation.
pub fn has_orientation_reversing_automorphism(
    g: &WeightedGraph,
    colors: Option<&[u32]>,
) -> bool {
    automorphisms(g, colors).iter().any(|a| a.edge_sign() < 0)
}

// ---------------------------------------------------------------------------
// Enumeration of stable graphs
// ---------------------------------------------------------------------------

/// One representative per isomorphism class of connected stable weighted
/// graphs of the given genus with at most `max_edges` edges (default 3g-3).
/// The returned set is closed under edge contraction.
pub fn enumerate_stable_graphs(g: usize, max_edges: Option<usize>) -> Vec<WeightedGraph> {
    assert!(g >= 2, "desk-scale enumeration needs g >= 2");
    let cap = max_edges.unwrap_or(3 * g - 3).min(3 * g - 3);
    // Phase 1: weight-0 graphs by edge count.
    let mut reps: BTreeMap<Vec<u64>, WeightedGraph> = BTreeMap::new();
    for e_count in 1..=cap {
        if e_count < g {
            continue; // h = e - v + 1 <= e
        }
        let v_count = e_count + 1 - g; // h = g for connected weight 0
        if v_count == 0 {
            continue;
        }
        if 2 * e_count < 3 * v_count {
            continue; // degree sum too small for stability
        }
        enumerate_multigraphs(v_count, e_count, Some(3), &mut |graph| {
            if graph.is_stable() && graph.is_connected() {
                debug_assert_eq!(graph.genus(), g);
                let key = canonical_label(graph, None);
                reps.entry(key).or_insert_with(|| graph.clone());
            }
        });
    }
    // Phase 2: close under contraction (this is what introduces weights).
    let mut queue: VecDeque<WeightedGraph> = reps.values().cloned().collect();
    while let Some(graph) = queue.pop_front() {
        for e in 0..graph.n_edges() {
            let contracted = graph.contract_edge(e).unwrap();
            if contracted.n_edges() == 0 || !contracted.is_stable() {
                continue;
            }
            debug_assert_eq!(contracted.genus(), g);
            let key = canonical_label(&contracted, None);
            if !reps.contains_key(&key) {
                reps.insert(key, contracted.clone());
                queue.push_back(contracted);
            }
        }
    }
    let mut out: Vec<WeightedGraph> = reps.into_values().collect();
    out.sort_by_key(|g| (g.n_edges(), canonical_label(g, None)));
    out
}

/// Enumerate all multigraphs (with loops) on `v` vertices with exactly `e`
/// edges, as multisets of vertex pairs. When `min_degree` is set, branches
/// that cannot reach it everywhere are pruned.
fn enumerate_multigraphs(
    v: usize,
    e: usize,
    min_degree: Option<usize>,
    f: &mut impl FnMut(&WeightedGraph),
) {
    // candidate unordered pairs (i <= j)
    let mut pairs = Vec::new();
    for i in 0..v {
        for j in i..v {
            pairs.push((i, j));
        }
    }
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(e);
    let mut deg = vec![0usize; v];
    fn rec(
        pairs: &[(usize, usize)],
        start: usize,
        remaining: usize,
        v: usize,
        min_degree: Option<usize>,
        chosen: &mut Vec<(usize, usize)>,
        deg: &mut Vec<usize>,
        f: &mut impl FnMut(&WeightedGraph),
    ) {
        if remaining == 0 {
            if let Some(d) = min_degree {
                if deg.iter().any(|&x| x < d) {
                    return;
                }
            }
            let graph = WeightedGraph::unweighted(v, chosen.clone());
            f(&graph);
            return;
        }
        if start >= pairs.len() {
            return;
        }
        if let Some(d) = min_degree {
            // every remaining edge adds at most 2 to the total deficiency
            let deficiency: usize = deg.iter().map(|&x| d.saturating_sub(x)).sum();
            if deficiency > 2 * remaining {
                return;
            }
            // vertices only incident to pairs before `start` cannot gain degree
            for x in 0..v {
                if deg[x] < d && pairs[start..].iter().all(|&(a, b)| a != x && b != x) {
                    return;
                }
            }
        }
        // take pairs[start] with multiplicity k = 0..remaining
        let (a, b) = pairs[start];
        let inc = if a == b { 2 } else { 1 };
        for k in 0..=remaining {
            if k > 0 {
                chosen.push((a, b));
                deg[a] += inc;
                deg[b] += inc;
            }
            rec(pairs, start + 1, remaining - k, v, min_degree, chosen, deg, f);
            if k == remaining {
                break;
            }
        }
        for _ in 0..remaining {
            if chosen.last() == Some(&(a, b)) {
                chosen.pop();
                deg[a] -= inc;
                deg[b] -= inc;
            } else {
                break;
            }
        }
    }
    rec(&pairs, 0, e, v, min_degree, &mut chosen, &mut deg, f);
}

// ---------------------------------------------------------------------------
// JSON schemas
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphJsonVertex {
    w: u32,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<GraphJsonVertex>,
    edges: Vec<(usize, usize)>,
}

pub fn graph_to_json(g: &WeightedGraph) -> serde_json::Value {
    serde_json::to_value(GraphJson {
        vertices: g.weights.iter().map(|&w| GraphJsonVertex { w }).collect(),
        edges: g.edges.clone(),
    })
    .unwrap()
}

pub fn graph_from_json(v: &serde_json::Value) -> Result<WeightedGraph, GraphError> {
    let parsed: GraphJson = serde_json::from_value(v.clone())
        .map_err(|e| GraphError::Invalid(format!("bad graph JSON: {e}")))?;
    let weights: Vec<u32> = parsed.vertices.iter().map(|x| x.w).collect();
    let n = weights.len();
    if parsed.edges.iter().any(|&(a, b)| a >= n || b >= n) {
        return Err(GraphError::Invalid("edge endpoint out of range".into()));
    }
    Ok(WeightedGraph::new(weights, parsed.edges))
}

pub fn poly_to_json(p: &MultilinearPoly) -> serde_json::Value {
    let monomials: Vec<serde_json::Value> = p
        .terms
        .iter()
        .map(|(e, &c)| {
            serde_json::json!({
                "exponents": e.iter().map(|&x| x as u64).collect::<Vec<u64>>(),
                "coeff": c,
            })
        })
        .collect();
    serde_json::json!({ "monomials": monomials })
}

// ---------------------------------------------------------------------------
// Named graphs used throughout the tests and the CLI
// ---------------------------------------------------------------------------

/// Sunrise: two vertices joined by three parallel edges, oriented left to
/// right; genus 2.
pub fn sunrise() -> WeightedGraph {
    WeightedGraph::unweighted(2, vec![(0, 1), (0, 1), (0, 1)])
}

/// Dumbbell: two vertices with one self-edge each, joined by a bridge.
pub fn dumbbell() -> WeightedGraph {
    WeightedGraph::unweighted(2, vec![(0, 0), (0, 1), (1, 1)])
}

/// Wheel with three spokes, vertex 0 the hub; rim edges 0,1,2 oriented
/// counter-clockwise, spokes 3,4,5 oriented inward. Edge labels match the
/// worked example: rim (1→2, 2→3, 3→1), spokes (3→0, 1→0, 2→0).
pub fn wheel3() -> WeightedGraph {
    WeightedGraph::unweighted(4, vec![(1, 2), (2, 3), (3, 1), (3, 0), (1, 0), (2, 0)])
}

/// The cycle basis of the worked wheel example:
/// h1 = e0+e1+e3-e4, h2 = e1+e3-e5, h3 = e2-e3+e4.
pub fn wheel3_basis() -> Vec<Vec<i64>> {
    vec![
        vec![1, 1, 0, 1, -1, 0],
        vec![0, 1, 0, 1, 0, -1],
        vec![0, 0, 1, -1, 1, 0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    #[test]
    fn contraction_rules() {
        // sunrise: contract e0 -> one vertex, two self-edges, weight 0
        let s = sunrise();
        let c = s.contract_edge(0).unwrap();
        assert_eq!(c.n_vertices(), 1);
        assert_eq!(c.edges, vec![(0, 0), (0, 0)]);
        assert_eq!(c.total_weight(), 0);
        assert_eq!(c.genus(), 2);

        // single self-edge on weight-0 vertex: contraction gives weight 1
        let l = WeightedGraph::unweighted(1, vec![(0, 0)]);
        let c = l.contract_edge(0).unwrap();
        assert_eq!(c.n_vertices(), 1);
        assert_eq!(c.n_edges(), 0);
        assert_eq!(c.weights, vec![1]);

        // theta: genus invariant under successive contractions
        let theta = sunrise();
        let mut g = theta.clone();
        while g.n_edges() > 0 {
            let before = g.genus();
            g = g.contract_edge(0).unwrap();
            assert_eq!(g.genus(), before);
        }

        assert_eq!(sunrise().contract_edge(7), Err(GraphError::InvalidEdge(7)));
    }

    #[test]
    fn core_and_stability() {
        let w3 = wheel3();
        assert!(w3.is_stable());
        let all: BTreeSet<usize> = (0..6).collect();
        assert!(w3.is_core(&all));

        // path of 2 edges: every edge a bridge
        let path = WeightedGraph::unweighted(3, vec![(0, 1), (1, 2)]);
        let set: BTreeSet<usize> = [0, 1].into();
        assert!(!path.is_core(&set));
        assert!(path.max_core(&set).is_empty());

        // dumbbell: max core = the two self-edges
        let d = dumbbell();
        let set: BTreeSet<usize> = (0..3).collect();
        assert_eq!(d.max_core(&set), BTreeSet::from([0, 2]));
    }

    #[test]
    fn graph_polynomial_examples() {
        // sunrise: x0 x1 + x0 x2 + x1 x2
        let p = graph_polynomial(&sunrise());
        let expect = MultilinearPoly::monomial(3, &[0, 1], 1)
            .add(&MultilinearPoly::monomial(3, &[0, 2], 1))
            .add(&MultilinearPoly::monomial(3, &[1, 2], 1));
        assert_eq!(p, expect);

        // a tree: constant 1
        let tree = WeightedGraph::unweighted(4, vec![(0, 1), (1, 2), (1, 3)]);
        assert_eq!(graph_polynomial(&tree), MultilinearPoly::constant(3, 1));

        // wheel: degree 3, 16 monomials (matrix-tree count of K4 at x=1)
        let p = graph_polynomial(&wheel3());
        assert_eq!(p.homogeneous_degree(), Some(3));
        assert_eq!(p.terms.len(), 16);
        assert!(p.terms.values().all(|&c| c == 1));

        // weighted graph: zero
        let mut w = sunrise();
        w.weights[0] = 1;
        assert!(graph_polynomial(&w).is_zero());
    }

    #[test]
    fn laplacian_examples() {
        // sunrise with basis c1 = e0 - e1, c2 = e1 - e2
        let basis = vec![vec![1, -1, 0], vec![0, 1, -1]];
        let lap = symbolic_laplacian(&sunrise(), Some(basis)).unwrap();
        assert_eq!(lap.entry[0][0], vec![1, 1, 0]); // x0 + x1
        assert_eq!(lap.entry[0][1], vec![0, -1, 0]); // -x1
        assert_eq!(lap.entry[1][1], vec![0, 1, 1]); // x1 + x2

        // wheel with the worked basis: check displayed entries
        let lap = symbolic_laplacian(&wheel3(), Some(wheel3_basis())).unwrap();
        assert_eq!(lap.entry[0][0], vec![1, 1, 0, 1, 1, 0]); // x1+x2+x4+x5
        assert_eq!(lap.entry[0][1], vec![0, 1, 0, 1, 0, 0]); // x2+x4
        assert_eq!(lap.entry[0][2], vec![0, 0, 0, -1, -1, 0]); // -x4-x5
        assert_eq!(lap.entry[1][1], vec![0, 1, 0, 1, 0, 1]); // x2+x4+x6
        assert_eq!(lap.entry[1][2], vec![0, 0, 0, -1, 0, 0]); // -x4
        assert_eq!(lap.entry[2][2], vec![0, 0, 1, 1, 1, 0]); // x3+x4+x5

        // single self-edge: 1x1 matrix (x0)
        let rose = WeightedGraph::unweighted(1, vec![(0, 0)]);
        let lap = symbolic_laplacian(&rose, None).unwrap();
        assert_eq!(lap.rank(), 1);
        assert_eq!(lap.entry[0][0], vec![1]);

        // weighted graph refused
        let mut w = sunrise();
        w.weights[1] = 2;
        assert!(matches!(symbolic_laplacian(&w, None), Err(GraphError::WeightedLaplacian)));
    }

    #[test]
    fn matrix_tree_for_named_graphs() {
        for g in [sunrise(), dumbbell(), wheel3()] {
            let lap = symbolic_laplacian(&g, None).unwrap();
            assert_eq!(lap.det(), graph_polynomial(&g), "det Λ == Ψ for {:?}", g.edges);
        }
        // and with the non-fundamental wheel basis
        let lap = symbolic_laplacian(&wheel3(), Some(wheel3_basis())).unwrap();
        assert_eq!(lap.det(), graph_polynomial(&wheel3()));
    }

    #[test]
    fn laplacian_eval_matches_poly() {
        let lap = symbolic_laplacian(&wheel3(), None).unwrap();
        let xs: Vec<_> = (1..=6).map(rat).collect();
        let m = lap.eval(&xs);
        let det = m.det();
        let psi = graph_polynomial(&wheel3()).eval_i64(&[1, 2, 3, 4, 5, 6]);
        assert_eq!(det, rat(psi));
    }

    #[test]
    fn contraction_deletion() {
        for g in [sunrise(), dumbbell(), wheel3()] {
            let psi = graph_polynomial(&g);
            for e in 0..g.n_edges() {
                let (u, v) = g.edges[e];
                if u == v {
                    continue;
                }
                let ge = g.contract_edge(e).unwrap();
                let psi_ge = graph_polynomial(&ge.underlying());
                let map: Vec<usize> = (0..g.n_edges())
                    .filter(|&x| x != e)
                    .enumerate()
                    .map(|(new, _old)| new)
                    .collect();
                let _ = map;
                // relabel contracted-poly variables back into g's labels
                let back: Vec<usize> = (0..g.n_edges()).filter(|&x| x != e).collect();
                assert_eq!(psi.set_var_zero(e), psi_ge.relabel(g.n_edges(), &back));
            }
        }
    }

    #[test]
    fn three_edge_connectivity() {
        assert!(wheel3().is_three_edge_connected());
        assert!(sunrise().is_three_edge_connected()); // theta graph
        assert!(!dumbbell().is_three_edge_connected());
        // rose graphs are trivially 3-edge-connected
        let rose = WeightedGraph::unweighted(1, vec![(0, 0), (0, 0)]);
        assert!(rose.is_three_edge_connected());
    }

    #[test]
    fn enumerate_genus_2() {
        let all = enumerate_stable_graphs(2, None);
        // weight-0 classes: theta, dumbbell, rose with two loops
        let weight0: Vec<_> = all.iter().filter(|g| g.total_weight() == 0).collect();
        assert_eq!(weight0.len(), 3);
        // trivalent classes (all degrees 3): theta and dumbbell
        let trivalent: Vec<_> = weight0
            .iter()
            .filter(|g| (0..g.n_vertices()).all(|v| g.degree(v) == 3))
            .collect();
        assert_eq!(trivalent.len(), 2);
        // every weight-0 vertex has degree >= 3 in every class
        for g in &all {
            assert!(g.is_stable());
            assert!(g.is_connected());
            assert_eq!(g.genus(), 2);
        }
        // closure under contraction
        let keys: std::collections::HashSet<Vec<u64>> =
            all.iter().map(|g| canonical_label(g, None)).collect();
        for g in &all {
            for e in 0..g.n_edges() {
                let c = g.contract_edge(e).unwrap();
                if c.n_edges() > 0 && c.is_stable() {
                    assert!(keys.contains(&canonical_label(&c, None)));
                }
            }
        }
    }

    #[test]
    fn enumerate_matches_independent_count_g2() {
        // independent oracle: direct enumeration over all weighted graphs with
        // <= 3 edges (weights bounded by genus), iso-dedup by canonical form
        let mut oracle: BTreeMap<Vec<u64>, ()> = BTreeMap::new();
        for e_count in 1..=3usize {
            for v_count in 1..=(e_count + 1) {
                enumerate_multigraphs(v_count, e_count, None, &mut |g0| {
                    if !g0.is_connected() {
                        return;
                    }
                    let h = g0.loop_number();
                    if h > 2 {
                        return;
                    }
                    // distribute total weight 2 - h over vertices
                    let need = 2 - h;
                    let n = g0.n_vertices();
                    let mut w = vec![0u32; n];
                    fn distribute(
                        w: &mut Vec<u32>,
                        idx: usize,
                        left: usize,
                        g0: &WeightedGraph,
                        oracle: &mut BTreeMap<Vec<u64>, ()>,
                    ) {
                        if idx == w.len() {
                            if left == 0 {
                                let g = WeightedGraph::new(w.clone(), g0.edges.clone());
                                if g.is_stable() {
                                    oracle.insert(canonical_label(&g, None), ());
                                }
                            }
                            return;
                        }
                        for take in 0..=left {
                            w[idx] = take as u32;
                            distribute(w, idx + 1, left - take, g0, oracle);
                        }
                        w[idx] = 0;
                    }
                    distribute(&mut w, 0, need, g0, &mut oracle);
                });
            }
        }
        let ours = enumerate_stable_graphs(2, None);
        assert_eq!(ours.len(), oracle.len());
        for g in &ours {
            assert!(oracle.contains_key(&canonical_label(g, None)));
        }
    }

    #[test]
    fn automorphism_groups() {
        // sunrise: 2 vertex autos x S3 on the parallel edges = 12; edge action S3
        let autos = automorphisms(&sunrise(), None);
        assert_eq!(autos.len(), 12);
        let edge_actions: std::collections::HashSet<Vec<usize>> =
            autos.iter().map(|a| a.edge_perm.clone()).collect();
        assert_eq!(edge_actions.len(), 6);
        assert!(has_orientation_reversing_automorphism(&sunrise(), None));

        // asymmetric weighted path: trivial edge automorphisms only
        let mut path = WeightedGraph::new(vec![1, 2], vec![(0, 1)]);
        let autos = automorphisms(&path, None);
        assert_eq!(autos.len(), 1);
        path.weights = vec![1, 1];
        assert_eq!(automorphisms(&path, None).len(), 2);

        // wheel: edge-automorphism action of Aut(K4) = S4, faithful on edges
        let autos = automorphisms(&wheel3(), None);
        assert_eq!(autos.len(), 24);
        let edge_actions: std::collections::HashSet<Vec<usize>> =
            autos.iter().map(|a| a.edge_perm.clone()).collect();
        assert_eq!(edge_actions.len(), 24);
        // all even: the wheel class survives the orientation quotient
        assert!(!has_orientation_reversing_automorphism(&wheel3(), None));
    }

    #[test]
    fn canonical_label_distinguishes() {
        let theta = sunrise();
        let relabeled = WeightedGraph::unweighted(2, vec![(1, 0), (0, 1), (1, 0)]);
        assert_eq!(canonical_label(&theta, None), canonical_label(&relabeled, None));
        assert_ne!(canonical_label(&theta, None), canonical_label(&dumbbell(), None));
        // colours matter
        assert_ne!(
            canonical_label(&theta, Some(&[0, 0, 1])),
            canonical_label(&theta, Some(&[1, 1, 0]))
        );
        assert_eq!(
            canonical_label(&theta, Some(&[0, 1, 1])),
            canonical_label(&theta, Some(&[1, 1, 0]))
        );
    }

    #[test]
    fn cycle_basis_is_a_cycle_space_basis() {
        for g in [sunrise(), dumbbell(), wheel3()] {
            let basis = g.cycle_basis();
            assert_eq!(basis.len(), g.loop_number());
            // each vector is a cycle: boundary = 0 at every vertex
            for c in &basis {
                let mut boundary = vec![0i64; g.n_vertices()];
                for (e, &coef) in c.iter().enumerate() {
                    let (u, v) = g.edges[e];
                    boundary[u] -= coef;
                    boundary[v] += coef;
                }
                assert!(boundary.iter().all(|&x| x == 0), "not a cycle: {c:?}");
            }
            // independence
            let m = RatMatrix::from_int_rows(&basis);
            assert_eq!(m.rank(), basis.len());
        }
    }
}

