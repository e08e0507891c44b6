//! Polyhedral linear configurations, blow-up loci and the combinatorial face
//! structure of blown-up polyhedra.
//!
//! Cones and polytopes are handled projectively: a cell is the link of the
//! cone spanned by its generators. Facet enumeration is exact double
//! description over ℚ on the span of the generators.

use crate::exactlin::{clear_denominators, rat, Rat, RatMatrix};
use crate::graphs::WeightedGraph;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("cone too large")]
    TooLarge,
    #[error("subspace does not cut a face")]
    NotAFace,
    #[error("blow-up set violates (B2): member {0} meets the polyhedron but not in a face")]
    NotB2(usize),
    #[error("inadmissible edge")]
    InadmissibleEdge,
    #[error("refinement subgraph is not core")]
    NotCore,
    #[error("{0}")]
    Invalid(String),
}

/// Desk-scale guard for exact facet enumeration (projective dimension).
pub const MAX_DD_DIM: usize = 9;

// ---------------------------------------------------------------------------
// Exact facet enumeration (double description) and face lattices
// ---------------------------------------------------------------------------

/// Facet description of the cone spanned by `points` inside its linear span.
#[derive(Debug, Clone)]
pub struct FacetData {
    /// Basis of the linear span (rows, ambient coordinates).
    pub span_basis: Vec<Vec<Rat>>,
    /// Facet normals as linear functionals on the ambient space (restricted
    /// to the span they support the cone; each is >= 0 on every generator).
    pub normals: Vec<Vec<Rat>>,
    /// Generator indices on which each normal vanishes.
    pub tight: Vec<BTreeSet<usize>>,
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pick a maximal independent subset of `points` (by index order) and return
/// (indices, basis rows).
fn span_basis_of(points: &[Vec<Rat>]) -> (Vec<usize>, Vec<Vec<Rat>>) {
    let mut idx = Vec::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mut test = rows.clone();
        test.push(p.clone());
        if RatMatrix::from_rows(test.clone()).rank() > rows.len() {
            rows.push(p.clone());
            idx.push(i);
        }
    }
    (idx, rows)
}

/// Coordinates of `v` in the row space of `basis` (None when outside).
fn coords_in_span(basis: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    // solve basisᵀ x = v
    let m = RatMatrix::from_rows(basis.to_vec()).transpose();
    m.solve(v)
}

/// Exact facet enumeration by incremental double description on the dual
/// side: extreme rays of {y : ⟨y, pᵢ⟩ >= 0} are the facet normals.
///
/// Requires the cone to be pointed (all our cones of rank-one forms are).
pub fn dd_facets(points: &[Vec<Rat>]) -> Result<FacetData, PolyError> {
    assert!(!points.is_empty());
    let (seed_idx, basis) = span_basis_of(points);
    let r = basis.len();
    if r > MAX_DD_DIM + 1 {
        return Err(PolyError::TooLarge);
    }
    // coordinates of all points in the span
    let coords: Vec<Vec<Rat>> = points
        .iter()
        .map(|p| coords_in_span(&basis, p).expect("point in its own span"))
        .collect();
    if r == 1 {
        // single ray: no facets
        return Ok(FacetData { span_basis: basis, normals: vec![], tight: vec![] });
    }
    // Seed: dual basis rays d_i with ⟨d_i, p_{seed_j}⟩ = δ_ij.
    let seed_mat = RatMatrix::from_rows(seed_idx.iter().map(|&i| coords[i].clone()).collect());
    // rows of inverse transpose give the dual rays
    let mut rays: Vec<Vec<Rat>> = (0..r)
        .map(|i| {
            let mut e = vec![Rat::zero(); r];
            e[i] = rat(1);
            seed_mat.transpose().solve(&e).expect("invertible seed")
        })
        .collect();
    let mut tight: Vec<BTreeSet<usize>> = (0..r)
        .map(|i| seed_idx.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &s)| s).collect())
        .collect();
    let mut processed: BTreeSet<usize> = seed_idx.iter().copied().collect();

    for (k, pk) in coords.iter().enumerate() {
        if processed.contains(&k) {
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|ray| dot(ray, pk)).collect();
        let mut plus = Vec::new();
        let mut zero = Vec::new();
        let mut minus = Vec::new();
        for (i, v) in vals.iter().enumerate() {
            if v.is_zero() {
                zero.push(i);
            } else if v.is_positive() {
                plus.push(i);
            } else {
                minus.push(i);
            }
        }
        if minus.is_empty() {
            for &i in &zero {
                tight[i].insert(k);
            }
            processed.insert(k);
            continue;
        }
        let mut new_rays: Vec<Vec<Rat>> = Vec::new();
        let mut new_tight: Vec<BTreeSet<usize>> = Vec::new();
        for &i in plus.iter().chain(&zero) {
            new_rays.push(rays[i].clone());
            let mut t = tight[i].clone();
            if zero.contains(&i) {
                t.insert(k);
            }
            new_tight.push(t);
        }
        for &ip in &plus {
            for &im in &minus {
                // adjacency: no other ray's tight set contains the common one
                let common: BTreeSet<usize> = tight[ip].intersection(&tight[im]).copied().collect();
                let adjacent = (0..rays.len())
                    .filter(|&x| x != ip && x != im)
                    .all(|x| !common.is_subset(&tight[x]));
                if !adjacent {
                    continue;
                }
                let combo: Vec<Rat> = rays[ip]
                    .iter()
                    .zip(&rays[im])
                    .map(|(a, b)| &vals[ip] * b - &vals[im] * a)
                    .collect();
                let mut t = common.clone();
                t.insert(k);
                new_rays.push(combo);
                new_tight.push(t);
            }
        }
        rays = new_rays;
        tight = new_tight;
        processed.insert(k);
    }

    // Final cleanup: recompute exact tight sets in ambient terms, keep only
    // genuine facets (tight-set rank r-1), dedup by canonical scaling.
    let mut normals: Vec<Vec<Rat>> = Vec::new();
    let mut tights: Vec<BTreeSet<usize>> = Vec::new();
    let mut seen: BTreeSet<Vec<num_bigint::BigInt>> = BTreeSet::new();
    for ray in &rays {
        let t: BTreeSet<usize> =
            (0..points.len()).filter(|&i| dot(ray, &coords[i]).is_zero()).collect();
        if (0..points.len()).any(|i| dot(ray, &coords[i]).is_negative()) {
            continue;
        }
        let rank = RatMatrix::from_rows(t.iter().map(|&i| coords[i].clone()).collect()).rank();
        if rank != r - 1 {
            continue;
        }
        let canon = clear_denominators(ray);
        if !seen.insert(canon) {
            continue;
        }
        // lift functional to ambient coordinates: f(x) = ⟨ray, coords(x)⟩;
        // ambient functional = rayᵀ · (pseudo-solve). Build via basis: the
        // ambient normal n satisfies ⟨n, basis_j⟩ = ray_j; choose n in the
        // row space of basis.
        let gram = RatMatrix::from_rows(
            basis.iter().map(|bi| basis.iter().map(|bj| dot(bi, bj)).collect()).collect(),
        );
        let lam = gram.solve(ray).expect("gram invertible on span");
        let dim = basis[0].len();
        let mut n = vec![Rat::zero(); dim];
        for (j, l) in lam.iter().enumerate() {
            for (x, b) in n.iter_mut().zip(&basis[j]) {
                *x += l * b;
            }
        }
        normals.push(n);
        tights.push(t);
    }
    Ok(FacetData { span_basis: basis, normals, tight: tights })
}

/// All faces of the cone spanned by `points`, as generator-index sets
/// (includes the cone itself; excludes the empty face), with the face
/// dimension = rank of its generators.
pub fn face_lattice(points: &[Vec<Rat>]) -> Result<Vec<(BTreeSet<usize>, usize)>, PolyError> {
    let fd = dd_facets(points)?;
    let all: BTreeSet<usize> = (0..points.len()).collect();
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut queue: Vec<BTreeSet<usize>> = vec![all.clone()];
    seen.insert(all);
    while let Some(face) = queue.pop() {
        for t in &fd.tight {
            let sub: BTreeSet<usize> = face.intersection(t).copied().collect();
            if !sub.is_empty() && !seen.contains(&sub) {
                seen.insert(sub.clone());
                queue.push(sub);
            }
        }
    }
    let mut out: Vec<(BTreeSet<usize>, usize)> = seen
        .into_iter()
        .map(|s| {
            let rank = RatMatrix::from_rows(s.iter().map(|&i| points[i].clone()).collect()).rank();
            (s, rank)
        })
        .collect();
    out.sort_by_key(|(s, r)| (*r, s.iter().copied().collect::<Vec<_>>()));
    Ok(out)
}

/// Brute-force facet oracle: supporting hyperplanes from (r-1)-subsets.
/// Exponential; used to cross-check `dd_facets` at desk scale.
pub fn brute_force_facets(points: &[Vec<Rat>]) -> Vec<BTreeSet<usize>> {
    let (_, basis) = span_basis_of(points);
    let r = basis.len();
    if r <= 1 {
        return vec![];
    }
    let coords: Vec<Vec<Rat>> = points
        .iter()
        .map(|p| coords_in_span(&basis, p).expect("point in span"))
        .collect();
    let m = points.len();
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut subset: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        need: usize,
        m: usize,
        subset: &mut Vec<usize>,
        coords: &[Vec<Rat>],
        r: usize,
        found: &mut BTreeSet<BTreeSet<usize>>,
    ) {
        if need == 0 {
            let mat = RatMatrix::from_rows(subset.iter().map(|&i| coords[i].clone()).collect());
            if mat.rank() != r - 1 {
                return;
            }
            let kernel = mat.kernel_basis();
            if kernel.len() != 1 {
                return;
            }
            let n: Vec<Rat> = kernel[0].iter().map(|x| Rat::from_integer(x.clone())).collect();
            let vals: Vec<Rat> = coords.iter().map(|c| dot(&n, c)).collect();
            let sign = if vals.iter().all(|v| !v.is_negative()) {
                1
            } else if vals.iter().all(|v| !v.is_positive()) {
                -1
            } else {
                return;
            };
            let _ = sign;
            let tightset: BTreeSet<usize> =
                (0..m).filter(|&i| vals[i].is_zero()).collect();
            found.insert(tightset);
            return;
        }
        if m - start < need {
            return;
        }
        for i in start..m {
            subset.push(i);
            rec(i + 1, need - 1, m, subset, coords, r, found);
            subset.pop();
        }
    }
    rec(0, r - 1, m, &mut subset, &coords, r, &mut found);
    found.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Polyhedral linear configurations
// ---------------------------------------------------------------------------

/// A polyhedral linear configuration: projective generators spanning the
/// Zariski closure, with the derived facet hyperplanes.
#[derive(Debug, Clone)]
pub struct PolyConfig {
    pub ambient: usize,
    pub generators: Vec<Vec<Rat>>,
    pub facets: FacetData,
}

impl PolyConfig {
    pub fn new(generators: Vec<Vec<Rat>>) -> Result<Self, PolyError> {
        assert!(!generators.is_empty());
        let ambient = generators[0].len();
        let facets = dd_facets(&generators)?;
        Ok(PolyConfig { ambient, generators, facets })
    }

    /// Projective dimension (rank of the span minus one).
    pub fn dim(&self) -> usize {
        self.facets.span_basis.len() - 1
    }
}

/// Intersection of the polyhedron with ℙ(W): the generator indices lying in
/// the row space of `w`. Returns None when the intersection is not a face.
pub fn face_cut_by_subspace(
    generators: &[Vec<Rat>],
    w: &[Vec<Rat>],
) -> Option<BTreeSet<usize>> {
    let inside: BTreeSet<usize> = (0..generators.len())
        .filter(|&i| coords_in_span(w, &generators[i]).is_some())
        .collect();
    if inside.is_empty() {
        return Some(BTreeSet::new());
    }
    // face test: some supporting functional vanishes exactly on `inside`;
    // equivalently the set is closed under the face lattice. We test the
    // defining property directly: there is a functional zero on `inside`,
    // positive on the rest, living anywhere in the ambient dual. Build by
    // least squares over the span: f = sum of facet normals vanishing on
    // all of `inside`.
    let fd = dd_facets(generators).ok()?;
    let mut f = vec![Rat::zero(); generators[0].len()];
    let mut any = false;
    for (n, t) in fd.normals.iter().zip(&fd.tight) {
        if inside.iter().all(|i| t.contains(i)) {
            for (x, y) in f.iter_mut().zip(n) {
                *x += y;
            }
            any = true;
        }
    }
    if !any {
        // no facet contains `inside`: only the whole polyhedron qualifies
        return if inside.len() == generators.len() { Some(inside) } else { None };
    }
    let tight: BTreeSet<usize> =
        (0..generators.len()).filter(|&i| dot(&f, &generators[i]).is_zero()).collect();
    if tight == inside {
        Some(inside)
    } else {
        None
    }
}

/// Normal of σ relative to W: image of the generators in V/W, zero images
/// dropped. Errors when σ ∩ ℙ(W) is not a face.
pub fn normal_polyhedron(
    generators: &[Vec<Rat>],
    w: &[Vec<Rat>],
) -> Result<Vec<Vec<Rat>>, PolyError> {
    if !w.is_empty() {
        face_cut_by_subspace(generators, w).ok_or(PolyError::NotAFace)?;
    }
    // quotient coordinates: complete W to a basis, express, drop W part
    let ambient = generators[0].len();
    let mut basis: Vec<Vec<Rat>> = w.to_vec();
    let wdim = RatMatrix::from_rows(w.to_vec()).rank();
    assert_eq!(wdim, w.len(), "subspace basis must be independent");
    for i in 0..ambient {
        let mut e = vec![Rat::zero(); ambient];
        e[i] = rat(1);
        let mut test = basis.clone();
        test.push(e.clone());
        if RatMatrix::from_rows(test).rank() > basis.len() {
            basis.push(e);
        }
    }
    let full = RatMatrix::from_rows(basis).transpose();
    let mut out = Vec::new();
    for g in generators {
        let coords = full.solve(g).expect("basis");
        let tail: Vec<Rat> = coords[w.len()..].to_vec();
        if tail.iter().any(|x| !x.is_zero()) {
            out.push(tail);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Blow-up sets
// ---------------------------------------------------------------------------

/// A linear subspace given by a (saturated, independent) spanning set of
/// rational rows in the ambient projective coordinates.
pub type Subspace = Vec<Vec<Rat>>;

fn subspace_key(w: &Subspace) -> Vec<Vec<num_bigint::BigInt>> {
    // canonical: reduced row echelon, rows cleared to primitive integers
    let m = RatMatrix::from_rows(w.clone());
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut mat = m.clone();
    let mut r = 0;
    for col in 0..mat.cols {
        let piv = (r..mat.rows).find(|&i| !mat.get(i, col).is_zero());
        let Some(p) = piv else { continue };
        if p != r {
            for j in 0..mat.cols {
                let a = mat.get(r, j).clone();
                let b = mat.get(p, j).clone();
                mat.set(r, j, b);
                mat.set(p, j, a);
            }
        }
        let inv = mat.get(r, col).recip();
        for j in 0..mat.cols {
            let v = mat.get(r, j) * &inv;
            mat.set(r, j, v);
        }
        for i in 0..mat.rows {
            if i != r && !mat.get(i, col).is_zero() {
                let f = mat.get(i, col).clone();
                for j in 0..mat.cols {
                    let v = mat.get(i, j) - &f * mat.get(r, j);
                    mat.set(i, j, v);
                }
            }
        }
        r += 1;
        if r == mat.rows {
            break;
        }
    }
    for i in 0..r {
        rows.push(mat.row(i).to_vec());
    }
    rows.iter().map(|row| clear_denominators(row)).collect()
}

fn subspace_dim(w: &Subspace) -> usize {
    RatMatrix::from_rows(w.clone()).rank()
}

fn subspace_intersection(a: &Subspace, b: &Subspace) -> Subspace {
    // intersection of row spaces = kernel trick: x in both spans
    // x = aᵀ u = bᵀ v  ⇒ solve [aᵀ | -bᵀ] (u,v) = 0
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let amb = a[0].len();
    let mut rows = Vec::new();
    for i in 0..amb {
        let mut row = Vec::with_capacity(a.len() + b.len());
        for ar in a {
            row.push(ar[i].clone());
        }
        for br in b {
            row.push(-br[i].clone());
        }
        rows.push(row);
    }
    let m = RatMatrix::from_rows(rows);
    let kernel = m.kernel_basis();
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for k in kernel {
        let mut x = vec![Rat::zero(); amb];
        for (j, ar) in a.iter().enumerate() {
            let c = Rat::from_integer(k[j].clone());
            for (xi, ai) in x.iter_mut().zip(ar) {
                *xi += &c * ai;
            }
        }
        if x.iter().any(|v| !v.is_zero()) {
            out.push(x);
        }
    }
    // reduce to an independent set
    let (_, basis) = span_basis_of(&out);
    basis
}

/// A family of subspaces to be blown up, closed under intersections (B1),
/// each meeting the polyhedron in a face or not at all (B2).
#[derive(Debug, Clone)]
pub struct BlowupSet {
    pub members: Vec<Subspace>,
}

impl BlowupSet {
    /// Validate (B1) and (B2) for the polyhedron spanned by `generators`.
    pub fn validate(&self, generators: &[Vec<Rat>]) -> Result<(), PolyError> {
        // (B2)
        for (i, w) in self.members.iter().enumerate() {
            if face_cut_by_subspace(generators, w).is_none() {
                return Err(PolyError::NotB2(i));
            }
        }
        // (B1)
        let keys: BTreeSet<_> = self.members.iter().map(subspace_key).collect();
        for a in &self.members {
            for b in &self.members {
                let inter = subspace_intersection(a, b);
                if inter.is_empty() {
                    continue;
                }
                if !keys.contains(&subspace_key(&inter)) {
                    return Err(PolyError::Invalid(
                        "blow-up set not closed under intersections".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Result of minimalisation: the surviving members plus the dropped
/// (extraneous) ones, kept for auditability.
#[derive(Debug, Clone)]
pub struct MinimalBlowup {
    pub members: Vec<Subspace>,
    pub extraneous: Vec<Subspace>,
}

/// Keep members meeting σ that are minimal among members cutting the same
/// face, then close under intersections. Dropped members are exactly the
/// extraneous modifications.
pub fn minimal_blowup_set(
    set: &BlowupSet,
    generators: &[Vec<Rat>],
) -> Result<MinimalBlowup, PolyError> {
    set.validate(generators)?;
    let mut faces: Vec<(usize, BTreeSet<usize>)> = Vec::new();
    for (i, w) in set.members.iter().enumerate() {
        let f = face_cut_by_subspace(generators, w).ok_or(PolyError::NotB2(i))?;
        faces.push((i, f));
    }
    let mut keep: Vec<usize> = Vec::new();
    let mut extraneous: Vec<Subspace> = Vec::new();
    for &(i, ref f) in &faces {
        if f.is_empty() {
            extraneous.push(set.members[i].clone());
            continue;
        }
        // minimal among members with the same face
        let mut minimal = true;
        for &(j, ref fj) in &faces {
            if i == j || fj != f {
                continue;
            }
            let di = subspace_dim(&set.members[i]);
            let dj = subspace_dim(&set.members[j]);
            // j strictly contained in i with the same face: i extraneous
            if dj < di
                && subspace_dim(&subspace_intersection(&set.members[i], &set.members[j])) == dj
            {
                minimal = false;
                break;
            }
        }
        if minimal {
            keep.push(i);
        } else {
            extraneous.push(set.members[i].clone());
        }
    }
    // close under intersections
    let mut members: Vec<Subspace> = keep.iter().map(|&i| set.members[i].clone()).collect();
    let mut keys: BTreeSet<_> = members.iter().map(subspace_key).collect();
    loop {
        let mut added = false;
        let snapshot = members.clone();
        for a in &snapshot {
            for b in &snapshot {
                let inter = subspace_intersection(a, b);
                if inter.is_empty() {
                    continue;
                }
                let key = subspace_key(&inter);
                if !keys.contains(&key) {
                    keys.insert(key);
                    members.push(inter.clone());
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(MinimalBlowup { members, extraneous })
}

// ---------------------------------------------------------------------------
// Nested sequences of subgraphs
// ---------------------------------------------------------------------------

/// Strictly nested chain of subgraphs of a parent graph; the entries
/// γ_1 ⊊ … ⊊ γ_n are edge sets, each γ_i core for i < n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NestedSequence {
    /// The parent graph (γ_n as a standalone graph).
    pub graph: WeightedGraph,
    /// Proper prefix γ_1 ⊊ … ⊊ γ_{n-1} as edge sets of `graph`; γ_n is the
    /// whole edge set and is not stored.
    pub chain: Vec<BTreeSet<usize>>,
}

impl NestedSequence {
    pub fn singleton(graph: WeightedGraph) -> Self {
        NestedSequence { graph, chain: vec![] }
    }

    pub fn new(graph: WeightedGraph, chain: Vec<BTreeSet<usize>>) -> Result<Self, PolyError> {
        let m = graph.n_edges();
        let mut prev: Option<&BTreeSet<usize>> = None;
        for part in &chain {
            if part.is_empty() || part.iter().any(|&e| e >= m) {
                return Err(PolyError::Invalid("bad chain entry".into()));
            }
            if let Some(p) = prev {
                if !p.is_subset(part) || p == part {
                    return Err(PolyError::Invalid("chain not strictly nested".into()));
                }
            }
            if !graph.is_core(part) {
                return Err(PolyError::NotCore);
            }
            if part.len() == m {
                return Err(PolyError::Invalid("chain entry equals the full graph".into()));
            }
            prev = Some(part);
        }
        Ok(NestedSequence { graph, chain })
    }

    pub fn length(&self) -> usize {
        self.chain.len() + 1
    }

    /// |E_{γ_n}| - n + 1; one more than the dimension of the associated cell.
    pub fn edge_degree(&self) -> usize {
        self.graph.n_edges() + 1 - self.length()
    }

    /// Level of each edge: the least i (1-based) with e ∈ γ_i.
    pub fn levels(&self) -> Vec<u32> {
        let n = self.length();
        (0..self.graph.n_edges())
            .map(|e| {
                for (i, part) in self.chain.iter().enumerate() {
                    if part.contains(&e) {
                        return (i + 1) as u32;
                    }
                }
                n as u32
            })
            .collect()
    }

    /// Edges of the graded piece γ_i/γ_{i-1} (1-based i), ascending.
    pub fn piece_edges(&self, i: usize) -> Vec<usize> {
        let levels = self.levels();
        (0..self.graph.n_edges()).filter(|&e| levels[e] == i as u32).collect()
    }

    /// An edge is admissible when it is neither a self-edge in its graded
    /// quotient nor the only edge of that quotient.
    pub fn is_admissible(&self, e: usize) -> bool {
        if e >= self.graph.n_edges() {
            return false;
        }
        let levels = self.levels();
        let lvl = levels[e];
        let piece: Vec<usize> = (0..self.graph.n_edges()).filter(|&x| levels[x] == lvl).collect();
        if piece.len() == 1 {
            return false;
        }
        // self-edge in the quotient γ_i / γ_{i-1}: endpoints identified after
        // contracting γ_{i-1}
        let below: BTreeSet<usize> = if lvl >= 2 { self.chain[(lvl - 2) as usize].clone() } else { BTreeSet::new() };
        let (u, v) = self.graph.edges[e];
        if u == v {
            return false;
        }
        if below.is_empty() {
            return true;
        }
        let labels = {
            let mut uf: Vec<usize> = (0..self.graph.n_vertices()).collect();
            fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
                while uf[x] != x {
                    uf[x] = uf[uf[x]];
                    x = uf[x];
                }
                x
            }
            for &be in &below {
                let (a, b) = self.graph.edges[be];
                let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
                if ra != rb {
                    uf[ra] = rb;
                }
            }
            let mut out = vec![0usize; self.graph.n_vertices()];
            for x in 0..self.graph.n_vertices() {
                out[x] = find(&mut uf, x);
            }
            out
        };
        labels[u] != labels[v]
    }

    /// Contract an admissible edge: ((γ_1 ∪ e)/e, …, γ_n/e).
    pub fn contract(&self, e: usize) -> Result<NestedSequence, PolyError> {
        if !self.is_admissible(e) {
            return Err(PolyError::InadmissibleEdge);
        }
        let (graph, emap) = self.graph.contract_edge_with_map(e).map_err(|_| PolyError::InadmissibleEdge)?;
        let chain: Vec<BTreeSet<usize>> = self
            .chain
            .iter()
            .map(|part| {
                part.iter()
                    .chain(std::iter::once(&e))
                    .filter_map(|&x| emap[x])
                    .collect::<BTreeSet<usize>>()
            })
            .collect();
        NestedSequence::new(graph, chain)
    }

    /// Insert a core subgraph strictly between two chain entries (or below
    /// the first / above the last proper entry).
    pub fn refine(&self, gamma: &BTreeSet<usize>) -> Result<NestedSequence, PolyError> {
        if gamma.is_empty() || gamma.len() >= self.graph.n_edges() {
            return Err(PolyError::Invalid("refinement must be a proper nonempty subgraph".into()));
        }
        if !self.graph.is_core(gamma) {
            return Err(PolyError::NotCore);
        }
        // find the position: strictly between consecutive entries
        let mut pos = None;
        let n = self.chain.len();
        for i in 0..=n {
            let lower_ok = if i == 0 {
                true
            } else {
                self.chain[i - 1].is_subset(gamma) && &self.chain[i - 1] != gamma
            };
            let upper_ok = if i == n {
                true
            } else {
                gamma.is_subset(&self.chain[i]) && gamma != &self.chain[i]
            };
            if lower_ok && upper_ok {
                pos = Some(i);
                break;
            }
        }
        let Some(pos) = pos else {
            return Err(PolyError::Invalid("refinement does not nest strictly".into()));
        };
        let mut chain = self.chain.clone();
        chain.insert(pos, gamma.clone());
        NestedSequence::new(self.graph.clone(), chain)
    }
}

/// The faces of the blown-up simplex of a graph, one per object of the
/// nested-sequence category generated from the full graph by admissible
/// contractions and refinements. Labelled edges, no isomorphism quotient.
pub fn graph_blown_faces(g: &WeightedGraph) -> Vec<NestedSequence> {
    let mut seen: BTreeSet<NestedSequence> = BTreeSet::new();
    let mut queue: Vec<NestedSequence> = vec![NestedSequence::singleton(g.clone())];
    seen.insert(queue[0].clone());
    while let Some(seq) = queue.pop() {
        if seq.edge_degree() <= 1 {
            continue; // dimension 0: no further faces
        }
        for e in 0..seq.graph.n_edges() {
            if let Ok(next) = seq.contract(e) {
                if next.edge_degree() >= 1 && seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        // refinements by every proper nonempty core subgraph
        let m = seq.graph.n_edges();
        for mask in 1..(1u32 << m) - 1 {
            let gamma: BTreeSet<usize> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
            if !seq.graph.is_core(&gamma) {
                continue;
            }
            if let Ok(next) = seq.refine(&gamma) {
                if next.edge_degree() >= 1 && seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Codimension of the face associated to a nested sequence inside the
/// blown-up simplex of `ambient_edges` edges.
pub fn blown_face_codim(ambient_edges: usize, seq: &NestedSequence) -> usize {
    ambient_edges - seq.graph.n_edges() + seq.length() - 1
}

/// Independent facet count for the blown-up graph simplex: non-self edges
/// plus proper nonempty core subgraphs, from a direct bridge-test scan.
pub fn graph_blown_facet_count_direct(g: &WeightedGraph) -> usize {
    let m = g.n_edges();
    let non_self = g.edges.iter().filter(|&&(u, v)| u != v).count();
    let mut cores = 0;
    for mask in 1..(1u64 << m) - 1 {
        let set: BTreeSet<usize> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
        if g.is_core(&set) {
            cores += 1;
        }
    }
    non_self + cores
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{dumbbell, sunrise, wheel3};

    fn ratv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn dd_simplex_boolean_lattice() {
        // 3 independent rays in ℚ^3: simplicial cone
        let pts = vec![ratv(&[1, 0, 0]), ratv(&[0, 1, 0]), ratv(&[0, 0, 1])];
        let fd = dd_facets(&pts).unwrap();
        assert_eq!(fd.normals.len(), 3);
        let faces = face_lattice(&pts).unwrap();
        // nonempty faces of a 2-simplex: 3 vertices + 3 edges + 1 top = 7
        assert_eq!(faces.len(), 7);
    }

    #[test]
    fn dd_matches_brute_force_on_square() {
        // square cone: 4 rays in ℚ^3 spanning a 3-dim cone with 4 facets
        let pts = vec![
            ratv(&[1, 1, 0]),
            ratv(&[1, -1, 0]),
            ratv(&[1, 0, 1]),
            ratv(&[1, 0, -1]),
        ];
        let fd = dd_facets(&pts).unwrap();
        let brute = brute_force_facets(&pts);
        let dd_sets: BTreeSet<_> = fd.tight.iter().cloned().collect();
        let brute_sets: BTreeSet<_> = brute.into_iter().collect();
        assert_eq!(dd_sets, brute_sets);
        assert_eq!(fd.normals.len(), 4);
    }

    #[test]
    fn normal_polyhedron_of_simplex_face() {
        // standard simplex on 4 coordinates; W = span(e0, e1)
        let pts: Vec<Vec<Rat>> = (0..4)
            .map(|i| {
                let mut v = vec![Rat::zero(); 4];
                v[i] = rat(1);
                v
            })
            .collect();
        let w = vec![ratv(&[1, 0, 0, 0]), ratv(&[0, 1, 0, 0])];
        let normal = normal_polyhedron(&pts, &w).unwrap();
        // images: e2, e3 survive; normal is a simplex on 2 generators
        assert_eq!(normal.len(), 2);
        // W = 0: the polyhedron itself
        let same = normal_polyhedron(&pts, &[]).unwrap();
        assert_eq!(same.len(), 4);
        // vertex figure: W = span(e0) cuts the vertex e0
        let w = vec![ratv(&[1, 0, 0, 0])];
        let fig = normal_polyhedron(&pts, &w).unwrap();
        assert_eq!(fig.len(), 3);
    }

    #[test]
    fn minimal_blowup_drops_extraneous() {
        // simplex; T ⊂ W cut the same face (the vertex e0):
        // T = span(e0), W = span(e0, e1 - e2) — W meets the simplex only at e0.
        let pts: Vec<Vec<Rat>> = (0..3)
            .map(|i| {
                let mut v = vec![Rat::zero(); 3];
                v[i] = rat(1);
                v
            })
            .collect();
        let t: Subspace = vec![ratv(&[1, 0, 0])];
        let w: Subspace = vec![ratv(&[1, 0, 0]), ratv(&[0, 1, -1])];
        let set = BlowupSet { members: vec![t.clone(), w.clone()] };
        let min = minimal_blowup_set(&set, &pts).unwrap();
        assert_eq!(min.members.len(), 1);
        assert_eq!(subspace_key(&min.members[0]), subspace_key(&t));
        assert_eq!(min.extraneous.len(), 1);

        // a member disjoint from σ entirely is extraneous
        let off: Subspace = vec![ratv(&[1, -1, 0])];
        let set = BlowupSet { members: vec![off.clone()] };
        let min = minimal_blowup_set(&set, &pts).unwrap();
        assert!(min.members.is_empty());
        assert_eq!(min.extraneous.len(), 1);
    }

    #[test]
    fn nested_sequence_ops() {
        let w3 = wheel3();
        // contract a rim edge of the singleton (W3): length-1 sequence again
        let s = NestedSequence::singleton(w3.clone());
        let c = s.contract(0).unwrap();
        assert_eq!(c.length(), 1);
        assert_eq!(c.graph.n_edges(), 5);

        // refine (W3) by the rim 3-cycle: edge degree 6 - 2 + 1 = 5
        let rim: BTreeSet<usize> = [0, 1, 2].into();
        let r = s.refine(&rim).unwrap();
        assert_eq!(r.length(), 2);
        assert_eq!(r.edge_degree(), 5);

        // non-core refinement refused
        let bad: BTreeSet<usize> = [3].into();
        assert_eq!(s.refine(&bad), Err(PolyError::NotCore));

        // (γ, W3) with γ = rim cycle: contract an edge of W3 \ γ
        let c = r.contract(3).unwrap();
        assert_eq!(c.length(), 2);
        assert!(c.graph.is_core(&c.chain[0]));
        assert_eq!(c.edge_degree(), 4);

        // inadmissible: the only edge of a piece
        let theta = sunrise();
        let s = NestedSequence::new(theta.clone(), vec![[0, 1].into()]).unwrap();
        assert!(!s.is_admissible(2));
        assert_eq!(s.contract(2), Err(PolyError::InadmissibleEdge));
    }

    #[test]
    fn wheel_blown_facet_count_two_ways() {
        let w3 = wheel3();
        let faces = graph_blown_faces(&w3);
        let facets: Vec<&NestedSequence> =
            faces.iter().filter(|s| blown_face_codim(6, s) == 1).collect();
        // independent geometric count: 6 non-self edges + 13 proper cores
        assert_eq!(graph_blown_facet_count_direct(&w3), 19);
        assert_eq!(facets.len(), 19);
        // codimension formula per face
        for f in &faces {
            assert_eq!(
                blown_face_codim(6, f),
                6 - f.graph.n_edges() + f.length() - 1
            );
        }
    }

    #[test]
    fn dumbbell_blown_faces() {
        // dumbbell: 2 non-self edges? no — one bridge, two loops: 1 non-self
        // edge, core subgraphs: {0}, {2}, {0,2} = 3; facets = 1 + 3 = 4
        let d = dumbbell();
        assert_eq!(graph_blown_facet_count_direct(&d), 4);
        let faces = graph_blown_faces(&d);
        let facets = faces.iter().filter(|s| blown_face_codim(3, s) == 1).count();
        assert_eq!(facets, 4);
    }
}
