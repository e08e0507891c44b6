//! Positive definite rational quadratic forms, their minimal vectors and
//! Voronoï cones, GL_g(ℤ) equivalence of cones, enumeration of perfect
//! forms by the neighbour walk, and the perfect-cone cell complex.

use crate::exactlin::{
    clear_denominators, ldlt_classify, rat, Definiteness, IntMatrix, Rat, RatMatrix,
};
use crate::polyhedral::{self, PolyError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadError {
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("cone too large")]
    ConeTooLarge,
    #[error("{0}")]
    Invalid(String),
}

/// d_g = g(g+1)/2, the dimension of the space of symmetric g×g matrices.
pub fn sym_dim(g: usize) -> usize {
    g * (g + 1) / 2
}

// ---------------------------------------------------------------------------
// Positive definite forms and minimal vectors
// ---------------------------------------------------------------------------

/// A positive definite symmetric rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosDefForm {
    pub q: RatMatrix,
}

impl PosDefForm {
    pub fn new(q: RatMatrix) -> Result<Self, QuadError> {
        if !q.is_symmetric() {
            return Err(QuadError::NotSymmetric);
        }
        match ldlt_classify(&q).map_err(|_| QuadError::NotSymmetric)? {
            Definiteness::PositiveDefinite => Ok(PosDefForm { q }),
            _ => Err(QuadError::NotPositiveDefinite),
        }
    }

    pub fn g(&self) -> usize {
        self.q.rows
    }

    pub fn value(&self, x: &[BigInt]) -> Rat {
        let xr: Vec<Rat> = x.iter().map(|v| Rat::from_integer(v.clone())).collect();
        let qx = self.q.mul_vec(&xr);
        xr.iter().zip(&qx).map(|(a, b)| a * b).sum()
    }
}

/// Unit-lower-triangular L and positive diagonal D with Q = L D Lᵀ.
fn ldlt(q: &RatMatrix) -> Option<(Vec<Vec<Rat>>, Vec<Rat>)> {
    let n = q.rows;
    let mut l = vec![vec![Rat::zero(); n]; n];
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut dj = q.get(j, j).clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return None;
        }
        d[j] = dj;
        l[j][j] = Rat::one();
        for i in j + 1..n {
            let mut v = q.get(i, j).clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &d[j];
        }
    }
    Some((l, d))
}

/// Largest integer n with n <= c + sqrt(t), for rationals c and t >= 0.
fn floor_plus_sqrt(c: &Rat, t: &Rat) -> BigInt {
    assert!(!t.is_negative());
    // predicate: n - c <= sqrt(t)  ⟺  nb - a <= 0  or  (nb-a)² q <= p b²
    let a = c.numer();
    let b = c.denom();
    let p = t.numer();
    let q = t.denom();
    let pred = |n: &BigInt| -> bool {
        let lhs = n * b - a;
        if !lhs.is_positive() {
            return true;
        }
        &lhs * &lhs * q <= p * b * b
    };
    let mut lo = c.floor().numer().clone();
    debug_assert!(pred(&lo));
    // upper bound: floor(c) + floor(sqrt(t)) + 2
    let mut hi = &lo + (p / q).sqrt() + 2;
    while pred(&hi) {
        hi += 4; // defensive; should not trigger
    }
    // binary search: pred(lo) true, pred(hi) false
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if pred(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Smallest integer n with n >= c - sqrt(t).
fn ceil_minus_sqrt(c: &Rat, t: &Rat) -> BigInt {
    -floor_plus_sqrt(&(-c.clone()), t)
}

/// Exact minimal vectors of a positive definite rational form by
/// Fincke–Pohst enumeration: returns (m(Q), one representative per ± pair,
/// primitive, sorted).
pub fn minimal_vectors(q: &RatMatrix) -> Result<(Rat, Vec<Vec<BigInt>>), QuadError> {
    let form = PosDefForm::new(q.clone())?;
    let g = form.g();
    let (l, d) = ldlt(q).ok_or(QuadError::NotPositiveDefinite)?;
    // initial bound: min over basis vectors
    let mut bound: Rat = (0..g).map(|i| q.get(i, i).clone()).min().unwrap();
    let mut found: Vec<Vec<BigInt>> = Vec::new();
    // depth-first from coordinate g-1 down to 0
    // at level i (after fixing x_{i+1..g}): remaining budget and offsets
    let mut x = vec![BigInt::zero(); g];
    fn descend(
        i: isize,
        x: &mut Vec<BigInt>,
        partial: &Rat, // sum_{k>i} d_k (x_k + offset_k)^2
        l: &Vec<Vec<Rat>>,
        d: &Vec<Rat>,
        bound: &mut Rat,
        found: &mut Vec<Vec<BigInt>>,
        g: usize,
    ) {
        if i < 0 {
            if x.iter().all(|v| v.is_zero()) {
                return;
            }
            let val = partial.clone();
            if val.is_positive() {
                if &val < bound {
                    *bound = val.clone();
                    found.clear();
                }
                if &val == bound {
                    // keep one representative per ± pair: first nonzero > 0
                    let first = x.iter().find(|v| !v.is_zero()).unwrap();
                    let rep: Vec<BigInt> = if first.is_negative() {
                        x.iter().map(|v| -v.clone()).collect()
                    } else {
                        x.clone()
                    };
                    if !found.contains(&rep) {
                        found.push(rep);
                    }
                }
            }
            return;
        }
        let iu = i as usize;
        // offset_i = sum_{j>i} L[j][i] x_j
        let mut offset = Rat::zero();
        for j in iu + 1..g {
            if !x[j].is_zero() {
                offset += &l[j][iu] * Rat::from_integer(x[j].clone());
            }
        }
        let budget = &*bound - partial;
        if budget.is_negative() {
            return;
        }
        let t = &budget / &d[iu];
        let center = -offset.clone();
        let lo = ceil_minus_sqrt(&center, &t);
        let hi = floor_plus_sqrt(&center, &t);
        let mut xi = lo;
        while xi <= hi {
            x[iu] = xi.clone();
            let c = Rat::from_integer(xi.clone()) + &offset;
            let term = &d[iu] * &c * &c;
            let new_partial = partial + &term;
            if new_partial <= *bound {
                descend(i - 1, x, &new_partial, l, d, bound, found, g);
            }
            xi += 1;
        }
        x[iu] = BigInt::zero();
    }
    descend(g as isize - 1, &mut x, &Rat::zero(), &l, &d, &mut bound, &mut found, g);
    // primitivity is automatic for minimal vectors
    for v in &found {
        let gcd = v.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
        debug_assert!(gcd.is_one(), "minimal vector not primitive");
    }
    found.sort();
    Ok((bound, found))
}

// ---------------------------------------------------------------------------
// Cones of rank-one forms
// ---------------------------------------------------------------------------

/// Cone spanned by the rank-one forms λλᵀ for a set of primitive integer
/// vectors λ (one per ± pair).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub g: usize,
    pub generators: Vec<Vec<BigInt>>,
}

/// Symmetric-coordinate vector of λλᵀ with doubled off-diagonal entries, so
/// that ⟨R, vec(λ)⟩ = λᵀRλ for a plain symmetric-coordinate functional R.
pub fn sym_point(lambda: &[BigInt]) -> Vec<Rat> {
    let g = lambda.len();
    let mut v = Vec::with_capacity(sym_dim(g));
    for i in 0..g {
        for j in i..g {
            let prod = Rat::from_integer(&lambda[i] * &lambda[j]);
            v.push(if i == j { prod } else { prod * rat(2) });
        }
    }
    v
}

/// Symmetric-coordinate vector (upper triangle, no doubling) of a matrix.
pub fn sym_coords(m: &RatMatrix) -> Vec<Rat> {
    let g = m.rows;
    let mut v = Vec::with_capacity(sym_dim(g));
    for i in 0..g {
        for j in i..g {
            v.push(m.get(i, j).clone());
        }
    }
    v
}

/// Rebuild a symmetric matrix from its upper-triangle coordinates.
pub fn sym_from_coords(g: usize, v: &[Rat]) -> RatMatrix {
    let mut m = RatMatrix::zeros(g, g);
    let mut k = 0;
    for i in 0..g {
        for j in i..g {
            m.set(i, j, v[k].clone());
            m.set(j, i, v[k].clone());
            k += 1;
        }
    }
    m
}

impl Cone {
    pub fn new(g: usize, mut generators: Vec<Vec<BigInt>>) -> Self {
        for v in &mut generators {
            assert_eq!(v.len(), g);
            if let Some(first) = v.iter().find(|x| !x.is_zero()) {
                if first.is_negative() {
                    for x in v.iter_mut() {
                        *x = -x.clone();
                    }
                }
            }
        }
        generators.sort();
        generators.dedup();
        Cone { g, generators }
    }

    /// Points of the cone in doubled symmetric coordinates.
    pub fn points(&self) -> Vec<Vec<Rat>> {
        self.generators.iter().map(|l| sym_point(l)).collect()
    }

    /// Dimension of the span of {λλᵀ}.
    pub fn rank(&self) -> usize {
        RatMatrix::from_rows(self.points()).rank()
    }

    /// Projective dimension of the cell.
    pub fn dim(&self) -> usize {
        self.rank() - 1
    }

    /// Sum of the rank-one generators; positive definite iff the cone is
    /// strictly positive.
    pub fn barycenter_form(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.g, self.g);
        for l in &self.generators {
            for i in 0..self.g {
                for j in 0..self.g {
                    let v = m.get(i, j) + Rat::from_integer(&l[i] * &l[j]);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// K_σ: the intersection of the null spaces of the generators, i.e. the
    /// orthogonal complement of span{λ}; saturated integer basis.
    pub fn null_space(&self) -> Vec<Vec<BigInt>> {
        cone_null_space(&self.generators)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.null_space().is_empty()
    }

    pub fn sub_cone(&self, idx: &BTreeSet<usize>) -> Cone {
        Cone::new(self.g, idx.iter().map(|&i| self.generators[i].clone()).collect())
    }
}

/// K_σ for an arbitrary generator list.
pub fn cone_null_space(generators: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    assert!(!generators.is_empty());
    let m = IntMatrix::from_rows(generators.to_vec());
    m.kernel_saturated()
}

/// The face of σ cut out by ℙ(𝒬(V/K)): generators orthogonal to K.
pub fn face_from_kernel(cone: &Cone, k_basis: &[Vec<BigInt>]) -> BTreeSet<usize> {
    (0..cone.generators.len())
        .filter(|&i| {
            k_basis.iter().all(|k| {
                cone.generators[i]
                    .iter()
                    .zip(k)
                    .map(|(a, b)| a * b)
                    .sum::<BigInt>()
                    .is_zero()
            })
        })
        .collect()
}

/// σ_F^ess = σ ∩ ℙ(𝒬(V/K_{σ_F})): contains F and is idempotent.
pub fn essential_envelope(cone: &Cone, face: &BTreeSet<usize>) -> BTreeSet<usize> {
    if face.is_empty() {
        return (0..cone.generators.len()).collect();
    }
    let gens: Vec<Vec<BigInt>> = face.iter().map(|&i| cone.generators[i].clone()).collect();
    let k = cone_null_space(&gens);
    if k.is_empty() {
        return (0..cone.generators.len()).collect();
    }
    face_from_kernel(cone, &k)
}

/// Voronoï cone of a positive definite form.
pub fn cone_of_form(q: &RatMatrix) -> Result<(Rat, Cone), QuadError> {
    let (m, vecs) = minimal_vectors(q)?;
    let g = q.rows;
    Ok((m, Cone::new(g, vecs)))
}

/// Perfect ⟺ the cone has maximal dimension d_g.
pub fn is_perfect(q: &RatMatrix) -> Result<bool, QuadError> {
    let (_, cone) = cone_of_form(q)?;
    Ok(cone.rank() == sym_dim(q.rows))
}

/// All faces of the cone (generator subsets with dimensions), by exact
/// facet enumeration on the span. Desk-scale guard: projective dim <= 9.
pub fn cone_faces(cone: &Cone) -> Result<Vec<(BTreeSet<usize>, usize)>, QuadError> {
    let faces = polyhedral::face_lattice(&cone.points()).map_err(|e| match e {
        PolyError::TooLarge => QuadError::ConeTooLarge,
        other => QuadError::Invalid(other.to_string()),
    })?;
    Ok(faces)
}

/// Facet data (normals as symmetric matrices + tight generator sets).
pub fn cone_facets(cone: &Cone) -> Result<Vec<(RatMatrix, BTreeSet<usize>)>, QuadError> {
    let fd = polyhedral::dd_facets(&cone.points()).map_err(|e| match e {
        PolyError::TooLarge => QuadError::ConeTooLarge,
        other => QuadError::Invalid(other.to_string()),
    })?;
    Ok(fd
        .normals
        .iter()
        .zip(fd.tight)
        .map(|(n, t)| (sym_from_coords(cone.g, n), t))
        .collect())
}

// ---------------------------------------------------------------------------
// GL_g(ℤ) equivalence of cones
// ---------------------------------------------------------------------------

/// Unimodular change of basis acting on forms by Q ↦ hᵀQh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMap {
    pub h: IntMatrix,
}

fn int_inverse_unimodular(m: &IntMatrix) -> IntMatrix {
    let n = m.rows;
    let rm = m.to_rat();
    let mut cols = Vec::new();
    for j in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[j] = rat(1);
        let x = rm.solve(&e).expect("unimodular matrix is invertible");
        cols.push(x);
    }
    let mut out = IntMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let v = &cols[j][i];
            assert!(v.denom().is_one(), "inverse of unimodular matrix must be integral");
            out.set(i, j, v.numer().clone());
        }
    }
    out
}

/// Complete a saturated g×r column basis to a unimodular g×g matrix.
fn complete_to_unimodular(cols: &[Vec<BigInt>]) -> IntMatrix {
    let g = cols[0].len();
    let r = cols.len();
    let m = IntMatrix::from_rows(
        (0..g).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect(),
    );
    let snf = crate::exactlin::smith_normal_form(&m);
    assert_eq!(snf.rank, r, "columns must be independent");
    assert!(snf.diagonal.iter().all(|d| d.is_one()), "lattice must be saturated");
    let uinv = int_inverse_unimodular(&snf.u);
    let mut out = IntMatrix::zeros(g, g);
    for j in 0..r {
        for i in 0..g {
            out.set(i, j, cols[j][i].clone());
        }
    }
    for j in r..g {
        for i in 0..g {
            out.set(i, j, uinv.get(i, j).clone());
        }
    }
    let d = out.det().abs();
    assert!(d.is_one(), "completion failed");
    out
}

/// Find every lattice map sending the ± generator classes of c1 onto those
/// of c2 (as maps of the saturated span lattices), extended to GL_g(ℤ).
/// With `all = false` stops at the first witness.
fn cone_maps(c1: &Cone, c2: &Cone, all: bool) -> Vec<UnimodularMap> {
    let mut out = Vec::new();
    if c1.g != c2.g || c1.generators.len() != c2.generators.len() {
        return out;
    }
    let g = c1.g;
    let m = c1.generators.len();
    // saturated span lattices
    let span = |c: &Cone| -> Vec<Vec<BigInt>> {
        let mat = IntMatrix::from_rows(c.generators.clone());
        // rows span the lattice; saturate via kernel-of-kernel
        let k = mat.kernel_saturated();
        if k.is_empty() {
            return (0..g)
                .map(|i| {
                    let mut e = vec![BigInt::zero(); g];
                    e[i] = BigInt::one();
                    e
                })
                .collect();
        }
        let km = IntMatrix::from_rows(k);
        km.kernel_saturated()
    };
    let s1 = span(c1);
    let s2 = span(c2);
    if s1.len() != s2.len() {
        return out;
    }
    let r = s1.len();
    // coordinates of generators in the span basis
    let coords = |s: &[Vec<BigInt>], gens: &[Vec<BigInt>]| -> Option<Vec<Vec<BigInt>>> {
        let basis = RatMatrix::from_rows(
            s.iter().map(|row| row.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect(),
        )
        .transpose();
        let mut res = Vec::new();
        for l in gens {
            let lr: Vec<Rat> = l.iter().map(|x| Rat::from_integer(x.clone())).collect();
            let sol = basis.solve(&lr)?;
            let mut iv = Vec::new();
            for v in &sol {
                if !v.denom().is_one() {
                    return None; // saturated, so this cannot happen
                }
                iv.push(v.numer().clone());
            }
            res.push(iv);
        }
        Some(res)
    };
    let Some(g1) = coords(&s1, &c1.generators) else { return out };
    let Some(g2) = coords(&s2, &c2.generators) else { return out };
    // T = Σ λλᵀ in span coordinates (positive definite there), and the
    // T⁻¹-gram matrices, which any equivalence must preserve up to signs.
    let gram = |gs: &[Vec<BigInt>]| -> RatMatrix {
        let mut t = RatMatrix::zeros(r, r);
        for l in gs {
            for i in 0..r {
                for j in 0..r {
                    let v = t.get(i, j) + Rat::from_integer(&l[i] * &l[j]);
                    t.set(i, j, v);
                }
            }
        }
        let mut cols = Vec::new();
        for j in 0..r {
            let mut e = vec![Rat::zero(); r];
            e[j] = rat(1);
            cols.push(t.solve(&e).expect("T positive definite"));
        }
        // P[i][j] = λ_i ᵀ T⁻¹ λ_j
        let mut p = RatMatrix::zeros(gs.len(), gs.len());
        let tinv = {
            let mut ti = RatMatrix::zeros(r, r);
            for j in 0..r {
                for i in 0..r {
                    ti.set(i, j, cols[j][i].clone());
                }
            }
            ti
        };
        for i in 0..gs.len() {
            let li: Vec<Rat> = gs[i].iter().map(|x| Rat::from_integer(x.clone())).collect();
            let ti_li = tinv.mul_vec(&li);
            for j in 0..gs.len() {
                let lj: Vec<Rat> = gs[j].iter().map(|x| Rat::from_integer(x.clone())).collect();
                let v: Rat = lj.iter().zip(&ti_li).map(|(a, b)| a * b).sum();
                p.set(i, j, v);
            }
        }
        p
    };
    let p1 = gram(&g1);
    let p2 = gram(&g2);
    // invariant filter: sorted |gram| multisets
    let multiset = |p: &RatMatrix| -> Vec<Rat> {
        let mut v: Vec<Rat> = (0..p.rows)
            .flat_map(|i| (0..p.cols).map(move |j| (i, j)))
            .map(|(i, j)| {
                let x = p.get(i, j).clone();
                if x.is_negative() {
                    -x
                } else {
                    x
                }
            })
            .collect();
        v.sort();
        v
    };
    if multiset(&p1) != multiset(&p2) {
        return out;
    }
    // backtracking over the assignment i -> (target, sign)
    let mut assign: Vec<(usize, i8)> = Vec::with_capacity(m);
    let mut used = vec![false; m];
    #[allow(clippy::too_many_arguments)]
    fn bt(
        i: usize,
        m: usize,
        p1: &RatMatrix,
        p2: &RatMatrix,
        assign: &mut Vec<(usize, i8)>,
        used: &mut Vec<bool>,
        finish: &mut impl FnMut(&[(usize, i8)]) -> bool,
    ) -> bool {
        if i == m {
            return finish(assign);
        }
        for t in 0..m {
            if used[t] {
                continue;
            }
            for s in [1i8, -1] {
                // consistency with already assigned pairs
                let ok = p1.get(i, i) == p2.get(t, t)
                    && assign.iter().enumerate().all(|(j, &(tj, sj))| {
                        let expect = p1.get(i, j).clone() * rat((s * sj) as i64);
                        expect == *p2.get(t, tj)
                    });
                if !ok {
                    continue;
                }
                assign.push((t, s));
                used[t] = true;
                if bt(i + 1, m, p1, p2, assign, used, finish) {
                    return true;
                }
                used[t] = false;
                assign.pop();
            }
        }
        false
    }
    let b1 = complete_to_unimodular(&s1);
    let b2 = complete_to_unimodular(&s2);
    let b1_inv = int_inverse_unimodular(&b1);
    let mut results: Vec<UnimodularMap> = Vec::new();
    {
        let mut finish = |assign: &[(usize, i8)]| -> bool {
            // solve u over a spanning subset, verify on all
            let mut rows_src: Vec<Vec<Rat>> = Vec::new();
            let mut rows_dst: Vec<Vec<Rat>> = Vec::new();
            let mut chosen: Vec<usize> = Vec::new();
            for i in 0..m {
                let cand: Vec<Rat> = g1[i].iter().map(|x| Rat::from_integer(x.clone())).collect();
                let mut test = rows_src.clone();
                test.push(cand.clone());
                if RatMatrix::from_rows(test).rank() > rows_src.len() {
                    rows_src.push(cand);
                    let (t, s) = assign[i];
                    let dst: Vec<Rat> = g2[t]
                        .iter()
                        .map(|x| Rat::from_integer(x.clone() * BigInt::from(s)))
                        .collect();
                    rows_dst.push(dst);
                    chosen.push(i);
                    if rows_src.len() == r {
                        break;
                    }
                }
            }
            if rows_src.len() < r {
                return false;
            }
            // u · srcᵀ = dstᵀ  ⇒  u = dstᵀ · (srcᵀ)⁻¹
            let src = RatMatrix::from_rows(rows_src).transpose();
            let dst = RatMatrix::from_rows(rows_dst).transpose();
            let mut ucols: Vec<Vec<Rat>> = Vec::new();
            for j in 0..r {
                let e: Vec<Rat> = (0..r).map(|i| src.get(i, j).clone()).collect();
                let _ = e;
            }
            // solve src x_k = e_k to build src⁻¹, then u = dst · src⁻¹
            let mut src_inv_cols = Vec::new();
            for j in 0..r {
                let mut e = vec![Rat::zero(); r];
                e[j] = rat(1);
                let Some(x) = src.solve(&e) else { return false };
                src_inv_cols.push(x);
            }
            let mut src_inv = RatMatrix::zeros(r, r);
            for j in 0..r {
                for i in 0..r {
                    src_inv.set(i, j, src_inv_cols[j][i].clone());
                }
            }
            let u = dst.mul(&src_inv);
            ucols.clear();
            // integrality and determinant
            let mut u_int = IntMatrix::zeros(r, r);
            for i in 0..r {
                for j in 0..r {
                    let v = u.get(i, j);
                    if !v.denom().is_one() {
                        return false;
                    }
                    u_int.set(i, j, v.numer().clone());
                }
            }
            if !u_int.det().abs().is_one() {
                return false;
            }
            // verify the full assignment
            for i in 0..m {
                let (t, s) = assign[i];
                let img = u_int.mul_vec(&g1[i]);
                let want: Vec<BigInt> =
                    g2[t].iter().map(|x| x.clone() * BigInt::from(s)).collect();
                if img != want {
                    return false;
                }
            }
            // extend to GL_g(ℤ): hᵀ = B2 · diag(u, I) · B1⁻¹
            let g = b1_inv.rows;
            let mut block = IntMatrix::identity(g);
            for i in 0..r {
                for j in 0..r {
                    block.set(i, j, u_int.get(i, j).clone());
                }
            }
            let ht = b2.mul(&block).mul(&b1_inv);
            let h = ht.transpose();
            results.push(UnimodularMap { h });
            !all
        };
        bt(0, m, &p1, &p2, &mut assign, &mut used, &mut finish);
    }
    out = results;
    out
}

/// A unimodular h with hᵀ·(σ1 generators as forms)·h = σ2 generators, i.e.
/// hᵀ maps the ± classes of σ1's vectors onto σ2's. None when inequivalent.
pub fn cone_equivalent(c1: &Cone, c2: &Cone) -> Option<UnimodularMap> {
    cone_maps(c1, c2, false).into_iter().next()
}

/// The full automorphism group of a cone inside GL_g(ℤ) (as maps of the
/// generator set).
pub fn cone_automorphisms(cone: &Cone) -> Vec<UnimodularMap> {
    cone_maps(cone, cone, true)
}

/// Apply h: generators λ ↦ hᵀ λ (so forms map by Q ↦ hᵀQh ... the cone of
/// λλᵀ maps to the cone of (hᵀλ)(hᵀλ)ᵀ).
pub fn apply_map(cone: &Cone, map: &UnimodularMap) -> Cone {
    let ht = map.h.transpose();
    Cone::new(cone.g, cone.generators.iter().map(|l| ht.mul_vec(l)).collect())
}

// ---------------------------------------------------------------------------
// Voronoï neighbour walk
// ---------------------------------------------------------------------------

/// The principal form 2·(Σx_i² + Σ_{i<j} x_i x_j): 2 on the diagonal, 1 off.
/// Minimum 2, minimal vectors {e_i} ∪ {e_i - e_j}, perfect for every g.
pub fn principal_form(g: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            m.set(i, j, if i == j { rat(2) } else { rat(1) });
        }
    }
    m
}

fn form_value(q: &RatMatrix, x: &[BigInt]) -> Rat {
    let xr: Vec<Rat> = x.iter().map(|v| Rat::from_integer(v.clone())).collect();
    let qx = q.mul_vec(&xr);
    xr.iter().zip(&qx).map(|(a, b)| a * b).sum()
}

fn is_pd(q: &RatMatrix) -> bool {
    matches!(ldlt_classify(q), Ok(Definiteness::PositiveDefinite))
}

fn scale_mat(q: &RatMatrix, c: &Rat) -> RatMatrix {
    let mut out = q.clone();
    for i in 0..q.rows {
        for j in 0..q.cols {
            out.set(i, j, q.get(i, j) * c);
        }
    }
    out
}

fn add_mat(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let mut out = a.clone();
    for i in 0..a.rows {
        for j in 0..a.cols {
            out.set(i, j, a.get(i, j) + b.get(i, j));
        }
    }
    out
}

/// Exact ray shooting across a facet of a perfect cone: the smallest t > 0
/// such that Q + tR acquires a new minimal vector at the same minimum m.
/// `facet` is the set of minimal vectors of Q annihilated by R.
fn neighbor_parameter(
    q: &RatMatrix,
    m: &Rat,
    r: &RatMatrix,
    facet: &BTreeSet<Vec<BigInt>>,
) -> Rat {
    let mut lo = Rat::zero();
    let mut hi: Option<Rat> = None;
    let mut t = rat(1);
    loop {
        let probe = add_mat(q, &scale_mat(r, &t));
        if !is_pd(&probe) {
            hi = Some(t.clone());
        } else {
            let (m2, vecs) = minimal_vectors(&probe).expect("probe PD");
            if &m2 == m {
                let set: BTreeSet<Vec<BigInt>> = vecs.into_iter().collect();
                if set == *facet {
                    lo = t.clone();
                } else {
                    debug_assert!(facet.is_subset(&set));
                    return t;
                }
            } else {
                // exact candidate from the violating vectors;
                // (m - Q[µ]) / R[µ] with R[µ] < 0 is >= the true parameter
                let mut best: Option<Rat> = None;
                for mu in &vecs {
                    let rmu = form_value(r, mu);
                    if rmu.is_negative() {
                        let cand = (m - form_value(q, mu)) / rmu;
                        if best.as_ref().map_or(true, |b| &cand < b) {
                            best = Some(cand);
                        }
                    }
                }
                let cand = best.expect("a violating vector must have R[µ] < 0");
                debug_assert!(cand > lo && cand < t);
                hi = Some(cand.clone());
                t = cand;
                continue;
            }
        }
        t = match &hi {
            None => &lo * rat(2),
            Some(h) => (&lo + h) / rat(2),
        };
        if t.is_zero() {
            t = rat(1);
        }
    }
}

/// A perfect form together with its Voronoï cone.
#[derive(Debug, Clone)]
pub struct PerfectForm {
    pub q: RatMatrix,
    pub min: Rat,
    pub cone: Cone,
}

/// Enumerate the inequivalent perfect forms of rank g by Voronoï's
/// neighbour algorithm starting from the principal form. Exact; terminates
/// when the class set is closed under taking neighbours.
pub fn enumerate_perfect_forms(g: usize) -> Result<Vec<PerfectForm>, QuadError> {
    let q0 = principal_form(g);
    let (m0, cone0) = cone_of_form(&q0)?;
    assert_eq!(cone0.rank(), sym_dim(g), "principal form is perfect");
    let mut classes: Vec<PerfectForm> = vec![PerfectForm { q: q0, min: m0, cone: cone0 }];
    let mut frontier: Vec<usize> = vec![0];
    while let Some(idx) = frontier.pop() {
        let current = classes[idx].clone();
        let facets = cone_facets(&current.cone)?;
        for (normal, tight) in facets {
            let facet_vecs: BTreeSet<Vec<BigInt>> =
                tight.iter().map(|&i| current.cone.generators[i].clone()).collect();
            let t = neighbor_parameter(&current.q, &current.min, &normal, &facet_vecs);
            let neighbor = add_mat(&current.q, &scale_mat(&normal, &t));
            let (mn, conen) = cone_of_form(&neighbor)?;
            debug_assert_eq!(mn, current.min);
            debug_assert_eq!(conen.rank(), sym_dim(g), "neighbour of a perfect form is perfect");
            let known = classes.iter().any(|c| cone_equivalent(&conen, &c.cone).is_some());
            if !known {
                classes.push(PerfectForm { q: neighbor, min: mn, cone: conen });
                frontier.push(classes.len() - 1);
            }
        }
    }
    Ok(classes)
}

// ---------------------------------------------------------------------------
// Restriction of forms to a subspace (the π_K projection)
// ---------------------------------------------------------------------------

/// Deterministic complement: saturate K, then extend by the earliest
/// standard basis vectors. Returns (K basis, complement basis) as columns.
pub fn adapted_basis(g: usize, k: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    // saturate K
    let k_sat: Vec<Vec<BigInt>> = if k.is_empty() {
        vec![]
    } else {
        let m = IntMatrix::from_rows(k.to_vec());
        let ker = m.kernel_saturated();
        if ker.is_empty() {
            (0..g)
                .map(|i| {
                    let mut e = vec![BigInt::zero(); g];
                    e[i] = BigInt::one();
                    e
                })
                .collect()
        } else {
            IntMatrix::from_rows(ker).kernel_saturated()
        }
    };
    let mut rows: Vec<Vec<Rat>> = k_sat
        .iter()
        .map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let mut comp: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..g {
        if rows.len() + 0 == g {
            break;
        }
        let mut e = vec![Rat::zero(); g];
        e[i] = rat(1);
        let mut test = rows.clone();
        test.push(e.clone());
        if RatMatrix::from_rows(test).rank() > rows.len() {
            rows.push(e);
            let mut ei = vec![BigInt::zero(); g];
            ei[i] = BigInt::one();
            comp.push(ei);
        }
    }
    (k_sat, comp)
}

/// Q restricted to K: the matrix (k_iᵀ Q k_j) in the supplied (or default
/// adapted) basis of K.
pub fn restrict_form(q: &RatMatrix, k: &[Vec<BigInt>]) -> RatMatrix {
    let r = k.len();
    let mut out = RatMatrix::zeros(r, r);
    for i in 0..r {
        let ki: Vec<Rat> = k[i].iter().map(|x| Rat::from_integer(x.clone())).collect();
        let qki = q.mul_vec(&ki);
        for j in 0..r {
            let kj: Vec<Rat> = k[j].iter().map(|x| Rat::from_integer(x.clone())).collect();
            out.set(i, j, kj.iter().zip(&qki).map(|(a, b)| a * b).sum());
        }
    }
    out
}

/// det(s*_K Q) as coefficients of z^0..z^g in the blow-up chart scaling the
/// K-block rows/columns by z (exact, by interpolation).
pub fn det_blowup_poly(q: &RatMatrix, k: &[Vec<BigInt>]) -> Vec<Rat> {
    let g = q.rows;
    let (k_sat, comp) = adapted_basis(g, k);
    let kd = k_sat.len();
    // basis change B = [K | C] (columns); Q in the adapted basis
    let mut b = RatMatrix::zeros(g, g);
    for (j, col) in k_sat.iter().chain(comp.iter()).enumerate() {
        for i in 0..g {
            b.set(i, j, Rat::from_integer(col[i].clone()));
        }
    }
    let qb = b.transpose().mul(q).mul(&b);
    // evaluate det at z = 0..g and interpolate
    let mut values = Vec::with_capacity(g + 1);
    let points: Vec<Rat> = (0..=g as i64).map(rat).collect();
    for z in &points {
        let mut m = qb.clone();
        for i in 0..g {
            for j in 0..g {
                if i < kd || j < kd {
                    let v = m.get(i, j) * z;
                    m.set(i, j, v);
                }
            }
        }
        values.push(m.det());
    }
    // Lagrange interpolation to coefficients
    lagrange_coeffs(&points, &values)
}

fn lagrange_coeffs(xs: &[Rat], ys: &[Rat]) -> Vec<Rat> {
    let n = xs.len();
    let mut coeffs = vec![Rat::zero(); n];
    for i in 0..n {
        // basis polynomial ∏_{j≠i} (x - x_j) / (x_i - x_j)
        let mut poly = vec![Rat::zero(); n];
        poly[0] = rat(1);
        let mut deg = 0;
        let mut denom = rat(1);
        for j in 0..n {
            if j == i {
                continue;
            }
            // poly *= (x - xs[j])
            let mut next = vec![Rat::zero(); n];
            for d in 0..=deg {
                next[d + 1] += &poly[d];
                next[d] -= &poly[d] * &xs[j];
            }
            poly = next;
            deg += 1;
            denom *= &xs[i] - &xs[j];
        }
        let scale = &ys[i] / denom;
        for d in 0..n {
            coeffs[d] += &poly[d] * &scale;
        }
    }
    coeffs
}

// ---------------------------------------------------------------------------
// The perfect-cone cell complex
// ---------------------------------------------------------------------------

/// One GL_g(ℤ)-class of cells in the perfect-cone decomposition.
#[derive(Debug, Clone)]
pub struct CellClass {
    pub cone: Cone,
    /// Projective dimension of the cell.
    pub dim: usize,
    /// K_σ ≠ 0, i.e. the cell lies in the determinant locus.
    pub at_infinity: bool,
    /// Automorphisms of the representative inside GL_g(ℤ).
    pub stabilizer: Vec<UnimodularMap>,
    /// For every facet of the representative: (class index, witness mapping
    /// the facet onto that class representative).
    pub facets: Vec<(usize, BTreeSet<usize>, UnimodularMap)>,
}

#[derive(Debug, Clone)]
pub struct PerfectComplex {
    pub g: usize,
    pub cells: Vec<CellClass>,
    /// Indices of the top-dimensional classes (one per perfect form).
    pub top: Vec<usize>,
}

/// Assemble the cell complex of the perfect-cone decomposition for small g:
/// every GL_g(ℤ)-class of faces of every perfect cone, face incidences with
/// identification witnesses, stabilizers, and at-infinity flags.
pub fn assemble_perfect_complex(g: usize) -> Result<PerfectComplex, QuadError> {
    let forms = enumerate_perfect_forms(g)?;
    let mut cells: Vec<CellClass> = Vec::new();
    let mut reps: Vec<Cone> = Vec::new();
    let mut top = Vec::new();
    // collect all face cones of all perfect cones, dedup by equivalence
    let mut queue: Vec<Cone> = Vec::new();
    for f in &forms {
        queue.push(f.cone.clone());
    }
    let mut find_or_insert = |cone: &Cone, reps: &mut Vec<Cone>| -> usize {
        for (i, r) in reps.iter().enumerate() {
            if cone_equivalent(cone, r).is_some() {
                return i;
            }
        }
        reps.push(cone.clone());
        reps.len() - 1
    };
    let mut pending: Vec<usize> = Vec::new();
    for f in &forms {
        let id = find_or_insert(&f.cone, &mut reps);
        top.push(id);
        pending.push(id);
    }
    let mut processed: BTreeSet<usize> = BTreeSet::new();
    while let Some(id) = pending.pop() {
        if processed.contains(&id) {
            continue;
        }
        processed.insert(id);
        let rep = reps[id].clone();
        if rep.dim() == 0 {
            continue;
        }
        let facets = cone_facets(&rep)?;
        for (_, tight) in facets {
            let sub = rep.sub_cone(&tight);
            let fid = find_or_insert(&sub, &mut reps);
            if !processed.contains(&fid) {
                pending.push(fid);
            }
        }
    }
    // build cell data
    for rep in reps.iter() {
        let dim = rep.dim();
        let at_infinity = !rep.is_strictly_positive();
        let stabilizer = cone_automorphisms(rep);
        let mut facet_data = Vec::new();
        if dim > 0 {
            for (_, tight) in cone_facets(rep)? {
                let sub = rep.sub_cone(&tight);
                let (fid, witness) = reps
                    .iter()
                    .enumerate()
                    .find_map(|(i, r)| cone_equivalent(&sub, r).map(|w| (i, w)))
                    .expect("facet class present by construction");
                facet_data.push((fid, tight, witness));
            }
        }
        cells.push(CellClass {
            cone: rep.clone(),
            dim,
            at_infinity,
            stabilizer,
            facets: facet_data,
        });
    }
    Ok(PerfectComplex { g, cells, top })
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

pub fn form_to_json(q: &RatMatrix) -> serde_json::Value {
    let rows: Vec<Vec<String>> = (0..q.rows)
        .map(|i| (0..q.cols).map(|j| crate::exactlin::format_rat(q.get(i, j))).collect())
        .collect();
    serde_json::json!({ "g": q.rows, "Q": rows })
}

pub fn form_from_json(v: &serde_json::Value) -> Result<RatMatrix, QuadError> {
    let g = v["g"].as_u64().ok_or_else(|| QuadError::Invalid("missing g".into()))? as usize;
    let rows = v["Q"].as_array().ok_or_else(|| QuadError::Invalid("missing Q".into()))?;
    if rows.len() != g {
        return Err(QuadError::Invalid("row count mismatch".into()));
    }
    let mut out = RatMatrix::zeros(g, g);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| QuadError::Invalid("bad row".into()))?;
        if row.len() != g {
            return Err(QuadError::Invalid("column count mismatch".into()));
        }
        for (j, cell) in row.iter().enumerate() {
            let s = cell.as_str().ok_or_else(|| QuadError::Invalid("entries are strings".into()))?;
            let r = crate::exactlin::parse_rat(s)
                .ok_or_else(|| QuadError::Invalid(format!("bad rational {s}")))?;
            out.set(i, j, r);
        }
    }
    Ok(out)
}

pub fn cone_to_json(c: &Cone) -> serde_json::Value {
    let gens: Vec<Vec<String>> = c
        .generators
        .iter()
        .map(|l| l.iter().map(|x| x.to_string()).collect())
        .collect();
    serde_json::json!({ "g": c.g, "generators": gens })
}

pub fn cone_from_json(v: &serde_json::Value) -> Result<Cone, QuadError> {
    let g = v["g"].as_u64().ok_or_else(|| QuadError::Invalid("missing g".into()))? as usize;
    let gens = v["generators"]
        .as_array()
        .ok_or_else(|| QuadError::Invalid("missing generators".into()))?;
    let mut out = Vec::new();
    for gen in gens {
        let arr = gen.as_array().ok_or_else(|| QuadError::Invalid("bad generator".into()))?;
        if arr.len() != g {
            return Err(QuadError::Invalid("generator length mismatch".into()));
        }
        let mut vec = Vec::new();
        for x in arr {
            let s = x
                .as_i64()
                .map(BigInt::from)
                .or_else(|| x.as_str().and_then(|s| s.parse().ok()))
                .ok_or_else(|| QuadError::Invalid("bad integer".into()))?;
            vec.push(s);
        }
        out.push(vec);
    }
    Ok(Cone::new(g, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratq;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn a_form(g: usize) -> RatMatrix {
        // 2 on the diagonal, 1 off: twice the principal form, same minima
        let mut m = RatMatrix::zeros(g, g);
        for i in 0..g {
            for j in 0..g {
                m.set(i, j, if i == j { rat(2) } else { rat(1) });
            }
        }
        m
    }

    #[test]
    fn minimal_vectors_g2() {
        // x1² + x1x2 + x2²
        let q = RatMatrix::from_rows(vec![
            vec![rat(1), ratq(1, 2)],
            vec![ratq(1, 2), rat(1)],
        ]);
        let (m, vecs) = minimal_vectors(&q).unwrap();
        assert_eq!(m, rat(1));
        assert_eq!(vecs, vec![bi(&[0, 1]), bi(&[1, -1]), bi(&[1, 0])]);
    }

    #[test]
    fn minimal_vectors_q3() {
        let q = a_form(3);
        let (m, vecs) = minimal_vectors(&q).unwrap();
        assert_eq!(m, rat(2));
        let expect: Vec<Vec<BigInt>> = vec![
            bi(&[0, 0, 1]),
            bi(&[0, 1, -1]),
            bi(&[0, 1, 0]),
            bi(&[1, -1, 0]),
            bi(&[1, 0, -1]),
            bi(&[1, 0, 0]),
        ];
        assert_eq!(vecs, expect);
    }

    #[test]
    fn minimal_vectors_identity() {
        let q = RatMatrix::identity(4);
        let (m, vecs) = minimal_vectors(&q).unwrap();
        assert_eq!(m, rat(1));
        assert_eq!(vecs.len(), 4);
        for (i, v) in vecs.iter().enumerate() {
            let _ = i;
            assert_eq!(v.iter().filter(|x| !x.is_zero()).count(), 1);
        }
        // exhaustiveness cross-check against a brute-force box for g <= 3
        let q = a_form(3);
        let (m, vecs) = minimal_vectors(&q).unwrap();
        let mut brute = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let x = bi(&[a, b, c]);
                    let form = PosDefForm::new(q.clone()).unwrap();
                    if form.value(&x) == m {
                        let first = x.iter().find(|v| !v.is_zero()).unwrap();
                        let rep: Vec<BigInt> = if first.is_negative() {
                            x.iter().map(|v| -v.clone()).collect()
                        } else {
                            x
                        };
                        if !brute.contains(&rep) {
                            brute.push(rep);
                        }
                    }
                }
            }
        }
        brute.sort();
        assert_eq!(vecs, brute);
    }

    #[test]
    fn minimal_vectors_rejects_semidefinite() {
        let q = RatMatrix::from_int_rows(&[vec![1, -1], vec![-1, 1]]);
        assert_eq!(minimal_vectors(&q), Err(QuadError::NotPositiveDefinite));
    }

    #[test]
    fn perfection() {
        // g=2 principal form: rank 3 = d_2, perfect
        let q = a_form(2);
        let (_, cone) = cone_of_form(&q).unwrap();
        assert_eq!(cone.rank(), 3);
        assert!(is_perfect(&q).unwrap());
        // identity: cone of e_i e_iᵀ has rank 2 < 3
        let q = RatMatrix::identity(2);
        let (_, cone) = cone_of_form(&q).unwrap();
        assert_eq!(cone.rank(), 2);
        assert!(!is_perfect(&q).unwrap());
        // Q3: rank 6 = d_3
        assert!(is_perfect(&a_form(3)).unwrap());
    }

    #[test]
    fn null_spaces_and_faces() {
        let (_, cone) = cone_of_form(&a_form(3)).unwrap();
        // full cone: strictly positive
        assert!(cone.null_space().is_empty());
        // single generator: K = λ^⊥, dimension 2
        let single = cone.sub_cone(&BTreeSet::from([0]));
        assert_eq!(single.null_space().len(), 2);
        // K = span{e1}: face with vanishing first row/column
        let k = vec![bi(&[1, 0, 0])];
        let face = face_from_kernel(&cone, &k);
        // generators orthogonal to e1: (0,0,1), (0,1,-1), (0,1,0)
        assert_eq!(face.len(), 3);
        for &i in &face {
            assert!(cone.generators[i][0].is_zero());
        }
        // K = 0: the whole cone; K = ℚ^3: empty
        assert_eq!(face_from_kernel(&cone, &[]).len(), 6);
        let full: Vec<Vec<BigInt>> = vec![bi(&[1, 0, 0]), bi(&[0, 1, 0]), bi(&[0, 0, 1])];
        assert!(face_from_kernel(&cone, &full).is_empty());
    }

    #[test]
    fn essential_envelope_properties() {
        let (_, cone) = cone_of_form(&a_form(3)).unwrap();
        let faces = cone_faces(&cone).unwrap();
        for (face, _) in &faces {
            let env = essential_envelope(&cone, face);
            assert!(face.is_subset(&env), "F ⊆ F^ess");
            let env2 = essential_envelope(&cone, &env);
            assert_eq!(env, env2, "idempotent");
        }
        // strictly positive face: envelope is the whole cone
        let all: BTreeSet<usize> = (0..6).collect();
        assert_eq!(essential_envelope(&cone, &all), all);
    }

    #[test]
    fn q3_face_lattice() {
        let (_, cone) = cone_of_form(&a_form(3)).unwrap();
        // 6 affinely independent generators: a 5-simplex
        let faces = cone_faces(&cone).unwrap();
        // nonempty faces of a 5-simplex: 2^6 - 1 - 1 (empty excluded; all
        // subsets are faces) = 63... including the cone itself: 63
        assert_eq!(faces.len(), 63);
        let facets = cone_facets(&cone).unwrap();
        assert_eq!(facets.len(), 6);
        // facet normals: λᵀRλ >= 0 on all generators, zero on the tight set
        for (r, tight) in &facets {
            for (i, l) in cone.generators.iter().enumerate() {
                let lr: Vec<Rat> = l.iter().map(|x| Rat::from_integer(x.clone())).collect();
                let val: Rat = r.mul_vec(&lr).iter().zip(&lr).map(|(a, b)| a * b).sum();
                assert_eq!(val.is_zero(), tight.contains(&i));
                assert!(!val.is_negative());
            }
        }
    }

    #[test]
    fn equivalence_roundtrip() {
        // σ vs hᵀσh for a random-ish unimodular h
        let (_, cone) = cone_of_form(&a_form(3)).unwrap();
        let mut h = IntMatrix::identity(3);
        h.set(0, 1, BigInt::from(2));
        h.set(1, 2, BigInt::from(-1));
        let map = UnimodularMap { h };
        let image = apply_map(&cone, &map);
        let witness = cone_equivalent(&cone, &image).expect("equivalent by construction");
        let roundtrip = apply_map(&cone, &witness);
        assert_eq!(roundtrip.generators, image.generators);

        // inequivalent by rank: g=2 perfect cone vs identity cone
        let (_, c1) = cone_of_form(&a_form(2)).unwrap();
        let (_, c2) = cone_of_form(&RatMatrix::identity(2)).unwrap();
        assert!(cone_equivalent(&c1, &c2).is_none());
    }

    #[test]
    fn perfect_form_counts_g2_g3() {
        let forms = enumerate_perfect_forms(2).unwrap();
        assert_eq!(forms.len(), 1);
        let forms = enumerate_perfect_forms(3).unwrap();
        assert_eq!(forms.len(), 1);
    }

    #[test]
    fn perfect_form_counts_g4() {
        let forms = enumerate_perfect_forms(4).unwrap();
        assert_eq!(forms.len(), 2);
        // the two classes have different minimal-vector counts (A4: 10, D4: 12)
        let mut counts: Vec<usize> = forms.iter().map(|f| f.cone.generators.len()).collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![10, 12]);
        assert!(cone_equivalent(&forms[0].cone, &forms[1].cone).is_none());
    }

    #[test]
    fn restrict_form_examples() {
        // block diag(A, 0), K = first factor
        let q = RatMatrix::from_int_rows(&[
            vec![2, 1, 0],
            vec![1, 3, 0],
            vec![0, 0, 0],
        ]);
        let k = vec![bi(&[1, 0, 0]), bi(&[0, 1, 0])];
        let a = restrict_form(&q, &k);
        assert_eq!(a, RatMatrix::from_int_rows(&[vec![2, 1], vec![1, 3]]));
        // K = V: Q itself
        let full = vec![bi(&[1, 0, 0]), bi(&[0, 1, 0]), bi(&[0, 0, 1])];
        assert_eq!(restrict_form(&q, &full), q);
    }

    #[test]
    fn det_blowup_factorisation() {
        // random-ish Q, K: det(s*_K Q) = z^{dim K} det(Q_K) det(Q_C) + O(z^{k+1})
        let q = RatMatrix::from_int_rows(&[
            vec![3, 1, -1, 0],
            vec![1, 4, 2, 1],
            vec![-1, 2, 5, -2],
            vec![0, 1, -2, 6],
        ]);
        let k = vec![bi(&[1, 0, 1, 0]), bi(&[0, 1, 0, -1])];
        let coeffs = det_blowup_poly(&q, &k);
        let (k_sat, comp) = adapted_basis(4, &k);
        assert_eq!(k_sat.len(), 2);
        for c in coeffs.iter().take(2) {
            assert!(c.is_zero(), "coefficients below z^dimK vanish");
        }
        let qk = restrict_form(&q, &k_sat).det();
        let qc = restrict_form(&q, &comp).det();
        assert_eq!(coeffs[2], qk * qc);
    }

    #[test]
    fn perfect_complex_g2() {
        let pc = assemble_perfect_complex(2).unwrap();
        // classes: vertex (at infinity), edge, triangle
        assert_eq!(pc.cells.len(), 3);
        let by_dim: Vec<usize> = (0..3)
            .map(|d| pc.cells.iter().filter(|c| c.dim == d).count())
            .collect();
        assert_eq!(by_dim, vec![1, 1, 1]);
        let vertex = pc.cells.iter().find(|c| c.dim == 0).unwrap();
        assert!(vertex.at_infinity);
        let edge = pc.cells.iter().find(|c| c.dim == 1).unwrap();
        assert!(!edge.at_infinity);
        let top = pc.cells.iter().find(|c| c.dim == 2).unwrap();
        assert!(!top.at_infinity);
        // the triangle's stabilizer realises the symmetric group on its 3
        // vertices (order 12 in GL_2(ℤ) including -1 central)
        assert!(top.stabilizer.len() >= 6);
        assert_eq!(top.facets.len(), 3);
    }

    #[test]
    fn equivariance_of_minimal_vectors() {
        // M_{hᵀQh} = h⁻¹ M_Q as ± classes
        let q = a_form(3);
        let mut h = IntMatrix::identity(3);
        h.set(0, 1, BigInt::from(1));
        h.set(2, 0, BigInt::from(-2));
        let ht = h.transpose();
        let hq = ht.to_rat().mul(&q).mul(&h.to_rat());
        let (m1, v1) = minimal_vectors(&q).unwrap();
        let (m2, v2) = minimal_vectors(&hq).unwrap();
        assert_eq!(m1, m2);
        let hinv = int_inverse_unimodular(&h);
        let mut mapped: Vec<Vec<BigInt>> = v1
            .iter()
            .map(|l| {
                let img = hinv.mul_vec(l);
                let first = img.iter().find(|x| !x.is_zero()).unwrap();
                if first.is_negative() {
                    img.iter().map(|x| -x.clone()).collect()
                } else {
                    img
                }
            })
            .collect();
        mapped.sort();
        assert_eq!(mapped, v2);
    }
}
