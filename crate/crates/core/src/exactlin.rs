//! Exact rational and integer linear algebra.
//!
//! Everything in this module is certificate-grade: no floating point.
//! Homology ranks, definiteness classifications and kernel bases computed
//! here are consumed by every other module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (invariants maintained by `num_rational`).
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratq(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "p/q" or "p" into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(p))
        }
    }
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

// ---------------------------------------------------------------------------
// Rational matrices
// ---------------------------------------------------------------------------

/// Dense matrix over ℚ.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_rat(self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Rank over ℚ by Gaussian elimination with exact arithmetic.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut col = 0;
        while rank < m.rows && col < m.cols {
            let pivot = (rank..m.rows).find(|&i| !m.get(i, col).is_zero());
            let Some(p) = pivot else {
                col += 1;
                continue;
            };
            if p != rank {
                for j in 0..m.cols {
                    m.data.swap(rank * m.cols + j, p * m.cols + j);
                }
            }
            let inv = m.get(rank, col).recip();
            for j in col..m.cols {
                let v = m.get(rank, j) * &inv;
                m.set(rank, j, v);
            }
            for i in 0..m.rows {
                if i != rank && !m.get(i, col).is_zero() {
                    let f = m.get(i, col).clone();
                    for j in col..m.cols {
                        let v = m.get(i, j) - &f * m.get(rank, j);
                        m.set(i, j, v);
                    }
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Basis of the right kernel, cleared to primitive integer vectors.
    ///
    /// Empty iff the matrix has full column rank.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        // Reduced row echelon, tracking pivot columns.
        let mut m = self.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            let pivot = (r..m.rows).find(|&i| !m.get(i, col).is_zero());
            let Some(p) = pivot else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(r * m.cols + j, p * m.cols + j);
                }
            }
            let inv = m.get(r, col).recip();
            for j in col..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, col).is_zero() {
                    let f = m.get(i, col).clone();
                    for j in col..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..m.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); m.cols];
            v[free] = Rat::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -m.get(prow, free).clone();
            }
            basis.push(clear_denominators(&v));
        }
        basis
    }

    /// Determinant by fraction-free style elimination over ℚ.
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !m.get(i, k).is_zero());
            let Some(p) = pivot else { return Rat::zero() };
            if p != k {
                for j in 0..n {
                    m.data.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            det *= m.get(k, k).clone();
            let inv = m.get(k, k).recip();
            for i in k + 1..n {
                if m.get(i, k).is_zero() {
                    continue;
                }
                let f = m.get(i, k) * &inv;
                for j in k..n {
                    let v = m.get(i, j) - &f * m.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solve self * x = b; `None` when inconsistent, least-pivot free vars set to 0.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            let pivot = (r..m.rows).find(|&i| !m.get(i, col).is_zero());
            let Some(p) = pivot else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(r * m.cols + j, p * m.cols + j);
                }
                rhs.swap(r, p);
            }
            let inv = m.get(r, col).recip();
            for j in col..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            rhs[r] = &rhs[r] * &inv;
            for i in 0..m.rows {
                if i != r && !m.get(i, col).is_zero() {
                    let f = m.get(i, col).clone();
                    for j in col..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                    rhs[i] = &rhs[i] - &f * &rhs[r];
                }
            }
            pivots.push((r, col));
            r += 1;
            if r == m.rows {
                break;
            }
        }
        for i in r..m.rows {
            if !rhs[i].is_zero() {
                return None;
            }
        }
        let mut x = vec![Rat::zero(); self.cols];
        for &(prow, pcol) in &pivots {
            x[pcol] = rhs[prow].clone();
        }
        Some(x)
    }
}

/// Scale a rational vector to a primitive integer vector (clear denominators,
/// divide by content, fix sign so the first nonzero entry is positive).
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * &lcm / x.denom()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in &mut ints {
            *x /= &g;
        }
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -x.clone();
            }
        }
    }
    ints
}

// ---------------------------------------------------------------------------
// Integer matrices and Smith normal form
// ---------------------------------------------------------------------------

/// Dense matrix over ℤ.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn det(&self) -> BigInt {
        let d = self.to_rat().det();
        assert!(d.denom().is_one());
        d.numer().clone()
    }

    /// Saturated basis of the right kernel over ℤ (columns of V matching the
    /// zero part of the Smith form; unimodularity of V gives saturation).
    pub fn kernel_saturated(&self) -> Vec<Vec<BigInt>> {
        let snf = smith_normal_form(self);
        let mut out = Vec::new();
        for j in snf.rank..self.cols {
            let col: Vec<BigInt> = (0..self.cols).map(|i| snf.v.get(i, j).clone()).collect();
            out.push(col);
        }
        out
    }
}

/// Result of a Smith normal form computation: U * M * V = diag(d1..dr),
/// with U, V unimodular and d1 | d2 | ... | dr.
#[derive(Debug, Clone)]
pub struct Snf {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

/// Smith normal form by elementary row/column operations with
/// smallest-magnitude pivot selection to damp entry growth.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.rows;
    let cols = m.cols;
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let mut t = 0;
    'outer: while t < rows.min(cols) {
        // Find the nonzero entry of least magnitude in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a.get(i, j).is_zero()
                    && best.map_or(true, |(bi, bj)| a.get(i, j).abs() < a.get(bi, bj).abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        // Move pivot to (t, t).
        if pi != t {
            for j in 0..cols {
                a.data.swap(t * cols + j, pi * cols + j);
            }
            for j in 0..rows {
                u.data.swap(t * rows + j, pi * rows + j);
            }
        }
        if pj != t {
            for i in 0..rows {
                a.data.swap(i * cols + t, i * cols + pj);
            }
            for i in 0..cols {
                v.data.swap(i * cols + t, i * cols + pj);
            }
        }
        // Reduce column and row by the pivot.
        let mut dirty = false;
        for i in t + 1..rows {
            if a.get(i, t).is_zero() {
                continue;
            }
            let q = div_round(a.get(i, t), a.get(t, t));
            if !q.is_zero() {
                for j in 0..cols {
                    let val = a.get(i, j) - &q * a.get(t, j);
                    a.set(i, j, val);
                }
                for j in 0..rows {
                    let val = u.get(i, j) - &q * u.get(t, j);
                    u.set(i, j, val);
                }
            }
            if !a.get(i, t).is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..cols {
            if a.get(t, j).is_zero() {
                continue;
            }
            let q = div_round(a.get(t, j), a.get(t, t));
            if !q.is_zero() {
                for i in 0..rows {
                    let val = a.get(i, j) - &q * a.get(i, t);
                    a.set(i, j, val);
                }
                for i in 0..cols {
                    let val = v.get(i, j) - &q * v.get(i, t);
                    v.set(i, j, val);
                }
            }
            if !a.get(t, j).is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue 'outer; // smaller remainders exist, re-pivot
        }
        // Row and column are clear; enforce divisibility of the remaining block.
        let d = a.get(t, t).clone();
        for i in t + 1..rows {
            for j in t + 1..cols {
                if !(a.get(i, j) % &d).is_zero() {
                    // add row i to row t and restart the step
                    for jj in 0..cols {
                        let val = a.get(t, jj) + a.get(i, jj);
                        a.set(t, jj, val);
                    }
                    for jj in 0..rows {
                        let val = u.get(t, jj) + u.get(i, jj);
                        u.set(t, jj, val);
                    }
                    continue 'outer;
                }
            }
        }
        t += 1;
    }

    let mut diagonal = Vec::new();
    for k in 0..rows.min(cols) {
        let d = a.get(k, k).abs();
        if d.is_zero() {
            break;
        }
        diagonal.push(d);
    }
    let rank = diagonal.len();
    Snf { diagonal, rank, u, v }
}

/// Nearest-integer division used by the SNF reduction steps.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    // Round toward the nearest multiple to shrink remainders faster.
    if (&r * 2i32).abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Exact rank over ℚ.
pub fn rational_rank(m: &RatMatrix) -> usize {
    m.rank()
}

/// Basis of the right kernel of a rational matrix, primitive integer vectors.
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<BigInt>> {
    m.kernel_basis()
}

// ---------------------------------------------------------------------------
// Definiteness classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    /// Positive semi-definite with nontrivial kernel; carries a primitive
    /// integer basis of the kernel.
    PositiveSemidefinite(Vec<Vec<BigInt>>),
    Indefinite,
}

/// Exact classification of a symmetric rational matrix by LDLᵀ-style
/// symmetric elimination with diagonal pivoting.
///
/// For a PSD matrix a zero diagonal entry forces its whole row to vanish, so
/// diagonal pivoting is complete: a nonzero entry in a zero-diagonal row, or
/// a negative pivot, certifies that the form is not positive semi-definite.
pub fn ldlt_classify(q: &RatMatrix) -> Result<Definiteness, LinError> {
    if !q.is_symmetric() {
        return Err(LinError::NotSymmetric);
    }
    let n = q.rows;
    let mut m = q.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = 0;
    while !active.is_empty() {
        // Pick an index with nonzero diagonal.
        let pos = active.iter().position(|&i| !m.get(i, i).is_zero());
        match pos {
            None => {
                // All remaining diagonal entries are zero: PSD iff the
                // remaining block is identically zero.
                for &i in &active {
                    for &j in &active {
                        if !m.get(i, j).is_zero() {
                            return Ok(Definiteness::Indefinite);
                        }
                    }
                }
                break;
            }
            Some(p) => {
                let k = active[p];
                let d = m.get(k, k).clone();
                if d.is_negative() {
                    return Ok(Definiteness::Indefinite);
                }
                pivots += 1;
                active.remove(p);
                let inv = d.recip();
                for a in 0..active.len() {
                    let i = active[a];
                    if m.get(i, k).is_zero() {
                        continue;
                    }
                    let f = m.get(i, k) * &inv;
                    for b in 0..active.len() {
                        let j = active[b];
                        let val = m.get(i, j) - &f * m.get(k, j);
                        m.set(i, j, val);
                    }
                }
            }
        }
    }
    if pivots == n {
        Ok(Definiteness::PositiveDefinite)
    } else {
        Ok(Definiteness::PositiveSemidefinite(q.kernel_basis()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent rank oracle: fraction-free (Bareiss) elimination over ℤ.
    fn bareiss_rank(m: &[Vec<i64>]) -> usize {
        if m.is_empty() || m[0].is_empty() {
            return 0;
        }
        let rows = m.len();
        let cols = m[0].len();
        let mut a: Vec<Vec<BigInt>> =
            m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..cols {
            let piv = (rank..rows).find(|&i| !a[i][col].is_zero());
            let Some(p) = piv else { continue };
            a.swap(rank, p);
            for i in 0..rows {
                if i == rank {
                    continue;
                }
                for j in 0..cols {
                    if j == col {
                        continue;
                    }
                    let num = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                    a[i][j] = num.checked_div(&prev).expect("bareiss divisibility");
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn snf_identity() {
        let m = IntMatrix::identity(3);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.rank, 3);
        assert!(snf.diagonal.iter().all(|d| d.is_one()));
    }

    #[test]
    fn snf_zero() {
        let m = IntMatrix::zeros(2, 5);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.rank, 0);
        assert!(snf.diagonal.is_empty());
    }

    #[test]
    fn snf_divisibility_and_transforms() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&m);
        // U M V must reproduce the diagonal.
        let umv = snf.u.mul(&m).mul(&snf.v);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j && i < snf.rank { snf.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(umv.get(i, j).abs(), expect, "at ({i},{j})");
            }
        }
        for w in snf.diagonal.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
        }
        assert_eq!(snf.u.det().abs(), BigInt::one());
        assert_eq!(snf.v.det().abs(), BigInt::one());
    }

    #[test]
    fn rational_rank_examples() {
        assert_eq!(rational_rank(&RatMatrix::from_int_rows(&[vec![0]])), 0);
        assert_eq!(rational_rank(&RatMatrix::identity(4)), 4);
        // Sunrise Laplacian at x1=x2=x3=1: [[2,-1],[-1,2]] has rank 2.
        let lap = RatMatrix::from_int_rows(&[vec![2, -1], vec![-1, 2]]);
        assert_eq!(rational_rank(&lap), 2);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RatMatrix::identity(3)).is_empty());
        // Rank-1 form λλᵀ with λ=(1,0): kernel spanned by (0,1).
        let m = RatMatrix::from_int_rows(&[vec![1, 0], vec![0, 0]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![BigInt::zero(), BigInt::one()]]);
        // W3 Laplacian in the 4-cycle basis with edges {1,2,4,5} contracted,
        // at generic positive x3, x6: diag(0, x6, x3); kernel = h1.
        let m = RatMatrix::from_int_rows(&[vec![0, 0, 0], vec![0, 3, 0], vec![0, 0, 2]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![BigInt::one(), BigInt::zero(), BigInt::zero()]]);
    }

    #[test]
    fn ldlt_examples() {
        // x1^2 + x1 x2 + x2^2
        let q = RatMatrix::from_rows(vec![
            vec![rat(1), ratq(1, 2)],
            vec![ratq(1, 2), rat(1)],
        ]);
        assert_eq!(ldlt_classify(&q).unwrap(), Definiteness::PositiveDefinite);

        // λλᵀ with λ=(1,-1): PSD with kernel (1,1).
        let q = RatMatrix::from_int_rows(&[vec![1, -1], vec![-1, 1]]);
        match ldlt_classify(&q).unwrap() {
            Definiteness::PositiveSemidefinite(k) => {
                assert_eq!(k, vec![vec![BigInt::one(), BigInt::one()]]);
            }
            other => panic!("expected PSD, got {other:?}"),
        }

        let q = RatMatrix::from_int_rows(&[vec![1, 0], vec![0, -1]]);
        assert_eq!(ldlt_classify(&q).unwrap(), Definiteness::Indefinite);

        let q = RatMatrix::from_int_rows(&[vec![0, 1], vec![0, 0]]);
        assert_eq!(ldlt_classify(&q), Err(LinError::NotSymmetric));
    }

    #[test]
    fn kernel_saturated_is_saturated() {
        // ker of [2 0 0] over ℚ∩ℤ^3 must be spanned by (0,1,0),(0,0,1),
        // not a finite-index sublattice.
        let m = IntMatrix::from_i64_rows(&[vec![2, 0, 0]]);
        let k = m.kernel_saturated();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v[0].is_zero());
            let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            assert!(g.is_one());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn snf_rank_matches_rational_rank(entries in proptest::collection::vec(-5i64..=5, 36)) {
            let rows: Vec<Vec<i64>> = entries.chunks(6).map(|c| c.to_vec()).collect();
            let im = IntMatrix::from_i64_rows(&rows);
            let snf = smith_normal_form(&im);
            prop_assert_eq!(snf.rank, im.to_rat().rank());
            prop_assert_eq!(snf.rank, bareiss_rank(&rows));
        }

        #[test]
        fn kernel_vectors_annihilate(entries in proptest::collection::vec(-4i64..=4, 20)) {
            let rows: Vec<Vec<i64>> = entries.chunks(5).map(|c| c.to_vec()).collect();
            let m = RatMatrix::from_int_rows(&rows);
            let kernel = kernel_basis(&m);
            prop_assert_eq!(kernel.len(), m.cols - m.rank());
            for v in kernel {
                let vr: Vec<Rat> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
                let prod = m.mul_vec(&vr);
                prop_assert!(prod.iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn ldlt_congruence_invariance(seed in 0u64..500) {
            // Random symmetric 3x3 and random unimodular h: classification of
            // hᵀQh matches classification of Q.
            let mut s = seed;
            let mut next = move || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((s >> 33) % 7) as i64 - 3 };
            let a = vec![next(), next(), next()];
            let b = vec![next(), next(), next()];
            let q = RatMatrix::from_int_rows(&[
                vec![a[0]*a[0] + b[0]*b[0], a[0]*a[1] + b[0]*b[1], a[0]*a[2] + b[0]*b[2]],
                vec![a[0]*a[1] + b[0]*b[1], a[1]*a[1] + b[1]*b[1], a[1]*a[2] + b[1]*b[2]],
                vec![a[0]*a[2] + b[0]*b[2], a[1]*a[2] + b[1]*b[2], a[2]*a[2] + b[2]*b[2]],
            ]);
            // Unimodular: product of elementary shears.
            let mut h = RatMatrix::identity(3);
            h.set(0, 1, rat(next()));
            let mut h2 = RatMatrix::identity(3);
            h2.set(2, 0, rat(next()));
            let h = h.mul(&h2);
            let hq = h.transpose().mul(&q).mul(&h);
            let c1 = ldlt_classify(&q).unwrap();
            let c2 = ldlt_classify(&hq).unwrap();
            let tag = |c: &Definiteness| match c {
                Definiteness::PositiveDefinite => 0,
                Definiteness::PositiveSemidefinite(_) => 1,
                Definiteness::Indefinite => 2,
            };
            prop_assert_eq!(tag(&c1), tag(&c2));
        }
    }
}
