//! Exact integer linear algebra: Smith normal form, integer kernels,
//! cokernels and integer solves. All entries are arbitrary precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        let data = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        IntMatrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.data[i * columns.len() + j] = v.clone();
            }
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone().into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &BigInt) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.to_i64().expect("entry exceeds i64")).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * cols + j] = self.get(i, j).clone();
            }
            for j in 0..other.cols {
                out.data[i * cols + self.cols + j] = other.get(i, j).clone();
            }
        }
        out
    }

    /// Rows `[r0, r1)` and columns `[c0, c1)`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> IntMatrix {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.data[(i - r0) * (c1 - c0) + (j - c0)] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let c = self.cols;
        for j in 0..c {
            let s = &self.data[src * c + j];
            if !s.is_zero() {
                let add = q * s;
                self.data[dst * c + j] += add;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let c = self.cols;
        for i in 0..self.rows {
            let s = &self.data[i * c + src];
            if !s.is_zero() {
                let add = q * s;
                self.data[i * c + dst] += add;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }
}

/// `D = U * A * V` with `U`, `V` unimodular and `D` diagonal, non-negative,
/// each diagonal entry dividing the next.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Which transformation matrices to accumulate.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Track {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
    pub v_inv: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct Snf {
    pub d: IntMatrix,
    pub rank: usize,
    pub u: Option<IntMatrix>,
    pub u_inv: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub v_inv: Option<IntMatrix>,
}

impl Snf {
    pub fn diag(&self, i: usize) -> &BigInt {
        self.d.get(i, i)
    }

    /// Smith reduction with smallest-absolute-value pivoting; ties go to
    /// the lowest (row, column).
    pub fn compute(a: &IntMatrix, track: Track) -> Snf {
        let (r, c) = (a.rows, a.cols);
        let mut s = Snf {
            d: a.clone(),
            rank: 0,
            u: track.u.then(|| IntMatrix::identity(r)),
            u_inv: track.u_inv.then(|| IntMatrix::identity(r)),
            v: track.v.then(|| IntMatrix::identity(c)),
            v_inv: track.v_inv.then(|| IntMatrix::identity(c)),
        };
        let mut t = 0;
        while t < r.min(c) {
            let Some((pi, pj)) = s.smallest(t..r, t..c) else { break };
            s.row_swap(t, pi);
            s.col_swap(t, pj);
            loop {
                let mut dirty = false;
                // Clear column t below the pivot.
                for i in t + 1..r {
                    if s.d.get(i, t).is_zero() {
                        continue;
                    }
                    let q = s.d.get(i, t) / s.d.get(t, t);
                    s.row_add(i, t, &-q);
                    if !s.d.get(i, t).is_zero() {
                        dirty = true;
                    }
                }
                // Clear row t right of the pivot.
                for j in t + 1..c {
                    if s.d.get(t, j).is_zero() {
                        continue;
                    }
                    let q = s.d.get(t, j) / s.d.get(t, t);
                    s.col_add(j, t, &-q);
                    if !s.d.get(t, j).is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // A smaller remainder appeared in row or column t.
                    let (pi, pj) = s.smallest_cross(t);
                    s.row_swap(t, pi);
                    s.col_swap(t, pj);
                    continue;
                }
                // Enforce divisibility of the remaining block by the pivot.
                let p = s.d.get(t, t).clone();
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !s.d.get(i, j).is_multiple_of(&p)));
                match bad {
                    Some(i) => s.row_add(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if s.d.get(t, t).is_negative() {
                s.row_negate(t);
            }
            t += 1;
        }
        s.rank = t;
        s
    }

    fn smallest(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in rows {
            for j in cols.clone() {
                let v = self.d.get(i, j);
                if v.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => v.magnitude() < self.d.get(bi, bj).magnitude(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Smallest non-zero entry in row t and column t (pivot included).
    fn smallest_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        for i in t + 1..self.d.rows {
            let v = self.d.get(i, t);
            if !v.is_zero() && v.magnitude() < self.d.get(best.0, best.1).magnitude() {
                best = (i, t);
            }
        }
        for j in t + 1..self.d.cols {
            let v = self.d.get(t, j);
            if !v.is_zero() && v.magnitude() < self.d.get(best.0, best.1).magnitude() {
                best = (t, j);
            }
        }
        best
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.d.swap_rows(a, b);
        if let Some(u) = &mut self.u {
            u.swap_rows(a, b);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.swap_cols(a, b);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.d.swap_cols(a, b);
        if let Some(v) = &mut self.v {
            v.swap_cols(a, b);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap_rows(a, b);
        }
    }

    /// row[dst] += q * row[src]
    fn row_add(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.d.add_row(dst, src, q);
        if let Some(u) = &mut self.u {
            u.add_row(dst, src, q);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.add_col(src, dst, &-q);
        }
    }

    /// col[dst] += q * col[src]
    fn col_add(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.d.add_col(dst, src, q);
        if let Some(v) = &mut self.v {
            v.add_col(dst, src, q);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.add_row(src, dst, &-q);
        }
    }

    fn row_negate(&mut self, i: usize) {
        self.d.negate_row(i);
        if let Some(u) = &mut self.u {
            u.negate_row(i);
        }
        if let Some(ui) = &mut self.u_inv {
            let c = ui.cols;
            for k in 0..ui.rows {
                let v = std::mem::take(&mut ui.data[k * c + i]);
                ui.data[k * c + i] = -v;
            }
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let s = Snf::compute(a, Track { u: true, v: true, ..Track::default() });
    SmithDecomposition { u: s.u.unwrap(), d: s.d, v: s.v.unwrap() }
}

/// Basis of the integer kernel `{v : A v = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = Snf::compute(a, Track { v: true, ..Track::default() });
    let v = s.v.unwrap();
    (s.rank..a.cols).map(|j| v.column(j)).collect()
}

/// Finitely generated abelian group `Z^free_rank + sum Z/t_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupStructure {
    pub free_rank: usize,
    /// Invariant factors > 1, each dividing the next.
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupStructure {
    pub fn trivial() -> Self {
        AbelianGroupStructure { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroupStructure { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// `None` when the group is infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Invariant factors with a `0` for each free summand, free part last.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat(BigInt::zero()).take(self.free_rank));
        v
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion.iter().map(|t| t.to_u64().expect("invariant factor exceeds u64")).collect()
    }
}

impl Serialize for AbelianGroupStructure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            free_rank: usize,
            torsion: Vec<u64>,
        }
        Wire { free_rank: self.free_rank, torsion: self.torsion_u64() }.serialize(s)
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Structure of `Z^rows / im(A)`.
pub fn cokernel_structure(a: &IntMatrix) -> AbelianGroupStructure {
    let s = Snf::compute(a, Track::default());
    let torsion = (0..s.rank).map(|i| s.diag(i).clone()).filter(|d| !d.is_one()).collect();
    AbelianGroupStructure { free_rank: a.rows - s.rank, torsion }
}

/// Some integer solution of `A x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "right-hand side has wrong length");
    let s = Snf::compute(a, Track { u: true, v: true, ..Track::default() });
    solve_with(&s, b)
}

pub(crate) fn solve_with(s: &Snf, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = s.u.as_ref().expect("U not tracked").mul_vec(b);
    let v = s.v.as_ref().expect("V not tracked");
    let mut y = vec![BigInt::zero(); v.rows];
    for (i, ci) in c.iter().enumerate() {
        if i < s.rank {
            let (q, r) = ci.div_rem(s.diag(i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(v.mul_vec(&y))
}

/// A basis of the lattice spanned by the columns of `a`, by column
/// echelon reduction.
pub fn image_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let mut m = a.clone();
    let mut k = 0;
    for i in 0..m.rows {
        if k == m.cols {
            break;
        }
        loop {
            // Smallest non-zero entry of row i among columns k..
            let mut best: Option<usize> = None;
            for j in k..m.cols {
                let v = m.get(i, j);
                if !v.is_zero() && best.is_none_or(|b| v.magnitude() < m.get(i, b).magnitude()) {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            m.swap_cols(k, b);
            let mut done = true;
            for j in k + 1..m.cols {
                if m.get(i, j).is_zero() {
                    continue;
                }
                let q = m.get(i, j) / m.get(i, k);
                m.add_col(j, k, &-q);
                if !m.get(i, j).is_zero() {
                    done = false;
                }
            }
            if done {
                k += 1;
                break;
            }
        }
    }
    (0..k).map(|j| m.column(j)).collect()
}

pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
