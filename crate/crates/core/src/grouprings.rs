//! The integral group ring `ZQ`, `Q`-modules, Fox derivatives and free
//! resolutions of `Z`.
//!
//! Free `ZQ`-modules are left modules. A `ZqMatrix` describes a
//! homomorphism of free left modules in row convention: row `i` is the
//! image of the `i`-th source basis vector, so the composite "first `A`,
//! then `B`" is the product `A * B`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::IntMatrix;
use crate::presentations::{Presentation, WordMap};
use crate::words::{Alphabet, Letter, Word};

/// Element of `ZQ`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    group: Arc<FiniteGroup>,
    coeffs: BTreeMap<usize, i64>,
}

impl std::fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.coeffs.iter().map(|(g, c)| format!("{c}[{g}]")).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl GroupRingElement {
    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        GroupRingElement { group: group.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(group: &Arc<FiniteGroup>) -> Self {
        Self::basis(group, 0)
    }

    /// The group element `g` viewed in `ZQ`.
    pub fn basis(group: &Arc<FiniteGroup>, g: usize) -> Self {
        Self::from_terms(group, [(g, 1)])
    }

    pub fn from_terms(group: &Arc<FiniteGroup>, terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut e = Self::zero(group);
        for (g, c) in terms {
            e.add_term(g, c);
        }
        e
    }

    /// Sum of all group elements.
    pub fn norm(group: &Arc<FiniteGroup>) -> Self {
        Self::from_terms(group, group.elements().map(|g| (g, 1)))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn add_term(&mut self, g: usize, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(g).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&g);
        }
    }

    pub fn coeff(&self, g: usize) -> i64 {
        self.coeffs.get(&g).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(&g, &c)| (g, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn augmentation(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in other.terms() {
            out.add_term(g, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(&self.group, self.terms().map(|(g, c)| (g, c * k)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.group);
        for (g, a) in self.terms() {
            for (h, b) in other.terms() {
                out.add_term(self.group.mul(g, h), a * b);
            }
        }
        out
    }

    /// `|Q| x |Q|` integer matrix of `x -> x * self` on the basis of group
    /// elements (column `h` holds the coordinates of `h * self`).
    pub fn right_multiplication_matrix(&self) -> IntMatrix {
        let n = self.group.order();
        let mut m = IntMatrix::zeros(n, n);
        for h in 0..n {
            for (g, c) in self.terms() {
                m.add_to(self.group.mul(h, g), h, &BigInt::from(c));
            }
        }
        m
    }

    /// `|Q| x |Q|` integer matrix of `x -> self * x`.
    pub fn left_multiplication_matrix(&self) -> IntMatrix {
        let n = self.group.order();
        let mut m = IntMatrix::zeros(n, n);
        for h in 0..n {
            for (g, c) in self.terms() {
                m.add_to(self.group.mul(g, h), h, &BigInt::from(c));
            }
        }
        m
    }
}

/// Sparse matrix over `ZQ` (row convention, see module docs).
#[derive(Clone, PartialEq)]
pub struct ZqMatrix {
    group: Arc<FiniteGroup>,
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), GroupRingElement>,
}

impl std::fmt::Debug for ZqMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ZqMatrix {}x{} {:?}", self.rows, self.cols, self.entries)
    }
}

impl ZqMatrix {
    pub fn zeros(group: &Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        ZqMatrix { group: group.clone(), rows, cols, entries: BTreeMap::new() }
    }

    pub fn from_rows(group: &Arc<FiniteGroup>, rows: Vec<Vec<GroupRingElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(group, r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, e) in row.into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> GroupRingElement {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| GroupRingElement::zero(&self.group))
    }

    pub fn set(&mut self, i: usize, j: usize, e: GroupRingElement) {
        assert!(i < self.rows && j < self.cols);
        if e.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), e);
        }
    }

    pub fn add_term(&mut self, i: usize, j: usize, g: usize, c: i64) {
        let mut e = self.get(i, j);
        e.add_term(g, c);
        self.set(i, j, e);
    }

    /// Non-zero entries in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &GroupRingElement)> {
        self.entries.iter().map(|(&(i, j), e)| (i, j, e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, other: &ZqMatrix) -> ZqMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut by_row: BTreeMap<usize, Vec<(usize, &GroupRingElement)>> = BTreeMap::new();
        for (k, j, e) in other.nonzero() {
            by_row.entry(k).or_default().push((j, e));
        }
        let mut out = ZqMatrix::zeros(&self.group, self.rows, other.cols);
        for (i, k, a) in self.nonzero() {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Z-basis expansion of a homomorphism of free left `ZQ`-modules.
///
/// The source basis element `h * e_i` has Z-coordinate `i * |Q| + h`, and
/// likewise in the target. The result is the `(|Q| * cols) x (|Q| * rows)`
/// integer matrix of the Z-linear map, acting on column vectors; block
/// `(j, i)` is right multiplication by `A[i][j]`. Composition is preserved:
/// `expand(A * B) = expand(B) * expand(A)`.
pub fn zq_matrix_to_int(a: &ZqMatrix) -> IntMatrix {
    let n = a.group.order();
    let mut out = IntMatrix::zeros(n * a.cols, n * a.rows);
    for (i, j, e) in a.nonzero() {
        for h in 0..n {
            for (g, c) in e.terms() {
                out.add_to(j * n + a.group.mul(h, g), i * n + h, &BigInt::from(c));
            }
        }
    }
    out
}

/// Element of the integral group ring of a free group, on reduced words.
#[derive(Clone, PartialEq, Eq)]
pub struct FreeRingElement {
    alphabet: Arc<Alphabet>,
    coeffs: BTreeMap<Vec<Letter>, i64>,
}

impl std::fmt::Debug for FreeRingElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(w, c)| format!("{c}*{}", Word::from_letters(&self.alphabet, w.clone())))
            .collect();
        write!(f, "{}", if terms.is_empty() { "0".to_string() } else { terms.join(" + ") })
    }
}

impl FreeRingElement {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        FreeRingElement { alphabet: alphabet.clone(), coeffs: BTreeMap::new() }
    }

    pub fn word(w: &Word) -> Self {
        let mut e = Self::zero(w.alphabet());
        e.add_term(w, 1);
        e
    }

    pub fn add_term(&mut self, w: &Word, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(w.letters().to_vec()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(w.letters());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Word, i64)> + '_ {
        self.coeffs.iter().map(|(l, &c)| (Word::from_letters(&self.alphabet, l.iter().copied()), c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(&w, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.alphabet);
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                out.add_term(&u.multiply(&v).expect("same alphabet"), a * b);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Image in `ZQ` under the evaluation map.
    pub fn project(&self, wm: &WordMap) -> GroupRingElement {
        GroupRingElement::from_terms(wm.group(), self.terms().map(|(w, c)| (wm.eval(&w), c)))
    }
}

/// Fox derivative `dw/dx` in the integral group ring of the free group:
/// `d(uv) = du + u dv`, `dx/dx = 1`, `d(x^-1)/dx = -x^-1`.
pub fn fox_derivative(w: &Word, gen: usize) -> FreeRingElement {
    let alphabet = w.alphabet();
    let mut out = FreeRingElement::zero(alphabet);
    let letters = w.letters();
    for (k, l) in letters.iter().enumerate() {
        if l.gen != gen {
            continue;
        }
        if l.inv {
            out.add_term(&Word::from_letters(alphabet, letters[..=k].iter().copied()), -1);
        } else {
            out.add_term(&Word::from_letters(alphabet, letters[..k].iter().copied()), 1);
        }
    }
    out
}

/// `sum_x (dw/dx) (x - 1)`, which equals `w - 1` for every word.
pub fn fox_reconstruct(w: &Word) -> FreeRingElement {
    let alphabet = w.alphabet();
    let mut out = FreeRingElement::zero(alphabet);
    for x in 0..alphabet.len() {
        let mut xm1 = FreeRingElement::word(&Word::generator(alphabet, x));
        xm1.add_term(&Word::identity(alphabet), -1);
        out = out.add(&fox_derivative(w, x).mul(&xm1));
    }
    out
}

/// Row of Fox derivatives of `w`, projected to `ZQ` (one entry per generator).
pub fn fox_row(w: &Word, wm: &WordMap) -> Vec<GroupRingElement> {
    (0..w.alphabet().len()).map(|x| fox_derivative(w, x).project(wm)).collect()
}

/// The boundaries `d2: ZQ[R] -> ZQ[X]` (entry `(r, x)` is the projected
/// Fox derivative `dr/dx`) and `d1: ZQ[X] -> ZQ` (entry `(x, 0)` is `x - 1`).
pub fn fox_boundaries(p: &Presentation, wm: &WordMap) -> (ZqMatrix, ZqMatrix) {
    let q = wm.group();
    let nx = p.num_generators();
    let rows: Vec<Vec<GroupRingElement>> = p.relators().iter().map(|r| fox_row(r, wm)).collect();
    let d2 = if rows.is_empty() { ZqMatrix::zeros(q, 0, nx) } else { ZqMatrix::from_rows(q, rows) };
    let mut d1 = ZqMatrix::zeros(q, nx, 1);
    for (x, &img) in wm.images().iter().enumerate() {
        d1.set(x, 0, GroupRingElement::from_terms(q, [(img, 1), (0, -1)]));
    }
    (d2, d1)
}

/// Finitely generated abelian group `sum Z/m_i` (`m_i = 0` for `Z`) with a
/// left `Q`-action by integer matrices on coordinate columns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QModule {
    group: Arc<FiniteGroup>,
    factors: Vec<u64>,
    action: Vec<Vec<Vec<i64>>>,
}

fn reduce(v: i64, m: u64) -> i64 {
    if m == 0 {
        v
    } else {
        v.rem_euclid(m as i64)
    }
}

impl QModule {
    /// Validates the action: identity acts trivially, every matrix is a
    /// well-defined endomorphism, and `action(g) action(h) = action(gh)`.
    pub fn new(group: Arc<FiniteGroup>, factors: Vec<u64>, action: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        let r = factors.len();
        if factors.contains(&1) {
            return Err(Error::ModuleMismatch("factor 1 is not allowed".into()));
        }
        if action.len() != group.order() || action.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r))
        {
            return Err(Error::ModuleMismatch("action matrices have wrong shape".into()));
        }
        let mut module = QModule { group, factors, action };
        for m in &mut module.action {
            for (i, row) in m.iter_mut().enumerate() {
                for v in row.iter_mut() {
                    *v = reduce(*v, module.factors[i]);
                }
            }
        }
        for m in &module.action {
            for i in 0..r {
                for j in 0..r {
                    let (mi, mj) = (module.factors[i], module.factors[j]);
                    let ok = match (mi, mj) {
                        (_, 0) => true,
                        (0, _) => m[i][j] == 0,
                        (mi, mj) => (m[i][j] as i128 * mj as i128) % mi as i128 == 0,
                    };
                    if !ok {
                        return Err(Error::ModuleMismatch(format!("entry ({i},{j}) is not well defined")));
                    }
                }
            }
        }
        let id = module.identity_matrix();
        if module.action[0] != id {
            return Err(Error::ModuleMismatch("identity does not act trivially".into()));
        }
        let q = module.group.clone();
        for g in q.elements() {
            for h in q.elements() {
                if module.compose(&module.action[g], &module.action[h]) != module.action[q.mul(g, h)] {
                    return Err(Error::ModuleMismatch(format!("action is not a homomorphism at ({g},{h})")));
                }
            }
        }
        Ok(module)
    }

    pub fn trivial(group: &Arc<FiniteGroup>, factors: Vec<u64>) -> Result<Self> {
        let r = factors.len();
        let id: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
        Self::new(group.clone(), factors, vec![id; group.order()])
    }

    fn identity_matrix(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r).map(|i| (0..r).map(|j| reduce(i64::from(i == j), self.factors[i])).collect()).collect()
    }

    fn compose(&self, a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| reduce((0..r).map(|k| a[i][k] * b[k][j]).sum(), self.factors[i])).collect())
            .collect()
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Number of cyclic summands.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn action(&self, g: usize) -> &[Vec<i64>] {
        &self.action[g]
    }

    pub fn is_trivial_action(&self) -> bool {
        let id = self.identity_matrix();
        self.action.iter().all(|m| *m == id)
    }

    /// Least common multiple of the finite factors, `0` with a free summand.
    pub fn exponent(&self) -> u64 {
        if self.factors.contains(&0) {
            return 0;
        }
        self.factors.iter().fold(1u64, |acc, &m| num_integer::lcm(acc, m))
    }

    pub fn reduce_vec(&self, v: &mut [i64]) {
        for (x, &m) in v.iter_mut().zip(&self.factors) {
            *x = reduce(*x, m);
        }
    }

    pub fn act(&self, g: usize, v: &[i64]) -> Vec<i64> {
        let r = self.rank();
        let m = &self.action[g];
        let mut out: Vec<i64> = (0..r).map(|i| (0..r).map(|k| m[i][k] * v[k]).sum()).collect();
        self.reduce_vec(&mut out);
        out
    }

    /// The action of `a in ZQ` as an integer matrix.
    pub fn ring_action(&self, a: &GroupRingElement) -> Vec<Vec<i64>> {
        let r = self.rank();
        let mut out = vec![vec![0i64; r]; r];
        for (g, c) in a.terms() {
            for (i, row) in out.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += c * self.action[g][i][j];
                }
            }
        }
        out
    }

    /// The same abelian group as a module over a subgroup.
    pub fn restrict(&self, sub: &Arc<FiniteGroup>, embedding: &[usize]) -> QModule {
        QModule {
            group: sub.clone(),
            factors: self.factors.clone(),
            action: embedding.iter().map(|&g| self.action[g].clone()).collect(),
        }
    }

    /// Same structure over an isomorphic copy of the group
    /// (`iso[g]` is the image in `self`'s group of element `g`).
    pub fn transport(&self, group: &Arc<FiniteGroup>, iso: &[usize]) -> QModule {
        self.restrict(group, iso)
    }
}

/// An initial segment of a free resolution of `Z` over `ZQ`.
#[derive(Clone, Debug)]
pub struct FreeResolutionSegment {
    group: Arc<FiniteGroup>,
    ranks: Vec<usize>,
    /// `boundaries[i - 1]` is `d_i : B_i -> B_{i-1}`.
    boundaries: Vec<ZqMatrix>,
}

#[derive(Serialize)]
struct ResolutionJson {
    group_order: usize,
    ranks: Vec<usize>,
    boundaries: Vec<Vec<(usize, usize, Vec<(usize, i64)>)>>,
}

impl FreeResolutionSegment {
    pub fn new(group: Arc<FiniteGroup>, ranks: Vec<usize>, boundaries: Vec<ZqMatrix>) -> Result<Self> {
        if ranks.first() != Some(&1) || boundaries.len() + 1 != ranks.len() {
            return Err(Error::InvalidGroup("resolution shape mismatch".into()));
        }
        for (i, d) in boundaries.iter().enumerate() {
            if d.rows() != ranks[i + 1] || d.cols() != ranks[i] {
                return Err(Error::InvalidGroup(format!("boundary d{} has wrong shape", i + 1)));
            }
        }
        Ok(FreeResolutionSegment { group, ranks, boundaries })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Highest degree present.
    pub fn length(&self) -> usize {
        self.boundaries.len()
    }

    /// `d_i : B_i -> B_{i-1}` for `1 <= i <= length`.
    pub fn boundary(&self, i: usize) -> &ZqMatrix {
        &self.boundaries[i - 1]
    }

    /// Augmentation `B_0 = ZQ -> Z` composed with `d_1`, as integers per
    /// basis element of `B_1`.
    pub fn augmented_d1(&self) -> Vec<i64> {
        (0..self.ranks.get(1).copied().unwrap_or(0)).map(|i| self.boundary(1).get(i, 0).augmentation()).collect()
    }

    /// Checks `d_{i-1} d_i = 0` and `eps d_1 = 0`.
    pub fn is_complex(&self) -> bool {
        self.augmented_d1().iter().all(|&a| a == 0)
            && (2..=self.length()).all(|i| self.boundary(i).mul(self.boundary(i - 1)).is_zero())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let boundaries = self
            .boundaries
            .iter()
            .map(|d| d.nonzero().map(|(i, j, e)| (i, j, e.terms().collect())).collect())
            .collect();
        serde_json::to_value(ResolutionJson { group_order: self.group.order(), ranks: self.ranks.clone(), boundaries })
            .expect("serializable")
    }
}

/// `(bound on |Q|)` for the normalized bar resolution of a given length.
pub fn bar_size_bound(length: usize) -> usize {
    match length {
        0..=4 => 8,
        5 => 6,
        _ => 0,
    }
}

/// Index of a tuple of non-identity elements in mixed radix `|Q| - 1`.
pub fn bar_tuple_index(tuple: &[usize], order: usize) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * (order - 1) + (g - 1))
}

pub fn bar_tuple(mut index: usize, len: usize, order: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for k in (0..len).rev() {
        t[k] = index % (order - 1) + 1;
        index /= order - 1;
    }
    t
}

/// Normalized bar resolution `B_0, ..., B_n`: `B_i` is free on `i`-tuples
/// of non-identity elements and
/// `d[g1|...|gi] = g1[g2|...|gi] + sum_k (-1)^k [..|g_k g_k+1|..] + (-1)^i [g1|...|g_i-1]`,
/// dropping tuples that contain the identity.
pub fn bar_resolution(q: &Arc<FiniteGroup>, n: usize) -> Result<FreeResolutionSegment> {
    let order = q.order();
    if n > 5 || order > bar_size_bound(n) {
        return Err(Error::SizeBound(format!("bar resolution of length {n} for a group of order {order}")));
    }
    let ranks: Vec<usize> = (0..=n).map(|i| (order - 1).pow(i as u32)).collect();
    let mut boundaries = Vec::with_capacity(n);
    for i in 1..=n {
        let mut d = ZqMatrix::zeros(q, ranks[i], ranks[i - 1]);
        for idx in 0..ranks[i] {
            let t = bar_tuple(idx, i, order);
            let mut add = |face: &[usize], g: usize, c: i64| {
                if face.contains(&0) {
                    return;
                }
                d.add_term(idx, bar_tuple_index(face, order), g, c);
            };
            add(&t[1..], t[0], 1);
            for k in 0..i - 1 {
                let mut face = t[..k].to_vec();
                face.push(q.mul(t[k], t[k + 1]));
                face.extend_from_slice(&t[k + 2..]);
                add(&face, 0, if (k + 1) % 2 == 0 { 1 } else { -1 });
            }
            add(&t[..i - 1], 0, if i % 2 == 0 { 1 } else { -1 });
        }
        boundaries.push(d);
    }
    FreeResolutionSegment::new(q.clone(), ranks, boundaries)
}

/// Periodic resolution of `Z` over a cyclic group with chosen generator:
/// every `B_i` has rank one, odd boundaries are `x - 1` and even ones the
/// norm element.
pub fn periodic_resolution_for(q: &Arc<FiniteGroup>, generator: usize, length: usize) -> Result<FreeResolutionSegment> {
    let n = q.order();
    if n < 2 || q.element_order(generator) != n {
        return Err(Error::InvalidGroup("periodic resolution needs a generator of a non-trivial cyclic group".into()));
    }
    let mut boundaries = Vec::with_capacity(length);
    for i in 1..=length {
        let e = if i % 2 == 1 {
            GroupRingElement::from_terms(q, [(generator, 1), (0, -1)])
        } else {
            GroupRingElement::norm(q)
        };
        boundaries.push(ZqMatrix::from_rows(q, vec![vec![e]]));
    }
    FreeResolutionSegment::new(q.clone(), vec![1; length + 1], boundaries)
}

/// Periodic resolution over `C_n` (element `i` is `x^i`).
pub fn periodic_resolution(n: usize, length: usize) -> Result<FreeResolutionSegment> {
    if n < 2 {
        return Err(Error::InvalidGroup("periodic resolution needs n >= 2".into()));
    }
    periodic_resolution_for(&Arc::new(FiniteGroup::cyclic(n)), 1, length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{todd_coxeter, DEFAULT_MAX_COSETS};

    const S3: &str = "<x,y | r = x^3, s = y^2, t = x*y*x*y>";

    fn quotient(text: &str) -> (Presentation, WordMap) {
        let p = Presentation::parse(text).unwrap();
        let (_, wm) = todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap();
        (p, wm)
    }

    #[test]
    fn fox_identity_in_free_ring() {
        let corpus = [S3, "<x | x^5>", "<a,b | a^4, a^2*b^-2, a*b*a*b^-1>", "<x,y | x^-2*y^3*x*y^-1>"];
        for text in corpus {
            let p = Presentation::parse(text).unwrap();
            for r in p.relators() {
                let mut expected = FreeRingElement::word(r);
                expected.add_term(&Word::identity(r.alphabet()), -1);
                assert_eq!(fox_reconstruct(r), expected, "{r}");
            }
        }
    }

    #[test]
    fn fox_of_xyxy() {
        let (p, wm) = quotient(S3);
        let q = wm.group();
        let a = p.alphabet();
        let t = &p.relators()[2];
        let x = wm.images()[0];
        let y = wm.images()[1];
        let xy = q.mul(x, y);
        let row = fox_row(t, &wm);
        assert_eq!(row[0], GroupRingElement::from_terms(q, [(0, 1), (xy, 1)]));
        assert_eq!(row[1], GroupRingElement::from_terms(q, [(x, 1), (q.mul(xy, x), 1)]));
        // Same statement in the free ring.
        let dx = fox_derivative(t, 0);
        let mut expect = FreeRingElement::word(&Word::identity(a));
        expect.add_term(&Word::parse(a, "x*y").unwrap(), 1);
        assert_eq!(dx, expect);
    }

    #[test]
    fn cyclic_boundaries() {
        for n in 2..=6 {
            let (p, wm) = quotient(&format!("<x | x^{n}>"));
            let q = wm.group();
            let x = wm.images()[0];
            let (d2, d1) = fox_boundaries(&p, &wm);
            let norm = GroupRingElement::from_terms(q, (0..n).map(|i| (q.pow(x, i as i64), 1)));
            assert_eq!(d2.get(0, 0), norm);
            assert_eq!(d1.get(0, 0), GroupRingElement::from_terms(q, [(x, 1), (0, -1)]));
            assert!(d2.mul(&d1).is_zero());
        }
    }

    #[test]
    fn s3_boundaries_compose_to_zero() {
        let (p, wm) = quotient(S3);
        let (d2, d1) = fox_boundaries(&p, &wm);
        assert_eq!((d2.rows(), d2.cols()), (3, 2));
        assert!(d2.mul(&d1).is_zero());
        let e2 = zq_matrix_to_int(&d2);
        assert_eq!((e2.rows(), e2.cols()), (12, 18));
        let e1 = zq_matrix_to_int(&d1);
        assert!(e1.mul(&e2).is_zero());
    }

    #[test]
    fn expansion_examples() {
        let c2 = Arc::new(FiniteGroup::cyclic(2));
        let one = ZqMatrix::from_rows(&c2, vec![vec![GroupRingElement::one(&c2)]]);
        assert_eq!(zq_matrix_to_int(&one), IntMatrix::identity(2));
        let x = ZqMatrix::from_rows(&c2, vec![vec![GroupRingElement::basis(&c2, 1)]]);
        assert_eq!(zq_matrix_to_int(&x), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]));
        let s6 = Arc::new(FiniteGroup::cyclic(6));
        let e = ZqMatrix::from_rows(&s6, vec![vec![GroupRingElement::one(&s6)]]);
        assert_eq!(zq_matrix_to_int(&e), IntMatrix::identity(6));
    }

    #[test]
    fn expansion_respects_composition() {
        use rand::{Rng, SeedableRng};
        let (_, wm) = quotient(S3);
        let q = wm.group().clone();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut random = |r: usize, c: usize| {
            let mut m = ZqMatrix::zeros(&q, r, c);
            for i in 0..r {
                for j in 0..c {
                    for _ in 0..2 {
                        m.add_term(i, j, rng.gen_range(0..6), rng.gen_range(-3..=3));
                    }
                }
            }
            m
        };
        for _ in 0..10 {
            let a = random(2, 3);
            let b = random(3, 2);
            assert_eq!(zq_matrix_to_int(&a.mul(&b)), zq_matrix_to_int(&b).mul(&zq_matrix_to_int(&a)));
        }
    }

    #[test]
    fn bar_resolutions() {
        let c2 = Arc::new(FiniteGroup::cyclic(2));
        let b = bar_resolution(&c2, 3).unwrap();
        assert_eq!(b.ranks(), &[1, 1, 1, 1]);
        assert!(b.is_complex());
        // d[x] = x - 1, d[x|x] = x + 1 (the [x^2] face is degenerate), d[x|x|x] = x - 1.
        assert_eq!(b.boundary(1).get(0, 0), GroupRingElement::from_terms(&c2, [(1, 1), (0, -1)]));
        assert_eq!(b.boundary(2).get(0, 0), GroupRingElement::from_terms(&c2, [(1, 1), (0, 1)]));
        assert_eq!(b.boundary(3).get(0, 0), GroupRingElement::from_terms(&c2, [(1, 1), (0, -1)]));

        let (_, wm) = quotient(S3);
        let s3 = wm.group().clone();
        let b = bar_resolution(&s3, 3).unwrap();
        assert_eq!(b.ranks(), &[1, 5, 25, 125]);
        assert!(b.is_complex());
        let b = bar_resolution(&s3, 4).unwrap();
        assert!(b.is_complex());
        let big = Arc::new(FiniteGroup::cyclic(9));
        assert!(matches!(bar_resolution(&big, 3), Err(Error::SizeBound(_))));
    }

    #[test]
    fn periodic_resolutions() {
        let r = periodic_resolution(2, 4).unwrap();
        let q = r.group().clone();
        let xm1 = GroupRingElement::from_terms(&q, [(1, 1), (0, -1)]);
        let norm = GroupRingElement::from_terms(&q, [(0, 1), (1, 1)]);
        let expect = [&xm1, &norm, &xm1, &norm];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(&&r.boundary(i + 1).get(0, 0), e);
        }
        assert!(r.is_complex());
        for n in 2..=7 {
            assert!(periodic_resolution(n, 5).unwrap().is_complex());
        }
        let r3 = periodic_resolution(3, 2).unwrap();
        assert_eq!(r3.boundary(2).get(0, 0).augmentation(), 3);
        assert!(periodic_resolution(1, 2).is_err());
    }

    #[test]
    fn module_validation() {
        let c2 = Arc::new(FiniteGroup::cyclic(2));
        // Sign action on Z.
        let sign = QModule::new(c2.clone(), vec![0], vec![vec![vec![1]], vec![vec![-1]]]).unwrap();
        assert_eq!(sign.act(1, &[5]), vec![-5]);
        // Not a homomorphism: x acts by 2 on Z/5 but x^2 = 1 needs 4 = 1.
        assert!(QModule::new(c2.clone(), vec![5], vec![vec![vec![1]], vec![vec![2]]]).is_err());
        // Z/2 -> Z/4 multiplication by 1 is not well defined.
        let bad = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![1, 1], vec![0, 1]]];
        assert!(QModule::new(c2.clone(), vec![4, 2], bad).is_err());
        let ok = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![1, 2], vec![0, 1]]];
        assert!(QModule::new(c2, vec![4, 2], ok).is_ok());
    }

    #[test]
    fn resolution_json() {
        let r = periodic_resolution(3, 2).unwrap();
        let j = r.to_json();
        assert_eq!(j["ranks"], serde_json::json!([1, 1, 1]));
    }
}
