//! Group cohomology `H^n(Q, M)` from a free resolution and a finite-rank
//! `Q`-module.
//!
//! Cochains in degree `n` are elements of `Hom_Q(B_n, M) = M^{rank B_n}`,
//! stored flat: coordinate `k` of the value on basis element `j` sits at
//! `j * rank(M) + k`. Over the normalized bar resolution basis element `j`
//! is the tuple `bar_tuple(j, n, |Q|)`, so these are the normalized
//! cochains.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::grouprings::{bar_resolution, bar_tuple, bar_tuple_index, periodic_resolution_for, FreeResolutionSegment, QModule};
use crate::linalg::{image_basis, kernel_basis, solve_with, AbelianGroupStructure, IntMatrix, Snf, Track};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<i64>,
}

impl Cochain {
    pub fn zero(cx: &CochainComplex, degree: usize) -> Self {
        Cochain { degree, values: vec![0; cx.dim(degree)] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Cochain, m: &QModule) -> Cochain {
        assert_eq!(self.degree, other.degree);
        let mut v: Vec<i64> = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        reduce_values(&mut v, m);
        Cochain { degree: self.degree, values: v }
    }

    pub fn scale(&self, k: i64, m: &QModule) -> Cochain {
        let mut v: Vec<i64> = self.values.iter().map(|a| a * k).collect();
        reduce_values(&mut v, m);
        Cochain { degree: self.degree, values: v }
    }

    /// Normalized bar cochain from its values on tuples of non-identity
    /// elements.
    pub fn from_bar_fn<F>(q: &FiniteGroup, m: &QModule, degree: usize, mut f: F) -> Cochain
    where
        F: FnMut(&[usize]) -> Vec<i64>,
    {
        let n = q.order();
        let count = (n - 1).pow(degree as u32);
        let mut values = Vec::with_capacity(count * m.rank());
        for j in 0..count {
            let t = bar_tuple(j, degree, n);
            let mut v = f(&t);
            assert_eq!(v.len(), m.rank());
            m.reduce_vec(&mut v);
            values.extend(v);
        }
        Cochain { degree, values }
    }

    /// Value of a normalized bar cochain on a tuple (zero if any entry is
    /// the identity).
    pub fn bar_value(&self, q: &FiniteGroup, m: &QModule, tuple: &[usize]) -> Vec<i64> {
        if tuple.contains(&0) {
            return vec![0; m.rank()];
        }
        let j = bar_tuple_index(tuple, q.order());
        self.values[j * m.rank()..(j + 1) * m.rank()].to_vec()
    }
}

fn reduce_values(v: &mut [i64], m: &QModule) {
    let r = m.rank();
    if r == 0 {
        return;
    }
    for chunk in v.chunks_mut(r) {
        m.reduce_vec(chunk);
    }
}

/// `Hom_Q(B_*, M)` for a resolution segment `B_*`.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    resolution: FreeResolutionSegment,
    module: QModule,
}

impl CochainComplex {
    pub fn new(resolution: FreeResolutionSegment, module: QModule) -> Result<Self> {
        if **resolution.group() != **module.group() {
            return Err(Error::ModuleMismatch("module is over a different group".into()));
        }
        Ok(CochainComplex { resolution, module })
    }

    /// Normalized bar cochains up to (and including) degree `max_degree`.
    pub fn bar(module: &QModule, max_degree: usize) -> Result<Self> {
        Self::new(bar_resolution(module.group(), max_degree)?, module.clone())
    }

    pub fn module(&self) -> &QModule {
        &self.module
    }

    pub fn resolution(&self) -> &FreeResolutionSegment {
        &self.resolution
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.resolution.group()
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.resolution.ranks()[degree] * self.module.rank()
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.resolution.length() {
            return Err(Error::SizeBound(format!("degree {degree} beyond resolution length")));
        }
        Ok(())
    }

    /// `(delta c)(e_j) = sum_k d[j][k] . c(e_k)`; needs `d_{n+1}`.
    pub fn coboundary(&self, c: &Cochain) -> Result<Cochain> {
        self.check_degree(c.degree + 1)?;
        let d = self.resolution.boundary(c.degree + 1);
        let r = self.module.rank();
        let mut out = vec![0i64; self.dim(c.degree + 1)];
        for (j, k, a) in d.nonzero() {
            let src = &c.values[k * r..(k + 1) * r];
            for (g, coeff) in a.terms() {
                let v = self.module.act(g, src);
                for (o, x) in out[j * r..(j + 1) * r].iter_mut().zip(v) {
                    *o += coeff * x;
                }
            }
        }
        reduce_values(&mut out, &self.module);
        Ok(Cochain { degree: c.degree + 1, values: out })
    }

    pub fn is_cocycle(&self, c: &Cochain) -> Result<bool> {
        Ok(self.coboundary(c)?.is_zero())
    }

    /// Integer matrix of `delta: C^{n-1} -> C^n` (uses `d_n`).
    pub fn coboundary_matrix(&self, n: usize) -> Result<IntMatrix> {
        assert!(n >= 1);
        self.check_degree(n)?;
        let d = self.resolution.boundary(n);
        let r = self.module.rank();
        let mut m = IntMatrix::zeros(self.dim(n), self.dim(n - 1));
        for (j, k, a) in d.nonzero() {
            let block = self.module.ring_action(a);
            for (bi, row) in block.iter().enumerate() {
                for (bk, &v) in row.iter().enumerate() {
                    if v != 0 {
                        m.add_to(j * r + bi, k * r + bk, &BigInt::from(v));
                    }
                }
            }
        }
        Ok(m)
    }

    /// Equivalent smaller form of the congruences `A x = rhs` in `C^n`, as
    /// an integer system `[A' | D'] (x, y) = rhs'` with `D'` the moduli.
    fn compressed_system(&self, a: &IntMatrix, rhs: Option<&[BigInt]>) -> (IntMatrix, Vec<BigInt>) {
        let r = self.module.rank();
        let width = a.cols() + 1;
        let mut moduli: Vec<u64> = self.module.factors().to_vec();
        moduli.sort_unstable();
        moduli.dedup();
        let mut rows: Vec<(u64, Vec<BigInt>)> = Vec::new();
        for m in moduli {
            let group = (0..a.rows()).filter(|i| self.module.factors()[i % r] == m).map(|i| {
                let mut v = a.row(i).to_vec();
                v.push(rhs.map_or_else(BigInt::zero, |b| b[i].clone()));
                v
            });
            for v in echelon_rows(group, width, &BigInt::from(m)) {
                rows.push((m, v));
            }
        }
        let finite: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].0 != 0).collect();
        let mut sys = IntMatrix::zeros(rows.len(), a.cols() + finite.len());
        let mut b = Vec::with_capacity(rows.len());
        for (i, (_, v)) in rows.iter().enumerate() {
            for (j, x) in v[..a.cols()].iter().enumerate() {
                if !x.is_zero() {
                    sys.set(i, j, x.clone());
                }
            }
            b.push(v[a.cols()].clone());
        }
        for (k, &i) in finite.iter().enumerate() {
            sys.set(i, a.cols() + k, BigInt::from(rows[i].0));
        }
        (sys, b)
    }

    fn reduce_big(&self, v: &mut [BigInt]) {
        let r = self.module.rank();
        for (i, x) in v.iter_mut().enumerate() {
            let m = self.module.factors()[i % r];
            if m != 0 {
                *x = x.mod_floor(&BigInt::from(m));
            }
        }
    }

    /// Scaled unit columns `m_i e_i` for the finite summands in degree `n`.
    fn torsion_columns(&self, n: usize) -> Vec<Vec<BigInt>> {
        let r = self.module.rank();
        let dim = self.dim(n);
        let mut cols = Vec::new();
        for idx in 0..dim {
            let m = self.module.factors()[idx % r];
            if m != 0 {
                let mut v = vec![BigInt::zero(); dim];
                v[idx] = BigInt::from(m);
                cols.push(v);
            }
        }
        cols
    }

    /// `b` with `delta b = c` when the class of the cocycle `c` vanishes.
    pub fn is_coboundary(&self, c: &Cochain) -> Result<Option<Cochain>> {
        if !self.is_cocycle(c)? {
            return Err(Error::NotACocycle);
        }
        if c.degree == 0 {
            return Ok(c.is_zero().then(|| c.clone()));
        }
        let a = self.coboundary_matrix(c.degree)?;
        let rhs: Vec<BigInt> = c.values.iter().map(|&v| BigInt::from(v)).collect();
        let (system, rhs) = self.compressed_system(&a, Some(&rhs));
        let s = Snf::compute(&system, Track { u: true, v: true, ..Track::default() });
        Ok(solve_with(&s, &rhs).map(|x| {
            let mut values: Vec<i64> =
                x[..a.cols()].iter().map(|v| v.to_i64().expect("witness entry exceeds i64")).collect();
            reduce_values(&mut values, &self.module);
            Cochain { degree: c.degree - 1, values }
        }))
    }

    /// Least `k >= 1` with `k c` a coboundary, searching up to `bound`.
    pub fn order_of_cocycle(&self, c: &Cochain, bound: u64) -> Result<Option<u64>> {
        for k in 1..=bound {
            if self.is_coboundary(&c.scale(k as i64, &self.module))?.is_some() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// `H^n` with enough bookkeeping to convert between cocycles and
/// invariant-factor coordinates.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub structure: AbelianGroupStructure,
    /// One representative cocycle per invariant factor (torsion first, then
    /// free), as returned in `structure.invariant_factors()` order.
    pub representatives: Vec<Cochain>,
    factors: Vec<BigInt>,
    basis_snf: Snf,
    relation_u: IntMatrix,
    keep: Vec<usize>,
    module: QModule,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyJson {
    pub schema_version: u32,
    pub degree: usize,
    pub invariant_factors: Vec<u64>,
    pub free_rank: usize,
    /// `null` when the group is infinite.
    pub order: Option<u64>,
}

impl CohomologyGroup {
    /// `H^n = Z^n / B^n` over the complex; needs `d_{n+1}`.
    pub fn compute(cx: &CochainComplex, n: usize) -> Result<Self> {
        cx.check_degree(n + 1)?;
        let a = cx.dim(n);
        // Cocycle lattice: x with delta x in the torsion lattice of C^{n+1}.
        let d_out = cx.coboundary_matrix(n + 1)?;
        let (system, _) = cx.compressed_system(&d_out, None);
        let kernel = kernel_basis(&system);
        // The torsion of C^n lies in the lattice, so generators can be
        // reduced against it.
        let mut gens: Vec<Vec<BigInt>> = kernel
            .iter()
            .map(|v| {
                let mut x = v[..a].to_vec();
                cx.reduce_big(&mut x);
                x
            })
            .filter(|x| x.iter().any(|e| !e.is_zero()))
            .collect();
        gens.extend(cx.torsion_columns(n));
        let gens = IntMatrix::from_columns(a, &gens);
        let basis = image_basis(&gens);
        let k = basis.len();
        let basis_m = IntMatrix::from_columns(a, &basis);
        let basis_snf = Snf::compute(&basis_m, Track { u: true, v: true, ..Track::default() });
        // Relations: coboundaries and torsion of C^n, in cocycle coordinates.
        let mut relations: Vec<Vec<BigInt>> = Vec::new();
        if n >= 1 {
            let d_in = cx.coboundary_matrix(n)?;
            for j in 0..d_in.cols() {
                relations.push(d_in.column(j));
            }
        }
        relations.extend(cx.torsion_columns(n));
        let mut rel_coords = Vec::with_capacity(relations.len());
        for v in &relations {
            let c = solve_with(&basis_snf, v).expect("relation lies in the cocycle lattice");
            rel_coords.push(c);
        }
        let rel = IntMatrix::from_columns(k, &rel_coords);
        let rs = Snf::compute(&rel, Track { u: true, u_inv: true, ..Track::default() });
        let mut factors = Vec::new();
        let mut keep = Vec::new();
        for i in 0..k {
            let d = if i < rs.rank { rs.diag(i).clone() } else { BigInt::zero() };
            if !d.is_one() {
                factors.push(d);
                keep.push(i);
            }
        }
        // Torsion first, then free, matching invariant_factors().
        let mut order: Vec<usize> = (0..keep.len()).collect();
        order.sort_by_key(|&i| (factors[i].is_zero(), i));
        let keep: Vec<usize> = order.iter().map(|&i| keep[i]).collect();
        let factors: Vec<BigInt> = order.iter().map(|&i| factors[i].clone()).collect();
        let u_inv = rs.u_inv.as_ref().unwrap();
        let representatives = keep
            .iter()
            .map(|&i| {
                let coeffs = u_inv.column(i);
                let mut v = basis_m.mul_vec(&coeffs);
                cx.reduce_big(&mut v);
                let values: Vec<i64> = v.iter().map(|x| x.to_i64().expect("representative exceeds i64")).collect();
                Cochain { degree: n, values }
            })
            .collect();
        let structure = AbelianGroupStructure {
            free_rank: factors.iter().filter(|d| d.is_zero()).count(),
            torsion: factors.iter().filter(|d| !d.is_zero()).cloned().collect(),
        };
        Ok(CohomologyGroup {
            degree: n,
            structure,
            representatives,
            factors,
            basis_snf,
            relation_u: rs.u.unwrap(),
            keep,
            module: cx.module().clone(),
        })
    }

    /// Coordinates of the class of a cocycle, reduced modulo the invariant
    /// factors.
    pub fn class_of_cocycle(&self, cx: &CochainComplex, c: &Cochain) -> Result<Vec<BigInt>> {
        if c.degree != self.degree || !cx.is_cocycle(c)? {
            return Err(Error::NotACocycle);
        }
        let v: Vec<BigInt> = c.values.iter().map(|&x| BigInt::from(x)).collect();
        let coords = solve_with(&self.basis_snf, &v).ok_or(Error::NotACocycle)?;
        let y = self.relation_u.mul_vec(&coords);
        Ok(self
            .keep
            .iter()
            .zip(&self.factors)
            .map(|(&i, d)| if d.is_zero() { y[i].clone() } else { y[i].mod_floor(d) })
            .collect())
    }

    pub fn cocycle_of_class(&self, coords: &[BigInt]) -> Cochain {
        assert_eq!(coords.len(), self.representatives.len());
        let mut out = vec![0i64; self.representatives.first().map_or(0, |r| r.values.len())];
        for (c, rep) in coords.iter().zip(&self.representatives) {
            let c = c.to_i64().expect("coordinate exceeds i64");
            for (o, v) in out.iter_mut().zip(&rep.values) {
                *o += c * v;
            }
        }
        reduce_values(&mut out, &self.module);
        Cochain { degree: self.degree, values: out }
    }

    /// Order of a class given by coordinates (`None` if infinite).
    pub fn class_order(&self, coords: &[BigInt]) -> Option<BigInt> {
        let mut order = BigInt::one();
        for (c, d) in coords.iter().zip(&self.factors) {
            if c.is_zero() {
                continue;
            }
            if d.is_zero() {
                return None;
            }
            order = order.lcm(&(d / d.gcd(c)));
        }
        Some(order)
    }

    pub fn to_json(&self) -> CohomologyJson {
        CohomologyJson {
            schema_version: 1,
            degree: self.degree,
            invariant_factors: self.structure.torsion_u64(),
            free_rank: self.structure.free_rank,
            order: self.structure.order().and_then(|o| o.to_u64()),
        }
    }
}

/// Which resolution to compute over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolutionChoice {
    Bar,
    Periodic,
    /// Bar within its size bounds, otherwise periodic for cyclic groups.
    Auto,
}

/// A generator of `q` if it is cyclic.
pub fn cyclic_generator(q: &FiniteGroup) -> Option<usize> {
    q.elements().find(|&g| q.element_order(g) == q.order())
}

/// The cochain complex used for `H^n(Q, M)`.
pub fn complex_for(m: &QModule, n: usize, choice: ResolutionChoice) -> Result<CochainComplex> {
    let q = m.group();
    let bar_ok = q.order() <= crate::grouprings::bar_size_bound(n + 1);
    let periodic = |q: &Arc<FiniteGroup>| -> Result<CochainComplex> {
        let g = cyclic_generator(q)
            .filter(|_| q.order() >= 2)
            .ok_or_else(|| Error::SizeBound("periodic resolution needs a non-trivial cyclic group".into()))?;
        CochainComplex::new(periodic_resolution_for(q, g, n + 1)?, m.clone())
    };
    match choice {
        ResolutionChoice::Bar => CochainComplex::bar(m, n + 1),
        ResolutionChoice::Periodic => periodic(q),
        ResolutionChoice::Auto => {
            let cyclic = q.order() >= 2 && cyclic_generator(q).is_some();
            if cyclic && (n >= 4 || !bar_ok) {
                periodic(q)
            } else {
                CochainComplex::bar(m, n + 1)
            }
        }
    }
}

/// `H^n(Q, M)` for `1 <= n <= 4`.
pub fn cohomology_group(m: &QModule, n: usize, choice: ResolutionChoice) -> Result<(CochainComplex, CohomologyGroup)> {
    if !(1..=4).contains(&n) {
        return Err(Error::SizeBound(format!("cohomology degree {n} outside 1..=4")));
    }
    let cx = complex_for(m, n, choice)?;
    let h = CohomologyGroup::compute(&cx, n)?;
    Ok((cx, h))
}

/// A cohomology class by representative.
#[derive(Clone, Debug)]
pub struct CohomologyClass {
    pub degree: usize,
    pub module: QModule,
    pub representative: Cochain,
}

impl CohomologyClass {
    /// Whether the class vanishes, with a witness of degree `n - 1`.
    pub fn coboundary_witness(&self) -> Result<Option<Cochain>> {
        let cx = CochainComplex::bar(&self.module, self.degree + 1)?;
        cx.is_coboundary(&self.representative)
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.coboundary_witness()?.is_some())
    }

    /// Order of the class, searching multiples up to the module exponent
    /// times `|Q|` (which annihilates positive-degree cohomology).
    pub fn order(&self) -> Result<Option<u64>> {
        let cx = CochainComplex::bar(&self.module, self.degree + 1)?;
        let e = self.module.exponent();
        let bound = if e == 0 { self.module.group().order() as u64 } else { e * self.module.group().order() as u64 };
        cx.order_of_cocycle(&self.representative, bound)
    }

    /// Coordinates in the invariant-factor decomposition of `H^n`.
    pub fn coordinates(&self) -> Result<(CohomologyGroup, Vec<BigInt>)> {
        let cx = CochainComplex::bar(&self.module, self.degree + 1)?;
        let h = CohomologyGroup::compute(&cx, self.degree)?;
        let c = h.class_of_cocycle(&cx, &self.representative)?;
        Ok((h, c))
    }

    /// Restriction to a subgroup given by its embedding.
    pub fn restrict(&self, sub: &Arc<FiniteGroup>, embedding: &[usize]) -> CohomologyClass {
        let q = self.module.group();
        let module = self.module.restrict(sub, embedding);
        let representative = restrict_bar_cochain(&self.representative, q, &self.module, sub, embedding);
        CohomologyClass { degree: self.degree, module, representative }
    }
}

/// Echelon generators of the row lattice spanned by `rows`, together with
/// `m Z^dim` when `m > 0` (entries are then kept reduced mod `m`).
fn echelon_rows(rows: impl Iterator<Item = Vec<BigInt>>, dim: usize, m: &BigInt) -> Vec<Vec<BigInt>> {
    let reduce = |v: &mut Vec<BigInt>| {
        if !m.is_zero() {
            for x in v.iter_mut() {
                *x = x.mod_floor(m);
            }
        }
    };
    let combine = |s: &BigInt, p: &[BigInt], t: &BigInt, v: &[BigInt]| -> Vec<BigInt> {
        p.iter().zip(v).map(|(x, y)| s * x + t * y).collect()
    };
    let mut pivots: Vec<Option<Vec<BigInt>>> = vec![None; dim];
    let mut pending: Vec<Vec<BigInt>> = Vec::new();
    let mut insert = |mut v: Vec<BigInt>, pending: &mut Vec<Vec<BigInt>>| {
        reduce(&mut v);
        let mut col = 0;
        loop {
            while col < dim && v[col].is_zero() {
                col += 1;
            }
            if col == dim {
                return;
            }
            match pivots[col].take() {
                None => {
                    if m.is_zero() {
                        pivots[col] = Some(v);
                    } else {
                        let e = v[col].extended_gcd(m);
                        let mut p: Vec<BigInt> = v.iter().map(|x| &e.x * x).collect();
                        reduce(&mut p);
                        let c = &v[col] / &e.gcd;
                        let mut rest = combine(&BigInt::one(), &v, &-c, &p);
                        reduce(&mut rest);
                        pivots[col] = Some(p);
                        pending.push(rest);
                    }
                    return;
                }
                Some(p) => {
                    let (a, b) = (p[col].clone(), v[col].clone());
                    if b.is_multiple_of(&a) {
                        v = combine(&BigInt::one(), &v, &-(&b / &a), &p);
                        reduce(&mut v);
                        pivots[col] = Some(p);
                    } else {
                        let e = a.extended_gcd(&b);
                        let mut np = combine(&e.x, &p, &e.y, &v);
                        let mut nv = combine(&(&b / &e.gcd), &p, &-(&a / &e.gcd), &v);
                        reduce(&mut np);
                        reduce(&mut nv);
                        pivots[col] = Some(np);
                        v = nv;
                    }
                }
            }
        }
    };
    for v in rows {
        insert(v, &mut pending);
        while let Some(w) = pending.pop() {
            insert(w, &mut pending);
        }
    }
    pivots.into_iter().flatten().collect()
}

/// Restricts a normalized bar cochain along a subgroup embedding.
pub fn restrict_bar_cochain(
    c: &Cochain,
    q: &FiniteGroup,
    m: &QModule,
    sub: &FiniteGroup,
    embedding: &[usize],
) -> Cochain {
    let sub_m = m.restrict(&Arc::new(sub.clone()), embedding);
    Cochain::from_bar_fn(sub, &sub_m, c.degree, |t| {
        let parent: Vec<usize> = t.iter().map(|&g| embedding[g]).collect();
        c.bar_value(q, m, &parent)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouprings::periodic_resolution;

    fn trivial(q: &FiniteGroup, factors: Vec<u64>) -> QModule {
        QModule::trivial(&Arc::new(q.clone()), factors).unwrap()
    }

    fn h(m: &QModule, n: usize, choice: ResolutionChoice) -> AbelianGroupStructure {
        cohomology_group(m, n, choice).unwrap().1.structure
    }

    fn cyclic_torsion(n: u64) -> AbelianGroupStructure {
        AbelianGroupStructure { free_rank: 0, torsion: vec![BigInt::from(n)] }
    }

    #[test]
    fn h3_cyclic_with_cyclic_coefficients() {
        for n in 2..=6u64 {
            let q = FiniteGroup::cyclic(n as usize);
            let m = trivial(&q, vec![n]);
            assert_eq!(h(&m, 3, ResolutionChoice::Periodic), cyclic_torsion(n));
        }
    }

    #[test]
    fn h4_cyclic_integral() {
        for n in 2..=6u64 {
            let q = FiniteGroup::cyclic(n as usize);
            let m = trivial(&q, vec![0]);
            assert_eq!(h(&m, 4, ResolutionChoice::Periodic), cyclic_torsion(n));
            assert_eq!(h(&m, 4, ResolutionChoice::Auto), cyclic_torsion(n));
        }
    }

    #[test]
    fn h1_integral_vanishes() {
        let s3 = FiniteGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap().0;
        let k4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        for q in [FiniteGroup::cyclic(2), FiniteGroup::cyclic(5), s3, k4] {
            let m = trivial(&q, vec![0]);
            assert!(h(&m, 1, ResolutionChoice::Bar).is_trivial());
        }
    }

    /// Brute force over all 16 (unnormalized) 2-cochains C2 x C2 -> Z/2.
    #[test]
    fn h2_c2_mod2_brute_force() {
        let q = FiniteGroup::cyclic(2);
        let idx = |a: usize, b: usize| a * 2 + b;
        let is_cocycle = |f: &[u8; 4]| {
            (0..2).all(|a| {
                (0..2).all(|b| {
                    (0..2).all(|c| {
                        (f[idx(b, c)] + f[idx(a, q.mul(b, c))] + f[idx(q.mul(a, b), c)] + f[idx(a, b)]) % 2 == 0
                    })
                })
            })
        };
        let mut cocycles = std::collections::HashSet::new();
        for bits in 0..16u8 {
            let f = [bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1];
            if is_cocycle(&f) {
                cocycles.insert(f);
            }
        }
        let mut coboundaries = std::collections::HashSet::new();
        for bits in 0..4u8 {
            let g = [bits & 1, (bits >> 1) & 1];
            let mut f = [0u8; 4];
            for a in 0..2 {
                for b in 0..2 {
                    f[idx(a, b)] = (g[b] + g[q.mul(a, b)] + g[a]) % 2;
                }
            }
            coboundaries.insert(f);
        }
        let order = cocycles.len() / coboundaries.len();
        assert_eq!(order, 2);
        let m = trivial(&q, vec![2]);
        assert_eq!(h(&m, 2, ResolutionChoice::Bar), cyclic_torsion(order as u64));
    }

    #[test]
    fn bar_and_periodic_agree_for_cyclic_groups() {
        for n in 2..=5usize {
            let q = FiniteGroup::cyclic(n);
            let mods = [vec![0], vec![n as u64], vec![2], vec![0, 3]];
            for f in mods {
                let m = trivial(&q, f.clone());
                for deg in 1..=3 {
                    if n == 5 && deg == 3 && f.len() > 1 {
                        continue;
                    }
                    assert_eq!(
                        h(&m, deg, ResolutionChoice::Bar),
                        h(&m, deg, ResolutionChoice::Periodic),
                        "n={n} factors={f:?} degree={deg}"
                    );
                }
            }
            // Sign action on Z for even n.
            if n % 2 == 0 {
                let qa = Arc::new(q.clone());
                let act = (0..n).map(|i| vec![vec![if i % 2 == 0 { 1 } else { -1 }]]).collect();
                let m = QModule::new(qa, vec![0], act).unwrap();
                for deg in 1..=3 {
                    assert_eq!(h(&m, deg, ResolutionChoice::Bar), h(&m, deg, ResolutionChoice::Periodic));
                }
            }
        }
    }

    #[test]
    fn delta_squared_vanishes() {
        let s3 = FiniteGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap().0;
        let qa = Arc::new(s3.clone());
        // Sign representation of S3 on Z/3 and Z.
        let sign: Vec<i64> = s3.elements().map(|g| if s3.element_order(g) == 2 { -1 } else { 1 }).collect();
        for factors in [vec![3u64], vec![0]] {
            let act = sign.iter().map(|&s| vec![vec![s]]).collect();
            let m = QModule::new(qa.clone(), factors, act).unwrap();
            let cx = CochainComplex::bar(&m, 3).unwrap();
            for n in 1..3 {
                let a = cx.coboundary_matrix(n).unwrap();
                let b = cx.coboundary_matrix(n + 1).unwrap();
                let prod = b.mul(&a);
                // Zero modulo the coefficient group.
                let modulus = m.factors()[0];
                for i in 0..prod.rows() {
                    for j in 0..prod.cols() {
                        let v = prod.get(i, j);
                        if modulus == 0 {
                            assert!(v.is_zero());
                        } else {
                            assert!(v.is_multiple_of(&BigInt::from(modulus)));
                        }
                    }
                }
            }
        }
        let p = periodic_resolution(4, 4).unwrap();
        let m = QModule::trivial(p.group(), vec![0, 4]).unwrap();
        let cx = CochainComplex::new(p, m).unwrap();
        for n in 1..4 {
            assert!(cx.coboundary_matrix(n + 1).unwrap().mul(&cx.coboundary_matrix(n).unwrap()).is_zero());
        }
    }

    #[test]
    fn invariant_factors_divide_exponent_times_order() {
        let s3 = FiniteGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap().0;
        let k4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        for q in [s3, k4, FiniteGroup::cyclic(4)] {
            for factors in [vec![0u64], vec![2], vec![6], vec![4, 0]] {
                let m = trivial(&q, factors);
                let bound = BigInt::from(if m.exponent() == 0 { 1 } else { m.exponent() } * q.order() as u64);
                for deg in 1..=2 {
                    let s = h(&m, deg, ResolutionChoice::Bar);
                    for t in &s.torsion {
                        assert!(bound.is_multiple_of(t), "{t} vs {bound}");
                    }
                }
            }
        }
    }

    #[test]
    fn known_groups() {
        // H^2(K4, Z/2) = (Z/2)^3, H^2(S3, Z) = Z/2, H^3(S3, Z/6) = Z/6.
        let k4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        let s = h(&trivial(&k4, vec![2]), 2, ResolutionChoice::Bar);
        assert_eq!(s.torsion, vec![BigInt::from(2); 3]);
        let s3 = FiniteGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap().0;
        let s = h(&trivial(&s3, vec![0]), 2, ResolutionChoice::Bar);
        assert_eq!(s, cyclic_torsion(2));
    }

    #[test]
    fn class_coordinates_round_trip() {
        let q = FiniteGroup::cyclic(2);
        let m = trivial(&q, vec![2]);
        let (cx, hg) = cohomology_group(&m, 3, ResolutionChoice::Bar).unwrap();
        assert_eq!(hg.structure, cyclic_torsion(2));
        let zero = Cochain::zero(&cx, 3);
        assert_eq!(hg.class_of_cocycle(&cx, &zero).unwrap(), vec![BigInt::zero()]);
        let g = hg.cocycle_of_class(&[BigInt::one()]);
        assert!(cx.is_cocycle(&g).unwrap());
        assert_eq!(hg.class_of_cocycle(&cx, &g).unwrap(), vec![BigInt::one()]);
        assert!(cx.is_coboundary(&g).unwrap().is_none());
        // Linearity: g + g is trivial.
        let gg = g.add(&g, &m);
        assert_eq!(hg.class_of_cocycle(&cx, &gg).unwrap(), vec![BigInt::zero()]);
        assert!(cx.is_coboundary(&Cochain::zero(&cx, 3)).unwrap().unwrap().is_zero());
    }

    #[test]
    fn coordinates_are_additive() {
        let k4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        let m = trivial(&k4, vec![4]);
        let (cx, hg) = cohomology_group(&m, 2, ResolutionChoice::Bar).unwrap();
        let k = hg.representatives.len();
        for i in 0..k {
            for j in 0..k {
                let sum = hg.representatives[i].add(&hg.representatives[j], &m);
                let ci = hg.class_of_cocycle(&cx, &hg.representatives[i]).unwrap();
                let cj = hg.class_of_cocycle(&cx, &hg.representatives[j]).unwrap();
                let cs = hg.class_of_cocycle(&cx, &sum).unwrap();
                let expect: Vec<BigInt> =
                    ci.iter().zip(&cj).zip(&hg.factors).map(|((a, b), d)| (a + b).mod_floor(d)).collect();
                assert_eq!(cs, expect);
            }
        }
    }

    #[test]
    fn witnesses_are_valid() {
        let q = FiniteGroup::cyclic(3);
        let m = trivial(&q, vec![3]);
        let cx = CochainComplex::bar(&m, 3).unwrap();
        let b = Cochain::from_bar_fn(&q, &m, 1, |t| vec![t[0] as i64]);
        let c = cx.coboundary(&b).unwrap();
        let w = cx.is_coboundary(&c).unwrap().expect("coboundary");
        assert_eq!(cx.coboundary(&w).unwrap(), c);
        let not = Cochain::from_bar_fn(&q, &m, 1, |_| vec![1]);
        assert_eq!(cx.is_coboundary(&not), Err(Error::NotACocycle));
    }
}
