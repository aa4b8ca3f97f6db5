//! Finite groups given by multiplication tables.
//!
//! Element `0` is always the identity. Subgroups, quotients and products
//! carry explicit index maps back to their parents.

use std::collections::VecDeque;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

/// Wire form `{order, table}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {})", self.n)
    }
}

const EXHAUSTIVE_ASSOC_LIMIT: usize = 200;

impl FiniteGroup {
    /// Validates and wraps a multiplication table (`table[a][b] = a*b`).
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has wrong length")));
            }
            table.extend_from_slice(row);
        }
        Self::from_flat(n, table)
    }

    pub(crate) fn from_flat(n: usize, table: Vec<usize>) -> Result<Self> {
        if table.iter().any(|&x| x >= n) {
            return Err(Error::InvalidGroup("entry out of range".into()));
        }
        for a in 0..n {
            if table[a] != a || table[a * n] != a {
                return Err(Error::InvalidGroup("element 0 is not the identity".into()));
            }
        }
        // Latin square.
        let mut seen = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                let v = table[a * n + b];
                if seen[v] == a {
                    return Err(Error::InvalidGroup(format!("row {a} repeats {v}")));
                }
                seen[v] = a;
            }
        }
        let mut seen = vec![usize::MAX; n];
        for b in 0..n {
            for a in 0..n {
                let v = table[a * n + b];
                if seen[v] == b {
                    return Err(Error::InvalidGroup(format!("column {b} repeats {v}")));
                }
                seen[v] = b;
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| table[a * n + b] == 0).unwrap();
        }
        let g = FiniteGroup { n, table, inverse };
        g.check_associative()?;
        Ok(g)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.n;
        let bad = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c));
        if n <= EXHAUSTIVE_ASSOC_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if bad(a, b, c) {
                            return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = StdRng::seed_from_u64(0x5eed);
            for _ in 0..200_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if bad(a, b, c) {
                    return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                }
            }
        }
        Ok(())
    }

    /// Builds a table from a closed set of elements and a product; `elems[0]`
    /// must be the identity.
    pub(crate) fn from_closed_set<T, F>(elems: &[T], mut product: F) -> Result<Self>
    where
        T: Eq + std::hash::Hash + Clone,
        F: FnMut(&T, &T) -> T,
    {
        let index: std::collections::HashMap<T, usize> =
            elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for a in elems {
            for b in elems {
                let p = product(a, b);
                let idx = *index.get(&p).ok_or_else(|| Error::InvalidGroup("set not closed".into()))?;
                table.push(idx);
            }
        }
        Self::from_flat(n, table)
    }

    pub fn trivial() -> Self {
        FiniteGroup { n: 1, table: vec![0], inverse: vec![0] }
    }

    /// `C_n` with element `i` standing for `x^i`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inverse = (0..n).map(|i| (n - i) % n).collect();
        FiniteGroup { n, table, inverse }
    }

    /// `A x B`, element `(a, b)` stored at `a * |B| + b`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.order(), b.order());
        let n = na * nb;
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                table.push(a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb));
            }
        }
        let inverse = (0..n).map(|x| a.inv(x / nb) * nb + b.inv(x % nb)).collect();
        FiniteGroup { n, table, inverse }
    }

    /// Closure of a set of permutations under composition. Returns the group
    /// and the permutations in element order; `(p*q)(i) = p(q(i))`.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Result<(Self, Vec<Vec<usize>>)> {
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index = std::collections::HashMap::new();
        index.insert(id, 0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p: Vec<usize> = elems[i].iter().map(|&k| g[k]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let group = Self::from_closed_set(&elems, |p, q| q.iter().map(|&k| p[k]).collect())?;
        Ok((group, elems))
    }

    pub fn from_json(j: &GroupJson) -> Result<Self> {
        if j.table.len() != j.order {
            return Err(Error::InvalidGroup("order does not match table".into()));
        }
        Self::from_table(j.table.clone())
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson { order: self.n, table: self.rows() }
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conj(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inverse[g])
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a))).collect()
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let b = self.mul(g, a);
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        (0..self.n).filter(|&a| seen[a]).collect()
    }

    /// Greedy generating set: scan elements in index order, keeping those
    /// not yet generated. Prefers high-order elements.
    pub fn generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (1..self.n).collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for a in by_order {
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.generated_subgroup(&gens);
                if span.len() == self.n {
                    break;
                }
            }
        }
        gens
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        if !set.contains(&0) || set.iter().any(|&a| a >= self.n) {
            return false;
        }
        let mut member = vec![false; self.n];
        for &a in set {
            member[a] = true;
        }
        set.iter().all(|&a| set.iter().all(|&b| member[self.mul(a, self.inv(b))]))
    }

    pub fn is_normal(&self, set: &[usize]) -> bool {
        if !self.is_subgroup(set) {
            return false;
        }
        let mut member = vec![false; self.n];
        for &a in set {
            member[a] = true;
        }
        (0..self.n).all(|g| set.iter().all(|&a| member[self.conj(g, a)]))
    }

    /// The subgroup on `set` (any order) renumbered in increasing parent
    /// index, with the embedding into `self`.
    pub fn subgroup(&self, set: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        let mut elems = set.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if !self.is_subgroup(&elems) {
            return Err(Error::NotASubgroup);
        }
        let mut pos = vec![usize::MAX; self.n];
        for (i, &a) in elems.iter().enumerate() {
            pos[a] = i;
        }
        let k = elems.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &elems {
            for &b in &elems {
                table.push(pos[self.mul(a, b)]);
            }
        }
        let inverse = elems.iter().map(|&a| pos[self.inv(a)]).collect();
        Ok((FiniteGroup { n: k, table, inverse }, elems))
    }

    /// Quotient by a normal subgroup; cosets numbered by their least element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        if !self.is_normal(normal) {
            return Err(Error::InvalidGroup("quotient by a non-normal subset".into()));
        }
        let mut proj = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for a in 0..self.n {
            if proj[a] == usize::MAX {
                let c = reps.len();
                reps.push(a);
                for &h in normal {
                    proj[self.mul(a, h)] = c;
                }
            }
        }
        let k = reps.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &reps {
            for &b in &reps {
                table.push(proj[self.mul(a, b)]);
            }
        }
        let inverse = reps.iter().map(|&a| proj[self.inv(a)]).collect();
        Ok((FiniteGroup { n: k, table, inverse }, proj))
    }

    /// Image of every element under the homomorphism determined by
    /// generator images, or `None` if the assignment does not extend to a
    /// homomorphism into `target`.
    pub fn extend_homomorphism(&self, gens: &[usize], images: &[usize], target: &FiniteGroup) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.n];
        map[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for (&g, &im) in gens.iter().zip(images) {
                let b = self.mul(g, a);
                let mb = target.mul(im, map[a]);
                if map[b] == usize::MAX {
                    map[b] = mb;
                    queue.push_back(b);
                } else if map[b] != mb {
                    return None;
                }
            }
        }
        if map.contains(&usize::MAX) {
            return None;
        }
        is_homomorphism(self, target, &map).then_some(map)
    }
}

pub fn is_homomorphism(source: &FiniteGroup, target: &FiniteGroup, map: &[usize]) -> bool {
    map.len() == source.order()
        && map.iter().all(|&x| x < target.order())
        && (0..source.order())
            .all(|a| (0..source.order()).all(|b| map[source.mul(a, b)] == target.mul(map[a], map[b])))
}

/// Backtracking search over generator images for homomorphisms
/// `source -> target`. `candidates[i]` restricts the image of `gens[i]`;
/// `accept` sees each complete homomorphism and returns `false` to stop.
pub fn search_homomorphisms<F>(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[usize],
    candidates: &[Vec<usize>],
    mut accept: F,
) where
    F: FnMut(&[usize]) -> bool,
{
    let mut images = Vec::with_capacity(gens.len());
    fn go<F: FnMut(&[usize]) -> bool>(
        source: &FiniteGroup,
        target: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        accept: &mut F,
    ) -> bool {
        let i = images.len();
        if i == gens.len() {
            return match source.extend_homomorphism(gens, images, target) {
                Some(map) => accept(&map),
                None => true,
            };
        }
        let ord = source.element_order(gens[i]);
        for &c in &candidates[i] {
            if ord % target.element_order(c) != 0 {
                continue;
            }
            images.push(c);
            let cont = go(source, target, gens, candidates, images, accept);
            images.pop();
            if !cont {
                return false;
            }
        }
        true
    }
    go(source, target, gens, candidates, &mut images, &mut accept);
}

/// Some isomorphism `a -> b`, if one exists.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<Vec<usize>> {
    if a.order() != b.order() {
        return None;
    }
    let gens = a.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let o = a.element_order(g);
            b.elements().filter(|&c| b.element_order(c) == o).collect()
        })
        .collect();
    let mut found = None;
    search_homomorphisms(a, b, &gens, &candidates, |map| {
        let mut hit = vec![false; b.order()];
        map.iter().for_each(|&x| hit[x] = true);
        if hit.iter().all(|&h| h) {
            found = Some(map.to_vec());
            false
        } else {
            true
        }
    });
    found
}

/// Default bound on `|G|` for automorphism searches.
pub const DEFAULT_AUT_BOUND: usize = 24;

/// Every automorphism of `g` as the list of element images, sorted
/// lexicographically so the identity comes first.
pub fn automorphisms(g: &FiniteGroup, bound: usize) -> Result<Vec<Vec<usize>>> {
    if g.order() > bound {
        return Err(Error::SizeBound(format!("automorphisms of a group of order {} (bound {bound})", g.order())));
    }
    let gens = g.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| {
            let o = g.element_order(x);
            g.elements().filter(|&c| g.element_order(c) == o).collect()
        })
        .collect();
    let mut out = Vec::new();
    search_homomorphisms(g, g, &gens, &candidates, |map| {
        let mut hit = vec![false; g.order()];
        map.iter().for_each(|&x| hit[x] = true);
        if hit.iter().all(|&h| h) {
            out.push(map.to_vec());
        }
        true
    });
    out.sort();
    Ok(out)
}

/// The group of the given automorphisms (closed under composition, identity
/// first) with element `i` standing for `auts[i]` and `(a*b)(x) = a(b(x))`.
pub fn automorphism_group(auts: &[Vec<usize>]) -> Result<FiniteGroup> {
    FiniteGroup::from_closed_set(auts, |a, b| b.iter().map(|&x| a[x]).collect())
}

/// Sorted multiset of element orders; an isomorphism invariant.
pub fn order_statistics(g: &FiniteGroup) -> Vec<usize> {
    let mut v: Vec<usize> = g.elements().map(|a| g.element_order(a)).collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap().0
    }

    #[test]
    fn automorphism_counts() {
        let s3 = FiniteGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap().0;
        let k4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        let cases = [
            (FiniteGroup::trivial(), 1),
            (FiniteGroup::cyclic(2), 1),
            (FiniteGroup::cyclic(3), 2),
            (FiniteGroup::cyclic(8), 4),
            (k4, 6),
            (s3, 6),
        ];
        for (g, n) in cases {
            let auts = automorphisms(&g, DEFAULT_AUT_BOUND).unwrap();
            assert_eq!(auts.len(), n);
            assert_eq!(auts[0], (0..g.order()).collect::<Vec<_>>());
            // Brute force: bijections that respect the table.
            for a in &auts {
                assert!(is_homomorphism(&g, &g, a));
            }
            let aut = automorphism_group(&auts).unwrap();
            assert_eq!(aut.order(), n);
        }
        assert!(automorphisms(&FiniteGroup::cyclic(25), DEFAULT_AUT_BOUND).is_err());
    }

    #[test]
    fn cyclic_and_products() {
        let c4 = FiniteGroup::cyclic(4);
        assert_eq!(c4.element_order(1), 4);
        assert!(c4.is_abelian());
        let k4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert_eq!(order_statistics(&k4), vec![1, 2, 2, 2]);
        assert!(find_isomorphism(&c4, &k4).is_none());
        assert!(FiniteGroup::from_table(k4.rows()).is_ok());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).is_err());
        // Latin square that is not associative (a loop of order 5).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table(t).is_err());
    }

    #[test]
    fn s3_structure() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.center(), vec![0]);
        let gens = g.generators();
        assert_eq!(g.generated_subgroup(&gens).len(), 6);
        let a3: Vec<usize> = g.elements().filter(|&a| g.element_order(a) != 2).collect();
        assert!(g.is_normal(&a3));
        let (q, proj) = g.quotient(&a3).unwrap();
        assert_eq!(q.order(), 2);
        assert!(is_homomorphism(&g, &q, &proj));
        let (h, emb) = g.subgroup(&a3).unwrap();
        assert!(is_homomorphism(&h, &g, &emb));
        assert!(find_isomorphism(&h, &FiniteGroup::cyclic(3)).is_some());
    }

    #[test]
    fn json_round_trip() {
        let g = s3();
        let j = serde_json::to_string(&g.to_json()).unwrap();
        let back: GroupJson = serde_json::from_str(&j).unwrap();
        assert_eq!(FiniteGroup::from_json(&back).unwrap(), g);
    }
}
