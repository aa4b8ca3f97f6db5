//! Finite crossed modules, crossed 2-fold extensions and their
//! characteristic classes in `H^3(Q, Z)`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cohomology::{restrict_bar_cochain, CohomologyClass, Cochain};
use crate::error::{Error, Result};
use crate::group::{automorphism_group, automorphisms, FiniteGroup, GroupJson};
use crate::grouprings::QModule;
use crate::linalg::{IntMatrix, Snf, Track};

/// One failed instance of a crossed-module axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomFailure {
    Shape { detail: String },
    BoundaryHomomorphism { x: usize, y: usize },
    ActionBijective { g: usize },
    ActionAutomorphism { g: usize, x: usize, y: usize },
    ActionIdentity { x: usize },
    ActionComposition { g: usize, h: usize, x: usize },
    Equivariance { g: usize, x: usize },
    Peiffer { x: usize, y: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CrossedModuleReport {
    pub failures: Vec<AxiomFailure>,
}

impl CrossedModuleReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exhaustive check of the crossed-module axioms. `action[g][x]` is `^g x`.
pub fn check_crossed_module(
    c: &FiniteGroup,
    g: &FiniteGroup,
    boundary: &[usize],
    action: &[Vec<usize>],
) -> CrossedModuleReport {
    let mut failures = Vec::new();
    let (nc, ng) = (c.order(), g.order());
    if boundary.len() != nc
        || boundary.iter().any(|&b| b >= ng)
        || action.len() != ng
        || action.iter().any(|row| row.len() != nc || row.iter().any(|&x| x >= nc))
    {
        failures.push(AxiomFailure::Shape { detail: "maps have the wrong size or range".into() });
        return CrossedModuleReport { failures };
    }
    for x in c.elements() {
        for y in c.elements() {
            if boundary[c.mul(x, y)] != g.mul(boundary[x], boundary[y]) {
                failures.push(AxiomFailure::BoundaryHomomorphism { x, y });
            }
        }
    }
    for a in g.elements() {
        let mut hit = vec![false; nc];
        action[a].iter().for_each(|&x| hit[x] = true);
        if hit.contains(&false) {
            failures.push(AxiomFailure::ActionBijective { g: a });
        }
        for x in c.elements() {
            for y in c.elements() {
                if action[a][c.mul(x, y)] != c.mul(action[a][x], action[a][y]) {
                    failures.push(AxiomFailure::ActionAutomorphism { g: a, x, y });
                }
            }
        }
    }
    for x in c.elements() {
        if action[0][x] != x {
            failures.push(AxiomFailure::ActionIdentity { x });
        }
    }
    for a in g.elements() {
        for b in g.elements() {
            for x in c.elements() {
                if action[g.mul(a, b)][x] != action[a][action[b][x]] {
                    failures.push(AxiomFailure::ActionComposition { g: a, h: b, x });
                }
            }
        }
    }
    for a in g.elements() {
        for x in c.elements() {
            if boundary[action[a][x]] != g.conj(a, boundary[x]) {
                failures.push(AxiomFailure::Equivariance { g: a, x });
            }
        }
    }
    for x in c.elements() {
        for y in c.elements() {
            if c.conj(x, y) != action[boundary[x]][y] {
                failures.push(AxiomFailure::Peiffer { x, y });
            }
        }
    }
    CrossedModuleReport { failures }
}

/// A crossed module `C -> G` between finite groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCrossedModule {
    c: Arc<FiniteGroup>,
    g: Arc<FiniteGroup>,
    boundary: Vec<usize>,
    action: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossedModuleJson {
    pub schema_version: u32,
    pub c: GroupJson,
    pub g: GroupJson,
    pub boundary: Vec<usize>,
    pub action: Vec<Vec<usize>>,
}

impl FiniteCrossedModule {
    pub fn new(c: Arc<FiniteGroup>, g: Arc<FiniteGroup>, boundary: Vec<usize>, action: Vec<Vec<usize>>) -> Result<Self> {
        let report = check_crossed_module(&c, &g, &boundary, &action);
        if let Some(f) = report.failures.first() {
            return Err(Error::InvalidCrossedModule(format!("{f:?}")));
        }
        Ok(FiniteCrossedModule { c, g, boundary, action })
    }

    /// Inclusion of a normal subgroup with the conjugation action.
    pub fn normal_inclusion(g: &Arc<FiniteGroup>, normal: &[usize]) -> Result<Self> {
        if !g.is_normal(normal) {
            return Err(Error::NotASubgroup);
        }
        let (c, emb) = g.subgroup(normal)?;
        let pos: HashMap<usize, usize> = emb.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let action = g.elements().map(|a| emb.iter().map(|&x| pos[&g.conj(a, x)]).collect()).collect();
        Self::new(Arc::new(c), g.clone(), emb, action)
    }

    /// `(M, Q, 0)` for a finite module `M`: `C` is the product of the cyclic
    /// summands (first summand most significant).
    pub fn from_module(m: &QModule) -> Result<Self> {
        if m.factors().contains(&0) {
            return Err(Error::ModuleMismatch("module must be finite".into()));
        }
        let c = m.factors().iter().fold(FiniteGroup::trivial(), |acc, &f| {
            FiniteGroup::direct_product(&acc, &FiniteGroup::cyclic(f as usize))
        });
        let coords = |mut x: usize| -> Vec<i64> {
            let mut v = vec![0i64; m.rank()];
            for (k, &f) in m.factors().iter().enumerate().rev() {
                v[k] = (x % f as usize) as i64;
                x /= f as usize;
            }
            v
        };
        let index = |v: &[i64]| v.iter().zip(m.factors()).fold(0usize, |acc, (&a, &f)| acc * f as usize + a as usize);
        let q = m.group().clone();
        let action = q.elements().map(|a| c.elements().map(|x| index(&m.act(a, &coords(x)))).collect()).collect();
        Self::new(Arc::new(c.clone()), q, vec![0; c.order()], action)
    }

    pub fn c(&self) -> &Arc<FiniteGroup> {
        &self.c
    }

    pub fn g(&self) -> &Arc<FiniteGroup> {
        &self.g
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    pub fn report(&self) -> CrossedModuleReport {
        check_crossed_module(&self.c, &self.g, &self.boundary, &self.action)
    }

    pub fn to_json(&self) -> CrossedModuleJson {
        CrossedModuleJson {
            schema_version: 1,
            c: self.c.to_json(),
            g: self.g.to_json(),
            boundary: self.boundary.clone(),
            action: self.action.clone(),
        }
    }

    pub fn from_json(j: &CrossedModuleJson) -> Result<Self> {
        Self::new(
            Arc::new(FiniteGroup::from_json(&j.c)?),
            Arc::new(FiniteGroup::from_json(&j.g)?),
            j.boundary.clone(),
            j.action.clone(),
        )
    }
}

/// `(G, Aut(G), inn)`; `Aut(G)` is numbered as in `automorphisms`.
pub fn inner_crossed_module(g: &Arc<FiniteGroup>, bound: usize) -> Result<FiniteCrossedModule> {
    let auts = automorphisms(g, bound)?;
    let aut = automorphism_group(&auts)?;
    let index: HashMap<&[usize], usize> = auts.iter().enumerate().map(|(i, a)| (a.as_slice(), i)).collect();
    let boundary = g
        .elements()
        .map(|x| {
            let conj: Vec<usize> = g.elements().map(|y| g.conj(x, y)).collect();
            index[conj.as_slice()]
        })
        .collect();
    FiniteCrossedModule::new(g.clone(), Arc::new(aut), boundary, auts)
}

/// A finite abelian subgroup of some group in invariant-factor
/// coordinates.
#[derive(Clone, Debug)]
pub struct AbelianSubgroup {
    elements: Vec<usize>,
    factors: Vec<u64>,
    coords: Vec<Vec<i64>>,
    basis: Vec<usize>,
}

impl AbelianSubgroup {
    pub fn new(parent: &FiniteGroup, set: &[usize]) -> Result<Self> {
        let (h, emb) = parent.subgroup(set)?;
        if !h.is_abelian() {
            return Err(Error::InvalidGroup("subgroup is not abelian".into()));
        }
        let gens = h.generators();
        let k = gens.len();
        let mut vecs: Vec<Option<Vec<i64>>> = vec![None; h.order()];
        vecs[0] = Some(vec![0; k]);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for (i, &g) in gens.iter().enumerate() {
                let b = h.mul(a, g);
                if vecs[b].is_none() {
                    let mut v = vecs[a].clone().unwrap();
                    v[i] += 1;
                    vecs[b] = Some(v);
                    queue.push_back(b);
                }
            }
        }
        let vecs: Vec<Vec<i64>> = vecs.into_iter().map(|v| v.expect("generators span")).collect();
        let mut relations = Vec::new();
        for a in h.elements() {
            for (i, &g) in gens.iter().enumerate() {
                let b = h.mul(a, g);
                let col: Vec<BigInt> = (0..k).map(|j| BigInt::from(vecs[a][j] + i64::from(i == j) - vecs[b][j])).collect();
                if col.iter().any(|x| !x.is_zero()) {
                    relations.push(col);
                }
            }
        }
        let rel = IntMatrix::from_columns(k, &relations);
        let s = Snf::compute(&rel, Track { u: true, u_inv: true, ..Track::default() });
        let u = s.u.as_ref().unwrap();
        let u_inv = s.u_inv.as_ref().unwrap();
        let mut keep = Vec::new();
        let mut factors = Vec::new();
        for i in 0..k {
            let d = if i < s.rank { s.diag(i).clone() } else { BigInt::zero() };
            assert!(!d.is_zero(), "finite group has no free part");
            if d != BigInt::from(1) {
                keep.push(i);
                factors.push(d.to_u64().unwrap());
            }
        }
        let coords = vecs
            .iter()
            .map(|v| {
                let y = u.mul_vec(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
                keep.iter()
                    .zip(&factors)
                    .map(|(&i, &d)| y[i].mod_floor(&BigInt::from(d)).to_i64().unwrap())
                    .collect()
            })
            .collect();
        let basis = keep
            .iter()
            .map(|&i| {
                let col = u_inv.column(i);
                let mut x = 0;
                for (j, &g) in gens.iter().enumerate() {
                    let e = col[j].mod_floor(&BigInt::from(h.element_order(g))).to_i64().unwrap();
                    x = h.mul(x, h.pow(g, e));
                }
                emb[x]
            })
            .collect();
        Ok(AbelianSubgroup { elements: emb, factors, coords, basis })
    }

    /// Parent indices, increasing.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Parent elements generating the cyclic summands.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn coordinates(&self, x: usize) -> Option<&[i64]> {
        self.elements.binary_search(&x).ok().map(|i| self.coords[i].as_slice())
    }

    pub fn element(&self, parent: &FiniteGroup, coords: &[i64]) -> usize {
        coords.iter().zip(&self.basis).fold(0, |acc, (&c, &b)| parent.mul(acc, parent.pow(b, c)))
    }

    /// The subgroup as a `Q`-module, `act(q, x)` giving the action on
    /// parent elements.
    pub fn module<F>(&self, q: &Arc<FiniteGroup>, act: F) -> Result<QModule>
    where
        F: Fn(usize, usize) -> usize,
    {
        let r = self.factors.len();
        let action = q
            .elements()
            .map(|a| {
                let mut m = vec![vec![0i64; r]; r];
                for (j, &b) in self.basis.iter().enumerate() {
                    let img = self.coordinates(act(a, b)).expect("action preserves the subgroup");
                    for i in 0..r {
                        m[i][j] = img[i];
                    }
                }
                m
            })
            .collect();
        QModule::new(q.clone(), self.factors.clone(), action)
    }
}

/// `Z >-> C -> G ->> Q` from a crossed module.
#[derive(Clone, Debug)]
pub struct CrossedTwoFoldExtension {
    pub xmod: FiniteCrossedModule,
    /// `Z = ker d` inside `C`.
    pub kernel: AbelianSubgroup,
    /// `Z` as a `Q`-module.
    pub module: QModule,
    pub q: Arc<FiniteGroup>,
    /// `G ->> Q`.
    pub projection: Vec<usize>,
    /// Least element of each coset of `d(C)`.
    pub section: Vec<usize>,
}

pub fn two_fold_extension(cm: &FiniteCrossedModule) -> Result<CrossedTwoFoldExtension> {
    let (c, g) = (cm.c(), cm.g());
    let mut image: Vec<usize> = cm.boundary().to_vec();
    image.sort_unstable();
    image.dedup();
    if !g.is_normal(&image) {
        return Err(Error::InvalidCrossedModule("boundary image is not normal".into()));
    }
    let (q, projection) = g.quotient(&image)?;
    let mut section = vec![usize::MAX; q.order()];
    for x in g.elements().rev() {
        section[projection[x]] = x;
    }
    let ker: Vec<usize> = c.elements().filter(|&x| cm.boundary()[x] == 0).collect();
    if ker.iter().any(|&z| c.elements().any(|x| c.mul(z, x) != c.mul(x, z))) {
        return Err(Error::InvalidCrossedModule("kernel is not central".into()));
    }
    for a in g.elements() {
        for &z in &ker {
            if cm.act(a, z) != cm.act(section[projection[a]], z) {
                return Err(Error::InvalidCrossedModule("induced action on the kernel is not well defined".into()));
            }
        }
    }
    let kernel = AbelianSubgroup::new(c, &ker)?;
    let q = Arc::new(q);
    let module = kernel.module(&q, |a, z| cm.act(section[a], z))?;
    Ok(CrossedTwoFoldExtension { xmod: cm.clone(), kernel, module, q, projection, section })
}

impl CrossedTwoFoldExtension {
    /// Characteristic class from the least-index section and lifts.
    pub fn characteristic_class(&self) -> Result<CohomologyClass> {
        self.characteristic_class_seeded(None)
    }

    /// Same class, with section and lifts drawn at random when a seed is
    /// given (still normalized).
    pub fn characteristic_class_seeded(&self, seed: Option<u64>) -> Result<CohomologyClass> {
        let (c, g, q) = (self.xmod.c(), self.xmod.g(), &self.q);
        let mut rng = seed.map(StdRng::seed_from_u64);
        let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); g.order()];
        for x in c.elements() {
            preimages[self.xmod.boundary()[x]].push(x);
        }
        let mut s = self.section.clone();
        if let Some(rng) = rng.as_mut() {
            for qe in q.elements().skip(1) {
                let coset: Vec<usize> = g.elements().filter(|&x| self.projection[x] == qe).collect();
                s[qe] = coset[rng.gen_range(0..coset.len())];
            }
        }
        let nq = q.order();
        let mut cs = vec![0usize; nq * nq];
        for a in q.elements().skip(1) {
            for b in q.elements().skip(1) {
                let t = g.mul(g.mul(s[a], s[b]), g.inv(s[q.mul(a, b)]));
                let pre = &preimages[t];
                cs[a * nq + b] = match rng.as_mut() {
                    Some(rng) => pre[rng.gen_range(0..pre.len())],
                    None => pre[0],
                };
            }
        }
        let cf = |a: usize, b: usize| cs[a * nq + b];
        let mut bad = false;
        let rep = Cochain::from_bar_fn(q, &self.module, 3, |t| {
            let (a, b, d) = (t[0], t[1], t[2]);
            let z = c.mul(
                c.mul(self.xmod.act(s[a], cf(b, d)), cf(a, q.mul(b, d))),
                c.mul(c.inv(cf(q.mul(a, b), d)), c.inv(cf(a, b))),
            );
            match self.kernel.coordinates(z) {
                Some(v) => v.to_vec(),
                None => {
                    bad = true;
                    vec![0; self.module.rank()]
                }
            }
        });
        if bad {
            return Err(Error::InconsistentWitness("3-cocycle value outside the kernel".into()));
        }
        Ok(CohomologyClass { degree: 3, module: self.module.clone(), representative: rep })
    }
}

/// Characteristic class of a crossed module.
pub fn characteristic_class(cm: &FiniteCrossedModule) -> Result<CohomologyClass> {
    two_fold_extension(cm)?.characteristic_class()
}

/// Pullback of `G ->> Q` along a subgroup `Q' <= Q`. Returns the restricted
/// extension and the embedding of its quotient group into `Q`.
pub fn restrict_extension(e: &CrossedTwoFoldExtension, sub: &[usize]) -> Result<(CrossedTwoFoldExtension, Vec<usize>)> {
    if !e.q.is_subgroup(sub) {
        return Err(Error::NotASubgroup);
    }
    let g = e.xmod.g();
    let members: Vec<usize> = g.elements().filter(|&x| sub.contains(&e.projection[x])).collect();
    let (gs, emb) = g.subgroup(&members)?;
    let pos: HashMap<usize, usize> = emb.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let boundary = e.xmod.boundary().iter().map(|b| pos[b]).collect();
    let action = emb.iter().map(|&x| e.xmod.action()[x].clone()).collect();
    let cm = FiniteCrossedModule::new(e.xmod.c().clone(), Arc::new(gs), boundary, action)?;
    let r = two_fold_extension(&cm)?;
    let q_emb = r.section.iter().map(|&x| e.projection[emb[x]]).collect();
    Ok((r, q_emb))
}

/// The original class restricted along `q_emb`, for comparison with the
/// class of `restrict_extension`.
pub fn restrict_class(class: &CohomologyClass, sub: &Arc<FiniteGroup>, q_emb: &[usize]) -> CohomologyClass {
    let q = class.module.group();
    CohomologyClass {
        degree: class.degree,
        module: class.module.restrict(sub, q_emb),
        representative: restrict_bar_cochain(&class.representative, q, &class.module, sub, q_emb),
    }
}
