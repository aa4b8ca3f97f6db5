//! The extension problem for abstract kernels `phi: Q -> Out(N)`.
//!
//! Constructed extensions live on the set `Q x N`, element `(q, n)` at index
//! `q * |N| + n`, with the left factor-set convention
//! `(n1, q1)(n2, q2) = (n1 * phi(q1)(n2) * f(q1, q2), q1 q2)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cohomology::{cohomology_group, Cochain, CochainComplex, CohomologyClass, ResolutionChoice};
use crate::error::{Error, Result};
use crate::group::{automorphism_group, automorphisms, search_homomorphisms, FiniteGroup, GroupJson};
use crate::grouprings::QModule;
use crate::presentations::{todd_coxeter, Presentation, DEFAULT_MAX_COSETS};
use crate::xmod::{restrict_class, two_fold_extension, AbelianSubgroup, FiniteCrossedModule};

/// `Aut(N)`, `Inn(N)` and `Out(N)` with fixed coset representatives.
#[derive(Debug, Clone)]
pub struct AutData {
    pub n: Arc<FiniteGroup>,
    /// Automorphisms as element images, sorted (identity first).
    pub auts: Vec<Vec<usize>>,
    /// Element `i` is `auts[i]`, composed as maps.
    pub aut: Arc<FiniteGroup>,
    /// `N -> Aut(N)`, conjugation.
    pub inn_map: Vec<usize>,
    /// Sorted indices of the inner automorphisms.
    pub inner: Vec<usize>,
    pub out: Arc<FiniteGroup>,
    /// `Aut(N) ->> Out(N)`.
    pub out_projection: Vec<usize>,
    /// Lowest-index automorphism in each outer class.
    pub out_reps: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
}

impl AutData {
    pub fn new(n: &Arc<FiniteGroup>, bound: usize) -> Result<Self> {
        let auts = automorphisms(n, bound)?;
        let aut = Arc::new(automorphism_group(&auts)?);
        let index: HashMap<Vec<usize>, usize> = auts.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let inn_map: Vec<usize> =
            n.elements().map(|x| index[&n.elements().map(|y| n.conj(x, y)).collect::<Vec<_>>()]).collect();
        let inner: Vec<usize> = inn_map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let (out, out_projection) = aut.quotient(&inner)?;
        let mut out_reps = vec![usize::MAX; out.order()];
        for a in aut.elements().rev() {
            out_reps[out_projection[a]] = a;
        }
        Ok(AutData { n: n.clone(), auts, aut, inn_map, inner, out: Arc::new(out), out_projection, out_reps, index })
    }

    pub fn index_of(&self, map: &[usize]) -> Option<usize> {
        self.index.get(map).copied()
    }

    pub fn apply(&self, a: usize, x: usize) -> usize {
        self.auts[a][x]
    }
}

/// The default automorphism-search bound for `Aut(N)`.
pub use crate::group::DEFAULT_AUT_BOUND;

/// `phi: Q -> Out(N)`, stored through the fixed representatives in
/// `Aut(N)`.
#[derive(Debug, Clone)]
pub struct AbstractKernel {
    pub aut: Arc<AutData>,
    pub q: Arc<FiniteGroup>,
    /// `phi[q]` is an element of `aut.out_reps`.
    pub phi: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelJson {
    pub schema_version: u32,
    #[serde(rename = "N")]
    pub n: GroupJson,
    #[serde(rename = "Q")]
    pub q: GroupJson,
    pub phi: Vec<usize>,
}

impl AbstractKernel {
    pub fn new(aut: Arc<AutData>, q: Arc<FiniteGroup>, phi: Vec<usize>) -> Result<Self> {
        if phi.len() != q.order() || phi.iter().any(|&a| a >= aut.aut.order() || aut.out_reps[aut.out_projection[a]] != a) {
            return Err(Error::InvalidKernel("phi must send Q to outer-class representatives".into()));
        }
        let out = &aut.out;
        for a in q.elements() {
            for b in q.elements() {
                let lhs = aut.out_projection[phi[q.mul(a, b)]];
                let rhs = out.mul(aut.out_projection[phi[a]], aut.out_projection[phi[b]]);
                if lhs != rhs {
                    return Err(Error::InvalidKernel(format!("phi is not a homomorphism at ({a}, {b})")));
                }
            }
        }
        Ok(AbstractKernel { aut, q, phi })
    }

    /// From a homomorphism `Q -> Out(N)` given on elements.
    pub fn from_out_map(aut: Arc<AutData>, q: Arc<FiniteGroup>, out_map: &[usize]) -> Result<Self> {
        let phi = out_map.iter().map(|&o| aut.out_reps[o]).collect();
        Self::new(aut, q, phi)
    }

    pub fn n(&self) -> &Arc<FiniteGroup> {
        &self.aut.n
    }

    pub fn out_map(&self) -> Vec<usize> {
        self.phi.iter().map(|&a| self.aut.out_projection[a]).collect()
    }

    /// Centre of `N`.
    pub fn center(&self) -> Result<AbelianSubgroup> {
        AbelianSubgroup::new(self.n(), &self.n().center())
    }

    /// `Z(N)` as a `Q`-module through `phi`.
    pub fn center_module(&self) -> Result<(AbelianSubgroup, QModule)> {
        let z = self.center()?;
        let m = z.module(&self.q, |q, x| self.aut.apply(self.phi[q], x))?;
        Ok((z, m))
    }

    /// The lowest-index `n` with `inn(n) = phi(a) phi(b) phi(ab)^-1`.
    fn lift(&self, a: usize, b: usize) -> usize {
        let aut = &self.aut.aut;
        let t = aut.mul(aut.mul(self.phi[a], self.phi[b]), aut.inv(self.phi[self.q.mul(a, b)]));
        self.n().elements().find(|&x| self.aut.inn_map[x] == t).expect("phi is a homomorphism modulo Inn")
    }

    pub fn to_json(&self) -> KernelJson {
        KernelJson { schema_version: 1, n: self.n().to_json(), q: self.q.to_json(), phi: self.phi.clone() }
    }

    pub fn from_json(j: &KernelJson, bound: usize) -> Result<Self> {
        let n = Arc::new(FiniteGroup::from_json(&j.n)?);
        let q = Arc::new(FiniteGroup::from_json(&j.q)?);
        Self::new(Arc::new(AutData::new(&n, bound)?), q, j.phi.clone())
    }
}

/// `G1 x_Q G2` with its projections.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub group: FiniteGroup,
    /// Pairs in lexicographic order; index `i` is `pairs[i]`.
    pub pairs: Vec<(usize, usize)>,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
}

pub fn pullback(g1: &FiniteGroup, f1: &[usize], g2: &FiniteGroup, f2: &[usize]) -> Result<Pullback> {
    let mut pairs = Vec::new();
    for a in g1.elements() {
        for b in g2.elements() {
            if f1[a] == f2[b] {
                pairs.push((a, b));
            }
        }
    }
    let group = FiniteGroup::from_closed_set(&pairs, |x, y| (g1.mul(x.0, y.0), g2.mul(x.1, y.1)))?;
    let p1 = pairs.iter().map(|p| p.0).collect();
    let p2 = pairs.iter().map(|p| p.1).collect();
    Ok(Pullback { group, pairs, p1, p2 })
}

/// `(N, G^phi, d^phi)` with `G^phi = Aut(N) x_Out(N) Q`, and for each `q`
/// the element `(phi(q), q)`.
pub fn kernel_crossed_module(k: &AbstractKernel) -> Result<(FiniteCrossedModule, Pullback, Vec<usize>)> {
    let aut = &k.aut;
    let out_map = k.out_map();
    let pb = pullback(&aut.aut, &aut.out_projection, &k.q, &out_map)?;
    let pos: HashMap<(usize, usize), usize> = pb.pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = k.n();
    let boundary = n.elements().map(|x| pos[&(aut.inn_map[x], 0)]).collect();
    let action = pb.pairs.iter().map(|&(a, _)| aut.auts[a].clone()).collect();
    let cm = FiniteCrossedModule::new(n.clone(), Arc::new(pb.group.clone()), boundary, action)?;
    let section = k.q.elements().map(|q| pos[&(k.phi[q], q)]).collect();
    Ok((cm, pb, section))
}

/// The obstruction class in `H^3(Q, Z(N))`.
pub fn obstruction(k: &AbstractKernel) -> Result<CohomologyClass> {
    let (cm, _, section) = kernel_crossed_module(k)?;
    let ext = two_fold_extension(&cm)?;
    let class = ext.characteristic_class()?;
    let to_quotient: Vec<usize> = section.iter().map(|&g| ext.projection[g]).collect();
    let class = restrict_class(&class, &k.q, &to_quotient);
    // Express the module in the kernel's own centre coordinates.
    let (_, module) = k.center_module()?;
    if module != class.module {
        return Err(Error::ModuleMismatch("centre coordinates differ".into()));
    }
    Ok(class)
}

pub fn is_extendible(k: &AbstractKernel) -> Result<bool> {
    obstruction(k)?.is_zero()
}

/// A degree-2 witness `b` with `delta b` equal to the obstruction cocycle,
/// or `None` if the kernel is not extendible.
pub fn extension_witness(k: &AbstractKernel) -> Result<Option<Cochain>> {
    obstruction(k)?.coboundary_witness()
}

/// `N >-> E ->> Q`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub n: Arc<FiniteGroup>,
    pub q: Arc<FiniteGroup>,
    pub e: Arc<FiniteGroup>,
    pub inj: Vec<usize>,
    pub surj: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionJson {
    pub schema_version: u32,
    pub table: Vec<Vec<usize>>,
    pub inj: Vec<usize>,
    pub surj: Vec<usize>,
}

impl Extension {
    pub fn new(n: Arc<FiniteGroup>, q: Arc<FiniteGroup>, e: Arc<FiniteGroup>, inj: Vec<usize>, surj: Vec<usize>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidGroup(format!("not an extension: {m}")));
        if e.order() != n.order() * q.order() {
            return bad("|E| != |N| |Q|");
        }
        if !crate::group::is_homomorphism(&n, &e, &inj) || inj.iter().collect::<BTreeSet<_>>().len() != n.order() {
            return bad("inj is not an injective homomorphism");
        }
        if !crate::group::is_homomorphism(&e, &q, &surj) || surj.iter().collect::<BTreeSet<_>>().len() != q.order() {
            return bad("surj is not a surjective homomorphism");
        }
        let ker: BTreeSet<usize> = e.elements().filter(|&x| surj[x] == 0).collect();
        if ker != inj.iter().copied().collect() {
            return bad("ker surj != im inj");
        }
        Ok(Extension { n, q, e, inj, surj })
    }

    /// The abstract kernel induced by conjugation.
    pub fn induced_kernel(&self, aut: &Arc<AutData>) -> Result<AbstractKernel> {
        let mut pos = vec![usize::MAX; self.e.order()];
        for (i, &x) in self.inj.iter().enumerate() {
            pos[x] = i;
        }
        let mut out_map = vec![usize::MAX; self.q.order()];
        for x in self.e.elements() {
            let q = self.surj[x];
            if out_map[q] == usize::MAX {
                let conj: Vec<usize> = self.n.elements().map(|y| pos[self.e.conj(x, self.inj[y])]).collect();
                let a = aut.index_of(&conj).ok_or_else(|| Error::InvalidGroup("conjugation is not an automorphism".into()))?;
                out_map[q] = aut.out_projection[a];
            }
        }
        AbstractKernel::from_out_map(aut.clone(), self.q.clone(), &out_map)
    }

    pub fn induces(&self, k: &AbstractKernel) -> Result<bool> {
        Ok(self.induced_kernel(&k.aut)?.phi == k.phi)
    }

    pub fn to_json(&self) -> ExtensionJson {
        ExtensionJson { schema_version: 1, table: self.e.rows(), inj: self.inj.clone(), surj: self.surj.clone() }
    }
}

/// The extension with factor set `f` (indexed `a * |Q| + b`), provided the
/// multiplication is associative.
pub fn extension_from_factor_set(k: &AbstractKernel, f: &[usize]) -> Result<Extension> {
    let (n, q) = (k.n(), &k.q);
    let (nn, nq) = (n.order(), q.order());
    let mut table = Vec::with_capacity(nn * nq * nn * nq);
    for x in 0..nn * nq {
        let (q1, n1) = (x / nn, x % nn);
        for y in 0..nn * nq {
            let (q2, n2) = (y / nn, y % nn);
            let m = n.mul(n.mul(n1, k.aut.apply(k.phi[q1], n2)), f[q1 * nq + q2]);
            table.push(q.mul(q1, q2) * nn + m);
        }
    }
    let e = FiniteGroup::from_flat(nn * nq, table).map_err(|e| Error::InconsistentWitness(e.to_string()))?;
    let inj = n.elements().collect();
    let surj = (0..nn * nq).map(|x| x / nn).collect();
    Extension::new(n.clone(), q.clone(), Arc::new(e), inj, surj)
}

/// Realizes `k` from a witness `b` with `delta b = z`: the factor set is
/// `c(a, b) * b(a, b)^-1` for the lifts `c` used by the obstruction.
pub fn construct_extension(k: &AbstractKernel, witness: &Cochain) -> Result<Extension> {
    let class = obstruction(k)?;
    let (z, module) = k.center_module()?;
    let cx = CochainComplex::bar(&module, 3)?;
    if witness.degree != 2 || witness.values.len() != cx.dim(2) {
        return Err(Error::InconsistentWitness("witness must be a normalized 2-cochain".into()));
    }
    let diff = cx.coboundary(witness)?;
    if diff != class.representative {
        return Err(Error::InconsistentWitness("delta of the witness is not the obstruction cocycle".into()));
    }
    let (n, q) = (k.n(), &k.q);
    let nq = q.order();
    let mut f = vec![0usize; nq * nq];
    for a in q.elements().skip(1) {
        for b in q.elements().skip(1) {
            let w = z.element(n, &witness.bar_value(q, &module, &[a, b]));
            f[a * nq + b] = n.mul(k.lift(a, b), n.inv(w));
        }
    }
    extension_from_factor_set(k, &f)
}

/// `construct_extension` with the witness found by the solver.
pub fn realize(k: &AbstractKernel) -> Result<Extension> {
    let w = extension_witness(k)?.ok_or(Error::NotExtendible)?;
    construct_extension(k, &w)
}

/// Whether an isomorphism `E1 -> E2` commutes with the inclusions and
/// projections.
pub fn congruent(e1: &Extension, e2: &Extension) -> bool {
    congruence(e1, e2).is_some()
}

pub fn congruence(e1: &Extension, e2: &Extension) -> Option<Vec<usize>> {
    if e1.e.order() != e2.e.order() || e1.n.order() != e2.n.order() || e1.q.order() != e2.q.order() {
        return None;
    }
    let mut from_n = vec![usize::MAX; e1.e.order()];
    for (i, &x) in e1.inj.iter().enumerate() {
        from_n[x] = i;
    }
    let gens = e1.e.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| {
            if from_n[x] != usize::MAX {
                vec![e2.inj[from_n[x]]]
            } else {
                e2.e.elements().filter(|&y| e2.surj[y] == e1.surj[x]).collect()
            }
        })
        .collect();
    let mut found = None;
    search_homomorphisms(&e1.e, &e2.e, &gens, &candidates, |map| {
        let ok = e1.n.elements().all(|i| map[e1.inj[i]] == e2.inj[i])
            && e1.e.elements().all(|x| e2.surj[map[x]] == e1.surj[x]);
        if ok {
            found = Some(map.to_vec());
        }
        !ok
    });
    found
}

/// `(Z(N), Q, phi restricted)`: the kernel whose extensions act on those
/// of `k`.
pub fn center_kernel(k: &AbstractKernel) -> Result<(AbstractKernel, Vec<usize>)> {
    let n = k.n();
    let (zg, emb) = n.subgroup(&n.center())?;
    let zg = Arc::new(zg);
    let zaut = Arc::new(AutData::new(&zg, usize::MAX)?);
    let mut pos = vec![usize::MAX; n.order()];
    for (i, &x) in emb.iter().enumerate() {
        pos[x] = i;
    }
    let out_map: Vec<usize> = k
        .phi
        .iter()
        .map(|&a| {
            let r: Vec<usize> = emb.iter().map(|&x| pos[k.aut.apply(a, x)]).collect();
            zaut.index_of(&r).map(|i| zaut.out_projection[i]).expect("automorphisms preserve the centre")
        })
        .collect();
    Ok((AbstractKernel::from_out_map(zaut, k.q.clone(), &out_map)?, emb))
}

/// The extension of `Q` by `Z(N)` in the class with the given coordinates
/// in `H^2(Q, Z(N))`, together with the centre embedding.
pub fn center_extension(k: &AbstractKernel, coords: &[BigInt]) -> Result<(Extension, Vec<usize>)> {
    let (zk, center) = center_kernel(k)?;
    let (_, m) = zk.center_module()?;
    let (_, h2) = cohomology_group(&m, 2, ResolutionChoice::Bar)?;
    if coords.len() != h2.structure.invariant_factors().len() {
        return Err(Error::ModuleMismatch(format!("H^2 has {} coordinates", h2.structure.invariant_factors().len())));
    }
    let base = extension_witness(&zk)?.ok_or(Error::NotExtendible)?;
    let e = construct_extension(&zk, &base.add(&h2.cocycle_of_class(coords), &m))?;
    Ok((e, center))
}

/// Action of an extension `e` of `Q` by `Z(N)` on an extension `e1` of `Q`
/// by `N`: `E2 = (E1 x_Q E) / {(j1(z), j(z)^-1)}`.
///
/// `center` embeds `e.n` into `e1.n` as the centre (see `center_kernel`).
pub fn baer_act(e1: &Extension, e: &Extension, center: &[usize]) -> Result<Extension> {
    let n = &e1.n;
    if e.q.order() != e1.q.order() || e.n.order() != center.len() || *e.q != *e1.q {
        return Err(Error::ModuleMismatch("extensions are over different groups".into()));
    }
    let mut zc = center.to_vec();
    zc.sort_unstable();
    if zc != n.center() {
        return Err(Error::ModuleMismatch("second extension is not by the centre".into()));
    }
    let pb = pullback(&e1.e, &e1.surj, &e.e, &e.surj)?;
    let pos: HashMap<(usize, usize), usize> = pb.pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let anti: Vec<usize> = e
        .n
        .elements()
        .map(|z| pos[&(e1.inj[center[z]], e.e.inv(e.inj[z]))])
        .collect();
    if !pb.group.is_normal(&anti) {
        return Err(Error::ModuleMismatch("actions on the centre disagree".into()));
    }
    let (e2, proj) = pb.group.quotient(&anti)?;
    let inj = n.elements().map(|x| proj[pos[&(e1.inj[x], 0)]]).collect();
    let mut surj = vec![0; e2.order()];
    for (i, &(a, _)) in pb.pairs.iter().enumerate() {
        surj[proj[i]] = e1.surj[a];
    }
    Extension::new(n.clone(), e1.q.clone(), Arc::new(e2), inj, surj)
}

/// Search limits for `enumerate_extensions`.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_n: usize,
    pub max_q: usize,
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_n: 8, max_q: 4, max_nodes: 50_000_000 }
    }
}

/// Congruence classes of extensions inducing `k`, by direct search.
///
/// Every such extension has a section whose conjugations are exactly the
/// representatives `phi(q)`, so it is `E_f` for a normalized factor set
/// with `inn(f(a, b)) = phi(a) phi(b) phi(ab)^-1` satisfying the
/// associativity condition. The search enumerates those factor sets and
/// groups them under re-choosing the section by central elements
/// `h: Q -> Z(N)`, which sends `f(a, b)` to
/// `f(a, b) h(ab) h(a)^-1 phi(a)(h(b))^-1`. One representative per class,
/// ordered by factor set.
pub fn enumerate_extensions(k: &AbstractKernel, budget: SearchBudget) -> Result<Vec<Extension>> {
    let (n, q) = (k.n(), &k.q);
    if n.order() > budget.max_n || q.order() > budget.max_q {
        return Err(Error::BudgetExceeded(format!("|N| = {}, |Q| = {}", n.order(), q.order())));
    }
    let nq = q.order();
    let aut = &k.aut;
    // Allowed values for each non-trivial pair.
    let mut choices: Vec<Vec<usize>> = vec![vec![0]; nq * nq];
    for a in 1..nq {
        for b in 1..nq {
            let t = aut.aut.mul(aut.aut.mul(k.phi[a], k.phi[b]), aut.aut.inv(k.phi[q.mul(a, b)]));
            choices[a * nq + b] = n.elements().filter(|&x| aut.inn_map[x] == t).collect();
        }
    }
    let pairs: Vec<usize> = (1..nq).flat_map(|a| (1..nq).map(move |b| a * nq + b)).collect();
    // A triple constraint becomes checkable once its four pairs are set.
    let order_of: HashMap<usize, usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let rank = |p: usize| order_of.get(&p).copied().map_or(0, |i| i + 1);
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); pairs.len() + 1];
    for a in 0..nq {
        for b in 0..nq {
            for c in 0..nq {
                let last = [b * nq + c, a * nq + q.mul(b, c), q.mul(a, b) * nq + c, a * nq + b]
                    .iter()
                    .map(|&p| rank(p))
                    .max()
                    .unwrap();
                checks[last].push((a, b, c));
            }
        }
    }
    let holds = |f: &[usize], (a, b, c): (usize, usize, usize)| {
        // phi(a)(f(b,c)) f(a,bc) = f(a,b) f(ab,c)
        let lhs = n.mul(aut.apply(k.phi[a], f[b * nq + c]), f[a * nq + q.mul(b, c)]);
        let rhs = n.mul(f[a * nq + b], f[q.mul(a, b) * nq + c]);
        lhs == rhs
    };
    let mut f = vec![0usize; nq * nq];
    if !checks[0].iter().all(|&t| holds(&f, t)) {
        return Ok(Vec::new());
    }
    let mut solutions: Vec<Vec<usize>> = Vec::new();
    let mut nodes = 0u64;
    fn go(
        depth: usize,
        pairs: &[usize],
        choices: &[Vec<usize>],
        checks: &[Vec<(usize, usize, usize)>],
        f: &mut Vec<usize>,
        holds: &dyn Fn(&[usize], (usize, usize, usize)) -> bool,
        nodes: &mut u64,
        max_nodes: u64,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if depth == pairs.len() {
            out.push(f.clone());
            return Ok(());
        }
        let p = pairs[depth];
        for &v in &choices[p] {
            *nodes += 1;
            if *nodes > max_nodes {
                return Err(Error::BudgetExceeded(format!("more than {max_nodes} search nodes")));
            }
            f[p] = v;
            if checks[depth + 1].iter().all(|&t| holds(f, t)) {
                go(depth + 1, pairs, choices, checks, f, holds, nodes, max_nodes, out)?;
            }
        }
        f[p] = 0;
        Ok(())
    }
    go(0, &pairs, &choices, &checks, &mut f, &holds, &mut nodes, budget.max_nodes, &mut solutions)?;
    if solutions.is_empty() {
        return Ok(Vec::new());
    }
    // Orbits under central re-sectioning.
    let center = n.center();
    let index: HashMap<Vec<usize>, usize> = solutions.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut class = vec![usize::MAX; solutions.len()];
    let mut reps = Vec::new();
    let mut h = vec![0usize; nq];
    for start in 0..solutions.len() {
        if class[start] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(start);
        // Enumerate every h: Q \ {e} -> Z(N).
        let total = center.len().pow((nq - 1) as u32);
        for code in 0..total {
            let mut c = code;
            for x in h.iter_mut().skip(1) {
                *x = center[c % center.len()];
                c /= center.len();
            }
            let base = &solutions[start];
            let mut moved = vec![0usize; nq * nq];
            for a in 0..nq {
                for b in 0..nq {
                    let v = n.mul(
                        n.mul(base[a * nq + b], h[q.mul(a, b)]),
                        n.mul(n.inv(h[a]), n.inv(aut.apply(k.phi[a], h[b]))),
                    );
                    moved[a * nq + b] = v;
                }
            }
            let j = *index.get(&moved).ok_or_else(|| Error::InconsistentWitness("orbit leaves the solution set".into()))?;
            class[j] = id;
        }
    }
    reps.iter().map(|&i| extension_from_factor_set(k, &solutions[i])).collect()
}

/// Every abstract kernel `Q -> Out(N)`, in order of the homomorphism's
/// element images.
pub fn all_kernels(aut: &Arc<AutData>, q: &Arc<FiniteGroup>) -> Result<Vec<AbstractKernel>> {
    let gens = q.generators();
    let candidates = vec![aut.out.elements().collect::<Vec<_>>(); gens.len()];
    let mut maps = Vec::new();
    search_homomorphisms(q, &aut.out, &gens, &candidates, |m| {
        maps.push(m.to_vec());
        true
    });
    maps.sort();
    maps.dedup();
    maps.iter().map(|m| AbstractKernel::from_out_map(aut.clone(), q.clone(), m)).collect()
}

fn dihedral(n: usize) -> FiniteGroup {
    let r: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let s: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    FiniteGroup::from_permutations(n, &[r, s]).expect("dihedral group").0
}

fn presented(text: &str) -> FiniteGroup {
    todd_coxeter(&Presentation::parse(text).expect("catalog presentation"), DEFAULT_MAX_COSETS)
        .expect("finite catalog group")
        .0
}

/// Named small groups of order at most `max_order` (at most 16), one per
/// isomorphism type up to order 8, and a selection of order 16.
pub fn small_groups(max_order: usize) -> Vec<(String, FiniteGroup)> {
    let c = FiniteGroup::cyclic;
    let x = |a: &FiniteGroup, b: &FiniteGroup| FiniteGroup::direct_product(a, b);
    let mut out: Vec<(String, FiniteGroup)> = vec![
        ("C1".into(), FiniteGroup::trivial()),
        ("C2".into(), c(2)),
        ("C3".into(), c(3)),
        ("C4".into(), c(4)),
        ("C2xC2".into(), x(&c(2), &c(2))),
        ("C5".into(), c(5)),
        ("C6".into(), c(6)),
        ("S3".into(), dihedral(3)),
        ("C7".into(), c(7)),
        ("C8".into(), c(8)),
        ("C4xC2".into(), x(&c(4), &c(2))),
        ("C2xC2xC2".into(), x(&x(&c(2), &c(2)), &c(2))),
        ("D4".into(), dihedral(4)),
        ("Q8".into(), presented("<i,j | i^4, i^2*j^-2, j^-1*i*j*i>")),
    ];
    if max_order >= 16 {
        out.extend([
            ("D8".into(), dihedral(8)),
            ("Q16".into(), presented("<a,b | a^8, a^4*b^-2, b^-1*a*b*a>")),
            ("SD16".into(), presented("<a,b | a^8, b^2, b*a*b^-1*a^-3>")),
            ("M16".into(), presented("<a,b | a^8, b^2, b*a*b^-1*a^-5>")),
            ("C4:C4".into(), presented("<a,b | a^4, b^4, b^-1*a*b*a>")),
            ("D4xC2".into(), x(&dihedral(4), &c(2))),
            ("Q8xC2".into(), x(&presented("<i,j | i^4, i^2*j^-2, j^-1*i*j*i>"), &c(2))),
            ("C2^2:C4".into(), presented("<a,b,c | a^2, b^2, c^4, a*b*a^-1*b^-1, c*a*c^-1*b^-1, c*b*c^-1*a^-1>")),
            ("Pauli".into(), presented("<x,y,z | x^2, y^2, z^4, x*y*x*y*z^-2, x*z*x^-1*z^-1, y*z*y^-1*z^-1>")),
        ]);
    }
    out.retain(|(_, g)| g.order() <= max_order);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{find_isomorphism, order_statistics};

    fn aut(g: FiniteGroup) -> Arc<AutData> {
        Arc::new(AutData::new(&Arc::new(g), DEFAULT_AUT_BOUND).unwrap())
    }

    fn q(n: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n))
    }

    fn inversion_kernel(n: usize) -> AbstractKernel {
        let a = aut(FiniteGroup::cyclic(n));
        let inv: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        let idx = a.index_of(&inv).unwrap();
        AbstractKernel::new(a.clone(), q(2), vec![0, idx]).unwrap()
    }

    fn h2_order(k: &AbstractKernel) -> usize {
        let (_, m) = k.center_module().unwrap();
        let (_, h) = cohomology_group(&m, 2, ResolutionChoice::Bar).unwrap();
        h.structure.order().unwrap().try_into().unwrap()
    }

    #[test]
    fn automorphism_data() {
        let a = aut(FiniteGroup::cyclic(3));
        assert_eq!((a.aut.order(), a.inner.len(), a.out.order()), (2, 1, 2));
        let a = aut(dihedral(3));
        assert_eq!((a.aut.order(), a.out.order()), (6, 1));
        let a = aut(FiniteGroup::trivial());
        assert_eq!((a.aut.order(), a.out.order()), (1, 1));
        assert_eq!(a.out_reps[0], 0);
        let a = aut(dihedral(4));
        assert_eq!((a.aut.order(), a.inner.len(), a.out.order()), (8, 4, 2));
    }

    #[test]
    fn pullbacks() {
        let g = dihedral(3);
        let rotations: Vec<usize> = g.elements().filter(|&x| g.element_order(x) != 2).collect();
        let (qg, proj) = g.quotient(&rotations).unwrap();
        let id: Vec<usize> = qg.elements().collect();
        let pb = pullback(&g, &proj, &qg, &id).unwrap();
        assert!(find_isomorphism(&pb.group, &g).is_some());
        // Over the trivial group the pullback is the direct product.
        let pb = pullback(&g, &[0; 6], &FiniteGroup::cyclic(2), &[0, 0]).unwrap();
        assert_eq!(pb.group.order(), 12);
        let k = inversion_kernel(3);
        let (cm, pbk, _) = kernel_crossed_module(&k).unwrap();
        assert_eq!(pbk.group.order(), 2);
        assert!(cm.report().is_valid());
    }

    #[test]
    fn s3_from_inversion_kernel() {
        let k = inversion_kernel(3);
        assert!(is_extendible(&k).unwrap());
        let e = realize(&k).unwrap();
        assert!(e.induces(&k).unwrap());
        let s3 = presented("<x,y | x^3, y^2, x*y*x*y>");
        assert!(find_isomorphism(&e.e, &s3).is_some());
        let classes = enumerate_extensions(&k, SearchBudget::default()).unwrap();
        assert_eq!(classes.len(), 1);
        assert!(congruent(&classes[0], &e));
    }

    #[test]
    fn c4_by_inversion_gives_dihedral_and_quaternion() {
        let k = inversion_kernel(4);
        let w = extension_witness(&k).unwrap().unwrap();
        let (_, m) = k.center_module().unwrap();
        let (cx, h2) = cohomology_group(&m, 2, ResolutionChoice::Bar).unwrap();
        assert_eq!(h2.structure.order().unwrap(), 2.into());
        let mut stats = BTreeSet::new();
        for rep in std::iter::once(Cochain::zero(&cx, 2)).chain(h2.representatives.iter().cloned()) {
            let e = construct_extension(&k, &w.add(&rep, &m)).unwrap();
            assert!(e.induces(&k).unwrap());
            stats.insert(order_statistics(&e.e));
        }
        assert!(stats.contains(&order_statistics(&dihedral(4))));
        assert!(stats.contains(&order_statistics(&presented("<i,j | i^4, i^2*j^-2, j^-1*i*j*i>"))));
    }

    #[test]
    fn split_kernels() {
        let a = aut(FiniteGroup::cyclic(3));
        let k = AbstractKernel::new(a, q(2), vec![0, 0]).unwrap();
        let (_, m) = k.center_module().unwrap();
        let e = construct_extension(&k, &Cochain::zero(&CochainComplex::bar(&m, 3).unwrap(), 2)).unwrap();
        assert!(e.e.is_abelian());
        assert_eq!(order_statistics(&e.e), order_statistics(&FiniteGroup::cyclic(6)));
    }

    #[test]
    fn c2_by_c2() {
        let a = aut(FiniteGroup::cyclic(2));
        let k = AbstractKernel::new(a, q(2), vec![0, 0]).unwrap();
        let classes = enumerate_extensions(&k, SearchBudget::default()).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes.len(), h2_order(&k));
        assert!(!congruent(&classes[0], &classes[1]));
        let kinds: BTreeSet<bool> = classes.iter().map(|e| find_isomorphism(&e.e, &FiniteGroup::cyclic(4)).is_some()).collect();
        assert_eq!(kinds.len(), 2);
    }

    #[test]
    fn realized_kernels_are_extendible() {
        // S3 and D4 as extensions by their normal cyclic subgroups.
        for (g, sub) in [(dihedral(3), vec![0usize]), (dihedral(4), vec![])] {
            let g = Arc::new(g);
            let rot: Vec<usize> = if sub.is_empty() {
                g.generated_subgroup(&[g.elements().find(|&x| g.element_order(x) == 4).unwrap()])
            } else {
                g.generated_subgroup(&[g.elements().find(|&x| g.element_order(x) == 3).unwrap()])
            };
            let (n, emb) = g.subgroup(&rot).unwrap();
            let (qg, proj) = g.quotient(&rot).unwrap();
            let e = Extension::new(Arc::new(n.clone()), Arc::new(qg), g.clone(), emb, proj).unwrap();
            let k = e.induced_kernel(&aut(n)).unwrap();
            assert!(is_extendible(&k).unwrap());
        }
    }

    #[test]
    fn baer_action_on_c2_by_c2() {
        let a = aut(FiniteGroup::cyclic(2));
        let k = AbstractKernel::new(a, q(2), vec![0, 0]).unwrap();
        let classes = enumerate_extensions(&k, SearchBudget::default()).unwrap();
        let (split, twisted) = if classes[0].e.is_abelian() && find_isomorphism(&classes[0].e, &FiniteGroup::cyclic(4)).is_none() {
            (&classes[0], &classes[1])
        } else {
            (&classes[1], &classes[0])
        };
        let (_, center) = center_kernel(&k).unwrap();
        assert!(congruent(&baer_act(split, split, &center).unwrap(), split));
        let once = baer_act(split, twisted, &center).unwrap();
        assert!(congruent(&once, twisted));
        let twice = baer_act(&once, twisted, &center).unwrap();
        assert!(congruent(&twice, split));
        let (zero, _) = center_extension(&k, &[BigInt::from(0)]).unwrap();
        let (one, _) = center_extension(&k, &[BigInt::from(1)]).unwrap();
        assert!(congruent(&zero, split) && congruent(&one, twisted));
        assert!(center_extension(&k, &[]).is_err());
    }

    #[test]
    fn baer_action_is_faithful_on_d4_kernel() {
        // N = D4, Q = C2 acting by an outer automorphism class.
        let a = aut(dihedral(4));
        let kernels = all_kernels(&a, &q(2)).unwrap();
        for k in kernels {
            let classes = enumerate_extensions(&k, SearchBudget::default()).unwrap();
            assert_eq!(classes.len(), h2_order(&k));
            let (zk, center) = center_kernel(&k).unwrap();
            let zs = enumerate_extensions(&zk, SearchBudget::default()).unwrap();
            let base = &classes[0];
            let acted: Vec<Extension> = zs.iter().map(|z| baer_act(base, z, &center).unwrap()).collect();
            for (i, x) in acted.iter().enumerate() {
                assert!(x.induces(&k).unwrap());
                for y in &acted[i + 1..] {
                    assert!(!congruent(x, y));
                }
            }
        }
    }

    #[test]
    fn congruence_examples() {
        let k = inversion_kernel(3);
        let e = realize(&k).unwrap();
        assert!(congruent(&e, &e));
        let again = realize(&k).unwrap();
        assert!(congruent(&e, &again));
        let a = aut(FiniteGroup::cyclic(2));
        let k = AbstractKernel::new(a, q(2), vec![0, 0]).unwrap();
        let cls = enumerate_extensions(&k, SearchBudget::default()).unwrap();
        assert!(!congruent(&cls[0], &cls[1]));
    }

    #[test]
    fn agreement_on_small_kernels() {
        for (_, ng) in small_groups(6) {
            let a = aut(ng);
            for (_, qg) in small_groups(4) {
                let qg = Arc::new(qg);
                for k in all_kernels(&a, &qg).unwrap() {
                    let ext = is_extendible(&k).unwrap();
                    let classes = enumerate_extensions(&k, SearchBudget::default()).unwrap();
                    assert_eq!(ext, !classes.is_empty());
                    if ext {
                        assert_eq!(classes.len(), h2_order(&k));
                        for e in &classes {
                            assert!(e.induces(&k).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        let a = aut(FiniteGroup::cyclic(3));
        assert!(AbstractKernel::new(a.clone(), q(2), vec![0]).is_err());
        assert!(AbstractKernel::new(a.clone(), q(3), vec![0, 1, 1]).is_err());
        let k = inversion_kernel(3);
        let (_, m) = k.center_module().unwrap();
        let bad = Cochain { degree: 1, values: vec![] };
        assert!(construct_extension(&k, &bad).is_err());
        let _ = m;
    }

    #[test]
    fn catalog_orders() {
        let g = small_groups(16);
        assert_eq!(g.iter().filter(|(_, x)| x.order() <= 8).count(), 14);
        for (name, x) in &g {
            assert!(x.order() == 16 || x.order() <= 8, "{name}");
        }
        let sixteen: Vec<_> = g.iter().filter(|(_, x)| x.order() == 16).collect();
        assert_eq!(sixteen.len(), 9);
        for (i, (na, a)) in sixteen.iter().enumerate() {
            for (nb, b) in &sixteen[i + 1..] {
                assert!(find_isomorphism(a, b).is_none(), "{na} ~ {nb}");
            }
        }
    }
}
