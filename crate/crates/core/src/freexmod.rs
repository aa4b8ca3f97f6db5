//! The free crossed module `C_R -> F` on a presentation with finite
//! quotient `Q`, and its module of identities `pi = ker d`.
//!
//! Elements of `C_R` are kept as products of conjugated relators. Two
//! products are equal in `C_R` exactly when their boundaries agree in `F`
//! and their images in `C_R^ab = ZQ[R]` agree, since `pi` injects into
//! `ZQ[R]`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::cohomology::{Cochain, CohomologyClass};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::grouprings::{fox_boundaries, fox_derivative, zq_matrix_to_int, GroupRingElement, QModule};
use crate::linalg::{image_basis, kernel_basis, solve_with, AbelianGroupStructure, IntMatrix, Snf, Track};
use crate::presentations::{todd_coxeter, Presentation, WordMap};
use crate::words::Word;

/// A presentation together with its enumerated quotient.
#[derive(Debug)]
pub struct FreeCrossedModule {
    presentation: Presentation,
    word_map: WordMap,
    /// Z-expansion of `d2: ZQ[R] -> ZQ[X]`.
    d2: IntMatrix,
}

/// `^conjugator relator^sign`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub conjugator: Word,
    pub relator: usize,
    pub sign: i8,
}

#[derive(Debug, Clone)]
pub struct FreeCrossedElement {
    context: Arc<FreeCrossedModule>,
    factors: Vec<Factor>,
    boundary: Word,
    /// Coordinates in `ZQ[R]`: `h * e_r` at `r * |Q| + h`.
    abelianization: Vec<i64>,
}

impl FreeCrossedModule {
    pub fn new(presentation: Presentation, max_cosets: usize) -> Result<Arc<Self>> {
        let (_, wm) = todd_coxeter(&presentation, max_cosets)?;
        Self::from_parts(presentation, wm)
    }

    pub fn from_parts(presentation: Presentation, word_map: WordMap) -> Result<Arc<Self>> {
        if presentation.alphabet() != word_map.alphabet() {
            return Err(Error::AlphabetMismatch);
        }
        let (d2, _) = fox_boundaries(&presentation, &word_map);
        let d2 = zq_matrix_to_int(&d2);
        Ok(Arc::new(FreeCrossedModule { presentation, word_map, d2 }))
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn word_map(&self) -> &WordMap {
        &self.word_map
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.word_map.group()
    }

    /// Z-expansion of `d2`, acting on `ZQ[R]` coordinates.
    pub fn expanded_d2(&self) -> &IntMatrix {
        &self.d2
    }

    pub fn empty(self: &Arc<Self>) -> FreeCrossedElement {
        FreeCrossedElement {
            context: self.clone(),
            factors: Vec::new(),
            boundary: Word::identity(self.presentation.alphabet()),
            abelianization: vec![0; self.group().order() * self.presentation.num_relators()],
        }
    }

    pub fn factor(self: &Arc<Self>, conjugator: &Word, relator: usize, sign: i8) -> Result<FreeCrossedElement> {
        if conjugator.alphabet() != self.presentation.alphabet() {
            return Err(Error::PresentationMismatch);
        }
        if relator >= self.presentation.num_relators() || !(sign == 1 || sign == -1) {
            return Err(Error::InvalidPresentation(format!("no relator factor ({relator}, {sign})")));
        }
        let r = self.presentation.relators()[relator].pow(i64::from(sign));
        let boundary = Word::conjugate(conjugator, &r)?;
        let mut e = self.empty();
        e.abelianization[relator * self.group().order() + self.word_map.eval(conjugator)] += i64::from(sign);
        e.factors.push(Factor { conjugator: conjugator.clone(), relator, sign });
        e.boundary = boundary;
        Ok(e)
    }

    /// Product of `[conjugator, relator name, sign]` triples.
    pub fn element_from_triples<S: AsRef<str>>(self: &Arc<Self>, triples: &[(S, S, i64)]) -> Result<FreeCrossedElement> {
        let mut e = self.empty();
        for (w, name, sign) in triples {
            let w = Word::parse(self.presentation.alphabet(), w.as_ref())?;
            let r = self
                .presentation
                .relator_index(name.as_ref())
                .ok_or_else(|| Error::UnknownGenerator(name.as_ref().to_string()))?;
            let sign = i8::try_from(*sign).map_err(|_| Error::InvalidPresentation("sign must be 1 or -1".into()))?;
            e = fc_multiply(&e, &self.factor(&w, r, sign)?)?;
        }
        Ok(e)
    }
}

impl FreeCrossedElement {
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Value of the boundary in `F`.
    pub fn boundary(&self) -> &Word {
        &self.boundary
    }

    pub fn abelianization(&self) -> &[i64] {
        &self.abelianization
    }

    /// The abelianization as one `ZQ` element per relator.
    pub fn abelianization_ring(&self) -> Vec<GroupRingElement> {
        let q = self.context.group();
        let n = q.order();
        self.abelianization
            .chunks(n)
            .map(|c| GroupRingElement::from_terms(q, c.iter().enumerate().map(|(h, &v)| (h, v))))
            .collect()
    }

    pub fn context(&self) -> &Arc<FreeCrossedModule> {
        &self.context
    }
}

fn same_context(a: &FreeCrossedElement, b: &FreeCrossedElement) -> Result<()> {
    if Arc::ptr_eq(&a.context, &b.context) {
        Ok(())
    } else {
        Err(Error::PresentationMismatch)
    }
}

pub fn fc_multiply(a: &FreeCrossedElement, b: &FreeCrossedElement) -> Result<FreeCrossedElement> {
    same_context(a, b)?;
    let mut factors = a.factors.clone();
    factors.extend(b.factors.iter().cloned());
    Ok(FreeCrossedElement {
        context: a.context.clone(),
        factors,
        boundary: a.boundary.multiply(&b.boundary)?,
        abelianization: a.abelianization.iter().zip(&b.abelianization).map(|(x, y)| x + y).collect(),
    })
}

pub fn fc_invert(a: &FreeCrossedElement) -> FreeCrossedElement {
    FreeCrossedElement {
        context: a.context.clone(),
        factors: a
            .factors
            .iter()
            .rev()
            .map(|f| Factor { conjugator: f.conjugator.clone(), relator: f.relator, sign: -f.sign })
            .collect(),
        boundary: a.boundary.inverse(),
        abelianization: a.abelianization.iter().map(|x| -x).collect(),
    }
}

/// `^g a` for `g` in `F`.
pub fn fc_act(g: &Word, a: &FreeCrossedElement) -> Result<FreeCrossedElement> {
    let ctx = &a.context;
    if g.alphabet() != ctx.presentation.alphabet() {
        return Err(Error::PresentationMismatch);
    }
    let factors = a
        .factors
        .iter()
        .map(|f| Ok(Factor { conjugator: g.multiply(&f.conjugator)?, relator: f.relator, sign: f.sign }))
        .collect::<Result<Vec<_>>>()?;
    let q = ctx.group();
    let n = q.order();
    let gq = ctx.word_map.eval(g);
    let mut ab = vec![0; a.abelianization.len()];
    for (idx, &v) in a.abelianization.iter().enumerate() {
        ab[(idx / n) * n + q.mul(gq, idx % n)] += v;
    }
    Ok(FreeCrossedElement {
        context: ctx.clone(),
        factors,
        boundary: Word::conjugate(g, &a.boundary)?,
        abelianization: ab,
    })
}

/// Equality in `C_R`.
pub fn fc_equal(a: &FreeCrossedElement, b: &FreeCrossedElement) -> Result<bool> {
    same_context(a, b)?;
    Ok(a.boundary == b.boundary && a.abelianization == b.abelianization)
}

/// Whether the boundary is trivial in `F`.
pub fn verify_identity(e: &FreeCrossedElement) -> bool {
    e.boundary.is_identity()
}

/// The Peiffer element `x y x^-1 (^(d x) y)^-1`.
pub fn peiffer_element(x: &FreeCrossedElement, y: &FreeCrossedElement) -> Result<FreeCrossedElement> {
    let xyx = fc_multiply(&fc_multiply(x, y)?, &fc_invert(x))?;
    fc_multiply(&xyx, &fc_invert(&fc_act(x.boundary(), y)?))
}

/// `pi = ker d2` inside `ZQ[R]`, with a fixed Z-basis.
#[derive(Debug, Clone)]
pub struct IdentityModule {
    context: Arc<FreeCrossedModule>,
    ambient_rank: usize,
    basis: Vec<Vec<BigInt>>,
    structure: AbelianGroupStructure,
    basis_snf: Snf,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityModuleJson {
    pub schema_version: u32,
    pub rank: usize,
    pub torsion: Vec<u64>,
    pub kernel_basis: Vec<Vec<i64>>,
}

pub fn identity_module(ctx: &Arc<FreeCrossedModule>) -> Result<IdentityModule> {
    let d2 = ctx.expanded_d2();
    let ambient_rank = d2.cols();
    let kernel = kernel_basis(d2);
    let basis = if kernel.is_empty() { kernel } else { image_basis(&IntMatrix::from_columns(ambient_rank, &kernel)) };
    let basis_snf = Snf::compute(&IntMatrix::from_columns(ambient_rank, &basis), Track { u: true, v: true, ..Track::default() });
    let structure = AbelianGroupStructure::free(basis.len());
    Ok(IdentityModule { context: ctx.clone(), ambient_rank, basis, structure, basis_snf })
}

impl IdentityModule {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn structure(&self) -> &AbelianGroupStructure {
        &self.structure
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Coordinates of a vector of `ker d2` in the basis.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_with(&self.basis_snf, v)
    }

    /// `pi` as a `Q`-module (left multiplication on `ZQ[R]`).
    pub fn module(&self) -> Result<QModule> {
        let q = self.context.group();
        let n = q.order();
        let k = self.rank();
        let action = q
            .elements()
            .map(|g| {
                let mut m = vec![vec![0i64; k]; k];
                for (j, b) in self.basis.iter().enumerate() {
                    let mut moved = vec![BigInt::zero(); b.len()];
                    for (idx, x) in b.iter().enumerate() {
                        moved[(idx / n) * n + q.mul(g, idx % n)] += x;
                    }
                    let c = self.coordinates(&moved).expect("pi is a submodule");
                    for i in 0..k {
                        m[i][j] = c[i].to_i64().expect("action entry exceeds i64");
                    }
                }
                m
            })
            .collect();
        QModule::new(q.clone(), vec![0; k], action)
    }

    pub fn to_json(&self) -> IdentityModuleJson {
        IdentityModuleJson {
            schema_version: 1,
            rank: self.structure.free_rank,
            torsion: self.structure.torsion_u64(),
            kernel_basis: self
                .basis
                .iter()
                .map(|b| b.iter().map(|x| x.to_i64().expect("basis entry exceeds i64")).collect())
                .collect(),
        }
    }
}

/// Coordinates of an identity in the basis of `pi`; zero exactly when the
/// identity is trivial in `C_R`.
pub fn identity_class(e: &FreeCrossedElement, m: &IdentityModule) -> Result<Vec<BigInt>> {
    if !Arc::ptr_eq(e.context(), &m.context) {
        return Err(Error::PresentationMismatch);
    }
    if !verify_identity(e) {
        return Err(Error::NotAnIdentity(e.boundary().to_string()));
    }
    let v: Vec<BigInt> = e.abelianization.iter().map(|&x| BigInt::from(x)).collect();
    m.coordinates(&v).ok_or_else(|| Error::InconsistentWitness("abelianized identity is not in ker d2".into()))
}

/// Fox vector of a word in `ZQ[X]` coordinates (`h * e_x` at `x * |Q| + h`).
fn fox_vector(w: &Word, wm: &WordMap) -> Vec<BigInt> {
    let n = wm.group().order();
    let nx = w.alphabet().len();
    let mut v = vec![BigInt::zero(); n * nx];
    for x in 0..nx {
        for (u, c) in fox_derivative(w, x).terms() {
            v[x * n + wm.eval(&u)] += c;
        }
    }
    v
}

/// The `k`-invariant of the crossed 2-fold extension
/// `pi >-> C_R -> F ->> Q` as a normalized bar 3-cocycle with values in
/// `pi`.
///
/// A chain map from the normalized bar resolution to
/// `ZQ[R] -> ZQ[X] -> ZQ` is built degreewise: `f1[g]` is the Fox vector of
/// the chosen word for `g`, and `f2[g|h]` is an integer lift through `d2`
/// of `g f1[h] - f1[gh] + f1[g]`. The cocycle is `f2` composed with the bar
/// boundary, which lands in `ker d2 = pi`.
pub fn k_invariant(m: &IdentityModule) -> Result<CohomologyClass> {
    let ctx = &m.context;
    let wm = ctx.word_map();
    let q = ctx.group();
    let n = q.order();
    let module = m.module()?;
    let f1: Vec<Vec<BigInt>> = q.elements().map(|g| fox_vector(&wm.words()[g], wm)).collect();
    let left = |g: usize, v: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); v.len()];
        for (idx, x) in v.iter().enumerate() {
            out[(idx / n) * n + q.mul(g, idx % n)] += x;
        }
        out
    };
    let d2_snf = Snf::compute(ctx.expanded_d2(), Track { u: true, v: true, ..Track::default() });
    let ambient = m.ambient_rank();
    let mut f2 = vec![vec![BigInt::zero(); ambient]; n * n];
    for g in 1..n {
        for h in 1..n {
            let mut t = left(g, &f1[h]);
            for (a, (b, c)) in t.iter_mut().zip(f1[q.mul(g, h)].iter().zip(&f1[g])) {
                *a += c - b;
            }
            f2[g * n + h] = solve_with(&d2_snf, &t)
                .ok_or_else(|| Error::InconsistentWitness("Fox complex is not exact at ZQ[X]".into()))?;
        }
    }
    let f = |g: usize, h: usize| &f2[g * n + h];
    let mut failure = None;
    let rep = Cochain::from_bar_fn(q, &module, 3, |t| {
        let (a, b, c) = (t[0], t[1], t[2]);
        let mut z = left(a, f(b, c));
        for (k, x) in z.iter_mut().enumerate() {
            *x += &f(a, q.mul(b, c))[k] - &f(q.mul(a, b), c)[k] - &f(a, b)[k];
        }
        match m.coordinates(&z) {
            Some(coords) => coords.iter().map(|x| x.to_i64().expect("cocycle value exceeds i64")).collect(),
            None => {
                failure = Some(Error::InconsistentWitness("3-cocycle value outside pi".into()));
                vec![0; module.rank()]
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(CohomologyClass { degree: 3, module, representative: rep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::DEFAULT_MAX_COSETS;

    const S3: &str = "<x,y | r = x^3, s = y^2, t = x*y*x*y>";

    fn ctx(text: &str) -> Arc<FreeCrossedModule> {
        FreeCrossedModule::new(Presentation::parse(text).unwrap(), DEFAULT_MAX_COSETS).unwrap()
    }

    fn word(c: &Arc<FreeCrossedModule>, w: &str) -> Word {
        Word::parse(c.presentation().alphabet(), w).unwrap()
    }

    fn identity3(c: &Arc<FreeCrossedModule>) -> FreeCrossedElement {
        c.element_from_triples(&[
            ("1", "t", 1),
            ("1", "s", -1),
            ("x^-1", "t", 1),
            ("x^-1", "s", -1),
            ("x^-1*y", "r", -1),
            ("x^-2", "t", 1),
            ("x^-2", "s", -1),
            ("1", "r", -1),
        ])
        .unwrap()
    }

    #[test]
    fn basic_operations() {
        let c = ctx(S3);
        let r = c.factor(&word(&c, "1"), 0, 1).unwrap();
        let e = fc_multiply(&r, &fc_invert(&r)).unwrap();
        assert!(e.boundary().is_identity());
        assert!(e.abelianization().iter().all(|&x| x == 0));
        assert!(verify_identity(&e));
        assert!(!verify_identity(&r));
        assert!(fc_equal(&fc_act(&word(&c, "1"), &r).unwrap(), &r).unwrap());
        let yr = fc_act(&word(&c, "y"), &r).unwrap();
        assert_eq!(yr.factors()[0].conjugator, word(&c, "y"));
        assert_eq!(yr.boundary(), &word(&c, "y*x^3*y^-1"));
    }

    #[test]
    fn equality_examples() {
        let c = ctx(S3);
        let x = c.factor(&word(&c, "x"), 0, 1).unwrap();
        let y = c.factor(&word(&c, "y^-1"), 2, -1).unwrap();
        let p = peiffer_element(&x, &y).unwrap();
        assert!(fc_equal(&p, &c.empty()).unwrap());
        let r = c.factor(&word(&c, "1"), 0, 1).unwrap();
        let s = c.factor(&word(&c, "1"), 1, 1).unwrap();
        assert!(!fc_equal(&r, &s).unwrap());
        let ys = fc_act(&word(&c, "y"), &s).unwrap();
        assert_eq!(ys.boundary(), s.boundary());
        assert!(!fc_equal(&ys, &s).unwrap());
        let other = ctx(S3);
        assert_eq!(fc_equal(&r, &other.factor(&word(&other, "1"), 0, 1).unwrap()), Err(Error::PresentationMismatch));
    }

    #[test]
    fn identity_three_is_nontrivial() {
        let c = ctx(S3);
        let e = identity3(&c);
        assert!(verify_identity(&e), "boundary {}", e.boundary());
        let m = identity_module(&c).unwrap();
        assert_eq!(m.rank(), 11);
        assert!(identity_class(&e, &m).unwrap().iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn cyclic_identities() {
        for n in 2..=8 {
            let c = ctx(&format!("<x | r = x^{n}>"));
            let m = identity_module(&c).unwrap();
            assert_eq!(m.rank(), n - 1);
            let r = c.factor(&word(&c, "1"), 0, 1).unwrap();
            let i1 = fc_multiply(&fc_act(&word(&c, "x"), &r).unwrap(), &fc_invert(&r)).unwrap();
            assert!(identity_class(&i1, &m).unwrap().iter().any(|x| !x.is_zero()));
            let mut prod = c.empty();
            let mut ik = i1.clone();
            for _ in 0..n {
                prod = fc_multiply(&prod, &ik).unwrap();
                ik = fc_act(&word(&c, "x"), &ik).unwrap();
            }
            assert!(verify_identity(&prod));
            assert!(identity_class(&prod, &m).unwrap().iter().all(|x| x.is_zero()));
        }
        let c = ctx("<x | x>");
        assert_eq!(identity_module(&c).unwrap().rank(), 0);
    }

    #[test]
    fn identities_lie_in_kernel_and_transform() {
        let c = ctx(S3);
        let m = identity_module(&c).unwrap();
        let pi = m.module().unwrap();
        let e = identity3(&c);
        let d2 = c.expanded_d2();
        let v: Vec<BigInt> = e.abelianization().iter().map(|&x| BigInt::from(x)).collect();
        assert!(d2.mul_vec(&v).iter().all(|x| x.is_zero()));
        let base: Vec<i64> = identity_class(&e, &m).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
        for g in ["x", "y", "x*y^-1", "y*x*y"] {
            let w = word(&c, g);
            let moved = fc_act(&w, &e).unwrap();
            assert!(verify_identity(&moved));
            let got: Vec<i64> = identity_class(&moved, &m).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
            assert_eq!(got, pi.act(c.word_map().eval(&w), &base));
        }
    }

    #[test]
    fn cyclic_k_invariant_is_nonzero() {
        for n in 2..=4 {
            let c = ctx(&format!("<x | r = x^{n}>"));
            let m = identity_module(&c).unwrap();
            let k = k_invariant(&m).unwrap();
            let cx = crate::cohomology::CochainComplex::bar(&k.module, 4).unwrap();
            assert!(cx.is_cocycle(&k.representative).unwrap());
            assert!(!k.is_zero().unwrap(), "n = {n}");
        }
    }

    #[test]
    fn s3_k_invariant_restrictions() {
        let c = ctx(S3);
        let m = identity_module(&c).unwrap();
        let k = k_invariant(&m).unwrap();
        let q = c.group();
        let mut nonzero = Vec::new();
        for g in ["x", "y"] {
            let gq = c.word_map().eval(&word(&c, g));
            let (sub, emb) = q.subgroup(&q.generated_subgroup(&[gq])).unwrap();
            let r = k.restrict(&Arc::new(sub), &emb);
            if !r.is_zero().unwrap() {
                nonzero.push(g);
            }
        }
        assert!(!nonzero.is_empty());
    }

    /// Pushing the invariant along `pi = I C_n -> C_n`, `x^k - 1 -> k`,
    /// gives a generator of `H^3(C_n, Z/n)`.
    #[test]
    fn cyclic_k_invariant_maps_to_generator() {
        for n in 2..=5usize {
            let c = ctx(&format!("<x | r = x^{n}>"));
            let m = identity_module(&c).unwrap();
            let k = k_invariant(&m).unwrap();
            let q = c.group();
            let x = c.word_map().images()[0];
            let exponent: Vec<i64> = q.elements().map(|h| (0..n).find(|&e| q.pow(x, e as i64) == h).unwrap() as i64).collect();
            let target = QModule::trivial(q, vec![n as u64]).unwrap();
            let pushed = Cochain::from_bar_fn(q, &target, 3, |t| {
                let coords = k.representative.bar_value(q, &k.module, t);
                let mut total = 0i64;
                for (b, &cf) in m.basis().iter().zip(&coords) {
                    for (h, v) in b.iter().enumerate() {
                        total += cf * v.to_i64().unwrap() * exponent[h];
                    }
                }
                vec![total]
            });
            let class = CohomologyClass { degree: 3, module: target, representative: pushed };
            assert_eq!(class.order().unwrap(), Some(n as u64), "n = {n}");
        }
    }
}
