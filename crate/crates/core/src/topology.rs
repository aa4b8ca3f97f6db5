//! Cellular chains of the universal cover of the presentation complex,
//! its homology, and DOT export of Cayley graphs.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::grouprings::{fox_boundaries, zq_matrix_to_int};
use crate::linalg::{cokernel_structure, smith_normal_form, AbelianGroupStructure, IntMatrix};
use crate::presentations::{CayleyGraph, Presentation, WordMap};

/// `C2 -> C1 -> C0` with `C2 = Z^{|Q||R|}`, `C1 = Z^{|Q||X|}`, `C0 = Z^{|Q|}`.
/// Boundaries act on column vectors.
#[derive(Debug, Clone)]
pub struct CoverChainComplex {
    pub d2: IntMatrix,
    pub d1: IntMatrix,
    ranks: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub h0: AbelianGroupStructure,
    pub h1: AbelianGroupStructure,
    pub h2: AbelianGroupStructure,
    pub chi: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomologyJson {
    pub schema_version: u32,
    pub chi: i64,
    pub h0: AbelianGroupStructure,
    pub h1: AbelianGroupStructure,
    pub h2: AbelianGroupStructure,
}

impl HomologyReport {
    pub fn to_json(&self) -> HomologyJson {
        HomologyJson { schema_version: 1, chi: self.chi, h0: self.h0.clone(), h1: self.h1.clone(), h2: self.h2.clone() }
    }
}

pub fn cover_complex(p: &Presentation, wm: &WordMap) -> CoverChainComplex {
    let n = wm.group().order();
    let (d2, d1) = fox_boundaries(p, wm);
    let ranks = [n, n * p.num_generators(), n * p.num_relators()];
    let mut d2 = zq_matrix_to_int(&d2);
    let mut d1 = zq_matrix_to_int(&d1);
    // Empty relator or generator sets still need the right shapes.
    if d2.rows() != ranks[1] || d2.cols() != ranks[2] {
        d2 = IntMatrix::zeros(ranks[1], ranks[2]);
    }
    if d1.rows() != ranks[0] || d1.cols() != ranks[1] {
        d1 = IntMatrix::zeros(ranks[0], ranks[1]);
    }
    CoverChainComplex { d2, d1, ranks }
}

impl CoverChainComplex {
    /// `(rank C0, rank C1, rank C2)`.
    pub fn ranks(&self) -> (usize, usize, usize) {
        (self.ranks[0], self.ranks[1], self.ranks[2])
    }

    pub fn is_complex(&self) -> bool {
        self.ranks[1] == 0 || self.ranks[0] == 0 || self.ranks[2] == 0 || self.d1.mul(&self.d2).is_zero()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks[0] as i64 - self.ranks[1] as i64 + self.ranks[2] as i64
    }
}

fn rank_and_divisors(a: &IntMatrix) -> (usize, AbelianGroupStructure) {
    if a.rows() == 0 || a.cols() == 0 {
        return (0, AbelianGroupStructure::trivial());
    }
    let d = smith_normal_form(a).diagonal();
    let rank = d.iter().filter(|x| !x.is_zero()).count();
    let torsion = d.iter().map(|x| BigInt::from(x.magnitude().clone())).filter(|x| *x > BigInt::one()).collect();
    (rank, AbelianGroupStructure { free_rank: 0, torsion })
}

/// `ker A / im B` for `A B = 0`, with `A: Z^n -> Z^m` and `B` landing in `Z^n`.
fn homology(n: usize, a: &IntMatrix, b: &IntMatrix) -> AbelianGroupStructure {
    let (rank_a, _) = rank_and_divisors(a);
    let (rank_b, tors) = rank_and_divisors(b);
    AbelianGroupStructure { free_rank: n - rank_a - rank_b, torsion: tors.torsion }
}

pub fn cover_homology(c: &CoverChainComplex) -> HomologyReport {
    let [r0, r1, r2] = c.ranks;
    let h0 = if r1 == 0 { AbelianGroupStructure::free(r0) } else { cokernel_structure(&c.d1) };
    let h1 = homology(r1, &c.d1, &c.d2);
    let h2 = homology(r2, &c.d2, &IntMatrix::zeros(r2, 0));
    HomologyReport { h0, h1, h2, chi: c.euler_characteristic() }
}

/// DOT digraph with nodes in element order and one labelled edge per
/// generator and vertex, LF line endings.
pub fn export_dot(g: &CayleyGraph) -> String {
    let mut out = String::from("digraph cayley {\n");
    for v in 0..g.vertices {
        writeln!(out, "  {v};").unwrap();
    }
    let mut edges = g.edges.clone();
    edges.sort_by_key(|e| (e.source, e.generator, e.target));
    for e in &edges {
        writeln!(out, "  {} -> {} [label=\"{}\"];", e.source, e.target, g.generator_names[e.generator]).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{cayley_graph, todd_coxeter, CORPUS, DEFAULT_MAX_COSETS};

    fn cover(text: &str) -> (CoverChainComplex, HomologyReport) {
        let p = Presentation::parse(text).unwrap();
        let (_, wm) = todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap();
        let c = cover_complex(&p, &wm);
        let h = cover_homology(&c);
        (c, h)
    }

    #[test]
    fn s3_cover() {
        let (c, h) = cover("<x,y | x^3, y^2, x*y*x*y>");
        assert_eq!(c.ranks(), (6, 12, 18));
        assert!(c.is_complex());
        assert_eq!(h.h2, AbelianGroupStructure::free(11));
        assert!(h.h1.is_trivial());
        assert_eq!(h.h0, AbelianGroupStructure::free(1));
        assert_eq!(h.chi, 12);
    }

    #[test]
    fn small_covers() {
        let (c, h) = cover("<x | x^2>");
        assert_eq!(c.ranks(), (2, 2, 2));
        assert_eq!((h.h2.clone(), h.chi), (AbelianGroupStructure::free(1), 2));
        let (c, h) = cover("<x | x>");
        assert_eq!(c.ranks(), (1, 1, 1));
        assert!(h.h2.is_trivial() && h.h1.is_trivial());
        assert_eq!(h.chi, 1);
    }

    #[test]
    fn euler_count() {
        for &text in CORPUS {
            let (c, h) = cover(text);
            assert!(c.is_complex(), "{text}");
            assert!(h.h1.is_trivial(), "{text}");
            assert_eq!(h.chi, 1 + h.h2.free_rank as i64, "{text}");
            assert!(h.h2.torsion.is_empty());
        }
    }

    #[test]
    fn dot_output() {
        let dot = |text: &str| {
            let p = Presentation::parse(text).unwrap();
            let (q, wm) = todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap();
            export_dot(&cayley_graph(&q, &wm))
        };
        assert_eq!(dot("<x | x>"), "digraph cayley {\n  0;\n  0 -> 0 [label=\"x\"];\n}\n");
        assert_eq!(
            dot("<x | x^3>"),
            "digraph cayley {\n  0;\n  1;\n  2;\n  0 -> 1 [label=\"x\"];\n  1 -> 2 [label=\"x\"];\n  2 -> 0 [label=\"x\"];\n}\n"
        );
        let s3 = dot("<x,y | x^3, y^2, x*y*x*y>");
        assert_eq!(s3.lines().filter(|l| l.contains("->")).count(), 12);
        assert_eq!(s3.lines().filter(|l| l.contains("label=\"x\"")).count(), 6);
        assert!(!s3.contains('\r'));
        assert_eq!(s3, dot("<x,y | x^3, y^2, x*y*x*y>"));
    }
}
