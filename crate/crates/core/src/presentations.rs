//! Presentations `<X | R>`, coset enumeration of the finite quotient, and
//! its Cayley graph.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::words::{parse_word_at, Alphabet, Letter, Word};

pub const DEFAULT_MAX_COSETS: usize = 10_000;

/// Finite presentations used as a shared test corpus.
pub const CORPUS: &[&str] = &[
    "<x,y | x^3, y^2, x*y*x*y>",
    "<x | x>",
    "<x | x^2>",
    "<x | x^3>",
    "<x | x^4>",
    "<x | x^5>",
    "<x | x^6>",
    "<x | x^7>",
    "<x | x^8>",
    "<x,y | x^2, y^2, x*y*x*y>",
    "<x,y | x^2, y^2, x*y*x*y*x*y>",
    "<a,b | a^4, a^2*b^-2, a*b*a*b^-1>",
    "<a,b | a^2, b^4, a*b*a^-1*b^-1>",
    "<x,y | x^2, y^3, x*y*x*y*x*y>",
    "<x,y | x*y*x^-1*y^-2, y*x*y^-1*x^-2>",
    "<x,y | x^3, y^2, x*y*x*y, x^6>",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Arc<Alphabet>,
    names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Arc<Alphabet>, relators: Vec<(String, Word)>) -> Result<Self> {
        let mut names = Vec::new();
        let mut words = Vec::new();
        for (name, w) in relators {
            if w.alphabet() != &alphabet {
                return Err(Error::AlphabetMismatch);
            }
            if w.is_identity() {
                return Err(Error::InvalidPresentation(format!("relator `{name}` reduces to the empty word")));
            }
            if names.contains(&name) {
                return Err(Error::InvalidPresentation(format!("duplicate relator name `{name}`")));
            }
            names.push(name);
            words.push(w);
        }
        Ok(Presentation { alphabet, names, relators: words })
    }

    /// Parses `<x, y | x^3, y^2, x*y*x*y>`. Relators may be named as
    /// `r = x^3`; unnamed relators are called `r1, r2, ...` by position.
    pub fn parse(text: &str) -> Result<Self> {
        let open = text.find('<').ok_or(Error::Syntax { pos: 0, msg: "expected `<`".into() })?;
        if !text[..open].trim().is_empty() {
            return Err(Error::Syntax { pos: 0, msg: "unexpected text before `<`".into() });
        }
        let close = text.rfind('>').ok_or(Error::Syntax { pos: text.len(), msg: "expected `>`".into() })?;
        if !text[close + 1..].trim().is_empty() {
            return Err(Error::Syntax { pos: close + 1, msg: "unexpected text after `>`".into() });
        }
        let body = &text[open + 1..close];
        let bar = body.find('|').ok_or(Error::Syntax { pos: open + 1, msg: "expected `|`".into() })?;
        let gens_text = &body[..bar];
        let gens: Vec<&str> = gens_text.split(',').map(str::trim).collect();
        if gens.iter().any(|g| g.is_empty()) {
            return Err(Error::Syntax { pos: open + 1, msg: "empty generator".into() });
        }
        let alphabet =
            Alphabet::new(&gens).map_err(|e| Error::Syntax { pos: open + 1, msg: e.to_string() })?;
        let rels_text = &body[bar + 1..];
        let rels_offset = open + 1 + bar + 1;
        let mut relators = Vec::new();
        if rels_text.trim().is_empty() {
            return Err(Error::Syntax { pos: rels_offset, msg: "at least one relator expected".into() });
        }
        let mut pos = rels_offset;
        for (i, item) in rels_text.split(',').enumerate() {
            let (name, word_text, word_pos) = match item.split_once('=') {
                Some((n, w)) => {
                    let n = n.trim();
                    if !n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                        || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                    {
                        return Err(Error::Syntax { pos, msg: format!("bad relator name `{n}`") });
                    }
                    (n.to_string(), w, pos + item.find('=').unwrap() + 1)
                }
                None => (format!("r{}", i + 1), item, pos),
            };
            let w = parse_word_at(&alphabet, word_text, word_pos)?;
            relators.push((name, w));
            pos += item.len() + 1;
        }
        Self::new(alphabet, relators)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn relator_names(&self) -> &[String] {
        &self.names
    }

    pub fn relator_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn num_generators(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_relators(&self) -> usize {
        self.relators.len()
    }
}

impl std::fmt::Display for Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<{} | ", self.alphabet.names().join(", "))?;
        for (i, (n, r)) in self.names.iter().zip(&self.relators).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n} = {r}")?;
        }
        write!(f, ">")
    }
}

/// The evaluation map from the free group onto an enumerated quotient.
#[derive(Debug, Clone)]
pub struct WordMap {
    alphabet: Arc<Alphabet>,
    group: Arc<FiniteGroup>,
    images: Vec<usize>,
    words: Vec<Word>,
}

impl WordMap {
    /// Builds the map from generator images; fails unless the images
    /// generate `group`.
    pub fn new(alphabet: Arc<Alphabet>, group: Arc<FiniteGroup>, images: Vec<usize>) -> Result<Self> {
        if images.len() != alphabet.len() || images.iter().any(|&i| i >= group.order()) {
            return Err(Error::InvalidGroup("generator images do not match the alphabet".into()));
        }
        // Breadth-first words for every element, extending on the right.
        let mut words: Vec<Option<Word>> = vec![None; group.order()];
        words[0] = Some(Word::identity(&alphabet));
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for (g, &img) in images.iter().enumerate() {
                for inv in [false, true] {
                    let step = if inv { group.inv(img) } else { img };
                    let b = group.mul(a, step);
                    if words[b].is_none() {
                        let mut letters = words[a].as_ref().unwrap().letters().to_vec();
                        letters.push(Letter::new(g, inv));
                        words[b] = Some(Word::from_letters(&alphabet, letters));
                        queue.push_back(b);
                    }
                }
            }
        }
        let words: Option<Vec<Word>> = words.into_iter().collect();
        let words = words.ok_or_else(|| Error::InvalidGroup("generator images do not generate".into()))?;
        Ok(WordMap { alphabet, group, images, words })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn letter_image(&self, l: Letter) -> usize {
        let g = self.images[l.gen];
        if l.inv {
            self.group.inv(g)
        } else {
            g
        }
    }

    pub fn eval(&self, w: &Word) -> usize {
        debug_assert_eq!(w.alphabet(), &self.alphabet);
        w.letters().iter().fold(0, |acc, &l| self.group.mul(acc, self.letter_image(l)))
    }

    /// A fixed word representing each element (`words()[0]` is empty).
    pub fn words(&self) -> &[Word] {
        &self.words
    }
}

const UNDEF: usize = usize::MAX;

/// HLT coset enumeration over the trivial subgroup.
struct CosetTable {
    cols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    limit: usize,
}

impl CosetTable {
    fn new(gens: usize, limit: usize) -> Self {
        CosetTable { cols: 2 * gens, table: vec![vec![UNDEF; 2 * gens]], parent: vec![0], limit }
    }

    #[inline]
    fn inv_col(x: usize) -> usize {
        x ^ 1
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut k = c;
        while self.parent[k] != r {
            let next = self.parent[k];
            self.parent[k] = r;
            k = next;
        }
        r
    }

    fn live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.table.len() >= self.limit {
            return Err(Error::CosetLimit(self.limit));
        }
        let d = self.table.len();
        self.table.push(vec![UNDEF; self.cols]);
        self.parent.push(d);
        self.table[c][x] = d;
        self.table[d][Self::inv_col(x)] = c;
        Ok(())
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<()> {
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len();
        loop {
            while i < j && self.table[f][w[i]] != UNDEF {
                f = self.table[f][w[i]];
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.table[b][Self::inv_col(w[j - 1])] != UNDEF {
                b = self.table[b][Self::inv_col(w[j - 1])];
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i + 1 {
                self.table[f][w[i]] = b;
                self.table[b][Self::inv_col(w[i])] = f;
                return Ok(());
            } else {
                self.define(f, w[i])?;
            }
        }
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (k1, l1) = (self.rep(k), self.rep(l));
        if k1 == l1 {
            return;
        }
        let (m, t) = (k1.min(l1), k1.max(l1));
        self.parent[t] = m;
        queue.push(t);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == UNDEF {
                    continue;
                }
                let xi = Self::inv_col(x);
                if self.table[f][xi] == e {
                    self.table[f][xi] = UNDEF;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.table[e1][x] != UNDEF {
                    let t = self.table[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][xi] != UNDEF {
                    let t = self.table[f1][xi];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][xi] = e1;
                }
            }
        }
    }

    fn run(&mut self, relators: &[Vec<usize>]) -> Result<()> {
        let mut c = 0;
        while c < self.table.len() {
            if self.live(c) {
                for w in relators {
                    self.scan_and_fill(c, w)?;
                    if !self.live(c) {
                        break;
                    }
                }
                if self.live(c) {
                    for x in 0..self.cols {
                        if self.table[c][x] == UNDEF {
                            self.define(c, x)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    /// Live cosets renumbered breadth-first from coset 0, scanning columns
    /// in order `x1, x1^-1, x2, ...`.
    fn standardize(&mut self) -> Vec<Vec<usize>> {
        let mut number = vec![UNDEF; self.table.len()];
        let mut order = vec![0usize];
        number[0] = 0;
        let mut k = 0;
        while k < order.len() {
            let c = order[k];
            k += 1;
            for x in 0..self.cols {
                let d = self.table[c][x];
                let d = self.rep(d);
                if number[d] == UNDEF {
                    number[d] = order.len();
                    order.push(d);
                }
            }
        }
        let mut out = Vec::with_capacity(order.len());
        for &c in &order {
            let row: Vec<usize> = (0..self.cols)
                .map(|x| {
                    let d = self.table[c][x];
                    number[self.rep(d)]
                })
                .collect();
            out.push(row);
        }
        out
    }
}

/// Enumerates the finite group presented by `p` (at most `max_cosets`
/// cosets defined) and returns it with the evaluation map `F -> Q`.
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Result<(FiniteGroup, WordMap)> {
    let rels: Vec<Vec<usize>> = p
        .relators()
        .iter()
        .map(|r| r.letters().iter().map(|l| 2 * l.gen + usize::from(l.inv)).collect())
        .collect();
    let mut ct = CosetTable::new(p.num_generators(), max_cosets.max(1));
    ct.run(&rels)?;
    let table = ct.standardize();
    let n = table.len();
    // Element i is the coset reached by the spanning-tree word w_i; a*b is
    // coset a followed by the letters of w_b.
    let mut tree: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for x in 0..2 * p.num_generators() {
            let d = table[c][x];
            if !seen[d] {
                seen[d] = true;
                let mut w = tree[c].clone();
                w.push(x);
                tree[d] = w;
                queue.push_back(d);
            }
        }
    }
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        for w in &tree {
            mul.push(w.iter().fold(a, |c, &x| table[c][x]));
        }
    }
    let group = FiniteGroup::from_flat(n, mul)?;
    let images: Vec<usize> = (0..p.num_generators()).map(|g| table[0][2 * g]).collect();
    let wm = WordMap::new(p.alphabet().clone(), Arc::new(group.clone()), images)?;
    for (name, r) in p.relator_names().iter().zip(p.relators()) {
        if wm.eval(r) != 0 {
            return Err(Error::InvalidGroup(format!("relator {name} does not evaluate to the identity")));
        }
    }
    Ok((group, wm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub generator: usize,
}

/// Cayley graph with an edge `y -> x*y` for each generator `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyGraph {
    pub vertices: usize,
    pub generator_names: Vec<String>,
    pub edges: Vec<Edge>,
}

pub fn cayley_graph(q: &FiniteGroup, wm: &WordMap) -> CayleyGraph {
    let mut edges = Vec::with_capacity(q.order() * wm.images().len());
    for y in q.elements() {
        for (g, &x) in wm.images().iter().enumerate() {
            edges.push(Edge { source: y, target: q.mul(x, y), generator: g });
        }
    }
    CayleyGraph { vertices: q.order(), generator_names: wm.alphabet().names().to_vec(), edges }
}

/// Rank of the free fundamental group of a connected graph.
pub fn graph_free_rank(g: &CayleyGraph) -> usize {
    g.edges.len() + 1 - g.vertices
}
