//! Free group arithmetic on reduced words.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered, duplicate-free list of generator symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

fn valid_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("no generators".into()));
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !valid_symbol(n) {
                return Err(Error::InvalidAlphabet(format!("bad symbol `{n}`")));
            }
            if out.iter().any(|m| m == n) {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol `{n}`")));
            }
            out.push(n.to_string());
        }
        Ok(Arc::new(Alphabet { names: out }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Exponent sign, `1` or `-1`.
    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word in the free group on an [`Alphabet`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<Letter>,
}

/// Free reduction by a single left-to-right stack pass.
fn reduce_into(stack: &mut Vec<Letter>, letters: impl IntoIterator<Item = Letter>) {
    for l in letters {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
}

impl Word {
    pub fn identity(alphabet: &Arc<Alphabet>) -> Self {
        Word { alphabet: alphabet.clone(), letters: Vec::new() }
    }

    pub fn generator(alphabet: &Arc<Alphabet>, gen: usize) -> Self {
        assert!(gen < alphabet.len(), "generator index out of range");
        Word { alphabet: alphabet.clone(), letters: vec![Letter::new(gen, false)] }
    }

    /// Builds the free reduction of an arbitrary letter sequence.
    pub fn from_letters(alphabet: &Arc<Alphabet>, letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack = Vec::new();
        reduce_into(&mut stack, letters);
        debug_assert!(stack.iter().all(|l| l.gen < alphabet.len()));
        Word { alphabet: alphabet.clone(), letters: stack }
    }

    /// Parses `x*y^-1*x^3`; `1` and `e` denote the empty word.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Self> {
        parse_word_at(alphabet, text, 0)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn check(&self, other: &Word) -> Result<()> {
        if Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        self.check(other)?;
        let mut stack = self.letters.clone();
        reduce_into(&mut stack, other.letters.iter().copied());
        Ok(Word { alphabet: self.alphabet.clone(), letters: stack })
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `g * w * g^-1`, reduced.
    pub fn conjugate(g: &Word, w: &Word) -> Result<Word> {
        g.multiply(w)?.multiply(&g.inverse())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut stack = Vec::new();
        for _ in 0..k.unsigned_abs() {
            reduce_into(&mut stack, base.letters.iter().copied());
        }
        Word { alphabet: self.alphabet.clone(), letters: stack }
    }

    /// True iff no adjacent pair of letters cancels.
    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != p[1].inverse())
    }
}

pub(crate) fn parse_word_at(alphabet: &Arc<Alphabet>, text: &str, offset: usize) -> Result<Word> {
    let trimmed = text.trim();
    if trimmed == "1" || trimmed == "e" || trimmed.is_empty() {
        if trimmed.is_empty() {
            return Err(Error::Syntax { pos: offset, msg: "empty word".into() });
        }
        return Ok(Word::identity(alphabet));
    }
    let mut letters = Vec::new();
    let mut pos = 0usize;
    for factor in text.split('*') {
        let start = pos + (factor.len() - factor.trim_start().len());
        let f = factor.trim();
        pos += factor.len() + 1;
        if f.is_empty() {
            return Err(Error::Syntax { pos: offset + start, msg: "empty factor".into() });
        }
        let (name, exp) = match f.split_once('^') {
            Some((n, e)) => {
                let e = e.trim();
                let exp: i64 = e.parse().map_err(|_| Error::Syntax {
                    pos: offset + start + f.find('^').unwrap_or(0) + 1,
                    msg: format!("bad exponent `{e}`"),
                })?;
                (n.trim(), exp)
            }
            None => (f, 1),
        };
        if !valid_symbol(name) {
            return Err(Error::Syntax { pos: offset + start, msg: format!("bad generator `{name}`") });
        }
        let gen = alphabet.index_of(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let l = Letter::new(gen, exp < 0);
        for _ in 0..exp.unsigned_abs() {
            letters.push(l);
        }
    }
    Ok(Word::from_letters(alphabet, letters))
}

impl fmt::Display for Word {
    /// Syllable form `x^3*y^-1`; the empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * l.sign();
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = self.alphabet.name(l.gen);
            if run == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{run}")?;
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Arc<Alphabet> {
        Alphabet::new(&["x", "y"]).unwrap()
    }

    fn w(a: &Arc<Alphabet>, s: &str) -> Word {
        Word::parse(a, s).unwrap()
    }

    /// Naive reduction: repeatedly scan for a cancelling pair.
    fn scan_reduce(mut v: Vec<Letter>) -> Vec<Letter> {
        loop {
            let hit = v.windows(2).position(|p| p[0] == p[1].inverse());
            match hit {
                Some(i) => {
                    v.drain(i..i + 2);
                }
                None => return v,
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let a = xy();
        assert!(w(&a, "x*x^-1").multiply(&Word::identity(&a)).unwrap().is_identity());
        assert_eq!(w(&a, "x*y").multiply(&w(&a, "y^-1*x")).unwrap(), w(&a, "x^2"));
        let x3 = w(&a, "x^3");
        let prod = x3.multiply(&w(&a, "x^-1")).unwrap();
        let mut raw = x3.letters().to_vec();
        raw.push(Letter::new(0, true));
        assert_eq!(prod.letters(), scan_reduce(raw).as_slice());
        assert_eq!(prod, w(&a, "x^2"));
    }

    #[test]
    fn conjugate_examples() {
        let a = xy();
        let y2 = w(&a, "y^2");
        assert_eq!(Word::conjugate(&Word::identity(&a), &y2).unwrap(), y2);
        assert_eq!(Word::conjugate(&w(&a, "y"), &y2).unwrap(), y2);
        let g = w(&a, "x^-1*y");
        let r = w(&a, "x^3");
        let c = Word::conjugate(&g, &r).unwrap();
        let mut raw = g.letters().to_vec();
        raw.extend_from_slice(r.letters());
        raw.extend(g.inverse().letters().iter().copied());
        assert_eq!(c.letters(), scan_reduce(raw).as_slice());
        assert_eq!(c.to_string(), "x^-1*y*x^3*y^-1*x");
    }

    #[test]
    fn alphabet_mismatch() {
        let a = xy();
        let b = Alphabet::new(&["x", "t"]).unwrap();
        assert_eq!(w(&a, "x").multiply(&w(&b, "x")), Err(Error::AlphabetMismatch));
        assert!(Word::conjugate(&w(&a, "x"), &w(&b, "t")).is_err());
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new::<&str>(&[]).is_err());
        assert!(Alphabet::new(&["x", "x"]).is_err());
        assert!(Alphabet::new(&["1x"]).is_err());
        assert!(Alphabet::new(&["a1", "b"]).is_ok());
    }

    #[test]
    fn parse_and_display() {
        let a = Alphabet::new(&["x", "t"]).unwrap();
        assert_eq!(w(&a, "x^-1*t").to_string(), "x^-1*t");
        assert_eq!(w(&a, "x*x*x").to_string(), "x^3");
        assert_eq!(w(&a, "1").to_string(), "1");
        assert!(matches!(Word::parse(&a, "x*q"), Err(Error::UnknownGenerator(_))));
        assert!(matches!(Word::parse(&a, "x**t"), Err(Error::Syntax { .. })));
        assert!(matches!(Word::parse(&a, "x^a"), Err(Error::Syntax { .. })));
    }

    fn all_words(a: &Arc<Alphabet>, max_len: usize) -> Vec<Vec<Letter>> {
        let letters: Vec<Letter> =
            (0..a.len()).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect();
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &letters {
                    let mut v: Vec<Letter> = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn inverse_cancels_exhaustive() {
        let a = xy();
        for raw in all_words(&a, 8) {
            let w = Word::from_letters(&a, raw.clone());
            assert!(w.is_reduced());
            assert_eq!(w.letters(), scan_reduce(raw).as_slice());
            assert!(w.multiply(&w.inverse()).unwrap().is_identity());
            assert!(w.inverse().multiply(&w).unwrap().is_identity());
            let e = Word::identity(&a);
            assert_eq!(w.multiply(&e).unwrap(), w);
            assert_eq!(e.multiply(&w).unwrap(), w);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word() -> impl Strategy<Value = Vec<(usize, bool)>> {
            prop::collection::vec((0usize..2, any::<bool>()), 0..12)
        }

        fn build(a: &Arc<Alphabet>, v: Vec<(usize, bool)>) -> Word {
            Word::from_letters(a, v.into_iter().map(|(g, i)| Letter::new(g, i)))
        }

        proptest! {
            #[test]
            fn associative(p in word(), q in word(), r in word()) {
                let a = xy();
                let (p, q, r) = (build(&a, p), build(&a, q), build(&a, r));
                let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
                let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
                prop_assert!(left.is_reduced());
                prop_assert_eq!(left, right);
            }

            #[test]
            fn conjugation_is_an_action(g in word(), h in word(), x in word()) {
                let a = xy();
                let (g, h, x) = (build(&a, g), build(&a, h), build(&a, x));
                let lhs = Word::conjugate(&g, &Word::conjugate(&h, &x).unwrap()).unwrap();
                let rhs = Word::conjugate(&g.multiply(&h).unwrap(), &x).unwrap();
                prop_assert!(lhs.is_reduced());
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
