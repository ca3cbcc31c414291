//! Monadic second-order formulas over finite words.
//!
//! Variables are global track ids: each first-order variable (a word
//! position) and each second-order variable (a set of positions) owns one bit
//! track of the alphabet. The core grammar is position comparison, set
//! membership and successor plus negation, conjunction and the two
//! existentials; everything else is derived.

use std::collections::BTreeSet;
use std::fmt;

pub type Track = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WordFormula {
    Bool(bool),
    /// `x < y` on positions.
    Lt(Track, Track),
    /// `x in X`.
    In(Track, Track),
    /// `y = x + 1`.
    Succ(Track, Track),
    Not(Box<WordFormula>),
    And(Box<WordFormula>, Box<WordFormula>),
    ExistsFo(Track, Box<WordFormula>),
    ExistsSo(Track, Box<WordFormula>),
}

impl WordFormula {
    pub fn not(f: WordFormula) -> Self {
        WordFormula::Not(Box::new(f))
    }

    pub fn and(f: WordFormula, g: WordFormula) -> Self {
        WordFormula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: WordFormula, g: WordFormula) -> Self {
        WordFormula::not(WordFormula::and(WordFormula::not(f), WordFormula::not(g)))
    }

    pub fn implies(f: WordFormula, g: WordFormula) -> Self {
        WordFormula::or(WordFormula::not(f), g)
    }

    pub fn iff(f: WordFormula, g: WordFormula) -> Self {
        WordFormula::and(
            WordFormula::implies(f.clone(), g.clone()),
            WordFormula::implies(g, f),
        )
    }

    pub fn exists_fo(x: Track, f: WordFormula) -> Self {
        WordFormula::ExistsFo(x, Box::new(f))
    }

    pub fn exists_so(x: Track, f: WordFormula) -> Self {
        WordFormula::ExistsSo(x, Box::new(f))
    }

    pub fn forall_fo(x: Track, f: WordFormula) -> Self {
        WordFormula::not(WordFormula::exists_fo(x, WordFormula::not(f)))
    }

    pub fn forall_so(x: Track, f: WordFormula) -> Self {
        WordFormula::not(WordFormula::exists_so(x, WordFormula::not(f)))
    }

    pub fn eq(x: Track, y: Track) -> Self {
        WordFormula::and(
            WordFormula::not(WordFormula::Lt(x, y)),
            WordFormula::not(WordFormula::Lt(y, x)),
        )
    }

    pub fn le(x: Track, y: Track) -> Self {
        WordFormula::not(WordFormula::Lt(y, x))
    }

    pub fn and_all(fs: impl IntoIterator<Item = WordFormula>) -> Self {
        let mut it = fs.into_iter();
        match it.next() {
            None => WordFormula::Bool(true),
            Some(first) => it.fold(first, WordFormula::and),
        }
    }

    pub fn or_all(fs: impl IntoIterator<Item = WordFormula>) -> Self {
        let mut it = fs.into_iter();
        match it.next() {
            None => WordFormula::Bool(false),
            Some(first) => it.fold(first, WordFormula::or),
        }
    }

    /// Free first- and second-order tracks.
    pub fn free_tracks(&self) -> (BTreeSet<Track>, BTreeSet<Track>) {
        let mut fo = BTreeSet::new();
        let mut so = BTreeSet::new();
        self.collect_free(&mut fo, &mut so, &mut Vec::new());
        (fo, so)
    }

    fn collect_free(&self, fo: &mut BTreeSet<Track>, so: &mut BTreeSet<Track>, bound: &mut Vec<Track>) {
        match self {
            WordFormula::Bool(_) => {}
            WordFormula::Lt(x, y) | WordFormula::Succ(x, y) => {
                for v in [x, y] {
                    if !bound.contains(v) {
                        fo.insert(*v);
                    }
                }
            }
            WordFormula::In(x, set) => {
                if !bound.contains(x) {
                    fo.insert(*x);
                }
                if !bound.contains(set) {
                    so.insert(*set);
                }
            }
            WordFormula::Not(f) => f.collect_free(fo, so, bound),
            WordFormula::And(f, g) => {
                f.collect_free(fo, so, bound);
                g.collect_free(fo, so, bound);
            }
            WordFormula::ExistsFo(x, f) | WordFormula::ExistsSo(x, f) => {
                bound.push(*x);
                f.collect_free(fo, so, bound);
                bound.pop();
            }
        }
    }
}

impl fmt::Display for WordFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordFormula::Bool(b) => write!(f, "{b}"),
            WordFormula::Lt(x, y) => write!(f, "(< t{x} t{y})"),
            WordFormula::In(x, s) => write!(f, "(in t{x} T{s})"),
            WordFormula::Succ(x, y) => write!(f, "(succ t{x} t{y})"),
            WordFormula::Not(g) => write!(f, "(not {g})"),
            WordFormula::And(g, h) => write!(f, "(and {g} {h})"),
            WordFormula::ExistsFo(x, g) => write!(f, "(ex1 t{x} {g})"),
            WordFormula::ExistsSo(x, g) => write!(f, "(ex2 T{x} {g})"),
        }
    }
}

/// Seeded random sampler over a fixed set of free second-order tracks; used
/// by the engine law suites.
pub fn random_word_formula<R: rand::Rng>(
    rng: &mut R,
    free_so: &[Track],
    max_depth: usize,
    next_track: &mut Track,
) -> WordFormula {
    gen(rng, free_so, &mut Vec::new(), &mut Vec::new(), max_depth, next_track)
}

fn gen<R: rand::Rng>(
    rng: &mut R,
    free_so: &[Track],
    fo: &mut Vec<Track>,
    so: &mut Vec<Track>,
    depth: usize,
    next: &mut Track,
) -> WordFormula {
    let roll: f64 = rng.gen();
    if fo.is_empty() {
        if depth == 0 {
            return WordFormula::Bool(rng.gen_bool(0.5));
        }
        let t = *next;
        *next += 1;
        fo.push(t);
        let body = gen(rng, free_so, fo, so, depth - 1, next);
        fo.pop();
        return if rng.gen_bool(0.5) {
            WordFormula::exists_fo(t, body)
        } else {
            WordFormula::forall_fo(t, body)
        };
    }
    if depth == 0 || roll < 0.45 {
        // Atom.
        let x = fo[rng.gen_range(0..fo.len())];
        let y = fo[rng.gen_range(0..fo.len())];
        let sets: Vec<Track> = free_so.iter().chain(so.iter()).copied().collect();
        return match rng.gen_range(0..3) {
            0 => WordFormula::Lt(x, y),
            1 if !sets.is_empty() => {
                WordFormula::In(x, sets[rng.gen_range(0..sets.len())])
            }
            _ => WordFormula::Succ(x, y),
        };
    }
    if roll < 0.60 {
        return WordFormula::not(gen(rng, free_so, fo, so, depth - 1, next));
    }
    if roll < 0.80 {
        let f = gen(rng, free_so, fo, so, depth - 1, next);
        let g = gen(rng, free_so, fo, so, depth - 1, next);
        return if rng.gen_bool(0.5) {
            WordFormula::and(f, g)
        } else {
            WordFormula::or(f, g)
        };
    }
    let t = *next;
    *next += 1;
    let second_order = rng.gen_bool(0.3);
    if second_order {
        so.push(t);
        let body = gen(rng, free_so, fo, so, depth - 1, next);
        so.pop();
        if rng.gen_bool(0.5) {
            WordFormula::exists_so(t, body)
        } else {
            WordFormula::forall_so(t, body)
        }
    } else {
        fo.push(t);
        let body = gen(rng, free_so, fo, so, depth - 1, next);
        fo.pop();
        if rng.gen_bool(0.5) {
            WordFormula::exists_fo(t, body)
        } else {
            WordFormula::forall_fo(t, body)
        }
    }
}
