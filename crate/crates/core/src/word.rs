//! Words over a generator alphabet and finite presentations.
//!
//! A word `x₁x₂…x_k` denotes the composition `x₁∘x₂∘…∘x_k`: it acts right to
//! left, so `x_k` is applied first. Words are kept freely reduced in syllable
//! form (`(generator, exponent)` runs with nonzero exponents and distinct
//! neighbours).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

/// Known generator orders; `None` means infinite or unknown.
pub type Orders = [Option<u64>];

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(generator: usize) -> Self {
        Word::power(generator, 1)
    }

    pub fn power(generator: usize, exp: i64) -> Self {
        Word::from_letters([(generator, exp)])
    }

    /// Builds a word from `(generator, exponent)` pairs, reducing freely.
    pub fn from_letters(parts: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut w = Word::default();
        for (g, e) in parts {
            w.push(g, e);
        }
        w
    }

    fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push((g, e));
    }

    fn push_mod(&mut self, g: usize, e: i64, orders: &Orders) {
        let reduce = |x: i64| match orders.get(g).copied().flatten() {
            Some(n) if n > 0 => x.rem_euclid(n as i64),
            _ => x,
        };
        let e = reduce(e);
        if e == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.0 == g {
                last.1 = reduce(last.1 + e);
                if last.1 == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push((g, e));
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters (sum of absolute exponents).
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|s| s.1.unsigned_abs() as usize).sum()
    }

    /// Expands to single letters `(generator, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.syllables
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.syllables {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn free_reduced(&self) -> Word {
        Word::from_letters(self.syllables.iter().copied())
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|s| s.0).max()
    }

    pub fn generators_used(&self) -> BTreeSet<usize> {
        self.syllables.iter().map(|s| s.0).collect()
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, n_generators: usize) -> Vec<i64> {
        let mut v = vec![0; n_generators];
        for &(g, e) in &self.syllables {
            v[g] += e;
        }
        v
    }

    /// Reduces exponents of finite-order generators into `0..n` (merging
    /// runs that become adjacent).
    pub fn normalized(&self, orders: &Orders) -> Word {
        let mut w = Word::default();
        for &(g, e) in &self.syllables {
            w.push_mod(g, e, orders);
        }
        w
    }

    /// Rewrites each generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut w = Word::default();
        for &(g, e) in &self.syllables {
            let img = if e < 0 { images[g].inverse() } else { images[g].clone() };
            for _ in 0..e.unsigned_abs() {
                w = w.mul(&img);
            }
        }
        w
    }

    fn cyclically_reduced(&self, orders: &Orders) -> Word {
        let mut w = self.normalized(orders);
        while w.syllables.len() >= 2 {
            let (g0, _) = w.syllables[0];
            let (gl, el) = *w.syllables.last().unwrap();
            if g0 != gl {
                break;
            }
            w.syllables.pop();
            w.syllables[0].1 += el;
            w = w.normalized(orders);
        }
        w
    }

    /// Canonical representative of the relator up to cyclic rotation and
    /// inversion: the shortest, then lexicographically least, normalized
    /// rotation of `w` or `w⁻¹`.
    pub fn canonical_relator(&self, orders: &Orders) -> Word {
        let base = self.cyclically_reduced(orders);
        if base.is_empty() {
            return base;
        }
        let mut best: Option<(usize, Vec<(usize, i64)>, Word)> = None;
        for cand in [base.clone(), base.inverse().cyclically_reduced(orders)] {
            let letters: Vec<(usize, i64)> = cand.letters().collect();
            for r in 0..letters.len() {
                let rotated = Word::from_letters(
                    letters[r..].iter().chain(letters[..r].iter()).copied(),
                )
                .cyclically_reduced(orders);
                let key_letters: Vec<(usize, i64)> = rotated.letters().map(|(g, e)| (g, -e)).collect();
                let key = (rotated.len(), key_letters);
                let better = match &best {
                    None => true,
                    Some((l, k, _)) => (key.0, &key.1).cmp(&(*l, k)) == Ordering::Less,
                };
                if better {
                    best = Some((key.0, key.1, rotated));
                }
            }
        }
        best.unwrap().2
    }

    /// Parses words such as `abcd`, `a^-1 b^2`, `g1*g2^-1`, `e` or `1`.
    /// Unknown names are appended to `alphabet` when `extend` is set.
    pub fn parse(s: &str, alphabet: &mut Vec<String>, extend: bool) -> Result<Word> {
        let t = s.trim();
        if t.is_empty() || t == "e" || t == "1" || t == "()" {
            return Ok(Word::identity());
        }
        let chars: Vec<char> = t.chars().collect();
        let mut i = 0;
        let mut w = Word::default();
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(Error::Parse(format!("unexpected {c:?} in word {s:?}")));
            }
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            if name == "e" {
                return Err(Error::Parse(format!("'e' denotes the identity, not a generator, in {s:?}")));
            }
            let mut exp = 1i64;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let es = i;
                if i < chars.len() && chars[i] == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let txt: String = chars[es..i].iter().collect();
                exp = txt
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {txt:?} in {s:?}")))?;
            }
            let g = match alphabet.iter().position(|a| *a == name) {
                Some(g) => g,
                None if extend => {
                    alphabet.push(name);
                    alphabet.len() - 1
                }
                None => return Err(Error::Parse(format!("unknown generator {name:?} in {s:?}"))),
            };
            w.push(g, exp);
        }
        Ok(w)
    }

    pub fn display(&self, alphabet: &[String]) -> String {
        if self.is_empty() {
            return "e".into();
        }
        let compact = alphabet.iter().all(|a| a.len() == 1);
        let mut out = String::new();
        for (k, &(g, e)) in self.syllables.iter().enumerate() {
            if k > 0 && !compact {
                out.push('*');
            }
            let name = alphabet.get(g).cloned().unwrap_or_else(|| format!("x{g}"));
            out.push_str(&name);
            if e != 1 {
                let _ = write!(out, "^{e}");
            }
        }
        out
    }
}

/// A finite presentation `⟨generators | relations⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PresentationSpec", into = "PresentationSpec")]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relations: Vec<Word>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationSpec {
    pub generators: Vec<String>,
    pub relations: Vec<String>,
}

impl TryFrom<PresentationSpec> for Presentation {
    type Error = Error;
    fn try_from(spec: PresentationSpec) -> Result<Self> {
        let mut gens = spec.generators.clone();
        let relations = spec
            .relations
            .iter()
            .map(|r| Word::parse(r, &mut gens, false))
            .collect::<Result<_>>()?;
        Ok(Presentation {
            generators: spec.generators,
            relations,
        })
    }
}

impl From<Presentation> for PresentationSpec {
    fn from(p: Presentation) -> Self {
        PresentationSpec {
            relations: p.relations.iter().map(|r| r.display(&p.generators)).collect(),
            generators: p.generators,
        }
    }
}

/// Structure of a finitely generated abelian group `Z^rank ⊕ ⊕ Z/dᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Abelianization {
    pub free_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<u64>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relations: Vec<Word>) -> Self {
        Presentation {
            generators,
            relations,
        }
    }

    pub fn parse(generators: &[&str], relations: &[&str]) -> Result<Self> {
        let mut gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let rels = relations
            .iter()
            .map(|r| Word::parse(r, &mut gens, false))
            .collect::<Result<_>>()?;
        Ok(Presentation::new(gens, rels))
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn word(&self, s: &str) -> Result<Word> {
        let mut gens = self.generators.clone();
        Word::parse(s, &mut gens, false)
    }

    pub fn display_word(&self, w: &Word) -> String {
        w.display(&self.generators)
    }

    /// Every relation uses only declared generators.
    pub fn check(&self) -> Result<()> {
        for r in &self.relations {
            if let Some(g) = r.max_generator() {
                if g >= self.generators.len() {
                    return Err(Error::Domain(format!("relation uses undeclared generator {g}")));
                }
            }
        }
        Ok(())
    }

    /// Orders implied by single-syllable relations `xⁿ`.
    pub fn power_orders(&self) -> Vec<Option<u64>> {
        let mut orders = vec![None; self.generators.len()];
        for r in &self.relations {
            if let [(g, e)] = r.syllables() {
                let n = e.unsigned_abs();
                orders[*g] = Some(match orders[*g] {
                    Some(m) => gcd(m, n),
                    None => n,
                });
            }
        }
        orders
    }

    /// Replaces every relation by its canonical relator, drops trivial ones
    /// and duplicates, and sorts: power relations first (by generator), then
    /// the rest by length and lexicographically.
    pub fn canonicalize_relations(&mut self, hints: &Orders) {
        let mut orders = self.power_orders();
        for (g, h) in hints.iter().enumerate() {
            if g < orders.len() && orders[g].is_none() {
                orders[g] = *h;
            }
        }
        let mut powers: Vec<Word> = Vec::new();
        let mut others: Vec<Word> = Vec::new();
        for r in &self.relations {
            if let [(g, e)] = r.syllables() {
                powers.push(Word::power(*g, e.abs()));
                continue;
            }
            let c = r.canonical_relator(&orders);
            if c.is_empty() {
                continue;
            }
            if let [(g, e)] = c.syllables() {
                powers.push(Word::power(*g, e.abs()));
            } else {
                others.push(c);
            }
        }
        powers.sort_by_key(|w| (w.syllables()[0].0, w.syllables()[0].1));
        powers.dedup_by_key(|w| w.syllables()[0].0);
        let key = |w: &Word| (w.len(), w.letters().map(|(g, e)| (g, -e)).collect::<Vec<_>>());
        others.sort_by_key(key);
        others.dedup();
        self.relations = powers.into_iter().chain(others).collect();
    }

    /// Abelianization by Smith normal form of the exponent-sum matrix.
    pub fn abelianization(&self) -> Abelianization {
        let n = self.generators.len();
        let rows: Vec<Vec<i128>> = self
            .relations
            .iter()
            .map(|r| r.exponent_sums(n).into_iter().map(|x| x as i128).collect())
            .collect();
        let diag = smith_diagonal(rows, n);
        let nonzero: Vec<u64> = diag.iter().filter(|&&d| d != 0).map(|&d| d.unsigned_abs() as u64).collect();
        Abelianization {
            free_rank: n - nonzero.len(),
            torsion: nonzero.into_iter().filter(|&d| d > 1).collect(),
        }
    }

    pub fn to_string_pretty(&self) -> String {
        let rels: Vec<String> = self.relations.iter().map(|r| r.display(&self.generators)).collect();
        format!("⟨{} | {}⟩", self.generators.join(","), rels.join(", "))
    }

    /// Tietze simplification: while some relator contains a generator
    /// exactly once, solve for it (the latest such generator of the shortest
    /// such relator) and eliminate it. Returns the simplified
    /// presentation and, for every original generator, its image in the
    /// remaining ones.
    pub fn simplify(&self) -> (Presentation, Vec<Word>) {
        let n = self.rank();
        let mut images: Vec<Word> = (0..n).map(Word::letter).collect();
        let mut rels: Vec<Word> = self.relations.iter().map(Word::free_reduced).filter(|r| !r.is_empty()).collect();
        let mut alive = vec![true; n];
        loop {
            let mut order: Vec<usize> = (0..rels.len()).collect();
            order.sort_by_key(|&k| (rels[k].len(), k));
            let pick = order.iter().find_map(|&k| {
                let letters: Vec<(usize, i64)> = rels[k].letters().collect();
                let mut counts = vec![0usize; n];
                for &(g, _) in &letters {
                    counts[g] += 1;
                }
                (0..n).rev().find(|&g| counts[g] == 1).map(|g| (k, g, letters))
            });
            let Some((k, g, letters)) = pick else { break };
            let pos = letters.iter().position(|&(h, _)| h == g).unwrap();
            let u = Word::from_letters(letters[..pos].iter().copied());
            let v = Word::from_letters(letters[pos + 1..].iter().copied());
            // u·g^s·v = 1
            let solution = if letters[pos].1 > 0 {
                u.inverse().mul(&v.inverse())
            } else {
                v.mul(&u)
            };
            let mut subst: Vec<Word> = (0..n).map(Word::letter).collect();
            subst[g] = solution;
            rels.remove(k);
            rels = rels.iter().map(|r| r.substitute(&subst)).filter(|r| !r.is_empty()).collect();
            images = images.iter().map(|w| w.substitute(&subst)).collect();
            alive[g] = false;
        }
        let mut relabel = vec![usize::MAX; n];
        let mut names = Vec::new();
        for g in 0..n {
            if alive[g] {
                relabel[g] = names.len();
                names.push(self.generators[g].clone());
            }
        }
        let re = |w: &Word| Word::from_letters(w.syllables().iter().map(|&(g, e)| (relabel[g], e)));
        let mut p = Presentation::new(names, rels.iter().map(re).collect());
        p.canonicalize_relations(&[]);
        (p, images.iter().map(re).collect())
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Diagonal entries of the Smith normal form of an `m × n` integer matrix.
fn smith_diagonal(mut a: Vec<Vec<i128>>, n: usize) -> Vec<i128> {
    let m = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut pivot = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && pivot.is_none_or(|(pi, pj): (usize, usize)| a[i][j].abs() < a[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..m {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility condition for the rest of the block
                let bad = (t + 1..m).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..n {
                            a[t][j] += a[i][j];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..m {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag.sort_by_key(|d| *d);
    diag
}

#[cfg(test)]
mod tests {
    #[test]
    fn tietze_simplification() {
        let p = Presentation::parse(&["a'", "b", "b'"], &["a'", "b b'"]).unwrap();
        let (q, images) = p.simplify();
        assert_eq!(q.generators, vec!["b".to_string()]);
        assert!(q.relations.is_empty());
        assert_eq!(images[0], Word::identity());
        assert_eq!(images[2], Word::power(0, -1));
        let pill = Presentation::parse(&["a", "b", "c", "d"], &["a^2", "b^2", "c^2", "d^2", "abcd"]).unwrap();
        let (q, _) = pill.simplify();
        assert_eq!(q.rank(), 3);
        assert_eq!(q.abelianization(), pill.abelianization());
    }

    use super::*;

    fn abc() -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into(), "d".into()]
    }

    #[test]
    fn parse_and_display() {
        let mut al = abc();
        let w = Word::parse("a b^-1 c^2 c", &mut al, false).unwrap();
        assert_eq!(w.display(&al), "ab^-1c^3");
        assert_eq!(Word::parse("e", &mut al, false).unwrap(), Word::identity());
        assert!(Word::parse("z", &mut al, false).is_err());
        let mut al2 = Vec::new();
        let w = Word::parse("g1*g2^-1", &mut al2, true).unwrap();
        assert_eq!(al2, vec!["g1", "g2"]);
        assert_eq!(w.display(&al2), "g1*g2^-1");
    }

    #[test]
    fn free_reduction_and_inverse() {
        let w = Word::from_letters([(0, 1), (1, 2), (1, -2), (0, 1)]);
        assert_eq!(w, Word::power(0, 2));
        let v = Word::from_letters([(0, 1), (1, 1)]);
        assert!(v.mul(&v.inverse()).is_empty());
    }

    #[test]
    fn normalization_uses_orders() {
        let orders = [Some(2), Some(4), None, None];
        let w = Word::from_letters([(0, -1), (1, -1), (2, -1)]);
        let n = w.normalized(&orders);
        assert_eq!(n.syllables(), &[(0, 1), (1, 3), (2, -1)]);
        // cascading cancellation
        let w = Word::from_letters([(0, 1), (1, 4), (0, 1)]);
        assert!(w.normalized(&orders).is_empty());
    }

    #[test]
    fn canonical_relator_pillowcase() {
        let orders = [Some(2); 4];
        let mut al = abc();
        let w = Word::parse("c b a^-1 d^-1", &mut al, false).unwrap();
        assert_eq!(w.canonical_relator(&orders).display(&al), "abcd");
        let w = Word::parse("b^-1 a^-1 b a", &mut al, false).unwrap();
        let none = [None; 4];
        let c = w.canonical_relator(&none);
        assert_eq!(c.len(), 4);
        assert_eq!(c, Word::parse("a b a^-1 b^-1", &mut al, false).unwrap().canonical_relator(&none));
    }

    #[test]
    fn abelianization_examples() {
        let torus = Presentation::parse(&["a", "b"], &["aba^-1b^-1"]).unwrap();
        assert_eq!(torus.abelianization(), Abelianization { free_rank: 2, torsion: vec![] });
        let pillow = Presentation::parse(&["a", "b", "c", "d"], &["a^2", "b^2", "c^2", "d^2", "abcd"]).unwrap();
        assert_eq!(pillow.abelianization(), Abelianization { free_rank: 0, torsion: vec![2, 2, 2] });
        let t236 = Presentation::parse(&["a", "b", "c"], &["a^2", "b^3", "c^6", "abc"]).unwrap();
        assert_eq!(t236.abelianization().torsion, vec![6]);
        let free = Presentation::parse(&["x"], &[]).unwrap();
        assert_eq!(free.abelianization().free_rank, 1);
    }

    #[test]
    fn canonicalize_sorts_and_dedups() {
        let mut p = Presentation::parse(&["a", "b", "c"], &["abc", "c^3", "a^2", "bca", "b^3", "aa^-1"]).unwrap();
        p.canonicalize_relations(&[]);
        let shown: Vec<String> = p.relations.iter().map(|r| p.display_word(r)).collect();
        assert_eq!(shown, vec!["a^2", "b^3", "c^3", "abc"]);
    }

    #[test]
    fn presentation_serde() {
        let p = Presentation::parse(&["a", "b"], &["a^2", "abab"]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"generators":["a","b"],"relations":["a^2","abab"]}"#);
        let back: Presentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
