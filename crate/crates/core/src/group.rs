//! Finite permutation groups and the built-in catalog.
//!
//! Elements are addressed by their index in [`FiniteGroup::elements`]; the
//! identity is always index 0. A full multiplication table is built on
//! construction, so every later operation is table lookups.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::perm::Perm;
use crate::word::{Presentation, Word};

/// Largest group the engine will close.
pub const MAX_GROUP_ORDER: usize = 5040;

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    degree: usize,
    elements: Vec<Perm>,
    generators: Vec<usize>,
    index: HashMap<Perm, usize>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

/// Serialized form: `{degree, generators: [[images]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub degree: usize,
    pub generators: Vec<Perm>,
}

impl FiniteGroup {
    /// Closes `generators` under composition (breadth-first, so element
    /// order is deterministic).
    pub fn from_generators(name: &str, degree: usize, generators: &[Perm]) -> Result<Self> {
        for g in generators {
            if g.degree() != degree {
                return Err(domain!("generator {g} has degree {} not {degree}", g.degree()));
            }
        }
        let mut elements = vec![Perm::identity(degree)];
        let mut index = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let next = g.compose(&elements[i]);
                if !index.contains_key(&next) {
                    if elements.len() >= MAX_GROUP_ORDER {
                        return Err(Error::Resource(format!(
                            "group {name} exceeds {MAX_GROUP_ORDER} elements"
                        )));
                    }
                    index.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        let n = elements.len();
        let mul: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| index[&elements[i].compose(&elements[j])])
                    .collect()
            })
            .collect();
        let inv = (0..n).map(|i| index[&elements[i].inverse()]).collect();
        let gen_idx = generators.iter().map(|g| index[g]).collect();
        Ok(FiniteGroup {
            name: name.to_string(),
            degree,
            elements,
            generators: gen_idx,
            index,
            mul,
            inv,
        })
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        Self::from_generators(spec.name.as_deref().unwrap_or("G"), spec.degree, &spec.generators)
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec {
            name: Some(self.name.clone()),
            degree: self.degree,
            generators: self.generators.iter().map(|&g| self.elements[g].clone()).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    /// Indices of the generators.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `g·h·g⁻¹`
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul[self.mul[g][h]][self.inv[g]]
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv[a] } else { a };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.mul[base][acc])
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul[a][x];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order()).any(|a| self.element_order(a) == self.order())
    }

    /// Shortest words in the generators (positive powers only) reaching each
    /// element, as generator positions; breadth-first, so ties resolve by
    /// generator order.
    pub fn canonical_words(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (k, &g) in self.generators.iter().enumerate() {
                // word w acts as w[0]·w[1]·…, so appending g on the right
                let y = self.mul[x][g];
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap();
                    w.push(k);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        words.into_iter().map(|w| w.expect("generators span the group")).collect()
    }

    /// A finite presentation on the group's generators: power relations for
    /// cyclic groups, otherwise the Cayley-graph relators `w_x·s·w_{xs}⁻¹`
    /// of a breadth-first spanning tree.
    pub fn presentation(&self, names: &[String]) -> Presentation {
        assert_eq!(names.len(), self.generators.len());
        let mut relations = Vec::new();
        if self.generators.len() == 1 {
            let n = self.element_order(self.generators[0]) as i64;
            if n > 1 || self.order() == 1 {
                relations.push(Word::power(0, n));
            }
        } else {
            let words = self.canonical_words();
            for x in 0..self.order() {
                for (k, &g) in self.generators.iter().enumerate() {
                    let y = self.mul[x][g];
                    let w = Word::from_letters(words[x].iter().map(|&i| (i, 1)))
                        .mul(&Word::letter(k))
                        .mul(&Word::from_letters(words[y].iter().map(|&i| (i, 1))).inverse());
                    let r = w.free_reduced();
                    if !r.is_empty() {
                        relations.push(r);
                    }
                }
            }
        }
        let mut p = Presentation::new(names.to_vec(), relations);
        p.canonicalize_relations(&[]);
        p
    }

    /// Checks closure, inverses, identity and generator span; used in tests
    /// and when loading groups from JSON.
    pub fn verify_axioms(&self) -> Result<()> {
        let n = self.order();
        if !self.elements[0].is_identity() {
            return Err(domain!("element 0 is not the identity"));
        }
        for a in 0..n {
            if self.mul[a][self.inv[a]] != 0 {
                return Err(domain!("inverse table wrong at {a}"));
            }
        }
        Ok(())
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

/// Catalog names usable with [`catalog_group`], all of order at most 24.
pub const CATALOG: &[&str] = &[
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z8", "S3", "D4", "D5", "D6", "Q8", "A4", "S4",
];

fn cyc(n: usize) -> Perm {
    Perm::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap()
}

/// Looks up a built-in group by name: `Zn` (cyclic, regular action),
/// `Dn` (dihedral of order 2n on n points), `S3`, `S4`, `A4`, `Q8`, plus the
/// aliases `e`/`trivial` for the trivial group.
pub fn catalog_group(name: &str) -> Result<Arc<FiniteGroup>> {
    let g = match name {
        "e" | "1" | "trivial" => FiniteGroup::from_generators("Z1", 1, &[])?,
        "S3" => FiniteGroup::from_generators(
            "S3",
            3,
            &[Perm::from_cycles(3, &[&[0, 1]])?, Perm::from_cycles(3, &[&[0, 1, 2]])?],
        )?,
        "S4" => FiniteGroup::from_generators(
            "S4",
            4,
            &[Perm::from_cycles(4, &[&[0, 1]])?, Perm::from_cycles(4, &[&[0, 1, 2, 3]])?],
        )?,
        "A4" => FiniteGroup::from_generators(
            "A4",
            4,
            &[Perm::from_cycles(4, &[&[0, 1, 2]])?, Perm::from_cycles(4, &[&[0, 1], &[2, 3]])?],
        )?,
        "Q8" => {
            // Left regular action on {1, i, j, k, -1, -i, -j, -k} = 0..8.
            let i = Perm::from_images(vec![1, 4, 3, 6, 5, 0, 7, 2])?;
            let j = Perm::from_images(vec![2, 7, 4, 1, 6, 3, 0, 5])?;
            FiniteGroup::from_generators("Q8", 8, &[i, j])?
        }
        _ => {
            let (kind, num) = name.split_at(1);
            let n: usize = num
                .parse()
                .map_err(|_| Error::Lookup(format!("group {name:?}")))?;
            match kind {
                "Z" if (1..=24).contains(&n) => {
                    let gens = if n == 1 { vec![] } else { vec![cyc(n)] };
                    FiniteGroup::from_generators(name, n.max(1), &gens)?
                }
                "D" if (3..=12).contains(&n) => {
                    // rotation, then the reflection fixing vertex 0
                    let refl = Perm::from_images((0..n).map(|i| (n - i) % n).collect())?;
                    FiniteGroup::from_generators(name, n, &[cyc(n), refl])?
                }
                _ => return Err(Error::Lookup(format!("group {name:?}"))),
            }
        }
    };
    Ok(Arc::new(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_orders() {
        let expected = [
            ("Z1", 1),
            ("Z2", 2),
            ("Z4", 4),
            ("S3", 6),
            ("D4", 8),
            ("Q8", 8),
            ("A4", 12),
            ("D6", 12),
            ("S4", 24),
        ];
        for (name, order) in expected {
            let g = catalog_group(name).unwrap();
            assert_eq!(g.order(), order, "{name}");
            g.verify_axioms().unwrap();
        }
    }

    #[test]
    fn quaternion_relations() {
        let q = catalog_group("Q8").unwrap();
        let i = q.generators()[0];
        let j = q.generators()[1];
        assert_eq!(q.element_order(i), 4);
        assert_eq!(q.pow(i, 2), q.pow(j, 2));
        assert!(!q.is_abelian());
        // exactly one involution
        assert_eq!((0..8).filter(|&x| q.element_order(x) == 2).count(), 1);
    }

    #[test]
    fn associativity_spot_check() {
        let g = catalog_group("S4").unwrap();
        for a in (0..24).step_by(5) {
            for b in (0..24).step_by(7) {
                for c in (0..24).step_by(3) {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn unknown_group_is_lookup_error() {
        assert!(matches!(catalog_group("M11"), Err(Error::Lookup(_))));
        assert!(matches!(catalog_group("Zx"), Err(Error::Lookup(_))));
    }

    #[test]
    fn spec_roundtrip() {
        let g = catalog_group("D4").unwrap();
        let json = serde_json::to_string(&g.spec()).unwrap();
        let back = FiniteGroup::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(*g, back);
    }

    #[test]
    fn canonical_words_reach_elements() {
        let g = catalog_group("S4").unwrap();
        for (x, w) in g.canonical_words().iter().enumerate() {
            let y = w.iter().fold(0, |acc, &k| g.mul(acc, g.generators()[k]));
            assert_eq!(x, y);
        }
    }
}
