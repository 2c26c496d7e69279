//! Finite coverings encoded by the monodromy action of a presented group on
//! a fiber.
//!
//! Generators act on the left; a word acts right to left, like the words of
//! [`crate::word`].

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::group::FiniteGroup;
use crate::perm::Perm;
use crate::subgroup::Subgroup;
use crate::todd_coxeter::{enumerate_cosets, CosetTable};
use crate::word::{Presentation, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CoveringSpec", into = "CoveringSpec")]
pub struct MonodromyCovering {
    presentation: Presentation,
    action: Vec<Perm>,
    basepoint: usize,
}

/// JSON form: `{presentation, fiber_size, action: [[images]], basepoint}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringSpec {
    pub presentation: Presentation,
    pub fiber_size: usize,
    pub action: Vec<Perm>,
    #[serde(default)]
    pub basepoint: usize,
}

impl TryFrom<CoveringSpec> for MonodromyCovering {
    type Error = Error;
    fn try_from(s: CoveringSpec) -> Result<Self> {
        if let Some(p) = s.action.iter().find(|p| p.degree() != s.fiber_size) {
            return Err(domain!("action {p} does not have degree {}", s.fiber_size));
        }
        MonodromyCovering::new(s.presentation, s.action, s.basepoint)
    }
}

impl From<MonodromyCovering> for CoveringSpec {
    fn from(c: MonodromyCovering) -> Self {
        CoveringSpec {
            fiber_size: c.fiber_size(),
            presentation: c.presentation,
            action: c.action,
            basepoint: c.basepoint,
        }
    }
}

impl MonodromyCovering {
    /// Checks arity, degrees and that every relation acts trivially.
    pub fn new(presentation: Presentation, action: Vec<Perm>, basepoint: usize) -> Result<Self> {
        presentation.check()?;
        if action.len() != presentation.rank() {
            return Err(domain!(
                "{} generator actions for {} generators",
                action.len(),
                presentation.rank()
            ));
        }
        let n = action.first().map_or(1, Perm::degree);
        if n == 0 {
            return Err(domain!("empty fiber"));
        }
        if action.iter().any(|p| p.degree() != n) {
            return Err(domain!("generator actions have different degrees"));
        }
        if basepoint >= n {
            return Err(domain!("basepoint {basepoint} outside fiber of size {n}"));
        }
        let c = MonodromyCovering {
            presentation,
            action,
            basepoint,
        };
        for r in &c.presentation.relations {
            if !c.word_action(r).is_identity() {
                return Err(domain!(
                    "relation {} does not act trivially",
                    c.presentation.display_word(r)
                ));
            }
        }
        Ok(c)
    }

    /// The one-sheeted covering.
    pub fn trivial(presentation: Presentation) -> Result<Self> {
        let action = vec![Perm::identity(1); presentation.rank()];
        MonodromyCovering::new(presentation, action, 0)
    }

    /// Action on the right cosets of `⟨subgroup⟩`, basepoint the subgroup
    /// itself.
    pub fn from_coset_table(presentation: Presentation, table: &CosetTable) -> Result<Self> {
        MonodromyCovering::new(presentation, table.left_action(), 0)
    }

    /// Action of `p` on the cosets of the subgroup generated by `subgroup`.
    pub fn coset_action(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<Self> {
        let table = enumerate_cosets(p, subgroup, max_cosets)?;
        MonodromyCovering::from_coset_table(p.clone(), &table)
    }

    /// A finite group acting on the right cosets of `h` by `x·(Hk) = Hkx⁻¹`,
    /// presented on its own generators.
    pub fn from_subgroup(h: &Subgroup) -> Self {
        let g: &FiniteGroup = h.parent();
        let names: Vec<String> = (0..g.generators().len()).map(|i| format!("g{}", i + 1)).collect();
        let cosets = h.right_cosets();
        let action = g
            .generators()
            .iter()
            .map(|&x| {
                let xi = g.inv(x);
                Perm::from_images((0..cosets.len()).map(|k| cosets.act_right(k, xi)).collect()).unwrap()
            })
            .collect();
        MonodromyCovering::new(g.presentation(&names), action, 0).expect("group relations hold in any action")
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn fiber_size(&self) -> usize {
        self.action.first().map_or(1, Perm::degree)
    }

    pub fn action(&self) -> &[Perm] {
        &self.action
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// The permutation by which a word acts.
    pub fn word_action(&self, w: &Word) -> Perm {
        let mut acc = Perm::identity(self.fiber_size());
        for (g, s) in w.letters() {
            let p = if s > 0 { self.action[g].clone() } else { self.action[g].inverse() };
            acc = acc.compose(&p);
        }
        acc
    }

    /// Orbits of the action, each sorted, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.fiber_size();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for p in &self.action {
                    let y = p.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                        queue.push_back(y);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.orbits().len() == 1
    }

    /// Restriction to one orbit, renumbered in increasing order; the
    /// basepoint becomes the orbit's least point unless it lies in it.
    pub fn restrict(&self, orbit: &[usize]) -> Result<Self> {
        let mut label = vec![usize::MAX; self.fiber_size()];
        for (k, &x) in orbit.iter().enumerate() {
            label[x] = k;
        }
        let action = self
            .action
            .iter()
            .map(|p| {
                orbit
                    .iter()
                    .map(|&x| match label[p.apply(x)] {
                        usize::MAX => Err(domain!("point set is not invariant")),
                        k => Ok(k),
                    })
                    .collect::<Result<Vec<_>>>()
                    .and_then(Perm::from_images)
            })
            .collect::<Result<Vec<_>>>()?;
        let base = match label.get(self.basepoint) {
            Some(&k) if k != usize::MAX => k,
            _ => 0,
        };
        MonodromyCovering::new(self.presentation.clone(), action, base)
    }

    /// Sheets on which a generator acts trivially.
    pub fn fixed_points_of(&self, generator: usize) -> Vec<usize> {
        let p = &self.action[generator];
        (0..self.fiber_size()).filter(|&x| p.apply(x) == x).collect()
    }
}

/// Product action on `fiber₁ × fiber₂`, point `(i, j)` numbered `i·n₂ + j`.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub covering: MonodromyCovering,
    pub components: Vec<Vec<usize>>,
}

pub fn monodromy_fiber_product(c1: &MonodromyCovering, c2: &MonodromyCovering) -> Result<FiberProduct> {
    if c1.presentation != c2.presentation {
        return Err(domain!("coverings are over different presentations"));
    }
    let n2 = c2.fiber_size();
    let action = c1
        .action
        .iter()
        .zip(&c2.action)
        .map(|(p, q)| {
            let images = (0..c1.fiber_size() * n2)
                .map(|x| p.apply(x / n2) * n2 + q.apply(x % n2))
                .collect();
            Perm::from_images(images).expect("product of bijections")
        })
        .collect();
    let covering = MonodromyCovering::new(c1.presentation.clone(), action, c1.basepoint * n2 + c2.basepoint)?;
    let components = covering.orbits();
    Ok(FiberProduct { covering, components })
}

/// Fiber permutations commuting with the action, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeckGroup {
    pub automorphisms: Vec<Perm>,
}

impl DeckGroup {
    pub fn order(&self) -> usize {
        self.automorphisms.len()
    }

    pub fn is_transitive(&self, fiber_size: usize) -> bool {
        let mut reached = vec![false; fiber_size];
        for a in &self.automorphisms {
            reached[a.apply(0)] = true;
        }
        reached.iter().all(|&r| r)
    }

    /// Element orders, in the order of `automorphisms`.
    pub fn element_orders(&self) -> Vec<usize> {
        self.automorphisms
            .iter()
            .map(|a| {
                let mut k = 1;
                let mut p = a.clone();
                while !p.is_identity() {
                    p = p.compose(a);
                    k += 1;
                }
                k
            })
            .collect()
    }
}

/// Deck transformations of a connected covering.
///
/// Each candidate image `y` of the basepoint determines at most one
/// automorphism, found by transporting along the action.
pub fn deck_group(c: &MonodromyCovering) -> Result<DeckGroup> {
    if !c.is_connected() {
        return Err(domain!("deck group requires a connected covering"));
    }
    let n = c.fiber_size();
    let b = c.basepoint;
    let mut automorphisms = Vec::new();
    'target: for y in 0..n {
        let mut phi = vec![usize::MAX; n];
        phi[b] = y;
        let mut queue = VecDeque::from([b]);
        while let Some(x) = queue.pop_front() {
            for p in &c.action {
                let (gx, gy) = (p.apply(x), p.apply(phi[x]));
                if phi[gx] == usize::MAX {
                    phi[gx] = gy;
                    queue.push_back(gx);
                } else if phi[gx] != gy {
                    continue 'target;
                }
            }
        }
        if let Ok(p) = Perm::from_images(phi) {
            automorphisms.push(p);
        }
    }
    automorphisms.sort();
    Ok(DeckGroup { automorphisms })
}

/// Whether the deck group acts transitively on the fiber.
pub fn is_regular(c: &MonodromyCovering) -> Result<bool> {
    Ok(deck_group(c)?.order() == c.fiber_size())
}

/// Regular covering of a finite group given by `p`: its action on itself,
/// together with its deck group.
pub fn universal_cover(p: &Presentation, max_cosets: usize) -> Result<(MonodromyCovering, DeckGroup)> {
    let c = MonodromyCovering::coset_action(p, &[], max_cosets)?;
    let deck = deck_group(&c)?;
    Ok((c, deck))
}
