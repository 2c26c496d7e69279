//! Subgroups of catalog groups: generation, enumeration up to conjugacy,
//! normalizers, cosets and double cosets.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::group::FiniteGroup;
use crate::perm::Perm;

#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl Subgroup {
    fn from_members(parent: Arc<FiniteGroup>, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        let mut mask = vec![false; parent.order()];
        for &m in &members {
            mask[m] = true;
        }
        Subgroup { parent, members, mask }
    }

    /// Smallest subgroup containing the given element indices.
    pub fn generated(parent: &Arc<FiniteGroup>, gens: &[usize]) -> Result<Self> {
        let n = parent.order();
        if let Some(&bad) = gens.iter().find(|&&g| g >= n) {
            return Err(domain!("element index {bad} not in {}", parent.name()));
        }
        let mut mask = vec![false; n];
        mask[0] = true;
        let mut members = vec![0];
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = parent.mul(g, x);
                if !mask[y] {
                    mask[y] = true;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        Ok(Subgroup::from_members(parent.clone(), members))
    }

    /// As [`Subgroup::generated`], taking permutations.
    pub fn generated_by_perms(parent: &Arc<FiniteGroup>, gens: &[Perm]) -> Result<Self> {
        let idx = gens
            .iter()
            .map(|p| {
                parent
                    .index_of(p)
                    .ok_or_else(|| domain!("{p} is not an element of {}", parent.name()))
            })
            .collect::<Result<Vec<_>>>()?;
        Subgroup::generated(parent, &idx)
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Self {
        Subgroup::from_members(parent.clone(), vec![0])
    }

    pub fn whole(parent: &Arc<FiniteGroup>) -> Self {
        Subgroup::from_members(parent.clone(), (0..parent.order()).collect())
    }

    /// Parses `e`, `full`, or `;`-separated 1-based cycle notation such as
    /// `(12);(123)`.
    pub fn parse(parent: &Arc<FiniteGroup>, s: &str) -> Result<Self> {
        match s.trim() {
            "e" | "1" | "trivial" => Ok(Subgroup::trivial(parent)),
            "full" | "G" | "all" => Ok(Subgroup::whole(parent)),
            t => {
                let gens = t
                    .split(';')
                    .map(|c| Perm::parse_cycles(parent.degree(), c))
                    .collect::<Result<Vec<_>>>()?;
                Subgroup::generated_by_perms(parent, &gens)
            }
        }
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.mask[g]
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.members.iter().all(|&m| self.mask[m])
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn same_parent(&self, other: &Subgroup) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) || *self.parent == *other.parent
    }

    /// `g·H·g⁻¹`
    pub fn conjugate(&self, g: usize) -> Subgroup {
        let members = self.members.iter().map(|&h| self.parent.conj(g, h)).collect();
        Subgroup::from_members(self.parent.clone(), members)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let members = self.members.iter().copied().filter(|&m| other.mask[m]).collect();
        Subgroup::from_members(self.parent.clone(), members)
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        (0..g.order()).all(|x| self.members.iter().all(|&h| self.mask[g.conj(x, h)]))
    }

    /// Largest subgroup of the parent in which `self` is normal.
    pub fn normalizer(&self) -> Subgroup {
        let g = &self.parent;
        let members = (0..g.order())
            .filter(|&x| self.members.iter().all(|&h| self.mask[g.conj(x, h)]))
            .collect();
        Subgroup::from_members(g.clone(), members)
    }

    pub fn perms(&self) -> Vec<Perm> {
        self.members.iter().map(|&m| self.parent.element(m).clone()).collect()
    }

    /// A small generating set, chosen greedily in element order.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial(&self.parent);
        for &m in &self.members {
            if !span.contains(m) {
                gens.push(m);
                span = Subgroup::generated(&self.parent, &gens).expect("members are in parent");
            }
        }
        gens
    }

    /// Realizes the subgroup as a group in its own right, on the parent's
    /// points.
    pub fn as_group(&self, name: &str) -> Arc<FiniteGroup> {
        let gens: Vec<Perm> = self.generating_set().iter().map(|&g| self.parent.element(g).clone()).collect();
        Arc::new(FiniteGroup::from_generators(name, self.parent.degree(), &gens).expect("subgroup closes"))
    }

    /// Right cosets `H·g`.
    pub fn right_cosets(&self) -> CosetSpace {
        CosetSpace::new(self.clone())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_parent(other) && self.members == other.members
    }
}
impl Eq for Subgroup {}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {} of {}: {:?})", self.order(), self.parent.name(), self.members)
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generating_set().iter().map(|&g| self.parent.element(g).to_string()).collect();
        if gens.is_empty() {
            write!(f, "{{e}}")
        } else {
            write!(f, "<{}>", gens.join(", "))
        }
    }
}

/// Right cosets `H·g` of a subgroup, ordered by least element.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    subgroup: Subgroup,
    cosets: Vec<Vec<usize>>,
    representatives: Vec<usize>,
    coset_of: Vec<usize>,
}

impl CosetSpace {
    fn new(subgroup: Subgroup) -> Self {
        let g = subgroup.parent().clone();
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut cosets = Vec::new();
        let mut representatives = Vec::new();
        for x in 0..g.order() {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = subgroup.members().iter().map(|&h| g.mul(h, x)).collect();
            c.sort_unstable();
            for &y in &c {
                coset_of[y] = cosets.len();
            }
            representatives.push(x);
            cosets.push(c);
        }
        CosetSpace {
            subgroup,
            cosets,
            representatives,
            coset_of,
        }
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    /// Index of the coset `H·g`.
    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    /// The coset `(H·rep)·x`.
    pub fn act_right(&self, coset: usize, x: usize) -> usize {
        let g = self.subgroup.parent();
        self.coset_of[g.mul(self.representatives[coset], x)]
    }
}

/// The quotient `N/H` for `H` normal in `N`, as a group of cosets.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub numerator: Subgroup,
    pub denominator: Subgroup,
    /// Cosets `n·H`, the first being `H` itself.
    pub cosets: Vec<Vec<usize>>,
    /// `table[i][j]` is the coset of a product of representatives.
    pub table: Vec<Vec<usize>>,
}

impl QuotientGroup {
    pub fn new(numerator: &Subgroup, denominator: &Subgroup) -> Result<Self> {
        if !numerator.same_parent(denominator) || !numerator.contains_subgroup(denominator) {
            return Err(domain!("quotient needs H ⊆ N in a common parent"));
        }
        let g = numerator.parent();
        if !denominator
            .members()
            .iter()
            .all(|&h| numerator.members().iter().all(|&n| denominator.contains(g.conj(n, h))))
        {
            return Err(domain!("denominator is not normal in numerator"));
        }
        let mut label = vec![usize::MAX; g.order()];
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for &n in numerator.members() {
            if label[n] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = denominator.members().iter().map(|&h| g.mul(n, h)).collect();
            c.sort_unstable();
            for &y in &c {
                label[y] = cosets.len();
            }
            cosets.push(c);
        }
        let table = cosets
            .iter()
            .map(|a| cosets.iter().map(|b| label[g.mul(a[0], b[0])]).collect())
            .collect();
        Ok(QuotientGroup {
            numerator: numerator.clone(),
            denominator: denominator.clone(),
            cosets,
            table,
        })
    }

    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut x = i;
        let mut k = 1;
        while x != 0 {
            x = self.table[x][i];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

/// Every subgroup of `g`, sorted by order and then by member list.
///
/// Builds the lattice from cyclic subgroups by repeated joins; every
/// subgroup is the join of the cyclic subgroups of its elements, and
/// joins whose order could not divide `|G|` are discarded before closure.
pub fn all_subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    let n = g.order();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut cyclic: Vec<Subgroup> = Vec::new();
    for x in 0..n {
        let c = Subgroup::generated(g, &[x]).unwrap();
        if found.insert(c.members.clone()) {
            cyclic.push(c);
        }
    }
    let mut frontier: Vec<Subgroup> = cyclic.clone();
    let mut all: Vec<Subgroup> = cyclic.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            for c in &cyclic {
                if h.contains_subgroup(c) {
                    continue;
                }
                // |⟨H, C⟩| is a multiple of lcm(|H|, |C|) dividing |G|
                let l = lcm(h.order(), c.order());
                if !n.is_multiple_of(l) {
                    continue;
                }
                let mut gens: Vec<usize> = h.generating_set();
                gens.extend(c.generating_set());
                let j = Subgroup::generated(g, &gens).unwrap();
                if found.insert(j.members.clone()) {
                    next.push(j.clone());
                    all.push(j);
                }
            }
        }
        frontier = next;
    }
    all.sort_by(|a, b| (a.order(), &a.members).cmp(&(b.order(), &b.members)));
    all
}

fn lcm(a: usize, b: usize) -> usize {
    a / crate::word::gcd(a as u64, b as u64) as usize * b
}

/// One representative per conjugacy class of subgroups, ordered by order and
/// then by member list; each representative is the least member of its
/// class in that order.
pub fn conjugacy_classes_of_subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    subgroup_classes(g).into_iter().map(|c| c[0].clone()).collect()
}

/// All subgroups grouped into conjugacy classes.
pub fn subgroup_classes(g: &Arc<FiniteGroup>) -> Vec<Vec<Subgroup>> {
    let subs = all_subgroups(g);
    let mut assigned = vec![false; subs.len()];
    let mut classes = Vec::new();
    for i in 0..subs.len() {
        if assigned[i] {
            continue;
        }
        let mut class_members: BTreeSet<Vec<usize>> = BTreeSet::new();
        for x in 0..g.order() {
            class_members.insert(subs[i].conjugate(x).members.clone());
        }
        let mut class = Vec::new();
        for (j, s) in subs.iter().enumerate() {
            if class_members.contains(&s.members) {
                assigned[j] = true;
                class.push(s.clone());
            }
        }
        classes.push(class);
    }
    classes
}

/// Partition of the parent into double cosets `h2·g·h1`, ordered by least
/// element.
pub fn double_cosets(h1: &Subgroup, h2: &Subgroup) -> Result<Vec<Vec<usize>>> {
    if !h1.same_parent(h2) {
        return Err(domain!("double cosets need subgroups of a common parent"));
    }
    let g = h1.parent();
    let mut seen = vec![false; g.order()];
    let mut out = Vec::new();
    for x in 0..g.order() {
        if seen[x] {
            continue;
        }
        let mut set = BTreeSet::new();
        for &b in h2.members() {
            let bx = g.mul(b, x);
            for &a in h1.members() {
                set.insert(g.mul(bx, a));
            }
        }
        for &y in &set {
            seen[y] = true;
        }
        out.push(set.into_iter().collect());
    }
    Ok(out)
}

/// `⋂ᵢ repsᵢ·subsᵢ·repsᵢ⁻¹`.
pub fn conjugate_intersection(subs: &[Subgroup], reps: &[usize]) -> Result<Subgroup> {
    if subs.len() != reps.len() {
        return Err(domain!("{} subgroups but {} representatives", subs.len(), reps.len()));
    }
    let Some(first) = subs.first() else {
        return Err(domain!("empty subgroup list"));
    };
    if subs.iter().any(|s| !s.same_parent(first)) {
        return Err(domain!("subgroups do not share a parent"));
    }
    let n = first.parent().order();
    if let Some(&r) = reps.iter().find(|&&r| r >= n) {
        return Err(domain!("representative {r} out of range"));
    }
    let mut acc = Subgroup::whole(first.parent());
    for (s, &r) in subs.iter().zip(reps) {
        acc = acc.intersection(&s.conjugate(r));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog_group;

    fn s3() -> Arc<FiniteGroup> {
        catalog_group("S3").unwrap()
    }

    fn sub(g: &Arc<FiniteGroup>, s: &str) -> Subgroup {
        Subgroup::parse(g, s).unwrap()
    }

    #[test]
    fn generate_examples() {
        let g = s3();
        assert_eq!(sub(&g, "(12)").order(), 2);
        assert_eq!(Subgroup::generated(&g, &[]).unwrap().order(), 1);
        assert_eq!(sub(&g, "(12);(123)").order(), 6);
        assert!(Subgroup::generated(&g, &[17]).is_err());
        let foreign = Perm::parse_cycles(4, "(12)").unwrap();
        assert!(Subgroup::generated_by_perms(&g, &[foreign]).is_err());
    }

    #[test]
    fn class_counts_small() {
        for (name, classes) in [("Z2", 2), ("S3", 4), ("Z4", 3)] {
            let g = catalog_group(name).unwrap();
            assert_eq!(conjugacy_classes_of_subgroups(&g).len(), classes, "{name}");
        }
        let s3_reps: Vec<usize> = conjugacy_classes_of_subgroups(&s3()).iter().map(|h| h.order()).collect();
        assert_eq!(s3_reps, vec![1, 2, 3, 6]);
    }

    #[test]
    fn normalizer_examples() {
        let g = s3();
        assert_eq!(Subgroup::trivial(&g).normalizer().order(), 6);
        let t = sub(&g, "(12)");
        assert_eq!(t.normalizer(), t);
        assert_eq!(sub(&g, "(123)").normalizer().order(), 6);
    }

    #[test]
    fn double_coset_examples() {
        let z2 = catalog_group("Z2").unwrap();
        let e = Subgroup::trivial(&z2);
        let dc = double_cosets(&e, &e).unwrap();
        assert_eq!(dc, vec![vec![0], vec![1]]);
        let g = s3();
        let t = sub(&g, "(12)");
        let mut sizes: Vec<usize> = double_cosets(&t, &t).unwrap().iter().map(|c| c.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 4]);
        let r = sub(&g, "(123)");
        let sizes: Vec<usize> = double_cosets(&r, &r).unwrap().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![3, 3]);
        assert!(double_cosets(&t, &Subgroup::trivial(&catalog_group("S4").unwrap())).is_err());
    }

    #[test]
    fn conjugate_intersection_examples() {
        let g = s3();
        let full = Subgroup::whole(&g);
        assert_eq!(conjugate_intersection(std::slice::from_ref(&full), &[0]).unwrap(), full);
        let t = sub(&g, "(12)");
        let r = sub(&g, "(123)");
        assert!(conjugate_intersection(&[t.clone(), r], &[0, 0]).unwrap().is_trivial());
        let c = g.index_of(&Perm::parse_cycles(3, "(123)").unwrap()).unwrap();
        assert!(conjugate_intersection(&[t.clone(), t.clone()], &[0, c]).unwrap().is_trivial());
        assert!(conjugate_intersection(&[t], &[0, c]).is_err());
    }

    #[test]
    fn cosets_partition() {
        let g = catalog_group("S4").unwrap();
        for h in all_subgroups(&g) {
            let cs = h.right_cosets();
            assert_eq!(cs.len() * h.order(), g.order());
            let mut all: Vec<usize> = cs.cosets().iter().flatten().copied().collect();
            all.sort();
            assert_eq!(all, (0..24).collect::<Vec<_>>());
            for (k, &rep) in cs.representatives().iter().enumerate() {
                let mut hc: Vec<usize> = h.members().iter().map(|&x| g.mul(x, rep)).collect();
                hc.sort();
                assert_eq!(hc, cs.cosets()[k]);
            }
        }
    }

    #[test]
    fn quotient_orders() {
        let g = s3();
        let r = sub(&g, "(123)");
        let q = QuotientGroup::new(&r.normalizer(), &r).unwrap();
        assert_eq!(q.order(), 2);
        let e = Subgroup::trivial(&g);
        let q = QuotientGroup::new(&e.normalizer(), &e).unwrap();
        assert_eq!(q.order(), 6);
        assert!(!q.is_abelian());
        assert!(QuotientGroup::new(&Subgroup::whole(&g), &sub(&g, "(12)")).is_err());
    }
}
