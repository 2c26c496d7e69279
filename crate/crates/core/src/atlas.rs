//! Combinatorial orbifold atlases: charts with finite local groups, the
//! gluing sets `Γ_ij` of deck transformations relating overlapping charts,
//! and a partial table of triple-overlap products.
//!
//! Elements of every `Γ_ij` are words in one global alphabet. Each chart
//! names the words its local group generators stand for, so local groups
//! embed in the group the atlas presents.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::group::{catalog_group, FiniteGroup, GroupSpec};
use crate::word::{Presentation, Word};

/// Local group of a chart: a catalog name or an explicit permutation group.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Spec(GroupSpec),
}

impl GroupRef {
    pub fn resolve(&self) -> Result<Arc<FiniteGroup>> {
        match self {
            GroupRef::Name(n) => catalog_group(n),
            GroupRef::Spec(s) => Ok(Arc::new(FiniteGroup::from_spec(s)?)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChartSpec {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub group: GroupRef,
    /// Word for each generator of the local group; fresh letters if omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    /// Row-major 3×3 matrix for each local group generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<[[f64; 3]; 3]>>,
    /// Orientation sign (±1) of each local group generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GluingSpec {
    pub i: usize,
    pub j: usize,
    pub elements: Vec<String>,
}

/// `left ∘ right = result` with `left ∈ Γ_ij`, `right ∈ Γ_jk`,
/// `result ∈ Γ_ik`, each given as `(chart, chart, word)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProductSpec {
    pub left: (usize, usize, String),
    pub right: (usize, usize, String),
    pub result: (usize, usize, String),
}

/// JSON form of an atlas.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AtlasSpec {
    /// Alphabet order; inferred from first use when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    /// Known orders of individual letters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub orders: BTreeMap<String, u64>,
    pub charts: Vec<ChartSpec>,
    #[serde(default)]
    pub gluings: Vec<GluingSpec>,
    #[serde(default)]
    pub products: Vec<ProductSpec>,
    /// Additional relations of the presented group.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relators: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub id: usize,
    pub name: Option<String>,
    pub group_ref: GroupRef,
    pub group: Arc<FiniteGroup>,
    /// Word for each generator of `group`.
    pub generators: Vec<Word>,
    pub action: Option<Vec<Matrix3<f64>>>,
    pub signs: Option<Vec<i8>>,
    canonical: Vec<Vec<usize>>,
}

impl Chart {
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.id.to_string())
    }

    /// Word for a local group element.
    pub fn element_word(&self, x: usize) -> Word {
        Word::from_letters(self.canonical[x].iter().map(|&k| (k, 1))).substitute(&self.generators)
    }

    /// Orientation sign of every local group element, from declared signs or
    /// from determinants of the action.
    pub fn element_signs(&self) -> Option<Vec<i8>> {
        let gens: Vec<i8> = match (&self.signs, &self.action) {
            (Some(s), _) => s.clone(),
            (None, Some(a)) => a.iter().map(|m| if m.determinant() < 0.0 { -1 } else { 1 }).collect(),
            (None, None) if self.group.order() == 1 => Vec::new(),
            (None, None) => return None,
        };
        if gens.len() != self.group.generators().len() {
            return None;
        }
        Some(
            self.canonical
                .iter()
                .map(|w| w.iter().map(|&k| gens[k]).product())
                .collect(),
        )
    }

    /// Matrix of every local group element under the action.
    pub fn element_matrices(&self) -> Option<Vec<Matrix3<f64>>> {
        let a = self.action.as_ref()?;
        if a.len() != self.group.generators().len() {
            return None;
        }
        Some(
            self.canonical
                .iter()
                .map(|w| w.iter().fold(Matrix3::identity(), |m, &k| m * a[k]))
                .collect(),
        )
    }

    pub(crate) fn letter_generators(&self) -> Option<Vec<usize>> {
        let mut letters = Vec::new();
        for w in &self.generators {
            match w.syllables() {
                [(g, 1)] if !letters.contains(g) => letters.push(*g),
                _ => return None,
            }
        }
        Some(letters)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductEntry {
    pub left: (usize, usize, Word),
    pub right: (usize, usize, Word),
    pub result: (usize, usize, Word),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnknownChart,
    UnknownGenerator,
    ChartGenerators,
    Action,
    Signs,
    Torsion,
    Symmetry,
    Diagonal,
    CosetCount,
    CosetClosure,
    Product,
    Nerve,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Chart ids involved.
    pub charts: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind, charts: &[usize]) -> bool {
        self.violations.iter().any(|v| v.kind == kind && v.charts == charts)
    }
}

const ACTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct OrbifoldAtlas {
    alphabet: Vec<String>,
    charts: Vec<Chart>,
    gluings: BTreeMap<(usize, usize), Vec<Word>>,
    products: Vec<ProductEntry>,
    orders: Vec<Option<u64>>,
    relators: Vec<Word>,
    owner: Vec<Option<(usize, usize)>>,
    issues: Vec<Violation>,
}

fn fresh_letter(alphabet: &[String]) -> String {
    ('a'..='z')
        .filter(|&c| c != 'e')
        .map(String::from)
        .find(|c| !alphabet.contains(c))
        .unwrap_or_else(|| format!("x{}", alphabet.len()))
}

impl OrbifoldAtlas {
    /// Builds an atlas. Unknown groups and malformed words are errors;
    /// structural problems (such as gluings naming missing charts) are kept
    /// and reported by [`OrbifoldAtlas::validate`].
    pub fn from_spec(spec: &AtlasSpec) -> Result<Self> {
        let declared_alphabet = spec.generators.is_some();
        let mut alphabet = spec.generators.clone().unwrap_or_default();
        let mut issues = Vec::new();
        let parse = |s: &str, alphabet: &mut Vec<String>, charts: Vec<usize>, issues: &mut Vec<Violation>| {
            let before = alphabet.len();
            let w = Word::parse(s, alphabet, true)?;
            if declared_alphabet && alphabet.len() > before {
                issues.push(Violation {
                    kind: ViolationKind::UnknownGenerator,
                    charts,
                    detail: format!("word {s:?} uses undeclared {:?}", &alphabet[before..]),
                });
            }
            Ok::<Word, Error>(w)
        };

        let mut charts = Vec::new();
        let mut index_of = BTreeMap::new();
        for c in &spec.charts {
            if index_of.insert(c.id, charts.len()).is_some() {
                return Err(domain!("duplicate chart id {}", c.id));
            }
            let group = c.group.resolve()?;
            let generators = match &c.generators {
                Some(ws) => ws
                    .iter()
                    .map(|s| parse(s, &mut alphabet, vec![c.id], &mut issues))
                    .collect::<Result<Vec<_>>>()?,
                None => (0..group.generators().len())
                    .map(|_| {
                        let l = fresh_letter(&alphabet);
                        alphabet.push(l);
                        Word::letter(alphabet.len() - 1)
                    })
                    .collect(),
            };
            charts.push(Chart {
                id: c.id,
                name: c.name.clone(),
                group_ref: c.group.clone(),
                canonical: group.canonical_words(),
                group,
                generators,
                action: c.action.as_ref().map(|ms| ms.iter().map(|m| Matrix3::from_fn(|r, k| m[r][k])).collect()),
                signs: c.signs.clone(),
            });
        }

        let chart_index = |id: usize, issues: &mut Vec<Violation>| match index_of.get(&id) {
            Some(&k) => Some(k),
            None => {
                issues.push(Violation {
                    kind: ViolationKind::UnknownChart,
                    charts: vec![id],
                    detail: format!("no chart with id {id}"),
                });
                None
            }
        };

        let mut gluings: BTreeMap<(usize, usize), Vec<Word>> = BTreeMap::new();
        for g in &spec.gluings {
            let (Some(i), Some(j)) = (chart_index(g.i, &mut issues), chart_index(g.j, &mut issues)) else {
                continue;
            };
            let words = g
                .elements
                .iter()
                .map(|s| parse(s, &mut alphabet, vec![g.i, g.j], &mut issues))
                .collect::<Result<Vec<_>>>()?;
            gluings.entry((i, j)).or_default().extend(words);
        }

        let mut products = Vec::new();
        for p in &spec.products {
            let mut side = |t: &(usize, usize, String), issues: &mut Vec<Violation>| -> Result<Option<(usize, usize, Word)>> {
                let i = chart_index(t.0, issues);
                let j = chart_index(t.1, issues);
                let w = parse(&t.2, &mut alphabet, vec![t.0, t.1], issues)?;
                Ok(i.zip(j).map(|(i, j)| (i, j, w)))
            };
            let l = side(&p.left, &mut issues)?;
            let r = side(&p.right, &mut issues)?;
            let o = side(&p.result, &mut issues)?;
            if let (Some(left), Some(right), Some(result)) = (l, r, o) {
                products.push(ProductEntry { left, right, result });
            }
        }

        let relators = spec
            .relators
            .iter()
            .map(|s| parse(s, &mut alphabet, vec![], &mut issues))
            .collect::<Result<Vec<_>>>()?;
        let mut orders = vec![None; alphabet.len()];
        for (name, &n) in &spec.orders {
            match alphabet.iter().position(|a| a == name) {
                Some(g) => orders[g] = Some(n),
                None if declared_alphabet => issues.push(Violation {
                    kind: ViolationKind::UnknownGenerator,
                    charts: vec![],
                    detail: format!("order given for undeclared {name:?}"),
                }),
                None => {
                    alphabet.push(name.clone());
                    orders.push(Some(n));
                }
            }
        }
        if let Some(&bad) = spec.orders.values().find(|&&n| n == 0) {
            return Err(domain!("letter order {bad} must be positive"));
        }

        let mut atlas = OrbifoldAtlas {
            alphabet,
            charts,
            gluings,
            products,
            orders,
            relators,
            owner: Vec::new(),
            issues,
        };
        atlas.owner = atlas.letter_owners();
        Ok(atlas)
    }

    /// Parses JSON.
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: AtlasSpec = serde_json::from_str(s)?;
        OrbifoldAtlas::from_spec(&spec)
    }

    pub fn to_spec(&self) -> AtlasSpec {
        let show = |w: &Word| w.display(&self.alphabet);
        let id = |k: usize| self.charts[k].id;
        let side = |t: &(usize, usize, Word)| (id(t.0), id(t.1), show(&t.2));
        AtlasSpec {
            generators: Some(self.alphabet.clone()),
            orders: self
                .orders
                .iter()
                .enumerate()
                .filter_map(|(g, o)| o.map(|n| (self.alphabet[g].clone(), n)))
                .collect(),
            charts: self
                .charts
                .iter()
                .map(|c| ChartSpec {
                    id: c.id,
                    name: c.name.clone(),
                    group: c.group_ref.clone(),
                    generators: Some(c.generators.iter().map(show).collect()),
                    action: c
                        .action
                        .as_ref()
                        .map(|ms| ms.iter().map(|m| std::array::from_fn(|r| std::array::from_fn(|k| m[(r, k)]))).collect()),
                    signs: c.signs.clone(),
                })
                .collect(),
            gluings: self
                .gluings
                .iter()
                .map(|(&(i, j), ws)| GluingSpec {
                    i: id(i),
                    j: id(j),
                    elements: ws.iter().map(show).collect(),
                })
                .collect(),
            products: self
                .products
                .iter()
                .map(|p| ProductSpec {
                    left: side(&p.left),
                    right: side(&p.right),
                    result: side(&p.result),
                })
                .collect(),
            relators: self.relators.iter().map(show).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("atlas spec serializes")
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn gluings(&self) -> &BTreeMap<(usize, usize), Vec<Word>> {
        &self.gluings
    }

    pub fn products(&self) -> &[ProductEntry] {
        &self.products
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn explicit_orders(&self) -> &[Option<u64>] {
        &self.orders
    }

    /// Index of the chart with the given id.
    pub fn chart_index(&self, id: usize) -> Option<usize> {
        self.charts.iter().position(|c| c.id == id)
    }

    /// `Γ_ij` by chart index; `Γ_ii` defaults to the local group.
    pub fn gluing(&self, i: usize, j: usize) -> Vec<Word> {
        match self.gluings.get(&(i, j)) {
            Some(ws) => ws.clone(),
            None if i == j => (0..self.charts[i].group.order()).map(|x| self.charts[i].element_word(x)).collect(),
            None => Vec::new(),
        }
    }

    /// For each letter, the first chart whose generators are distinct single
    /// letters including it, with the generator position.
    fn letter_owners(&self) -> Vec<Option<(usize, usize)>> {
        let mut owner = vec![None; self.alphabet.len()];
        for (ci, c) in self.charts.iter().enumerate() {
            if let Some(letters) = c.letter_generators() {
                for (k, &g) in letters.iter().enumerate() {
                    if owner[g].is_none() {
                        owner[g] = Some((ci, k));
                    }
                }
            }
        }
        owner
    }

    /// Normal form used to compare elements: free reduction, explicit
    /// letter orders, and every maximal run of letters owned by one chart
    /// rewritten to the canonical word of the local group element it spells.
    pub fn normal_form(&self, w: &Word) -> Word {
        let mut cur = w.normalized(&self.orders);
        loop {
            let syl = cur.syllables().to_vec();
            let mut out = Word::identity();
            let mut k = 0;
            while k < syl.len() {
                let (g, _) = syl[k];
                let Some((ci, _)) = self.owner.get(g).copied().flatten() else {
                    out = out.mul(&Word::from_letters([syl[k]]));
                    k += 1;
                    continue;
                };
                let chart = &self.charts[ci];
                let grp = &chart.group;
                let mut x = grp.identity();
                while k < syl.len() {
                    let (h, e) = syl[k];
                    match self.owner.get(h).copied().flatten() {
                        Some((cj, pos)) if cj == ci => {
                            x = grp.mul(x, grp.pow(grp.generators()[pos], e));
                            k += 1;
                        }
                        _ => break,
                    }
                }
                out = out.mul(&chart.element_word(x));
            }
            let next = out.normalized(&self.orders);
            if next == cur {
                return next;
            }
            cur = next;
        }
    }

    fn nf_set(&self, ws: &[Word]) -> BTreeSet<Word> {
        ws.iter().map(|w| self.normal_form(w)).collect()
    }

    /// Every violated invariant; empty iff the atlas is consistent.
    pub fn validate(&self) -> ValidationReport {
        let mut v = self.issues.clone();
        let push = |v: &mut Vec<Violation>, kind, charts: Vec<usize>, detail: String| v.push(Violation { kind, charts, detail });
        let ids: Vec<usize> = self.charts.iter().map(|c| c.id).collect();

        for c in &self.charts {
            let ng = c.group.generators().len();
            if c.generators.len() != ng {
                push(&mut v, ViolationKind::ChartGenerators, vec![c.id], format!("{} words for {ng} local generators", c.generators.len()));
                continue;
            }
            if let Some(a) = &c.action {
                if a.len() != ng {
                    push(&mut v, ViolationKind::Action, vec![c.id], format!("{} matrices for {ng} local generators", a.len()));
                } else if let Err(e) = check_faithful(&c.group, &c.element_matrices().unwrap()) {
                    push(&mut v, ViolationKind::Action, vec![c.id], e);
                }
            }
            if let Some(s) = &c.signs {
                if s.len() != ng || s.iter().any(|&x| x != 1 && x != -1) {
                    push(&mut v, ViolationKind::Signs, vec![c.id], "signs must be ±1, one per local generator".into());
                } else if let Err(e) = check_sign_character(&c.group, &c.element_signs().unwrap()) {
                    push(&mut v, ViolationKind::Signs, vec![c.id], e);
                }
            }
        }

        // torsion carried by each letter
        let mut implied: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); self.alphabet.len()];
        for c in &self.charts {
            if let Some(letters) = c.letter_generators() {
                for (k, &g) in letters.iter().enumerate() {
                    implied[g].insert(c.group.element_order(c.group.generators()[k]) as u64);
                }
            }
        }
        for (g, o) in self.orders.iter().enumerate() {
            if let Some(n) = o {
                implied[g].insert(*n);
            }
        }
        for (g, set) in implied.iter().enumerate() {
            if set.len() > 1 {
                let charts = self
                    .charts
                    .iter()
                    .filter(|c| c.generators.iter().any(|w| w.syllables() == [(g, 1)]))
                    .map(|c| c.id)
                    .collect();
                push(&mut v, ViolationKind::Torsion, charts, format!("letter {} given orders {:?}", self.alphabet[g], set));
            }
        }

        let n = self.charts.len();
        for i in 0..n {
            for j in 0..n {
                let gij = self.gluing(i, j);
                if gij.is_empty() {
                    continue;
                }
                let set = self.nf_set(&gij);
                let back = self.nf_set(&self.gluing(j, i));
                for w in &set {
                    if !back.contains(&self.normal_form(&w.inverse())) {
                        push(
                            &mut v,
                            ViolationKind::Symmetry,
                            vec![ids[i], ids[j]],
                            format!("inverse of {} missing from Γ_{}{}", w.display(&self.alphabet), ids[j], ids[i]),
                        );
                    }
                }
                let gi: Vec<Word> = (0..self.charts[i].group.order()).map(|x| self.charts[i].element_word(x)).collect();
                let gj: Vec<Word> = (0..self.charts[j].group.order()).map(|x| self.charts[j].element_word(x)).collect();
                if i == j && set != self.nf_set(&gi) {
                    push(&mut v, ViolationKind::Diagonal, vec![ids[i], ids[i]], "Γ_ii differs from the local group".into());
                }
                if !set.len().is_multiple_of(gj.len()) {
                    push(
                        &mut v,
                        ViolationKind::CosetCount,
                        vec![ids[i], ids[j]],
                        format!("|Γ_ij| = {} is not a multiple of |Γ_j| = {}", set.len(), gj.len()),
                    );
                }
                let left_ok = set.iter().all(|w| gi.iter().all(|h| set.contains(&self.normal_form(&h.mul(w)))));
                let right_ok = set.iter().all(|w| gj.iter().all(|h| set.contains(&self.normal_form(&w.mul(h)))));
                if !(left_ok && right_ok) {
                    push(&mut v, ViolationKind::CosetClosure, vec![ids[i], ids[j]], "Γ_ij is not a union of Γ_i·γ·Γ_j".into());
                }
            }
        }

        for p in &self.products {
            let (i, j, ref l) = p.left;
            let (j2, k, ref r) = p.right;
            let (i2, k2, ref o) = p.result;
            let charts = vec![ids[i], ids[j], ids[k]];
            if j != j2 || i != i2 || k != k2 {
                push(&mut v, ViolationKind::Product, charts, "product entry chart indices do not chain".into());
                continue;
            }
            for (a, b, w) in [(i, j, l), (j, k, r), (i, k, o)] {
                if !self.nf_set(&self.gluing(a, b)).contains(&self.normal_form(w)) {
                    push(
                        &mut v,
                        ViolationKind::Product,
                        charts.clone(),
                        format!("{} not in Γ_{}{}", w.display(&self.alphabet), ids[a], ids[b]),
                    );
                }
            }
        }

        if n > 0 {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut queue = VecDeque::from([0]);
            while let Some(a) = queue.pop_front() {
                for (&(i, j), ws) in &self.gluings {
                    if ws.is_empty() {
                        continue;
                    }
                    for (x, y) in [(i, j), (j, i)] {
                        if x == a && !seen[y] {
                            seen[y] = true;
                            queue.push_back(y);
                        }
                    }
                }
            }
            let missing: Vec<usize> = (0..n).filter(|&k| !seen[k]).map(|k| ids[k]).collect();
            if !missing.is_empty() {
                push(&mut v, ViolationKind::Nerve, missing, "charts not connected to the first chart".into());
            }
        }

        v.sort();
        v.dedup();
        ValidationReport { violations: v }
    }

    /// Letters used anywhere in the atlas, in alphabet order.
    pub fn used_letters(&self) -> Vec<usize> {
        let mut used = BTreeSet::new();
        let mut add = |w: &Word| used.extend(w.generators_used());
        self.charts.iter().flat_map(|c| &c.generators).for_each(&mut add);
        self.gluings.values().flatten().for_each(&mut add);
        for p in &self.products {
            add(&p.left.2);
            add(&p.right.2);
            add(&p.result.2);
        }
        self.relators.iter().for_each(&mut add);
        used.extend(self.orders.iter().enumerate().filter(|(_, o)| o.is_some()).map(|(g, _)| g));
        used.into_iter().collect()
    }

    /// Presentation of the deck group: local group relations of every
    /// chart, one relation per recorded triple-overlap product, explicit
    /// letter orders and extra relators, canonicalized.
    pub fn presentation(&self) -> Result<Presentation> {
        let report = self.validate();
        if let Some(first) = report.violations.first() {
            return Err(precondition!(
                "atlas is inconsistent ({} violations; first: {:?} at charts {:?}: {})",
                report.violations.len(),
                first.kind,
                first.charts,
                first.detail
            ));
        }
        let used = self.used_letters();
        let mut relabel = vec![usize::MAX; self.alphabet.len()];
        for (k, &g) in used.iter().enumerate() {
            relabel[g] = k;
        }
        let re = |w: &Word| Word::from_letters(w.syllables().iter().map(|&(g, e)| (relabel[g], e)));
        let mut rels = Vec::new();
        for c in &self.charts {
            let names: Vec<String> = (0..c.generators.len()).map(|k| format!("x{k}")).collect();
            for r in c.group.presentation(&names).relations {
                rels.push(re(&r.substitute(&c.generators)));
            }
        }
        for p in &self.products {
            rels.push(re(&p.left.2.mul(&p.right.2).mul(&p.result.2.inverse())));
        }
        for r in &self.relators {
            rels.push(re(r));
        }
        for (g, o) in self.orders.iter().enumerate() {
            if let Some(n) = o {
                rels.push(Word::power(relabel[g], *n as i64));
            }
        }
        let names = used.iter().map(|&g| self.alphabet[g].clone()).collect();
        let mut p = Presentation::new(names, rels.into_iter().map(|r| r.free_reduced()).filter(|r| !r.is_empty()).collect());
        p.canonicalize_relations(&[]);
        Ok(p)
    }

    /// Whether any chart carries no orientation data.
    pub fn has_orientation_data(&self) -> bool {
        self.charts.iter().all(|c| c.element_signs().is_some())
    }
}

/// Multiplication-table and injectivity check of a matrix representation.
fn check_faithful(g: &FiniteGroup, mats: &[Matrix3<f64>]) -> std::result::Result<(), String> {
    let n = g.order();
    for x in 0..n {
        for y in 0..n {
            let d = (mats[x] * mats[y] - mats[g.mul(x, y)]).amax();
            if d > ACTION_TOL {
                return Err(format!("action is not a homomorphism (defect {d:.3e} at elements {x},{y})"));
            }
        }
    }
    for x in 1..n {
        if (mats[x] - Matrix3::identity()).amax() <= ACTION_TOL {
            return Err(format!("action is not faithful (element {x} acts trivially)"));
        }
    }
    Ok(())
}

fn check_sign_character(g: &FiniteGroup, signs: &[i8]) -> std::result::Result<(), String> {
    for x in 0..g.order() {
        for y in 0..g.order() {
            if signs[x] * signs[y] != signs[g.mul(x, y)] {
                return Err(format!("signs are not a character (elements {x},{y})"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atlas(json: &str) -> OrbifoldAtlas {
        OrbifoldAtlas::from_json(json).unwrap()
    }

    #[test]
    fn single_chart_is_consistent() {
        let a = atlas(r#"{"charts":[{"id":1,"group":"Z2"}],"gluings":[{"i":1,"j":1,"elements":["e","a"]}]}"#);
        assert!(a.validate().is_empty(), "{:?}", a.validate());
        let p = a.presentation().unwrap();
        assert_eq!(p.to_string_pretty(), "⟨a | a^2⟩");
        let bare = atlas(r#"{"charts":[{"id":0,"group":"Z2"}]}"#);
        assert_eq!(bare.presentation().unwrap().to_string_pretty(), "⟨a | a^2⟩");
    }

    #[test]
    fn symmetry_violation_is_reported() {
        let a = atlas(
            r#"{"charts":[{"id":1,"group":"Z1"},{"id":2,"group":"Z1"}],
                "gluings":[{"i":1,"j":2,"elements":["t"]},{"i":2,"j":1,"elements":["t"]}]}"#,
        );
        let r = a.validate();
        assert!(r.has(ViolationKind::Symmetry, &[1, 2]), "{r:?}");
        assert!(matches!(a.presentation(), Err(Error::Precondition(_))));
    }

    #[test]
    fn diagonal_and_count_violations() {
        let a = atlas(
            r#"{"charts":[{"id":0,"group":"Z3","generators":["a"]},{"id":1,"group":"Z1"}],
                "gluings":[{"i":0,"j":0,"elements":["e","a"]},
                           {"i":0,"j":1,"elements":["e","a"]},{"i":1,"j":0,"elements":["e","a^2"]}]}"#,
        );
        let r = a.validate();
        assert!(r.has(ViolationKind::Diagonal, &[0, 0]));
        assert!(r.has(ViolationKind::CosetCount, &[1, 0]));
        assert!(r.has(ViolationKind::CosetClosure, &[0, 1]));
    }

    #[test]
    fn nerve_and_unknown_chart() {
        let a = atlas(r#"{"charts":[{"id":0,"group":"Z1"},{"id":1,"group":"Z1"}],"gluings":[{"i":0,"j":7,"elements":["e"]}]}"#);
        let r = a.validate();
        assert!(r.has(ViolationKind::Nerve, &[1]));
        assert!(r.has(ViolationKind::UnknownChart, &[7]));
    }

    #[test]
    fn action_must_be_faithful_homomorphism() {
        let refl = r#"[[1,0,0],[0,-1,0],[0,0,1]]"#;
        let id = r#"[[1,0,0],[0,1,0],[0,0,1]]"#;
        let rot = r#"[[0,-1,0],[1,0,0],[0,0,1]]"#;
        let ok = atlas(&format!(r#"{{"charts":[{{"id":0,"group":"Z2","action":[{refl}]}}]}}"#));
        assert!(ok.validate().is_empty());
        assert_eq!(ok.charts()[0].element_signs().unwrap(), vec![1, -1]);
        let trivial = atlas(&format!(r#"{{"charts":[{{"id":0,"group":"Z2","action":[{id}]}}]}}"#));
        assert!(trivial.validate().has(ViolationKind::Action, &[0]));
        let wrong = atlas(&format!(r#"{{"charts":[{{"id":0,"group":"Z2","action":[{rot}]}}]}}"#));
        assert!(wrong.validate().has(ViolationKind::Action, &[0]));
    }

    #[test]
    fn torsion_conflict_and_unknown_letter() {
        let a = atlas(
            r#"{"charts":[{"id":0,"group":"Z2","generators":["a"]},{"id":1,"group":"Z3","generators":["a"]}],
                "gluings":[{"i":0,"j":1,"elements":["e"]},{"i":1,"j":0,"elements":["e"]}]}"#,
        );
        assert!(a.validate().violations.iter().any(|v| v.kind == ViolationKind::Torsion));
        let b = atlas(r#"{"generators":["a"],"charts":[{"id":0,"group":"Z2","generators":["b"]}]}"#);
        assert!(b.validate().violations.iter().any(|v| v.kind == ViolationKind::UnknownGenerator));
    }

    #[test]
    fn normal_form_uses_local_groups() {
        let a = atlas(r#"{"charts":[{"id":0,"group":"S3","generators":["s","t"]}]}"#);
        let w = |s: &str| {
            let mut al = a.alphabet().to_vec();
            Word::parse(s, &mut al, false).unwrap()
        };
        assert_eq!(a.normal_form(&w("s^3")), a.normal_form(&w("s")));
        assert_eq!(a.normal_form(&w("t^-1")), a.normal_form(&w("t^2")));
        assert!(a.validate().is_empty(), "{:?}", a.validate());
    }

    #[test]
    fn spec_roundtrip() {
        let a = atlas(r#"{"charts":[{"id":3,"name":"M","group":"Z2"}],"relators":["a^4"]}"#);
        let back = OrbifoldAtlas::from_spec(&a.to_spec()).unwrap();
        assert_eq!(back.to_spec(), a.to_spec());
    }
}
