//! Orientation double cover of an atlas.
//!
//! The orientation character `sgn` is read off the local groups (declared
//! signs or determinants of the action) and extended to the alphabet; letters
//! that no chart constrains are orientation preserving. The cover is the
//! covering for `K = ker sgn`. Its charts are the lifts `t·Lᵢ`, `t ∈ {e, ρ}`
//! for a fixed orientation-reversing letter `ρ`: two lifts when `Γᵢ ⊆ K`,
//! one lift with local group `Γᵢ ∩ K` otherwise. Gluings are
//! `K ∩ t·Γ_ij·t'⁻¹`, rewritten into generators of `K` by
//! Reidemeister–Schreier and then Tietze-simplified.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::atlas::{AtlasSpec, ChartSpec, GluingSpec, GroupRef, OrbifoldAtlas, ProductSpec};
use crate::covering::MonodromyCovering;
use crate::error::{domain, Result};
use crate::perm::Perm;
use crate::subgroup::Subgroup;
use crate::word::{Presentation, Word};

/// Which chart of the base a chart of the cover lies over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sheet {
    pub base_chart: usize,
    /// `+1`/`-1` for the two lifts of a chart with orientation-preserving
    /// local group; `0` for the single lift of any other chart.
    pub sheet: i8,
}

#[derive(Clone, Debug)]
pub struct DoubleCover {
    pub atlas: OrbifoldAtlas,
    /// Simplified presentation of `ker sgn`.
    pub presentation: Presentation,
    pub sheets: Vec<Sheet>,
    /// The two-sheeted covering defined by `sgn`, over the base presentation.
    pub character: MonodromyCovering,
    pub connected: bool,
}

/// Orientation sign of every alphabet letter.
pub fn orientation_signs(a: &OrbifoldAtlas) -> Result<Vec<i8>> {
    let mut signs: Vec<Option<i8>> = vec![None; a.alphabet().len()];
    for c in a.charts() {
        let Some(el) = c.element_signs() else {
            return Err(domain!("chart {} has no orientation data (action or signs)", c.label()));
        };
        if let Some(letters) = c.letter_generators() {
            for (k, &g) in letters.iter().enumerate() {
                let s = el[c.group.generators()[k]];
                match signs[g] {
                    Some(t) if t != s => {
                        return Err(domain!("letter {} has conflicting orientation signs", a.alphabet()[g]))
                    }
                    _ => signs[g] = Some(s),
                }
            }
        }
    }
    let signs: Vec<i8> = signs.into_iter().map(|s| s.unwrap_or(1)).collect();
    for c in a.charts() {
        let el = c.element_signs().unwrap();
        for (k, w) in c.generators.iter().enumerate() {
            if word_sign(&signs, w) != el[c.group.generators()[k]] {
                return Err(domain!("chart {} generator {k} has inconsistent orientation sign", c.label()));
            }
        }
    }
    Ok(signs)
}

fn word_sign(signs: &[i8], w: &Word) -> i8 {
    w.letters().map(|(g, _)| signs[g]).product()
}

struct Rewriter {
    signs: Vec<i8>,
    rho: usize,
    /// K-generator index of `s(0, x)` and `s(1, x)`.
    index: Vec<[Option<usize>; 2]>,
}

impl Rewriter {
    /// Reidemeister–Schreier rewriting of a word in `K`, reading left to
    /// right from the coset `K`.
    fn rewrite(&self, w: &Word) -> Word {
        let mut coset = 0usize;
        let mut out = Word::identity();
        for (x, s) in w.letters() {
            let flip = usize::from(self.signs[x] < 0);
            if s > 0 {
                if let Some(k) = self.index[x][coset] {
                    out = out.mul(&Word::letter(k));
                }
                coset ^= flip;
            } else {
                coset ^= flip;
                if let Some(k) = self.index[x][coset] {
                    out = out.mul(&Word::power(k, -1));
                }
            }
        }
        debug_assert_eq!(coset, 0, "word is not in the kernel");
        out
    }

    fn t(&self, lift: usize) -> Word {
        if lift == 0 {
            Word::identity()
        } else {
            Word::letter(self.rho)
        }
    }
}

pub fn orientation_double_cover(a: &OrbifoldAtlas) -> Result<DoubleCover> {
    let base = a.presentation()?;
    let signs = orientation_signs(a)?;
    let used = a.used_letters();
    let to_alpha = |w: &Word| Word::from_letters(w.syllables().iter().map(|&(g, e)| (used[g], e)));
    let base_relators: Vec<Word> = base.relations.iter().map(to_alpha).collect();
    if let Some(r) = base_relators.iter().find(|r| word_sign(&signs, r) < 0) {
        return Err(domain!("relation {} reverses orientation", r.display(a.alphabet())));
    }
    let character = {
        let action = used
            .iter()
            .map(|&g| Perm::from_images(if signs[g] < 0 { vec![1, 0] } else { vec![0, 1] }).unwrap())
            .collect();
        MonodromyCovering::new(base.clone(), action, 0)?
    };
    let rho = used.iter().copied().find(|&g| signs[g] < 0);

    let Some(rho) = rho else {
        return disjoint_double(a, base, character);
    };

    let mut names = Vec::new();
    let mut index = vec![[None, None]; a.alphabet().len()];
    for lift in 0..2 {
        for &x in &used {
            if lift == 0 && x == rho {
                continue;
            }
            index[x][lift] = Some(names.len());
            let prime = if lift == 1 { "'" } else { "" };
            names.push(format!("{}{prime}", a.alphabet()[x]));
        }
    }
    let rw = Rewriter { signs: signs.clone(), rho, index };
    let mut k_relators = Vec::new();
    for r in &base_relators {
        k_relators.push(rw.rewrite(r));
        k_relators.push(rw.rewrite(&rw.t(1).mul(r).mul(&rw.t(1).inverse())));
    }
    let (simplified, images) = Presentation::new(names, k_relators).simplify();
    let sub = |w: &Word| rw.rewrite(w).substitute(&images).free_reduced();
    let show = |w: &Word| w.display(&simplified.generators);

    // lifts of each chart and their new indices
    let mut lifts: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut sheets = Vec::new();
    let mut charts = Vec::new();
    for (i, c) in a.charts().iter().enumerate() {
        let el = c.element_signs().unwrap();
        let preserving = el.iter().all(|&s| s > 0);
        let mut mine = Vec::new();
        if preserving {
            for lift in 0..2 {
                let t = rw.t(lift);
                mine.push((lift, charts.len()));
                sheets.push(Sheet {
                    base_chart: c.id,
                    sheet: if lift == 0 { 1 } else { -1 },
                });
                charts.push(ChartSpec {
                    id: charts.len(),
                    name: Some(format!("{}{}", c.label(), if lift == 0 { "+" } else { "-" })),
                    group: c.group_ref.clone(),
                    generators: Some(c.generators.iter().map(|w| show(&sub(&t.mul(w).mul(&t.inverse())))).collect()),
                    action: c.action.as_ref().map(|ms| ms.iter().map(to_rows).collect()),
                    signs: c.signs.clone(),
                });
            }
        } else {
            let members: Vec<usize> = (0..c.group.order()).filter(|&x| el[x] > 0).collect();
            let kernel = Subgroup::generated(&c.group, &members)?;
            let gens = kernel.generating_set();
            let group = if kernel.is_trivial() {
                GroupRef::Name("Z1".into())
            } else {
                GroupRef::Spec(kernel.as_group(&format!("ker({})", c.group.name())).spec())
            };
            let mats = c.element_matrices();
            mine.push((0, charts.len()));
            sheets.push(Sheet {
                base_chart: c.id,
                sheet: 0,
            });
            charts.push(ChartSpec {
                id: charts.len(),
                name: Some(c.label()),
                group,
                generators: Some(gens.iter().map(|&x| show(&sub(&c.element_word(x)))).collect()),
                action: mats.map(|m| gens.iter().map(|&x| to_rows(&m[x])).collect()),
                signs: if c.action.is_none() { Some(vec![1; gens.len()]) } else { None },
            });
        }
        debug_assert_eq!(i, lifts.len());
        lifts.push(mine);
    }

    let mut gluings = Vec::new();
    let n = a.charts().len();
    for i in 0..n {
        for j in 0..n {
            let gij = a.gluing(i, j);
            for &(ti, ni) in &lifts[i] {
                for &(tj, nj) in &lifts[j] {
                    let mut seen = BTreeSet::new();
                    let mut els = Vec::new();
                    for g in &gij {
                        let w = rw.t(ti).mul(g).mul(&rw.t(tj).inverse());
                        if word_sign(&signs, &w) < 0 {
                            continue;
                        }
                        let s = sub(&w);
                        if seen.insert(s.clone()) {
                            els.push(show(&s));
                        }
                    }
                    if !els.is_empty() {
                        gluings.push(GluingSpec { i: ni, j: nj, elements: els });
                    }
                }
            }
        }
    }

    // lift `t·γ` into K by choosing the lift t' of chart j and h ∈ Γ_j
    let land = |t: &Word, g: &Word, j: usize| -> (usize, usize, Word) {
        let cj = &a.charts()[j];
        for &(tj, nj) in &lifts[j] {
            for x in 0..cj.group.order() {
                let h = cj.element_word(x);
                if word_sign(&signs, &t.mul(g).mul(&h).mul(&rw.t(tj))) > 0 {
                    return (tj, nj, h);
                }
            }
        }
        unreachable!("every chart lift is reachable inside K")
    };
    let mut products = Vec::new();
    for p in a.products() {
        let (i, j, ref g1) = p.left;
        let (_, k, ref g2) = p.right;
        let g3 = &p.result.2;
        for &(ti, ni) in &lifts[i] {
            let t = rw.t(ti);
            let (tj, nj, h) = land(&t, g1, j);
            let (tk, nk, h3) = land(&t, g3, k);
            let left = t.mul(g1).mul(&h).mul(&rw.t(tj).inverse());
            let right = rw.t(tj).mul(&h.inverse()).mul(g2).mul(&h3).mul(&rw.t(tk).inverse());
            let result = t.mul(g3).mul(&h3).mul(&rw.t(tk).inverse());
            products.push(ProductSpec {
                left: (ni, nj, show(&sub(&left))),
                right: (nj, nk, show(&sub(&right))),
                result: (ni, nk, show(&sub(&result))),
            });
        }
    }

    let spec = AtlasSpec {
        generators: Some(simplified.generators.clone()),
        orders: Default::default(),
        charts,
        gluings,
        products,
        relators: simplified.relations.iter().map(show).collect(),
    };
    let atlas = OrbifoldAtlas::from_spec(&spec)?;
    let connected = character.is_connected();
    Ok(DoubleCover {
        atlas,
        presentation: simplified,
        sheets,
        character,
        connected,
    })
}

fn to_rows(m: &nalgebra::Matrix3<f64>) -> [[f64; 3]; 3] {
    std::array::from_fn(|r| std::array::from_fn(|k| m[(r, k)]))
}

/// Two copies of an orientable atlas, one per orientation.
fn disjoint_double(a: &OrbifoldAtlas, base: Presentation, character: MonodromyCovering) -> Result<DoubleCover> {
    let spec = a.to_spec();
    let n = spec.charts.len();
    let pos = |id: usize| a.chart_index(id).expect("spec ids come from the atlas");
    let mut charts = Vec::new();
    let mut sheets = Vec::new();
    for (s, sign) in [(0usize, 1i8), (1, -1)] {
        for (k, c) in spec.charts.iter().enumerate() {
            let mut c = c.clone();
            sheets.push(Sheet {
                base_chart: c.id,
                sheet: sign,
            });
            c.name = Some(format!("{}{}", a.charts()[k].label(), if sign > 0 { "+" } else { "-" }));
            c.id = s * n + k;
            charts.push(c);
        }
    }
    let mut gluings = Vec::new();
    let mut products = Vec::new();
    for s in 0..2 {
        let off = s * n;
        for g in &spec.gluings {
            gluings.push(GluingSpec {
                i: off + pos(g.i),
                j: off + pos(g.j),
                elements: g.elements.clone(),
            });
        }
        for p in &spec.products {
            let m = |t: &(usize, usize, String)| (off + pos(t.0), off + pos(t.1), t.2.clone());
            products.push(ProductSpec {
                left: m(&p.left),
                right: m(&p.right),
                result: m(&p.result),
            });
        }
    }
    let atlas = OrbifoldAtlas::from_spec(&AtlasSpec {
        charts,
        gluings,
        products,
        ..spec
    })?;
    Ok(DoubleCover {
        atlas,
        presentation: base,
        sheets,
        connected: character.is_connected(),
        character,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::ViolationKind;
    use crate::atlas_catalog::builtin_atlas;

    fn no_reversing(a: &OrbifoldAtlas) -> bool {
        a.charts().iter().all(|c| c.element_signs().unwrap().iter().all(|&s| s > 0))
    }

    #[test]
    fn interval_double_is_circle() {
        let d = orientation_double_cover(&builtin_atlas("interval_two_mirrors").unwrap()).unwrap();
        assert!(d.connected);
        assert_eq!(d.presentation.to_string_pretty(), "⟨b | ⟩");
        assert!(d.atlas.validate().is_empty(), "{:?}", d.atlas.validate());
        assert_eq!(d.atlas.charts().len(), 2);
        assert!(d.atlas.charts().iter().all(|c| c.group.order() == 1));
        let p = d.atlas.presentation().unwrap();
        assert_eq!(p.abelianization().free_rank, 1);
        assert!(p.relations.is_empty());
    }

    #[test]
    fn disk_mirror_double_is_sphere() {
        let d = orientation_double_cover(&builtin_atlas("disk_mirror").unwrap()).unwrap();
        assert!(d.connected);
        assert!(d.atlas.validate().is_empty(), "{:?}", d.atlas.validate());
        assert_eq!(d.atlas.charts().len(), 5);
        assert!(no_reversing(&d.atlas));
        // local groups are the orientation kernels: trivial inside Z2 mirrors
        assert!(d.atlas.charts().iter().all(|c| c.group.order() == 1));
        assert_eq!(d.presentation.rank(), 0);
    }

    #[test]
    fn orientable_atlas_gives_two_copies() {
        for name in ["torus", "triangle(2,3,3)", "pillowcase"] {
            let base = builtin_atlas(name).unwrap();
            let d = orientation_double_cover(&base).unwrap();
            assert!(!d.connected, "{name}");
            assert_eq!(d.atlas.charts().len(), 2 * base.charts().len());
            let r = d.atlas.validate();
            assert!(r.violations.iter().all(|v| v.kind == ViolationKind::Nerve), "{name}: {r:?}");
            assert!(no_reversing(&d.atlas));
        }
    }

    #[test]
    fn missing_sign_data_is_domain_error() {
        let a = OrbifoldAtlas::from_json(r#"{"charts":[{"id":0,"group":"Z2"}]}"#).unwrap();
        assert!(matches!(orientation_double_cover(&a), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn dihedral_chart_keeps_rotations() {
        // a D4 corner reflector: the kernel of the sign is the rotation group Z4
        let r = "[[0,-1,0],[1,0,0],[0,0,1]]";
        let s = "[[1,0,0],[0,-1,0],[0,0,1]]";
        let a = OrbifoldAtlas::from_json(&format!(
            r#"{{"charts":[{{"id":0,"group":"D4","generators":["r","s"],"action":[{r},{s}]}}]}}"#
        ))
        .unwrap();
        assert!(a.validate().is_empty(), "{:?}", a.validate());
        let d = orientation_double_cover(&a).unwrap();
        assert!(d.connected);
        assert_eq!(d.atlas.charts().len(), 1);
        assert_eq!(d.atlas.charts()[0].group.order(), 4);
        assert!(no_reversing(&d.atlas));
        assert!(d.atlas.validate().is_empty(), "{:?}", d.atlas.validate());
    }
}
