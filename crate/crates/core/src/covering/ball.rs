//! Coverings of a ball quotient `V/G` and their fiber products.
//!
//! A covering is `V/Γ → V/G` for a subgroup `Γ ⊆ G`. A morphism
//! `V/Γ₁ → V/Γ₂` is `[v] ↦ [g·v]` for some `g` with `gΓ₁g⁻¹ ⊆ Γ₂`; two
//! elements give the same morphism iff they lie in the same coset `Γ₂g`.
//!
//! The fiber product of `V/Gᵢ` is `(V × ∏ Gᵢ\G)/G` with `G` acting on the
//! coset factors by `Gᵢx ↦ Gᵢxγ⁻¹`. A component is recorded by a
//! representative tuple `(γᵢ)`, standing for the point `(Gᵢγᵢ⁻¹)ᵢ`, so that
//! its stabilizer is `⋂ γᵢGᵢγᵢ⁻¹`.

use std::sync::Arc;

use crate::error::{domain, Result};
use crate::group::FiniteGroup;
use crate::subgroup::{conjugacy_classes_of_subgroups, conjugate_intersection, double_cosets, CosetSpace, QuotientGroup, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallCovering {
    pub subgroup: Subgroup,
}

impl BallCovering {
    pub fn new(subgroup: Subgroup) -> Self {
        BallCovering { subgroup }
    }

    pub fn base_group(&self) -> &Arc<FiniteGroup> {
        self.subgroup.parent()
    }

    /// Number of sheets over a regular point.
    pub fn degree(&self) -> usize {
        self.subgroup.index()
    }
}

/// One covering per conjugacy class of subgroups, ordered as
/// [`conjugacy_classes_of_subgroups`].
pub fn enumerate_ball_coverings(g: &Arc<FiniteGroup>) -> Vec<BallCovering> {
    conjugacy_classes_of_subgroups(g).into_iter().map(BallCovering::new).collect()
}

/// Morphisms `c1 → c2`, one least representative per double coset
/// `Γ₂gΓ₁` satisfying `gΓ₁g⁻¹ ⊆ Γ₂`.
pub fn ball_covering_morphisms(c1: &BallCovering, c2: &BallCovering) -> Result<Vec<usize>> {
    if !c1.subgroup.same_parent(&c2.subgroup) {
        return Err(domain!("coverings have different base groups"));
    }
    let g = c1.base_group();
    let h1 = &c1.subgroup;
    let h2 = &c2.subgroup;
    Ok(double_cosets(h1, h2)?
        .into_iter()
        .map(|dc| dc[0])
        .filter(|&x| h1.members().iter().all(|&h| h2.contains(g.conj(x, h))))
        .collect())
}

/// Covering automorphisms `N(Γ)/Γ`.
pub fn ball_automorphisms(c: &BallCovering) -> QuotientGroup {
    QuotientGroup::new(&c.subgroup.normalizer(), &c.subgroup).expect("Γ is normal in N(Γ)")
}

#[derive(Clone, Debug)]
pub struct FiberComponent {
    /// `(γᵢ)`, standing for the tuple of cosets `Gᵢγᵢ⁻¹`.
    pub representatives: Vec<usize>,
    /// `⋂ γᵢGᵢγᵢ⁻¹`.
    pub subgroup: Subgroup,
    /// Tuples of coset indices making up this orbit, sorted.
    pub orbit: Vec<Vec<usize>>,
}

impl FiberComponent {
    pub fn index(&self) -> usize {
        self.subgroup.index()
    }

    /// Element realizing the projection `qᵢ: [v] ↦ [γᵢ⁻¹·v]` onto factor `i`.
    pub fn projection(&self, g: &FiniteGroup, i: usize) -> usize {
        g.inv(self.representatives[i])
    }
}

#[derive(Clone, Debug)]
pub struct BallFiberProduct {
    pub factors: Vec<Subgroup>,
    pub coset_spaces: Vec<CosetSpace>,
    /// Sorted by least tuple.
    pub components: Vec<FiberComponent>,
}

impl BallFiberProduct {
    pub fn base_group(&self) -> &Arc<FiniteGroup> {
        self.factors[0].parent()
    }

    /// `∏ [G:Gᵢ]`, the degree of the product over `V/G`.
    pub fn degree(&self) -> usize {
        self.coset_spaces.iter().map(CosetSpace::len).product()
    }
}

pub fn ball_fiber_product(g: &Arc<FiniteGroup>, factors: &[Subgroup]) -> Result<BallFiberProduct> {
    if factors.is_empty() {
        return Err(domain!("fiber product needs at least one factor"));
    }
    if let Some(i) = factors.iter().position(|f| **f.parent() != **g) {
        return Err(domain!("factor {i} is not a subgroup of {}", g.name()));
    }
    let coset_spaces: Vec<CosetSpace> = factors.iter().map(Subgroup::right_cosets).collect();
    let radices: Vec<usize> = coset_spaces.iter().map(CosetSpace::len).collect();
    let total: usize = radices.iter().product();
    let encode = |t: &[usize]| t.iter().zip(&radices).fold(0, |acc, (&x, &r)| acc * r + x);
    let decode = |mut code: usize| {
        let mut t = vec![0; radices.len()];
        for k in (0..radices.len()).rev() {
            t[k] = code % radices[k];
            code /= radices[k];
        }
        t
    };
    let mut seen = vec![false; total];
    let mut components = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let t0 = decode(start);
        let mut orbit = Vec::new();
        for x in 0..g.order() {
            let xi = g.inv(x);
            let t: Vec<usize> = t0.iter().zip(&coset_spaces).map(|(&c, cs)| cs.act_right(c, xi)).collect();
            let code = encode(&t);
            if !seen[code] {
                seen[code] = true;
                orbit.push(t);
            }
        }
        orbit.sort();
        let representatives: Vec<usize> = t0
            .iter()
            .zip(&coset_spaces)
            .map(|(&c, cs)| g.inv(cs.representatives()[c]))
            .collect();
        let subgroup = conjugate_intersection(factors, &representatives)?;
        components.push(FiberComponent {
            representatives,
            subgroup,
            orbit,
        });
    }
    Ok(BallFiberProduct {
        factors: factors.to_vec(),
        coset_spaces,
        components,
    })
}

/// Whether the morphisms `gᵢ: cand → factorᵢ` factor through exactly one
/// morphism from `cand` into a component of `fp` commuting with the
/// projections.
///
/// Returns `false` when some `gᵢ` is not a morphism (`gᵢΓ''gᵢ⁻¹ ⊄ Gᵢ`), since
/// no diagonal can exist then.
pub fn check_universal_property(fp: &BallFiberProduct, cand: &BallCovering, morphs: &[usize]) -> Result<bool> {
    let g = fp.base_group();
    if **cand.base_group() != **g {
        return Err(domain!("candidate covering has a different base group"));
    }
    if morphs.len() != fp.factors.len() {
        return Err(domain!("{} morphisms for {} factors", morphs.len(), fp.factors.len()));
    }
    if let Some(&m) = morphs.iter().find(|&&m| m >= g.order()) {
        return Err(domain!("morphism element {m} out of range"));
    }
    let gpp = &cand.subgroup;
    let compatible = fp
        .factors
        .iter()
        .zip(morphs)
        .all(|(gi, &m)| gpp.members().iter().all(|&h| gi.contains(g.conj(m, h))));
    if !compatible {
        return Ok(false);
    }
    let targets: Vec<usize> = fp.coset_spaces.iter().zip(morphs).map(|(cs, &m)| cs.coset_of(m)).collect();
    let mut diagonals = 0usize;
    for comp in &fp.components {
        let h = &comp.subgroup;
        let cosets = h.right_cosets();
        for &k in cosets.representatives() {
            if !gpp.members().iter().all(|&x| h.contains(g.conj(k, x))) {
                continue;
            }
            let commutes = fp.coset_spaces.iter().enumerate().all(|(i, cs)| {
                let qi = g.inv(comp.representatives[i]);
                cs.coset_of(g.mul(qi, k)) == targets[i]
            });
            if commutes {
                diagonals += 1;
            }
        }
    }
    Ok(diagonals == 1)
}
