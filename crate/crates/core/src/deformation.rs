//! Finite-group intertwiners and the holonomy map on explicit families of
//! geometric structures: flat tori, Euclidean pillowcases and triangle
//! orbifolds.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DVector, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::atlas::OrbifoldAtlas;
use crate::atlas_catalog::builtin_atlas;
use crate::error::{domain, numeric, precondition, Error, Result};
use crate::geometry::{Geometry, Isometry, LieVector};
use crate::group::FiniteGroup;
use crate::rep::{project_to_variety, tangent_report, Representation, TangentOptions};
use crate::word::Presentation;

/// Max deviation `‖h′(g) − h(g)‖` under which an intertwiner is expected to
/// be well conditioned.
pub const CLOSENESS: f64 = 0.1;
/// Refinement grid for the continuity check of `h′ ↦ f`.
pub const REFINEMENT_GRID: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

/// A homomorphism from a finite group into an isometry group, stored on
/// every element.
#[derive(Clone, Debug)]
pub struct FiniteAction {
    group: Arc<FiniteGroup>,
    geometry: Geometry,
    images: Vec<Isometry>,
}

impl FiniteAction {
    /// Extends generator images to the whole group and checks the result is
    /// a homomorphism.
    pub fn from_generators(group: Arc<FiniteGroup>, geometry: Geometry, generator_images: &[Isometry]) -> Result<Self> {
        let gens = group.generators().to_vec();
        if gens.len() != generator_images.len() {
            return Err(domain!("{} has {} generators, got {} images", group.name(), gens.len(), generator_images.len()));
        }
        if generator_images.iter().any(|m| m.geometry() != geometry) {
            return Err(domain!("generator images must be {geometry} isometries"));
        }
        let mut images: Vec<Option<Isometry>> = vec![None; group.order()];
        images[group.identity()] = Some(Isometry::identity(geometry));
        let mut queue = vec![group.identity()];
        while let Some(x) = queue.pop() {
            for (k, &g) in gens.iter().enumerate() {
                let y = group.mul(x, g);
                if images[y].is_none() {
                    images[y] = Some(images[x].as_ref().unwrap().compose(&generator_images[k])?);
                    queue.push(y);
                }
            }
        }
        let images: Vec<Isometry> = images.into_iter().map(|m| m.expect("generators generate")).collect();
        let action = FiniteAction {
            group,
            geometry,
            images,
        };
        let defect = action.homomorphism_defect();
        if defect > 1e-9 {
            return Err(domain!("generator images do not define a homomorphism (defect {defect:.3e})"));
        }
        Ok(action)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn image(&self, element: usize) -> &Isometry {
        &self.images[element]
    }

    pub fn images(&self) -> &[Isometry] {
        &self.images
    }

    /// `max ‖h(ab) − h(a)h(b)‖`.
    pub fn homomorphism_defect(&self) -> f64 {
        let n = self.group.order();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let prod = self.images[a].matrix() * self.images[b].matrix();
                worst = worst.max((self.images[self.group.mul(a, b)].matrix() - prod).amax());
            }
        }
        worst
    }

    /// `g ↦ c·h(g)·c⁻¹`.
    pub fn conjugate(&self, c: &Isometry) -> Result<FiniteAction> {
        let images = self.images.iter().map(|h| h.conjugate_by(c)).collect::<Result<_>>()?;
        Ok(FiniteAction {
            images,
            ..self.clone()
        })
    }

    /// `max_g ‖h′(g) − h(g)‖`.
    pub fn deviation(&self, other: &FiniteAction) -> f64 {
        self.images.iter().zip(&other.images).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Intertwiner {
    pub geometry: Geometry,
    pub map: [[f64; 3]; 3],
    /// `max_g ‖f·h(g) − h′(g)·f‖`.
    pub residual: f64,
    pub smallest_singular_value: f64,
    pub condition_number: f64,
    /// `max_g ‖h′(g) − h(g)‖`.
    pub deviation: f64,
    /// Whether `deviation ≤ CLOSENESS`.
    pub within_closeness: bool,
}

impl Intertwiner {
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.map[r][c])
    }
}

/// The average `f = (1/|Γ|) Σ h′(g)·h(g)⁻¹`, which satisfies
/// `f·h(g) = h′(g)·f` for every `g`.
pub fn intertwiner(h: &FiniteAction, h2: &FiniteAction) -> Result<Intertwiner> {
    if h.geometry != h2.geometry {
        return Err(domain!("actions live in {} and {}", h.geometry, h2.geometry));
    }
    if !(Arc::ptr_eq(&h.group, &h2.group) || h.group.elements() == h2.group.elements()) {
        return Err(domain!("actions of different finite groups"));
    }
    let n = h.images.len() as f64;
    let f = h
        .images
        .iter()
        .zip(&h2.images)
        .fold(Matrix3::zeros(), |acc, (a, b)| acc + b.matrix() * a.inverse().matrix())
        / n;
    let sv = f.singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if smin < 1e-8 {
        return Err(numeric!("averaged intertwiner is singular (smallest singular value {smin:.3e})"));
    }
    let residual = h
        .images
        .iter()
        .zip(&h2.images)
        .map(|(a, b)| (f * a.matrix() - b.matrix() * f).amax())
        .fold(0.0, f64::max);
    let deviation = h.deviation(h2);
    Ok(Intertwiner {
        geometry: h.geometry,
        map: std::array::from_fn(|r| std::array::from_fn(|c| f[(r, c)])),
        residual,
        smallest_singular_value: smin,
        condition_number: smax / smin,
        deviation,
        within_closeness: deviation <= CLOSENESS,
    })
}

/// Largest ratio `‖f_t − I‖ / ‖h′_t − h‖` over the refinement grid, where
/// `h′_t` is `h` conjugated by `exp(t·v)`.
pub fn amplification(h: &FiniteAction, v: &LieVector) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in REFINEMENT_GRID {
        let c = LieVector::new(v.geometry, v.coords.map(|x| x * t))?.exp();
        let h2 = h.conjugate(&c)?;
        let dev = h.deviation(&h2);
        if dev == 0.0 {
            continue;
        }
        let f = intertwiner(h, &h2)?;
        worst = worst.max((f.matrix() - Matrix3::identity()).amax() / dev);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructureFamily {
    FlatTorus,
    EuclideanPillowcase,
    EuclideanTriangle(u64, u64, u64),
    HyperbolicTriangle(u64, u64, u64),
}

impl fmt::Display for StructureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureFamily::FlatTorus => f.write_str("flat_torus"),
            StructureFamily::EuclideanPillowcase => f.write_str("euclidean_pillowcase"),
            StructureFamily::EuclideanTriangle(p, q, r) => write!(f, "euclidean_triangle({p},{q},{r})"),
            StructureFamily::HyperbolicTriangle(p, q, r) => write!(f, "hyperbolic_triangle({p},{q},{r})"),
        }
    }
}

impl FromStr for StructureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "flat_torus" | "torus" => return Ok(StructureFamily::FlatTorus),
            "euclidean_pillowcase" | "pillowcase" => return Ok(StructureFamily::EuclideanPillowcase),
            _ => {}
        }
        let tri = |prefix: &str| {
            crate::atlas_catalog::parse_triangle(&format!("triangle{}", s.strip_prefix(prefix)?))
        };
        let fam = if let Some((p, q, r)) = tri("euclidean_triangle") {
            StructureFamily::EuclideanTriangle(p, q, r)
        } else if let Some((p, q, r)) = tri("hyperbolic_triangle") {
            StructureFamily::HyperbolicTriangle(p, q, r)
        } else {
            return Err(Error::Lookup(format!("structure family {s:?}")));
        };
        let (p, q, r) = fam.orders().unwrap();
        let lhs = p * q + q * r + r * p; // pqr·(1/p + 1/q + 1/r)
        let ok = match fam {
            StructureFamily::EuclideanTriangle(..) => lhs == p * q * r,
            _ => lhs < p * q * r,
        };
        if !ok {
            return Err(domain!("{fam} has the wrong angle sum for its geometry"));
        }
        Ok(fam)
    }
}

impl Serialize for StructureFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StructureFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl StructureFamily {
    pub fn geometry(&self) -> Geometry {
        match self {
            StructureFamily::HyperbolicTriangle(..) => Geometry::Hyperbolic,
            _ => Geometry::Euclidean,
        }
    }

    pub fn parameter_dim(&self) -> usize {
        match self {
            StructureFamily::FlatTorus => 4,
            StructureFamily::EuclideanPillowcase => 8,
            StructureFamily::EuclideanTriangle(..) => 1,
            StructureFamily::HyperbolicTriangle(..) => 0,
        }
    }

    pub fn orders(&self) -> Option<(u64, u64, u64)> {
        match *self {
            StructureFamily::EuclideanTriangle(p, q, r) | StructureFamily::HyperbolicTriangle(p, q, r) => Some((p, q, r)),
            _ => None,
        }
    }

    fn atlas_name(&self) -> String {
        match self {
            StructureFamily::FlatTorus => "torus".into(),
            StructureFamily::EuclideanPillowcase => "pillowcase".into(),
            StructureFamily::EuclideanTriangle(p, q, r) | StructureFamily::HyperbolicTriangle(p, q, r) => {
                format!("triangle({p},{q},{r})")
            }
        }
    }

    pub fn atlas(&self) -> Result<OrbifoldAtlas> {
        builtin_atlas(&self.atlas_name())
    }

    pub fn presentation(&self) -> Result<Presentation> {
        self.atlas()?.presentation()
    }

    /// Unit-square torus, unit-square pillowcase, unit-scale triangle.
    pub fn base_structure(&self) -> GeometricStructure {
        let params = match self {
            StructureFamily::FlatTorus => vec![1.0, 0.0, 0.0, 1.0],
            StructureFamily::EuclideanPillowcase => vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
            StructureFamily::EuclideanTriangle(..) => vec![1.0],
            StructureFamily::HyperbolicTriangle(..) => vec![],
        };
        GeometricStructure { family: *self, params }
    }

    fn is_triangle(&self) -> bool {
        self.orders().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricStructure {
    pub family: StructureFamily,
    pub params: Vec<f64>,
}

impl GeometricStructure {
    pub fn new(family: StructureFamily, params: Vec<f64>) -> Result<Self> {
        let s = GeometricStructure { family, params };
        s.check()?;
        Ok(s)
    }

    /// Family-specific constraints.
    pub fn check(&self) -> Result<()> {
        let p = &self.params;
        if p.len() != self.family.parameter_dim() {
            return Err(precondition!("{} takes {} parameters, got {}", self.family, self.family.parameter_dim(), p.len()));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(precondition!("non-finite parameter"));
        }
        match self.family {
            StructureFamily::FlatTorus => {
                let det = p[0] * p[3] - p[1] * p[2];
                if det.abs() <= 1e-10 {
                    return Err(precondition!("lattice vectors are dependent (det {det:.3e})"));
                }
            }
            StructureFamily::EuclideanPillowcase => {
                let res = parallelogram_defect(p);
                if res > 1e-10 {
                    return Err(precondition!("centers violate p1 - p2 + p3 - p4 = 0 by {res:.3e}"));
                }
            }
            StructureFamily::EuclideanTriangle(..) => {
                if p[0] <= 0.0 {
                    return Err(precondition!("triangle scale must be positive"));
                }
            }
            StructureFamily::HyperbolicTriangle(..) => {}
        }
        Ok(())
    }

    fn max_distance(&self, other: &GeometricStructure) -> f64 {
        self.params.iter().zip(&other.params).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn parallelogram_defect(p: &[f64]) -> f64 {
    let dx = p[0] - p[2] + p[4] - p[6];
    let dy = p[1] - p[3] + p[5] - p[7];
    dx.abs().max(dy.abs())
}

/// Vertices of the triangle with angles `π/p, π/q, π/r` in canonical
/// position: first at the origin, second on the positive x-axis, third in
/// the upper half plane.
pub fn triangle_vertices(family: StructureFamily, scale: f64) -> Result<[[f64; 2]; 3]> {
    let (p, q, r) = family.orders().ok_or_else(|| domain!("{family} is not a triangle family"))?;
    let (a, b, c) = (PI / p as f64, PI / q as f64, PI / r as f64);
    Ok(match family {
        StructureFamily::EuclideanTriangle(..) => {
            let side_ac = scale * b.sin() / c.sin();
            [[0.0, 0.0], [scale, 0.0], [side_ac * a.cos(), side_ac * a.sin()]]
        }
        _ => {
            let side_ab = ((a.cos() * b.cos() + c.cos()) / (a.sin() * b.sin())).acosh();
            let side_ac = ((a.cos() * c.cos() + b.cos()) / (a.sin() * c.sin())).acosh();
            let rb = (side_ab / 2.0).tanh();
            let rc = (side_ac / 2.0).tanh();
            [[0.0, 0.0], [rb, 0.0], [rc * a.cos(), rc * a.sin()]]
        }
    })
}

/// Holonomy representation of a structure.
pub fn preholonomy(s: &GeometricStructure) -> Result<Representation> {
    s.check()?;
    let g = s.family.geometry();
    let p = &s.params;
    let images = match s.family {
        StructureFamily::FlatTorus => vec![Isometry::translation(p[0], p[1]), Isometry::translation(p[2], p[3])],
        StructureFamily::EuclideanPillowcase => (0..4)
            .map(|i| Isometry::rotation_about(g, &p[2 * i..2 * i + 2], PI))
            .collect::<Result<_>>()?,
        StructureFamily::EuclideanTriangle(a, b, c) | StructureFamily::HyperbolicTriangle(a, b, c) => {
            let scale = p.first().copied().unwrap_or(1.0);
            let v = triangle_vertices(s.family, scale)?;
            [a, b, c]
                .iter()
                .zip(&v)
                .map(|(&n, pt)| Isometry::rotation_about(g, pt, 2.0 * PI / n as f64))
                .collect::<Result<_>>()?
        }
    };
    Representation::new(s.family.presentation()?, g, images)
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// Conjugates a triangle representation so that the first rotation center
/// is at the origin and the second lies on the positive x-axis. Returns the
/// normalized representation and the conjugator.
pub fn canonical_position(family: StructureFamily, r: &Representation) -> Result<(Representation, Isometry)> {
    let (p, q, rr) = family.orders().ok_or_else(|| domain!("{family} has no canonical position"))?;
    let g = family.geometry();
    if r.geometry != g || r.rank() != 3 {
        return Err(domain!("expected three {g} generator images"));
    }
    let mut centers = Vec::new();
    for (i, n) in [p, q, rr].into_iter().enumerate() {
        let name = &r.presentation.generators[i];
        let (c, angle) = r.images[i]
            .rotation_data()
            .ok_or_else(|| domain!("image of {name} is not a rotation"))?;
        if wrap_angle(angle - 2.0 * PI / n as f64).abs() > 0.2 {
            return Err(domain!("image of {name} rotates by {angle:.4}, expected about 2π/{n}"));
        }
        centers.push(c);
    }
    let to_origin = Isometry::origin_to(g, &centers[0])?.inverse();
    let b = to_origin.apply(&centers[1])?;
    let conj = Isometry::origin_rotation(g, -b[1].atan2(b[0])).then(&to_origin);
    Ok((r.conjugate(&conj)?, conj))
}

/// Reads structure parameters off a representation near the holonomy of
/// the family.
pub fn section(family: StructureFamily, r: &Representation, residual_tol: f64) -> Result<GeometricStructure> {
    if r.geometry != family.geometry() || r.rank() != family.presentation()?.rank() {
        return Err(domain!("representation does not belong to {family}"));
    }
    let res = r.relation_residual()?;
    if res > residual_tol {
        return Err(precondition!("relation residual {res:.3e} exceeds {residual_tol:.1e}"));
    }
    let name = |i: usize| r.presentation.generators[i].clone();
    let params = match family {
        StructureFamily::FlatTorus => {
            let mut out = Vec::new();
            for (i, h) in r.images.iter().enumerate() {
                let m = h.matrix();
                let angle = m[(1, 0)].atan2(m[(0, 0)]);
                if !h.is_orientation_preserving() || angle.abs() > 1e-6 {
                    return Err(domain!("image of {} is not a translation", name(i)));
                }
                out.extend(h.translation_part().unwrap());
            }
            out
        }
        StructureFamily::EuclideanPillowcase => {
            let mut out = Vec::new();
            for (i, h) in r.images.iter().enumerate() {
                let (c, _) = h
                    .rotation_data()
                    .filter(|(_, a)| (a.abs() - PI).abs() <= 1e-6)
                    .ok_or_else(|| domain!("image of {} is not a half-turn", name(i)))?;
                out.extend(c);
            }
            out
        }
        StructureFamily::EuclideanTriangle(..) => {
            let (n, _) = canonical_position(family, r)?;
            let (c, _) = n.images[1].rotation_data().expect("checked by canonical_position");
            vec![c[0]]
        }
        StructureFamily::HyperbolicTriangle(..) => {
            canonical_position(family, r)?;
            vec![]
        }
    };
    GeometricStructure::new(family, params)
}

#[derive(Clone, Copy, Debug)]
pub struct ExperimentOptions {
    pub fd_step: f64,
    pub rank_tol: f64,
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub convergence: f64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        let t = TangentOptions::default();
        ExperimentOptions {
            fd_step: t.fd_step,
            rank_tol: t.rank_tol,
            residual_tol: t.residual_tol,
            max_iterations: 50,
            convergence: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub family: StructureFamily,
    pub n_trials: usize,
    pub seed: u64,
    pub perturbation_scale: f64,
    pub dim_z1: usize,
    pub max_roundtrip_error: f64,
    /// Smallest `‖r₁ − r₂‖ / ‖s₁ − s₂‖` over consecutive pairs of accepted,
    /// non-congruent trials; absent when no pair qualifies.
    pub min_injectivity_ratio: Option<f64>,
    pub flagged_trials: Vec<usize>,
    pub max_param_distance: f64,
    /// Distance of each normalized trial to the normalized base (triangle
    /// families only).
    pub max_conjugacy_distance: Option<f64>,
}

/// Congruence invariants: Gram matrix of the lattice, or labelled distances
/// between rotation centers.
fn shape_invariants(s: &GeometricStructure) -> Vec<f64> {
    let p = &s.params;
    match s.family {
        StructureFamily::FlatTorus => vec![
            p[0] * p[0] + p[1] * p[1],
            p[0] * p[2] + p[1] * p[3],
            p[2] * p[2] + p[3] * p[3],
        ],
        StructureFamily::EuclideanPillowcase => {
            let mut out = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    out.push((p[2 * i] - p[2 * j]).hypot(p[2 * i + 1] - p[2 * j + 1]));
                }
            }
            out
        }
        _ => p.clone(),
    }
}

/// Perturbs the holonomy of `base` along random cocycle directions,
/// projects back to the representation variety, and checks that section
/// followed by holonomy returns the input.
pub fn roundtrip_experiment(
    base: &GeometricStructure,
    n_trials: usize,
    scale: f64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ExperimentReport> {
    let family = base.family;
    let r0 = preholonomy(base)?;
    let tangent = tangent_report(
        &r0,
        &TangentOptions {
            fd_step: opts.fd_step,
            rank_tol: opts.rank_tol,
            residual_tol: opts.residual_tol,
        },
    )?;
    let basis = &tangent.cocycle_basis;
    let base_normal = if family.is_triangle() { Some(canonical_position(family, &r0)?.0) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flagged = Vec::new();
    let mut max_rt = 0.0f64;
    let mut max_param = 0.0f64;
    let mut max_conj: Option<f64> = base_normal.as_ref().map(|_| 0.0);
    let mut accepted: Vec<(Representation, GeometricStructure)> = Vec::new();
    for trial in 0..n_trials {
        let coeffs: Vec<f64> = (0..basis.len()).map(|_| rng.sample(StandardNormal)).collect();
        let mut dir = DVector::zeros(3 * r0.rank());
        for (c, b) in coeffs.iter().zip(basis) {
            dir += DVector::from_column_slice(b) * *c;
        }
        let norm = dir.norm();
        if norm > 0.0 {
            dir *= scale / norm;
        }
        let outcome = (|| -> Result<Option<(Representation, GeometricStructure, f64)>> {
            let (rin, proj) =
                project_to_variety(&r0.perturbed(dir.as_slice())?, opts.fd_step, opts.max_iterations, opts.convergence)?;
            if !proj.converged {
                return Ok(None);
            }
            let s = section(family, &rin, opts.residual_tol)?;
            let rout = preholonomy(&s)?;
            let err = match &base_normal {
                Some(_) => canonical_position(family, &rin)?.0.distance(&rout)?,
                None => rin.distance(&rout)?,
            };
            Ok(Some((rin, s, err)))
        })();
        match outcome {
            Ok(Some((rin, s, err))) => {
                max_rt = max_rt.max(err);
                max_param = max_param.max(s.max_distance(base));
                if let (Some(bn), Some(m)) = (&base_normal, max_conj.as_mut()) {
                    *m = m.max(canonical_position(family, &rin)?.0.distance(bn)?);
                }
                accepted.push((rin, s));
            }
            Ok(None) | Err(_) => flagged.push(trial),
        }
    }
    let tol = opts.residual_tol;
    let mut min_ratio: Option<f64> = None;
    for w in accepted.windows(2) {
        let (r1, s1) = &w[0];
        let (r2, s2) = &w[1];
        let rep_dist = r1.distance(r2)?;
        let congruent = shape_invariants(s1)
            .iter()
            .zip(shape_invariants(s2))
            .all(|(a, b)| (a - b).abs() <= tol);
        if rep_dist < 10.0 * tol || congruent {
            continue;
        }
        let ratio = rep_dist / s1.max_distance(s2).max(f64::MIN_POSITIVE);
        min_ratio = Some(min_ratio.map_or(ratio, |m| m.min(ratio)));
    }
    Ok(ExperimentReport {
        family,
        n_trials,
        seed,
        perturbation_scale: scale,
        dim_z1: tangent.dim_z1,
        max_roundtrip_error: max_rt,
        min_injectivity_ratio: min_ratio,
        flagged_trials: flagged,
        max_param_distance: max_param,
        max_conjugacy_distance: max_conj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog_group;

    fn refl() -> Isometry {
        Isometry::from_rows(Geometry::Euclidean, [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn identity_intertwiner() {
        let h = FiniteAction::from_generators(catalog_group("Z2").unwrap(), Geometry::Euclidean, &[refl()]).unwrap();
        let f = intertwiner(&h, &h).unwrap();
        assert_eq!(f.matrix(), Matrix3::identity());
        assert_eq!(f.residual, 0.0);
    }

    #[test]
    fn reflection_intertwiner() {
        let z2 = catalog_group("Z2").unwrap();
        let h = FiniteAction::from_generators(z2.clone(), Geometry::Euclidean, &[refl()]).unwrap();
        let t: f64 = 0.1;
        let (s, c) = (2.0 * t).sin_cos();
        let r2 = Isometry::from_rows(Geometry::Euclidean, [[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let h2 = FiniteAction::from_generators(z2, Geometry::Euclidean, &[r2]).unwrap();
        let f = intertwiner(&h, &h2).unwrap();
        assert!(f.residual <= 1e-10);
        // the two reflections differ by about 2·sin(0.1) in max norm
        assert!(!f.within_closeness);
    }

    #[test]
    fn z4_conjugation_intertwiner() {
        let z4 = catalog_group("Z4").unwrap();
        let rot = Isometry::rotation_about(Geometry::Euclidean, &[0.2, -0.1], PI / 2.0).unwrap();
        let h = FiniteAction::from_generators(z4, Geometry::Euclidean, &[rot]).unwrap();
        let c = LieVector::new(Geometry::Euclidean, [0.02, -0.03, 0.01]).unwrap().exp();
        let h2 = h.conjugate(&c).unwrap();
        let f = intertwiner(&h, &h2).unwrap();
        assert!(f.residual <= 1e-10);
        assert!(f.within_closeness);
    }

    #[test]
    fn non_homomorphism_rejected() {
        let z4 = catalog_group("Z4").unwrap();
        let rot = Isometry::origin_rotation(Geometry::Euclidean, 1.0);
        assert!(FiniteAction::from_generators(z4, Geometry::Euclidean, &[rot]).is_err());
    }

    #[test]
    fn family_names() {
        for s in ["flat_torus", "euclidean_pillowcase", "euclidean_triangle(2,4,4)", "hyperbolic_triangle(2,3,7)"] {
            assert_eq!(s.parse::<StructureFamily>().unwrap().to_string(), s);
        }
        assert!("euclidean_triangle(2,3,7)".parse::<StructureFamily>().is_err());
        assert!("hyperbolic_triangle(3,3,3)".parse::<StructureFamily>().is_err());
        assert!("klein_bottle".parse::<StructureFamily>().is_err());
    }

    #[test]
    fn preholonomy_examples() {
        let torus = preholonomy(&StructureFamily::FlatTorus.base_structure()).unwrap();
        assert_eq!(torus.relation_residual().unwrap(), 0.0);
        assert!(torus.images[0].distance(&Isometry::translation(1.0, 0.0)) == 0.0);
        let pc = preholonomy(&StructureFamily::EuclideanPillowcase.base_structure()).unwrap();
        assert!(pc.relation_residual().unwrap() <= 1e-12);
        for fam in ["hyperbolic_triangle(2,3,7)", "euclidean_triangle(2,4,4)", "euclidean_triangle(3,3,3)"] {
            let f: StructureFamily = fam.parse().unwrap();
            let r = preholonomy(&f.base_structure()).unwrap();
            assert!(r.relation_residual().unwrap() <= 1e-10, "{fam}");
        }
    }

    #[test]
    fn constraint_violations() {
        let bad = GeometricStructure {
            family: StructureFamily::EuclideanPillowcase,
            params: vec![0.0, 0.0, 1.0, 0.0, 1.001, 1.0, 0.0, 1.0],
        };
        assert!(matches!(preholonomy(&bad), Err(Error::Precondition(_))));
        assert!(GeometricStructure::new(StructureFamily::FlatTorus, vec![1.0, 0.0, 2.0, 0.0]).is_err());
    }

    #[test]
    fn section_roundtrips_at_base() {
        for fam in ["flat_torus", "euclidean_pillowcase", "euclidean_triangle(2,3,6)", "hyperbolic_triangle(3,3,4)"] {
            let f: StructureFamily = fam.parse().unwrap();
            let base = f.base_structure();
            let s = section(f, &preholonomy(&base).unwrap(), 1e-9).unwrap();
            assert!(s.max_distance(&base) < 1e-12, "{fam}: {:?}", s.params);
        }
    }

    #[test]
    fn section_follows_moved_centers() {
        let eps = 1e-3;
        let s = GeometricStructure::new(
            StructureFamily::EuclideanPillowcase,
            vec![eps, 0.0, 1.0 + eps, 0.0, 1.0, 1.0, 0.0, 1.0],
        )
        .unwrap();
        let back = section(s.family, &preholonomy(&s).unwrap(), 1e-9).unwrap();
        assert!(back.max_distance(&s) < 1e-12);
    }

    #[test]
    fn section_rejects_defect_and_wrong_types() {
        let f = StructureFamily::EuclideanPillowcase;
        let mut r = preholonomy(&f.base_structure()).unwrap();
        r.images[2] = Isometry::rotation_about(Geometry::Euclidean, &[1.001, 1.0], PI).unwrap();
        assert!(matches!(section(f, &r, 1e-9), Err(Error::Precondition(_))));
        let torus = preholonomy(&StructureFamily::FlatTorus.base_structure()).unwrap();
        let mut t2 = torus.clone();
        t2.images[0] = Isometry::origin_rotation(Geometry::Euclidean, 0.5);
        t2.images[1] = Isometry::identity(Geometry::Euclidean);
        let err = section(StructureFamily::FlatTorus, &t2, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("image of a")), "{err}");
    }

    #[test]
    fn zero_scale_roundtrip() {
        let base = StructureFamily::EuclideanPillowcase.base_structure();
        let rep = roundtrip_experiment(&base, 3, 0.0, 1, &ExperimentOptions::default()).unwrap();
        assert!(rep.max_roundtrip_error <= 1e-11);
        assert!(rep.flagged_trials.is_empty());
    }
}
