//! Isometry groups of the Euclidean, hyperbolic and spherical planes as 3×3
//! real matrices.
//!
//! * Euclidean: affine matrices `[[R, t], [0, 1]]` acting on `(x, y, 1)`.
//! * Hyperbolic: `O⁺(2,1)` preserving `diag(1, 1, -1)` and the upper sheet
//!   of the hyperboloid; points cross the interface in Poincaré-disk
//!   coordinates.
//! * Spherical: `O(3)` acting on unit vectors.
//!
//! The Lie algebra element with coordinates `(θ, u, v)` is
//! `[[0, -θ, u], [θ, 0, v], [κu, κv, 0]]` with `κ = 0, 1, -1` respectively;
//! `θ` generates counterclockwise rotation about the origin of the model
//! (`(0,0)`, disk centre, north pole).

use std::fmt;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, numeric, Result};
use crate::word::Word;

/// Invariant residual above which an isometry is rejected.
pub const DRIFT_TOL: f64 = 1e-8;
/// Invariant residual above which a matrix is projected back onto the group.
pub const REPROJECT_TOL: f64 = 1e-12;
/// Rotation angles closer than this to `π` are on the cut locus of `log`.
pub const CUT_LOCUS_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Geometry {
    #[serde(rename = "euclidean2", alias = "euclidean", alias = "E2")]
    Euclidean,
    #[serde(rename = "hyperbolic2", alias = "hyperbolic", alias = "H2")]
    Hyperbolic,
    #[serde(rename = "spherical2", alias = "spherical", alias = "S2")]
    Spherical,
}

impl Geometry {
    pub const ALL: [Geometry; 3] = [Geometry::Euclidean, Geometry::Hyperbolic, Geometry::Spherical];

    pub fn group_dim(self) -> usize {
        3
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean2",
            Geometry::Hyperbolic => "hyperbolic2",
            Geometry::Spherical => "spherical2",
        }
    }

    fn kappa(self) -> f64 {
        match self {
            Geometry::Euclidean => 0.0,
            Geometry::Hyperbolic => 1.0,
            Geometry::Spherical => -1.0,
        }
    }

    /// Dimension of a point in interface coordinates.
    pub fn point_dim(self) -> usize {
        match self {
            Geometry::Spherical => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn eta() -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))
}

fn minkowski(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.x * b.x + a.y * b.y - a.z * b.z
}

/// Lie algebra coordinates `(θ, u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieVector {
    pub geometry: Geometry,
    pub coords: [f64; 3],
}

impl LieVector {
    pub fn new(geometry: Geometry, coords: [f64; 3]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(domain!("non-finite Lie algebra coordinates"));
        }
        Ok(LieVector { geometry, coords })
    }

    pub fn zero(geometry: Geometry) -> Self {
        LieVector {
            geometry,
            coords: [0.0; 3],
        }
    }

    pub fn hat(&self) -> Matrix3<f64> {
        let [t, u, v] = self.coords;
        let k = self.geometry.kappa();
        Matrix3::new(0.0, -t, u, t, 0.0, v, k * u, k * v, 0.0)
    }

    /// Invariant quadratic form `θ² − κ(u² + v²)`; `X³ = −q·X`.
    pub fn q(&self) -> f64 {
        let [t, u, v] = self.coords;
        t * t - self.geometry.kappa() * (u * u + v * v)
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn exp(&self) -> Isometry {
        let x = self.hat();
        let (f1, f2) = exp_coeffs(self.q());
        let m = Matrix3::identity() + x * f1 + x * x * f2;
        Isometry::project_unchecked(self.geometry, m)
    }
}

/// `(Σ (−q)^k/(2k+1)!, Σ (−q)^k/(2k+2)!)`, i.e. `sin s/s` and
/// `(1 − cos s)/s²` for `q = s²`, continued to `q ≤ 0`.
fn exp_coeffs(q: f64) -> (f64, f64) {
    if q.abs() < 1e-3 {
        let mut f1 = 0.0;
        let mut f2 = 0.0;
        let mut term1 = 1.0; // (−q)^k/(2k+1)!
        let mut term2 = 0.5; // (−q)^k/(2k+2)!
        for k in 0..8 {
            f1 += term1;
            f2 += term2;
            let k = k as f64;
            term1 *= -q / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            term2 *= -q / ((2.0 * k + 3.0) * (2.0 * k + 4.0));
        }
        (f1, f2)
    } else if q > 0.0 {
        let s = q.sqrt();
        (s.sin() / s, (1.0 - s.cos()) / q)
    } else {
        let s = (-q).sqrt();
        (s.sinh() / s, (s.cosh() - 1.0) / (-q))
    }
}

#[derive(Clone, PartialEq)]
pub struct Isometry {
    geometry: Geometry,
    matrix: Matrix3<f64>,
}

#[derive(Serialize, Deserialize)]
struct IsometrySpec {
    geometry: Geometry,
    matrix: [[f64; 3]; 3],
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IsometrySpec {
            geometry: self.geometry,
            matrix: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = IsometrySpec::deserialize(d)?;
        Isometry::from_rows(spec.geometry, spec.matrix).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isometry({}, {:?})", self.geometry, self.rows())
    }
}

impl Isometry {
    pub fn identity(geometry: Geometry) -> Self {
        Isometry {
            geometry,
            matrix: Matrix3::identity(),
        }
    }

    /// Validates the group invariants (to [`DRIFT_TOL`]) and projects back
    /// onto the group if the residual exceeds [`REPROJECT_TOL`].
    pub fn new(geometry: Geometry, matrix: Matrix3<f64>) -> Result<Self> {
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(numeric!("non-finite matrix entry"));
        }
        let r = residual(geometry, &matrix);
        if r > DRIFT_TOL {
            return Err(numeric!("matrix is not a {geometry} isometry (invariant residual {r:.3e})"));
        }
        if geometry == Geometry::Hyperbolic && matrix[(2, 2)] <= 0.0 {
            return Err(domain!("hyperbolic matrix swaps the sheets of the hyperboloid"));
        }
        Ok(Isometry::project_unchecked(geometry, matrix))
    }

    pub fn from_rows(geometry: Geometry, rows: [[f64; 3]; 3]) -> Result<Self> {
        Isometry::new(geometry, Matrix3::from_fn(|r, c| rows[r][c]))
    }

    fn project_unchecked(geometry: Geometry, matrix: Matrix3<f64>) -> Self {
        let matrix = if residual(geometry, &matrix) > REPROJECT_TOL {
            reproject(geometry, &matrix)
        } else {
            matrix
        };
        Isometry { geometry, matrix }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.matrix[(r, c)]))
    }

    /// Residual of the defining invariants.
    pub fn invariant_residual(&self) -> f64 {
        residual(self.geometry, &self.matrix)
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.matrix.determinant() > 0.0
    }

    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.geometry != other.geometry {
            return Err(domain!("cannot compose {} with {} isometry", self.geometry, other.geometry));
        }
        let m = self.matrix * other.matrix;
        let r = residual(self.geometry, &m);
        if r > DRIFT_TOL {
            return Err(numeric!("composition drifted off the group (residual {r:.3e})"));
        }
        Ok(Isometry::project_unchecked(self.geometry, m))
    }

    /// Composition for callers that already know the geometries agree.
    pub(crate) fn then(&self, other: &Isometry) -> Isometry {
        debug_assert_eq!(self.geometry, other.geometry);
        Isometry::project_unchecked(self.geometry, self.matrix * other.matrix)
    }

    pub fn inverse(&self) -> Isometry {
        let m = &self.matrix;
        let inv = match self.geometry {
            Geometry::Euclidean => {
                let rt = m.fixed_view::<2, 2>(0, 0).transpose();
                let t = -(rt * m.fixed_view::<2, 1>(0, 2));
                Matrix3::new(rt[(0, 0)], rt[(0, 1)], t[0], rt[(1, 0)], rt[(1, 1)], t[1], 0.0, 0.0, 1.0)
            }
            Geometry::Hyperbolic => eta() * m.transpose() * eta(),
            Geometry::Spherical => m.transpose(),
        };
        Isometry {
            geometry: self.geometry,
            matrix: inv,
        }
    }

    /// `g·self·g⁻¹`.
    pub fn conjugate_by(&self, g: &Isometry) -> Result<Isometry> {
        g.compose(self)?.compose(&g.inverse())
    }

    /// Max-abs entrywise distance between matrices.
    pub fn distance(&self, other: &Isometry) -> f64 {
        (self.matrix - other.matrix).amax()
    }

    /// `‖self − I‖_∞` (max-abs entry).
    pub fn distance_to_identity(&self) -> f64 {
        (self.matrix - Matrix3::identity()).amax()
    }

    /// Principal logarithm.
    pub fn log(&self) -> Result<LieVector> {
        if !self.is_orientation_preserving() {
            return Err(domain!("log of an orientation-reversing isometry"));
        }
        let g = self.geometry;
        let m = &self.matrix;
        let coords = match g {
            Geometry::Euclidean => {
                let theta = m[(1, 0)].atan2(m[(0, 0)]);
                if theta.abs() > std::f64::consts::PI - CUT_LOCUS_MARGIN {
                    return Err(domain!("log at the cut locus (rotation angle {theta:.6})"));
                }
                let (f1, f2) = exp_coeffs(theta * theta);
                // exp translation part is (f1·I + f2·θJ)·(u, v)
                let v = Matrix2::new(f1, -f2 * theta, f2 * theta, f1);
                let t = Vector2::new(m[(0, 2)], m[(1, 2)]);
                let w = v.try_inverse().ok_or_else(|| numeric!("singular translation map"))? * t;
                [theta, w[0], w[1]]
            }
            _ => {
                let star = match g {
                    Geometry::Hyperbolic => eta() * m.transpose() * eta(),
                    _ => m.transpose(),
                };
                let half = (m - star) * 0.5; // f1·X
                let raw = LieVector {
                    geometry: g,
                    coords: [half[(1, 0)], half[(0, 2)], half[(1, 2)]],
                };
                let s2 = raw.q(); // f1²·q
                let c = (m.trace() - 1.0) / 2.0;
                let q = if s2 > 0.0 {
                    let omega = s2.sqrt().atan2(c);
                    if omega > std::f64::consts::PI - CUT_LOCUS_MARGIN {
                        return Err(domain!("log at the cut locus (rotation angle {omega:.6})"));
                    }
                    omega * omega
                } else if s2 < 0.0 {
                    let s = (-s2).sqrt().asinh();
                    -s * s
                } else {
                    0.0
                };
                let (f1, _) = exp_coeffs(q);
                raw.coords.map(|x| x / f1)
            }
        };
        LieVector::new(g, coords)
    }

    /// Euclidean translation by `(x, y)`.
    pub fn translation(x: f64, y: f64) -> Isometry {
        Isometry {
            geometry: Geometry::Euclidean,
            matrix: Matrix3::new(1.0, 0.0, x, 0.0, 1.0, y, 0.0, 0.0, 1.0),
        }
    }

    /// Translation part of a Euclidean isometry.
    pub fn translation_part(&self) -> Option<[f64; 2]> {
        (self.geometry == Geometry::Euclidean).then(|| [self.matrix[(0, 2)], self.matrix[(1, 2)]])
    }

    /// Rotation by `angle` about the model origin.
    pub fn origin_rotation(geometry: Geometry, angle: f64) -> Isometry {
        let (s, c) = angle.sin_cos();
        Isometry {
            geometry,
            matrix: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        }
    }

    /// An orientation-preserving isometry taking the model origin to
    /// `point` without rotating at the origin (translation, boost, or
    /// rotation along the great circle through the north pole).
    pub fn origin_to(geometry: Geometry, point: &[f64]) -> Result<Isometry> {
        let m = match geometry {
            Geometry::Euclidean => {
                let p = check_point(geometry, point)?;
                Matrix3::new(1.0, 0.0, p[0], 0.0, 1.0, p[1], 0.0, 0.0, 1.0)
            }
            Geometry::Hyperbolic => {
                let x = disk_to_hyperboloid(check_point(geometry, point)?);
                let r = (x.x * x.x + x.y * x.y).sqrt();
                if r < 1e-300 {
                    Matrix3::identity()
                } else {
                    let n = Vector2::new(x.x / r, x.y / r);
                    let (ch, sh) = (x.z, r);
                    let a = Matrix2::identity() + n * n.transpose() * (ch - 1.0);
                    Matrix3::new(a[(0, 0)], a[(0, 1)], sh * n[0], a[(1, 0)], a[(1, 1)], sh * n[1], sh * n[0], sh * n[1], ch)
                }
            }
            Geometry::Spherical => {
                let p = check_point(geometry, point)?;
                let p = Vector3::new(p[0], p[1], p[2]);
                let r = (p.x * p.x + p.y * p.y).sqrt();
                let angle = r.atan2(p.z);
                if r < 1e-300 {
                    if p.z > 0.0 {
                        Matrix3::identity()
                    } else {
                        Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))
                    }
                } else {
                    // rotate about the axis e3 × p
                    let k = Vector3::new(-p.y / r, p.x / r, 0.0);
                    rodrigues(&k, angle)
                }
            }
        };
        Ok(Isometry::project_unchecked(geometry, m))
    }

    /// Counterclockwise rotation by `angle` about `point`.
    pub fn rotation_about(geometry: Geometry, point: &[f64], angle: f64) -> Result<Isometry> {
        let b = Isometry::origin_to(geometry, point)?;
        Ok(b.then(&Isometry::origin_rotation(geometry, angle)).then(&b.inverse()))
    }

    /// Image of a point, in interface coordinates.
    pub fn apply(&self, point: &[f64]) -> Result<Vec<f64>> {
        let g = self.geometry;
        let p = check_point(g, point)?;
        Ok(match g {
            Geometry::Euclidean => {
                let v = self.matrix * Vector3::new(p[0], p[1], 1.0);
                vec![v.x, v.y]
            }
            Geometry::Hyperbolic => {
                let v = self.matrix * disk_to_hyperboloid(p);
                hyperboloid_to_disk(&v).to_vec()
            }
            Geometry::Spherical => {
                let v = self.matrix * Vector3::new(p[0], p[1], p[2]);
                vec![v.x, v.y, v.z]
            }
        })
    }

    /// Fixed point and counterclockwise rotation angle in `(−π, π]` of an
    /// orientation-preserving isometry with an isolated fixed point; `None`
    /// for translations, parabolics, hyperbolics and the identity.
    pub fn rotation_data(&self) -> Option<(Vec<f64>, f64)> {
        if !self.is_orientation_preserving() || self.distance_to_identity() < 1e-14 {
            return None;
        }
        let g = self.geometry;
        let m = &self.matrix;
        let center: Vec<f64> = match g {
            Geometry::Euclidean => {
                let a = Matrix2::identity() - m.fixed_view::<2, 2>(0, 0);
                if a.determinant().abs() < 1e-12 {
                    return None;
                }
                let c = a.try_inverse()? * Vector2::new(m[(0, 2)], m[(1, 2)]);
                vec![c[0], c[1]]
            }
            _ => {
                let svd = (m - Matrix3::identity()).svd(true, true);
                let k = svd.singular_values.imin();
                let v_t = svd.v_t?;
                let mut p = Vector3::new(v_t[(k, 0)], v_t[(k, 1)], v_t[(k, 2)]);
                if g == Geometry::Hyperbolic {
                    let n = minkowski(&p, &p);
                    if n > -1e-12 {
                        return None;
                    }
                    p /= (-n).sqrt();
                    if p.z < 0.0 {
                        p = -p;
                    }
                    hyperboloid_to_disk(&p).to_vec()
                } else {
                    p /= p.norm();
                    // orient the axis so the rotation is counterclockwise by at most π
                    let w = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
                    if w.dot(&p) < 0.0 {
                        p = -p;
                    }
                    vec![p.x, p.y, p.z]
                }
            }
        };
        let b = Isometry::origin_to(g, &center).ok()?;
        let local = b.inverse().then(self).then(&b);
        let angle = local.matrix[(1, 0)].atan2(local.matrix[(0, 0)]);
        Some((center, angle))
    }
}

fn rodrigues(k: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

fn check_point(g: Geometry, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != g.point_dim() || p.iter().any(|x| !x.is_finite()) {
        return Err(domain!("{g} points have {} finite coordinates", g.point_dim()));
    }
    match g {
        Geometry::Hyperbolic if p[0] * p[0] + p[1] * p[1] >= 1.0 => {
            Err(domain!("point ({}, {}) is outside the Poincaré disk", p[0], p[1]))
        }
        Geometry::Spherical if ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs() > 1e-9 => {
            Err(domain!("spherical points must be unit vectors"))
        }
        _ => Ok(p.to_vec()),
    }
}

fn disk_to_hyperboloid(p: Vec<f64>) -> Vector3<f64> {
    let r2 = p[0] * p[0] + p[1] * p[1];
    Vector3::new(2.0 * p[0], 2.0 * p[1], 1.0 + r2) / (1.0 - r2)
}

fn hyperboloid_to_disk(v: &Vector3<f64>) -> [f64; 2] {
    [v.x / (1.0 + v.z), v.y / (1.0 + v.z)]
}

/// Residual of the defining invariants of the group.
fn residual(g: Geometry, m: &Matrix3<f64>) -> f64 {
    match g {
        Geometry::Euclidean => {
            let r = m.fixed_view::<2, 2>(0, 0);
            let orth = (r.transpose() * r - Matrix2::identity()).amax();
            let bottom = m[(2, 0)].abs().max(m[(2, 1)].abs()).max((m[(2, 2)] - 1.0).abs());
            orth.max(bottom)
        }
        // relative to ‖A‖², since long boost chains have exponentially large entries
        Geometry::Hyperbolic => (m.transpose() * eta() * m - eta()).amax() / m.amax().powi(2).max(1.0),
        Geometry::Spherical => (m.transpose() * m - Matrix3::identity()).amax(),
    }
}

fn polar2(a: &Matrix2<f64>) -> Matrix2<f64> {
    let svd = a.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

fn polar3(a: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = a.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

fn reproject(g: Geometry, m: &Matrix3<f64>) -> Matrix3<f64> {
    match g {
        Geometry::Euclidean => {
            let r = polar2(&m.fixed_view::<2, 2>(0, 0).into_owned());
            Matrix3::new(r[(0, 0)], r[(0, 1)], m[(0, 2)], r[(1, 0)], r[(1, 1)], m[(1, 2)], 0.0, 0.0, 1.0)
        }
        Geometry::Spherical => polar3(m),
        Geometry::Hyperbolic => {
            // Minkowski Gram–Schmidt on the columns, timelike column first
            let mut c2: Vector3<f64> = m.column(2).into();
            c2 /= (-minkowski(&c2, &c2)).sqrt();
            let mut c0: Vector3<f64> = m.column(0).into();
            c0 += c2 * minkowski(&c0, &c2);
            c0 /= minkowski(&c0, &c0).sqrt();
            let mut c1: Vector3<f64> = m.column(1).into();
            c1 += c2 * minkowski(&c1, &c2);
            c1 -= c0 * minkowski(&c1, &c0);
            c1 /= minkowski(&c1, &c1).sqrt();
            Matrix3::from_columns(&[c0, c1, c2])
        }
    }
}

/// Product `img(x₁)·img(x₂)·…` of generator images along a word.
pub fn evaluate_word(w: &Word, images: &[Isometry]) -> Result<Isometry> {
    let Some(first) = images.first() else {
        return if w.is_empty() {
            Err(domain!("no generator images (geometry unknown)"))
        } else {
            Err(domain!("word uses generator {} but no images are given", w.max_generator().unwrap()))
        };
    };
    let g = first.geometry;
    if images.iter().any(|i| i.geometry != g) {
        return Err(domain!("generator images live in different geometries"));
    }
    if let Some(m) = w.max_generator().filter(|&m| m >= images.len()) {
        return Err(domain!("generator {m} has no image"));
    }
    let mut acc = Isometry::identity(g);
    for &(x, e) in w.syllables() {
        let base = if e > 0 { images[x].clone() } else { images[x].inverse() };
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lie(g: Geometry, c: [f64; 3]) -> LieVector {
        LieVector::new(g, c).unwrap()
    }

    #[test]
    fn group_axioms() {
        for g in Geometry::ALL {
            let a = lie(g, [0.3, -0.2, 0.4]).exp();
            assert!(a.compose(&a.inverse()).unwrap().distance_to_identity() < 1e-12);
        }
        let t = Isometry::translation(1.0, 2.0).compose(&Isometry::translation(-3.0, 0.5)).unwrap();
        assert!(t.distance(&Isometry::translation(-2.0, 2.5)) < 1e-15);
        let e = Isometry::identity(Geometry::Euclidean);
        assert!(e.compose(&Isometry::identity(Geometry::Spherical)).is_err());
    }

    #[test]
    fn two_half_turns_make_a_translation() {
        let (p, q) = ([0.3, -1.0], [1.5, 0.25]);
        let a = Isometry::rotation_about(Geometry::Euclidean, &p, PI).unwrap();
        let b = Isometry::rotation_about(Geometry::Euclidean, &q, PI).unwrap();
        let ab = a.compose(&b).unwrap();
        let expect = Isometry::translation(2.0 * (p[0] - q[0]), 2.0 * (p[1] - q[1]));
        assert!(ab.distance(&expect) < 1e-14);
    }

    #[test]
    fn rotation_examples() {
        for g in Geometry::ALL {
            let o: Vec<f64> = if g == Geometry::Spherical { vec![0.0, 0.0, 1.0] } else { vec![0.0, 0.0] };
            assert!(Isometry::rotation_about(g, &o, 0.0).unwrap().distance_to_identity() < 1e-15);
        }
        let half = Isometry::rotation_about(Geometry::Euclidean, &[0.0, 0.0], PI).unwrap();
        let expect = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        assert!((half.matrix() - expect).amax() < 1e-15);
        // hyperbolic elliptic of angle 2π/7 at a non-origin point
        let p = [0.3, -0.4];
        let r = Isometry::rotation_about(Geometry::Hyperbolic, &p, 2.0 * PI / 7.0).unwrap();
        let b = Isometry::origin_to(Geometry::Hyperbolic, &p).unwrap();
        let local = b.inverse().compose(&r).unwrap().compose(&b).unwrap();
        let tr = local.matrix()[(0, 0)] + local.matrix()[(1, 1)];
        assert!((tr - 2.0 * (2.0 * PI / 7.0).cos()).abs() < 1e-12);
        assert!(Isometry::rotation_about(Geometry::Hyperbolic, &[0.8, 0.7], 1.0).is_err());
        assert!(Isometry::rotation_about(Geometry::Spherical, &[0.0, 0.5, 0.5], 1.0).is_err());
    }

    #[test]
    fn rotation_powers() {
        let pts: [(Geometry, Vec<f64>); 3] = [
            (Geometry::Euclidean, vec![2.0, -1.0]),
            (Geometry::Hyperbolic, vec![-0.5, 0.2]),
            (Geometry::Spherical, vec![0.6, 0.0, 0.8]),
        ];
        for (g, p) in &pts {
            for n in 1..=12 {
                let r = Isometry::rotation_about(*g, p, 2.0 * PI / n as f64).unwrap();
                let w = Word::power(0, n);
                assert!(evaluate_word(&w, &[r]).unwrap().distance_to_identity() < 1e-10, "{g} n={n}");
            }
        }
    }

    #[test]
    fn rotation_data_recovers_center_and_angle() {
        let cases: [(Geometry, Vec<f64>, f64); 4] = [
            (Geometry::Euclidean, vec![2.0, -1.0], PI),
            (Geometry::Euclidean, vec![0.1, 0.7], -1.0),
            (Geometry::Hyperbolic, vec![-0.5, 0.2], 2.0 * PI / 7.0),
            (Geometry::Spherical, vec![0.6, 0.0, 0.8], 2.5),
        ];
        for (g, p, a) in cases {
            let r = Isometry::rotation_about(g, &p, a).unwrap();
            let (c, angle) = r.rotation_data().unwrap();
            let d: f64 = c.iter().zip(&p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(d < 1e-10, "{g}: {c:?} vs {p:?}");
            assert!((angle - a).abs() < 1e-10, "{g}: {angle} vs {a}");
        }
        assert!(Isometry::translation(1.0, 0.0).rotation_data().is_none());
    }

    #[test]
    fn exp_log_examples() {
        for g in Geometry::ALL {
            assert!(LieVector::zero(g).exp().distance_to_identity() == 0.0);
        }
        let r = lie(Geometry::Euclidean, [0.7, 0.0, 0.0]).exp();
        assert!(r.distance(&Isometry::origin_rotation(Geometry::Euclidean, 0.7)) < 1e-15);
        let half = Isometry::rotation_about(Geometry::Euclidean, &[1.0, 0.0], PI).unwrap();
        assert!(half.log().is_err());
        let refl = Isometry::from_rows(Geometry::Euclidean, [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(refl.log().is_err());
        // large hyperbolic translation
        let v = lie(Geometry::Hyperbolic, [0.2, 1.5, -0.7]);
        let back = v.exp().log().unwrap();
        for k in 0..3 {
            assert!((back.coords[k] - v.coords[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_matrices() {
        let shear = [[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for g in Geometry::ALL {
            assert!(Isometry::from_rows(g, shear).is_err());
        }
        let flip = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(Isometry::from_rows(Geometry::Hyperbolic, flip).is_err());
    }

    #[test]
    fn evaluate_word_examples() {
        let a = Isometry::translation(1.0, 0.0);
        let b = Isometry::origin_rotation(Geometry::Euclidean, 0.3);
        let mut al = vec!["a".to_string(), "b".to_string()];
        let w = Word::parse("a a^-1", &mut al, false).unwrap();
        assert!(evaluate_word(&w, &[a.clone(), b.clone()]).unwrap().distance_to_identity() < 1e-15);
        let ab = Word::parse("ab", &mut al, false).unwrap();
        let m = evaluate_word(&ab, &[a.clone(), b.clone()]).unwrap();
        assert!((m.matrix() - a.matrix() * b.matrix()).amax() < 1e-15);
        assert!(evaluate_word(&Word::letter(2), &[a.clone(), b]).is_err());
        assert!(evaluate_word(&Word::identity(), &[a]).unwrap().distance_to_identity() == 0.0);
    }

    #[test]
    fn serde_roundtrip() {
        let r = Isometry::rotation_about(Geometry::Hyperbolic, &[0.1, 0.2], 1.0).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("hyperbolic2"));
        let back: Isometry = serde_json::from_str(&s).unwrap();
        assert!(back.distance(&r) < 1e-15);
    }
}
