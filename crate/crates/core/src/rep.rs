//! Representations of finitely presented groups into the isometry groups of
//! [`crate::geometry`], and their first-order deformation theory.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Result};
use crate::geometry::{evaluate_word, Geometry, Isometry, LieVector};
use crate::word::Presentation;

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_RANK_TOL: f64 = 1e-7;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

/// A point of `Hom(π, G)` given by the images of the generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Representation {
    pub presentation: Presentation,
    pub geometry: Geometry,
    pub images: Vec<Isometry>,
    /// Residual bound this value is expected to satisfy.
    #[serde(default = "default_tol")]
    pub tolerance: f64,
}

fn default_tol() -> f64 {
    DEFAULT_RESIDUAL_TOL
}

impl Representation {
    pub fn new(presentation: Presentation, geometry: Geometry, images: Vec<Isometry>) -> Result<Self> {
        if images.len() != presentation.rank() {
            return Err(domain!(
                "{} generator images given for a presentation of rank {}",
                images.len(),
                presentation.rank()
            ));
        }
        if let Some(i) = images.iter().position(|m| m.geometry() != geometry) {
            return Err(domain!(
                "image of {} is a {} isometry, expected {geometry}",
                presentation.generators[i],
                images[i].geometry()
            ));
        }
        Ok(Representation {
            presentation,
            geometry,
            images,
            tolerance: DEFAULT_RESIDUAL_TOL,
        })
    }

    pub fn trivial(presentation: Presentation, geometry: Geometry) -> Self {
        let images = vec![Isometry::identity(geometry); presentation.rank()];
        Representation {
            presentation,
            geometry,
            images,
            tolerance: DEFAULT_RESIDUAL_TOL,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, name: &str) -> Option<&Isometry> {
        self.presentation.generators.iter().position(|g| g == name).map(|i| &self.images[i])
    }

    fn with_images(&self, images: Vec<Isometry>) -> Representation {
        Representation {
            images,
            ..self.clone()
        }
    }

    /// Max over relations of `‖evaluate_word(R) − I‖_∞`.
    pub fn relation_residual(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for r in &self.presentation.relations {
            worst = worst.max(evaluate_word(r, &self.images)?.distance_to_identity());
        }
        Ok(worst)
    }

    pub fn is_on_variety(&self) -> Result<bool> {
        Ok(self.relation_residual()? <= self.tolerance)
    }

    /// `hᵢ ↦ g·hᵢ·g⁻¹`.
    pub fn conjugate(&self, g: &Isometry) -> Result<Representation> {
        let images = self.images.iter().map(|h| h.conjugate_by(g)).collect::<Result<_>>()?;
        Ok(self.with_images(images))
    }

    /// Max-abs distance between corresponding images.
    pub fn distance(&self, other: &Representation) -> Result<f64> {
        if self.rank() != other.rank() || self.geometry != other.geometry {
            return Err(domain!("representations of different shapes"));
        }
        Ok(self.images.iter().zip(&other.images).map(|(a, b)| a.distance(b)).fold(0.0, f64::max))
    }

    /// `hᵢ ↦ exp(δᵢ)·hᵢ` for a stacked vector `δ` of Lie algebra coordinates.
    pub fn perturbed(&self, delta: &[f64]) -> Result<Representation> {
        if delta.len() != 3 * self.rank() {
            return Err(domain!("perturbation has {} entries, expected {}", delta.len(), 3 * self.rank()));
        }
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let v = LieVector::new(self.geometry, [delta[3 * i], delta[3 * i + 1], delta[3 * i + 2]])?;
                Ok(v.exp().then(h))
            })
            .collect::<Result<_>>()?;
        Ok(self.with_images(images))
    }

    /// Stacked Lie algebra logarithms of the relation values.
    pub fn relation_defects(&self) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(3 * self.presentation.relations.len());
        for r in &self.presentation.relations {
            let v = evaluate_word(r, &self.images)?.log()?;
            out.extend_from_slice(&v.coords);
        }
        Ok(out)
    }

    /// Central finite-difference Jacobian of [`Self::relation_defects`] with
    /// respect to left perturbations of every image.
    pub fn relation_jacobian(&self, step: f64) -> Result<DMatrix<f64>> {
        let n = 3 * self.rank();
        let m = 3 * self.presentation.relations.len();
        let mut j = DMatrix::zeros(m, n);
        let mut delta = vec![0.0; n];
        for col in 0..n {
            delta[col] = step;
            let plus = self.perturbed(&delta)?.relation_defects()?;
            delta[col] = -step;
            let minus = self.perturbed(&delta)?.relation_defects()?;
            delta[col] = 0.0;
            for row in 0..m {
                j[(row, col)] = (plus[row] - minus[row]) / (2.0 * step);
            }
        }
        Ok(j)
    }

    /// Columns are the coboundaries `(v − Ad(hᵢ)v)ᵢ` of the three basis
    /// vectors `v` of the Lie algebra.
    pub fn coboundary_matrix(&self) -> DMatrix<f64> {
        let n = self.rank();
        let mut b = DMatrix::zeros(3 * n, 3);
        for k in 0..3 {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            for (i, h) in self.images.iter().enumerate() {
                let ad = adjoint(h, e);
                for r in 0..3 {
                    b[(3 * i + r, k)] = e[r] - ad[r];
                }
            }
        }
        b
    }
}

/// `Ad(h)v`, the coordinates of `h·v̂·h⁻¹`.
pub fn adjoint(h: &Isometry, v: [f64; 3]) -> [f64; 3] {
    let x = LieVector {
        geometry: h.geometry(),
        coords: v,
    }
    .hat();
    let y: Matrix3<f64> = h.matrix() * x * h.inverse().matrix();
    [y[(1, 0)], y[(0, 2)], y[(1, 2)]]
}

/// Tuning knobs for [`tangent_report`].
#[derive(Clone, Copy, Debug)]
pub struct TangentOptions {
    pub fd_step: f64,
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Default for TangentOptions {
    fn default() -> Self {
        TangentOptions {
            fd_step: DEFAULT_FD_STEP,
            rank_tol: DEFAULT_RANK_TOL,
            residual_tol: DEFAULT_RESIDUAL_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentReport {
    #[serde(skip)]
    pub rep: Representation,
    pub dim_z1: usize,
    pub dim_b1: usize,
    pub dim_h1: usize,
    /// Singular values of the relation Jacobian, descending, padded with
    /// zeros to one per unknown.
    pub singular_values: Vec<f64>,
    pub coboundary_singular_values: Vec<f64>,
    pub threshold: f64,
    /// Ratio of the smallest retained to the largest discarded singular
    /// value; absent when nothing is discarded or a discarded value is 0.
    pub spectral_gap: Option<f64>,
    pub rank_ambiguous: bool,
    /// Orthonormal basis of the numerical cocycle space.
    #[serde(skip)]
    pub cocycle_basis: Vec<Vec<f64>>,
}

struct RankData {
    values: Vec<f64>,
    rank: usize,
    threshold: f64,
    gap: Option<f64>,
    ambiguous: bool,
}

fn rank_of(values: Vec<f64>, rank_tol: f64) -> RankData {
    let smax = values.iter().copied().fold(0.0, f64::max);
    let threshold = rank_tol * smax;
    let rank = if smax == 0.0 { 0 } else { values.iter().filter(|&&s| s >= threshold).count() };
    let ambiguous = smax > 0.0 && values.iter().any(|&s| s >= threshold / 10.0 && s <= threshold * 10.0);
    let kept = values.iter().copied().filter(|&s| smax > 0.0 && s >= threshold).fold(f64::INFINITY, f64::min);
    let dropped = values.iter().copied().filter(|&s| smax == 0.0 || s < threshold).fold(f64::NEG_INFINITY, f64::max);
    let gap = (kept.is_finite() && dropped.is_finite() && dropped > 0.0).then(|| kept / dropped);
    RankData {
        values,
        rank,
        threshold,
        gap,
        ambiguous,
    }
}

/// Dimensions of cocycles, coboundaries and `H¹` at `rep`.
pub fn tangent_report(rep: &Representation, opts: &TangentOptions) -> Result<TangentReport> {
    let res = rep.relation_residual()?;
    if res > opts.residual_tol {
        return Err(precondition!(
            "relation residual {res:.3e} exceeds {:.1e}; not a representation",
            opts.residual_tol
        ));
    }
    let n = 3 * rep.rank();
    let j = rep.relation_jacobian(opts.fd_step)?;
    // pad to at least square so the SVD returns a full right basis
    let mut padded = DMatrix::zeros(j.nrows().max(n), n);
    padded.view_mut((0, 0), (j.nrows(), n)).copy_from(&j);
    let (values, v_t) = if n == 0 {
        (Vec::new(), DMatrix::zeros(0, 0))
    } else {
        let svd = padded.svd(false, true);
        (svd.singular_values.iter().copied().collect::<Vec<_>>(), svd.v_t.expect("requested V"))
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let jr = rank_of(sorted, opts.rank_tol);
    let cocycle_basis = order[jr.rank..]
        .iter()
        .map(|&i| v_t.row(i).iter().copied().collect())
        .collect();

    let b = rep.coboundary_matrix();
    let bvals: Vec<f64> = if n == 0 {
        Vec::new()
    } else {
        let mut v: Vec<f64> = b.svd(false, false).singular_values.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let br = rank_of(bvals, opts.rank_tol);
    let dim_z1 = n - jr.rank;
    let dim_b1 = br.rank.min(dim_z1);
    Ok(TangentReport {
        rep: rep.clone(),
        dim_z1,
        dim_b1,
        dim_h1: dim_z1 - dim_b1,
        singular_values: jr.values,
        coboundary_singular_values: br.values,
        threshold: jr.threshold,
        spectral_gap: jr.gap,
        rank_ambiguous: jr.ambiguous || br.ambiguous,
        cocycle_basis,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Projection {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Gauss–Newton on the stacked relation defects, minimal-norm steps.
pub fn project_to_variety(
    rep: &Representation,
    fd_step: f64,
    max_iter: usize,
    tol: f64,
) -> Result<(Representation, Projection)> {
    let mut cur = rep.clone();
    let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut f = cur.relation_defects()?;
    let mut it = 0;
    while norm(&f) > tol && it < max_iter {
        let j = cur.relation_jacobian(fd_step)?;
        let svd = j.svd(true, true);
        let smax = svd.singular_values.max();
        let pinv = svd
            .pseudo_inverse(1e-10 * smax.max(f64::MIN_POSITIVE))
            .map_err(|e| domain!("pseudoinverse failed: {e}"))?;
        let step = -(pinv * DVector::from_vec(f.clone()));
        cur = cur.perturbed(step.as_slice())?;
        f = cur.relation_defects()?;
        it += 1;
    }
    let residual = cur.relation_residual()?;
    let converged = norm(&f) <= tol;
    Ok((
        cur,
        Projection {
            iterations: it,
            residual,
            converged,
        },
    ))
}
