//! Built-in atlases: `interval_two_mirrors`, `triangle(p,q,r)`,
//! `pillowcase`, `torus` and `disk_mirror`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::atlas::{AtlasSpec, ChartSpec, GluingSpec, GroupRef, OrbifoldAtlas, ProductSpec};
use crate::error::{Error, Result};

pub const CATALOG_ATLASES: &[&str] = &[
    "interval_two_mirrors",
    "triangle(2,3,3)",
    "triangle(2,4,4)",
    "triangle(2,3,7)",
    "pillowcase",
    "torus",
    "disk_mirror",
];

/// Looks up a catalog atlas by name.
pub fn builtin_atlas(name: &str) -> Result<OrbifoldAtlas> {
    let spec = match name.trim() {
        "interval_two_mirrors" => interval_two_mirrors(),
        "pillowcase" => sphere_with_cone_points(&[2, 2, 2, 2]),
        "torus" => torus(),
        "disk_mirror" => disk_mirror(),
        other => match parse_triangle(other) {
            Some((p, q, r)) => triangle(p, q, r),
            None => return Err(Error::Lookup(format!("atlas {name:?}"))),
        },
    };
    OrbifoldAtlas::from_spec(&spec)
}

/// Parses `triangle(p,q,r)` with every order in `2..=24`.
pub fn parse_triangle(name: &str) -> Option<(u64, u64, u64)> {
    let inner = name.strip_prefix("triangle(")?.strip_suffix(')')?;
    let v: Vec<u64> = inner.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
    match v[..] {
        [p, q, r] if [p, q, r].iter().all(|n| (2..=24).contains(n)) => Some((p, q, r)),
        _ => None,
    }
}

fn rotation(n: u64) -> [[f64; 3]; 3] {
    let t = 2.0 * PI / n as f64;
    [[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]]
}

fn cone_chart(id: usize, name: &str, n: u64, letter: &str) -> ChartSpec {
    ChartSpec {
        id,
        name: Some(name.into()),
        group: GroupRef::Name(format!("Z{n}")),
        generators: Some(vec![letter.into()]),
        action: Some(vec![rotation(n)]),
        signs: None,
    }
}

fn plain_chart(id: usize, name: &str) -> ChartSpec {
    ChartSpec {
        id,
        name: Some(name.into()),
        group: GroupRef::Name("Z1".into()),
        generators: Some(vec![]),
        action: None,
        signs: None,
    }
}

fn mirror_chart(id: usize, name: &str, letter: &str, reflection: [[f64; 3]; 3]) -> ChartSpec {
    ChartSpec {
        id,
        name: Some(name.into()),
        group: GroupRef::Name("Z2".into()),
        generators: Some(vec![letter.into()]),
        action: Some(vec![reflection]),
        signs: None,
    }
}

fn pow(letter: &str, k: i64) -> String {
    match k {
        0 => String::new(),
        1 => letter.to_string(),
        _ => format!("{letter}^{k}"),
    }
}

fn word(parts: &[String]) -> String {
    let w: Vec<&str> = parts.iter().map(String::as_str).filter(|s| !s.is_empty() && *s != "e").collect();
    if w.is_empty() {
        "e".into()
    } else {
        w.join(" ")
    }
}

fn gluing(i: usize, j: usize, elements: Vec<String>) -> GluingSpec {
    GluingSpec { i, j, elements }
}

fn product(left: (usize, usize, String), right: (usize, usize, String), result: (usize, usize, String)) -> ProductSpec {
    ProductSpec { left, right, result }
}

fn interval_two_mirrors() -> AtlasSpec {
    let left = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let right = [[-1.0, 0.0, 2.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    AtlasSpec {
        generators: Some(vec!["a".into(), "b".into()]),
        orders: BTreeMap::new(),
        charts: vec![mirror_chart(0, "left", "a", left), mirror_chart(1, "right", "b", right)],
        gluings: vec![
            gluing(0, 1, ["e", "a", "b", "ab"].map(String::from).to_vec()),
            gluing(1, 0, ["e", "b", "a", "ba"].map(String::from).to_vec()),
        ],
        products: vec![],
        relators: vec![],
    }
}

/// Vertex stars of a triangle, cone orders `p, q, r` generated by `a, b, c`.
/// Two stars overlap along the shared edge, in the pieces
/// `Γ_ij = Γ_i·Γ_j`; the single nontrivial triple product closes the loop
/// around the triangle.
fn triangle(p: u64, q: u64, r: u64) -> AtlasSpec {
    let letters = ["a", "b", "c"];
    let orders = [p, q, r];
    let mut gluings = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let mut els = Vec::new();
            for m in 0..orders[i] as i64 {
                for l in 0..orders[j] as i64 {
                    els.push(word(&[pow(letters[i], m), pow(letters[j], l)]));
                }
            }
            gluings.push(gluing(i, j, els));
        }
    }
    let closing = word(&[pow("a", p as i64 - 1), pow("c", r as i64 - 1)]);
    AtlasSpec {
        generators: Some(letters.map(String::from).to_vec()),
        orders: BTreeMap::new(),
        charts: vec![cone_chart(0, "A", p, "a"), cone_chart(1, "B", q, "b"), cone_chart(2, "C", r, "c")],
        gluings,
        products: vec![product((0, 1, "e".into()), (1, 2, "b".into()), (0, 2, closing))],
        relators: vec![],
    }
}

/// Sphere with cone points of the given orders: a front face `F`, a back
/// face `B` and one chart `Cᵢ` per cone point. The faces overlap in one
/// piece per cone point, labelled `gᵢ = (x₂⋯xᵢ)⁻¹`.
fn sphere_with_cone_points(orders: &[u64]) -> AtlasSpec {
    const LETTERS: [&str; 8] = ["a", "b", "c", "d", "f", "g", "h", "k"];
    let k = orders.len();
    let x: Vec<&str> = LETTERS[..k].to_vec();
    // g_i as a word: x_i^-1 x_{i-1}^-1 … x_2^-1
    let g: Vec<String> = (0..k).map(|i| word(&(1..=i).rev().map(|t| pow(x[t], -1)).collect::<Vec<_>>())).collect();
    let g_inv: Vec<String> = (0..k).map(|i| word(&(1..=i).map(|t| x[t].to_string()).collect::<Vec<_>>())).collect();
    let (f, b) = (0usize, 1usize);
    let c = |i: usize| 2 + i;
    let mut charts = vec![plain_chart(f, "F"), plain_chart(b, "B")];
    for i in 0..k {
        charts.push(cone_chart(c(i), &format!("C{}", i + 1), orders[i], x[i]));
    }
    let mut gluings = vec![gluing(f, b, g.clone()), gluing(b, f, g_inv.clone())];
    for i in 0..k {
        let powers: Vec<String> = (0..orders[i] as i64).map(|m| word(&[pow(x[i], m)])).collect();
        gluings.push(gluing(c(i), f, powers.clone()));
        gluings.push(gluing(f, c(i), powers));
        let to_b: Vec<String> = (0..orders[i] as i64).map(|m| word(&[pow(x[i], m), g[i].clone()])).collect();
        let from_b: Vec<String> = (0..orders[i] as i64).map(|m| word(&[g_inv[i].clone(), pow(x[i], m)])).collect();
        gluings.push(gluing(c(i), b, to_b));
        gluings.push(gluing(b, c(i), from_b));
    }
    let mut products = Vec::new();
    for i in 0..k {
        products.push(product((c(i), f, "e".into()), (f, b, g[i].clone()), (c(i), b, g[i].clone())));
        let prev = (i + k - 1) % k;
        products.push(product(
            (c(i), f, "e".into()),
            (f, b, g[prev].clone()),
            (c(i), b, word(&[x[i].to_string(), g[i].clone()])),
        ));
    }
    AtlasSpec {
        generators: Some(x.iter().map(|s| s.to_string()).collect()),
        orders: BTreeMap::new(),
        charts,
        gluings,
        products,
        relators: vec![],
    }
}

/// The square torus covered by the four quarter squares of a 2×2 grid, each
/// enlarged by `MARGIN`. Gluings are the lattice translations `(tx, ty)` under
/// which two charts overlap, products the translations under which three do.
fn torus() -> AtlasSpec {
    const MARGIN: f64 = 0.1;
    let cells: Vec<(i64, i64)> = vec![(0, 0), (1, 0), (0, 1), (1, 1)];
    let lo = |c: i64| c as f64 / 2.0 - MARGIN;
    let hi = |c: i64| (c + 1) as f64 / 2.0 + MARGIN;
    let overlap = |a: (f64, f64), b: (f64, f64)| a.0.max(b.0) < a.1.min(b.1);
    let interval = |c: i64, shift: i64| (lo(c) + shift as f64, hi(c) + shift as f64);
    let shifts = [-1i64, 0, 1];
    // Γ_ji must hold the literal inverses of Γ_ij, so the spelling order
    // flips with the direction of the gluing.
    let translation = |i: usize, j: usize, tx: i64, ty: i64| {
        if i <= j {
            word(&[pow("a", tx), pow("b", ty)])
        } else {
            word(&[pow("b", ty), pow("a", tx)])
        }
    };
    // do chart i and chart j moved by (tx,ty) overlap
    let meets = |i: usize, j: usize, tx: i64, ty: i64| {
        overlap(interval(cells[i].0, 0), interval(cells[j].0, tx)) && overlap(interval(cells[i].1, 0), interval(cells[j].1, ty))
    };
    let mut gluings = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let mut els = Vec::new();
            for &tx in &shifts {
                for &ty in &shifts {
                    if meets(i, j, tx, ty) {
                        els.push(translation(i, j, tx, ty));
                    }
                }
            }
            gluings.push(gluing(i, j, els));
        }
    }
    let steps = shifts.iter().flat_map(|&x| shifts.iter().map(move |&y| (x, y)));
    let mut products = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                if i == j || j == k || i == k {
                    continue;
                }
                for (tx, ty) in steps.clone() {
                    for (ux, uy) in steps.clone() {
                        if !meets(i, j, tx, ty) || !meets(j, k, ux, uy) {
                            continue;
                        }
                        let (sx, sy) = (tx + ux, ty + uy);
                        let xs = [interval(cells[i].0, 0), interval(cells[j].0, tx), interval(cells[k].0, sx)];
                        let ys = [interval(cells[i].1, 0), interval(cells[j].1, ty), interval(cells[k].1, sy)];
                        let triple = |v: [(f64, f64); 3]| v.iter().map(|p| p.0).fold(f64::MIN, f64::max) < v.iter().map(|p| p.1).fold(f64::MAX, f64::min);
                        if triple(xs) && triple(ys) {
                            products.push(product(
                                (i, j, translation(i, j, tx, ty)),
                                (j, k, translation(j, k, ux, uy)),
                                (i, k, translation(i, k, sx, sy)),
                            ));
                        }
                    }
                }
            }
        }
    }
    AtlasSpec {
        generators: Some(vec!["a".into(), "b".into()]),
        orders: BTreeMap::new(),
        charts: (0..4).map(|k| plain_chart(k, &format!("Q{}{}", cells[k].0, cells[k].1))).collect(),
        gluings,
        products,
        relators: vec![],
    }
}

/// A disk whose boundary circle is a mirror: an interior chart and three
/// boundary charts, each a half-disk with the reflection `r`.
fn disk_mirror() -> AtlasSpec {
    let refl = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
    let er = || vec!["e".to_string(), "r".to_string()];
    let mut gluings = Vec::new();
    for i in 1..=3 {
        gluings.push(gluing(0, i, er()));
        gluings.push(gluing(i, 0, er()));
        let next = i % 3 + 1;
        gluings.push(gluing(i, next, er()));
        gluings.push(gluing(next, i, er()));
    }
    AtlasSpec {
        generators: Some(vec!["r".into()]),
        orders: BTreeMap::new(),
        charts: vec![
            plain_chart(0, "D"),
            mirror_chart(1, "M1", "r", refl),
            mirror_chart(2, "M2", "r", refl),
            mirror_chart(3, "M3", "r", refl),
        ],
        gluings,
        products: vec![],
        relators: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(name: &str) -> String {
        builtin_atlas(name).unwrap().presentation().unwrap().to_string_pretty()
    }

    #[test]
    fn catalog_atlases_validate() {
        for name in CATALOG_ATLASES {
            let a = builtin_atlas(name).unwrap();
            assert!(a.validate().is_empty(), "{name}: {:?}", a.validate());
        }
    }

    #[test]
    fn presentations() {
        assert_eq!(pres("interval_two_mirrors"), "⟨a,b | a^2, b^2⟩");
        assert_eq!(pres("triangle(2,3,7)"), "⟨a,b,c | a^2, b^3, c^7, abc⟩");
        assert_eq!(pres("pillowcase"), "⟨a,b,c,d | a^2, b^2, c^2, d^2, abcd⟩");
        assert_eq!(pres("torus"), "⟨a,b | aba^-1b^-1⟩");
        assert_eq!(pres("disk_mirror"), "⟨r | r^2⟩");
    }

    #[test]
    fn shapes() {
        let t = builtin_atlas("triangle(2,4,4)").unwrap();
        let orders: Vec<usize> = t.charts().iter().map(|c| c.group.order()).collect();
        assert_eq!(orders, vec![2, 4, 4]);
        let i = builtin_atlas("interval_two_mirrors").unwrap();
        assert_eq!(i.charts().len(), 2);
        assert!(i.charts().iter().all(|c| c.group.order() == 2));
    }

    #[test]
    fn unknown_names() {
        for bad in ["klein_bottle", "triangle(1,2,3)", "triangle(2,3)", "triangle(a,b,c)"] {
            assert!(matches!(builtin_atlas(bad), Err(Error::Lookup(_))), "{bad}");
        }
    }
}
