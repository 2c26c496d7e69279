//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

// `!(x <= tol)` also rejects NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use orbifold_core::deformation::{amplification, intertwiner, FiniteAction};
use orbifold_core::{
    all_subgroups, ball_automorphisms, ball_covering_morphisms, ball_fiber_product, catalog_group,
    check_universal_property, deck_group, enumerate_ball_coverings, is_regular, monodromy_fiber_product,
    preholonomy, roundtrip_experiment, tangent_report, universal_cover, ExperimentOptions, FiniteGroup, Geometry,
    Isometry, LieVector, MonodromyCovering, Perm, Presentation, StructureFamily, Subgroup, TangentOptions, CATALOG,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn groups() -> Vec<Arc<FiniteGroup>> {
    CATALOG.iter().map(|n| catalog_group(n).unwrap()).collect()
}

fn members(s: &Subgroup) -> BTreeSet<usize> {
    s.members().iter().copied().collect()
}

fn conj_set(g: &FiniteGroup, x: usize, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    s.iter().map(|&h| g.conj(x, h)).collect()
}

fn closure(g: &FiniteGroup, gens: &[usize]) -> BTreeSet<usize> {
    let mut set = BTreeSet::from([g.identity()]);
    loop {
        let mut next = set.clone();
        for &a in &set {
            for &b in gens {
                next.insert(g.mul(a, b));
            }
        }
        if next.len() == set.len() {
            return set;
        }
        set = next;
    }
}

/// All subgroups, as closures of element pairs (every catalog subgroup is
/// 2-generated).
fn brute_subgroups(g: &FiniteGroup) -> BTreeSet<BTreeSet<usize>> {
    let n = g.order();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a..n {
            out.insert(closure(g, &[a, b]));
        }
    }
    out
}

fn class_key(g: &FiniteGroup, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..g.order()).map(|x| conj_set(g, x, s)).min().unwrap()
}

fn dihedral_line() -> Presentation {
    Presentation::parse(&["a", "b"], &["a^2", "b^2"]).unwrap()
}

fn c1_interval() -> Outcome {
    let swap = Perm::from_cycles(2, &[&[0, 1]]).map_err(err)?;
    let circle = MonodromyCovering::new(dihedral_line(), vec![swap.clone(), swap.clone()], 0).map_err(err)?;
    let folded = MonodromyCovering::new(dihedral_line(), vec![Perm::identity(2), swap], 0).map_err(err)?;
    let fp = monodromy_fiber_product(&circle, &folded).map_err(err)?;
    let sizes: Vec<usize> = fp.components.iter().map(Vec::len).collect();
    ensure!(sizes == [4], "orbit sizes {sizes:?}");
    ensure!(fp.covering.is_connected(), "not connected");
    ensure!(is_regular(&fp.covering).map_err(err)?, "not regular");
    let deck = deck_group(&fp.covering).map_err(err)?;
    ensure!(deck.order() == 4, "deck order {}", deck.order());
    for k in 0..2 {
        ensure!(fp.covering.fixed_points_of(k).is_empty(), "generator {k} has fixed points");
    }
    Ok("one orbit of size 4, deck order 4, free".into())
}

fn c2_two_balls() -> Outcome {
    let z2 = catalog_group("Z2").map_err(err)?;
    let e = Subgroup::trivial(&z2);
    let fp = ball_fiber_product(&z2, &[e.clone(), e]).map_err(err)?;
    ensure!(fp.components.len() == 2, "{} components", fp.components.len());
    ensure!(fp.components.iter().all(|c| c.subgroup.is_trivial()), "nontrivial component group");
    Ok("2 components, trivial groups".into())
}

fn c3_cyclic_orbits() -> Outcome {
    let p = Presentation::parse(&["t"], &[]).map_err(err)?;
    let two = MonodromyCovering::new(p.clone(), vec![Perm::from_cycles(2, &[&[0, 1]]).map_err(err)?], 0).map_err(err)?;
    let four = MonodromyCovering::new(p, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).map_err(err)?], 0).map_err(err)?;
    let fp = monodromy_fiber_product(&two, &four).map_err(err)?;
    let sizes: Vec<usize> = fp.components.iter().map(Vec::len).collect();
    ensure!(sizes == [4, 4], "orbit sizes {sizes:?}");
    Ok("orbits [4, 4]".into())
}

fn c4_coverings() -> Outcome {
    let mut total = 0;
    for g in groups() {
        let classes: BTreeSet<_> = brute_subgroups(&g).iter().map(|s| class_key(&g, s)).collect();
        let covs = enumerate_ball_coverings(&g);
        ensure!(covs.len() == classes.len(), "{}: {} coverings, {} classes", g.name(), covs.len(), classes.len());
        for c1 in &covs {
            let h1 = members(&c1.subgroup);
            let normalizer = (0..g.order()).filter(|&x| conj_set(&g, x, &h1) == h1).count();
            let aut = ball_automorphisms(c1).order();
            ensure!(aut == normalizer / h1.len(), "{} {}: |Aut| {aut}", g.name(), c1.subgroup);
            for c2 in &covs {
                let h2 = members(&c2.subgroup);
                let double_cosets: BTreeSet<BTreeSet<usize>> = (0..g.order())
                    .filter(|&x| conj_set(&g, x, &h1).is_subset(&h2))
                    .map(|x| h2.iter().flat_map(|&a| h1.iter().map(move |&b| (a, b))).map(|(a, b)| g.mul(g.mul(a, x), b)).collect())
                    .collect();
                let lib = ball_covering_morphisms(c1, c2).map_err(err)?;
                ensure!(lib.len() == double_cosets.len(), "{} morphism count", g.name());
                total += lib.len();
            }
        }
    }
    Ok(format!("{} groups, {total} morphisms", CATALOG.len()))
}

fn c5_regular_and_universal() -> Outcome {
    for g in groups() {
        for s in all_subgroups(&g) {
            let h = members(&s);
            let normal = (0..g.order()).all(|x| conj_set(&g, x, &h) == h);
            let regular = is_regular(&MonodromyCovering::from_subgroup(&s)).map_err(err)?;
            ensure!(regular == normal, "{} {s}: regular {regular}, normal {normal}", g.name());
        }
        let names: Vec<String> = (0..g.generators().len()).map(|i| format!("g{i}")).collect();
        let (cov, deck) = universal_cover(&g.presentation(&names), 10_000).map_err(err)?;
        ensure!(cov.fiber_size() == g.order() && deck.order() == g.order(), "{}: universal cover size", g.name());
        ensure!(deck.is_transitive(cov.fiber_size()), "{}: deck group not transitive", g.name());
    }
    Ok("all catalog groups".into())
}

fn c6_universal_property() -> Outcome {
    let mut checked = 0;
    for g in groups() {
        let covs = enumerate_ball_coverings(&g);
        for a in &covs {
            for b in &covs {
                let fp = ball_fiber_product(&g, &[a.subgroup.clone(), b.subgroup.clone()]).map_err(err)?;
                let (ha, hb) = (members(&a.subgroup), members(&b.subgroup));
                let (ra, rb) = (a.subgroup.right_cosets(), b.subgroup.right_cosets());
                for cand in &covs {
                    let c = members(&cand.subgroup);
                    for &x in ra.representatives() {
                        for &y in rb.representatives() {
                            let want = conj_set(&g, x, &c).is_subset(&ha) && conj_set(&g, y, &c).is_subset(&hb);
                            let got = check_universal_property(&fp, cand, &[x, y]).map_err(err)?;
                            ensure!(got == want, "{}: {} × {} via {}", g.name(), a.subgroup, b.subgroup, cand.subgroup);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} morphism families"))
}

fn c7_holonomy() -> Outcome {
    let families = [
        "flat_torus",
        "euclidean_pillowcase",
        "euclidean_triangle(2,4,4)",
        "euclidean_triangle(3,3,3)",
        "euclidean_triangle(2,3,6)",
        "hyperbolic_triangle(2,3,7)",
        "hyperbolic_triangle(3,3,4)",
    ];
    let mut worst = 0.0f64;
    for name in families {
        let f: StructureFamily = name.parse().map_err(err)?;
        let r = preholonomy(&f.base_structure()).map_err(err)?.relation_residual().map_err(err)?;
        ensure!(r <= 1e-10, "{name}: residual {r:e}");
        worst = worst.max(r);
    }
    Ok(format!("max residual {worst:.1e}"))
}

fn c8_intertwiners() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = (0.0f64, 0.0f64);
    for trial in 0..200 {
        let g = Geometry::ALL[trial % 3];
        let origin = if g == Geometry::Spherical { vec![0.0, 0.0, 1.0] } else { vec![0.0, 0.0] };
        let quarter = Isometry::rotation_about(g, &origin, std::f64::consts::FRAC_PI_2).map_err(err)?;
        let mirror = Isometry::from_rows(g, [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).map_err(err)?;
        let (name, gens) = match trial % 9 / 3 {
            0 => ("Z2", vec![mirror]),
            1 => ("Z4", vec![quarter]),
            _ => ("D4", vec![quarter, mirror]),
        };
        let h = FiniteAction::from_generators(catalog_group(name).map_err(err)?, g, &gens).map_err(err)?;
        let dir = [0; 3].map(|_| rng.random_range(-1.0..1.0f64));
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        let r = rng.random_range(0.0..0.05);
        let v = LieVector::new(g, dir.map(|x| x * r / norm)).map_err(err)?;
        let f = intertwiner(&h, &h.conjugate(&v.exp()).map_err(err)?).map_err(err)?;
        let amp = amplification(&h, &v).map_err(err)?;
        ensure!(f.residual <= 1e-9, "trial {trial} {name} {g}: residual {:e}", f.residual);
        ensure!(amp <= 10.0, "trial {trial} {name} {g}: amplification {amp}");
        worst = (worst.0.max(f.residual), worst.1.max(amp));
    }
    Ok(format!("max residual {:.1e}, max amplification {:.2}", worst.0, worst.1))
}

fn c9_roundtrip() -> Outcome {
    let mut notes = Vec::new();
    for (f, fixture) in [(StructureFamily::EuclideanPillowcase, 1.0), (StructureFamily::FlatTorus, 0.5)] {
        let r = roundtrip_experiment(&f.base_structure(), 100, 1e-2, 0, &ExperimentOptions::default()).map_err(err)?;
        let ratio = r.min_injectivity_ratio.ok_or(format!("{f}: no injectivity pairs"))?;
        ensure!(r.flagged_trials.is_empty(), "{f}: flagged {:?}", r.flagged_trials);
        ensure!(r.max_roundtrip_error <= 1e-8, "{f}: error {:e}", r.max_roundtrip_error);
        ensure!(ratio >= fixture, "{f}: ratio {ratio} < {fixture}");
        notes.push(format!("{f} error {:.1e} ratio {ratio:.3}", r.max_roundtrip_error));
    }
    Ok(notes.join("; "))
}

fn c10_rigidity() -> Outcome {
    let f: StructureFamily = "hyperbolic_triangle(2,3,7)".parse().map_err(err)?;
    let t = tangent_report(&preholonomy(&f.base_structure()).map_err(err)?, &TangentOptions::default()).map_err(err)?;
    ensure!(t.dim_h1 == 0, "dim H1 = {}", t.dim_h1);
    ensure!(!t.rank_ambiguous, "rank ambiguous");
    let gap = t.spectral_gap.unwrap_or(f64::INFINITY);
    ensure!(gap >= 1e4, "spectral gap {gap:e}");
    let r = roundtrip_experiment(&f.base_structure(), 100, 1e-2, 0, &ExperimentOptions::default()).map_err(err)?;
    let d = r.max_conjugacy_distance.ok_or("no conjugacy distance")?;
    ensure!(d <= 1e-6, "conjugacy distance {d:e}");
    Ok(format!("H1 = 0, gap {gap:.1e}, conjugacy distance {d:.1e}"))
}

fn c11_determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["covers", "S4"],
        &["fiber-product", "D4", "e", "(13)"],
        &["presentation", "pillowcase"],
        &["universal-cover", "disk_mirror"],
        &["double-cover", "triangle(2,4,4)"],
        &["validate", "triangle(2,3,7)"],
        &["holonomy", "hyperbolic_triangle(2,3,7)"],
        &["tangent", "euclidean_pillowcase"],
        &["deform", "flat_torus", "--trials", "20", "--seed", "5"],
        &["deform", "euclidean_pillowcase", "--trials", "20", "--format", "csv"],
    ];
    for args in commands {
        let run = || Command::new(env!("CARGO_BIN_EXE_orbi")).args(*args).output().map_err(err);
        let (a, b) = (run()?, run()?);
        ensure!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        ensure!(a.stdout == b.stdout, "{args:?}: outputs differ");
    }
    Ok(format!("{} commands byte-identical", commands.len()))
}

fn main() {
    let criteria: [Check; 11] = [
        ("interval fiber product", c1_interval, 1),
        ("two copies of the ball", c2_two_balls, 1),
        ("cyclic monodromy orbits", c3_cyclic_orbits, 1),
        ("coverings, morphisms, automorphisms", c4_coverings, 30),
        ("regular iff normal, universal cover", c5_regular_and_universal, 30),
        ("fiber product universal property", c6_universal_property, 60),
        ("holonomy relation residuals", c7_holonomy, 5),
        ("finite action intertwiners", c8_intertwiners, 10),
        ("deformation roundtrip", c9_roundtrip, 30),
        ("hyperbolic triangle rigidity", c10_rigidity, 30),
        ("deterministic CLI output", c11_determinism, 60),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(note) if elapsed > Duration::from_secs(limit) => Err(format!("{note}; took {elapsed:?} > {limit}s")),
            other => other,
        };
        match outcome {
            Ok(note) => println!("criterion {:>2} PASS  {name}: {note} ({:.2}s)", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({:.2}s)", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
