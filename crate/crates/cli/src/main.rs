//! `orbi`: command-line front end for orbifold-core.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orbifold_core::deformation::{roundtrip_experiment, ExperimentOptions, GeometricStructure, StructureFamily};
use orbifold_core::rep::{tangent_report, TangentOptions};
use orbifold_core::{
    ball_automorphisms, ball_covering_morphisms, ball_fiber_product, builtin_atlas, catalog_group,
    enumerate_ball_coverings, monodromy_fiber_product, orientation_double_cover, preholonomy, universal_cover,
    Error, FiniteGroup, GroupSpec, MonodromyCovering, OrbifoldAtlas, Subgroup,
};

#[derive(Parser, Debug)]
#[command(name = "orbi", version, about = "Orbifold coverings, fiber products and holonomy")]
struct Cli {
    /// Seed for randomized experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relation residual accepted as lying on the representation variety.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_residual: f64,
    /// Relative singular value threshold for numerical rank.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol_rank: f64,
    /// Bound on live cosets during coset enumeration.
    #[arg(long, global = true, default_value_t = orbifold_core::DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coverings of a ball quotient V/G, their morphisms and automorphisms.
    Covers { group: String },
    /// Fiber product of ball coverings given by subgroups ("e", "full" or
    /// cycles such as "(12);(123)").
    FiberProduct {
        group: String,
        #[arg(required = true, num_args = 1..)]
        subgroups: Vec<String>,
    },
    /// Fiber product of two coverings given as monodromy JSON files.
    MonodromyProduct { first: PathBuf, second: PathBuf },
    /// Universal covering of an atlas with finite fundamental group.
    UniversalCover { atlas: String },
    /// Presentation of the fundamental group of an atlas.
    Presentation { atlas: String },
    /// Orientation double cover of an atlas.
    DoubleCover { atlas: String },
    /// Holonomy representation of a structure and its relation residual.
    Holonomy {
        family: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Cocycle, coboundary and H¹ dimensions at a holonomy representation.
    Tangent {
        family: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Perturb, project and reconstruct structures near a base structure.
    Deform {
        family: String,
        #[arg(long, default_value_t = 1e-2)]
        scale: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        params: Option<Vec<f64>>,
    },
    /// Check the compatibility conditions of an atlas.
    Validate { atlas: String },
}

/// A command's result: the JSON document plus a flat table for CSV output.
struct Report {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn load_group(name: &str) -> Result<Arc<FiniteGroup>, Error> {
    let path = Path::new(name);
    if path.is_file() {
        let spec: GroupSpec = serde_json::from_str(&read(path)?)?;
        return Ok(Arc::new(FiniteGroup::from_spec(&spec)?));
    }
    catalog_group(name)
}

fn load_atlas(name: &str) -> Result<OrbifoldAtlas, Error> {
    let path = Path::new(name);
    if path.is_file() {
        return OrbifoldAtlas::from_json(&read(path)?);
    }
    builtin_atlas(name)
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))
}

fn structure(family: &str, params: Option<Vec<f64>>) -> Result<GeometricStructure, Error> {
    let family: StructureFamily = family.parse()?;
    match params {
        Some(p) if !p.is_empty() => GeometricStructure::new(family, p),
        _ => Ok(family.base_structure()),
    }
}

/// Element words in the generators `g1, g2, …`.
fn element_words(g: &FiniteGroup) -> Vec<String> {
    g.canonical_words()
        .into_iter()
        .map(|w| {
            if w.is_empty() {
                "e".to_string()
            } else {
                w.iter().map(|k| format!("g{}", k + 1)).collect::<Vec<_>>().join(" ")
            }
        })
        .collect()
}

fn covers(name: &str) -> Result<Report, Error> {
    let g = load_group(name)?;
    let words = element_words(&g);
    let covs = enumerate_ball_coverings(&g);
    let mut list = Vec::new();
    let mut rows = Vec::new();
    for (i, c) in covs.iter().enumerate() {
        let aut = ball_automorphisms(c);
        list.push(json!({
            "index": i,
            "subgroup": c.subgroup.to_string(),
            "subgroup_order": c.subgroup.order(),
            "degree": c.degree(),
            "regular": c.subgroup.is_normal(),
            "automorphism_order": aut.order(),
        }));
        rows.push(vec![
            i.to_string(),
            c.subgroup.to_string(),
            c.subgroup.order().to_string(),
            c.degree().to_string(),
            c.subgroup.is_normal().to_string(),
            aut.order().to_string(),
        ]);
    }
    let mut morphisms = Vec::new();
    for c1 in &covs {
        let mut row = Vec::new();
        for c2 in &covs {
            let m = ball_covering_morphisms(c1, c2)?;
            row.push(m.iter().map(|&x| words[x].clone()).collect::<Vec<_>>());
        }
        morphisms.push(row);
    }
    Ok(Report {
        json: json!({
            "group": g.name(),
            "order": g.order(),
            "coverings": list,
            "morphisms": morphisms,
        }),
        header: vec!["index", "subgroup", "subgroup_order", "degree", "regular", "automorphism_order"],
        rows,
    })
}

fn fiber_product(group: &str, subs: &[String]) -> Result<Report, Error> {
    let g = load_group(group)?;
    let words = element_words(&g);
    let factors = subs.iter().map(|s| Subgroup::parse(&g, s)).collect::<Result<Vec<_>, _>>()?;
    let fp = ball_fiber_product(&g, &factors)?;
    let mut comps = Vec::new();
    let mut rows = Vec::new();
    for (i, c) in fp.components.iter().enumerate() {
        let reps: Vec<&str> = c.representatives.iter().map(|&x| words[x].as_str()).collect();
        comps.push(json!({
            "representatives": reps,
            "subgroup": c.subgroup.to_string(),
            "subgroup_order": c.subgroup.order(),
            "index": c.index(),
        }));
        rows.push(vec![
            i.to_string(),
            reps.join(";"),
            c.subgroup.to_string(),
            c.subgroup.order().to_string(),
            c.index().to_string(),
        ]);
    }
    Ok(Report {
        json: json!({
            "group": g.name(),
            "factors": factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "degree": fp.degree(),
            "components": comps,
        }),
        header: vec!["component", "representatives", "subgroup", "subgroup_order", "index"],
        rows,
    })
}

fn monodromy_product(a: &Path, b: &Path) -> Result<Report, Error> {
    let c1: MonodromyCovering = serde_json::from_str(&read(a)?)?;
    let c2: MonodromyCovering = serde_json::from_str(&read(b)?)?;
    let fp = monodromy_fiber_product(&c1, &c2)?;
    let rows = fp
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let pts: Vec<String> = c.iter().map(usize::to_string).collect();
            vec![i.to_string(), c.len().to_string(), pts.join(";")]
        })
        .collect();
    Ok(Report {
        json: json!({
            "fiber_size": fp.covering.fiber_size(),
            "connected": fp.components.len() == 1,
            "component_sizes": fp.components.iter().map(Vec::len).collect::<Vec<_>>(),
            "components": fp.components,
            "covering": fp.covering,
        }),
        header: vec!["component", "size", "points"],
        rows,
    })
}

fn universal(atlas: &str, max_cosets: usize) -> Result<Report, Error> {
    let a = load_atlas(atlas)?;
    let p = a.presentation()?;
    let (cov, deck) = universal_cover(&p, max_cosets)?;
    let orders = deck.element_orders();
    Ok(Report {
        json: json!({
            "presentation": p.to_string_pretty(),
            "fiber_size": cov.fiber_size(),
            "deck_order": deck.order(),
            "simply_transitive": deck.is_transitive(cov.fiber_size()) && deck.order() == cov.fiber_size(),
            "deck_element_orders": orders,
            "covering": cov,
        }),
        header: vec!["fiber_size", "deck_order"],
        rows: vec![vec![cov.fiber_size().to_string(), deck.order().to_string()]],
    })
}

fn presentation(atlas: &str) -> Result<Report, Error> {
    let p = load_atlas(atlas)?.presentation()?;
    let ab = p.abelianization();
    let rows = p.relations.iter().map(|r| vec![p.display_word(r)]).collect();
    Ok(Report {
        json: json!({
            "presentation": p.to_string_pretty(),
            "generators": p.generators,
            "relations": p.relations.iter().map(|r| p.display_word(r)).collect::<Vec<_>>(),
            "abelianization": ab,
        }),
        header: vec!["relation"],
        rows,
    })
}

fn double_cover(atlas: &str) -> Result<Report, Error> {
    let d = orientation_double_cover(&load_atlas(atlas)?)?;
    let report = d.atlas.validate();
    let rows = d
        .sheets
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), s.base_chart.to_string(), s.sheet.to_string()])
        .collect();
    Ok(Report {
        json: json!({
            "presentation": d.presentation.to_string_pretty(),
            "connected": d.connected,
            "charts": d.sheets.len(),
            "sheets": d.sheets,
            "violations": report.violations,
            "atlas": serde_json::from_str::<Value>(&d.atlas.to_json())?,
        }),
        header: vec!["chart", "base_chart", "sheet"],
        rows,
    })
}

fn image_rows(rep: &orbifold_core::Representation) -> Vec<Vec<String>> {
    rep.presentation
        .generators
        .iter()
        .zip(&rep.images)
        .map(|(name, m)| {
            let mut row = vec![name.clone()];
            row.extend(m.rows().iter().flatten().map(|x| format!("{x:e}")));
            row
        })
        .collect()
}

const IMAGE_HEADER: [&str; 10] = ["generator", "m11", "m12", "m13", "m21", "m22", "m23", "m31", "m32", "m33"];

fn holonomy(family: &str, params: Vec<f64>) -> Result<Report, Error> {
    let s = structure(family, Some(params))?;
    let rep = preholonomy(&s)?;
    let residual = rep.relation_residual()?;
    Ok(Report {
        json: json!({
            "family": s.family,
            "params": s.params,
            "geometry": rep.geometry,
            "presentation": rep.presentation.to_string_pretty(),
            "images": rep.images.iter().map(|m| m.rows()).collect::<Vec<_>>(),
            "residual": residual,
        }),
        header: IMAGE_HEADER.to_vec(),
        rows: image_rows(&rep),
    })
}

fn tangent(family: &str, params: Vec<f64>, cli: &Cli) -> Result<Report, Error> {
    let s = structure(family, Some(params))?;
    let rep = preholonomy(&s)?;
    let opts = TangentOptions {
        rank_tol: cli.tol_rank,
        residual_tol: cli.tol_residual,
        ..TangentOptions::default()
    };
    let t = tangent_report(&rep, &opts)?;
    let mut json = serde_json::to_value(&t)?;
    json["family"] = json!(s.family);
    json["params"] = json!(s.params);
    Ok(Report {
        json,
        header: vec!["dim_z1", "dim_b1", "dim_h1", "rank_ambiguous"],
        rows: vec![vec![
            t.dim_z1.to_string(),
            t.dim_b1.to_string(),
            t.dim_h1.to_string(),
            t.rank_ambiguous.to_string(),
        ]],
    })
}

fn deform(family: &str, scale: f64, trials: usize, params: Option<Vec<f64>>, cli: &Cli) -> Result<Report, Error> {
    let s = structure(family, params)?;
    let opts = ExperimentOptions {
        rank_tol: cli.tol_rank,
        residual_tol: cli.tol_residual,
        ..ExperimentOptions::default()
    };
    let r = roundtrip_experiment(&s, trials, scale, cli.seed, &opts)?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    let row = vec![
        r.family.to_string(),
        r.n_trials.to_string(),
        r.seed.to_string(),
        format!("{:e}", r.max_roundtrip_error),
        opt(r.min_injectivity_ratio),
        r.flagged_trials.len().to_string(),
        format!("{:e}", r.max_param_distance),
        opt(r.max_conjugacy_distance),
    ];
    Ok(Report {
        json: serde_json::to_value(&r)?,
        header: vec![
            "family",
            "n_trials",
            "seed",
            "max_roundtrip_error",
            "min_injectivity_ratio",
            "flagged_trials",
            "max_param_distance",
            "max_conjugacy_distance",
        ],
        rows: vec![row],
    })
}

fn validate(atlas: &str) -> Result<Report, Error> {
    let report = load_atlas(atlas)?.validate();
    let rows = report
        .violations
        .iter()
        .map(|v| {
            let charts: Vec<String> = v.charts.iter().map(usize::to_string).collect();
            vec![serde_json::to_value(v.kind).unwrap().as_str().unwrap_or_default().to_string(), charts.join(";"), v.detail.clone()]
        })
        .collect();
    Ok(Report {
        json: json!({ "valid": report.is_empty(), "violations": report.violations }),
        header: vec!["kind", "charts", "detail"],
        rows,
    })
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Covers { group } => covers(group),
        Command::FiberProduct { group, subgroups } => fiber_product(group, subgroups),
        Command::MonodromyProduct { first, second } => monodromy_product(first, second),
        Command::UniversalCover { atlas } => universal(atlas, cli.max_cosets),
        Command::Presentation { atlas } => presentation(atlas),
        Command::DoubleCover { atlas } => double_cover(atlas),
        Command::Holonomy { family, params } => holonomy(family, params.clone()),
        Command::Tangent { family, params } => tangent(family, params.clone(), cli),
        Command::Deform {
            family,
            scale,
            trials,
            params,
        } => deform(family, *scale, *trials, params.clone(), cli),
        Command::Validate { atlas } => validate(atlas),
    }
}

fn render(report: &Report, format: Format) -> Result<Vec<u8>, Error> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&report.json)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| Error::Domain(format!("csv: {e}"));
            w.write_record(&report.header).map_err(err)?;
            for row in &report.rows {
                w.write_record(row).map_err(err)?;
            }
            w.into_inner().map_err(|e| Error::Domain(format!("csv: {e}")))
        }
    }
}

fn fail(kind: &str, detail: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "detail": detail }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim().to_string(), 1),
    };
    let bytes = match run(&cli).and_then(|r| render(&r, cli.format)) {
        Ok(b) => b,
        Err(e) => return fail(e.kind(), e.to_string(), if e.is_resource() { 2 } else { 1 }),
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail("io", e.to_string(), 1),
    }
}
