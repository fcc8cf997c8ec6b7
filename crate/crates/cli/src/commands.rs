use std::path::Path;

use coarsegeo::families::{generate, FamilySpec};
use coarsegeo::hyperbolicity::{delta_four_point, delta_slim, Method};
use coarsegeo::io::{from_json, read_graph_file, write_graph};
use coarsegeo::quasigeodesic::{fit_c, morse_radius, tame, tame_bound, verify_qg, MorseEstimate, QgVerdict};
use coarsegeo::rational::{self, int, Rational};
use coarsegeo::subspaces::{
    certify_qg_subspace, splice_union, triangle_experiment, Certification, Subspace, TriangleStatus,
};
use coarsegeo::{Error, GeodesicSpace, ParamPath, QGParams, VertexPath};
use serde::Serialize;
use serde_json::json;

use crate::experiment::{self, ExperimentConfig};
use crate::{CliError, CliResult, Command, ExperimentArgs, FamilyArgs, Kind, Outcome};

pub fn dispatch(cmd: Command, json: bool) -> CliResult<Outcome> {
    match cmd {
        Command::Gen { family, out } => gen(&family, out.as_deref()),
        Command::Delta {
            graph,
            method,
            geodesic_cap,
        } => delta(&graph, &method, geodesic_cap, json),
        Command::VerifyQg { graph, path, lambda, c } => {
            let space = load_graph(&graph)?;
            let p = load_path(&space, &path)?;
            let q = QGParams::new(parse_rational(&lambda)?, parse_rational(&c)?)?;
            let v = verify_qg(space.metric(), &p, &q)?;
            let text = match &v {
                QgVerdict::Pass => "PASS".to_string(),
                QgVerdict::Fail { i, j, excess } => {
                    format!("FAIL at samples ({i}, {j}), excess {}", rational::format(excess))
                }
            };
            ok(json, &v, text)
        }
        Command::Fit { graph, path, lambda } => {
            let space = load_graph(&graph)?;
            let p = load_path(&space, &path)?;
            let lambda = parse_rational(&lambda)?;
            let c = fit_c(space.metric(), &p, lambda)?;
            let v = json!({"lambda": rational::format(&lambda), "c": rational::format(&c)});
            ok(
                json,
                &v,
                format!("C = {} at lambda = {}", rational::format(&c), rational::format(&lambda)),
            )
        }
        Command::Tame {
            graph,
            path,
            geodesic_cap,
        } => tame_cmd(&graph, &path, geodesic_cap, json),
        Command::Subspace {
            graph,
            subspace,
            with,
            lambda,
            c,
            budget,
        } => {
            let space = load_graph(&graph)?;
            let mut sub: Subspace = load_json(&subspace)?;
            if let Some(w) = with {
                sub = sub.union(&load_json(&w)?);
            }
            let q = QGParams::new(parse_rational(&lambda)?, parse_rational(&c)?)?;
            let cert = certify_qg_subspace(&space, &sub, &q, budget)?;
            let text = match &cert {
                Certification::Certified { paths } => {
                    format!("CERTIFIED {} ({} pairs)", sub.label(), paths.len())
                }
                Certification::Unknown { a, b, search } => {
                    format!("UNKNOWN {}: no path found for pair ({a}, {b}): {search:?}", sub.label())
                }
            };
            ok(json, &cert, text)
        }
        Command::Splice {
            graph,
            subspace,
            with,
            path,
            path_b,
            lambda,
            c,
            delta,
            r,
            geodesic_cap,
        } => {
            let space = load_graph(&graph)?;
            let a_sub: Subspace = load_json(&subspace)?;
            let b_sub: Subspace = load_json(&with)?;
            let qa = load_path(&space, &path)?;
            let qb = load_path(&space, &path_b)?;
            let m = space.metric();
            let lambda = parse_rational(&lambda)?;
            let c = match c {
                Some(c) => parse_rational(&c)?,
                None => fit_c(m, &qa, lambda)?.max(fit_c(m, &qb, lambda)?),
            };
            let delta = match delta {
                Some(d) => parse_rational(&d)?,
                None => delta_slim(&space, geodesic_cap).delta,
            };
            let r = match r {
                Some(r) => parse_rational(&r)?,
                None => morse_radius(&space, &qa, geodesic_cap)?
                    .r
                    .max(morse_radius(&space, &qb, geodesic_cap)?.r),
            };
            let q = QGParams::new(lambda, c)?;
            match splice_union(&space, &a_sub, &b_sub, &qa, &qb, &q, delta, r, geodesic_cap) {
                Ok((out, wit)) => {
                    let v = json!({"path": out, "witness": wit});
                    let text = format!(
                        "spliced at c = {} (a' = {}, b' = {}), points {:?}, PASS at (1, {})",
                        wit.c,
                        wit.a_prime,
                        wit.b_prime,
                        out.points(),
                        rational::format(&wit.bound)
                    );
                    ok(json, &v, text)
                }
                Err(e @ Error::BoundMissed { .. }) => Ok(Outcome {
                    stdout: String::new(),
                    failure: Some(e.to_string()),
                }),
                Err(e) => Err(e.into()),
            }
        }
        Command::Triangle {
            graph,
            vertices,
            lambda,
            c,
            budget,
            geodesic_cap,
        } => {
            let space = load_graph(&graph)?;
            let q = QGParams::new(parse_rational(&lambda)?, parse_rational(&c)?)?;
            let [a, b, c] = vertices[..] else {
                return Err(CliError::Usage("--vertices takes exactly three corners".into()));
            };
            let rec = triangle_experiment(&space, a, b, c, &q, budget, geodesic_cap)?;
            let failure = (rec.status == TriangleStatus::Found && (rec.z.is_none() || !rec.bound_holds))
                .then(|| format!("triangle ({a}, {b}, {c}): crossing point missing or bound exceeded"));
            let text = format!(
                "x = {} at distance {} from the other sides; status {:?}; z = {:?}; bound {} (slack {}) {}",
                rec.x,
                rational::format(&rec.x_distance),
                rec.status,
                rec.z,
                rational::format(&rec.bound),
                rational::format(&rec.slack),
                if rec.bound_holds { "holds" } else { "not established" }
            );
            let mut o = ok(json, &rec, text)?;
            o.failure = failure;
            Ok(o)
        }
        Command::Experiment(args) => experiment_cmd(&args, json),
    }
}

fn ok<T: Serialize>(json: bool, value: &T, text: String) -> CliResult<Outcome> {
    let stdout = if json {
        serde_json::to_string(value).expect("serializable output")
    } else {
        text
    };
    Ok(Outcome { stdout, failure: None })
}

fn parse_rational(s: &str) -> CliResult<Rational> {
    rational::parse(s).map_err(CliError::Usage)
}

fn load_graph(path: &Path) -> CliResult<GeodesicSpace> {
    Ok(GeodesicSpace::new(read_graph_file(path)?)?)
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    from_json(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// A path file is either `{"params": [...], "points": [...]}` or a bare
/// vertex list, parameterized by cumulative edge length.
pub fn load_path(space: &GeodesicSpace, path: &Path) -> CliResult<ParamPath> {
    let text = read_text(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let p = if value.is_array() {
        let vs: Vec<usize> = serde_json::from_value(value).map_err(|e| CliError::Usage(e.to_string()))?;
        ParamPath::from_vertex_path(space, &VertexPath::new(vs)?)?
    } else {
        serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    };
    p.check_points(space.n())?;
    Ok(p)
}

pub fn family_spec(
    kind: Kind,
    n: Option<usize>,
    k: Option<usize>,
    depth: Option<u32>,
    chords: usize,
    seed: u64,
) -> CliResult<FamilySpec> {
    let need =
        |v: Option<usize>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this kind")));
    Ok(match kind {
        Kind::RandomTree => FamilySpec::RandomTree { n: need(n, "n")?, seed },
        Kind::Cycle => FamilySpec::Cycle { n: need(n, "n")? },
        Kind::Grid => FamilySpec::Grid { k: need(k, "k")? },
        Kind::NoisyTree => FamilySpec::NoisyTree {
            n: need(n, "n")?,
            chords,
            seed,
        },
        Kind::BinaryTree => FamilySpec::BinaryTree {
            depth: depth.ok_or_else(|| CliError::Usage("--depth is required for this kind".into()))?,
        },
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn gen(f: &FamilyArgs, out: Option<&Path>) -> CliResult<Outcome> {
    let spec = family_spec(f.kind, f.n, f.k, f.depth, f.chords, f.seed)?;
    let text = write_graph(&generate(&spec)?);
    let stdout = match out {
        Some(p) => {
            write_file(p, &text)?;
            String::new()
        }
        None => text.trim_end().to_string(),
    };
    Ok(Outcome { stdout, failure: None })
}

fn delta(graph: &Path, method: &str, cap: usize, json: bool) -> CliResult<Outcome> {
    let method: Method = method.parse()?;
    let space = load_graph(graph)?;
    let report = match method {
        Method::FourPoint => delta_four_point(space.metric()),
        Method::Slim => delta_slim(&space, cap),
    };
    let text = format!(
        "delta = {} ({:?}, witness {:?}{})",
        rational::format(&report.delta),
        report.method,
        report.witness,
        if report.truncated { ", geodesics truncated" } else { "" }
    );
    ok(json, &report, text)
}

#[derive(Serialize)]
struct TameOutput {
    path: ParamPath,
    morse: MorseEstimate,
    #[serde(with = "rational::serde_str")]
    bound: Rational,
    verdict: QgVerdict,
}

fn tame_cmd(graph: &Path, path: &Path, cap: usize, json: bool) -> CliResult<Outcome> {
    let space = load_graph(graph)?;
    let p = load_path(&space, path)?;
    let (tamed, morse) = tame(&space, &p, cap)?;
    let bound = tame_bound(morse.r, space.max_weight());
    let verdict = verify_qg(space.metric(), &tamed, &QGParams::new(int(1), bound)?)?;
    let failure =
        (!verdict.passed()).then(|| format!("tamed path is not a (1, {})-quasigeodesic", rational::format(&bound)));
    let text = format!(
        "tamed points {:?}, r = {}, {} at (1, {})",
        tamed.points(),
        rational::format(&morse.r),
        if verdict.passed() { "PASS" } else { "FAIL" },
        rational::format(&bound)
    );
    let mut o = ok(
        json,
        &TameOutput {
            path: tamed,
            morse,
            bound,
            verdict,
        },
        text,
    )?;
    o.failure = failure;
    Ok(o)
}

pub fn experiment_config(a: &ExperimentArgs) -> CliResult<ExperimentConfig> {
    if let Some(p) = &a.config {
        return load_json(p);
    }
    let kind = a
        .kind
        .ok_or_else(|| CliError::Usage("--kind or --config is required".into()))?;
    // A size sweep supplies the size, so a placeholder keeps family_spec happy.
    let fill = a.sizes.as_ref().and_then(|s| s.first().copied());
    let spec = family_spec(
        kind,
        a.n.or(fill),
        a.k.or(fill),
        a.depth.or(fill.map(|d| d as u32)),
        a.chords,
        a.seed,
    )?;
    Ok(ExperimentConfig {
        family: spec,
        sizes: a.sizes.clone(),
        instances: a.instances,
        seed: a.seed,
        tasks: a.tasks.clone(),
        lambda: parse_rational(&a.lambda)?,
        c: parse_rational(&a.c)?,
        geodesic_cap: a.geodesic_cap,
        budget: a.budget,
        triangles: a.triangles,
        slim_max_n: a.slim_max_n,
    })
}

fn experiment_cmd(a: &ExperimentArgs, json: bool) -> CliResult<Outcome> {
    let cfg = experiment_config(a)?;
    let report = experiment::run(&cfg)?;
    write_file(&a.out, &report.jsonl())?;
    let summary = serde_json::to_string_pretty(&report.summary).expect("serializable summary") + "\n";
    if let Some(p) = &a.summary {
        write_file(p, &summary)?;
    }
    if let Some(p) = &a.csv {
        write_file(p, &report.csv)?;
    }
    let s = &report.summary;
    let t = &s.triangles;
    let text = format!(
        "{} instances; delta trend [{}]{}\nsplice: {} pass, {} bound missed, {} skipped\n\
         triangles: {} found, {} short side, {} no truncation, {} inconclusive; {} crossing failures, {} bound violations\n\
         {}",
        s.instances,
        s.delta_trend.join(", "),
        if s.delta_nondecreasing { " (nondecreasing)" } else { "" },
        s.splice_pass,
        s.splice_bound_missed,
        s.splice_skipped,
        t.found,
        t.short_side,
        t.no_truncation,
        t.inconclusive,
        t.crossing_failures,
        t.bound_violations,
        match (s.hard_failures, s.unknown) {
            (0, 0) => "all checks passed".to_string(),
            (0, u) => format!("UNKNOWN: {u} inconclusive searches"),
            (h, u) => format!("FAILED: {h} hard failures, {u} inconclusive"),
        }
    );
    let stdout = if json { summary.trim_end().to_string() } else { text };
    let failure = (s.hard_failures > 0).then(|| format!("{} hard invariant failures", s.hard_failures));
    Ok(Outcome { stdout, failure })
}
