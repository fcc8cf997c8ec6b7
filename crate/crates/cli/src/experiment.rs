//! Batch runs over a seeded family: hyperbolicity, splices and triangles.
//!
//! Instance `i` uses the template family with seed `seed + i` (and size
//! `sizes[i]` when a size sweep is given). All randomness for an instance
//! is drawn from its own generator, so records do not depend on how
//! instances are scheduled.

use std::fmt::Write as _;

use coarsegeo::families::{detour_path, generate, FamilySpec, SplitMix64};
use coarsegeo::hyperbolicity::{delta_four_point, delta_slim};
use coarsegeo::quasigeodesic::{fit_c, morse_radius};
use coarsegeo::rational::{self, int, Rational};
use coarsegeo::subspaces::{splice_union, triangle_experiment, SpliceWitness, Subspace, TriangleStatus};
use coarsegeo::{Error, GeodesicSpace, QGParams, TriangleExperimentRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Delta,
    Splice,
    Triangle,
}

impl std::str::FromStr for Task {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(Task::Delta),
            "splice" => Ok(Task::Splice),
            "triangle" => Ok(Task::Triangle),
            other => Err(format!("unknown task {other:?} (expected delta, splice or triangle)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    /// Per-instance sizes; overrides `instances` when present.
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    pub instances: usize,
    pub seed: u64,
    pub tasks: Vec<Task>,
    /// Triangle experiment parameters.
    #[serde(with = "rational::serde_str")]
    pub lambda: Rational,
    #[serde(with = "rational::serde_str")]
    pub c: Rational,
    pub geodesic_cap: usize,
    pub budget: usize,
    pub triangles: usize,
    /// Slim δ (and hence splicing) is skipped above this many vertices.
    pub slim_max_n: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.instance_count() == 0 {
            return bad("instance count must be at least 1");
        }
        if self.geodesic_cap == 0 || self.budget == 0 {
            return bad("caps and budgets must be positive");
        }
        if self.tasks.is_empty() {
            return bad("no tasks selected");
        }
        QGParams::new(self.lambda, self.c)?;
        Ok(())
    }

    pub fn instance_count(&self) -> usize {
        self.sizes.as_ref().map_or(self.instances, Vec::len)
    }

    pub fn spec_for(&self, i: usize) -> FamilySpec {
        let spec = match &self.sizes {
            Some(sizes) => with_size(self.family, sizes[i]),
            None => self.family,
        };
        spec.with_seed(self.seed.wrapping_add(i as u64))
    }
}

fn with_size(spec: FamilySpec, s: usize) -> FamilySpec {
    match spec {
        FamilySpec::RandomTree { seed, .. } => FamilySpec::RandomTree { n: s, seed },
        FamilySpec::Cycle { .. } => FamilySpec::Cycle { n: s },
        FamilySpec::Grid { .. } => FamilySpec::Grid { k: s },
        FamilySpec::NoisyTree { chords, seed, .. } => FamilySpec::NoisyTree { n: s, chords, seed },
        FamilySpec::BinaryTree { .. } => FamilySpec::BinaryTree { depth: s as u32 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpliceVerdict {
    Pass,
    BoundMissed,
    /// No slim δ for this instance.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpliceRecord {
    pub a: usize,
    pub w: usize,
    pub b: usize,
    #[serde(with = "rational::serde_str")]
    pub fitted_lambda: Rational,
    #[serde(with = "rational::serde_str")]
    pub fitted_c: Rational,
    #[serde(with = "rational::serde_str")]
    pub r: Rational,
    pub verdict: SpliceVerdict,
    #[serde(with = "rational::serde_str_opt")]
    pub bound: Option<Rational>,
    /// Additive constant the spliced path actually needs at λ = 1.
    #[serde(with = "rational::serde_str_opt")]
    pub output_c: Option<Rational>,
    #[serde(with = "rational::serde_str_opt")]
    pub margin: Option<Rational>,
    pub witness: Option<SpliceWitness>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance: usize,
    pub spec: FamilySpec,
    pub n: usize,
    pub edges: usize,
    #[serde(with = "rational::serde_str")]
    pub delta_four_point: Rational,
    pub four_point_witness: Vec<usize>,
    #[serde(with = "rational::serde_str_opt")]
    pub delta_slim: Option<Rational>,
    pub slim_truncated: Option<bool>,
    pub splice: Option<SpliceRecord>,
}

/// One JSON line of the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Line {
    Instance(InstanceRecord),
    Triangle {
        instance: usize,
        #[serde(flatten)]
        run: TriangleExperimentRecord,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCounts {
    pub found: usize,
    pub short_side: usize,
    pub no_truncation: usize,
    pub inconclusive: usize,
    /// Found paths that never touch the other two sides.
    pub crossing_failures: usize,
    pub bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub instances: usize,
    pub delta_trend: Vec<String>,
    pub delta_nondecreasing: bool,
    pub splice_pass: usize,
    pub splice_bound_missed: usize,
    pub splice_skipped: usize,
    pub triangles: TriangleCounts,
    #[serde(with = "rational::serde_str")]
    pub max_delta_four_point: Rational,
    #[serde(with = "rational::serde_str_opt")]
    pub max_delta_slim: Option<Rational>,
    #[serde(with = "rational::serde_str_opt")]
    pub max_fitted_c: Option<Rational>,
    #[serde(with = "rational::serde_str_opt")]
    pub max_r: Option<Rational>,
    #[serde(with = "rational::serde_str_opt")]
    pub min_splice_margin: Option<Rational>,
    pub hard_failures: usize,
    pub unknown: usize,
}

pub struct Report {
    pub lines: Vec<Line>,
    pub summary: Summary,
    pub csv: String,
}

impl Report {
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(&serde_json::to_string(line).expect("serializable record"));
            out.push('\n');
        }
        out
    }
}

struct InstanceOutcome {
    record: InstanceRecord,
    triangles: Vec<TriangleExperimentRecord>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, Error> {
    cfg.validate()?;
    let outcomes: Vec<InstanceOutcome> = (0..cfg.instance_count())
        .into_par_iter()
        .map(|i| run_instance(cfg, i))
        .collect::<Result<_, _>>()?;
    Ok(assemble(cfg, outcomes))
}

fn run_instance(cfg: &ExperimentConfig, i: usize) -> Result<InstanceOutcome, Error> {
    let spec = cfg.spec_for(i);
    let space = GeodesicSpace::new(generate(&spec)?)?;
    let n = space.n();
    let mut rng = SplitMix64::new(cfg.seed ^ (i as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    let four = delta_four_point(space.metric());
    let wants = |t| cfg.tasks.contains(&t);
    let slim = (n <= cfg.slim_max_n && (wants(Task::Delta) || wants(Task::Splice)))
        .then(|| delta_slim(&space, cfg.geodesic_cap));
    let splice = if wants(Task::Splice) {
        Some(splice_run(
            &space,
            &mut rng,
            slim.as_ref().map(|s| s.delta),
            cfg.geodesic_cap,
        )?)
    } else {
        None
    };
    let mut triangles = Vec::new();
    if wants(Task::Triangle) && n >= 3 {
        let q = QGParams::new(cfg.lambda, cfg.c)?;
        for _ in 0..cfg.triangles {
            let (a, b, c) = distinct_triple(&mut rng, n);
            triangles.push(triangle_experiment(&space, a, b, c, &q, cfg.budget, cfg.geodesic_cap)?);
        }
    }
    Ok(InstanceOutcome {
        record: InstanceRecord {
            instance: i,
            spec,
            n,
            edges: space.graph().edges().len(),
            delta_four_point: four.delta,
            four_point_witness: four.witness,
            delta_slim: slim.as_ref().map(|s| s.delta),
            slim_truncated: slim.as_ref().map(|s| s.truncated),
            splice,
        },
        triangles,
    })
}

fn distinct_triple(rng: &mut SplitMix64, n: usize) -> (usize, usize, usize) {
    let a = rng.below(n);
    let mut b = rng.below(n - 1);
    if b >= a {
        b += 1;
    }
    let mut c = rng.below(n - 2);
    for lo in [a.min(b), a.max(b)] {
        if c >= lo {
            c += 1;
        }
    }
    (a, b, c)
}

/// Splices two detour paths `a → w → b`, each inside its own image.
fn splice_run(
    space: &GeodesicSpace,
    rng: &mut SplitMix64,
    delta: Option<Rational>,
    cap: usize,
) -> Result<SpliceRecord, Error> {
    let n = space.n();
    let (a, w, b) = (rng.below(n), rng.below(n), rng.below(n));
    let (da, db) = (rng.below(3), rng.below(3));
    let qa = detour_path(space, rng, a, w, da, cap)?;
    let qb = detour_path(space, rng, w, b, db, cap)?;
    let m = space.metric();
    let fitted_c = fit_c(m, &qa, int(1))?.max(fit_c(m, &qb, int(1))?);
    let r = morse_radius(space, &qa, cap)?.r.max(morse_radius(space, &qb, cap)?.r);
    let mut rec = SpliceRecord {
        a,
        w,
        b,
        fitted_lambda: int(1),
        fitted_c,
        r,
        verdict: SpliceVerdict::Skipped,
        bound: None,
        output_c: None,
        margin: None,
        witness: None,
        error: None,
    };
    let Some(delta) = delta else {
        return Ok(rec);
    };
    let a_sub = Subspace::new("A", qa.image())?;
    let b_sub = Subspace::new("B", qb.image())?;
    let q = QGParams::new(int(1), fitted_c)?;
    match splice_union(space, &a_sub, &b_sub, &qa, &qb, &q, delta, r, cap) {
        Ok((out, wit)) => {
            let oc = fit_c(m, &out, int(1))?;
            rec.verdict = SpliceVerdict::Pass;
            rec.bound = Some(wit.bound);
            rec.output_c = Some(oc);
            rec.margin = Some(wit.bound - oc);
            rec.witness = Some(wit);
        }
        Err(e @ Error::BoundMissed { .. }) => {
            rec.verdict = SpliceVerdict::BoundMissed;
            rec.error = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(rec)
}

fn assemble(cfg: &ExperimentConfig, outcomes: Vec<InstanceOutcome>) -> Report {
    let mut lines = Vec::new();
    let mut s = Summary {
        config: cfg.clone(),
        instances: outcomes.len(),
        delta_trend: Vec::new(),
        delta_nondecreasing: true,
        splice_pass: 0,
        splice_bound_missed: 0,
        splice_skipped: 0,
        triangles: TriangleCounts::default(),
        max_delta_four_point: int(0),
        max_delta_slim: None,
        max_fitted_c: None,
        max_r: None,
        min_splice_margin: None,
        hard_failures: 0,
        unknown: 0,
    };
    let mut csv =
        String::from("family,seed,delta_4pt,delta_slim,fitted_lambda,fitted_c,r,splice_constant,bound_margin\n");
    let fmt = |r: Option<Rational>| r.map(|r| rational::format(&r)).unwrap_or_default();
    let mut prev: Option<Rational> = None;
    for o in outcomes {
        let rec = &o.record;
        if prev.is_some_and(|p| rec.delta_four_point < p) {
            s.delta_nondecreasing = false;
        }
        prev = Some(rec.delta_four_point);
        s.delta_trend.push(rational::format(&rec.delta_four_point));
        s.max_delta_four_point = s.max_delta_four_point.max(rec.delta_four_point);
        s.max_delta_slim = max_opt(s.max_delta_slim, rec.delta_slim);
        if let Some(sp) = &rec.splice {
            match sp.verdict {
                SpliceVerdict::Pass => s.splice_pass += 1,
                SpliceVerdict::BoundMissed => {
                    s.splice_bound_missed += 1;
                    s.hard_failures += 1;
                }
                SpliceVerdict::Skipped => s.splice_skipped += 1,
            }
            s.max_fitted_c = max_opt(s.max_fitted_c, Some(sp.fitted_c));
            s.max_r = max_opt(s.max_r, Some(sp.r));
            if let Some(m) = sp.margin {
                s.min_splice_margin = Some(s.min_splice_margin.map_or(m, |x| x.min(m)));
            }
        }
        let sp = rec.splice.as_ref();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            rec.spec.kind_name(),
            rec.spec.seed().map(|x| x.to_string()).unwrap_or_default(),
            rational::format(&rec.delta_four_point),
            fmt(rec.delta_slim),
            fmt(sp.map(|x| x.fitted_lambda)),
            fmt(sp.map(|x| x.fitted_c)),
            fmt(sp.map(|x| x.r)),
            fmt(sp.and_then(|x| x.bound)),
            fmt(sp.and_then(|x| x.margin)),
        );
        let instance = rec.instance;
        lines.push(Line::Instance(o.record));
        for t in o.triangles {
            let c = &mut s.triangles;
            match t.status {
                TriangleStatus::Found => {
                    c.found += 1;
                    if t.z.is_none() {
                        c.crossing_failures += 1;
                        s.hard_failures += 1;
                    } else if !t.bound_holds {
                        c.bound_violations += 1;
                        s.hard_failures += 1;
                    }
                }
                TriangleStatus::ShortSide => c.short_side += 1,
                TriangleStatus::NoTruncation => c.no_truncation += 1,
                TriangleStatus::Inconclusive => {
                    c.inconclusive += 1;
                    s.unknown += 1;
                }
            }
            lines.push(Line::Triangle { instance, run: t });
        }
    }
    Report { lines, summary: s, csv }
}

fn max_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}
