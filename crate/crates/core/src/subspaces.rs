//! Quasigeodesic subspaces and the constructions linking them to
//! hyperbolicity.
//!
//! * [`certify_qg_subspace`] searches, for every pair of points of a subset,
//!   for a `(λ, C)`-quasigeodesic that stays inside the subset. A
//!   certificate is always re-verified; an exhausted search only yields
//!   `Unknown`.
//! * [`splice_union`] joins a quasigeodesic `a → w` in `A` to one `w → b`
//!   in `B` at sample points close to a common point `c` of an `a`–`b`
//!   geodesic, giving a `(1, 4C + 2R + 2δ)`-quasigeodesic in `A ∪ B` up to
//!   discretization slack.
//! * [`triangle_experiment`] takes the point `x` of a triangle side farthest
//!   from the other two sides, cuts the side open around `x`, and checks
//!   that a quasigeodesic across the gap inside the remaining four segments
//!   must touch the other sides within `λ²(2C + 1) + C`.
//! * [`union_geodesic_check_tree`] checks that two intersecting convex
//!   vertex sets of a tree have a geodesic union.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metric::GeodesicSpace;
use crate::quasigeodesic::{verify_qg, ParamPath, QGParams, QgVerdict};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Named nonempty point set, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    label: String,
    points: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    label: String,
    points: Vec<usize>,
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;
    fn try_from(r: SubspaceRepr) -> Result<Self> {
        Subspace::new(r.label, r.points)
    }
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr {
            label: s.label,
            points: s.points,
        }
    }
}

impl Subspace {
    pub fn new(label: impl Into<String>, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        let points: Vec<usize> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if points.is_empty() {
            return Err(Error::EmptySubspace);
        }
        Ok(Subspace {
            label: label.into(),
            points,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn contains(&self, p: usize) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn union(&self, other: &Subspace) -> Subspace {
        Subspace {
            label: format!("{} ∪ {}", self.label, other.label),
            points: self
                .points
                .iter()
                .chain(&other.points)
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
    }

    fn mask(&self, n: usize) -> Result<Vec<bool>> {
        let mut m = vec![false; n];
        for &p in &self.points {
            if p >= n {
                return Err(Error::VertexOutOfRange { vertex: p, n });
            }
            m[p] = true;
        }
        Ok(m)
    }
}

/// Outcome of searching for one quasigeodesic between two points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PairSearch {
    Found {
        path: ParamPath,
    },
    /// Every unit-step candidate was ruled out.
    Exhausted,
    /// The node budget ran out first.
    BudgetHit,
}

/// Looks for a `(λ, C)`-quasigeodesic from `from` to `to` whose samples all
/// lie in `allowed`.
///
/// First the shortest path of the induced subgraph, parameterized by
/// length, is tried. Then a depth-first search runs over point sequences
/// with unit parameter steps. Every pair constraint is checked as soon as
/// both of its samples are placed, so a sequence that reaches `to` is a
/// quasigeodesic; it is still passed through [`verify_qg`] before being
/// returned. `budget` bounds the number of search nodes.
pub fn search_qg_path(
    space: &GeodesicSpace,
    allowed: &[bool],
    from: usize,
    to: usize,
    q: &QGParams,
    budget: usize,
) -> Result<PairSearch> {
    let m = space.metric();
    m.check_point(from)?;
    m.check_point(to)?;
    if !allowed[from] || !allowed[to] {
        return Err(Error::PathOutsideSubspace(format!(
            "endpoints {from}, {to} must lie in the subspace"
        )));
    }
    if let Some(vp) = space.induced_shortest_path(allowed, from, to) {
        let path = ParamPath::from_vertex_path(space, &vp)?;
        if verify_qg(m, &path, q)?.passed() {
            return Ok(PairSearch::Found { path });
        }
    }

    // Longest admissible sequence: (steps)/λ − C ≤ d(from, to).
    let max_steps = rational::floor_int(&(q.lambda() * (m.dist(from, to) + q.c())));
    if max_steps < 0 {
        return Ok(PairSearch::Exhausted);
    }
    let max_steps = max_steps as usize;
    let scale = Rational::from_integer(m.scale());
    // Raw-unit bounds on d(p_i, p_j) for each parameter gap.
    let bounds: Vec<(i64, i64)> = (0..=max_steps)
        .map(|dt| {
            let dt = rational::int(dt as i64);
            let lo = (dt / q.lambda() - q.c()) * scale;
            let hi = (q.lambda() * dt + q.c()) * scale;
            (rational::ceil_int(&lo), rational::floor_int(&hi))
        })
        .collect();
    let mut candidates: Vec<usize> = (0..space.n()).filter(|&p| allowed[p]).collect();
    candidates.sort_by_key(|&p| (m.raw(p, to), p));

    let mut seq = vec![from];
    let mut cursor = vec![0usize];
    let mut nodes = 0usize;
    while let Some(next) = cursor.last_mut() {
        let i = seq.len();
        if i > max_steps || *next >= candidates.len() {
            cursor.pop();
            seq.pop();
            continue;
        }
        let p = candidates[*next];
        *next += 1;
        // Remaining steps must still be able to reach `to`.
        if m.raw(p, to) > bounds[max_steps - i].1 {
            continue;
        }
        let fits = seq.iter().enumerate().all(|(j, &pj)| {
            let (lo, hi) = bounds[i - j];
            let d = m.raw(pj, p);
            lo <= d && d <= hi
        });
        if !fits {
            continue;
        }
        nodes += 1;
        if nodes > budget {
            return Ok(PairSearch::BudgetHit);
        }
        seq.push(p);
        if p == to {
            let path = ParamPath::unit_steps(seq)?;
            return match verify_qg(m, &path, q)? {
                QgVerdict::Pass => Ok(PairSearch::Found { path }),
                QgVerdict::Fail { i, j, excess } => {
                    unreachable!("incremental checks accepted a failing pair ({i}, {j}) by {excess}")
                }
            };
        }
        cursor.push(0);
    }
    Ok(PairSearch::Exhausted)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub a: usize,
    pub b: usize,
    pub path: ParamPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    /// One verified path per unordered pair of distinct points.
    Certified { paths: Vec<PairCertificate> },
    /// The first pair (in order) whose search failed.
    Unknown { a: usize, b: usize, search: PairSearch },
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified { .. })
    }
}

pub fn certify_qg_subspace(
    space: &GeodesicSpace,
    sub: &Subspace,
    q: &QGParams,
    budget: usize,
) -> Result<Certification> {
    let allowed = sub.mask(space.n())?;
    let pts = sub.points();
    let pairs: Vec<(usize, usize)> = (0..pts.len())
        .flat_map(|i| (i + 1..pts.len()).map(move |j| (pts[i], pts[j])))
        .collect();
    let results = pairs
        .par_iter()
        .map(|&(a, b)| search_qg_path(space, &allowed, a, b, q, budget).map(|s| (a, b, s)))
        .collect::<Result<Vec<_>>>()?;
    let mut paths = Vec::with_capacity(results.len());
    for (a, b, search) in results {
        match search {
            PairSearch::Found { path } => paths.push(PairCertificate { a, b, path }),
            other => return Ok(Certification::Unknown { a, b, search: other }),
        }
    }
    Ok(Certification::Certified { paths })
}

/// Points and parameters realizing a splice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpliceWitness {
    pub w: usize,
    /// Splice centre on the `geodesic_index`-th enumerated `a`–`b` geodesic.
    pub c: usize,
    pub geodesic_index: usize,
    pub a_prime: usize,
    pub b_prime: usize,
    #[serde(with = "rational::serde_str")]
    pub s_a: Rational,
    #[serde(with = "rational::serde_str")]
    pub s_b: Rational,
    /// Output domain length `s_a + t_b − s_b`.
    #[serde(with = "rational::serde_str")]
    pub t: Rational,
    /// `max(d(a′, c), d(b′, c))`.
    #[serde(with = "rational::serde_str")]
    pub join_distance: Rational,
    /// Whether `join_distance ≤ r + δ + max_weight`.
    pub join_within_r_delta: bool,
    /// Additive constant the output was verified against.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
}

/// `4C + 2R + 2δ + 4·max_weight`.
pub fn splice_bound(c: Rational, r: Rational, delta: Rational, max_weight: Rational) -> Rational {
    c * 4 + r * 2 + delta * 2 + max_weight * 4
}

/// Joins `qg_a` (from `a` to `w`, inside `a_sub`) and `qg_b` (from `w` to `b`,
/// inside `b_sub`) into one path from `a` to `b` inside their union.
///
/// The splice centre `c` and samples `a′ = qg_a(s_a)`, `b′ = qg_b(s_b)` minimize
/// `max(d(a′, c), d(b′, c))` over all enumerated `a`–`b` geodesics. The
/// output is `qg_a` on `[0, s_a]` followed by `qg_b` shifted by `s_a − s_b`.
/// Both halves carry a sample at parameter `s_a`; `a′` is kept unless `b′ = b`,
/// so the output always ends at `b`. The choice `a′ = a, b′ = b` is skipped
/// when `a ≠ b` since it would leave no room for both endpoints.
///
/// The result is verified at `(1, splice_bound(…))`; a miss is returned as
/// [`Error::BoundMissed`].
#[allow(clippy::too_many_arguments)]
pub fn splice_union(
    space: &GeodesicSpace,
    a_sub: &Subspace,
    b_sub: &Subspace,
    qg_a: &ParamPath,
    qg_b: &ParamPath,
    q: &QGParams,
    delta: Rational,
    r: Rational,
    geodesic_cap: usize,
) -> Result<(ParamPath, SpliceWitness)> {
    let n = space.n();
    let m = space.metric();
    a_sub.mask(n)?;
    b_sub.mask(n)?;
    let (a, w) = qg_a.endpoints();
    let (w_b, b) = qg_b.endpoints();
    qg_a.check_points(n)?;
    qg_b.check_points(n)?;
    if w != w_b {
        return Err(Error::InvalidPath(format!(
            "first path ends at {w} but second starts at {w_b}"
        )));
    }
    if !a_sub.contains(w) || !b_sub.contains(w) {
        return Err(Error::NoIntersection(w));
    }
    for (path, sub) in [(qg_a, a_sub), (qg_b, b_sub)] {
        if let Some(p) = path.points().iter().find(|&&p| !sub.contains(p)) {
            return Err(Error::PathOutsideSubspace(format!(
                "point {p} of a quasigeodesic is outside {:?}",
                sub.label()
            )));
        }
    }

    let last_b = qg_b.len() - 1;
    let geos = space.geodesics(a, b, geodesic_cap.max(1));
    // (join distance, geodesic index, position, i, j)
    let mut best: Option<(i64, usize, usize, usize, usize)> = None;
    for (gi, g) in geos.paths.iter().enumerate() {
        for (pos, &c) in g.vertices().iter().enumerate() {
            for (i, &pa) in qg_a.points().iter().enumerate() {
                let da = m.raw(pa, c);
                if best.is_some_and(|bst| da > bst.0) {
                    continue;
                }
                for (j, &pb) in qg_b.points().iter().enumerate() {
                    if i == 0 && j == last_b && a != b {
                        continue;
                    }
                    let key = (da.max(m.raw(pb, c)), gi, pos, i, j);
                    if best.is_none_or(|bst| key < bst) {
                        best = Some(key);
                    }
                }
            }
        }
    }
    let (join, gi, pos, i, j) =
        best.ok_or_else(|| Error::InvalidPath("no admissible splice point (both paths are single points)".into()))?;
    let c = geos.paths[gi].vertices()[pos];
    let s_a = qg_a.params()[i];
    let s_b = qg_b.params()[j];
    let shift = s_a - s_b;

    let (mut params, mut points) = (Vec::new(), Vec::new());
    let keep_a = if j == last_b { i } else { i + 1 };
    params.extend_from_slice(&qg_a.params()[..keep_a]);
    points.extend_from_slice(&qg_a.points()[..keep_a]);
    let from_b = if j == last_b { j } else { j + 1 };
    for k in from_b..qg_b.len() {
        params.push(qg_b.params()[k] + shift);
        points.push(qg_b.points()[k]);
    }
    let spliced = ParamPath::new(params, points)?;
    let t = s_a + qg_b.domain_length() - s_b;
    debug_assert_eq!(spliced.domain_length(), t);
    debug_assert_eq!(spliced.endpoints(), (a, b));

    let bound = splice_bound(q.c(), r, delta, space.max_weight());
    let join_distance = m.from_raw(join);
    let witness = SpliceWitness {
        w,
        c,
        geodesic_index: gi,
        a_prime: qg_a.points()[i],
        b_prime: qg_b.points()[j],
        s_a,
        s_b,
        t,
        join_distance,
        join_within_r_delta: join_distance <= r + delta + space.max_weight(),
        bound,
    };
    match verify_qg(m, &spliced, &QGParams::new(rational::int(1), bound)?)? {
        QgVerdict::Pass => Ok((spliced, witness)),
        QgVerdict::Fail { i, j, excess } => Err(Error::BoundMissed { i, j, excess, bound }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleStatus {
    /// `x` is within `C + 1` of `a` or `b`, hence of another side.
    ShortSide,
    /// A side segment is too short to cut out a gap wider than `λ + C`.
    NoTruncation,
    /// A quasigeodesic across the gap was found inside `Y`.
    Found,
    /// The search ran out of candidates or budget.
    Inconclusive,
}

/// One run of the four-segment triangle experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleExperimentRecord {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub side_ab: Vec<usize>,
    pub side_bc: Vec<usize>,
    pub side_ac: Vec<usize>,
    /// Point of `[a, b]` farthest from `[b, c] ∪ [a, c]`.
    pub x: usize,
    #[serde(with = "rational::serde_str")]
    pub x_distance: Rational,
    #[serde(with = "rational::serde_str")]
    pub lambda: Rational,
    #[serde(with = "rational::serde_str")]
    pub c_const: Rational,
    pub x_a: Option<usize>,
    pub x_b: Option<usize>,
    /// `d(x_a, x)` and `d(x_b, x)`.
    #[serde(with = "rational::serde_str_opt")]
    pub cut_a: Option<Rational>,
    #[serde(with = "rational::serde_str_opt")]
    pub cut_b: Option<Rational>,
    /// `[a, x_a] ∪ [b, x_b] ∪ [b, c] ∪ [a, c]`.
    pub y: Vec<usize>,
    pub path: Option<ParamPath>,
    /// First sample of `path` on `[a, c] ∪ [b, c]`.
    pub z: Option<usize>,
    #[serde(with = "rational::serde_str_opt")]
    pub z_distance: Option<Rational>,
    /// `λ²(2C + 1) + C`.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    #[serde(with = "rational::serde_str")]
    pub slack: Rational,
    pub status: TriangleStatus,
    pub bound_holds: bool,
}

impl TriangleExperimentRecord {
    /// Both long-side preconditions `d(a, x) > C + 1` and `d(x, b) > C + 1`.
    pub fn long_sides(&self) -> bool {
        matches!(
            self.status,
            TriangleStatus::Found | TriangleStatus::Inconclusive | TriangleStatus::NoTruncation
        )
    }
}

/// `λ²(2C + 1) + C`.
pub fn triangle_bound(q: &QGParams) -> Rational {
    let l = q.lambda();
    l * l * (q.c() * 2 + 1) + q.c()
}

/// Runs the triangle experiment on the first enumerated geodesics between
/// `a`, `b` and `c`.
///
/// `x_a` and `x_b` are the vertices of `[a, x]` and `[x, b]` closest to `x`
/// whose distance to `x` exceeds `(λ + C)/2`. With unit parameter steps
/// this is what rules out a single jump across the gap, so a found path
/// must pass through the other two sides.
pub fn triangle_experiment(
    space: &GeodesicSpace,
    a: usize,
    b: usize,
    c: usize,
    q: &QGParams,
    budget: usize,
    geodesic_cap: usize,
) -> Result<TriangleExperimentRecord> {
    let m = space.metric();
    for p in [a, b, c] {
        m.check_point(p)?;
    }
    if a == b || b == c || a == c {
        return Err(Error::InvalidParams(format!(
            "triangle corners must be distinct, got ({a}, {b}, {c})"
        )));
    }
    let cap = geodesic_cap.max(1);
    let side = |u, v| space.geodesics(u, v, cap).paths[0].vertices().to_vec();
    let (side_ab, side_bc, side_ac) = (side(a, b), side(b, c), side(a, c));
    let others: Vec<usize> = side_bc
        .iter()
        .chain(&side_ac)
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let (x_pos, x) = side_ab
        .iter()
        .copied()
        .enumerate()
        .max_by_key(|&(_, p)| (m.raw_point_to_set(p, &others), std::cmp::Reverse(p)))
        .expect("side is nonempty");
    let x_distance = m.from_raw(m.raw_point_to_set(x, &others));
    let one = rational::int(1);
    let slack = space.max_weight() * 2;
    let mut rec = TriangleExperimentRecord {
        a,
        b,
        c,
        side_ab: side_ab.clone(),
        side_bc,
        side_ac,
        x,
        x_distance,
        lambda: q.lambda(),
        c_const: q.c(),
        x_a: None,
        x_b: None,
        cut_a: None,
        cut_b: None,
        y: Vec::new(),
        path: None,
        z: None,
        z_distance: None,
        bound: triangle_bound(q),
        slack,
        status: TriangleStatus::ShortSide,
        bound_holds: false,
    };
    if m.dist(a, x) <= q.c() + one || m.dist(x, b) <= q.c() + one {
        rec.bound_holds = x_distance <= q.c() + one;
        return Ok(rec);
    }

    let half_gap = (q.lambda() + q.c()) / 2;
    let x_a = side_ab[..x_pos]
        .iter()
        .rev()
        .copied()
        .find(|&p| m.dist(p, x) > half_gap);
    let x_b = side_ab[x_pos + 1..].iter().copied().find(|&p| m.dist(p, x) > half_gap);
    let (Some(x_a), Some(x_b)) = (x_a, x_b) else {
        rec.status = TriangleStatus::NoTruncation;
        return Ok(rec);
    };
    rec.x_a = Some(x_a);
    rec.x_b = Some(x_b);
    rec.cut_a = Some(m.dist(x_a, x));
    rec.cut_b = Some(m.dist(x_b, x));

    let pos_a = side_ab.iter().position(|&p| p == x_a).expect("on side");
    let pos_b = side_ab.iter().position(|&p| p == x_b).expect("on side");
    let y: BTreeSet<usize> = side_ab[..=pos_a]
        .iter()
        .chain(&side_ab[pos_b..])
        .chain(&others)
        .copied()
        .collect();
    let mut allowed = vec![false; space.n()];
    for &p in &y {
        allowed[p] = true;
    }
    rec.y = y.into_iter().collect();

    match search_qg_path(space, &allowed, x_a, x_b, q, budget)? {
        PairSearch::Found { path } => {
            rec.status = TriangleStatus::Found;
            rec.z = path.points().iter().copied().find(|p| others.binary_search(p).is_ok());
            rec.z_distance = rec.z.map(|z| m.dist(x_a, z));
            rec.bound_holds = rec.z_distance.is_some_and(|d| d <= rec.bound + slack);
            rec.path = Some(path);
        }
        PairSearch::Exhausted | PairSearch::BudgetHit => {
            rec.status = TriangleStatus::Inconclusive;
        }
    }
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UnionVerdict {
    Pass,
    Fail { a: usize, b: usize },
}

/// Checks that the union of two intersecting geodesic subspaces of a tree
/// is again a geodesic subspace.
pub fn union_geodesic_check_tree(space: &GeodesicSpace, a_sub: &Subspace, b_sub: &Subspace) -> Result<UnionVerdict> {
    if !space.graph().is_tree() {
        return Err(Error::NotATree);
    }
    if !a_sub.points().iter().any(|&p| b_sub.contains(p)) {
        return Err(Error::EmptyIntersection);
    }
    let geodesic = QGParams::geodesic();
    // In a tree, induced shortest paths settle every pair without search.
    let budget = 1;
    for sub in [a_sub, b_sub] {
        if !certify_qg_subspace(space, sub, &geodesic, budget)?.is_certified() {
            return Err(Error::InvalidParams(format!(
                "{:?} is not a geodesic subspace",
                sub.label()
            )));
        }
    }
    Ok(
        match certify_qg_subspace(space, &a_sub.union(b_sub), &geodesic, budget)? {
            Certification::Certified { .. } => UnionVerdict::Pass,
            Certification::Unknown { a, b, .. } => UnionVerdict::Fail { a, b },
        },
    )
}
