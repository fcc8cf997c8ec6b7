//! Finitely sampled quasigeodesics.
//!
//! A [`ParamPath`] is a map from the grid `t_0 = 0 < t_1 < … < t_m` of a real
//! interval into the point set. It need not be continuous: consecutive
//! samples may jump. A path is a `(λ, C)`-quasigeodesic when every pair of
//! samples satisfies
//!
//! ```text
//! (t_j − t_i) / λ − C  ≤  d(p_i, p_j)  ≤  λ (t_j − t_i) + C
//! ```

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::metric::{FiniteMetricSpace, GeodesicSpace, VertexPath};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Quasigeodesic constants `(λ, C)` with `λ ≥ 1` and `C ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QGParams {
    #[serde(with = "rational::serde_str")]
    lambda: Rational,
    #[serde(with = "rational::serde_str")]
    c: Rational,
}

impl QGParams {
    /// `lambda` in `(0, 1)` is raised to 1.
    pub fn new(lambda: Rational, c: Rational) -> Result<Self> {
        if lambda <= Rational::zero() {
            return Err(Error::InvalidParams(format!("lambda must be positive, got {lambda}")));
        }
        if c < Rational::zero() {
            return Err(Error::InvalidParams(format!("c must be nonnegative, got {c}")));
        }
        Ok(QGParams {
            lambda: lambda.max(Rational::one()),
            c,
        })
    }

    pub fn geodesic() -> Self {
        QGParams {
            lambda: Rational::one(),
            c: Rational::zero(),
        }
    }

    pub fn lambda(&self) -> Rational {
        self.lambda
    }

    pub fn c(&self) -> Rational {
        self.c
    }
}

/// Sampled map `f: [0, v] → X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ParamPathRepr", into = "ParamPathRepr")]
pub struct ParamPath {
    params: Vec<Rational>,
    points: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ParamPathRepr {
    #[serde(with = "rational::serde_str_vec")]
    params: Vec<Rational>,
    points: Vec<usize>,
}

impl TryFrom<ParamPathRepr> for ParamPath {
    type Error = Error;
    fn try_from(r: ParamPathRepr) -> Result<Self> {
        ParamPath::new(r.params, r.points)
    }
}

impl From<ParamPath> for ParamPathRepr {
    fn from(p: ParamPath) -> Self {
        ParamPathRepr {
            params: p.params,
            points: p.points,
        }
    }
}

impl ParamPath {
    pub fn new(params: Vec<Rational>, points: Vec<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPath("path has no samples".into()));
        }
        if params.len() != points.len() {
            return Err(Error::InvalidPath(format!(
                "{} params for {} points",
                params.len(),
                points.len()
            )));
        }
        if !params[0].is_zero() {
            return Err(Error::InvalidPath("first parameter must be 0".into()));
        }
        if let Some(i) = params.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPath(format!(
                "parameters not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(ParamPath { params, points })
    }

    /// Samples at `0, 1, 2, …`.
    pub fn unit_steps(points: Vec<usize>) -> Result<Self> {
        let params = (0..points.len() as i64).map(rational::int).collect();
        Self::new(params, points)
    }

    /// Parameterizes a walk by cumulative edge length. Repeated vertices
    /// would give equal parameters, so the walk must not stand still.
    pub fn from_vertex_path(space: &GeodesicSpace, path: &VertexPath) -> Result<Self> {
        space.path_length(path)?;
        let vs = path.vertices();
        let mut params = Vec::with_capacity(vs.len());
        let mut t = Rational::zero();
        params.push(t);
        for w in vs.windows(2) {
            t += space.graph().weight(w[0], w[1]).expect("checked by path_length");
            params.push(t);
        }
        Self::new(params, vs.to_vec())
    }

    pub fn params(&self) -> &[Rational] {
        &self.params
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.points[0], self.points[self.points.len() - 1])
    }

    /// `v = t_m`.
    pub fn domain_length(&self) -> Rational {
        self.params[self.params.len() - 1]
    }

    /// Sorted, deduplicated set of sampled points.
    pub fn image(&self) -> Vec<usize> {
        self.points
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Fails if any sample is not a vertex of an `n`-point space.
    pub fn check_points(&self, n: usize) -> Result<()> {
        match self.points.iter().find(|&&p| p >= n) {
            Some(&p) => Err(Error::VertexOutOfRange { vertex: p, n }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum QgVerdict {
    Pass,
    /// Sample pair `(i, j)` with the largest violation and by how much it
    /// misses the nearer bound.
    Fail {
        i: usize,
        j: usize,
        #[serde(with = "rational::serde_str")]
        excess: Rational,
    },
}

impl QgVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, QgVerdict::Pass)
    }
}

/// How far the pair misses `[dt/λ − C, λ dt + C]`; nonpositive when inside.
fn pair_excess(dt: Rational, d: Rational, q: &QGParams) -> Rational {
    let low = dt / q.lambda - q.c - d;
    let high = d - q.lambda * dt - q.c;
    low.max(high)
}

pub fn verify_qg(space: &FiniteMetricSpace, path: &ParamPath, q: &QGParams) -> Result<QgVerdict> {
    path.check_points(space.len())?;
    let mut worst: Option<(usize, usize, Rational)> = None;
    let (ts, ps) = (path.params(), path.points());
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            let excess = pair_excess(ts[j] - ts[i], space.dist(ps[i], ps[j]), q);
            if excess > Rational::zero() && worst.is_none_or(|(_, _, w)| excess > w) {
                worst = Some((i, j, excess));
            }
        }
    }
    Ok(match worst {
        None => QgVerdict::Pass,
        Some((i, j, excess)) => QgVerdict::Fail { i, j, excess },
    })
}

/// Least `C ≥ 0` for which `path` is a `(lambda, C)`-quasigeodesic.
pub fn fit_c(space: &FiniteMetricSpace, path: &ParamPath, lambda: Rational) -> Result<Rational> {
    path.check_points(space.len())?;
    let q = QGParams::new(lambda, Rational::zero())?;
    let (ts, ps) = (path.params(), path.points());
    let mut c = Rational::zero();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            c = c.max(pair_excess(ts[j] - ts[i], space.dist(ps[i], ps[j]), &q));
        }
    }
    Ok(c)
}

/// Measured stability radius: Hausdorff distance from a path's image to the
/// closest enumerated geodesic between its endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseEstimate {
    #[serde(with = "rational::serde_str")]
    pub r: Rational,
    #[serde(serialize_with = "ser_vertex_path", deserialize_with = "de_vertex_path")]
    pub geodesic: VertexPath,
    pub truncated: bool,
}

fn ser_vertex_path<S: serde::Serializer>(p: &VertexPath, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.vertices().serialize(s)
}

fn de_vertex_path<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<VertexPath, D::Error> {
    VertexPath::new(Vec::<usize>::deserialize(d)?).map_err(serde::de::Error::custom)
}

pub fn morse_radius(space: &GeodesicSpace, path: &ParamPath, geodesic_cap: usize) -> Result<MorseEstimate> {
    path.check_points(space.n())?;
    let (a, b) = path.endpoints();
    let geos = space.geodesics(a, b, geodesic_cap.max(1));
    let image = path.image();
    let m = space.metric();
    let (best, r) = geos
        .paths
        .iter()
        .map(|g| (g, m.raw_hausdorff(&image, g.vertices())))
        .fold(None, |acc: Option<(&VertexPath, i64)>, (g, r)| match acc {
            Some((_, br)) if br <= r => acc,
            _ => Some((g, r)),
        })
        .expect("connected space has a geodesic");
    Ok(MorseEstimate {
        r: m.from_raw(r),
        geodesic: best.clone(),
        truncated: geos.truncated,
    })
}

/// Replaces `path` by a path on the grid of its closest geodesic, sending
/// each geodesic vertex to the nearest point of `path`'s image (lowest index
/// on ties). The result has the same endpoints, its image lies inside the
/// original image, and it is a `(1, 2r)`-quasigeodesic.
pub fn tame(space: &GeodesicSpace, path: &ParamPath, geodesic_cap: usize) -> Result<(ParamPath, MorseEstimate)> {
    let est = morse_radius(space, path, geodesic_cap)?;
    let grid = ParamPath::from_vertex_path(space, &est.geodesic)?;
    let image = path.image();
    let m = space.metric();
    let mut points: Vec<usize> = grid
        .points()
        .iter()
        .map(|&g| {
            *image
                .iter()
                .min_by_key(|&&p| (m.raw(g, p), p))
                .expect("image is nonempty")
        })
        .collect();
    let (a, b) = path.endpoints();
    points[0] = a;
    let last = points.len() - 1;
    points[last] = b;
    let tamed = ParamPath::new(grid.params().to_vec(), points)?;
    Ok((tamed, est))
}

/// Additive constant `tame` output is checked against: `2r + 2·max_weight`.
pub fn tame_bound(r: Rational, max_weight: Rational) -> Rational {
    r * 2 + max_weight * 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Graph;
    use crate::rational::int;

    fn cycle(n: usize) -> GeodesicSpace {
        GeodesicSpace::new(Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()).unwrap()
    }

    /// 0-1-2-3 with leaf 4 hanging off 1.
    fn spur_tree() -> GeodesicSpace {
        GeodesicSpace::new(Graph::unweighted(5, [(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap()).unwrap()
    }

    #[test]
    fn params_normalize_lambda() {
        let q = QGParams::new(Rational::new(1, 2), int(3)).unwrap();
        assert_eq!(q.lambda(), int(1));
        assert!(QGParams::new(int(0), int(0)).is_err());
        assert!(QGParams::new(int(1), int(-1)).is_err());
    }

    #[test]
    fn param_path_validation() {
        assert!(ParamPath::new(vec![], vec![]).is_err());
        assert!(ParamPath::new(vec![int(1)], vec![0]).is_err());
        assert!(ParamPath::new(vec![int(0), int(0)], vec![0, 1]).is_err());
        assert!(ParamPath::new(vec![int(0)], vec![0, 1]).is_err());
        let p = ParamPath::new(vec![int(0), Rational::new(1, 2)], vec![3, 3]).unwrap();
        assert_eq!(p.endpoints(), (3, 3));
        assert_eq!(p.domain_length(), Rational::new(1, 2));
        assert_eq!(p.image(), vec![3]);
    }

    #[test]
    fn json_shape_and_validation() {
        let p = ParamPath::new(vec![int(0), Rational::new(3, 2)], vec![0, 3]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"params":["0","3/2"],"points":[0,3]}"#);
        assert_eq!(serde_json::from_str::<ParamPath>(&s).unwrap(), p);
        assert!(serde_json::from_str::<ParamPath>(r#"{"params":[],"points":[]}"#).is_err());
        assert!(serde_json::from_str::<ParamPath>(r#"{"params":["0","0"],"points":[1,2]}"#).is_err());
    }

    #[test]
    fn geodesic_is_1_0() {
        let sp = cycle(8);
        let g = &sp.geodesics(0, 4, 4).paths[1];
        let p = ParamPath::from_vertex_path(&sp, g).unwrap();
        assert_eq!(
            verify_qg(sp.metric(), &p, &QGParams::geodesic()).unwrap(),
            QgVerdict::Pass
        );
        assert_eq!(fit_c(sp.metric(), &p, int(1)).unwrap(), int(0));
    }

    #[test]
    fn single_point_passes_anything() {
        let sp = cycle(5);
        let p = ParamPath::unit_steps(vec![2]).unwrap();
        assert!(verify_qg(sp.metric(), &p, &QGParams::geodesic()).unwrap().passed());
        assert_eq!(fit_c(sp.metric(), &p, int(3)).unwrap(), int(0));
    }

    #[test]
    fn c6_full_walk_fails_at_ends() {
        let sp = cycle(6);
        let p = ParamPath::unit_steps(vec![0, 1, 2, 3, 4, 5]).unwrap();
        // Oracle: the worst pair is the one with the largest parameter gap
        // against the smallest distance.
        let m = sp.metric();
        let mut oracle = (0, 0, int(0));
        for i in 0..6 {
            for j in i + 1..6 {
                let e = int((j - i) as i64) - m.dist(i, j);
                if e > oracle.2 {
                    oracle = (i, j, e);
                }
            }
        }
        assert_eq!(oracle, (0, 5, int(4)));
        assert_eq!(
            verify_qg(m, &p, &QGParams::geodesic()).unwrap(),
            QgVerdict::Fail {
                i: 0,
                j: 5,
                excess: int(4)
            }
        );
        assert_eq!(fit_c(m, &p, int(1)).unwrap(), int(4));
    }

    #[test]
    fn large_lambda_leaves_only_lower_deficit() {
        let sp = cycle(6);
        let p = ParamPath::unit_steps(vec![0, 3, 0, 3]).unwrap();
        // Upper side never binds at lambda = 10; lower deficits are t/10 - d.
        let m = sp.metric();
        let mut low = int(0);
        for i in 0..4 {
            for j in i + 1..4 {
                low = low.max(Rational::new((j - i) as i64, 10) - m.dist(p.points()[i], p.points()[j]));
            }
        }
        assert_eq!(fit_c(m, &p, int(10)).unwrap(), low);
        assert_eq!(low, Rational::new(2, 10));
    }

    #[test]
    fn morse_radius_examples() {
        let sp = spur_tree();
        let geo = ParamPath::unit_steps(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(morse_radius(&sp, &geo, 4).unwrap().r, int(0));
        let detour = ParamPath::unit_steps(vec![0, 1, 4, 1, 2, 3]).unwrap();
        let est = morse_radius(&sp, &detour, 4).unwrap();
        assert_eq!(est.r, int(1));
        assert_eq!(est.geodesic.vertices(), &[0, 1, 2, 3]);

        let c8 = cycle(8);
        let long = ParamPath::unit_steps(vec![0, 1, 2, 3, 4, 5, 6]).unwrap();
        let geos = c8.geodesics(0, 6, 8);
        assert_eq!(geos.paths.len(), 1);
        // Oracle: Hausdorff by explicit double loop.
        let m = c8.metric();
        let h = |a: &[usize], b: &[usize]| {
            let one = a
                .iter()
                .map(|&x| b.iter().map(|&y| m.dist(x, y)).min().unwrap())
                .max()
                .unwrap();
            let two = b
                .iter()
                .map(|&y| a.iter().map(|&x| m.dist(x, y)).min().unwrap())
                .max()
                .unwrap();
            one.max(two)
        };
        let oracle = geos.paths.iter().map(|g| h(&long.image(), g.vertices())).min().unwrap();
        assert_eq!(oracle, int(3));
        assert_eq!(morse_radius(&c8, &long, 8).unwrap().r, oracle);
    }

    #[test]
    fn tame_examples() {
        let sp = spur_tree();
        let geo = ParamPath::unit_steps(vec![0, 1, 2, 3]).unwrap();
        let (t, est) = tame(&sp, &geo, 4).unwrap();
        assert_eq!(t, geo);
        assert_eq!(est.r, int(0));

        let detour = ParamPath::unit_steps(vec![0, 1, 4, 1, 2, 3]).unwrap();
        let (t, est) = tame(&sp, &detour, 4).unwrap();
        assert_eq!(est.r, int(1));
        assert!(verify_qg(sp.metric(), &t, &QGParams::new(int(1), int(2)).unwrap())
            .unwrap()
            .passed());

        let c8 = cycle(8);
        let long = ParamPath::unit_steps(vec![0, 1, 2, 3, 4, 5, 6]).unwrap();
        let (t, est) = tame(&c8, &long, 8).unwrap();
        assert_eq!(t.endpoints(), (0, 6));
        assert_eq!(t.points(), &[0, 0, 6]);
        let image: BTreeSet<_> = long.image().into_iter().collect();
        assert!(t.points().iter().all(|p| image.contains(p)));
        let bound = tame_bound(est.r, c8.max_weight());
        assert_eq!(bound, int(8));
        assert!(verify_qg(c8.metric(), &t, &QGParams::new(int(1), bound).unwrap())
            .unwrap()
            .passed());
    }

    #[test]
    fn tame_closed_loop_collapses_to_point() {
        let sp = cycle(6);
        let loop_path = ParamPath::unit_steps(vec![2, 3, 4, 3, 2]).unwrap();
        let (t, est) = tame(&sp, &loop_path, 4).unwrap();
        assert_eq!(t.points(), &[2]);
        assert_eq!(est.r, int(2));
    }
}
