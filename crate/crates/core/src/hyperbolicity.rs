//! Gromov hyperbolicity constants.
//!
//! Two definitions are computed exactly:
//!
//! * [`delta_four_point`] uses the Gromov-product inequality and needs only
//!   the distance table. It scans unordered 4-sets; for a set the largest
//!   value over its orderings is half the gap between the largest and the
//!   second-largest of the three pair sums.
//! * [`delta_slim`] is the slim-triangle constant: the smallest `δ` such that
//!   every side of every geodesic triangle lies in the closed
//!   `δ`-neighbourhood of the other two sides, quantified over all
//!   enumerated geodesic choices.
//!
//! Both scans are split by their first index into independent work units
//! and reduced by "largest value, then smallest witness", so the report is
//! the same for any number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metric::{FiniteMetricSpace, GeodesicSpace};
use crate::rational::Rational;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FourPoint,
    Slim,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four_point" | "four-point" | "4pt" => Ok(Method::FourPoint),
            "slim" => Ok(Method::Slim),
            other => Err(Error::InvalidParams(format!("unknown method {other:?}"))),
        }
    }
}

/// `delta` with the tuple that attains it.
///
/// For [`Method::FourPoint`] the witness is an ordered quadruple
/// `[x, y, z, w]`. For [`Method::Slim`] it is `[a, b, c, i_ab, i_ac, i_bc, p]`:
/// apex `a`, side `[b, c]`, geodesic choice indices for the three sides and
/// the point `p` on `[b, c]` farthest from the other two sides. Geodesic
/// indices refer to the enumeration order from the lower- to the
/// higher-indexed endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    #[serde(with = "crate::rational::serde_str")]
    pub delta: Rational,
    pub method: Method,
    pub witness: Vec<usize>,
    pub truncated: bool,
}

/// `(x·y)_w = (d(x,w) + d(y,w) − d(x,y)) / 2`.
pub fn gromov_product(space: &FiniteMetricSpace, x: usize, y: usize, w: usize) -> Rational {
    let twice = space.raw(x, w) + space.raw(y, w) - space.raw(x, y);
    Rational::new(twice, 2 * space.scale())
}

/// `min((x·y)_w, (y·z)_w) − (x·z)_w`, unfloored.
pub fn four_point_value(space: &FiniteMetricSpace, q: [usize; 4]) -> Rational {
    let [x, y, z, w] = q;
    gromov_product(space, x, y, w).min(gromov_product(space, y, z, w)) - gromov_product(space, x, z, w)
}

/// Twice the four-point value, in raw units. Algebraically
/// `d(y,w) + d(x,z) − max(d(x,y) + d(z,w), d(y,z) + d(x,w))`.
#[inline]
fn raw_value2(s: &FiniteMetricSpace, [x, y, z, w]: [usize; 4]) -> i64 {
    s.raw(y, w) + s.raw(x, z) - (s.raw(x, y) + s.raw(z, w)).max(s.raw(y, z) + s.raw(x, w))
}

#[derive(Clone, Copy)]
struct Best4 {
    value2: i64,
    witness: [usize; 4],
}

impl Best4 {
    fn better(self, other: Best4) -> Best4 {
        if other.value2 > self.value2 || (other.value2 == self.value2 && other.witness < self.witness) {
            other
        } else {
            self
        }
    }
}

const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];

/// Four-point `δ` over all ordered quadruples, floored at 0.
///
/// Ties go to the lexicographically smallest ordered quadruple; when
/// `δ = 0` that is `[0, 0, 0, 0]`.
pub fn delta_four_point(space: &FiniteMetricSpace) -> HyperbolicityReport {
    let n = space.len();
    let zero = Best4 {
        value2: 0,
        witness: [0; 4],
    };
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = zero;
            for j in i + 1..n {
                for k in j + 1..n {
                    let dij = space.raw(i, j);
                    let dik = space.raw(i, k);
                    let djk = space.raw(j, k);
                    for l in k + 1..n {
                        let s1 = dij + space.raw(k, l);
                        let s2 = dik + space.raw(j, l);
                        let s3 = djk + space.raw(i, l);
                        let (hi, mid) = top_two(s1, s2, s3);
                        let v2 = hi - mid;
                        if v2 > 0 && v2 >= best.value2 {
                            let set = [i, j, k, l];
                            let witness = PERMS4
                                .iter()
                                .map(|p| [set[p[0]], set[p[1]], set[p[2]], set[p[3]]])
                                .find(|&q| raw_value2(space, q) == v2)
                                .expect("some ordering attains the set maximum");
                            best = best.better(Best4 { value2: v2, witness });
                        }
                    }
                }
            }
            best
        })
        .reduce(|| zero, Best4::better);
    HyperbolicityReport {
        delta: Rational::new(best.value2, 2 * space.scale()),
        method: Method::FourPoint,
        witness: best.witness.to_vec(),
        truncated: false,
    }
}

#[inline]
fn top_two(a: i64, b: i64, c: i64) -> (i64, i64) {
    if a >= b {
        if b >= c {
            (a, b)
        } else if a >= c {
            (a, c)
        } else {
            (c, a)
        }
    } else if a >= c {
        (b, a)
    } else if b >= c {
        (b, c)
    } else {
        (c, b)
    }
}

/// Geodesics of every unordered pair with, for each geodesic, the distance
/// from every vertex to its image.
struct GeodesicTable {
    n: usize,
    /// `ranges[pair]` indexes into `paths`.
    ranges: Vec<std::ops::Range<usize>>,
    paths: Vec<Vec<usize>>,
    dist_to: Vec<i64>,
    truncated: bool,
}

impl GeodesicTable {
    fn build(space: &GeodesicSpace, cap: usize) -> Self {
        let n = space.n();
        let m = space.metric();
        let per_pair: Vec<_> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                if i < j {
                    let g = space.geodesics(i, j, cap);
                    let paths: Vec<Vec<usize>> = g.paths.into_iter().map(|p| p.vertices().to_vec()).collect();
                    let dist: Vec<i64> = paths
                        .iter()
                        .flat_map(|p| (0..n).map(move |v| m.raw_point_to_set(v, p)))
                        .collect();
                    (paths, dist, g.truncated)
                } else {
                    (Vec::new(), Vec::new(), false)
                }
            })
            .collect();
        let mut table = GeodesicTable {
            n,
            ranges: Vec::with_capacity(n * n),
            paths: Vec::new(),
            dist_to: Vec::new(),
            truncated: false,
        };
        for (paths, dist, trunc) in per_pair {
            let start = table.paths.len();
            table.paths.extend(paths);
            table.dist_to.extend(dist);
            table.ranges.push(start..table.paths.len());
            table.truncated |= trunc;
        }
        table
    }

    fn range(&self, u: usize, v: usize) -> std::ops::Range<usize> {
        let (u, v) = (u.min(v), u.max(v));
        self.ranges[u * self.n + v].clone()
    }

    #[inline]
    fn dist(&self, g: usize, v: usize) -> i64 {
        self.dist_to[g * self.n + v]
    }
}

#[derive(Clone)]
struct BestSlim {
    value: i64,
    witness: Vec<usize>,
}

impl BestSlim {
    fn better(self, other: BestSlim) -> BestSlim {
        match (self.witness.is_empty(), other.witness.is_empty()) {
            (_, true) => self,
            (true, false) => other,
            (false, false) => {
                if other.value > self.value || (other.value == self.value && other.witness < self.witness) {
                    other
                } else {
                    self
                }
            }
        }
    }
}

/// Slim-triangle `δ` over all triples of distinct vertices and every
/// combination of enumerated geodesic sides. Each geodesic enumeration is
/// capped at `geodesic_cap` paths; `truncated` reports whether any cap was
/// hit, in which case `delta` is a lower bound.
pub fn delta_slim(space: &GeodesicSpace, geodesic_cap: usize) -> HyperbolicityReport {
    let n = space.n();
    let table = GeodesicTable::build(space, geodesic_cap.max(1));
    let empty = BestSlim {
        value: 0,
        witness: Vec::new(),
    };
    let best = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best = empty.clone();
            for b in 0..n {
                for c in b + 1..n {
                    if a == b || a == c {
                        continue;
                    }
                    let r_ab = table.range(a, b);
                    let r_ac = table.range(a, c);
                    let r_bc = table.range(b, c);
                    for (i_ab, g_ab) in r_ab.clone().enumerate() {
                        for (i_ac, g_ac) in r_ac.clone().enumerate() {
                            for (i_bc, g_bc) in r_bc.clone().enumerate() {
                                let mut far = -1i64;
                                let mut far_p = 0;
                                for &p in &table.paths[g_bc] {
                                    let d = table.dist(g_ab, p).min(table.dist(g_ac, p));
                                    if d > far || (d == far && p < far_p) {
                                        far = d;
                                        far_p = p;
                                    }
                                }
                                if far >= best.value {
                                    best = best.better(BestSlim {
                                        value: far,
                                        witness: vec![a, b, c, i_ab, i_ac, i_bc, far_p],
                                    });
                                }
                            }
                        }
                    }
                }
            }
            best
        })
        .reduce(|| empty.clone(), BestSlim::better);
    HyperbolicityReport {
        delta: space.metric().from_raw(best.value),
        method: Method::Slim,
        witness: best.witness,
        truncated: table.truncated,
    }
}

/// Recomputes the defining expression at a report's witness.
pub fn evaluate_witness(space: &GeodesicSpace, report: &HyperbolicityReport, geodesic_cap: usize) -> Result<Rational> {
    let w = &report.witness;
    match report.method {
        Method::FourPoint => {
            let q: [usize; 4] = w
                .as_slice()
                .try_into()
                .map_err(|_| Error::InvalidParams("four-point witness needs 4 indices".into()))?;
            for &x in &q {
                space.metric().check_point(x)?;
            }
            Ok(four_point_value(space.metric(), q).max(Rational::from_integer(0)))
        }
        Method::Slim => {
            if w.is_empty() {
                return Ok(Rational::from_integer(0));
            }
            let [a, b, c, i_ab, i_ac, i_bc, p]: [usize; 7] = w
                .as_slice()
                .try_into()
                .map_err(|_| Error::InvalidParams("slim witness needs 7 entries".into()))?;
            let side = |u: usize, v: usize, i: usize| -> Result<Vec<usize>> {
                space
                    .geodesics(u.min(v), u.max(v), geodesic_cap)
                    .paths
                    .get(i)
                    .map(|g| g.vertices().to_vec())
                    .ok_or_else(|| Error::InvalidParams(format!("no geodesic #{i} for ({u},{v})")))
            };
            let bc = side(b, c, i_bc)?;
            if !bc.contains(&p) {
                return Err(Error::InvalidParams(format!("{p} is not on side [{b},{c}]")));
            }
            let mut others = side(a, b, i_ab)?;
            others.extend(side(a, c, i_ac)?);
            crate::metric::dist_point_to_set(space.metric(), p, &others)
        }
    }
}
