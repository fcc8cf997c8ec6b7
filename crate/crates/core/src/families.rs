//! Seeded graph families and random test instances.
//!
//! Randomness comes from [`SplitMix64`] (Steele, Lea & Flood), chosen
//! because it is a few lines with fixed constants, so generated corpora are
//! identical on every platform and toolchain:
//!
//! ```text
//! state += 0x9E37_79B9_7F4A_7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//! z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//! out = z ^ (z >> 31)
//! ```
//!
//! `below(n)` maps an output to `[0, n)` as `(out * n) >> 64`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::metric::{GeodesicSpace, Graph};
use crate::quasigeodesic::ParamPath;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Vertex `i > 0` attaches to a uniform earlier vertex.
    RandomTree {
        n: usize,
        seed: u64,
    },
    Cycle {
        n: usize,
    },
    /// `k × k` lattice, vertex `r·k + c`.
    Grid {
        k: usize,
    },
    /// Random tree plus `chords` extra edges between uniform non-adjacent pairs.
    NoisyTree {
        n: usize,
        chords: usize,
        seed: u64,
    },
    /// Complete binary tree; children of `i` are `2i + 1` and `2i + 2`.
    BinaryTree {
        depth: u32,
    },
}

impl FamilySpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::RandomTree { .. } => "random_tree",
            FamilySpec::Cycle { .. } => "cycle",
            FamilySpec::Grid { .. } => "grid",
            FamilySpec::NoisyTree { .. } => "noisy_tree",
            FamilySpec::BinaryTree { .. } => "binary_tree",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            FamilySpec::RandomTree { seed, .. } | FamilySpec::NoisyTree { seed, .. } => Some(seed),
            _ => None,
        }
    }

    /// Same family with a different seed; seedless kinds are unchanged.
    pub fn with_seed(self, s: u64) -> Self {
        match self {
            FamilySpec::RandomTree { n, .. } => FamilySpec::RandomTree { n, seed: s },
            FamilySpec::NoisyTree { n, chords, .. } => FamilySpec::NoisyTree { n, chords, seed: s },
            other => other,
        }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<Graph> {
    let invalid = |m: &str| Err(Error::InvalidSpec(m.into()));
    match *spec {
        FamilySpec::RandomTree { n, seed } => {
            if n == 0 {
                return invalid("random_tree needs n >= 1");
            }
            Graph::unweighted(n, random_tree_edges(n, &mut SplitMix64::new(seed)))
        }
        FamilySpec::Cycle { n } => {
            if n < 3 {
                return invalid("cycle needs n >= 3");
            }
            Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        FamilySpec::Grid { k } => {
            if k == 0 {
                return invalid("grid needs k >= 1");
            }
            let mut edges = Vec::with_capacity(2 * k * (k - 1));
            for r in 0..k {
                for c in 0..k {
                    let v = r * k + c;
                    if c + 1 < k {
                        edges.push((v, v + 1));
                    }
                    if r + 1 < k {
                        edges.push((v, v + k));
                    }
                }
            }
            Graph::unweighted(k * k, edges)
        }
        FamilySpec::NoisyTree { n, chords, seed } => {
            if n == 0 {
                return invalid("noisy_tree needs n >= 1");
            }
            let max_extra = n * (n - 1) / 2 - (n - 1);
            if chords > max_extra {
                return invalid(&format!("{chords} chords do not fit in {n} vertices"));
            }
            let mut rng = SplitMix64::new(seed);
            let mut edges = random_tree_edges(n, &mut rng);
            let mut present: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
            while edges.len() < n - 1 + chords {
                let u = rng.below(n);
                let v = rng.below(n);
                let key = (u.min(v), u.max(v));
                if u != v && present.insert(key) {
                    edges.push(key);
                }
            }
            Graph::unweighted(n, edges)
        }
        FamilySpec::BinaryTree { depth } => {
            if depth > 20 {
                return invalid("binary_tree depth above 20");
            }
            let n = (1usize << (depth + 1)) - 1;
            Graph::unweighted(n, (1..n).map(|i| ((i - 1) / 2, i)))
        }
    }
}

fn random_tree_edges(n: usize, rng: &mut SplitMix64) -> Vec<(usize, usize)> {
    (1..n).map(|i| (rng.below(i), i)).collect()
}

/// Unit-step walk along a random geodesic from `a` to `b` with `detours`
/// out-and-back excursions to random neighbours spliced in.
pub fn detour_path(
    space: &GeodesicSpace,
    rng: &mut SplitMix64,
    a: usize,
    b: usize,
    detours: usize,
    geodesic_cap: usize,
) -> Result<ParamPath> {
    let geos = space.geodesics(a, b, geodesic_cap.max(1));
    let mut walk = geos.paths[rng.below(geos.paths.len())].vertices().to_vec();
    for _ in 0..detours {
        let i = rng.below(walk.len());
        let u = walk[i];
        let nbrs = space.graph().neighbors(u);
        if nbrs.is_empty() {
            break;
        }
        let v = nbrs[rng.below(nbrs.len())].0;
        walk.splice(i + 1..i + 1, [v, u]);
    }
    ParamPath::unit_steps(walk)
}

/// Union of the first enumerated geodesics from `root` to each seed. In a
/// tree this is the smallest convex subtree containing them.
pub fn geodesic_hull(space: &GeodesicSpace, root: usize, seeds: &[usize]) -> Vec<usize> {
    let mut set = BTreeSet::from([root]);
    for &s in seeds {
        if let Some(g) = space.geodesics(root, s, 1).paths.first() {
            set.extend(g.vertices());
        }
    }
    set.into_iter().collect()
}
