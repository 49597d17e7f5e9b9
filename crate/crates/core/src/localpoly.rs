//! The local polytope: deterministic strategies, local bounds, facet
//! verification and detection of liftings from smaller scenarios.

use crate::error::Result;
use crate::model::{Behavior, CgTable, Scenario};
use crate::rank::integer_rank;
use crate::Rational;

/// A deterministic local strategy. `alpha[x]` is true when Alice answers 0
/// on setting `x`; likewise `beta[y]` for Bob.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    pub alpha: Vec<bool>,
    pub beta: Vec<bool>,
}

impl DeterministicStrategy {
    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.alpha.len(), self.beta.len())
    }

    pub fn behavior(&self) -> Result<Behavior> {
        Behavior::deterministic(self.scenario()?, &self.alpha, &self.beta)
    }

    /// CG coordinates `(p(00|xy) row-major, pA(0|x), pB(0|y))` of the vertex.
    pub fn cg_point(&self) -> Vec<i64> {
        let mut out =
            Vec::with_capacity(self.alpha.len() * (self.beta.len() + 1) + self.beta.len());
        for &a in &self.alpha {
            for &b in &self.beta {
                out.push(i64::from(a && b));
            }
        }
        out.extend(self.alpha.iter().map(|&a| i64::from(a)));
        out.extend(self.beta.iter().map(|&b| i64::from(b)));
        out
    }

    /// Exact value of the functional at this vertex.
    pub fn value(&self, table: &CgTable) -> i64 {
        let mut total = 0;
        for (x, &a) in self.alpha.iter().enumerate() {
            if !a {
                continue;
            }
            total += table.c()[x];
            for (y, &b) in self.beta.iter().enumerate() {
                if b {
                    total += table.d()[x][y];
                }
            }
        }
        total
            + self
                .beta
                .iter()
                .zip(table.e())
                .filter(|(&b, _)| b)
                .map(|(_, &e)| e)
                .sum::<i64>()
    }
}

/// All `2^(nA+nB)` deterministic strategies in lexicographic `(alpha, beta)`
/// order, with `false < true`.
pub fn enumerate_strategies(scenario: Scenario) -> Vec<DeterministicStrategy> {
    let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
    let bits = n_a + n_b;
    (0u32..1 << bits)
        .map(|k| {
            let bit = |i: usize| (k >> (bits - 1 - i)) & 1 == 1;
            DeterministicStrategy {
                alpha: (0..n_a).map(bit).collect(),
                beta: (n_a..bits).map(bit).collect(),
            }
        })
        .collect()
}

/// Maximum of the functional over the local polytope.
pub fn local_bound(table: &CgTable) -> i64 {
    enumerate_strategies(table.scenario())
        .iter()
        .map(|s| s.value(table))
        .max()
        .expect("at least one strategy")
}

/// Value of the functional on the maximally mixed behavior.
pub fn white_noise_value(table: &CgTable) -> Rational {
    Rational::new(table.sum_d(), 4) + Rational::new(table.sum_c() + table.sum_e(), 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetReport {
    /// The stated bound equals the local bound.
    pub is_valid: bool,
    pub saturating_count: usize,
    /// Affine dimension of the saturating vertex set.
    pub affine_dimension: usize,
    pub is_facet: bool,
}

/// Checks whether the table's stated bound defines a facet of the local
/// polytope, using the exact affine rank of the saturating vertices.
pub fn facet_check(table: &CgTable) -> FacetReport {
    let scenario = table.scenario();
    let strategies = enumerate_strategies(scenario);
    let is_valid = local_bound(table) == table.bound();

    let saturating: Vec<Vec<i64>> = strategies
        .iter()
        .filter(|s| s.value(table) == table.bound())
        .map(DeterministicStrategy::cg_point)
        .collect();

    let affine_dimension = match saturating.split_first() {
        None => 0,
        Some((base, rest)) => {
            let diffs: Vec<Vec<i64>> = rest
                .iter()
                .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            integer_rank(&diffs)
        }
    };

    FacetReport {
        is_valid,
        saturating_count: saturating.len(),
        affine_dimension,
        is_facet: is_valid && affine_dimension + 1 == scenario.cg_dimension(),
    }
}

/// A table that ignores some settings, together with its reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifting {
    pub reduced: CgTable,
    pub dropped_a: Vec<usize>,
    pub dropped_b: Vec<usize>,
}

/// Detects settings that carry no coefficient at all and removes them.
///
/// At least one setting is kept per party, so the all-zero table reduces to
/// the 1x1 scenario rather than to an empty one.
pub fn detect_lifting(table: &CgTable) -> Option<Lifting> {
    let scenario = table.scenario();
    let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
    let unused_a = |x: usize| table.c()[x] == 0 && table.d()[x].iter().all(|&v| v == 0);
    let unused_b = |y: usize| table.e()[y] == 0 && table.d().iter().all(|row| row[y] == 0);

    let mut dropped_a: Vec<usize> = (0..n_a).filter(|&x| unused_a(x)).collect();
    let mut dropped_b: Vec<usize> = (0..n_b).filter(|&y| unused_b(y)).collect();
    if dropped_a.len() == n_a {
        dropped_a.remove(0);
    }
    if dropped_b.len() == n_b {
        dropped_b.remove(0);
    }
    if dropped_a.is_empty() && dropped_b.is_empty() {
        return None;
    }

    let keep_a: Vec<usize> = (0..n_a).filter(|x| !dropped_a.contains(x)).collect();
    let keep_b: Vec<usize> = (0..n_b).filter(|y| !dropped_b.contains(y)).collect();
    let reduced_scenario = Scenario::new(keep_a.len(), keep_b.len()).ok()?;
    let d = keep_a
        .iter()
        .map(|&x| keep_b.iter().map(|&y| table.d()[x][y]).collect())
        .collect();
    let c = keep_a.iter().map(|&x| table.c()[x]).collect();
    let e = keep_b.iter().map(|&y| table.e()[y]).collect();
    let mut reduced = CgTable::new(reduced_scenario, d, c, e, table.bound()).ok()?;
    if let Some(name) = table.name() {
        reduced = reduced.with_name(name);
    }
    Some(Lifting {
        reduced,
        dropped_a,
        dropped_b,
    })
}
