//! Bell scenarios, CG tables and behaviors.

use std::fmt;

use crate::error::{Error, Result};

/// Largest number of settings per party accepted anywhere in the crate.
pub const MAX_SETTINGS: usize = 8;

/// A bipartite scenario with `n_a` binary settings for Alice and `n_b` for Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario {
    n_a: usize,
    n_b: usize,
}

impl Scenario {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if !(1..=MAX_SETTINGS).contains(&n_a) || !(1..=MAX_SETTINGS).contains(&n_b) {
            return Err(Error::ScenarioRange(n_a, n_b));
        }
        Ok(Scenario { n_a, n_b })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Number of independent CG coordinates, `nA*nB + nA + nB`.
    pub fn cg_dimension(&self) -> usize {
        self.n_a * self.n_b + self.n_a + self.n_b
    }

    pub fn is_square(&self) -> bool {
        self.n_a == self.n_b
    }

    pub fn transposed(&self) -> Scenario {
        Scenario {
            n_a: self.n_b,
            n_b: self.n_a,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_a, self.n_b)
    }
}

/// A Bell inequality in CG form:
///
/// `sum_xy d[x][y] p(00|xy) + sum_x c[x] pA(0|x) + sum_y e[y] pB(0|y) <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CgTable {
    scenario: Scenario,
    d: Vec<Vec<i64>>,
    c: Vec<i64>,
    e: Vec<i64>,
    bound: i64,
    name: Option<String>,
}

impl CgTable {
    pub fn new(
        scenario: Scenario,
        d: Vec<Vec<i64>>,
        c: Vec<i64>,
        e: Vec<i64>,
        bound: i64,
    ) -> Result<Self> {
        let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
        if d.len() != n_a {
            return Err(Error::Dimension(format!(
                "d has {} rows, scenario {} needs {}",
                d.len(),
                scenario,
                n_a
            )));
        }
        if let Some((x, row)) = d.iter().enumerate().find(|(_, r)| r.len() != n_b) {
            return Err(Error::Dimension(format!(
                "d row {} has {} entries, scenario {} needs {}",
                x,
                row.len(),
                scenario,
                n_b
            )));
        }
        if c.len() != n_a {
            return Err(Error::Dimension(format!(
                "c has {} entries, scenario {} needs {}",
                c.len(),
                scenario,
                n_a
            )));
        }
        if e.len() != n_b {
            return Err(Error::Dimension(format!(
                "e has {} entries, scenario {} needs {}",
                e.len(),
                scenario,
                n_b
            )));
        }
        Ok(CgTable {
            scenario,
            d,
            c,
            e,
            bound,
            name: None,
        })
    }

    /// The all-zero functional with bound 0.
    pub fn zero(scenario: Scenario) -> Self {
        CgTable {
            scenario,
            d: vec![vec![0; scenario.n_b()]; scenario.n_a()],
            c: vec![0; scenario.n_a()],
            e: vec![0; scenario.n_b()],
            bound: 0,
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn without_name(mut self) -> Self {
        self.name = None;
        self
    }

    pub fn with_bound(mut self, bound: i64) -> Self {
        self.bound = bound;
        self
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn d(&self) -> &[Vec<i64>] {
        &self.d
    }

    pub fn c(&self) -> &[i64] {
        &self.c
    }

    pub fn e(&self) -> &[i64] {
        &self.e
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn sum_d(&self) -> i64 {
        self.d.iter().flatten().sum()
    }

    pub fn sum_c(&self) -> i64 {
        self.c.iter().sum()
    }

    pub fn sum_e(&self) -> i64 {
        self.e.iter().sum()
    }

    /// Coefficients in CG coordinate order: `d` row-major, then `c`, then `e`.
    pub fn coefficients(&self) -> Vec<i64> {
        self.d
            .iter()
            .flatten()
            .chain(self.c.iter())
            .chain(self.e.iter())
            .copied()
            .collect()
    }

    /// Embeds the table into a larger scenario by padding unused settings
    /// with zero coefficients.
    pub fn embed(&self, target: Scenario) -> Result<CgTable> {
        if target.n_a() < self.scenario.n_a() || target.n_b() < self.scenario.n_b() {
            return Err(Error::Dimension(format!(
                "cannot embed {} into smaller scenario {}",
                self.scenario, target
            )));
        }
        let mut out = CgTable::zero(target);
        for (x, row) in self.d.iter().enumerate() {
            out.d[x][..row.len()].copy_from_slice(row);
        }
        out.c[..self.c.len()].copy_from_slice(&self.c);
        out.e[..self.e.len()].copy_from_slice(&self.e);
        out.bound = self.bound;
        out.name = self.name.clone();
        Ok(out)
    }

    /// Evaluates the Bell functional on a behavior.
    pub fn evaluate(&self, behavior: &Behavior) -> Result<f64> {
        if behavior.scenario != self.scenario {
            return Err(Error::Dimension(format!(
                "table scenario {} vs behavior scenario {}",
                self.scenario, behavior.scenario
            )));
        }
        Ok(self.evaluate_unchecked(&behavior.joint, &behavior.marg_a, &behavior.marg_b))
    }

    pub(crate) fn evaluate_unchecked(
        &self,
        joint: &[Vec<f64>],
        marg_a: &[f64],
        marg_b: &[f64],
    ) -> f64 {
        let mut total = 0.0;
        for (drow, prow) in self.d.iter().zip(joint) {
            for (&d, &p) in drow.iter().zip(prow) {
                total += d as f64 * p;
            }
        }
        for (&c, &p) in self.c.iter().zip(marg_a) {
            total += c as f64 * p;
        }
        for (&e, &p) in self.e.iter().zip(marg_b) {
            total += e as f64 * p;
        }
        total
    }
}

/// Tolerance used when validating behavior probabilities.
const PROB_TOL: f64 = 1e-12;

/// A no-signalling behavior in CG coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    joint: Vec<Vec<f64>>,
    marg_a: Vec<f64>,
    marg_b: Vec<f64>,
}

impl Behavior {
    pub fn new(
        scenario: Scenario,
        joint: Vec<Vec<f64>>,
        marg_a: Vec<f64>,
        marg_b: Vec<f64>,
    ) -> Result<Self> {
        let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
        if joint.len() != n_a
            || joint.iter().any(|r| r.len() != n_b)
            || marg_a.len() != n_a
            || marg_b.len() != n_b
        {
            return Err(Error::Dimension(format!(
                "behavior shape does not match scenario {scenario}"
            )));
        }
        for x in 0..n_a {
            for y in 0..n_b {
                let (p, pa, pb) = (joint[x][y], marg_a[x], marg_b[y]);
                let ok = p >= -PROB_TOL
                    && p <= pa.min(pb) + PROB_TOL
                    && pa + pb - p <= 1.0 + PROB_TOL
                    && (0.0 - PROB_TOL..=1.0 + PROB_TOL).contains(&pa)
                    && (0.0 - PROB_TOL..=1.0 + PROB_TOL).contains(&pb);
                if !ok {
                    return Err(Error::Domain(format!(
                        "behavior entry ({x},{y}) is not a valid probability assignment"
                    )));
                }
            }
        }
        Ok(Behavior {
            scenario,
            joint,
            marg_a,
            marg_b,
        })
    }

    /// The behavior of the maximally mixed state: joint 1/4, marginals 1/2.
    pub fn white_noise(scenario: Scenario) -> Self {
        Behavior {
            scenario,
            joint: vec![vec![0.25; scenario.n_b()]; scenario.n_a()],
            marg_a: vec![0.5; scenario.n_a()],
            marg_b: vec![0.5; scenario.n_b()],
        }
    }

    pub fn zero(scenario: Scenario) -> Self {
        Behavior {
            scenario,
            joint: vec![vec![0.0; scenario.n_b()]; scenario.n_a()],
            marg_a: vec![0.0; scenario.n_a()],
            marg_b: vec![0.0; scenario.n_b()],
        }
    }

    /// Product behavior of two deterministic response functions; `alpha[x]`
    /// is true when Alice outputs 0 on setting `x`.
    pub fn deterministic(scenario: Scenario, alpha: &[bool], beta: &[bool]) -> Result<Self> {
        if alpha.len() != scenario.n_a() || beta.len() != scenario.n_b() {
            return Err(Error::Dimension(format!(
                "strategy shape does not match scenario {scenario}"
            )));
        }
        let f = |b: bool| if b { 1.0 } else { 0.0 };
        Ok(Behavior {
            scenario,
            joint: alpha
                .iter()
                .map(|&a| beta.iter().map(|&b| f(a && b)).collect())
                .collect(),
            marg_a: alpha.iter().map(|&a| f(a)).collect(),
            marg_b: beta.iter().map(|&b| f(b)).collect(),
        })
    }

    /// Convex combination `weight * self + (1 - weight) * other`.
    pub fn mix(&self, weight: f64, other: &Behavior) -> Result<Behavior> {
        if self.scenario != other.scenario {
            return Err(Error::Dimension(
                "mixing behaviors of different scenarios".into(),
            ));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::Domain(format!(
                "mixing weight {weight} outside [0,1]"
            )));
        }
        let lerp = |a: f64, b: f64| weight * a + (1.0 - weight) * b;
        Ok(Behavior {
            scenario: self.scenario,
            joint: self
                .joint
                .iter()
                .zip(&other.joint)
                .map(|(r, s)| r.iter().zip(s).map(|(&a, &b)| lerp(a, b)).collect())
                .collect(),
            marg_a: self
                .marg_a
                .iter()
                .zip(&other.marg_a)
                .map(|(&a, &b)| lerp(a, b))
                .collect(),
            marg_b: self
                .marg_b
                .iter()
                .zip(&other.marg_b)
                .map(|(&a, &b)| lerp(a, b))
                .collect(),
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn joint(&self) -> &[Vec<f64>] {
        &self.joint
    }

    pub fn marg_a(&self) -> &[f64] {
        &self.marg_a
    }

    pub fn marg_b(&self) -> &[f64] {
        &self.marg_b
    }
}

/// Evaluates `table` on `behavior`; free-function form of [`CgTable::evaluate`].
pub fn evaluate(table: &CgTable, behavior: &Behavior) -> Result<f64> {
    table.evaluate(behavior)
}
