//! Two-qubit quantum values and the see-saw maximizer.
//!
//! The state is `cos t |00> + sin t |11>` and every setting is a projective
//! measurement `(1 + v.sigma)/2` on outcome 0, described by a Bloch vector
//! `v`. With `s = sin 2t` and `k = cos 2t`:
//!
//! ```text
//! p(00) = [1 + k (a_z + b_z) + a_z b_z + s (a_x b_x - a_y b_y)] / 4
//! pA(0) = (1 + k a_z) / 2,  pB(0) = (1 + k b_z) / 2
//! ```
//!
//! The Bell functional is affine in each Bloch vector separately and of the
//! form `K0 + K1 cos 2t + K2 sin 2t` in the angle, so every block of the
//! see-saw has a closed-form maximizer.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localpoly::{enumerate_strategies, DeterministicStrategy};
use crate::model::{Behavior, CgTable, Scenario};

pub type Vec3 = [f64; 3];

const UNIT_TOL: f64 = 1e-10;
const THETA_TOL: f64 = 1e-12;

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn check_unit(v: &Vec3) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) && (norm(v) - 1.0).abs() <= UNIT_TOL {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Bloch vector {v:?} is not a unit vector"
        )))
    }
}

/// Schmidt angle and measurement directions for both parties.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    theta: f64,
    a_vecs: Vec<Vec3>,
    b_vecs: Vec<Vec3>,
}

impl QuantumStrategy {
    pub fn new(theta: f64, a_vecs: Vec<Vec3>, b_vecs: Vec<Vec3>) -> Result<Self> {
        if !(-THETA_TOL..=FRAC_PI_4 + THETA_TOL).contains(&theta) {
            return Err(Error::Domain(format!("theta {theta} outside [0, pi/4]")));
        }
        if a_vecs.is_empty() || b_vecs.is_empty() {
            return Err(Error::Dimension(
                "each party needs at least one setting".into(),
            ));
        }
        a_vecs.iter().chain(&b_vecs).try_for_each(check_unit)?;
        Ok(QuantumStrategy {
            theta: theta.clamp(0.0, FRAC_PI_4),
            a_vecs,
            b_vecs,
        })
    }

    /// Product state with `+z`/`-z` measurements reproducing a deterministic
    /// strategy when `theta = 0`.
    pub fn from_deterministic(theta: f64, strategy: &DeterministicStrategy) -> Result<Self> {
        let z = |b: bool| if b { [0.0, 0.0, 1.0] } else { [0.0, 0.0, -1.0] };
        QuantumStrategy::new(
            theta,
            strategy.alpha.iter().map(|&a| z(a)).collect(),
            strategy.beta.iter().map(|&b| z(b)).collect(),
        )
    }

    pub fn random<R: Rng + ?Sized>(scenario: Scenario, theta: Option<f64>, rng: &mut R) -> Self {
        let mut unit = || {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (1.0 - z * z).max(0.0).sqrt();
            [r * phi.cos(), r * phi.sin(), z]
        };
        let a_vecs = (0..scenario.n_a()).map(|_| unit()).collect();
        let b_vecs = (0..scenario.n_b()).map(|_| unit()).collect();
        let theta = theta.unwrap_or_else(|| rng.gen_range(0.0..=FRAC_PI_4));
        QuantumStrategy {
            theta,
            a_vecs,
            b_vecs,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn a_vecs(&self) -> &[Vec3] {
        &self.a_vecs
    }

    pub fn b_vecs(&self) -> &[Vec3] {
        &self.b_vecs
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.a_vecs.len(), self.b_vecs.len())
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        QuantumStrategy::new(theta, self.a_vecs.clone(), self.b_vecs.clone())
    }

    pub fn with_alice_vector(&self, x: usize, v: Vec3) -> Result<Self> {
        check_unit(&v)?;
        let mut s = self.clone();
        s.a_vecs[x] = v;
        Ok(s)
    }

    pub fn with_bob_vector(&self, y: usize, v: Vec3) -> Result<Self> {
        check_unit(&v)?;
        let mut s = self.clone();
        s.b_vecs[y] = v;
        Ok(s)
    }
}

fn p00(theta: f64, a: &Vec3, b: &Vec3) -> f64 {
    let (s, k) = (2.0 * theta).sin_cos();
    0.25 * (1.0 + k * (a[2] + b[2]) + a[2] * b[2] + s * (a[0] * b[0] - a[1] * b[1]))
}

fn marginal(theta: f64, v: &Vec3) -> f64 {
    0.5 * (1.0 + (2.0 * theta).cos() * v[2])
}

/// Probability that both parties obtain outcome 0.
pub fn born_probability(theta: f64, a: &Vec3, b: &Vec3) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(p00(theta, a, b))
}

/// Probability that Alice obtains outcome 0.
pub fn alice_marginal(theta: f64, a: &Vec3) -> Result<f64> {
    check_unit(a)?;
    Ok(marginal(theta, a))
}

/// Probability that Bob obtains outcome 0; the state is symmetric so this is
/// the same expression as Alice's.
pub fn bob_marginal(theta: f64, b: &Vec3) -> Result<f64> {
    check_unit(b)?;
    Ok(marginal(theta, b))
}

/// CG behavior produced by a quantum strategy.
pub fn behavior(s: &QuantumStrategy) -> Result<Behavior> {
    let t = s.theta;
    Behavior::new(
        s.scenario()?,
        s.a_vecs
            .iter()
            .map(|a| s.b_vecs.iter().map(|b| p00(t, a, b)).collect())
            .collect(),
        s.a_vecs.iter().map(|a| marginal(t, a)).collect(),
        s.b_vecs.iter().map(|b| marginal(t, b)).collect(),
    )
}

fn check_shapes(table: &CgTable, s: &QuantumStrategy) -> Result<()> {
    let sc = table.scenario();
    if sc.n_a() != s.a_vecs.len() || sc.n_b() != s.b_vecs.len() {
        return Err(Error::Dimension(format!(
            "table scenario {} vs strategy with {}x{} settings",
            sc,
            s.a_vecs.len(),
            s.b_vecs.len()
        )));
    }
    Ok(())
}

fn value_unchecked(table: &CgTable, s: &QuantumStrategy) -> f64 {
    let t = s.theta;
    let mut total = 0.0;
    for (x, a) in s.a_vecs.iter().enumerate() {
        for (y, b) in s.b_vecs.iter().enumerate() {
            total += table.d()[x][y] as f64 * p00(t, a, b);
        }
        total += table.c()[x] as f64 * marginal(t, a);
    }
    for (y, b) in s.b_vecs.iter().enumerate() {
        total += table.e()[y] as f64 * marginal(t, b);
    }
    total
}

/// Value of the Bell functional for a quantum strategy.
pub fn quantum_value(table: &CgTable, s: &QuantumStrategy) -> Result<f64> {
    check_shapes(table, s)?;
    Ok(value_unchecked(table, s))
}

/// Vector `r` such that the functional equals `const + r . a_x` as a function
/// of Alice's Bloch vector on setting `x`.
pub fn alice_coefficient(table: &CgTable, s: &QuantumStrategy, x: usize) -> Vec3 {
    let (sn, k) = (2.0 * s.theta).sin_cos();
    let mut r = [0.0, 0.0, 0.5 * k * table.c()[x] as f64];
    for (y, b) in s.b_vecs.iter().enumerate() {
        let w = 0.25 * table.d()[x][y] as f64;
        r[0] += w * sn * b[0];
        r[1] -= w * sn * b[1];
        r[2] += w * (k + b[2]);
    }
    r
}

pub fn bob_coefficient(table: &CgTable, s: &QuantumStrategy, y: usize) -> Vec3 {
    let (sn, k) = (2.0 * s.theta).sin_cos();
    let mut r = [0.0, 0.0, 0.5 * k * table.e()[y] as f64];
    for (x, a) in s.a_vecs.iter().enumerate() {
        let w = 0.25 * table.d()[x][y] as f64;
        r[0] += w * sn * a[0];
        r[1] -= w * sn * a[1];
        r[2] += w * (k + a[2]);
    }
    r
}

/// `(K0, K1, K2)` with functional `K0 + K1 cos 2t + K2 sin 2t` for fixed
/// measurement directions.
pub fn theta_coefficients(table: &CgTable, s: &QuantumStrategy) -> (f64, f64, f64) {
    let (mut k0, mut k1, mut k2) = (0.0, 0.0, 0.0);
    for (x, a) in s.a_vecs.iter().enumerate() {
        for (y, b) in s.b_vecs.iter().enumerate() {
            let w = 0.25 * table.d()[x][y] as f64;
            k0 += w * (1.0 + a[2] * b[2]);
            k1 += w * (a[2] + b[2]);
            k2 += w * (a[0] * b[0] - a[1] * b[1]);
        }
        let c = table.c()[x] as f64;
        k0 += 0.5 * c;
        k1 += 0.5 * c * a[2];
    }
    for (y, b) in s.b_vecs.iter().enumerate() {
        let e = table.e()[y] as f64;
        k0 += 0.5 * e;
        k1 += 0.5 * e * b[2];
    }
    (k0, k1, k2)
}

/// Maximizer of `K1 cos p + K2 sin p` over `p = 2t` in `[0, pi/2]`.
fn best_theta(k1: f64, k2: f64, current: f64) -> f64 {
    let f = |t: f64| {
        let (s, c) = (2.0 * t).sin_cos();
        k1 * c + k2 * s
    };
    let mut best = current;
    let mut candidates = vec![0.0, FRAC_PI_4];
    if k1 != 0.0 || k2 != 0.0 {
        let p = k2.atan2(k1);
        if (0.0..=2.0 * FRAC_PI_4).contains(&p) {
            candidates.push(0.5 * p);
        }
    }
    for t in candidates {
        if f(t) > f(best) {
            best = t;
        }
    }
    best
}

fn sweep(table: &CgTable, s: &QuantumStrategy, update_theta: bool) -> QuantumStrategy {
    let mut next = s.clone();
    for x in 0..next.a_vecs.len() {
        let r = alice_coefficient(table, &next, x);
        let n = norm(&r);
        if n > 0.0 {
            next.a_vecs[x] = [r[0] / n, r[1] / n, r[2] / n];
        }
    }
    for y in 0..next.b_vecs.len() {
        let r = bob_coefficient(table, &next, y);
        let n = norm(&r);
        if n > 0.0 {
            next.b_vecs[y] = [r[0] / n, r[1] / n, r[2] / n];
        }
    }
    if update_theta {
        let (_, k1, k2) = theta_coefficients(table, &next);
        next.theta = best_theta(k1, k2, next.theta);
    }
    next
}

/// One see-saw sweep: every Alice direction, every Bob direction, then the
/// Schmidt angle, each set to its exact maximizer with the rest held fixed.
pub fn seesaw_step(table: &CgTable, s: &QuantumStrategy) -> Result<QuantumStrategy> {
    check_shapes(table, s)?;
    Ok(sweep(table, s, true))
}

/// As [`seesaw_step`] but leaves the Schmidt angle untouched.
pub fn seesaw_step_fixed_theta(table: &CgTable, s: &QuantumStrategy) -> Result<QuantumStrategy> {
    check_shapes(table, s)?;
    Ok(sweep(table, s, false))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBoundOptions {
    /// Hold the Schmidt angle fixed instead of optimizing it.
    pub fix_theta: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
    /// Stop a run once a sweep improves the value by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for QuantumBoundOptions {
    fn default() -> Self {
        QuantumBoundOptions {
            fix_theta: None,
            restarts: 50,
            seed: 0,
            tol: 1e-10,
            max_sweeps: 2000,
        }
    }
}

impl QuantumBoundOptions {
    pub fn maximally_entangled(self) -> Self {
        QuantumBoundOptions {
            fix_theta: Some(FRAC_PI_4),
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBoundResult {
    pub value: f64,
    pub strategy: QuantumStrategy,
    /// Number of see-saw runs, including the deterministic warm start.
    pub restarts_used: usize,
    /// Whether the best run stopped on the tolerance rather than the sweep cap.
    pub converged: bool,
}

struct Run {
    value: f64,
    strategy: QuantumStrategy,
    converged: bool,
}

fn run_seesaw(table: &CgTable, start: QuantumStrategy, opts: &QuantumBoundOptions) -> Run {
    let update_theta = opts.fix_theta.is_none();
    let mut s = start;
    let mut value = value_unchecked(table, &s);
    for _ in 0..opts.max_sweeps {
        let next = sweep(table, &s, update_theta);
        let next_value = value_unchecked(table, &next);
        let gain = next_value - value;
        if next_value >= value {
            s = next;
            value = next_value;
        }
        if gain < opts.tol {
            return Run {
                value,
                strategy: s,
                converged: true,
            };
        }
    }
    Run {
        value,
        strategy: s,
        converged: false,
    }
}

/// Best two-qubit value found by multi-restart see-saw.
///
/// Run 0 starts from the best deterministic strategy encoded with `+-z`
/// measurements; runs `1..=restarts` start from independent random points
/// drawn from stream `i` of a ChaCha generator seeded with `opts.seed`.
/// The result depends only on the options, not on thread scheduling.
pub fn quantum_bound(table: &CgTable, opts: &QuantumBoundOptions) -> Result<QuantumBoundResult> {
    if opts.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    if let Some(t) = opts.fix_theta {
        if !(-THETA_TOL..=FRAC_PI_4 + THETA_TOL).contains(&t) {
            return Err(Error::Domain(format!("fixed theta {t} outside [0, pi/4]")));
        }
    }
    let scenario = table.scenario();
    let fixed = opts.fix_theta.map(|t| t.clamp(0.0, FRAC_PI_4));

    let warm = enumerate_strategies(scenario)
        .into_iter()
        .max_by_key(|s| (s.value(table), std::cmp::Reverse(s.clone())))
        .expect("non-empty");
    let warm = QuantumStrategy::from_deterministic(fixed.unwrap_or(0.0), &warm)?;

    let runs: Vec<Run> = (0..=opts.restarts)
        .into_par_iter()
        .map(|i| {
            let start = if i == 0 {
                warm.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(i as u64);
                QuantumStrategy::random(scenario, fixed, &mut rng)
            };
            run_seesaw(table, start, opts)
        })
        .collect();

    let mut best = &runs[0];
    for r in &runs[1..] {
        if r.value > best.value {
            best = r;
        }
    }
    Ok(QuantumBoundResult {
        value: best.value,
        strategy: best.strategy.clone(),
        restarts_used: runs.len(),
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::localpoly::local_bound;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const Z: Vec3 = [0.0, 0.0, 1.0];
    const X: Vec3 = [1.0, 0.0, 0.0];

    fn chsh_optimal() -> QuantumStrategy {
        let h = FRAC_1_SQRT_2;
        QuantumStrategy::new(FRAC_PI_4, vec![Z, X], vec![[h, 0.0, h], [-h, 0.0, h]]).unwrap()
    }

    #[test]
    fn born_examples() {
        assert!((born_probability(FRAC_PI_4, &Z, &Z).unwrap() - 0.5).abs() < 1e-15);
        assert!((born_probability(0.0, &Z, &Z).unwrap() - 1.0).abs() < 1e-15);
        assert!((born_probability(FRAC_PI_4, &X, &X).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn born_rejects_non_unit() {
        assert!(matches!(
            born_probability(0.1, &[1.0, 1.0, 0.0], &Z),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn strategy_validation() {
        assert!(QuantumStrategy::new(1.0, vec![Z], vec![Z]).is_err());
        assert!(QuantumStrategy::new(0.3, vec![[0.0, 0.0, 2.0]], vec![Z]).is_err());
        assert!(QuantumStrategy::new(0.3, vec![Z], vec![Z]).is_ok());
    }

    #[test]
    fn chsh_standard_angles() {
        let v = quantum_value(&fixtures::chsh(), &chsh_optimal()).unwrap();
        assert!((v - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn product_state_hits_vertex() {
        let t = fixtures::i3422_2();
        for d in enumerate_strategies(t.scenario()).iter().step_by(7) {
            let q = QuantumStrategy::from_deterministic(0.0, d).unwrap();
            let v = quantum_value(&t, &q).unwrap();
            assert!((v - d.value(&t) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_point_and_theta_update() {
        let t = fixtures::chsh();
        let s = chsh_optimal();
        let v0 = quantum_value(&t, &s).unwrap();
        let next = seesaw_step(&t, &s).unwrap();
        assert!((quantum_value(&t, &next).unwrap() - v0).abs() < 1e-12);

        let start = s.with_theta(0.1).unwrap();
        let (_, k1, k2) = theta_coefficients(&t, &start);
        assert!((best_theta(k1, k2, 0.1) - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn theta_coefficients_reproduce_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = fixtures::i3422_3();
        for _ in 0..20 {
            let s = QuantumStrategy::random(t.scenario(), None, &mut rng);
            let (k0, k1, k2) = theta_coefficients(&t, &s);
            let (sn, k) = (2.0 * s.theta()).sin_cos();
            let v = quantum_value(&t, &s).unwrap();
            assert!((k0 + k1 * k + k2 * sn - v).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_sweeps() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = fixtures::chsh();
        let mut s = QuantumStrategy::random(t.scenario(), None, &mut rng);
        let mut v = quantum_value(&t, &s).unwrap();
        for _ in 0..100 {
            s = seesaw_step(&t, &s).unwrap();
            let w = quantum_value(&t, &s).unwrap();
            assert!(w >= v - 1e-12);
            v = w;
        }
    }

    #[test]
    fn chsh_bound() {
        let r = quantum_bound(&fixtures::chsh(), &QuantumBoundOptions::default()).unwrap();
        assert!((r.value - 0.2071068).abs() < 2e-4, "{}", r.value);
        assert!((r.strategy.theta() / PI - 0.25).abs() < 1e-3);
    }

    #[test]
    fn product_state_bound_is_local_bound() {
        for t in fixtures::all() {
            let opts = QuantumBoundOptions {
                fix_theta: Some(0.0),
                restarts: 5,
                ..Default::default()
            };
            let r = quantum_bound(&t, &opts).unwrap();
            assert!((r.value - local_bound(&t) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let t = fixtures::i3422_1();
        let opts = QuantumBoundOptions {
            restarts: 8,
            seed: 42,
            ..Default::default()
        };
        assert_eq!(
            quantum_bound(&t, &opts).unwrap(),
            quantum_bound(&t, &opts).unwrap()
        );
    }

    #[test]
    fn zero_restarts_rejected() {
        let opts = QuantumBoundOptions {
            restarts: 0,
            ..Default::default()
        };
        assert!(quantum_bound(&fixtures::chsh(), &opts).is_err());
    }
}
