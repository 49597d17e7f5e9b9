//! Resistance to white noise and the symmetric detection-efficiency
//! threshold for the maximally entangled two-qubit state.

use std::fmt;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::localpoly::{local_bound, white_noise_value};
use crate::model::{CgTable, Scenario};
use crate::Rational;

/// Margin by which a quantum value must exceed the local bound to count as
/// a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

fn to_f64(r: Rational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// Smallest visibility `v` such that `v |psi><psi| + (1 - v) 1/4` still
/// reaches the local bound, given the quantum value `q` of `|psi>`.
/// Returns 1 when `q` does not violate the local bound.
pub fn noise_resistance(table: &CgTable, q: f64) -> Result<f64> {
    let l = local_bound(table) as f64;
    let n = to_f64(white_noise_value(table));
    if !q.is_finite() || q < n - VIOLATION_TOL {
        return Err(Error::Inconsistent(format!(
            "quantum value {q} lies below the white-noise value {n}"
        )));
    }
    if q <= l + VIOLATION_TOL {
        return Ok(1.0);
    }
    Ok((l - n) / (q - n))
}

/// Outputs substituted on a non-detection: `a_hat[x]` is what Alice answers
/// when her detector stays silent on setting `x`, likewise `b_hat[y]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoClickStrategy {
    pub a_hat: Vec<u8>,
    pub b_hat: Vec<u8>,
}

impl NoClickStrategy {
    pub fn new(a_hat: Vec<u8>, b_hat: Vec<u8>) -> Result<Self> {
        if a_hat.iter().chain(&b_hat).any(|&h| h > 1) {
            return Err(Error::Domain("no-click outputs must be bits".into()));
        }
        Ok(NoClickStrategy { a_hat, b_hat })
    }

    /// The same output on every setting of a party.
    pub fn constant(scenario: Scenario, a_hat: u8, b_hat: u8) -> Result<Self> {
        NoClickStrategy::new(vec![a_hat; scenario.n_a()], vec![b_hat; scenario.n_b()])
    }

    /// The four per-party constant strategies in lexicographic order.
    pub fn constants(scenario: Scenario) -> Vec<NoClickStrategy> {
        [(0, 0), (0, 1), (1, 0), (1, 1)]
            .into_iter()
            .map(|(a, b)| NoClickStrategy::constant(scenario, a, b).expect("bits"))
            .collect()
    }

    /// All `2^(nA+nB)` per-setting strategies in lexicographic order.
    pub fn all(scenario: Scenario) -> Vec<NoClickStrategy> {
        let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
        let bits = n_a + n_b;
        (0u32..1 << bits)
            .map(|k| {
                let bit = |i: usize| ((k >> (bits - 1 - i)) & 1) as u8;
                NoClickStrategy {
                    a_hat: (0..n_a).map(bit).collect(),
                    b_hat: (n_a..bits).map(bit).collect(),
                }
            })
            .collect()
    }

    fn check(&self, scenario: Scenario) -> Result<()> {
        if self.a_hat.len() != scenario.n_a() || self.b_hat.len() != scenario.n_b() {
            return Err(Error::Dimension(format!(
                "no-click strategy shape does not match scenario {scenario}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for NoClickStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.a_hat {
            write!(f, "{h}")?;
        }
        f.write_str("/")?;
        for h in &self.b_hat {
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Values of the functional when only Alice clicks, only Bob clicks, and
/// when neither clicks. Clicking parties hold half of a maximally entangled
/// pair, so their marginals are 1/2 whatever they measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoClickValues {
    pub ma: Rational,
    pub mb: Rational,
    pub x: Rational,
}

pub fn noclick_values(table: &CgTable, nc: &NoClickStrategy) -> Result<NoClickValues> {
    nc.check(table.scenario())?;
    let a0: Vec<i64> = nc.a_hat.iter().map(|&h| i64::from(h == 0)).collect();
    let b0: Vec<i64> = nc.b_hat.iter().map(|&h| i64::from(h == 0)).collect();
    let d = table.d();

    // Twice the value when only Alice clicks: pA = 1/2, Bob deterministic.
    let mut ma2 = table.sum_c();
    let mut mb2 = table.sum_e();
    let mut x = 0;
    for (xi, row) in d.iter().enumerate() {
        for (yi, &dv) in row.iter().enumerate() {
            ma2 += dv * b0[yi];
            mb2 += dv * a0[xi];
            x += dv * a0[xi] * b0[yi];
        }
    }
    for (yi, &e) in table.e().iter().enumerate() {
        ma2 += 2 * e * b0[yi];
        x += e * b0[yi];
    }
    for (xi, &c) in table.c().iter().enumerate() {
        mb2 += 2 * c * a0[xi];
        x += c * a0[xi];
    }
    Ok(NoClickValues {
        ma: Rational::new(ma2, 2),
        mb: Rational::new(mb2, 2),
        x: Rational::from_integer(x),
    })
}

/// Value of the functional with common detector efficiency `eta`.
pub fn efficiency_value(q: f64, values: &NoClickValues, eta: f64) -> f64 {
    let m = to_f64(values.ma + values.mb);
    let x = to_f64(values.x);
    eta * eta * q + eta * (1.0 - eta) * m + (1.0 - eta) * (1.0 - eta) * x
}

/// Smallest efficiency above which `efficiency_value` stays above `l`:
/// the largest root in `[0, 1)` of
/// `(q - M + X) eta^2 + (M - 2X) eta + (X - l)` at which the polynomial
/// crosses upward. Returns 1 when `q` does not exceed `l`.
pub fn threshold_root(q: f64, values: &NoClickValues, l: f64) -> f64 {
    if q <= l + VIOLATION_TOL {
        return 1.0;
    }
    let m = to_f64(values.ma + values.mb);
    let x = to_f64(values.x);
    let a = q - m + x;
    let b = m - 2.0 * x;
    let c = x - l;

    let mut roots = Vec::with_capacity(2);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let qq = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
            if qq != 0.0 {
                roots.push(qq / a);
                roots.push(c / qq);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots.retain(|r| (0.0..1.0).contains(r));
    roots.sort_by(|p, q| q.partial_cmp(p).expect("finite roots"));

    let slope = |r: f64| 2.0 * a * r + b;
    roots
        .into_iter()
        .find(|&r| slope(r) > 0.0 || (slope(r).abs() <= 1e-12 * scale.max(1.0) && a > 0.0))
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionAnalysis {
    pub q: f64,
    pub ma: Rational,
    pub mb: Rational,
    pub x: Rational,
    pub strategy: NoClickStrategy,
    pub eta: f64,
}

fn best_threshold(
    table: &CgTable,
    q_me: f64,
    candidates: impl IntoIterator<Item = NoClickStrategy>,
) -> DetectionAnalysis {
    let l = local_bound(table) as f64;
    let mut best: Option<DetectionAnalysis> = None;
    for nc in candidates {
        let v = noclick_values(table, &nc).expect("candidate built for this scenario");
        let eta = threshold_root(q_me, &v, l);
        if best.as_ref().is_none_or(|b| eta < b.eta) {
            best = Some(DetectionAnalysis {
                q: q_me,
                ma: v.ma,
                mb: v.mb,
                x: v.x,
                strategy: nc,
                eta,
            });
        }
    }
    best.expect("at least one no-click strategy")
}

/// Minimal symmetric detection efficiency over every per-setting no-click
/// strategy. `q_me` is the quantum value reached with the maximally
/// entangled state; since the no-click values do not depend on the
/// measurements there, it is the only quantum input needed. Ties go to the
/// lexicographically smallest strategy.
pub fn detection_threshold(table: &CgTable, q_me: f64) -> DetectionAnalysis {
    best_threshold(table, q_me, NoClickStrategy::all(table.scenario()))
}

/// As [`detection_threshold`], restricted to strategies that substitute the
/// same output on every setting of a party.
pub fn detection_threshold_constant(table: &CgTable, q_me: f64) -> DetectionAnalysis {
    best_threshold(table, q_me, NoClickStrategy::constants(table.scenario()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::localpoly::DeterministicStrategy;
    use crate::model::Behavior;

    const CHSH_Q: f64 = 0.207_106_781_186_547_5; // (sqrt 2 - 1) / 2

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn chsh_noise() {
        let lam = noise_resistance(&fixtures::chsh(), CHSH_Q).unwrap();
        assert!((lam - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn i3322_noise() {
        let lam = noise_resistance(&fixtures::i3322(), 0.25).unwrap();
        assert!((lam - 0.8).abs() < 1e-12);
    }

    #[test]
    fn no_violation_gives_one() {
        assert_eq!(noise_resistance(&fixtures::chsh(), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn below_white_noise_is_error() {
        assert!(matches!(
            noise_resistance(&fixtures::chsh(), -0.6),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn strategy_counts_and_order() {
        let s = fixtures::i3422_1().scenario();
        let all = NoClickStrategy::all(s);
        assert_eq!(all.len(), 128);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let consts = NoClickStrategy::constants(s);
        assert_eq!(consts.len(), 4);
        assert!(consts.iter().all(|c| all.contains(c)));
        assert!(NoClickStrategy::new(vec![2], vec![0]).is_err());
        assert_eq!(consts[1].to_string(), "000/1111");
    }

    #[test]
    fn chsh_noclick_values() {
        let t = fixtures::chsh();
        let s = t.scenario();
        let v = noclick_values(&t, &NoClickStrategy::constant(s, 0, 0).unwrap()).unwrap();
        assert_eq!((v.ma, v.mb, v.x), (r(-1, 2), r(-1, 2), r(0, 1)));
        let v = noclick_values(&t, &NoClickStrategy::constant(s, 1, 1).unwrap()).unwrap();
        assert_eq!((v.ma, v.mb, v.x), (r(-1, 2), r(-1, 2), r(0, 1)));
        let v = noclick_values(&t, &NoClickStrategy::constant(s, 0, 1).unwrap()).unwrap();
        assert_eq!((v.ma, v.mb, v.x), (r(-1, 2), r(-1, 2), r(-1, 1)));
    }

    #[test]
    fn noclick_shape_checked() {
        let nc = NoClickStrategy::new(vec![0; 3], vec![0; 2]).unwrap();
        assert!(matches!(
            noclick_values(&fixtures::chsh(), &nc),
            Err(Error::Dimension(_))
        ));
    }

    // Direct construction: the clicking party has marginal 1/2 and the
    // silent one answers deterministically, so evaluate the functional on
    // that product behavior.
    #[test]
    fn noclick_values_match_behaviors() {
        for t in fixtures::all() {
            let s = t.scenario();
            let l = Rational::from_integer(local_bound(&t));
            for nc in NoClickStrategy::all(s) {
                let pa: Vec<f64> = nc
                    .a_hat
                    .iter()
                    .map(|&h| if h == 0 { 1.0 } else { 0.0 })
                    .collect();
                let pb: Vec<f64> = nc
                    .b_hat
                    .iter()
                    .map(|&h| if h == 0 { 1.0 } else { 0.0 })
                    .collect();
                let only_a = Behavior::new(
                    s,
                    (0..s.n_a())
                        .map(|_| pb.iter().map(|p| 0.5 * p).collect())
                        .collect(),
                    vec![0.5; s.n_a()],
                    pb.clone(),
                )
                .unwrap();
                let only_b = Behavior::new(
                    s,
                    pa.iter().map(|p| vec![0.5 * p; s.n_b()]).collect(),
                    pa.clone(),
                    vec![0.5; s.n_b()],
                )
                .unwrap();
                let none = DeterministicStrategy {
                    alpha: nc.a_hat.iter().map(|&h| h == 0).collect(),
                    beta: nc.b_hat.iter().map(|&h| h == 0).collect(),
                };
                let v = noclick_values(&t, &nc).unwrap();
                assert_eq!(to_f64(v.ma), t.evaluate(&only_a).unwrap());
                assert_eq!(to_f64(v.mb), t.evaluate(&only_b).unwrap());
                assert_eq!(v.x, Rational::from_integer(none.value(&t)));
                assert!(v.x <= l && v.ma <= l && v.mb <= l);
            }
        }
    }

    #[test]
    fn chsh_threshold() {
        let a = detection_threshold(&fixtures::chsh(), CHSH_Q);
        // eta ((1 + Q) eta - 1) = 0 with Q the excess over the local bound.
        assert!((a.eta - 1.0 / (1.0 + CHSH_Q)).abs() < 1e-12);
        assert!((a.eta - 0.8284).abs() < 1e-4);
        let c = detection_threshold_constant(&fixtures::chsh(), CHSH_Q);
        assert_eq!(
            c.strategy,
            NoClickStrategy::constant(fixtures::chsh().scenario(), 0, 0).unwrap()
        );
        assert!((c.eta - a.eta).abs() < 1e-12);
    }

    #[test]
    fn per_setting_never_worse_than_constant() {
        for t in fixtures::all() {
            let q = local_bound(&t) as f64 + 0.2;
            assert!(detection_threshold(&t, q).eta <= detection_threshold_constant(&t, q).eta);
        }
    }

    #[test]
    fn threshold_without_violation() {
        assert_eq!(detection_threshold(&fixtures::chsh(), 0.0).eta, 1.0);
        assert_eq!(detection_threshold(&fixtures::chsh(), -0.1).eta, 1.0);
    }

    #[test]
    fn polynomial_endpoints_and_root() {
        let t = fixtures::i3322();
        let l = local_bound(&t) as f64;
        for nc in NoClickStrategy::all(t.scenario()) {
            let v = noclick_values(&t, &nc).unwrap();
            assert!((efficiency_value(0.25, &v, 1.0) - 0.25).abs() < 1e-15);
            assert!((efficiency_value(0.25, &v, 0.0) - to_f64(v.x)).abs() < 1e-15);
            let eta = threshold_root(0.25, &v, l);
            if eta < 1.0 && eta > 0.0 {
                assert!((efficiency_value(0.25, &v, eta) - l).abs() < 1e-9);
            }
        }
    }
}
