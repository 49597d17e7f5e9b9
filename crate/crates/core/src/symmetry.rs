//! Local relabelings of CG tables: input permutations, per-setting output
//! flips and the party swap. Canonical forms and full-correlation form.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{CgTable, Scenario};
use crate::Rational;

/// A local relabeling.
///
/// Alice's setting `x` is first output-flipped when `flip_a[x]` is set and
/// then moved to position `perm_a[x]`. When `swap_parties` is set that
/// position belongs to Bob. Bob's settings are handled symmetrically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relabeling {
    pub perm_a: Vec<usize>,
    pub perm_b: Vec<usize>,
    pub flip_a: Vec<bool>,
    pub flip_b: Vec<bool>,
    pub swap_parties: bool,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

fn inverse_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

impl Relabeling {
    pub fn identity(scenario: Scenario) -> Self {
        Relabeling {
            perm_a: (0..scenario.n_a()).collect(),
            perm_b: (0..scenario.n_b()).collect(),
            flip_a: vec![false; scenario.n_a()],
            flip_b: vec![false; scenario.n_b()],
            swap_parties: false,
        }
    }

    /// Flips Alice's output on a single setting.
    pub fn flip_alice(scenario: Scenario, x: usize) -> Self {
        let mut r = Relabeling::identity(scenario);
        r.flip_a[x] = true;
        r
    }

    pub fn flip_bob(scenario: Scenario, y: usize) -> Self {
        let mut r = Relabeling::identity(scenario);
        r.flip_b[y] = true;
        r
    }

    /// Uniformly random element of the relabeling group of `scenario`.
    pub fn random<R: Rng + ?Sized>(scenario: Scenario, rng: &mut R) -> Self {
        let mut perm_a: Vec<usize> = (0..scenario.n_a()).collect();
        let mut perm_b: Vec<usize> = (0..scenario.n_b()).collect();
        perm_a.shuffle(rng);
        perm_b.shuffle(rng);
        Relabeling {
            perm_a,
            perm_b,
            flip_a: (0..scenario.n_a()).map(|_| rng.gen()).collect(),
            flip_b: (0..scenario.n_b()).map(|_| rng.gen()).collect(),
            swap_parties: scenario.is_square() && rng.gen(),
        }
    }

    pub fn check(&self, scenario: Scenario) -> Result<()> {
        if self.perm_a.len() != scenario.n_a()
            || self.flip_a.len() != scenario.n_a()
            || self.perm_b.len() != scenario.n_b()
            || self.flip_b.len() != scenario.n_b()
        {
            return Err(Error::Incompatible(format!(
                "relabeling sizes do not match scenario {scenario}"
            )));
        }
        if !is_permutation(&self.perm_a) || !is_permutation(&self.perm_b) {
            return Err(Error::Incompatible("setting map is not a bijection".into()));
        }
        if self.swap_parties && !scenario.is_square() {
            return Err(Error::Incompatible(format!(
                "party swap needs a square scenario, got {scenario}"
            )));
        }
        Ok(())
    }

    /// Where an original slot ends up: (lands on Bob's side, position, flipped).
    fn image(&self, bob: bool, index: usize) -> (bool, usize, bool) {
        let (pos, flip) = if bob {
            (self.perm_b[index], self.flip_b[index])
        } else {
            (self.perm_a[index], self.flip_a[index])
        };
        (bob ^ self.swap_parties, pos, flip)
    }

    /// The relabeling equivalent to applying `self` and then `then`.
    pub fn compose(&self, then: &Relabeling) -> Relabeling {
        let mut out = self.clone();
        out.swap_parties = self.swap_parties ^ then.swap_parties;
        for bob in [false, true] {
            let n = if bob {
                self.perm_b.len()
            } else {
                self.perm_a.len()
            };
            for i in 0..n {
                let (side, pos, flip) = self.image(bob, i);
                let (_, pos2, flip2) = then.image(side, pos);
                if bob {
                    out.perm_b[i] = pos2;
                    out.flip_b[i] = flip ^ flip2;
                } else {
                    out.perm_a[i] = pos2;
                    out.flip_a[i] = flip ^ flip2;
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Relabeling {
        if !self.swap_parties {
            let inv_a = inverse_permutation(&self.perm_a);
            let inv_b = inverse_permutation(&self.perm_b);
            return Relabeling {
                flip_a: inv_a.iter().map(|&x| self.flip_a[x]).collect(),
                flip_b: inv_b.iter().map(|&y| self.flip_b[y]).collect(),
                perm_a: inv_a,
                perm_b: inv_b,
                swap_parties: false,
            };
        }
        // Alice x -> Bob perm_a[x]; the inverse sends Bob perm_a[x] back to Alice x.
        let perm_b = inverse_permutation(&self.perm_a);
        let perm_a = inverse_permutation(&self.perm_b);
        Relabeling {
            flip_b: perm_b.iter().map(|&x| self.flip_a[x]).collect(),
            flip_a: perm_a.iter().map(|&y| self.flip_b[y]).collect(),
            perm_a,
            perm_b,
            swap_parties: true,
        }
    }
}

/// Raw integer form of a table used by the orbit scans.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Coeffs {
    d: Vec<Vec<i64>>,
    c: Vec<i64>,
    e: Vec<i64>,
    bound: i64,
}

impl Coeffs {
    fn of(table: &CgTable) -> Self {
        Coeffs {
            d: table.d().to_vec(),
            c: table.c().to_vec(),
            e: table.e().to_vec(),
            bound: table.bound(),
        }
    }

    fn flip_alice(&mut self, x: usize) {
        for (y, e) in self.e.iter_mut().enumerate() {
            *e += self.d[x][y];
            self.d[x][y] = -self.d[x][y];
        }
        self.bound -= self.c[x];
        self.c[x] = -self.c[x];
    }

    fn flip_bob(&mut self, y: usize) {
        for (x, c) in self.c.iter_mut().enumerate() {
            *c += self.d[x][y];
            self.d[x][y] = -self.d[x][y];
        }
        self.bound -= self.e[y];
        self.e[y] = -self.e[y];
    }

    fn transposed(&self) -> Self {
        let n_b = self.e.len();
        Coeffs {
            d: (0..n_b)
                .map(|y| self.d.iter().map(|r| r[y]).collect())
                .collect(),
            c: self.e.clone(),
            e: self.c.clone(),
            bound: self.bound,
        }
    }

    fn permuted(&self, perm_a: &[usize], perm_b: &[usize]) -> Self {
        let mut out = self.clone();
        for (x, &px) in perm_a.iter().enumerate() {
            out.c[px] = self.c[x];
            for (y, &py) in perm_b.iter().enumerate() {
                out.d[px][py] = self.d[x][y];
            }
        }
        for (y, &py) in perm_b.iter().enumerate() {
            out.e[py] = self.e[y];
        }
        out
    }

    fn normalized(mut self) -> Self {
        let g = self
            .d
            .iter()
            .flatten()
            .chain(&self.c)
            .chain(&self.e)
            .chain(std::iter::once(&self.bound))
            .fold(0i64, |acc, v| acc.gcd(v));
        if g > 1 {
            self.d.iter_mut().flatten().for_each(|v| *v /= g);
            self.c.iter_mut().for_each(|v| *v /= g);
            self.e.iter_mut().for_each(|v| *v /= g);
            self.bound /= g;
        }
        self
    }

    fn into_table(self, scenario: Scenario) -> CgTable {
        CgTable::new(scenario, self.d, self.c, self.e, self.bound).expect("shape preserved")
    }
}

/// Applies a relabeling; the result represents the same inequality in the
/// new labels, including the bound shift caused by output flips.
pub fn apply_relabeling(table: &CgTable, r: &Relabeling) -> Result<CgTable> {
    let scenario = table.scenario();
    r.check(scenario)?;
    let mut k = Coeffs::of(table);
    for x in (0..scenario.n_a()).filter(|&x| r.flip_a[x]) {
        k.flip_alice(x);
    }
    for y in (0..scenario.n_b()).filter(|&y| r.flip_b[y]) {
        k.flip_bob(y);
    }
    let mut k = k.permuted(&r.perm_a, &r.perm_b);
    if r.swap_parties {
        k = k.transposed();
    }
    let out = k.into_table(if r.swap_parties {
        scenario.transposed()
    } else {
        scenario
    });
    Ok(match table.name() {
        Some(n) => out.with_name(n),
        None => out,
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn bit_vector(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| (mask >> i) & 1 == 1).collect()
}

/// Every element of the relabeling group of `scenario`.
/// The group has `nA! nB! 2^nA 2^nB` elements, doubled for square scenarios.
pub fn all_relabelings(scenario: Scenario) -> Vec<Relabeling> {
    let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
    let swaps: &[bool] = if scenario.is_square() {
        &[false, true]
    } else {
        &[false]
    };
    let perms_a = permutations(n_a);
    let perms_b = permutations(n_b);
    let mut out = Vec::new();
    for &swap_parties in swaps {
        for pa in &perms_a {
            for pb in &perms_b {
                for fa in 0u32..1 << n_a {
                    for fb in 0u32..1 << n_b {
                        out.push(Relabeling {
                            perm_a: pa.clone(),
                            perm_b: pb.clone(),
                            flip_a: bit_vector(fa, n_a),
                            flip_b: bit_vector(fb, n_b),
                            swap_parties,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Lexicographically smallest gcd-normalized table in the relabeling orbit,
/// ordered by `(d row-major, c, e, bound)`. The name is dropped.
pub fn canonical_form(table: &CgTable) -> CgTable {
    let scenario = table.scenario();
    let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
    let perms_a = permutations(n_a);
    let perms_b = permutations(n_b);
    let base = Coeffs::of(table).normalized();

    let mut best: Option<Coeffs> = None;
    for fa in 0u32..1 << n_a {
        for fb in 0u32..1 << n_b {
            let mut flipped = base.clone();
            (0..n_a)
                .filter(|x| (fa >> x) & 1 == 1)
                .for_each(|x| flipped.flip_alice(x));
            (0..n_b)
                .filter(|y| (fb >> y) & 1 == 1)
                .for_each(|y| flipped.flip_bob(y));
            let variants = if scenario.is_square() {
                vec![flipped.transposed(), flipped]
            } else {
                vec![flipped]
            };
            for v in &variants {
                for pa in &perms_a {
                    for pb in &perms_b {
                        let cand = v.permuted(pa, pb);
                        if best.as_ref().is_none_or(|b| cand < *b) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
    }
    best.expect("non-empty orbit").into_table(scenario)
}

/// Equivalence under relabelings and positive rescaling.
pub fn equivalent(a: &CgTable, b: &CgTable) -> bool {
    a.scenario() == b.scenario() && canonical_form(a) == canonical_form(b)
}

/// A table written as `sum_xy g[x][y] E(x,y) <= bound`, with
/// `E(x,y) = 4 p(00|xy) - 2 pA(0|x) - 2 pB(0|y) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorForm {
    pub g: Vec<Vec<Rational>>,
    /// The CG functional of the relabeled table equals `sum g E - constant`.
    pub constant: Rational,
    /// Bound on the correlator expression.
    pub bound: Rational,
    pub relabeling_used: Relabeling,
}

impl CorrelatorForm {
    /// Rebuilds the CG table in the original labels.
    pub fn reconstruct(&self) -> Result<CgTable> {
        let n_a = self.g.len();
        let n_b = self.g.first().map_or(0, Vec::len);
        let scenario = Scenario::new(n_a, n_b)?;
        let to_int = |r: Rational| -> Result<i64> {
            if r.is_integer() {
                Ok(r.to_integer())
            } else {
                Err(Error::Inconsistent(format!(
                    "non-integral CG coefficient {r}"
                )))
            }
        };
        let four = Rational::from_integer(4);
        let two = Rational::from_integer(2);
        let d = self
            .g
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&g| to_int(g * four))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let c = self
            .g
            .iter()
            .map(|row| to_int(-two * row.iter().copied().sum::<Rational>()))
            .collect::<Result<Vec<_>>>()?;
        let e = (0..n_b)
            .map(|y| to_int(-two * self.g.iter().map(|r| r[y]).sum::<Rational>()))
            .collect::<Result<Vec<_>>>()?;
        let bound = to_int(self.bound - self.constant)?;
        let relabeled = CgTable::new(scenario, d, c, e, bound)?;
        apply_relabeling(&relabeled, &self.relabeling_used.inverse())
    }
}

fn is_correlation_only(k: &Coeffs) -> bool {
    let rows_ok =
        k.d.iter()
            .zip(&k.c)
            .all(|(row, &c)| 2 * c == -row.iter().sum::<i64>());
    let cols_ok =
        k.e.iter()
            .enumerate()
            .all(|(y, &e)| 2 * e == -k.d.iter().map(|r| r[y]).sum::<i64>());
    rows_ok && cols_ok
}

/// Searches the output flips for a presentation of the table that involves
/// correlators only. Input permutations and the party swap cannot change
/// the outcome, so only the `2^(nA+nB)` flips are scanned.
pub fn correlation_form(table: &CgTable) -> Option<CorrelatorForm> {
    let scenario = table.scenario();
    let (n_a, n_b) = (scenario.n_a(), scenario.n_b());
    let base = Coeffs::of(table);
    for fa in 0u32..1 << n_a {
        for fb in 0u32..1 << n_b {
            let mut k = base.clone();
            (0..n_a)
                .filter(|x| (fa >> x) & 1 == 1)
                .for_each(|x| k.flip_alice(x));
            (0..n_b)
                .filter(|y| (fb >> y) & 1 == 1)
                .for_each(|y| k.flip_bob(y));
            if !is_correlation_only(&k) {
                continue;
            }
            let sum_d: i64 = k.d.iter().flatten().sum();
            let constant = Rational::new(sum_d, 4);
            return Some(CorrelatorForm {
                g: k.d
                    .iter()
                    .map(|row| row.iter().map(|&v| Rational::new(v, 4)).collect())
                    .collect(),
                constant,
                bound: Rational::from_integer(k.bound) + constant,
                relabeling_used: Relabeling {
                    flip_a: bit_vector(fa, n_a),
                    flip_b: bit_vector(fb, n_b),
                    ..Relabeling::identity(scenario)
                },
            });
        }
    }
    None
}
