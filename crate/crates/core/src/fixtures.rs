//! Reference inequalities stored exactly as printed in their original
//! CG tables (bounds included, no shift to a common normalization).

use crate::model::{CgTable, Scenario};

fn table(
    n_a: usize,
    n_b: usize,
    d: &[&[i64]],
    c: &[i64],
    e: &[i64],
    bound: i64,
    name: &str,
) -> CgTable {
    CgTable::new(
        Scenario::new(n_a, n_b).expect("fixture scenario"),
        d.iter().map(|r| r.to_vec()).collect(),
        c.to_vec(),
        e.to_vec(),
        bound,
    )
    .expect("fixture shape")
    .with_name(name)
}

pub fn chsh() -> CgTable {
    table(2, 2, &[&[1, 1], &[1, -1]], &[-1, 0], &[-1, 0], 0, "CHSH")
}

pub fn i3322() -> CgTable {
    table(
        3,
        3,
        &[&[1, 1, 1], &[1, 1, -1], &[1, -1, 0]],
        &[-2, -1, 0],
        &[-1, 0, 0],
        0,
        "I3322",
    )
}

pub fn i3422_1() -> CgTable {
    table(
        3,
        4,
        &[&[-1, -1, 1, -1], &[-1, 1, -1, -1], &[1, 1, 1, -1]],
        &[1, 1, -2],
        &[1, 0, 0, 1],
        2,
        "I3422_1",
    )
}

pub fn i3422_2() -> CgTable {
    table(
        3,
        4,
        &[&[-1, 0, 1, -1], &[1, -1, 0, -1], &[1, 1, 1, 0]],
        &[0, 1, -1],
        &[-1, 0, -1, 1],
        1,
        "I3422_2",
    )
}

pub fn i3422_3() -> CgTable {
    table(
        3,
        4,
        &[&[-2, 0, 1, -1], &[1, -1, 1, -1], &[1, 1, 1, -1]],
        &[1, 0, -1],
        &[0, 0, -1, 2],
        2,
        "I3422_3",
    )
}

/// `p(00|00) >= 0` written as `-p(00|00) <= 0`.
pub fn positivity(scenario: Scenario) -> CgTable {
    let mut d = vec![vec![0; scenario.n_b()]; scenario.n_a()];
    d[0][0] = -1;
    CgTable::new(
        scenario,
        d,
        vec![0; scenario.n_a()],
        vec![0; scenario.n_b()],
        0,
    )
    .expect("positivity shape")
    .with_name("positivity")
}

/// The five nontrivial tables, in the order they appear as rows 1-5 of the
/// four-setting summary table.
pub fn all() -> Vec<CgTable> {
    vec![chsh(), i3322(), i3422_1(), i3422_2(), i3422_3()]
}
