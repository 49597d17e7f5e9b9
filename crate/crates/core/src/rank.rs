//! Exact rank of integer matrices.

use num_integer::Integer;

/// Rank over the rationals, computed by fraction-free row reduction.
/// Each reduced row is divided by the gcd of its entries so values stay small.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut mat: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let n_rows = mat.len();
    let n_cols = mat.first().map_or(0, Vec::len);

    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(pivot) = (rank..n_rows)
            .filter(|&r| mat[r][col] != 0)
            .min_by_key(|&r| mat[r][col].unsigned_abs())
        else {
            continue;
        };
        mat.swap(rank, pivot);
        let (top, rest) = mat.split_at_mut(rank + 1);
        let prow = &top[rank];
        let p = prow[col];
        for row in rest.iter_mut() {
            let v = row[col];
            if v == 0 {
                continue;
            }
            let g = p.gcd(&v);
            let (mp, mv) = (p / g, v / g);
            for (dst, &src) in row.iter_mut().zip(prow) {
                *dst = *dst * mp - src * mv;
            }
            let content = row.iter().fold(0i128, |acc, &x| acc.gcd(&x));
            if content > 1 {
                row.iter_mut().for_each(|x| *x /= content);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(integer_rank(&[]), 0);
        assert_eq!(integer_rank(&[vec![0, 0, 0]]), 0);
        assert_eq!(integer_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(integer_rank(&[vec![1, 2], vec![3, 4]]), 2);
        assert_eq!(
            integer_rank(&[vec![2, 4, 6], vec![1, 1, 1], vec![3, 5, 7]]),
            2
        );
    }

    #[test]
    fn identity_rank() {
        let n = 24;
        let id: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        assert_eq!(integer_rank(&id), n);
    }

    // Rank that floating point gets wrong without a tolerance: rows that
    // differ by tiny relative amounts are still exactly independent.
    #[test]
    fn large_entries_exact() {
        let big = 1_000_000_007i64;
        assert_eq!(
            integer_rank(&[vec![big, big + 1], vec![big + 1, big + 2]]),
            2
        );
        assert_eq!(
            integer_rank(&[vec![big, 2 * big], vec![3 * big, 6 * big]]),
            1
        );
    }
}
