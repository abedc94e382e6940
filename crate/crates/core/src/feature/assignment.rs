//! Rectangular linear sum assignment (Hungarian method with potentials).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Column matched to each row; `None` for unmatched rows when rows outnumber columns.
    pub row_to_col: Vec<Option<usize>>,
    /// Sum of matched costs, accumulated in row order.
    pub total: f64,
}

impl Assignment {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_to_col
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| (r, c)))
    }
}

/// Matches `min(n, m)` rows and columns one-to-one at minimum total cost.
pub fn solve_assignment(cost: &[Vec<f64>]) -> Result<Assignment> {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    for (row, r) in cost.iter().enumerate() {
        if r.len() != m {
            return Err(Error::DimMismatch {
                expected: m,
                found: r.len(),
            });
        }
        if let Some(col) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    if n == 0 || m == 0 {
        return Ok(Assignment {
            row_to_col: vec![None; n],
            total: 0.0,
        });
    }

    let row_to_col = if n <= m {
        hungarian(n, m, |i, j| cost[i][j]).into_iter().map(Some).collect()
    } else {
        let col_to_row = hungarian(m, n, |i, j| cost[j][i]);
        let mut rows = vec![None; n];
        for (c, r) in col_to_row.into_iter().enumerate() {
            rows[r] = Some(c);
        }
        rows
    };
    let total = row_to_col
        .iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| cost[r][c]))
        .fold(0.0, |acc, v| acc + v);
    Ok(Assignment { row_to_col, total })
}

/// Shortest-augmenting-path Hungarian algorithm for `n <= m`; returns the
/// column assigned to each row.
fn hungarian(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based: index 0 is the virtual source row/column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut min_v = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_v[j] {
                    min_v[j] = reduced;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assigned = vec![0; n];
    for j in 1..=m {
        if owner[j] > 0 {
            assigned[owner[j] - 1] = j - 1;
        }
    }
    assigned
}
