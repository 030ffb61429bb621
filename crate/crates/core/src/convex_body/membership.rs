//! Exact Phase-I simplex for hull and cone membership over `Q(√d)`.

use crate::exact_field::QuadExt;

/// Whether `x = Σ λ_k g_k` has a solution with `λ ≥ 0` (and `Σ λ_k ≤ 1` when
/// `budget` is set, i.e. membership in `conv({0} ∪ gens)`).
///
/// Bland's rule in exact arithmetic, so the pivoting always terminates.
pub(crate) fn nonneg_combination(gens: &[Vec<QuadExt>], x: &[QuadExt], budget: bool) -> bool {
    if x.iter().all(QuadExt::is_zero) {
        return true;
    }
    let n = x.len();
    let k = gens.len();
    if k == 0 {
        return false;
    }
    let eq_rows = n;
    let rows = n + usize::from(budget);
    // columns: λ_0..λ_{k-1}, [s], a_0..a_{n-1}, rhs
    let slack_col = k;
    let art0 = k + usize::from(budget);
    let cols = art0 + n;
    let rhs = cols;

    let mut t: Vec<Vec<QuadExt>> = Vec::with_capacity(rows);
    for i in 0..n {
        let flip = x[i].sign() < 0;
        let mut row = vec![QuadExt::zero(); cols + 1];
        for (j, g) in gens.iter().enumerate() {
            row[j] = if flip { -&g[i] } else { g[i].clone() };
        }
        row[art0 + i] = QuadExt::one();
        row[rhs] = if flip { -&x[i] } else { x[i].clone() };
        t.push(row);
    }
    if budget {
        let mut row = vec![QuadExt::zero(); cols + 1];
        for cell in row.iter_mut().take(k) {
            *cell = QuadExt::one();
        }
        row[slack_col] = QuadExt::one();
        row[rhs] = QuadExt::one();
        t.push(row);
    }
    let mut basis: Vec<usize> = (0..n).map(|i| art0 + i).collect();
    if budget {
        basis.push(slack_col);
    }

    // Phase-I objective: w = Σ artificials; obj[j] is the rate at which w
    // drops when column j enters.
    let mut obj = vec![QuadExt::zero(); cols + 1];
    for row in t.iter().take(eq_rows) {
        for j in 0..art0 {
            if !row[j].is_zero() {
                obj[j] = &obj[j] + &row[j];
            }
        }
        obj[rhs] = &obj[rhs] + &row[rhs];
    }

    loop {
        if obj[rhs].is_zero() {
            return true;
        }
        let Some(enter) = (0..cols).find(|&j| obj[j].sign() > 0) else {
            return false;
        };
        let mut leave: Option<(usize, QuadExt)> = None;
        for r in 0..rows {
            if t[r][enter].sign() <= 0 {
                continue;
            }
            let ratio = &t[r][rhs] / &t[r][enter];
            leave = match leave {
                None => Some((r, ratio)),
                Some((br, best)) => match ratio.cmp(&best) {
                    std::cmp::Ordering::Less => Some((r, ratio)),
                    std::cmp::Ordering::Equal if basis[r] < basis[br] => Some((r, ratio)),
                    _ => Some((br, best)),
                },
            };
        }
        // w is bounded below by 0, so some row always blocks
        let (r, _) = leave.expect("phase-I objective is bounded");
        pivot(&mut t, &mut obj, r, enter);
        basis[r] = enter;
    }
}

fn pivot(t: &mut [Vec<QuadExt>], obj: &mut [QuadExt], r: usize, c: usize) {
    let inv = t[r][c].inv().expect("nonzero pivot");
    for v in t[r].iter_mut() {
        if !v.is_zero() {
            *v = &*v * &inv;
        }
    }
    let pivot_row = t[r].clone();
    let eliminate = |row: &mut [QuadExt]| {
        let f = row[c].clone();
        if f.is_zero() {
            return;
        }
        for (v, p) in row.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v = &*v - &(&f * p);
            }
        }
    };
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(obj);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<QuadExt> {
        xs.iter().map(|&x| QuadExt::from_int(x)).collect()
    }

    #[test]
    fn segment_membership() {
        let gens = vec![v(&[1, 2])];
        assert!(nonneg_combination(&gens, &v(&[1, 2]), true));
        assert!(!nonneg_combination(&gens, &v(&[2, 4]), true));
        assert!(nonneg_combination(&gens, &v(&[2, 4]), false));
        assert!(!nonneg_combination(&gens, &v(&[1, 1]), false));
        assert!(!nonneg_combination(&gens, &v(&[-1, -2]), false));
    }

    #[test]
    fn simplex_membership() {
        let gens = vec![v(&[2, 0]), v(&[0, 2])];
        assert!(nonneg_combination(&gens, &v(&[1, 1]), true));
        assert!(nonneg_combination(&gens, &v(&[2, 0]), true));
        assert!(!nonneg_combination(&gens, &v(&[2, 1]), true));
        assert!(nonneg_combination(&gens, &v(&[0, 0]), true));
    }

    #[test]
    fn degenerate_generators() {
        // repeated and dependent generators exercise Bland's tie-breaking
        let gens = vec![v(&[1, 1]), v(&[2, 2]), v(&[1, 1]), v(&[0, 1]), v(&[1, 0])];
        assert!(nonneg_combination(&gens, &v(&[2, 2]), true));
        assert!(!nonneg_combination(&gens, &v(&[3, 2]), true));
    }
}
