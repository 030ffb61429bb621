use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::int_matrix::IntMatrix;

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal,
/// `d₁ | d₂ | …`, zeros trailing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form by gcd-driven row and column reduction with the pivot
/// moved to the corner.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (r, c) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SnfResult { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                if !q.is_zero() {
                    d.add_row_multiple(i, t, &-&q);
                    u.add_row_multiple(i, t, &-&q);
                }
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..c {
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                if !q.is_zero() {
                    d.add_col_multiple(j, t, &-&q);
                    v.add_col_multiple(j, t, &-&q);
                }
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, d, v }
}

/// Column-style Hermite normalization of a full-column-rank integer basis.
///
/// Unimodular column operations bring the matrix to echelon form scanning rows
/// top to bottom: each pivot row has a positive pivot, zeros to its right and
/// entries to its left reduced into `[0, pivot)`. Returns the normalized
/// matrix and its pivot rows, which form the lexicographically first
/// independent row set.
pub fn column_hermite(m: &IntMatrix) -> (IntMatrix, Vec<usize>) {
    let mut h = m.clone();
    let k = h.cols();
    let mut pivots = Vec::new();
    let mut c = 0;
    for i in 0..h.rows() {
        if c == k {
            break;
        }
        // gcd-combine row i's entries in columns c.. into column c
        loop {
            let nz: Vec<usize> = (c..k).filter(|&j| !h[(i, j)].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    h.swap_cols(c, j);
                }
                break;
            }
            let &p = nz.iter().min_by_key(|&&j| h[(i, j)].abs()).expect("nonempty");
            for &j in &nz {
                if j != p {
                    let q = h[(i, j)].div_floor(&h[(i, p)]);
                    h.add_col_multiple(j, p, &-q);
                }
            }
        }
        if h[(i, c)].is_zero() {
            continue;
        }
        if h[(i, c)].is_negative() {
            h.negate_col(c);
        }
        for j in 0..c {
            let q = h[(i, j)].div_floor(&h[(i, c)]);
            if !q.is_zero() {
                h.add_col_multiple(j, c, &-q);
            }
        }
        pivots.push(i);
        c += 1;
    }
    (h, pivots)
}

/// Integer basis (as columns) of `{x ∈ Zⁿ : A x = 0}`, Hermite-normalized.
/// `None` when the kernel is trivial.
pub fn integer_kernel(a: &IntMatrix) -> Option<IntMatrix> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let n = a.cols();
    if rank == n {
        return None;
    }
    let cols: Vec<Vec<BigInt>> = (rank..n).map(|j| snf.v.column(j)).collect();
    let basis = IntMatrix::from_columns(&cols).expect("nonempty kernel basis");
    Some(column_hermite(&basis).0)
}
