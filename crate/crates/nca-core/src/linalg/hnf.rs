use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Int, IntMatrix};

/// Row Hermite normal form. Returns `(H, U)` with `U` unimodular,
/// `U * M = H`, pivots positive, entries above each pivot reduced into
/// `[0, pivot)`, zero rows at the bottom. `H` is uniquely determined by the
/// row lattice of `M` (together with the row count).
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut pivot_row = 0;
    for col in 0..m.cols() {
        let Some(k) = (pivot_row..h.rows()).find(|&i| !h[(i, col)].is_zero()) else {
            continue;
        };
        h.swap_rows(pivot_row, k);
        u.swap_rows(pivot_row, k);
        for i in pivot_row + 1..h.rows() {
            if h[(i, col)].is_zero() {
                continue;
            }
            gcd_rows(&mut h, &mut u, pivot_row, i, col);
        }
        if h[(pivot_row, col)].is_negative() {
            negate_row(&mut h, pivot_row);
            negate_row(&mut u, pivot_row);
        }
        let pivot = h[(pivot_row, col)].clone();
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&pivot);
            if !q.is_zero() {
                sub_scaled(&mut h, i, pivot_row, &q);
                sub_scaled(&mut u, i, pivot_row, &q);
            }
        }
        pivot_row += 1;
        if pivot_row == h.rows() {
            break;
        }
    }
    (h, u)
}

/// Unimodular transform zeroing `h[i][col]` against the pivot `h[r][col]`.
///
/// When the pivot already divides the entry this is a plain shear that
/// leaves row `r` untouched; otherwise rows `(r, i)` become
/// `(a*row_r + b*row_i, -y/g*row_r + x/g*row_i)` where
/// `g = gcd(x, y) = a x + b y > 0`, `x = h[r][col]`, `y = h[i][col]`, so
/// `|h[r][col]|` strictly shrinks to `g`. The shear shortcut matters:
/// Bezout pairs for divisible inputs may have `a = 0`, and replacing the
/// pivot row by a multiple of row `i` can re-dirty previously cleared
/// entries and cycle forever when row and column sweeps alternate.
fn gcd_rows(h: &mut IntMatrix, u: &mut IntMatrix, r: usize, i: usize, col: usize) {
    let x = h[(r, col)].clone();
    let y = h[(i, col)].clone();
    if !x.is_zero() && y.is_multiple_of(&x) {
        let q = &y / &x;
        sub_scaled(h, i, r, &q);
        sub_scaled(u, i, r, &q);
        debug_assert!(h[(i, col)].is_zero());
        return;
    }
    let (g, a, b) = signed_gcd(&x, &y);
    let xs = &x / &g;
    let ys = &y / &g;
    for m in [&mut *h, &mut *u] {
        for j in 0..m.cols() {
            let top = &a * &m[(r, j)] + &b * &m[(i, j)];
            let bot = &m[(i, j)] * &xs - &m[(r, j)] * &ys;
            m[(r, j)] = top;
            m[(i, j)] = bot;
        }
    }
    debug_assert!(h[(i, col)].is_zero() && h[(r, col)] == g);
}

/// Extended gcd with the gcd normalized positive: `a*x + b*y = g > 0`.
fn signed_gcd(x: &Int, y: &Int) -> (Int, Int, Int) {
    let e = x.extended_gcd(y);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for j in 0..m.cols() {
        let v = -m[(i, j)].clone();
        m[(i, j)] = v;
    }
}

/// row_i -= q * row_k
fn sub_scaled(m: &mut IntMatrix, i: usize, k: usize, q: &Int) {
    for j in 0..m.cols() {
        let s = q * &m[(k, j)];
        if !s.is_zero() {
            let v = &m[(i, j)] - s;
            m[(i, j)] = v;
        }
    }
}

/// Smith normal form. Returns `(D, U, V)` with `U, V` unimodular,
/// `U * M * V = D` diagonal, `d_1 | d_2 | ...`, all diagonal entries >= 0.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let steps = m.rows().min(m.cols());
    for t in 0..steps {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            for i in t + 1..d.rows() {
                if !d[(i, t)].is_zero() {
                    gcd_rows(&mut d, &mut u, t, i, t);
                }
            }
            let mut row_clean = true;
            for j in t + 1..d.cols() {
                if !d[(t, j)].is_zero() {
                    gcd_cols(&mut d, &mut v, t, j);
                    row_clean = false;
                }
            }
            if !row_clean {
                // Column operations may have refilled column t.
                if (t + 1..d.rows()).any(|i| !d[(i, t)].is_zero()) {
                    continue;
                }
            }
            // Pivot divides the remaining block, or pull a bad entry up.
            match find_non_divisible(&d, t) {
                None => break,
                Some((i, _)) => {
                    let one = Int::one();
                    add_scaled_row(&mut d, t, i, &one);
                    add_scaled_row(&mut u, t, i, &one);
                }
            }
        }
        if d[(t, t)].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    (d, u, v)
}

fn smallest_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d[(bi, bj)].abs() <= d[(i, j)].abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn find_non_divisible(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let pivot = &d[(t, t)];
    for i in t + 1..d.rows() {
        for j in t + 1..d.cols() {
            if !d[(i, j)].is_multiple_of(pivot) {
                return Some((i, j));
            }
        }
    }
    None
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m[(i, a)].clone();
        m[(i, a)] = m[(i, b)].clone();
        m[(i, b)] = x;
    }
}

/// Column analogue of [`gcd_rows`] acting on columns `(c, j)` of `d`,
/// mirrored on `v` (which multiplies from the right). The divisible case is
/// again a shear on column `j` alone, so a clean pivot column stays clean.
fn gcd_cols(d: &mut IntMatrix, v: &mut IntMatrix, c: usize, j: usize) {
    let row = c; // pivot row for column elimination
    let x = d[(row, c)].clone();
    let y = d[(row, j)].clone();
    if !x.is_zero() && y.is_multiple_of(&x) {
        let q = &y / &x;
        sub_scaled_col(d, j, c, &q);
        sub_scaled_col(v, j, c, &q);
        debug_assert!(d[(row, j)].is_zero());
        return;
    }
    let (g, a, b) = signed_gcd(&x, &y);
    let xs = &x / &g;
    let ys = &y / &g;
    for m in [&mut *d, &mut *v] {
        for i in 0..m.rows() {
            let left = &a * &m[(i, c)] + &b * &m[(i, j)];
            let right = &m[(i, j)] * &xs - &m[(i, c)] * &ys;
            m[(i, c)] = left;
            m[(i, j)] = right;
        }
    }
    debug_assert!(d[(row, j)].is_zero() && d[(row, c)] == g);
}

/// row_t += s * row_i
fn add_scaled_row(m: &mut IntMatrix, t: usize, i: usize, s: &Int) {
    for j in 0..m.cols() {
        let v = &m[(t, j)] + s * &m[(i, j)];
        m[(t, j)] = v;
    }
}

/// col_j -= q * col_c
fn sub_scaled_col(m: &mut IntMatrix, j: usize, c: usize, q: &Int) {
    for i in 0..m.rows() {
        let s = q * &m[(i, c)];
        if !s.is_zero() {
            let v = &m[(i, j)] - s;
            m[(i, j)] = v;
        }
    }
}

/// Basis of `{ x in Z^rows : x * M = 0 }` as matrix rows; the result is
/// saturated (a direct summand of Z^rows) because it comes from unimodular
/// transform rows.
pub fn integer_left_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(m);
    let rows: Vec<Vec<Int>> = (0..h.rows())
        .filter(|&i| h.is_zero_row(i))
        .map(|i| u.row(i).to_vec())
        .collect();
    if rows.is_empty() {
        IntMatrix::zero(0, m.rows())
    } else {
        IntMatrix::from_rows(rows)
    }
}
