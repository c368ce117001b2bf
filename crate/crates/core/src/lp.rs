//! Phase-one simplex for small dense feasibility problems `A x = b, x >= 0`.

/// Minimum total artificial mass needed to satisfy `A x = b, x >= 0`, with the
/// corresponding `x`. Zero (up to rounding) means feasible.
///
/// `a` is row-major with `rows` rows of `cols` entries. Bland's rule keeps the
/// pivoting finite on degenerate problems.
pub(crate) fn phase_one(a: &[f64], b: &[f64], rows: usize, cols: usize) -> (f64, Vec<f64>) {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    // tableau columns: x (cols), artificials (rows), rhs
    let width = cols + rows + 1;
    let mut t = vec![0.0; (rows + 1) * width];
    for r in 0..rows {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..cols {
            t[r * width + c] = sign * a[r * cols + c];
        }
        t[r * width + cols + r] = 1.0;
        t[r * width + width - 1] = sign * b[r];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    // objective row: minimize sum of artificials, written as reduced costs
    let obj = rows * width;
    for c in 0..width {
        let s: f64 = (0..rows).map(|r| t[r * width + c]).sum();
        t[obj + c] = if (cols..cols + rows).contains(&c) { 0.0 } else { -s };
    }
    const EPS: f64 = 1e-12;
    for _ in 0..10_000 {
        let Some(enter) = (0..cols + rows).find(|&c| t[obj + c] < -EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            let coef = t[r * width + enter];
            if coef > EPS {
                let ratio = t[r * width + width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < best - EPS || ((ratio - best).abs() <= EPS && basis[r] < basis[lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            break;
        };
        let piv = t[pr * width + enter];
        for c in 0..width {
            t[pr * width + c] /= piv;
        }
        for r in 0..=rows {
            if r == pr {
                continue;
            }
            let f = t[r * width + enter];
            if f != 0.0 {
                for c in 0..width {
                    t[r * width + c] -= f * t[pr * width + c];
                }
            }
        }
        basis[pr] = enter;
    }
    let mut x = vec![0.0; cols];
    for (r, &var) in basis.iter().enumerate() {
        if var < cols {
            x[var] = t[r * width + width - 1].max(0.0);
        }
    }
    (-t[obj + width - 1], x)
}
