//! Exact linear algebra over two coefficient fields: rational functions in
//! the symbolic names (via fraction-free Bareiss elimination on polynomial
//! matrices), and plain rationals for specialized numeric systems.
//!
//! The symbolic path keeps every intermediate entry polynomial — each
//! elimination step divides exactly by the previous pivot — which avoids the
//! coefficient blowup of naive rational-function elimination.

use crate::poly::MultiPoly;
use crate::pricing::Cost;
use crate::rat::Rat;
use crate::ratfun::RationalFunction;
use num::Zero;

/// Row-echelon data produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<MultiPoly>>,
    /// pivot_cols[r] = column of the pivot in row r (strictly increasing).
    pivot_cols: Vec<usize>,
    ncols: usize,
}

fn fraction_free_echelon(mut rows: Vec<Vec<MultiPoly>>, cost: &mut Cost) -> Echelon {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    // content-strip rows up front; inside the sweep the Bareiss divisions
    // must see unscaled entries
    for row in rows.iter_mut() {
        let mut content: Option<MultiPoly> = None;
        for e in row.iter() {
            if !e.is_zero() {
                content = Some(match content {
                    None => e.primitive_part(),
                    Some(c) => crate::poly::poly_gcd(&c, e),
                });
                if content.as_ref().map(|c| c.is_one()).unwrap_or(false) {
                    break;
                }
            }
        }
        if let Some(c) = content {
            if !c.is_one() && !c.is_zero() {
                for e in row.iter_mut() {
                    *e = e.div_exact(&c).expect("content divides");
                }
            }
        }
    }

    let mut pivot_cols = Vec::new();
    let mut prev_pivot: Option<MultiPoly> = None;
    let mut r = 0usize;
    for col in 0..ncols {
        // pick the structurally cheapest nonzero pivot in this column
        let mut best: Option<(usize, (usize, u32))> = None;
        for (i, row) in rows.iter().enumerate().skip(r) {
            let e = &row[col];
            if !e.is_zero() {
                let key = (e.num_terms(), e.total_degree());
                if best.as_ref().map(|(_, k)| key < *k).unwrap_or(true) {
                    best = Some((i, key));
                }
            }
        }
        let pivot_row = match best {
            None => continue,
            Some((i, _)) => i,
        };
        rows.swap(r, pivot_row);
        let pivot = rows[r][col].clone();
        for i in (r + 1)..nrows {
            if rows[i][col].is_zero() {
                // still must rescale the row for Bareiss bookkeeping
                for j in 0..ncols {
                    if !rows[i][j].is_zero() {
                        cost.bump_mults(1);
                        let prod = &rows[i][j] * &pivot;
                        rows[i][j] = match &prev_pivot {
                            None => prod,
                            Some(p) => prod.div_exact(p).expect("bareiss exact division"),
                        };
                        cost.observe_terms(rows[i][j].num_terms() as u64);
                    }
                }
                continue;
            }
            let factor = rows[i][col].clone();
            for j in 0..ncols {
                let a = &rows[i][j] * &pivot;
                let b = &rows[r][j] * &factor;
                cost.bump_mults(2);
                let d = &a - &b;
                rows[i][j] = if d.is_zero() {
                    d
                } else {
                    match &prev_pivot {
                        None => d,
                        Some(p) => d.div_exact(p).expect("bareiss exact division"),
                    }
                };
                cost.observe_terms(rows[i][j].num_terms() as u64);
            }
        }
        prev_pivot = Some(pivot);
        pivot_cols.push(col);
        r += 1;
        if r == nrows {
            break;
        }
    }
    rows.truncate(r.max(pivot_cols.len()));
    Echelon { rows, pivot_cols, ncols }
}

fn back_substitute(
    ech: &Echelon,
    ctx: &crate::poly::CtxRef,
    free_values: &[(usize, RationalFunction)],
    rhs_col: Option<usize>,
) -> Vec<RationalFunction> {
    let ctx = ctx.clone();
    let unknown_cols = rhs_col.unwrap_or(ech.ncols);
    let mut solution = vec![RationalFunction::zero(&ctx); unknown_cols];
    for (col, v) in free_values {
        solution[*col] = v.clone();
    }
    for (r, &pc) in ech.pivot_cols.iter().enumerate().rev() {
        let mut acc = match rhs_col {
            Some(rc) => RationalFunction::from_poly(ech.rows[r][rc].clone()),
            None => RationalFunction::zero(&ctx),
        };
        for col in (pc + 1)..unknown_cols {
            if !ech.rows[r][col].is_zero() && !solution[col].is_zero() {
                acc = &acc - &(&RationalFunction::from_poly(ech.rows[r][col].clone()) * &solution[col]);
            }
        }
        solution[pc] = &acc / &RationalFunction::from_poly(ech.rows[r][pc].clone());
    }
    solution
}

/// Basis of the nullspace of a homogeneous system (rows x ncols), one vector
/// per free column, entries canonical rational functions.
pub fn nullspace(rows: Vec<Vec<MultiPoly>>, cost: &mut Cost) -> Vec<Vec<RationalFunction>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    cost.record_system(ncols, rows.len());
    if rows.is_empty() || ncols == 0 {
        return vec![];
    }
    let ctx = rows[0][0].ctx().clone();
    let ech = fraction_free_echelon(rows, cost);
    let mut basis = Vec::new();
    for col in 0..ncols {
        if !ech.pivot_cols.contains(&col) {
            let v = back_substitute(&ech, &ctx, &[(col, RationalFunction::one(&ctx))], None);
            basis.push(v);
        }
    }
    basis
}

/// Solve A x = b exactly. Returns None when inconsistent; free unknowns are
/// set to zero.
pub fn solve(mut rows: Vec<Vec<MultiPoly>>, rhs: Vec<MultiPoly>, cost: &mut Cost) -> Option<Vec<RationalFunction>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    cost.record_system(ncols, rows.len());
    if rows.is_empty() {
        return Some(vec![]);
    }
    let ctx = rows[0][0].ctx().clone();
    for (row, b) in rows.iter_mut().zip(rhs) {
        row.push(b);
    }
    let ech = fraction_free_echelon(rows, cost);
    // a pivot in the rhs column means an inconsistent row
    if ech.pivot_cols.iter().any(|&c| c == ncols) {
        return None;
    }
    // rows below the last pivot are all-zero by construction
    Some(back_substitute(&ech, &ctx, &[], Some(ncols)))
}

/// Determinant of a square polynomial matrix by fraction-free elimination.
pub fn determinant(rows: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "determinant needs a square matrix");
    let ctx = match rows.first().and_then(|r| r.first()) {
        None => panic!("determinant of empty matrix"),
        Some(e) => e.ctx().clone(),
    };
    let mut m = rows;
    let mut prev = MultiPoly::one(&ctx);
    let mut sign = 1i64;
    for k in 0..n {
        // pivot search
        let mut pr = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            if !row[k].is_zero() {
                pr = Some(i);
                break;
            }
        }
        let pr = match pr {
            None => return MultiPoly::zero(&ctx),
            Some(i) => i,
        };
        if pr != k {
            m.swap(pr, k);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = if t.is_zero() { t } else { t.div_exact(&prev).expect("bareiss exact division") };
            }
            m[i][k] = MultiPoly::zero(&ctx);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Numeric elimination over exact rationals; returns a particular solution
/// (free unknowns zero) or None when inconsistent.
pub fn solve_numeric(mut rows: Vec<Vec<Rat>>, rhs: Vec<Rat>, cost: &mut Cost) -> Option<Vec<Rat>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    cost.record_system(ncols, rows.len());
    if rows.is_empty() {
        return Some(vec![]);
    }
    for (row, b) in rows.iter_mut().zip(rhs) {
        row.push(b);
    }
    let nrows = rows.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for col in 0..=ncols {
        let mut pr = None;
        for (i, row) in rows.iter().enumerate().skip(r) {
            if !row[col].is_zero() {
                pr = Some(i);
                break;
            }
        }
        let pr = match pr {
            None => continue,
            Some(i) => i,
        };
        if col == ncols {
            return None; // pivot in the rhs column: inconsistent
        }
        rows.swap(r, pr);
        let inv = rows[r][col].clone().recip();
        for j in col..=ncols {
            let v = rows[r][j].clone() * &inv;
            cost.bump_mults(1);
            rows[r][j] = v;
        }
        for i in 0..nrows {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..=ncols {
                    let v = rows[r][j].clone() * &f;
                    cost.bump_mults(1);
                    rows[i][j] = rows[i][j].clone() - v;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == nrows {
            break;
        }
    }
    // check the untouched tail rows for inconsistency
    for row in rows.iter().skip(r) {
        if row[..ncols].iter().all(|v| v.is_zero()) && !row[ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); ncols];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = rows[i][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Context, CtxRef};
    use crate::rat::rat_int;

    fn ctx() -> CtxRef {
        Context::new(vec!["n"], vec![])
    }

    fn c(ctxr: &CtxRef, v: i64) -> MultiPoly {
        MultiPoly::int(ctxr, v)
    }

    #[test]
    fn solves_a_small_symbolic_system() {
        // [n 1; 1 1] x = [n+1, 2] -> x = (1, 1) for generic n
        let cx = ctx();
        let n = MultiPoly::var(&cx, "n").unwrap();
        let rows = vec![vec![n.clone(), c(&cx, 1)], vec![c(&cx, 1), c(&cx, 1)]];
        let rhs = vec![&n + &c(&cx, 1), c(&cx, 2)];
        let mut cost = Cost::new();
        let x = solve(rows, rhs, &mut cost).unwrap();
        assert!(x[0].is_one());
        assert!(x[1].is_one());
        assert!(cost.field_mults > 0);
    }

    #[test]
    fn detects_inconsistency() {
        let cx = ctx();
        let rows = vec![vec![c(&cx, 1), c(&cx, 1)], vec![c(&cx, 2), c(&cx, 2)]];
        let rhs = vec![c(&cx, 1), c(&cx, 3)];
        assert!(solve(rows, rhs, &mut Cost::new()).is_none());
    }

    #[test]
    fn nullspace_of_rank_one_system() {
        // x + y + z = 0, 2x + 2y + 2z = 0 -> two free directions
        let cx = ctx();
        let rows = vec![
            vec![c(&cx, 1), c(&cx, 1), c(&cx, 1)],
            vec![c(&cx, 2), c(&cx, 2), c(&cx, 2)],
        ];
        let basis = nullspace(rows, &mut Cost::new());
        assert_eq!(basis.len(), 2);
        for v in basis {
            let sum = v.iter().fold(RationalFunction::zero(&cx), |a, b| &a + b);
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let cx = ctx();
        let n = MultiPoly::var(&cx, "n").unwrap();
        // det [[n, 1], [1, n]] = n^2 - 1
        let d = determinant(vec![vec![n.clone(), c(&cx, 1)], vec![c(&cx, 1), n.clone()]]);
        assert_eq!(d, &n.pow(2) - &c(&cx, 1));
        // det of singular matrix
        let d0 = determinant(vec![vec![n.clone(), n.clone()], vec![n.clone(), n.clone()]]);
        assert!(d0.is_zero());
    }

    #[test]
    fn numeric_solver_agrees_with_symbolic_on_specialization() {
        // compare the two elimination routes on the same random-ish systems
        let cx = ctx();
        for seed in 0..12i64 {
            let vals: Vec<i64> = (0..9).map(|i| ((seed * 31 + i * 17) % 7) - 3).collect();
            let rows: Vec<Vec<MultiPoly>> =
                (0..3).map(|i| (0..3).map(|j| c(&cx, vals[(i * 3 + j) as usize])).collect()).collect();
            let rhs: Vec<MultiPoly> = (0..3).map(|i| c(&cx, (seed + i) % 5)).collect();
            let nrows: Vec<Vec<Rat>> = (0..3)
                .map(|i| (0..3).map(|j| rat_int(vals[(i * 3 + j) as usize])).collect())
                .collect();
            let nrhs: Vec<Rat> = (0..3).map(|i| rat_int((seed + i) % 5)).collect();
            let sym = solve(rows, rhs, &mut Cost::new());
            let num = solve_numeric(nrows.clone(), nrhs.clone(), &mut Cost::new());
            match (sym, num) {
                (None, None) => {}
                (Some(xs), Some(_)) => {
                    // verify the symbolic solution numerically against A x = b
                    for (i, row) in nrows.iter().enumerate() {
                        let mut acc = Rat::zero();
                        for (j, a) in row.iter().enumerate() {
                            acc += a * xs[j].constant_value().unwrap();
                        }
                        assert_eq!(acc, nrhs[i]);
                    }
                }
                other => panic!("solvers disagree: {:?}", other.0.is_some()),
            }
        }
    }
}
