//! The simplex solver against brute-force vertex enumeration.

use proptest::prelude::*;
use solidarity::{solve_lp, LpProblem, LpStatus, Row};

/// All constraints as `a.x <= b`.
fn halfspaces(p: &LpProblem) -> Vec<(Vec<f64>, f64)> {
    let n = p.num_vars();
    let mut out = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if p.var_upper[j].is_finite() {
            out.push((e.clone(), p.var_upper[j]));
        }
        if p.var_lower[j].is_finite() {
            out.push((e.iter().map(|v| -v).collect(), -p.var_lower[j]));
        }
    }
    for r in &p.rows {
        if r.upper.is_finite() {
            out.push((r.coeffs.clone(), r.upper));
        }
        if r.lower.is_finite() {
            out.push((r.coeffs.iter().map(|v| -v).collect(), -r.lower));
        }
    }
    out
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r != col {
                let f = a[r][col] / pivot_row[col];
                for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(k: usize, n: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, k: usize, n: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for i in start..n {
            acc.push(i);
            go(i + 1, k, n, acc, f);
            acc.pop();
        }
    }
    go(0, k, n, &mut Vec::new(), f);
}

/// Best objective over vertices of a bounded polytope, `None` if empty.
fn vertex_optimum(p: &LpProblem) -> Option<f64> {
    let h = halfspaces(p);
    let n = p.num_vars();
    let mut best: Option<f64> = None;
    combinations(n, h.len(), &mut |pick| {
        let a = pick.iter().map(|&i| h[i].0.clone()).collect();
        let b = pick.iter().map(|&i| h[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            let ok = h
                .iter()
                .all(|(a, b)| a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() <= b + 1e-7);
            if ok {
                let v: f64 = p.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    });
    best
}

fn arb_bounded_lp(max_vars: usize, max_rows: usize) -> impl Strategy<Value = LpProblem> {
    (1..=max_vars, 0..=max_rows).prop_flat_map(|(n, m)| {
        let bound = (-10i32..=10, 0i32..=10).prop_map(|(lo, w)| (lo as f64, (lo + w) as f64));
        let row = (
            prop::collection::vec(-5i32..=5, n),
            prop::option::of(-20i32..=20),
            prop::option::of(0i32..=20),
        )
            .prop_map(|(c, lo, w)| {
                let lower = lo.map_or(f64::NEG_INFINITY, f64::from);
                let upper = match (lo, w) {
                    (Some(l), Some(w)) => f64::from(l + w),
                    (None, Some(w)) => f64::from(w),
                    (_, None) => f64::INFINITY,
                };
                Row::new(c.into_iter().map(f64::from).collect(), lower, upper)
            });
        (
            prop::collection::vec(-10i32..=10, n),
            prop::collection::vec(bound, n),
            prop::collection::vec(row, m),
        )
            .prop_map(|(obj, bounds, rows)| LpProblem {
                objective: obj.into_iter().map(f64::from).collect(),
                var_lower: bounds.iter().map(|b| b.0).collect(),
                var_upper: bounds.iter().map(|b| b.1).collect(),
                rows,
            })
    })
}

/// Rows are placed around an integer point inside the box, so the
/// problem is always feasible and the optimum is finite.
fn arb_feasible_lp(max_vars: usize, max_rows: usize) -> impl Strategy<Value = LpProblem> {
    (1..=max_vars, 0..=max_rows).prop_flat_map(|(n, m)| {
        let var = (-10i32..=10, 0i32..=10, 0i32..=10);
        let row = (
            prop::collection::vec(-5i32..=5, n),
            prop::option::of(0i32..=6),
            prop::option::of(0i32..=6),
        );
        (
            prop::collection::vec(-10i32..=10, n),
            prop::collection::vec(var, n),
            prop::collection::vec(row, m),
        )
            .prop_map(|(obj, vars, rows)| {
                let x0: Vec<f64> = vars.iter().map(|v| f64::from(v.0 + v.1)).collect();
                LpProblem {
                    objective: obj.into_iter().map(f64::from).collect(),
                    var_lower: vars.iter().map(|v| f64::from(v.0)).collect(),
                    var_upper: vars.iter().map(|v| f64::from(v.0 + v.1 + v.2)).collect(),
                    rows: rows
                        .into_iter()
                        .map(|(c, below, above)| {
                            let coeffs: Vec<f64> = c.into_iter().map(f64::from).collect();
                            let at: f64 = coeffs.iter().zip(&x0).map(|(a, x)| a * x).sum();
                            Row::new(
                                coeffs,
                                below.map_or(f64::NEG_INFINITY, |d| at - f64::from(d)),
                                above.map_or(f64::INFINITY, |d| at + f64::from(d)),
                            )
                        })
                        .collect(),
                }
            })
    })
}

fn check_against_vertices(p: &LpProblem) -> Result<(), TestCaseError> {
    let got = solve_lp(p).unwrap();
    match vertex_optimum(p) {
        None => prop_assert_eq!(got.status, LpStatus::Infeasible),
        Some(best) => {
            prop_assert_eq!(got.status, LpStatus::Optimal);
            prop_assert!(
                (got.objective_value - best).abs() < 1e-6,
                "{} vs {}",
                got.objective_value,
                best
            );
            prop_assert!(p.max_violation(&got.values) < 1e-7);
            let recomputed: f64 = p
                .objective
                .iter()
                .zip(&got.values)
                .map(|(c, x)| c * x)
                .sum();
            prop_assert!((recomputed - got.objective_value).abs() < 1e-7);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_vertex_enumeration_small(p in arb_bounded_lp(4, 3)) {
        check_against_vertices(&p)?;
    }

    #[test]
    fn matches_vertex_enumeration_feasible(p in arb_feasible_lp(4, 4)) {
        check_against_vertices(&p)?;
    }

    #[test]
    fn repeated_solves_are_identical(p in arb_bounded_lp(5, 4)) {
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&p).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.values), bits(&b.values));
    }

    #[test]
    fn objective_scales_with_costs(p in arb_bounded_lp(5, 4), k in 1u32..=8) {
        let base = solve_lp(&p).unwrap();
        let mut scaled = p.clone();
        for c in &mut scaled.objective {
            *c *= f64::from(k);
        }
        let s = solve_lp(&scaled).unwrap();
        prop_assert_eq!(base.status, s.status);
        if base.status == LpStatus::Optimal {
            prop_assert!((s.objective_value - f64::from(k) * base.objective_value).abs() < 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_vertex_enumeration_six(p in arb_feasible_lp(6, 6)) {
        check_against_vertices(&p)?;
    }
}

#[test]
fn free_variable_with_unbounded_direction() {
    let p = LpProblem {
        objective: vec![1.0],
        var_lower: vec![f64::NEG_INFINITY],
        var_upper: vec![f64::INFINITY],
        rows: vec![],
    };
    assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn degenerate_transport_problem() {
    // Three sources, three sinks, all supplies equal: heavy degeneracy.
    let mut rows = Vec::new();
    for i in 0..3 {
        let mut c = vec![0.0; 9];
        for j in 0..3 {
            c[3 * i + j] = 1.0;
        }
        rows.push(Row::eq(c, 1.0));
        let mut c = vec![0.0; 9];
        for j in 0..3 {
            c[3 * j + i] = 1.0;
        }
        rows.push(Row::eq(c, 1.0));
    }
    let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
    let p = LpProblem {
        objective: cost.iter().map(|c| -c).collect(),
        var_lower: vec![0.0; 9],
        var_upper: vec![f64::INFINITY; 9],
        rows,
    };
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    // Cheapest assignment: (0,1), (1,0), (2,2) = 1 + 2 + 2.
    assert!((s.objective_value + 5.0).abs() < 1e-9);
}
