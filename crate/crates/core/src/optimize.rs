//! One-dimensional search: golden-section refinement, optionally seeded by a
//! fixed grid scan so results do not depend on where a bracket happens to start.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Location and value of an extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping once the
/// bracket is narrower than `tol`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Extremum {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // the bracket shrinks by 1/φ per step, 200 steps reach below 1e-40 of the start
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        Extremum { x: x1, value: f1 }
    } else {
        Extremum { x: x2, value: f2 }
    }
}

/// Golden-section search for a maximum.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Extremum {
    let e = golden_section_min(|x| -f(x), a, b, tol);
    Extremum { x: e.x, value: -e.value }
}

/// Scans `grid` (sorted ascending) for the smallest value of `f`, then refines
/// with golden-section inside the two cells adjacent to the best point.
///
/// The returned value is never worse than the best grid value.
pub fn grid_then_golden_min(f: impl Fn(f64) -> f64, grid: &[f64], tol: f64) -> Extremum {
    assert!(!grid.is_empty(), "grid must not be empty");
    let (best_idx, best_val) = grid
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let grid_best = Extremum { x: grid[best_idx], value: best_val };
    if grid.len() < 2 {
        return grid_best;
    }
    let lo = grid[best_idx.saturating_sub(1)];
    let hi = grid[(best_idx + 1).min(grid.len() - 1)];
    let refined = golden_section_min(&f, lo, hi, tol);
    if refined.value < grid_best.value {
        refined
    } else {
        grid_best
    }
}

/// `count` points spaced evenly on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { b } else { a + h * i as f64 }).collect()
        }
    }
}

/// `count` points spaced evenly in `log` on `[a, b]`, endpoints included.
pub fn logspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(a.ln(), b.ln(), count).into_iter().map(f64::exp).collect();
    if let Some(first) = out.first_mut() {
        *first = a;
    }
    if let Some(last) = out.last_mut() {
        *last = b;
    }
    out
}
