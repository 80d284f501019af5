//! Parameter grids.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_usize_lossy(n - 1);
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + step * T::from_usize_lossy(i)
                    }
                })
                .collect()
        }
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive (both > 0).
pub fn geomspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(T::exp)
        .collect()
}

/// Checks that a grid is non-empty, finite and strictly increasing.
pub fn check_increasing<T: Real>(what: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(format!("{what} grid is empty")));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("{what} grid contains {x}")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!(
            "{what} grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = linspace(0.0f64, 3.0, 301);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[300], 3.0);
        assert!((g[100] - 1.0).abs() < 1e-15);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
        assert!(linspace::<f64>(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn geometric_ratio_constant() {
        let g = geomspace(1e-4f64, 1e-3, 5);
        let r = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
    }

    #[test]
    fn increasing_check() {
        assert!(check_increasing("x", &[0.0, 1.0, 2.0]).is_ok());
        assert!(check_increasing("x", &[0.0, 0.0]).is_err());
        assert!(check_increasing::<f64>("x", &[]).is_err());
        assert!(check_increasing("x", &[0.0, f64::NAN]).is_err());
    }
}
