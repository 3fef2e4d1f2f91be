//! Direct solver for five-diagonal linear systems.
//!
//! Plain banded Gaussian elimination without pivoting: the systems assembled
//! by the time stepper are small perturbations of the identity and strongly
//! diagonally dominant, so forward elimination of the two sub-diagonals
//! followed by back substitution runs in O(n) with a pivot-magnitude guard.

use crate::error::{Error, Result};

/// Five-band linear system `A x = b` with diagonals at offsets -2..=2.
///
/// All band vectors have the full length n; entries whose column index would
/// fall outside `0..n` are ignored (kept zero by convention).
#[derive(Debug, Clone)]
pub struct PentaSystem {
    pub sub2: Vec<f64>,
    pub sub1: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup1: Vec<f64>,
    pub sup2: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl PentaSystem {
    pub fn identity(n: usize, rhs: Vec<f64>) -> Self {
        assert_eq!(rhs.len(), n);
        Self {
            sub2: vec![0.0; n],
            sub1: vec![0.0; n],
            diag: vec![1.0; n],
            sup1: vec![0.0; n],
            sup2: vec![0.0; n],
            rhs,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x` for a candidate solution, used for residual checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i >= 1 {
                s += self.sub1[i] * x[i - 1];
            }
            if i >= 2 {
                s += self.sub2[i] * x[i - 2];
            }
            if i + 1 < n {
                s += self.sup1[i] * x[i + 1];
            }
            if i + 2 < n {
                s += self.sup2[i] * x[i + 2];
            }
            out[i] = s;
        }
        out
    }
}

/// Solves the system by banded elimination. Returns the solution vector.
pub fn solve_penta(sys: &PentaSystem) -> Result<Vec<f64>> {
    solve_penta_counted(sys).map(|(x, _)| x)
}

/// Same as [`solve_penta`] but also reports the number of arithmetic
/// operations performed, for work-scaling diagnostics.
pub fn solve_penta_counted(sys: &PentaSystem) -> Result<(Vec<f64>, u64)> {
    let n = sys.len();
    assert!(n >= 3, "pentadiagonal systems need n >= 3");
    let mut sub2 = sys.sub2.clone();
    let mut sub1 = sys.sub1.clone();
    let mut diag = sys.diag.clone();
    let mut sup1 = sys.sup1.clone();
    let sup2 = sys.sup2.clone();
    let mut rhs = sys.rhs.clone();
    let mut ops: u64 = 0;

    for i in 0..n {
        let row_max = diag[i]
            .abs()
            .max(sup1[i].abs())
            .max(sup2[i].abs())
            .max(sub1[i].abs())
            .max(sub2[i].abs());
        let pivot = diag[i];
        if pivot.abs() < 1e-14 * row_max || pivot == 0.0 {
            return Err(Error::SingularSystem { row: i, pivot });
        }
        if i + 1 < n && sub1[i + 1] != 0.0 {
            let m = sub1[i + 1] / pivot;
            sub1[i + 1] = 0.0;
            diag[i + 1] -= m * sup1[i];
            sup1[i + 1] -= m * sup2[i];
            rhs[i + 1] -= m * rhs[i];
            ops += 7;
        }
        if i + 2 < n && sub2[i + 2] != 0.0 {
            let m = sub2[i + 2] / pivot;
            sub2[i + 2] = 0.0;
            sub1[i + 2] -= m * sup1[i];
            diag[i + 2] -= m * sup2[i];
            rhs[i + 2] -= m * rhs[i];
            ops += 7;
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= sup1[i] * x[i + 1];
            ops += 2;
        }
        if i + 2 < n {
            s -= sup2[i] * x[i + 2];
            ops += 2;
        }
        x[i] = s / diag[i];
        ops += 1;
    }
    Ok((x, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_dd_system(rng: &mut impl Rng, n: usize) -> PentaSystem {
        let band = |rng: &mut dyn RngCore| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let mut sys = PentaSystem {
            sub2: band(rng),
            sub1: band(rng),
            diag: vec![0.0; n],
            sup1: band(rng),
            sup2: band(rng),
            rhs: band(rng),
        };
        for i in 0..n {
            if i < 2 {
                sys.sub2[i] = 0.0;
            }
            if i < 1 {
                sys.sub1[i] = 0.0;
            }
            if i + 2 >= n {
                sys.sup2[i] = 0.0;
            }
            if i + 1 >= n {
                sys.sup1[i] = 0.0;
            }
            let off = sys.sub2[i].abs() + sys.sub1[i].abs() + sys.sup1[i].abs() + sys.sup2[i].abs();
            sys.diag[i] = (off + 1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
        sys
    }

    #[test]
    fn identity_returns_rhs() {
        let rhs = vec![1.0, -2.0, 3.5, 0.0, 7.0, 1.0, 2.0, -4.0];
        let sys = PentaSystem::identity(8, rhs.clone());
        assert_eq!(solve_penta(&sys).unwrap(), rhs);
    }

    #[test]
    fn tridiagonal_matches_thomas_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = 50;
            let mut sys = random_dd_system(&mut rng, n);
            sys.sub2.iter_mut().for_each(|v| *v = 0.0);
            sys.sup2.iter_mut().for_each(|v| *v = 0.0);
            let x = solve_penta(&sys).unwrap();

            // independent Thomas-algorithm solve
            let mut c = sys.sup1.clone();
            let mut d = sys.rhs.clone();
            c[0] /= sys.diag[0];
            d[0] /= sys.diag[0];
            for i in 1..n {
                let m = sys.diag[i] - sys.sub1[i] * c[i - 1];
                c[i] /= m;
                d[i] = (d[i] - sys.sub1[i] * d[i - 1]) / m;
            }
            let mut y = vec![0.0; n];
            y[n - 1] = d[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = d[i] - c[i] * y[i + 1];
            }
            for i in 0..n {
                assert!((x[i] - y[i]).abs() < 1e-12 * (1.0 + y[i].abs()));
            }
        }
    }

    #[test]
    fn residuals_small_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [8usize, 17, 64, 129, 512] {
            for _ in 0..20 {
                let sys = random_dd_system(&mut rng, n);
                let x = solve_penta(&sys).unwrap();
                let ax = sys.apply(&x);
                let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let bmax = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                for i in 0..n {
                    assert!((ax[i] - sys.rhs[i]).abs() <= 1e-10 * (5.0 * xmax + bmax));
                }
            }
        }
    }

    #[test]
    fn zero_pivot_is_detected() {
        let mut sys = PentaSystem::identity(8, vec![1.0; 8]);
        sys.diag[4] = 0.0;
        assert!(matches!(
            solve_penta(&sys),
            Err(Error::SingularSystem { row: 4, .. })
        ));
    }

    #[test]
    fn work_grows_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut prev: Option<(usize, u64)> = None;
        for n in [64usize, 128, 256, 512, 1024, 2048, 4096] {
            let sys = random_dd_system(&mut rng, n);
            let (_, ops) = solve_penta_counted(&sys).unwrap();
            if let Some((pn, pops)) = prev {
                let slope = ((ops as f64) / (pops as f64)).ln() / ((n as f64) / (pn as f64)).ln();
                assert!((slope - 1.0).abs() < 0.1, "slope {slope} at n={n}");
            }
            prev = Some((n, ops));
        }
    }
}
