//! Mesh, grid functions and the difference operators of the scheme.
//!
//! Grid functions live on the uniform mesh `x_i = i h`, `i = 0..=I`, and
//! carry the homogeneous boundary constraint `y_l = y_{I-l} = 0` for
//! `l = 0, 1, 2`. All operators read out-of-range nodes as zero, which
//! together with the boundary constraint makes the summation identities
//! for `Q1`, `Q2`, `R1`, `R2` exact up to roundoff.

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Uniform space-time mesh over `[0, L] x [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    /// Domain length L.
    pub length: f64,
    /// Number of intervals I; nodes are 0..=I.
    pub intervals: usize,
    /// Space step h = L / I.
    pub h: f64,
    /// Time step tau.
    pub tau: f64,
    /// Final time T.
    pub t_final: f64,
}

impl Mesh {
    pub fn new(length: f64, intervals: usize, tau: f64, t_final: f64) -> Result<Self> {
        if intervals < 16 {
            return Err(Error::InvalidParams(format!(
                "mesh needs at least 16 intervals, got {intervals}"
            )));
        }
        if length <= 0.0 || tau <= 0.0 || t_final <= 0.0 || tau > t_final {
            return Err(Error::InvalidParams(
                "mesh requires L > 0, 0 < tau <= T".into(),
            ));
        }
        Ok(Self {
            length,
            intervals,
            h: length / intervals as f64,
            tau,
            t_final,
        })
    }

    /// Mesh with the step closest to `h` that divides `length` evenly;
    /// `tau = None` selects the default rule `tau = h^2`.
    pub fn from_h(length: f64, h: f64, tau: Option<f64>, t_final: f64) -> Result<Self> {
        if h <= 0.0 {
            return Err(Error::InvalidParams("h must be positive".into()));
        }
        let intervals = (length / h).round() as usize;
        let mesh_h = length / intervals as f64;
        Self::new(length, intervals, tau.unwrap_or(mesh_h * mesh_h), t_final)
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.tau).round().max(1.0) as usize
    }
}

/// Values of the discrete solution at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    values: Vec<f64>,
    h: f64,
}

impl GridState {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self {
            values: vec![0.0; mesh.intervals + 1],
            h: mesh.h,
        }
    }

    /// Wraps raw nodal values, forcing the constrained nodes
    /// (`l = 0, 1, 2` and mirrored) to zero.
    pub fn from_values(mut values: Vec<f64>, h: f64) -> Self {
        let n = values.len();
        assert!(n >= 7, "grid state needs at least 7 nodes");
        for l in 0..3 {
            values[l] = 0.0;
            values[n - 1 - l] = 0.0;
        }
        Self { values, h }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Highest node index I.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Node value with zero extension outside `0..=I`.
    #[inline]
    pub fn at(&self, i: isize) -> f64 {
        if i < 0 || i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// Forward difference (y_{i+1} - y_i) / h.
    #[inline]
    pub fn diff_fwd(&self, i: usize) -> f64 {
        (self.at(i as isize + 1) - self.at(i as isize)) / self.h
    }

    /// Backward difference (y_i - y_{i-1}) / h.
    #[inline]
    pub fn diff_bwd(&self, i: usize) -> f64 {
        (self.at(i as isize) - self.at(i as isize - 1)) / self.h
    }

    /// Central difference, the mean of forward and backward.
    #[inline]
    pub fn diff_cen(&self, i: usize) -> f64 {
        (self.at(i as isize + 1) - self.at(i as isize - 1)) / (2.0 * self.h)
    }

    /// Second difference (y_{i+1} - 2 y_i + y_{i-1}) / h^2.
    #[inline]
    pub fn diff_2nd(&self, i: usize) -> f64 {
        (self.at(i as isize + 1) - 2.0 * self.at(i as isize) + self.at(i as isize - 1))
            / (self.h * self.h)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Conservative discretization of the cubic flux derivative:
/// `Q1(y) = {y^2 y_c + y (y^2)_c + (y^3)_c} / 2` with central differences.
pub fn q1(y: &GridState) -> GridState {
    let n = y.values.len();
    let h2 = 2.0 * y.h;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let (ip, im) = (y.at(i as isize + 1), y.at(i as isize - 1));
        let yi = y.values[i];
        let d1 = (ip - im) / h2;
        let d2 = (ip * ip - im * im) / h2;
        let d3 = (ip * ip * ip - im * im * im) / h2;
        out[i] = 0.5 * (yi * yi * d1 + yi * d2 + d3);
    }
    GridState {
        values: out,
        h: y.h,
    }
}

/// Nonlinear-dispersion form: the central difference of
/// `c2 y_x y_xb + (c3/2)(2 y y_xxb + (y_x)^2 - 2 y_x y_xb + (y_xb)^2)`.
pub fn q2(y: &GridState, params: &ModelParams) -> GridState {
    let n = y.values.len();
    let g = q2_flux(y, params);
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = (ghost(&g, i as isize + 1) - ghost(&g, i as isize - 1)) / (2.0 * y.h);
    }
    GridState {
        values: out,
        h: y.h,
    }
}

fn q2_flux(y: &GridState, params: &ModelParams) -> Vec<f64> {
    let n = y.values.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        let fx = y.diff_fwd(i);
        let bx = y.diff_bwd(i);
        let xx = y.diff_2nd(i);
        g[i] = params.c2 * fx * bx
            + 0.5 * params.c3 * (2.0 * y.values[i] * xx + fx * fx - 2.0 * fx * bx + bx * bx);
    }
    g
}

#[inline]
fn ghost(v: &[f64], i: isize) -> f64 {
    if i < 0 || i as usize >= v.len() {
        0.0
    } else {
        v[i as usize]
    }
}

/// Bilinear form linearizing `Q1`: linear in `v`, and
/// `Q1(a + b) = Q1(a) + R1(a, b) + R1(b, a) + Q1(b)` holds pointwise.
pub fn r1(u: &GridState, v: &GridState) -> GridState {
    assert_eq!(u.values.len(), v.values.len());
    let n = u.values.len();
    let h2 = 2.0 * u.h;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let (up, um) = (u.at(i as isize + 1), u.at(i as isize - 1));
        let (vp, vm) = (v.at(i as isize + 1), v.at(i as isize - 1));
        let (ui, vi) = (u.values[i], v.values[i]);
        let v_c = (vp - vm) / h2;
        let uv_c = (up * vp - um * vm) / h2;
        let uuv_c = (up * up * vp - um * um * vm) / h2;
        let u_c = (up - um) / h2;
        let uu_c = (up * up - um * um) / h2;
        out[i] = 0.5 * (ui * ui * v_c + 2.0 * ui * uv_c + 3.0 * uuv_c + 2.0 * ui * vi * u_c + vi * uu_c);
    }
    GridState {
        values: out,
        h: u.h,
    }
}

/// Bilinear form linearizing `Q2`:
/// `Q2(a + b) = Q2(a) + R2(a, b) + Q2(b)` holds pointwise.
pub fn r2(u: &GridState, w: &GridState, params: &ModelParams) -> GridState {
    assert_eq!(u.values.len(), w.values.len());
    let n = u.values.len();
    let mut flux = vec![0.0; n];
    for i in 0..n {
        let ufx = u.diff_fwd(i);
        let ubx = u.diff_bwd(i);
        let uxx = u.diff_2nd(i);
        let wfx = w.diff_fwd(i);
        let wbx = w.diff_bwd(i);
        let wxx = w.diff_2nd(i);
        flux[i] = (params.c2 - params.c3) * (ufx * wbx + ubx * wfx)
            + params.c3 * (u.values[i] * wxx + ufx * wfx + ubx * wbx + uxx * w.values[i]);
    }
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = (ghost(&flux, i as isize + 1) - ghost(&flux, i as isize - 1)) / (2.0 * u.h);
    }
    GridState {
        values: out,
        h: u.h,
    }
}

/// Discrete norms over the interior nodes `i = 1..=I-1`.
#[derive(Debug, Clone, Copy)]
pub struct Norms {
    /// `||y||` with `||y||^2 = h sum y_i^2`.
    pub l2: f64,
    /// `||eps y_x||`.
    pub l2_grad_eps: f64,
    /// `||eps^2 y_xxb||`.
    pub l2_2nd_eps: f64,
}

pub fn norms(y: &GridState, epsilon: f64) -> Norms {
    let last = y.last_index();
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for i in 1..last {
        let v = y.values[i];
        let gx = epsilon * y.diff_fwd(i);
        let xx = epsilon * epsilon * y.diff_2nd(i);
        s0 += v * v;
        s1 += gx * gx;
        s2 += xx * xx;
    }
    Norms {
        l2: (y.h * s0).sqrt(),
        l2_grad_eps: (y.h * s1).sqrt(),
        l2_2nd_eps: (y.h * s2).sqrt(),
    }
}

/// Discrete `L^p` norm `(h sum_{i=1}^{I-1} |y_i|^p)^{1/p}`.
pub fn lp_norm(y: &GridState, p: f64) -> f64 {
    let last = y.last_index();
    let mut s = 0.0;
    for i in 1..last {
        s += y.values[i].abs().powf(p);
    }
    (y.h * s).powf(1.0 / p)
}

/// `h sum_{i=1}^{I-1} f_i` for a grid function.
pub fn weighted_sum(y: &GridState) -> f64 {
    let last = y.last_index();
    y.h * y.values[1..last].iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut impl Rng, intervals: usize, h: f64) -> GridState {
        let mut v: Vec<f64> = (0..=intervals).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for l in 0..3 {
            v[l] = 0.0;
            v[intervals - l] = 0.0;
        }
        GridState::from_values(v, h)
    }

    #[test]
    fn differences_on_polynomials() {
        let h = 0.1;
        let n = 32usize;
        let lin: Vec<f64> = (0..=n).map(|i| 3.0 * (i as f64) * h).collect();
        let quad: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(2)).collect();
        let ylin = GridState {
            values: lin,
            h,
        };
        let yquad = GridState {
            values: quad,
            h,
        };
        for i in 5..10 {
            assert!((ylin.diff_cen(i) - 3.0).abs() < 1e-13);
            assert!((yquad.diff_2nd(i) - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn central_is_mean_of_onesided() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = random_state(&mut rng, 64, 0.05);
        for i in 1..64 {
            let avg = 0.5 * (y.diff_fwd(i) + y.diff_bwd(i));
            assert!((y.diff_cen(i) - avg).abs() <= 1e-15 * (1.0 + avg.abs()));
        }
    }

    #[test]
    fn q1_sum_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let y = random_state(&mut rng, 128, 0.03);
            let q = q1(&y);
            let scale = y.max_abs().powi(3).max(1.0);
            assert!(weighted_sum(&q).abs() < 1e-13 * scale);
            let mut dot = 0.0;
            for i in 1..y.last_index() {
                dot += y.values()[i] * q.values()[i];
            }
            assert!((y.h() * dot).abs() < 1e-13 * y.max_abs().powi(4).max(1.0));
        }
    }

    #[test]
    fn q2_sum_and_cross_identity() {
        let params = ModelParams::mgdp_example2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let y = random_state(&mut rng, 128, 0.03);
            let q = q2(&y, &params);
            assert!(weighted_sum(&q).abs() < 1e-11);
            // h sum y Q2(y) = (c3 - 2 c2)/2 * h sum y_x y_xb y_c
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            for i in 1..y.last_index() {
                lhs += y.values()[i] * q.values()[i];
                rhs += y.diff_fwd(i) * y.diff_bwd(i) * y.diff_cen(i);
            }
            let lhs = y.h() * lhs;
            let rhs = 0.5 * (params.c3 - 2.0 * params.c2) * y.h() * rhs;
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }

    #[test]
    fn r1_decomposition_and_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_state(&mut rng, 96, 0.04);
        let b = random_state(&mut rng, 96, 0.04);
        let sum = GridState::from_values(
            a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect(),
            a.h(),
        );
        let lhs = q1(&sum);
        let qa = q1(&a);
        let qb = q1(&b);
        let rab = r1(&a, &b);
        let rba = r1(&b, &a);
        for i in 0..=sum.last_index() {
            let rhs = qa.values()[i] + rab.values()[i] + rba.values()[i] + qb.values()[i];
            assert!((lhs.values()[i] - rhs).abs() < 1e-12);
        }
        let diag = r1(&a, &a);
        for i in 0..=a.last_index() {
            assert!((diag.values()[i] - 3.0 * qa.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn r2_decomposition_and_diagonal() {
        let params = ModelParams::mgdp_example3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_state(&mut rng, 96, 0.04);
        let b = random_state(&mut rng, 96, 0.04);
        let sum = GridState::from_values(
            a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect(),
            a.h(),
        );
        let lhs = q2(&sum, &params);
        let qa = q2(&a, &params);
        let qb = q2(&b, &params);
        let rab = r2(&a, &b, &params);
        for i in 0..=sum.last_index() {
            let rhs = qa.values()[i] + rab.values()[i] + qb.values()[i];
            assert!((lhs.values()[i] - rhs).abs() < 1e-10);
        }
        let diag = r2(&a, &a, &params);
        for i in 0..=a.last_index() {
            assert!((diag.values()[i] - 2.0 * qa.values()[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn product_rule_identity() {
        // (yg)_c = y_c g + y g_c + (h^2/2) (y_x g_x)_bw
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = random_state(&mut rng, 128, 0.03);
        let g = random_state(&mut rng, 128, 0.03);
        let prod = GridState::from_values(
            y.values().iter().zip(g.values()).map(|(a, b)| a * b).collect(),
            y.h(),
        );
        let h = y.h();
        for i in 2..y.last_index() - 1 {
            let lhs = prod.diff_cen(i);
            let fxgx = |k: usize| y.diff_fwd(k) * g.diff_fwd(k);
            let corr = 0.5 * h * h * (fxgx(i) - fxgx(i - 1)) / h;
            let rhs = y.diff_cen(i) * g.values()[i] + y.values()[i] * g.diff_cen(i) + corr;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn max_norm_interpolation_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let y = random_state(&mut rng, 64, 0.08);
            let n = norms(&y, 1.0);
            let grad = {
                let mut s = 0.0;
                for i in 1..y.last_index() {
                    let d = y.diff_fwd(i);
                    s += d * d;
                }
                (y.h() * s).sqrt()
            };
            let bound = std::f64::consts::SQRT_2 * n.l2.sqrt() * grad.sqrt();
            assert!(y.max_abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn summation_by_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y = random_state(&mut rng, 128, 0.03);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 1..y.last_index() {
            lhs += y.values()[i] * y.diff_2nd(i);
            let d = y.diff_fwd(i);
            rhs += d * d;
        }
        // boundary terms vanish under the three-node zero constraint
        let d0 = y.diff_fwd(0);
        rhs += d0 * d0;
        assert!((y.h() * lhs + y.h() * rhs).abs() < 1e-12);
    }

    #[test]
    fn norms_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = random_state(&mut rng, 64, 0.05);
        let n = norms(&y, 1.0);
        assert!((lp_norm(&y, 2.0) - n.l2).abs() < 1e-14 * (1.0 + n.l2));
        let mut spike = vec![0.0; 65];
        spike[30] = 1.0;
        let s = GridState::from_values(spike, 0.05);
        assert!((norms(&s, 1.0).l2.powi(2) - 0.05).abs() < 1e-15);
    }
}
