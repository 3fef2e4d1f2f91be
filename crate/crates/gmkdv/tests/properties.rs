//! Property tests for the structural invariants: the summation laws hold
//! on arbitrary grid data, the banded solver solves what it is given, the
//! wave construction satisfies its own side conditions across the whole
//! admissible amplitude band, and config parsing round-trips.

use gmkdv::config::RunConfig;
use gmkdv::grid::{q1, q2, weighted_sum, GridState};
use gmkdv::params::ModelParams;
use gmkdv::penta::{solve_penta, PentaSystem};
use gmkdv::profile::{solve_wave, WaveShape};
use proptest::prelude::*;

fn dd_system(vals: &[f64], n: usize) -> PentaSystem {
    // five off-diagonal bands carved out of one value stream, diagonal
    // forced dominant
    let v = |k: usize, i: usize| vals[(k * n + i) % vals.len()];
    let mut sys = PentaSystem {
        sub2: (0..n).map(|i| v(0, i)).collect(),
        sub1: (0..n).map(|i| v(1, i)).collect(),
        diag: vec![0.0; n],
        sup1: (0..n).map(|i| v(2, i)).collect(),
        sup2: (0..n).map(|i| v(3, i)).collect(),
        rhs: (0..n).map(|i| v(4, i)).collect(),
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
        sys.diag[i] = off + 0.5 + v(5, i).abs();
    }
    sys
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn penta_solution_has_small_residual(
        vals in prop::collection::vec(-1.0f64..1.0, 18..600),
        n in 3usize..96,
    ) {
        let sys = dd_system(&vals, n);
        let x = solve_penta(&sys).unwrap();
        let ax = sys.apply(&x);
        let scale = sys.rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            prop_assert!((ax[i] - sys.rhs[i]).abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn sum_laws_hold_on_arbitrary_states(
        vals in prop::collection::vec(-2.0f64..2.0, 9..240),
        h in 0.01f64..1.0,
    ) {
        let params = ModelParams::mgdp_example2();
        let y = GridState::from_values(vals, h);
        let m = y.max_abs().max(1.0);
        let n = y.last_index() as f64;
        // h-weighted sums of the conservative forms telescope to zero
        prop_assert!(weighted_sum(&q1(&y)).abs() < 1e-12 * n * m.powi(3));
        prop_assert!(
            weighted_sum(&q2(&y, &params)).abs() < 1e-12 * n * m.powi(2) / h
        );
    }

    #[test]
    fn wave_construction_is_self_consistent(a in 0.34f64..1.89) {
        // the admissible band of the first mgDP coefficient set
        let params = ModelParams::mgdp_example2();
        let spec = solve_wave(a, 0.0, &params).unwrap();
        let ga_v = params.gamma + params.alpha.powi(2) * spec.velocity;
        prop_assert!(ga_v > 0.0);
        let WaveShape::Profile { q, p, r, g_star } = spec.shape else {
            panic!("expected a profile shape");
        };
        prop_assert!(q > 0.0);
        prop_assert!(g_star > 0.0 && g_star < 1.0);
        // q, p, beta must agree with their defining relations at V
        let q_def = params.c3.powi(2) * (spec.velocity - params.c0)
            / (params.c1 * ga_v * ga_v);
        prop_assert!((q - q_def).abs() < 1e-9 * q.max(1e-3));
        let p_def = params.c3 * a / ga_v;
        prop_assert!((p - p_def).abs() < 1e-9);
        prop_assert!((p - (1.0 - g_star.powf(r))).abs() < 1e-9);
        let beta_def = (params.c1 * ga_v).sqrt() / (params.c3 * r.sqrt());
        prop_assert!((spec.beta - beta_def).abs() < 1e-9 * beta_def);
    }

    #[test]
    fn config_text_round_trips(
        a in 0.4f64..1.8,
        x0 in 0.0f64..10.0,
        h in 0.001f64..0.1,
        t_final in 0.1f64..4.0,
    ) {
        let text = format!
            ("preset = mgdp-ex2\nmesh.h = {h}\nmesh.t_final = {t_final}\nwave.1.A = {a}\nwave.1.x0 = {x0}\n");
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.h, h);
        prop_assert_eq!(cfg.t_final, t_final);
        prop_assert_eq!(cfg.waves.len(), 1);
        prop_assert_eq!(cfg.waves[0].amplitude, a);
        prop_assert_eq!(cfg.waves[0].x0, Some(x0));
    }
}
