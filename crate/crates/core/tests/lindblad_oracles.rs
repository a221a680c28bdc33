use qnd_core::analytic::{gamma_m, pointer_state};
use qnd_core::fock::FockSpace;
use qnd_core::lindblad::{
    build_liouvillian, coherence_solution, evolve, evolve_with, CouplingMode, EvolveOptions,
};
use qnd_core::state::DensityMatrix;
use qnd_core::{Complex64, SigmaZ, SystemParams};

fn readout() -> SystemParams {
    SystemParams {
        f: 0.05,
        kappa: 0.1,
        g: 0.3,
        delta_omega: 0.3,
        ..SystemParams::default()
    }
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

fn plus_state(space: FockSpace) -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::qubit_with_vacuum(space, [Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap()
}

#[test]
fn conditional_field_tracks_pointer_states() {
    let p = readout();
    let space = FockSpace::new(12).unwrap();
    let l = build_liouvillian(&p, space, CouplingMode::SigmaZ).unwrap();
    let rec = evolve(&l, &plus_state(space), &grid(40.0, 400)).unwrap();
    assert!(rec.valid);
    let mut worst: f64 = 0.0;
    for (i, &t) in rec.t_grid.iter().enumerate() {
        for s in SigmaZ::BOTH {
            let numeric = rec.conditional_field(i, s).unwrap();
            let exact = pointer_state(&p, s).alpha(p.kappa, t);
            worst = worst.max((numeric - exact).norm());
        }
    }
    assert!(worst <= 1e-6, "max error {worst}");
}

#[test]
fn coherence_follows_closed_form_solution() {
    let p = SystemParams {
        gamma2: 0.01,
        ..readout()
    };
    let space = FockSpace::new(12).unwrap();
    let l = build_liouvillian(&p, space, CouplingMode::SigmaZ).unwrap();
    let rec = evolve(&l, &plus_state(space), &grid(40.0, 200)).unwrap();
    for (i, &t) in rec.t_grid.iter().enumerate() {
        let numeric = rec.qubit_coherence(i);
        let closed = coherence_solution(&p, t, Complex64::new(0.5, 0.0));
        assert!(
            (numeric.norm() / closed.norm() - 1.0).abs() <= 1e-4,
            "t={t}: {} vs {}",
            numeric.norm(),
            closed.norm()
        );
        // the phase agrees too, not only the modulus
        assert!((numeric - closed).norm() <= 1e-4 * closed.norm(), "t={t}");
    }
}

#[test]
fn overlap_form_holds_only_before_the_cavity_rings_up() {
    let p = readout();
    let plus = pointer_state(&p, SigmaZ::Plus);
    let minus = pointer_state(&p, SigmaZ::Minus);
    let overlap = |t: f64| {
        let d = plus.alpha(p.kappa, t) - minus.alpha(p.kappa, t);
        0.5 * (-0.5 * d.norm_sqr()).exp()
    };
    let exact = |t: f64| coherence_solution(&p, t, Complex64::new(0.5, 0.0)).norm();
    for t in [0.1, 0.5, 1.0] {
        assert!((exact(t) / overlap(t) - 1.0).abs() < 1e-5);
    }
    // once κt is of order one the overlap saturates while the coherence keeps decaying
    assert!(exact(40.0) < 0.6 * overlap(40.0));
}

#[test]
fn steady_coherence_decay_rate_is_gamma_m() {
    let p = SystemParams {
        epsilon: 0.0,
        gamma2: 0.01,
        ..readout()
    };
    let space = FockSpace::new(12).unwrap();
    let l = build_liouvillian(&p, space, CouplingMode::SigmaZ).unwrap();
    let rec = evolve(&l, &plus_state(space), &grid(300.0, 30)).unwrap();
    let c = |i: usize| rec.qubit_coherence(i).norm() * (p.gamma2 * rec.t_grid[i]).exp();
    let (a, b) = (20, 30);
    let fitted = (c(a) / c(b)).ln() / (rec.t_grid[b] - rec.t_grid[a]);
    assert!((fitted / gamma_m(&p) - 1.0).abs() < 1e-3, "{fitted} vs {}", gamma_m(&p));
}

#[test]
fn evolution_keeps_a_valid_density_matrix() {
    let cases = [
        (readout(), CouplingMode::SigmaZ),
        (
            SystemParams {
                epsilon: 1.0,
                delta: 0.4,
                gamma1: 0.02,
                gamma2: 0.01,
                ..readout()
            },
            CouplingMode::SigmaN,
        ),
    ];
    for (p, mode) in cases {
        let space = FockSpace::new(10).unwrap();
        let l = build_liouvillian(&p, space, mode).unwrap();
        let rec = evolve(&l, &plus_state(space), &grid(30.0, 15)).unwrap();
        for s in &rec.states {
            let d = s.diagnostics().unwrap();
            assert!(d.trace_error <= 1e-8);
            assert!(d.hermiticity_error <= 1e-9);
            assert!(d.min_eigenvalue >= -1e-7);
        }
    }
}

#[test]
fn purity_is_conserved_without_damping_or_drive() {
    // κ must be positive, so make it negligible over the window
    let p = SystemParams {
        kappa: 1e-300,
        f: 0.0,
        delta: 0.3,
        ..readout()
    };
    let space = FockSpace::new(6).unwrap();
    let l = build_liouvillian(&p, space, CouplingMode::SigmaN).unwrap();
    let q = qnd_core::linalg::ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
    let mut psi = vec![Complex64::new(0.0, 0.0); 6];
    psi[0] = Complex64::new(0.6, 0.0);
    psi[2] = Complex64::new(0.0, 0.8);
    let rho0 = DensityMatrix::product(&q, &qnd_core::linalg::ComplexMatrix::outer(&psi)).unwrap();
    let rec = evolve(&l, &rho0, &grid(20.0, 10)).unwrap();
    let p0 = rho0.purity();
    assert!(p0 < 0.999);
    for s in &rec.states {
        assert!((s.purity() - p0).abs() <= 1e-8);
    }
}

#[test]
fn pointer_separation_grows_until_the_first_turning_point() {
    let p = SystemParams {
        delta_omega: 0.0,
        ..readout()
    };
    let space = FockSpace::new(12).unwrap();
    let l = build_liouvillian(&p, space, CouplingMode::SigmaZ).unwrap();
    let t_turn = std::f64::consts::PI / p.g;
    let rec = evolve(&l, &plus_state(space), &grid(3.0 / p.kappa, 300)).unwrap();
    let sep: Vec<f64> = (0..rec.t_grid.len())
        .map(|i| {
            (rec.conditional_field(i, SigmaZ::Plus).unwrap()
                - rec.conditional_field(i, SigmaZ::Minus).unwrap())
            .norm()
        })
        .collect();
    for i in 1..sep.len() {
        if rec.t_grid[i] <= t_turn {
            assert!(sep[i] >= sep[i - 1] - 1e-12, "t={}", rec.t_grid[i]);
        }
    }
    // past π/g the separation oscillates before settling
    let after = rec.t_grid.iter().position(|&t| t > t_turn).unwrap();
    assert!(sep[after + 5] < sep[after - 1]);
}

#[test]
fn doubling_the_truncation_changes_nothing() {
    let p = SystemParams {
        gamma2: 0.01,
        ..readout()
    };
    let ts = grid(40.0, 20);
    let run = |n: usize| {
        let space = FockSpace::new(n).unwrap();
        let l = build_liouvillian(&p, space, CouplingMode::SigmaZ).unwrap();
        let opts = EvolveOptions {
            max_step: Some(0.002),
            ..EvolveOptions::default()
        };
        evolve_with(&l, &plus_state(space), &ts, opts).unwrap()
    };
    let small = run(12);
    let big = run(24);
    assert!(small.valid && big.valid);
    for (a, b) in small.observables.iter().zip(&big.observables) {
        assert!((a.sigma_z - b.sigma_z).abs() < 1e-8);
        assert!((a.sigma_x - b.sigma_x).abs() < 1e-8);
        assert!((a.field - b.field).norm() < 1e-8);
        assert!((a.photons - b.photons).abs() < 1e-8);
        assert!((a.coherence - b.coherence).abs() < 1e-8);
    }
}
