use super::*;
use crate::channel::{replacement_channel, HeterodyneKernel, PureLossKernel, P_PLUS_EVEN};
use crate::gkp::SymplecticForm;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_block_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, levels: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

#[test]
fn codewords_have_even_photon_number() {
    for bit in [0, 1] {
        let s = build_damped_gkp(bit, 0.1, 320, 10).unwrap();
        assert!(s.parity_defect() < 1e-12, "{bit}: {}", s.parity_defect());
        assert!((s.amplitudes.norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn heavy_damping_gives_vacuum() {
    let s = build_damped_gkp(0, 3.0, 60, 5).unwrap();
    assert!(s.amplitudes[0].norm_sqr() > 0.99);
}

#[test]
fn codeword_overlap_shrinks_with_damping() {
    let ov = |beta: f64| {
        let n = default_cutoff(beta);
        let l = default_lattice_cut(n);
        build_damped_gkp(0, beta, n, l).unwrap().overlap(&build_damped_gkp(1, beta, n, l).unwrap()).norm()
    };
    assert!(ov(0.3) > 1e-3);
    assert!(ov(0.05) < 1e-6);
}

#[test]
fn small_cutoff_is_rejected() {
    let err = build_damped_gkp(0, 0.05, 80, 5).unwrap_err();
    assert!(matches!(err, Error::Cutoff { cutoff: 80, .. }));
    assert!(build_damped_gkp(2, 0.1, 80, 5).is_err());
    assert!(build_damped_gkp(0, 0.0, 80, 5).is_err());
}

#[test]
fn displacement_basics() {
    let n = 120;
    let id = displacement_matrix(DisplacementLabel::new(0.0, 0.0), n).unwrap();
    assert_eq!(id.matrix, DMatrix::identity(n, n));
    let x = DisplacementLabel::new(1.1, -0.7);
    let d = displacement_matrix(x, n).unwrap().matrix;
    let dinv = displacement_matrix(DisplacementLabel::new(-1.1, 0.7), n).unwrap().matrix;
    let protected = 40;
    assert!(max_block_diff(&(&d * &dinv), &DMatrix::identity(n, n), protected) < 1e-10);
    assert!(max_block_diff(&(d.adjoint() * &d), &DMatrix::identity(n, n), protected) < 1e-10);
    // D(α)|0⟩ is a coherent state
    let alpha = x.alpha();
    for k in 0..10 {
        let lf = ln_factorials(k + 1)[k];
        let want = alpha.powi(k as i32) * (-0.5 * alpha.norm_sqr() - 0.5 * lf).exp();
        assert!((d[(k, 0)] - want).norm() < 1e-14);
    }
    assert!(displacement_matrix(DisplacementLabel::new(8.0, 0.0), 60).is_err());
}

#[test]
fn displacement_composition_phase() {
    let n = 160;
    let x = DisplacementLabel::new(0.8, -0.3);
    let y = DisplacementLabel::new(-0.4, 1.2);
    let dx = displacement_matrix(x, n).unwrap().matrix;
    let dy = displacement_matrix(y, n).unwrap().matrix;
    let (sum, theta) = x.compose(y);
    assert!((theta + SymplecticForm::real(x.x, y.x)).abs() < 1e-15);
    let dsum = displacement_matrix(sum, n).unwrap().matrix * Complex64::from_polar(1.0, theta);
    assert!(max_block_diff(&(dx * dy), &dsum, 50) < 1e-9);
}

#[test]
fn displacement_is_accurate_for_large_amplitudes() {
    // a lattice displacement used by the subspace-Pauli sums
    let n = 400;
    let x = DisplacementLabel::new(7.0 * (PI / 2.0).sqrt(), -5.0 * (PI / 2.0).sqrt());
    let d = displacement_matrix(x, n).unwrap().matrix;
    assert!(max_block_diff(&(d.adjoint() * &d), &DMatrix::identity(n, n), 30) < 1e-10);
}

#[test]
fn comb_and_displacement_oracles_agree() {
    let p = ChannelParams::new(0.8, 0.2).unwrap();
    let m = Syndrome::new(0.3, -0.5).unwrap();
    for herald in [HeraldOutcome::Heterodyne(c(0.4, 0.1)), HeraldOutcome::PhotonCount(2)] {
        let comb = OracleKernel::new(&herald, &p, None).unwrap().bloch_vector(&m);
        for a in PauliIndex::ALL {
            let d = oracle_bloch_displacement(a, &herald, &m, &p, 340, 3).unwrap();
            assert!((d - comb.get(a)).norm() < 1e-10 * comb.norm_sqr().sqrt(), "{a}");
        }
    }
}

#[test]
fn truncated_projector_matches_comb_overlaps() {
    // (1/√π) Σ_n D(n√(2π)) acts as Σ_c |c̄⟩⟨c̄| on damped vectors
    let n = 420;
    let terms = subspace_pauli_terms(PauliIndex::I, 4);
    let mats: Vec<_> = terms
        .iter()
        .map(|t| (t.weight * t.phase as f64, displacement_matrix(t.label, n).unwrap().matrix))
        .collect();
    let l = default_lattice_cut(n);
    let g = [
        comb_functional(0, &Syndrome::zero(), n, l),
        comb_functional(1, &Syndrome::zero(), n, l),
    ];
    let zero = build_damped_gkp(0, 0.8, n, l).unwrap().amplitudes;
    let one = build_damped_gkp(1, 0.8, n, l).unwrap().amplitudes;
    let mut vectors = vec![zero.clone(), one.clone(), (&zero + &one * c(0.3, -0.8)).normalize()];
    vectors.push(fock_basis_state(0, n).unwrap());
    vectors.push(fock_basis_state(2, n).unwrap());
    for v in &vectors {
        let mut proj = c(0.0, 0.0);
        for (w, d) in &mats {
            proj += v.dotc(&(d * v)) * *w;
        }
        let combs: f64 = g.iter().map(|gc| bilinear(gc, v).norm_sqr()).sum();
        assert!((proj - combs).norm() < 1e-6 * combs, "{proj} vs {combs}");
    }
}

#[test]
fn lossless_heterodyne_matches_damping_only_formula() {
    let p = ChannelParams::new(0.1, 0.0).unwrap();
    let het = HeterodyneKernel::new(&p).unwrap();
    let oracle = OracleKernel::new(&HeraldOutcome::Heterodyne(c(0.0, 0.0)), &p, None).unwrap();
    for m in Syndrome::grid(3) {
        let o = oracle.bloch_vector(&m);
        let a = het.heterodyne_vector(c(0.0, 0.0), &m).unwrap();
        for i in 0..4 {
            assert!((o.r[i].norm() - a.r[i].norm()).abs() < 1e-10, "{m:?} {i}");
        }
    }
}

#[test]
fn photon_herald_is_suppressed_linearly_in_loss() {
    let ratio = |g: f64| {
        let p = ChannelParams::new(0.1, g).unwrap();
        let m = Syndrome::new(0.2, 0.1).unwrap();
        let r0 = OracleKernel::new(&HeraldOutcome::PhotonCount(0), &p, None).unwrap().bloch_vector(&m);
        let r1 = OracleKernel::new(&HeraldOutcome::PhotonCount(1), &p, None).unwrap().bloch_vector(&m);
        r1.norm_sqr() / r0.norm_sqr()
    };
    let (small, large) = (ratio(1e-3), ratio(1e-2));
    assert!(small < 0.05);
    // t² = γ/(1-γ) sets the scale; the c^{2n̂} envelope shifts it slightly
    assert!((8.0..12.0).contains(&(large / small)), "{}", large / small);
}

#[test]
fn photon_heralds_preserve_parity() {
    let p = ChannelParams::new(0.1, 0.3).unwrap();
    for j in 0..4 {
        let k = OracleKernel::new(&HeraldOutcome::PhotonCount(j), &p, None).unwrap();
        let defect = k.parity_defect();
        if j % 2 == 0 {
            assert!(defect < 1e-10, "{j}: {defect}");
        } else {
            assert!(defect > 1.0 - 1e-10, "{j}: {defect}");
        }
    }
}

#[test]
fn unheralded_loss_needs_the_channel_path() {
    let p = ChannelParams::new(0.1, 0.3).unwrap();
    assert!(OracleKernel::new(&HeraldOutcome::None, &p, None).is_err());
    let lossless = ChannelParams::new(0.1, 0.0).unwrap();
    let a = OracleKernel::new(&HeraldOutcome::None, &lossless, None).unwrap();
    let b = OracleKernel::new(&HeraldOutcome::PhotonCount(0), &lossless, None).unwrap();
    let m = Syndrome::new(0.1, 0.4).unwrap();
    assert_eq!(a.bloch_vector(&m), b.bloch_vector(&m));
}

#[test]
fn pure_loss_oracle_matches_four_dimensional_theta() {
    let p = ChannelParams::new(0.1, 0.3).unwrap();
    let oracle = OraclePureLoss::new(&p, None).unwrap();
    let kernel = PureLossKernel::new(&p).unwrap();
    for m in [Syndrome::zero(), Syndrome::new(0.2, 0.4).unwrap()] {
        let o = oracle.chi(&m);
        let a = kernel.matrix(&m).unwrap();
        let scale = a.chi[(0, 0)].re;
        assert!((o.chi - a.chi).iter().all(|z| z.norm() < 1e-9 * scale));
    }
}

#[test]
fn error_corrected_fock_states() {
    let q = QuadratureSpec::new(32);
    let vac = oracle_ec_mixture(&fock_basis_state(0, 120).unwrap(), q).unwrap();
    assert!((vac.p_plus - 0.910_233_014_843).abs() < 1e-9);
    assert!((vac.p_plus + vac.p_minus - 1.0).abs() < 1e-12);
    assert!(vac.coherence < 1e-12);
    assert!(vac.warning.is_none());
    let one = oracle_single_photon_ec_pplus(q, 120).unwrap();
    assert!((one - 0.269_051_456_913).abs() < 1e-9);
}

#[test]
fn complete_loss_limit_of_pure_loss() {
    let p = ChannelParams::new(0.1, 0.999).unwrap();
    let avg = oracle_averaged_pure_loss(&p, QuadratureSpec::new(16), None).unwrap();
    let target = replacement_channel(P_PLUS_EVEN).unwrap();
    let worst = (avg.normalized.chi - target.chi).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(worst < 2e-3, "{worst}");
}
