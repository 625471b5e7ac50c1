use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{pauli_x, pauli_z};
use super::*;
use crate::error::Error;
use crate::qlinalg::{dagger, eigvals_hermitian, matmul, op_norm, random};

fn tfim(h: f64, n: usize) -> (SpinChainModel, SpectralData) {
    let m = build_model(&ModelKind::Tfim { h }, n).unwrap();
    let s = diagonalize(&m).unwrap();
    (m, s)
}

fn full(op: &LocalOperator, model: &SpinChainModel) -> Mat<c64> {
    let all: Vec<usize> = (0..model.n_sites()).collect();
    op.embed(model.local_dims(), &all).unwrap()
}

#[test]
fn region_at_chain_end() {
    let s = region_split(10, 0, 4, 1).unwrap();
    assert_eq!(s.boundary, vec![4]);
    assert_eq!(s.interior, vec![0, 1, 2]);
    assert_eq!(s.bulk, vec![3, 4, 5]);
    assert_eq!(s.exterior, vec![6, 7, 8, 9]);
    assert_eq!(s.b_int, vec![3, 4]);
    assert_eq!(s.b_ext, vec![5]);
    assert!(s.is_partition());
}

#[test]
fn region_in_the_middle() {
    let s = region_split(10, 2, 6, 1).unwrap();
    assert_eq!(s.boundary, vec![2, 6]);
    assert_eq!(s.interior, vec![4]);
    assert_eq!(s.bulk, vec![1, 2, 3, 5, 6, 7]);
    assert_eq!(s.exterior, vec![0, 8, 9]);
    assert!(s.is_partition());
    assert_eq!(s.ball(2), vec![0, 1, 2, 3, 4, 5, 6, 7, 8]);
}

#[test]
fn wide_boundary_empties_interior() {
    let s = region_split(10, 2, 4, 3).unwrap();
    assert!(s.interior.is_empty());
    assert!(s.is_partition());
}

#[test]
fn reflection_maps_sets() {
    let n = 10;
    let a = region_split(n, 2, 5, 1).unwrap();
    let b = region_split(n, 4, 7, 1).unwrap();
    let refl = |v: &[usize]| {
        let mut r: Vec<usize> = v.iter().map(|&x| n - 1 - x).collect();
        r.sort_unstable();
        r
    };
    assert_eq!(refl(&a.interior), b.interior);
    assert_eq!(refl(&a.exterior), b.exterior);
    assert_eq!(refl(&a.bulk), b.bulk);
}

#[test]
fn bad_regions_rejected() {
    assert!(matches!(region_split(5, 3, 2, 1), Err(Error::InvalidRegion(_))));
    assert!(matches!(region_split(5, 0, 5, 1), Err(Error::InvalidRegion(_))));
    assert!(region_split(5, 0, 2, 0).is_err());
}

#[test]
fn zoo_construction() {
    let m = build_model(&ModelKind::Tfim { h: 2.0 }, 8).unwrap();
    assert_eq!(m.terms().len(), 15);
    assert!(m.terms().iter().all(|t| t.sites[t.sites.len() - 1] - t.sites[0] <= 1));
    assert_eq!(m.j(), 2.0);
    let aklt = build_model(&ModelKind::Aklt, 6).unwrap();
    assert_eq!(aklt.terms().len(), 5);
    // P_2 has eigenvalues 0 (x4) and 1 (x5)
    let ev = eigvals_hermitian(aklt.terms()[0].op.as_ref()).unwrap();
    assert!(ev[..4].iter().all(|e| e.abs() < 1e-12) && ev[4..].iter().all(|e| (e - 1.0).abs() < 1e-12));
    assert!(build_model(&ModelKind::Tfim { h: 1.0 }, 1).is_err());
}

#[test]
fn model_names_parse() {
    assert_eq!(ModelKind::parse("tfim(h=2)").unwrap(), ModelKind::Tfim { h: 2.0 });
    assert_eq!(ModelKind::parse("heisenberg").unwrap(), ModelKind::Heisenberg { coupling: 1.0 });
    assert_eq!(ModelKind::parse(" aklt ").unwrap(), ModelKind::Aklt);
    assert!(matches!(ModelKind::parse("tfim"), Err(Error::UnknownName(_))));
    assert!(matches!(ModelKind::parse("ising(h=1)"), Err(Error::UnknownName(_))));
    assert!(matches!(ModelKind::parse("tfim(h=1,g=2)"), Err(Error::UnknownName(_))));
}

#[test]
fn aklt_open_chain_is_degenerate() {
    let m = build_model(&ModelKind::Aklt, 4).unwrap();
    assert!(matches!(diagonalize(&m), Err(Error::DegenerateGroundState { .. })));
}

#[test]
fn heisenberg_bond_is_singlet() {
    let m = build_model(&ModelKind::Heisenberg { coupling: 1.0 }, 2).unwrap();
    let s = diagonalize(&m).unwrap();
    assert!((s.gap - 1.0).abs() < 1e-12);
    assert!((s.e0 + 0.75).abs() < 1e-12);
    let psi = s.ground_state.as_slice();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let overlap = psi[1] * r - psi[2] * r;
    assert!((overlap.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn heisenberg_four_sites_against_bit_construction() {
    let n = 4;
    let dim = 1 << n;
    let mut h = Mat::<c64>::zeros(dim, dim);
    for i in 0..n - 1 {
        // bit (n-1-site) holds the state of `site`, first site most significant
        let (bi, bj) = (n - 1 - i, n - 2 - i);
        for s in 0..dim {
            let same = (s >> bi & 1) == (s >> bj & 1);
            h[(s, s)] += c64::new(if same { 0.25 } else { -0.25 }, 0.0);
            if !same {
                let t = s ^ (1 << bi) ^ (1 << bj);
                h[(t, s)] += c64::new(0.5, 0.0);
            }
        }
    }
    let want = eigvals_hermitian(h.as_ref()).unwrap();
    let m = build_model(&ModelKind::Heisenberg { coupling: 1.0 }, n).unwrap();
    let got = eigvals_hermitian(m.hamiltonian().unwrap().as_ref()).unwrap();
    for (a, b) in want.iter().zip(&got) {
        assert!((a - b).abs() < 1e-12);
    }
    let s = diagonalize(&m).unwrap();
    assert!((s.e0 - want[0]).abs() < 1e-12);
}

#[test]
fn tfim_gap_shrinks_toward_criticality() {
    let (_, s2) = tfim(2.0, 8);
    let (_, s1) = tfim(1.0, 8);
    assert!(s2.gap > 0.0 && s1.gap < s2.gap);
    assert_eq!(s2.energies[0], 0.0);
}

#[test]
fn entropy_profiles() {
    let (_, strong) = tfim(50.0, 8);
    assert!(entropy_profile(&strong).unwrap().iter().all(|p| p.entropy <= 0.02));
    let (_, crit) = tfim(1.0, 8);
    let prof = entropy_profile(&crit).unwrap();
    assert_eq!(prof.len(), 7);
    for p in &prof {
        assert!((p.entropy - prof[8 - p.m - 1].entropy).abs() < 1e-8);
    }
}

#[test]
fn filter_fixes_commuting_and_kills_ground_column() {
    let (m, s) = tfim(1.5, 6);
    let h = m.hamiltonian().unwrap();
    let f = gaussian_filter(&s, h.as_ref(), 0.7).unwrap();
    assert!(op_norm((&f - &h).as_ref()).unwrap() < 1e-10);
    let mut shifted = h.clone();
    for i in 0..shifted.nrows() {
        shifted[(i, i)] -= c64::new(s.e0, 0.0);
    }
    let v = filter_on_ground(&s, shifted.as_ref(), 0.7).unwrap();
    assert!(v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() < 1e-10);
}

#[test]
fn filter_matches_time_quadrature() {
    let (_, s) = tfim(1.0, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let o = random::random_hermitian(&mut rng, 16);
    let alpha = 2.0;
    let exact = gaussian_filter(&s, o.as_ref(), alpha).unwrap();
    let quad = gaussian_average(alpha, 80, |t| {
        let u = evolution(&s.energies, s.vectors.as_ref(), t);
        matmul(matmul(u.as_ref(), o.as_ref()).as_ref(), dagger(u.as_ref()).as_ref())
    })
    .unwrap();
    assert!(op_norm((&exact - &quad).as_ref()).unwrap() < 1e-6);
    assert!(op_norm(exact.as_ref()).unwrap() <= op_norm(o.as_ref()).unwrap() + 1e-10);
}

#[test]
fn approx_projector_two_ways() {
    let (_, s) = tfim(2.0, 6);
    for alpha in [0.5, 1.0, 4.0, 20.0] {
        let e = approx_projector_error(&s, alpha).unwrap();
        assert!((e.direct - e.spectral).abs() < 1e-10);
        assert!(e.spectral <= e.bound + 1e-15);
    }
}

#[test]
fn split_sums_to_hamiltonian() {
    let (m, s) = tfim(1.0, 10);
    let split = region_split(10, 2, 6, 1).unwrap();
    let hs = hamiltonian_split(&m, &s, &split).unwrap();
    let mut sum = full(&hs.h_i, &m);
    sum += full(&hs.h_b, &m);
    sum += full(&hs.h_e, &m);
    let h = m.hamiltonian().unwrap();
    assert!(op_norm((&sum - &h).as_ref()).unwrap() < 1e-12);
    for k in 0..3 {
        assert!(hs.commutators[k] <= hs.bounds[k] + 1e-9, "{k}: {} > {}", hs.commutators[k], hs.bounds[k]);
    }
    assert!(hs.commutators[0] > 0.0);
}

#[test]
fn classical_split_commutes() {
    let m = build_model(&ModelKind::Classical { h: 0.5 }, 6).unwrap();
    let s = diagonalize(&m).unwrap();
    let split = region_split(6, 0, 2, 1).unwrap();
    let hs = hamiltonian_split(&m, &s, &split).unwrap();
    assert!(hs.commutators.iter().all(|&c| c < 1e-10));
}

#[test]
fn filtered_energy_bounds() {
    let (m, s) = tfim(2.0, 8);
    let h = m.hamiltonian().unwrap();
    let whole = filtered_energy_bound(&s, h.as_ref(), 1.0).unwrap();
    assert!(whole.lhs < 1e-10);
    let k = PaperConstants::new(s.gap, m.j()).unwrap();
    for ell in 1..=2 {
        let split = region_split(8, 0, 3, ell).unwrap();
        let hs = hamiltonian_split(&m, &s, &split).unwrap();
        for part in [&hs.h_i, &hs.h_b, &hs.h_e] {
            let probe = EnergyProbe::new(&s, full(part, &m).as_ref()).unwrap();
            for alpha in [k.alpha(ell), 1e6] {
                let b = probe.bound(alpha);
                assert!(b.lhs <= b.rhs + 1e-12, "ell={ell} alpha={alpha}: {} > {}", b.lhs, b.rhs);
            }
            let limit = probe.bound(1e12);
            assert!((limit.rhs - limit.commutator / s.gap).abs() < 1e-6 * limit.rhs.max(1.0));
        }
    }
}

#[test]
fn commuting_surrogates_are_exact() {
    let m = build_model(&ModelKind::Classical { h: 0.5 }, 6).unwrap();
    let s = diagonalize(&m).unwrap();
    let split = region_split(6, 0, 2, 1).unwrap();
    let sur = local_surrogates(&m, &s, &split, 0.3).unwrap();
    assert!(surrogate_error(&m, &s, &sur).unwrap() < 1e-10);
    assert_eq!(sur.m_i.sites, vec![0, 1, 2]);
    assert_eq!(sur.m_e.sites, vec![3, 4, 5]);
}

#[test]
fn surrogate_error_grows_as_alpha_shrinks() {
    let (m, s) = tfim(2.0, 8);
    let split = region_split(8, 0, 3, 1).unwrap();
    let errs: Vec<f64> = [10.0, 1.0, 0.1]
        .iter()
        .map(|&a| surrogate_error(&m, &s, &local_surrogates(&m, &s, &split, a).unwrap()).unwrap())
        .collect();
    assert!(errs[0] < errs[1] && errs[1] < errs[2], "{errs:?}");
    // no filtering at all reproduces H̃_V
    let sharp = local_surrogates(&m, &s, &split, 1e12).unwrap();
    assert!(surrogate_error(&m, &s, &sharp).unwrap() < 1e-6);
}

#[test]
fn surrogate_support_acts_as_identity_outside() {
    let (m, s) = tfim(1.0, 6);
    let split = region_split(6, 0, 2, 1).unwrap();
    let sur = local_surrogates(&m, &s, &split, 1.0).unwrap();
    let mi = full(&sur.m_i, &m);
    // commutes with any operator on V \ A
    for site in 3..6 {
        for p in [pauli_x(), pauli_z()] {
            let o = full(&LocalOperator { sites: vec![site], mat: p }, &m);
            let c = matmul(mi.as_ref(), o.as_ref()) - matmul(o.as_ref(), mi.as_ref());
            assert!(op_norm(c.as_ref()).unwrap() < 1e-12);
        }
    }
}

#[test]
fn trivial_model_is_reproduced() {
    let h = 1.0;
    let m = build_model(&ModelKind::Field { h }, 6).unwrap();
    let s = diagonalize(&m).unwrap();
    assert!((s.gap - 2.0 * h).abs() < 1e-12);
    for (a, b) in [(0, 2), (1, 3)] {
        let split = region_split(6, a, b, 1).unwrap();
        let opts = GsOptions { alpha: s.gap * s.gap / 80.0, cutoff: h, method: PbMethod::Exact, diagnostics: true };
        let r = gs_projector_approx(&m, &s, &split, &opts).unwrap();
        assert!(r.error <= 1e-6, "{}", r.error);
        for p in [&r.p_a.mat, &r.p_e.mat] {
            assert!(op_norm((matmul(p.as_ref(), p.as_ref()) - p).as_ref()).unwrap() < 1e-9);
        }
        assert!(r.diagnostics.unwrap().p_b_norm <= 1.0 + 1e-10);
    }
}

#[test]
fn paper_cutoff_keeps_ground_overlap() {
    let (m, s) = tfim(2.0, 6);
    let split = region_split(6, 0, 2, 1).unwrap();
    let opts = GsOptions::paper(&m, &s, &split).unwrap();
    let r = gs_projector_approx(&m, &s, &split, &opts).unwrap();
    let k = PaperConstants::new(s.gap, m.j()).unwrap();
    assert!(r.overlap_a >= 1.0 - k.overlap_deficit(1));
    assert!(r.overlap_e >= 1.0 - k.overlap_deficit(1));
    assert_eq!(r.p_b.sites.len(), 6);
}

#[test]
fn quadrature_agrees_with_closed_form() {
    let (m, s) = tfim(1.0, 6);
    let split = region_split(6, 0, 2, 1).unwrap();
    let base = GsOptions { alpha: 10.0, cutoff: 1.0, method: PbMethod::Exact, diagnostics: false };
    let exact = gs_projector_approx(&m, &s, &split, &base).unwrap();
    let quad = gs_projector_approx(&m, &s, &split, &GsOptions { method: PbMethod::Quadrature { nodes: 80 }, ..base }).unwrap();
    assert!((exact.error - quad.error).abs() < 1e-6);
    assert!(op_norm((&exact.p_b.mat - &quad.p_b.mat).as_ref()).unwrap() < 1e-6);
    let coarse = gs_projector_approx(&m, &s, &split, &GsOptions { method: PbMethod::Quadrature { nodes: 4 }, ..base });
    assert!(matches!(coarse, Err(Error::QuadratureUnconverged { .. })));
}

#[test]
fn tiny_cutoff_empties_projector() {
    let (m, s) = tfim(1.0, 6);
    let split = region_split(6, 0, 2, 1).unwrap();
    let opts = GsOptions { alpha: 1.0, cutoff: 1e-300, method: PbMethod::Exact, diagnostics: false };
    assert!(matches!(gs_projector_approx(&m, &s, &split, &opts), Err(Error::EmptyProjector(_))));
}

#[test]
fn localization_is_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dims = [2, 2, 2];
    let o = random::random_hermitian(&mut rng, 8);
    let local = localize(o.as_ref(), &dims, &[0, 1]).unwrap();
    let embedded = local.embed(&dims, &[0, 1, 2]).unwrap();
    let (mean, err) = haar_average_mc(o.as_ref(), &dims, &[2], 200, &mut rng).unwrap();
    for j in 0..8 {
        for i in 0..8 {
            let d = (mean[(i, j)] - embedded[(i, j)]).norm();
            assert!(d <= 3.0 * err[(i, j)] + 1e-12, "({i},{j}) {d} vs {}", err[(i, j)]);
        }
    }
}

#[test]
fn lr_commuting_and_time_zero() {
    let m = build_model(&ModelKind::Classical { h: 0.5 }, 6).unwrap();
    let s = diagonalize(&m).unwrap();
    let a = LocalOperator { sites: vec![0], mat: pauli_z() };
    let sweep = lr_probe(&m, &s, &a, pauli_z().as_ref(), &[1, 3, 5], &[0.0, 0.5, 2.0]).unwrap();
    assert!(sweep.rows.iter().all(|r| r.norm < 1e-10));
    let (m, s) = tfim(1.0, 6);
    let x = LocalOperator { sites: vec![0], mat: pauli_x() };
    let sweep = lr_probe(&m, &s, &x, pauli_z().as_ref(), &[2, 4], &[0.0]).unwrap();
    assert!(sweep.rows.iter().all(|r| r.norm < 1e-12));
    assert!(lr_probe(&m, &s, &x, pauli_z().as_ref(), &[0], &[0.0]).is_err());
}

#[test]
fn lr_front_moves_outward() {
    let n = 8;
    let (m, s) = tfim(1.0, n);
    let a = LocalOperator { sites: vec![0], mat: pauli_z() };
    let ys: Vec<usize> = (1..n).collect();
    let grid: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
    let sweep = lr_probe(&m, &s, &a, pauli_z().as_ref(), &ys, &grid).unwrap();
    assert!(sweep.arrivals_monotone(), "{:?}", sweep.arrivals);
    assert!(sweep.bound_holds());
    let v = sweep.velocity.unwrap();
    assert!(v > 0.0 && v <= 4.0 * m.j(), "{v}");
}
