//! Property tests of the norm and decomposition invariants.

use std::f64::consts::PI;

use plab_core::lp::decompose;
use plab_core::norms::{
    besov_norm, embedding_ratio_from, lebesgue_norm_samples, lorentz_norm, sequence_norm, BesovParams,
    LorentzParams, Rearrangement,
};
use plab_core::paraproduct::bony_split;
use plab_core::random::band_limited;
use plab_core::{Error, Grid, PartitionOfUnity, SpectralField, VectorField};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::cube(16, 2.0 * PI).unwrap()
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..200)
}

fn exponents() -> impl Strategy<Value = (f64, f64)> {
    // 1 <= q <= p, where the Lorentz quasi-norm is a norm
    (1.0f64..6.0).prop_flat_map(|p| (Just(p), 1.0f64..=p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval_matches_sample_mean_square(seed in any::<u64>(), rho in 1.0f64..8.0) {
        let f = band_limited(&grid(), seed, rho, true);
        let direct = f.samples().iter().map(|v| v * v).sum::<f64>() / f.samples().len() as f64;
        prop_assert!((f.spectral_energy() - direct).abs() <= 1e-12 * direct.max(1e-300));
    }

    #[test]
    fn band_limited_fields_reconstruct(seed in any::<u64>()) {
        let pu = PartitionOfUnity::classical();
        let g = grid();
        let limit = pu.band_limit(g.q_max());
        let f = band_limited(&g, seed, limit, true);
        let d = decompose(&f, &pu, false).unwrap();
        prop_assert!(d.reconstruction_residual <= 1e-10, "residual {}", d.reconstruction_residual);
    }

    #[test]
    fn bony_pieces_sum_to_the_product(a in any::<u64>(), b in any::<u64>()) {
        let pu = PartitionOfUnity::classical();
        let u = band_limited(&grid(), a, 6.0, true);
        let v = band_limited(&grid(), b, 6.0, true);
        let split = bony_split(&u, &v, &pu).unwrap();
        prop_assert!(split.identity_defect(&u.dealiased_product(&v).unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn rearrangement_ignores_order(mut v in samples(), (p, q) in exponents(), shift in 0usize..200) {
        let a = Rearrangement::from_samples(&v, 0.5);
        let k = shift % v.len();
        v.rotate_left(k);
        v.reverse();
        let b = Rearrangement::from_samples(&v, 0.5);
        prop_assert_eq!(&a, &b);
        prop_assert!((a.total_measure() - 0.5 * v.len() as f64).abs() <= 1e-12 * v.len() as f64);
        let lp = LorentzParams::new(p, q).unwrap();
        prop_assert_eq!(a.lorentz_norm(lp), b.lorentz_norm(lp));
    }

    #[test]
    fn lorentz_diagonal_is_lebesgue(v in samples(), p in 1.0f64..6.0) {
        let lorentz = Rearrangement::from_samples(&v, 0.25).lorentz_norm(LorentzParams::new(p, p).unwrap());
        let lebesgue = lebesgue_norm_samples(&v, 0.25, p).unwrap();
        prop_assert!((lorentz - lebesgue).abs() <= 1e-10 * lebesgue.max(1e-300));
    }

    #[test]
    fn lorentz_is_homogeneous_and_subadditive(a in any::<u64>(), b in any::<u64>(), c in -5.0f64..5.0, (p, q) in exponents()) {
        let lp = LorentzParams::new(p, q).unwrap();
        let f = band_limited(&grid(), a, 4.0, true);
        let g = band_limited(&grid(), b, 4.0, true);
        let nf = lorentz_norm(&f, lp);
        prop_assert!((lorentz_norm(&f.scale(c), lp) - c.abs() * nf).abs() <= 1e-10 * nf);
        let sum = lorentz_norm(&f.add(&g).unwrap(), lp);
        prop_assert!(sum <= (nf + lorentz_norm(&g, lp)) * (1.0 + 1e-10));
    }

    #[test]
    fn besov_is_homogeneous(seed in any::<u64>(), c in -5.0f64..5.0, s in -1.0f64..2.0) {
        let pu = PartitionOfUnity::classical();
        let f = band_limited(&grid(), seed, 6.0, true);
        let bp = BesovParams::new(s, 2.0, 1.0).unwrap();
        let nf = besov_norm(&f, bp, &pu).unwrap();
        prop_assert!((besov_norm(&f.scale(c), bp, &pu).unwrap() - c.abs() * nf).abs() <= 1e-10 * nf);
    }

    #[test]
    fn sequence_norms_nest(v in prop::collection::vec(0.0f64..3.0, 1..30), r in 1.0f64..4.0) {
        prop_assert!(sequence_norm(&v, 2.0 * r) <= sequence_norm(&v, r) * (1.0 + 1e-12));
        prop_assert!(sequence_norm(&v, f64::INFINITY) <= sequence_norm(&v, 2.0 * r) * (1.0 + 1e-12));
    }

    #[test]
    fn embedding_ratio_is_scale_invariant(a in any::<u64>(), c in 0.1f64..10.0, p in 1.0f64..2.9) {
        let pu = PartitionOfUnity::classical();
        let alpha = band_limited(&grid(), a, 4.0, true);
        let u = VectorField::from_components([
            band_limited(&grid(), a ^ 1, 4.0, false),
            band_limited(&grid(), a ^ 2, 4.0, false),
            band_limited(&grid(), a ^ 3, 4.0, false),
        ]).unwrap();
        let r0 = embedding_ratio_from(&alpha, &u, p, &pu).unwrap();
        let r1 = embedding_ratio_from(&alpha.scale(c), &u.scale(c), p, &pu).unwrap();
        prop_assert!(r0 > 0.0 && r0.is_finite());
        prop_assert!((r1 - r0).abs() <= 1e-10 * r0);
    }
}

#[test]
fn embedding_ratio_edge_cases() {
    let pu = PartitionOfUnity::classical();
    let g = grid();
    let alpha = band_limited(&g, 7, 4.0, true);
    assert_eq!(embedding_ratio_from(&alpha, &VectorField::zeros(g), 2.0, &pu).unwrap(), 0.0);
    assert!(matches!(
        embedding_ratio_from(&alpha, &VectorField::zeros(g), 3.0, &pu),
        Err(Error::InvalidExponent(_))
    ));
    let other = Grid::cube(32, 2.0 * PI).unwrap();
    assert!(matches!(
        embedding_ratio_from(&SpectralField::zeros(other), &VectorField::zeros(g), 2.0, &pu),
        Err(Error::GridMismatch)
    ));
}
