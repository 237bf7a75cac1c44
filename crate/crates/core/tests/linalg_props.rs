mod common;

use beamsm_core::linalg::{
    cholesky_solve, gain_vector, hermitian_regularize, inverse_update, CMatrix,
};
use beamsm_core::Complex64;
use common::{from_na, inverse, random_cvector, random_hpd, rel_err, to_na, vec_to_na};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_one_update_matches_direct_inverse(seed in any::<u64>(), n in 1usize..=16, lambda1 in 0.1f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_hpd(&mut rng, n);
        let p = hermitian_regularize(&from_na(&inverse(&to_na(&r))));
        let x = random_cvector(&mut rng, n);
        let k = gain_vector(&p, &x, lambda1).unwrap();
        let updated = inverse_update(&p, &k, &x, lambda1).unwrap();
        let xn = vec_to_na(&x);
        let direct = inverse(&(to_na(&r) + xn.clone() * xn.adjoint() * Complex64::from(lambda1)));
        prop_assert!(rel_err(&updated, &direct) < 1e-9);
    }

    #[test]
    fn gain_times_denominator_is_px(seed in any::<u64>(), n in 1usize..=12, lambda1 in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_hpd(&mut rng, n);
        let x = random_cvector(&mut rng, n);
        let k = gain_vector(&p, &x, lambda1).unwrap();
        let px = p.mul_vec(&x).unwrap();
        let d = Complex64::from(1.0) + p.quadratic_form(&x, &x).unwrap() * lambda1;
        prop_assert!(k.scale(d).max_abs_diff(&px) < 1e-10 * px.norm_sqr().sqrt().max(1.0));
    }

    #[test]
    fn regularize_is_hermitian_and_idempotent(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Complex64> = (0..n * n).flat_map(|_| random_cvector(&mut rng, 1).into_inner()).collect();
        let m = CMatrix::from_row_major(n, n, data).unwrap();
        let h = hermitian_regularize(&m);
        prop_assert_eq!(h.hermitian_defect(), 0.0);
        prop_assert_eq!(hermitian_regularize(&h), h.clone());
        let skew = m.sub(&h).unwrap();
        prop_assert!(skew.add(&skew.adjoint()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn cholesky_matches_dense_solve(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_hpd(&mut rng, n);
        let b = random_cvector(&mut rng, n);
        let z = cholesky_solve(&r, &b).unwrap();
        let oracle = to_na(&r).lu().solve(&vec_to_na(&b)).unwrap();
        let diff = (vec_to_na(&z) - &oracle).camax();
        prop_assert!(diff < 1e-10 * oracle.camax().max(1.0));
    }

    #[test]
    fn adjoint_product_matches_explicit_adjoint(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Complex64> = random_cvector(&mut rng, rows * cols).into_inner();
        let t = CMatrix::from_row_major(rows, cols, data).unwrap();
        let x = random_cvector(&mut rng, rows);
        let fast = t.adjoint_mul_vec(&x).unwrap();
        let slow = t.adjoint().mul_vec(&x).unwrap();
        prop_assert!(fast.max_abs_diff(&slow) < 1e-14);
    }
}

#[test]
fn cholesky_rejects_indefinite() {
    let r = CMatrix::diag(&[1.0, -1.0]);
    let b = random_cvector(&mut ChaCha8Rng::seed_from_u64(3), 2);
    assert!(cholesky_solve(&r, &b).is_err());
}
