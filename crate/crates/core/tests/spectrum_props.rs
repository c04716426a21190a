use da3_core::anosov::{
    char_poly_eval, eigenframe, frame_for_k, matrix_for_k, sign_table, spectrum,
};
use da3_core::{Vec3, Wide};
use proptest::prelude::*;

#[test]
fn sign_table_holds_up_to_200() {
    for k in 5..=200 {
        assert!(sign_table::<Wide>(k).iter().all(|e| e.holds), "k={k}");
    }
}

#[test]
fn spectrum_is_monotone_in_k() {
    let specs: Vec<_> = (5..=200).map(|k| spectrum::<f64>(k).unwrap()).collect();
    for w in specs.windows(2) {
        assert!(w[1].lambda_s < w[0].lambda_s);
        assert!(w[1].lambda_c < w[0].lambda_c);
        assert!(w[1].lambda_u > w[0].lambda_u);
    }
}

#[test]
fn unstable_direction_tilts_toward_x_axis() {
    for k in 20..=200 {
        let (_, f) = frame_for_k::<f64>(k).unwrap();
        let angle = f.e_u.dot(Vec3::new(1.0, 0.0, 0.0)).acos();
        assert!(angle < 0.1, "k={k}: {angle}");
    }
}

#[test]
fn frame_round_trip_on_random_vectors() {
    use rand::{Rng, SeedableRng};
    let (_, f) = frame_for_k::<f64>(20).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let w = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let back = f.from_frame_coords(f.to_frame_coords(w));
        worst = worst.max((back - w).norm_inf());
    }
    assert!(worst <= 1e-12, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_are_eigenvalues(k in 5u32..400) {
        let s = spectrum::<f64>(k).unwrap();
        prop_assert!(s.roots_inside_brackets());
        prop_assert!(s.product_error() <= 1e-10);
        let a = matrix_for_k(k).unwrap();
        prop_assert_eq!(a.det(), 1);
        let f = eigenframe(&s).unwrap();
        for (v, l) in [(f.v_s, s.lambda_s), (f.v_c, s.lambda_c), (f.v_u, s.lambda_u)] {
            prop_assert!((a.mul_vec(v) - v * l).norm() <= 1e-9 * v.norm());
        }
    }

    #[test]
    fn polynomial_is_exact_on_integers(k in 5u32..1000, x in -50i64..50) {
        let p = char_poly_eval(k, x);
        let kk = k as i64;
        prop_assert_eq!(p, x * x * x - kk * x * x + (kk + 1) * x - 1);
    }
}
