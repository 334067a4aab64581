use gausscap::general::two_quadrature_capacity_at;
use gausscap::protocols::KEY_R_OPT;
use gausscap::{
    brute_force_capacity, coherent_capacity, general_capacity, optimal_encoding_split,
    optimal_gaussian_capacity, optimal_input_squeezing, squeezed_capacity,
    two_quadrature_optimum_over_s, ChannelParams, EncodingSpec, GridSpec, MeasurementSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn channel() -> impl Strategy<Value = ChannelParams> {
    prop_oneof![
        (0.01..=1.0f64, 0.0..2.0f64).prop_map(|(eta, nth)| ChannelParams::loss(eta, nth).unwrap()),
        (1.0..5.0f64, 0.0..2.0f64)
            .prop_map(|(g, nth)| ChannelParams::amplification(g, nth).unwrap()),
    ]
}

fn random_channel(rng: &mut ChaCha8Rng) -> ChannelParams {
    let nth = rng.gen_range(0.0..=2.0);
    if rng.gen_bool(0.5) {
        ChannelParams::loss(rng.gen_range(0.01..=1.0), nth).unwrap()
    } else {
        ChannelParams::amplification(rng.gen_range(1.0..5.0), nth).unwrap()
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn staged_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let ch = random_channel(&mut rng);
        let n = rng.gen_range(0.01..=20.0);
        let staged = optimal_gaussian_capacity(&ch, n).unwrap().bits;
        let brute = brute_force_capacity(&ch, n, &GridSpec::default())
            .unwrap()
            .bits;
        assert!(
            (staged - brute).abs() <= 1e-3,
            "{ch} n={n}: {staged} vs {brute}"
        );
        // the grid only samples the same family, so it cannot beat the optimum
        assert!(brute <= staged + 1e-9, "{ch} n={n}");
    }
}

proptest! {
    #[test]
    fn symmetric_heterodyne_is_coherent(ch in channel(), n in 0.0..20.0f64) {
        let enc = EncodingSpec::new(0.0, n, n).unwrap();
        let general = general_capacity(&ch, &enc, MeasurementSpec::heterodyne()).unwrap();
        let closed = coherent_capacity(&ch, n).unwrap().bits;
        prop_assert!(rel_close(general, closed, 1e-12) || (general - closed).abs() < 1e-15);
    }

    #[test]
    fn squeezed_homodyne_is_squeezed(ch in channel(), n in 0.0..20.0f64) {
        let sq = squeezed_capacity(&ch, n).unwrap();
        let r = sq.param(KEY_R_OPT).unwrap();
        let enc = EncodingSpec::with_energy(n, r, 2.0 * (n - r.sinh().powi(2))).unwrap();
        let general = general_capacity(&ch, &enc, MeasurementSpec::HomodyneX).unwrap();
        prop_assert!(rel_close(general, sq.bits, 1e-12) || (general - sq.bits).abs() < 1e-15);
    }

    #[test]
    fn two_quadrature_never_beats_max(ch in channel(), n in 0.01..20.0f64) {
        let two = two_quadrature_optimum_over_s(&ch, n).unwrap().bits;
        let best = optimal_gaussian_capacity(&ch, n).unwrap().bits;
        prop_assert!(two <= best + 1e-9, "{} > {}", two, best);
    }

    #[test]
    fn staged_split_beats_neighbours(ch in channel(), n in 0.5..20.0f64, s in 0.0..2.0f64, t in -1.0..1.0f64) {
        let r = optimal_input_squeezing(&ch, s);
        if let Ok((sx2, sp2)) = optimal_encoding_split(&ch, r, s, n) {
            let meas = MeasurementSpec::Projective(s);
            let best = general_capacity(&ch, &EncodingSpec::new(r, sx2, sp2).unwrap(), meas).unwrap();
            prop_assert!((best - two_quadrature_capacity_at(&ch, n, s)).abs() < 1e-9);
            let shift = t * sx2.min(sp2);
            let other = EncodingSpec::new(r, sx2 + shift, sp2 - shift).unwrap();
            prop_assert!(general_capacity(&ch, &other, meas).unwrap() <= best + 1e-12);
        }
    }

    #[test]
    fn input_squeezing_grows_with_receiver_squeezing(ch in channel(), s in 0.0..4.0f64, ds in 1e-3..1.0f64) {
        prop_assert!(optimal_input_squeezing(&ch, s + ds) >= optimal_input_squeezing(&ch, s) - 1e-15);
    }
}
