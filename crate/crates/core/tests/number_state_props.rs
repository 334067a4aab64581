use gausscap::number_state::default_cutoff;
use gausscap::{
    ba_capacity, g_entropy, holevo_bound, number_state_capacity, pure_loss_transition, BaOptions,
    ChannelParams,
};

fn opts() -> BaOptions {
    BaOptions::default()
}

#[test]
fn perfect_channel_reaches_thermal_entropy() {
    for n in [0.5, 1.0, 3.0, 10.0] {
        let c = number_state_capacity(1.0, n, &opts()).unwrap();
        assert!((c.bits() - g_entropy(n).unwrap()).abs() < 1e-4, "n={n}");
    }
}

#[test]
fn monotone_and_energy_exact() {
    for (eta, n) in [(0.2, 1.0), (0.5, 3.0), (0.9, 2.0), (0.05, 3.0)] {
        let c = number_state_capacity(eta, n, &opts()).unwrap();
        for w in c.history.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-12,
                "eta={eta} n={n}: {} -> {}",
                w[0],
                w[1]
            );
        }
        assert!(
            (c.mean_photons() - n).abs() <= opts().tol,
            "eta={eta} n={n}"
        );
        let total: f64 = c.prior.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn non_decreasing_in_transmissivity() {
    for n in [0.5, 3.0] {
        let mut last = 0.0;
        for i in 1..=10 {
            let eta = i as f64 / 10.0;
            let c = number_state_capacity(eta, n, &opts()).unwrap().bits();
            assert!(c >= last - 1e-7, "n={n} eta={eta}: {c} < {last}");
            let bound = holevo_bound(&ChannelParams::loss(eta, 0.0).unwrap(), n).unwrap();
            assert!(c <= bound + 1e-6, "n={n} eta={eta}");
            last = c;
        }
    }
}

#[test]
fn doubling_cutoff_is_stable() {
    for (eta, n) in [(0.7, 3.0), (0.3, 1.0), (0.05, 3.0), (0.9, 5.0)] {
        let c = number_state_capacity(eta, n, &opts()).unwrap();
        assert!(c.cutoff() >= default_cutoff(n));
        let wide = ba_capacity(
            &pure_loss_transition(eta, 2 * c.cutoff()).unwrap(),
            n,
            &opts(),
        )
        .unwrap();
        assert!(
            (wide.bits() - c.bits()).abs() < 1e-5,
            "eta={eta} n={n} cutoff {}: {} vs {}",
            c.cutoff(),
            c.bits(),
            wide.bits()
        );
    }
}
