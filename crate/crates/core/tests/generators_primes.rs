mod common;

use common::{rel_close, rng};
use rand::Rng;
use szlab::generators::{generate_function, generate_set, GeneratorSpec};
use szlab::gowers::CountMethod;
use szlab::gowers::{u2, u3};
use szlab::primes::{
    chebyshev_psi, fourier_bias, is_prime, mangoldt_weights, prime_ap_average,
    prime_ap_average_with, von_mangoldt, SieveTable,
};

fn spec(s: &str) -> GeneratorSpec {
    s.parse().unwrap()
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

#[test]
fn linear_quasi_matches_fractional_parts() {
    let set = generate_set(&spec("linear_quasi:alpha=1.4142135623730951,delta=0.5"), 10).unwrap();
    let direct: Vec<u64> = (1..=10)
        .filter(|&n| frac(2f64.sqrt() * n as f64) <= 0.5)
        .collect();
    assert_eq!(set, direct);
    assert_eq!(set, vec![1, 3, 5, 6, 8, 10]);
}

#[test]
fn full_density_kinds_give_the_interval() {
    let all: Vec<u64> = (1..=50).collect();
    assert_eq!(
        generate_set(&spec("random:delta=1,seed=4"), 50).unwrap(),
        all
    );
    assert_eq!(
        generate_set(&spec("quadratic_quasi:alpha=0.7,delta=1"), 50).unwrap(),
        all
    );
}

#[test]
fn quasiperiodic_density_equidistributes() {
    for d in [0.1, 0.3, 0.5] {
        let s = generate_set(
            &spec(&format!("linear_quasi:alpha=1.4142135623730951,delta={d}")),
            10_000,
        )
        .unwrap();
        let dens = s.len() as f64 / 1e4;
        assert!((dens - d).abs() <= 0.05, "{dens} vs {d}");
    }
}

#[test]
fn random_subset_is_a_subset_and_deterministic() {
    let inner = generate_set(
        &spec("linear_quasi:alpha=1.4142135623730951,delta=0.4"),
        2000,
    )
    .unwrap();
    let sub_spec =
        spec("random_subset_of:of=linear_quasi,alpha=1.4142135623730951,delta=0.4,keep=0.5,seed=2");
    let a = generate_set(&sub_spec, 2000).unwrap();
    assert!(a.iter().all(|x| inner.contains(x)));
    assert!(a.len() * 3 > inner.len() && a.len() * 3 < 2 * inner.len());
    assert_eq!(a, generate_set(&sub_spec, 2000).unwrap());
    let r1 = generate_set(&spec("random:delta=0.3,seed=9"), 1000).unwrap();
    assert_eq!(
        r1,
        generate_set(&spec("random:delta=0.3,seed=9"), 1000).unwrap()
    );
    assert_ne!(
        r1,
        generate_set(&spec("random:delta=0.3,seed=10"), 1000).unwrap()
    );
}

#[test]
fn phases_and_skew_shift() {
    let f = generate_function(&spec("quadratic_phase:xi=0"), 32).unwrap();
    assert!(f
        .values()
        .iter()
        .all(|v| (v.re - 1.0).abs() < 1e-15 && v.im.abs() < 1e-15));
    let frozen = generate_function(&spec("skew_shift:alpha=0,x0=0,y0=0"), 32).unwrap();
    assert!(frozen.values().iter().all(|v| (v.re - 1.0).abs() < 1e-12));
    let orbit =
        generate_function(&spec("skew_shift:alpha=1.4142135623730951,x0=0,y0=0"), 4096).unwrap();
    assert!(orbit
        .values()
        .iter()
        .all(|v| (v.norm() - 1.0).abs() < 1e-12));
    assert!(u2(&orbit) < 0.5 && u3(&orbit) > 0.5);
    for n in [101usize, 211] {
        let g = generate_function(&spec("quadratic_phase:xi=3"), n).unwrap();
        assert!(rel_close(u2(&g), (n as f64).powf(-0.25), 1e-6));
        assert!((u3(&g) - 1.0).abs() < 1e-9);
    }
    let p = generate_function(&spec("polynomial_phase:coeffs=0;0;0;1"), 61).unwrap();
    let closed = ((1.0 / 61.0) * (1.0 + 60.0 / 61.0f64)).powf(0.125);
    assert!(rel_close(u3(&p), closed, 1e-9));
}

#[test]
fn invalid_specs_rejected() {
    for bad in [
        "random:delta=1.5,seed=1",
        "linear_quasi:alpha=1",
        "nosuch:x=1",
        "polynomial_phase:coeffs=",
    ] {
        assert!(
            bad.parse::<GeneratorSpec>()
                .and_then(|s| generate_set(&s, 10).map(|_| ()))
                .is_err(),
            "{bad}"
        );
    }
}

#[test]
fn von_mangoldt_examples_and_trial_division() {
    let t = SieveTable::new(200_000).unwrap();
    assert_eq!(von_mangoldt(8, &t).unwrap(), 2f64.ln());
    assert_eq!(von_mangoldt(6, &t).unwrap(), 0.0);
    assert_eq!(von_mangoldt(97, &t).unwrap(), 97f64.ln());
    let mut r = rng(1);
    for _ in 0..1000 {
        let n = r.gen_range(2..200_000u64);
        assert_eq!(von_mangoldt(n, &t).unwrap(), common::mangoldt(n), "n={n}");
        assert_eq!(is_prime(n), common::is_prime(n));
        assert_eq!(
            t.smallest_prime_factor(n).unwrap() == n,
            common::is_prime(n)
        );
    }
    assert!(von_mangoldt(200_001, &t).is_err());
}

#[test]
fn chebyshev_range_at_one_million() {
    let t = SieveTable::new(1_000_000).unwrap();
    let psi = chebyshev_psi(1_000_000, &t).unwrap() / 1e6;
    assert!((0.9..=1.1).contains(&psi), "{psi}");
}

#[test]
fn w_trick_weights_match_trial_division() {
    let m = mangoldt_weights(10, 3, 1).unwrap();
    for n in 1..=10u64 {
        assert_eq!(m.value(n).unwrap(), 0.5 * common::mangoldt(2 * n + 1));
    }
    let support: Vec<u64> = (1..=10).filter(|&n| m.value(n).unwrap() > 0.0).collect();
    assert_eq!(support, vec![1, 2, 3, 4, 5, 6, 8, 9]);
    let plain = mangoldt_weights(20, 2, 1).unwrap();
    assert_eq!(plain.modulus, 1);
    for n in 1..=20u64 {
        assert_eq!(plain.value(n).unwrap(), common::mangoldt(n + 1));
    }
    let mut r = rng(2);
    let big = mangoldt_weights(50_000, 7, 11).unwrap();
    assert_eq!((big.modulus, big.phi), (30, 8));
    for _ in 0..1000 {
        let n = r.gen_range(1..=50_000u64);
        assert_eq!(
            big.value(n).unwrap(),
            8.0 / 30.0 * common::mangoldt(30 * n + 11),
            "n={n}"
        );
    }
    assert!(mangoldt_weights(10, 7, 15).is_err());
}

#[test]
fn prime_progression_average_matches_double_loop() {
    let (n, w, b) = (300u64, 5u64, 1u64);
    let window = 3 * n;
    let weights = mangoldt_weights(window, w, b).unwrap();
    let v = weights.values();
    let (mut sum, mut count) = (0.0, 0u64);
    for a in 1..=window {
        for d in 1..=window {
            if a + 2 * d > window {
                break;
            }
            sum += v[a as usize - 1] * v[(a + d) as usize - 1] * v[(a + 2 * d) as usize - 1];
            count += 1;
        }
    }
    let naive = prime_ap_average_with(3, n, w, b, CountMethod::Naive).unwrap();
    let spectral = prime_ap_average_with(3, n, w, b, CountMethod::Spectral).unwrap();
    assert_eq!(naive.progression_count, count);
    assert!(rel_close(naive.average, sum / count as f64, 1e-9));
    assert!(rel_close(spectral.average, naive.average, 1e-6));
    let k4 = prime_ap_average(4, 200, 5, 1).unwrap();
    assert!(k4.average.is_finite() && k4.average > 0.0);
    assert!(prime_ap_average_with(4, 10, 5, 1, CountMethod::Spectral).is_err());
}

#[test]
fn bias_report_and_random_control() {
    let weights = mangoldt_weights(20_000, 7, 1).unwrap();
    let b = fourier_bias(&weights).unwrap();
    assert_eq!(b.profile.len(), 20);
    assert!(b.profile.windows(2).all(|w| w[0].1 >= w[1].1));
    assert_eq!(b.max_nonzero_coeff, b.profile[0].1);
    let signs = common::random_signs(&mut rng(3), 20_000);
    let (max, _, _, _) = szlab::primes::centered_bias(&signs, 0.0).unwrap();
    assert!(max < 10.0 / (20_000f64).sqrt(), "{max}");
}
