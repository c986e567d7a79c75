use stabsim::circuit::Circuit;
use stabsim_oracle::enumerate_distribution;

fn dist(text: &str) -> Vec<(String, f64)> {
    let c: Circuit = text.parse().unwrap();
    enumerate_distribution(&c)
        .unwrap()
        .into_iter()
        .map(|(k, p)| (k.iter().map(|&b| if b { '1' } else { '0' }).collect(), p))
        .collect()
}

fn assert_dist(text: &str, expected: &[(&str, f64)]) {
    let got = dist(text);
    assert_eq!(got.len(), expected.len(), "{text}: {got:?}");
    for ((k, p), (ek, ep)) in got.iter().zip(expected) {
        assert_eq!(k, ek, "{text}");
        assert!((p - ep).abs() < 1e-9, "{text}: {k} {p} vs {ep}");
    }
}

#[test]
fn documented_examples() {
    assert_dist("H 0\nM 0", &[("0", 0.5), ("1", 0.5)]);
    assert_dist("M 0", &[("0", 1.0)]);
    assert_dist("H 0\nCNOT 0 1\nM 0\nM 1", &[("00", 0.5), ("11", 0.5)]);
}

#[test]
fn noise_and_reset() {
    assert_dist("X_ERROR(0.25) 0\nM 0", &[("0", 0.75), ("1", 0.25)]);
    assert_dist("Z_ERROR(0.25) 0\nM 0", &[("0", 1.0)]);
    assert_dist("DEPOLARIZE1(0.3) 0\nM 0", &[("0", 0.8), ("1", 0.2)]);
    assert_dist("DEPOLARIZE2(0.3) 0 1\nM 0 1", &[("00", 0.76), ("01", 0.08), ("10", 0.08), ("11", 0.08)]);
    assert_dist("H 0\nR 0\nM 0", &[("0", 1.0)]);
    assert_dist("H 0\nMR 0\nM 0", &[("00", 0.5), ("10", 0.5)]);
    assert_dist("H 0\nREPEAT 2 {\nM 0\n}", &[("00", 0.5), ("11", 0.5)]);
}

#[test]
fn probabilities_sum_to_one() {
    let text = "H 0 1 2\nCNOT 0 1\nDEPOLARIZE1(0.1) 0 1 2\nS 2\nH 2\nM 0 1 2\nY_ERROR(0.4) 1\nMR 1\nDETECTOR rec[-1]\nM 1";
    let total: f64 = dist(text).iter().map(|(_, p)| p).sum();
    assert!((total - 1.0).abs() < 1e-9);
}
