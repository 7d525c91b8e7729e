use proptest::prelude::*;
use serde_json::json;
use tone::profile_csv::{read_profile, write_profile};
use tone_core::growth::GrowthProfile;

fn write(p: &GrowthProfile) -> String {
    let mut buf = Vec::new();
    write_profile(p, &json!({"geometry": "synthetic"}), &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_and_quotient_round_trip_exactly(
        kappa in prop_oneof![Just(0.0), -4.0..-0.01f64],
        dim in 2usize..5,
        s_max in 0.5..3000.0f64,
        bins in 16usize..200,
        amp in 0.0..1.0f64,
    ) {
        let p = GrowthProfile::synthetic(kappa, dim, s_max, bins, |s| 1.0 + amp * s / (1.0 + s)).unwrap();
        let text = write(&p);
        let back = read_profile(text.as_bytes()).unwrap();
        let q = &back.profile;
        prop_assert_eq!(&q.radii, &p.radii);
        prop_assert_eq!(&q.q_values, &p.q_values);
        prop_assert_eq!(q.kappa, p.kappa);
        prop_assert_eq!(q.dim, p.dim);
        for (a, b) in q.log_cum_volume.iter().zip(&p.log_cum_volume).skip(1) {
            prop_assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0), "{} vs {}", a, b);
        }
        for (a, b) in q.log_density.iter().zip(&p.log_density) {
            prop_assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0), "{} vs {}", a, b);
        }
        let cfg = back.config.clone().unwrap();
        prop_assert_eq!(cfg["geometry"].as_str(), Some("synthetic"));
        prop_assert_eq!(back.version.as_deref(), Some(tone::VERSION));
    }
}

#[test]
fn rewriting_a_read_profile_reproduces_the_text() {
    let p = GrowthProfile::synthetic(-1.0, 2, 40.0, 80, |s| 2.0 - (-s).exp()).unwrap();
    let text = write(&p);
    let again = write(&read_profile(text.as_bytes()).unwrap().profile);
    assert_eq!(text, again);
}

#[test]
fn huge_volumes_survive() {
    let p = GrowthProfile::synthetic(-1.0, 3, 3000.0, 100, |_| 1.0).unwrap();
    let text = write(&p);
    assert!(text.lines().last().unwrap().contains("e"));
    let back = read_profile(text.as_bytes()).unwrap().profile;
    let (a, b) = (back.log_cum_volume[100], p.log_cum_volume[100]);
    assert!((a - b).abs() < 1e-12 * b, "{a} vs {b}");
    assert!(back.cum_volume(100).is_infinite());
}
