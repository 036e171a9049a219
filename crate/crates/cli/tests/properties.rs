use iiot_energy_cli::{num, Scenario};
use proptest::prelude::*;

proptest! {
    #[test]
    fn numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn seed_sweep_points_carry_their_seed(seeds in prop::collection::vec(0u32..1_000_000, 1..8)) {
        let values: Vec<String> = seeds.iter().map(u32::to_string).collect();
        let text = format!("kind = \"learning\"\n[sweep]\nparameter = \"seed\"\nvalues = [{}]\n", values.join(", "));
        let s = Scenario::from_toml_str(&text).unwrap();
        prop_assert_eq!(s.points().len(), seeds.len());
        for (p, &seed) in s.points().iter().zip(&seeds) {
            prop_assert_eq!(p.config.seed, seed as u64);
            prop_assert_eq!(&p.label, &seed.to_string());
        }
    }

    #[test]
    fn preamble_count_is_checked(k in -1000i64..1000, blank in 0usize..4) {
        let text = format!("kind = \"radio-dlt\"\n{}[radio]\nK = {k}\n", "\n".repeat(blank));
        match Scenario::from_toml_str(&text) {
            Ok(s) => {
                prop_assert!(k >= 1);
                prop_assert_eq!(s.points()[0].config.radio.k as i64, k);
            }
            Err(e) => {
                prop_assert!(k < 1);
                prop_assert_eq!(e.field_errors()[0].field.as_str(), "radio.K");
                prop_assert_eq!(e.field_errors()[0].line, Some(3 + blank));
            }
        }
    }
}
