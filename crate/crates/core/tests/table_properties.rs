#[path = "support/gen.rs"]
mod gen;

use forge_core::cleaning::{clean, CleanOptions, CleaningMode};
use forge_core::table::{ingest_csv, profile, write_csv, Column, ColumnData, CsvOptions, Table};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn with_time_column(t: &Table, rng: &mut impl Rng) -> Table {
    let stamps = (0..t.n_rows())
        .map(|_| (!rng.gen_bool(0.1)).then(|| rng.gen_range(1_600_000_000..1_700_000_000i64)))
        .collect();
    let mut cols: Vec<Column> = t.columns().cloned().collect();
    cols.push(Column::new("ts", ColumnData::Datetime(stamps)).unwrap());
    Table::new(cols).unwrap().with_target(t.target()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_keeps_every_cell(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = gen::random_table(&mut rng);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&t, &path).unwrap();
        let back = ingest_csv(&path, &CsvOptions::default()).unwrap();
        prop_assert_eq!(back.n_rows(), t.n_rows());
        prop_assert_eq!(back.column_names(), t.column_names());
        for (a, b) in t.columns().zip(back.columns()) {
            for row in 0..t.n_rows() {
                match (a.data(), b.data()) {
                    (ColumnData::Numeric(x), ColumnData::Numeric(y)) => {
                        prop_assert_eq!(x[row], y[row], "column {}", a.name());
                    }
                    _ => prop_assert_eq!(a.render(row), b.render(row), "column {}", a.name()),
                }
            }
        }
    }

    #[test]
    fn profile_is_pure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = gen::random_table(&mut rng);
        prop_assert_eq!(profile(&t), profile(&t));
    }

    #[test]
    fn cleaning_is_idempotent_and_fills_features(seed in any::<u64>(), mode in 0..3u8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = gen::random_table(&mut rng);
        let mut opts = CleanOptions::new(match mode {
            0 => CleaningMode::Light,
            1 => CleaningMode::Aggressive,
            _ => CleaningMode::TimeSeries,
        });
        if mode == 2 {
            t = with_time_column(&t, &mut rng);
            opts.time_column = Some("ts".into());
        }
        let Ok((once, _)) = clean(&t, &opts) else {
            return Ok(());
        };
        for c in once.features() {
            prop_assert_eq!(c.missing_count(), 0, "feature {} still has gaps", c.name());
        }
        let (twice, _) = clean(&once, &opts).unwrap();
        prop_assert!(twice.same_values(&once));
        if let (Some(name), true) = (t.target(), mode < 2) {
            // rows keep their order, so surviving target cells form a
            // subsequence of the original present cells
            let before: Vec<String> =
                (0..t.n_rows()).filter_map(|r| t.column(name).unwrap().render(r)).collect();
            let after: Vec<String> =
                (0..once.n_rows()).filter_map(|r| once.column(name).unwrap().render(r)).collect();
            let mut it = before.iter();
            prop_assert!(after.iter().all(|v| it.any(|b| b == v)));
        }
    }
}
