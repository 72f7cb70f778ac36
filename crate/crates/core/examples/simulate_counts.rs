//! Seeded Poisson coincidence counts for an imperfect source, written as a CSV data set.
//!
//! ```text
//! cargo run --example simulate_counts
//! ```

use bellkit::io::write_dataset_csv;
use bellkit::jones::{hwp_plan, BellLabel};
use bellkit::source::{basic_settings, expected_dataset, generate_dataset, SourceConfig};

fn main() {
    let cfg = SourceConfig {
        purity: 0.9618,
        pair_rate: 715.0,
        background_rate: 2.0,
        integration_time: 1.0,
        seed: 7,
        ..SourceConfig::default()
    };
    for (i, label) in BellLabel::ALL.into_iter().enumerate() {
        let cfg = SourceConfig { seed: cfg.seed + i as u64, ..cfg };
        let plan = hwp_plan(label);
        let mut records = generate_dataset(&cfg, &plan, &basic_settings()).unwrap();
        for r in &mut records {
            r.label = Some(label.token().to_string());
        }
        let means = expected_dataset(&cfg, &plan, &basic_settings()).unwrap();
        println!("# {label}: expected {:?}", means.iter().map(|m| m.round()).collect::<Vec<_>>());
        write_dataset_csv(&records, std::io::stdout()).unwrap();
        println!();
    }
}
