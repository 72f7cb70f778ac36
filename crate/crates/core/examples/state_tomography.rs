//! Maximum-likelihood tomography of a simulated two-photon state.
//!
//! ```text
//! cargo run --example state_tomography
//! ```

use bellkit::jones::{bell_state, hwp_plan, BellLabel};
use bellkit::source::{generate_dataset, SourceConfig};
use bellkit::tomography::{reconstruct, tomo_settings, Method, MleConfig, TomographyData};

fn main() {
    let label = BellLabel::PhiMinus;
    let cfg = SourceConfig { seed: 42, ..SourceConfig::default() };
    let records = generate_dataset(&cfg, &hwp_plan(label), &tomo_settings()).unwrap();
    let data = TomographyData::from_records(&records).unwrap();
    let target = bell_state(label);

    for method in [Method::Linear, Method::Mle] {
        let r = reconstruct(&data, method, &target, &MleConfig::default()).unwrap();
        println!(
            "{method:?}: fidelity {:.4}, purity {:.4}, {} iterations, log L {:.3}",
            r.fidelity, r.purity, r.iterations, r.log_likelihood
        );
        if method == Method::Mle {
            let labels = ["HH", "HV", "VH", "VV"];
            println!("Re ρ");
            for (i, row) in labels.iter().enumerate() {
                let cells: Vec<String> = (0..4).map(|j| format!("{:+.3}", r.rho.get(i, j).re)).collect();
                println!("  {row} {}", cells.join(" "));
            }
            println!("max |Im ρ| = {:.3}", (0..16).map(|k| r.rho.get(k / 4, k % 4).im.abs()).fold(0.0, f64::max));
        }
    }
}
