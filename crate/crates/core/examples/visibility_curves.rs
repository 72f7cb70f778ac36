//! Correlation fringes for fixed port-a plates, and the visibility fitted from a sampled sweep.
//!
//! ```text
//! cargo run --example visibility_curves
//! ```

use bellkit::analysis::visibility_from_records;
use bellkit::jones::{hwp_plan, BellLabel};
use bellkit::measurement::{sweep, visibility, visibility_curve, AnalyzerSetting};
use bellkit::source::{generate_dataset, make_source_state, transform_source, SourceConfig};

fn main() {
    let cfg = SourceConfig::default();
    let rho = transform_source(&make_source_state(&cfg).unwrap(), &hwp_plan(BellLabel::PhiPlus));
    let betas = sweep(0.0, 90f64.to_radians(), 7.5f64.to_radians()).unwrap();

    println!("phi+, purity {}: P(alpha, beta)", cfg.purity);
    print!("{:>8}", "2β");
    let alphas = [0.0, 22.5, 45.0, 67.5];
    for a in alphas {
        print!("{:>10}", format!("2α={}", 2.0 * a));
    }
    println!();
    let curves: Vec<_> = alphas
        .iter()
        .map(|a| visibility_curve(&rho, f64::to_radians(*a), &betas).unwrap())
        .collect();
    for (i, beta) in betas.iter().enumerate() {
        print!("{:>8.1}", 2.0 * beta.to_degrees());
        for c in &curves {
            print!("{:>10.4}", c[i].value);
        }
        println!();
    }
    for (a, c) in alphas.iter().zip(&curves) {
        let v = visibility(&c.iter().map(|p| p.value).collect::<Vec<_>>()).unwrap();
        println!("alpha {a:>5}°: V = {v:.4}");
    }

    // a measured-style sweep: port a fixed at D, port b stepped by 5°
    let settings: Vec<_> = (0..36)
        .map(|k| (AnalyzerSetting::Hwp(22.5f64.to_radians()), AnalyzerSetting::Hwp((5.0 * k as f64).to_radians())))
        .collect();
    let records = generate_dataset(&SourceConfig { seed: 3, ..cfg }, &hwp_plan(BellLabel::PhiPlus), &settings).unwrap();
    let (v, sigma) = visibility_from_records(&records, 1000, 3).unwrap();
    println!("sampled sweep: V = {:.2} ± {:.2} %", 100.0 * v, 100.0 * sigma);
}
