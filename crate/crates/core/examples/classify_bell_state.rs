//! Naming the Bell state behind measured H/V and D/A coincidence counts.
//!
//! ```text
//! cargo run --example classify_bell_state
//! ```

use bellkit::analysis::classify_counts;
use bellkit::jones::BellLabel;

fn main() {
    // counts per second, ordered HH, VV, HV, VH, DD, AA, DA, AD
    let columns = [
        ("run 1", [13., 14., 660., 771., 798., 675., 13., 16.]),
        ("run 2", [18., 15., 763., 724., 17., 14., 653., 768.]),
        ("run 3", [698., 751., 21., 14., 680., 738., 14., 15.]),
        ("run 4", [731., 784., 18., 15., 17., 15., 825., 735.]),
        ("unentangled", [350., 360., 340., 355., 352., 349., 361., 347.]),
    ];
    for (name, counts) in columns {
        let r = classify_counts(&counts).unwrap();
        let scores: Vec<String> = BellLabel::ALL.iter().map(|l| format!("{l} {:.3}", r.score(*l))).collect();
        println!(
            "{name:<12} -> {:<5} {:<11} [{}]",
            r.label.token(),
            if r.confident { "confident" } else { "ambiguous" },
            scores.join(", ")
        );
    }
}
