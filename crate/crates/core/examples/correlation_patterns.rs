//! Coincidence probabilities of the four Bell states for every pair of H, V, D, A analyzers.
//!
//! ```text
//! cargo run --example correlation_patterns
//! ```

use bellkit::jones::{bell_state, BellLabel};
use bellkit::measurement::{correlation_pattern, NamedSetting};

fn main() {
    let linear = [NamedSetting::H, NamedSetting::V, NamedSetting::D, NamedSetting::A];
    for label in BellLabel::ALL {
        let pattern = correlation_pattern(&bell_state(label));
        println!("{label}");
        print!("     ");
        for b in linear {
            print!("{:>6}", b.symbol());
        }
        println!();
        for a in linear {
            print!("  {}  ", a.symbol());
            for b in linear {
                print!("{:>6.3}", pattern.get(a, b).unwrap());
            }
            println!();
        }
        println!();
    }
}
