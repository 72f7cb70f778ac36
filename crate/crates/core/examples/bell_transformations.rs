//! Turning |Ψ⁺⟩ into each Bell state with half-wave plates in the two arms.
//!
//! ```text
//! cargo run --example bell_transformations
//! ```

use bellkit::jones::{apply_plan, bell_state, express_in_basis, hwp_plan, Basis, BellLabel, Port};

fn main() {
    let source = bell_state(BellLabel::PsiPlus);
    for target in BellLabel::ALL {
        let plan = hwp_plan(target);
        let plates: Vec<String> = plan
            .iter()
            .map(|p| {
                let port = if p.port == Port::A { "a" } else { "b" };
                format!("HWP_{port} at {}°", p.theta.to_degrees())
            })
            .collect();
        let out = apply_plan(&source, &plan).unwrap();
        let overlap = out.overlap(&bell_state(target));
        println!(
            "{:<5} <- psi+ with {:<28} overlap {overlap:.12}",
            target.token(),
            if plates.is_empty() { "no plates".to_string() } else { plates.join(", ") },
        );

        // amplitudes in the diagonal basis, ordered DD, DA, AD, AA
        let da = express_in_basis(&out, Basis::DA, Basis::DA);
        let shown: Vec<String> = ["DD", "DA", "AD", "AA"]
            .iter()
            .zip(da)
            .filter(|(_, z)| z.norm() > 1e-12)
            .map(|(n, z)| format!("{:+.4}|{n}⟩", z.re))
            .collect();
        println!("      in D/A: {}", shown.join(" "));
    }
}
