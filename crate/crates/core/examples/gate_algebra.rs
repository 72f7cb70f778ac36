//! Half-wave plates as Pauli gates.
//!
//! ```text
//! cargo run --example gate_algebra
//! ```

use std::f64::consts::FRAC_PI_4;

use bellkit::jones::{hwp, pauli, retardance, JonesVector, OneQubitOperator, Pauli, Retarder};
use bellkit::C64;

fn show(name: &str, op: &OneQubitOperator) {
    let m = op.matrix();
    println!("{name}:");
    for r in 0..2 {
        println!("  [{:>5} {:>5}]", fmt(m[(r, 0)]), fmt(m[(r, 1)]));
    }
}

fn fmt(z: C64) -> String {
    match (z.re.abs() < 1e-12, z.im.abs() < 1e-12) {
        (true, true) => "0".into(),
        (false, true) => format!("{}", z.re),
        (true, false) => format!("{}i", z.im),
        _ => format!("{}{:+}i", z.re, z.im),
    }
}

fn main() {
    // a quartz plate thick enough for half a wave at 810 nm
    let delta = retardance(45.0, 0.009, 0.810).unwrap();
    println!("retardance of 45 µm quartz at 810 nm: {:.6} rad (π = {:.6})\n", delta, std::f64::consts::PI);

    show("HWP(0°)", &hwp(0.0));
    show("HWP(45°)", &hwp(FRAC_PI_4));
    show("HWP(0°)·HWP(45°)", &(hwp(0.0) * hwp(FRAC_PI_4)));
    show("iY", &pauli(Pauli::Y).scale(C64::new(0.0, 1.0)));
    show("QWP(0°)", &Retarder::quarter_wave(0.0).matrix());

    println!();
    let kets = [
        ("H", JonesVector::horizontal()),
        ("V", JonesVector::vertical()),
        ("D", JonesVector::diagonal()),
        ("A", JonesVector::antidiagonal()),
    ];
    for (gate, op) in [("Z", hwp(0.0)), ("X", hwp(FRAC_PI_4))] {
        for (name, ket) in &kets {
            let out = op.apply(ket).unwrap();
            let (label, sign) = kets
                .iter()
                .find_map(|(n, k)| {
                    let ip = k.inner(&out);
                    ((ip.norm() - 1.0).abs() < 1e-12).then_some((*n, ip.re))
                })
                .unwrap();
            println!("{gate}|{name}⟩ = {}|{label}⟩", if sign < 0.0 { "-" } else { " " });
        }
    }
}
