//! Bundled JSON schemas for every JSON output.

pub const NAMES: [&str; 9] = ["zeta", "counts", "pencil", "trial", "weil", "torsion", "bound", "prime", "threshold"];

pub fn get(name: &str) -> Option<&'static str> {
    Some(match name {
        "zeta" => include_str!("../schemas/zeta.json"),
        "counts" => include_str!("../schemas/counts.json"),
        "pencil" => include_str!("../schemas/pencil.json"),
        "trial" => include_str!("../schemas/trial.json"),
        "weil" => include_str!("../schemas/weil.json"),
        "torsion" => include_str!("../schemas/torsion.json"),
        "bound" => include_str!("../schemas/bound.json"),
        "prime" => include_str!("../schemas/prime.json"),
        "threshold" => include_str!("../schemas/threshold.json"),
        _ => return None,
    })
}
