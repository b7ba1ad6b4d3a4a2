//! Build an instance by hand, validate it, and round-trip it through the
//! on-disk JSON format.
//!
//! ```bash
//! cargo run --example validate
//! ```

use contract_menus::io::{instance_to_json, parse_instance_json};
use contract_menus::model::Instance;
use contract_menus::rational::{rat, rat_int};

fn main() {
    // Two types, two actions, two outcomes. Action a0 is free for both
    // types; the second type never reaches the second outcome, and a third
    // type has probability zero.
    let instance = Instance::new(
        vec!["casual".into(), "expert".into(), "ghost".into()],
        vec!["coast".into(), "push".into()],
        vec!["miss".into(), "sale".into()],
        vec![rat(1, 2), rat(1, 2), rat_int(0)],
        vec![
            vec![vec![rat(3, 4), rat(1, 4)], vec![rat(1, 4), rat(3, 4)]],
            vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 8), rat(7, 8)]],
            vec![vec![rat_int(1), rat_int(0)], vec![rat_int(1), rat_int(0)]],
        ],
        vec![
            vec![rat_int(0), rat(1, 4)],
            vec![rat_int(0), rat(1, 2)],
            vec![rat_int(0), rat_int(1)],
        ],
        vec![rat_int(0), rat_int(1)],
    )
    .expect("shapes are consistent");

    let report = instance.validate();
    println!("valid: {}", report.is_valid());
    println!("stripped types: {:?}", report.stripped_types);
    println!("stripped outcomes: {:?}", report.stripped_outcomes);
    let normalized = report.normalized.expect("no violations");
    println!(
        "normalized to {} types, {} actions, {} outcomes, {} bits",
        normalized.num_types(),
        normalized.num_actions(),
        normalized.num_outcomes(),
        normalized.instance_size().bits
    );

    // Bit-exact round trip through the JSON format.
    let text = serde_json::to_string_pretty(&instance_to_json(&normalized)).unwrap();
    let back = parse_instance_json(&text).unwrap();
    assert_eq!(back, normalized);
    println!("\nserialized form:\n{text}");
}
