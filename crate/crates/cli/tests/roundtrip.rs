use std::sync::Arc;

use colorweyl::sample;
use colorweyl::statistics::{make_factor, FactorPreset, PresetKind, RootSpec};
use colorweyl::CommutationFactor;
use colorweyl_cli::parse_expression;

fn factors() -> Vec<Arc<CommutationFactor>> {
    let mut out: Vec<Arc<CommutationFactor>> = PresetKind::CORE
        .iter()
        .map(|&k| Arc::new(make_factor(&FactorPreset::new(k, *k.sizes_up_to(3).last().unwrap())).unwrap()))
        .collect();
    let om = vec![vec![0, 1, 3], vec![0, 0, 2], vec![0, 0, 0]];
    out.push(Arc::new(
        make_factor(&FactorPreset::omega_general(vec![1, 0, 0], om, RootSpec { order: 8, exp: 1 })).unwrap(),
    ));
    out
}

#[test]
fn printed_elements_reparse() {
    let mut rng = sample::rng(0);
    let fs = factors();
    for k in 0..200 {
        let c = &fs[k % fs.len()];
        let x = sample::random_homogeneous(&mut rng, c.dim(), 4).normal_form(c).unwrap();
        let text = x.to_string();
        let y = parse_expression(&text, c).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(x, y, "{text}");
    }
}
