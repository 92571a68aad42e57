use std::collections::HashMap;

use tanglekit_core::{
    aut_size, canonicalize_tanglegram, enumerate_tanglegrams, matched_cherries,
    pair_stabilizer_size, Caps, ExactSampler,
};

fn main() {
    let caps = Caps::default();
    let n = 5u64;
    let samples = 500_000u64;
    let classes = enumerate_tanglegrams(n, &caps).unwrap();
    let index: HashMap<String, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, t)| (t.to_string(), i))
        .collect();
    let mut observed = vec![0u64; classes.len()];
    let mut s = ExactSampler::with_stream(n, 1234, 0, &caps).unwrap();
    for _ in 0..samples {
        let tg = s.sample();
        let key = canonicalize_tanglegram(&tg, &caps).unwrap().to_string();
        observed[index[&key]] += 1;
    }
    let expect = samples as f64 / classes.len() as f64;
    let mut rows: Vec<(f64, usize)> = observed
        .iter()
        .enumerate()
        .map(|(i, &o)| (o as f64 / expect, i))
        .collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    println!("expected per class: {expect:.1}");
    for &(ratio, i) in rows.iter() {
        let tg = &classes[i];
        let stab = pair_stabilizer_size(tg, &caps).unwrap();
        let k = matched_cherries(tg);
        println!(
            "ratio {ratio:.3}  stab {stab}  matched {k}  autL {}  autR {}  {}",
            aut_size(tg.left()),
            aut_size(tg.right()),
            tg
        );
    }
}
