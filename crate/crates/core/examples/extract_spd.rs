//! Builds the sequential pitch distribution of a melody and inspects a few
//! cells of the tensor.
//!
//! cargo run --example extract_spd -- [relaxation]

use spd_raga::ingest::BinSequence;
use spd_raga::spd::{arc_set, build_spd, enumerate_pairs, CellKey, Direction, Relaxation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r: u8 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let r = Relaxation::new(r)?;

    // Sa Re Ga Pa Ga Re Sa with a little intonation drift, held a few frames each.
    let phrase = [0, 1, 20, 21, 40, 38, 70, 70, 41, 40, 19, 20, 0, 119];
    let seq = BinSequence::voiced(phrase.iter().flat_map(|&b| [b; 3]).cycle().take(600));
    let spd = build_spd(&seq, r);

    let fallback = spd.fallback.iter().filter(|&&f| f).count();
    println!("r = {}: {} of 288 slices fall back to the pitch distribution", r.get(), fallback);

    for (start, end, dir) in [(0, 40, Direction::Positive), (70, 0, Direction::Negative), (40, 70, Direction::Negative)] {
        let key = CellKey::new(start, end, dir)?;
        let arc = arc_set(key, r);
        let pairs = enumerate_pairs(&seq, key, r).len();
        let top: Vec<String> = {
            let mut v: Vec<(usize, f64)> = spd.slice(key).iter().copied().enumerate().filter(|x| x.1 > 0.0).collect();
            v.sort_by(|a, b| b.1.total_cmp(&a.1));
            v.iter().take(5).map(|(b, p)| format!("{b}:{p:.3}")).collect()
        };
        println!(
            "({start:>3},{end:>3},{dir:?}) arc {}..{} ({} bins), {pairs} spans, fallback {}, top bins {}",
            arc[0],
            arc[arc.len() - 1],
            arc.len(),
            spd.is_fallback(key),
            top.join(" ")
        );
    }
    Ok(())
}
