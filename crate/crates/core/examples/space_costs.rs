//! Index-to-dataset size ratios for the reference parameters, under both
//! ways of totalling the per-scale structures.

use nks::bench::{space_report, SpaceFormula, SpaceParams};
use nks::Mode;

fn main() {
    println!("d\tmode\tN\tU\treference\tstructural");
    for d in [8.0, 16.0, 32.0, 64.0, 128.0] {
        for mode in [Mode::Exact, Mode::Approximate] {
            for n in [1e7, 1e8] {
                for u in [100.0, 1000.0] {
                    let p = SpaceParams::reference(mode, n, d, u);
                    let a = space_report(&p, SpaceFormula::Reference).ratio;
                    let b = space_report(&p, SpaceFormula::Structural).ratio;
                    println!("{d}\t{mode}\t{n:e}\t{u}\t{a:.3}\t{b:.3}");
                }
            }
        }
    }
}
