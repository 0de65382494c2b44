//! Branch-and-bound on `3x² − 2x` over `[0, 1]` with `K = 4`, printing the
//! search tree level by level.

use qopt::bnb::{bnb_minimize, BnbConfig};
use qopt::corpus::fig1;
use qopt::CountingOracle;

fn main() -> qopt::Result<()> {
    let mut oracle = CountingOracle::new(fig1());
    let out = bnb_minimize(&mut oracle, &BnbConfig::new(4.0, 0.01))?;

    println!(
        "{:>5} {:>8} {:>10} {:>10} {:>9}",
        "level", "corner", "L", "U", "branched"
    );
    for rec in out.stats.tree_log.iter().filter(|r| r.level <= 4) {
        println!(
            "{:>5} {:>8} {:>10.5} {:>10.5} {:>9}",
            rec.level, rec.corner[0], rec.lower, rec.upper, rec.branched
        );
    }
    println!();
    println!("f_opt = {:.6} at x = {:.6}", out.f_opt, out.x_opt[0]);
    println!(
        "nodes {}  depth {}  T_min {}  queries {} (memoised) / {} (raw)",
        out.stats.nodes_expanded,
        out.stats.max_depth,
        out.stats.t_min,
        out.stats.queries_memoised,
        out.stats.queries_raw
    );
    Ok(())
}
