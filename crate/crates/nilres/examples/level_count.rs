use nilres::catalog;
use nilres::witness::{GroupContext, KernelLattice};
use num_bigint::BigInt;

fn main() {
    let pres = catalog::by_name("counterexample_g").unwrap();
    let ctx = GroupContext::new(pres).unwrap();
    for p in [2u32, 3] {
        let prime = BigInt::from(p);
        let mut lat = KernelLattice::new(&ctx, &prime, 2_000_000);
        let mut budget = usize::MAX;
        let t0 = std::time::Instant::now();
        loop {
            if !lat.grow(&ctx, &mut budget).unwrap() { break; }
            let c = lat.complete_levels();
            if c >= 1 {
                print!("p={p} complete={c} sizes:");
                for m in 0..=c { print!(" {}", lat.level(m).len()); }
                println!("  t={:?}", t0.elapsed());
            }
            let need = if p == 2 { 7 } else { 5 };
            if c >= need { break; }
        }
    }
}
