use ssq::{DerivationEngine, SsqContext};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let ctx = SsqContext::new(33, 186);
    println!("context built {:.1?}", t0.elapsed());
    match ctx.ledger.validate(&ctx.v1, &ctx.sphere) {
        Ok(()) => println!("ledger validates"),
        Err(e) => println!("LEDGER INVALID: {e}"),
    }
    // engine regression
    let mut eng = DerivationEngine::new(&ctx.v1);
    let r = eng.derive_and_store("v2", "v2");
    println!("d(v2^2): {:?}", r);
    for k in 2..=8u32 {
        let r = eng.derive_and_store("v2", &format!("v2^{k}"));
        println!("d(v2^{}): {:?}", k + 1, r);
    }
    let mut eng2 = ctx.engine();
    println!("d(g0 v2): {:?}", eng2.derive_and_store("g0", "v2"));
    println!("d(g0 v2^2): {:?}", eng2.derive_and_store("g0", "v2^2"));
    println!("-- sweeps --");
    for (stem, af) in [(143i64, 12u32), (139, 10)] {
        let t1 = Instant::now();
        match ctx.obstruction_sweep(stem, af) {
            Ok(cert) => {
                println!("sweep({stem},{af}): pass = {} in {:.1?}, branches {}", cert.pass, t1.elapsed(), cert.branches_checked);
                for c in &cert.covered {
                    println!("  AF {:2} {:28} {}", c.af, c.monomial, c.status);
                }
                for n in &cert.notes {
                    println!("  note: {n}");
                }
            }
            Err(e) => println!("sweep({stem},{af}) ERROR: {e}"),
        }
    }
    println!("total {:.1?}", t0.elapsed());
}
