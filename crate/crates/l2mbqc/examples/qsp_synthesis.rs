//! Synthesizes QSP angle sequences for Mod_{p,j} and a symmetric profile, and
//! compares the p = 5 sequence with the bundled fixture.

use l2mbqc::boolean::BooleanFunction;
use l2mbqc::qsp::{synthesize_mod_p, synthesize_symmetric, table2, verify_qsp, verify_symmetric};

fn main() -> l2mbqc::Result<()> {
    for p in [3u32, 5, 7] {
        for j in 0..p {
            let a = synthesize_mod_p(p, j)?;
            println!("Mod_{{{p},{j}}}: L = {:2}, worst failure over w <= 20: {:.1e}", a.l, verify_qsp(&a, p, j, 20));
        }
    }

    let fixture = table2().into_iter().find(|a| a.l == 9).expect("p = 5 row");
    println!("\nfixture p = 5 failure: {:.1e}", verify_qsp(&fixture, 5, 0, 20));
    println!("fixture xi: {:?}", fixture.xi);
    println!("own xi:     {:?}", synthesize_mod_p(5, 0)?.xi.iter().map(|x| (x * 1e5).round() / 1e5).collect::<Vec<_>>());

    let f = BooleanFunction::from_profile(&[false, true, true, false, true])?;
    let a = synthesize_symmetric(&f)?;
    println!("\nprofile 01101: L = {}, failure {:.1e}", a.l, verify_symmetric(&a, f.profile().unwrap()));
    println!("{}", a.to_json()?);
    Ok(())
}
