//! Two-level minimization with don't-cares.

use ltlf_mine::logicmin::{minimize_cover, verify_cover};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Seven-segment "e" segment over BCD digits; 10..15 never occur.
    let onset = [0, 2, 6, 8];
    let dcset = [10, 11, 12, 13, 14, 15];
    let cover = minimize_cover(4, &onset, &dcset)?;
    assert!(verify_cover(&cover, &onset, &dcset));
    println!("{} cubes, {} literals", cover.cubes.len(), cover.literals());
    print!("{}", cover.to_pla());
    Ok(())
}
