//! Vote weights under the three rules, and how the rule changes a
//! prediction on the same neighborhood.
//!
//!     cargo run --example voting_rules

use hsp_core::classify::{tally_and_predict, vote_weights};
use hsp_core::{Neighbor, VoteRule};

fn main() -> hsp_core::Result<()> {
    let distances = [0.5, 1.0, 1.5, 3.0, 4.0];
    for rule in VoteRule::ALL {
        let w = vote_weights(&distances, rule)?;
        println!("{:>8}: {w:?}", rule.name());
    }

    // One close point of class 1 against four farther points of class 0.
    let labels = [1, 0, 0, 0, 0];
    let neighbors: Vec<Neighbor> = [0.2, 2.0, 2.1, 2.2, 2.5]
        .iter()
        .enumerate()
        .map(|(id, &dist)| Neighbor { id, dist })
        .collect();
    for rule in VoteRule::ALL {
        let p = tally_and_predict(&neighbors, &labels, rule)?;
        println!("{:>8} -> class {} (votes {:?})", rule.name(), p.label, p.votes);
    }
    Ok(())
}
