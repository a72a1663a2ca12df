#![allow(dead_code)]

use hott_core::checker::Signature;
use hott_core::stdlib::{build_embedded, default_flags};

pub fn stdlib() -> Signature {
    let mut sig = Signature::new(default_flags());
    let build = build_embedded(&mut sig);
    assert!(build.passed(), "{:?}", build.missing_required);
    sig
}

pub fn factorial(n: u32) -> usize {
    (1..=n as usize).product()
}

/// All permutations of `0..n`, by exhaustive filtering of all maps.
pub fn perms(n: u32) -> Vec<Vec<u32>> {
    maps(n, n)
        .into_iter()
        .filter(|f| {
            let mut seen = vec![false; n as usize];
            f.iter().all(|&i| !std::mem::replace(&mut seen[i as usize], true))
        })
        .collect()
}

/// All maps `0..n -> 0..m` as image lists.
pub fn maps(n: u32, m: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..m).map(move |y| {
                    let mut g = f.clone();
                    g.push(y);
                    g
                })
            })
            .collect();
    }
    out
}
