use alloc::vec::Vec;

use crate::dataset::Dataset;

/// The eight-object desk dataset over (A, B, R).
pub fn desk_d1() -> Dataset {
    let rows: Vec<Vec<bool>> = ["111", "111", "101", "100", "010", "011", "000", "000"]
        .iter()
        .map(|r| r.bytes().map(|b| b == b'1').collect())
        .collect();
    Dataset::from_rows(&["A", "B", "R"], &rows).unwrap()
}

pub fn rows(bits: &[&str]) -> Vec<Vec<bool>> {
    bits.iter()
        .map(|r| r.bytes().map(|b| b == b'1').collect())
        .collect()
}
