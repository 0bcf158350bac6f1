//! Benchmark fixtures shared by the criterion targets.

use taukit::{EigenList, FlowVector, Partition};

pub fn eigs(v: &[f64]) -> EigenList {
    EigenList::new(v.to_vec()).expect("distinct finite eigenvalues")
}

pub fn staircase(n: u32) -> Partition {
    Partition::new((1..=n).rev().collect()).expect("valid partition")
}

pub fn flows(order: usize) -> FlowVector {
    FlowVector::new((1..=order).map(|k| 0.3 / k as f64).collect()).expect("finite flows")
}
