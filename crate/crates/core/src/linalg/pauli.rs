//! Single-qubit operators in the `{|0⟩, |1⟩}` basis.

use super::{Operator, C64};

fn op(entries: [[C64; 2]; 2]) -> Operator {
    Operator::from_rows(&[entries[0].to_vec(), entries[1].to_vec()]).expect("2x2")
}

const O: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn x() -> Operator {
    op([[O, ONE], [ONE, O]]).hermitian().unitary()
}

pub fn y() -> Operator {
    op([[O, -I], [I, O]]).hermitian().unitary()
}

pub fn z() -> Operator {
    op([[ONE, O], [O, -ONE]]).hermitian().unitary()
}

/// `n·σ` for a (not necessarily unit) direction `n`.
pub fn along(n: [f64; 3]) -> Operator {
    let [nx, ny, nz] = n;
    op([[C64::new(nz, 0.0), C64::new(nx, -ny)], [C64::new(nx, ny), C64::new(-nz, 0.0)]]).hermitian()
}
