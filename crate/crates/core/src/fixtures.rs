//! Shared test fixtures: the three-state-bit, two-action-bit worked example.

use crate::blif::{self, BlifModel};
use crate::solver::{self, ControllerSpec, SolvedController};

/// Cube cover of the example relation over inputs `x0 x1 x2 u0 u1`:
/// `!u0 !u1 !x0 x1 !x2 + !u0 !u1 x0 x1 x2 + u0 !u1 !x1 x2
///  + u0 u1 !x0 !x1 !x2 + u0 u1 !x0 x1 x2 + u0 u1 x0 !x2`.
pub const WORKED_EXAMPLE_BLIF: &str = "\
.model mgo
.inputs x0 x1 x2 u0 u1
.outputs K
.names x0 x1 x2 u0 u1 K
01000 1
11100 1
-0110 1
00011 1
01111 1
1-011 1
.end
";

pub fn worked_example_model() -> BlifModel {
    blif::parse_blif(WORKED_EXAMPLE_BLIF).unwrap()
}

pub fn worked_example_spec() -> ControllerSpec {
    let model = worked_example_model();
    blif::build_spec(
        &model,
        &["x0".into(), "x1".into(), "x2".into()],
        &["u0".into(), "u1".into()],
    )
    .unwrap()
}

pub fn worked_example_solved() -> (ControllerSpec, SolvedController) {
    let mut spec = worked_example_spec();
    let solved = solver::solve_functional_eq(&mut spec).unwrap();
    (spec, solved)
}

/// `f1 = !x0 !x1 + !x0 x1 x2 + x0 !x1 + x0 x1 !x2`, as an 8-row table over
/// `(x0, x1, x2)` in binary counting order.
pub fn f1_expected(x: &[bool]) -> bool {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    (!x0 && !x1) || (!x0 && x1 && x2) || (x0 && !x1) || (x0 && x1 && !x2)
}

/// `f2 = !x0 !x1 !x2 + !x0 x1 x2 + x0 !x2`.
pub fn f2_expected(x: &[bool]) -> bool {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    (!x0 && !x1 && !x2) || (!x0 && x1 && x2) || (x0 && !x2)
}

/// All eight state vectors in counting order.
pub fn all_states() -> Vec<Vec<bool>> {
    (0..8u32)
        .map(|row| (0..3).map(|i| row >> (2 - i) & 1 == 1).collect())
        .collect()
}
