//! Spot values against a table generated offline at 50 significant digits
//! (`tests/oracles/bessel_reference.py`).

mod support;

use kwc_core::bessel::{b_combo, eval_all};
use support::{rel, BESSEL_TABLE, B_1_2};

#[test]
fn spot_values_match_high_precision_table() {
    for row in BESSEL_TABLE {
        let e = eval_all(row[0]).unwrap();
        for (name, got, want) in [("I0", e.i0, row[1]), ("I1", e.i1, row[2]), ("K0", e.k0, row[3]), ("K1", e.k1, row[4])] {
            assert!(rel(got, want) <= 1e-12, "{name}({}) = {got:e}, want {want:e}", row[0]);
        }
    }
}

#[test]
fn combination_matches_table() {
    assert!(rel(b_combo(1.0, 2.0).unwrap(), B_1_2) <= 1e-12);
}
