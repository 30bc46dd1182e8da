#!/usr/bin/env python3
"""Offline generator for the frozen Bessel reference table in tests/support/mod.rs.

Evaluates I0, I1, K0, K1 with mpmath at 50 significant digits and prints
Rust array literals. Not used at build or test time.
"""
import mpmath as mp

mp.mp.dps = 50
XS = ["0.001", "0.01", "0.1", "0.5", "1", "1.5", "2", "2.5", "3", "5", "7.5",
      "10", "15", "20", "25", "30", "40", "50"]

print("// x, I0, I1, K0, K1")
print("pub const BESSEL_TABLE: [[f64; 5]; %d] = [" % len(XS))
for s in XS:
    x = mp.mpf(s)
    vals = [mp.besseli(0, x), mp.besseli(1, x), mp.besselk(0, x), mp.besselk(1, x)]
    print("    [%s, %s]," % (s if "." in s else s + ".0", ", ".join(repr(float(v)) for v in vals)))
print("];")
x, y = mp.mpf(1), mp.mpf(2)
b = mp.besseli(0, y) * mp.besselk(1, x) + mp.besseli(1, x) * mp.besselk(0, y)
print("pub const B_1_2: f64 = %r;" % float(b))
