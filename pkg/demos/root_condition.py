"""
The root condition that separates usable formulas from unusable ones
====================================================================

A difference formula can only be iterated forward safely when every root of
its characteristic polynomial sits inside the closed unit disk and the roots
that touch the circle are simple.  This script prints the full root report
for each catalog formula and for one classic failure case.
"""

from fdforge import analyze, catalog

for kf in catalog():
    rep = analyze([float(v) for v in kf.char_poly])
    print(f"formula ({kf.label})  order {kf.claimed_order}  -- {kf.source_note}")
    for i, z in enumerate(rep.roots):
        flag = "on circle" if i in rep.on_circle else ""
        print(f"   root {z.real:+.6f} {z.imag:+.6f}i   |z| = {abs(z):.6f}  {flag}")
    print(f"   max deviation from 1: {rep.max_deviation:+.2e}")
    print(f"   second magnitude:     {rep.second_magnitude:.6f}")
    print(f"   convergent:           {rep.convergent}\n")

print("a hand-built counterexample with a root at 1.1:")
rep = analyze([1.0, -2.1, 1.1])
for z in rep.roots:
    print(f"   root {z.real:+.6f} {z.imag:+.6f}i   |z| = {abs(z):.6f}")
print(f"   convergent: {rep.convergent}   (the 1.1 root grows as 1.1^j)")

print("\na double root at 1 also fails, even though nothing leaves the disk:")
rep = analyze([1.0, -2.0, 1.0])
print(f"   on-circle roots: {rep.on_circle}")
print(f"   convergent: {rep.convergent}")
