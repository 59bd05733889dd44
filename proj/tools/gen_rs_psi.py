#!/usr/bin/env python3
"""Emit the Taylor coefficients of the Riemann-Siegel kernel

    Psi(p) = cos(2*pi*(p^2 - p - 1/16)) / cos(2*pi*p)

about p = 1/2 as a C++ array. With z = p - 1/2 the kernel is the even
entire function -cos(2*pi*z^2 - 5*pi/8) / cos(2*pi*z), so only even powers
are emitted: kPsiEven[i] is the coefficient of z^(2i).
"""
from mpmath import mp, cos, pi, taylor

mp.dps = 60
TERMS = 82
coeffs = taylor(lambda z: -cos(2 * pi * z**2 - 5 * pi / 8) / cos(2 * pi * z), 0, TERMS)
even = [coeffs[i] for i in range(0, TERMS + 1, 2)]
print(f"inline constexpr std::array<double, {len(even)}> kPsiEven = {{")
for c in even:
    print(f"    {mp.nstr(c, 20, min_fixed=0, max_fixed=0)},")
print("};")
