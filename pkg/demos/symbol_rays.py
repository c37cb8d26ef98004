"""Walk along rays of the Radon symbol and watch the oscillation take over.

At fixed angle theta0 between x and xi, the symbol of the translated Radon
operator decays like 1/s with s = |x||xi|. The script prints |a| and the
residual after removing the two-term principal part, for three angles.

    python3 demos/symbol_rays.py
"""
import math

import numpy as np

from kinetic_hls import symbol as S

if __name__ == "__main__":
    s_values = np.geomspace(1e2, 1e4, 5)
    for frac in (0.25, 0.5, 0.75):
        th = frac * math.pi
        print(f"theta0 = {frac} pi")
        for s in s_values:
            pt = S.PhasePoint.from_invariants(s, th)
            a = S.symbol_a(pt, 0.0)
            p = S.principal_symbol(pt, 0.0)
            print(f"  s = {s:9.1f}  |a| = {abs(a):.3e}  s|a| = {s * abs(a):.3f}  |a - p| = {abs(a - p):.1e}")
