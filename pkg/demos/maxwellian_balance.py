"""How close the discrete gain and loss terms come to balancing at a Maxwellian.

For M(v) = exp(-|v|^2) the collision operator vanishes, so the sup-norm of
Q+(M, M) - Q-(M, M), relative to Q-, measures discretisation error alone.
The script compares the two gain schemes and the effect of the sharpening
filter on a 12^3 and a 16^3 grid.

    python3 demos/maxwellian_balance.py
"""
import numpy as np

from kinetic_hls.collision import CollisionKernel, gain_term, loss_term
from kinetic_hls.grids import build_velocity_grid
from kinetic_hls.lab import GaussianMixture
from kinetic_hls.quadrature import build_hemisphere_quadrature


def residual(n, scheme, sharpen_output):
    grid = build_velocity_grid(6.0, n)
    m = GaussianMixture.single(sigma=np.sqrt(0.5)).sample(grid)
    kern = CollisionKernel(1.0)
    squad = build_hemisphere_quadrature(4, 8)
    qp = gain_term(m, m, kern, squad, scheme=scheme, sharpen_output=sharpen_output).values
    qm = loss_term(m, m, kern, squad).values
    return np.abs(qp - qm).max() / np.abs(qm).max()


if __name__ == "__main__":
    print(f"{'n':>4} {'deposit+sharpen':>16} {'deposit':>10} {'interp':>10}")
    for n in (12, 16):
        row = [residual(n, "deposit", True), residual(n, "deposit", False), residual(n, "interp", False)]
        print(f"{n:>4} " + " ".join(f"{x:>{w}.2e}" for x, w in zip(row, (16, 10, 10))))
