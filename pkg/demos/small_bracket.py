"""A miniature monotone bracket: Picard for the gain-only problem, then the
upper/lower iteration that squeezes the full solution.

Runs on a 8^3 velocity grid up to T = 0.6 so it finishes in well under a
minute; the command-line ``solve-ks`` subcommand runs the full-size version.

    python3 demos/small_bracket.py
"""
from kinetic_hls.grids import VelocityGrid
from kinetic_hls.solver import SolveConfig, initial_data, ks_iterate

if __name__ == "__main__":
    cfg = SolveConfig(gamma=1.0, ell=4.0, T=0.6, dt=0.1, grid=VelocityGrid(4.0, 8), n_mu=2, n_phi=4)
    res = ks_iterate(initial_data(cfg), cfg)
    print(f"Picard: {res.picard.iterations} iterations, contraction factors "
          + ", ".join(f"{x:.2f}" for x in res.picard.factors[:5]))
    for st in res.states:
        print(f"  n = {st.n:2d}  gap = {st.gap:.3e}" + ("" if st.ratio is None else f"  ratio = {st.ratio:.2f}"))
    print(f"limit minimum {res.limit.values.min():.2e}")
