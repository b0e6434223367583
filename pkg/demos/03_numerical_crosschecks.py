"""Cross-validate analytic verdicts with simulation.

For the attractive fixture the ensemble collapses onto the interior
fixed point and the Lyapunov estimate is negative; for the chaotic
fixture the same probes show a positive exponent, failed attractivity,
and permanence: orbits wander forever inside a bounded positive box.
"""

from pathlib import Path


from qpd import (
    empirical_attractivity,
    empirical_permanence,
    largest_lyapunov,
    load_system,
    qp_fixed_point,
    simulate,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

for name in ("example1_qp_rho05", "example3_qp_rho32"):
    sys = load_system(FIXTURES / f"{name}.json")
    print("=" * 72)
    print(sys.name)

    fp = qp_fixed_point(sys)
    print("interior fixed point:", fp)

    traj = simulate(sys, [1.0, 1.0], 2000)
    print(f"orbit from (1, 1): final state {traj.final}, "
          f"range [{traj.states.min():.4g}, {traj.states.max():.4g}]")

    perm = empirical_permanence(sys, ensemble_size=50, horizon=5000, seed=7)
    print(f"permanence probe: {'pass' if perm.passed else 'FAIL'} "
          f"(tail range [{perm.statistics['tail_min']:.4g}, "
          f"{perm.statistics['tail_max']:.4g}])")

    att = empirical_attractivity(sys, fp, ensemble_size=50, horizon=2000,
                                 tol=1e-4, seed=7)
    print(f"attractivity probe: {'pass' if att.passed else 'FAIL'} "
          f"(max final distance {att.statistics['max_final_distance']:.4g})")

    exponent = largest_lyapunov(sys, [1.0, 1.0])
    print(f"largest Lyapunov estimate: {exponent:+.4f}")

print("=" * 72)
print("permanence holds in both regimes; attractivity and the Lyapunov "
      "sign separate them.")
