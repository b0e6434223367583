"""Run the classification battery on the bundled fixture systems.

Each checker tests its hypotheses on the class invariants and returns a
verdict with a full hypothesis trace; inapplicability is a verdict, not
an error.  The fixtures cover the competitive permanent/attractive
regime, the predator-prey dissipative regime, and the chaotic regime
where permanence survives but attractivity is lost.
"""

from pathlib import Path

from qpd import check_all_theorems, load_system

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

NAMES = [
    "example1_lv",
    "example1_qp_rho05",
    "example1_qp_rho10",
    "example2_predator_prey",
    "example3_qp_rho32",
]

for name in NAMES:
    sys = load_system(FIXTURES / f"{name}.json")
    print("=" * 72)
    print(sys.name)
    for verdict in check_all_theorems(sys):
        flag = "applicable    " if verdict.applicable else "not applicable"
        print(f"  {verdict.theorem_id:>3}  {flag}  {verdict.conclusion.value}")
        for check in verdict.hypotheses:
            mark = "ok " if check.passed else "FAIL"
            print(f"        [{mark}] {check.label}")
        for note in verdict.notes:
            print(f"        note: {note}")
print("=" * 72)
print("T2+T7 on the last fixture: permanence and chaos hold simultaneously.")
