"""Compare numerical response and asymptotic QFI with the published regime lines.

Prints the relative deviation at representative deep-regime points; this is
where the acceptance criteria on the asymptotic laws stand or fall.
"""
import math

from qfi_lab import DetectorConfig, TrajectoryParams, qfi_approx, qfi_asymptotic_a, response_approx, response_numeric
from qfi_lab.fisher import ApproxFormula as F
from qfi_lab.response import Regime


def response_table():
    print("response G(omega): numeric vs approximation line")
    pts = [(Regime.SMALL_A_SMALL_B, 0.05, 0.1), (Regime.SMALL_A_MID_B, 0.05, 2.0),
           (Regime.LARGE_A_SMALL_B, 50.0, 0.1), (Regime.LARGE_A_LARGE_B, 10.0, 5.0),
           (Regime.LARGE_A_LARGE_B, 50.0, 10.0), (Regime.LARGE_A_LARGE_B, 400.0, 10.0)]
    for regime, a, bbar in pts:
        for omega in (1.0, -1.0):
            num = response_numeric(omega, TrajectoryParams.from_bbar(a, bbar)).value
            app = response_approx(omega, a, bbar, regime).value
            print(f"  {regime.value:16s} a={a:6g} bbar={bbar:4g} omega={omega:+g}  "
                  f"numeric={num:.6e} approx={app:.6e} rel_dev={app / num - 1:+.3e}")


def asymptotic_table():
    print("asymptotic F_Q(a): numeric vs approximation line")
    rows = [(F.ASYMPTOTIC_SMALL_A, 1, 0.1, 0.0), (F.ASYMPTOTIC_SMALL_A, 2, 0.1, 1.0),
            (F.ASYMPTOTIC_SMALL_A, 2, 0.02, 1.0), (F.ASYMPTOTIC_LARGE_A, 1, 100.0, 0.5),
            (F.ASYMPTOTIC_LARGE_A, 1, 100.0, 0.05), (F.ASYMPTOTIC_LARGE_A, 2, 100.0, 1.0),
            (F.ASYMPTOTIC_LARGE_A, 3, 100.0, 5.0), (F.ASYMPTOTIC_LARGE_A, 3, 1000.0, 20.0)]
    for formula, line, a, bbar in rows:
        cfg = DetectorConfig.from_trajectory(TrajectoryParams.from_bbar(a, bbar), 0.0)
        num = qfi_asymptotic_a(cfg).value
        app = qfi_approx(formula, line, a=a, bbar=bbar).value
        print(f"  {formula.value:18s} line {line} a={a:6g} bbar={bbar:5g}  "
              f"numeric={num:.6e} approx={app:.6e} rel_dev={app / num - 1:+.3e}")
    print(f"  cusped small-a correction (1 + a/(2 sqrt 3))^2 at a = 0.1: {(1 + 0.1 / (2 * math.sqrt(3))) ** 2:.5f}")


if __name__ == "__main__":
    response_table()
    asymptotic_table()
