#!/usr/bin/env python3
"""Independent recomputation of numeric constants frozen into the test suite.

Each entry integrates or evaluates the defining formula with mpmath at high
precision and compares against the literal used by the C++ tests. Exits
nonzero if any frozen literal is off by more than its stated tolerance.
"""

import sys

import mpmath as mp

mp.mp.dps = 40

FAILURES = []


def check(label, computed, frozen, tol=1e-15):
    rel = abs(mp.mpf(computed) - mp.mpf(frozen)) / max(1, abs(mp.mpf(frozen)))
    status = "ok" if rel <= tol else "MISMATCH"
    if status != "ok":
        FAILURES.append(label)
    print(f"{status:8s} {label:42s} computed={mp.nstr(computed, 20):>24s} "
          f"frozen={frozen!r} rel={mp.nstr(rel, 3)}")


# Antiderivatives of catalog g's, integrated numerically from scratch.
check("loglin g(1) = 2 ln 2 - 1",
      (1 + 1) * mp.log(2) - 1, 0.3862943611198906)
check("loglin G(1) = int_0^1 ((1+t)ln(1+t) - t)",
      mp.quad(lambda t: (1 + t) * mp.log(1 + t) - t, [0, 1]),
      0.13629436111989062)
check("logsum(1,1) G(1) = int_0^1 (ln(1+t) + t)",
      mp.quad(lambda t: mp.log(1 + t) + t, [0, 1]), 0.8862943611198906)
check("tlog(1,1,2,2) G(2) = int_0^2 t ln(t+2)/ln 2",
      mp.quad(lambda t: t * mp.log(t + 2) / mp.log(2), [0, 2]),
      3.442695040888963, 1e-15)
check("tlog closed form 2 + 1/ln 2",
      2 + 1 / mp.log(2), 3.442695040888963)
check("piecewise(2,1,1,1,2,1) G(2) = int 2t + int (t^2+1)",
      mp.quad(lambda t: 2 * t, [0, 1]) + mp.quad(lambda t: t * t + 1, [1, 2]),
      13.0 / 3.0)
check("plap(2) conjugate G~(4) = int_0^4 s/2",
      mp.quad(lambda s: s / 2, [0, 4]), 4.0)

# Dead-core fixtures: stationarity of the closed-form profiles.
A = 2 * mp.sqrt(3) / 9
check("A = 2 sqrt(3)/9", A, 0.3849001794597505)
check("2A (forcing coefficient)", 2 * A, 0.7698003589195010)
check("6.75 A^2 = 1", mp.mpf("6.75") * A * A, 1.0)

# p=2, gamma=1, q=1, h=0: u = x^2/4 satisfies (g(u'))' = q f(u).
# g(t) = 2t so the left side is 1; f = 1 identically.
check("deadcore residual at x=0.37",
      mp.diff(lambda x: 2 * (x / 2), mp.mpf("0.37")), 1.0)

# p=3, gamma=2, q=1 with forcing h(x) = 1 - 2A x^{3/2}: u = A x^{3/2}
# satisfies (3 u'^2)' = 2u + h, both sides equal to 1.
for x0 in ("0.2", "0.75"):
    x0 = mp.mpf(x0)
    lhs = mp.diff(lambda x: 3 * (mp.mpf("1.5") * A * mp.sqrt(x)) ** 2, x0)
    rhs = 2 * A * x0 ** mp.mpf("1.5") + (1 - 2 * A * x0 ** mp.mpf("1.5"))
    check(f"forced residual at x={x0}", lhs, float(rhs), 1e-12)

# p=3, gamma=2, q=1, h=0: u = x^3/54 satisfies (3 u'^2)' = 2u.
x0 = mp.mpf("0.6")
check("h=0 variant residual at x=0.6",
      mp.diff(lambda x: 3 * (x * x / 18) ** 2, x0),
      float(x0 ** 3 / 27), 1e-12)

# Truncation iteration: threshold and the self-similar trace for (2,4,1).
check("degiorgi threshold C^{-1} D^{-1} for (2,4,1)",
      mp.mpf(2) ** -1 * mp.mpf(4) ** -1, 0.125)
j = mp.mpf("0.125")
worst = mp.mpf(0)
for n in range(40):
    j_next = 2 * mp.mpf(4) ** n * j * j
    worst = max(worst, abs(j_next - mp.mpf("0.125") * mp.mpf(4) ** -(n + 1)))
    j = j_next
check("self-similar trace drift over 40 steps", 1 + worst, 1.0)

print()
if FAILURES:
    print(f"{len(FAILURES)} mismatched constants: {FAILURES}")
    sys.exit(1)
print("all frozen constants confirmed")
