"""
Distances between truncated normals: the closed forms, the untruncated
limit, and the condition telling whether truncation increased distance.
"""

import numpy as np

from distsim import (
    QuadConfig,
    TruncGaussianMulti,
    TruncGaussianUni,
    bc_mvn,
    bc_normal_uni,
    bc_truncated_mvn,
    bc_truncated_uni,
    truncation_inequality_holds_mvn,
    truncation_inequality_holds_uni,
)

cfg = QuadConfig(seed=0)

## Two truncated normals on overlapping intervals
p = TruncGaussianUni(0.0, 1.0, -2.0, 2.0)
q = TruncGaussianUni(0.5, 1.5, -1.0, 3.0)
value = bc_truncated_uni(p, q)
print(f"truncated D      : {value.distance:.6f} (rho = {value.coefficient:.6f})")
base = bc_normal_uni(p.parent(), q.parent())
print(f"untruncated D    : {base.distance:.6f}")

## Does truncation increase the distance? Both sides of the test:
check = truncation_inequality_holds_uni(p, q)
print(f"sqrt(Z_p Z_q) = {check.lhs:.6f} vs overlap mass {check.rhs:.6f} "
      f"-> truncation {'increased' if check.holds else 'decreased'} the distance")

## Widening the truncation recovers the untruncated distance
print("\nclip at +-c standard deviations, gap to the untruncated distance:")
for c in (2.0, 4.0, 6.0, 8.0, 10.0):
    pc = TruncGaussianUni(0.0, 1.0, -c, c)
    qc = TruncGaussianUni(0.5, 1.5, 0.5 - c * q.sigma, 0.5 + c * q.sigma)
    gap = abs(bc_truncated_uni(pc, qc).distance - base.distance)
    print(f"  c = {c:4.1f}: |D_trunc - D| = {gap:.2e}")

## Disjoint supports: no overlap, infinite distance
left = TruncGaussianUni(0.0, 1.0, 0.0, 1.0)
right = TruncGaussianUni(0.0, 1.0, 2.0, 3.0)
v = bc_truncated_uni(left, right)
print(f"\ndisjoint supports: rho = {v.coefficient}, D = {v.distance}")

## The multivariate version needs box probabilities (seeded, reproducible)
pm = TruncGaussianMulti([0.2, 0.1], [[1.0, 0.3], [0.3, 0.8]], [0, 0], [1, 1])
qm = TruncGaussianMulti([-0.1, 0.4], [[0.7, -0.2], [-0.2, 1.1]], [0, 0], [1, 1])
vm = bc_truncated_mvn(pm, qm, cfg)
bm = bc_mvn(pm.parent(), qm.parent())
print(f"\nk=2 on the unit box : D = {vm.distance:.6f}")
print(f"k=2 untruncated     : D = {bm.distance:.6f}")
chk = truncation_inequality_holds_mvn(pm, qm, cfg)
print(f"sqrt(P_p P_q) = {chk.lhs:.4f} vs overlap mass {chk.rhs:.4f} "
      f"-> holds: {chk.holds}")

## One-sided (half-infinite) truncation boxes work the same way
half = TruncGaussianMulti([0.0, 0.0], np.eye(2),
                          [0.0, -np.inf], [np.inf, np.inf])
print(f"\npositive-orthant-in-x vs itself: "
      f"D = {bc_truncated_mvn(half, half, cfg).distance:.2e}")
