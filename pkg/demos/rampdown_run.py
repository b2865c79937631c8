"""Prepare the four-spin cluster state from a thermal start.

Start in the Gibbs state of the dressed plaquette at temperature T and
coupling lam0, ramp the transverse coupling linearly to zero over a
duration tau, and decompose whatever arrives at the end into the error
channel: the target state, single phase flips, and correlated pairs.

Longer ramps track the instantaneous ground state better, so the
residual error falls with tau until the thermal population of the
initial state takes over.
"""

import sys

from clusterprep import run_point
from clusterprep.analysis import CLASS_LABELS

T = 0.5
lam0 = 2.5
taus = (1.0, 2.0, 5.0, 10.0, 20.0)
if len(sys.argv) > 1:
    T = float(sys.argv[1])

print("T = %g, lam0 = %g, linear ramp to zero" % (T, lam0))
print()
print("tau     fidelity      e_zeta        P_Z           P_C1          P_C2")
for tau in taus:
    r = run_point(T, lam0, tau, tol=1e-8)
    print("%5.1f   %.6e  %.6e  %.6e  %.6e  %.6e"
          % (tau, r.fidelity, r.e_zeta, r.p_z, r.p_c1, r.p_c2))

r = run_point(T, lam0, taus[-1], tol=1e-8)
print()
print("slowest ramp, weight by flip class:")
for rep, p in r.class_probs.items():
    print("  %-15s %.6e" % (CLASS_LABELS[rep], p))
print("minus-sector weight folded in above: %.3e" % r.w_minus)
