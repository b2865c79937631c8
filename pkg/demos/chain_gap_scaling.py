"""Protected gap of the pair chain as the chain grows.

The chain Hamiltonian conserves one four-body check per cell. Within
the joint +1 eigenspace of all checks the two lowest levels are found
matrix-free (projected Lanczos on the full 2^(2N) space), and their
splitting approaches the single-cell value 2J - 4*lam as N grows.

N=7 means 16384 dimensions; it is included when a first argument "big"
is given, and takes a minute or two.
"""

import sys

from clusterprep import chain_sector_gap, gap_closed_form

J, lam = 1.0, 0.2
sizes = [3, 4, 5, 6]
if len(sys.argv) > 1 and sys.argv[1] == "big":
    sizes.append(7)

target = gap_closed_form("1d", J, lam)
print("J = %g, lam = %g, closed-form single-cell gap 2J - 4 lam = %g" % (J, lam, target))
print()
print(" N   qubits   dim      sector gap   deviation")
for N in sizes:
    levels = chain_sector_gap(N, J, lam)
    gap = levels[1] - levels[0]
    print("%2d   %4d   %6d   %10.6f   %+8.2e"
          % (N, 2 * N, 4 ** N, gap, gap - target))
