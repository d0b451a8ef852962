"""Default resource caps and numeric defaults.

All caps are overridable per call; they exist so that a typo in a CLI flag
fails fast instead of allocating gigabytes.
"""

# Lattice enumeration: maximum number of sphere/ball points visited per call.
DEFAULT_POINT_CAP = 10**8

# Dense test-function storage: maximum p**d entries.
DEFAULT_ENTRY_CAP = 10**7

# Residue census tables: maximum (nmax + 1) * p**d int64 cells.
DEFAULT_CENSUS_CELL_CAP = 3 * 10**8

# Largest modulus accepted by the exponential-sum evaluators.
DEFAULT_Q_CAP = 2**20

# Truncation target for theta evaluations.
DEFAULT_EPS = 1e-12

# Largest prime automatically included in singular-series products.
DEFAULT_PRIME_CUTOFF = 101
