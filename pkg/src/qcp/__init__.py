"""Quantum closest-pair machinery at desk scale.

Subpackages and modules:

- geometry: exact integer hypergrid (boxes, eps-neighbors).
- histructs: history-independent radix-tree structures (basic, augmented,
  bichromatic) with canonical serialization.
- qsim: Grover / minimum-finding / Szegedy-walk simulators and the
  walk-search cost model.
- solvers: end-to-end CP, BCP and OV solvers in real and cost modes.
- reductions: executable SAT->OV, OV->BCP and Z-OV->BCP gadgets.
- oracles: brute-force reference implementations used as ground truth.
- generators: seeded instance generators.
- cli: experiment harness (gen / run / fit / audit).
"""

from qcp.geometry import (
    GridParams,
    Point,
    are_eps_neighbors,
    box_id,
    dist_sq,
    enumerate_eps_neighbors,
)

__all__ = [
    "Point",
    "GridParams",
    "dist_sq",
    "box_id",
    "are_eps_neighbors",
    "enumerate_eps_neighbors",
]

__version__ = "0.1.0"
