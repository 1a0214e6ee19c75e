"""Dual bases of weight -1/2 and weight 5/2 harmonic Maass forms on SL2(Z).

Exact q-series constructions (``qseries``) are checked against the analytic
Kloosterman/Bessel coefficient formulas (``poincare``), with Hecke relations and
duality checks in ``hecke``.
"""

__version__ = "0.1.0"
