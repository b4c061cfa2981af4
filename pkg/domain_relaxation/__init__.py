"""
Relaxation dynamics of two collective spin domains sharing one bosonic reservoir.

Subpackages:
- core: solver base, registry, sampling and time series
- physics: Dicke basis algebra, Clebsch-Gordan tables, reservoir, sector oracle
- solvers: exact Lindblad integration and the four-moment closure
- experiments: scenarios, runs, steady-state detection and relaxation fits
"""

__version__ = "1.0.0"
