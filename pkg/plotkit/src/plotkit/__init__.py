"""Plotting scripts for the twofluid-dg batch outputs.

Each plot kind is one console script reading the solver CLI's plain-text
files (`convergence.txt`, `timeseries.txt`, snapshots) and writing a
deterministic image. No solver internals are imported; the only
interface is the documented column contract of those files.
"""

__version__ = "0.1.0"
