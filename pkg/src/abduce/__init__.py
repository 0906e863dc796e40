"""Explanation-based interpretation of event time series.

Domain knowledge is expressed as temporally constrained pattern automata
over an ontology of observables; interpretation is a best-first search
over hypothesize-and-test steps.  Ships with a beat-level ECG rhythm
knowledge base and text annotation I/O compatible with common physiologic
tooling conventions.
"""

__version__ = "0.1.0"
