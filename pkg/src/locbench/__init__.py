"""Desk-scale solvers, each paired with a brute-force oracle.

Modules: ``instances`` (data model and JSON I/O), ``transport`` (TP and
interval TP), ``planar`` (Weber / polyellipse covering),
``stratified_pcenter``, ``medianplex`` and ``ev_dp``.
"""

from .instances import generate, read_instance, validate, write_instance

__version__ = "0.1.0"

__all__ = ["generate", "read_instance", "validate", "write_instance"]
