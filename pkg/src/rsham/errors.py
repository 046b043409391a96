"""Failure types raised by the construction stages.

``ConstructionFailure`` subclasses signal that a randomized stage could not
meet its contract; the pipeline catches them, records diagnostics, and
retries with a fresh seed.  Plain ``ValueError`` is reserved for caller
mistakes (bad arguments, violated preconditions).
"""

from __future__ import annotations


class ConstructionFailure(RuntimeError):
    """A construction stage could not produce a valid object."""


class InfeasibleDegreeError(ValueError):
    """Requested semi-degree target exceeds what any digraph of this order has."""


class ConnectFailure(ConstructionFailure):
    def __init__(self, stage: str, detail: str = ""):
        self.stage = stage
        self.detail = detail
        super().__init__(f"connection failed at {stage}: {detail}" if detail else f"connection failed at {stage}")


class FamilyFailure(ConstructionFailure):
    def __init__(self, worst_vertex: int, coverage: int, floor: int, retries: int):
        self.worst_vertex = worst_vertex
        self.coverage = coverage
        self.floor = floor
        self.retries = retries
        super().__init__(
            f"no absorber family after {retries} draws: vertex {worst_vertex} "
            f"covered by {coverage} members, floor {floor}"
        )


class ChainFailure(ConstructionFailure):
    def __init__(self, junction: int, detail: str = ""):
        self.junction = junction
        super().__init__(f"absorbing-path chain failed at junction {junction}: {detail}")


class AbsorbFailure(ConstructionFailure):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"no free absorber available for vertex {vertex}")


class ReservoirFailure(ConstructionFailure):
    def __init__(self, worst_vertex: int, worst_degree: int, threshold: int, retries: int):
        self.worst_vertex = worst_vertex
        self.worst_degree = worst_degree
        self.threshold = threshold
        self.retries = retries
        super().__init__(
            f"no certified reservoir after {retries} draws: vertex {worst_vertex} "
            f"has reservoir degree {worst_degree} < {threshold}"
        )


class CoverFailure(ConstructionFailure):
    def __init__(self, paths: int, path_budget: int, leftover: int, leftover_budget: int):
        self.paths = paths
        self.path_budget = path_budget
        self.leftover = leftover
        self.leftover_budget = leftover_budget
        super().__init__(
            f"path cover missed budgets: {paths} paths (budget {path_budget}), "
            f"{leftover} leftover (budget {leftover_budget})"
        )
