"""Exception types shared across the package."""

from __future__ import annotations


class OrdLatticeError(Exception):
    """Base class for all ordlattice errors."""


class CycleError(OrdLatticeError):
    """The given order pairs are not acyclic, so no strict partial order exists.

    ``cycle`` holds one offending identifier cycle; ``relation`` names the
    relation when the error surfaces from a database document.
    """

    def __init__(self, cycle, relation: str | None = None):
        self.cycle = tuple(cycle)
        self.relation = relation
        where = f" in relation {relation!r}" if relation else ""
        super().__init__(f"order contains a cycle{where}: {' < '.join(map(str, self.cycle))} < {self.cycle[0]}")


class ArityError(OrdLatticeError):
    """Tuple arities are inconsistent or an attribute position is out of range."""


class DomainError(OrdLatticeError):
    """A value is neither a natural number nor a string token."""


class NotPermutationError(OrdLatticeError):
    """A candidate identifier sequence is not a permutation of the relation's ids."""


class ComparableError(OrdLatticeError):
    """Two identifiers were required to be incomparable but are ordered."""


class RankError(OrdLatticeError):
    """Requested positions are not achievable ranks for the given identifiers."""


class PositionError(OrdLatticeError):
    """A 1-based position lies outside the relation."""


class WorldLimitError(OrdLatticeError, OverflowError):
    """More distinct possible worlds than the caller-supplied limit."""


class UnboundRelationError(OrdLatticeError):
    """A query references a relation name missing from the database."""


class NotFiniteError(OrdLatticeError):
    """An algorithm requiring a finite monoid was given an infinite one."""


class NotPositionInvariantError(OrdLatticeError):
    """An algorithm requiring a position-invariant accumulation map was given one that is not."""


class NotCancellativeError(OrdLatticeError):
    """An algorithm requiring a cancellative monoid was given one that is not."""


class ResourceExceeded(OrdLatticeError):
    """A solver hit its configured caps before reaching an answer.

    This is a distinct outcome, never a verdict: the solver refuses to guess.
    """


class ParseError(OrdLatticeError):
    """Syntax error in a query string or database document, with position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
