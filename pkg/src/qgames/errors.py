"""Exception hierarchy shared by every module of the package."""


class QGamesError(Exception):
    """Base class for all package errors."""


class DimensionError(QGamesError, ValueError):
    """Operand shapes do not match the operation."""


class UnitarityError(QGamesError, ValueError):
    """An operator expected to be unitary is not, beyond tolerance."""


class CompletenessError(QGamesError, ValueError):
    """A Kraus set violates sum_k A_k^dagger A_k = I beyond tolerance."""


class ImaginaryResidueError(QGamesError, ValueError):
    """An expectation value carries an imaginary part above tolerance."""


class RangeError(QGamesError, ValueError):
    """A parameter lies outside its admitted domain."""


class ModeError(QGamesError, ValueError):
    """A closed form was called outside the strategy mode it covers."""


class InvariantError(QGamesError, ValueError):
    """A derived object fails a structural invariant (ordering, bounds)."""


class OverlapError(QGamesError, ValueError):
    """Two decoding cells are closer than the required separation."""


class EmptySampleError(QGamesError, ValueError):
    """An estimator received zero samples."""
