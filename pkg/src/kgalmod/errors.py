"""Exception hierarchy."""

from __future__ import annotations

import numpy as np


class KGalError(Exception):
    """Base class for every error raised by this package."""


class FplaError(KGalError, ValueError):
    """Dimension, modulus or containment mismatch in linear algebra."""


class ModuleError(KGalError, ValueError):
    """A matrix does not define a module over F_p[Z/p^n]."""


class InternalError(KGalError, AssertionError):
    """A post-condition that the theory guarantees did not hold."""


class TowerShapeError(KGalError, ValueError):
    """Tower data is missing pieces or has inconsistent matrix shapes."""


class ExceptionalError(KGalError):
    """No exceptional element could be extracted from the tower."""


class NotEmbeddableError(KGalError):
    """The refined decomposition needs an embeddable extension."""


class LiftError(KGalError):
    """No lift with the required length exists; the tower violates its axioms."""


class ClauseError(KGalError):
    """A named clause of a construction failed; carries a witness vector."""

    def __init__(self, clause: str, message: str, witness=None):
        self.clause = clause
        self.witness = None if witness is None else np.asarray(witness).tolist()
        super().__init__(f"{clause}: {message}" + (f" (witness {self.witness})" if witness is not None else ""))


class TowerFormatError(KGalError, ValueError):
    """Malformed tower file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
