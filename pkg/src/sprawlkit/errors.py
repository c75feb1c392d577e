"""Exception hierarchy shared across the toolkit.

Every error raised on a documented failure path has its own class so the
service layer can map it to a machine-readable code (the class name minus
the ``Error`` suffix).
"""

from __future__ import annotations


class SprawlKitError(Exception):
    """Base class for all toolkit errors."""

    @property
    def code(self) -> str:
        name = type(self).__name__
        return name[:-5] if name.endswith("Error") else name


# --- ingestion -------------------------------------------------------------

class BadMagicError(SprawlKitError):
    """Shapefile main header does not start with file code 9994."""


class UnsupportedShapeTypeError(SprawlKitError):
    """Shape type other than polygon (5) or null (0)."""


class TruncatedError(SprawlKitError):
    """Declared lengths exceed the bytes actually available."""


class BadFieldTypeError(SprawlKitError):
    """DBF field descriptor carries an unknown type character."""


class HeaderMismatchError(SprawlKitError):
    """DBF record length inconsistent with the field descriptors."""


class MissingKeyColumnError(SprawlKitError):
    """A named key column is absent from a table."""


class DuplicateKeyError(SprawlKitError):
    """Key column values are not unique."""


class RaggedRowError(SprawlKitError):
    """CSV row has the wrong number of cells."""


# --- discretization --------------------------------------------------------

class UnknownAttributeError(SprawlKitError):
    """An attribute name is not known to the table, scheme, or model."""


class NonContinuousAttributeError(SprawlKitError):
    """Binning requested for a column that is not continuous."""


class SchemeTableMismatchError(SprawlKitError):
    """A binning scheme references columns the table does not provide."""


# --- rule mining -----------------------------------------------------------

class EmptyDatasetError(SprawlKitError):
    """Operation requires at least one transaction or row."""


class InvalidSupportError(SprawlKitError):
    """min_support/min_confidence outside (0, 1]."""


class MissingSubsetSupportError(SprawlKitError):
    """Frequent-itemset input violates downward closure."""


# --- decision trees --------------------------------------------------------

class NoContinuousPredictorsError(SprawlKitError):
    """Training table has no continuous predictor columns."""


# --- model bundle / engine -------------------------------------------------

class VersionMismatchError(SprawlKitError):
    """Persisted bundle declares an unsupported format version."""


class CorruptBundleError(SprawlKitError):
    """Persisted bundle fails its integrity check."""


class NoModelError(SprawlKitError):
    """Bundle lacks the model component required by the operation."""


# --- map export ------------------------------------------------------------

class MissingLabelError(SprawlKitError):
    """A geometry key has no sprawl label."""


class KeyMismatchError(SprawlKitError):
    """Two labeled region sets do not cover the same keys."""
