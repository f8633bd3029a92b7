"""Exception types raised across the package."""


class ExpertBayesError(Exception):
    """Base class for all package-specific errors."""


class EditInapplicable(ExpertBayesError):
    """The requested structural edit's edge precondition does not hold."""


class CycleWouldForm(ExpertBayesError):
    """Applying the edit would make the graph cyclic; the edit is rejected."""


class CyclicStructure(ExpertBayesError):
    """An operation requiring an acyclic graph was given a cyclic one."""


class ColumnMismatch(ExpertBayesError):
    """Dataset columns and network variables do not line up."""


class EmptyDataset(ExpertBayesError):
    """No usable rows for the requested computation."""


class UnestimatedCpt(ExpertBayesError):
    """Inference was asked to use a CPT that has not been estimated."""


class InvalidEvidenceLabel(ExpertBayesError):
    """An evidence assignment uses an unknown variable or state label."""


class NonBinaryClass(ExpertBayesError):
    """Thresholded classification needs a two-state class variable."""


class InvalidOrdering(ExpertBayesError):
    """A K2 variable ordering is not a valid permutation."""


class TooFewRows(ExpertBayesError):
    """Not enough rows (overall or per class) to build the requested folds."""


class LengthMismatch(ExpertBayesError):
    """Paired score vectors have different lengths."""


class ParseError(ExpertBayesError):
    """A document or CSV file is malformed; the message names the spot."""


class SchemaVersionUnsupported(ParseError):
    """The document declares a format version this build cannot read."""


class RaggedRow(ParseError):
    """A CSV data row has a different arity than the header."""


class MissingClassColumn(ParseError):
    """The designated class column is not present in the file."""


class SingleStateClass(ParseError):
    """The class column has fewer than two observed states."""
