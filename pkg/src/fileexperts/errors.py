"""Exception types raised across the library.

Every domain error derives from FileExpertsError so callers (and the CLI)
can catch one base class and map the concrete type to an error code.
"""


class FileExpertsError(Exception):
    """Base class for all errors raised by this library."""


# -- repository mining ------------------------------------------------------

class RepositoryNotFound(FileExpertsError):
    """The given path is not a readable git repository."""


class BranchNotFound(FileExpertsError):
    """The requested branch does not exist in the repository."""


class CorruptHistory(FileExpertsError):
    """An object referenced by the history could not be read."""


# -- diffing and features ----------------------------------------------------

class InvalidThreshold(FileExpertsError):
    """A threshold parameter is outside [0, 1]."""


class UnknownLanguage(FileExpertsError):
    """No conditional-keyword table is configured for the language."""


class FileNotInHistory(FileExpertsError):
    """The file does not exist at the reference version of the history."""


class PairNotInHistory(FileExpertsError):
    """The developer never touched the file in the mined history."""


# -- expertise scoring -------------------------------------------------------

class NegativeInput(FileExpertsError):
    """A count passed to the authorship formula is negative."""


class UnscoredOraclePair(FileExpertsError):
    """A labeled (developer, file) pair has no expertise score."""


class EmptyOracle(FileExpertsError):
    """The declared-expert set is empty, so recall is undefined."""


class TooFewSamples(FileExpertsError):
    """Not enough samples for the requested folds or statistic."""


# -- machine learning --------------------------------------------------------

class SingleClassData(FileExpertsError):
    """Training data contains only one class."""


class ZeroVarianceWarning(UserWarning):
    """A feature column is constant and was passed through unscaled."""


# -- statistics and study tooling --------------------------------------------

class LengthMismatch(FileExpertsError):
    """Paired vectors have different lengths."""


class ConstantInput(FileExpertsError):
    """A correlation input is constant, so the coefficient is undefined."""


class TooFewRepos(FileExpertsError):
    """Quartile filtering needs at least four repositories."""


class InvalidKnowledgeValue(FileExpertsError):
    """A survey knowledge value is outside the 1..5 scale."""
