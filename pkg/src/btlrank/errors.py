"""Exception types shared across the library."""


class RankingError(Exception):
    """Base class for semantic failures raised by this library."""


class DisconnectedGraphError(RankingError):
    """The comparison graph has more than one connected component.

    Scores of players in different components are not comparable, so
    neither the MLE nor the spectral method is identifiable.
    """


class DivergedError(RankingError):
    """The vanilla MLE has no finite minimizer on this dataset.

    Happens when some player is perfectly separated (won or lost every
    recorded game); the likelihood keeps improving as that player's
    score runs off to infinity.
    """


class NotConvergedError(RankingError):
    """An iterative solver exhausted its iteration budget."""


class DegreeOverflowError(RankingError):
    """A vertex degree exceeds the Markov-chain normalizer d.

    Signals a misrecorded edge probability or a pathological graph; the
    transition matrix would need a negative diagonal entry.
    """


class ReducibleChainError(RankingError):
    """The comparison chain's support is disconnected."""
