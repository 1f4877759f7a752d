"""Exception hierarchy shared by every joinlab module."""

from __future__ import annotations


class JoinlabError(ValueError):
    """Base class for all validation and resource errors raised by joinlab."""


# -- core ---------------------------------------------------------------------

class InvalidMeasure(JoinlabError):
    pass


class NotAPermutation(JoinlabError):
    pass


class NotInvariant(JoinlabError):
    pass


class ZeroMassState(JoinlabError):
    pass


class NotSurjective(JoinlabError):
    pass


class NotMeasurePreserving(JoinlabError):
    pass


class NotEquivariant(JoinlabError):
    pass


# -- joinings -----------------------------------------------------------------

class InvalidCoupling(JoinlabError):
    """A candidate matrix failed one or more joining constraints.

    ``violations`` holds every failed constraint, not just the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        summary = "; ".join(str(v) for v in self.violations[:5])
        if len(self.violations) > 5:
            summary += f"; ... ({len(self.violations)} total)"
        super().__init__(summary)

    @property
    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


class SystemMismatch(JoinlabError):
    pass


class NotInCommutant(JoinlabError):
    pass


class CapExceeded(JoinlabError):
    """A brute-force or exact computation would exceed its configured size cap."""


class DimensionCapExceeded(CapExceeded):
    pass


class BruteForceCapExceeded(CapExceeded):
    pass


# -- relative -----------------------------------------------------------------

class FactorMismatch(JoinlabError):
    pass


# -- asymptotics --------------------------------------------------------------

class InvalidMarkovShift(JoinlabError):
    pass


class Reducible(JoinlabError):
    pass


# -- independence -------------------------------------------------------------

class HypothesisFailed(JoinlabError):
    """An oracle's input does not satisfy the lemma hypotheses.

    ``failed`` names every hypothesis that did not hold.
    """

    def __init__(self, failed):
        self.failed = tuple(failed)
        super().__init__(", ".join(self.failed) + ": failed")


class ConclusionFailed(JoinlabError):
    """Hypotheses held but the expected conclusion did not; always a defect."""


class SupportGrowthError(JoinlabError):
    pass


class PrefixDependentSupport(SupportGrowthError):
    pass


class NonMonotoneSupport(SupportGrowthError):
    pass
