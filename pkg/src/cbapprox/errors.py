"""Exception types raised by the geometry kernel and the construction layers."""


class CbapproxError(Exception):
    """Base class for all library errors."""


class BadParams(CbapproxError):
    """A parameter is outside its documented range."""


class DegenerateInput(CbapproxError):
    """Input is rank-deficient, self-coincident, or otherwise not full-dimensional."""


class Unbounded(CbapproxError):
    """A halfspace intersection admits a recession direction."""


class Infeasible(CbapproxError):
    """A halfspace intersection is empty."""


class OriginNotInterior(CbapproxError):
    """An operation requires the origin strictly inside the body."""


class AtOrigin(CbapproxError):
    """Polar of a point or hyperplane at the origin is undefined."""


class NotNested(CbapproxError):
    """The claimed inner body is not contained in the claimed outer body."""


class NotContained(CbapproxError):
    """A point or body escapes a required container."""


class NotInterior(CbapproxError):
    """A point expected strictly inside a body lies on or outside its boundary."""


class SeedNotContained(CbapproxError):
    """A shadow seed region is not contained in its host body."""


class EmptyCap(CbapproxError):
    """The cutting plane does not separate any part of the body."""


class OriginInCap(CbapproxError):
    """A cap was asked to exclude the origin but contains it."""


class CollinearityViolation(CbapproxError):
    """Four points fed to a cross ratio are not collinear within tolerance."""


class DegenerateQuadruple(CbapproxError):
    """Coincident points make a cross ratio 0/0."""


class ExpansionTooSmall(CbapproxError):
    """Net expansion constant below its admissible minimum."""


class EmptyCandidateSet(CbapproxError):
    """A net was requested over zero candidates."""


class WidthTooSmall(CbapproxError):
    """Body width falls below the requested approximation parameter."""


class RepairLimitExceeded(CbapproxError):
    """Verify-and-repair did not converge within its round budget."""


class CertificateError(CbapproxError):
    """A required containment or distance certificate failed."""


class AuditFailure(CbapproxError):
    """An empirical lemma audit recorded violations."""


class NotWellCentered(UserWarning):
    """Advisory: body fails the Mahler-volume centering policy."""
