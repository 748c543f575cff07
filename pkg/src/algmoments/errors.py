"""Exception hierarchy shared by all modules."""


class MomentError(Exception):
    """Base class for every failure raised by this package."""

    code = "moment-error"

    def to_dict(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        out.update(getattr(self, "details", {}) or {})
        return out


class MissingMomentError(MomentError, KeyError):
    code = "missing-moment"

    def __init__(self, alpha, have_order=None):
        self.alpha = tuple(int(a) for a in alpha)
        self.details = {"alpha": list(self.alpha), "max_order": have_order}
        msg = f"moment y_{self.alpha} (order {sum(self.alpha)}) is not available"
        if have_order is not None:
            msg += f"; sequence only holds orders <= {have_order}"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class UnboundedRegionError(MomentError):
    code = "unbounded-region"


class QuadratureError(MomentError):
    code = "quadrature-nonconvergence"


class NotInConeError(MomentError):
    """exp(-g) is not integrable over R^n (numerically)."""

    code = "not-in-cone-C"


class DegenerateSystemError(MomentError):
    code = "degenerate-system"


class RecoveryError(MomentError):
    """The kernel system has no unique normalized solution.

    ``report`` holds the diagnostics gathered before giving up.
    """

    code = "assumptions-violated"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
        self.details = {"report": report.to_dict()} if report is not None else {}


class SingularMatrixError(MomentError):
    code = "singular-matrix"
