"""Exception hierarchy shared by all nok modules.

Every domain-level failure carries a stable machine-readable ``code`` so the
CLI can emit structured error JSON and map failures to exit status 2.
"""


class NokError(Exception):
    """Base class for domain errors."""

    code = "Error"

    def __init__(self, detail=""):
        self.detail = str(detail)
        super().__init__(self.detail or self.code)

    def to_json(self):
        return {"error": self.code, "detail": self.detail}


class DimensionMismatch(NokError):
    code = "DimensionMismatch"


class EmptyInput(NokError):
    code = "EmptyInput"


class IndexOutOfRange(NokError):
    code = "IndexOutOfRange"


class UnboundedBody(NokError):
    code = "UnboundedBody"


class DegenerateBody(NokError):
    code = "DegenerateBody"


class NotCentered(NokError):
    code = "NotCentered"


class NotSpanning(NokError):
    code = "NotSpanning"


class NoConvergence(NokError):
    code = "NoConvergence"

    def __init__(self, iterations, residual, detail=""):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            detail or f"no convergence after {iterations} iterations, residual {residual:.3e}"
        )

    def to_json(self):
        data = super().to_json()
        data["iterations"] = self.iterations
        data["residual"] = self.residual
        return data


class RankTooSmall(NokError):
    code = "RankTooSmall"


class NotEffective(NokError):
    code = "NotEffective"


class NotMovable(NokError):
    code = "NotMovable"


class MNotPositive(NokError):
    code = "MNotPositive"


class NotNef(NokError):
    code = "NotNef"


class LengthMismatch(NokError):
    code = "LengthMismatch"


class UnknownSuite(NokError):
    code = "UnknownSuite"
