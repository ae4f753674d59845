"""Exception types raised by finitenet."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    achieved : float
        Error estimate reported by the integrator.
    requested : float
        Tolerance that was asked for.
    """

    def __init__(self, message, achieved=float("nan"), requested=float("nan")):
        super().__init__(f"{message} (achieved {achieved:.3g}, requested {requested:.3g})")
        self.achieved = achieved
        self.requested = requested


class InfeasibleDesignError(RuntimeError):
    """No AP count up to the cap satisfies a design target."""

    def __init__(self, message, best_value, best_n):
        super().__init__(f"{message}; best value {best_value:.6g} at N={best_n}")
        self.best_value = best_value
        self.best_n = best_n
