"""
Exception hierarchy for hyperconv

Every error raised by the engine derives from HyperconvError. Input and
parameter errors also derive from ValueError so callers validating user
input can catch them the usual way.
"""
from fractions import Fraction
from typing import Any, Optional, Tuple


class HyperconvError(Exception):
    """Base class for all engine errors"""


class MeasureError(HyperconvError, ValueError):
    """A weight map does not describe a finitely supported probability measure"""


class RuleDomainError(HyperconvError, KeyError):
    """A convolution rule was evaluated outside its carrier"""

    def __init__(self, message: str, pair: Optional[Tuple[Any, Any]] = None):
        super().__init__(message)
        self.message = message
        self.pair = pair

    def __str__(self) -> str:
        return self.message


class SpecError(HyperconvError, ValueError):
    """A JSON construction or experiment spec is malformed"""


class ParamRange(HyperconvError, ValueError):
    """A construction parameter lies outside its admissible range"""


class NoInvolution(HyperconvError):
    """An involution check was requested on a descriptor without one"""


class NotCommutative(HyperconvError, ValueError):
    """A construction requiring commutativity got a non-commutative input"""


class NoIdentity(HyperconvError, ValueError):
    """A construction requiring an identity got a semigroup without one"""


class ConditionsNotVerified(HyperconvError, ValueError):
    """deform() was called without a passing condition report"""


class ActionInvalid(HyperconvError, ValueError):
    """A declared group action fails the identity or compatibility law"""


class NotSubgroup(HyperconvError, ValueError):
    """A declared subgroup is not closed under products or inverses"""


class NotAutomorphism(HyperconvError, ValueError):
    """A declared automorphism fails to be a homomorphism"""


class NotCentral(HyperconvError, ValueError):
    """A quotient subgroup is not contained in the windowed center"""


class PreconditionViolated(HyperconvError, ValueError):
    """An exact reproducer was called outside its hypotheses"""


class LiftMissing(HyperconvError, ValueError):
    """An orbit mass bound needs a lift to the underlying (semi)group"""


class TableError(HyperconvError, ValueError):
    """A finite multiplication table is not closed, associative or unital"""


class WeightConditionViolated(HyperconvError, ValueError):
    """Deformation weights break sum_{k<n} v_k <= v_n"""

    def __init__(self, n: int, lhs: Fraction, rhs: Fraction):
        super().__init__(f"weight condition fails at n={n}: sum_(k<n) v_k = {lhs} > v_n = {rhs}")
        self.n = n
        self.lhs = lhs
        self.rhs = rhs


class NormalizationError(HyperconvError, ValueError):
    """A recurrence produced P_n with P_n(1) != 1"""

    def __init__(self, n: int, value: Fraction):
        super().__init__(f"P_{n}(1) = {value}, expected 1")
        self.n = n
        self.value = value


class NegativeLinearization(HyperconvError, ValueError):
    """A linearization coefficient g(n,m;k) is negative"""

    def __init__(self, n: int, m: int, k: int, value: Fraction):
        super().__init__(f"g({n},{m};{k}) = {value} < 0")
        self.n = n
        self.m = m
        self.k = k
        self.value = value


class SupportBoundViolated(HyperconvError, ValueError):
    """g(n,m;k) is non-zero outside |n-m| <= k <= n+m"""

    def __init__(self, n: int, m: int, k: int):
        super().__init__(f"g({n},{m};{k}) != 0 outside {abs(n - m)}..{n + m}")
        self.n = n
        self.m = m
        self.k = k
