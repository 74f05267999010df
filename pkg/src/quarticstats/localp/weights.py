from __future__ import annotations

from dataclasses import dataclass, field

from ..arith import factorint
from ..errors import NotGeneric
from ..forms import QuarticForm, invariants, is_generic
from .mass import mp_levels
from .solubility import linf_soluble, lp_soluble


@dataclass(frozen=True)
class LocalWeight:
    p: int
    ell: int
    m_levels: tuple = field(default=(1,))

    @property
    def m_total(self) -> int:
        return sum(self.m_levels)


def local_weight(f: QuarticForm, p: int) -> LocalWeight:
    return LocalWeight(p, lp_soluble(f, p), tuple(mp_levels(f, p)))


def relevant_primes(delta: int, trial_bound=10**6, effort=2_000_000) -> list:
    """2 together with the odd primes whose square divides delta."""
    fac = factorint(delta, trial_bound=trial_bound, effort=effort)
    return sorted({2} | {p for p, e in fac.items() if e >= 2})


def global_weights(f: QuarticForm, check_generic: bool = True, **factor_opts) -> tuple:
    """(ell, m) for a generic integral form; odd primes with p^2 not dividing disc contribute 1."""
    if check_generic and not is_generic(f):
        raise NotGeneric(str(f))
    delta = invariants(f).delta
    ell = linf_soluble(f)
    m = 1
    for p in relevant_primes(delta, **factor_opts):
        w = local_weight(f, p)
        if ell:
            ell *= w.ell
        m *= w.m_total
    return ell, m
