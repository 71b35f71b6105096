"""Polynomial equation systems for games and Kleene fixed-point iteration.

Least fixed points start at 0, greatest fixed points at the top element
(which for truncated power-series semirings depends on the token alphabet).
When plain iteration does not stabilize within the budget, we keep
iterating while capping runaway values after every step (the capping is
applied only to variables that are still moving, so values that already
settled are never touched), and finally verify the result by one exact
application of the system.
"""

from dataclasses import dataclass, field

from .errors import NoConvergence, NotFullyOmegaContinuous, ProvError
from .poly import Polynomial
from .semirings import PolySemiring


@dataclass
class SolverConfig:
    max_iterations: int = None  # default 4*|vars| + 16
    saturation_threshold: int = None  # default 2*|vars| + 2
    trunc_degree: int = 8

    def iterations_for(self, n_vars):
        if self.max_iterations is not None:
            return self.max_iterations
        return 4 * n_vars + 16

    def threshold_for(self, n_vars):
        if self.saturation_threshold is not None:
            return self.saturation_threshold
        return 2 * n_vars + 2


@dataclass
class SolveResult:
    values: dict
    iterations: int
    saturated: bool
    verified: bool
    threshold: int = None

    def __getitem__(self, var):
        return self.values[var]


class EquationSystem:
    """A system x_v = rhs_v with right-hand sides built from +, * and constants.

    rhs entries are ('const', value) or (op, [(coefficient, var), ...]) with
    op in {'sum', 'prod'}.
    """

    def __init__(self, handle, equations):
        self.handle = handle
        self.equations = dict(equations)
        for var, rhs in self.equations.items():
            tag = rhs[0]
            if tag == "const":
                continue
            if tag not in ("sum", "prod"):
                raise ProvError(f"bad equation tag {tag!r} for {var!r}")
            for _, dep in rhs[1]:
                if dep not in self.equations:
                    raise ProvError(f"equation for {var!r} uses unknown variable {dep!r}")

    @property
    def variables(self):
        return list(self.equations)

    def apply(self, assignment):
        handle = self.handle
        out = {}
        for var, rhs in self.equations.items():
            if rhs[0] == "const":
                out[var] = rhs[1]
            elif rhs[0] == "sum":
                acc = handle.zero
                for coeff, dep in rhs[1]:
                    acc = handle.add(acc, handle.mul(coeff, assignment[dep]))
                out[var] = acc
            else:
                acc = handle.one
                for coeff, dep in rhs[1]:
                    acc = handle.mul(acc, handle.mul(coeff, assignment[dep]))
                out[var] = acc
        return out

    def tokens(self):
        """All indeterminates occurring in polynomial constants/coefficients."""
        toks = set()

        def collect(value):
            if isinstance(value, Polynomial):
                for m in value.monos:
                    toks.update(m.tokens())

        for rhs in self.equations.values():
            if rhs[0] == "const":
                collect(rhs[1])
            else:
                for coeff, _ in rhs[1]:
                    collect(coeff)
        return toks


def build_system(game, basic):
    """The equation system of the game: sums at the valuation owner's
    positions, products at the opponent's, constants at terminals."""
    handle = basic.handle
    equations = {}
    for v in game.owners:
        if game.is_terminal(v):
            equations[v] = ("const", basic.terminal_value(v))
        else:
            parts = [(basic.move_value((v, w)), w) for w in game.successors(v)]
            op = "sum" if game.owner(v) == basic.player else "prod"
            equations[v] = (op, parts)
    return EquationSystem(handle, equations)


def _iterate(system, start, direction, config):
    handle = system.handle
    n = len(system.equations)
    max_iter = config.iterations_for(n)
    threshold = config.threshold_for(n)
    descending = direction == "gfp"

    # Multiplicative cycles can square values every round, so counts would
    # reach astronomical sizes long before max_iter; once anything blows past
    # this cap we skip straight to the saturation phase.
    blowup = max(threshold + 1, 1 << 20)

    current = dict(start)
    iterations = 0
    for _ in range(max_iter):
        nxt = system.apply(current)
        iterations += 1
        for var in current:
            lo, hi = (nxt[var], current[var]) if descending else (current[var], nxt[var])
            if not handle.leq(lo, hi):
                raise ProvError(
                    f"iteration not monotone at {var!r}; equation system is outside "
                    "the supported fragment for this semiring"
                )
        if nxt == current:
            current = _settle_metadata(system, nxt)
            return SolveResult(current, iterations, saturated=False, verified=True,
                               threshold=threshold)
        current = nxt
        if not descending and _blown_up(handle, current.values(), blowup, direction):
            break

    # Saturation: keep iterating, but cap values that are still changing.
    # A diverging variable may grow by one unit only once per cycle length,
    # so this phase gets a budget proportional to the threshold as well
    # (bounded so that absurd thresholds cannot stall the solver).
    for attempt in range(2):
        state = dict(current)
        moving = set(state)
        for _ in range(min(max_iter + threshold * n, 100_000)):
            nxt = system.apply(state)
            iterations += 1
            moving = {var for var in state if nxt[var] != state[var]}
            if not moving:
                break
            for var in moving:
                nxt[var] = handle.saturate(nxt[var], threshold, direction)
            if nxt == state:
                break
            state = nxt
        else:
            threshold *= 2
            continue
        if system.apply(state) == state:
            state = _settle_metadata(system, state)
            return SolveResult(state, iterations, saturated=True, verified=True,
                               threshold=threshold)
        threshold *= 2
    raise NoConvergence(
        f"no fixed point within budget (iterations={iterations}, "
        f"final threshold={threshold})"
    )


def _blown_up(handle, values, cap, direction):
    """True when saturating at cap would change anything (values exploded)."""
    try:
        return any(handle.saturate(v, cap, direction) != v for v in values)
    except NoConvergence:
        # No saturation policy means no way to cap; let iteration run its
        # full budget and report divergence through the usual path.
        return False


def _fingerprint(assignment):
    return {
        var: (value, getattr(value, "truncated", None))
        for var, value in assignment.items()
    }


def _settle_metadata(system, assignment):
    """Equality of polynomials ignores the truncated marker, so once the
    values converge we keep applying until the markers converge too."""
    current = assignment
    for _ in range(len(system.equations) + 1):
        nxt = system.apply(current)
        if _fingerprint(nxt) == _fingerprint(current):
            return current
        current = nxt
    return current


def kleene_lfp(system, config=None):
    """Least fixed point by ascending Kleene iteration from 0."""
    config = config or SolverConfig()
    start = {var: system.handle.zero for var in system.equations}
    return _iterate(system, start, "lfp", config)


def kleene_gfp(system, config=None):
    """Greatest fixed point by descending iteration from the top element."""
    config = config or SolverConfig()
    handle = system.handle
    if not handle.flags.fully_omega_continuous:
        raise NotFullyOmegaContinuous(
            f"semiring {handle.name!r} does not support greatest fixed points"
        )
    if handle.top is not None:
        top = handle.top
    elif isinstance(handle, PolySemiring):
        top = handle.top_for_tokens(system.tokens())
    else:
        raise NotFullyOmegaContinuous(f"no top element for semiring {handle.name!r}")
    start = {var: top for var in system.equations}
    return _iterate(system, start, "gfp", config)


def solve_game(game, basic, fixpoint="mu", config=None):
    """Game valuation as the mu (lfp) or nu (gfp) solution of its system."""
    system = build_system(game, basic)
    if fixpoint == "mu":
        return kleene_lfp(system, config)
    if fixpoint == "nu":
        return kleene_gfp(system, config)
    raise ProvError(f"unknown fixpoint selector {fixpoint!r}")
