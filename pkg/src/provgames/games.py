"""Two-player game graphs, strategies, and provenance valuations.

Positions are arbitrary hashable labels.  Strategies are finite subtrees of
the unraveling, stored through their occurrence counts; conceptually
infinite strategies (for cyclic games) can be described by explicit counts
with infinite exponents, but are never materialized as trees.
"""

from dataclasses import dataclass, field

from .errors import (
    BudgetExceeded,
    CyclicGame,
    InfExponentUnsupported,
    MalformedGame,
    ProvError,
)
from .infinity import INF, ext_le

TERMINAL = "terminal"


class GameGraph:
    """Finite game graph (V, V0, V1, T, E); vE is empty iff v is terminal."""

    def __init__(self, owners, moves):
        """owners: mapping position -> 0 | 1 | 'terminal'; moves: edge pairs."""
        self.owners = dict(owners)
        self.moves = []
        seen = set()
        for u, v in moves:
            if (u, v) in seen:
                raise MalformedGame(f"parallel move {u!r} -> {v!r}")
            seen.add((u, v))
            if u not in self.owners or v not in self.owners:
                raise MalformedGame(f"move {u!r} -> {v!r} uses unknown position")
            self.moves.append((u, v))
        self._succ = {v: [] for v in self.owners}
        for u, v in self.moves:
            self._succ[u].append(v)

    @property
    def positions(self):
        return list(self.owners)

    def owner(self, v):
        return self.owners[v]

    def successors(self, v):
        return list(self._succ[v])

    def is_terminal(self, v):
        return self.owners[v] == TERMINAL

    @property
    def terminals(self):
        return [v for v, o in self.owners.items() if o == TERMINAL]

    def check_structure(self):
        for v, o in self.owners.items():
            empty = not self._succ[v]
            if o == TERMINAL and not empty:
                raise MalformedGame(f"terminal {v!r} has outgoing moves")
            if o != TERMINAL and empty:
                raise MalformedGame(f"non-terminal {v!r} has no moves (vE must be nonempty)")
            if o not in (0, 1, TERMINAL):
                raise MalformedGame(f"position {v!r} has bad owner tag {o!r}")

    def topological_order(self):
        """Reverse-dependency order (successors first); None if cyclic."""
        state = {}
        order = []

        def visit(v):
            mark = state.get(v)
            if mark == "done":
                return True
            if mark == "active":
                return False
            state[v] = "active"
            for w in self._succ[v]:
                if not visit(w):
                    return False
            state[v] = "done"
            order.append(v)
            return True

        for v in self.owners:
            if not visit(v):
                return None
        return order

    def is_acyclic(self):
        return self.topological_order() is not None


def validate_game(game):
    """Check structural invariants; report cyclicity and unreachable positions.

    A position counts as unreachable when no source position (one without
    predecessors) can reach it.  Raises MalformedGame on invariant violation.
    """
    game.check_structure()
    order = game.topological_order()
    has_pred = {v: False for v in game.owners}
    for _, w in game.moves:
        has_pred[w] = True
    sources = [v for v, p in has_pred.items() if not p]
    reached = set()
    stack = list(sources)
    while stack:
        v = stack.pop()
        if v in reached:
            continue
        reached.add(v)
        stack.extend(game.successors(v))
    unreachable = [] if not sources else [v for v in game.owners if v not in reached]
    return {
        "positions": len(game.owners),
        "moves": len(game.moves),
        "acyclic": order is not None,
        "unreachable": sorted(map(str, unreachable)),
    }


class BasicValuation:
    """Terminal values f_sigma and move values h_sigma over one semiring."""

    def __init__(self, handle, player, terminal_values, move_values=None):
        self.handle = handle
        self.player = player
        self.f = dict(terminal_values)
        self.h = dict(move_values or {})
        for e, value in self.h.items():
            if value == handle.zero:
                raise ProvError(f"move value for {e!r} must be nonzero")

    def terminal_value(self, t):
        return self.f[t]

    def move_value(self, e):
        return self.h.get(e, self.handle.one)


def acyclic_valuation(game, basic):
    """The backward-induction K-valuation of an acyclic game."""
    order = game.topological_order()
    if order is None:
        raise CyclicGame("acyclic valuation requires an acyclic game graph")
    handle = basic.handle
    values = {}
    for v in order:
        if game.is_terminal(v):
            values[v] = basic.terminal_value(v)
        else:
            contributions = [
                handle.mul(basic.move_value((v, w)), values[w])
                for w in game.successors(v)
            ]
            if game.owner(v) == basic.player:
                acc = handle.zero
                for c in contributions:
                    acc = handle.add(acc, c)
            else:
                acc = handle.one
                for c in contributions:
                    acc = handle.mul(acc, c)
            values[v] = acc
    return values


@dataclass
class Strategy:
    """A strategy recorded by its occurrence counts under the projection.

    position_counts covers every position occurring in the subtree (the
    formula for F(S) only consumes the terminal ones); cutoff_count tracks
    leaves created by truncation (unfinished plays).
    """

    owner: int
    root: object
    position_counts: dict
    move_counts: dict
    admits_infinite: bool = False
    cutoff_count: int = 0
    paths: tuple = ()

    def count(self, v):
        return self.position_counts.get(v, 0)

    def move_count(self, e):
        return self.move_counts.get(e, 0)

    def outcome_counts(self, game):
        return {t: c for t, c in self.position_counts.items() if game.is_terminal(t)}

    @classmethod
    def from_paths(cls, owner, root, paths, game, cutoff_leaves=()):
        position_counts = {}
        move_counts = {}
        for path in paths:
            position_counts[path[-1]] = position_counts.get(path[-1], 0) + 1
            if len(path) > 1:
                e = (path[-2], path[-1])
                move_counts[e] = move_counts.get(e, 0) + 1
        cutoffs = len(cutoff_leaves)
        return cls(
            owner=owner,
            root=root,
            position_counts=position_counts,
            move_counts=move_counts,
            admits_infinite=cutoffs > 0,
            cutoff_count=cutoffs,
            paths=tuple(sorted(paths)),
        )


def enumerate_strategies(game, player, root, max_nodes=100_000):
    """All strategies of `player` from `root`; raises BudgetExceeded.

    Complete for acyclic games; on cyclic games the growing paths blow the
    budget, which is the documented behavior.
    """
    budget = [max_nodes]

    def expand(path):
        v = path[-1]
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExceeded(f"strategy enumeration exceeded {max_nodes} nodes")
        if game.is_terminal(v):
            return [[path]]
        if game.owner(v) == player:
            result = []
            for w in game.successors(v):
                for sub in expand(path + (w,)):
                    result.append([path] + sub)
            return result
        parts = [[path]]
        for w in game.successors(v):
            subs = expand(path + (w,))
            parts = [acc + sub for acc in parts for sub in subs]
        return parts

    return [
        Strategy.from_paths(player, root, node_set, game)
        for node_set in expand((root,))
    ]


def strategy_value(strategy, game, basic, mode="acyclic"):
    """F(S) / F^mu(S) / F^nu(S) for one strategy.

    mode 'acyclic': the plain product formula (well-founded strategies only);
    'mu': 0 whenever the strategy admits an infinite play; 'nu': the pure
    outcome product with exponents in N u {inf} and h ignored for infinite
    plays (which count as 1).
    """
    handle = basic.handle
    if mode == "acyclic":
        if strategy.admits_infinite:
            raise ProvError("acyclic strategy value needs a well-founded strategy")
        return _finite_strategy_product(strategy, game, basic)
    if mode == "mu":
        if strategy.admits_infinite:
            return handle.zero
        return _finite_strategy_product(strategy, game, basic)
    if mode == "nu":
        value = handle.one
        for t, c in strategy.outcome_counts(game).items():
            base = basic.terminal_value(t)
            if c is INF:
                value = handle.mul(value, handle.pow_inf(base))
            else:
                value = handle.mul(value, handle.power(base, c))
        return value
    raise ProvError(f"unknown strategy value mode {mode!r}")


def _finite_strategy_product(strategy, game, basic):
    handle = basic.handle
    value = handle.one
    for e, c in strategy.move_counts.items():
        if c is INF:
            raise InfExponentUnsupported("finite strategy product with infinite count")
        value = handle.mul(value, handle.power(basic.move_value(e), c))
    for t, c in strategy.outcome_counts(game).items():
        if c is INF:
            raise InfExponentUnsupported("finite strategy product with infinite count")
        value = handle.mul(value, handle.power(basic.terminal_value(t), c))
    return value


def play_values(strategy, game, basic):
    """Values of the individual plays admitted by a finite strategy tree."""
    values = []
    for path in strategy.paths:
        if not game.is_terminal(path[-1]):
            continue
        handle = basic.handle
        v = basic.terminal_value(path[-1])
        for a, b in zip(path, path[1:]):
            v = handle.mul(v, basic.move_value((a, b)))
        values.append(v)
    return values


def absorption_dominates(s1, s2, game):
    """True iff s1 absorbs s2: pointwise fewer plays per outcome, and an
    infinite play in s1 forces one in s2."""
    if s1.owner != s2.owner or s1.root != s2.root:
        raise ProvError("absorption compares strategies of one player from one root")
    o1 = s1.outcome_counts(game)
    o2 = s2.outcome_counts(game)
    for t in set(o1) | set(o2):
        if not ext_le(o1.get(t, 0), o2.get(t, 0)):
            return False
    if s1.admits_infinite and not s2.admits_infinite:
        return False
    return True


def absorption_dominant_flags(strategies, game):
    """Per-strategy flags: maximal w.r.t. strict absorption by another."""
    flags = []
    for s in strategies:
        dominated = any(
            other is not s
            and absorption_dominates(other, s, game)
            and not absorption_dominates(s, other, game)
            for other in strategies
        )
        flags.append(not dominated)
    return flags


def truncate(game, basic, n, boundary="zero"):
    """The truncation to paths of fewer than n moves, as an acyclic game.

    Positions of the result are paths (tuples) of original positions; roots
    are the single-element paths.  Unfinished-play leaves get value 0
    (boundary 'zero', lfp analysis) or 1 (boundary 'one', gfp analysis).
    Returns (game, basic valuation, cutoff leaf set).
    """
    if n < 1:
        raise ProvError("truncation depth must be >= 1")
    handle = basic.handle
    owners = {}
    moves = []
    f = {}
    h = {}
    cutoffs = set()
    stack = [(v,) for v in game.owners]
    while stack:
        path = stack.pop()
        if path in owners:
            continue
        v = path[-1]
        if game.is_terminal(v):
            owners[path] = TERMINAL
            f[path] = basic.terminal_value(v)
        elif len(path) - 1 == n - 1:
            owners[path] = TERMINAL
            f[path] = handle.zero if boundary == "zero" else handle.one
            cutoffs.add(path)
        else:
            owners[path] = game.owner(v)
            for w in game.successors(v):
                child = path + (w,)
                moves.append((path, child))
                h[(path, child)] = basic.move_value((v, w))
                stack.append(child)
    truncated_game = GameGraph(owners, moves)
    truncated_basic = BasicValuation(handle, basic.player, f, h)
    return truncated_game, truncated_basic, cutoffs


def enumerate_truncated_strategies(game, basic, player, root, n, max_nodes=100_000):
    """Strategies of the n-truncation from `root`, with cutoff-leaf flags."""
    tgame, tbasic, cutoffs = truncate(game, basic, n)
    raw = enumerate_strategies(tgame, player, (root,), max_nodes)
    strategies = []
    for s in raw:
        # Project path-positions back to original positions for the counts.
        position_counts = {}
        move_counts = {}
        cut = 0
        for path_pos, c in s.position_counts.items():
            if path_pos in cutoffs:
                cut += c
                continue
            v = path_pos[-1]
            position_counts[v] = position_counts.get(v, 0) + c
        for (p1, p2), c in s.move_counts.items():
            e = (p1[-1], p2[-1])
            move_counts[e] = move_counts.get(e, 0) + c
        strategies.append(
            Strategy(
                owner=player,
                root=root,
                position_counts=position_counts,
                move_counts=move_counts,
                admits_infinite=cut > 0,
                cutoff_count=cut,
                paths=s.paths,
            )
        )
    return strategies, tgame, tbasic


def check_separating(game, basic0, basic1, mode="separating", scope=None):
    """Per-position separation verdicts for a pair of player valuations."""
    if mode not in ("separating", "weak", "strong"):
        raise ProvError(f"unknown separation mode {mode!r}")
    if basic0.handle is not basic1.handle and basic0.handle != basic1.handle:
        raise ProvError("both valuations must use the same semiring")
    handle = basic0.handle
    f0 = acyclic_valuation(game, basic0)
    f1 = acyclic_valuation(game, basic1)
    verdicts = {}
    for v in scope if scope is not None else game.owners:
        a, b = f0[v], f1[v]
        separating = a == handle.zero or b == handle.zero
        if mode == "separating":
            verdicts[v] = separating
        elif mode == "weak":
            verdicts[v] = handle.mul(a, b) == handle.zero
        else:
            verdicts[v] = separating and handle.add(a, b) != handle.zero
    return {"mode": mode, "verdicts": verdicts, "all": all(verdicts.values())}


def _bipartite_match(left, right, allowed):
    """Maximum matching by augmenting paths; returns dict left->right."""
    match_l = {}
    match_r = {}

    def augment(u, visited):
        for w in right:
            if (u, w) in allowed and w not in visited:
                visited.add(w)
                if w not in match_r or augment(match_r[w], visited):
                    match_l[u] = w
                    match_r[w] = u
                    return True
        return False

    for u in left:
        augment(u, set())
    return match_l if len(match_l) == len(left) else None


def verify_counting_bisim(game1, game2, relation, basics=None):
    """Check that the given relation is a counting bisimulation.

    basics, when given, is a pair per player of (basic1, basic2) valuations:
    {player: (BasicValuation on game1, BasicValuation on game2)}; terminal
    and move values must then agree across related pairs.
    """
    relation = set(relation)
    failures = []
    for v, w in relation:
        o1, o2 = game1.owner(v), game2.owner(w)
        if o1 != o2:
            failures.append((v, w, "owner mismatch"))
            continue
        if basics and o1 == TERMINAL:
            for player, (b1, b2) in basics.items():
                if b1.terminal_value(v) != b2.terminal_value(w):
                    failures.append((v, w, f"terminal value mismatch (player {player})"))
        succ1 = game1.successors(v)
        succ2 = game2.successors(w)
        if len(succ1) != len(succ2):
            failures.append((v, w, "successor count mismatch"))
            continue
        allowed = set()
        for a in succ1:
            for b in succ2:
                if (a, b) not in relation:
                    continue
                if basics and any(
                    b1.move_value((v, a)) != b2.move_value((w, b))
                    for b1, b2 in basics.values()
                ):
                    continue
                allowed.add((a, b))
        if succ1 and _bipartite_match(succ1, succ2, allowed) is None:
            failures.append((v, w, "no local bijection"))
    return {"valid": not failures, "failures": failures}


@dataclass(frozen=True)
class Objective:
    kind: str  # 'reachability' or 'safety'
    terminals: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in ("reachability", "safety"):
            raise ProvError(f"unknown objective kind {self.kind!r}")


def winning_region(game, objective, player):
    """Classical attractor (or its safety dual) oracle for winning positions."""
    if objective.kind == "reachability":
        win = {t for t in game.terminals if t in objective.terminals}
        changed = True
        while changed:
            changed = False
            for v in game.owners:
                if v in win or game.is_terminal(v):
                    continue
                succ = game.successors(v)
                ok = (
                    any(w in win for w in succ)
                    if game.owner(v) == player
                    else all(w in win for w in succ)
                )
                if ok:
                    win.add(v)
                    changed = True
        return win
    # Safety: avoid the losing terminals; infinite plays are winning.
    win = {v for v in game.owners if not (game.is_terminal(v) and v in objective.terminals)}
    changed = True
    while changed:
        changed = False
        for v in list(win):
            if game.is_terminal(v):
                continue
            succ = game.successors(v)
            ok = (
                any(w in win for w in succ)
                if game.owner(v) == player
                else all(w in win for w in succ)
            )
            if not ok:
                win.discard(v)
                changed = True
    return win
