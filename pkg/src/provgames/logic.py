"""First-order and posLFP formulas with semiring-valued interpretations.

Covers the formula grammar and parser, negation normal form, interpretations
of instantiated literals, the model-checking game construction, the
compositional and game-based valuations, and the direct fixed-point
semantics for lfp formulas.
"""

from dataclasses import dataclass, field

from .errors import (
    ArityError,
    FormulaSyntaxError,
    NotModelDefining,
    NotNNF,
    NotPosLFP,
    NotSentence,
    ProvError,
    TrackedFalseLiteral,
)
from .games import TERMINAL, BasicValuation, GameGraph, acyclic_valuation
from .monomials import negate_token
from .semirings import PolySemiring, get_semiring
from .solver import SolverConfig, _blown_up, build_system, kleene_lfp

# --- abstract syntax --------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple
    negated: bool = False


@dataclass(frozen=True)
class Eq:
    left: str
    right: str
    negated: bool = False


@dataclass(frozen=True)
class Not:
    sub: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Quant:
    kind: str  # 'exists' | 'forall'
    var: str
    sub: object


@dataclass(frozen=True)
class Fp:
    kind: str  # 'lfp' | 'gfp'
    rel: str
    params: tuple
    body: object
    args: tuple


def free_variables(formula, bound=frozenset()):
    if isinstance(formula, Atom):
        return {a for a in formula.args if a not in bound} - _constantish(formula)
    if isinstance(formula, Eq):
        return {a for a in (formula.left, formula.right) if a not in bound}
    if isinstance(formula, Not):
        return free_variables(formula.sub, bound)
    if isinstance(formula, (And, Or)):
        return free_variables(formula.left, bound) | free_variables(formula.right, bound)
    if isinstance(formula, Quant):
        return free_variables(formula.sub, bound | {formula.var})
    if isinstance(formula, Fp):
        inner = free_variables(formula.body, bound | set(formula.params))
        return inner | {a for a in formula.args if a not in bound}
    raise ProvError(f"unknown formula node {formula!r}")


def _constantish(_atom):
    # Terms are plain identifiers; whether one is a variable or a universe
    # element is only known at evaluation time, so syntactic free-variable
    # sets treat every term as potentially free.
    return set()


def fixpoint_relations(formula):
    if isinstance(formula, (Atom, Eq)):
        return set()
    if isinstance(formula, Not):
        return fixpoint_relations(formula.sub)
    if isinstance(formula, (And, Or)):
        return fixpoint_relations(formula.left) | fixpoint_relations(formula.right)
    if isinstance(formula, Quant):
        return fixpoint_relations(formula.sub)
    return {formula.rel} | fixpoint_relations(formula.body)


# --- parser -----------------------------------------------------------------


class _FormulaParser:
    """Recursive-descent parser; `!` binds tighter than `&` than `|`, and a
    quantifier or fixed-point body extends as far right as possible."""

    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise FormulaSyntaxError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, token):
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token):
        if not self.eat(token):
            self.error(f"expected {token!r}")

    def ident(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            self.error("expected identifier")
        return self.text[start:self.pos]

    def parse(self):
        f = self.disjunction()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing input")
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.eat("|"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.eat("&"):
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.eat("!"):
            return Not(self.unary())
        self.skip_ws()
        for kind in ("exists", "forall"):
            if self._keyword(kind):
                var = self.ident()
                self.expect(".")
                return Quant(kind, var, self.disjunction())
        if self.peek() == "(":
            self.expect("(")
            f = self.disjunction()
            self.expect(")")
            return f
        if self.peek() == "[":
            return self.fixpoint()
        return self.atomic()

    def _keyword(self, word):
        self.skip_ws()
        end = self.pos + len(word)
        if self.text.startswith(word, self.pos) and (
            end >= len(self.text)
            or not (self.text[end].isalnum() or self.text[end] == "_")
        ):
            self.pos = end
            return True
        return False

    def fixpoint(self):
        self.expect("[")
        if not (self._keyword("lfp") or self._keyword("gfp")):
            self.error("expected 'lfp' or 'gfp'")
        kind = "lfp" if self.text[self.pos - 3] == "l" else "gfp"
        rel = self.ident()
        params = self.term_list()
        self.expect(".")
        body = self.disjunction()
        self.expect("]")
        args = self.term_list()
        if len(args) != len(params):
            raise ArityError(
                f"fixed-point relation {rel} bound with {len(params)} parameters "
                f"but applied to {len(args)} arguments"
            )
        extra = free_variables(body, frozenset(params)) - set(params)
        # Parameter-freeness cannot be fully decided without the universe,
        # but quantified variables leaking into the body are caught later
        # (at instantiation); nothing to do here.
        del extra
        return Fp(kind, rel, tuple(params), body, tuple(args))

    def term_list(self):
        self.expect("(")
        terms = [self.ident()]
        while self.eat(","):
            terms.append(self.ident())
        self.expect(")")
        return tuple(terms)

    def atomic(self):
        left = self.ident()
        if self.peek() == "(":
            args = self.term_list()
            return Atom(left, args)
        if self.eat("!="):
            return Eq(left, self.ident(), negated=True)
        if self.eat("="):
            return Eq(left, self.ident())
        self.error("expected '(', '=' or '!=' after term")


def parse_formula(text):
    """Parse the text grammar into an AST and check arity consistency."""
    formula = _FormulaParser(text).parse()
    check_arities(formula)
    return formula


def check_arities(formula, arities=None):
    """Every relation symbol must be used with one arity throughout."""
    arities = arities if arities is not None else {}

    def walk(f):
        if isinstance(f, Atom):
            known = arities.setdefault(f.rel, len(f.args))
            if known != len(f.args):
                raise ArityError(
                    f"relation {f.rel} used with arities {known} and {len(f.args)}"
                )
        elif isinstance(f, Eq):
            pass
        elif isinstance(f, Not):
            walk(f.sub)
        elif isinstance(f, (And, Or)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quant):
            walk(f.sub)
        elif isinstance(f, Fp):
            known = arities.setdefault(f.rel, len(f.params))
            if known != len(f.params):
                raise ArityError(
                    f"relation {f.rel} used with arities {known} and {len(f.params)}"
                )
            walk(f.body)

    walk(formula)
    return arities


# --- negation normal form ---------------------------------------------------


def _negate_rel_atoms(formula, rel):
    """Substitute R / !R for the given fixed-point relation symbol."""
    if isinstance(formula, Atom):
        if formula.rel == rel:
            return Atom(formula.rel, formula.args, not formula.negated)
        return formula
    if isinstance(formula, Eq):
        return formula
    if isinstance(formula, Not):
        return Not(_negate_rel_atoms(formula.sub, rel))
    if isinstance(formula, And):
        return And(_negate_rel_atoms(formula.left, rel), _negate_rel_atoms(formula.right, rel))
    if isinstance(formula, Or):
        return Or(_negate_rel_atoms(formula.left, rel), _negate_rel_atoms(formula.right, rel))
    if isinstance(formula, Quant):
        return Quant(formula.kind, formula.var, _negate_rel_atoms(formula.sub, rel))
    if formula.rel == rel:
        # The inner binder shadows the outer relation symbol.
        return formula
    return Fp(formula.kind, formula.rel, formula.params,
              _negate_rel_atoms(formula.body, rel), formula.args)


def to_nnf(formula, negate=False):
    """Push negation down to atoms; fixed points flip via lfp/gfp duality."""
    if isinstance(formula, Atom):
        if negate:
            return Atom(formula.rel, formula.args, not formula.negated)
        return formula
    if isinstance(formula, Eq):
        if negate:
            return Eq(formula.left, formula.right, not formula.negated)
        return formula
    if isinstance(formula, Not):
        return to_nnf(formula.sub, not negate)
    if isinstance(formula, And):
        left = to_nnf(formula.left, negate)
        right = to_nnf(formula.right, negate)
        return Or(left, right) if negate else And(left, right)
    if isinstance(formula, Or):
        left = to_nnf(formula.left, negate)
        right = to_nnf(formula.right, negate)
        return And(left, right) if negate else Or(left, right)
    if isinstance(formula, Quant):
        sub = to_nnf(formula.sub, negate)
        if negate:
            flipped = "forall" if formula.kind == "exists" else "exists"
            return Quant(flipped, formula.var, sub)
        return Quant(formula.kind, formula.var, sub)
    if isinstance(formula, Fp):
        if not negate:
            return Fp(formula.kind, formula.rel, formula.params,
                      to_nnf(formula.body), formula.args)
        flipped = "gfp" if formula.kind == "lfp" else "lfp"
        body = to_nnf(Not(_negate_rel_atoms(formula.body, formula.rel)))
        return Fp(flipped, formula.rel, formula.params, body, formula.args)
    raise ProvError(f"unknown formula node {formula!r}")


def is_nnf(formula):
    if isinstance(formula, (Atom, Eq)):
        return True
    if isinstance(formula, Not):
        return False
    if isinstance(formula, (And, Or)):
        return is_nnf(formula.left) and is_nnf(formula.right)
    if isinstance(formula, Quant):
        return is_nnf(formula.sub)
    return is_nnf(formula.body)


def check_poslfp(formula):
    """Reject gfp operators and non-positive bound-relation occurrences."""
    def walk(f, bound_rels):
        if isinstance(f, Atom):
            if f.negated and f.rel in bound_rels:
                raise NotPosLFP(
                    f"fixed-point relation {f.rel} occurs negatively"
                )
        elif isinstance(f, Eq):
            pass
        elif isinstance(f, Not):
            raise NotNNF("positivity check expects negation normal form")
        elif isinstance(f, (And, Or)):
            walk(f.left, bound_rels)
            walk(f.right, bound_rels)
        elif isinstance(f, Quant):
            walk(f.sub, bound_rels)
        else:
            if f.kind != "lfp":
                raise NotPosLFP("greatest fixed points are outside the fragment")
            walk(f.body, bound_rels | {f.rel})

    walk(formula, frozenset())


# --- interpretations --------------------------------------------------------


class KInterpretation:
    """A total valuation of instantiated literals over a finite universe.

    literal keys are (rel, args, positive); unlisted literals are 0 unless
    model_default is set, in which case an unlisted negated literal whose
    positive partner is 0 defaults to 1 (yielding a model-defining map).
    """

    def __init__(self, handle, universe, arities, values, model_default=False):
        self.handle = handle
        self.universe = tuple(universe)
        self.arities = dict(arities)
        self.values = {}
        self.model_default = model_default
        for (rel, args, positive), value in values.items():
            if rel not in self.arities:
                self.arities[rel] = len(args)
            elif self.arities[rel] != len(args):
                raise ArityError(
                    f"relation {rel} used with arities {self.arities[rel]} and {len(args)}"
                )
            for a in args:
                if a not in self.universe:
                    raise ProvError(f"literal argument {a!r} is not a universe element")
            self.values[(rel, tuple(args), positive)] = value

    def literal(self, rel, args, positive=True):
        key = (rel, tuple(args), positive)
        if key in self.values:
            return self.values[key]
        if self.model_default and not positive:
            pos = self.values.get((rel, tuple(args), True), self.handle.zero)
            if pos == self.handle.zero:
                return self.handle.one
        return self.handle.zero

    def equality(self, a, b, negated=False):
        truth = (a == b) != negated
        return self.handle.one if truth else self.handle.zero

    def literals(self):
        """All instantiated literal keys of the vocabulary."""
        out = []
        for rel, arity in sorted(self.arities.items()):
            for args in _tuples(self.universe, arity):
                out.append((rel, args, True))
                out.append((rel, args, False))
        return out


def _tuples(universe, arity):
    if arity == 0:
        return [()]
    shorter = _tuples(universe, arity - 1)
    return [t + (a,) for t in shorter for a in universe]


def is_model_defining(pi):
    zero = pi.handle.zero
    for rel, arity in pi.arities.items():
        for args in _tuples(pi.universe, arity):
            pos = pi.literal(rel, args, True)
            neg = pi.literal(rel, args, False)
            if (pos == zero) == (neg == zero):
                return False
    return True


@dataclass(frozen=True)
class Structure:
    universe: tuple
    relations: dict = field(default_factory=dict)  # rel -> frozenset of tuples
    arities: dict = field(default_factory=dict)

    def holds(self, rel, args):
        return tuple(args) in self.relations.get(rel, frozenset())


def induced_structure(pi):
    if not is_model_defining(pi):
        raise NotModelDefining("interpretation does not determine a structure")
    zero = pi.handle.zero
    relations = {}
    for rel, arity in pi.arities.items():
        relations[rel] = frozenset(
            args for args in _tuples(pi.universe, arity)
            if pi.literal(rel, args, True) != zero
        )
    return Structure(pi.universe, relations, dict(pi.arities))


def make_tracking_interpretation(structure, tracked, handle=None):
    """Dual-token interpretation: tracked literals get fresh token pairs,
    untracked ones their Boolean truth value."""
    handle = handle or get_semiring("dualnat")
    values = {}
    arities = dict(structure.arities)
    for rel, args, positive in tracked:
        args = tuple(args)
        holds = structure.holds(rel, args)
        if holds != positive:
            lit = f"{'' if positive else '!'}{rel}({','.join(args)})"
            raise TrackedFalseLiteral(f"tracked literal {lit} is false in the structure")
        token = f"{rel}_{'_'.join(args)}" if args else rel
        values[(rel, args, positive)] = handle.token(
            token if positive else negate_token(token)
        )
    for rel, arity in arities.items():
        for args in _tuples(structure.universe, arity):
            for positive in (True, False):
                key = (rel, args, positive)
                if key in values:
                    continue
                truth = structure.holds(rel, args) == positive
                values[key] = handle.one if truth else handle.zero
    return KInterpretation(handle, structure.universe, arities, values)


# --- compositional (FO) evaluation -------------------------------------------


def _resolve(term, env, universe):
    if term in env:
        return env[term]
    if term in universe:
        return term
    raise NotSentence(f"unbound variable {term!r}")


def fo_eval(pi, sentence):
    """Compositional semiring value of a first-order sentence."""
    handle = pi.handle

    def ev(f, env):
        if isinstance(f, Atom):
            args = tuple(_resolve(t, env, pi.universe) for t in f.args)
            return pi.literal(f.rel, args, not f.negated)
        if isinstance(f, Eq):
            a = _resolve(f.left, env, pi.universe)
            b = _resolve(f.right, env, pi.universe)
            return pi.equality(a, b, f.negated)
        if isinstance(f, Not):
            return ev(to_nnf(f), env)
        if isinstance(f, And):
            return handle.mul(ev(f.left, env), ev(f.right, env))
        if isinstance(f, Or):
            return handle.add(ev(f.left, env), ev(f.right, env))
        if isinstance(f, Quant):
            acc = handle.zero if f.kind == "exists" else handle.one
            combine = handle.add if f.kind == "exists" else handle.mul
            for a in pi.universe:
                acc = combine(acc, ev(f.sub, {**env, f.var: a}))
            return acc
        if isinstance(f, Fp):
            raise NotPosLFP("fo_eval handles first-order sentences only")
        raise ProvError(f"unknown formula node {f!r}")

    return ev(sentence, {})


# --- model-checking games -----------------------------------------------------


class MCGame:
    """A model-checking game plus the bookkeeping to valuate it.

    positions are (occurrence path, frozen environment); terminals map to
    instantiated literals (rel, args, positive) or ('=', a, b, negated).
    """

    def __init__(self, game, root, terminal_literals):
        self.game = game
        self.root = root
        self.terminal_literals = terminal_literals

    def basic_valuation(self, pi, player):
        handle = pi.handle
        f = {}
        for pos, lit in self.terminal_literals.items():
            if lit[0] == "=":
                _, a, b, negated = lit
                value = pi.equality(a, b, negated != (player == 1))
            else:
                rel, args, positive = lit
                f_positive = positive if player == 0 else not positive
                value = pi.literal(rel, args, f_positive)
            f[pos] = value
        return BasicValuation(handle, player, f)


def build_mc_game(universe, formula):
    """The game of an nnf formula over the universe.

    Verifier (Player 0) owns disjunctions, existential quantifiers, and the
    unique-move unfolding positions of fixed points; Falsifier (Player 1)
    owns conjunctions and universal quantifiers.
    """
    if not is_nnf(formula):
        raise NotNNF("model-checking games require negation normal form")
    universe = tuple(universe)
    owners = {}
    moves = []
    terminal_literals = {}
    # binder environment: rel -> (path of binder body, params)
    root = ((), frozenset())

    def env_dict(env):
        return dict(env)

    def build(f, path, env, binders):
        pos = (path, env)
        if pos in owners:
            return pos
        e = env_dict(env)
        if isinstance(f, Atom) and f.rel in binders:
            if f.negated:
                raise NotPosLFP(f"fixed-point relation {f.rel} occurs negatively")
            owners[pos] = 0
            body_path, params, body = binders[f.rel]
            args = tuple(_resolve(t, e, universe) for t in f.args)
            new_env = frozenset(zip(params, args))
            child = build(body, body_path, new_env, binders)
            moves.append((pos, child))
            return pos
        if isinstance(f, (Atom, Eq)):
            owners[pos] = TERMINAL
            if isinstance(f, Atom):
                args = tuple(_resolve(t, e, universe) for t in f.args)
                terminal_literals[pos] = (f.rel, args, not f.negated)
            else:
                a = _resolve(f.left, e, universe)
                b = _resolve(f.right, e, universe)
                terminal_literals[pos] = ("=", a, b, f.negated)
            return pos
        if isinstance(f, (And, Or)):
            owners[pos] = 0 if isinstance(f, Or) else 1
            for i, sub in enumerate((f.left, f.right)):
                relevant = frozenset(
                    (k, v) for k, v in env if k in _term_support(sub, binders)
                )
                child = build(sub, path + (i,), relevant, binders)
                moves.append((pos, child))
            return pos
        if isinstance(f, Quant):
            owners[pos] = 0 if f.kind == "exists" else 1
            for a in universe:
                sub_env = {**e, f.var: a}
                # Keep the bound variable even when the body ignores it:
                # collapsing the children would merge moves the owner can
                # choose between, undercounting in non-idempotent semirings.
                relevant = frozenset(
                    (k, v) for k, v in sub_env.items()
                    if k == f.var or k in _term_support(f.sub, binders)
                )
                child = build(f.sub, path + (0,), relevant, binders)
                moves.append((pos, child))
            return pos
        if isinstance(f, Fp):
            if f.kind != "lfp":
                raise NotPosLFP("greatest fixed points are outside the fragment")
            owners[pos] = 0
            args = tuple(_resolve(t, e, universe) for t in f.args)
            body_path = path + (0,)
            new_binders = {**binders, f.rel: (body_path, f.params, f.body)}
            child = build(f.body, body_path, frozenset(zip(f.params, args)), new_binders)
            moves.append((pos, child))
            return pos
        raise ProvError(f"unknown formula node {f!r}")

    build(formula, (), frozenset(), {})
    game = GameGraph(owners, moves)
    return MCGame(game, root, terminal_literals)


def _term_support(formula, binders):
    """Terms that can influence the subgame: free terms, plus the arguments
    of bound fixed-point relations anywhere below (their instantiation
    depends on the environment at the atom)."""
    return free_variables(formula)


def game_eval(pi, sentence, player=0, config=None):
    """Value of the model-checking game at the root, for either player."""
    nnf = to_nnf(sentence)
    mc = build_mc_game(pi.universe, nnf)
    basic = mc.basic_valuation(pi, player)
    if mc.game.is_acyclic():
        return acyclic_valuation(mc.game, basic)[mc.root]
    if player == 1:
        raise NotPosLFP(
            "falsifier valuations of fixed-point games are outside the fragment"
        )
    check_poslfp(nnf)
    system = build_system(mc.game, basic)
    return kleene_lfp(system, config)[mc.root]


# --- direct posLFP semantics --------------------------------------------------


def poslfp_eval_direct(pi, sentence, config=None):
    """Fixed-point semantics: iterate the update operator on relation
    valuations, innermost-first, with the solver's saturation policy."""
    handle = pi.handle
    nnf = to_nnf(sentence)
    check_poslfp(nnf)
    config = config or SolverConfig()

    def ev(f, env, rel_env):
        if isinstance(f, Atom):
            args = tuple(_resolve(t, env, pi.universe) for t in f.args)
            if f.rel in rel_env:
                return rel_env[f.rel][args]
            return pi.literal(f.rel, args, not f.negated)
        if isinstance(f, Eq):
            a = _resolve(f.left, env, pi.universe)
            b = _resolve(f.right, env, pi.universe)
            return pi.equality(a, b, f.negated)
        if isinstance(f, And):
            return handle.mul(ev(f.left, env, rel_env), ev(f.right, env, rel_env))
        if isinstance(f, Or):
            return handle.add(ev(f.left, env, rel_env), ev(f.right, env, rel_env))
        if isinstance(f, Quant):
            acc = handle.zero if f.kind == "exists" else handle.one
            combine = handle.add if f.kind == "exists" else handle.mul
            for a in pi.universe:
                acc = combine(acc, ev(f.sub, {**env, f.var: a}, rel_env))
            return acc
        if isinstance(f, Fp):
            table = _lfp_table(f, env, rel_env)
            args = tuple(_resolve(t, env, pi.universe) for t in f.args)
            return table[args]
        raise ProvError(f"unknown formula node {f!r}")

    def _lfp_table(f, env, rel_env):
        tuples = _tuples(pi.universe, len(f.params))
        g = {args: handle.zero for args in tuples}
        n = len(tuples)
        max_iter = 4 * n + 16
        threshold = config.threshold_for(n)

        def step(current):
            return {
                args: ev(f.body, dict(zip(f.params, args)), {**rel_env, f.rel: current})
                for args in tuples
            }

        # Same early exit as the equation solver: multiplicative bodies can
        # square values every round, so bail to the saturation phase once
        # any entry blows past this cap.
        blowup = max(threshold + 1, 1 << 20)
        for _ in range(max_iter):
            nxt = step(g)
            if nxt == g:
                return g
            g = nxt
            if _blown_up(handle, g.values(), blowup, "lfp"):
                break
        for _ in range(2):
            state = dict(g)
            for _ in range(min(max_iter + threshold * n, 100_000)):
                nxt = step(state)
                moving = [args for args in tuples if nxt[args] != state[args]]
                if not moving:
                    break
                for args in moving:
                    nxt[args] = handle.saturate(nxt[args], threshold, "lfp")
                if nxt == state:
                    break
                state = nxt
            if step(state) == state:
                return state
            threshold *= 2
            g = state
        from .errors import NoConvergence

        raise NoConvergence("fixed-point relation valuation did not stabilize")

    return ev(nnf, {}, {})


def model_check(structure, sentence):
    """Naive Boolean model checker (the test oracle for soundness)."""
    def ev(f, env, rel_env):
        if isinstance(f, Atom):
            args = tuple(_resolve(t, env, structure.universe) for t in f.args)
            if f.rel in rel_env:
                holds = args in rel_env[f.rel]
            else:
                holds = structure.holds(f.rel, args)
            return holds != f.negated
        if isinstance(f, Eq):
            a = _resolve(f.left, env, structure.universe)
            b = _resolve(f.right, env, structure.universe)
            return (a == b) != f.negated
        if isinstance(f, Not):
            return not ev(f.sub, env, rel_env)
        if isinstance(f, And):
            return ev(f.left, env, rel_env) and ev(f.right, env, rel_env)
        if isinstance(f, Or):
            return ev(f.left, env, rel_env) or ev(f.right, env, rel_env)
        if isinstance(f, Quant):
            results = (ev(f.sub, {**env, f.var: a}, rel_env) for a in structure.universe)
            return any(results) if f.kind == "exists" else all(results)
        if isinstance(f, Fp):
            current = set()
            tuples = _tuples(structure.universe, len(f.params))
            while True:
                nxt = {
                    args for args in tuples
                    if ev(f.body, dict(zip(f.params, args)), {**rel_env, f.rel: current})
                }
                if nxt == current:
                    break
                current = nxt
            args = tuple(_resolve(t, env, structure.universe) for t in f.args)
            if f.kind == "lfp":
                return args in current
            raise NotPosLFP("greatest fixed points are outside the fragment")
        raise ProvError(f"unknown formula node {f!r}")

    return ev(sentence, {}, {})
