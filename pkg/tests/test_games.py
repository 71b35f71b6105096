"""Games: strategy sums, play products, separation, bisimulation, truncation."""

import pytest

from provgames.errors import BudgetExceeded, CyclicGame, MalformedGame, ProvError
from provgames.games import (
    TERMINAL,
    BasicValuation,
    GameGraph,
    Objective,
    Strategy,
    absorption_dominant_flags,
    absorption_dominates,
    acyclic_valuation,
    check_separating,
    enumerate_strategies,
    enumerate_truncated_strategies,
    play_values,
    strategy_value,
    truncate,
    validate_game,
    verify_counting_bisim,
    winning_region,
)
from provgames.infinity import INF
from provgames.semirings import get_semiring
from provgames.solver import solve_game

from genutil import make_rng, random_acyclic_game, token_valuation

NATPOLY = get_semiring("natpoly")


def absdom_game():
    return GameGraph(
        {"u": 1, "v": 1, "w": 1, "z": 0, "s": TERMINAL, "t": TERMINAL},
        [("u", "v"), ("u", "w"), ("v", "z"), ("w", "z"), ("z", "s"), ("z", "t")],
    )


def reach_game():
    return GameGraph(
        {"v": 0, "w": 1, "s": TERMINAL, "t": TERMINAL},
        [("v", "s"), ("v", "w"), ("w", "v"), ("w", "t")],
    )


def test_validate_game_reports():
    g = absdom_game()
    report = validate_game(g)
    assert report == {"positions": 6, "moves": 6, "acyclic": True, "unreachable": []}
    assert not validate_game(reach_game())["acyclic"]


def test_malformed_games_rejected():
    with pytest.raises(MalformedGame):
        GameGraph({"v": 0}, []).check_structure()  # non-terminal without moves
    with pytest.raises(MalformedGame):
        g = GameGraph({"v": 0, "t": TERMINAL, "u": TERMINAL},
                      [("v", "t"), ("t", "u")])
        g.check_structure()  # terminal with a move
    with pytest.raises(MalformedGame):
        GameGraph({"v": 0, "t": TERMINAL}, [("v", "t"), ("v", "t")])


def test_backward_induction_example():
    g = absdom_game()
    basic = token_valuation(g, NATPOLY)
    values = acyclic_valuation(g, basic)
    assert values["u"] == NATPOLY.parse_value("s^2 + 2*s*t + t^2")
    assert values["z"] == NATPOLY.parse_value("s + t")


def test_strategy_census_example():
    g = absdom_game()
    basic = token_valuation(g, NATPOLY)
    strategies = enumerate_strategies(g, 0, "u")
    values = sorted(NATPOLY.format_value(strategy_value(s, g, basic))
                    for s in strategies)
    assert values == ["s*t", "s*t", "s^2", "t^2"]
    assert all(absorption_dominant_flags(strategies, g))


def test_strategy_sum_theorem_on_corpus():
    rng = make_rng(salt=1)
    for _ in range(120):
        g = random_acyclic_game(rng)
        basic = token_valuation(g, NATPOLY)
        values = acyclic_valuation(g, basic)
        for root in g.positions:
            if g.is_terminal(root):
                continue
            total = NATPOLY.zero
            for s in enumerate_strategies(g, 0, root):
                total = NATPOLY.add(total, strategy_value(s, g, basic))
            assert total == values[root]


def test_play_product_lemma_with_trivial_h():
    rng = make_rng(salt=2)
    for _ in range(60):
        g = random_acyclic_game(rng, max_positions=9)
        basic = token_valuation(g, NATPOLY)  # h = 1 everywhere
        for root in g.positions:
            if g.is_terminal(root):
                continue
            for s in enumerate_strategies(g, 0, root):
                product = NATPOLY.one
                for pv in play_values(s, g, basic):
                    product = NATPOLY.mul(product, pv)
                assert product == strategy_value(s, g, basic)


def test_play_product_counterexample():
    # Player 1 moves v -> w (value a for Player 0), then to s or t (value 1).
    g = GameGraph(
        {"v": 1, "w": 1, "s": TERMINAL, "t": TERMINAL},
        [("v", "w"), ("w", "s"), ("w", "t")],
    )
    a = NATPOLY.token("a")
    basic = BasicValuation(NATPOLY, 0, {"s": NATPOLY.one, "t": NATPOLY.one},
                           {("v", "w"): a})
    (s,) = enumerate_strategies(g, 0, "v")
    assert strategy_value(s, g, basic) == a
    product = NATPOLY.one
    for pv in play_values(s, g, basic):
        product = NATPOLY.mul(product, pv)
    assert product == NATPOLY.mul(a, a)
    assert product != strategy_value(s, g, basic)


def test_enumeration_budget_on_cyclic_game():
    g = reach_game()
    basic = token_valuation(g, NATPOLY)
    with pytest.raises(BudgetExceeded):
        enumerate_strategies(g, 0, "v", max_nodes=500)
    with pytest.raises(CyclicGame):
        acyclic_valuation(g, basic)


def test_truncated_strategy_values():
    si = get_semiring("sorpinf")
    g = reach_game()
    basic = token_valuation(g, si)
    strategies, _, _ = enumerate_truncated_strategies(g, basic, 0, "v", 6)
    mus = {si.format_value(strategy_value(s, g, basic, "mu")) for s in strategies}
    assert "s" in mus and "0" in mus
    infinite = [s for s in strategies if s.admits_infinite]
    assert infinite and all(
        strategy_value(s, g, basic, "mu") == si.zero for s in infinite
    )


def test_infinite_strategy_nu_value():
    si = get_semiring("sorpinf")
    g = reach_game()
    basic = token_valuation(g, si)
    always_w = Strategy(owner=0, root="v", position_counts={"t": INF},
                        move_counts={}, admits_infinite=True)
    assert strategy_value(always_w, g, basic, "mu") == si.zero
    assert strategy_value(always_w, g, basic, "nu") == si.parse_value("t^inf")


def test_absorption_dominance_matches_nu_mu_order():
    si = get_semiring("sorpinf")
    g = reach_game()
    basic = token_valuation(g, si)
    strategies, _, _ = enumerate_truncated_strategies(g, basic, 0, "v", 5)
    for s1 in strategies:
        for s2 in strategies:
            dominates = absorption_dominates(s1, s2, g)
            nu1 = strategy_value(s1, g, basic, "nu")
            nu2 = strategy_value(s2, g, basic, "nu")
            mu1 = strategy_value(s1, g, basic, "mu")
            mu2 = strategy_value(s2, g, basic, "mu")
            if dominates:
                assert si.leq(nu2, nu1)
                assert si.leq(mu2, mu1)


def test_truncation_boundary_values():
    si = get_semiring("sorpinf")
    g = reach_game()
    basic = token_valuation(g, si)
    tg, tb, cutoffs = truncate(g, basic, 3, boundary="one")
    assert cutoffs and all(tb.terminal_value(c) == si.one for c in cutoffs)
    tg0, tb0, cutoffs0 = truncate(g, basic, 3, boundary="zero")
    assert all(tb0.terminal_value(c) == si.zero for c in cutoffs0)
    assert tg.is_acyclic() and tg0.is_acyclic()


def test_separation_propagates_on_random_games():
    rng = make_rng(salt=3)
    nat = get_semiring("nat")
    for _ in range(80):
        g = random_acyclic_game(rng, max_positions=8)
        # Separating terminal pair: f1(t) = 0 wherever f0(t) != 0.
        f0, f1 = {}, {}
        for t in g.terminals:
            if rng.random() < 0.5:
                f0[t], f1[t] = rng.randint(1, 3), 0
            else:
                f0[t], f1[t] = 0, rng.randint(1, 3)
        b0 = BasicValuation(nat, 0, f0)
        b1 = BasicValuation(nat, 1, f1)
        assert check_separating(g, b0, b1, "separating")["all"]
        assert check_separating(g, b0, b1, "weak")["all"]


def test_strong_separation_fails_without_positivity():
    dn = get_semiring("dualnat")
    g = GameGraph({"v": 0, "t1": TERMINAL, "t2": TERMINAL},
                  [("v", "t1"), ("v", "t2")])
    b0 = BasicValuation(dn, 0, {"t1": dn.zero, "t2": dn.zero})
    b1 = BasicValuation(dn, 1, {"t1": dn.token("p"), "t2": dn.token("~p")})
    report = check_separating(g, b0, b1, "strong")
    assert report["verdicts"]["t1"] and report["verdicts"]["t2"]
    # At v: f1(v) = p * ~p = 0 and f0(v) = 0, so f0 + f1 = 0.
    assert not report["verdicts"]["v"]


def test_strong_separation_propagates_on_positive_handle():
    rng = make_rng(salt=4)
    nat = get_semiring("nat")
    for _ in range(60):
        g = random_acyclic_game(rng, max_positions=8)
        f0, f1 = {}, {}
        for t in g.terminals:
            if rng.random() < 0.5:
                f0[t], f1[t] = rng.randint(1, 3), 0
            else:
                f0[t], f1[t] = 0, rng.randint(1, 3)
        b0 = BasicValuation(nat, 0, f0)
        b1 = BasicValuation(nat, 1, f1)
        assert check_separating(g, b0, b1, "strong")["all"]


def test_counting_bisimulation_preserves_valuations():
    # Two copies of the same game with renamed positions.
    g1 = absdom_game()
    rename = {v: v.upper() for v in g1.owners}
    g2 = GameGraph({rename[v]: o for v, o in g1.owners.items()},
                   [(rename[u], rename[v]) for u, v in g1.moves])
    b1 = token_valuation(g1, NATPOLY)
    b2 = BasicValuation(NATPOLY, 0,
                        {rename[t]: NATPOLY.token(t) for t in g1.terminals})
    relation = [(v, rename[v]) for v in g1.owners]
    report = verify_counting_bisim(g1, g2, relation, basics={0: (b1, b2)})
    assert report["valid"]
    v1 = acyclic_valuation(g1, b1)
    v2 = acyclic_valuation(g2, b2)
    for v, w in relation:
        assert v1[v] == v2[w]


def test_counting_bisim_detects_owner_and_count_mismatch():
    g1 = GameGraph({"v": 0, "t": TERMINAL}, [("v", "t")])
    g2 = GameGraph({"v": 1, "t": TERMINAL}, [("v", "t")])
    report = verify_counting_bisim(g1, g2, [("v", "v"), ("t", "t")])
    assert not report["valid"]
    g3 = GameGraph({"v": 0, "t": TERMINAL, "u": TERMINAL},
                   [("v", "t"), ("v", "u")])
    report = verify_counting_bisim(g1, g3, [("v", "v"), ("t", "t"), ("t", "u")])
    assert not report["valid"]


def test_winning_regions_against_solver():
    bool_sr = get_semiring("bool")
    g = reach_game()
    basic_reach = BasicValuation(bool_sr, 0, {"s": 1, "t": 0})
    result = solve_game(g, basic_reach, "mu")
    region = winning_region(g, Objective("reachability", frozenset({"s"})), 0)
    for v in g.positions:
        assert (result[v] != 0) == (v in region)
    basic_safe = BasicValuation(bool_sr, 0, {"s": 1, "t": 0})
    result = solve_game(g, basic_safe, "nu")
    region = winning_region(g, Objective("safety", frozenset({"t"})), 0)
    for v in g.positions:
        assert (result[v] != 0) == (v in region)


def test_strategy_value_rejects_infinite_in_acyclic_mode():
    si = get_semiring("sorpinf")
    g = reach_game()
    basic = token_valuation(g, si)
    s = Strategy(owner=0, root="v", position_counts={"t": INF},
                 move_counts={}, admits_infinite=True)
    with pytest.raises(ProvError):
        strategy_value(s, g, basic, "acyclic")
