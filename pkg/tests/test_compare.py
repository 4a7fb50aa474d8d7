import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import pair_count_tau
from xarjudge.compare import SurveyBenchmark, compare, render_report
from xarjudge.errors import ModelSetMismatch, NotSamePermutationDomain, RosterMismatch, TooFewItems
from xarjudge.model import Strategy
from xarjudge.ranking import kendall_tau, rank_models
from xarjudge.scoring import RepetitionResult, finalize_board

IDS = ("proto", "lime", "gradcam")


def board_from(normalized, reps=1, strategy=Strategy.BEST_AMONG_K, ids=IDS):
    rep = RepetitionResult({m: round(v * 34) for m, v in normalized.items()}, dict(normalized), 34)
    return finalize_board(strategy, ids, [rep] * reps)


class TestRankModels:
    def test_descending(self):
        r = rank_models({"proto": 0.8, "lime": 0.5, "grad": 0.2}, ["grad", "lime", "proto"])
        assert r.order == ("proto", "lime", "grad")
        assert not r.has_ties

    def test_tie_keeps_roster_order_and_flags(self):
        r = rank_models({"m1": 0.5, "m2": 0.5}, ["m1", "m2"])
        assert list(r) == ["m1", "m2"]
        assert r.tied == (("m1", "m2"),)

    def test_single(self):
        assert rank_models({"m1": 0.1}, ["m1"]).order == ("m1",)

    def test_roster_mismatch(self):
        with pytest.raises(RosterMismatch):
            rank_models({"m1": 0.1}, ["m1", "m2"])


class TestKendall:
    def test_identical(self):
        assert kendall_tau(["a", "b", "c"], ["a", "b", "c"]) == 1.0

    def test_reversed(self):
        assert kendall_tau(["a", "b", "c"], ["c", "b", "a"]) == -1.0

    def test_one_adjacent_swap(self):
        expected = pair_count_tau(["a", "b", "c"], ["a", "c", "b"])
        assert expected == pytest.approx(1 / 3, abs=1e-12)
        assert kendall_tau(["a", "b", "c"], ["a", "c", "b"]) == pytest.approx(expected, abs=1e-12)

    def test_errors(self):
        with pytest.raises(NotSamePermutationDomain):
            kendall_tau(["a", "b"], ["a", "c"])
        with pytest.raises(NotSamePermutationDomain):
            kendall_tau(["a", "a"], ["a", "a"])
        with pytest.raises(TooFewItems):
            kendall_tau(["a"], ["a"])

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 8).flatmap(lambda n: st.tuples(
        st.permutations(list(range(n))), st.permutations(list(range(n))))))
    def test_properties(self, ab):
        a, b = ab
        tau = kendall_tau(a, b)
        assert -1 <= tau <= 1
        assert tau == kendall_tau(b, a)
        assert tau == pytest.approx(pair_count_tau(a, b), abs=1e-12)
        assert kendall_tau(a, a) == 1.0
        assert kendall_tau(a, list(reversed(a))) == -1.0


class TestCompare:
    SURVEY = SurveyBenchmark("marble", {"proto": 0.75, "lime": 0.6, "gradcam": 0.45}, 84)

    def test_matching_order(self):
        rep = compare(board_from({"proto": 1.0, "lime": 0.3, "gradcam": 0.1}), self.SURVEY)
        assert rep.exact_rank_match
        assert rep.kendall_tau == 1.0
        assert rep.per_model_delta["proto"] == pytest.approx(0.25)

    def test_swapped_tail(self):
        rep = compare(board_from({"proto": 1.0, "lime": 0.1, "gradcam": 0.3}), self.SURVEY)
        assert not rep.exact_rank_match
        assert rep.kendall_tau == pytest.approx(1 / 3, abs=1e-12)
        assert rep.llm_ranking == ("proto", "gradcam", "lime")

    def test_disjoint(self):
        with pytest.raises(ModelSetMismatch):
            compare(board_from({"proto": 1.0, "lime": 0.1, "gradcam": 0.3}),
                    SurveyBenchmark("x", {"a": 0.1, "b": 0.2, "c": 0.3}, 1))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 34), min_size=3, max_size=3),
           st.lists(st.floats(0.01, 1), min_size=3, max_size=3, unique=True),
           st.sampled_from([lambda x: x ** 3, lambda x: math.log(x), lambda x: 2 * x + 7]))
    def test_invariant_under_monotone_transform(self, totals, survey_vals, f):
        norm = {m: t / 34 for m, t in zip(IDS, totals)}
        board = board_from(norm)
        survey = SurveyBenchmark("s", dict(zip(IDS, survey_vals)), 10)
        warped = SurveyBenchmark("s", {m: f(v) for m, v in survey.scores.items()}, 10)
        a, b = compare(board, survey), compare(board, warped)
        assert (a.kendall_tau, a.exact_rank_match, a.survey_ranking) == \
               (b.kendall_tau, b.exact_rank_match, b.survey_ranking)


class TestRenderReport:
    def test_golden(self):
        board = board_from({"proto": 1.0, "lime": 8 / 34, "gradcam": 2 / 34}, reps=5)
        expected = (
            "strategy: best_among_k\n"
            "windows scored: 34\n"
            "repetitions: 5\n"
            "\n"
            "model          raw     mean      std\n"
            "proto           34   1.0000   0.0000\n"
            "lime             8   0.2353   0.0000\n"
            "gradcam          2   0.0588   0.0000\n"
            "\n"
            "ranking: proto > lime > gradcam\n"
            "winner: proto\n"
        )
        assert render_report(board) == expected

    def test_with_comparison(self):
        board = board_from({"proto": 1.0, "lime": 0.2, "gradcam": 0.1})
        text = render_report(board, compare(board, TestCompare.SURVEY))
        assert "kendall tau: 1.0000" in text
        assert "exact rank match: yes" in text
        assert "single repetition" in text

    def test_tied_winners(self):
        board = board_from({"proto": 0.5, "lime": 0.5, "gradcam": 0.1})
        assert "winner: proto, lime (tie)" in render_report(board)
