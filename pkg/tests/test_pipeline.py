import json
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pidpoker.handeval import Category, parse_cards, score_hand, showdown_ceiling
from pidpoker.handparse import (
    ActionKind,
    ActionRecord,
    HandRecord,
    Payout,
    Reveal,
    Seat,
    Street,
    parse_hand,
    parse_stream,
)
from pidpoker.pipeline import (
    DEFAULT_LEVELS,
    TABLE_S1,
    AnalysisConfig,
    BinningSpec,
    EmptyInput,
    InsufficientData,
    LevelCutoffs,
    LedgerEntry,
    MissingCutoff,
    NegativeAmount,
    NonHeadsUpHand,
    PlayerLedger,
    RoundObservation,
    SkillClass,
    StrengthState,
    Variant,
    WagerState,
    bin_strength,
    bin_wager,
    bootstrap_ci,
    build_joint,
    classify,
    equal_frequency_cutoff,
    extract_observations,
    fish_max_mean,
    fit_bins,
    ledger_build,
    measures,
    run_analysis,
)
from pidpoker.pipeline.bootstrap import cluster_tables
from pidpoker.pipeline.observations import action_order, revealed_score
from pidpoker.synthgen import AgentPolicy, SimConfig, simulate_session

FIXTURES = Path(__file__).parent / "fixtures"
NO, S, L = WagerState.NO_WAGER, WagerState.SMALL, WagerState.LARGE
SHARK, FISH, OTHER = SkillClass.SHARK, SkillClass.FISH, SkillClass.OTHER


def two_player_hand(hand_id="1", level=50, a=50, b=50, winner="A", rake=0, showdown=()):
    """A checked-down preflop where A and B put in ``a`` and ``b`` cents."""
    pot = a + b
    return HandRecord(
        hand_id=hand_id,
        timestamp="t",
        blind_cents=level,
        seats=(Seat("A", 1, 10_000), Seat("B", 2, 10_000)),
        streets=(Street("preflop", (), (
            ActionRecord("A", ActionKind.POST_BLIND, a),
            ActionRecord("B", ActionKind.POST_BLIND, b),
        )),),
        showdown=showdown,
        pot_cents=pot,
        rake_cents=rake,
        collected=(Payout(winner, pot - rake),),
    )


def ledger_of(means_by_player, level=50):
    return PlayerLedger({(p, level): LedgerEntry(1, m) for p, m in means_by_player.items()})


@pytest.fixture(scope="module")
def fixture_001():
    return parse_hand((FIXTURES / "fixture_001.txt").read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def handwritten():
    return parse_stream((FIXTURES / "handwritten.txt").read_text(encoding="utf-8"))[0]


REF = BinningSpec({
    50: LevelCutoffs(50, showdown_ceiling(Category.PAIR, 4), 79),
    200: LevelCutoffs(200, showdown_ceiling(Category.PAIR, 4), 79),
})


class TestLedger:
    def test_winner_pays_rake(self):
        led = ledger_build([two_player_hand(rake=5)])
        assert led[("A", 50)].mean == 45
        assert led[("B", 50)].mean == -50

    def test_break_even(self):
        led = ledger_build([two_player_hand("1", winner="A"), two_player_hand("2", winner="B")])
        assert led[("A", 50)] == LedgerEntry(2, 0) and led[("A", 50)].mean == 0

    def test_levels_are_separate_rows(self):
        led = ledger_build([two_player_hand("1", level=50), two_player_hand("2", level=100, a=100, b=100, winner="B")])
        assert led.levels() == [50, 100]
        assert set(led.at_level(50)) == {"A", "B"} and led[("A", 100)].mean == -100

    def test_mean_is_exact(self):
        led = ledger_build([two_player_hand(str(i), winner="A" if i else "B") for i in range(3)])
        assert led[("A", 50)].mean == Fraction(50, 3)

    def test_empty(self):
        assert ledger_build([]) == {}


class TestClassify:
    def test_positive_mean_is_shark(self):
        assert classify(ledger_of({"p": 1, "q": -1}), 50)["p"] is SHARK

    def test_zero_mean_is_not_shark(self):
        assert classify(ledger_of({"p": 0, "q": 5}), 50)["p"] is FISH

    def test_reference_fish_cutoff(self):
        # worst half of the unprofitable players at the $0.50 level
        c = classify(ledger_of({"a": -150, "b": -70, "c": -30, "d": -20, "e": 40}), 50)
        assert (c["a"], c["b"], c["c"], c["d"], c["e"]) == (FISH, FISH, OTHER, OTHER, SHARK)
        assert fish_max_mean(ledger_of({"a": -150, "b": -70, "c": -30, "d": -20}), 50) == -70

    def test_singleton_loser_is_fish(self):
        assert classify(ledger_of({"a": -3, "b": 3}), 50) == {"a": FISH, "b": SHARK}

    def test_ties_straddling_the_boundary_are_other(self):
        c = classify(ledger_of({"a": -9, "b": -5, "c": -5, "d": -1}), 50)
        assert c == {"a": FISH, "b": OTHER, "c": OTHER, "d": OTHER}

    def test_only_requested_level(self):
        led = PlayerLedger({("a", 50): LedgerEntry(1, 5), ("a", 100): LedgerEntry(1, -5)})
        assert classify(led, 100) == {"a": FISH}

    @settings(max_examples=200)
    @given(st.dictionaries(st.text(min_size=1, max_size=4), st.integers(-50, 50), min_size=1, max_size=30))
    def test_partition(self, means):
        c = classify(ledger_of(means), 50)
        assert set(c) == set(means)
        losers = [m for m in means.values() if m <= 0]
        fish = [means[p] for p, k in c.items() if k is FISH]
        assert all((k is SHARK) == (means[p] > 0) for p, k in c.items())
        assert len(fish) <= (len(losers) + 1) // 2
        others = [means[p] for p, k in c.items() if k is OTHER]
        assert all(f < o for f in fish for o in others)


class TestBinWager:
    @pytest.mark.parametrize("level", DEFAULT_LEVELS)
    def test_rules_at_every_level(self, level):
        assert bin_wager(None, level) is NO
        assert bin_wager(0, level) is NO
        assert bin_wager(1, level) is S
        assert bin_wager(level, level) is S
        assert bin_wager(level + 1, level) is L

    def test_examples(self):
        assert bin_wager(200, 200) is S and bin_wager(201, 200) is L

    def test_explicit_cutoff(self):
        assert bin_wager(75, 50, cutoff=100) is S

    def test_negative(self):
        with pytest.raises(NegativeAmount):
            bin_wager(-1, 50)


class TestBinStrength:
    def test_reference_pairs(self):
        spec = BinningSpec.table_s1()
        assert bin_strength(score_hand("3c 3d", "Ah 9s 7c"), spec, 100) is StrengthState.WEAK
        assert bin_strength(score_hand("9c 9d", "Ah 2s 7c"), spec, 100) is StrengthState.STRONG
        assert bin_strength(None, spec, 100) is StrengthState.NOT_OBSERVED

    def test_preflop_scale(self):
        assert bin_strength(score_hand("As Ad"), REF, 50) is StrengthState.STRONG
        assert bin_strength(score_hand("7s 2d"), REF, 50) is StrengthState.WEAK

    def test_missing_level(self):
        with pytest.raises(MissingCutoff):
            bin_strength(score_hand("As Ad"), REF, 25)

    def test_missing_scale(self):
        spec = BinningSpec({50: LevelCutoffs(50)})
        with pytest.raises(MissingCutoff):
            bin_strength(score_hand("As Ad", "2c 3c 4c"), spec, 50)


class TestFitBins:
    def test_median_split(self):
        assert fit_bins({1: [1, 1, 2, 2]})[1].max_small_wager == 1

    def test_identical_values(self):
        spec = fit_bins({50: [30, 30, 30]})
        assert spec[50].max_small_wager == 30
        assert bin_wager(30, 50, spec[50].max_small_wager) is S

    def test_zeros_ignored_and_scales_split(self):
        scores = [score_hand("As Ad"), score_hand("7s 2d"), score_hand("3c 3d", "Ah 9s 7c")]
        spec = fit_bins({50: [0, 0, 10, 20]}, {50: scores})
        c = spec[50]
        assert c.max_small_wager == 10
        assert c.max_weak_preflop == scores[1].ordinal
        assert c.max_weak_showdown == scores[2].ordinal

    def test_insufficient(self):
        with pytest.raises(InsufficientData):
            fit_bins({50: [0, 0]})
        with pytest.raises(InsufficientData):
            equal_frequency_cutoff([])

    def test_reference_corpus_cutoff_equals_blind(self):
        # wagers spread symmetrically around the $4.00 blind
        wagers = [100, 200, 300, 400, 400, 400, 600, 800, 1200, 1600]
        assert fit_bins({400: wagers})[400].max_small_wager == 400

    @settings(max_examples=300)
    @given(st.lists(st.integers(1, 20), min_size=1, max_size=60))
    def test_balance(self, values):
        c = equal_frequency_cutoff(values)
        small = sum(v <= c for v in values)
        gap = abs(2 * small - len(values))
        # most balanced of all observed cutoffs, smallest on ties
        gaps = {v: abs(2 * sum(x <= v for x in values) - len(values)) for v in set(values)}
        assert gap == min(gaps.values()) and c == min(v for v, g in gaps.items() if g == gap)
        above = [v for v in sorted(set(values)) if v > c]
        ties = Counter(values)
        assert gap <= max(ties[c], ties[above[0]] if above else 0)


class TestObservations:
    def test_action_order(self, fixture_001, handwritten):
        assert action_order(fixture_001) == ("3kJ9xq", "Vb72mZ")
        assert action_order(handwritten[0]) == ("Vb72mZ", "3kJ9xq")
        assert action_order(handwritten[1]) == ("猫の手", "Ärger_ü")

    def test_four_street_showdown_hand(self, fixture_001):
        obs = extract_observations([fixture_001], {}, Variant.MAIN, REF)
        assert [o.street for o in obs] == ["preflop", "flop", "turn", "river"]
        assert [(o.w1, o.w2) for o in obs] == [(L, L), (L, L), (NO, NO), (L, L)]
        assert all(o.p1 is StrengthState.STRONG for o in obs)
        assert {o.hero for o in obs} == {"Vb72mZ"} and {o.hero_skill for o in obs} == {OTHER}

    def test_street_scores_against_street_boards(self, fixture_001):
        # As Qd on each street's board, packed by hand
        flop = (1 << 20) | (14 << 16) | (12 << 12) | (7 << 8) | (2 << 4)
        turn = (1 << 20) | (14 << 16) | (13 << 12) | (12 << 8) | (7 << 4)
        scores = [revealed_score(fixture_001, "Vb72mZ", st.board) for st in fixture_001.streets]
        assert scores[0].scale == "preflop"
        assert [s.ordinal for s in scores[1:]] == [flop, turn, turn]
        assert revealed_score(fixture_001, "3kJ9xq", fixture_001.streets[3].board) is None

    def test_fold_preflop_is_one_observation(self, handwritten):
        obs = extract_observations([handwritten[0]], {}, Variant.MAIN, REF)
        assert len(obs) == 1
        o = obs[0]
        assert (o.w1, o.p1, o.w2, o.hero) == (NO, StrengthState.NOT_OBSERVED, NO, "3kJ9xq")

    def test_streets_without_actions_are_skipped(self, handwritten):
        obs = extract_observations([handwritten[1]], {}, Variant.MAIN, REF)
        assert [o.street for o in obs] == ["preflop", "flop", "turn"]
        assert [(o.w1, o.w2) for o in obs] == [(L, L), (L, L), (L, L)]

    def test_preflop_only(self, fixture_001):
        obs = extract_observations([fixture_001], {}, Variant.PREFLOP_ONLY, REF)
        assert len(obs) == 1 and obs[0].street == "preflop"

    def test_both_positions(self, fixture_001):
        obs = extract_observations([fixture_001], {50: {"3kJ9xq": FISH}}, Variant.BOTH_POSITIONS, REF)
        assert len(obs) == 8
        firsts = [o for o in obs if o.hero_position == "first"]
        assert {o.hero for o in firsts} == {"3kJ9xq"} and {o.hero_skill for o in firsts} == {FISH}
        assert all(o.p1 is StrengthState.NOT_OBSERVED for o in firsts)

    def test_showdown_only_subset(self, fixture_001, handwritten):
        hands = [fixture_001, handwritten[0]]
        main = extract_observations(hands, {}, Variant.MAIN, REF)
        sd = extract_observations(hands, {}, Variant.SHOWDOWN_ONLY, REF)
        assert all(o.p1 is not StrengthState.NOT_OBSERVED for o in sd)
        assert set(sd) <= set(main) and len(sd) == 4

    def test_rejects_multiway(self, fixture_001):
        three = HandRecord(**{**fixture_001.__dict__, "seats": fixture_001.seats + (Seat("x", 3, 100),)})
        with pytest.raises(NonHeadsUpHand):
            extract_observations([three], {}, Variant.MAIN, REF)

    def test_fitted_wager_cutoff(self, fixture_001):
        spec = BinningSpec({50: LevelCutoffs(150, showdown_ceiling(Category.PAIR, 4), 79)})
        obs = extract_observations([fixture_001], {}, Variant.MAIN, spec, wager_cutoffs="fitted")
        assert [(o.w1, o.w2) for o in obs] == [(S, S), (L, L), (NO, NO), (L, L)]


def obs(w1, p1, w2, hand="h"):
    return RoundObservation(WagerState(w1), WagerState(w2), StrengthState(p1), 50, "preflop", "second", SHARK, hand)


class TestBuildJoint:
    def test_point_mass(self):
        d = build_joint([obs(1, 2, 0)])
        assert d.pmf[1, 2, 0] == 1.0 and d.pmf.sum() == 1.0

    def test_empty(self):
        with pytest.raises(EmptyInput):
            build_joint([])

    def test_uniform_cells(self):
        rng = np.random.default_rng(3)
        cells = rng.integers(0, 3, size=(27_000, 3))
        d = build_joint([obs(*c, hand=str(i)) for i, c in enumerate(cells)])
        assert np.allclose(d.pmf, 1 / 27, atol=0.004)

    def test_marginals_match_frequencies(self):
        data = [obs(0, 0, 0), obs(1, 0, 2), obs(1, 1, 2), obs(2, 2, 1)]
        d = build_joint(data)
        assert np.allclose(d.marginal_x(), [0.25, 0.5, 0.25])


class TestBootstrap:
    data = [obs(i % 2, (i // 2) % 3, (i * 7) % 3, hand=str(i // 3)) for i in range(300)]

    def test_constant_statistic(self):
        ci = bootstrap_ci(self.data, lambda c: {"k": 1.0}, resamples=50, seed=1)
        assert (ci["k"].low, ci["k"].high) == (1.0, 1.0)

    def test_deterministic(self):
        a = bootstrap_ci(self.data, measures, resamples=40, seed=9)
        b = bootstrap_ci(self.data, measures, resamples=40, seed=9)
        c = bootstrap_ci(self.data, measures, resamples=40, seed=10)
        assert a == b and a != c

    def test_contains_estimate(self):
        for iv in bootstrap_ci(self.data, measures, resamples=30, seed=2).values():
            assert iv.low <= iv.estimate <= iv.high

    def test_hand_clusters(self):
        tables = cluster_tables(self.data, "hand")
        assert tables.shape == (100, 27) and (tables.sum(axis=1) == 3).all()
        assert cluster_tables(self.data, "round").shape == (300, 27)

    def test_errors(self):
        with pytest.raises(InsufficientData):
            bootstrap_ci(self.data, measures, resamples=1)
        with pytest.raises(InsufficientData):
            bootstrap_ci([], measures, resamples=10)
        with pytest.raises(ValueError):
            cluster_tables(self.data, "player")

    def test_xor_synergy_interval(self):
        rng = np.random.default_rng(0)
        p1 = rng.integers(1, 3, size=10_000)
        w2 = rng.integers(0, 2, size=10_000)
        w1 = (p1 == 2) ^ (w2 == 1)
        data = [obs(int(a), int(b), int(c), hand=str(i)) for i, (a, b, c) in enumerate(zip(w1, p1, w2))]
        iv = bootstrap_ci(data, measures, resamples=200, seed=4)[("synergy", "")]
        assert iv.contains(iv.estimate) and iv.estimate == pytest.approx(1.0, abs=1e-3)
        assert iv.high - iv.low < 0.05


def sim(kind, hands, seed=0, **kw):
    cfg = SimConfig(hands=hands, seed=seed, hero=AgentPolicy(kind), **kw)
    return simulate_session(cfg), cfg.player_labels()


class TestRunAnalysis:
    def test_empty(self):
        r = run_analysis([], AnalysisConfig(resamples=0))
        assert r.cells == () and r.levels == ()
        assert json.loads(r.to_json())["cells"] == []

    def test_report_identity_and_counts(self):
        hands, labels = sim("encryptor", 400, seed=3)
        r = run_analysis(hands, AnalysisConfig(resamples=20), labels=labels)
        cell = r.cell(50, SHARK)
        obs_ = extract_observations(hands, {50: labels}, Variant.MAIN, BinningSpec({50: LevelCutoffs(50, 10**9, 10**9)}))
        assert cell.n_observations == len([o for o in obs_ if o.hero_skill is SHARK])
        parts = sum(cell.value(m) for m in ("redundancy", "unique_p1", "unique_w2", "synergy"))
        assert parts == pytest.approx(cell.value("total"), abs=1e-9)
        assert sum(cell.counts) == cell.n_observations
        for e in cell.estimates:
            assert e.ci_low <= e.estimate <= e.ci_high

    def test_specific_values_average_to_global(self):
        hands, labels = sim("encryptor", 300, seed=5)
        cell = run_analysis(hands, AnalysisConfig(resamples=0), labels=labels).cell(50, SHARK)
        for m, g in (("specific_synergy", "synergy"), ("specific_total", "total"), ("specific_redundancy", "redundancy")):
            avg = sum(cell.value("state_weight", s) * cell.value(m, s) for s in ("NoWager", "Small", "Large") if any(e.state == s and e.measure == m for e in cell.estimates))
            assert avg == pytest.approx(cell.value(g), abs=1e-9)

    def test_absent_classes_are_listed(self):
        hands, labels = sim("uniform", 50, seed=1)
        r = run_analysis(hands, AnalysisConfig(resamples=0, classes=("Shark", "Fish", "Other")), labels=labels)
        assert (50, OTHER) in r.absent
        assert {c.skill_class for c in r.cells} == {SHARK}  # the villain is never the second actor

    def test_profit_classification_without_labels(self):
        hands, _ = sim("uniform", 200, seed=2)
        r = run_analysis(hands, AnalysisConfig(resamples=0))
        lvl = r.levels[0]
        assert lvl.players == 2 and lvl.hands == lvl.hands_two_player == 200
        assert lvl.pct_sharks in (0.0, 50.0)

    def test_deterministic_json(self):
        hands, labels = sim("public-follower", 300, seed=4)
        cfg = AnalysisConfig(resamples=15, seed=8)
        assert run_analysis(hands, cfg, labels).to_json() == run_analysis(hands, cfg, labels).to_json()

    def test_levels_filter(self):
        hands, labels = sim("uniform", 30)
        assert run_analysis(hands, AnalysisConfig(resamples=0, levels=(25,)), labels).cells == ()

    def test_public_follower_unique_w2_dominates(self):
        hands, labels = sim("public-follower", 3000, seed=6, villain=AgentPolicy("uniform"))
        cell = run_analysis(hands, AnalysisConfig(resamples=0), labels).cell(50, SHARK)
        u2 = cell.value("unique_w2")
        assert u2 > 1.0
        assert all(cell.value(m) < 0.05 for m in ("redundancy", "unique_p1", "synergy"))

    def test_csv_rows(self):
        hands, labels = sim("encryptor", 100, seed=7)
        r = run_analysis(hands, AnalysisConfig(resamples=5), labels)
        lines = r.to_csv().splitlines()
        assert lines[0].startswith("# pidpoker ")
        assert lines[2] == "level,skill_class,measure,state,estimate,ci_low,ci_high,n"
        assert len(lines) == 3 + len(r.rows())

    def test_config_round_trip(self):
        cfg = AnalysisConfig(variant="preflop", resamples=7, levels=(100, 50), classes=("Fish",))
        assert AnalysisConfig.from_dict(cfg.to_dict()) == cfg
        with pytest.raises(ValueError):
            AnalysisConfig(resamples=1)
        with pytest.raises(ValueError):
            AnalysisConfig(bootstrap_unit="player")


class TestReferenceTable:
    def test_levels_and_cutoffs(self):
        assert tuple(TABLE_S1) == DEFAULT_LEVELS
        assert all(row.max_small_wager_cents == lvl for lvl, row in TABLE_S1.items())
        assert TABLE_S1[50].fish_max_mean_cents == -64.0

    def test_marginals_sum_to_one(self):
        for row in TABLE_S1.values():
            for m in (row.fish_w1, row.fish_w2, row.fish_p1, row.shark_w1, row.shark_w2, row.shark_p1):
                assert sum(m) == pytest.approx(1.0, abs=2e-3)
