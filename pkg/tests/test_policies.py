import math

import numpy as np
import pytest

from approach1_epsilon_greedy import epsilon, epsilon_greedy_select, greedy_action
from approach2_classical_tags import (
    EPS_MIN,
    FlagEntry,
    FlagTable,
    ReflectionConfig,
    TemperatureSchedule,
    boltzmann_distribution,
    classical_reflect_select,
    dump_flag_table,
    flagged_mass,
    get_flags,
    inverse_temperature,
    make_distribution,
    parse_flag_table,
    renormalized_distribution,
    temperature,
    update_flags,
)
from conftest import REFLECTION_SCENARIOS, assert_matches_distribution


def _mask(actions):
    return sum(1 << a for a in actions)


# --- epsilon-greedy ---

def test_epsilon_first_episode_is_clamped():
    assert epsilon(1) == 1.0


def test_epsilon_episode_seven():
    assert epsilon(7) == pytest.approx(1 / math.log(8), abs=1e-12)
    assert epsilon(7) == pytest.approx(0.481, abs=1e-3)


def test_epsilon_decreases():
    values = [epsilon(e) for e in range(2, 5000, 50)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert epsilon(10 ** 9) < 0.05


def test_epsilon_rejects_episode_zero():
    with pytest.raises(ValueError):
        epsilon(0)


def test_greedy_tie_breaks_lowest_column():
    assert greedy_action({4: 0.5, 2: 0.5, 6: 0.1}) == 2


def test_epsilon_zero_is_greedy(rng):
    qmap = {0: 0.1, 3: 0.7, 5: 0.2}
    assert all(epsilon_greedy_select(qmap, 0.0, rng) == 3 for _ in range(100))


def test_epsilon_one_is_uniform(rng):
    qmap = {0: 0.1, 2: 0.9, 3: -0.4, 6: 0.0}
    n = 10_000
    picks = [epsilon_greedy_select(qmap, 1.0, rng) for _ in range(n)]
    for a in qmap:
        assert abs(picks.count(a) / n - 0.25) < 0.02


def test_epsilon_half_two_actions(rng):
    qmap = {1: 0.8, 4: 0.2}
    n = 10_000
    picks = [epsilon_greedy_select(qmap, 0.5, rng) for _ in range(n)]
    assert abs(picks.count(1) / n - 0.75) < 0.02


def test_epsilon_greedy_validation(rng):
    with pytest.raises(ValueError):
        epsilon_greedy_select({}, 0.5, rng)
    with pytest.raises(ValueError):
        epsilon_greedy_select({0: 1.0}, 1.5, rng)


# --- temperatura e Boltzmann ---

def test_temperature_episode_zero():
    assert temperature(0, TemperatureSchedule()) == pytest.approx(10.1)


def test_temperature_monotone_and_asymptote():
    schedule = TemperatureSchedule(delta=150)
    values = [temperature(e, schedule) for e in range(0, 5000, 25)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert temperature(10 ** 7, schedule) == pytest.approx(0.2)


@pytest.mark.parametrize('episode', [20_000, 10 ** 5, 10 ** 7, 10 ** 12])
def test_temperature_stays_above_t_min(episode):
    schedule = TemperatureSchedule(delta=150)
    T = temperature(episode, schedule)
    assert 0.2 < T <= 10.1
    assert T < 0.2 + 1e-9


def test_inverse_temperature_at_training_horizon():
    assert inverse_temperature(1800, TemperatureSchedule(delta=150)) == pytest.approx(2.03, abs=0.01)
    assert inverse_temperature(3600, TemperatureSchedule(delta=300)) == pytest.approx(2.03, abs=0.01)


def test_temperature_schedule_rejects_bad_delta():
    with pytest.raises(ValueError):
        TemperatureSchedule(delta=0)


def test_boltzmann_uniform_when_q_equal():
    dist = boltzmann_distribution({0: 0.3, 1: 0.3, 5: 0.3}, 0.7)
    np.testing.assert_allclose(dist.probs, [1 / 3] * 3)


def test_boltzmann_two_actions():
    dist = boltzmann_distribution({0: 1.0, 1: 0.0}, 1.0)
    assert dist.prob(0) == pytest.approx(math.e / (1 + math.e))
    assert dist.prob(1) == pytest.approx(0.2689, abs=1e-4)


def test_boltzmann_large_values_are_stable():
    dist = boltzmann_distribution({0: 1000.0, 1: 999.0}, 0.2)
    assert np.all(np.isfinite(dist.probs))
    assert dist.probs.sum() == pytest.approx(1.0)


@pytest.mark.parametrize('T', [0.2, 1.0, 20.0])
def test_boltzmann_argmax_matches_q(T, rng):
    for _ in range(50):
        qmap = {a: float(q) for a, q in enumerate(rng.normal(size=7))}
        dist = boltzmann_distribution(qmap, T)
        assert dist.actions[int(np.argmax(dist.probs))] == greedy_action(qmap)


def test_boltzmann_rejects_bad_temperature():
    with pytest.raises(ValueError):
        boltzmann_distribution({0: 1.0}, 0.0)


# --- flags ---

def test_unseen_state_has_all_legal_flagged():
    table = FlagTable()
    assert get_flags(table, 42, [0, 1, 3]) == {0, 1, 3}
    assert 42 in table


def test_flags_persist():
    table = FlagTable({7: FlagEntry(mask=_mask({3}))})
    assert get_flags(table, 7, [0, 1, 2, 3, 4]) == {3}


def test_negative_q_removes_flag():
    table = FlagTable({1: FlagEntry(mask=_mask({2, 3}))})
    update_flags(table, 1, 2, {2: -0.4, 3: 0.1})
    assert get_flags(table, 1, [2, 3]) == {3}
    assert table.entries[1].last_picked == 2


def test_losing_last_flag_restores_others():
    table = FlagTable({1: FlagEntry(mask=_mask({3}))})
    update_flags(table, 1, 3, {2: 0.3, 3: -0.1})
    assert get_flags(table, 1, [2, 3]) == {2}


def test_positive_q_reflags_action():
    table = FlagTable({1: FlagEntry(mask=_mask({3}))})
    update_flags(table, 1, 2, {2: 0.5, 3: 0.2})
    assert get_flags(table, 1, [2, 3]) == {2, 3}


def test_zero_q_keeps_flag_state():
    table = FlagTable({1: FlagEntry(mask=_mask({3}))})
    update_flags(table, 1, 2, {2: 0.0, 3: 0.2})
    assert get_flags(table, 1, [2, 3]) == {3}


def test_full_column_flag_is_restored():
    table = FlagTable({5: FlagEntry(mask=_mask({4}), last_picked=1)})
    assert get_flags(table, 5, [0, 1, 2]) == {0, 2}


def test_single_legal_action_is_always_flagged():
    table = FlagTable({5: FlagEntry(mask=_mask({6}))})
    update_flags(table, 5, 6, {6: -1.0})
    assert get_flags(table, 5, [6]) == {6}


def test_update_flags_rejects_unknown_action():
    with pytest.raises(ValueError):
        update_flags(FlagTable(), 0, 3, {0: 0.1})


@pytest.mark.parametrize('n_updates', [20_000, pytest.param(100_000, marks=pytest.mark.slow)])
def test_flags_never_empty(rng, n_updates):
    table = FlagTable()
    legal_by_key = {key: list(range(7)) for key in range(10)}

    for _ in range(n_updates):
        key = int(rng.integers(10))
        legal = legal_by_key[key]
        # Colunas enchem: o conjunto legal só diminui
        if len(legal) > 1 and rng.random() < 0.01:
            legal.remove(int(rng.choice(legal)))

        flags = get_flags(table, key, legal)
        assert flags and flags <= set(legal)

        qmap = {a: float(rng.choice([-1.0, 0.0, 1.0]) * rng.random()) for a in legal}
        update_flags(table, key, int(rng.choice(legal)), qmap)
        assert table.entries[key].mask & _mask(legal)


def test_flag_table_text_format():
    table = FlagTable({255: FlagEntry(mask=0b101), 16: FlagEntry(mask=0b1000000, last_picked=6)})
    text = dump_flag_table(table)
    assert text.splitlines() == [
        '0000000000000010 1000000 6',
        '00000000000000ff 0000101 -',
    ]
    parsed = parse_flag_table(text)
    assert parsed.entries == table.entries


def test_parse_flag_table_rejects_bad_line():
    with pytest.raises(ValueError):
        parse_flag_table('00ff 0000101')


# --- distribuições e reflexão clássica ---

def test_flagged_mass():
    uniform = make_distribution({0: 1, 1: 1, 2: 1, 3: 1})
    assert flagged_mass(uniform, {0, 1, 2, 3}) == pytest.approx(1.0)
    assert flagged_mass(uniform, {2}) == pytest.approx(0.25)

    skewed = make_distribution({0: 0.99, 1: 0.01})
    assert flagged_mass(skewed, {1}) == EPS_MIN


def test_flagged_mass_rejects_empty_flags():
    with pytest.raises(ValueError):
        flagged_mass(make_distribution({0: 1.0}), set())


def test_renormalized_distribution():
    dist = make_distribution({0: 0.5, 1: 0.3, 2: 0.2})
    restricted = renormalized_distribution(dist, {1, 2})
    assert restricted.actions == (1, 2)
    np.testing.assert_allclose(restricted.probs, [0.6, 0.4])


def test_goodness_of_fit_helper():
    probs = np.full(8, 1 / 8)
    assert_matches_distribution([1000] * 8, probs)
    with pytest.raises(AssertionError):
        assert_matches_distribution([1300, 700] + [1000] * 6, probs)


def test_all_flagged_accepts_first_draw(rng):
    dist = make_distribution({0: 0.2, 3: 0.5, 6: 0.3})
    counts = {a: 0 for a in dist.actions}
    for _ in range(5000):
        result = classical_reflect_select(dist, {0, 3, 6}, ReflectionConfig(), rng)
        assert result.iterations_used == 1 and result.flagged_hit
        counts[result.action] += 1
    assert_matches_distribution([counts[a] for a in dist.actions], dist.probs)


@pytest.mark.parametrize('qmap, T, flags', REFLECTION_SCENARIOS)
def test_classical_accepted_samples_follow_renormalized(qmap, T, flags, rng):
    dist = boltzmann_distribution(qmap, T)
    target = renormalized_distribution(dist, flags)
    counts = dict.fromkeys(target.actions, 0)

    accepted = 0
    while accepted < 10_000:
        result = classical_reflect_select(dist, flags, ReflectionConfig(), rng)
        if result.flagged_hit:
            counts[result.action] += 1
            accepted += 1

    assert_matches_distribution([counts[a] for a in target.actions], target.probs)


def test_classical_hit_rate_single_flag(rng):
    dist = make_distribution({0: 0.1, 1: 0.9})
    n = 10_000
    hits = sum(classical_reflect_select(dist, {0}, ReflectionConfig(r_max=5), rng).flagged_hit
               for _ in range(n))
    assert abs(hits / n - (1 - 0.9 ** 5)) < 0.02


def test_classical_miss_returns_last_draw(rng):
    dist = make_distribution({0: 1e-12, 1: 1.0})
    result = classical_reflect_select(dist, {0}, ReflectionConfig(r_max=3), rng)
    assert result == type(result)(action=1, iterations_used=3, flagged_hit=False)
