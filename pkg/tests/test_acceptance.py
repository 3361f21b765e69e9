"""
Treinos completos contra o Negamax Aleatorizado (profundidade 2, omega 0.3)

Lentos: rode com `pytest --runslow`. Um run de jogador 1 leva de minutos a
cerca de uma hora.
"""

import numpy as np
import pytest

from batch_trainer import ExperimentConfig
from gera_tabela import reproduce

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def player1_results(tmp_path_factory):
    cfg = ExperimentConfig(role='player1', train_episodes=1800, test_episodes=500,
                           output_dir=str(tmp_path_factory.mktemp('player1')))
    return reproduce(cfg, seeds=list(range(5)), workers=5, verbose=False)


def test_flagged_agents_win_as_player1(player1_results):
    _, reports = player1_results
    assert reports['classical_tags'].mean['win_rate'] >= 70.0
    assert reports['quantum_tags'].mean['win_rate'] >= 70.0


def test_quantum_needs_fewer_iterations(player1_results):
    runs, _ = player1_results
    pooled = {
        agent: np.mean([r.iterations_mean for r in runs if r.agent == agent])
        for agent in ('classical_tags', 'quantum_tags')
    }
    assert pooled['quantum_tags'] < pooled['classical_tags']
    for value in pooled.values():
        assert 1.0 <= value <= 2.5


def test_epsilon_greedy_is_worse_or_less_stable(player1_results):
    _, reports = player1_results
    greedy, tags = reports['epsilon_greedy'], reports['classical_tags']
    lower = greedy.mean['win_rate'] <= tags.mean['win_rate'] - 15.0
    unstable = greedy.std['win_rate'] >= 2.0 * tags.std['win_rate']
    assert lower or unstable


def test_flagged_agents_win_as_player2(tmp_path):
    cfg = ExperimentConfig(role='player2', train_episodes=3600, test_episodes=500, output_dir=str(tmp_path))
    _, reports = reproduce(cfg, seeds=[0, 1, 2], policies=['classical_tags', 'quantum_tags'],
                           workers=3, verbose=False)
    assert reports['classical_tags'].mean['win_rate'] >= 55.0
    assert reports['quantum_tags'].mean['win_rate'] >= 55.0
