import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402

from batch_trainer import DELTAS, RunMetrics  # noqa: E402
from gera_tabela import aggregate  # noqa: E402
from visualization_utils import (  # noqa: E402
    compare_agents_plot,
    plot_inverse_temperature,
    plot_loss_traces,
    print_statistics,
    save_comparison_report,
)


def _runs():
    runs = []
    for agent, iterations in (('epsilon_greedy', None), ('classical_tags', 1.4), ('quantum_tags', 1.3)):
        for seed in range(2):
            runs.append(RunMetrics(agent=agent, role='player1', seed=seed, win_rate=70.0 + seed,
                                   states_explored=500 + seed, iterations_mean=iterations,
                                   loss_traces=[[0.5, 0.4], [0.3, 0.2], [0.2, 0.1]]))
    return runs


def _reports(runs):
    return {agent: aggregate([r for r in runs if r.agent == agent])
            for agent in ('epsilon_greedy', 'classical_tags', 'quantum_tags')}


def test_inverse_temperature_curves():
    fig = plot_inverse_temperature(DELTAS, episodes=100)
    lines = fig.axes[0].get_lines()
    assert len(lines) == 2
    assert len(lines[0].get_xdata()) == 101
    plt.close(fig)


def test_loss_traces_one_line_per_agent():
    fig = plot_loss_traces(_runs())
    assert len(fig.axes[0].get_lines()) == 3
    plt.close(fig)


def test_comparison_report(tmp_path):
    reports = _reports(_runs())
    fig = compare_agents_plot(reports)
    assert len(fig.axes) == 3
    plt.close(fig)

    path = tmp_path / 'report.png'
    save_comparison_report(reports, str(path))
    assert path.stat().st_size > 0


def test_print_statistics(capsys):
    print_statistics(_reports(_runs()), 'player1')
    out = capsys.readouterr().out
    assert 'PLAYER 1 AGENTS VS RANDOMIZED NEGAMAX' in out
    assert 'Quantum, tags' in out
    assert '70.5 ± 0.7' in out
