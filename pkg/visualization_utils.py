"""
UTILITÁRIOS DE VISUALIZAÇÃO
Funções para visualizar e comparar os resultados das 3 abordagens de exploração
"""

import matplotlib.pyplot as plt
import numpy as np

from approach2_classical_tags import TemperatureSchedule, inverse_temperature
from gera_tabela import AGENT_LABELS

COLORS = ['#95a5a6', '#3498db', '#e74c3c']


def plot_inverse_temperature(deltas, episodes=3600):
    """
    Plota 1/T ao longo dos episódios para cada delta

    Args:
        deltas: {nome: delta}, ex: {'player1': 150, 'player2': 300}
        episodes: último episódio do eixo x
    """
    fig, ax = plt.subplots(figsize=(10, 6))
    x = np.arange(0, episodes + 1)

    for (name, delta), color in zip(deltas.items(), COLORS[1:] + COLORS[:1]):
        schedule = TemperatureSchedule(delta=delta)
        y = [inverse_temperature(e, schedule) for e in x]
        ax.plot(x, y, linewidth=2, color=color, label=f'{name} (δ = {delta:g})')

    ax.set_xlabel('Episódio', fontsize=12)
    ax.set_ylabel('1 / T', fontsize=12)
    ax.set_title('Inverso da Temperatura', fontsize=14, fontweight='bold')
    ax.legend()
    ax.grid(True, alpha=0.3)

    return fig


def plot_loss_traces(runs):
    """MSE da última época de cada batch, média sobre as seeds de cada agente"""
    fig, ax = plt.subplots(figsize=(10, 6))

    agents = sorted({r.agent for r in runs}, key=list(AGENT_LABELS).index)
    for agent, color in zip(agents, COLORS):
        traces = [[trace[-1] for trace in r.loss_traces] for r in runs if r.agent == agent]
        if not traces:
            continue
        n = min(len(t) for t in traces)
        mean = np.mean([t[:n] for t in traces], axis=0)
        ax.plot(np.arange(1, n + 1), mean, marker='o', linewidth=2, color=color,
                label=AGENT_LABELS.get(agent, agent))

    ax.set_xlabel('Batch', fontsize=12)
    ax.set_ylabel('MSE (última época)', fontsize=12)
    ax.set_title('Loss por Batch', fontsize=14, fontweight='bold')
    ax.legend()
    ax.grid(True, alpha=0.3)

    return fig


def compare_agents_plot(reports):
    """
    Compara Iterações, Estados e Vitória % entre agentes

    Args:
        reports: {agente: AggregateReport}
    """
    fig, axes = plt.subplots(1, 3, figsize=(16, 5))
    agents = list(reports)
    labels = [AGENT_LABELS.get(a, a) for a in agents]

    panels = [
        ('iterations_mean', 'Iterações até Flag', '{:.3f}'),
        ('states_explored', 'Estados Explorados', '{:.0f}'),
        ('win_rate', 'Vitória (%)', '{:.1f}'),
    ]

    for ax, (metric, title, fmt) in zip(axes, panels):
        means = [reports[a].mean.get(metric) or 0.0 for a in agents]
        errors = [
            (reports[a].std or {}).get(metric) or 0.0
            for a in agents
        ]
        bars = ax.bar(labels, means, yerr=errors, capsize=6, edgecolor='black', alpha=0.7,
                      color=COLORS[:len(agents)])
        ax.set_title(title, fontsize=12, fontweight='bold')
        ax.grid(True, alpha=0.3, axis='y')
        ax.tick_params(axis='x', labelrotation=15)

        # Valores nas barras
        for bar, val in zip(bars, means):
            ax.text(bar.get_x() + bar.get_width() / 2, val, fmt.format(val),
                    ha='center', va='bottom', fontsize=10, fontweight='bold')

    plt.tight_layout()
    return fig


def save_comparison_report(reports, output_path='comparison_report.png'):
    """Gera e salva o relatório visual"""
    fig = compare_agents_plot(reports)
    fig.savefig(output_path, dpi=150, bbox_inches='tight')
    plt.close(fig)
    print(f"✓ Relatório salvo em: {output_path}")
    return output_path


def print_statistics(reports, role):
    """Imprime a tabela de resultados de um papel"""
    title = 'Player 1' if role == 'player1' else 'Player 2'
    print(f"\n{'=' * 60}")
    print(f"{title.upper()} AGENTS VS RANDOMIZED NEGAMAX")
    print(f"{'=' * 60}")
    print(f"{'Agente':<22}{'Iterações':<18}{'Estados':<18}{'Vitória %':<16}")

    for agent, report in reports.items():
        cells = []
        for metric, digits in (('iterations_mean', 3), ('states_explored', 0), ('win_rate', 1)):
            mean = report.mean.get(metric)
            std = (report.std or {}).get(metric)
            if mean is None:
                cells.append('')
            elif std is None:
                cells.append(f"{mean:.{digits}f}")
            else:
                cells.append(f"{mean:.{digits}f} ± {std:.{digits}f}")
        print(f"{AGENT_LABELS.get(agent, agent):<22}{cells[0]:<18}{cells[1]:<18}{cells[2]:<16}")

    print(f"\nRuns por agente: {', '.join(f'{a}={r.n_runs}' for a, r in reports.items())}")
