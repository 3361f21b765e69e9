"""
GERA TABELA
Roda as 3 abordagens em várias seeds para um papel (jogador 1 ou 2), agrega
média e desvio padrão e gera os arquivos de resultado:
- runs.csv       uma linha por run
- losses.csv     MSE de cada época de cada batch
- aggregate.json média/desvio por métrica e por agente
- table.csv      tabela no formato Agente | Iterações | Estados | Vitória %
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from batch_trainer import POLICIES, ExperimentConfig, run_single

RUN_COLUMNS = ['agent', 'role', 'seed', 'iterations_mean', 'states_explored', 'win_rate', 'draws', 'losses']
LOSS_COLUMNS = ['agent', 'role', 'seed', 'batch', 'epoch', 'mse']
METRICS = ['iterations_mean', 'states_explored', 'win_rate', 'draws', 'losses']

AGENT_LABELS = {
    'epsilon_greedy': 'Classical, ε-greedy',
    'classical_tags': 'Classical, tags',
    'quantum_tags': 'Quantum, tags',
}


class InsufficientRuns(Exception):
    """Runs insuficientes para a estatística pedida"""


@dataclass
class AggregateReport:
    n_runs: int
    mean: dict
    std: Optional[dict]


def sample_std(values):
    """Desvio padrão amostral (n - 1)"""
    values = [v for v in values if v is not None and not np.isnan(v)]
    if len(values) < 2:
        raise InsufficientRuns(f"Desvio padrão precisa de >= 2 valores, recebidos {len(values)}")
    return float(pd.Series(values, dtype=float).std(ddof=1))


def aggregate(runs):
    """Média e desvio amostral por métrica; std ausente (None) com menos de 2 runs"""
    if not runs:
        raise InsufficientRuns("Nenhum run completo para agregar")

    df = pd.DataFrame([r.to_row() for r in runs], columns=RUN_COLUMNS)
    mean, std = {}, {}

    for metric in METRICS:
        column = pd.to_numeric(df[metric], errors='coerce')
        mean[metric] = None if column.isna().all() else float(column.mean())
        try:
            std[metric] = sample_std(column.tolist())
        except InsufficientRuns:
            std[metric] = None

    has_std = len(runs) >= 2
    return AggregateReport(n_runs=len(runs), mean=mean, std=std if has_std else None)


def _format(report, metric, digits):
    mean = report.mean.get(metric)
    if mean is None:
        return ''
    if report.std is None or report.std.get(metric) is None:
        return f"{mean:.{digits}f}"
    return f"{mean:.{digits}f} ± {report.std[metric]:.{digits}f}"


def table_frame(reports):
    """Uma linha por agente, colunas no formato das tabelas de resultado"""
    rows = []
    for agent, report in reports.items():
        rows.append({
            'Agent': AGENT_LABELS.get(agent, agent),
            'Iterations': _format(report, 'iterations_mean', 3),
            'States': _format(report, 'states_explored', 0),
            'Win %': _format(report, 'win_rate', 1),
        })
    return pd.DataFrame(rows, columns=['Agent', 'Iterations', 'States', 'Win %'])


def loss_frame(runs):
    rows = []
    for run in runs:
        for batch, trace in enumerate(run.loss_traces, 1):
            for epoch, mse in enumerate(trace, 1):
                rows.append({
                    'agent': run.agent, 'role': run.role, 'seed': run.seed,
                    'batch': batch, 'epoch': epoch, 'mse': mse,
                })
    return pd.DataFrame(rows, columns=LOSS_COLUMNS)


def write_runs_csv(runs, path):
    pd.DataFrame([r.to_row() for r in runs], columns=RUN_COLUMNS).to_csv(path, index=False)


def write_loss_csv(runs, path, append=False):
    """
    Sobrescreve o arquivo, como os outros resultados

    Com append=True acrescenta ao arquivo existente, descartando antes as linhas
    dos mesmos (agent, role, seed).
    """
    frame = loss_frame(runs)
    if append and os.path.exists(path):
        previous = pd.read_csv(path)
        keys = {(r.agent, r.role, r.seed) for r in runs}
        stale = [(a, r, s) in keys for a, r, s in zip(previous['agent'], previous['role'], previous['seed'])]
        frame = pd.concat([previous[~np.array(stale, dtype=bool)], frame], ignore_index=True)
    frame.to_csv(path, index=False)


def write_aggregate_json(reports, path):
    data = {
        agent: {'n_runs': r.n_runs, 'mean': r.mean, 'std': r.std}
        for agent, r in reports.items()
    }
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)


def _run_job(cfg, seed):
    return run_single(cfg, seed, output_dir=cfg.output_dir, verbose=False)


def reproduce(base_cfg, seeds, policies=POLICIES, workers=1, verbose=True):
    """
    Roda cada política em cada seed (mesmas seeds para todas as políticas)

    Runs que falham são reportados e ignorados; a agregação usa só os completos.
    """
    output_dir = base_cfg.output_dir
    os.makedirs(output_dir, exist_ok=True)

    jobs = [(replace(base_cfg, policy=policy, seeds=tuple(seeds)), seed)
            for policy in policies for seed in seeds]
    runs = []

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_job, cfg, seed): (cfg.policy, seed) for cfg, seed in jobs}
            for future in tqdm(as_completed(futures), total=len(futures), desc="Runs", disable=not verbose):
                policy, seed = futures[future]
                try:
                    runs.append(future.result())
                except Exception as e:
                    tqdm.write(f"Erro em {policy} seed {seed}: {e}")
    else:
        for cfg, seed in tqdm(jobs, desc="Runs", disable=not verbose):
            try:
                runs.append(run_single(cfg, seed, output_dir=output_dir, verbose=False))
            except Exception as e:
                tqdm.write(f"Erro em {cfg.policy} seed {seed}: {e}")

    runs.sort(key=lambda r: (list(policies).index(r.agent), r.seed))

    reports = {}
    for policy in policies:
        completed = [r for r in runs if r.agent == policy]
        if completed:
            reports[policy] = aggregate(completed)

    write_runs_csv(runs, os.path.join(output_dir, 'runs.csv'))
    write_loss_csv(runs, os.path.join(output_dir, 'losses.csv'))
    write_aggregate_json(reports, os.path.join(output_dir, 'aggregate.json'))
    table_frame(reports).to_csv(os.path.join(output_dir, 'table.csv'), index=False)

    if verbose:
        print(f"\nResultados salvos em: {output_dir}/")

    return runs, reports


if __name__ == "__main__":
    # Configuração
    ROLE = 'player1'
    SEEDS = list(range(5))
    PASTA_SAIDA = 'results'

    cfg = ExperimentConfig(role=ROLE, output_dir=PASTA_SAIDA)
    runs, reports = reproduce(cfg, SEEDS)

    print(table_frame(reports).to_string(index=False))
