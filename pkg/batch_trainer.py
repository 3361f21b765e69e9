"""
TREINO EM BATCH
Joga batches de partidas contra o Negamax Aleatorizado, treina a rede após cada
batch e mede as métricas das 3 abordagens (iterações até flag, estados explorados,
taxa de vitória no teste)
"""

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from tqdm import tqdm

from approach1_epsilon_greedy import epsilon, epsilon_greedy_select, greedy_action
from approach2_classical_tags import (
    DELTA_PLAYER1,
    DELTA_PLAYER2,
    FlagTable,
    ReflectionConfig,
    TemperatureSchedule,
    boltzmann_distribution,
    classical_reflect_select,
    dump_flag_table,
    get_flags,
    temperature,
    update_flags,
)
from approach3_quantum_tags import GroverConfig, quantum_reflect_select
from connect4_game import (
    GameOutcome,
    Transition,
    apply_action,
    empty_board,
    outcome,
    reward,
    state_key,
)
from negamax_opponent import NegamaxConfig, select_move
from qlearn_network import (
    QNetwork,
    TrainingConfig,
    compute_targets,
    q_values,
    save_checkpoint_file,
    train_batch,
)

# Protocolo de treino/teste
ROLES = ('player1', 'player2')
POLICIES = ('epsilon_greedy', 'classical_tags', 'quantum_tags')
FLAGGED_POLICIES = ('classical_tags', 'quantum_tags')
TRAIN_EPISODES = {'player1': 1800, 'player2': 3600}
DELTAS = {'player1': DELTA_PLAYER1, 'player2': DELTA_PLAYER2}
TEST_EPISODES = 1000
BATCH_GAMES = 300

AGENT_PLAYER = {'player1': 1, 'player2': -1}

STREAMS = ('opponent', 'policy', 'network', 'shuffle', 'test')


class ConfigError(Exception):
    """Combinação inválida de parâmetros do experimento"""


@dataclass
class ExperimentConfig:
    role: str = 'player1'
    policy: str = 'classical_tags'
    train_episodes: Optional[int] = None
    test_episodes: int = TEST_EPISODES
    batch_games: int = BATCH_GAMES
    seeds: tuple = (0,)
    negamax: NegamaxConfig = field(default_factory=NegamaxConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    reflection: ReflectionConfig = field(default_factory=ReflectionConfig)
    grover: GroverConfig = field(default_factory=GroverConfig)
    delta: Optional[float] = None
    output_dir: str = 'results'

    def __post_init__(self):
        if self.role not in ROLES:
            raise ConfigError(f"role deve ser um de {ROLES}, recebido '{self.role}'")
        if self.policy not in POLICIES:
            raise ConfigError(f"policy deve ser uma de {POLICIES}, recebido '{self.policy}'")
        if self.train_episodes is None:
            self.train_episodes = TRAIN_EPISODES[self.role]
        if self.delta is None:
            self.delta = DELTAS[self.role]

        if self.batch_games < 1 or self.train_episodes < 1:
            raise ConfigError("batch_games e train_episodes devem ser >= 1")
        if self.train_episodes % self.batch_games != 0:
            raise ConfigError(
                f"train_episodes ({self.train_episodes}) deve ser divisível por batch_games ({self.batch_games})"
            )
        if self.test_episodes < 0:
            raise ConfigError("test_episodes deve ser >= 0")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError(f"Seeds repetidas: {list(self.seeds)}")
        if self.delta <= 0:
            raise ConfigError("delta deve ser positivo")
        if self.reflection.r_max != self.grover.r_max:
            raise ConfigError("r_max da reflexão e do Grover devem ser iguais")
        # O batch de treino é o batch de jogos
        self.training.batch_games = self.batch_games

    @property
    def n_batches(self):
        return self.train_episodes // self.batch_games

    @property
    def agent_player(self):
        return AGENT_PLAYER[self.role]

    @property
    def schedule(self):
        return TemperatureSchedule(delta=self.delta)


@dataclass
class RunMetrics:
    agent: str
    role: str
    seed: int
    wins: int = 0
    draws: int = 0
    losses: int = 0
    win_rate: float = 0.0
    states_explored: int = 0
    iterations_mean: Optional[float] = None
    states_per_batch: list = field(default_factory=list)
    loss_traces: list = field(default_factory=list)

    def to_row(self):
        """Linha do CSV de runs (colunas fixas)"""
        return {
            'agent': self.agent,
            'role': self.role,
            'seed': self.seed,
            'iterations_mean': self.iterations_mean,
            'states_explored': self.states_explored,
            'win_rate': self.win_rate,
            'draws': self.draws,
            'losses': self.losses,
        }


def derive_streams(seed):
    """Uma seed mestre -> streams independentes (oponente, política, rede, shuffle, teste)"""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return dict(zip(STREAMS, children))


# --- Métrica de iterações até obter uma ação com flag ---

class IterationsAccumulator:
    """
    Soma as iterações de seleções consecutivas até uma ação com flag ser obtida

    Uma seleção que esgota R iterações sem flag passa essas R iterações para a
    próxima. Uma soma parcial pendente no fim é descartada.
    """

    def __init__(self):
        self.partial = 0
        self.samples = []

    def add(self, result):
        if result.flagged_hit:
            self.samples.append(self.partial + result.iterations_used)
            self.partial = 0
        else:
            self.partial += result.iterations_used

    def mean(self):
        if not self.samples:
            return None
        return float(np.mean(self.samples))


def iterations_accumulator(events):
    accumulator = IterationsAccumulator()
    for event in events:
        accumulator.add(event)
    return accumulator.mean()


# --- Agente ---

class ExplorationAgent:
    """Escolhe ações de treino segundo a política configurada"""

    def __init__(self, net, cfg, rng):
        self.net = net
        self.cfg = cfg
        self.rng = rng
        self.schedule = cfg.schedule
        self.flags = FlagTable()
        self.accumulator = IterationsAccumulator()
        self.seen = set()

    def choose(self, board, player, episode):
        key = state_key(board)
        self.seen.add(key)
        qmap = q_values(self.net, board, player)

        if self.cfg.policy == 'epsilon_greedy':
            return epsilon_greedy_select(qmap, epsilon(episode), self.rng)

        dist = boltzmann_distribution(qmap, temperature(episode, self.schedule))
        flags = get_flags(self.flags, key, sorted(qmap))

        if self.cfg.policy == 'classical_tags':
            result = classical_reflect_select(dist, flags, self.cfg.reflection, self.rng)
        else:
            result = quantum_reflect_select(dist, flags, self.cfg.reflection, self.cfg.grover, self.rng)

        self.accumulator.add(result)
        update_flags(self.flags, key, result.action, qmap)
        return result.action


def play_game(choose, agent_player, negamax_cfg, opponent_rng):
    """
    Uma partida completa contra o Negamax

    `choose(board)` devolve a jogada do agente. Retorna as transições do ponto
    de vista do agente e o resultado final.
    """
    opponent = -agent_player
    board = empty_board()
    transitions = []

    if agent_player == -1:
        board = apply_action(board, select_move(board, negamax_cfg, opponent_rng, player=opponent), opponent)

    while True:
        action = choose(board)
        afterstate = apply_action(board, action, agent_player)
        result = outcome(afterstate)

        if result is not GameOutcome.ONGOING:
            transitions.append(Transition(
                board, action, afterstate, afterstate, reward(result, agent_player), True, agent_player
            ))
            return transitions, result

        reply = select_move(afterstate, negamax_cfg, opponent_rng, player=opponent)
        next_state = apply_action(afterstate, reply, opponent)
        result = outcome(next_state)
        terminal = result is not GameOutcome.ONGOING

        transitions.append(Transition(
            board, action, afterstate, next_state, reward(result, agent_player), terminal, agent_player
        ))
        if terminal:
            return transitions, result
        board = next_state


def _count(results, agent_player):
    wins = sum(1 for r in results if reward(r, agent_player) == 1.0)
    draws = sum(1 for r in results if r is GameOutcome.DRAW)
    return wins, draws, len(results) - wins - draws


def train_run(cfg, seed, verbose=True):
    """
    Treino completo de um agente

    Retorna (rede, tabela de flags, métricas parciais sem o teste).
    """
    streams = derive_streams(seed)
    net = QNetwork.from_seed(streams['network'])
    opponent_rng = np.random.default_rng(streams['opponent'])
    shuffle_rng = np.random.default_rng(streams['shuffle'])
    agent = ExplorationAgent(net, cfg, np.random.default_rng(streams['policy']))

    metrics = RunMetrics(agent=cfg.policy, role=cfg.role, seed=seed)
    player = cfg.agent_player

    if verbose:
        print(f"\nTreinando {cfg.policy} ({cfg.role}, seed {seed}): "
              f"{cfg.n_batches} batches de {cfg.batch_games} jogos")

    for batch_index in range(cfg.n_batches):
        episodes = []
        games = tqdm(range(cfg.batch_games), desc=f"Batch {batch_index + 1}/{cfg.n_batches}",
                     disable=not verbose, leave=False)

        for game in games:
            episode = batch_index * cfg.batch_games + game + 1
            transitions, _ = play_game(
                lambda board: agent.choose(board, player, episode),
                player, cfg.negamax, opponent_rng,
            )
            episodes.append(transitions)

        pairs = compute_targets(episodes, net, cfg.training)
        losses = train_batch(net, pairs, cfg.training, shuffle_rng)

        metrics.loss_traces.append(losses)
        metrics.states_per_batch.append(len(agent.seen))

        if verbose:
            tqdm.write(f"  Batch {batch_index + 1}: {len(pairs)} transições, "
                       f"MSE final {losses[-1]:.5f}, estados {len(agent.seen)}")

    metrics.states_explored = len(agent.seen)
    if cfg.policy in FLAGGED_POLICIES:
        metrics.iterations_mean = agent.accumulator.mean()

    return net, agent.flags, metrics


def test_run(net, cfg, seed, verbose=True):
    """Partidas de teste com a ação de maior Q (sem exploração nem flags)"""
    opponent_rng = np.random.default_rng(derive_streams(seed)['test'])
    player = cfg.agent_player

    def choose(board):
        return greedy_action(q_values(net, board, player))

    results = []
    for _ in tqdm(range(cfg.test_episodes), desc="Teste", disable=not verbose, leave=False):
        _, result = play_game(choose, player, cfg.negamax, opponent_rng)
        results.append(result)

    wins, draws, losses = _count(results, player)
    win_rate = 100.0 * wins / len(results) if results else 0.0
    return {'wins': wins, 'draws': draws, 'losses': losses, 'win_rate': win_rate}


def run_single(cfg, seed, output_dir=None, verbose=True):
    """Treino + teste de uma seed; salva checkpoint e flags se `output_dir`"""
    net, flags, metrics = train_run(cfg, seed, verbose=verbose)
    counts = test_run(net, cfg, seed, verbose=verbose)

    metrics.wins = counts['wins']
    metrics.draws = counts['draws']
    metrics.losses = counts['losses']
    metrics.win_rate = counts['win_rate']

    if output_dir:
        os.makedirs(output_dir, exist_ok=True)
        stem = os.path.join(output_dir, f"{cfg.policy}_{cfg.role}_seed{seed}")
        save_checkpoint_file(net, stem + '.ckpt')
        if cfg.policy in FLAGGED_POLICIES:
            with open(stem + '_flags.txt', 'w') as f:
                f.write(dump_flag_table(flags))

    if verbose:
        iterations = '-' if metrics.iterations_mean is None else f"{metrics.iterations_mean:.3f}"
        print(f"✓ {cfg.policy} seed {seed}: vitórias {metrics.win_rate:.1f}%, "
              f"estados {metrics.states_explored}, iterações {iterations}")

    return metrics
