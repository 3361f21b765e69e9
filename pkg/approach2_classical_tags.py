"""
ABORDAGEM 2: Seleção de Ações com Flags (Clássica)
- Distribuição de Boltzmann (soft-max) sobre os valores Q, com temperatura decrescente
- Cada ação de cada estado começa com flag; flags são removidas quando Q < 0
  e recolocadas quando uma ação sem flag é escolhida com Q > 0
- Reflexão: até R amostras da distribuição, aceita a primeira com flag,
  senão fica com a última amostrada
- VANTAGEM: Amostra segundo a distribuição re-normalizada sobre as ações promissoras
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# Parâmetros padrão
T_MIN = 0.2
T_MAX = 20.0
SLOPE = 0.35
DELTA_PLAYER1 = 150.0
DELTA_PLAYER2 = 300.0
R_MAX = 5
EPS_MIN = 0.04

N_COLUMNS = 7


@dataclass
class TemperatureSchedule:
    t_min: float = T_MIN
    t_max: float = T_MAX
    slope: float = SLOPE
    delta: float = DELTA_PLAYER1

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"delta deve ser positivo, recebido {self.delta}")


@dataclass
class ReflectionConfig:
    r_max: int = R_MAX

    def __post_init__(self):
        if self.r_max < 1:
            raise ValueError(f"r_max deve ser >= 1, recebido {self.r_max}")


@dataclass(frozen=True)
class SelectionResult:
    action: int
    iterations_used: int
    flagged_hit: bool


@dataclass(frozen=True)
class ActionDistribution:
    """Pares (ação, probabilidade) em ordem crescente de ação"""
    actions: tuple
    probs: np.ndarray

    def prob(self, action):
        for a, p in zip(self.actions, self.probs):
            if a == action:
                return float(p)
        return 0.0

    def sample(self, rng):
        return self.actions[rng.choice(len(self.actions), p=self.probs)]


def make_distribution(prob_map):
    """ActionDistribution a partir de {ação: probabilidade}, normalizada"""
    actions = tuple(sorted(prob_map))
    probs = np.array([prob_map[a] for a in actions], dtype=np.float64)
    if len(actions) == 0 or np.any(probs < 0) or probs.sum() <= 0:
        raise ValueError("Distribuição inválida")
    return ActionDistribution(actions=actions, probs=probs / probs.sum())


def temperature(episode, schedule):
    """T = t_min + (t_max - t_min) / (1 + e^(slope * episode / delta))"""
    if schedule.delta <= 0:
        raise ValueError("delta deve ser positivo")
    exponent = schedule.slope * (episode / schedule.delta)
    # T fica em (t_min, t_max]; o termo decrescente some no arredondamento bem antes de e^x estourar
    floor = math.nextafter(schedule.t_min, math.inf)
    if exponent > 700:
        return floor
    return max(floor, schedule.t_min + (schedule.t_max - schedule.t_min) / (1.0 + math.exp(exponent)))


def inverse_temperature(episode, schedule):
    return 1.0 / temperature(episode, schedule)


def boltzmann_distribution(qmap, T):
    """P(a|s) = e^(Q/T) / soma e^(Q'/T), com subtração do máximo"""
    if T <= 0:
        raise ValueError(f"Temperatura deve ser positiva, recebido {T}")
    if not qmap:
        raise ValueError("qmap vazio")

    actions = tuple(sorted(qmap))
    q = np.array([qmap[a] for a in actions], dtype=np.float64)
    weights = np.exp((q - q.max()) / T)
    return ActionDistribution(actions=actions, probs=weights / weights.sum())


def renormalized_distribution(dist, flags):
    """Distribuição restrita às ações com flag e re-normalizada"""
    mass = {a: p for a, p in zip(dist.actions, dist.probs) if a in flags}
    return make_distribution(mass)


def flagged_mass(dist, flags, eps_min=EPS_MIN):
    """Probabilidade total das ações com flag, com piso eps_min"""
    if not flags:
        raise ValueError("Conjunto de flags vazio")
    mass = float(sum(p for a, p in zip(dist.actions, dist.probs) if a in flags))
    return max(mass, eps_min)


# --- Tabela de Flags ---

@dataclass
class FlagEntry:
    mask: int
    last_picked: Optional[int] = None


@dataclass
class FlagTable:
    """StateKey -> (bitmask de flags por coluna, última ação escolhida)"""
    entries: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries


def _mask_of(actions):
    mask = 0
    for a in actions:
        mask |= 1 << a
    return mask


def _actions_of(mask, legal):
    return frozenset(a for a in legal if mask >> a & 1)


def _restore(entry, legal):
    """Todas as ações perderam a flag: recoloca em todas exceto a última escolhida"""
    restored = [a for a in legal if a != entry.last_picked]
    if not restored:
        restored = list(legal)
    entry.mask = _mask_of(restored)


def _entry(table, key, legal):
    entry = table.entries.get(key)
    if entry is None:
        entry = FlagEntry(mask=_mask_of(legal))
        table.entries[key] = entry
    return entry


def get_flags(table, key, legal):
    """Flags atuais restritas às ações legais (nunca vazio)"""
    if not legal:
        raise ValueError("Conjunto de ações legais vazio")
    entry = _entry(table, key, legal)
    flags = _actions_of(entry.mask, legal)
    if not flags:
        # A única ação com flag ficou ilegal (coluna cheia)
        _restore(entry, legal)
        flags = _actions_of(entry.mask, legal)
    return flags


def update_flags(table, key, chosen, qmap):
    """
    Atualiza a flag da ação escolhida segundo seu Q atual

    Q < 0 remove, Q > 0 coloca, Q = 0 mantém.
    """
    if chosen not in qmap:
        raise ValueError(f"Ação {chosen} não está em qmap")
    legal = sorted(qmap)
    entry = _entry(table, key, legal)

    q = qmap[chosen]
    if q < 0:
        entry.mask &= ~(1 << chosen)
    elif q > 0:
        entry.mask |= 1 << chosen
    entry.last_picked = chosen

    if not _actions_of(entry.mask, legal):
        _restore(entry, legal)


def dump_flag_table(table):
    """Uma linha por estado: statekey bitmask last_picked ('-' se nenhuma)"""
    lines = []
    for key in sorted(table.entries):
        entry = table.entries[key]
        last = '-' if entry.last_picked is None else str(entry.last_picked)
        lines.append(f"{key:016x} {entry.mask:07b} {last}")
    return '\n'.join(lines)


def parse_flag_table(text):
    table = FlagTable()
    for number, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 3:
            raise ValueError(f"Linha {number} inválida: {line!r}")
        last = None if parts[2] == '-' else int(parts[2])
        table.entries[int(parts[0], 16)] = FlagEntry(mask=int(parts[1], 2), last_picked=last)
    return table


# --- Reflexão Clássica ---

def classical_reflect_select(dist, flags, cfg, rng):
    """Até r_max amostras; aceita a primeira com flag, senão devolve a última"""
    if not flags:
        raise ValueError("Conjunto de flags vazio")

    action = None
    for iteration in range(1, cfg.r_max + 1):
        action = dist.sample(rng)
        if action in flags:
            return SelectionResult(action=action, iterations_used=iteration, flagged_hit=True)

    return SelectionResult(action=action, iterations_used=cfg.r_max, flagged_hit=False)
