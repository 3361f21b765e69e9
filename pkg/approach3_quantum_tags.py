"""
ABORDAGEM 3: Seleção de Ações com Flags (Quântica)
- Codifica a distribuição de Boltzmann em 3 qubits: |pi> = soma sqrt(pi(a)) |a>
  (controlização coerente: árvore de rotações Y controladas)
- Grover aleatorizado: m ~ Uniforme{0..floor(1/sqrt(eps))} repetições de
  ref(pi) . ref(f), com ref(pi) = U D0 U^dagger
- Mesma reflexão de até R rodadas da abordagem 2, uma medição por rodada
- VANTAGEM: Ganho quadrático no número de iterações até obter uma ação com flag
"""

import math
from dataclasses import dataclass

import numpy as np

from approach2_classical_tags import EPS_MIN, R_MAX, SelectionResult, flagged_mass

N_QUBITS = 3
N_STATES = 2 ** N_QUBITS


@dataclass
class GroverConfig:
    eps_min: float = EPS_MIN
    r_max: int = R_MAX

    def __post_init__(self):
        if not 0.0 < self.eps_min <= 1.0:
            raise ValueError(f"eps_min deve estar em (0, 1], recebido {self.eps_min}")
        if self.r_max < 1:
            raise ValueError(f"r_max deve ser >= 1, recebido {self.r_max}")


@dataclass(frozen=True)
class AngleTree:
    """theta1 (raiz), theta2/theta3 (nível 2), theta4..theta7 (nível 3)"""
    thetas: tuple

    def __post_init__(self):
        if len(self.thetas) != N_STATES - 1:
            raise ValueError(f"Esperados {N_STATES - 1} ângulos")


@dataclass(frozen=True)
class FlagOracle:
    """Bitmask dos estados da base marcados"""
    mask: int

    @classmethod
    def from_actions(cls, actions):
        mask = 0
        for a in actions:
            if not 0 <= a < N_STATES:
                raise ValueError(f"Ação {a} fora dos {N_STATES} estados da base")
            mask |= 1 << a
        return cls(mask)

    def signs(self):
        return np.array([-1.0 if self.mask >> i & 1 else 1.0 for i in range(N_STATES)])


# (índice do ângulo, qubit alvo, controles ((qubit, valor), ...)); qubit 0 é o mais significativo
_ENCODING_GATES = (
    (0, 0, ()),
    (1, 1, ((0, 0),)),
    (2, 1, ((0, 1),)),
    (3, 2, ((0, 0), (1, 0))),
    (4, 2, ((0, 0), (1, 1))),
    (5, 2, ((0, 1), (1, 0))),
    (6, 2, ((0, 1), (1, 1))),
)


def _split_angle(left, total):
    if total <= 0:
        return 0.0
    ratio = min(1.0, max(0.0, left / total))
    return 2.0 * math.acos(math.sqrt(ratio))


def _basis_probs(dist):
    probs = np.zeros(N_STATES)
    for a, p in zip(dist.actions, dist.probs):
        if not 0 <= a < N_STATES:
            raise ValueError(f"Ação {a} não cabe em {N_QUBITS} qubits")
        probs[a] = p
    return probs


def angles_from_distribution(dist):
    """Árvore binária de ângulos: metade, quartos e pares re-normalizados"""
    p = _basis_probs(dist)
    thetas = (
        _split_angle(p[0:4].sum(), p.sum()),
        _split_angle(p[0:2].sum(), p[0:4].sum()),
        _split_angle(p[4:6].sum(), p[4:8].sum()),
        _split_angle(p[0], p[0:2].sum()),
        _split_angle(p[2], p[2:4].sum()),
        _split_angle(p[4], p[4:6].sum()),
        _split_angle(p[6], p[6:8].sum()),
    )
    return AngleTree(thetas=thetas)


def _apply_ry(sv, theta, target, controls=()):
    """Rotação Y no qubit alvo, só no bloco onde os controles têm o valor pedido"""
    state = sv.reshape([2] * N_QUBITS).copy()
    index = [slice(None)] * N_QUBITS
    for qubit, value in controls:
        index[qubit] = value

    idx0, idx1 = list(index), list(index)
    idx0[target], idx1[target] = 0, 1
    idx0, idx1 = tuple(idx0), tuple(idx1)

    c, s = math.cos(theta / 2), math.sin(theta / 2)
    a0, a1 = state[idx0].copy(), state[idx1].copy()
    state[idx0] = c * a0 - s * a1
    state[idx1] = s * a0 + c * a1
    return state.reshape(-1)


def _apply_u(sv, tree):
    for angle, target, controls in _ENCODING_GATES:
        sv = _apply_ry(sv, tree.thetas[angle], target, controls)
    return sv


def _apply_u_dagger(sv, tree):
    for angle, target, controls in reversed(_ENCODING_GATES):
        sv = _apply_ry(sv, -tree.thetas[angle], target, controls)
    return sv


def zero_state():
    sv = np.zeros(N_STATES, dtype=np.complex128)
    sv[0] = 1.0
    return sv


def encode(tree):
    """U|000> = soma sqrt(pi(a)) |a>"""
    return _apply_u(zero_state(), tree)


def reflect_flags(sv, oracle):
    """|a> -> -|a> para a com flag"""
    return np.asarray(sv, dtype=np.complex128) * oracle.signs()


def reflect_pi(sv, tree):
    """ref(pi) = U D0 U^dagger, com D0 = 2|000><000| - I"""
    sv = _apply_u_dagger(np.asarray(sv, dtype=np.complex128), tree)
    sv[1:] *= -1
    return _apply_u(sv, tree)


def success_probability(eps, m):
    """Probabilidade de medir um estado marcado após m iterações de Grover"""
    return math.sin((2 * m + 1) * math.asin(math.sqrt(eps))) ** 2


def max_repetitions(eps):
    return int(math.floor(1.0 / math.sqrt(eps)))


def grover_sample(dist, flags, cfg, rng, m=None):
    """
    Uma rodada: prepara |pi>, aplica m iterações e mede

    `m` pode ser forçado; senão é sorteado em {0, ..., floor(1/sqrt(eps))}.
    Estados de padding (fora do suporte) só aparecem por ruído numérico e são
    descartados, o que equivale a repetir a medição.
    """
    if not flags:
        raise ValueError("Conjunto de flags vazio")
    if m is None:
        eps = flagged_mass(dist, flags, cfg.eps_min)
        m = int(rng.integers(0, max_repetitions(eps) + 1))

    tree = angles_from_distribution(dist)
    oracle = FlagOracle.from_actions(flags)

    sv = encode(tree)
    for _ in range(m):
        sv = reflect_pi(reflect_flags(sv, oracle), tree)

    probs = np.abs(sv) ** 2
    support = np.zeros(N_STATES, dtype=bool)
    support[list(dist.actions)] = True
    probs[~support] = 0.0
    probs /= probs.sum()

    action = int(rng.choice(N_STATES, p=probs))
    return action, m


def quantum_reflect_select(dist, flags, r_cfg, g_cfg, rng):
    """Até r_max rodadas de grover_sample; aceita a primeira medição com flag"""
    action = None
    for iteration in range(1, r_cfg.r_max + 1):
        action, _ = grover_sample(dist, flags, g_cfg, rng)
        if action in flags:
            return SelectionResult(action=action, iterations_used=iteration, flagged_hit=True)

    return SelectionResult(action=action, iterations_used=r_cfg.r_max, flagged_hit=False)
