"""
ABORDAGEM 1: Epsilon-Greedy
- Com probabilidade epsilon escolhe uma ação aleatória, senão a de maior Q
- epsilon = 1 / ln(episode + 1), limitado a 1 (o +1 evita log(1) = 0)
- VANTAGEM: Simples, serve de baseline para as abordagens com flags
"""

import math


def epsilon(episode):
    """Taxa de exploração do episódio (episode >= 1)"""
    if episode < 1:
        raise ValueError(f"episode deve ser >= 1, recebido {episode}")
    return min(1.0, 1.0 / math.log(episode + 1))


def greedy_action(qmap):
    """Maior Q; empate resolvido pela menor coluna"""
    best = max(qmap.values())
    return min(a for a, q in qmap.items() if q == best)


def epsilon_greedy_select(qmap, eps, rng):
    """Ação aleatória com probabilidade eps, senão argmax de Q"""
    if not qmap:
        raise ValueError("qmap vazio")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps deve estar em [0, 1], recebido {eps}")

    if rng.random() < eps:
        actions = sorted(qmap)
        return actions[rng.integers(len(actions))]
    return greedy_action(qmap)
