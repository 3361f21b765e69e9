"""
OPONENTE: Negamax Aleatorizado com Poda Alfa-Beta
- Heurística por janelas 4x4: soma de cada linha da janela (4 linhas, 4 colunas, 2 diagonais)
- Negamax de profundidade 2 com poda abaixo da raiz
- Com probabilidade omega escolhe uma jogada aleatória (preferindo scores positivos),
  exceto em escolhas críticas (vitória forçada ou derrota inevitável)
"""

from dataclasses import dataclass

import numpy as np

from connect4_game import (
    COLS,
    ROWS,
    GameOutcome,
    NoLegalMoves,
    apply_action,
    legal_actions,
    outcome,
    player_to_move,
)

# Parâmetros padrão
DEPTH = 2
OMEGA = 0.3
WIN_SCORE = 10_000

WINDOW = 4


def _build_window_lines():
    """Índices planos (12 janelas, 10 linhas, 4 células)"""
    windows = []
    for row0 in range(ROWS - WINDOW + 1):
        for col0 in range(COLS - WINDOW + 1):
            cells = [[(row0 + r) * COLS + col0 + c for c in range(WINDOW)] for r in range(WINDOW)]
            lines = []
            lines.extend(cells[r] for r in range(WINDOW))
            lines.extend([cells[r][c] for r in range(WINDOW)] for c in range(WINDOW))
            lines.append([cells[k][k] for k in range(WINDOW)])
            lines.append([cells[k][WINDOW - 1 - k] for k in range(WINDOW)])
            windows.append(lines)
    return np.array(windows, dtype=np.intp)


WINDOW_LINES = _build_window_lines()


@dataclass
class NegamaxConfig:
    depth: int = DEPTH
    omega: float = OMEGA
    win_score: int = WIN_SCORE

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth deve ser >= 1, recebido {self.depth}")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError(f"omega deve estar em [0, 1], recebido {self.omega}")
        # 12 janelas x (2*3 + 2*3) é o maior módulo possível da heurística
        if self.win_score <= 12 * 12 + self.depth:
            raise ValueError("win_score precisa dominar a heurística")


@dataclass
class ScoredMoves:
    """Scores das jogadas na raiz, do ponto de vista de quem joga"""
    scores: dict
    best_score: float

    def argmax(self):
        """Melhor jogada; empate resolvido pela menor coluna"""
        return min(a for a, s in self.scores.items() if s == self.best_score)


def heuristic_eval(state, player):
    """
    Soma das linhas de cada janela 4x4; h_max > 1 soma 2*h_max e h_min < -1 soma 2*h_min.
    Resultado negado quando o jogador avaliado é o jogador 2.
    """
    sums = state.grid.reshape(-1)[WINDOW_LINES].sum(axis=2, dtype=np.int16)
    h_max = sums.max(axis=1)
    h_min = sums.min(axis=1)

    max_heuristic = int(2 * h_max[h_max > 1].sum())
    min_heuristic = int(2 * h_min[h_min < -1].sum())

    value = max_heuristic + min_heuristic
    return -value if player == -1 else value


def _child_value(child, depth, alpha, beta, player, ply, win_score):
    """Valor do filho para `player`, que acabou de jogar"""
    result = outcome(child)
    if result is GameOutcome.DRAW:
        return 0
    if result is not GameOutcome.ONGOING:
        winner = 1 if result is GameOutcome.WIN1 else -1
        return win_score - ply if winner == player else -(win_score - ply)
    if depth == 0:
        return heuristic_eval(child, player)
    return -_search(child, depth, -beta, -alpha, -player, ply, win_score)


def _search(state, depth, alpha, beta, player, ply, win_score):
    """Negamax com poda; `state` não terminal"""
    best = -np.inf
    for action in legal_actions(state):
        child = apply_action(state, action, player)
        score = _child_value(child, depth - 1, alpha, beta, player, ply + 1, win_score)

        if score > best:
            best = score
        alpha = max(alpha, score)
        if alpha >= beta:
            break  # corte beta

    return best


def negamax(state, depth, alpha=-np.inf, beta=np.inf, player=None, win_score=WIN_SCORE):
    """
    Scores de todas as jogadas da raiz: score_A = -Negamax(depth - 1)_B

    A raiz não é podada (cada filho é buscado com a janela completa), então
    todos os scores retornados são exatos. A poda só atua nos níveis abaixo.
    """
    if depth < 1:
        raise ValueError("depth deve ser >= 1")
    if alpha >= beta:
        raise ValueError("alpha deve ser menor que beta")
    if player is None:
        player = player_to_move(state)

    actions = legal_actions(state)
    if not actions or outcome(state) is not GameOutcome.ONGOING:
        raise NoLegalMoves("Estado terminal, nenhuma jogada para avaliar")

    scores = {}
    for action in actions:
        child = apply_action(state, action, player)
        scores[action] = _child_value(child, depth - 1, alpha, beta, player, 1, win_score)

    return ScoredMoves(scores=scores, best_score=max(scores.values()))


def is_critical(scored, config):
    """Melhor score na faixa terminal: vitória forçada ou todas as jogadas perdem"""
    return abs(scored.best_score) >= config.win_score - config.depth


def select_move(state, config, rng, player=None):
    """Jogada do Negamax Aleatorizado"""
    scored = negamax(state, config.depth, player=player, win_score=config.win_score)

    if is_critical(scored, config):
        return scored.argmax()

    if rng.random() < config.omega:
        positive = [a for a, s in scored.scores.items() if s > 0]
        candidates = positive if positive else list(scored.scores)
        return int(candidates[rng.integers(len(candidates))])

    return scored.argmax()
