"""
NÚCLEO DO JOGO: Regras do Connect Four
- Tabuleiro 6x7 com células em {-1, 0, +1} (0 vazio, +1 jogador 1, -1 jogador 2)
- Linhas indexadas de baixo para cima (linha 0 = fundo)
- Afterstates, resultado da partida e função de recompensa
- Tudo com semântica de valor: nenhuma função altera o tabuleiro recebido
"""

import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np

ROWS = 6
COLS = 7
CONNECT = 4

# Símbolos do formato texto (linha de cima primeiro)
SYMBOLS = {1: 'X', -1: 'O', 0: '.'}
SYMBOL_VALUES = {v: k for k, v in SYMBOLS.items()}


class IllegalMove(Exception):
    """Coluna cheia ou fora do tabuleiro"""


class NoLegalMoves(Exception):
    """Estado terminal: não há jogada possível"""


class GameOutcome(Enum):
    WIN1 = 'win1'
    WIN2 = 'win2'
    DRAW = 'draw'
    ONGOING = 'ongoing'


def _build_lines():
    """Todas as 69 linhas de tamanho 4 como índices planos (row * COLS + col)"""
    lines = []
    directions = [(0, 1), (1, 0), (1, 1), (1, -1)]
    for row in range(ROWS):
        for col in range(COLS):
            for dr, dc in directions:
                end_r = row + dr * (CONNECT - 1)
                end_c = col + dc * (CONNECT - 1)
                if 0 <= end_r < ROWS and 0 <= end_c < COLS:
                    lines.append([(row + dr * k) * COLS + col + dc * k for k in range(CONNECT)])
    return np.array(lines, dtype=np.intp)


LINES = _build_lines()


class Board:
    """
    Posição do Connect Four (valor imutável)

    O grid é um array int8 (6, 7) somente leitura. Duas instâncias com o mesmo
    conteúdo são iguais e têm o mesmo hash.
    """

    __slots__ = ('grid',)

    def __init__(self, grid=None):
        if grid is None:
            grid = np.zeros((ROWS, COLS), dtype=np.int8)
        else:
            grid = np.array(grid, dtype=np.int8)
            if grid.shape != (ROWS, COLS):
                raise ValueError(f"Tabuleiro deve ter shape {(ROWS, COLS)}, recebido {grid.shape}")
        grid.setflags(write=False)
        self.grid = grid

    def __eq__(self, other):
        return isinstance(other, Board) and np.array_equal(self.grid, other.grid)

    def __hash__(self):
        return state_key(self)

    def __repr__(self):
        return f"Board(\n{board_to_text(self)}\n)"

    @property
    def n_discs(self):
        return int(np.count_nonzero(self.grid))

    def copy(self):
        return Board(self.grid.copy())


@dataclass(frozen=True)
class Transition:
    """Uma transição do ponto de vista do agente"""
    state: Board
    action: int
    afterstate: Board
    next_state: Board
    reward: float
    terminal: bool
    player: int = 1


def empty_board():
    return Board()


def legal_actions(state):
    """Colunas cujo topo está vazio, em ordem crescente"""
    return [int(c) for c in np.flatnonzero(state.grid[ROWS - 1] == 0)]


def apply_action(state, action, player):
    """
    Retorna novo tabuleiro com o disco de `player` na célula vazia mais baixa da coluna
    """
    if not 0 <= action < COLS:
        raise IllegalMove(f"Coluna {action} fora do tabuleiro")

    column = state.grid[:, action]
    empty = np.flatnonzero(column == 0)
    if len(empty) == 0:
        raise IllegalMove(f"Coluna {action} está cheia")

    grid = state.grid.copy()
    grid[empty[0], action] = player
    return Board(grid)


def outcome(state):
    """Varre as 69 linhas de 4 células: vitória, empate ou jogo em andamento"""
    sums = state.grid.reshape(-1)[LINES].sum(axis=1, dtype=np.int16)

    if np.any(sums == CONNECT):
        return GameOutcome.WIN1
    if np.any(sums == -CONNECT):
        return GameOutcome.WIN2
    if state.n_discs == ROWS * COLS:
        return GameOutcome.DRAW
    return GameOutcome.ONGOING


def is_terminal(state):
    return outcome(state) is not GameOutcome.ONGOING


def reward(result, perspective):
    """Recompensa: 1 vitória, 0.5 empate, -1 derrota, 0 jogo em andamento"""
    if result is GameOutcome.ONGOING:
        return 0.0
    if result is GameOutcome.DRAW:
        return 0.5
    winner = 1 if result is GameOutcome.WIN1 else -1
    return 1.0 if winner == perspective else -1.0


def state_key(state):
    """
    Digest de 64 bits do tabuleiro (blake2b sobre os 42 bytes do grid)

    Colisão desprezível para 1e5 estados (~2.7e-10 pelo paradoxo do aniversário).
    """
    digest = hashlib.blake2b(state.grid.tobytes(), digest_size=8).digest()
    return int.from_bytes(digest, 'little')


def player_to_move(state):
    """+1 se o número de discos dos jogadores é igual, senão -1"""
    ones = int(np.count_nonzero(state.grid == 1))
    twos = int(np.count_nonzero(state.grid == -1))
    return 1 if ones == twos else -1


def check_invariants(state):
    """Gravidade e balanço de peças; retorna lista de problemas (vazia = ok)"""
    problems = []
    grid = state.grid

    if not np.all(np.isin(grid, (-1, 0, 1))):
        problems.append("célula fora de {-1, 0, 1}")

    occupied = grid != 0
    # Célula ocupada acima de uma vazia
    floating = occupied[1:] & ~occupied[:-1]
    if np.any(floating):
        problems.append("disco flutuando (gravidade)")

    balance = int(np.count_nonzero(grid == 1)) - int(np.count_nonzero(grid == -1))
    if balance not in (0, 1):
        problems.append(f"balanço de peças inválido: {balance}")

    return problems


def board_to_text(state):
    """6 linhas de 7 caracteres, linha de cima primeiro"""
    lines = []
    for row in range(ROWS - 1, -1, -1):
        lines.append(''.join(SYMBOLS[int(v)] for v in state.grid[row]))
    return '\n'.join(lines)


def board_from_text(text):
    """Lê o formato texto; valida gravidade e balanço"""
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if len(lines) != ROWS or any(len(line) != COLS for line in lines):
        raise ValueError(f"Esperadas {ROWS} linhas de {COLS} caracteres")

    grid = np.zeros((ROWS, COLS), dtype=np.int8)
    for i, line in enumerate(lines):
        row = ROWS - 1 - i
        for col, char in enumerate(line):
            if char not in SYMBOL_VALUES:
                raise ValueError(f"Caractere inválido '{char}' na linha {i + 1}")
            grid[row, col] = SYMBOL_VALUES[char]

    board = Board(grid)
    problems = check_invariants(board)
    if problems:
        raise ValueError(f"Tabuleiro inválido: {', '.join(problems)}")
    return board


def random_position(rng, max_plies=42, stop_at_terminal=True):
    """
    Jogada aleatória legal a partir do tabuleiro vazio

    Para no primeiro estado terminal quando `stop_at_terminal` (o estado
    retornado pode então ser terminal).
    """
    board = empty_board()
    player = 1
    n_plies = int(rng.integers(0, max_plies + 1))

    for _ in range(n_plies):
        actions = legal_actions(board)
        if not actions:
            break
        board = apply_action(board, int(rng.choice(actions)), player)
        player = -player
        if stop_at_terminal and is_terminal(board):
            break

    return board
