"""
DEEP Q-LEARNING OFFLINE: Rede de Afterstates
- Rede pequena em numpy: conv 4x4 (32 filtros) -> densa 64 -> saída escalar linear
- Q(s, a) = valor do afterstate alcançado por a em s
- Alvos da equação de Q-Learning calculados uma vez por batch de jogos
- Treino por SGD em mini-batches durante 5 épocas, checkpoint versionado
"""

import struct
from dataclasses import dataclass

import numpy as np

from connect4_game import COLS, ROWS, NoLegalMoves, apply_action, legal_actions

# Parâmetros padrão do Q-Learning
ALPHA = 0.8
GAMMA = 1.0
BATCH_GAMES = 300
EPOCHS = 5
OPTIMIZER_STEP = 1e-3
MINI_BATCH = 32

KERNEL = 4
N_FILTERS = 32
N_HIDDEN = 64
OUT_ROWS = ROWS - KERNEL + 1
OUT_COLS = COLS - KERNEL + 1
N_PATCHES = OUT_ROWS * OUT_COLS

PARAM_SHAPES = {
    'conv_w': (KERNEL * KERNEL, N_FILTERS),
    'conv_b': (N_FILTERS,),
    'dense_w': (N_PATCHES * N_FILTERS, N_HIDDEN),
    'dense_b': (N_HIDDEN,),
    'head_w': (N_HIDDEN,),
    'head_b': (1,),
}

CHECKPOINT_MAGIC = b'C4QN'
CHECKPOINT_VERSION = 1


class NonFiniteLoss(Exception):
    """Loss virou NaN/inf: passo do otimizador grande demais"""


class FormatError(Exception):
    """Checkpoint truncado, versão errada ou shapes incompatíveis"""


def _build_patch_index():
    """Índices planos das 12 janelas 4x4 (im2col), shape (12, 16)"""
    index = []
    for row in range(OUT_ROWS):
        for col in range(OUT_COLS):
            index.append([(row + r) * COLS + col + c for r in range(KERNEL) for c in range(KERNEL)])
    return np.array(index, dtype=np.intp)


PATCH_INDEX = _build_patch_index()


@dataclass
class TrainingConfig:
    alpha: float = ALPHA
    gamma: float = GAMMA
    batch_games: int = BATCH_GAMES
    epochs: int = EPOCHS
    optimizer_step: float = OPTIMIZER_STEP
    mini_batch: int = MINI_BATCH
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha deve estar em (0, 1], recebido {self.alpha}")
        if self.gamma != 1.0:
            raise ValueError("gamma é fixo em 1.0 (sem desconto)")
        if self.batch_games < 1 or self.epochs < 1 or self.mini_batch < 1:
            raise ValueError("batch_games, epochs e mini_batch devem ser >= 1")
        if self.optimizer_step <= 0:
            raise ValueError("optimizer_step deve ser positivo")


@dataclass(frozen=True)
class TrainingPair:
    afterstate: object
    target: float


class QNetwork:
    """
    Função de valor de afterstates

    Entrada (6, 7) com sinais {-1, 0, 1}; conv 4x4 sem padding -> (3, 4, 32),
    ReLU, densa 64 com ReLU, saída linear.
    """

    def __init__(self, params):
        missing = set(PARAM_SHAPES) - set(params)
        if missing:
            raise ValueError(f"Parâmetros ausentes: {sorted(missing)}")
        self.params = {}
        for name, shape in PARAM_SHAPES.items():
            value = np.array(params[name], dtype=np.float64)
            if value.shape != shape:
                raise ValueError(f"{name}: shape {value.shape}, esperado {shape}")
            self.params[name] = value

    @classmethod
    def from_seed(cls, seed, zero_head=False):
        """Pesos uniformes em +-1/sqrt(fan_in); biases zerados"""
        rng = np.random.default_rng(seed)
        params = {}
        for name, shape in PARAM_SHAPES.items():
            if name.endswith('_b'):
                params[name] = np.zeros(shape)
            else:
                limit = 1.0 / np.sqrt(shape[0])
                params[name] = rng.uniform(-limit, limit, size=shape)
        if zero_head:
            params['head_w'] = np.zeros(PARAM_SHAPES['head_w'])
            params['head_b'] = np.zeros(PARAM_SHAPES['head_b'])
        return cls(params)

    @property
    def n_params(self):
        return sum(value.size for value in self.params.values())

    def forward(self, grids):
        """grids: (n, 6, 7) -> valores (n,) e cache para o backward"""
        p = self.params
        x = np.asarray(grids, dtype=np.float64).reshape(-1, ROWS * COLS)
        n = x.shape[0]

        patches = x[:, PATCH_INDEX]                      # (n, 12, 16)
        z1 = patches @ p['conv_w'] + p['conv_b']         # (n, 12, 32)
        a1 = np.maximum(z1, 0.0)
        flat = a1.reshape(n, -1)                          # (n, 384)
        z2 = flat @ p['dense_w'] + p['dense_b']          # (n, 64)
        a2 = np.maximum(z2, 0.0)
        values = a2 @ p['head_w'] + p['head_b'][0]       # (n,)

        cache = (patches, z1, flat, z2, a2)
        return values, cache

    def backward(self, cache, d_values):
        """Gradientes de todos os parâmetros dado dL/dvalues"""
        p = self.params
        patches, z1, flat, z2, a2 = cache
        n = patches.shape[0]

        grads = {
            'head_w': a2.T @ d_values,
            'head_b': np.array([d_values.sum()]),
        }
        d_z2 = np.outer(d_values, p['head_w']) * (z2 > 0)
        grads['dense_w'] = flat.T @ d_z2
        grads['dense_b'] = d_z2.sum(axis=0)

        d_z1 = (d_z2 @ p['dense_w'].T).reshape(n, N_PATCHES, N_FILTERS) * (z1 > 0)
        grads['conv_w'] = np.einsum('npk,npf->kf', patches, d_z1)
        grads['conv_b'] = d_z1.sum(axis=(0, 1))
        return grads

    def gradients(self, grids, targets):
        """Erro quadrático médio e seus gradientes"""
        values, cache = self.forward(grids)
        errors = values - np.asarray(targets, dtype=np.float64)
        loss = float(np.mean(errors ** 2))
        grads = self.backward(cache, 2.0 * errors / len(errors))
        return loss, grads

    def activation_masks(self, grids):
        _, cache = self.forward(grids)
        _, z1, _, z2, _ = cache
        return z1 > 0, z2 > 0


def predict_values(net, boards):
    """Valores de vários tabuleiros numa única passada"""
    if not boards:
        return np.zeros(0)
    grids = np.stack([b.grid for b in boards])
    values, _ = net.forward(grids)
    return values


def predict_value(net, afterstate):
    """Q(s, a) do par (s, a) que gera este afterstate"""
    values, _ = net.forward(afterstate.grid[None])
    return float(values[0])


def q_values(net, state, player):
    """Valor de cada jogada legal, via afterstate"""
    actions = legal_actions(state)
    if not actions:
        raise NoLegalMoves("Tabuleiro cheio")
    afterstates = [apply_action(state, a, player) for a in actions]
    values = predict_values(net, afterstates)
    return {a: float(v) for a, v in zip(actions, values)}


def validate_batch(batch):
    """Cada episódio termina com exatamente uma transição terminal"""
    for i, episode in enumerate(batch):
        terminals = [t.terminal for t in episode]
        if not episode or sum(terminals) != 1 or not terminals[-1]:
            raise ValueError(f"Episódio {i} não termina com exatamente uma transição terminal")


def compute_targets(batch, net, cfg):
    """
    Alvos: q_old + alpha * (r + gamma * max_a Q(s', a) - q_old)

    Transições terminais não usam bootstrap. A rede é avaliada uma vez,
    antes do treino das épocas.
    """
    validate_batch(batch)
    transitions = [t for episode in batch for t in episode]
    if not transitions:
        return []

    q_old = predict_values(net, [t.afterstate for t in transitions])

    # Afterstates de todos os next_states não terminais numa passada só
    next_afterstates, owners = [], []
    for i, t in enumerate(transitions):
        if t.terminal:
            continue
        for action in legal_actions(t.next_state):
            next_afterstates.append(apply_action(t.next_state, action, t.player))
            owners.append(i)

    bootstrap = np.zeros(len(transitions))
    if next_afterstates:
        next_values = predict_values(net, next_afterstates)
        best = np.full(len(transitions), -np.inf)
        np.maximum.at(best, np.array(owners), next_values)
        has_next = np.isfinite(best)
        bootstrap[has_next] = best[has_next]

    pairs = []
    for i, t in enumerate(transitions):
        target = q_old[i] + cfg.alpha * (t.reward + cfg.gamma * bootstrap[i] - q_old[i])
        pairs.append(TrainingPair(afterstate=t.afterstate, target=float(target)))
    return pairs


def train_batch(net, pairs, cfg, rng=None):
    """
    Regressão dos valores previstos sobre os alvos, `epochs` passadas

    Retorna o MSE médio de cada época (média ponderada dos mini-batches).
    """
    if not pairs:
        raise ValueError("Nenhum par de treino")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    grids = np.stack([p.afterstate.grid for p in pairs]).astype(np.float64)
    targets = np.array([p.target for p in pairs], dtype=np.float64)
    n = len(pairs)

    loss_trace = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0

        for start in range(0, n, cfg.mini_batch):
            idx = order[start:start + cfg.mini_batch]
            loss, grads = net.gradients(grids[idx], targets[idx])
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"Loss não finita na época {epoch + 1}")

            for name, grad in grads.items():
                net.params[name] -= cfg.optimizer_step * grad
            total += loss * len(idx)

        loss_trace.append(total / n)

    return loss_trace


def gradient_check(net, board, target=1.0, n_per_tensor=20, step=1e-5, rng=None,
                   gradient_fn=None):
    """
    Compara gradientes analíticos com diferenças centrais

    Amostra até `n_per_tensor` parâmetros de cada tensor (>= 100 no total).
    Parâmetros cuja perturbação cruza uma dobra da ReLU são trocados por outros.
    Retorna o maior erro relativo.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if gradient_fn is None:
        gradient_fn = net.gradients

    grid = board.grid[None].astype(np.float64)
    targets = np.array([target])
    _, analytic = gradient_fn(grid, targets)

    def loss_at():
        values, _ = net.forward(grid)
        return float((values[0] - target) ** 2)

    max_error = 0.0
    for name, tensor in net.params.items():
        flat = tensor.reshape(-1)
        checked = 0
        for index in rng.permutation(flat.size):
            if checked >= n_per_tensor:
                break
            original = flat[index]

            flat[index] = original + step
            plus = loss_at()
            masks_plus = net.activation_masks(grid)
            flat[index] = original - step
            minus = loss_at()
            masks_minus = net.activation_masks(grid)
            flat[index] = original

            if any(not np.array_equal(a, b) for a, b in zip(masks_plus, masks_minus)):
                continue

            numeric = (plus - minus) / (2 * step)
            exact = float(analytic[name].reshape(-1)[index])
            scale = max(abs(exact), abs(numeric), 1e-6)
            max_error = max(max_error, abs(exact - numeric) / scale)
            checked += 1

    return max_error


def save_checkpoint(net):
    """
    Bytes do checkpoint: magic, versão, manifesto de shapes e floats little-endian
    """
    header = bytearray(CHECKPOINT_MAGIC)
    header += struct.pack('<BB', CHECKPOINT_VERSION, len(PARAM_SHAPES))
    for name, shape in PARAM_SHAPES.items():
        encoded = name.encode('ascii')
        header += struct.pack('<B', len(encoded)) + encoded
        header += struct.pack('<B', len(shape)) + struct.pack(f'<{len(shape)}I', *shape)

    body = b''.join(net.params[name].astype('<f8').tobytes() for name in PARAM_SHAPES)
    return bytes(header) + body


def load_checkpoint(data):
    """Reconstrói a rede; FormatError se algo não bater"""
    data = bytes(data)
    offset = 0

    def take(size):
        nonlocal offset
        if offset + size > len(data):
            raise FormatError("Checkpoint truncado")
        chunk = data[offset:offset + size]
        offset += size
        return chunk

    if take(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
        raise FormatError("Magic inválido")
    version, n_tensors = struct.unpack('<BB', take(2))
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"Versão {version} não suportada (esperada {CHECKPOINT_VERSION})")

    manifest = []
    for _ in range(n_tensors):
        (name_len,) = struct.unpack('<B', take(1))
        name = take(name_len).decode('ascii', errors='replace')
        (ndim,) = struct.unpack('<B', take(1))
        shape = struct.unpack(f'<{ndim}I', take(4 * ndim))
        manifest.append((name, tuple(shape)))

    if manifest != list(PARAM_SHAPES.items()):
        raise FormatError(f"Manifesto de shapes incompatível: {manifest}")

    params = {}
    for name, shape in manifest:
        size = int(np.prod(shape))
        params[name] = np.frombuffer(take(8 * size), dtype='<f8').reshape(shape).astype(np.float64)

    if offset != len(data):
        raise FormatError("Bytes sobrando após o último tensor")
    return QNetwork(params)


def save_checkpoint_file(net, path):
    with open(path, 'wb') as f:
        f.write(save_checkpoint(net))


def load_checkpoint_file(path):
    with open(path, 'rb') as f:
        return load_checkpoint(f.read())
