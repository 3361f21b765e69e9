"""
LINHA DE COMANDO
Subcomandos:
- train      treina e testa um agente (uma seed), salva checkpoint e métricas
- test       testa um checkpoint contra o Negamax Aleatorizado
- reproduce  roda as 3 abordagens em várias seeds e gera a tabela de resultados
- play       humano contra um checkpoint no terminal

Um arquivo --config com linhas `chave = valor` define valores padrão;
flags passadas na linha de comando têm prioridade.
"""

import argparse
import os
import sys

from approach1_epsilon_greedy import greedy_action
from approach2_classical_tags import ReflectionConfig
from approach3_quantum_tags import GroverConfig
from batch_trainer import POLICIES, ROLES, ConfigError, ExperimentConfig, run_single, test_run
from connect4_game import (
    GameOutcome,
    IllegalMove,
    apply_action,
    board_to_text,
    empty_board,
    legal_actions,
    outcome,
)
from gera_tabela import reproduce, write_loss_csv, write_runs_csv
from negamax_opponent import NegamaxConfig
from qlearn_network import FormatError, TrainingConfig, load_checkpoint_file, q_values

BOOLEAN_TRUE = ('1', 'true', 'yes', 'sim', 'on')
BOOLEAN_FALSE = ('0', 'false', 'no', 'nao', 'não', 'off')


def read_config_file(path):
    """Lê `chave = valor` (comentários com #); chaves aceitam - ou _"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Arquivo de configuração não encontrado: {path}")

    values = {}
    with open(path, 'r') as f:
        for number, line in enumerate(f, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ValueError(f"{path}:{number}: esperado 'chave = valor'")
            key, value = (part.strip() for part in line.split('=', 1))
            values[key.replace('-', '_')] = value
    return values


def _add_experiment_flags(parser):
    group = parser.add_argument_group('experimento')
    group.add_argument('--config', help='arquivo chave = valor com valores padrão')
    group.add_argument('--role', choices=ROLES, default='player1')
    group.add_argument('--policy', choices=POLICIES, default='classical_tags')
    group.add_argument('--train-episodes', type=int, default=None)
    group.add_argument('--test-episodes', type=int, default=1000)
    group.add_argument('--batch-games', type=int, default=300)
    group.add_argument('--output-dir', default='results')

    group = parser.add_argument_group('oponente')
    group.add_argument('--depth', type=int, default=2)
    group.add_argument('--omega', type=float, default=0.3)

    group = parser.add_argument_group('treino')
    group.add_argument('--alpha', type=float, default=0.8)
    group.add_argument('--epochs', type=int, default=5)
    group.add_argument('--optimizer-step', type=float, default=1e-3)
    group.add_argument('--mini-batch', type=int, default=32)

    group = parser.add_argument_group('exploração')
    group.add_argument('--delta', type=float, default=None, help='escala de episódios da temperatura')
    group.add_argument('--r-max', type=int, default=5)
    group.add_argument('--eps-min', type=float, default=0.04)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='run_experiment.py',
        description='Exploração com flags (clássica e quântica) para Deep Q-Learning em Connect Four',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    train = sub.add_parser('train', help='treina e testa um agente')
    _add_experiment_flags(train)
    train.add_argument('--seed', type=int, default=0)

    test = sub.add_parser('test', help='testa um checkpoint')
    _add_experiment_flags(test)
    test.add_argument('--checkpoint', required=True)
    test.add_argument('--seed', type=int, default=0)

    repro = sub.add_parser('reproduce', help='tabela multi-seed das 3 abordagens')
    _add_experiment_flags(repro)
    repro.add_argument('--seeds', type=int, default=20, help='número de seeds')
    repro.add_argument('--first-seed', type=int, default=0)
    repro.add_argument('--policies', nargs='+', choices=POLICIES, default=list(POLICIES))
    repro.add_argument('--workers', type=int, default=1)
    repro.add_argument('--plot', action='store_true', help='salva gráficos de comparação')

    play = sub.add_parser('play', help='jogue contra um checkpoint')
    play.add_argument('--config', help='arquivo chave = valor com valores padrão')
    play.add_argument('--checkpoint', required=True)
    play.add_argument('--human-first', action='store_true')

    return parser, sub.choices


def _apply_config_file(parser, subparsers, argv):
    """Relê argv com os valores do --config como padrão"""
    args, _ = parser.parse_known_args(argv)
    if not getattr(args, 'config', None):
        return parser.parse_args(argv)

    values = read_config_file(args.config)
    subparser = subparsers[args.command]
    actions = {a.dest: a for a in subparser._actions}

    defaults = {}
    for key, value in values.items():
        if key not in actions or key in ('help', 'config'):
            subparser.error(f"chave desconhecida no arquivo de configuração: {key}")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            lowered = value.lower()
            if lowered not in BOOLEAN_TRUE + BOOLEAN_FALSE:
                subparser.error(f"valor booleano inválido para {key}: {value}")
            defaults[key] = lowered in BOOLEAN_TRUE
        elif action.nargs in ('+', '*'):
            defaults[key] = value.split()
        else:
            # argparse converte padrões string com o `type` da flag
            defaults[key] = value

    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def build_config(args):
    return ExperimentConfig(
        role=args.role,
        policy=args.policy,
        train_episodes=args.train_episodes,
        test_episodes=args.test_episodes,
        batch_games=args.batch_games,
        negamax=NegamaxConfig(depth=args.depth, omega=args.omega),
        training=TrainingConfig(
            alpha=args.alpha,
            epochs=args.epochs,
            optimizer_step=args.optimizer_step,
            mini_batch=args.mini_batch,
            batch_games=args.batch_games,
        ),
        reflection=ReflectionConfig(r_max=args.r_max),
        grover=GroverConfig(eps_min=args.eps_min, r_max=args.r_max),
        delta=args.delta,
        output_dir=args.output_dir,
    )


def cmd_train(args):
    cfg = build_config(args)
    metrics = run_single(cfg, args.seed, output_dir=cfg.output_dir)

    stem = os.path.join(cfg.output_dir, f"{cfg.policy}_{cfg.role}_seed{args.seed}")
    write_runs_csv([metrics], stem + '_metrics.csv')
    write_loss_csv([metrics], stem + '_losses.csv')
    print(f"Checkpoint e métricas salvos em: {cfg.output_dir}/")
    return 0


def cmd_test(args):
    cfg = build_config(args)
    net = load_checkpoint_file(args.checkpoint)
    counts = test_run(net, cfg, args.seed)

    print(f"\nTeste de {args.checkpoint} ({cfg.role}, {cfg.test_episodes} jogos):")
    print(f"  Vitórias: {counts['wins']}  Empates: {counts['draws']}  Derrotas: {counts['losses']}")
    print(f"  Taxa de vitória: {counts['win_rate']:.1f}%")
    return 0


def cmd_reproduce(args):
    cfg = build_config(args)
    seeds = list(range(args.first_seed, args.first_seed + args.seeds))
    runs, reports = reproduce(cfg, seeds, policies=args.policies, workers=args.workers)

    from visualization_utils import print_statistics
    print_statistics(reports, cfg.role)

    if args.plot and reports:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
        from batch_trainer import DELTAS
        from visualization_utils import plot_inverse_temperature, plot_loss_traces, save_comparison_report

        save_comparison_report(reports, os.path.join(cfg.output_dir, 'comparison_report.png'))
        for name, fig in (('inverse_temperature.png', plot_inverse_temperature(DELTAS)),
                          ('loss_traces.png', plot_loss_traces(runs))):
            fig.savefig(os.path.join(cfg.output_dir, name), dpi=150, bbox_inches='tight')
            plt.close(fig)

    return 0 if runs else 1


def cmd_play(args, stdin=None):
    stdin = stdin or sys.stdin
    net = load_checkpoint_file(args.checkpoint)
    human = 1 if args.human_first else -1
    board = empty_board()
    player = 1

    print("Você joga com X" if human == 1 else "Você joga com O")
    while outcome(board) is GameOutcome.ONGOING:
        print('\n' + board_to_text(board))
        print('0123456')

        if player == human:
            print(f"Sua jogada {legal_actions(board)}: ", end='', flush=True)
            line = stdin.readline()
            if not line:
                print("\nJogo interrompido.")
                return 1
            try:
                board = apply_action(board, int(line.strip()), player)
            except (ValueError, IllegalMove) as e:
                print(f"Jogada inválida: {e}")
                continue
        else:
            action = greedy_action(q_values(net, board, player))
            print(f"Rede joga na coluna {action}")
            board = apply_action(board, action, player)
        player = -player

    print('\n' + board_to_text(board))
    result = outcome(board)
    if result is GameOutcome.DRAW:
        print("Empate!")
    elif (result is GameOutcome.WIN1) == (human == 1):
        print("Você venceu!")
    else:
        print("A rede venceu!")
    return 0


COMMANDS = {
    'train': cmd_train,
    'test': cmd_test,
    'reproduce': cmd_reproduce,
    'play': cmd_play,
}


def main(argv=None):
    parser, subparsers = build_parser()
    try:
        args = _apply_config_file(parser, subparsers, argv)
        return COMMANDS[args.command](args)
    except SystemExit as e:
        # argparse: uso inválido (2) ou --help (0)
        return e.code if isinstance(e.code, int) else 1
    except (ConfigError, FormatError, FileNotFoundError, ValueError) as e:
        print(f"Erro: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
