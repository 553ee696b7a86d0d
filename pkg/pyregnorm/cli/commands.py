"""
Comandos de linha de comando do PyRegNorm: kappa, limits, simulate, study e check.
"""

import argparse
import logging
import math
import sys
import time
import warnings
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pyregnorm import __version__
from pyregnorm.core.checks import SUITES, run_checks
from pyregnorm.core.errors import DomainError, HypothesisWarning, PyRegNormError
from pyregnorm.core.kappa import kappa_finite, kappa_limit
from pyregnorm.core.limitlaw import CenteringMode, centering, default_centering_mode, limit_law
from pyregnorm.core.model import BetaSpec, ModelConfig
from pyregnorm.core.oracle import OracleBudget
from pyregnorm.core.sim import STUDY_ASPECTS, STUDY_RHOS, McConfig, run_mc, run_study, study_panels
from pyregnorm.utils.config import load_config, resolve_threads
from pyregnorm.utils.output import (
    OutputEnvelope, write_cdf_csv, write_envelope, write_pdf_csv,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

CommandResult = Tuple[OutputEnvelope, int]


def _add_beta_arguments(parser: argparse.ArgumentParser, defaults: Dict[str, Any]) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--beta', choices=['hyperbolic'], default=None,
                       help=f"Sequência beta (padrão: {defaults['beta']})")
    group.add_argument('--beta-file', metavar='CSV',
                       help='CSV de uma coluna com beta explícito')


def _add_model_arguments(parser: argparse.ArgumentParser, defaults: Dict[str, Any]) -> None:
    parser.add_argument('--rho', type=float, required=True, help='Parâmetro KMS, |rho| < 1')
    parser.add_argument('--n', type=int, required=True, help='Número de observações')
    size = parser.add_mutually_exclusive_group(required=True)
    size.add_argument('--p', type=int, help='Número de preditores')
    size.add_argument('--c', type=float, help='Razão p/n (p = round(c*n))')
    parser.add_argument('--sigma2', type=float, default=defaults['sigma2'],
                        help='Variância do erro')
    _add_beta_arguments(parser, defaults)


def _add_centering_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--centering', choices=[m.value for m in CenteringMode],
                        help='Modo de centralização (padrão: limit para beta hiperbólico, '
                             'finite para beta explícito)')


def build_parser(defaults: Optional[Dict[str, Any]] = None) -> argparse.ArgumentParser:
    """
    Constrói o analisador de argumentos.

    Args:
        defaults: Configuração carregada (padrões dos argumentos)

    Returns:
        ArgumentParser com os cinco subcomandos
    """
    defaults = defaults or load_config()
    parser = argparse.ArgumentParser(
        prog='pyregnorm',
        allow_abbrev=False,
        description="PyRegNorm - Lei limite normal de ||X'Y||^2 sob covariância KMS",
    )
    parser.add_argument('--version', action='version', version=f'PyRegNorm v{__version__}')
    parser.add_argument('--out', metavar='ARQUIVO', help='Grava o JSON no arquivo em vez de stdout')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Mais mensagens de log (-vv para depuração)')
    parser.add_argument('--strict', action='store_true',
                        help='Trata avisos de hipótese como falha (código 1)')
    sub = parser.add_subparsers(dest='command', required=True)

    kappa = sub.add_parser('kappa', allow_abbrev=False,
                           help='Constantes kappa_1, kappa_2, kappa_3')
    kappa.add_argument('--rho', type=float, required=True, help='Parâmetro KMS, |rho| < 1')
    kappa.add_argument('--p', type=int, help='Dimensão para as constantes finitas')
    kappa.add_argument('--limit', action='store_true', help='Constantes limite')
    kappa.add_argument('--both', action='store_true',
                       help='Finitas, limite e diferença escalada por sqrt(p) (requer --p)')
    kappa.add_argument('--truncation', type=int, default=defaults['series_truncation'],
                       help='Termos das séries para beta explícito')
    _add_beta_arguments(kappa, defaults)

    limits = sub.add_parser('limits', allow_abbrev=False,
                            help='Centralização e variância da lei limite')
    _add_model_arguments(limits, defaults)
    _add_centering_argument(limits)

    simulate = sub.add_parser('simulate', allow_abbrev=False, help='Estudo de Monte Carlo')
    _add_model_arguments(simulate, defaults)
    simulate.add_argument('--reps', type=int, default=defaults['reps'], help='Número de réplicas')
    simulate.add_argument('--seed', type=int, default=defaults['seed'], help='Semente mestre')
    _add_centering_argument(simulate)
    simulate.add_argument('--threads', type=int, help='Número de threads')
    simulate.add_argument('--block-rows', type=int, default=defaults['rows_per_block'],
                          help='Linhas geradas por bloco')
    simulate.add_argument('--grid-points', type=int, default=defaults['cdf_grid_points'],
                          help='Pontos da grade da CDF')
    simulate.add_argument('--bins', type=int, default=defaults['histogram_bins'],
                          help='Classes do histograma')
    simulate.add_argument('--out-prefix', metavar='PREFIXO',
                          help='Grava <prefixo>_cdf.csv e <prefixo>_pdf.csv')
    simulate.add_argument('--format', choices=['full', 'compact'], default='full',
                          help='compact omite réplicas e grades do JSON')
    simulate.add_argument('--fail-above', type=float, metavar='KS',
                          help='Código 1 se a distância KS passar deste valor')

    study = sub.add_parser('study', allow_abbrev=False,
                           help='Estudo de Monte Carlo em todos os painéis (rho, c)')
    study.add_argument('--rho', type=float, nargs='+', default=list(STUDY_RHOS),
                       help='Valores de rho (padrão: todos os painéis)')
    study.add_argument('--aspect', type=float, nargs=2, action='append', metavar=('C', 'N'),
                       help='Par (c, n); repetível (padrão: 1 500 e 10 160)')
    study.add_argument('--sigma2', type=float, default=defaults['sigma2'],
                       help='Variância do erro')
    study.add_argument('--reps', type=int, default=defaults['reps'],
                       help='Réplicas por painel')
    study.add_argument('--seed', type=int, default=defaults['seed'], help='Semente mestre')
    _add_centering_argument(study)
    study.add_argument('--threads', type=int, help='Número de threads')
    study.add_argument('--out-prefix', metavar='PREFIXO',
                       help='Grava <prefixo>_<painel>_cdf.csv e <prefixo>_<painel>_pdf.csv')
    study.add_argument('--fail-above', type=float, metavar='KS',
                       help='Código 1 se a distância KS de algum painel passar deste valor')

    check = sub.add_parser('check', allow_abbrev=False,
                           help='Conferência das identidades contra os oráculos')
    check.add_argument('--suite', choices=sorted(SUITES) + ['all'], default='all',
                       help='Suíte a executar')

    for subparser in (kappa, limits, simulate, study, check):
        subparser.add_argument('--out', metavar='ARQUIVO', default=argparse.SUPPRESS,
                               help='Grava o JSON no arquivo em vez de stdout')
    return parser


def configure_logging(verbosity: int) -> None:
    """Configura o logger raiz em stderr conforme -v."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def resolve_beta(args: argparse.Namespace, defaults: Dict[str, Any]) -> BetaSpec:
    """BetaSpec a partir de --beta/--beta-file ou da configuração."""
    if args.beta_file:
        return BetaSpec.from_csv(args.beta_file)
    choice = args.beta or defaults['beta']
    if choice == 'hyperbolic':
        return BetaSpec.hyperbolic()
    return BetaSpec.from_csv(choice)


def resolve_model(args: argparse.Namespace, defaults: Dict[str, Any]) -> ModelConfig:
    beta = resolve_beta(args, defaults)
    if args.p is not None:
        return ModelConfig(args.n, args.p, args.rho, args.sigma2, beta)
    return ModelConfig.from_aspect(args.n, args.c, args.rho, args.sigma2, beta)


def cmd_kappa(args: argparse.Namespace, defaults: Dict[str, Any]) -> CommandResult:
    """
    Constantes kappa finitas (--p), limite (--limit) ou ambas (--both --p).
    """
    if args.both:
        if args.p is None:
            raise DomainError("--both requer --p")
    elif (args.p is None) == (not args.limit):
        raise DomainError("Informe exatamente um entre --p e --limit")

    beta = resolve_beta(args, defaults)
    echo: Dict[str, Any] = {'beta': beta.to_dict(), 'rho': args.rho,
                            'truncation': args.truncation}
    results: Dict[str, Any] = {}

    finite = limit = None
    if args.p is not None:
        echo['p'] = args.p
        finite = kappa_finite(ModelConfig(args.p, args.p, args.rho, 1.0, beta))
        results['finite'] = finite.to_dict()
    if args.limit or args.both:
        echo['limit'] = True
        limit = kappa_limit(beta, args.rho, args.truncation)
        results['limit'] = limit.to_dict()
    if finite is not None and limit is not None:
        root_p = math.sqrt(args.p)
        results['sqrt_p_gap'] = {
            name: root_p * abs(getattr(finite, name) - getattr(limit, name))
            for name in ('kappa1', 'kappa2', 'kappa3')
        }
    return OutputEnvelope('kappa', echo, results), EXIT_OK


def cmd_limits(args: argparse.Namespace, defaults: Dict[str, Any]) -> CommandResult:
    """
    Lei limite com as duas centralizações.

    A lei segue --centering (ou o padrão de beta). A outra centralização
    é apenas informada; o aviso de hipótese dela não conta para --strict
    e fica registrado em `limit_centering_certified`.
    """
    config = resolve_model(args, defaults)
    mode = (CenteringMode(args.centering) if args.centering
            else default_centering_mode(config.beta))
    law = limit_law(config, mode)

    other_mode = CenteringMode.FINITE if mode is CenteringMode.LIMIT else CenteringMode.LIMIT
    with warnings.catch_warnings(record=True) as side:
        warnings.simplefilter('always')
        other = centering(config, other_mode)
    for w in side:
        if issubclass(w.category, HypothesisWarning):
            logger.info("Centralização %s apenas informativa: %s", other_mode.value, w.message)
        else:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    by_mode = {mode: law.centering, other_mode: other}

    results = {
        'centering_mode': mode.value,
        'centering': law.centering,
        'finite_centering': by_mode[CenteringMode.FINITE],
        'limit_centering': by_mode[CenteringMode.LIMIT],
        'limit_centering_certified': config.beta.is_hyperbolic,
        'scale': law.scale,
        's2': law.s2,
        's1_sq': law.s1_sq,
        's2_sq': law.s2_sq,
        'c': law.c,
        'kappas_limit': law.kappas.to_dict(),
        'kappas_finite': kappa_finite(config).to_dict(),
    }
    return OutputEnvelope('limits', {'model': config.to_dict()}, results), EXIT_OK


def _progress_logger(total: int):
    step = max(1, total // 10)

    def callback(done: int, _total: int) -> None:
        if done % step == 0 or done == _total:
            logger.info("Progresso: %d/%d réplicas", done, _total)

    return callback


def cmd_simulate(args: argparse.Namespace, defaults: Dict[str, Any]) -> CommandResult:
    """
    Estudo de Monte Carlo com CSVs opcionais e portão --fail-above.
    """
    mc = McConfig(
        model=resolve_model(args, defaults),
        reps=args.reps,
        master_seed=args.seed,
        centering_mode=args.centering,
        cdf_grid_points=args.grid_points,
        histogram_bins=args.bins,
        block_rows=args.block_rows,
    )
    threads = resolve_threads(args.threads, defaults)
    summary = run_mc(mc, threads, _progress_logger(mc.reps))

    results = summary.to_dict()
    if args.format == 'compact':
        for key in ('normalized_values', 'empirical_cdf', 'empirical_pdf'):
            results.pop(key)

    if args.out_prefix:
        write_cdf_csv(f"{args.out_prefix}_cdf.csv", summary.empirical_cdf)
        write_pdf_csv(f"{args.out_prefix}_pdf.csv", summary.empirical_pdf)

    exit_code = EXIT_OK
    if args.fail_above is not None:
        results['fail_above'] = args.fail_above
        if summary.ks_distance > args.fail_above:
            logger.error("Distância KS %.4f acima do limite %.4f", summary.ks_distance,
                         args.fail_above)
            exit_code = EXIT_FAILURE

    envelope = OutputEnvelope('simulate', mc.to_dict(), results, seed=mc.master_seed,
                              timing=summary.runtime_seconds)
    return envelope, exit_code


def cmd_study(args: argparse.Namespace, defaults: Dict[str, Any]) -> CommandResult:
    """
    Todos os painéis (rho, c) com beta hiperbólico, um resumo por painel.
    """
    if any(not n.is_integer() or n < 1 for _, n in (args.aspect or [])):
        raise DomainError("n de --aspect deve ser inteiro >= 1")
    aspects = [(c, int(n)) for c, n in args.aspect] if args.aspect else list(STUDY_ASPECTS)
    panels = study_panels(args.rho, aspects)
    threads = resolve_threads(args.threads, defaults)
    outcomes = run_study(panels, reps=args.reps, master_seed=args.seed,
                         sigma_eps2=args.sigma2, threads=threads,
                         centering_mode=args.centering,
                         progress_callback=_progress_logger(args.reps))

    if args.out_prefix:
        for outcome in outcomes:
            base = f"{args.out_prefix}_{outcome.panel.label}"
            write_cdf_csv(f"{base}_cdf.csv", outcome.summary.empirical_cdf)
            write_pdf_csv(f"{base}_pdf.csv", outcome.summary.empirical_pdf)

    rows = [o.to_dict() for o in outcomes]
    worst = max(rows, key=lambda row: row['ks_distance'])
    results: Dict[str, Any] = {'panels': rows, 'max_ks_distance': worst['ks_distance']}

    exit_code = EXIT_OK
    if args.fail_above is not None:
        results['fail_above'] = args.fail_above
        for row in rows:
            if row['ks_distance'] > args.fail_above:
                logger.error("Painel %s: distância KS %.4f acima do limite %.4f",
                             row['label'], row['ks_distance'], args.fail_above)
                exit_code = EXIT_FAILURE

    echo = {
        'rhos': list(args.rho),
        'aspects': [list(a) for a in aspects],
        'sigma_eps2': args.sigma2,
        'reps': args.reps,
        'master_seed': args.seed,
        'centering_mode': outcomes[0].config.centering_mode.value,
        'beta': BetaSpec.hyperbolic().to_dict(),
    }
    timing = math.fsum(o.summary.runtime_seconds for o in outcomes)
    return OutputEnvelope('study', echo, results, seed=args.seed, timing=timing), exit_code


def cmd_check(args: argparse.Namespace, defaults: Dict[str, Any]) -> CommandResult:
    """
    Executa as conferências da suíte escolhida.
    """
    budget = OracleBudget(
        max_p_quartic=defaults['max_p_quartic'],
        max_dense_np=defaults['max_dense_np'],
        mc_trials=defaults['mc_trials'],
    )
    checks = run_checks(args.suite, budget)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        logger.error("Falhou: %s (lhs=%r, rhs=%r, diferença=%.3e)", c.name, c.lhs, c.rhs, c.gap)
    results = {
        'suite': args.suite,
        'passed': not failed,
        'total': len(checks),
        'failed': len(failed),
        'checks': [c.to_dict() for c in checks],
    }
    return OutputEnvelope('check', {'suite': args.suite}, results), (
        EXIT_FAILURE if failed else EXIT_OK
    )


COMMANDS = {
    'kappa': cmd_kappa,
    'limits': cmd_limits,
    'simulate': cmd_simulate,
    'study': cmd_study,
    'check': cmd_check,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """
    Executa a linha de comando e devolve o código de saída.

    Args:
        argv: Argumentos (padrão: sys.argv[1:])

    Returns:
        0 sucesso, 1 falha de conferência/portão/--strict, 2 erro de uso
    """
    defaults = load_config()
    parser = build_parser(defaults)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.verbose)
    start = time.perf_counter()

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        try:
            envelope, exit_code = COMMANDS[args.command](args, defaults)
        except DomainError as e:
            logger.error("Erro de uso: %s", e)
            return EXIT_USAGE
        except PyRegNormError as e:
            logger.error("Erro ao executar %s: %s", args.command, e)
            return EXIT_FAILURE
        except OSError as e:
            logger.error("Erro ao gravar arquivo: %s", e)
            return EXIT_FAILURE

    messages: List[str] = []
    for w in caught:
        logger.warning("%s: %s", w.category.__name__, w.message)
        messages.append(f"{w.category.__name__}: {w.message}")
        if args.strict and issubclass(w.category, HypothesisWarning):
            exit_code = max(exit_code, EXIT_FAILURE)
    envelope.results['warnings'] = messages

    if envelope.command not in ('simulate', 'study'):
        envelope.timing = time.perf_counter() - start
    try:
        write_envelope(envelope, args.out)
    except OSError as e:
        logger.error("Erro ao gravar arquivo: %s", e)
        return EXIT_FAILURE
    return exit_code
