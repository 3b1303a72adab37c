#!/usr/bin/env python3
"""
QP reduction toolkit - command-line front end

Usage:
  python cli.py classify fixtures/euler.qp
  python cli.py conditions fixtures/maxwell_bloch.qp --bind x30=0
  python cli.py reduce fixtures/halphen.qp -o halphen_reduced.qp
  python cli.py verify fixtures/euler.qp --x0 1,1/2,1/3 --t-end 0.5
  python cli.py export fixtures/euler.qp --format text

A JSON report goes to stdout; logging goes to stderr. Exit codes: 0 success,
2 not reducible, 3 input error, 4 verification failure.
"""
import argparse
import logging
import sys
from typing import List, Optional

import config
from connectors.qp_files import QPFileConnector, digest
from models.schemas import ReductionRequest, Report
from services.report_service import CommandResult, ReportService, error_block, to_json
from utils.exceptions import QPRError
from utils.formatters import ReportFormatter

logger = logging.getLogger('cli')


def _request(args: argparse.Namespace, source: str) -> ReductionRequest:
    fields = {
        'source': source,
        'bind': ReportService.split_bindings(args.bind),
        'policy': getattr(args, 'policy', None) or config.QPR_DEFAULT_POLICY,
        'prefactor': getattr(args, 'prefactor', None),
    }
    if getattr(args, 'qmt', None):
        fields['qmt'] = QPFileConnector.read_matrix(args.qmt).to_strings()
    if getattr(args, 'x0', None):
        fields['x0'] = [v.strip() for v in args.x0.split(',')]
    if getattr(args, 't_end', None) is not None:
        fields['t_end'] = args.t_end
    if getattr(args, 'tol', None) is not None:
        fields['tol'] = args.tol
    if getattr(args, 'samples', None) is not None:
        fields['samples'] = args.samples
    if getattr(args, 'reduced', None):
        fields['reduced'], _ = QPFileConnector.read_source(args.reduced)
    return ReductionRequest(**fields)


def _write_artifacts(args: argparse.Namespace, result: CommandResult):
    output = getattr(args, 'output', None)
    if output and result.text is not None:
        QPFileConnector.write_text(output, result.text)
    samples_csv = getattr(args, 'samples_csv', None)
    if samples_csv and result.samples is not None:
        QPFileConnector.write_samples(samples_csv, result.samples)


def _emit(args: argparse.Namespace, result: CommandResult):
    if getattr(args, 'format', 'json') == 'text' and result.text is not None:
        sys.stdout.write(result.text)
    elif args.pretty:
        print(ReportFormatter.format_report(result.report.model_dump(mode='json', by_alias=True)))
    else:
        print(to_json(result.report))


def execute(args: argparse.Namespace) -> int:
    """Run the selected command and print its report"""
    source = ''
    try:
        source, _ = QPFileConnector.read_source(args.file)
        request = _request(args, source)
    except QPRError as exc:
        report = Report(command=args.command, input_digest=digest(source) if source else None,
                        error=error_block(exc), exit_status=exc.exit_code)
        result = CommandResult(report)
    else:
        result = ReportService().run(args.command, request)
        try:
            _write_artifacts(args, result)
        except OSError as exc:
            logger.error("cannot write output: %s", exc)

    _emit(args, result)
    if result.report.error is not None:
        logger.warning("%s: %s", result.report.error.type, result.report.error.message)
    return result.exit_status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Decouple one variable of a quasipolynomial ODE system")
    parser.add_argument('--pretty', action='store_true', help="colored tabulated summary instead of JSON")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v info, -vv debug")
    sub = parser.add_subparsers(dest='command', required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument('file', help=".qp source file")
        p.add_argument('--bind', action='append', default=[], metavar='NAME=EXPR',
                       help="parameter binding, repeatable (e.g. a1=1/2, a3=2*a1)")
        return p

    command('parse', "echo the canonical system and its matrices")
    command('classify', "report the case label")
    command('conditions', "uniform-Gamma conditions and their verdict")

    p_reduce = command('reduce', "decouple the first transformed variable")
    p_verify = command('verify', "reduce, then compare trajectories numerically")
    for p in (p_reduce, p_verify):
        p.add_argument('--policy', choices=['completion', 'cvm'], default=config.QPR_DEFAULT_POLICY)
        p.add_argument('--qmt', metavar='CSVFILE', help="explicit QMT matrix (rational CSV)")
        p.add_argument('--prefactor', metavar='EXPR', help="new-time prefactor, e.g. a2")
    p_reduce.add_argument('-o', '--output', metavar='OUT.qp', help="write the reduced system")

    p_verify.add_argument('--x0', metavar='V1,V2,...', help="initial state (defaults to init:)")
    p_verify.add_argument('--t-end', type=float, dest='t_end', help="integration horizon")
    p_verify.add_argument('--tol', type=float, help=f"relative tolerance (default {config.QPR_DEFAULT_TOL})")
    p_verify.add_argument('--samples', type=int, help="sample points on [0, t_end]")
    p_verify.add_argument('--reduced', metavar='OUT.qp', help="previously emitted reduced system")
    p_verify.add_argument('--samples-csv', dest='samples_csv', metavar='PATH',
                          help="export mapped and reduced samples")

    p_export = command('export', "write the canonical system")
    p_export.add_argument('--format', choices=['json', 'text'], default='json')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: None, 1: 'INFO'}.get(args.verbose, 'DEBUG')
    config.configure_logging(level)
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
