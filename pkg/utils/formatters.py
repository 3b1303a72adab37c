"""
Output Formatters
Formats reports for terminal display (--pretty)
"""
from typing import Dict, List
from tabulate import tabulate
from colorama import Fore, Style, init

# Initialize colorama
init(autoreset=True)

VERDICT_COLORS = {'yes': Fore.GREEN, 'no': Fore.RED, 'needs-binding': Fore.YELLOW}


class ReportFormatter:
    """Formats a serialized report for human eyes"""

    @staticmethod
    def format_report(report: Dict) -> str:
        """Format a complete report for display"""

        output = []

        output.append("\n" + "=" * 70)
        output.append(f"{Fore.CYAN}{report['command'].upper():^70}{Style.RESET_ALL}")
        output.append("=" * 70 + "\n")

        if report.get('input_digest'):
            output.append(f"Input: {report['input_digest']}")
        if report.get('bindings'):
            output.append("Bindings: " + ", ".join(f"{k} = {v}" for k, v in sorted(report['bindings'].items())))
        if report.get('case'):
            output.append(f"Case: {Fore.YELLOW}{report['case']}{Style.RESET_ALL}")
        output.append("")

        if report.get('system'):
            output.append(ReportFormatter._section("SYSTEM"))
            output.append(ReportFormatter._format_system(report['system']))

        if report.get('conditions'):
            output.append(ReportFormatter._section("UNIFORM-GAMMA CONDITIONS"))
            output.append(ReportFormatter._format_conditions(report['conditions']))

        if report.get('reduction'):
            output.append(ReportFormatter._section("REDUCTION"))
            output.append(ReportFormatter._format_reduction(report['reduction']))

        if report.get('verification'):
            output.append(ReportFormatter._section("VERIFICATION"))
            output.append(ReportFormatter._format_verification(report['verification']))

        if report.get('error'):
            error = report['error']
            output.append(f"\n{Fore.RED}{error['type']}: {error['message']}{Style.RESET_ALL}")

        output.append("\n" + "=" * 70)
        output.append(f"exit status: {report.get('exit_status', 0)}\n")

        return "\n".join(output)

    @staticmethod
    def _section(title: str) -> str:
        return "-" * 70 + f"\n{Fore.CYAN}{title}{Style.RESET_ALL}\n" + "-" * 70

    @staticmethod
    def _format_system(system: Dict) -> str:
        """Equations plus the A | B matrices side by side"""

        lines = [system['text'].rstrip(), ""]
        headers = ["j"] + [f"B[{name}]" for name in system['var_names']] + \
                  [f"A[{name}]" for name in system['var_names']]
        if system.get('gamma'):
            headers.append("Gamma")
        rows = []
        for j, b_row in enumerate(system['B']):
            row = [j + 1] + b_row + [system['A'][i][j] for i in range(system['n'])]
            if system.get('gamma'):
                row.append(system['gamma'][j])
            rows.append(row)
        if rows:
            lines.append(tabulate(rows, headers=headers, tablefmt="grid"))
        if system.get('lambda'):
            lines.append("lambda = (" + ", ".join(system['lambda']) + ")")
        return "\n".join(lines)

    @staticmethod
    def _format_conditions(conditions: Dict) -> str:
        color = VERDICT_COLORS.get(conditions['satisfiable'], Fore.WHITE)
        lines = ["Gamma = (" + ", ".join(conditions['gamma']) + ")"]
        for eq in conditions['equations']:
            lines.append(f"  {eq}")
        for name, value in sorted(conditions.get('solution', {}).items()):
            lines.append(f"  -> {name} = {value}")
        lines.append(f"Verdict: {color}{conditions['satisfiable']}{Style.RESET_ALL} ({conditions['reason']})")
        return "\n".join(lines)

    @staticmethod
    def _format_matrix(rows: List[List[str]]) -> str:
        return tabulate(rows, tablefmt="plain")

    @staticmethod
    def _format_reduction(reduction: Dict) -> str:
        lines = [f"Method: {reduction['method']}   Policy: {reduction.get('policy') or '-'}"]
        if reduction.get('C'):
            lines.append("C =")
            lines.append(ReportFormatter._format_matrix(reduction['C']))
        lines.append(f"\n{Fore.GREEN}{reduction['quadrature_note']}{Style.RESET_ALL}")
        for constant in reduction.get('constants', []):
            lines.append(f"  constant: {constant}")
        lines.append("")
        lines.append(reduction['reduced']['text'].rstrip())
        return "\n".join(lines)

    @staticmethod
    def _format_verification(verification: Dict) -> str:
        color = Fore.GREEN if verification['passed'] else Fore.RED
        rows = [
            ["max relative error", f"{verification['max_rel_error']:.3e}"],
            ["quadrature error", f"{verification['quadrature_error']:.3e}"],
            ["residual", f"{verification['residual_error']:.3e}"],
            ["steps", verification['steps_taken']],
            ["tol", f"{verification['tol']:.1e}"],
        ]
        if verification.get('constants_drift') is not None:
            rows.insert(1, ["constants drift", f"{verification['constants_drift']:.3e}"])
        verdict = "PASSED" if verification['passed'] else "FAILED"
        return tabulate(rows, tablefmt="grid") + f"\n{color}{verdict}{Style.RESET_ALL}"
