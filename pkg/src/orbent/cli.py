"""Command-line driver: analyze an FCIDUMP, export artifacts, diff reports.

Exit codes: 0 success, 2 parse failure (FCIDUMP, labels, map or report
content), 3 eigensolver non-convergence (a flagged report is still
written), 4 I/O failure.
"""

import argparse
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .ci import enumerate_basis, s_squared, solve_lowest
from .entropy import (EntropyReport, Thresholds, classify, entropy_profile,
                      fiedler_degenerate, fiedler_order)
from .integrals import FcidumpError, parse_fcidump
from .report import (diff_reports, parse_report, render_csv,
                     render_heatmap_svg, render_report)

__all__ = [
    "RunConfig",
    "ConfigurationEntry",
    "leading_configurations",
    "export_heatmap",
    "run_analysis",
    "main",
]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    """Everything one analysis run needs besides the integrals themselves."""

    input_path: str
    n_roots: int = 1
    root: int = 0
    tol: float = 1e-8
    use_symmetry: bool = False
    labels: list = field(default_factory=list)
    out_dir: str = "."
    write_svg: bool = True
    cutoff: float = 0.01
    thresholds: Thresholds = field(default_factory=Thresholds)

    def validate(self):
        if self.n_roots < 1:
            raise ValueError("n_roots must be at least 1")
        if self.root < 0:
            raise ValueError("root index must be non-negative")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.cutoff <= 1:
            raise ValueError("configuration weight cutoff must be in (0, 1]")


@dataclass
class ConfigurationEntry:
    """One determinant of the wavefunction, by weight."""

    occupation: str      # per-orbital characters: 0, a, b, 2
    coefficient: float
    weight: float


def leading_configurations(psi, cutoff):
    """All determinants with weight >= cutoff, in descending weight order."""
    if not 0 < cutoff <= 1:
        raise ValueError("cutoff must be in (0, 1]")
    weights = psi.coeffs ** 2
    keep = np.nonzero(weights >= cutoff)[0]
    ranked = sorted(keep, key=lambda k: (-weights[k], k))
    return [
        ConfigurationEntry(
            occupation=psi.basis.occupation_string(k),
            coefficient=float(psi.coeffs[k]),
            weight=float(weights[k]),
        )
        for k in ranked
    ]


def export_heatmap(mutual, labels, path):
    """Write the deterministic SVG heatmap for a mutual-information matrix."""
    svg = render_heatmap_svg(mutual, labels)
    with open(path, "w", newline="\n") as handle:
        handle.write(svg)


def _read_labels(path):
    with open(path) as handle:
        return [line.strip() for line in handle if line.strip()]


def _read_map(path):
    entries = []
    with open(path) as handle:
        for ln, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"map line {ln} is not 'labelA = labelB': {raw!r}")
            a, _, b = line.partition("=")
            entries.append((a.strip(), b.strip()))
    return entries


def run_analysis(config):
    """Full pipeline: parse, solve, analyze, write artifacts.

    Returns the :class:`EntropyReport`.  Raises FcidumpError / ValueError
    for malformed input and OSError for I/O problems; a non-converged solve
    is reported through the ``converged`` flag, not an exception.
    """
    config.validate()
    with open(config.input_path) as handle:
        integrals = parse_fcidump(handle.read())
    labels = list(config.labels)
    if labels and len(labels) != integrals.n_orb:
        raise ValueError(
            f"{len(labels)} labels supplied for {integrals.n_orb} orbitals")

    basis = enumerate_basis(
        integrals.n_orb, integrals.n_alpha, integrals.n_beta,
        orbsym=integrals.orbsym if config.use_symmetry else None,
        isym=integrals.isym if config.use_symmetry else None,
    )
    n_roots = max(config.n_roots, config.root + 1)
    if n_roots > basis.dimension:
        raise ValueError(
            f"{n_roots} roots requested from a dimension-{basis.dimension} basis")
    spectrum = solve_lowest(basis, integrals, n_roots=n_roots, tol=config.tol)
    psi = spectrum.states[config.root]

    s, s2, mutual = entropy_profile(psi)
    class_s, class_i, advisories = classify(s, mutual, config.thresholds)
    report = EntropyReport(
        n_orb=integrals.n_orb,
        n_elec=integrals.n_elec,
        ms2=integrals.ms2,
        basis_dimension=basis.dimension,
        root=config.root,
        n_roots=n_roots,
        energies=spectrum.energies,
        degeneracy=spectrum.degeneracy(),
        s_squared=s_squared(psi),
        converged=spectrum.converged,
        s=s,
        s2=s2,
        mutual=mutual,
        class_s=class_s,
        class_i=class_i,
        advisories=advisories,
        fiedler=fiedler_order(mutual),
        fiedler_degenerate=fiedler_degenerate(mutual),
        labels=labels,
        configurations=leading_configurations(psi, config.cutoff),
    )

    os.makedirs(config.out_dir, exist_ok=True)
    with open(os.path.join(config.out_dir, "report.txt"), "w", newline="\n") as handle:
        handle.write(render_report(report))
    with open(os.path.join(config.out_dir, "mutual_information.csv"), "w",
              newline="\n") as handle:
        handle.write(render_csv(mutual))
    if config.write_svg:
        export_heatmap(
            mutual,
            labels or [str(i + 1) for i in range(integrals.n_orb)],
            os.path.join(config.out_dir, "heatmap.svg"),
        )
    return report


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="orbent",
        description="Exact CI ground states and orbital entanglement analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze an FCIDUMP file")
    analyze.add_argument("fcidump", help="FCIDUMP input path")
    analyze.add_argument("--roots", type=int, default=1, metavar="N",
                         help="number of roots to converge (default 1)")
    analyze.add_argument("--root", type=int, default=0, metavar="K",
                         help="root to analyze (default 0)")
    analyze.add_argument("--tol", type=float, default=1e-8, metavar="X",
                         help="Davidson residual tolerance (default 1e-8)")
    analyze.add_argument("--sym", action="store_true",
                         help="restrict the basis to the ORBSYM/ISYM sector")
    analyze.add_argument("--labels", metavar="FILE",
                         help="orbital label file, one label per line")
    analyze.add_argument("--cutoff", type=float, default=0.01, metavar="W",
                         help="configuration weight cutoff (default 0.01)")
    analyze.add_argument("--out", default=".", metavar="DIR",
                         help="output directory (default current)")
    analyze.add_argument("--no-svg", action="store_true",
                         help="skip the heatmap artifact")

    diff = sub.add_parser("diff", help="diff two analysis reports")
    diff.add_argument("report_a", help="first report.txt")
    diff.add_argument("report_b", help="second report.txt")
    diff.add_argument("--map", metavar="FILE",
                      help="orbital map file with 'labelA = labelB' lines")
    diff.add_argument("--out", default=".", metavar="DIR",
                      help="output directory (default current)")
    return parser


def _cmd_analyze(args):
    if not os.path.isfile(args.fcidump):
        print(f"error: cannot read {args.fcidump}", file=sys.stderr)
        return EXIT_IO
    config = RunConfig(
        input_path=args.fcidump,
        n_roots=args.roots,
        root=args.root,
        tol=args.tol,
        use_symmetry=args.sym,
        out_dir=args.out,
        write_svg=not args.no_svg,
        cutoff=args.cutoff,
    )
    if args.labels:
        if not os.path.isfile(args.labels):
            print(f"error: cannot read {args.labels}", file=sys.stderr)
            return EXIT_IO
        config.labels = _read_labels(args.labels)
    try:
        report = run_analysis(config)
    except FcidumpError as exc:
        print(f"error: {args.fcidump}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not report.converged:
        print("warning: eigensolver did not converge; report is flagged",
              file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_diff(args):
    for path in (args.report_a, args.report_b):
        if not os.path.isfile(path):
            print(f"error: cannot read {path}", file=sys.stderr)
            return EXIT_IO
    try:
        with open(args.report_a) as handle:
            rep_a = parse_report(handle.read())
        with open(args.report_b) as handle:
            rep_b = parse_report(handle.read())
        if args.map:
            if not os.path.isfile(args.map):
                print(f"error: cannot read {args.map}", file=sys.stderr)
                return EXIT_IO
            orbital_map = _read_map(args.map)
        else:
            shared = min(rep_a.n_orb, rep_b.n_orb)
            orbital_map = [(str(i), str(i)) for i in range(1, shared + 1)]
        document = diff_reports(rep_a, rep_b, orbital_map,
                                name_a=args.report_a, name_b=args.report_b)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "diff.txt"), "w", newline="\n") as handle:
            handle.write(document)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return _cmd_analyze(args)
    return _cmd_diff(args)


if __name__ == "__main__":
    sys.exit(main())
