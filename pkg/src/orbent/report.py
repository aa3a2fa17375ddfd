"""Report, CSV and SVG artifact serialization, plus report diffing.

The report is a flat-file document of ``[section]`` blocks holding
``key = value`` lines, written with fixed ordering and 12-significant-digit
numbers so that identical analyses produce byte-identical files.  The same
format is parsed back for the diff workflow.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "format_number",
    "render_report",
    "parse_report",
    "render_csv",
    "render_heatmap_svg",
    "ParsedReport",
    "diff_reports",
]


def format_number(x):
    """Fixed 12-significant-digit decimal rendering used in all artifacts."""
    return f"{float(x) + 0.0:.12g}"


def _bool(value):
    return "true" if value else "false"


def render_report(report):
    """Serialize an :class:`orbent.entropy.EntropyReport` to document text."""
    fmt = format_number
    n = report.n_orb
    lines = ["# orbital entanglement report", ""]

    lines.append("[metadata]")
    lines.append(f"n_orb = {n}")
    lines.append(f"n_elec = {report.n_elec}")
    lines.append(f"ms2 = {report.ms2}")
    lines.append(f"basis_dimension = {report.basis_dimension}")
    lines.append(f"n_roots = {report.n_roots}")
    lines.append(f"root = {report.root}")
    lines.append(f"degeneracy = {report.degeneracy}")
    lines.append(f"energy = {fmt(report.energy)}")
    lines.append(f"s_squared = {fmt(report.s_squared)}")
    lines.append(f"converged = {_bool(report.converged)}")
    lines.append(f"fiedler_degenerate = {_bool(report.fiedler_degenerate)}")
    lines.append(f"mutual_information_convention = {report.convention}")
    lines.append("")

    lines.append("[orbitals]")
    for i in range(n):
        lines.append(f"{i + 1} = {report.orbital_label(i)}")
    lines.append("")

    lines.append("[energies]")
    for k, e in enumerate(report.energies):
        lines.append(f"{k} = {fmt(e)}")
    lines.append("")

    lines.append("[one_orbital_entropy]")
    for i in range(n):
        lines.append(f"{i + 1} = {fmt(report.s[i])}")
    lines.append("")

    lines.append("[one_orbital_class]")
    for i in range(n):
        lines.append(f"{i + 1} = {report.class_s[i]}")
    lines.append("")

    lines.append("[two_orbital_entropy]")
    for i in range(n):
        for j in range(i + 1, n):
            lines.append(f"{i + 1} {j + 1} = {fmt(report.s2[i, j])}")
    lines.append("")

    lines.append("[mutual_information]")
    for i in range(n):
        for j in range(i + 1, n):
            lines.append(f"{i + 1} {j + 1} = {fmt(report.mutual[i, j])}")
    lines.append("")

    lines.append("[mutual_information_class]")
    for i in range(n):
        for j in range(i + 1, n):
            lines.append(f"{i + 1} {j + 1} = {report.class_i[i, j]}")
    lines.append("")

    lines.append("[advisories]")
    for k, text in enumerate(report.advisories, start=1):
        lines.append(f"{k} = {text}")
    lines.append("")

    lines.append("[fiedler_order]")
    lines.append("order = " + " ".join(str(i + 1) for i in report.fiedler))
    lines.append("")

    lines.append("[leading_configurations]")
    for k, entry in enumerate(report.configurations, start=1):
        lines.append(
            f"{k} = {entry.occupation} {fmt(entry.coefficient)} {fmt(entry.weight)}")
    lines.append("")
    return "\n".join(lines)


@dataclass
class ParsedReport:
    """Report document read back into keyed sections."""

    metadata: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)      # 1-based index -> label
    s: dict = field(default_factory=dict)           # 1-based index -> value
    class_s: dict = field(default_factory=dict)
    s2: dict = field(default_factory=dict)          # (i, j) 1-based -> value
    mutual: dict = field(default_factory=dict)
    class_i: dict = field(default_factory=dict)
    fiedler: list = field(default_factory=list)
    configurations: list = field(default_factory=list)

    @property
    def n_orb(self):
        return int(self.metadata.get("n_orb", len(self.labels)))

    def index_for(self, key):
        """Resolve an orbital label or 1-based index string to an index."""
        for idx, label in self.labels.items():
            if label == key:
                return idx
        try:
            idx = int(key)
        except ValueError:
            raise ValueError(f"unknown orbital {key!r}") from None
        if idx not in self.labels:
            raise ValueError(f"unknown orbital index {idx}")
        return idx


def parse_report(text):
    """Parse report document text into a :class:`ParsedReport`."""
    parsed = ParsedReport()
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            continue
        if "=" not in line or section is None:
            raise ValueError(f"malformed report line: {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if section == "metadata":
            parsed.metadata[key] = value
        elif section == "orbitals":
            parsed.labels[int(key)] = value
        elif section == "one_orbital_entropy":
            parsed.s[int(key)] = float(value)
        elif section == "one_orbital_class":
            parsed.class_s[int(key)] = value
        elif section == "two_orbital_entropy":
            i, j = (int(t) for t in key.split())
            parsed.s2[(i, j)] = float(value)
        elif section == "mutual_information":
            i, j = (int(t) for t in key.split())
            parsed.mutual[(i, j)] = float(value)
        elif section == "mutual_information_class":
            i, j = (int(t) for t in key.split())
            parsed.class_i[(i, j)] = value
        elif section == "fiedler_order":
            parsed.fiedler = [int(t) for t in value.split()]
        elif section == "leading_configurations":
            occ, coeff, weight = value.split()
            parsed.configurations.append((occ, float(coeff), float(weight)))
        # energies and advisories are display-only; skip on re-read
    return parsed


def render_csv(matrix):
    """n x n comma-separated matrix text at 12 significant digits."""
    rows = [
        ",".join(format_number(v) for v in row)
        for row in np.asarray(matrix, dtype=float)
    ]
    return "\n".join(rows) + "\n"


# Heatmap colormap: linear RGB ramp from white (zero) to dark blue (max),
# a single-hue lightness ramp that stays monotone and printable.
_COLOR_ZERO = (247, 251, 255)   # #f7fbff
_COLOR_FULL = (8, 48, 107)      # #08306b


def _color(t):
    rgb = [
        int(lo + (hi - lo) * t + 0.5)
        for lo, hi in zip(_COLOR_ZERO, _COLOR_FULL)
    ]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _escape(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def render_heatmap_svg(mutual, labels=None, cell=28):
    """Deterministic SVG heatmap of a mutual-information matrix.

    Cells are shaded on the white-to-dark-blue ramp over [0, max(I)]; the
    diagonal sits at the zero color and the colorbar is annotated with the
    maximum value.
    """
    m = np.asarray(mutual, dtype=float)
    n = m.shape[0]
    if labels is None or not list(labels):
        labels = [str(i + 1) for i in range(n)]
    top = 20 + 12 * max(len(str(l)) for l in labels)
    left = 12 + 7 * max(len(str(l)) for l in labels)
    bar_gap, bar_w = 24, 16
    width = left + n * cell + bar_gap + bar_w + 80
    height = top + n * cell + 24
    vmax = float(m.max()) if m.size else 0.0

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" font-family="monospace" font-size="11">')
    out.append(
        f'<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">'
        f'<stop offset="0" stop-color="{_color(0.0)}"/>'
        f'<stop offset="1" stop-color="{_color(1.0)}"/>'
        f"</linearGradient></defs>")
    for i in range(n):
        for j in range(n):
            t = m[i, j] / vmax if vmax > 0 else 0.0
            x = left + j * cell
            y = top + i * cell
            out.append(
                f'<rect class="cell" x="{x}" y="{y}" width="{cell}" '
                f'height="{cell}" fill="{_color(t)}" stroke="#ffffff"/>')
    for i, label in enumerate(labels):
        y = top + i * cell + cell // 2 + 4
        out.append(
            f'<text x="{left - 6}" y="{y}" text-anchor="end">'
            f"{_escape(label)}</text>")
    for j, label in enumerate(labels):
        x = left + j * cell + cell // 2
        out.append(
            f'<text x="{x}" y="{top - 6}" text-anchor="start" '
            f'transform="rotate(-60 {x} {top - 6})">{_escape(label)}</text>')
    bar_x = left + n * cell + bar_gap
    out.append(
        f'<rect x="{bar_x}" y="{top}" width="{bar_w}" '
        f'height="{n * cell}" fill="url(#ramp)" stroke="#000000"/>')
    out.append(
        f'<text x="{bar_x + bar_w + 4}" y="{top + 10}">'
        f"{format_number(vmax)}</text>")
    out.append(
        f'<text x="{bar_x + bar_w + 4}" y="{top + n * cell}">0</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _transition(label_a, label_b):
    return None if label_a == label_b else f"{label_a} -> {label_b}"


def diff_reports(report_a, report_b, orbital_map, name_a="A", name_b="B"):
    """Tabulate deltas (B minus A) over mapped orbitals and orbital pairs.

    ``orbital_map`` pairs orbitals of A with orbitals of B, each side given
    as a label or 1-based index string; unmapped orbitals are listed
    one-sided.  Returns the diff document text.
    """
    fmt = format_number
    pairs = []
    for key_a, key_b in orbital_map:
        pairs.append((report_a.index_for(str(key_a)),
                      report_b.index_for(str(key_b))))

    lines = ["# orbital entanglement report diff (B minus A)", ""]
    lines.append("[metadata]")
    lines.append(f"report_a = {name_a}")
    lines.append(f"report_b = {name_b}")
    lines.append(f"mapped_orbitals = {len(pairs)}")
    lines.append("")

    lines.append("[map]")
    for ia, ib in pairs:
        lines.append(f"{report_a.labels[ia]} = {report_b.labels[ib]}")
    lines.append("")

    lines.append("[delta_one_orbital_entropy]")
    for ia, ib in pairs:
        delta = report_b.s[ib] - report_a.s[ia]
        lines.append(f"{ia} -> {ib} = {fmt(delta)}")
    lines.append("")

    lines.append("[one_orbital_class_transitions]")
    for ia, ib in pairs:
        trans = _transition(report_a.class_s[ia], report_b.class_s[ib])
        if trans:
            lines.append(f"{ia} -> {ib} = {trans}")
    lines.append("")

    def pair_key(store, i, j):
        return store[(i, j) if i < j else (j, i)]

    mapped_pairs = [
        (pairs[x], pairs[y])
        for x in range(len(pairs))
        for y in range(x + 1, len(pairs))
        if pairs[x][0] != pairs[y][0] and pairs[x][1] != pairs[y][1]
    ]
    lines.append("[delta_mutual_information]")
    for (ia, ib), (ja, jb) in mapped_pairs:
        delta = (pair_key(report_b.mutual, ib, jb)
                 - pair_key(report_a.mutual, ia, ja))
        lines.append(f"{min(ia, ja)} {max(ia, ja)} -> "
                     f"{min(ib, jb)} {max(ib, jb)} = {fmt(delta)}")
    lines.append("")

    lines.append("[mutual_information_class_transitions]")
    for (ia, ib), (ja, jb) in mapped_pairs:
        trans = _transition(pair_key(report_a.class_i, ia, ja),
                            pair_key(report_b.class_i, ib, jb))
        if trans:
            lines.append(f"{min(ia, ja)} {max(ia, ja)} -> "
                         f"{min(ib, jb)} {max(ib, jb)} = {trans}")
    lines.append("")

    mapped_a = {ia for ia, _ in pairs}
    mapped_b = {ib for _, ib in pairs}
    lines.append("[unmapped_a]")
    for i in sorted(report_a.labels):
        if i not in mapped_a:
            lines.append(f"{i} = {report_a.labels[i]} (s = {fmt(report_a.s[i])})")
    lines.append("")
    lines.append("[unmapped_b]")
    for i in sorted(report_b.labels):
        if i not in mapped_b:
            lines.append(f"{i} = {report_b.labels[i]} (s = {fmt(report_b.s[i])})")
    lines.append("")
    return "\n".join(lines)
