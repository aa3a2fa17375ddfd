import numpy as np
import pytest

from orbent.cli import ConfigurationEntry
from orbent.entropy import EntropyReport
from orbent.report import (diff_reports, format_number, parse_report,
                           render_csv, render_heatmap_svg, render_report)


def make_report(n=2, s=None, mutual=None, labels=None):
    s = np.asarray(s if s is not None else [0.1] * n, dtype=float)
    mutual = np.asarray(
        mutual if mutual is not None else np.zeros((n, n)), dtype=float)
    s2 = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s2[i, j] = s2[j, i] = s[i] + s[j] - mutual[i, j]
    from orbent.entropy import classify, fiedler_degenerate, fiedler_order
    class_s, class_i, advisories = classify(s, mutual)
    return EntropyReport(
        n_orb=n, n_elec=2, ms2=0, basis_dimension=4, root=0, n_roots=1,
        energies=np.array([-1.0]), degeneracy=1, s_squared=0.0,
        converged=True, s=s, s2=s2, mutual=mutual, class_s=class_s,
        class_i=class_i, advisories=advisories,
        fiedler=fiedler_order(mutual),
        fiedler_degenerate=fiedler_degenerate(mutual),
        labels=list(labels) if labels else [],
        configurations=[ConfigurationEntry("20", -0.9, 0.81)],
    )


class TestFormatting:
    def test_twelve_significant_digits(self):
        assert format_number(np.pi) == "3.14159265359"
        assert format_number(0.0) == "0"
        assert format_number(0.5) == "0.5"

    def test_negative_zero_normalized(self):
        assert format_number(-0.0) == "0"


class TestReportRoundTrip:
    def test_parse_recovers_fields(self):
        mutual = np.zeros((2, 2))
        mutual[0, 1] = mutual[1, 0] = 0.25
        report = make_report(2, s=[0.69, 0.42], mutual=mutual,
                             labels=["sigma", "sigma*"])
        parsed = parse_report(render_report(report))
        assert parsed.n_orb == 2
        assert parsed.labels == {1: "sigma", 2: "sigma*"}
        assert parsed.s[1] == pytest.approx(0.69, abs=1e-12)
        assert parsed.mutual[(1, 2)] == pytest.approx(0.25, abs=1e-12)
        assert parsed.class_s[1] == "large"
        assert parsed.class_i[(1, 2)] == "large"
        assert parsed.metadata["converged"] == "true"
        assert parsed.configurations == [("20", -0.9, 0.81)]

    def test_rendering_deterministic(self):
        report = make_report(3, s=[0.1, 0.2, 0.3])
        assert render_report(report) == render_report(report)

    def test_malformed_line_rejected(self):
        with pytest.raises(ValueError):
            parse_report("[metadata]\nnot a key value line\n")


class TestCsv:
    def test_shape_and_precision(self):
        m = np.array([[0.0, 1.0 / 3.0], [1.0 / 3.0, 0.0]])
        text = render_csv(m)
        rows = text.strip().split("\n")
        assert len(rows) == 2
        assert rows[0].split(",") == ["0", "0.333333333333"]


class TestHeatmap:
    def test_cell_count_and_colors(self):
        m = np.zeros((2, 2))
        m[0, 1] = m[1, 0] = 1.0
        svg = render_heatmap_svg(m)
        assert svg.count('<rect class="cell"') == 4
        # diagonal cells carry the zero color, off-diagonal cells match
        assert svg.count('fill="#f7fbff"') == 2
        assert svg.count('fill="#08306b"') == 2

    def test_all_zero_matrix(self):
        svg = render_heatmap_svg(np.zeros((3, 3)))
        assert svg.count('<rect class="cell"') == 9
        assert svg.count('fill="#f7fbff"') == 9
        assert ">0</text>" in svg

    def test_deterministic(self):
        m = np.array([[0.0, 0.3], [0.3, 0.0]])
        assert render_heatmap_svg(m, ["a", "b"]) == render_heatmap_svg(m, ["a", "b"])

    def test_labels_escaped(self):
        svg = render_heatmap_svg(np.zeros((2, 2)), ["p<1>", "q&r"])
        assert "p&lt;1&gt;" in svg
        assert "q&amp;r" in svg


class TestDiff:
    def test_self_diff_is_all_zero(self):
        mutual = np.zeros((2, 2))
        mutual[0, 1] = mutual[1, 0] = 0.25
        report = make_report(2, s=[0.69, 0.42], mutual=mutual,
                             labels=["sigma", "sigma*"])
        parsed = parse_report(render_report(report))
        text = diff_reports(parsed, parsed, [("1", "1"), ("2", "2")])
        assert "1 -> 1 = 0" in text
        assert "1 2 -> 1 2 = 0" in text
        assert "[one_orbital_class_transitions]\n\n" in text
        assert "[mutual_information_class_transitions]\n\n" in text

    def test_large_to_moderate_transition(self):
        m_a = np.zeros((2, 2)); m_a[0, 1] = m_a[1, 0] = 0.25
        m_b = np.zeros((2, 2)); m_b[0, 1] = m_b[1, 0] = 0.07
        rep_a = parse_report(render_report(make_report(2, s=[0.4, 0.4], mutual=m_a)))
        rep_b = parse_report(render_report(make_report(2, s=[0.4, 0.4], mutual=m_b)))
        text = diff_reports(rep_a, rep_b, [("1", "1"), ("2", "2")])
        assert "1 2 -> 1 2 = -0.18" in text
        assert "1 2 -> 1 2 = large -> moderate" in text

    def test_empty_map_lists_everything_one_sided(self):
        rep = parse_report(render_report(make_report(2, labels=["x", "y"])))
        text = diff_reports(rep, rep, [])
        assert "mapped_orbitals = 0" in text
        section = text.split("[unmapped_a]")[1].split("[unmapped_b]")[0]
        assert "1 = x" in section and "2 = y" in section
        assert "[delta_mutual_information]\n\n" in text

    def test_label_based_map(self):
        rep = parse_report(render_report(
            make_report(2, s=[0.2, 0.3], labels=["left", "right"])))
        text = diff_reports(rep, rep, [("left", "right")])
        assert "1 -> 2 = 0.1" in text

    def test_unknown_orbital_rejected(self):
        rep = parse_report(render_report(make_report(2)))
        with pytest.raises(ValueError, match="unknown orbital"):
            diff_reports(rep, rep, [("nope", "1")])
