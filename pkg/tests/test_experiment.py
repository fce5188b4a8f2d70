"""Experiment configs, the flat config format, and CSV output."""

from fractions import Fraction

import pytest

from zol.classes import builtin_class
from zol.errors import ParseError
from zol.events import exact_event_probability, resolve_events
from zol.experiment import (CSV_HEADER, ExperimentConfig, config_digest,
                            experiment_rows, parse_config, parse_sizes,
                            render_csv, run_experiment)

TF_EXACT = ("class=triangle-free\n"
            "n=3..5\n"
            "events=all-k-ext:1\n")


class TestParseSizes:
    def test_forms(self):
        assert parse_sizes("7") == (7,)
        assert parse_sizes("3..5") == (3, 4, 5)
        assert parse_sizes("8,10,12") == (8, 10, 12)
        assert parse_sizes(" 4 ") == (4,)

    def test_rejects(self):
        for bad in ("", "5..3", "a", "3..b", "1;2"):
            with pytest.raises(ValueError):
                parse_sizes(bad)


class TestParseConfig:
    def test_round_trip(self):
        cfg = parse_config("class=triangle-free\n"
                           "n=3..5\n"
                           "events=all-k-ext:1,all-k-ext:2\n"
                           "mode=mc  # trailing comment\n"
                           "trials=250\n"
                           "seed=9\n"
                           "fractions=yes\n")
        assert cfg == ExperimentConfig("triangle-free", ns=(3, 4, 5),
                                       events=("all-k-ext:1", "all-k-ext:2"),
                                       mode="mc", trials=250, seed=9,
                                       fractions=True)

    def test_comments_and_blanks(self):
        cfg = parse_config("# header\n\nclass=graphs\nn=3\n"
                           "events=all-k-ext:1\n")
        assert cfg.class_name == "graphs" and cfg.ns == (3,)

    def test_line_numbers_on_errors(self):
        with pytest.raises(ParseError) as e:
            parse_config("class=graphs\nclass=graphs\n")
        assert e.value.line == 2 and "duplicate" in str(e.value)
        with pytest.raises(ParseError) as e:
            parse_config("wibble=3\n")
        assert e.value.line == 1 and "unknown key" in str(e.value)
        with pytest.raises(ParseError) as e:
            parse_config("class=graphs\nn=oops\n")
        assert e.value.line == 2
        assert str(e.value).count("n:") == 1

    def test_missing_key_value_shape(self):
        with pytest.raises(ParseError) as e:
            parse_config("class graphs\n")
        assert e.value.line == 1

    def test_validation_failures_name_the_field(self):
        with pytest.raises(ValueError, match="^measure:"):
            parse_config("class=graphs\nn=3\nevents=all-k-ext:1\n"
                         "measure=median\n")
        with pytest.raises(ValueError, match="^n:"):
            ExperimentConfig("graphs", ns=(),
                             events=("all-k-ext:1",)).validate()
        with pytest.raises(ValueError, match="^trials:"):
            ExperimentConfig("graphs", ns=(3,), events=("e",), mode="mc",
                             trials=0).validate()
        with pytest.raises(ValueError, match="unknown class"):
            parse_config("class=nope\nn=3\nevents=all-k-ext:1\n")


class TestRows:
    def test_exact_rows_match_direct_computation(self):
        cfg = parse_config(TF_EXACT)
        rows = list(experiment_rows(cfg))
        assert [r[0] for r in rows] == [3, 4, 5]
        c = builtin_class("triangle-free")
        (ev,) = resolve_events("all-k-ext:1", c)
        for n, name, measure, mode, value, *rest in rows:
            assert (name, measure, mode) == ("all-k-ext:1", "uniform",
                                             "exact")
            assert value == exact_event_probability(c, None, ev, n,
                                                    "uniform")
            assert rest == [None] * 4
        assert rows[1][4] == Fraction(18, 41)

    def test_mc_rows_are_reproducible(self):
        text = ("class=graphs\nn=4\nevents=all-k-ext:1\nmode=mc\n"
                "trials=300\nseed=11\n")
        a = list(experiment_rows(parse_config(text)))
        b = list(experiment_rows(parse_config(text)))
        assert a == b
        (row,) = a
        assert row[7] == 300 and row[8] == 11
        assert row[5] <= row[4] <= row[6]

    def test_mc_streams_differ_per_row(self):
        text = ("class=graphs\nn=4,4\nevents=all-k-ext:1\nmode=mc\n"
                "trials=400\nseed=11\n")
        a, b = experiment_rows(parse_config(text))
        assert a[4] != b[4]


class TestCsv:
    def test_header_and_footer(self):
        cfg = parse_config(TF_EXACT)
        text = render_csv(cfg, experiment_rows(cfg))
        lines = text.strip().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert lines[-1].startswith("# zol-lab ")
        assert lines[-1].endswith(config_digest(cfg))

    def test_byte_reproducibility(self):
        cfg = parse_config(TF_EXACT)
        assert render_csv(cfg, experiment_rows(cfg)) \
            == render_csv(cfg, experiment_rows(cfg))

    def test_fraction_rendering(self):
        cfg = parse_config(TF_EXACT + "fractions=true\n")
        text = render_csv(cfg, experiment_rows(cfg))
        assert "18/41" in text
        cfg = parse_config(TF_EXACT)
        assert "18/41" not in render_csv(cfg, experiment_rows(cfg))

    def test_run_experiment_writes_out(self, tmp_path):
        out = tmp_path / "rows.csv"
        cfg = parse_config(TF_EXACT + f"out={out}\n")
        text = run_experiment(cfg)
        assert out.read_text() == text


class TestDigest:
    def test_stable_across_processes(self):
        cfg = parse_config(TF_EXACT)
        assert config_digest(cfg) == "ff4549848eb4"

    def test_sensitive_to_each_field(self):
        base = parse_config(TF_EXACT)
        tweaked = parse_config(TF_EXACT.replace("3..5", "3..6"))
        assert config_digest(base) != config_digest(tweaked)
        assert len(config_digest(base)) == 12
