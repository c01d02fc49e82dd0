"""Config file grammar and the command-line verbs."""

import csv
import os

import pytest

from featlsq.cli import main
from featlsq.config import (experiment_from_dict, load_experiment, load_suite,
                            parse_config, suite_from_dict)
from featlsq.errors import ConfigurationError

TINY_TEXT = """\
# tiny oscillator run
problem = oscillator
omega0 = 8.0
count_per_dim = 4
features = 4
max_iters = 200
seeds = 0, 1
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestGrammar:
    def test_comments_and_blanks_skipped(self, tmp_path):
        path = write(tmp_path, "a.cfg",
                     "# top\n\nproblem = oscillator\n  # indented comment\n")
        assert parse_config(path) == {"problem": "oscillator"}

    def test_later_assignment_wins(self, tmp_path):
        path = write(tmp_path, "a.cfg", "features = 4\nfeatures = 8\n")
        assert parse_config(path) == {"features": "8"}

    def test_include_splices_relative(self, tmp_path):
        write(tmp_path, "base.cfg", "problem = oscillator\nfeatures = 4\n")
        path = write(tmp_path, "top.cfg", "include base.cfg\nfeatures = 8\n")
        assert parse_config(path) == {"problem": "oscillator", "features": "8"}

    def test_include_cycle_rejected(self, tmp_path):
        write(tmp_path, "a.cfg", "include b.cfg\n")
        write(tmp_path, "b.cfg", "include a.cfg\n")
        with pytest.raises(ConfigurationError, match="include cycle"):
            parse_config(str(tmp_path / "a.cfg"))

    def test_diamond_include_allowed(self, tmp_path):
        write(tmp_path, "base.cfg", "problem = oscillator\n")
        write(tmp_path, "left.cfg", "include base.cfg\nomega0 = 8\n")
        write(tmp_path, "right.cfg", "include base.cfg\nfeatures = 4\n")
        path = write(tmp_path, "top.cfg", "include left.cfg\ninclude right.cfg\n")
        values = parse_config(path)
        assert values["problem"] == "oscillator"
        assert values["omega0"] == "8"

    def test_empty_include_path(self, tmp_path):
        path = write(tmp_path, "a.cfg", "include   \n")
        with pytest.raises(ConfigurationError, match="empty include path"):
            parse_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="cannot read config"):
            parse_config(str(tmp_path / "absent.cfg"))

    def test_line_without_equals(self, tmp_path):
        path = write(tmp_path, "a.cfg", "problem oscillator\n")
        with pytest.raises(ConfigurationError, match=r"a\.cfg:1: expected"):
            parse_config(path)

    def test_empty_key(self, tmp_path):
        path = write(tmp_path, "a.cfg", " = 3\n")
        with pytest.raises(ConfigurationError, match="empty key"):
            parse_config(path)


class TestTyping:
    def test_experiment_round_trip(self, tmp_path):
        cfg = load_experiment(write(tmp_path, "t.cfg", TINY_TEXT))
        assert cfg.problem == "oscillator"
        assert cfg.omega0 == 8.0
        assert cfg.features == 4
        assert cfg.seeds == (0, 1)

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError, match="unknown config key 'frobs'"):
            experiment_from_dict({"problem": "oscillator", "frobs": "1"})

    def test_bad_number(self):
        with pytest.raises(ConfigurationError, match="bad number"):
            experiment_from_dict({"features": "four"})

    def test_bad_seed_list(self):
        with pytest.raises(ConfigurationError, match="bad list"):
            experiment_from_dict({"seeds": "0, x"})

    def test_validation_applied(self):
        with pytest.raises(ConfigurationError, match="omega0 must exceed 2"):
            experiment_from_dict({"problem": "oscillator", "omega0": "1.0"})

    def test_suite_requires_kind(self):
        with pytest.raises(ConfigurationError, match="suite config must set"):
            suite_from_dict({"problem": "oscillator"})

    def test_suite_parses_lists_and_bool(self, tmp_path):
        text = TINY_TEXT + "suite = strong-K\nk_list = 4, 8\ninclude_slow = yes\n"
        suite = load_suite(write(tmp_path, "s.cfg", text))
        assert suite.kind == "strong-K"
        assert suite.k_list == (4, 8)
        assert suite.include_slow is True
        assert suite.base.omega0 == 8.0

    def test_suite_bad_bool(self):
        with pytest.raises(ConfigurationError, match="expected a boolean"):
            suite_from_dict({"suite": "baseline", "problem": "oscillator",
                             "include_slow": "maybe"})

    @pytest.mark.parametrize("alias,resolved", [
        ("ablation-σ", "ablation-sigma"),
        ("strong-Sδ", "strong-Sdelta"),
    ])
    def test_greek_kind_aliases(self, alias, resolved):
        suite = suite_from_dict({"suite": alias, "problem": "oscillator"})
        assert suite.kind == resolved


class TestCli:
    def test_run_verb(self, tmp_path, capsys):
        cfg = write(tmp_path, "t.cfg", TINY_TEXT)
        out = tmp_path / "out"
        code = main(["run", "--config", cfg, "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "e_L1 median" in printed
        assert "κ(M)" in printed
        assert (out / "oscillator-rrqr-lsqr-S4-K4-h1-tanh-sig1e-08").is_dir()

    def test_run_seed_override(self, tmp_path, capsys):
        cfg = write(tmp_path, "t.cfg", TINY_TEXT)
        out = tmp_path / "out"
        code = main(["run", "--config", cfg, "--out", str(out),
                     "--seeds", "7", "--eval-stride", "5"])
        assert code == 0
        run_dir = out / "oscillator-rrqr-lsqr-S4-K4-h1-tanh-sig1e-08"
        assert (run_dir / "convergence-seed7.csv").exists()
        with open(run_dir / "convergence-seed7.csv", newline="") as fh:
            iters = [int(r[0]) for r in list(csv.reader(fh))[1:]]
        assert all(i % 5 == 0 for i in iters)

    def test_run_config_error_exits_2(self, tmp_path, capsys):
        cfg = write(tmp_path, "bad.cfg", "problem = nope\n")
        code = main(["run", "--config", cfg, "--out", str(tmp_path / "o")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_suite_verb(self, tmp_path, capsys):
        text = TINY_TEXT + "suite = baseline\nsolvers = rrqr-lsqr, lsqr\n"
        cfg = write(tmp_path, "s.cfg", text)
        out = tmp_path / "out"
        code = main(["suite", "--config", cfg, "--out", str(out),
                     "--seeds", "0"])
        assert code == 0
        assert "suite artifacts" in capsys.readouterr().out
        assert (out / "oscillator-baseline" / "manifest.json").exists()

    def test_rmt_verb(self, tmp_path, capsys):
        out = tmp_path / "rmt"
        code = main(["rmt", "--out", str(out), "--dim", "40", "--rows", "6",
                     "--cols", "3", "--trials", "60"])
        assert code == 0
        assert (out / "rmt.csv").exists()
        assert "mean cross frobenius" in capsys.readouterr().out

    def test_fd_ref_verb(self, tmp_path, capsys):
        out = tmp_path / "ref"
        code = main(["fd-ref", "--wavelength", "0.5",
                     "--points-per-wavelength", "4", "--out", str(out)])
        assert code == 0
        assert (out / "fd-wave-wl0.5-c1-ppw4.json").exists()
        assert (out / "fd-wave-wl0.5-c1-ppw4.bin").exists()
        assert "energy drift" in capsys.readouterr().out

    def test_unknown_verb_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

    def test_run_requires_config(self):
        with pytest.raises(SystemExit):
            main(["run", "--out", "somewhere"])
