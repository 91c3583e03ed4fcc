"""Command-line entry points: argument wiring, exit codes, console messages."""

import subprocess
import sys

import numpy as np
import pytest

from ganbalance.cli import build_parser, main
from helpers import gaussian_blobs, write_dataset_csv

SPLIT_FLAGS = [
    "--train-size", "150", "--test-size", "100",
    "--train-pos", "20", "--test-pos", "10",
]


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    rng = np.random.default_rng(19)
    dataset = gaussian_blobs(rng, n_pos=40, n_neg=260, dim=4)
    path = tmp_path_factory.mktemp("cli_data") / "data.csv"
    write_dataset_csv(dataset, path)
    return path


def test_help_lists_both_subcommands():
    out = subprocess.run(
        [sys.executable, "-m", "ganbalance.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert "run" in out.stdout and "synth" in out.stdout


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_run_exit_zero_and_summary(corpus, tmp_path, capsys):
    code = main(
        ["run", "--data", str(corpus), "--out", str(tmp_path),
         "--modes", "raw", "--models", "dt,logreg", *SPLIT_FLAGS]
    )
    captured = capsys.readouterr()
    assert code == 0
    assert f"outputs written to {tmp_path}" in captured.out
    assert captured.out.count("acc=") == 2
    assert (tmp_path / "metrics.csv").exists()


def test_synth_exit_zero_and_files(corpus, tmp_path, capsys):
    code = main(
        ["synth", "--data", str(corpus), "--out", str(tmp_path), "--n", "5",
         "--gan-epochs", "20", "--gan-batch", "8", "--gan-log-every", "5",
         *SPLIT_FLAGS]
    )
    captured = capsys.readouterr()
    assert code == 0
    assert "wrote 5 generated rows" in captured.out
    assert (tmp_path / "generated_samples.csv").exists()
    assert (tmp_path / "gan_training_log.csv").exists()


def test_missing_data_file_exits_two(tmp_path, capsys):
    code = main(
        ["run", "--data", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]
    )
    captured = capsys.readouterr()
    assert code == 2
    assert captured.err.startswith("error:")


def test_unknown_mode_exits_two(corpus, tmp_path, capsys):
    code = main(
        ["run", "--data", str(corpus), "--out", str(tmp_path),
         "--modes", "bogus", *SPLIT_FLAGS]
    )
    captured = capsys.readouterr()
    assert code == 2
    assert "error:" in captured.err


def test_partial_failure_exits_three(corpus, tmp_path, capsys):
    # a single training positive starves GAN training while raw still works
    code = main(
        ["run", "--data", str(corpus), "--out", str(tmp_path),
         "--modes", "raw,gan", "--models", "dt",
         "--train-size", "150", "--test-size", "100",
         "--train-pos", "1", "--test-pos", "10",
         "--gan-epochs", "20"]
    )
    captured = capsys.readouterr()
    assert code == 3
    assert "partial outputs written to" in captured.err
    assert (tmp_path / "metrics.csv").exists()


def test_seed_flag_changes_outputs(corpus, tmp_path, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out, seed in ((out_a, "1"), (out_b, "2")):
        assert main(
            ["run", "--data", str(corpus), "--out", str(out), "--seed", seed,
             "--modes", "oversample", "--models", "logreg", "--dump-augmented",
             *SPLIT_FLAGS]
        ) == 0
    capsys.readouterr()
    dump_a = (out_a / "train_augmented.csv").read_bytes()
    dump_b = (out_b / "train_augmented.csv").read_bytes()
    assert dump_a != dump_b
