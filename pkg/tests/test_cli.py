import json

import numpy as np
import pytest

from vpstest.bitseq import BitSequence, serialize_bits
from vpstest.cli import main
from vpstest.generators import mt19937_bits


def test_gen_then_test_file(tmp_path, capsys):
    out = tmp_path / "mt.bin"
    assert main(["gen", "--n", "2000", "--seed", "5489", "--out", str(out)]) == 0
    assert out.read_bytes() == mt19937_bits(5489, 2000).packed.tobytes()
    assert main(["test", "--gen", "file", "--in", str(out), "--test", "proposed", "--test", "kim"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,variant,n,statistic,pvalue"
    assert [l.split(",")[1] for l in lines[1:]] == ["proposed", "kim"]


def test_test_ascii_multiple_sequences(tmp_path, capsys):
    bits = np.random.default_rng(1).integers(0, 2, size=3000)
    path = tmp_path / "bits.txt"
    path.write_bytes(serialize_bits(BitSequence.from_bits(bits), "ascii01"))
    rc = main(["test", "--gen", "file", "--in", str(path), "--format", "ascii01",
               "--n", "1000", "--count", "3", "--test", "proposed"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "variant,M,r,proportion_pass" in out


def test_exp1_json_and_summary(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(["exp1", "--n", "1000", "--M", "20", "--sets", "2", "--out", str(out), "--out-format", "json"])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert {r["variant"] for r in doc["rows"]} == {"kim", "pareschi", "proposed"}
    assert capsys.readouterr().out.startswith("variant,")


def test_exp2_csv(tmp_path):
    out = tmp_path / "r.csv"
    rc = main(["exp2", "--n", "1000", "--M", "20", "--sets", "1", "--period", "5", "--period", "50",
               "--test", "proposed", "--out", str(out)])
    assert rc == 0
    assert out.read_text().splitlines()[0].startswith("T,set_id,variant")


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 1000, "M": 10, "sets": 1, "test": ["kim"], "out-format": "csv"}))
    out = tmp_path / "r.csv"
    assert main(["exp1", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_text().count("kim") == 1
    assert main(["exp1", "--config", str(cfg), "--test", "proposed", "--out", str(out)]) == 0
    assert "proposed" in out.read_text() and "kim" not in out.read_text()


def test_cdf(tmp_path, capsys):
    out = tmp_path / "cdf.csv"
    assert main(["cdf", "--n", "100", "--samples", "150", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 151
    assert "ks_distance" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["exp1", "--n", "1001"],
        ["exp1", "--bogus"],
        ["exp2", "--n", "1000"],
        ["test", "--gen", "mt"],
        ["gen", "--n", "10", "--gen", "aes", "--key", "zz"],
        ["test", "--gen", "file"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        rc = main(argv)
        raise SystemExit(rc)
    assert exc.value.code == 1


def test_io_errors_exit_2(tmp_path):
    assert main(["test", "--gen", "file", "--in", str(tmp_path / "missing")]) == 2
    short = tmp_path / "short.bin"
    short.write_bytes(b"\x00" * 10)
    assert main(["test", "--gen", "file", "--in", str(short), "--n", "1000"]) == 2
    assert main(["exp1", "--gen", "file", "--in", str(short), "--n", "1000", "--M", "2", "--sets", "1"]) == 2
    assert main(["exp1", "--config", str(tmp_path / "nope.json")]) == 2
