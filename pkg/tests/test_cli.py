import json
import os

import pytest

from twistlab import cli, store
from twistlab.comparator import DensityReport, ParityFinding
from twistlab.lfunc import ObstructionReport
from twistlab.modforms import dumps_record, get_form, loads_record
from twistlab.twist import TwistCertificate, WeakMatch


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    assert doc["schema"] == 1
    return code, doc


def test_corpus_list(capsys):
    code, doc = run_json(capsys, "corpus", "list")
    assert code == 0 and doc["command"] == "corpus list"
    assert len(doc["records"]) == 11


def test_detect_twist_certificate(capsys):
    code, doc = run_json(capsys, "detect-twist", "delta:chi=4/1", "delta")
    assert code == 0
    cert = TwistCertificate.from_dict(doc["certificate"])
    assert cert.chi.modulus == 4 and cert.r == 0
    assert doc["verification"] == {"passed": True, "failing_primes": []}
    assert "proof" in doc["certificate"]["orientation"]


def test_detect_twist_tate_modifier(capsys):
    code, doc = run_json(capsys, "detect-twist", "11.2:tate=2", "11.2")
    assert code == 0 and doc["certificate"]["r"] == 2


def test_detect_twist_negative_control(capsys):
    code, doc = run_json(capsys, "detect-twist", "delta", "11.2")
    assert code == 3 and doc["certificate"] is None
    assert ParityFinding.from_dict(doc["parity"]).status == "inconclusive"


def test_weak_match_exit_code(capsys):
    code, doc = run_json(capsys, "detect-twist", "delta:chi=4/1", "delta", "--X", "20")
    assert code == 3
    assert WeakMatch.from_dict(doc["weak_match"]).sturm_target == 24


def test_compare_round_trip(capsys):
    code, doc = run_json(capsys, "compare", "delta", "delta:chi=4/1", "--X", "1000")
    assert code == 0
    rep = DensityReport.from_dict(doc["density"])
    assert rep.checkpoints[-1][0] == 1000
    assert doc["coincidence_count"] == rep.checkpoints[-1][1]
    assert ParityFinding.from_dict(doc["parity"]).r == 0


def test_compare_csv(capsys):
    code, out, _ = run(capsys, "compare", "delta", "1.16", "--X", "1000", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "X,ratio" and lines[-1].startswith("1000,")


def test_density(capsys):
    code, doc = run_json(capsys, "density", "27.2", "--X", "10000")
    assert code == 0 and doc["cm"] is True
    est = float(DensityReport.from_dict(doc["density"]).upper_density_estimate)
    assert abs(est - 0.5) < 0.05


def test_obstruction_round_trip(capsys):
    code, doc = run_json(capsys, "lfunc", "obstruction", "--k1", "14", "--k2", "12")
    assert code == 0
    rep = ObstructionReport.from_dict(doc["report"])
    assert rep.r_admissible is False and len(rep.exhibited_zeros()) >= 3


def test_obstruction_on_pole_serializes(capsys):
    code, out, _ = run(capsys, "lfunc", "obstruction", "--k1", "4", "--k2", "2", "--format", "json")
    assert code == 0
    json.loads(out, parse_constant=lambda c: pytest.fail(f"non-standard JSON constant {c}"))


def test_lfunc_numeric_commands(capsys):
    code, doc = run_json(capsys, "lfunc", "gamma", "--s", "3.7+1.2j", "--m", "4")
    assert code == 0 and doc["relative_error"] < 1e-9
    code, doc = run_json(capsys, "lfunc", "lattice", "--alpha", "2", "--p", "2", "--n-min", "0", "--n-max", "0")
    assert code == 0 and abs(doc["zeros"][0]["s"][0] - 1) < 1e-12
    code, doc = run_json(capsys, "lfunc", "shift", "--form", "delta", "--r", "1", "--s", "10")
    assert code == 0 and doc["relative_error"] < 1e-10
    code, doc = run_json(capsys, "lfunc", "feq", "--form", "delta", "--s", "7")
    assert code == 0 and doc["residual"] < 1e-4
    code, doc = run_json(capsys, "lfunc", "feq", "--form", "delta", "--s", "7", "--negate-sign")
    assert doc["residual"] > 1


@pytest.mark.parametrize(
    "argv,code",
    [
        (["bogus"], 1),
        (["compare", "delta"], 1),
        (["compare", "delta", "nope"], 2),
        (["compare", "delta", "delta", "--X", "20000", "--bound", "100"], 0),
        (["density", "delta", "--X", "10", "--checkpoints", "0"], 1),
        (["compare", "delta", "delta:rot=2"], 1),
        (["lfunc", "obstruction", "--k1", "13", "--k2", "12"], 1),
        (["lfunc", "feq", "--form", "delta", "--s", "30"], 2),
        (["lfunc", "gamma", "--s", "2", "--m", "3"], 2),
        (["corpus", "import", "x.qexp"], 1),
    ],
)
def test_exit_codes(capsys, argv, code):
    if argv[0] == "bogus" or argv == ["compare", "delta"]:
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == code
    else:
        assert run(capsys, *argv)[0] == code


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test config\nmodulus_bound = 3\noutput_format = json\ncoefficient_bound = 10_000\n")
    code, out, _ = run(capsys, "detect-twist", "delta:chi=5/2", "delta", "--config", str(cfg))
    assert code == 3 and json.loads(out)["certificate"] is None
    code, out, _ = run(capsys, "detect-twist", "delta:chi=5/2", "delta", "--config", str(cfg), "--modulus-bound", "5")
    assert code == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 1\n")
    assert run(capsys, "corpus", "list", "--config", str(bad))[0] == 1


def test_load_config_overrides(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("tail_window = 5\nweight_convention = statement\n")
    cfg = store.load_config(p, tail_window=2)
    assert cfg.tail_window == 2 and cfg.weight_convention == "statement"
    with pytest.raises(store.ConfigError):
        store.load_config(None, weight_convention="other")


def test_cache_with_checksum(tmp_path, monkeypatch, caplog):
    monkeypatch.setenv(store.CACHE_ENV, str(tmp_path))
    first = store.builtin_records(500)
    files = sorted(tmp_path.glob("*.qexp"))
    assert len(files) == 11 and all(f.with_suffix(".sha256").exists() for f in files)
    assert store.builtin_records(500) == first
    victim = tmp_path / "1.12.delta__500.qexp"
    victim.write_text(victim.read_text().replace("\n-24\n", "\n-25\n"))
    assert store.read_cached(tmp_path, "1.12.delta", 500) is None
    assert "checksum mismatch" in caplog.text
    again = store.builtin_records(500)
    assert again == first
    assert store.read_cached(tmp_path, "1.12.delta", 500) == first[0]


def test_export_import_bit_exact(tmp_path, capsys):
    out_dir, user_dir = tmp_path / "out", tmp_path / "user"
    assert run(capsys, "corpus", "export", "11.2", "delta", "--dir", str(out_dir))[0] == 0
    exported = out_dir / "11.2.qexp"
    assert exported.read_text() == dumps_record(get_form("11.2"))
    code, out, _ = run(capsys, "corpus", "export", "11.2")
    assert out == exported.read_text()

    renamed = tmp_path / "mine.qexp"
    renamed.write_text(exported.read_text().replace("11.2 ", "my11 ", 1))
    assert run(capsys, "corpus", "import", str(renamed), "--user-dir", str(user_dir))[0] == 0
    assert (user_dir / "my11.qexp").read_bytes() == renamed.read_bytes()
    code, doc = run_json(capsys, "detect-twist", "my11", "11.2", "--user-dir", str(user_dir))
    assert code == 0 and doc["certificate"]["chi"]["conductor"] == 1
    assert loads_record((user_dir / "my11.qexp").read_text()).coeffs == get_form("11.2").coeffs


def test_output_is_atomic(tmp_path, capsys, monkeypatch):
    target = tmp_path / "report.json"
    assert run(capsys, "corpus", "list", "--format", "json", "--output", str(target))[0] == 0
    before = target.read_text()
    assert json.loads(before)["command"] == "corpus list"
    assert sorted(os.listdir(tmp_path)) == ["report.json"]

    def broken_replace(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(store.os, "replace", broken_replace)
    code, _, err = run(capsys, "corpus", "list", "--output", str(target))
    assert code == 2 and "disk full" in err
    assert target.read_text() == before
    assert sorted(os.listdir(tmp_path)) == ["report.json"]
