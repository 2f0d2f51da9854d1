"""End-to-end command-line tests, run in process through main()."""

from __future__ import annotations

import csv
import io
import json

import pytest

from quasirep import cli, groups, verify


@pytest.fixture(scope="module")
def cache(tmp_path_factory):
    """Shared cache directory so the A5 decomposition happens once."""
    return str(tmp_path_factory.mktemp("clicache"))


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_group_text_output(capsys, cache):
    code = cli.main(["group", "cyclic", "6", "--cache-dir", cache])
    out = capsys.readouterr().out
    assert code == 0
    assert "order=6" in out and "classes=6" in out
    assert out.splitlines()[1].startswith("hash=")


def test_group_json_output(capsys, cache):
    code = cli.main(["group", "quaternion8", "--cache-dir", cache,
                     "--format", "json"])
    assert code == 0
    info = json.loads(capsys.readouterr().out)
    assert info["order"] == 8
    assert info["classes"] == 5
    assert sum(info["class_sizes"]) == 8


def test_group_from_file(tmp_path, capsys, cache):
    path = tmp_path / "d3.grp"
    groups.save_group(groups.named("dihedral", 3), str(path))
    code = cli.main(["group", "file", str(path)])
    assert code == 0
    assert "order=6" in capsys.readouterr().out


def test_group_corrupt_file_is_input_error(tmp_path, capsys):
    path = tmp_path / "bad.grp"
    path.write_text("not a group file\n")
    code = cli.main(["group", "file", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert err.startswith("error:")
    assert "line 1" in err


def test_unknown_family_is_input_error(capsys, cache):
    code = cli.main(["group", "nosuch", "3", "--cache-dir", cache])
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_irreps_text_output(capsys, cache):
    code = cli.main(["irreps", "cyclic", "2", "--cache-dir", cache])
    out = capsys.readouterr().out
    assert code == 0
    assert "dims=1,1" in out
    assert "d_min=1" in out
    assert "sum_d2=2" in out


def test_sweep_matches_closed_form(capsys, cache):
    code = cli.main(["sweep", "--group", "alternating", "5", "--dpsi", "1:5",
                     "--rho-dim", "5", "--cache-dir", cache])
    captured = capsys.readouterr()
    assert code == 0
    rows = read_csv(captured.out)
    assert captured.out.splitlines()[0] == ",".join(cli._SWEEP_COLUMNS)
    assert len(rows) == 5
    for row in rows:
        assert abs(float(row["defect"]) - float(row["thm4_value"])) < 1e-7
        assert row["construction"] == "minor"
        assert int(row["d_rho"]) == 5
    assert "beat the random baseline" in captured.err


def test_sweep_empty_range(capsys, cache):
    code = cli.main(["sweep", "--group", "cyclic", "6", "--dpsi", "5:4",
                     "--cache-dir", cache])
    out = capsys.readouterr().out
    assert code == 0
    assert out == ",".join(cli._SWEEP_COLUMNS) + "\n"


def test_sweep_json(capsys, cache):
    code = cli.main(["sweep", "--group", "alternating", "5", "--dpsi", "2",
                     "--rho-dim", "4", "--format", "json", "--cache-dir", cache])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert all(row["d_psi"] == 2 for row in payload["rows"])


def test_sweep_tolerance_flag_changes_agreement(capsys, cache):
    # with an absurdly loose entry threshold every pair counts as agreeing
    code = cli.main(["sweep", "--group", "alternating", "5", "--dpsi", "1",
                     "--rho-dim", "5", "--tolerance", "10.0",
                     "--cache-dir", cache])
    assert code == 0
    rows = read_csv(capsys.readouterr().out)
    assert float(rows[0]["agreement_prob"]) == 1.0


def test_sweep_out_is_deterministic(tmp_path, capsys, cache):
    args = ["sweep", "--group", "alternating", "5", "--dpsi", "1:3",
            "--rho-dim", "4", "--seeds", "2", "--seed", "5",
            "--cache-dir", cache]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_hom_identity(capsys, cache):
    code = cli.main(["hom", "--source", "cyclic", "6", "--target", "cyclic", "6",
                     "--kind", "identity", "--cache-dir", cache])
    out = capsys.readouterr().out
    assert code == 0
    assert "agreement=1.000000" in out
    assert "[ok]" in out


def test_hom_genuine_reduction(capsys, cache):
    code = cli.main(["hom", "--source", "cyclic", "6", "--target", "cyclic", "3",
                     "--kind", "genuine", "--cache-dir", cache])
    out = capsys.readouterr().out
    assert code == 0
    assert "agreement=1.000000" in out


def test_hom_genuine_needs_cyclic_groups(capsys, cache):
    code = cli.main(["hom", "--source", "symmetric", "3", "--target", "cyclic", "3",
                     "--kind", "genuine", "--cache-dir", cache])
    assert code == 2
    assert "cyclic" in capsys.readouterr().err


def test_hom_balanced_csv(capsys, cache):
    code = cli.main(["hom", "--source", "symmetric", "3", "--target", "cyclic", "3",
                     "--kind", "balanced", "--seeds", "3", "--format", "csv",
                     "--cache-dir", cache])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.splitlines()[0] == ",".join(cli._HOM_COLUMNS)
    rows = read_csv(captured.out)
    assert len(rows) == 3
    for row in rows:
        bound = min(float(row["thm2_bound"]), float(row["thm3_bound"]))
        assert float(row["agreement_prob"]) <= bound + 1e-12


def test_twirl_text(capsys):
    code = cli.main(["twirl", "--d-rho", "6", "--d-psi", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "d_rho=6 d_psi=3" in out
    assert "exact=" in out


def test_twirl_json_with_sampling(capsys):
    code = cli.main(["twirl", "--d-rho", "6", "--d-psi", "3",
                     "--samples", "30", "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["max_abs_difference"] < 1e-10
    assert payload["monte_carlo"]["samples"] == 30


def test_twirl_degenerate_dimension(capsys):
    code = cli.main(["twirl", "--d-rho", "3", "--d-psi", "1"])
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_cache_survives_corruption(tmp_path, capsys):
    cache_dir = tmp_path / "c"
    assert cli.main(["group", "dihedral", "4", "--cache-dir", str(cache_dir)]) == 0
    cached = cache_dir / "dihedral-4.grp"
    assert cached.exists()
    first = capsys.readouterr().out
    cached.write_text("garbage\n")
    assert cli.main(["group", "dihedral", "4", "--cache-dir", str(cache_dir)]) == 0
    captured = capsys.readouterr()
    assert "rebuilding stale cache" in captured.err
    assert captured.out == first
    assert groups.load_group(str(cached)).order == 8


def test_cache_env_variable(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("QUASIREP_CACHE", str(tmp_path / "envcache"))
    assert cli.main(["group", "cyclic", "4"]) == 0
    capsys.readouterr()
    assert (tmp_path / "envcache" / "cyclic-4.grp").exists()
    assert not (tmp_path / ".quasirep").exists()


def stub_battery(passing):
    def fake(scope, seed=0, progress=None):
        checks = []
        for cid in ("A2", "A3"):
            good = passing or cid != "A2"
            measured = 0.0 if good else 2.0
            result = verify.CheckResult(
                check_id=cid, description="stub check",
                comparisons=[verify.Comparison("residual", "<=", measured, 1.0)],
                elapsed_s=0.0)
            if progress:
                progress(result)
            checks.append(result)
        return verify.RunManifest(tool="quasirep test", scope=scope, seed=seed,
                                  generated_at="2026-01-01T00:00:00+00:00",
                                  wall_clock_s=0.0, checks=checks)
    return fake


def test_verify_passing_paths(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_battery", stub_battery(passing=True))
    assert cli.main(["verify", "fast"]) == 0
    captured = capsys.readouterr()
    assert "A2 PASS" in captured.out and "A3 PASS" in captured.out

    out = tmp_path / "manifest.json"
    assert cli.main(["verify", "fast", "--seed", "7", "--out", str(out)]) == 0
    capsys.readouterr()
    manifest = json.loads(out.read_text())
    assert manifest["passed"] is True
    assert manifest["seed"] == 7
    assert [c["id"] for c in manifest["checks"]] == ["A2", "A3"]


def test_verify_json_routes_progress_to_stderr(monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_battery", stub_battery(passing=True))
    assert cli.main(["verify", "fast", "--format", "json"]) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["passed"] is True
    assert "A2 PASS" in captured.err


def test_verify_failure_names_first_check(monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_battery", stub_battery(passing=False))
    assert cli.main(["verify", "fast"]) == 1
    captured = capsys.readouterr()
    assert "A2 FAIL" in captured.out
    assert "first failing check: A2" in captured.err
    assert "residual" in captured.err
