import io
import json
import math

import numpy as np
import pytest

from ctrlfusion.cli import SCHEMA, run_command
from ctrlfusion.config import (
    check_expected,
    generate_config,
    generate_system,
    load_config,
    load_system,
    system_from_config,
    write_config,
)
from ctrlfusion.errors import ParseError, ValidationError
from ctrlfusion.fusion import fusion_frame_bounds, fusion_frame_operator

from conftest import FIXTURES


def run(argv, monkeypatch=None):
    out = io.StringIO()
    code = run_command([str(a) for a in argv], stdout=out)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), text


def base_config():
    return json.loads((FIXTURES / "r3_as_written.json").read_text())


# --- load_system -----------------------------------------------------------

def test_load_fixture_bounds(r3_as_written):
    b, _ = fusion_frame_bounds(r3_as_written)
    assert (b.lower, b.upper) == (pytest.approx(0.5), pytest.approx(1.0))


def test_zero_weight_rejected():
    cfg = base_config()
    cfg["subspaces"][1]["weight"] = 0
    with pytest.raises(ValidationError, match="weight must be positive") as info:
        system_from_config(cfg)
    assert info.value.field == "subspaces[1].weight"


def test_shape_mismatch_rejected():
    cfg = base_config()
    cfg["C"] = [[1, 0], [0, 1]]
    with pytest.raises(ValidationError, match="shape") as info:
        system_from_config(cfg)
    assert info.value.field == "C"


@pytest.mark.parametrize("mutate, field", [
    (lambda c: c.update(dimension=0), "dimension"),
    (lambda c: c.update(field="quaternion"), "field"),
    (lambda c: c.update(Cprime="transpose"), "Cprime"),
    (lambda c: c.update(C=[[1, 0, 0], [0, 0, 0], [0, 0, 1]]), "C/Cprime"),
    (lambda c: c["subspaces"][0].update(basis=[[1, 0]]), "subspaces[0].basis"),
    (lambda c: c["subspaces"][2].update(basis=[[0, 0, 0]]), "subspaces[2].basis"),
    (lambda c: c["subspaces"][0].update(basis=[[[1, 0], 0, 0]]), "subspaces[0].basis[0][0]"),
])
def test_validation_names_field(mutate, field):
    cfg = base_config()
    mutate(cfg)
    with pytest.raises(ValidationError) as info:
        system_from_config(cfg)
    assert info.value.field == field


def test_parse_error_has_location(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "dimension": 3,\n  "field": real\n}\n')
    with pytest.raises(ParseError) as info:
        load_config(p)
    assert info.value.location.endswith(":3:12")


def test_cprime_keywords():
    cfg = base_config()
    cfg["C"] = [[2, 1, 0], [0, 1, 0], [0, 0, 3]]
    for kw in ("same", "identity", "inverse-adjoint"):
        cfg["Cprime"] = kw
        s = system_from_config(cfg)
        if kw == "same":
            np.testing.assert_array_equal(s.pair.Cprime, s.pair.C)
        elif kw == "identity":
            np.testing.assert_array_equal(s.pair.Cprime, np.eye(3))
        else:
            np.testing.assert_allclose(s.pair.C.T @ s.pair.Cprime, np.eye(3), atol=1e-14)


def test_complex_entries_parse():
    s = load_system(FIXTURES / "complex_inverse_adjoint.json")
    assert np.iscomplexobj(s.pair.C)
    assert s.pair.C[0, 1] == 1j


# --- generate_system ---------------------------------------------------------

def test_generate_determinism():
    a = generate_system(5, [2, 3, 1], "pair", "random", seed=42, field="complex")
    b = generate_system(5, [2, 3, 1], "pair", "random", seed=42, field="complex")
    np.testing.assert_array_equal(a.pair.C, b.pair.C)
    np.testing.assert_array_equal(a.pair.Cprime, b.pair.Cprime)
    for x, y in zip(a.members, b.members):
        np.testing.assert_array_equal(x.subspace.basis, y.subspace.basis)
        assert x.weight == y.weight
    c = generate_system(5, [2, 3, 1], "pair", "random", seed=43, field="complex")
    assert not np.array_equal(a.pair.C, c.pair.C)


def test_generate_with_fixture_bases_reproduces_fixture(r3_as_written):
    E = np.eye(3)
    bases = [E[:, :2], E[:, 1:], E[:, 2:]]
    s = generate_system(3, [2, 2, 1], "identity", ("uniform", math.sqrt(0.5)), seed=0, bases=bases)
    np.testing.assert_array_equal(fusion_frame_operator(s), fusion_frame_operator(r3_as_written))


def test_generate_c2_always_positive():
    for seed in range(50):
        assert all(generate_system(4, [1, 2, 3, 4], "c2", "random", seed=seed).positivity_ok)


def test_generate_pair_mode_can_lose_positivity():
    flags = [all(generate_system(3, [1, 2], "pair", "random", seed=s).positivity_ok) for s in range(20)]
    assert not all(flags)


def test_generate_argument_checks():
    with pytest.raises(ValueError):
        generate_config(3, [4], "identity")
    with pytest.raises(ValueError):
        generate_config(3, [1], "weird")


def test_round_trip_bit_exact(tmp_path):
    for seed, field in [(1, "real"), (2, "complex")]:
        cfg = generate_config(4, [1, 3, 2], "pair", "random", seed=seed, field=field)
        s = system_from_config(cfg)
        path = tmp_path / f"g{seed}.json"
        write_config(cfg, path)
        t = load_system(path)
        np.testing.assert_array_equal(s.pair.C, t.pair.C)
        np.testing.assert_array_equal(s.pair.Cprime, t.pair.Cprime)
        for x, y in zip(s.members, t.members):
            np.testing.assert_array_equal(x.subspace.basis, y.subspace.basis)
            assert x.weight == y.weight


# --- fixture corpus -----------------------------------------------------------

@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.json")), ids=lambda p: p.stem)
def test_fixture_expected_block(path):
    cfg = load_config(path)
    assert "expected" in cfg
    rows = check_expected(system_from_config(cfg), cfg["expected"])
    assert rows
    failed = [(k, got) for k, ok, got in rows if not ok]
    assert not failed


# --- CLI ----------------------------------------------------------------------

def test_cli_analyze_as_written():
    code, rep, _ = run(["analyze", FIXTURES / "r3_as_written.json"])
    assert code == 0
    assert rep["schema"] == SCHEMA
    assert rep["result"]["bounds"]["lower"] == pytest.approx(0.5)
    assert rep["result"]["bounds"]["upper"] == pytest.approx(1.0)
    assert rep["verdicts"]["trace_identity"] is True
    assert rep["verdicts"]["characterization_consistent"] is True


def test_cli_erase_parseval():
    code, rep, _ = run(["erase", FIXTURES / "r3_parseval.json", "--indices", "1"])
    assert code == 0
    r = rep["result"]
    assert r["case"] == "BelowA" and r["erased_indices"] == [1]
    assert r["predicted_lower"] == pytest.approx(0.5)
    assert [r["actual_bounds"]["lower"], r["actual_bounds"]["upper"]] == [pytest.approx(0.5), pytest.approx(1.0)]


def test_cli_analyze_nonpositive_exit_2():
    code, rep, _ = run(["analyze", FIXTURES / "nonpositive_pair.json"])
    assert code == 2
    assert rep["result"]["offending_indices"] == [2]


def test_cli_error_and_compose():
    code, rep, _ = run(["error", FIXTURES / "r3_four_member.json"])
    assert code == 0 and rep["result"]["e1_exact"] == pytest.approx(0.6) and rep["verdicts"]["optimal"] is False
    p = FIXTURES / "r3_parseval.json"
    code, rep, _ = run(["compose", p, p])
    assert code == 0 and rep["result"]["trace_class"]["trace_norm_phi"] == pytest.approx(3.0)
    code, rep, _ = run(["error", FIXTURES / "nonpositive_pair.json"])
    assert code == 2 and rep["result"]["offending_indices"] == [2]


def test_cli_approx_exit_codes(tmp_path):
    p = FIXTURES / "r3_parseval.json"
    code, rep, _ = run(["approx", p, p])
    assert code == 0 and rep["result"]["gamma"] == pytest.approx(0.0, abs=1e-28)
    cfg = load_config(p)
    for item in cfg["subspaces"]:
        item["weight"] *= 2
    big = tmp_path / "big.json"
    write_config(cfg, big)
    code, rep, _ = run(["approx", big, big])
    assert code == 2 and rep["verdicts"]["applicable"] is False


def test_cli_usage_errors(tmp_path, capsys):
    assert run_command(["nope"]) == 1
    assert run_command(["erase", str(FIXTURES / "r3_parseval.json"), "--indices", "0"]) == 1
    assert run_command(["erase", str(FIXTURES / "r3_parseval.json"), "--indices", "9"]) == 1
    assert run_command(["analyze", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run_command(["analyze", str(bad)]) == 1
    cfg = base_config()
    cfg["subspaces"][0]["weight"] = -1
    write_config(cfg, bad)
    assert run_command(["analyze", str(bad)]) == 1
    assert "weight must be positive" in capsys.readouterr().err


def test_cli_numerical_failure_exit_3(monkeypatch):
    from ctrlfusion import cli
    from ctrlfusion.errors import DecompositionFailure

    def boom(*a, **k):
        raise DecompositionFailure("did not converge")

    monkeypatch.setattr(cli, "synthesis_characterization", boom)
    code, rep, _ = run(["analyze", FIXTURES / "r3_parseval.json"])
    assert code == 3 and rep["result"]["error"]["type"] == "DecompositionFailure"


def _strip_time(text):
    rep = json.loads(text)
    rep.pop("wall_time_s")
    return json.dumps(rep, sort_keys=True)


def test_cli_determinism_fixed_seed(tmp_path):
    argv = ["generate", "--dim", 4, "--dims", "2,1,3", "--mode", "c2", "--seed", 7]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _, rep_a, text_a = run(argv + ["--out", a])
    _, rep_b, text_b = run(argv + ["--out", b])
    assert a.read_bytes() == b.read_bytes()
    assert _strip_time(text_a).replace(str(a), "X") == _strip_time(text_b).replace(str(b), "X")
    outs = [run(["analyze", a, "--seed", 3, "--pretty"])[2] for _ in range(2)]
    assert _strip_time(outs[0]) == _strip_time(outs[1])
    # every field but the wall time is byte-identical in the raw output too
    strip = [o.split('"wall_time_s"')[0] for o in outs]
    assert strip[0] == strip[1]


def test_cli_generate_round_trip(tmp_path):
    out = tmp_path / "g.json"
    code, rep, _ = run(["generate", "--dim", 3, "--dims", "2,2,1", "--mode", "pair",
                        "--weights", "uniform:0.5", "--field", "complex", "--seed", 5, "--out", out])
    assert code == 0 and rep["result"]["written"] == str(out)
    cfg = load_config(out)
    assert all(item["weight"] == 0.5 for item in cfg["subspaces"])
    s1 = system_from_config(generate_config(3, [2, 2, 1], "pair", "uniform:0.5", 5, "complex"))
    s2 = load_system(out)
    np.testing.assert_array_equal(s1.pair.C, s2.pair.C)
    for x, y in zip(s1.members, s2.members):
        assert np.max(np.abs(x.subspace.basis - y.subspace.basis)) <= 1e-12


def test_cli_report_to_file_and_env_tol(tmp_path, monkeypatch):
    out = tmp_path / "rep.json"
    monkeypatch.setenv("CFF_DEFAULT_TOL", "1e-7")
    code, rep, text = run(["analyze", FIXTURES / "r3_parseval.json", "--out", out])
    assert code == 0 and text == ""
    saved = json.loads(out.read_text())
    assert saved["tolerances"]["tol"] == 1e-7
    code, rep, _ = run(["analyze", FIXTURES / "r3_parseval.json", "--tol", "1e-10"])
    assert rep["tolerances"]["tol"] == 1e-10


def test_cli_check_command():
    code, rep, _ = run(["check", FIXTURES / "r3_as_written.json"])
    assert code == 0 and rep["verdicts"]["all_passed"] is True
