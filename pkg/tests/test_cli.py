import json
import subprocess
import sys

import numpy as np
import pytest

from entpur import cli, fileio, states
from entpur.optimizer import OptimizerConfig, estimate_ep


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def kv(text):
    lines = text.strip().splitlines()
    assert lines[0] == "quantity,value"
    return dict(line.split(",", 1) for line in lines[1:])


def test_builtin_and_ep(tmp_path, capsys):
    f = tmp_path / "bell.json"
    assert run(["builtin", "bell", "0", "--out", str(f)], capsys)[0] == 0
    s = fileio.read_state(f)
    assert s.rank() == 1 and s.entropy_a() == pytest.approx(1)
    code, out, err = run(["ep", str(f), "--starts", "3"], capsys)
    assert code == 0 and abs(float(kv(out)["ep"]) - 1) <= 1e-6
    assert "converged" in err


def test_builtin_werner_spectrum(tmp_path, capsys):
    f = tmp_path / "w.json"
    run(["builtin", "werner", "0.7", "--out", str(f)], capsys)
    assert fileio.read_state(f).eigenvalues == pytest.approx([0.7, 0.1, 0.1, 0.1], abs=1e-12)


def test_ep_werner_quarter(tmp_path, capsys):
    f = tmp_path / "w.json"
    run(["builtin", "werner", "0.25", "--out", str(f)], capsys)
    code, out, _ = run(["ep", str(f), "--starts", "5"], capsys)
    assert code == 0 and float(kv(out)["ep"]) <= 1e-4


def test_round_trip_bit_for_bit(tmp_path, capsys):
    f = tmp_path / "r.json"
    run(["builtin", "random", "2", "2", "--rank", "3", "--seed", "4", "--out", str(f)], capsys)
    code, out, _ = run(["ep", str(f), "--starts", "3", "--seed", "9"], capsys)
    direct = estimate_ep(states.random_bipartite(2, 2, rank=3, seed=4), OptimizerConfig(n_starts=3, seed=9))
    assert kv(out)["ep"] == format(direct.value, "#.9g")
    assert fileio.read_state(f).rho.tobytes() == states.random_bipartite(2, 2, rank=3, seed=4).rho.tobytes()


def test_ep_exit_codes(tmp_path, capsys):
    f = tmp_path / "bad.json"
    d = fileio.state_to_dict(states.werner(0.5))
    d["matrix"][0][0][0] -= 0.1
    f.write_text(json.dumps(d))
    code, _, err = run(["ep", str(f)], capsys)
    assert code == 2 and "trace is 0.9" in err
    good = tmp_path / "g.json"
    fileio.write_state(good, states.werner(0.5))
    assert run(["ep", str(good), "--dimA'", "5"], capsys)[0] == 3
    assert run(["ep", str(good), "--dim-bp", "17"], capsys)[0] == 3
    assert run(["ep", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run(["ep", str(good), "--starts", "0"], capsys)[0] == 2


def test_builtin_unknown_name(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["builtin", "ghz"])
    assert exc.value.code == 2
    assert run(["builtin", "werner", "1.5"], capsys)[0] == 2
    assert run(["builtin", "bell", "7"], capsys)[0] == 2
    assert run(["builtin", "bell-diagonal", "0.5", "0.5"], capsys)[0] == 2
    assert cli.build_state("classical", ["1"], dim=2).dims == (2, 2)
    with pytest.raises(cli.InputError):
        cli.build_state("ghz", [])


def test_channel(capsys):
    code, out, _ = run(["channel", "1", "0", "0", "0"], capsys)
    r = kv(out)
    assert code == 0 and float(r["numeric"]) == pytest.approx(1) and float(r["closed_form"]) == 1
    r = kv(run(["channel", "0.25", "0.25", "0.25", "0.25"], capsys)[1])
    assert abs(float(r["numeric"])) <= 1e-9 and abs(float(r["closed_form"])) <= 1e-12
    r = kv(run(["channel", "0.7", "0.1", "0.1", "0.1"], capsys)[1])
    assert float(r["numeric"]) == pytest.approx(0.278072, abs=1e-6)
    assert abs(float(r["difference"])) <= 1e-4
    assert run(["channel", "0.7", "0.2", "0.2", "0.1"], capsys)[0] == 2
    assert run(["channel", "a", "0.2", "0.2", "0.1"], capsys)[0] == 2


def test_bounds_builtin(capsys):
    code, out, err = run(["bounds", "--builtin", "classical", "0.5", "0.5", "--ep-starts", "3"], capsys)
    r = kv(out)
    assert code == 0
    assert float(r["ef"]) == 0 and float(r["ic_lower"]) == pytest.approx(1, abs=1e-4)
    assert float(r["marginal_upper"]) == pytest.approx(1) and r["pinched"] == "true"
    code, out, _ = run(["bounds", "--builtin", "random", "1", "1", "--ep-starts", "0"], capsys)
    assert code == 0


def test_bounds_product_state(tmp_path, capsys):
    f = tmp_path / "p.json"
    fileio.write_state(f, states.product_state(np.diag([1.0, 0]), np.diag([0.3, 0.7])))
    r = kv(run(["bounds", str(f), "--ep-starts", "3"], capsys)[1])
    for k in ("ef", "iq_half", "ic_lower", "c_a", "c_b", "marginal_upper", "ep_estimate"):
        assert abs(float(r[k])) <= 1e-6


def test_bounds_parse_failure(tmp_path, capsys):
    f = tmp_path / "x.json"
    f.write_text("{")
    assert run(["bounds", str(f)], capsys)[0] == 2
    assert run(["bounds"], capsys)[0] == 2


def test_werner_sweep(tmp_path, capsys):
    out = tmp_path / "s.csv"
    argv = ["werner-sweep", "--e-min", "0.9", "--e-max", "1.0", "--step", "0.1", "--no-dense",
            "--starts", "3", "--out", str(out), "--plot"]
    assert run(argv, capsys)[0] == 0
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0].startswith("e,ep_2x2,")
    assert len(lines) == 3
    last = lines[-1].split(",")
    assert abs(float(last[3]) - 1) <= 1e-6
    assert (tmp_path / "s.png").stat().st_size > 0
    run(argv[:-1], capsys)
    assert out.read_text() == text


def test_werner_sweep_invalid(capsys):
    assert run(["werner-sweep", "--e-min", "0.5", "--e-max", "0.4"], capsys)[0] == 2
    assert run(["werner-sweep", "--step", "0"], capsys)[0] == 2
    assert run(["werner-sweep", "--e-min", "0.5", "--e-max", "0.6", "--plot"], capsys)[0] == 2


def test_sweep_invariant_violation_aborts(monkeypatch, capsys):
    from entpur import werner as W

    def broken(grid, cfg, nested=True, jobs=1, check=True):
        return [W.SweepRow(0.5, 0.4, 0.4, 1.2, None, None, 0.0, 0.0, 0.0, 1.0, (2, 2))]

    monkeypatch.setattr(W, "werner_sweep", broken)
    code, out, err = run(["werner-sweep", "--e-min", "0.5", "--e-max", "0.6"], capsys)
    assert code == 1 and "ep_best <= upper" in err and out == ""


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "entpur.cli", "channel", "1", "0", "0", "0"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout.startswith("quantity,value")
