import json
import math

import numpy as np
import pytest

from steersim import cli
from steersim.errors import SolverStall

PI4 = math.pi / 4
PI8 = math.pi / 8


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = [l for l in text.strip().splitlines() if l]
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_radius_case3_ca(capsys):
    code, out, _ = run_cli(capsys, "radius", "--case", "3", "--link", "CA",
                           "--W", "0.8", "--theta", "0.3927")
    assert code == 0
    rows = parse_csv(out)
    assert rows[0]["schema"] == "steersim.radius/1"
    expect = 0.8 * math.sqrt(1 + math.sin(2 * 0.3927) ** 2 / 4)
    assert abs(float(rows[0]["radius"]) - expect) < 1e-9


def test_radius_case2_ba_vanishes_at_symmetric_point(capsys):
    code, out, _ = run_cli(capsys, "radius", "--case", "2", "--link", "BA",
                           "--W", "1", "--theta", f"{PI4}")
    assert code == 0
    assert abs(float(parse_csv(out)[0]["radius"])) < 1e-12


def test_radius_mixture_both_methods(capsys):
    code, out, _ = run_cli(capsys, "radius", "--mix", "1,3", "--p", "0.227",
                           "--link", "AB", "--W", "0.9955", "--theta", f"{PI4}",
                           "--method", "both")
    assert code == 0
    rows = parse_csv(out)
    assert [r["method"] for r in rows] == ["analytic", "numeric"]
    assert abs(float(rows[0]["radius"]) - float(rows[1]["radius"])) < 1e-5


def test_radius_deg_flag(capsys):
    _, out_rad, _ = run_cli(capsys, "radius", "--case", "1", "--link", "AB",
                            "--W", "0.9", "--theta", f"{PI4}")
    _, out_deg, _ = run_cli(capsys, "radius", "--case", "1", "--link", "AB",
                            "--W", "0.9", "--theta", "45", "--deg")
    assert abs(float(parse_csv(out_rad)[0]["radius"])
               - float(parse_csv(out_deg)[0]["radius"])) < 1e-12


def test_radius_usage_errors(capsys):
    code, _, err = run_cli(capsys, "radius", "--case", "1", "--mix", "1,3",
                           "--link", "AB", "--W", "0.5", "--theta", "0.5")
    assert code == 2 and "error" in err
    code, _, _ = run_cli(capsys, "radius", "--link", "AB", "--W", "0.5", "--theta", "0.5")
    assert code == 2
    code, _, _ = run_cli(capsys, "radius", "--case", "1", "--link", "AB",
                         "--W", "1.5", "--theta", "0.5")
    assert code == 2


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["radius", "--nonsense"])
    assert exc.value.code == 2


def test_solver_failure_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise SolverStall("synthetic stall")

    monkeypatch.setattr(cli, "steering_radius", boom)
    code, _, err = run_cli(capsys, "radius", "--case", "1", "--link", "AB",
                           "--W", "0.9", "--theta", "0.6", "--method", "numeric")
    assert code == 3
    assert "solver failure" in err


def test_sweep_csv_schema_and_determinism(tmp_path, capsys):
    out = tmp_path / "fig3a.csv"
    args = ["sweep", "--var", "W", "--case", "1", "--theta", f"{PI4}",
            "--from", "0", "--to", "1", "--steps", "11", "--out", str(out)]
    assert cli.main(args) == 0
    text_one = out.read_bytes()
    header = text_one.decode().splitlines()[0]
    assert header == ("schema,param_name,param_value,R_AB,R_BA,R_AC,R_CA,"
                      "class_AB,class_AC,method,status")
    rows = parse_csv(text_one.decode())
    assert len(rows) == 11
    for row in rows:
        w = float(row["param_value"])
        assert abs(float(row["R_AB"]) - math.sqrt(2) * w) < 1e-8
    assert cli.main(args) == 0
    assert out.read_bytes() == text_one  # byte-identical rerun
    assert (tmp_path / "fig3a.csv.meta.json").exists()


def test_sweep_json_mirror_and_plot(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    js = tmp_path / "sweep.json"
    png = tmp_path / "sweep.png"
    code = cli.main(["sweep", "--var", "p", "--mix", "1,3", "--W", "1",
                     "--theta", f"{PI8}", "--from", "0", "--to", "1",
                     "--steps", "21", "--out", str(out), "--json", str(js),
                     "--plot", str(png)])
    assert code == 0
    doc = json.loads(js.read_text())
    assert doc["meta"]["schema"] == "steersim.sweep/1"
    assert len(doc["rows"]) == 21
    assert png.stat().st_size > 0
    # two-way window closes near p = 2 - sqrt(7/2)
    steer = [r for r in parse_csv(out.read_text())
             if float(r["R_AB"]) > 1 and float(r["R_BA"]) > 1
             and float(r["R_AC"]) > 1 and float(r["R_CA"]) > 1]
    assert steer
    assert max(float(r["param_value"]) for r in steer) <= 2 - math.sqrt(7 / 2) + 0.05


def test_sweep_mix12_has_no_two_way_row(tmp_path):
    out = tmp_path / "mix12.csv"
    code = cli.main(["sweep", "--var", "p", "--mix", "1,2", "--W", "1",
                     "--theta", f"{PI4}", "--from", "0", "--to", "1",
                     "--steps", "51", "--out", str(out)])
    assert code == 0
    for row in parse_csv(out.read_text()):
        radii = [float(row[f"R_{k}"]) for k in ("AB", "BA", "AC", "CA")]
        assert not all(r > 1 for r in radii)


def test_chain_case3_pair(capsys):
    code, out, _ = run_cli(capsys, "chain", "--W", "1", "--theta", f"{PI4}",
                           "--bobs", "case3", "case3")
    assert code == 0
    rows = parse_csv(out)
    assert [r["party"] for r in rows] == ["B1", "B2", "C"]
    expected = [(math.sqrt(2), 1.0), (math.sqrt(5) / 2, 1.0),
                (math.sqrt(17) / 4, math.sqrt(17) / 4)]
    for row, (rf, rb) in zip(rows, expected):
        assert abs(float(row["R_forward"]) - rf) < 1e-6
        assert abs(float(row["R_backward"]) - rb) < 1e-6
    assert rows[0]["class"] == "one_way_forward"
    assert rows[2]["class"] == "two_way"


def test_chain_numbered_bobs_and_repeat(capsys):
    code, out, _ = run_cli(capsys, "chain", "--W", "1", "--theta", f"{PI4}",
                           "--bob1", "mix:1@0.00097,3", "--bob2", "mix:1@0.0625,3")
    assert code == 0
    rows = parse_csv(out)
    values = [float(rows[i][c]) for i in range(3) for c in ("R_forward", "R_backward")]
    golden = [1.4142136, 1.0000005, 1.1176002, 1.0000034, 1.0000332, 1.0000332]
    got = [values[0], values[1], values[2], values[3], values[4], values[5]]
    np.testing.assert_allclose(got, golden, atol=5e-7)

    code, out, _ = run_cli(capsys, "chain", "--W", "1", "--theta", f"{PI4}",
                           "--bobs", "case3", "x4")
    rows = parse_csv(out)
    assert [r["party"] for r in rows] == ["B1", "B2", "B3", "B4", "C"]
    assert all(r["class"] == "one_way_forward" for r in rows[:-1])


def test_region_window(capsys):
    code, out, _ = run_cli(capsys, "region", "--scenario", "window", "--mix", "1,3",
                           "--W", "1", "--theta", f"{PI4}")
    assert code == 0
    rows = parse_csv(out)
    window = [r for r in rows if r["record"] == "window"][0]
    assert abs(float(window["lo"])) < 1e-5
    assert abs(float(window["hi"]) - (2 - math.sqrt(3))) < 1e-4


def test_region_four_party(capsys):
    code, out, _ = run_cli(capsys, "region", "--scenario", "four-party", "--no-verify")
    assert code == 0
    rows = parse_csv(out)
    bound = [r for r in rows if r["record"] == "p1_bound"][0]
    assert abs(float(bound["p1"]) - 0.000978) < 1e-5
    witness = [r for r in rows if r["record"] == "witness"][0]
    assert all(float(witness[k]) > 1 for k in
               ("R_AB1", "R_B1A", "R_AB2", "R_B2A", "R_AC", "R_CA"))


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text(
        "# W sweep for the two-basis strategy\n"
        "var = W\n"
        "case = 1\n"
        "theta = 0.7853981633974483\n"
        "from = 0\n"
        "to = 1\n"
        "steps = 5\n"
    )
    out = tmp_path / "rows.csv"
    code = cli.main(["sweep", "--config", str(cfg), "--var", "W", "--from", "0",
                     "--to", "1", "--steps", "5", "--out", str(out)])
    assert code == 0
    assert len(parse_csv(out.read_text())) == 5
    bad = tmp_path / "bad.cfg"
    bad.write_text("unknown_key = 3\n")
    code = cli.main(["sweep", "--config", str(bad), "--var", "W", "--from", "0",
                     "--to", "1", "--steps", "5"])
    assert code == 2


def test_chain_config_file(tmp_path, capsys):
    cfg = tmp_path / "chain.cfg"
    cfg.write_text(
        "W = 1\n"
        "theta = 0.7853981633974483\n"
        "bobs = case3 x3\n"
    )
    code, out, _ = run_cli(capsys, "chain", "--config", str(cfg))
    assert code == 0
    rows = parse_csv(out)
    assert [r["party"] for r in rows] == ["B1", "B2", "B3", "C"]


def test_report_quick(tmp_path):
    outdir = tmp_path / "report"
    code = cli.main(["report", "--outdir", str(outdir), "--quick"])
    assert code == 0
    names = {p.name for p in outdir.iterdir()}
    assert "radii_case1_sym.csv" in names
    assert "radii_case1_sym.png" in names
    assert "radii_mix13_sym.csv" in names
    assert "chain_case3.png" in names
    assert "region_undisclosed.png" in names
