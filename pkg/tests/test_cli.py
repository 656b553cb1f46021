"""Command-line interface: outputs, exit codes, determinism."""

from importlib import resources

from tilesub.cli import main

SPEC = str(resources.files("tilesub.data") / "square3x3.sub")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_passes(capsys):
    code, out, _ = run(capsys, "validate", SPEC)
    assert code == 0
    assert "result=PASS" in out


def test_count_exact_output(capsys):
    code, out, _ = run(capsys, "count", SPEC)
    assert code == 0
    assert out.splitlines()[0] == "N0=36 Np=2304 bound=4680 coarse=8100"


def test_count_second_output(capsys):
    code, out, _ = run(capsys, "count", SPEC, "--second")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "N0=36 Np=2304 bound=4680 coarse=8100"
    assert lines[1] == "N'0=3 N'q=9 N'p=57 N'c=276 bound=690 coarse=3420"


def test_count_exact_flag(capsys):
    code, out, _ = run(capsys, "count", SPEC, "--exact")
    assert code == 0
    assert "tiles=1544 bound=4680 holds=yes" in out


def test_generate_deterministic(capsys):
    code1, out1, _ = run(capsys, "generate", SPEC)
    code2, out2, _ = run(capsys, "generate", SPEC)
    assert code1 == code2 == 0
    assert out1 == out2
    assert len(out1.splitlines()) == 1544


def test_generate_stage_files(capsys, tmp_path):
    stage_dir = tmp_path / "stages"
    code, _, _ = run(capsys, "generate", SPEC, "--stages", str(stage_dir))
    assert code == 0
    names = sorted(p.name for p in stage_dir.iterdir())
    assert names == [f"after_step{i}.txt" for i in range(1, 6)]
    step1 = (stage_dir / "after_step1.txt").read_text().splitlines()
    assert step1[0] == "T1 | k=1:m k=2:f3 k=3:m k=4:f1"
    assert len(step1) == 9


def test_verify_output(capsys):
    code, out, _ = run(capsys, "verify", SPEC)
    assert code == 0
    assert "condition1 PASS instances=1544" in out
    assert "phi_membership PASS" in out
    assert "condition3 PASS" in out
    assert "condition2 patch-scale evidence: PASS" in out
    assert out.rstrip().endswith("result=PASS")


def test_networks_output(capsys):
    code, out, _ = run(capsys, "networks", SPEC)
    assert code == 0
    assert "rule r1 networks=9" in out
    assert "center=c5" in out


def test_assemble_output(capsys):
    code, out, _ = run(capsys, "assemble", SPEC, "--width", "1", "--height", "1")
    assert code == 0
    assert out.splitlines()[0] == "patches=1544"


def test_assemble_seeded(capsys, tmp_path):
    seed = tmp_path / "seed.txt"
    seed.write_text("# seed the bottom-left corner\n0 0 7\n")
    code, out, _ = run(
        capsys, "assemble", SPEC, "--width", "2", "--height", "1",
        "--seed", str(seed), "--print-patches",
    )
    assert code == 0
    lines = out.splitlines()
    count = int(lines[0].split("=")[1])
    assert count >= 1
    assert all(line.startswith("7 ") for line in lines[1:])


def test_hierarchy_output(capsys):
    code, out, _ = run(capsys, "hierarchy", SPEC, "--depth", "2")
    assert code == 0
    assert "tiles=81" in out
    assert "undefined_slots=132" in out
    assert "matching=PASS" in out


def test_render_tile_labels(capsys, tmp_path):
    out_path = tmp_path / "tile.svg"
    # T1 with parent 1 sits at index 7 of the canonical dump.
    code, out, _ = run(capsys, "render", SPEC, "--svg", str(out_path), "--tile", "7")
    assert code == 0
    svg = out_path.read_text()
    assert ">m 0 m<" in svg
    assert ">3 1 3<" in svg
    assert svg.count(">1<") >= 3  # the east side letters 1 1 1
    # Deterministic output.
    run(capsys, "render", SPEC, "--svg", str(tmp_path / "again.svg"), "--tile", "7")
    assert (tmp_path / "again.svg").read_text() == svg


def test_render_empty_patch(capsys, tmp_path):
    out_path = tmp_path / "empty.svg"
    code, _, _ = run(capsys, "render", SPEC, "--svg", str(out_path), "--empty", "2x2")
    assert code == 0
    svg = out_path.read_text()
    assert "<line" in svg and "<rect" not in svg


def test_render_instance_is_nine_cells(capsys, tmp_path):
    out_path = tmp_path / "instance.svg"
    code, _, _ = run(capsys, "render", SPEC, "--svg", str(out_path), "--instance", "0")
    assert code == 0
    assert out_path.read_text().count("<rect") == 9


def test_render_without_subject_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "render", SPEC, "--svg", str(tmp_path / "x.svg"))
    assert code == 2


def test_unknown_command_is_usage_error(capsys):
    assert run(capsys, "frobnicate", SPEC)[0] == 2


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.sub"
    bad.write_text("substitution t\nwat\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2
    assert "error:" in err


def test_missing_file_exit_code(capsys):
    assert run(capsys, "validate", "/nonexistent.sub")[0] == 2


def test_validate_failure_exit_code(capsys, tmp_path):
    text = """
substitution broken
prototype sq facets 4 orient - + - +
rule r1 parent sq
  cell a sq
  cell b sq
  gamma S : a.S b.S
  gamma N : a.N b.N
  gamma W : a.W
  gamma E : b.E
"""
    bad = tmp_path / "broken.sub"
    bad.write_text(text)
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1
    assert "DisconnectedTemplate" in out
