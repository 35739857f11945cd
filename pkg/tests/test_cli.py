import xml.etree.ElementTree as ET

import pytest

from mrpibound import cli

FAST = ["--dir-count", "200", "--n-max", "8"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_svg(path):
    root = ET.parse(path).getroot()
    assert root.tag == "{http://www.w3.org/2000/svg}svg"
    assert "href" not in path.read_text()
    return root


class TestBound:
    def test_tail(self, capsys):
        code, out, _ = run(["bound", "--gamma", "0.5", "--rw", "1", "--n", "2"], capsys)
        assert code == 0 and "tail_bound = 0.5 " in out

    def test_n_min(self, capsys):
        code, out, _ = run(["bound", "--gamma", "0.5", "--rw", "1", "--epsilon", "0.01"], capsys)
        assert code == 0 and "N_min = 8 " in out

    @pytest.mark.parametrize("argv", [
        ["bound", "--gamma", "1.0", "--rw", "1", "--n", "3"],
        ["bound", "--gamma", "0.5", "--rw", "1"],
        ["bound", "--gamma", "0.5", "--rw", "1", "--epsilon", "0"],
        ["bound", "--gamma", "abc", "--rw", "1", "--n", "3"],
    ])
    def test_usage_errors(self, argv, capsys):
        assert run(argv, capsys)[0] == 2


class TestExperiments:
    def test_exp1(self, tmp_path, capsys):
        code, out, _ = run(["exp1", "--output-dir", str(tmp_path), *FAST], capsys)
        assert code == 0
        lines = (tmp_path / "exp1_dim6.csv").read_text().splitlines()
        assert lines[0] == "n,d_num,d_bound,gamma,r_w,convention,seed"
        assert len(lines) == 9
        for line in lines[1:]:
            _, d_num, d_bound, *_ = line.split(",")
            assert float(d_num) <= float(d_bound)
        parse_svg(tmp_path / "exp1_dim6.svg")
        manifest = (tmp_path / "manifest.txt").read_text()
        assert "seed = 0" in manifest and "dir_count = 200" in manifest and "version = " in manifest
        assert "violations=0" in out

    def test_exp1_normal_slope(self, tmp_path, capsys):
        code, out, _ = run(["exp1", "--output-dir", str(tmp_path), "--system", "normal", "--norm", "euclidean",
                            "--dir-count", "200"], capsys)
        assert code == 0 and "[PASS]" in out

    def test_seed_changes_system(self, tmp_path, capsys):
        run(["exp1", "--output-dir", str(tmp_path / "a"), *FAST], capsys)
        code, _, _ = run(["exp1", "--output-dir", str(tmp_path / "b"), "--seed", "5", *FAST], capsys)
        assert code == 0
        assert (tmp_path / "a/exp1_dim6.csv").read_text() != (tmp_path / "b/exp1_dim6.csv").read_text()

    def test_exp2(self, tmp_path, capsys):
        code, out, _ = run(["exp2", "--output-dir", str(tmp_path), *FAST], capsys)
        assert code == 0
        csvs = sorted(p.name for p in tmp_path.glob("*.csv"))
        assert csvs
        text = (tmp_path / csvs[0]).read_text().splitlines()
        assert text[0] == "system,norm,n,gamma,r_w,bound,bound_euclidean_units"
        rows = [line.split(",") for line in text[1:]]
        euclid = {r[0]: float(r[3]) for r in rows if r[1] == "euclidean"}
        lyap = {r[0]: float(r[3]) for r in rows if r[1] == "lyapunov"}
        for system, gamma in lyap.items():
            assert gamma < 1
            assert gamma <= euclid[system] + 1e-8
        for svg in tmp_path.glob("*.svg"):
            parse_svg(svg)

    def test_exp3_small(self, tmp_path, capsys):
        code, out, _ = run(["exp3", "--output-dir", str(tmp_path), "--dims", "2,3", *FAST], capsys)
        assert code == 0
        assert (tmp_path / "exp3_dim2.csv").exists() and (tmp_path / "exp3_dim3.csv").exists()
        assert "total runtime" in out
        parse_svg(tmp_path / "exp3_all.svg")

    def test_exp4_small(self, tmp_path, capsys):
        code, out, _ = run(["exp4", "--output-dir", str(tmp_path), "--rollouts", "5", "--steps", "20",
                            "--dir-count", "200"], capsys)
        assert code == 0
        feas = (tmp_path / "exp4_feasible.csv").read_text().splitlines()
        assert feas[0] == "design,axis,halfwidth,volume"
        traj = (tmp_path / "exp4_trajectories.csv").read_text().splitlines()
        assert traj[0].startswith("design,rollout,k,")
        assert len(traj) == 1 + 2 * 5 * 20
        parse_svg(tmp_path / "exp4_feasible.svg")
        parse_svg(tmp_path / "exp4_trajectories.svg")
        assert "[PASS]" in out

    def test_config_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# small run\nseed = 3\nn_max = 5\ndir_count = 100\n")
        out_dir = tmp_path / "out"
        code, _, _ = run(["exp1", "--config", str(cfg), "--seed", "4", "--output-dir", str(out_dir)], capsys)
        assert code == 0
        manifest = (out_dir / "manifest.txt").read_text()
        assert "seed = 4" in manifest and "n_max = 5" in manifest

    @pytest.mark.parametrize("extra", [
        ["--norm", "bogus"],
        ["--norm", "diag:nope"],
        ["--norm", "lyapunov@0.5"],
        ["--epsilon", "-1"],
    ])
    def test_usage_errors(self, tmp_path, extra, capsys):
        assert run(["exp1", "--output-dir", str(tmp_path), *FAST, *extra], capsys)[0] == 2

    def test_bad_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = blue\n")
        assert run(["exp1", "--config", str(cfg), "--output-dir", str(tmp_path)], capsys)[0] == 2

    def test_euclidean_not_contractive(self, tmp_path, capsys):
        code, _, err = run(["exp1", "--output-dir", str(tmp_path), "--norm", "euclidean", *FAST], capsys)
        assert code == 2 and "norm" in err
