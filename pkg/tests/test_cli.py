import pytest

from tropabp.cli import main
from tropabp.io import read_object


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_perm(capsys):
    code, out, _ = run(capsys, "gen", "perm", "--n", "2")
    assert code == 0
    assert len(read_object(out)) == 2


def test_biv2w2_pipeline(tmp_path, capsys):
    f = tmp_path / "f.poly"
    f.write_text("poly mode=rplus vars=x,y : x^3 ; x*y ; y^2\n")
    out = tmp_path / "out.abp"
    code, _, err = run(capsys, "transform", "--pass=biv2w2", str(f), "-o", str(out), "--dot", str(tmp_path / "o.dot"))
    assert code == 0 and "ok=1" in err
    assert (tmp_path / "o.dot").read_text().startswith("digraph")
    code, text, _ = run(capsys, "verify-equal", str(out), str(f))
    assert code == 0 and "equal=1" in text


def test_widthreduce_pipeline(tmp_path, capsys):
    a = tmp_path / "a.abp"
    a.write_text(
        "abp mode=r vars=2 kind=weakest layers=1,4,1\n"
        + "".join(f"edge L=0 f=0 t={j} label=const:{j}\nedge L=1 f={j} t=0 label=var:{j % 2}\n" for j in range(4))
    )
    out = tmp_path / "w.abp"
    code, _, err = run(capsys, "transform", "--pass=widthreduce:p=1", str(a), "-o", str(out), "--check")
    assert code == 0 and "out.width=3" in err
    assert read_object(out.read_text()).width == 3
    code, text, _ = run(capsys, "verify-equal", str(out), str(a))
    assert code == 0


def test_verify_failure_exit(tmp_path, capsys):
    (tmp_path / "a.poly").write_text("poly mode=r vars=x,y : x*y ; x^2\n")
    (tmp_path / "b.poly").write_text("poly mode=r vars=x,y : x*y\n")
    code, text, _ = run(capsys, "verify-equal", str(tmp_path / "a.poly"), str(tmp_path / "b.poly"))
    assert code == 1 and "equal=0" in text and "witness=" in text


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.c"
    bad.write_text("circuit mode=r vars=1\nnode 0 leaf var=0\nnode 1 gate op=max l=0 r=0\nroot 1\n")
    code, _, err = run(capsys, "eval", str(bad), "--at", "1")
    assert code == 2 and "line 3" in err


def test_budget_exit(capsys):
    code, _, err = run(capsys, "gen", "perm", "--n", "9")
    assert code == 3 and "budget" in err


def test_usage_exit(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "transform", "--pass=nope", "x")[0] == 2


def test_eval_and_hyper_eval(tmp_path, capsys):
    h = tmp_path / "p.hyp"
    assert run(capsys, "encode", "perm", "--n", "2", "-o", str(h))[0] == 0
    code, out, _ = run(capsys, "hyper-eval", str(h), "--at", "1,2,3,4", "--at", "0,inf,inf,0")
    assert code == 0 and out.split() == ["5", "0"]
    code, out, _ = run(capsys, "expand", str(h))
    assert code == 0 and "x0*x3" in out and "x1*x2" in out


def test_encode_md_pipeline(tmp_path, capsys):
    c = tmp_path / "c.circ"
    assert run(capsys, "gen", "md", "--vars", "2", "--size", "8", "--seed", "4", "-o", str(c))[0] == 0
    for kind in ("vnf", "width2", "linear"):
        h = tmp_path / f"{kind}.hyp"
        assert run(capsys, "encode", kind, str(c), "-o", str(h))[0] == 0
        _, a, _ = run(capsys, "eval", str(h), "--at", "2,3", "--engine", "factored")
        _, b, _ = run(capsys, "eval", str(c), "--at", "2,3")
        assert a == b


def test_survey_archive(tmp_path, capsys):
    d = tmp_path / "arch"
    code, out, _ = run(capsys, "survey", "--target", "inner2", "--samples", "3000", "--seed", "2", "--archive", str(d))
    assert code == 0 and "seed=2" in out
    files = sorted(p.name for p in d.iterdir())
    assert files and all(read_object((d / n).read_text()).width <= 2 for n in files)


def test_dot_subcommand(tmp_path, capsys):
    a = tmp_path / "a.abp"
    run(capsys, "gen", "abp", "--vars", "2", "-o", str(a))
    code, out, _ = run(capsys, "dot", str(a))
    assert code == 0 and out.startswith("digraph")


@pytest.mark.parametrize("pass_name,family,extra", [
    ("brent", "formula", ["--mode", "rplus", "--size", "40"]),
    ("alt2abp", "alternating", ["--p", "2", "--size", "40"]),
    ("factor", "poly", ["--mode", "r", "--vars", "1"]),
    ("uni2w2", "poly", ["--mode", "r", "--vars", "1"]),
])
def test_transform_outputs_verify(tmp_path, capsys, pass_name, family, extra):
    src = tmp_path / "in.txt"
    assert run(capsys, "gen", family, *extra, "--seed", "7", "-o", str(src))[0] == 0
    out = tmp_path / "out.txt"
    code, _, err = run(capsys, "transform", f"--pass={pass_name}", str(src), "-o", str(out), "--check")
    assert code == 0, err
    assert run(capsys, "verify-equal", str(out), str(src))[0] == 0


def test_expand_canonicalizes_polynomial_input(tmp_path, capsys):
    f = tmp_path / "f.poly"
    f.write_text("poly mode=rplus vars=x,y : 2*x^2*y ; y ; 0\n")
    code, out, _ = run(capsys, "expand", str(f))
    assert code == 0
    assert read_object(out).terms == {(0, 0): 0}
