import os
import subprocess
import sys
from fractions import Fraction

import pytest

from borelh.bcx import format_rational, parse_bcx, parse_rational, serialize_bcx
from borelh.cli import build_expression, main
from borelh.corpus import constructor_corpus, fuzz_corpus
from borelh.errors import BcxSyntaxError, ValidationError
from borelh.hinv import prime_profile
from borelh.tcomplex import sphere, xab

HEADER = "bcx 1 koszul-left\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_sphere00_round_trip():
    text = serialize_bcx(sphere(0, 0))
    assert text == HEADER + "meta name sphere(0,0)\ngenerator t tower 0\n"
    doc = parse_bcx(text)
    assert doc.complex == sphere(0, 0) and serialize_bcx(doc.complex) == text


def test_round_trip_keeps_report():
    x = xab(0, 1, 2, 3)
    doc = parse_bcx(serialize_bcx(x, Fraction(3, 4)))
    assert doc.complex == x and doc.n == Fraction(3, 4)
    assert prime_profile(doc.complex) == prime_profile(x)


@pytest.mark.parametrize("c", constructor_corpus() + fuzz_corpus(count=40), ids=lambda c: c.name)
def test_parse_serialize_identity(c):
    text = serialize_bcx(c)
    assert parse_bcx(text).complex == c
    assert serialize_bcx(parse_bcx(text).complex) == text


@pytest.mark.parametrize(
    "body, line, fragment",
    [
        ("generator t tower 0\ngenerator x free 1\ndiff x t 1\n", 4, "free-to-tower forbidden"),
        ("generator t tower 0\ngenerator x free 2\ndiff t x 1\n", 4, "parity"),
        ("generator t tower 0\ngenerator t free 1\n", 3, "duplicate"),
        ("generator t tower 0\ndiff t z 1\n", 3, "unknown generator"),
        ("generator t tower 0\ngenerator x free 1\ndiff t x 0\n", 4, "zero coefficient"),
        ("generator t tower zero\n", 2, "integer"),
        ("generator t cube 0\n", 2, "kind"),
        ("meta n 0.75\n", 2, "exact rational"),
        ("meta colour red\n", 2, "unknown meta"),
        ("frobnicate\n", 2, "unknown directive"),
    ],
)
def test_syntax_errors_carry_line_numbers(body, line, fragment):
    with pytest.raises(BcxSyntaxError) as exc:
        parse_bcx(HEADER + body)
    assert exc.value.line == line
    assert fragment in str(exc.value)
    assert exc.value.exit_code == 4


def test_header_and_comments():
    with pytest.raises(BcxSyntaxError):
        parse_bcx("generator t tower 0\n")
    with pytest.raises(BcxSyntaxError):
        parse_bcx("bcx 2 koszul-left\n")
    doc = parse_bcx("# a point\n" + HEADER + "generator t tower 0  # the fixed point\n")
    assert doc.complex.ell == 0


def test_validation_error_after_parse():
    with pytest.raises(ValidationError):
        parse_bcx(HEADER + "generator t tower 0\ngenerator s tower 2\n")


def test_rationals():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == -2
    assert format_rational(Fraction(6, 8)) == "3/4" and format_rational(2) == "2"
    for bad in ("0.75", "1/0", "x"):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_build_expression():
    c = build_expression("attach(wedge(sphere(0,1), free(2)), 2, y1=2, xf=3)")
    assert prime_profile(c).z == (1, 2)
    assert build_expression("suspend(xab(0,1,2,3), 0, 1)").ell == 0


def test_build_command(capsys):
    code, out, _ = run(capsys, "build", "xab(0,1,2,3)", "--n", "3/4")
    assert code == 0 and out.startswith(HEADER) and "meta n 3/4\n" in out
    assert parse_bcx(out).complex == xab(0, 1, 2, 3)


def test_hinv_command(capsys, tmp_path):
    path = write(tmp_path, "x.bcx", serialize_bcx(xab(0, 1, 2, 3)))
    code, out, _ = run(capsys, "hinv", path, "--ring", "f:3")
    assert code == 0 and out.splitlines()[-1] == "f:3\t2\t2"
    code, out, _ = run(capsys, "hinv", path)
    lines = out.splitlines()
    assert "z\t1\t2" in lines and "exceptional_primes\t{3}" in lines


def test_hinv_manifold(capsys):
    code, out, _ = run(capsys, "hinv", "sphere(0,2)", "--manifold", "n=3/4")
    assert code == 0
    assert "f:2\t5/4\t5/4" in out.splitlines()
    code, out, _ = run(capsys, "hinv", "xab(0,1,2,3)", "--manifold", "n=0")
    assert "d\t2" in out.splitlines() and "Fr\t2" in out.splitlines()


def test_hinv_uses_meta_n(capsys, tmp_path):
    path = write(tmp_path, "s.bcx", serialize_bcx(sphere(0, 1), Fraction(1, 2)))
    code, out, _ = run(capsys, "hinv", path)
    assert code == 0 and "n\t1/2" in out.splitlines()


def test_cohomology_command(capsys):
    code, out, _ = run(capsys, "cohomology", "sphere(0,1)")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "degree\tH (z)"
    assert "2\tZ" in lines and "1\t0" in lines
    assert "1\t2\tZ" in lines  # k = 1, degree 2, surjective
    code, out, _ = run(capsys, "cohomology", "xab(0,1,2,3)", "--ring", "f:3", "--max-degree", "9")
    assert code == 0 and "9\t0" in out.splitlines()


def test_max_degree_below_bound(capsys):
    code, _, err = run(capsys, "cohomology", "xab(0,1,2,3)", "--max-degree", "5")
    assert code == 13 and "d_max + 3" in err


def test_structural_commands(capsys, tmp_path):
    a = write(tmp_path, "a.bcx", serialize_bcx(sphere(0, 1)))
    code, out, _ = run(capsys, "smash", a, "sphere(1,1)")
    assert code == 0 and parse_bcx(out).complex.ell == 1
    code, out, _ = run(capsys, "wedge", a, "free(2)")
    assert code == 0 and len(parse_bcx(out).complex.generators) == 5
    code, out, _ = run(capsys, "suspend", a, "--l", "1", "--m", "2")
    assert code == 0 and parse_bcx(out).complex.ell == 1
    w = write(tmp_path, "w.bcx", serialize_bcx(build_expression("wedge(sphere(0,1), free(2))")))
    code, out, _ = run(capsys, "attach", w, "--dim", "2", "--coeff", "y1=2", "--coeff", "xf=3")
    assert code == 0
    assert prime_profile(parse_bcx(out).complex).exceptional_primes == {3}


def test_dual_command(capsys):
    code, out, _ = run(capsys, "dual", "xab(0,1,2,3)")
    lines = out.splitlines()
    assert code == 0 and "z\t1\t1" in lines and "f:3\t2\t2" in lines
    assert any(line.startswith("PASS\tchain[z]") for line in lines)


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "stability,additivity,strictness")
    assert code == 0 and out.splitlines()[-1].startswith("summary\t")
    assert "FAIL" not in out


def test_verify_full_corpus_reports_max_p_failure(capsys):
    code, out, _ = run(capsys, "verify")
    fails = [line for line in out.splitlines() if line.startswith("FAIL")]
    assert code == 1
    assert [f.split("\t")[1] for f in fails] == ["max-p[xab(0,1,6,4)]"]


def test_verify_inputs(capsys, tmp_path):
    a = write(tmp_path, "a.bcx", serialize_bcx(xab(0, 1, 2, 3)))
    code, out, _ = run(capsys, "verify", a, "--suite", "stability,localization,uct")
    assert code == 0 and "PASS\tlocalization[xab(0,1,2,3)]" in out


@pytest.mark.parametrize(
    "argv, code",
    [
        (["hinv", "sphere(0,1)", "--ring", "f:4"], 3),
        (["verify", "--suite", "bogus"], 8),
        (["wedge", "sphere(0,1)", "sphere(0,2)"], 6),
        (["attach", "sphere(2,1)", "--dim", "3", "--coeff", "x1=1"], 7),
        (["build", "xab(0,0,1,1)"], 8),
        (["build", "open('x')"], 8),
        (["hinv", "/nonexistent/file.bcx"], 74),
        (["hinv", "--manifold", "n=0.5", "sphere(0,1)"], 8),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code and out == ""
    assert err.startswith("borelh: error: ") and err.count("\n") == 1


def test_exit_codes_for_bad_files(capsys, tmp_path):
    bad = write(tmp_path, "bad.bcx", HEADER + "generator t tower 0\ngenerator x free 1\ndiff x t 1\n")
    code, _, err = run(capsys, "hinv", bad)
    assert code == 4 and "line 4" in err
    invalid = write(tmp_path, "inv.bcx", HEADER + "generator t tower 0\ngenerator s tower 2\n")
    assert run(capsys, "hinv", invalid)[0] == 5


def test_output_flag(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, out, _ = run(capsys, "--output", str(target), "hinv", "xab(0,1,2,3)")
    assert code == 0 and out == ""
    assert "exceptional_primes\t{3}" in target.read_text()


def test_stdin_input(tmp_path):
    text = serialize_bcx(xab(0, 1, 2, 3))
    res = subprocess.run(
        [sys.executable, "-m", "borelh.cli", "hinv", "-", "--ring", "f:3"],
        input=text, capture_output=True, text=True, check=True,
    )
    assert res.stdout.splitlines()[-1] == "f:3\t2\t2"


def test_output_is_deterministic():
    cmd = [sys.executable, "-m", "borelh.cli", "hinv", "smash(xab(0,1,2,3),xab(0,1,2,5))"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True, env={**os.environ, "PYTHONHASHSEED": "123"}).stdout
    assert first == second and first
