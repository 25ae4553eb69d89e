import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from varcalc.cli import run_cli
from varcalc.fixtures import FIXTURES

SCHEMA = json.loads(resources.files("varcalc").joinpath("report.schema.json").read_text())


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, report = run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue(), report


def run_json(*argv):
    code, out, err, _ = run(*argv, "--json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["exit_code"] == code
    return code, report


def fixture_args(name):
    fx = FIXTURES[name]
    return ["--dims", fx.dims, "--fields", fx.fields, "--op", fx.op]


class TestFixtures:
    def test_kdv1(self):
        code, rep = run_json("is-hamiltonian", *fixture_args("kdv1"))
        assert code == 0 and rep["verdicts"]["is_hamiltonian"] is True
        assert rep["verdicts"]["skew_taken"] is True
        assert rep["residuals"]["nf"] == "0"

    def test_kdv2_graded_and_classical(self):
        code, rep = run_json("is-hamiltonian", *fixture_args("kdv2"))
        assert rep["verdicts"]["is_hamiltonian"] is False
        assert rep["residuals"]["nf"] == "1/3*theta()*xi^xi_1^xi_3"
        code, rep = run_json("is-hamiltonian", *fixture_args("kdv2"), "--mode", "classical")
        assert rep["verdicts"]["is_hamiltonian"] is True
        assert rep["result"]["variational_derivatives"] == {}

    def test_euler2d(self):
        code, rep = run_json("is-hamiltonian", *fixture_args("euler2d"))
        assert code == 0 and rep["verdicts"]["is_hamiltonian"] is True

    def test_sn_self_takes_skew_part(self):
        code, rep = run_json("sn-self", *fixture_args("kdv2"))
        assert code == 0 and rep["verdicts"]["skew_taken"] is True
        assert rep["residuals"]["nf"] == "1/3*theta()*xi^xi_1^xi_3"


class TestCommands:
    k1 = ["--dims", "x", "--fields", "u", "--op", "theta()*D[x] + 1/2*theta(1)"]

    def test_adjoint(self):
        code, out, _, _ = run("adjoint", "--dims", "x", "--fields", "u", "--op", "theta()*D[x]")
        assert code == 0 and "adjoint: -theta()*D[x] - theta(1)" in out

    def test_skew(self):
        code, rep = run_json("skew", "--dims", "x", "--fields", "u", "--op", "theta()*D[x]")
        assert rep["result"]["skew"] == "theta()*D[x] + 1/2*theta(1)"
        assert rep["verdicts"]["was_skew"] is False

    def test_bracket(self):
        code, rep = run_json("bracket", *self.k1, "--f", "theta()*u", "--g", "theta()*u^2/2")
        assert rep["result"]["bracket"] == "1/2*theta()*u_x"

    def test_bracket_methods(self):
        args = ["bracket", *self.k1, "--f", "theta()*u*u_x^2", "--g", "theta()*u^3"]
        _, a = run_json(*args, "--method", "euler")
        _, b = run_json(*args, "--method", "frechet")
        assert a["result"]["bracket"] == b["result"]["bracket"]

    def test_jacobi(self):
        code, rep = run_json("jacobi", *self.k1, "--f", "theta()*u^2", "--g", "theta()*u_x^2", "--h", "theta()*u^3")
        assert code == 0 and rep["verdicts"]["jacobi_holds"] is True

    def test_hamvec(self):
        code, rep = run_json("hamvec", *self.k1, "--h", "theta()*u^2/2")
        assert rep["result"]["hamiltonian_vector_field"] == "theta()*u_x*xi + 1/2*theta(1)*u*xi"

    def test_euler_and_frechet(self):
        code, out, _, _ = run("euler", "--dims", "x", "--fields", "u", "--density", "theta()*u*u_xx")
        assert code == 0 and "2*u_xx" in out and "canonical_differential: 2*theta()*u_xx*d[u]" in out
        code, rep = run_json("frechet", "--dims", "x", "--fields", "u", "--density", "theta()*u*u_xx")
        assert rep["result"]["differential"] == "theta()*u_xx*d[u] + theta()*u*d[u]_2"

    def test_nf(self):
        code, rep = run_json("nf", "--dims", "x", "--fields", "u", "--density", "theta(1)*u")
        assert rep["result"]["nf"] == "-theta()*u_x"
        code, rep = run_json("nf", "--dims", "x", "--fields", "u", "--density", "theta(1)*xi^xi_2^xi_1")
        assert rep["result"]["nf"] == "theta()*xi^xi_1^xi_3"

    def test_seed_and_timing(self):
        _, rep = run_json("nf", "--dims", "x", "--fields", "u", "--density", "theta()*u", "--seed", "7")
        assert rep["seed"] == "7" and float(rep["timing"]["seconds"]) >= 0


class TestExitCodes:
    def test_parse_error(self):
        code, _, err, rep = run("nf", "--dims", "x", "--fields", "u", "--density", "theta()*u $")
        assert code == 2 and "line 1, column 11" in err

    def test_parse_error_json(self):
        code, rep = run_json("nf", "--dims", "x", "--fields", "u", "--density", "u")
        assert code == 2 and rep["error"]

    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["nf", "--dims", "x", "--fields", "u"],
        ["nf", "--dims", "x", "--fields", "u", "--density", "theta()*u", "--op", "theta()*D[x]"],
        ["nf", "--dims", "x", "--fields", "x", "--density", "theta()*u"],
        ["is-hamiltonian", "--dims", "x", "--fields", "u", "--op", "theta()*D[x]", "--mode", "other"],
    ])
    def test_usage(self, argv):
        assert run(*argv)[0] == 2

    def test_precondition(self):
        code, _, err, _ = run("bracket", "--dims", "x", "--fields", "u", "--op", "theta()*D[x]",
                              "--f", "theta()*u", "--g", "theta()*u^2")
        assert code == 3 and "skew" in err

    def test_internal(self, monkeypatch):
        import varcalc.cli as cli
        monkeypatch.setattr(cli, "adjoint", lambda op: op + op)
        code, _, err, _ = run("adjoint", "--dims", "x", "--fields", "u", "--op", "theta()*u*D[x]")
        assert code == 4 and "invariant" in err

    def test_version(self, capsys):
        assert run("--version")[0] == 0
        assert "varcalc" in capsys.readouterr().out


def test_module_entry_point():
    fx = FIXTURES["kdv2"]
    p = subprocess.run([sys.executable, "-m", "varcalc", "is-hamiltonian", "--dims", fx.dims,
                        "--fields", fx.fields, "--op", fx.op, "--json"], capture_output=True, text=True)
    assert p.returncode == 0
    jsonschema.validate(json.loads(p.stdout), SCHEMA)
