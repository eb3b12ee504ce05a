# instanton/test/test_cli.py
import json

import pytest

from instanton.cli.serialization import dump_hyperweb, load_hyperweb, parse_hyperweb
from instanton.cli.transforms import parse_tau_spec
from instanton.core.exceptions import FileFormatError, ParameterError, PrimeMismatch
from instanton.main import run
from instanton.services.construct import sample_invertible
from instanton.services.hyperweb import Hyperweb
from instanton.services.ledger import list_runs
from instanton.core.database import init_db


def sample_file(tmp_path, name, *extra):
    path = tmp_path / name
    code = run(["sample", *extra, "--trials", "20", "--out", str(path), "--report", str(tmp_path / f"{name}.report")])
    return code, path


def read_report(capsys):
    return json.loads(capsys.readouterr().out)


class TestHyperwebFiles:
    """Serialization of hyperwebs"""

    def test_roundtrip(self, field):
        """Parsing a dumped hyperweb returns it unchanged"""
        A = sample_invertible(field, 3, 5)
        assert parse_hyperweb(dump_hyperweb(A), field) == A

    def test_equal_hyperwebs_serialize_identically(self, field):
        """Equal hyperwebs give byte-identical files"""
        A = sample_invertible(field, 2, 6)
        assert dump_hyperweb(A) == dump_hyperweb(Hyperweb.from_matrix(field, A.matrix))

    def test_zero_coefficients_omitted(self, field):
        """Zero coefficients are not written"""
        data = json.loads(dump_hyperweb(Hyperweb.zero(field, 2)))
        assert data["coeffs"] == []
        assert data["charge"] == 2

    def test_malformed_json(self, field):
        """Malformed JSON is a file error"""
        with pytest.raises(FileFormatError):
            parse_hyperweb("{not json", field)

    def test_prime_mismatch(self, field):
        """Files over another prime are rejected"""
        text = json.dumps({"format_version": "1", "prime": 10007, "ext_degree": 1, "charge": 1, "coeffs": []})
        with pytest.raises(PrimeMismatch):
            parse_hyperweb(text, field)

    @pytest.mark.parametrize("entry,fragment", [
        ({"i": 1, "j": 0, "a": 0, "b": 1, "value": "3"}, "coeffs.0"),
        ({"i": 0, "j": 0, "a": 2, "b": 1, "value": "3"}, "coeffs.0"),
        ({"i": 0, "j": 0, "a": 0, "b": 1, "value": "-3"}, "coeffs.0.value"),
        ({"i": 0, "j": 5, "a": 0, "b": 1, "value": "3"}, "coeffs.0"),
    ])
    def test_bad_entries_report_location(self, field, entry, fragment):
        """Bad entries name their field path"""
        text = json.dumps({"format_version": "1", "prime": field.p, "charge": 2, "coeffs": [entry]})
        with pytest.raises(FileFormatError) as exc_info:
            parse_hyperweb(text, field)
        assert fragment in str(exc_info.value)

    def test_non_canonical_order(self, field):
        """Entries must follow canonical order"""
        coeffs = [{"i": 0, "j": 1, "a": 0, "b": 1, "value": "1"}, {"i": 0, "j": 0, "a": 0, "b": 1, "value": "1"}]
        text = json.dumps({"format_version": "1", "prime": field.p, "charge": 2, "coeffs": coeffs})
        with pytest.raises(FileFormatError):
            parse_hyperweb(text, field)

    def test_value_not_reduced(self, field):
        """Values must be reduced residues"""
        coeffs = [{"i": 0, "j": 0, "a": 0, "b": 1, "value": str(field.p)}]
        text = json.dumps({"format_version": "1", "prime": field.p, "charge": 1, "coeffs": coeffs})
        with pytest.raises(FileFormatError):
            parse_hyperweb(text, field)

    def test_missing_file(self, field, tmp_path):
        """A missing file is a file error"""
        with pytest.raises(FileFormatError):
            load_hyperweb(str(tmp_path / "absent.json"), field)


class TestTauSpec:
    """--tau-spec parsing"""

    def test_coords(self, field):
        """coords picks coordinate columns"""
        tau = parse_tau_spec("coords:0,2", field, 3)
        assert tau.shape == (3, 2)
        assert tau[2, 1] == 1

    def test_matrix(self, field):
        """matrix reads rows separated by semicolons"""
        tau = parse_tau_spec("matrix:1,0;0,1;1,1", field, 3)
        assert tau.tolist() == [[1, 0], [0, 1], [1, 1]]

    def test_random(self, field):
        """random draws an injection of the given size"""
        assert parse_tau_spec("random:2:4", field, 3).shape == (3, 2)

    @pytest.mark.parametrize("spec", ["coords:0,7", "matrix:1,0;0", "shuffle:1", "random:x"])
    def test_invalid(self, field, spec):
        """Malformed --tau-spec values are usage errors"""
        with pytest.raises(ParameterError):
            parse_tau_spec(spec, field, 3)


class TestSampleCommand:
    """instanton sample"""

    def test_invertible_sample(self, tmp_path):
        """Invertible samples pass and record their seed"""
        code, path = sample_file(tmp_path, "a.json", "--n", "3", "--r", "3", "--strategy", "invertible", "--seed", "7")
        assert code == 0
        report = json.loads((tmp_path / "a.json.report").read_text())
        assert report["verdict"] == "pass"
        assert report["provenance"]["seed"] == 7
        assert report["report"]["membership"]["overall"]

    def test_charge_one_has_six_coefficients(self, tmp_path):
        """A generic charge-1 sample has all six coefficients"""
        code, path = sample_file(tmp_path, "one.json", "--n", "1", "--r", "1", "--strategy", "invertible", "--seed", "2")
        assert code == 0
        data = json.loads(path.read_text())
        assert data["charge"] == 1
        assert len(data["coeffs"]) == 6

    def test_vacuous_sample_has_charge_four(self, tmp_path):
        """sample --n 3 --r 2 --strategy vacuous writes a charge-4 file"""
        code, path = sample_file(tmp_path, "v.json", "--n", "3", "--r", "2", "--strategy", "vacuous", "--seed", "1")
        assert code == 0
        assert json.loads(path.read_text())["charge"] == 4

    def test_same_seed_same_bytes(self, tmp_path):
        """Equal seeds give byte-identical files and reports"""
        sample_file(tmp_path, "x.json", "--n", "2", "--r", "1", "--strategy", "vacuous", "--seed", "3")
        sample_file(tmp_path, "y.json", "--n", "2", "--r", "1", "--strategy", "vacuous", "--seed", "3")
        assert (tmp_path / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()
        assert (tmp_path / "x.json.report").read_bytes() == (tmp_path / "y.json.report").read_bytes()

    def test_tau_restrict_sample(self, tmp_path):
        """tau-restrict samples have charge 2n - r"""
        code, path = sample_file(tmp_path, "t.json", "--n", "2", "--r", "2", "--strategy", "tau-restrict", "--seed", "4")
        assert code == 0
        assert json.loads(path.read_text())["charge"] == 2

    def test_vacuous_needs_r(self, tmp_path):
        """The vacuous strategy needs --r"""
        code, _ = sample_file(tmp_path, "bad.json", "--n", "2", "--strategy", "vacuous")
        assert code == 2

    def test_bad_prime(self, tmp_path):
        """A composite --prime is a usage error"""
        code, _ = sample_file(tmp_path, "p.json", "--n", "1", "--prime", "15")
        assert code == 2

    def test_unknown_strategy_is_usage_error(self):
        """argparse rejects unknown strategies with status 2"""
        with pytest.raises(SystemExit) as exc_info:
            run(["sample", "--n", "2", "--strategy", "guess"])
        assert exc_info.value.code == 2


class TestAnalysisCommands:
    """verify, cohomology, tangent, star, diagram, nondeg, dims"""

    @pytest.fixture
    def charge_four(self, tmp_path):
        code, path = sample_file(tmp_path, "c4.json", "--n", "3", "--r", "2", "--strategy", "vacuous", "--seed", "1")
        assert code == 0
        return path

    @pytest.fixture
    def invertible_two(self, tmp_path):
        code, path = sample_file(tmp_path, "i2.json", "--n", "2", "--strategy", "invertible", "--seed", "8")
        assert code == 0
        return path

    def test_verify_pass(self, charge_four, capsys):
        """verify infers r from the rank"""
        assert run(["verify", str(charge_four), "--trials", "20"]) == 0
        report = read_report(capsys)
        assert report["report"]["membership"]["r"] == 2

    def test_verify_fail_with_wrong_r(self, invertible_two, capsys):
        """A wrong --r fails"""
        assert run(["verify", str(invertible_two), "--r", "1", "--trials", "5"]) == 1
        assert read_report(capsys)["verdict"] == "fail"

    def test_verify_bad_extension_degree(self, invertible_two):
        """--ext beyond the maximum is a usage error"""
        assert run(["verify", str(invertible_two), "--ext", "9"]) == 2

    def test_verify_zero_hyperweb_fails_rank_condition(self, field, tmp_path, capsys):
        """A zero hyperweb fails condition (i) with exit status 1 and a report"""
        path = tmp_path / "zero.json"
        path.write_text(json.dumps({"format_version": "1", "prime": field.p, "charge": 2, "coeffs": []}))
        assert run(["verify", str(path), "--trials", "5"]) == 1
        report = read_report(capsys)
        assert report["verdict"] == "fail"
        membership = report["report"]["membership"]
        assert membership["condition_i"]["rank_found"] == 0
        assert not membership["condition_i"]["passed"]
        assert not membership["overall"]

    def test_verify_uses_file_extension_degree(self, tmp_path, capsys):
        """Without --ext the degree recorded in the file is used"""
        code, path = sample_file(tmp_path, "e.json", "--n", "1", "--strategy", "invertible", "--seed", "3", "--ext", "2")
        assert code == 0
        assert json.loads(path.read_text())["ext_degree"] == 2
        assert run(["verify", str(path), "--trials", "5"]) == 0
        report = read_report(capsys)
        assert report["provenance"]["parameters"]["ext"] == 2
        assert report["report"]["membership"]["condition_ii"]["ext_degree"] == 2

    def test_file_extension_degree_above_maximum(self, field, tmp_path):
        """ext_degree beyond MAX_EXT_DEGREE is a file error"""
        path = tmp_path / "deep.json"
        path.write_text(json.dumps({"format_version": "1", "prime": field.p, "ext_degree": 9, "charge": 1,
                                    "coeffs": []}))
        assert run(["verify", str(path)]) == 2

    def test_verify_malformed_file(self, tmp_path):
        """Schema errors exit with status 2"""
        path = tmp_path / "broken.json"
        path.write_text('{"format_version": "1", "prime": 2147483629, "charge": "two"}')
        assert run(["verify", str(path)]) == 2

    def test_verify_prime_mismatch(self, tmp_path):
        """Prime mismatches exit with status 2"""
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"format_version": "1", "prime": 10007, "charge": 1, "coeffs": []}))
        assert run(["verify", str(path)]) == 2

    def test_cohomology_table(self, charge_four, capsys):
        """h^1(E(-1)) = N and h^1(E) = 2N - 2r for a charge-4 file"""
        assert run(["cohomology", str(charge_four), "--tmin", "-4", "--tmax", "1"]) == 0
        table = read_report(capsys)["report"]["cohomology"]
        assert table["h"][1][table["twists"].index(-1)] == 4
        assert table["h"][1][table["twists"].index(0)] == 4

    def test_cohomology_of_invertible_file(self, invertible_two, capsys):
        """Invertible files report h^1(E (x) Omega) and the cokernel route"""
        assert run(["cohomology", str(invertible_two), "--tmin", "0", "--tmax", "1"]) == 0
        report = read_report(capsys)["report"]
        assert report["h1_tensor_omega"] == 8
        assert report["cokernel_route"]["h0_twist1"] == 10
        assert report["cohomology"]["h"][0] == [0, 10]

    def test_cohomology_empty_range(self, invertible_two):
        """tmin above tmax is a usage error"""
        assert run(["cohomology", str(invertible_two), "--tmin", "1", "--tmax", "0"]) == 2

    def test_tangent(self, charge_four, capsys):
        """Charge-4 tangent meets the bound 54"""
        assert run(["tangent", str(charge_four)]) == 0
        dims = read_report(capsys)["report"]["dimensions"]
        assert dims["expected_MI"] == 54
        assert dims["measured_tangent"] >= 54

    def test_star(self, charge_four, capsys):
        """star finds a witness for a vacuous assembly"""
        assert run(["star", str(charge_four), "--n", "3"]) == 0
        assert read_report(capsys)["report"]["certificate"]["found"]

    def test_star_out_of_range(self, charge_four):
        """n outside the admissible range is a usage error"""
        assert run(["star", str(charge_four), "--n", "1"]) == 2

    def test_diagram(self, charge_four, capsys):
        """diagram passes on a vacuous assembly"""
        assert run(["diagram", str(charge_four), "--n", "3"]) == 0
        assert read_report(capsys)["report"]["diagram"]["passed"]

    def test_nondeg(self, tmp_path, capsys):
        """nondeg sees no degenerate blocks"""
        code, path = sample_file(tmp_path, "d.json", "--n", "4", "--strategy", "invertible", "--seed", "9")
        assert code == 0
        assert run(["nondeg", str(path), "--r", "2", "--trials", "5"]) == 0
        assert read_report(capsys)["report"]["statistics"]["degenerate"] == 0

    def test_dims(self, capsys):
        """dims reports expected dimensions and the chain"""
        assert run(["dims", "--charge", "4", "--r", "2"]) == 0
        report = read_report(capsys)["report"]
        assert report["dimensions"]["expected_I"] == 38
        assert report["chain"]["chain_consistent"]

    def test_report_written_to_file(self, tmp_path, capsys):
        """--report writes the file instead of stdout"""
        target = tmp_path / "reports" / "dims.json"
        assert run(["dims", "--charge", "3", "--r", "1", "--report", str(target)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text())["kind"] == "dims"


class TestTransformCommands:
    """gl and restrict"""

    def test_gl_preserves_verdict(self, tmp_path, capsys):
        """gl keeps the membership verdict"""
        code, path = sample_file(tmp_path, "g.json", "--n", "2", "--r", "1", "--strategy", "vacuous", "--seed", "5")
        assert code == 0
        moved = tmp_path / "moved.json"
        assert run(["gl", str(path), "--seed", "11", "--out", str(moved)]) == 0
        capsys.readouterr()
        assert run(["verify", str(path), "--trials", "10"]) == 0
        original = read_report(capsys)["report"]["membership"]
        assert run(["verify", str(moved), "--trials", "10"]) == 0
        transformed = read_report(capsys)["report"]["membership"]
        assert original["overall"] == transformed["overall"]
        assert original["condition_i"] == transformed["condition_i"]

    def test_restrict_to_coordinates(self, tmp_path, capsys):
        """restrict lowers the charge"""
        code, path = sample_file(tmp_path, "r.json", "--n", "2", "--r", "1", "--strategy", "vacuous", "--seed", "6")
        assert code == 0
        assert run(["restrict", str(path), "--tau-spec", "coords:0,1"]) == 0
        report = read_report(capsys)
        assert report["report"]["hyperweb"]["charge"] == 2


class TestRunLedger:
    """--record and history"""

    def test_recorded_run_is_listed(self, capsys):
        """--record stores the run in the ledger"""
        assert run(["--record", "dims", "--charge", "2", "--r", "1"]) == 0
        capsys.readouterr()
        init_db()
        runs = list_runs(command="dims")
        assert runs
        assert runs[0].verdict == "pass"
        assert runs[0].exit_code == 0

    def test_history_command(self, capsys):
        """history --only filters by command"""
        run(["--record", "dims", "--charge", "2", "--r", "2"])
        capsys.readouterr()
        assert run(["history", "--only", "dims", "--limit", "5"]) == 0
        listed = json.loads(capsys.readouterr().out)
        assert listed and all(entry["command"] == "dims" for entry in listed)
