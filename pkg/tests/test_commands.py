import json

import pytest

from subtensor_rank import cli, configure_logging, get_initialization_status
from subtensor_rank.commands import (
    ExperimentConfig,
    bounds,
    bridge,
    complement_scan,
    counting_check,
    decompose,
    find_equation,
    hchain,
    nullcone,
    rank,
    subtensor_scan,
    verify_report,
)
from subtensor_rank.errors import ParseError
from subtensor_rank.exact_algebra import gf
from subtensor_rank.tensor_core import Tensor, diagonal_tensor


def write_tensor(path, T: Tensor) -> str:
    path.write_text(json.dumps(T.to_json()))
    return str(path)


def test_bounds_for_order_three():
    response = bounds(ExperimentConfig(command="bounds", d=3, r=1, m=2))
    assert response["status"] == "success" and response["exit_code"] == 0
    body = response["report"]["result"]
    assert (body["F"], body["G"], body["D"]) == (2**36, 2**108, 3)
    assert body["d3_degree"] == {"k": 2, "m": 8}
    assert body["chain_bound"] == {"m": 2, "k": 0, "value": 6}
    assert response["message"] == f"F = {2**36}, G = {2**108}"


def test_bounds_needs_d_and_r():
    response = bounds(ExperimentConfig(command="bounds", d=3))
    assert response["status"] == "error"
    assert response["error_type"] == "ParseError"
    assert response["exit_code"] == 2


def test_counting_check_reports_exact_dimensions():
    response = counting_check(ExperimentConfig(command="counting-check", d=2, r=1, m=2, n=2))
    assert response["message"] == "inequality fails"
    body = response["report"]["result"]
    assert (body["dimP2m"], body["dimPm"]) == ("330", "10")
    default = counting_check(ExperimentConfig(command="counting-check", d=2, r=1))
    assert default["message"] == "inequality holds"


def test_rank_of_sample_diagonal(samples_dir):
    path = str(samples_dir / "diag222.json")
    response = rank(ExperimentConfig(command="rank", inputs=[path]))
    assert response["status"] == "success"
    report = response["report"]
    assert report["report_type"] == "rank" and report["tool"] == "subtensor-rank"
    assert set(report["inputs"]) == {path}
    assert report["result"]["prank"]["value"] == 2
    assert report["result"]["slice_rank"]["value"] == 2
    assert response["message"] == "prank = 2 (exhaustive-search), slice rank = 2"


def test_rank_of_identity_and_zero(samples_dir):
    identity = rank(ExperimentConfig(command="rank", inputs=[str(samples_dir / "identity2.json")]))
    assert identity["report"]["result"]["prank"]["lower_bound"] == "matrix-rank"
    assert identity["report"]["result"]["prank"]["value"] == 2
    zero = rank(ExperimentConfig(command="rank", inputs=[str(samples_dir / "zero.json")]))
    assert zero["report"]["result"]["prank"]["value"] == 0


def test_rank_reports_missing_files(tmp_path):
    response = rank(ExperimentConfig(command="rank", inputs=[str(tmp_path / "absent.json")]))
    assert response["status"] == "error"
    assert response["exit_code"] == 2
    assert "suggestion" in response
    assert rank(ExperimentConfig(command="rank"))["error_type"] == "ParseError"


def test_config_rejects_non_positive_limits():
    with pytest.raises(ParseError):
        ExperimentConfig(command="rank", node_budget=0)
    with pytest.raises(ParseError):
        ExperimentConfig(command="rank", sample=0)


def test_subtensor_scan_and_verify(tmp_path):
    source = write_tensor(tmp_path / "diag333.json", diagonal_tensor(3, 3, gf(2)))
    out = tmp_path / "scan.json"
    response = subtensor_scan(ExperimentConfig(command="subtensor-scan", inputs=[source], size=2, out=str(out)))
    assert response["status"] == "success"
    assert response["output_path"] == str(out)
    scan = json.loads(out.read_text())["result"]["scan"]
    assert scan["count"] == scan["expected_count"] == 27
    assert scan["mode"] == "exhaustive"
    assert (scan["max_subtensor_prank"], scan["full_prank"]) == (2, 3)
    assert scan["monotone"]
    assert "timing" not in scan

    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    assert checked["status"] == "success"
    assert checked["report"]["result"]["all_ok"]
    assert len(checked["report"]["result"]["checks"]) == 27 + 2 + 1


def test_subtensor_scan_on_a_matrix(samples_dir):
    path = str(samples_dir / "identity2.json")
    response = subtensor_scan(ExperimentConfig(command="subtensor-scan", inputs=[path], size=1))
    fact = response["report"]["result"]["scan"]["matrix_fact"]
    assert fact["holds"] and fact["expected"] == 1
    bad = subtensor_scan(ExperimentConfig(command="subtensor-scan", inputs=[path], size=3))
    assert bad["status"] == "error" and bad["exit_code"] == 2


def test_subtensor_scan_samples_are_seeded(tmp_path):
    source = write_tensor(tmp_path / "diag333.json", diagonal_tensor(3, 3, gf(2)))
    config = dict(command="subtensor-scan", inputs=[source], size=2, sample=5, seed=11)
    first = subtensor_scan(ExperimentConfig(**config))["report"]["result"]["scan"]
    second = subtensor_scan(ExperimentConfig(**config))["report"]["result"]["scan"]
    assert first["mode"] == "sample"
    assert 1 <= first["count"] <= 5
    assert first["subtensors"] == second["subtensors"]


def test_verify_report_catches_tampering(samples_dir, tmp_path):
    out = tmp_path / "rank.json"
    rank(ExperimentConfig(command="rank", inputs=[str(samples_dir / "diag222.json")], out=str(out)))
    doc = json.loads(out.read_text())
    doc["result"]["prank"]["value"] = 1
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(doc))
    response = verify_report(ExperimentConfig(command="verify-report", inputs=[str(tampered)]))
    assert response["status"] == "error"
    assert response["exit_code"] == 1
    failed = [c["name"] for c in response["report"]["result"]["checks"] if not c["ok"]]
    assert failed == ["prank: witness length"]


def test_verify_report_without_certificates(tmp_path):
    out = tmp_path / "bounds.json"
    bounds(ExperimentConfig(command="bounds", d=2, r=1, out=str(out)))
    response = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    assert response["status"] == "info"
    assert response["report"]["result"]["checks"] == []


def test_verify_report_lists_inputs_it_cannot_rehash(tmp_path):
    source = write_tensor(tmp_path / "diag222.json", diagonal_tensor(3, 2, gf(2)))
    out = tmp_path / "rank.json"
    rank(ExperimentConfig(command="rank", inputs=[source], out=str(out)))
    (tmp_path / "diag222.json").unlink()
    response = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    body = response["report"]["result"]
    assert body["skipped"] == [f"input hash {source}"]
    assert all(not c["name"].startswith("input hash") for c in body["checks"])
    assert body["all_ok"]


def test_find_equation_recovers_determinant(tmp_path):
    out = tmp_path / "equation.json"
    response = find_equation(ExperimentConfig(command="find-equation", d=2, n=2, r=1, m=2, out=str(out)))
    body = response["report"]["result"]
    assert body["text"] == "x_{11}x_{22} - x_{12}x_{21}"
    assert all(check["vanishes"] for check in body["checks"])
    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    assert checked["report"]["result"]["all_ok"]


def test_find_equation_full_mode_is_informative():
    response = find_equation(ExperimentConfig(command="find-equation", d=2, n=2, r=1, m=2, mode="full"))
    assert response["status"] == "info"
    assert response["report"]["result"]["polynomial"] is None
    unknown = find_equation(ExperimentConfig(command="find-equation", d=2, n=2, r=1, m=2, mode="loose"))
    assert unknown["status"] == "error"


def test_hchain_of_sample_determinant(samples_dir, tmp_path):
    out = tmp_path / "hchain.json"
    config = ExperimentConfig(command="hchain", inputs=[str(samples_dir / "determinant2.json")], out=str(out))
    body = hchain(config)["report"]["result"]
    assert body["verified"] is True
    assert body["chain"]["m"] == 2
    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    names = [c["name"] for c in checked["report"]["result"]["checks"]]
    assert names[:2] == ["chain relations", "chain length"]
    assert checked["report"]["result"]["all_ok"]


def test_verify_report_rejects_a_broken_chain(samples_dir, tmp_path):
    out = tmp_path / "hchain.json"
    hchain(ExperimentConfig(command="hchain", inputs=[str(samples_dir / "determinant2.json")], out=str(out)))
    doc = json.loads(out.read_text())
    doc["result"]["chain"]["r"][0] = doc["result"]["chain"]["h"][0]
    out.write_text(json.dumps(doc))
    response = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    assert response["exit_code"] == 1
    failed = [c["name"] for c in response["report"]["result"]["checks"] if not c["ok"]]
    assert "chain relations" in failed


def test_decompose_rank_one_matrix(samples_dir, tmp_path):
    field = gf(5)
    T = Tensor.from_nested(field, [[1, 2, 3], [2, 4, 1], [3, 1, 4]])
    source = write_tensor(tmp_path / "rank_one.json", T)
    out = tmp_path / "decomposition.json"
    config = ExperimentConfig(
        command="decompose", inputs=[str(samples_dir / "determinant2.json"), source], out=str(out)
    )
    response = decompose(config)
    body = response["report"]["result"]
    assert body["length"] <= body["bound"]
    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    assert checked["report"]["result"]["all_ok"]


def test_decompose_rejects_full_rank(samples_dir):
    config = ExperimentConfig(
        command="decompose",
        inputs=[str(samples_dir / "determinant2.json"), str(samples_dir / "identity2.json")],
    )
    response = decompose(config)
    assert response["error_type"] == "HypothesisViolated"
    assert response["exit_code"] == 4


def test_bridge_on_cubic_monomial(samples_dir, tmp_path):
    out = tmp_path / "bridge.json"
    config = ExperimentConfig(command="bridge", inputs=[str(samples_dir / "cubic_monomial.json")], r=1, out=str(out))
    response = bridge(config)
    body = response["report"]["result"]
    assert body["D"] == 3
    assert set(body["pipeline"]["links"].values()) == {"pass"}
    assert response["message"] == "Pipeline links: 7 not failing, 0 failing"
    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    names = [c["name"] for c in checked["report"]["result"]["checks"]]
    assert {"symmetric tensor", "strength witness multiplies out", "witness transport"} <= set(names)
    assert checked["report"]["result"]["all_ok"]


def test_nullcone_has_no_certificate_at_full_slice_rank(samples_dir, tmp_path):
    path = str(samples_dir / "diag222.json")
    out = tmp_path / "nullcone.json"
    response = nullcone(ExperimentConfig(command="nullcone", inputs=[path], out=str(out)))
    assert response["status"] == "info"
    assert response["report"]["result"]["certificate"] is None
    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    assert checked["report"]["result"]["all_ok"]


def test_nullcone_certifies_a_slice(tmp_path):
    T = Tensor.from_entries(gf(2), (2, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1})
    out = tmp_path / "nullcone.json"
    response = nullcone(ExperimentConfig(command="nullcone", inputs=[write_tensor(tmp_path / "t.json", T)], out=str(out)))
    assert response["status"] == "success"
    assert response["report"]["result"]["certificate"]["holds"] is True
    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    assert checked["report"]["result"]["all_ok"]


def test_nullcone_needs_a_cube(samples_dir):
    response = nullcone(ExperimentConfig(command="nullcone", inputs=[str(samples_dir / "identity2.json")]))
    assert response["status"] == "error"


def test_complement_scan_finds_pinned_block(tmp_path):
    ones = Tensor.from_nested(gf(5), [[1, 1, 1], [1, 1, 1], [1, 1, 1]])
    source = write_tensor(tmp_path / "ones.json", ones)
    out = tmp_path / "complement.json"
    response = complement_scan(ExperimentConfig(command="complement-scan", inputs=[source], r=1, out=str(out)))
    body = response["report"]["result"]
    assert body["found"] == 1
    assert body["tensors"][0]["X"] == [[1], [1]]
    assert body["max_complement_prank"] == 1
    assert body["matrix_bound_holds"] is True
    checked = verify_report(ExperimentConfig(command="verify-report", inputs=[str(out)]))
    names = [c["name"] for c in checked["report"]["result"]["checks"]]
    assert "complement of [[1], [1]]: witness evaluates to tensor" in names
    assert checked["report"]["result"]["all_ok"]


def test_complement_scan_without_pinned_block_is_informative(samples_dir):
    path = str(samples_dir / "identity2.json")
    response = complement_scan(ExperimentConfig(command="complement-scan", inputs=[path], r=1))
    assert response["status"] == "info"
    assert response["error_type"] == "NoWitnessFound"
    assert response["exit_code"] == 0


def test_complement_scan_rejects_unknown_generator():
    config = ExperimentConfig(command="complement-scan", r=1, dims=(3, 3), field=gf(2), generator="adversarial")
    assert complement_scan(config)["error_type"] == "ParseError"


def test_cli_prints_report(capsys):
    assert cli.main(["bounds", "--d", "3", "--r", "1"]) == 0
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert report["report_type"] == "bounds"
    assert report["result"]["F"] == 2**36
    assert "success: F = " in captured.err


def test_cli_writes_out_file(samples_dir, tmp_path, capsys):
    out = tmp_path / "nested" / "rank.json"
    assert cli.main(["rank", str(samples_dir / "identity2.json"), "--field", "GF(5)", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["result"]["prank"]["value"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["no-such-command"],
        ["rank", "--field", "GF(4)"],
        ["rank", "--exhaustive", "--sample", "3"],
        ["rank", "missing.json"],
        ["rank", "--budget", "0"],
    ],
)
def test_cli_parse_failures_exit_with_two(argv):
    assert cli.main(argv) == 2


def test_cli_version_exits_cleanly():
    assert cli.main(["--version"]) == 0


def test_logging_is_configured_on_import():
    assert configure_logging("DEBUG")
    assert get_initialization_status() == (True, None)
    configure_logging("INFO")
