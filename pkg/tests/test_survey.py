
import pytest

from ffcomb.survey import (
    SurveyConfig,
    empirical_exponent,
    enumerate_instances,
    parse_config,
    read_records,
    records_to_csv,
    run_survey,
)


def test_parse_config_roundtrip():
    text = """
    # grid
    prime_range = 5, 31
    subgroup_size_range = 2, 12
    max_subgroup_vs_p_exponent = 0.6667
    checks = energy, irreducibility
    seed = abc
    node_budget = 1000
    shift_samples = 7
    output_path = out.jsonl
    """
    cfg = parse_config(text)
    assert cfg.prime_range == (5, 31)
    assert cfg.subgroup_size_range == (2, 12)
    assert cfg.checks == ("energy", "irreducibility")
    assert cfg.seed == "abc"
    assert cfg.node_budget == 1000
    assert cfg.shift_samples == 7
    assert cfg.output_path == "out.jsonl"


def test_parse_config_rejects_unknown():
    with pytest.raises(ValueError):
        parse_config("bogus_key = 3")
    with pytest.raises(ValueError):
        parse_config("checks = not_a_check")


def test_enumerate_instances_examples():
    cfg = SurveyConfig(prime_range=(13, 13), subgroup_size_range=(2, 6))
    got = [(f.p, s.order) for f, s in enumerate_instances(cfg)]
    assert got == [(13, 2), (13, 3), (13, 4), (13, 6)]

    cfg = SurveyConfig(prime_range=(5, 7), subgroup_size_range=(2, 4))
    got = [(f.p, s.order) for f, s in enumerate_instances(cfg)]
    assert got == [(5, 2), (5, 4), (7, 2), (7, 3)]


def test_enumerate_respects_exponent_cap():
    cfg = SurveyConfig(prime_range=(5, 31), subgroup_size_range=(2, 40),
                       max_subgroup_vs_p_exponent=2 / 3)
    for fld, sub in enumerate_instances(cfg):
        assert sub.order <= fld.p ** (2 / 3)


def test_empty_range_rejected():
    with pytest.raises(ValueError):
        SurveyConfig(prime_range=(10, 5)).validate()


def test_run_survey_and_resume(tmp_path):
    out = tmp_path / "s.jsonl"
    cfg = SurveyConfig(prime_range=(5, 13), subgroup_size_range=(2, 6),
                       checks=("energy", "t_support"), seed="t",
                       output_path=str(out))
    summary = run_survey(cfg)
    assert summary["hard_failures"] == 0
    assert summary["records_written"] == summary["records_total"] > 0
    body1 = out.read_text()

    # resume: nothing new is written, totals unchanged
    summary2 = run_survey(cfg)
    assert summary2["records_written"] == 0
    assert summary2["records_total"] == summary["records_total"]
    assert out.read_text() == body1


def test_run_survey_deterministic_modulo_header(tmp_path):
    def run(name):
        out = tmp_path / name
        cfg = SurveyConfig(prime_range=(5, 17), subgroup_size_range=(2, 8),
                           checks=("theta", "qabab_upper"), seed="same",
                           shift_samples=5, output_path=str(out))
        run_survey(cfg)
        return [l for l in out.read_text().splitlines()
                if "header" not in l]

    assert run("a.jsonl") == run("b.jsonl")


def test_run_survey_flags_large_reducible(tmp_path):
    # the full multiplicative group of F_17 has order 16 and is trivially
    # reducible, so an uncapped grid must flag it
    out = tmp_path / "s.jsonl"
    cfg = SurveyConfig(prime_range=(17, 17), subgroup_size_range=(16, 16),
                       checks=("irreducibility",), output_path=str(out))
    summary = run_survey(cfg)
    assert summary["large_reducible"] == [
        {"p": 17, "d": 16,
         "witness": summary["large_reducible"][0]["witness"]}]


def test_empirical_exponent_exact_slope():
    records = [{"d": d, "value": d**4} for d in (2, 4, 8, 16)]
    assert empirical_exponent(records, "value") == pytest.approx(4.0)
    with pytest.raises(ValueError):
        empirical_exponent([{"d": 2, "value": 16}], "value")


def test_records_csv(tmp_path):
    out = tmp_path / "s.jsonl"
    cfg = SurveyConfig(prime_range=(5, 7), subgroup_size_range=(2, 4),
                       checks=("energy",), output_path=str(out))
    run_survey(cfg)
    records = read_records(out)
    csv_text = records_to_csv(records)
    lines = csv_text.strip().splitlines()
    assert len(lines) == len(records) + 1
    assert lines[0].startswith("p,d,check")
