import json

import pytest
from hypothesis import given, strategies as st

from caseminer.analysis import (
    ClusterAnnotation,
    FactorTaxonomy,
    KeyphraseSet,
    build_cooccurrence,
    compute_recall,
    dedup_keyphrase_sets,
    load_gold_labels,
    unique_keyphrases,
    write_cooccurrence_csv,
)
from caseminer.clustering import ClusteringResult, ClusterRound
from caseminer.corpus import CaseDocument
from caseminer.errors import ValidationError
from caseminer.extraction import CandidatePhraseSet


def cset(ref, *forms):
    case, section, idx = ref.split(":")
    return CandidatePhraseSet((case, section, int(idx)), tuple((f, k + 1) for k, f in enumerate(forms)), ("root",) * len(forms))


def case(cid, causes, details=""):
    sections = {"causes": causes}
    if details:
        sections["details"] = details
    return CaseDocument(cid, cid, sections)


def small_result():
    sets = [
        cset("c1:causes:0", "安全检查", "未落实"),
        cset("c2:causes:0", "安全检查", "未落实"),
        cset("c3:causes:1", "安全 检查", "未落实"),
        cset("c4:causes:0", "脚手架", "拆除"),
        cset("c5:causes:0", "噪声"),
        cset("c6:causes:0", "警示标志", "未设置"),
    ]
    ids = [s.id for s in sets]
    result = ClusteringResult(
        rounds=[ClusterRound(1, 1.2, [ids[:3], [ids[3]]], ids[4:], [(1.2, 2)])],
        unclustered=ids[4:],
        stop_reason="no_new_cluster",
    )
    return result, sets, ids


def test_dedup_collapses_identical_renderings():
    result, sets, ids = small_result()
    keys = dedup_keyphrase_sets(result, sets)
    assert [k.render() for k in keys] == ["安全检查未落实", "安全 检查未落实", "脚手架拆除"]
    assert keys[0].member_count == 2 and keys[0].source_cluster == (1, 0)


def test_dedup_applies_annotation():
    result, sets, ids = small_result()
    ann = ClusterAnnotation(
        excluded_clusters={"1:1"},
        excluded_singletons={ids[4]},
        included_singletons={ids[5]},
        seed_labels={ids[0]: "2-3", ids[1]: "2-3", ids[2]: "2-8"},
    )
    keys = dedup_keyphrase_sets(result, sets, ann)
    assert [k.render() for k in keys] == ["安全检查未落实", "安全 检查未落实", "警示标志未设置"]
    assert [k.factor_code for k in keys] == ["2-3", "2-3", None]
    assert keys[-1].source_cluster is None


def test_dedup_is_idempotent():
    result, sets, _ = small_result()
    keys = dedup_keyphrase_sets(result, sets)
    again = unique_keyphrases(keys)
    assert [k.render() for k in again] == [k.render() for k in keys]
    assert [k.member_count for k in again] == [k.member_count for k in keys]


def test_dedup_normalises_whitespace():
    a = KeyphraseSet(("安全 ", " 检查"), None)
    b = KeyphraseSet(("安全", " 检查"), None)
    assert len(unique_keyphrases([a, b])) == 1


def test_annotation_validation(tmp_path):
    result, sets, ids = small_result()
    with pytest.raises(ValidationError, match="unknown clusters"):
        dedup_keyphrase_sets(result, sets, ClusterAnnotation(excluded_clusters={"9:9"}))
    with pytest.raises(ValidationError, match="not unclustered"):
        dedup_keyphrase_sets(result, sets, ClusterAnnotation(included_singletons={ids[0]}))
    with pytest.raises(ValidationError, match="both included and excluded"):
        dedup_keyphrase_sets(result, sets, ClusterAnnotation(included_singletons={ids[4]}, excluded_singletons={ids[4]}))
    with pytest.raises(ValidationError, match="no candidate set"):
        dedup_keyphrase_sets(result, sets[1:])
    bad = tmp_path / "a.json"
    bad.write_text(json.dumps({"excluded": []}))
    with pytest.raises(ValidationError, match="unknown keys"):
        ClusterAnnotation.load(bad)
    with pytest.raises(OSError, match="missing.json"):
        ClusterAnnotation.load(tmp_path / "missing.json")


def test_recall_single_clause_containment():
    cases = [
        case("a", "项目部未落实安全检查制度，工人违章。"),
        case("b", "项目部未落实，安全检查制度缺失。"),  # split across clauses
        case("c", "无关内容。"),
    ]
    keys = [KeyphraseSet(("未落实", "安全检查"), (1, 0), factor_code="2-3")]
    report = compute_recall(cases, keys)
    assert report.metric == "coverage"
    assert (report.numerator, report.denominator) == (1, 3)
    assert [c.identified for c in report.cases] == [True, False, False]


def test_recall_with_gold_counts_factors():
    facts = [(f"F{k}", f"事实{chr(0x4e00 + k)}项") for k in range(20)]
    cases = [case(f"case{k}", f"{text}存在。") for k, (_, text) in enumerate(facts)]
    keys = [KeyphraseSet((text,), (1, k), factor_code=code) for k, (code, text) in enumerate(facts[:18])]
    gold = {f"case{k}": [code] for k, (code, _) in enumerate(facts)}
    report = compute_recall(cases, keys, gold)
    assert report.metric == "recall"
    assert report.value == pytest.approx(0.90)


def test_recall_scans_all_sections_by_default():
    cases = [case("a", "其他原因。", details="未设置安全警示标志。")]
    keys = [KeyphraseSet(("安全警示标志",), None)]
    assert compute_recall(cases, keys).numerator == 1
    assert compute_recall(cases, keys, sections=("causes",)).numerator == 0


def test_recall_errors():
    with pytest.raises(ValidationError):
        compute_recall([case("a", "x。")], [])
    with pytest.raises(ValidationError, match="unknown cases"):
        compute_recall([case("a", "x。")], [KeyphraseSet(("x",), None)], {"zz": ["2-3"]})


@given(st.lists(st.sampled_from(["安全", "检查", "制度", "项目", "违章"]), min_size=1, max_size=5), st.integers(0, 4))
def test_recall_monotone_in_keyphrase_sets(words, extra):
    cases = [case("a", "项目部安全检查制度。"), case("b", "违章作业。"), case("c", "检查。")]
    keys = [KeyphraseSet((w,), None) for w in words]
    more = keys + [KeyphraseSet((w,), None) for w in ["安全", "违章", "作业", "检查", "其他"][:extra]]
    assert compute_recall(cases, more).numerator >= compute_recall(cases, keys).numerator


def test_taxonomy_codes_unique():
    tax = FactorTaxonomy.load()
    assert len(tax.sub_factors) == 36
    assert set(tax.main_factors) == {"1", "2", "3", "4", "5", "6"}
    assert tax.sub_factors["RM-1"].description == "Client: making construction plan"
    assert tax.sub_factors["RM-1"].role_mismatch


def test_taxonomy_rejects_duplicates():
    obj = {"main_factors": [{"id": "1", "name": "x"}], "sub_factors": [{"code": "1-1", "main": "1", "description": "a"}] * 2}
    with pytest.raises(ValidationError, match="duplicate"):
        FactorTaxonomy.from_json(obj)


def test_cooccurrence_counts_and_order():
    labels = {"a": ["2-3", "2-8"], "b": ["2-3", "2-8", "1-1"], "c": ["2-3"]}
    table = build_cooccurrence(labels, anchors=["2-3"])
    row = table.row("2-3")
    assert row.count == 3
    assert row.others == [("2-8", 2), ("1-1", 1)]


@given(st.dictionaries(st.text("abcdef", min_size=1, max_size=3), st.sets(st.sampled_from(["1-1", "1-2", "2-3", "2-8", "6-2", "RM-1"]), max_size=4), max_size=10))
def test_cooccurrence_symmetric(labels):
    table = build_cooccurrence(labels)
    anchors = [r.anchor for r in table.rows]
    for a in anchors:
        for b in anchors:
            assert table.co_count(a, b) == table.co_count(b, a)


def test_cooccurrence_unknown_code():
    with pytest.raises(ValidationError, match="unknown factor code"):
        build_cooccurrence({"a": ["9-9"]})
    with pytest.raises(ValidationError, match="unknown anchor"):
        build_cooccurrence({"a": ["1-1"]}, anchors=["9-9"])


def test_cooccurrence_csv(tmp_path):
    table = build_cooccurrence({"a": ["2-3", "2-8"]})
    out = tmp_path / "co.csv"
    write_cooccurrence_csv(table, out)
    text = out.read_text(encoding="utf-8")
    assert "2-3" in text and "2-8" in text


def test_load_gold_labels(tmp_path):
    p = tmp_path / "gold.csv"
    p.write_text("case_id,factor_code\nc1,2-3\nc1,2-8\nc2,1-1\n", encoding="utf-8")
    assert load_gold_labels(p) == {"c1": ["2-3", "2-8"], "c2": ["1-1"]}
    p.write_text("c1,2-3\n", encoding="utf-8")
    assert load_gold_labels(p) == {"c1": ["2-3"]}
    p.write_text("c1,2-3,x\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="expected 2 columns"):
        load_gold_labels(p)
