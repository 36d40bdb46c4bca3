import pytest
from hypothesis import given, strategies as st

from caseminer.corpus import (
    CLAUSE_BOUNDARIES,
    CaseDocument,
    case_clauses,
    clean_text,
    load_case,
    load_cases,
    parse_case,
    segment_clauses,
    tokenize,
)
from caseminer.errors import ValidationError

CASE = """2003-9-20 升降机吊笼坠落
== profile ==
某住宅项目。
== details ==
（1）吊笼坠落，造成事故。
== causes ==
安全检查不到位，作业人员违章操作；
施工单位未开展安全教育。
== severity ==
1人死亡。
== liabilities ==
项目经理被处分。
"""

text_chars = st.text(alphabet=st.sampled_from(list("安全检查不到位 ab，；。,;.（）()【】“”1、\n")), max_size=40)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("", ""),
        ("（1）安全检查。", "安全检查。"),
        ("a  b", "a b"),
        ("“违章指挥”，【重点】", "违章指挥，重点"),
        ("一、 项目部未落实", "项目部未落实"),
        ("1、施工方案\n2、安全交底", "施工方案 安全交底"),
    ],
)
def test_clean_text(raw, expected):
    assert clean_text(raw) == expected


def test_clean_text_keeps_clause_punctuation():
    assert clean_text("甲，乙；丙。d,e;f.") == "甲，乙；丙。d,e;f."


@given(text_chars)
def test_clean_text_idempotent(raw):
    once = clean_text(raw)
    assert clean_text(once) == once


@pytest.mark.parametrize(
    "text, expected",
    [
        ("A，B。", ["A", "B"]),
        ("A；；B", ["A", "B"]),
        ("安全检查不到位，造成事故。", ["安全检查不到位", "造成事故"]),
        ("", []),
        ("mixed, ASCII;and.full", ["mixed", "ASCII", "and", "full"]),
        ("  padded ，x", ["padded", "x"]),
    ],
)
def test_segment_clauses(text, expected):
    assert segment_clauses(text) == expected


@given(text_chars)
def test_segments_have_no_boundaries_and_are_stable(raw):
    segs = segment_clauses(clean_text(raw))
    for s in segs:
        assert s
        assert not set(s) & CLAUSE_BOUNDARIES
        assert segment_clauses(s) == [s]


@given(text_chars)
def test_segments_preserve_content(raw):
    text = clean_text(raw)
    content = "".join(ch for ch in text if ch not in CLAUSE_BOUNDARIES and not ch.isspace())
    joined = "，".join(segment_clauses(text))
    assert "".join(ch for ch in joined if ch not in CLAUSE_BOUNDARIES and not ch.isspace()) == content


def test_parse_case_sections():
    doc = parse_case(CASE, "c1")
    assert doc.title == "2003-9-20 升降机吊笼坠落"
    assert set(doc.sections) == {"profile", "details", "causes", "severity", "liabilities"}
    assert doc.sections["causes"].startswith("安全检查不到位")


def test_case_requires_causes():
    with pytest.raises(ValidationError, match="c2"):
        parse_case("title\n== details ==\nx。\n", "c2")
    with pytest.raises(ValidationError, match="causes"):
        CaseDocument("c3", "t", {"causes": "  "})


def test_case_rejects_unknown_or_duplicate_section():
    with pytest.raises(ValidationError, match="unknown section"):
        parse_case("t\n== causes ==\na\n== summary ==\nb\n", "c")
    with pytest.raises(ValidationError, match="duplicate"):
        parse_case("t\n== causes ==\na\n== causes ==\nb\n", "c")


def test_case_is_immutable():
    doc = parse_case(CASE, "c1")
    with pytest.raises(TypeError):
        doc.sections["causes"] = "x"


def test_case_clauses_default_sections():
    doc = parse_case(CASE, "c1")
    clauses = case_clauses(doc)
    assert [(c.section, c.index, c.text) for c in clauses] == [
        ("causes", 0, "安全检查不到位"),
        ("causes", 1, "作业人员违章操作"),
        ("causes", 2, "施工单位未开展安全教育"),
        ("details", 0, "吊笼坠落"),
        ("details", 1, "造成事故"),
    ]
    assert len(case_clauses(doc, sections=None)) == 8


def test_load_cases_single(tmp_path):
    (tmp_path / "a.txt").write_text(CASE, encoding="utf-8")
    loaded = load_cases(tmp_path)
    assert [c.id for c in loaded.cases] == ["a"]
    assert loaded.skipped == []


def test_load_cases_skips_malformed(tmp_path):
    for name in ("a", "b"):
        (tmp_path / f"{name}.txt").write_text(CASE, encoding="utf-8")
    (tmp_path / "bad.txt").write_text("title\n== details ==\n只有经过。\n", encoding="utf-8")
    loaded = load_cases(tmp_path)
    assert [c.id for c in loaded.cases] == ["a", "b"]
    assert len(loaded.skipped) == 1 and "bad" in loaded.skipped[0].reason
    with pytest.raises(ValidationError, match="bad"):
        load_cases(tmp_path, strict=True)


def test_load_case_unreadable(tmp_path):
    with pytest.raises(OSError, match="missing.txt"):
        load_case(tmp_path / "missing.txt")
    (tmp_path / "latin.txt").write_bytes(b"\xff\xfe\x00bad")
    with pytest.raises(OSError, match="latin.txt"):
        load_case(tmp_path / "latin.txt")


def test_tokenize_modes():
    assert tokenize("安全检查ok 3m") == ["安", "全", "检", "查", "ok", "3m"]
    assert tokenize("安全 检查") == ["安", "全", "检", "查"]
    assert tokenize("安全 检查", "whitespace") == ["安全", "检查"]
    with pytest.raises(ValueError):
        tokenize("x", "bpe")
