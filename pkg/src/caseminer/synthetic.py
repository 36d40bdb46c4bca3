"""Synthetic accident-case corpus with planted, repeated causal facts.

Each planted fact is a (subject, verb, object) triple tagged with a taxonomy
code. It is repeated across different cases with at most ``max_edits``
character edits per repetition and an optional varying noun modifier in
front. Filler clauses are random character strings. Because the clause
structure is known, gold dependency parses are emitted alongside, standing
in for the external segmenter/parser.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from caseminer.extraction import DependencyParse, DepNode, format_clause_ref, to_conllu

FACTS = (
    ("2-3", "项目部", "未落实", "安全检查制度"),
    ("2-8", "施工单位", "未组织", "安全教育培训"),
    ("1-1", "作业人员", "违章拆除", "脚手架连墙件"),
    ("1-2", "特种作业人员", "未取得", "操作资格证书"),
    ("2-2", "施工方案", "未经", "专家论证审查"),
    ("2-6", "现场", "未设置", "安全警示标志"),
    ("4-1", "监理单位", "未履行", "旁站监理职责"),
    ("3-1", "建设单位", "未办理", "施工许可手续"),
    ("2-10", "现场负责人", "违章指挥", "工人冒险作业"),
    ("2-11", "劳务公司", "未审核", "人员从业资格"),
    ("6-1", "供应商", "提供", "不合格钢管扣件"),
    ("6-2", "设计单位", "未进行", "基坑支护设计"),
    ("2-12", "项目经理", "未启动", "应急救援预案"),
    ("5-1", "安监部门", "未督促", "企业整改隐患"),
    ("2-4", "公司", "未建立", "安全生产责任制"),
    ("2-5", "企业", "忽视", "安全文化建设"),
    ("2-7", "工人", "擅自进入", "有限空间作业"),
    ("1-3", "作业人员", "缺乏", "安全防护意识"),
    ("2-9", "施工现场", "存在", "坍塌隐患"),
    ("4-3", "监理人员", "不具备", "相应执业资格"),
)

MODIFIERS = ("某建工集团", "市政公司", "该工程", "涉事企业", "某劳务分包", "总包方", "本项目", "某置业公司")

# Filler characters: common CJK characters outside every planted phrase.
_PLANTED_CHARS = set("".join("".join(f[1:]) for f in FACTS) + "".join(MODIFIERS))
FILLER_CHARS = "".join(
    ch for ch in "的一是了我不人在他有这个上们来到时大地为子中你说生国年着就那和要她出也得里后自以会家可下而过天去能对小多然于心学么之都好看起发当没成只如事把还用第样道想作种开美总从无情己面最女但现前些所同日手又行意动方期它头经长儿回位分爱老因很给名法间斯知世什两次使身者被高已亲其进此话常与活正感见明问力理尔点文几定本公特做外孩相西果走将月十实向声车全信重三机工物气每并别真打太新比才便夫再书部水像眼等体却加电主界门利海受听表德少克代员许稜先口由死安写性马光白或住难望教命花结乐色更拉东神记处让母父应直字场平报友关放至张认接告入笑内英军候民岁往何度山觉路带万男边风解叫任金快原吃妈变通师立象数四失满战远格士音轻目条呢病始达深完今提求清王化空业思切怎非找片罗钱紶吗语元喜曾离飞科言干流欢约各即指合反题必该论交终林请医晚制球决窢传画保读运及则房早院量苦火布品近坐产答星精视五连司巴奇管类未朋且婚台夜青北队久乎越观落尽形影红爸百令周吧识步希亚术留市半热送兴造谈容极随演收首根讲整式取照办强石古华諣拿计您装似足双妻尼转诉米称丽客南领节衣站黑刻统断福城故历惊脸选包紧争另建维绝树系伤示愿持千史谁准联妇纪基买志静阿诗独复痛消社算义竟确酒需单治卡幸兰念举仅钟怕共毛句息功官待究跟穿室易游程号居考突皮哪费倒价图具刚脑永歌响商礼细专黄块脚味灵改据般破引食仍存众注笔甚某沉血备习校默务土微娘须试怀料调广蜖苏显赛查密议底列富梦错座参八除跑亮假印设线温虽掉京初养香停际致阳纸李纳验助激够严证帝饭忘趣支春集丈木研班普导顿睡展跳获艺六波察群皇段急庭创区奥器谢弟店否害草排背止组州朝封睛板角况曲馆育忙质河续哥呼若推境遇雨标姐充围案伦护冷警贝著雪索剧啊船险烟依斗值帮汉慢佛肯闻唱沙局伯族低玩资屋击速顾泪洲团圣旁堂兵七露园牛哭旅街劳型烈姑陈莫鱼异抱宝权鲁简态级票怪寻杀律胜份汽右洋范床舞秘午登楼贵吸责例追较职属渐左录丝牙党继托赶章智冲叶胡吉卖坚喝肉遗救修松临藏担戏善卫药悲敢靠伊村戴词森耳差短祖云规窗散迷油旧适乡架恩投弹铁博雷府压超负勒杂醒洗采毫嘴毕九冰既状乱景席珍童顶派素脱农疑练野按犯拍征坏骨余承置臓彩灯巨琴免环姆暗换技翻束增忍餐洛塞缺忆判欧层付阵玛批岛项狗休懂武革良恶恋委拥娜妙探呀营退摇弄桌熟诺宣银势奖宫忽套康供优课鸟喊降夏困刘罪亡鞋健模败伴守挥鲜财孤枪禁恐伙杰迹妹藸遍盖副坦牌江顺秋萨菜划授归浪听凡预奶雄升碃编典袋莱含盛济蒙棋端腿招释介烧误" if ch not in _PLANTED_CHARS
)


@dataclass
class SyntheticClause:
    case_id: str
    section: str
    index: int
    text: str
    parse: DependencyParse
    fact: int | None = None  # index into FACTS for planted clauses

    @property
    def id(self) -> str:
        return format_clause_ref((self.case_id, self.section, self.index))


@dataclass
class SyntheticCorpus:
    case_texts: dict[str, str] = field(default_factory=dict)
    clauses: list[SyntheticClause] = field(default_factory=list)
    gold: dict[str, list[str]] = field(default_factory=dict)
    seed_labels: dict[str, str] = field(default_factory=dict)

    @property
    def parses(self) -> list[DependencyParse]:
        return [c.parse for c in self.clauses]

    def planted(self) -> list[SyntheticClause]:
        return [c for c in self.clauses if c.fact is not None]


def _edit(rng: random.Random, phrases: list[str], n_edits: int) -> list[str]:
    phrases = list(phrases)
    for _ in range(n_edits):
        k = rng.randrange(len(phrases))
        p = phrases[k]
        op = rng.choice(("sub", "ins", "del") if len(p) > 2 else ("sub", "ins"))
        i = rng.randrange(len(p))
        ch = rng.choice(FILLER_CHARS)
        if op == "sub":
            p = p[:i] + ch + p[i + 1:]
        elif op == "ins":
            p = p[:i] + ch + p[i:]
        else:
            p = p[:i] + p[i + 1:]
        phrases[k] = p
    return phrases


def _filler_word(rng: random.Random) -> str:
    return "".join(rng.choice(FILLER_CHARS) for _ in range(rng.randint(2, 4)))


def _planted_nodes(rng: random.Random, subj: str, verb: str, obj: str) -> tuple[str, list[tuple]]:
    # (form, tag, head index into words or None for the root, relation)
    words = [(subj, "NN", 1, "nsubj"), (verb, "VV", None, "root"), (obj, "NN", 1, "dobj")]
    if rng.random() < 0.6:
        words = [(rng.choice(MODIFIERS), "NN", 1, "nmod")] + [
            (form, tag, None if head is None else head + 1, rel) for form, tag, head, rel in words
        ]
    return "".join(w[0] for w in words), words


def _filler_nodes(rng: random.Random) -> tuple[str, list[tuple]]:
    n = rng.randint(2, 5)
    root = rng.randrange(n)
    words = []
    for i in range(n):
        if i == root:
            words.append((_filler_word(rng), "VV", None, "root"))
        else:
            rel = rng.choice(("nsubj", "advmod", "dobj", "nmod", "dep"))
            words.append((_filler_word(rng), "NN", root, rel))
    return "".join(w[0] for w in words), words


def _to_parse(ref: tuple[str, str, int], words: list[tuple]) -> DependencyParse:
    nodes = tuple(
        DepNode(i + 1, form, tag, 0 if head is None else head + 1, rel)
        for i, (form, tag, head, rel) in enumerate(words)
    )
    return DependencyParse(ref, nodes)


def make_corpus(
    seed: int = 7,
    n_cases: int = 40,
    n_clauses: int = 300,
    reps: tuple[int, int] = (6, 8),
    max_edits: int = 2,
    facts=FACTS,
    seeds_per_fact: int = 2,
) -> SyntheticCorpus:
    """Build a corpus of ``n_clauses`` causes/details clauses over ``n_cases`` cases."""
    rng = random.Random(seed)
    case_ids = [f"case{k:03d}" for k in range(n_cases)]
    # planted repetitions: each fact in distinct cases
    plan: dict[str, list[int]] = {c: [] for c in case_ids}
    for f in range(len(facts)):
        for c in rng.sample(case_ids, rng.randint(*reps)):
            plan[c].append(f)
    n_planted = sum(len(v) for v in plan.values())
    if n_planted > n_clauses:
        raise ValueError("more planted repetitions than clauses")
    fillers = n_clauses - n_planted
    per_case = [fillers // n_cases + (1 if k < fillers % n_cases else 0) for k in range(n_cases)]

    corpus = SyntheticCorpus()
    first_seen: dict[int, int] = {}
    for case_id, n_fill in zip(case_ids, per_case):
        items: list[int | None] = plan[case_id] + [None] * n_fill
        rng.shuffle(items)
        split = max(1, len(items) // 2)
        causes, details = items[:split], items[split:]
        texts = {}
        for section, slots in (("causes", causes), ("details", details)):
            parts = []
            for idx, fact in enumerate(slots):
                if fact is None:
                    text, words = _filler_nodes(rng)
                else:
                    _, s, v, o = facts[fact]
                    seen = first_seen.get(fact, 0)
                    edits = 0 if seen == 0 else rng.randint(0, max_edits)
                    s, v, o = _edit(rng, [s, v, o], edits)
                    text, words = _planted_nodes(rng, s, v, o)
                    first_seen[fact] = seen + 1
                ref = (case_id, section, idx)
                clause = SyntheticClause(case_id, section, idx, text, _to_parse(ref, words), fact)
                corpus.clauses.append(clause)
                if fact is not None and seen < seeds_per_fact:
                    corpus.seed_labels[clause.id] = facts[fact][0]
                parts.append(text)
            texts[section] = "，".join(parts) + "。" if parts else ""
        corpus.gold[case_id] = sorted({facts[f][0] for f in plan[case_id]})
        body = [f"{case_id} 施工事故", "== profile ==", "某工程项目概况。"]
        if texts["details"]:
            body += ["== details ==", texts["details"]]
        body += [
            "== causes ==", texts["causes"],
            "== severity ==", "事故造成1人死亡。",
            "== liabilities ==", "对相关责任人给予处分。",
        ]
        corpus.case_texts[case_id] = "\n".join(body) + "\n"
    corpus.gold = {k: v for k, v in corpus.gold.items() if v}
    return corpus


def write_fixture(corpus: SyntheticCorpus, directory: str | Path) -> None:
    """Write cases/, parses.conllu, gold.csv and annotation.json."""
    directory = Path(directory)
    (directory / "cases").mkdir(parents=True, exist_ok=True)
    for case_id, text in corpus.case_texts.items():
        (directory / "cases" / f"{case_id}.txt").write_text(text, encoding="utf-8")
    (directory / "parses.conllu").write_text("\n".join(to_conllu(p) for p in corpus.parses), encoding="utf-8")
    rows = ["case_id,factor_code"] + [f"{c},{code}" for c in sorted(corpus.gold) for code in corpus.gold[c]]
    (directory / "gold.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    annotation = {"excluded_clusters": [], "included_singletons": [], "seed_labels": dict(sorted(corpus.seed_labels.items()))}
    (directory / "annotation.json").write_text(json.dumps(annotation, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
