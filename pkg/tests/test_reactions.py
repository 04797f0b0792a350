"""Quick reactions: classification, cooldown scopes, counters."""

import pytest

from lanecast.events import EventKind, LiveEvent
from lanecast.reactions import (
    Category,
    CooldownConfig,
    CooldownScope,
    OutcomeKind,
    QuickReactionEngine,
    classify,
    default_rules,
    load_rules,
)
from lanecast.segments import MockLlmClient


def dmk(content, t=0.0, user="观众甲"):
    return LiveEvent(kind=EventKind.DANMAKU, timestamp=t, user=user, content=content)


class TestClassify:
    def test_technical_keywords(self):
        rules = default_rules()
        assert classify("suno怎么写的", rules) is Category.TECHNICAL
        assert classify("这是AI吗", rules) is Category.TECHNICAL

    def test_emotional_keywords(self):
        assert classify("主播加油", default_rules()) is Category.EMOTIONAL

    def test_cocreation_keywords(self):
        assert classify("能帮我定制一首吗", default_rules()) is Category.COCREATION

    def test_no_match(self):
        assert classify("hello world", default_rules()) is None

    def test_ascii_case_insensitive(self):
        rules = default_rules()
        assert classify("用SUNO做的吗", rules) is Category.TECHNICAL

    def test_first_match_wins_on_overlap(self):
        # "怎么写" (technical) and "写一首" (cocreation) both present
        assert classify("写一首歌怎么写", default_rules()) is Category.TECHNICAL


class TestMaybeReact:
    def test_fire_renders_user_token(self):
        engine = QuickReactionEngine()
        outcome = engine.maybe_react(dmk("suno怎么写的", user="小陈"), now=10.0)
        assert outcome.kind is OutcomeKind.FIRED
        assert outcome.category is Category.TECHNICAL
        assert "小陈" in outcome.utterance

    def test_cooldown_suppresses_within_window(self):
        engine = QuickReactionEngine()
        assert engine.maybe_react(dmk("加油"), now=0.0).kind is OutcomeKind.FIRED
        assert engine.maybe_react(dmk("加油"), now=10.0).kind is OutcomeKind.COOLING_DOWN
        assert engine.maybe_react(dmk("加油"), now=30.1).kind is OutcomeKind.FIRED

    def test_global_scope_spans_categories(self):
        engine = QuickReactionEngine()
        engine.maybe_react(dmk("加油"), now=0.0)
        assert engine.maybe_react(dmk("suno"), now=5.0).kind is OutcomeKind.COOLING_DOWN

    def test_per_category_scope_independent(self):
        engine = QuickReactionEngine(
            cooldown=CooldownConfig(scope=CooldownScope.PER_CATEGORY)
        )
        assert engine.maybe_react(dmk("加油"), now=0.0).kind is OutcomeKind.FIRED
        assert engine.maybe_react(dmk("suno"), now=5.0).kind is OutcomeKind.FIRED
        assert engine.maybe_react(dmk("不容易"), now=8.0).kind is OutcomeKind.COOLING_DOWN

    def test_no_match_leaves_cooldown_open(self):
        engine = QuickReactionEngine()
        assert engine.maybe_react(dmk("平平无奇"), now=0.0).kind is OutcomeKind.NO_MATCH
        assert engine.maybe_react(dmk("加油"), now=1.0).kind is OutcomeKind.FIRED

    def test_burst_suppression_exactly_one(self):
        engine = QuickReactionEngine()
        outcomes = [engine.maybe_react(dmk("加油", t), now=t) for t in
                    [i * 1.0 for i in range(10)]]
        fired = [o for o in outcomes if o.kind is OutcomeKind.FIRED]
        assert len(fired) == 1

    def test_empathy_mode_routes_through_llm(self):
        llm = MockLlmClient(seed=2)
        engine = QuickReactionEngine(llm=llm)
        outcome = engine.maybe_react(dmk("主播不容易"), now=0.0)
        assert outcome.kind is OutcomeKind.FIRED
        assert outcome.utterance.startswith("(mock-")
        assert llm.calls == 1

    def test_non_danmaku_rejected(self):
        engine = QuickReactionEngine()
        with pytest.raises(ValueError):
            engine.maybe_react(LiveEvent(EventKind.GIFT, 0.0, "u", "玫瑰"), now=0.0)


class TestCounters:
    def test_fresh_counters_zero(self):
        counters = QuickReactionEngine().engagement_counters()
        assert counters == {"fired_by_category": {}, "suppressed": 0, "no_match": 0}

    def test_counts_accumulate_monotonic(self):
        engine = QuickReactionEngine()
        engine.maybe_react(dmk("加油"), now=0.0)
        engine.maybe_react(dmk("加油"), now=1.0)
        engine.maybe_react(dmk("nothing"), now=2.0)
        counters = engine.engagement_counters()
        assert counters["fired_by_category"] == {"emotional": 1}
        assert counters["suppressed"] == 1
        assert counters["no_match"] == 1


class TestRulesConfig:
    def test_rules_round_trip(self):
        text = """
        [{"category": "technical", "keywords": ["测试"], "mode": "static_speech",
          "template": "看到{user}了"}]
        """
        rules = load_rules(text)
        assert len(rules) == 1
        assert rules[0].matches("这是测试吗")

    def test_custom_order_controls_routing(self):
        text = """
        [{"category": "cocreation", "keywords": ["写"], "mode": "static_speech", "template": "a"},
         {"category": "technical", "keywords": ["写"], "mode": "static_speech", "template": "b"}]
        """
        assert classify("写点什么", load_rules(text)) is Category.COCREATION
