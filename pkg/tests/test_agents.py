import numpy as np
import pytest

from splatlab.agents.messages import (
    AgentMessage,
    ROLE_ASSISTANT,
    ROLE_SYSTEM,
    ROLE_TOOL,
    ROLE_USER,
    ToolCall,
    trim_memory,
    user_message_count,
)
from splatlab.agents.providers import Scenario, ScenarioTurn, ScriptedChatProvider
from splatlab.agents.runtime import route_hierarchy, run_vpa_loop
from splatlab.agents.stylize import StubStylizationProvider
from splatlab.agents.tools import ToolError, dispatch_tool
from splatlab.errors import PlanningError, ProviderTimeoutError
from splatlab.semantic.providers import StubEmbeddingProvider
from splatlab.session import KIND_TOOL_CALL, SessionState


@pytest.fixture()
def session(carp_like_bundle, tmp_path):
    s = SessionState(carp_like_bundle, save_dir=tmp_path / "saves", view_sample_count=12)
    s.stylizer = StubStylizationProvider()
    return s


@pytest.fixture()
def embedder():
    return StubEmbeddingProvider(dimension=64)


def call(name, **arguments):
    return ToolCall(id=f"{name}_id", name=name, arguments=arguments)


class TestTrimMemory:
    def _history(self, n_users, system=True):
        msgs = [AgentMessage(ROLE_SYSTEM, "planner prompt")] if system else []
        for i in range(n_users):
            msgs.append(AgentMessage(ROLE_USER, f"utterance {i}"))
            msgs.append(AgentMessage(ROLE_ASSISTANT, f"reply {i}"))
            msgs.append(AgentMessage(ROLE_TOOL, f"tool {i}", tool_call_id=f"c{i}"))
        return msgs

    def test_at_capacity_unchanged(self):
        history = self._history(10)
        assert trim_memory(history, 10) == history

    def test_11th_evicts_oldest_turn(self):
        history = self._history(11)
        trimmed = trim_memory(history, 10)
        assert user_message_count(trimmed) == 10
        contents = {m.content for m in trimmed}
        # the evicted turn's assistant/tool replies left with it
        assert {"utterance 0", "reply 0", "tool 0"}.isdisjoint(contents)
        assert {"utterance 1", "reply 1", "tool 1"} <= contents

    def test_system_prompt_survives(self):
        trimmed = trim_memory(self._history(25), 3)
        assert trimmed[0].role == ROLE_SYSTEM
        assert user_message_count(trimmed) == 3

    def test_order_preserved(self):
        trimmed = trim_memory(self._history(15), 10)
        users = [m.content for m in trimmed if m.role == ROLE_USER]
        assert users == [f"utterance {i}" for i in range(5, 15)]

    def test_never_exceeds_cap(self):
        for n in (1, 5, 10, 20, 40):
            assert user_message_count(trim_memory(self._history(n), 10)) <= 10


class TestRouting:
    def test_edit_after_query(self):
        ordered = route_hierarchy([call("scene_edit", commands=[]), call("open_vocab_query", query="x")])
        assert [c.name for c in ordered] == ["open_vocab_query", "scene_edit"]

    def test_stylize_last(self):
        ordered = route_hierarchy(
            [call("stylize_2d", target="all", prompt="p"), call("scene_edit", commands=[]),
             call("knowledge_qa", question="q")]
        )
        assert [c.name for c in ordered] == ["knowledge_qa", "scene_edit", "stylize_2d"]

    def test_unknown_tool_is_planning_error(self):
        with pytest.raises(PlanningError):
            route_hierarchy([call("paint_the_moon")])

    def test_empty_plan(self):
        assert route_hierarchy([]) == []


class TestDispatch:
    def test_open_vocab_query_logs_and_ranks(self, session, embedder):
        out = dispatch_tool("open_vocab_query", {"query": "pectoral fin"}, session, embedder)
        assert "pectoral_fin" in out.text
        entries = [e for e in session.action_log if e.kind == "query_result"]
        assert len(entries) == 1
        assert entries[0].payload == "pectoral fin"
        sims = dict(entries[0].similarities)
        assert sims["pectoral_fin"] == pytest.approx(1.0, abs=1e-12)

    def test_knowledge_qa_empty_notice(self, two_sphere_bundle, tmp_path):
        from dataclasses import replace as dc_replace

        from splatlab.knowledge import KnowledgeBase

        stripped = dc_replace(two_sphere_bundle, knowledge=KnowledgeBase(()))
        bare = SessionState(stripped, save_dir=tmp_path)
        out = dispatch_tool(
            "knowledge_qa", {"question": "what is this"}, bare, StubEmbeddingProvider(16)
        )
        assert "no knowledge entries" in out.text

    def test_knowledge_qa_finds_passage(self, session, embedder):
        out = dispatch_tool(
            "knowledge_qa", {"question": "what do pectoral fins do"}, session, embedder
        )
        assert "steering" in out.text

    def test_scene_edit_bad_range_echoed(self, session, embedder):
        with pytest.raises(ToolError) as err:
            dispatch_tool(
                "scene_edit",
                {"commands": [{"cmd": "set_opacity", "component": "body", "scale": 5.0}]},
                session,
                embedder,
            )
        assert "range" in str(err.value)

    def test_scene_edit_validates_all_before_any(self, session, embedder):
        before = dict(session.edits)
        with pytest.raises(ToolError):
            dispatch_tool(
                "scene_edit",
                {
                    "commands": [
                        {"cmd": "set_visibility", "component": "body", "visible": False},
                        {"cmd": "set_opacity", "component": "nope", "scale": 1.0},
                    ]
                },
                session,
                embedder,
            )
        assert session.edits == before

    def test_schema_violation(self, session, embedder):
        with pytest.raises(ToolError, match="missing required argument"):
            dispatch_tool("open_vocab_query", {}, session, embedder)
        with pytest.raises(ToolError, match="unknown tool"):
            dispatch_tool("frobnicate", {}, session, embedder)


def scripted_fin_provider():
    hide = [
        {"cmd": "set_visibility", "component": "body", "visible": False},
        {"cmd": "set_visibility", "component": "pectoral_fin", "visible": True},
        {"cmd": "set_visibility", "component": "tail_fin", "visible": True},
        {"cmd": "set_visibility", "component": "dorsal_fin", "visible": True},
    ]
    return ScriptedChatProvider(
        scenarios=[
            Scenario(
                pattern="pectoral fin",
                turns=(
                    ScenarioTurn(
                        "Showing only the fins, highlighting the pectoral fin in red, "
                        "and raising the light magnitude.",
                        (
                            ToolCall("q1", "open_vocab_query", {"query": "pectoral fin"}),
                            ToolCall(
                                "e1",
                                "scene_edit",
                                {
                                    "commands": hide
                                    + [
                                        {
                                            "cmd": "set_color",
                                            "component": "pectoral_fin",
                                            "rgb": [1.0, 0.0, 0.0],
                                        },
                                        {
                                            "cmd": "set_lighting",
                                            "target": "all",
                                            "magnitude": 1.6,
                                        },
                                    ]
                                },
                            ),
                        ),
                        done=True,
                    ),
                ),
            )
        ]
    )


def scripted_lighting_provider():
    lower_right = {"cmd": "set_light_direction", "azimuth": -0.8, "polar": 2.2, "mode": "orbital"}
    upper_left = {"cmd": "set_light_direction", "azimuth": 2.4, "polar": 0.8, "mode": "orbital"}
    return ScriptedChatProvider(
        scenarios=[
            Scenario(
                pattern="lighting",
                turns=(
                    ScenarioTurn(
                        "Moving the light.",
                        (ToolCall("l1", "scene_edit", {"commands": [lower_right]}),),
                        done=False,
                    ),
                    ScenarioTurn(
                        "The light landed lower-right; correcting to upper-left.",
                        (ToolCall("l2", "scene_edit", {"commands": [upper_left]}),),
                        done=True,
                    ),
                ),
            )
        ]
    )


def never_done_provider():
    return ScriptedChatProvider(
        scenarios=[
            Scenario(
                pattern="",
                turns=(ScenarioTurn("still working on it", (), done=False),),
            )
        ]
    )


class TestVpaLoop:
    def test_fin_scenario_single_iteration(self, session, embedder):
        outcome = run_vpa_loop(
            session,
            "show only the fins, highlight the pectoral fin in red and increase brightness",
            scripted_fin_provider(),
            embedder,
        )
        assert outcome.completed and outcome.iterations == 1
        assert not session.edits["body"].visible
        assert session.edits["pectoral_fin"].color_override == (1.0, 0.0, 0.0)
        assert session.light.magnitude == pytest.approx(1.6)
        cmds = [c for c in outcome.executed_commands]
        assert any('"cmd":"set_color"' in c for c in cmds)
        assert any('"cmd":"set_lighting"' in c for c in cmds)

    def test_two_step_lighting_correction(self, session, embedder):
        outcome = run_vpa_loop(
            session, "change the lighting direction", scripted_lighting_provider(), embedder
        )
        assert outcome.completed
        assert outcome.iterations == 2
        assert session.light.azimuth == pytest.approx(2.4)
        assert session.light.polar == pytest.approx(0.8)

    def test_never_done_halts_at_cap(self, session, embedder):
        outcome = run_vpa_loop(
            session, "do something forever", never_done_provider(), embedder, max_iterations=3
        )
        assert not outcome.completed
        assert outcome.iterations == 3

    def test_provider_timeout_aborts_flagged(self, session, embedder):
        class TimeoutProvider:
            vision_capable = False

            def complete(self, messages, tools=()):
                raise ProviderTimeoutError("too slow")

        outcome = run_vpa_loop(session, "hello", TimeoutProvider(), embedder)
        assert outcome.aborted and not outcome.completed
        assert "timeout" in outcome.error

    def test_malformed_tool_call_feeds_back(self, session, embedder):
        provider = ScriptedChatProvider(
            scenarios=[
                Scenario(
                    "break",
                    (
                        ScenarioTurn(
                            "calling a broken tool",
                            (ToolCall("b1", "open_vocab_query", {"nope": 1}),),
                            done=False,
                        ),
                        ScenarioTurn("giving up politely", (), done=True),
                    ),
                )
            ]
        )
        outcome = run_vpa_loop(session, "break things", provider, embedder)
        assert outcome.completed and outcome.iterations == 2
        tool_msgs = [m for m in session.agent_history if m.role == ROLE_TOOL]
        assert any("tool error" in m.content for m in tool_msgs)
        assert all(m.tool_call_id for m in tool_msgs)

    def test_reproducible_end_to_end(self, carp_like_bundle, embedder, tmp_path):
        def run_once(tag):
            s = SessionState(
                carp_like_bundle, save_dir=tmp_path / tag, view_sample_count=12
            )
            s.stylizer = StubStylizationProvider()
            out = run_vpa_loop(
                s,
                "show only the fins, highlight the pectoral fin in red",
                scripted_fin_provider(),
                embedder,
            )
            log = [(e.kind, e.payload) for e in s.action_log]
            return out.executed_commands, log, s.render_current().pixels

        cmds_a, log_a, px_a = run_once("a")
        cmds_b, log_b, px_b = run_once("b")
        assert cmds_a == cmds_b
        assert log_a == log_b
        assert np.array_equal(px_a, px_b)

    def test_commands_carry_tool_provenance(self, session, embedder):
        run_vpa_loop(
            session, "show only the fins, highlight the pectoral fin in red",
            scripted_fin_provider(), embedder,
        )
        tool_entries = [e for e in session.action_log if e.kind == KIND_TOOL_CALL]
        assert all(e.tool_call_id for e in tool_entries)
        command_entries = [e for e in session.action_log if e.kind == "command"]
        assert command_entries, "executed commands must be logged"

    def test_memory_cap_after_15_turns(self, session, embedder):
        provider = ScriptedChatProvider(
            scenarios=[], default=ScenarioTurn("noted", (), True)
        )
        for i in range(15):
            run_vpa_loop(session, f"message {i}", provider, embedder, memory_cap=10)
        assert user_message_count(session.agent_history) <= 10
        assert session.agent_history[0].role == ROLE_SYSTEM

    def test_visionless_provider_gets_digest(self, session, embedder):
        seen = {}

        class DigestProbe:
            vision_capable = False

            def complete(self, messages, tools=()):
                seen["last"] = messages[-1]
                from splatlab.agents.messages import AssistantTurn

                return AssistantTurn("ok", (), True)

        run_vpa_loop(session, "what do you see", DigestProbe(), embedder)
        assert "[perception]" in seen["last"].content
        assert "Scene components" in seen["last"].content
        assert seen["last"].frame is None

    def test_vision_provider_gets_frame(self, session, embedder):
        seen = {}

        class FrameProbe:
            vision_capable = True

            def complete(self, messages, tools=()):
                seen["last"] = messages[-1]
                from splatlab.agents.messages import AssistantTurn

                return AssistantTurn("ok", (), True)

        run_vpa_loop(session, "look at the scene", FrameProbe(), embedder)
        assert seen["last"].frame is not None
