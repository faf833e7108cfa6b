"""Edge and contract coverage that did not fit a single module test file."""

import asyncio
import math

import numpy as np
import pytest

from splatlab.agents.messages import ToolCall
from splatlab.agents.providers import Scenario, ScenarioTurn, ScriptedChatProvider
from splatlab.agents.runtime import run_vpa_loop
from splatlab.commands import SetVisibility, execute_command
from splatlab.core.types import ComponentEdit, LightMode, LightState
from splatlab.errors import ProviderError
from splatlab.render.rasterizer import flatten_component, render_components
from splatlab.semantic.index import SemanticComponent, SemanticIndex, query_components
from splatlab.semantic.providers import StubEmbeddingProvider
from splatlab.session import SessionState


class TestLightDirections:
    def test_orbital_direction_from_angles(self):
        light = LightState(azimuth=0.3, polar=1.1, magnitude=1.0, mode=LightMode.ORBITAL)
        direction = np.asarray(light.direction((0.0, 0.0, 1.0)))
        expected = np.array(
            [
                math.sin(1.1) * math.cos(0.3),
                math.sin(1.1) * math.sin(0.3),
                math.cos(1.1),
            ]
        )
        assert np.allclose(direction, expected)
        assert np.linalg.norm(direction) == pytest.approx(1.0)

    def test_headlight_follows_view(self):
        light = LightState(azimuth=2.0, polar=0.4, mode=LightMode.HEADLIGHT)
        assert light.direction((0.0, 1.0, 0.0)) == (0.0, 1.0, 0.0)


class TestQueryProviderFailure:
    def test_failure_carries_cause(self):
        class Boom(StubEmbeddingProvider):
            def embed_text(self, text):
                raise RuntimeError("encoder offline")

        index = SemanticIndex(
            (SemanticComponent("a", "a", np.ones(4), "vision_only"),), 4
        )
        with pytest.raises(ProviderError) as err:
            query_components(index, "anything", Boom(4))
        assert isinstance(err.value.__cause__, RuntimeError)


class TestFinsOnlyPixels:
    def test_hidden_body_contributes_nothing(self, carp_like_bundle, tmp_path):
        session = SessionState(carp_like_bundle, save_dir=tmp_path, view_sample_count=12)
        fins = ("pectoral_fin", "tail_fin", "dorsal_fin")
        for comp in session.scene.components:
            execute_command(
                SetVisibility(
                    component=comp.component_id, visible=comp.component_id in fins
                ),
                session,
            )
        via_edits = session.render_current()
        # reference: render the fin components alone (no body at all)
        fins_only = render_components(
            [flatten_component(session.scene.component(cid)) for cid in fins],
            session.light,
            session.camera,
            session.background,
        )[0]
        assert np.array_equal(via_edits.pixels, fins_only.pixels)


class TestQueryOnlySessionRejected:
    def test_gateway_refuses_unrenderable_bundle(self, two_sphere_bundle, stub_provider, tmp_path):
        from fastapi.testclient import TestClient

        from splatlab.io.ingest import ingest_multiview
        from splatlab.render.rasterizer import flatten_component as flat
        from splatlab.service.app import create_app
        from splatlab.service.config import ServiceConfig
        from splatlab.service.sessions import SessionManager
        from splatlab.views import sample_icosphere_cameras

        comp = two_sphere_bundle.scene.components[0]
        cams = sample_icosphere_cameras(3, comp.bounding_sphere.center, 5.0, width=32, height=32)
        frames = [
            render_components([flat(comp)], two_sphere_bundle.scene.global_light, cam)[0]
            for cam in cams
        ]
        query_only = ingest_multiview(
            "qonly", {"c": frames}, {"c": cams}, {"c": "thing"}, stub_provider, k=2
        )
        config = ServiceConfig(scenes_dir=str(tmp_path), save_dir=str(tmp_path / "s"))
        manager = SessionManager(config)
        manager.registry.register(query_only)
        with TestClient(create_app(config, manager)) as client:
            response = client.post("/sessions", json={"scene_id": "qonly"})
            assert response.status_code == 409
            assert manager.handles == {}


class TestToolAuditCompleteness:
    def test_three_tools_three_log_entries_in_order(self, carp_like_bundle, tmp_path):
        session = SessionState(carp_like_bundle, save_dir=tmp_path, view_sample_count=12)
        provider = ScriptedChatProvider(
            scenarios=[
                Scenario(
                    "everything",
                    (
                        ScenarioTurn(
                            "running three tools",
                            (
                                ToolCall("c1", "stylize_2d", {"target": "all", "prompt": "ink"}),
                                ToolCall("c2", "scene_edit", {"commands": [
                                    {"cmd": "set_opacity", "component": "body", "scale": 0.5}
                                ]}),
                                ToolCall("c3", "knowledge_qa", {"question": "fins"}),
                            ),
                            done=True,
                        ),
                    ),
                )
            ]
        )
        from splatlab.agents.stylize import StubStylizationProvider

        session.stylizer = StubStylizationProvider()
        run_vpa_loop(session, "do everything", provider, StubEmbeddingProvider(32))
        tool_entries = [e for e in session.action_log if e.kind == "tool_call"]
        assert [e.detail for e in tool_entries] == ["knowledge_qa", "scene_edit", "stylize_2d"]


class TestChatQueueing:
    def test_two_chats_serialize_in_order(self, carp_like_bundle, tmp_path):
        from splatlab.service.config import ServiceConfig
        from splatlab.service.sessions import SessionManager

        config = ServiceConfig(
            scenes_dir=str(tmp_path), save_dir=str(tmp_path / "saved"),
            view_sample_count=12, entropy_resolution=48,
        )
        manager = SessionManager(config)
        manager.registry.register(carp_like_bundle)
        manager.chat_provider = ScriptedChatProvider(
            [], default=ScenarioTurn("done", (), True)
        )
        handle = manager.create_session("fishlike")

        async def scenario():
            first = asyncio.create_task(handle.run_chat("first message"))
            second = asyncio.create_task(handle.run_chat("second message"))
            return await asyncio.gather(first, second)

        outcomes = asyncio.run(scenario())
        assert all(o["completed"] for o in outcomes)
        users = [m.content for m in handle.session.agent_history if m.role == "user"]
        assert users == ["first message", "second message"]
        assert len(manager.metrics.records_for(handle.session.id)) == 2


class TestEditInvariantMaintenance:
    def test_identity_edit_render_matches_no_edit(self, two_sphere_bundle):
        scene = two_sphere_bundle.scene
        cam = two_sphere_bundle.default_camera.with_size(48, 48)
        from splatlab.render.rasterizer import render

        a = render(scene, None, cam)
        b = render(scene, {cid: ComponentEdit() for cid in scene.component_ids()}, cam)
        assert np.array_equal(a.pixels, b.pixels)
