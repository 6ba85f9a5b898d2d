"""Session server protocol tests."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from rex.cli import builtin_corpus_dir
from rex.harness import load_case, run_case
from rex.notebook import notebook_to_obj
from rex.reaction import Policy
from rex.service import create_app

MAP_APPEND_DOC = {
    "cells": [
        {"id": "c1", "source": 'x = {"a": [], "b": []}'},
        {"id": "c2", "source": 'x["a"].append(1)'},
        {"id": "c3", "source": "z = 123"},
        {"id": "c4", "source": "print(x)"},
    ]
}
VAL_SWAP_DOC = {
    "cells": [
        {"id": "c1", "source": "a = 9"},
        {"id": "c2", "source": "b = 5"},
        {"id": "c3", "source": "a, b = b, a"},
        {"id": "c4", "source": 'print("a:", a, "b:", b)'},
    ]
}


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


class Driver:
    """Tiny request/reply WebSocket client for tests."""

    def __init__(self, ws):
        self.ws = ws
        self.req = 0

    def ask(self, op: str, **fields) -> list[dict]:
        self.req += 1
        self.ws.send_json({"req": self.req, "op": op, **fields})
        events = []
        while True:
            event = self.ws.receive_json()
            assert event["req"] == self.req  # correlation
            if event["ev"] == "done":
                return events
            events.append(event)

    def one(self, events: list[dict], ev: str) -> dict:
        matches = [e for e in events if e["ev"] == ev]
        assert len(matches) == 1, f"expected one {ev}, got {events}"
        return matches[0]


class TestOpen:
    def test_http_open_streams_outputs(self, client):
        resp = client.post("/session", json={"notebook": MAP_APPEND_DOC})
        assert resp.status_code == 200
        body = resp.json()
        assert body["session"]
        outputs = {
            e["cell"]: e["text"] for e in body["events"] if e["ev"] == "output"
        }
        assert outputs["c4"] == '{"a": [1], "b": []}\n'

    def test_http_open_empty_notebook(self, client):
        resp = client.post("/session", json={"notebook": {"cells": []}})
        events = resp.json()["events"]
        assert [e["ev"] for e in events if e["ev"] == "output"] == []

    def test_http_open_malformed_document(self, client):
        resp = client.post("/session", json={"notebook": {"nope": 1}})
        assert resp.status_code == 422

    def test_ws_open(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            events = driver.ask("open", notebook=MAP_APPEND_DOC, policy="dynamic")
            assert driver.one(events, "session")["session"]
            assert driver.one(events, "state_digest")["digest"]


class TestEditPlanReact:
    def test_map_append_features_edit_previews_dynamic_plan(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            driver.ask("open", notebook=MAP_APPEND_DOC, policy="dynamic")
            events = driver.ask("edit_cell", cell="c2", source='x["b"].append(1)')
            analysis = driver.one(events, "analysis")
            assert analysis["stale"] == ["c1", "c2", "c4"]
            assert analysis["plan"] == ["c1", "c2", "c4"]

    def test_noop_edit_has_empty_plan(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            driver.ask("open", notebook=MAP_APPEND_DOC)
            events = driver.ask("edit_cell", cell="c2", source='x["a"].append(1)')
            assert driver.one(events, "analysis")["plan"] == []

    def test_two_phase_no_execution_until_react(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            opened = driver.ask("open", notebook=MAP_APPEND_DOC, policy="dynamic")
            digest0 = driver.one(opened, "state_digest")["digest"]
            driver.ask("edit_cell", cell="c2", source='x["b"].append(1)')
            reacted = driver.ask("react")
            outputs = {
                e["cell"]: e["text"] for e in reacted if e["ev"] == "output"
            }
            assert outputs["c4"] == '{"a": [], "b": [1]}\n'
            digest1 = driver.one(reacted, "state_digest")["digest"]
            assert digest1 != digest0

    def test_static_redefinition_returns_lint(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            driver.ask("open", notebook=VAL_SWAP_DOC, policy="static")
            events = driver.ask("edit_cell", cell="c2", source="b = 8")
            lint = driver.one(events, "lint")
            kinds = {v["kind"] for v in lint["violations"]}
            assert kinds == {"Redefinition"}
            assert driver.one(events, "analysis")["plan"] == []

    def test_react_with_empty_plan_keeps_digest(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            opened = driver.ask("open", notebook=VAL_SWAP_DOC)
            digest0 = driver.one(opened, "state_digest")["digest"]
            reacted = driver.ask("react")
            assert driver.one(reacted, "state_digest")["digest"] == digest0

    def test_policy_switch_replans_same_edit(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            driver.ask("open", notebook=MAP_APPEND_DOC, policy="run-subsequent")
            events = driver.ask("edit_cell", cell="c2", source='x["b"].append(1)')
            assert driver.one(events, "analysis")["plan"] == ["c2", "c3", "c4"]
            events = driver.ask("set_policy", policy="dynamic")
            assert driver.one(events, "analysis")["plan"] == ["c1", "c2", "c4"]

    def test_rerun_all_react_resets_created_files(self, client):
        doc = {
            "cells": [
                {"id": "c1", "source": 'file_append("log", "x")'},
                {"id": "c2", "source": "n = 1"},
                {"id": "c3", "source": 'print(file_read("log"))'},
            ]
        }
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            driver.ask("open", notebook=doc, policy="rerun-all")
            driver.ask("edit_cell", cell="c2", source="n = 2")
            reacted = driver.ask("react")
            outputs = {
                e["cell"]: e["text"] for e in reacted if e["ev"] == "output"
            }
            assert outputs["c3"] == "x\n"  # single append: reset happened

    def test_unknown_cell_is_an_error_reply(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            driver.ask("open", notebook=VAL_SWAP_DOC)
            events = driver.ask("edit_cell", cell="zz", source="a = 1")
            assert events[0]["ev"] == "error"

    def test_parse_error_edit_surfaces_in_analysis(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            driver.ask("open", notebook=VAL_SWAP_DOC)
            events = driver.ask("edit_cell", cell="c2", source="b =")
            analysis = driver.one(events, "analysis")
            assert analysis["plan"] == ["c2"]
            assert "parse error" in analysis["error"]


class TestIsolationAndOrdering:
    def test_sessions_do_not_share_state(self, client):
        with client.websocket_connect("/ws") as first:
            d1 = Driver(first)
            d1.ask("open", notebook=VAL_SWAP_DOC)
            with client.websocket_connect("/ws") as second:
                d2 = Driver(second)
                doc = {"cells": [{"id": "c1", "source": "a = 777\nprint(a)"}]}
                events = d2.ask("open", notebook=doc)
                outputs = [e for e in events if e["ev"] == "output"]
                assert outputs[0]["text"] == "777\n"
            events = d1.ask("run_cell", cell="c4")
            out = [e for e in events if e["ev"] == "output"][0]
            assert out["text"] == "a: 5 b: 9\n"

    def test_reset_restores_fresh_run(self, client):
        with client.websocket_connect("/ws") as ws:
            driver = Driver(ws)
            opened = driver.ask("open", notebook=MAP_APPEND_DOC, policy="run-subsequent")
            digest0 = driver.one(opened, "state_digest")["digest"]
            driver.ask("edit_cell", cell="c2", source='x["b"].append(1)')
            driver.ask("react")  # leaves the stale mutation behind
            reset = driver.ask(
                "edit_cell", cell="c2", source='x["a"].append(1)'
            )
            reset = driver.ask("reset")
            assert driver.one(reset, "state_digest")["digest"] == digest0


class TestEngineEquivalence:
    def test_service_digest_matches_harness_digest(self, client):
        corpus = builtin_corpus_dir()
        names = [
            "aliasing_val_swap",
            "map_subscript_append",
            "func_list_append",
            "direct_rhs_literal",
        ]
        for name in names:
            case = load_case(corpus / f"{name}.json")
            assert case.edit.kind == "modify"
            expected = run_case(case, Policy("dynamic"))
            with client.websocket_connect("/ws") as ws:
                driver = Driver(ws)
                driver.ask(
                    "open",
                    notebook=notebook_to_obj(case.original),
                    policy="dynamic",
                    fs=case.fs_initial,
                )
                driver.ask(
                    "edit_cell",
                    cell=case.edit.cell_id,
                    source=case.edit.new_source,
                )
                reacted = driver.ask("react")
                digest = driver.one(reacted, "state_digest")["digest"]
            assert digest == expected.digest, name
