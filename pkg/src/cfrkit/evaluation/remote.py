"""Remote opponent: an Agent speaking a configurable JSON-over-HTTP
session protocol.

The wire format is config-driven (endpoint paths, verb names, field
names) because every public poker-bot API spells these differently.  The
client opens a session (authenticating with a token if given), announces
each hand, relays incremental state (opponent actions and board cards) as
events, and asks the server for an action at each of the remote seat's
decisions.

Failure policy: a 5xx response is retried once after a backoff, then the
hand is forfeited with the logged reason; a transport-level failure
aborts the session, and the match runner reports stats over the hands
completed so far.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import requests

from ..games import Action, DEAL, FOLD, CALL, RAISE
from .agents import Agent, Observation
from .match import ForfeitHand

__all__ = ["RemoteConfig", "RemoteAgent", "SessionAbort",
           "serialize_action", "parse_wire_action"]


class SessionAbort(Exception):
    """Transport failure: the session cannot continue."""


@dataclass(frozen=True)
class RemoteConfig:
    """Endpoint layout and field-name map for one remote service."""

    base_url: str
    paths: dict = field(default_factory=lambda: {
        "session": "/session", "hand": "/hand", "act": "/act",
        "event": "/event"})
    fields: dict = field(default_factory=lambda: {
        "action": "action", "amount": "amount", "session": "session",
        "token": "token"})
    verbs: dict = field(default_factory=lambda: {
        FOLD: "Fold", CALL: "Call", RAISE: "RaiseTo"})
    token: Optional[str] = None
    timeout: float = 10.0
    retries: int = 1
    backoff: float = 0.5


def serialize_action(action: Action, config: RemoteConfig) -> dict:
    out = {config.fields["action"]: config.verbs[action.kind]}
    if action.kind == RAISE:
        out[config.fields["amount"]] = action.amount
    return out


def parse_wire_action(payload: dict, config: RemoteConfig) -> Action:
    verb = payload[config.fields["action"]]
    kinds = {v: k for k, v in config.verbs.items()}
    kind = kinds.get(verb)
    if kind is None:
        raise ForfeitHand(f"unknown wire verb {verb!r}")
    if kind == RAISE:
        return Action(RAISE, int(payload[config.fields["amount"]]))
    return Action(kind)


class RemoteAgent(Agent):
    """Plays the seat a remote service controls."""

    def __init__(self, config: RemoteConfig, *, sleep=None) -> None:
        self.config = config
        self.session_id: Optional[str] = None
        self.transcript: list[tuple[str, dict]] = []
        import time as _time
        self._sleep = sleep or _time.sleep

    # ── transport ────────────────────────────────────────────────────────

    def _post(self, path_key: str, payload: dict) -> dict:
        cfg = self.config
        url = cfg.base_url.rstrip("/") + cfg.paths[path_key]
        if self.session_id is not None:
            payload = {**payload, cfg.fields["session"]: self.session_id}
        self.transcript.append((path_key, payload))
        delay = cfg.backoff
        for attempt in range(cfg.retries + 1):
            try:
                resp = requests.post(url, json=payload,
                                     timeout=cfg.timeout)
            except requests.RequestException as exc:
                raise SessionAbort(f"transport failure: {exc}") from exc
            if resp.status_code < 500:
                break
            if attempt < cfg.retries:
                self._sleep(delay)
                delay *= 2.0
        if resp.status_code >= 500:
            raise ForfeitHand(f"server error {resp.status_code} on "
                              f"{path_key}")
        if resp.status_code >= 400:
            raise ForfeitHand(f"rejected ({resp.status_code}): "
                              f"{resp.text[:200]}")
        return resp.json() if resp.content else {}

    def connect(self) -> None:
        cfg = self.config
        payload = {}
        if cfg.token is not None:
            payload[cfg.fields["token"]] = cfg.token
        reply = self._post("session", payload)
        self.session_id = reply.get(cfg.fields["session"])

    # ── agent interface ──────────────────────────────────────────────────

    def notify(self, event: tuple) -> None:
        if self.session_id is None:
            self.connect()
        kind = event[0]
        if kind == "hand_start":
            _, seat, cards = event
            self._post("hand", {"seat": seat, "cards": list(cards)})
        elif kind == "opp_action":
            self._post("event", serialize_action(event[1], self.config))
        elif kind == "chance":
            self._post("event", {"deal": list(event[1])})

    def act(self, obs: Observation) -> Action:
        if self.session_id is None:
            self.connect()
        h = obs.history
        payload = {
            "board": list(h.board),
            "pot": h.pot,
            "to_call": max(h.committed) - h.committed[obs.seat],
            "legal": [serialize_action(a, self.config)
                      for a in obs.legal],
        }
        reply = self._post("act", payload)
        action = parse_wire_action(reply, self.config)
        if action.kind == DEAL or action not in obs.legal:
            raise ForfeitHand(f"remote action {action} not legal here")
        return action
