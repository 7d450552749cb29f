"""The episode loop: observe, decide, ground, apply, record."""

from __future__ import annotations

import random
from pathlib import Path
from typing import Any, Callable, Mapping

from ..agents.base import Agent, make_agent
from ..agents.grounding import ground, match_legal
from ..agents.types import AgentSpec, GroundingPolicy
from ..errors import AgentFailure, EnvInvariantError, IllegalActionError, ResponseParseError
from ..seeding import derive_seed, make_rng
from ..tracker.records import StepRecord, counter_delta, flatten_counters, text_digest
from ..tracker.store import MemorySink, TrajectorySink, TrajectoryWriter
from .config import ScenarioConfig
from .env import GameEnv, make_env
from .types import Decision, MatchResult, Observation, StepOutcome

GROUNDING_COUNTERS = (
    "successful_groundings",
    "total_grounding_attempts",
    "model_outputs",
    "effective_actions",
)


def match_id_for(config: ScenarioConfig, run: int) -> str:
    return f"{config.name}-{run:03d}-{config.seed}"


def env_seed(config: ScenarioConfig, run: int) -> int:
    return derive_seed(config.seed, "env", run)


class _Match:
    """Mutable bookkeeping for one match in progress."""

    def __init__(self, env: GameEnv, agents: Mapping[str, Agent], sink: TrajectorySink,
                 match_id: str, max_steps: int, policies: Mapping[str, GroundingPolicy],
                 rng: random.Random):
        self.env = env
        self.agents = agents
        self.sink = sink
        self.match_id = match_id
        self.max_steps = max_steps
        self.policies = policies
        self.rng = rng
        self.step_index = 0
        self.grounding = {seat: dict.fromkeys(GROUNDING_COUNTERS, 0.0) for seat in env.seats}
        self.forfeited_by: str | None = None

    # -- counters ----------------------------------------------------------
    def seat_counters(self, seat: str) -> dict[str, float]:
        return {**self.env.counters(seat), **self.grounding[seat]}

    def snapshot(self) -> dict[str, float]:
        return flatten_counters({seat: self.seat_counters(seat) for seat in self.env.seats})

    def _bump(self, seat: str, name: str, by: float = 1.0) -> None:
        self.grounding[seat][name] += by

    # -- recording ---------------------------------------------------------
    def _record(self, seat: str, obs_digest: str, phase_tag: str, action: str | None, action_type: str,
                legality: dict[str, Any], context: dict[str, float], agent: Agent | None,
                reasoning: str | None, events: list[dict[str, Any]]) -> None:
        remote = agent is not None and agent.kind == "remote"
        record = StepRecord(
            match_id=self.match_id,
            step_index=self.step_index,
            phase_tag=phase_tag,
            actor=seat,
            observation_digest=obs_digest,
            parsed_action=action,
            action_type=action_type,
            legality=legality,
            decision_context=context,
            outcome=counter_delta(context, self.snapshot()),
            prompt_text=agent.last_prompt if remote else None,
            raw_response=agent.last_response if remote else None,
            prompt_digest=text_digest(agent.last_prompt) if remote and agent.last_prompt else None,
            reasoning=reasoning or None,
            events=events,
        )
        self.sink.record_step(record)
        self.step_index += 1

    def _apply(self, seat: str, action: str) -> tuple[str, StepOutcome]:
        action_type = self.env.classify(seat, action)
        try:
            outcome = self.env.step(seat, action)
        except IllegalActionError as exc:
            raise EnvInvariantError(f"listed legal action {action!r} was rejected: {exc}") from None
        self.env.check_invariants()
        return action_type, outcome

    # -- one turn ----------------------------------------------------------
    def take_turn(self, seat: str) -> list[StepOutcome]:
        obs = self.env.observe(seat, self.step_index)
        if not obs.legal_actions:
            raise EnvInvariantError(f"{seat} is to move but has no legal action")
        agent = self.agents[seat]
        context = self.snapshot()
        outputs = 0

        def query(feedback: str | None) -> Decision | None:
            nonlocal outputs
            outputs += 1
            try:
                return agent.decide(obs, feedback)
            except ResponseParseError:
                return None

        try:
            first = query(None)
            result = ground(
                first,
                obs.legal_actions,
                self.policies[seat],
                requery=query,
                max_retries=agent.max_retries,
                rng=self.rng,
                matches=self.env.action_matches,
            )
        except AgentFailure as exc:
            self._bump(seat, "model_outputs", outputs)
            self._bump(seat, "total_grounding_attempts", outputs)
            return self._agent_failed(seat, obs, context, agent, str(exc), outputs)

        self._bump(seat, "model_outputs", result.attempts)
        self._bump(seat, "total_grounding_attempts", result.attempts)
        if result.succeeded:
            self._bump(seat, "successful_groundings")
        decision = result.decision or Decision.single(result.final_action)
        legality = {
            "attempts": result.attempts,
            "successes": 1 if result.succeeded else 0,
            "succeeded": result.succeeded,
            "fallback_used": result.fallback_used,
            "requested": result.decision.actions[0] if result.decision is not None else None,
        }
        return self.apply_composite(seat, decision, obs, context, agent,
                                    first_action=result.final_action, first_legality=legality)

    def apply_composite(self, seat: str, decision: Decision, obs: Observation | None = None,
                        context: dict[str, float] | None = None, agent: Agent | None = None,
                        first_action: str | None = None,
                        first_legality: dict[str, Any] | None = None) -> list[StepOutcome]:
        """Apply ``decision.actions`` in order for ``seat``.

        The first action may arrive pre-grounded. Every later action is
        grounded on its own against the then-legal set (one attempt each,
        no re-query); an illegal one is swapped for a random legal action.
        The list stops early when the match ends, the step cap is hit, or
        the seat has nothing left to do this turn.
        """
        outcomes: list[StepOutcome] = []
        for i, requested in enumerate(decision.actions):
            if self.env.is_terminal() or self.step_index >= self.max_steps:
                break
            if i == 0 and first_action is not None:
                action, legality = first_action, dict(first_legality or {})
                cur_obs, cur_context = obs, context
            else:
                legal = self.env.legal_actions(seat)
                if not legal:
                    break
                cur_obs = self.env.observe(seat, self.step_index)
                cur_context = self.snapshot()
                matched = match_legal(requested, legal, self.env.action_matches)
                self._bump(seat, "total_grounding_attempts")
                if matched is not None:
                    self._bump(seat, "successful_groundings")
                    action = matched
                else:
                    action = self.rng.choice(legal)
                ok = matched is not None
                legality = {
                    "attempts": 1,
                    "successes": int(ok),
                    "succeeded": ok,
                    "fallback_used": not ok,
                    "requested": requested,
                }
            if cur_obs is None:
                cur_obs = self.env.observe(seat, self.step_index)
            if cur_context is None:
                cur_context = self.snapshot()
            action_type, outcome = self._apply(seat, action)
            if legality.get("succeeded"):
                self._bump(seat, "effective_actions")
            self._record(seat, text_digest(cur_obs.text_view), cur_obs.phase_tag, outcome.action,
                         action_type, legality, cur_context, agent,
                         decision.reasoning if i == 0 else None, outcome.events)
            outcomes.append(outcome)
            if outcome.terminal:
                break
        return outcomes

    def _agent_failed(self, seat: str, obs: Observation, context: dict[str, float], agent: Agent,
                      message: str, outputs: int) -> list[StepOutcome]:
        legality = {
            "attempts": outputs,
            "successes": 0,
            "succeeded": False,
            "fallback_used": False,
            "requested": None,
            "failure": message,
        }
        substitute = self.env.failure_substitute(seat)
        if substitute is not None and self.env.is_legal(seat, substitute):
            legality["substituted"] = True
            action_type, outcome = self._apply(seat, substitute)
            self._record(seat, text_digest(obs.text_view), obs.phase_tag, outcome.action, action_type,
                         legality, context, agent, None, outcome.events)
            return [outcome]
        self.env.forfeit(seat)
        self.forfeited_by = seat
        self._record(seat, text_digest(obs.text_view), obs.phase_tag, None, "other", legality,
                     context, agent, None, [{"kind": "forfeit", "seat": seat, "reason": message}])
        return []

    def result(self) -> MatchResult:
        return MatchResult(
            match_id=self.match_id,
            winner=self.env.winner,
            end_reason=self.env.end_reason,
            steps_taken=self.step_index,
            final_counters={seat: self.seat_counters(seat) for seat in self.env.seats},
            forfeited_by=self.forfeited_by,
        )


def run_match(
    config: ScenarioConfig,
    env: GameEnv,
    agents: Mapping[str, Agent],
    tracker: TrajectorySink,
    *,
    run: int = 0,
    match_id: str | None = None,
    trajectory_ref: str | None = None,
) -> MatchResult:
    """Play one match to completion (or the step cap) and record every step.

    An agent that fails outright forfeits unless the game supplies a
    substitute action. An environment invariant violation aborts the match:
    a result record marked ``aborted`` is written and the error re-raised.
    """
    match_id = match_id or match_id_for(config, run)
    specs = config.resolved_bindings()
    policies = {
        seat: specs[seat].policy if seat in specs else GroundingPolicy.RETRY_THEN_RANDOM
        for seat in env.seats
    }
    missing = [s for s in env.seats if s not in agents]
    if missing:
        raise EnvInvariantError(f"no agent for seat(s) {', '.join(missing)}")
    m = _Match(env, agents, tracker, match_id, config.max_steps, policies,
               make_rng(env.seed, "fallback"))
    tracker.write_header({
        "match_id": match_id,
        "game_id": config.game_id,
        "scenario": config.name,
        "run": run,
        "scenario_seed": config.seed,
        "env_seed": env.seed,
        "max_steps": config.max_steps,
        "scene_variables": dict(config.scene_variables),
        "seats": list(env.seats),
        "evaluated_seat": config.scored_seat,
        "agents": {seat: spec.to_dict() for seat, spec in specs.items()},
        "env": env.header(),
        "initial_counters": m.snapshot(),
    })
    try:
        while not env.is_terminal():
            if m.step_index >= config.max_steps:
                env.finish_step_limit()
                break
            seat = env.current_seat()
            if seat is None:
                raise EnvInvariantError("match is not over but no seat is to move")
            m.take_turn(seat)
    except EnvInvariantError as exc:
        tracker.write_result({"match_id": match_id, "aborted": True, "error": str(exc),
                              "steps_taken": m.step_index})
        raise
    result = m.result()
    result.trajectory_ref = trajectory_ref
    tracker.write_result(result.to_dict())
    return result


def apply_composite(env: GameEnv, seat: str, decision: Decision, *, tracker: TrajectorySink | None = None,
                    rng: random.Random | None = None, match_id: str = "adhoc", max_steps: int = 10**9,
                    first_step_index: int = 0) -> tuple[list[StepOutcome], dict[str, float]]:
    """Apply a composite decision outside a full match.

    Every action, including the first, is grounded individually. Returns
    the outcomes and the seat's grounding counters.
    """
    sink = tracker if tracker is not None else MemorySink()
    m = _Match(env, {}, sink, match_id, max_steps, {}, rng or make_rng(env.seed, "fallback"))
    m.step_index = first_step_index
    outcomes = m.apply_composite(seat, decision)
    return outcomes, dict(m.grounding[seat])


TransportFactory = Callable[[str, AgentSpec], Any]


def build_agents(config: ScenarioConfig, run: int,
                 transport_factory: TransportFactory | None = None) -> dict[str, Agent]:
    agents = {}
    for seat, spec in config.resolved_bindings().items():
        transport = transport_factory(seat, spec) if transport_factory is not None else None
        agents[seat] = make_agent(spec, config.game_id, seat, config.seed, run, transport)
    return agents


def execute_match(config: ScenarioConfig, run: int, trajectory_path: str | Path | None = None,
                  sink: TrajectorySink | None = None, transport_factory: TransportFactory | None = None,
                  durable: bool = True) -> MatchResult:
    """Build env and agents for ``run`` of ``config`` and play it."""
    env = make_env(config.game_id, config.scene_variables, env_seed(config, run))
    agents = build_agents(config, run, transport_factory)
    owned = sink is None
    if sink is None:
        if trajectory_path is None:
            sink = MemorySink()
        else:
            sink = TrajectoryWriter(trajectory_path, durable=durable)
    try:
        ref = Path(trajectory_path).name if trajectory_path is not None else None
        return run_match(config, env, agents, sink, run=run, trajectory_ref=ref)
    finally:
        for agent in agents.values():
            agent.close()
        if owned:
            sink.close()
