"""Deterministic, seedable simulator for message-passing protocol machines.

Time is logical: one step delivers at most one envelope, chosen by a pluggable
scheduler, so asynchrony is exactly the scheduler's freedom. Links are
reliable and authenticated; per-pair FIFO delivery is switchable. A Byzantine
adversary may inject messages from faulty senders at every step and can read
everything in flight, but can never forge a correct sender.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from .quorums import ProcessSet


class SimulationError(RuntimeError):
    """A test-harness fault, e.g. an adversary forging a correct sender."""


@dataclass(frozen=True, slots=True)
class Envelope:
    """An authenticated point-to-point message in flight."""

    sender: int
    receiver: int
    seq: int
    payload: Any
    send_step: int


@dataclass(slots=True)
class Output:
    """A protocol-level event emitted by a machine (delivered bit, decision...)."""

    name: str
    value: Any = None
    round: Optional[int] = None


@dataclass(slots=True)
class Effects:
    """What one machine activation produced."""

    sends: list[tuple[int, Any]] = field(default_factory=list)
    outputs: list[Output] = field(default_factory=list)

    def send_to_all(self, n: int, payload: Any) -> None:
        for j in range(n):
            self.sends.append((j, payload))


class NodeMachine:
    """Deterministic per-process state machine driven by the simulation loop.

    Machines must not read wall-clock time or draw randomness; anything random
    (coin shares) arrives as message data.
    """

    halted: bool = False
    current_round: Optional[int] = None

    def start(self) -> Effects:
        return Effects()

    def on_message(self, sender: int, payload: Any) -> Effects:
        raise NotImplementedError


class Adversary:
    """Controls all faulty processes; may emit arbitrary payloads each step."""

    def on_step(self, view: "View") -> list[tuple[int, int, Any]]:
        return []


@dataclass(slots=True)
class Event:
    step: int
    kind: str  # send | deliver | output | halt | stall
    process: int = -1
    sender: Optional[int] = None
    receiver: Optional[int] = None
    seq: Optional[int] = None
    payload: Any = None
    name: Optional[str] = None
    value: Any = None
    round: Optional[int] = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"step": self.step, "kind": self.kind, "process": self.process}
        if self.kind in ("send", "deliver"):
            out["sender"] = self.sender
            out["receiver"] = self.receiver
            out["seq"] = self.seq
            out["payload"] = _payload_dict(self.payload)
        elif self.kind == "output":
            out["name"] = self.name
            out["value"] = _jsonable(self.value)
            out["round"] = self.round
        elif self.kind == "stall":
            out["name"] = self.name
        return out


def _payload_dict(payload: Any) -> dict:
    d = {"kind": type(payload).__name__}
    d.update(asdict(payload))
    return d


def _jsonable(value: Any) -> Any:
    if isinstance(value, (tuple, set, frozenset)):
        return sorted(value) if isinstance(value, (set, frozenset)) else list(value)
    return value


@dataclass
class Trace:
    """Full ordered record of one simulated execution."""

    n: int
    events: list[Event] = field(default_factory=list)
    steps: int = 0
    terminated: bool = False
    reason: str = ""
    stalled: bool = False
    decisions: dict[int, tuple[Any, Optional[int]]] = field(default_factory=dict)
    final_rounds: dict[int, Optional[int]] = field(default_factory=dict)
    messages_per_round: dict[Optional[int], int] = field(default_factory=dict)

    def outputs(self, name: Optional[str] = None, process: Optional[int] = None) -> list[Event]:
        return [
            e for e in self.events
            if e.kind == "output"
            and (name is None or e.name == name)
            and (process is None or e.process == process)
        ]

    def sends(self, sender: Optional[int] = None) -> list[Event]:
        return [e for e in self.events if e.kind == "send" and (sender is None or e.sender == sender)]

    def deliveries(self, receiver: Optional[int] = None) -> list[Event]:
        return [e for e in self.events if e.kind == "deliver" and (receiver is None or e.receiver == receiver)]

    def lines(self) -> list[str]:
        return [json.dumps(e.to_dict(), separators=(",", ":")) for e in self.events]

    def write_jsonl(self, fp) -> None:
        for line in self.lines():
            fp.write(line + "\n")


@dataclass(frozen=True)
class RunConfig:
    n: int
    faulty: ProcessSet
    fifo: bool = True
    max_steps: int = 1_000_000
    idle_cap: int = 1000

    def __post_init__(self) -> None:
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.faulty.n != self.n:
            raise ValueError("faulty set over a different universe")


class View:
    """Read-only window the scheduler and adversary get on the simulation."""

    def __init__(self, sim: "_Sim"):
        self._sim = sim

    @property
    def step(self) -> int:
        return self._sim.step

    @property
    def n(self) -> int:
        return self._sim.config.n

    @property
    def fifo(self) -> bool:
        return self._sim.config.fifo

    @property
    def faulty(self) -> ProcessSet:
        return self._sim.config.faulty

    @property
    def events(self) -> list[Event]:
        return self._sim.trace.events

    def rounds(self) -> dict[int, Optional[int]]:
        return {
            i: m.current_round for i, m in sorted(self._sim.machines.items())
        }

    def pending(self) -> list[Envelope]:
        out: list[Envelope] = []
        for key in sorted(self._sim.queues):
            out.extend(self._sim.queues[key])
        return out

    def pending_for_pair(self, sender: int, receiver: int) -> tuple[Envelope, ...]:
        q = self._sim.queues.get((sender, receiver))
        return tuple(q) if q else ()

    def coin_value(self, round_: int) -> Optional[int]:
        # unpredictability boundary: visible only once a correct process released
        if self._sim.coin_deal is None or round_ not in self._sim.released_rounds:
            return None
        return self._sim.coin_deal.coin_value(round_)


class Scheduler:
    """Strategy choosing which deliverable envelope goes next."""

    def __init__(self) -> None:
        self.stall_notes: list[str] = []

    def attach(self, config: RunConfig) -> None:
        pass

    def choose(self, deliverable: Sequence[Envelope], view: View) -> Optional[Envelope]:
        raise NotImplementedError


class RandomFairScheduler(Scheduler):
    """Uniform choice among deliverable envelopes, with an age cutoff.

    An envelope pending longer than fairness_bound steps is served
    oldest-first, which turns "eventually delivered" into a hard guarantee
    without distorting the statistics of young envelopes.
    """

    def __init__(self, seed: int, fairness_bound: Optional[int] = None):
        super().__init__()
        self._rng = random.Random(seed)
        self.fairness_bound = fairness_bound

    def attach(self, config: RunConfig) -> None:
        if self.fairness_bound is None:
            self.fairness_bound = 10 * config.n * config.n

    def choose(self, deliverable: Sequence[Envelope], view: View) -> Optional[Envelope]:
        if not deliverable:
            return None
        bound = self.fairness_bound if self.fairness_bound is not None else 10 * view.n * view.n
        overdue = [e for e in deliverable if view.step - e.send_step > bound]
        if overdue:
            return min(overdue, key=lambda e: (e.send_step, e.sender, e.receiver, e.seq))
        return deliverable[self._rng.randrange(len(deliverable))]


@dataclass(frozen=True)
class ScriptEntry:
    """One scripted delivery: the next message on (sender -> receiver) whose
    payload matches. Under FIFO, earlier messages of the pair are drained
    first so the target stays reachable."""

    sender: int
    receiver: int
    match: Callable[[Any], bool]
    label: str = ""


class ScriptProgram:
    """Supplies script entries on demand; lets an attack branch on run state.

    refill() returns the next batch of entries, [] to idle one step, or None
    to give up for good (the scheduler then falls back to fair delivery).
    """

    def refill(self, view: View) -> Optional[list[ScriptEntry]]:
        return None


_ENTRY_PATIENCE = 3


class ScriptedScheduler(Scheduler):
    """Delivers envelopes in scripted order, fair fallback for the rest."""

    def __init__(self, entries: Iterable[ScriptEntry] = (), fallback_seed: int = 0,
                 program: Optional[ScriptProgram] = None):
        super().__init__()
        self.queue: deque[ScriptEntry] = deque(entries)
        self.program: Optional[ScriptProgram] = program
        self.fallback = RandomFairScheduler(fallback_seed)
        self._patience = 0

    def attach(self, config: RunConfig) -> None:
        self.fallback.attach(config)

    def choose(self, deliverable: Sequence[Envelope], view: View) -> Optional[Envelope]:
        while True:
            if not self.queue:
                if self.program is None:
                    return self.fallback.choose(deliverable, view)
                batch = self.program.refill(view)
                if batch is None:
                    self.program = None
                    return self.fallback.choose(deliverable, view)
                if not batch:
                    return None  # idle; the adversary may act next step
                self.queue.extend(batch)
            entry = self.queue[0]
            pair = view.pending_for_pair(entry.sender, entry.receiver)
            env = self._locate(entry, pair, view.fifo)
            if env is not None:
                if view.fifo and env is not pair[0]:
                    return pair[0]  # drain toward the target
                if env is pair[0] or not view.fifo:
                    if entry.match(env.payload):
                        self.queue.popleft()
                        self._patience = 0
                    return env
            self._patience += 1
            if self._patience > _ENTRY_PATIENCE:
                self.stall_notes.append(f"script stall: {entry.label or entry}")
                self.queue.popleft()
                self._patience = 0
                continue
            return None

    @staticmethod
    def _locate(entry: ScriptEntry, pair: Sequence[Envelope], fifo: bool) -> Optional[Envelope]:
        for env in pair:
            if entry.match(env.payload):
                return env
        return None


class _Sim:
    def __init__(self, config: RunConfig, machines: Mapping[int, NodeMachine],
                 scheduler: Scheduler, adversary: Optional[Adversary], coin_deal):
        self.config = config
        self.machines = dict(machines)
        self.scheduler = scheduler
        self.adversary = adversary
        self.coin_deal = coin_deal
        self.queues: dict[tuple[int, int], deque[Envelope]] = {}
        self.seqs: dict[tuple[int, int], int] = {}
        self.trace = Trace(n=config.n)
        self.released_rounds: set[int] = set()
        self.step = 0
        self.view = View(self)

        correct = [i for i in range(config.n) if i not in config.faulty]
        missing = [i for i in correct if i not in self.machines]
        if missing:
            raise ValueError(f"machines missing for correct processes {missing}")
        for i in self.machines:
            if i in config.faulty:
                raise ValueError(f"machine supplied for faulty process {i}")

    # -- plumbing ------------------------------------------------------

    def enqueue(self, sender: int, receiver: int, payload: Any) -> None:
        if not 0 <= receiver < self.config.n:
            raise SimulationError(f"receiver {receiver} out of range")
        round_ = getattr(payload, "round", None)
        if round_ is None and sender in self.machines:
            round_ = self.machines[sender].current_round
        if sender in self.machines:
            self.trace.messages_per_round[round_] = self.trace.messages_per_round.get(round_, 0) + 1
        key = (sender, receiver)
        seq = self.seqs.get(key, 0) + 1
        self.seqs[key] = seq
        self.trace.events.append(Event(
            step=self.step, kind="send", process=sender,
            sender=sender, receiver=receiver, seq=seq, payload=payload, round=round_,
        ))
        machine = self.machines.get(receiver)
        if receiver in self.config.faulty or (machine is not None and machine.halted):
            return  # absorbed: adversary reads the trace; halted processes discard
        self.queues.setdefault(key, deque()).append(
            Envelope(sender, receiver, seq, payload, self.step)
        )

    def apply_effects(self, process: int, effects: Effects) -> None:
        for out in effects.outputs:
            self.trace.events.append(Event(
                step=self.step, kind="output", process=process,
                name=out.name, value=out.value, round=out.round,
            ))
            if out.name == "release-coin" and out.round is not None:
                self.released_rounds.add(out.round)
            elif out.name == "decide":
                self.trace.decisions.setdefault(process, (out.value, out.round))
        for receiver, payload in effects.sends:
            self.enqueue(process, receiver, payload)
        machine = self.machines[process]
        if machine.halted:
            self.trace.events.append(Event(step=self.step, kind="halt", process=process))
            for key in [k for k in self.queues if k[1] == process]:
                del self.queues[key]

    def deliverable(self) -> list[Envelope]:
        out: list[Envelope] = []
        for key in sorted(self.queues):
            q = self.queues[key]
            if not q:
                continue
            if self.config.fifo:
                out.append(q[0])
            else:
                out.extend(q)
        return out

    def deliver(self, env: Envelope) -> None:
        key = (env.sender, env.receiver)
        q = self.queues[key]
        if self.config.fifo and q[0] is not env:
            raise SimulationError("scheduler violated FIFO head-of-line delivery")
        q.remove(env)
        if not q:
            del self.queues[key]
        self.trace.events.append(Event(
            step=self.step, kind="deliver", process=env.receiver,
            sender=env.sender, receiver=env.receiver, seq=env.seq,
            payload=env.payload, round=getattr(env.payload, "round", None),
        ))
        machine = self.machines.get(env.receiver)
        if machine is None or machine.halted:
            return
        effects = machine.on_message(env.sender, env.payload)
        self.apply_effects(env.receiver, effects)

    def drain_stalls(self) -> None:
        if self.scheduler.stall_notes:
            for note in self.scheduler.stall_notes:
                self.trace.events.append(Event(
                    step=self.step, kind="stall", process=-1, name=note,
                ))
            self.trace.stalled = True
            self.scheduler.stall_notes.clear()

    # -- main loop -----------------------------------------------------

    def run(self) -> Trace:
        self.scheduler.attach(self.config)
        for i in sorted(self.machines):
            self.apply_effects(i, self.machines[i].start())

        idle_streak = 0
        while True:
            if all(m.halted for m in self.machines.values()):
                self.trace.terminated = True
                self.trace.reason = "halted"
                break
            if self.step >= self.config.max_steps:
                self.trace.reason = "max_steps"
                break

            emitted = 0
            if self.adversary is not None:
                for sender, receiver, payload in self.adversary.on_step(self.view):
                    if sender not in self.config.faulty:
                        raise SimulationError(
                            f"adversary attempted to forge correct sender {sender}"
                        )
                    self.enqueue(sender, receiver, payload)
                    emitted += 1

            deliverable = self.deliverable()
            if not deliverable:
                if emitted == 0:
                    self.trace.terminated = True
                    self.trace.reason = "quiescent"
                    break
                self.step += 1
                continue

            env = self.scheduler.choose(deliverable, self.view)
            self.drain_stalls()
            if env is None:
                idle_streak += 1
                if idle_streak > self.config.idle_cap:
                    self.trace.reason = "stalled"
                    break
                self.step += 1
                continue
            idle_streak = 0
            self.deliver(env)
            self.step += 1

        self.trace.steps = self.step
        self.trace.final_rounds = {
            i: m.current_round for i, m in sorted(self.machines.items())
        }
        return self.trace


def run(config: RunConfig, machines: Mapping[int, NodeMachine], scheduler: Scheduler,
        adversary: Optional[Adversary] = None, coin_deal=None) -> Trace:
    """Execute one deterministic simulation; identical inputs give identical traces."""
    return _Sim(config, machines, scheduler, adversary, coin_deal).run()
