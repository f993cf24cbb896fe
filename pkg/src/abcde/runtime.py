"""Deterministic synchronous-round message passing between simulated agents.

Agents are stepped once per round in ascending id order.  A message sent in
round ``r`` between agents ``a`` and ``b`` becomes deliverable in round
``r + latency(a, b)`` (at least one round later).  Latency is fixed per pair,
so per-pair FIFO order holds.  Agents whose state machine is blocked and who
received nothing this round are skipped; their step would be a no-op.

Agent logic is written as generators: a ``yield`` suspends the agent until a
later round delivers more messages.
"""

from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
import io

from .exceptions import ContractViolation, ProtocolError, RoundAborted


class MessageKind(str, Enum):
    NEIGHBOR_VALUES = "NeighborValues"
    FITNESS_UP = "FitnessUp"
    GBEST_DOWN = "GbestDown"
    ELITE_DOWN = "EliteDown"
    EMPLOYED_UPDATE_REQUEST = "EmployedUpdateRequest"
    ONLOOKER_UPDATE_REQUEST = "OnlookerUpdateRequest"
    VALUE_REQUEST = "ValueRequest"
    VALUE_SHARE = "ValueShare"
    SOLUTION_REPLACE_DOWN = "SolutionReplaceDown"
    SCOUT_REINIT_REQUEST = "ScoutReinitRequest"
    SOLUTION_COPY_DOWN = "SolutionCopyDown"
    CONTROL = "Control"

    # Enum's default hash is a Python-level function; members are hashed on
    # every inbox and counter access.
    __hash__ = str.__hash__

    def __str__(self):
        return self.value


@dataclass(slots=True)
class Message:
    kind: MessageKind
    sender: int
    receiver: int
    round: int
    payload: dict = field(default_factory=dict)
    iteration: int = 0

    @property
    def solution_index(self):
        return self.payload.get("u", "")


class MailboxNetwork:
    """Per-agent inboxes plus send/delivery accounting.

    Parameters
    ----------
    agent_ids : iterable of int
    latency : callable (a, b) -> int, optional
        Rounds a message from ``a`` needs to reach ``b``; defaults to 1.
    log_messages : bool
        Keep a record of every sent message (see :meth:`dump_log`).
    """

    def __init__(self, agent_ids, latency=None, log_messages=False):
        self.agent_ids = tuple(sorted(agent_ids))
        self._valid = frozenset(self.agent_ids)
        self._latency_fn = latency
        self._latency_cache = {}
        self.round = 0
        self._pending = defaultdict(list)
        self._in_flight = 0
        self.sent = 0
        self.delivered = 0
        self.hops = 0
        self.sent_by_kind = Counter()
        self.sent_by_iteration = Counter()
        self.log = [] if log_messages else None

    def latency(self, a, b):
        key = (a, b)
        hops = self._latency_cache.get(key)
        if hops is None:
            hops = 1 if self._latency_fn is None else int(self._latency_fn(a, b))
            if hops < 1:
                raise ContractViolation(f"latency between {a} and {b} must be >= 1")
            self._latency_cache[key] = hops
        return hops

    def send(self, sender, receiver, kind, payload=None, iteration=0):
        hops = self._latency_cache.get((sender, receiver))
        if hops is None:
            if sender not in self._valid or receiver not in self._valid:
                raise ContractViolation(f"unknown agent in send {sender} -> {receiver}")
            if sender == receiver:
                raise ContractViolation(f"agent {sender} attempted to send to itself")
            hops = self.latency(sender, receiver)
        if not isinstance(kind, MessageKind):
            kind = MessageKind(kind)
        msg = Message(kind, sender, receiver, self.round, payload or {}, iteration)
        self._pending[self.round + hops].append(msg)
        self._in_flight += 1
        self.sent += 1
        self.hops += hops
        self.sent_by_kind[kind] += 1
        self.sent_by_iteration[iteration] += 1
        if self.log is not None:
            self.log.append((msg.round, msg.kind.value, sender, receiver, msg.solution_index))
        return msg

    @property
    def idle(self):
        return self._in_flight == 0

    def _collect(self):
        due = self._pending.pop(self.round, ())
        boxes = defaultdict(list)
        for msg in due:
            boxes[msg.receiver].append(msg)
        self._in_flight -= len(due)
        self.delivered += len(due)
        return boxes

    def run_round(self, agents):
        """Deliver due messages, step agents in ascending id order, advance the clock."""
        boxes = self._collect()
        for a in self.agent_ids:
            agent = agents.get(a)
            if agent is None:
                continue
            msgs = boxes.get(a)
            if msgs is None and not agent.runnable:
                continue
            try:
                agent.step(self, msgs or ())
            except ProtocolError:
                raise
            except Exception as exc:
                raise RoundAborted(self.round, a, exc) from exc
        self.round += 1

    def run(self, agents, max_rounds=10_000_000):
        """Run rounds until every agent finished its program and nothing is in flight."""
        start = self.round
        while True:
            busy = [a for a, ag in agents.items() if not ag.finished]
            if not busy and self.idle:
                return self.round - start
            if self.idle and not any(ag.runnable for ag in agents.values()):
                waits = ", ".join(f"agent {a} waits for {agents[a].waiting_for}" for a in busy[:5])
                raise ProtocolError(f"round {self.round}: protocol stalled; {waits}")
            if self.round - start >= max_rounds:
                raise ProtocolError(f"no quiescence after {max_rounds} rounds")
            self.run_round(agents)

    def dump_log(self):
        """Message log as CSV text: ``round,kind,from,to,solution_index``."""
        if self.log is None:
            raise ContractViolation("network was created without log_messages=True")
        buf = io.StringIO()
        buf.write("round,kind,from,to,solution_index\n")
        for rec in self.log:
            buf.write(",".join(str(v) for v in rec) + "\n")
        return buf.getvalue()


class ProgramAgent:
    """Base class for agents whose behaviour is a generator program.

    Messages whose kind is in ``serviced_kinds`` bypass the program and are
    answered by :meth:`service` after the program has advanced.
    """

    serviced_kinds = frozenset()

    def __init__(self, agent_id):
        self.id = agent_id
        self._program = None
        self._buffer = defaultdict(deque)
        self._service_queue = []
        self.runnable = False
        self.waiting_for = None

    @property
    def finished(self):
        return self._program is None

    def start(self, program):
        if self._program is not None:
            raise ProtocolError(f"agent {self.id} already runs a program")
        self._program = program
        self.runnable = True

    def pending_messages(self):
        return sum(len(q) for q in self._buffer.values())

    def step(self, net, messages):
        for msg in messages:
            if msg.kind in self.serviced_kinds:
                self._service_queue.append(msg)
            else:
                self._buffer[msg.kind].append(msg)
        self.runnable = False
        if self._program is not None:
            try:
                next(self._program)
            except StopIteration:
                self._program = None
                self.waiting_for = None
        if self._service_queue:
            queue, self._service_queue = self._service_queue, []
            for msg in queue:
                self.service(net, msg)

    def service(self, net, msg):
        raise ProtocolError(f"agent {self.id} cannot service {msg.kind}")

    def receive(self, kind, count=1, where=None):
        """Generator: block until ``count`` messages of ``kind`` (matching ``where``) arrived."""
        got = []
        while True:
            q = self._buffer[kind]
            if where is None:
                while q and len(got) < count:
                    got.append(q.popleft())
            elif q:
                keep = deque()
                while q:
                    msg = q.popleft()
                    if len(got) < count and where(msg):
                        got.append(msg)
                    else:
                        keep.append(msg)
                self._buffer[kind] = keep
            if len(got) == count:
                self.waiting_for = None
                return got
            self.waiting_for = (count - len(got), kind.value)
            yield
