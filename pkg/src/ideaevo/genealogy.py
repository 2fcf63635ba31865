"""Evolutionary event log and idea genealogies.

Event-log files are line oriented.  Lines starting with ``#`` carry
provenance (the resolved config and the initial population as
``# initial=<id>:<encoding>|...``), followed by the fixed header
:data:`LOG_HEADER` and one record per event.
"""

from dataclasses import dataclass, field

from .evolution import OperatorKind

LOG_FIELDS = (
    "step", "iteration", "agent", "operator", "parents",
    "child", "removed", "skipped", "child_encoding",
)
LOG_HEADER = ",".join(LOG_FIELDS)


class MalformedLogError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class EvolutionaryEvent:
    step: int
    iteration: int
    agent: int
    operator: OperatorKind
    parents: tuple = ()
    child: int = None
    removed: int = None
    skipped: bool = False
    child_encoding: int = None

    @classmethod
    def from_outcome(cls, step, iteration, agent, out):
        return cls(step, iteration, agent, out.operator, tuple(out.parents),
                   out.child, out.removed, out.skipped, out.child_encoding)

    @property
    def degenerate(self):
        """Recombination that fell back to copying the only idea."""
        return self.operator is OperatorKind.RECOMBINATION and len(self.parents) == 1

    def to_line(self):
        opt = lambda x: "" if x is None else str(x)  # noqa: E731
        return ",".join([
            str(self.step), str(self.iteration), str(self.agent), self.operator.value,
            "|".join(map(str, self.parents)), opt(self.child), opt(self.removed),
            "1" if self.skipped else "0", opt(self.child_encoding),
        ])

    @classmethod
    def from_line(cls, line, lineno=None):
        parts = line.rstrip("\n").split(",")
        if len(parts) != len(LOG_FIELDS):
            raise MalformedLogError(f"expected {len(LOG_FIELDS)} fields, got {len(parts)}", lineno)
        opt = lambda x: None if x == "" else int(x)  # noqa: E731
        try:
            return cls(
                step=int(parts[0]),
                iteration=int(parts[1]),
                agent=int(parts[2]),
                operator=OperatorKind(parts[3]),
                parents=tuple(int(p) for p in parts[4].split("|")) if parts[4] else (),
                child=opt(parts[5]),
                removed=opt(parts[6]),
                skipped={"0": False, "1": True}[parts[7]],
                child_encoding=opt(parts[8]),
            )
        except (ValueError, KeyError) as exc:
            raise MalformedLogError(f"bad field value ({exc})", lineno) from None


def format_log(events, initial=(), provenance=()):
    """Serialize events; ``initial`` is a sequence of (instance_id, encoding)."""
    lines = [f"# {p}" for p in provenance]
    lines.append("# initial=" + "|".join(f"{i}:{e}" for i, e in initial))
    lines.append(LOG_HEADER)
    lines.extend(ev.to_line() for ev in events)
    return "\n".join(lines) + "\n"


def export_log(events, sink, initial=(), provenance=()):
    sink.write(format_log(events, initial, provenance))


def parse_log(text):
    """Return ``(events, initial, provenance)`` from event-log text."""
    events = []
    initial = []
    provenance = []
    seen_header = False
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("initial="):
                spec = body[len("initial="):]
                try:
                    initial = [tuple(int(x) for x in tok.split(":")) for tok in spec.split("|") if tok]
                except ValueError:
                    raise MalformedLogError("bad initial population line", lineno) from None
            else:
                provenance.append(body)
            continue
        if not line.strip():
            continue
        if not seen_header:
            if line.strip() != LOG_HEADER:
                raise MalformedLogError(f"expected header {LOG_HEADER!r}", lineno)
            seen_header = True
            continue
        events.append(EvolutionaryEvent.from_line(line, lineno))
    if not seen_header:
        raise MalformedLogError("missing header line")
    return events, initial, provenance


@dataclass
class GenealogyDag:
    """Instances as nodes, parent -> child edges.

    Removed instances stay in the graph with a death step.
    """

    encoding: dict = field(default_factory=dict)
    birth: dict = field(default_factory=dict)
    death: dict = field(default_factory=dict)
    parents: dict = field(default_factory=dict)
    children: dict = field(default_factory=dict)

    @property
    def nodes(self):
        return list(self.birth)

    @property
    def edges(self):
        return [(p, c) for c, ps in self.parents.items() for p in ps]

    @property
    def roots(self):
        return [v for v in self.birth if not self.parents[v]]

    def _add(self, iid, encoding, step):
        self.encoding[iid] = encoding
        self.birth[iid] = step
        self.parents[iid] = ()
        self.children[iid] = []

    def topological_order(self):
        """Nodes in birth order; every edge points forward in it."""
        order = sorted(self.birth, key=lambda v: (self.birth[v], v))
        rank = {v: i for i, v in enumerate(order)}
        for p, c in self.edges:
            if rank[p] >= rank[c]:
                raise MalformedLogError(f"edge {p}->{c} does not point forward in time")
        return order


def build_genealogy(events, initial_ids):
    """Genealogy DAG from an event log.

    ``initial_ids`` is either a sequence of instance ids or of
    ``(instance_id, encoding)`` pairs; initial instances are born at step 0.
    """
    dag = GenealogyDag()
    for item in initial_ids:
        iid, enc = item if isinstance(item, tuple) else (item, None)
        dag._add(iid, enc, 0)
    alive = set(dag.birth)
    for ev in events:
        for p in ev.parents:
            if p not in dag.birth:
                raise MalformedLogError(f"step {ev.step}: unknown parent instance {p}")
            if p not in alive:
                raise MalformedLogError(f"step {ev.step}: parent {p} was already removed")
        if ev.removed is not None:
            if ev.removed not in alive:
                raise MalformedLogError(f"step {ev.step}: removed unknown instance {ev.removed}")
            alive.discard(ev.removed)
            dag.death[ev.removed] = ev.step
        if ev.child is not None:
            if ev.child in dag.birth:
                raise MalformedLogError(f"step {ev.step}: instance id {ev.child} reused")
            dag._add(ev.child, ev.child_encoding, ev.step)
            dag.parents[ev.child] = tuple(ev.parents)
            for p in ev.parents:
                dag.children[p].append(ev.child)
            alive.add(ev.child)
    return dag


def genealogy_stats(dag):
    order = dag.topological_order()
    depth = {}
    for v in order:
        depth[v] = max((depth[p] + 1 for p in dag.parents[v]), default=0)
    inner = [v for v in order if dag.children[v]]
    branching = sum(1 for v in inner if len(dag.children[v]) >= 2)
    return {
        "roots": len(dag.roots),
        "nodes": len(order),
        "edges": len(dag.edges),
        "branching_ratio": branching / len(inner) if inner else 0.0,
        "max_depth": max(depth.values(), default=0),
    }


def export_dot(dag, sink):
    sink.write("digraph genealogy {\n")
    for v in dag.topological_order():
        enc = dag.encoding.get(v)
        label = f"{v}:{'' if enc is None else enc}"
        sink.write(f'  n{v} [label="{label}"];\n')
    for p, c in sorted(dag.edges, key=lambda e: (dag.birth[e[1]], e[1], e[0])):
        sink.write(f"  n{p} -> n{c};\n")
    sink.write("}\n")
