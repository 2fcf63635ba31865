"""Agents, group presets, and the round-robin run loop.

Seeds: every stream is derived from ``master_seed`` with
:func:`ideaevo.seeding.derive_seed` under these role tags

==================  ======================================
``"true"``          true landscape generation
``"bias"``          bias applied to get the master landscape
``"agent", j``      agent ``j``'s noise key (j = 1..N)
``"initial"``       initial population
``"dynamics"``      operator choice and operator internals
==================  ======================================
"""

from dataclasses import asdict, dataclass, field, fields, replace

from .evolution import OPERATORS, OperatorKind, OperatorParams, Population, apply_operator
from .genealogy import EvolutionaryEvent
from .landscape import (
    MAX_ASPECTS,
    apply_bias,
    generate_true_landscape,
    make_individual_utility,
)
from .metrics import outcome_metrics
from .seeding import derive_seed, make_rng


class ConfigError(ValueError):
    """Invalid configuration value; ``key`` names the offending field."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


_R = OperatorKind.REPLICATION
_RPM = OperatorKind.RANDOM_POINT_MUTATION
_IPM = OperatorKind.INTELLIGENT_POINT_MUTATION
_REC = OperatorKind.RECOMBINATION
_SUB = OperatorKind.SUBTRACTIVE_SELECTION
_GEN = OperatorKind.RANDOM_GENERATION

GROUP_OPERATORS = {
    "G0": OPERATORS,
    "G1": (_R, _SUB),
    "G2": (_SUB, _RPM),
    "G3": (_R, _REC),
    "G4": (_REC,),
    "G5": (_REC, _IPM),
    "G6": (_IPM, _GEN),
    "G7": (_GEN,),
}
GROUP_LABELS = tuple(GROUP_OPERATORS)


def preset_profiles(label):
    """Operator weights (in :data:`OPERATORS` order) for group preset ``label``.

    >>> preset_profiles("G4")[3]
    0.95
    """
    try:
        chosen = GROUP_OPERATORS[label]
    except KeyError:
        raise ConfigError("group", f"unknown group preset {label!r}") from None
    if len(chosen) == len(OPERATORS):
        return tuple(1.0 / 6.0 for _ in OPERATORS)
    main = 0.95 if len(chosen) == 1 else 0.48
    return tuple(main if op in chosen else 0.01 for op in OPERATORS)


@dataclass(frozen=True)
class AgentProfile:
    operator_weights: tuple
    agent_seed: int

    def __post_init__(self):
        w = self.operator_weights
        if len(w) != len(OPERATORS) or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
            raise ConfigError("weights", f"need six non-negative weights summing to 1, got {w}")


@dataclass(frozen=True)
class SimulationConfig:
    M: int = 10
    n: int = 20
    N: int = 4
    k: int = 10
    T: int = 50
    nu: float = 0.0
    beta: float = 0.0
    r_p: int = 5
    p_m: float = 0.1
    r_m: int = 5
    p_s: float = 0.5
    group: str = "G0"
    seed: int = 0

    def __post_init__(self):
        for key in ("M", "n", "N", "k"):
            if getattr(self, key) < 1:
                raise ConfigError(key, f"must be >= 1, got {getattr(self, key)}")
        if self.T < 0:
            raise ConfigError("T", f"must be >= 0, got {self.T}")
        if self.M > MAX_ASPECTS:
            raise ConfigError("M", f"must be <= {MAX_ASPECTS}, got {self.M}")
        if self.n < 2:
            raise ConfigError("n", f"must be >= 2, got {self.n}")
        if self.n > 2 ** self.M:
            raise ConfigError("n", f"n={self.n} exceeds 2^M={2 ** self.M}")
        for key in ("nu", "beta"):
            if getattr(self, key) < 0:
                raise ConfigError(key, f"must be >= 0, got {getattr(self, key)}")
        if self.r_p < 1:
            raise ConfigError("r_p", f"must be >= 1, got {self.r_p}")
        if self.r_m < 1:
            raise ConfigError("r_m", f"must be >= 1, got {self.r_m}")
        for key in ("p_m", "p_s"):
            if not 0.0 <= getattr(self, key) <= 1.0:
                raise ConfigError(key, f"must be in [0, 1], got {getattr(self, key)}")
        preset_profiles(self.group)

    @property
    def params(self):
        return OperatorParams(self.r_p, self.p_m, self.r_m, self.p_s)

    @classmethod
    def from_mapping(cls, mapping, base=None):
        """Build a config from string (or typed) values, e.g. a key=value file."""
        base = base or cls()
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, raw in mapping.items():
            name = CONFIG_ALIASES.get(key, key)
            if name not in types:
                raise ConfigError(key, "unknown configuration key")
            try:
                kw[name] = _coerce(types[name], raw)
            except ValueError:
                raise ConfigError(key, f"cannot parse {raw!r} as {types[name]}") from None
        return replace(base, **kw)

    def to_lines(self):
        return [f"{k}={_fmt(v)}" for k, v in asdict(self).items()]


# short symbol spellings accepted in config files and on the command line
CONFIG_ALIASES = {"rp": "r_p", "pm": "p_m", "rm": "r_m", "ps": "p_s", "master_seed": "seed"}


def _coerce(kind, raw):
    if kind in ("int", int):
        if isinstance(raw, str):
            return int(raw.strip())
        if isinstance(raw, float) and not raw.is_integer():
            raise ValueError(raw)
        return int(raw)
    if kind in ("float", float):
        return float(raw)
    return str(raw).strip()


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def parse_config_text(text):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


@dataclass
class SimulationState:
    config: SimulationConfig
    true_landscape: object
    master_landscape: object
    utilities: list
    profiles: list
    population: Population
    rng: object


@dataclass
class SimulationResult:
    config: SimulationConfig
    initial_population: list
    final_population: Population
    event_log: list
    metrics: object
    true_landscape: object
    master_landscape: object
    operator_counts: dict = field(default_factory=dict)


def init_simulation(cfg):
    seed = cfg.seed
    true_L = generate_true_landscape(cfg.M, cfg.n, make_rng(seed, "true"))
    master = apply_bias(true_L, cfg.beta, make_rng(seed, "bias"))
    weights = preset_profiles(cfg.group)
    profiles = [AgentProfile(weights, derive_seed(seed, "agent", j)) for j in range(1, cfg.N + 1)]
    utilities = [make_individual_utility(master, cfg.nu, p.agent_seed) for p in profiles]
    init_rng = make_rng(seed, "initial")
    pop = Population(cfg.M, (int(x) for x in init_rng.integers(0, 1 << cfg.M, size=cfg.k)))
    return SimulationState(cfg, true_L, master, utilities, profiles, pop, make_rng(seed, "dynamics"))


def _choose(cumulative, x):
    for i, c in enumerate(cumulative):
        if x < c:
            return OPERATORS[i]
    # x landed in the rounding slack above the last cumulative weight
    for i in range(len(cumulative) - 1, -1, -1):
        if cumulative[i] > (cumulative[i - 1] if i else 0.0):
            return OPERATORS[i]
    raise ConfigError("weights", "all operator weights are zero")


def run(cfg):
    """Execute one simulation: ``T`` full rotations of ``N`` agents in fixed order."""
    st = init_simulation(cfg)
    pop = st.population
    initial = pop.items()
    params = cfg.params
    cumulative = []
    for p in st.profiles:
        acc = 0.0
        cum = []
        for w in p.operator_weights:
            acc += w
            cum.append(acc)
        cumulative.append(cum)
    log = []
    counts = {op: 0 for op in OPERATORS}
    step = 0
    for t in range(1, cfg.T + 1):
        for j in range(cfg.N):
            step += 1
            kind = _choose(cumulative[j], float(st.rng.random()))
            out = apply_operator(kind, pop, st.utilities[j], params, st.rng)
            counts[kind] += 1
            log.append(EvolutionaryEvent.from_outcome(step, t, j + 1, out))
    metrics = outcome_metrics(pop, st.true_landscape)
    return SimulationResult(cfg, initial, pop, log, metrics, st.true_landscape, st.master_landscape, counts)
