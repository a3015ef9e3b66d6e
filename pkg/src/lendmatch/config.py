"""Flat key=value experiment configuration.

Recognised keys (anything else is an error): k, n, c_min, c_max, q_min,
q_max, lambda1, lambda2, horizon, runs, seed, reward_family,
reward_sigma, regret_mode, solver_mode, node_limit, resample_instance,
out_dir.  Missing keys take the defaults below (the paper-scale
experiment: a 20x60 market over 10000 steps and 50 runs).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bandit import RewardModel
from .errors import InvalidValue, ParseError, UnknownKey
from .harness import REGRET_MODES
from .model import GenerationConfig
from .solver import ObjectiveWeights, SolverOptions

DEFAULTS = {
    "k": 20,
    "n": 60,
    "c_min": 5.0,
    "c_max": 40.0,
    "q_min": 1.0,
    "q_max": 10.0,
    "lambda1": 1.0,
    "lambda2": 1.0,
    "horizon": 10_000,
    "runs": 50,
    "seed": 0,
    "reward_family": "gaussian",
    "reward_sigma": 1.0,
    "regret_mode": "expected_lender_utility",
    "solver_mode": "exact",
    "node_limit": 200_000,
    "resample_instance": False,
    "out_dir": "out",
}

_BOOL_WORDS = {"true": True, "1": True, "yes": True,
               "false": False, "0": False, "no": False}


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=lambda: dict(DEFAULTS))

    def __getitem__(self, key):
        return self.values[key]

    @property
    def generation(self) -> GenerationConfig:
        v = self.values
        return GenerationConfig(num_borrowers=v["k"], num_lenders=v["n"],
                                capacity_range=(v["c_min"], v["c_max"]),
                                budget_range=(v["q_min"], v["q_max"]),
                                seed=v["seed"])

    @property
    def weights(self) -> ObjectiveWeights:
        return ObjectiveWeights(self.values["lambda1"],
                                self.values["lambda2"])

    @property
    def solver(self) -> SolverOptions:
        return SolverOptions(mode=self.values["solver_mode"],
                             node_limit=self.values["node_limit"])

    @property
    def reward(self) -> RewardModel:
        return RewardModel(family=self.values["reward_family"],
                           sigma=self.values["reward_sigma"])


def _convert(key, raw, line_no):
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            word = raw.strip().lower()
            if word not in _BOOL_WORDS:
                raise ValueError(raw)
            return _BOOL_WORDS[word]
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise InvalidValue(f"line {line_no}: bad value for {key}: {raw!r}",
                           line=line_no, key=key) from exc


def _validate(values):
    checks = [
        (values["k"] >= 1 and values["n"] >= 1, "k and n must be >= 1"),
        (values["horizon"] >= 1, "horizon must be >= 1"),
        (values["runs"] >= 1, "runs must be >= 1"),
        (0 < values["c_min"] <= values["c_max"], "bad capacity range"),
        (0 < values["q_min"] <= values["q_max"], "bad budget range"),
        (values["lambda1"] >= 0 and values["lambda2"] >= 0
         and values["lambda1"] + values["lambda2"] > 0, "bad weights"),
        (values["reward_family"] in ("gaussian", "deterministic"),
         "unknown reward_family"),
        (values["reward_sigma"] >= 0, "reward_sigma must be >= 0"),
        (values["regret_mode"] in REGRET_MODES, "unknown regret_mode"),
        (values["solver_mode"] in ("exact", "heuristic"),
         "unknown solver_mode"),
        (values["node_limit"] >= 1, "node_limit must be >= 1"),
    ]
    for ok, msg in checks:
        if not ok:
            raise InvalidValue(msg)


def parse_config(text: str) -> ExperimentConfig:
    values = dict(DEFAULTS)
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"line {line_no}: expected key=value, got "
                             f"{line!r}", line=line_no)
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in DEFAULTS:
            raise UnknownKey(f"line {line_no}: unknown key {key!r}",
                             line=line_no, key=key)
        values[key] = _convert(key, raw, line_no)
    _validate(values)
    return ExperimentConfig(values=values)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(config: ExperimentConfig) -> str:
    lines = []
    for key in DEFAULTS:
        val = config.values[key]
        if isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, float):
            val = format(val, ".12g")
        lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"
