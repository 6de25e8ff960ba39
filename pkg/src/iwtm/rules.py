"""Export a trained machine as a list of weighted conjunctive rules.

Text rendering, one line per clause in clause order::

    #2   3 × [¬(Competitiveness<=A) ∧ Competitiveness<=N] → class 0

JSON rendering (``format: iwtm-rules``, ``version: 1``)::

    {"format": "iwtm-rules", "version": 1,
     "config": {...machine config...}, "num_features": o,
     "rules": [{"clause": 1, "polarity": "+", "votes_for": 1, "weight": 0,
                "active": false, "literal_indices": [31],
                "literals": ["¬(Competitiveness<=N)"]}, ...]}

``clause`` is 1-based. Clauses with weight 0 never fire at inference; they are
left out of both renderings unless dead clauses are explicitly requested.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

RULES_FORMAT = "iwtm-rules"
RULES_VERSION = 1
EMPTY_CLAUSE = "[always-true during learning; ignored at inference]"


@dataclass(frozen=True)
class Rule:
    clause: int
    polarity: str
    weight: int
    literal_indices: tuple
    literals: tuple

    @property
    def votes_for(self) -> int:
        return 1 if self.polarity == "+" else 0

    @property
    def active(self) -> bool:
        return self.weight > 0

    def body(self) -> str:
        if not self.literals:
            return EMPTY_CLAUSE
        return "[" + " ∧ ".join(self.literals) + "]"

    def render(self) -> str:
        return f"#{self.clause:<3d} {self.weight} × {self.body()} → class {self.votes_for}"


@dataclass(frozen=True)
class RuleSet:
    config: dict
    num_features: int
    rules: tuple = field(default_factory=tuple)

    def active_rules(self) -> tuple:
        return tuple(r for r in self.rules if r.active)

    def visible(self, include_dead: bool = False) -> tuple:
        return self.rules if include_dead else self.active_rules()

    def render_text(self, include_dead: bool = False) -> str:
        c = self.config
        head = (f"# {RULES_FORMAT} v{RULES_VERSION}: m={c.get('num_clauses')} "
                f"T={c.get('threshold')} s={c.get('s')} N={c.get('half_states')} "
                f"weighting={c.get('weighting')} o={self.num_features}")
        lines = [head] + [r.render() for r in self.visible(include_dead)]
        return "\n".join(lines) + "\n"

    def to_dict(self, include_dead: bool = False) -> dict:
        return {
            "format": RULES_FORMAT,
            "version": RULES_VERSION,
            "config": dict(self.config),
            "num_features": self.num_features,
            "rules": [
                {"clause": r.clause, "polarity": r.polarity, "votes_for": r.votes_for,
                 "weight": r.weight, "active": r.active,
                 "literal_indices": list(r.literal_indices), "literals": list(r.literals)}
                for r in self.visible(include_dead)
            ],
        }

    def render_json(self, include_dead: bool = False) -> str:
        return json.dumps(self.to_dict(include_dead), indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RuleSet":
        if d.get("format") != RULES_FORMAT:
            raise ValueError(f"not an {RULES_FORMAT} document")
        if d.get("version") != RULES_VERSION:
            raise ValueError(f"unsupported rules version {d.get('version')}")
        rules = tuple(
            Rule(r["clause"], r["polarity"], r["weight"], tuple(r["literal_indices"]),
                 tuple(r["literals"]))
            for r in d["rules"]
        )
        return cls(dict(d["config"]), d["num_features"], rules)

    @classmethod
    def parse_json(cls, text: str) -> "RuleSet":
        return cls.from_dict(json.loads(text))


def default_literal_names(num_features: int) -> list[str]:
    plain = [f"x{k + 1}" for k in range(num_features)]
    return plain + [f"¬{n}" for n in plain]


def export_rules(machine, literal_names=None) -> RuleSet:
    """Collect every clause of ``machine`` as a :class:`Rule`, in clause order."""
    o = machine.num_features
    if literal_names is None:
        literal_names = default_literal_names(o)
    literal_names = list(literal_names)
    if len(literal_names) != 2 * o:
        raise ValueError(
            f"name table has {len(literal_names)} entries; machine has {2 * o} literals"
        )
    included = machine.included()
    rules = []
    for j in range(machine.num_clauses):
        idx = tuple(int(k) for k in included[j].nonzero()[0])
        rules.append(Rule(
            clause=j + 1,
            polarity="+" if machine.positive[j] else "-",
            weight=int(machine.weights[j]),
            literal_indices=idx,
            literals=tuple(literal_names[k] for k in idx),
        ))
    return RuleSet(asdict(machine.config), o, tuple(rules))
