"""Flat ``key = value`` experiment configs.

Grammar: one assignment per line, ``#`` starts a comment, blank lines are
skipped, repeating a key turns its value into a list.  Every key is
validated against the schema of the chosen experiment and all errors are
reported at once, each with its line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError


@dataclass(frozen=True)
class Field:
    kind: str  # "int" | "float" | "str" | "float_list" | "int_list"
    required: bool = False
    default: object = None


@dataclass
class ExperimentConfig:
    experiment: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)


def _parse_scalar(kind: str, raw: str):
    if kind in ("int", "int_list"):
        return int(raw)
    if kind in ("float", "float_list"):
        return float(raw)
    return raw


def parse_config(text: str, schemas: dict) -> ExperimentConfig:
    """Validate config text against the per-experiment schemas.

    ``schemas`` maps experiment name -> {key: Field}.  Raises ConfigError
    listing every problem found, not just the first.
    """
    errors = []
    assignments = []  # (line_no, key, raw_value)
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append((line_no, f"expected 'key = value', got {stripped!r}"))
            continue
        key, raw = stripped.split("=", 1)
        assignments.append((line_no, key.strip(), raw.strip()))

    exp_names = [v for ln, k, v in assignments if k == "experiment"]
    if not exp_names:
        errors.append((0, "missing required key 'experiment'"))
        raise ConfigError(errors)
    name = exp_names[0]
    if name not in schemas:
        errors.append((0, f"unknown experiment {name!r}; choices: {sorted(schemas)}"))
        raise ConfigError(errors)
    schema = schemas[name]

    values: dict = {}
    for line_no, key, raw in assignments:
        if key == "experiment":
            continue
        if key not in schema:
            errors.append((line_no, f"unknown key {key!r} for experiment {name!r}"))
            continue
        fld = schema[key]
        try:
            parsed = _parse_scalar(fld.kind, raw)
        except ValueError:
            errors.append((line_no, f"key {key!r} expects {fld.kind}, got {raw!r}"))
            continue
        if key in values or fld.kind.endswith("_list"):
            existing = values.get(key)
            if existing is None:
                values[key] = [parsed]
            elif isinstance(existing, list):
                existing.append(parsed)
            else:
                values[key] = [existing, parsed]
        else:
            values[key] = parsed

    for key, fld in schema.items():
        if key not in values:
            if fld.required:
                errors.append((0, f"missing required key {key!r}"))
            elif fld.default is not None:
                values[key] = (list(fld.default)
                               if isinstance(fld.default, (list, tuple)) else fld.default)
    for key, fld in schema.items():
        if fld.kind.endswith("_list") and key in values and not isinstance(values[key], list):
            values[key] = [values[key]]

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(name, values)
