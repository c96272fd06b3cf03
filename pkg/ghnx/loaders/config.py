"""Load a RunConfig from YAML and command-line flags

A config file holds one mapping per section::

    run:
      name: desk
      mode: standard
    ghn:
      scheme: forward-backward
      steps: 5

Each key `section.key` has exactly one flag `--section-key`. Flags override
the file, the file overrides the defaults. An unset seed falls back to the
GHN_SEED environment variable, then to 0.
"""
import logging
import os
import pathlib

import yaml

from ..errors import ConfigError
from ..inputs.run import RunSpec, RunConfig
from ..inputs.space import SpaceConfig
from ..inputs.ghn import GhnConfig
from ..inputs.task import TaskConfig
from ..inputs.training import TrainConfig
from ..inputs.search import SearchConfig


logger = logging.getLogger(__name__)

SEED_VARIABLE = "GHN_SEED"

SECTIONS = {
    "run": RunSpec,
    "space": SpaceConfig,
    "ghn": GhnConfig,
    "task": TaskConfig,
    "training": TrainConfig,
    "search": SearchConfig,
}

# Types of fields whose default does not show them.
_NONE_TYPES = {("run", "seed"): int, ("task", "data_dir"): str,
               ("space", "arch"): str}


def _grid_item(v):
    try:
        return int(v)
    except (TypeError, ValueError):
        return str(v)


_ITEM_TYPES = {
    ("space", "reductions"): int,
    ("training", "milestones"): float,
    ("search", "baseline_steps"): int,
    ("search", "ablate_grid"): _grid_item,
    ("search", "ablate_seeds"): int,
}

ALIASES = {"--threads": "--run-threads", "--out": "--run-outdir"}


def _parse_bool(v):
    if isinstance(v, bool):
        return v
    text = str(v).strip().lower()
    if text in ("true", "yes", "on", "1"):
        return True
    if text in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def fields():
    """(section, key, default) of every configuration key"""
    out = []
    for section, cls in SECTIONS.items():
        defaults = cls._field_defaults
        for key in cls._fields:
            out.append((section, key, defaults.get(key)))
    return out


def flag_name(section, key):
    return f"--{section}-{key.replace('_', '-')}"


def coerce(section, key, value):
    """Convert a file or flag value to the type of a configuration key

    Raises
    ------
    ConfigError
       naming the key when the value does not convert
    """
    cls = SECTIONS[section]
    default = cls._field_defaults.get(key)
    if value is None:
        return None
    try:
        if (section, key) in _ITEM_TYPES:
            item = _ITEM_TYPES[(section, key)]
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            elif not isinstance(value, (list, tuple)):
                value = [value]
            return tuple(item(v.strip() if isinstance(v, str) else v)
                         for v in value)
        if default is None:
            return _NONE_TYPES[(section, key)](value)
        if isinstance(default, bool):
            return _parse_bool(value)
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"not an integer: {value}")
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for {section}.{key}: {e}") from e


def build(values, env=None):
    """RunConfig from a {section: {key: value}} mapping

    Parameters
    ----------
    values: dict
       section -> key -> raw value
    env: mapping, optional
       environment (default os.environ) consulted for the seed
    """
    env = os.environ if env is None else env
    if not isinstance(values, dict):
        raise ConfigError("configuration must be a mapping of sections")
    unknown = sorted(set(values) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"unknown configuration sections: {unknown}")
    parts = {}
    for section, cls in SECTIONS.items():
        given = values.get(section) or {}
        if not isinstance(given, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        bad = sorted(set(given) - set(cls._fields))
        if bad:
            raise ConfigError(f"unknown keys in section {section!r}: {bad}")
        kwargs = {k: coerce(section, k, v) for k, v in given.items()}
        if section == "run" and kwargs.get("seed") is None:
            kwargs["seed"] = _env_seed(env)
        parts[section] = cls(**kwargs)
    return RunConfig(**parts)


def _env_seed(env):
    text = env.get(SEED_VARIABLE)
    if text is None or text == "":
        return 0
    try:
        return int(text)
    except ValueError as e:
        raise ConfigError(f"{SEED_VARIABLE} must be an integer, got {text!r}") from e


def read_file(path):
    """Sections of a YAML config file"""
    path = pathlib.Path(path)
    try:
        with path.open() as f:
            doc = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e}") from e
    return {} if doc is None else doc


def add_flags(parser):
    """Add `--section-key` for every configuration key to an ArgumentParser

    Flag values are strings; `overrides` converts them. The aliases
    `--threads` and `--out` share the destination of their long flag.
    """
    aliases = {v: k for k, v in ALIASES.items()}
    for section, key, default in fields():
        flag = flag_name(section, key)
        names = [flag] + ([aliases[flag]] if flag in aliases else [])
        parser.add_argument(
            *names, dest=f"{section}__{key}", default=None, metavar="VALUE",
            help=f"{section}.{key} (default: {_show(default)})"
        )
    return parser


def _show(default):
    if isinstance(default, tuple):
        return ",".join(str(v) for v in default) or "none"
    return default


def overrides(args):
    """{section: {key: value}} of the flags given on the command line"""
    out = {}
    for dest, value in vars(args).items():
        if "__" not in dest or value is None:
            continue
        section, key = dest.split("__", 1)
        if section in SECTIONS:
            out.setdefault(section, {})[key] = value
    return out


def merge(base, extra):
    merged = {s: dict(v or {}) for s, v in base.items()}
    for section, values in extra.items():
        merged.setdefault(section, {}).update(values)
    return merged


def load_config(path=None, args=None, env=None):
    """RunConfig from an optional YAML file and parsed command-line flags"""
    values = read_file(path) if path is not None else {}
    if args is not None:
        values = merge(values, overrides(args))
    cfg = build(values, env)
    logger.debug("configuration: %s", to_dict(cfg))
    return cfg


def to_dict(cfg):
    """Plain {section: {key: value}} form of a RunConfig (tuples as lists)"""
    out = {}
    for section in SECTIONS:
        part = getattr(cfg, section)
        out[section] = {
            k: list(v) if isinstance(v, tuple) else v
            for k, v in part._asdict().items()
        }
    return out


def dump_config(cfg, path):
    """Write a RunConfig as YAML; `load_config` reads it back unchanged"""
    with open(path, "w") as f:
        yaml.safe_dump(to_dict(cfg), f, sort_keys=True)
