"""INI experiment configs.

One scenario per file::

    [scenario]
    scheme = TimeMux2
    beta = 25
    grid = 0:25:5          ; start:stop:step in dB, stop inclusive
    seed = 1
    min_errors = 100
    max_bits = 10000000

    [hop1_a]
    avg_gain_1 = 0.7
    avg_gain_2 = 0.89
    delay = 3

    [hop1_b]
    ...
    [hop2_b]
    ...

Optional ``[scenario]`` keys: ``genie``, ``include_term_c``, ``special_case``,
``threshold_policy``, ``threshold``, ``delay_model``, ``packet_bits``,
``block_frames``, ``metric``, ``output``.  Optional hop keys: ``fading``,
``random_sign``.  An optional ``[hop2_a]`` section describes the relay-to-A
link (defaults to ``[hop2_b]``).

Every problem is reported as a :class:`ConfigError` naming the file, line
and field.
"""

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .analysis import SPECIAL_CASES
from .channel import DELAY_MODELS, FADING_MODELS, TwoRayLink
from .montecarlo import METRICS, StoppingRule, check_grid
from .schemes import THRESHOLD_POLICIES, Scenario, Scheme

HOP_SECTIONS = ("hop1_a", "hop1_b", "hop2_b")
OPTIONAL_SECTIONS = ("hop2_a",)
HOP_KEYS = {"avg_gain_1", "avg_gain_2", "delay", "fading", "random_sign"}
SCENARIO_KEYS = {
    "scheme", "beta", "grid", "seed", "min_errors", "max_bits", "block_frames",
    "genie", "include_term_c", "special_case", "threshold_policy", "threshold",
    "delay_model", "packet_bits", "metric", "output",
}
DEFAULT_GRID = "0:25:5"


class ConfigError(ValueError):
    def __init__(self, message, source="<config>", line=None, field=None):
        self.source = source
        self.line = line
        self.field = field
        where = source if line is None else f"{source}:{line}"
        prefix = f"{where}: " if field is None else f"{where}: field '{field}': "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    scenario: Scenario
    grid: tuple
    rule: StoppingRule
    seed: int
    include_term_c: bool = False
    special_case: str = "none"
    metric: str = "end_to_end"
    output: str | None = None
    sha256: str = ""

    def simulated_scenario(self):
        """Scenario with the special-case AWGN substitutions applied."""
        return self.scenario.with_special_case(self.special_case)

    def with_overrides(self, scheme=None, seed=None, grid=None):
        cfg = self
        if scheme is not None:
            cfg = replace(cfg, scenario=cfg.scenario.with_scheme(scheme))
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if grid is not None:
            cfg = replace(cfg, grid=tuple(grid))
        return cfg


def parse_grid(text):
    """``"a:b:step"`` -> ascending tuple of dB values, ``b`` inclusive."""
    parts = text.strip().split(":")
    if len(parts) == 1:
        values = [float(parts[0])]
    elif len(parts) == 3:
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise ValueError("grid needs step > 0 and stop >= start")
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        values = [round(a + k * step, 12) for k in range(n)]
    else:
        raise ValueError(f"grid must look like start:stop:step, got {text!r}")
    return tuple(check_grid(values))


def list_presets():
    root = resources.files("dcsk_relay") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def resolve(path_or_name):
    """Return ``(text, source_label)`` for a path or a bundled preset name."""
    p = Path(path_or_name)
    if p.is_file():
        return p.read_text(encoding="utf-8"), str(p)
    name = path_or_name[:-4] if path_or_name.endswith(".ini") else path_or_name
    res = resources.files("dcsk_relay") / "presets" / f"{name}.ini"
    if res.is_file():
        return res.read_text(encoding="utf-8"), f"preset:{name}"
    raise ConfigError(f"no such config file or preset (presets: {', '.join(list_presets())})",
                      source=str(path_or_name))


def load(path_or_name):
    text, source = resolve(path_or_name)
    return parse(text, source)


class _Lines:
    """Map (section, key) to the line number it was written on."""

    def __init__(self, text):
        self.where = {}
        section = None
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            m = re.match(r"\[([^\]]+)\]", line)
            if m:
                section = m.group(1).strip()
                self.where[(section, None)] = no
                continue
            m = re.match(r"([^=:;#\s][^=:]*?)\s*[=:]", line)
            if m and section is not None:
                self.where.setdefault((section, m.group(1).strip().lower()), no)

    def __call__(self, section, key=None):
        return self.where.get((section, key))


class _Reader:
    def __init__(self, cp, lines, source):
        self.cp, self.lines, self.source = cp, lines, source

    def error(self, msg, section, key=None):
        field = section if key is None else f"{section}.{key}"
        line = self.lines(section, key) or self.lines(section)
        return ConfigError(msg, self.source, line, field)

    def raw(self, section, key, default=None, required=False):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key).strip()
        if required:
            raise self.error("missing required field", section, key)
        return default

    def get(self, section, key, conv, default=None, required=False):
        value = self.raw(section, key, None, required)
        if value is None:
            return default
        try:
            return conv(value)
        except (ValueError, TypeError) as exc:
            raise self.error(f"invalid value {value!r} ({exc})", section, key) from None

    def choice(self, section, key, choices, default):
        value = self.raw(section, key, default)
        if value not in choices:
            raise self.error(f"{value!r} is not one of {', '.join(choices)}", section, key)
        return value


def _bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true/false")


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError("expected an integer")
    return int(value)


def _scheme(text):
    return Scheme.parse(text)


def _hop(reader, section):
    keys = set(reader.cp.options(section))
    for key in sorted(keys - HOP_KEYS):
        raise reader.error("unknown field", section, key)
    g1 = reader.get(section, "avg_gain_1", float, required=True)
    g2 = reader.get(section, "avg_gain_2", float, required=True)
    delay = reader.get(section, "delay", _int, default=0)
    fading = reader.choice(section, "fading", FADING_MODELS, "rayleigh")
    sign = reader.get(section, "random_sign", _bool, default=True)
    try:
        return TwoRayLink(g1, g2, delay, fading, sign)
    except ValueError as exc:
        raise reader.error(str(exc), section, _link_key(str(exc), g1, g2)) from None


def _link_key(msg, g1=None, g2=None):
    """Best guess at which hop field a link validation message is about."""
    if "delay" in msg:
        return "delay"
    if "gain" in msg:
        if g1 is not None and g1 < 0:
            return "avg_gain_1"
        return "avg_gain_2" if g2 is not None and g2 < 0 else "avg_gain_1"
    return None


def parse(text, source="<config>"):
    """Parse and validate config ``text``; raise :class:`ConfigError`."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        msg = str(exc).splitlines()[0]
        raise ConfigError(msg, source, line) from None
    lines = _Lines(text)
    r = _Reader(cp, lines, source)

    known = {"scenario", *HOP_SECTIONS, *OPTIONAL_SECTIONS}
    for section in cp.sections():
        if section not in known:
            raise r.error("unknown section", section)
    for section in ("scenario", *HOP_SECTIONS):
        if not cp.has_section(section):
            raise ConfigError("missing section", source, None, section)
    for key in sorted(set(cp.options("scenario")) - SCENARIO_KEYS):
        raise r.error("unknown field", "scenario", key)

    s = "scenario"
    scheme = r.get(s, "scheme", _scheme, required=True)
    beta = r.get(s, "beta", _int, required=True)
    grid = r.get(s, "grid", parse_grid, default=parse_grid(DEFAULT_GRID))
    seed = r.get(s, "seed", _int, default=0)
    if seed < 0:
        raise r.error("seed must be non-negative", s, "seed")
    min_errors = r.get(s, "min_errors", _int, default=100)
    max_bits = r.get(s, "max_bits", _int, default=10**7)
    block_frames = r.get(s, "block_frames", _int, default=StoppingRule.block_frames)
    try:
        rule = StoppingRule(min_errors, max_bits, block_frames)
    except ValueError as exc:
        raise r.error(str(exc), s, "min_errors") from None

    hops = {name: _hop(r, name) for name in HOP_SECTIONS}
    hop2_a = _hop(r, "hop2_a") if cp.has_section("hop2_a") else None
    threshold = r.get(s, "threshold", float, default=None)
    kwargs = dict(
        genie_remove_strong_isi=r.get(s, "genie", _bool, default=False),
        threshold_policy=r.choice(s, "threshold_policy", THRESHOLD_POLICIES, "mean-level"),
        threshold=threshold,
        packet_bits=r.get(s, "packet_bits", _int, default=100),
        delay_model=r.choice(s, "delay_model", DELAY_MODELS, "frame-aligned"),
        hop2_a=hop2_a,
    )
    try:
        scenario = Scenario(scheme, beta, **hops, **kwargs)
    except (ValueError, TypeError) as exc:
        msg = str(exc)
        key = next((k for k in ("beta", "genie", "threshold", "packet_bits") if k in msg), None)
        m = re.match(r"(hop\w+):", msg)
        if m:
            detail = msg[m.end():].strip()
            raise r.error(detail, m.group(1), _link_key(detail)) from None
        raise r.error(msg, s, key) from None

    return ExperimentConfig(
        name=Path(source.removeprefix("preset:")).stem,
        scenario=scenario,
        grid=grid,
        rule=rule,
        seed=seed,
        include_term_c=r.get(s, "include_term_c", _bool, default=False),
        special_case=r.choice(s, "special_case", SPECIAL_CASES, "none"),
        metric=r.choice(s, "metric", METRICS, "end_to_end"),
        output=r.raw(s, "output"),
        sha256=hashlib.sha256(text.encode("utf-8")).hexdigest(),
    )
