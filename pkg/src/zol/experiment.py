"""Batch experiment harness: named events swept over a range of sizes,
emitted as CSV.

A config is a flat key=value file. Rows are deterministic given the
seed: Monte Carlo cell i draws from substreams (seed, i<<32 + trial),
so neither row order nor sharding can change a number.
"""

from dataclasses import dataclass, fields
import csv
import hashlib
import io

from . import __version__
from .classes import builtin_class
from .errors import ParseError
from .events import exact_event_probability, resolve_events
from .measures import monte_carlo, sample_delta, sample_uniform
from .pregeometry import parse_geometry

MEASURES = ("uniform", "delta")
MODES = ("exact", "mc")

CSV_HEADER = ("n", "event", "measure", "mode", "value",
              "ci_low", "ci_high", "trials", "seed")


@dataclass(frozen=True)
class ExperimentConfig:
    class_name: str
    ns: tuple = ()
    events: tuple = ()
    geometry: str = "trivial"
    measure: str = "uniform"
    mode: str = "exact"
    trials: int = 1000
    seed: int = 0
    out: str = None
    fractions: bool = False

    def validate(self):
        if not self.class_name:
            raise ValueError("class: a class name is required")
        if not self.ns:
            raise ValueError("n: the size range is empty")
        if any(n < 0 for n in self.ns):
            raise ValueError("n: sizes must be nonnegative")
        if not self.events:
            raise ValueError("events: at least one event is required")
        if self.measure not in MEASURES:
            raise ValueError(f"measure: unknown measure {self.measure!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode: unknown mode {self.mode!r}")
        if self.mode == "mc" and self.trials <= 0:
            raise ValueError("trials: need at least one trial")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed: must fit in 64 bits")
        builtin_class(self.class_name)
        parse_geometry(self.geometry)


def parse_sizes(text: str):
    """Parse an n selector: '7', '3..7', or '8,10,12'."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"n: cannot parse size range {text!r}") from None


_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def parse_config(text: str) -> ExperimentConfig:
    """Flat key=value lines; '#' starts a comment."""
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", lineno)
        seen[key] = (value, lineno)

    cfg = {}
    handlers = {
        "class": ("class_name", str),
        "geometry": ("geometry", str),
        "measure": ("measure", str),
        "mode": ("mode", str),
        "out": ("out", str),
        "n": ("ns", parse_sizes),
        "events": ("events",
                   lambda v: tuple(e for e in
                                   (part.strip() for part in v.split(","))
                                   if e)),
        "trials": ("trials", int),
        "seed": ("seed", int),
        "fractions": ("fractions", lambda v: _BOOL[v.lower()]),
    }
    for key, (value, lineno) in seen.items():
        if key not in handlers:
            raise ParseError(f"unknown key {key!r}", lineno)
        dest, convert = handlers[key]
        try:
            cfg[dest] = convert(value)
        except ValueError as e:
            msg = str(e)
            if not msg.startswith(f"{key}:"):
                msg = f"{key}: {msg}"
            raise ParseError(msg, lineno) from None
        except KeyError:
            raise ParseError(f"{key}: cannot parse {value!r}", lineno) \
                from None
    if "class_name" not in cfg:
        raise ValueError("class: a class name is required")
    config = ExperimentConfig(**cfg)
    config.validate()
    return config


def config_digest(cfg: ExperimentConfig) -> str:
    parts = []
    for f in sorted(fields(cfg), key=lambda f: f.name):
        parts.append(f"{f.name}={getattr(cfg, f.name)!r}")
    blob = "\n".join(parts).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _cells(cfg: ExperimentConfig):
    c = builtin_class(cfg.class_name)
    g = parse_geometry(cfg.geometry)
    specs = []
    for name in cfg.events:
        specs.extend(resolve_events(name, c, g))
    for n in cfg.ns:
        for ev in specs:
            yield c, g, n, ev


def experiment_rows(cfg: ExperimentConfig):
    """One row per (n, resolved event), in sweep order."""
    cfg.validate()
    rows = []
    for index, (c, g, n, ev) in enumerate(_cells(cfg)):
        if cfg.mode == "exact":
            value = exact_event_probability(c, g, ev, n, cfg.measure)
            rows.append((n, ev.name, cfg.measure, "exact", value,
                         None, None, None, None))
            continue
        if cfg.measure == "delta":
            def sampler(rng, n=n):
                return sample_delta(c, n, rng, g)
        else:
            def sampler(rng, n=n):
                return sample_uniform(c, n, rng)
        r = monte_carlo(ev.test, sampler, cfg.trials, cfg.seed,
                        stream_base=index << 32)
        rows.append((n, ev.name, cfg.measure, "mc", r.value,
                     r.ci_low, r.ci_high, cfg.trials, cfg.seed))
    return rows


def _render_value(value, fractions: bool) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if fractions:
        return str(value)
    return repr(float(value))


def render_csv(cfg: ExperimentConfig, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for n, name, measure, mode, value, lo, hi, trials, seed in rows:
        writer.writerow([
            n, name, measure, mode,
            _render_value(value, cfg.fractions),
            "" if lo is None else repr(lo),
            "" if hi is None else repr(hi),
            "" if trials is None else trials,
            "" if seed is None else seed,
        ])
    buf.write(f"# zol-lab {__version__} config {config_digest(cfg)}\n")
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig) -> str:
    """Compute every cell and render the CSV; also writes cfg.out when
    set. Returns the CSV text."""
    text = render_csv(cfg, experiment_rows(cfg))
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    return text
