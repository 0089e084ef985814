"""YAML experiment configuration and unit conversions.

Config files mirror the dataclass fields one-to-one, in SI units:

.. code-block:: yaml

    system:
      num_faps: 15
      capacity: 4.0e11        # bits
    hcg:
      max_passes: 100
    fa:
      population: 30
      max_iters: 200
    experiment:
      sweep_axis: capacity
      sweep_values: [8.0e10, 1.6e11]
      seeds: [0, 1]
      schemes: [random, improved_fa]
      clustering: hcg

Unknown keys are rejected so typos fail loudly.  The helpers at the
bottom convert the field-measurement units (dBm, GB, MB, MHz) used by
the command-line flags into SI.
"""

from __future__ import annotations

from dataclasses import fields
from typing import Any, Mapping, Optional

import yaml

from .experiment import ExperimentSpec
from .firefly import FaConfig
from .hcg import HcgConfig
from .scenario import SystemParams

__all__ = [
    "load_config",
    "parse_config",
    "dbm_to_watts",
    "gb_to_bits",
    "mb_to_bits",
    "mhz_to_hz",
]


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def gb_to_bits(gb: float) -> float:
    return gb * 8.0e9


def mb_to_bits(mb: float) -> float:
    return mb * 8.0e6


def mhz_to_hz(mhz: float) -> float:
    return mhz * 1.0e6


def _coerce(value):
    # YAML 1.1 reads "8.0e9" (no exponent sign) as a string; recover floats
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    if isinstance(value, (list, tuple)):
        return [_coerce(v) for v in value]
    return value


def _build(cls, section: Mapping[str, Any], where: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(section) - allowed
    if unknown:
        raise ValueError(
            f"unknown key(s) {sorted(unknown)} in section '{where}'; "
            f"expected a subset of {sorted(allowed)}"
        )
    kwargs = {k: _coerce(v) for k, v in section.items()}
    if cls is SystemParams and isinstance(kwargs.get("fap_power"), list):
        kwargs["fap_power"] = tuple(kwargs["fap_power"])
    return cls(**kwargs)


_EXPERIMENT_KEYS = {
    "sweep_axis",
    "sweep_values",
    "seeds",
    "schemes",
    "clustering",
    "exhaustive_cap",
}


def parse_config(doc: Optional[Mapping[str, Any]]) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from a parsed YAML document."""
    doc = dict(doc or {})
    known = {"system", "hcg", "fa", "experiment"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(
            f"unknown top-level section(s) {sorted(unknown)}; expected {sorted(known)}"
        )
    system = _build(SystemParams, doc.get("system") or {}, "system")
    hcg = _build(HcgConfig, doc.get("hcg") or {}, "hcg")
    fa = _build(FaConfig, doc.get("fa") or {}, "fa")

    exp = dict(doc.get("experiment") or {})
    unknown = set(exp) - _EXPERIMENT_KEYS
    if unknown:
        raise ValueError(
            f"unknown key(s) {sorted(unknown)} in section 'experiment'; "
            f"expected a subset of {sorted(_EXPERIMENT_KEYS)}"
        )
    if "sweep_values" in exp and exp["sweep_values"] is not None:
        exp["sweep_values"] = tuple(float(_coerce(v)) for v in exp["sweep_values"])
    if "seeds" in exp and exp["seeds"] is not None:
        exp["seeds"] = tuple(int(v) for v in exp["seeds"])
    if "schemes" in exp and exp["schemes"] is not None:
        exp["schemes"] = tuple(exp["schemes"])
    return ExperimentSpec(system=system, hcg=hcg, fa=fa, **exp)


def load_config(path: str) -> ExperimentSpec:
    """Read and validate a YAML experiment configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ValueError(f"malformed YAML in {path}: {exc}") from exc
    if doc is not None and not isinstance(doc, Mapping):
        raise ValueError(f"config file {path} must hold a mapping at top level")
    return parse_config(doc)
