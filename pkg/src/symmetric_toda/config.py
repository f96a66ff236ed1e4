# Copyright (c) 2024 symmetric-toda contributors.
# SPDX-License-Identifier: GPL-3.0-or-later
"""Run configuration and the tolerance registry."""
import dataclasses
import math
import types
import typing

from .errors import InputError

MIN_N = 2
MAX_N = 8

DEFAULT_SAMPLES = 20

# Tolerances keyed by check family. Every check names the family it uses.
DEFAULT_TOLERANCES = types.MappingProxyType(
    {
        "algebra": 1e-12,
        "bracket": 1e-6,
        "jacobi": 1e-6,
        "tangency": 1e-10,
        "pushforward": 1e-7,
        "isospectral": 1e-9,
        "conservation": 1e-9,
        "group": 1e-8,
        "crossval": 1e-5,
        "calibration": 1e-4,
        "commute": 1e-7,
        "angle-fit": 1e-6,
        "slope": 1e-6,
        "sum-r": 1e-10,
        "spectrum": 1e-9,
        "symmetry": 1e-9,
        "shapovalov": 1e-10,
        "rank": 0.5,
    },
)


def validate_n(n):
    """Check the matrix size is supported.

    >>> validate_n(3)
    3
    >>> validate_n(99)
    Traceback (most recent call last):
    ...
    symmetric_toda.errors.InputError: n out of range (2 <= n <= 8), got 99
    """
    if isinstance(n, bool) or not isinstance(n, int):
        raise InputError(f"n must be an integer, got {n!r}")
    if not MIN_N <= n <= MAX_N:
        raise InputError(f"n out of range ({MIN_N} <= n <= {MAX_N}), got {n}")
    return n


def parse_tolerance(text):
    """Parse a ``name=value`` tolerance override.

    >>> parse_tolerance("crossval=1e-6")
    ('crossval', 1e-06)
    """
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name:
        raise InputError(f"tolerance override must look like name=value: {text!r}")
    if name not in DEFAULT_TOLERANCES:
        known = ", ".join(sorted(DEFAULT_TOLERANCES))
        raise InputError(f"unknown tolerance {name!r}; known: {known}")
    try:
        number = float(value)
    except ValueError as e:
        raise InputError(f"tolerance {name} is not a number: {value!r}") from e
    if not math.isfinite(number) or number <= 0:
        raise InputError(f"tolerance {name} must be positive, got {value}")
    return name, number


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Settings shared by every command.

    :param n: matrix size
    :param seed: seed echoed into every report
    :param tolerances: overrides merged over :data:`DEFAULT_TOLERANCES`
    :param samples: random points per sampled check
    :param suites: names of the suites to run, empty for all
    """

    n: int
    seed: int = 0
    tolerances: typing.Mapping[str, float] = dataclasses.field(default_factory=dict)
    samples: int = DEFAULT_SAMPLES
    suites: typing.Tuple[str, ...] = ()

    def __post_init__(self):
        validate_n(self.n)
        if self.samples < 1:
            raise InputError(f"samples must be positive, got {self.samples}")
        merged = dict(DEFAULT_TOLERANCES)
        for name, value in dict(self.tolerances).items():
            if name not in DEFAULT_TOLERANCES:
                raise InputError(f"unknown tolerance {name!r}")
            if not value > 0:
                raise InputError(f"tolerance {name} must be positive, got {value}")
            merged[name] = float(value)
        object.__setattr__(self, "tolerances", types.MappingProxyType(merged))
        object.__setattr__(self, "suites", tuple(self.suites))

    @classmethod
    def from_options(cls, n, seed=0, tol=(), samples=DEFAULT_SAMPLES, suites=()):
        """Build a config from raw command line values."""
        overrides = dict(parse_tolerance(item) for item in tol)
        return cls(
            n=n,
            seed=seed,
            tolerances=overrides,
            samples=samples,
            suites=tuple(suites),
        )

    def tolerance(self, name):
        return self.tolerances[name]
