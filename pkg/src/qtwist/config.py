"""Numerical tolerances shared by every module.

All thresholds live here so a run report can record exactly which values
were in force.
"""

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    unit_imaginary: float = 1e-10
    relations: float = 1e-10
    eigen_cluster: float = 1e-8
    frame_condition: float = 1e8
    det_floor: float = 1e-10
    sv_cutoff: float = 1e-8
    sv_gap: float = 10.0
    max_arg_step: float = 0.7853981633974483  # pi / 4
    fit_condition: float = 1e10
    fit_relative: float = 1e-6
    vanish: float = 1e-8
    nonzero: float = 1e-3
    newton: float = 1e-12
    newton_maxiter: int = 20
    fd_step: float = 1e-5

    def as_dict(self) -> dict:
        return asdict(self)


TOL = Tolerances()

SCHEMA = "qtwist-report/1"
DEFAULT_SEED = 42
DEFAULT_SAMPLE_COUNT = 512
DEFAULT_MAX_DEGREE = 6
