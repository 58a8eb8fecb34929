from enum import Enum


class EstimatorType(Enum):
    """Density estimators; values double as CLI names and report keys."""
    CDE = "cde"
    IDE_ML = "ide-ml"
    IDE_CORRECT = "ide"
    IDE_WRONG = "ide-wrong"

    @classmethod
    def parse(cls, name: str) -> "EstimatorType":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ', '.join(e.value for e in cls)
            raise ValueError(f'Unknown estimator {name!r}; expected one of {valid}')


class SweepType(Enum):
    DENSITY = "density"
    RANGE = "range"


class Conditioning(Enum):
    """How the neighbour count of a trial is drawn"""
    POISSON_COUNT = "poisson"  # K ~ Poisson(λ c_m R^m), truth is the intensity
    FIXED_COUNT = "fixed"      # N fixed, truth is N / (c_m R^m)


# Estimators fed by one node's own ordered samples
LOCAL_ESTIMATORS = (EstimatorType.IDE_ML, EstimatorType.IDE_CORRECT, EstimatorType.IDE_WRONG)
