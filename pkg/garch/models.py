from dataclasses import dataclass, field, fields
import numpy as np

from gridvol.exceptions import DomainError, SpecMismatch
from timeseries.models import TimeSeries


VARIANCE_FAMILIES = ("garch", "egarch", "gjr")
DISTRIBUTIONS = ("normal", "student_t")


@dataclass(frozen=True)
class MeanSpec:
    """
    ARMAX(R, M) conditional mean. `regressors` are TimeSeries bound to the target's dates
    (exogenous series and step dummies); their names label the beta coefficients.
    """
    ar: int = 0
    ma: int = 0
    regressors: tuple = ()
    include_constant: bool = True

    def __post_init__(self):
        if self.ar < 0 or self.ma < 0:
            raise DomainError(f"ARMA orders must be nonnegative, got R={self.ar}, M={self.ma}.")
        object.__setattr__(self, 'regressors', tuple(self.regressors))

    @property
    def conditioning(self) -> int:
        """Leading observations consumed as pre-sample by the recursion."""
        return max(self.ar, self.ma)

    @property
    def regressor_names(self) -> list:
        return [reg.name for reg in self.regressors]

    @property
    def n_params(self) -> int:
        return int(self.include_constant) + self.ar + self.ma + len(self.regressors)

    @property
    def label(self) -> str:
        base = f"ARMAX({self.ar},{self.ma})" if self.regressors else f"ARMA({self.ar},{self.ma})"
        if self.ar == self.ma == 0 and not self.regressors:
            base = "constant" if self.include_constant else "zero"
        return base


@dataclass(frozen=True)
class VarianceSpec:
    family: str = "garch"
    p: int = 1
    q: int = 1
    regressors: tuple = ()

    def __post_init__(self):
        if self.family not in VARIANCE_FAMILIES:
            raise DomainError(f"Invalid variance family: {self.family}. Expected one of {VARIANCE_FAMILIES}.")
        if self.p < 1 or self.q < 1:
            raise DomainError(f"GARCH orders must be at least 1, got P={self.p}, Q={self.q}.")
        object.__setattr__(self, 'regressors', tuple(self.regressors))

    @property
    def has_leverage(self) -> bool:
        return self.family in ("egarch", "gjr")

    @property
    def regressor_names(self) -> list:
        return [reg.name for reg in self.regressors]

    @property
    def n_params(self) -> int:
        return 1 + self.p + self.q + (self.q if self.has_leverage else 0) + len(self.regressors)

    @property
    def label(self) -> str:
        return f"{self.family.upper()}({self.p},{self.q})"


@dataclass(frozen=True)
class InnovationDist:
    """Unit-variance innovation law; `nu` is the starting (or fixed) Student's t degrees of freedom."""
    kind: str = "normal"
    nu: float = None

    def __post_init__(self):
        if self.kind not in DISTRIBUTIONS:
            raise DomainError(f"Invalid innovation distribution: {self.kind}. Expected one of {DISTRIBUTIONS}.")
        if self.kind == "student_t":
            nu = 8.0 if self.nu is None else float(self.nu)
            if nu <= 2:
                raise DomainError(f"Student's t degrees of freedom must exceed 2, got {nu}.")
            object.__setattr__(self, 'nu', nu)
        elif self.nu is not None:
            raise DomainError("Degrees of freedom only apply to the student_t distribution.")

    @property
    def n_params(self) -> int:
        return 1 if self.kind == "student_t" else 0


@dataclass(frozen=True)
class ModelSpec:
    mean: MeanSpec
    variance: VarianceSpec
    dist: InnovationDist

    @property
    def label(self) -> str:
        dist = "t" if self.dist.kind == "student_t" else "normal"
        label = f"{self.mean.label}-{self.variance.label}-{dist}"
        if self.mean.regressors:
            label += f" [mean: {','.join(self.mean.regressor_names)}]"
        if self.variance.regressors:
            label += f" [variance: {','.join(self.variance.regressor_names)}]"
        return label

    @property
    def n_params(self) -> int:
        return self.mean.n_params + self.variance.n_params + self.dist.n_params

    def param_names(self) -> list:
        """Stable parameter order: c, phi, theta, beta, k, g, a, l, gamma, nu."""
        mean, var = self.mean, self.variance
        names = ["c"] if mean.include_constant else []
        names += [f"phi{i}" for i in range(1, mean.ar + 1)]
        names += [f"theta{j}" for j in range(1, mean.ma + 1)]
        names += [f"beta_{name}" for name in mean.regressor_names]
        names += ["k"]
        names += [f"g{i}" for i in range(1, var.p + 1)]
        names += [f"a{j}" for j in range(1, var.q + 1)]
        if var.has_leverage:
            names += [f"l{j}" for j in range(1, var.q + 1)]
        names += [f"gamma_{name}" for name in var.regressor_names]
        if self.dist.kind == "student_t":
            names += ["nu"]
        return names


# Coefficients of a composite mean/variance model
@dataclass(frozen=True)
class ParamVector:
    c: float = 0.0
    phi: tuple = ()
    theta: tuple = ()
    beta: tuple = ()
    k: float = 0.0
    g: tuple = ()
    a: tuple = ()
    l: tuple = ()
    gamma: tuple = ()
    nu: float = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, (list, tuple, np.ndarray)):
                object.__setattr__(self, f.name, tuple(float(v) for v in value))
            elif value is not None:
                object.__setattr__(self, f.name, float(value))

    def check(self, spec: ModelSpec):
        """Raise SpecMismatch unless every coefficient group matches the spec's dimensions."""
        mean, var = spec.mean, spec.variance
        expected = {
            'phi': mean.ar,
            'theta': mean.ma,
            'beta': len(mean.regressors),
            'g': var.p,
            'a': var.q,
            'l': var.q if var.has_leverage else 0,
            'gamma': len(var.regressors),
        }
        for name, size in expected.items():
            if len(getattr(self, name)) != size:
                raise SpecMismatch(
                    f"Parameter group '{name}' has {len(getattr(self, name))} values, "
                    f"spec {spec.label} needs {size}."
                )
        if not mean.include_constant and self.c != 0:
            raise SpecMismatch("Constant is excluded from the mean equation but c is nonzero.")
        if spec.dist.kind == "student_t" and self.nu is None:
            raise SpecMismatch("Student's t innovations need a degrees-of-freedom parameter.")
        return self

    def to_array(self, spec: ModelSpec) -> np.ndarray:
        self.check(spec)
        values = [self.c] if spec.mean.include_constant else []
        values += list(self.phi) + list(self.theta) + list(self.beta)
        values += [self.k] + list(self.g) + list(self.a) + list(self.l) + list(self.gamma)
        if spec.dist.kind == "student_t":
            values.append(self.nu)
        return np.array(values, dtype=float)

    @classmethod
    def from_array(cls, values, spec: ModelSpec):
        values = np.asarray(values, dtype=float)
        if len(values) != spec.n_params:
            raise SpecMismatch(f"Spec {spec.label} has {spec.n_params} parameters, got {len(values)}.")
        mean, var = spec.mean, spec.variance
        pos = 0

        def take(size):
            nonlocal pos
            chunk = values[pos:pos + size]
            pos += size
            return tuple(chunk)

        c = take(1)[0] if mean.include_constant else 0.0
        phi, theta, beta = take(mean.ar), take(mean.ma), take(len(mean.regressors))
        k = take(1)[0]
        g, a = take(var.p), take(var.q)
        l = take(var.q) if var.has_leverage else ()
        gamma = take(len(var.regressors))
        nu = take(1)[0] if spec.dist.kind == "student_t" else None
        return cls(c=c, phi=phi, theta=theta, beta=beta, k=k, g=g, a=a, l=l, gamma=gamma, nu=nu)

    def as_dict(self, spec: ModelSpec) -> dict:
        return dict(zip(spec.param_names(), self.to_array(spec).tolist()))


@dataclass(frozen=True)
class SimulatedPaths:
    y: TimeSeries
    eps: TimeSeries
    sigma2: TimeSeries
    z: TimeSeries
    params: ParamVector = field(default=None)
