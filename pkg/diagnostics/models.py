from dataclasses import dataclass, field


# p-value brackets for tests judged against tabulated critical values
P_BRACKETS = ("<0.01", "<0.05", "<0.10", ">=0.10")


@dataclass(frozen=True)
class TestResult:
    """
    Outcome of a hypothesis test. Tests with an exact null distribution report `p_value`;
    unit-root tests report `p_bracket` from the critical-value table instead. Durbin-Watson
    carries neither and never rejects.
    """
    __test__ = False # not a unittest case

    name: str
    statistic: float
    p_value: float = None
    p_bracket: str = None
    lags: int = 0
    reject_at_5pct: bool = False
    critical_values: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CorrelogramRow:
    lag: int
    acf: float
    pacf: float
    q_stat: float
    p_value: float


@dataclass(frozen=True)
class PreEstimationReport:
    """The battery of tests run on a series before any model is fitted."""
    series: str
    jarque_bera: TestResult
    adf: list
    pp: TestResult
    ljung_box: list
    arch_lm: TestResult
    correlogram: list
