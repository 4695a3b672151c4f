"""Credit-portfolio pipeline: obligor records to monthly risk reports.

Per-obligor expected loss is EAD x PD x LGD, with PD drawn from the
SFC consumer-portfolio rating matrix and LGD from the SFC guarantee/
days-past-due schedule (overrides win when present).  Loss rates are
per-obligor expected losses divided by total exposure; each period the
rate sample is fitted by the method of moments and the fitted law's
tail measures are scaled back into currency.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import risk
from .distribution import BetaKotzParams, ConfidenceLevel
from .estimation import fit_moments, stats_from_samples

__all__ = [
    "Rating",
    "Segment",
    "Guarantee",
    "Obligor",
    "PdTable",
    "LgdSchedule",
    "PortfolioReport",
    "SFC_PD_TABLE",
    "SFC_LGD_SCHEDULE",
    "pd_lookup",
    "lgd_lookup",
    "expected_loss",
    "loss_rates",
    "period_report",
    "read_portfolio_csv",
    "report_to_json",
    "report_to_csv",
]


class Rating(enum.Enum):
    AA = "AA"
    A = "A"
    BB = "BB"
    B = "B"
    CC = "CC"
    DEFAULT = "Default"


class Segment(enum.Enum):
    AUTOMOBILES = "Automobiles"
    OTHER = "Other"
    CREDIT_CARD = "CreditCard"
    CFC_AUTOMOBILES = "CFCAutomobiles"
    CFC_OTHER = "CFCOther"


class Guarantee(enum.Enum):
    ADMISSIBLE_FINANCIAL_COLLATERAL = "AdmissibleFinancialCollateral"
    COMMERCIAL_RESIDENTIAL_REAL_ESTATE = "CommercialResidentialRealEstate"
    REAL_ESTATE_LEASING = "RealEstateLeasing"
    OTHER_LEASING = "OtherLeasing"
    RECEIVABLES = "Receivables"
    OTHER_ADMISSIBLE = "OtherAdmissible"
    NON_ADMISSIBLE = "NonAdmissible"
    NO_GUARANTEE = "NoGuarantee"


def _parse_enum(cls, text, column, row_num):
    lookup = {member.value.lower(): member for member in cls}
    key = str(text).strip().lower()
    if key not in lookup:
        raise ValueError(
            f"row {row_num}, column '{column}': unknown value {text!r}; "
            f"expected one of {sorted(m.value for m in cls)}"
        )
    return lookup[key]


@dataclass(frozen=True)
class Obligor:
    """One borrower record."""

    id: str
    rating: Rating
    segment: Segment
    ead: float
    guarantee: Guarantee
    days_past_due: int = 0
    pd_override: Optional[float] = None
    lgd_override: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.ead) and self.ead >= 0.0):
            raise ValueError(f"obligor {self.id}: ead must be >= 0, got {self.ead}")
        if self.days_past_due < 0:
            raise ValueError(
                f"obligor {self.id}: days_past_due must be >= 0, "
                f"got {self.days_past_due}"
            )
        for name, value in (("pd_override", self.pd_override),
                            ("lgd_override", self.lgd_override)):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(
                    f"obligor {self.id}: {name} must lie in [0, 1], got {value}"
                )


@dataclass(frozen=True)
class PdTable:
    """Probability-of-default matrix, rating x segment."""

    entries: Mapping[tuple, float]

    def __post_init__(self):
        for rating in Rating:
            for segment in Segment:
                key = (rating, segment)
                if key not in self.entries:
                    raise ValueError(f"PD table is missing {rating.value}/{segment.value}")
                pd = self.entries[key]
                if not 0.0 < pd <= 1.0:
                    raise ValueError(
                        f"PD for {rating.value}/{segment.value} must lie in "
                        f"(0, 1], got {pd}"
                    )
                if rating is Rating.DEFAULT and pd != 1.0:
                    raise ValueError("the Default rating row must be 1.0 everywhere")


def _pd_rows(by_rating):
    entries = {}
    for rating, row in by_rating.items():
        for segment, pd in zip(Segment, row):
            entries[(rating, segment)] = pd
    return entries


# SFC consumer-portfolio PD matrix; columns are
# Automobiles, Other, CreditCard, CFCAutomobiles, CFCOther.
SFC_PD_TABLE = PdTable(_pd_rows({
    Rating.AA: (0.0097, 0.0210, 0.0158, 0.0102, 0.0354),
    Rating.A: (0.0312, 0.0388, 0.0535, 0.0288, 0.0719),
    Rating.BB: (0.0748, 0.1268, 0.0953, 0.1234, 0.1586),
    Rating.B: (0.1576, 0.1416, 0.1417, 0.2427, 0.3118),
    Rating.CC: (0.3101, 0.2257, 0.1706, 0.4332, 0.4101),
    Rating.DEFAULT: (1.0, 1.0, 1.0, 1.0, 1.0),
}))


@dataclass(frozen=True)
class LgdSchedule:
    """Loss-given-default by guarantee class and days past due.

    Each class has a base LGD plus ordered (days threshold, lgd) tiers;
    thresholds are inclusive lower bounds.  A class without tiers (the
    admissible-financial-collateral flat 12%) keeps its base forever.
    """

    base: Mapping[Guarantee, float]
    tiers: Mapping[Guarantee, tuple]

    def __post_init__(self):
        for guarantee in Guarantee:
            if guarantee not in self.base:
                raise ValueError(f"LGD schedule is missing {guarantee.value}")
            lgd = self.base[guarantee]
            if not 0.0 < lgd <= 1.0:
                raise ValueError(
                    f"base LGD for {guarantee.value} must lie in (0, 1], got {lgd}"
                )
            tiers = self.tiers.get(guarantee, ())
            previous_days, previous_lgd = 0, lgd
            for days, tier_lgd in tiers:
                if days <= previous_days:
                    raise ValueError(
                        f"{guarantee.value}: tier days must increase strictly"
                    )
                if tier_lgd < previous_lgd:
                    raise ValueError(
                        f"{guarantee.value}: tier LGDs must be non-decreasing"
                    )
                previous_days, previous_lgd = days, tier_lgd
            if tiers and tiers[-1][1] != 1.0:
                raise ValueError(f"{guarantee.value}: terminal tier LGD must be 1.0")


SFC_LGD_SCHEDULE = LgdSchedule(
    base={
        Guarantee.ADMISSIBLE_FINANCIAL_COLLATERAL: 0.12,
        Guarantee.COMMERCIAL_RESIDENTIAL_REAL_ESTATE: 0.40,
        Guarantee.REAL_ESTATE_LEASING: 0.35,
        Guarantee.OTHER_LEASING: 0.45,
        Guarantee.RECEIVABLES: 0.45,
        Guarantee.OTHER_ADMISSIBLE: 0.50,
        Guarantee.NON_ADMISSIBLE: 0.60,
        Guarantee.NO_GUARANTEE: 0.75,
    },
    tiers={
        Guarantee.ADMISSIBLE_FINANCIAL_COLLATERAL: (),
        Guarantee.COMMERCIAL_RESIDENTIAL_REAL_ESTATE: ((360, 0.70), (720, 1.00)),
        Guarantee.REAL_ESTATE_LEASING: ((360, 0.70), (720, 1.00)),
        Guarantee.OTHER_LEASING: ((270, 0.70), (540, 1.00)),
        Guarantee.RECEIVABLES: ((360, 0.80), (720, 1.00)),
        Guarantee.OTHER_ADMISSIBLE: ((270, 0.70), (540, 1.00)),
        Guarantee.NON_ADMISSIBLE: ((210, 0.70), (420, 1.00)),
        Guarantee.NO_GUARANTEE: ((30, 0.85), (90, 1.00)),
    },
)


def pd_lookup(table: PdTable, rating: Rating, segment: Segment) -> float:
    """Probability of default for a rating/segment pair."""
    return table.entries[(rating, segment)]


def lgd_lookup(schedule: LgdSchedule, guarantee: Guarantee, days_past_due: int) -> float:
    """Loss given default for a guarantee class at the given delinquency."""
    if days_past_due < 0:
        raise ValueError(f"days_past_due must be >= 0, got {days_past_due}")
    lgd = schedule.base[guarantee]
    for days, tier_lgd in schedule.tiers.get(guarantee, ()):
        if days_past_due >= days:
            lgd = tier_lgd
    return lgd


def expected_loss(o: Obligor, pd: PdTable, lgd: LgdSchedule) -> float:
    """EAD x PD x LGD for one obligor; overrides win over table lookups."""
    pd_value = o.pd_override if o.pd_override is not None else pd_lookup(
        pd, o.rating, o.segment
    )
    lgd_value = o.lgd_override if o.lgd_override is not None else lgd_lookup(
        lgd, o.guarantee, o.days_past_due
    )
    return o.ead * pd_value * lgd_value


def loss_rates(
    portfolio: Sequence[Obligor], pd: PdTable, lgd: LgdSchedule
) -> list[float]:
    """Per-obligor expected loss divided by total portfolio exposure.

    The rates sum to the portfolio's total expected loss rate.
    """
    total = math.fsum(o.ead for o in portfolio)
    if not total > 0.0:
        raise ValueError("total exposure must be positive to form loss rates")
    return [expected_loss(o, pd, lgd) / total for o in portfolio]


@dataclass(frozen=True)
class PortfolioReport:
    """One period's credit-risk report in currency units."""

    label: str
    total_exposure: float
    expected_loss: float
    var: float
    ec: float
    cvar: float
    fitted: BetaKotzParams
    alpha: ConfidenceLevel
    obligor_count: int

    def __post_init__(self):
        if self.obligor_count < 1:
            raise ValueError("obligor_count must be positive")
        if not self.cvar >= self.var >= 0.0:
            raise ValueError(
                f"need cvar >= var >= 0, got cvar={self.cvar}, var={self.var}"
            )
        if self.ec != self.var - self.expected_loss:
            raise ValueError("ec must equal var - expected_loss exactly")

    def to_dict(self) -> dict:
        """Full-precision field mapping."""
        return {
            "label": self.label,
            "total_exposure": self.total_exposure,
            "expected_loss": self.expected_loss,
            "var": self.var,
            "ec": self.ec,
            "cvar": self.cvar,
            "fitted_a": self.fitted.a,
            "fitted_b": self.fitted.b,
            "alpha": self.alpha.alpha,
            "obligor_count": self.obligor_count,
        }

    def to_rendered_dict(self) -> dict:
        """Wire form: currency at 2 decimals, rates at 9 significant digits."""
        d = self.to_dict()
        for key in ("total_exposure", "expected_loss", "var", "ec", "cvar"):
            d[key] = round(d[key], 2)
        for key in ("fitted_a", "fitted_b", "alpha"):
            d[key] = float(f"{d[key]:.9g}")
        return d


def _currency(rate_measure: float, total_exposure: float) -> float:
    # The single place where rate-domain measures become money.
    return rate_measure * total_exposure


def period_report(
    label: str,
    portfolio: Sequence[Obligor],
    pd: PdTable = SFC_PD_TABLE,
    lgd: LgdSchedule = SFC_LGD_SCHEDULE,
    alpha=0.99,
    cfg: Optional[risk.RootSolveConfig] = None,
) -> PortfolioReport:
    """Fit the period's loss-rate sample and report tail measures in currency.

    Obligors with zero expected loss stay in the exposure denominator
    but are excluded from the fitting sample (their rate has no
    log-likelihood and carries no tail information).
    """
    if not portfolio:
        raise ValueError("portfolio must be non-empty")
    total = math.fsum(o.ead for o in portfolio)
    if not total > 0.0:
        raise ValueError("total exposure must be positive")
    rates = [
        r for r in loss_rates(portfolio, pd, lgd) if r > 0.0
    ]
    if len(rates) < 2:
        raise ValueError(
            f"need at least 2 obligors with positive expected loss, got {len(rates)}"
        )
    stats = stats_from_samples(rates)
    fitted = fit_moments(stats)
    measures = risk.report(fitted, alpha, cfg)
    el = _currency(measures.mean, total)
    var_cur = _currency(measures.var, total)
    cvar_cur = _currency(measures.cvar, total)
    return PortfolioReport(
        label=label,
        total_exposure=total,
        expected_loss=el,
        var=var_cur,
        ec=var_cur - el,
        cvar=cvar_cur,
        fitted=fitted,
        alpha=ConfidenceLevel(risk._alpha_value(alpha)),
        obligor_count=len(portfolio),
    )


# ---------------------------------------------------------------------------
# wire formats
# ---------------------------------------------------------------------------

_REQUIRED_COLUMNS = ("id", "rating", "segment", "ead", "guarantee", "days_past_due")
_OPTIONAL_COLUMNS = ("pd_override", "lgd_override")


def _parse_float(text, column, row_num, lo=None, hi=None):
    try:
        value = float(str(text).strip())
    except (TypeError, ValueError):
        raise ValueError(
            f"row {row_num}, column '{column}': not a number: {text!r}"
        ) from None
    if lo is not None and value < lo or hi is not None and value > hi:
        raise ValueError(
            f"row {row_num}, column '{column}': {value} outside "
            f"[{lo}, {hi if hi is not None else 'inf'}]"
        )
    return value


def read_portfolio_csv(path) -> list[Obligor]:
    """Load obligors from the portfolio CSV wire format.

    Header row required; enum columns are case-insensitive; optional
    pd_override/lgd_override columns win over table lookups when
    non-empty.  Schema violations name the offending row and column.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValueError("portfolio CSV is empty (missing header row)")
        names = [n.strip().lower() for n in reader.fieldnames]
        missing = [c for c in _REQUIRED_COLUMNS if c not in names]
        if missing:
            raise ValueError(f"portfolio CSV is missing columns: {missing}")
        obligors = []
        for row_num, raw in enumerate(reader, start=2):
            row = {
                (k.strip().lower() if k else k): (v if v is not None else "")
                for k, v in raw.items()
            }
            days_text = str(row.get("days_past_due", "")).strip()
            try:
                days = int(days_text) if days_text else 0
            except ValueError:
                raise ValueError(
                    f"row {row_num}, column 'days_past_due': not an "
                    f"integer: {days_text!r}"
                ) from None
            overrides = {}
            for column in _OPTIONAL_COLUMNS:
                text = str(row.get(column) or "").strip()
                overrides[column] = (
                    _parse_float(text, column, row_num, lo=0.0, hi=1.0)
                    if text else None
                )
            try:
                obligors.append(Obligor(
                    id=str(row.get("id", "")).strip(),
                    rating=_parse_enum(Rating, row.get("rating", ""), "rating", row_num),
                    segment=_parse_enum(Segment, row.get("segment", ""),
                                        "segment", row_num),
                    ead=_parse_float(row.get("ead", ""), "ead", row_num, lo=0.0),
                    guarantee=_parse_enum(Guarantee, row.get("guarantee", ""),
                                          "guarantee", row_num),
                    days_past_due=days,
                    pd_override=overrides["pd_override"],
                    lgd_override=overrides["lgd_override"],
                ))
            except ValueError as err:
                if str(err).startswith("row "):
                    raise
                raise ValueError(f"row {row_num}: {err}") from None
    if not obligors:
        raise ValueError("portfolio CSV contains no obligor rows")
    return obligors


def report_to_json(report: PortfolioReport) -> str:
    """Rendered JSON wire form of a period report."""
    return json.dumps(report.to_rendered_dict(), indent=2, sort_keys=True)


def report_to_csv(report: PortfolioReport) -> str:
    """Rendered single-record CSV wire form of a period report."""
    d = report.to_rendered_dict()
    fields = list(d.keys())
    header = ",".join(fields)
    values = []
    for key in fields:
        v = d[key]
        if key in ("total_exposure", "expected_loss", "var", "ec", "cvar"):
            values.append(f"{v:.2f}")
        elif key in ("fitted_a", "fitted_b", "alpha"):
            values.append(f"{v:.9g}")
        else:
            values.append(str(v))
    return header + "\n" + ",".join(values) + "\n"
