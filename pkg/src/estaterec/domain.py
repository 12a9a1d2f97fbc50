"""Domain vocabulary shared by every engine component.

Listings and properties, graded interaction events, search filters, user
categories, and the engine configuration. Everything here is an immutable
value object; instances are safe to share across threads.
"""

import re
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, NamedTuple

import yaml

MS_PER_SECOND = 1_000
MS_PER_MINUTE = 60 * MS_PER_SECOND
MS_PER_HOUR = 60 * MS_PER_MINUTE
MS_PER_DAY = 24 * MS_PER_HOUR


class EngineError(Exception):
    """Base class for every engine-raised error."""


class EventValidationError(EngineError):
    """An ingested event failed validation; `field` names the offender."""

    def __init__(self, message: str, field_name: str):
        super().__init__(message)
        self.field = field_name


class UnknownPropertyError(EventValidationError):
    def __init__(self, property_id: str):
        super().__init__(f"unknown property: {property_id!r}", "property_id")


class MalformedTimestampError(EventValidationError):
    def __init__(self, timestamp) -> None:
        super().__init__(f"malformed timestamp: {timestamp!r}", "timestamp")


class ListingType(str, Enum):
    BUY = "buy"
    RENT = "rent"


APARTMENT_TYPES = ("1RK", "1BHK", "2BHK", "3BHK", "4BHK", "5PLUS")
FURNISHING_TYPES = ("Fully", "Semi", "Unfurnished")
PROFILE_TYPES = ("Broker", "Owner")


class ActionCategory(str, Enum):
    CONVERSION = "conversion"
    DETAIL_PAGE = "detail_page"
    IMPRESSIONS = "impressions"
    OTHER = "other"


class Action(str, Enum):
    """Canonical user actions, graded by how strongly they signal intent.

    Each action carries a fixed (category, weight) pair; the weights drive
    every user-profile and interaction-matrix computation in the engine.
    """

    SUBMITTED_CRF = "submitted_crf"
    OTP_VERIFIED = "otp_verified"
    OPENED_OR_FILLED_CRF = "opened_or_filled_crf"
    DETAIL_PAGE_ENGAGEMENT = "detail_page_engagement"
    IMPRESSION_DETAIL = "impression_detail"
    PAGE_SCROLL_OR_RATING = "page_scroll_or_rating"

    @property
    def weight(self) -> int:
        return ACTION_WEIGHTS[self]

    @property
    def category(self) -> ActionCategory:
        return ACTION_CATEGORIES[self]


ACTION_WEIGHTS: Mapping[Action, int] = MappingProxyType(
    {
        Action.SUBMITTED_CRF: 10,
        Action.OTP_VERIFIED: 8,
        Action.OPENED_OR_FILLED_CRF: 6,
        Action.DETAIL_PAGE_ENGAGEMENT: 4,
        Action.IMPRESSION_DETAIL: 2,
        Action.PAGE_SCROLL_OR_RATING: 1,
    }
)

ACTION_CATEGORIES: Mapping[Action, ActionCategory] = MappingProxyType(
    {
        Action.SUBMITTED_CRF: ActionCategory.CONVERSION,
        Action.OTP_VERIFIED: ActionCategory.CONVERSION,
        Action.OPENED_OR_FILLED_CRF: ActionCategory.CONVERSION,
        Action.DETAIL_PAGE_ENGAGEMENT: ActionCategory.DETAIL_PAGE,
        Action.IMPRESSION_DETAIL: ActionCategory.IMPRESSIONS,
        Action.PAGE_SCROLL_OR_RATING: ActionCategory.OTHER,
    }
)

# Observed lead-conversion rates (percent, buy/rent) for each action class.
# Documentation constants: they justify the weights and calibrate the
# synthetic clickstream generator, but play no role in serving.
ACTION_CONVERSION_RATES: Mapping[Action, tuple[float, float]] = MappingProxyType(
    {
        Action.SUBMITTED_CRF: (100.0, 100.0),
        Action.OTP_VERIFIED: (83.5, 83.1),
        Action.OPENED_OR_FILLED_CRF: (36.8, 36.9),
        Action.DETAIL_PAGE_ENGAGEMENT: (26.1, 27.7),
        Action.IMPRESSION_DETAIL: (16.8, 14.7),
        Action.PAGE_SCROLL_OR_RATING: (23.8, 19.6),
    }
)

# Raw clickstream event names map onto the canonical actions at ingest time.
# Extend per deployment; keys are matched lowercased.
DEFAULT_ACTION_ALIASES: Mapping[str, Action] = MappingProxyType(
    {
        "submitted_crf": Action.SUBMITTED_CRF,
        "crf_submit": Action.SUBMITTED_CRF,
        "lead_drop": Action.SUBMITTED_CRF,
        "otp_verified": Action.OTP_VERIFIED,
        "otp": Action.OTP_VERIFIED,
        "opened_or_filled_crf": Action.OPENED_OR_FILLED_CRF,
        "crf_open": Action.OPENED_OR_FILLED_CRF,
        "crf_fill": Action.OPENED_OR_FILLED_CRF,
        "detail_page_engagement": Action.DETAIL_PAGE_ENGAGEMENT,
        "recommendation_click": Action.DETAIL_PAGE_ENGAGEMENT,
        "image_view": Action.DETAIL_PAGE_ENGAGEMENT,
        "video_play": Action.DETAIL_PAGE_ENGAGEMENT,
        "impression_detail": Action.IMPRESSION_DETAIL,
        "locality_info": Action.IMPRESSION_DETAIL,
        "amenities_check": Action.IMPRESSION_DETAIL,
        "price_trend": Action.IMPRESSION_DETAIL,
        "floor_plan": Action.IMPRESSION_DETAIL,
        "page_scroll_or_rating": Action.PAGE_SCROLL_OR_RATING,
        "pdp_open": Action.PAGE_SCROLL_OR_RATING,
        "pdp_scroll": Action.PAGE_SCROLL_OR_RATING,
        "scroll": Action.PAGE_SCROLL_OR_RATING,
        "rating_check": Action.PAGE_SCROLL_OR_RATING,
    }
)


def action_weight(action: Action) -> int:
    """Fixed interaction weight for an action (total on the enum)."""
    return ACTION_WEIGHTS[action]


def resolve_action(name: str, aliases: Mapping[str, Action] | None = None) -> Action:
    """Map a raw clickstream event name to its canonical action.

    Raises KeyError when the name is not a canonical action or known alias.
    """
    table = aliases if aliases is not None else DEFAULT_ACTION_ALIASES
    key = name.strip().lower()
    if key in table:
        return table[key]
    return Action(key)  # raises ValueError for unknown names


@dataclass(frozen=True, slots=True)
class Property:
    """A single active listing. Immutable; prices in whole Rupees."""

    id: str
    city: str
    locality: str
    apartment_type: str
    furnishing: str
    profile_type: str
    price: int
    built_up_area: float
    age_years: float
    floor_number: int
    image_count: int
    listing_type: ListingType
    created_at: int
    active: bool = True

    def __post_init__(self):
        if self.price <= 0:
            raise ValueError(f"property {self.id}: price must be positive")
        if self.built_up_area <= 0:
            raise ValueError(f"property {self.id}: built_up_area must be positive")
        if self.age_years < 0:
            raise ValueError(f"property {self.id}: age_years must be non-negative")
        if self.floor_number < 0:
            raise ValueError(f"property {self.id}: floor_number must be non-negative")
        if self.image_count < 0:
            raise ValueError(f"property {self.id}: image_count must be non-negative")
        if self.apartment_type not in APARTMENT_TYPES:
            raise ValueError(f"property {self.id}: unknown apartment_type {self.apartment_type!r}")
        if self.furnishing not in FURNISHING_TYPES:
            raise ValueError(f"property {self.id}: unknown furnishing {self.furnishing!r}")
        if self.profile_type not in PROFILE_TYPES:
            raise ValueError(f"property {self.id}: unknown profile_type {self.profile_type!r}")


def property_to_dict(p: Property) -> dict:
    return {
        "id": p.id,
        "city": p.city,
        "locality": p.locality,
        "apartment_type": p.apartment_type,
        "furnishing": p.furnishing,
        "profile_type": p.profile_type,
        "price": p.price,
        "built_up_area": p.built_up_area,
        "age_years": p.age_years,
        "floor_number": p.floor_number,
        "image_count": p.image_count,
        "listing_type": p.listing_type.value,
        "created_at": p.created_at,
        "active": p.active,
    }


def property_from_dict(d: Mapping) -> Property:
    return Property(
        id=str(d["id"]),
        city=str(d["city"]),
        locality=str(d["locality"]),
        apartment_type=str(d["apartment_type"]),
        furnishing=str(d["furnishing"]),
        profile_type=str(d["profile_type"]),
        price=int(d["price"]),
        built_up_area=float(d["built_up_area"]),
        age_years=float(d["age_years"]),
        floor_number=int(d["floor_number"]),
        image_count=int(d["image_count"]),
        listing_type=ListingType(d["listing_type"]),
        created_at=int(d["created_at"]),
        active=bool(d.get("active", True)),
    )


@dataclass(frozen=True, slots=True)
class InteractionEvent:
    """One user action on one property: the atom of implicit feedback."""

    user_id: str
    property_id: str
    action: Action
    timestamp: int  # milliseconds since epoch
    listing_type: ListingType


def validate_event(event: InteractionEvent, known_properties) -> InteractionEvent:
    """Accept an event for ingest or raise a rejection naming the bad field.

    `known_properties` is anything supporting `in` over property ids.
    """
    if not isinstance(event.timestamp, int) or event.timestamp < 0:
        raise MalformedTimestampError(event.timestamp)
    if event.property_id not in known_properties:
        raise UnknownPropertyError(event.property_id)
    return event


@dataclass(frozen=True, slots=True)
class SearchFilter:
    """Search criteria accompanying every recommendation request."""

    city: str
    locality: str
    listing_type: ListingType
    apartment_type: str | None = None
    price_min: int | None = None
    price_max: int | None = None
    area_min: float | None = None
    area_max: float | None = None
    top_k: int = 6

    def __post_init__(self):
        if not self.locality:
            raise ValueError("locality is required")
        if not self.city:
            raise ValueError("city is required")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.apartment_type is not None and self.apartment_type not in APARTMENT_TYPES:
            raise ValueError(f"unknown apartment_type {self.apartment_type!r}")
        if self.price_min is not None and self.price_max is not None and self.price_min > self.price_max:
            raise ValueError("price range must have min <= max")
        if self.area_min is not None and self.area_max is not None and self.area_min > self.area_max:
            raise ValueError("area range must have min <= max")


def matches_filter(p: Property, f: SearchFilter) -> bool:
    """Whether an active property satisfies the filter's predicates."""
    if not p.active or p.listing_type is not f.listing_type:
        return False
    if p.city != f.city or p.locality != f.locality:
        return False
    return matches_optional_filters(p, f)


def matches_optional_filters(p: Property, f: SearchFilter) -> bool:
    """Only the optional predicates (apartment type, price and area ranges)."""
    if f.apartment_type is not None and p.apartment_type != f.apartment_type:
        return False
    if f.price_min is not None and p.price < f.price_min:
        return False
    if f.price_max is not None and p.price > f.price_max:
        return False
    if f.area_min is not None and p.built_up_area < f.area_min:
        return False
    if f.area_max is not None and p.built_up_area > f.area_max:
        return False
    return True


class UserCategory(str, Enum):
    COLD_START = "cold_start"
    SHORT_TERM = "short_term"
    LONG_TERM = "long_term"
    SHORT_LONG_TERM = "short_long_term"


class ScoredItem(NamedTuple):
    """One recommended property with the score that ranked it."""

    property_id: str
    score: float


_DURATION_RE = re.compile(r"^\s*(\d+)\s*(ms|s|m|h|d)\s*$")
_DURATION_UNITS = {
    "ms": 1,
    "s": MS_PER_SECOND,
    "m": MS_PER_MINUTE,
    "h": MS_PER_HOUR,
    "d": MS_PER_DAY,
}


def parse_duration(value) -> int:
    """Duration in milliseconds from an int (ms) or a string like '10m', '2h', '28d'."""
    if isinstance(value, bool):
        raise ValueError(f"not a duration: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        m = _DURATION_RE.match(value)
        if m:
            return int(m.group(1)) * _DURATION_UNITS[m.group(2)]
    raise ValueError(f"not a duration: {value!r}")


def format_duration(ms: int) -> str:
    """Render milliseconds with the largest unit that divides it exactly."""
    for suffix, unit in (("d", MS_PER_DAY), ("h", MS_PER_HOUR), ("m", MS_PER_MINUTE), ("s", MS_PER_SECOND)):
        if ms % unit == 0 and ms >= unit:
            return f"{ms // unit}{suffix}"
    return f"{ms}ms"


# Config fields holding a single duration (stored as milliseconds, rendered
# as human-friendly strings on disk).
_DURATION_FIELDS = (
    "cold_start_window",
    "long_term_activity_gate",
    "inactivity_reset",
    "training_window_rent",
    "training_window_buy",
    "content_short_refresh",
    "content_long_refresh",
    "collab_refresh",
)


@dataclass(frozen=True)
class EngineConfig:
    """Tunable windows, cadences and budgets; all durations in milliseconds."""

    cold_start_window: int = 10 * MS_PER_MINUTE
    long_term_activity_gate: int = 2 * MS_PER_HOUR
    hybrid_window: tuple[int, int] = (2 * MS_PER_HOUR, 4 * MS_PER_HOUR)
    min_properties_long_term: int = 5
    inactivity_reset: int = 28 * MS_PER_DAY
    training_window_rent: int = 95 * MS_PER_DAY
    training_window_buy: int = 190 * MS_PER_DAY
    content_short_refresh: int = 10 * MS_PER_MINUTE
    content_long_refresh: int = 2 * MS_PER_HOUR
    collab_refresh: int = 24 * MS_PER_HOUR
    latency_budget_avg_ms: float = 40.0
    default_k: int = 6
    rng_seed: int = 42

    def __post_init__(self):
        for name in _DURATION_FIELDS:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be a positive duration")
        lo, hi = self.hybrid_window
        if lo <= 0 or hi <= 0 or lo >= hi:
            raise ValueError("hybrid_window must be a positive (min, max) pair with min < max")
        if lo != self.long_term_activity_gate:
            raise ValueError("hybrid_window minimum must equal long_term_activity_gate")
        if self.min_properties_long_term < 1:
            raise ValueError("min_properties_long_term must be >= 1")
        if self.default_k < 1:
            raise ValueError("default_k must be >= 1")
        if self.latency_budget_avg_ms <= 0:
            raise ValueError("latency_budget_avg_ms must be positive")

    def training_window(self, listing_type: ListingType) -> int:
        if listing_type is ListingType.RENT:
            return self.training_window_rent
        return self.training_window_buy

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in _DURATION_FIELDS:
                out[f.name] = format_duration(value)
            elif f.name == "hybrid_window":
                out[f.name] = [format_duration(value[0]), format_duration(value[1])]
            else:
                out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in _DURATION_FIELDS:
                kwargs[key] = parse_duration(value)
            elif key == "hybrid_window":
                lo, hi = value
                kwargs[key] = (parse_duration(lo), parse_duration(hi))
            else:
                kwargs[key] = value
        return cls(**kwargs)

    def save(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "EngineConfig":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        return cls.from_dict(data)
