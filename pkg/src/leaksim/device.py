"""Mock telephony device: identity fields, permission gating, source taint."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Optional

from .errors import InvalidAccuracy, PermissionFault

READ_PHONE_STATE = "android.permission.READ_PHONE_STATE"
INTERNET = "android.permission.INTERNET"


class SourceField(enum.Enum):
    """Subscriber/device attributes exposed by the telephony manager.

    Declaration order is the canonical label order used everywhere a taint
    set is rendered.
    """

    IMEI = "getDeviceId"
    MSISDN = "getLine1Number"
    NETWORK_OPERATOR = "getNetworkOperatorName"
    NETWORK_TYPE = "getNetworkType"
    COUNTRY_ISO = "getNetworkCountryIso"
    SOFTWARE_VERSION = "getDeviceSoftwareVersion"
    PHONE_TYPE = "getPhoneType"

    @property
    def label(self) -> str:
        return self.name

    @classmethod
    def from_label(cls, label: str) -> "SourceField":
        try:
            return cls[label]
        except KeyError:
            raise ValueError(f"unknown source field {label!r}") from None


_FIELD_ORDER = {f: i for i, f in enumerate(SourceField)}

# None means the getter is ungated.
PERMISSION_MAP: dict[SourceField, Optional[str]] = {
    SourceField.IMEI: READ_PHONE_STATE,
    SourceField.MSISDN: READ_PHONE_STATE,
    SourceField.NETWORK_OPERATOR: None,
    SourceField.NETWORK_TYPE: None,
    SourceField.COUNTRY_ISO: None,
    SourceField.SOFTWARE_VERSION: READ_PHONE_STATE,
    SourceField.PHONE_TYPE: None,
}


def sorted_labels(taints) -> list[str]:
    return [f.label for f in sorted(taints, key=_FIELD_ORDER.__getitem__)]


@dataclass(frozen=True)
class TaintedValue:
    value: str
    taints: frozenset = field(default_factory=frozenset)

    @classmethod
    def clean(cls, value: str) -> "TaintedValue":
        return cls(value, frozenset())

    @property
    def labels(self) -> list[str]:
        return sorted_labels(self.taints)

    def to_json(self) -> dict:
        return {"value": self.value, "taints": self.labels}

    @classmethod
    def from_json(cls, obj: dict) -> "TaintedValue":
        return cls(obj["value"], frozenset(SourceField.from_label(t) for t in obj["taints"]))


@dataclass(frozen=True)
class DeviceProfile:
    """Immutable identity of the simulated handset.

    Defaults are the emulator placeholders shipped as ``emulator.device``.
    """

    imei: str = "000000000000000"
    msisdn: str = "15555215554"
    network_operator_name: str = "Android"
    network_type: int = 3
    network_country_iso: str = "us"
    device_software_version: str = "00"
    phone_type: int = 1
    clock_epoch_millis: int = 1305158400000

    def raw(self, source: SourceField) -> str:
        value = {
            SourceField.IMEI: self.imei,
            SourceField.MSISDN: self.msisdn,
            SourceField.NETWORK_OPERATOR: self.network_operator_name,
            SourceField.NETWORK_TYPE: self.network_type,
            SourceField.COUNTRY_ISO: self.network_country_iso,
            SourceField.SOFTWARE_VERSION: self.device_software_version,
            SourceField.PHONE_TYPE: self.phone_type,
        }[source]
        return str(value)


@dataclass(frozen=True)
class Criteria:
    accuracy: int


def read_source(profile: DeviceProfile, source: SourceField, granted) -> TaintedValue:
    """Read one telephony attribute, tainted with exactly its own label.

    Raises PermissionFault when the attribute is gated and the permission is
    not in ``granted``.
    """
    required = PERMISSION_MAP[source]
    if required is not None and required not in granted:
        raise PermissionFault(required)
    return TaintedValue(profile.raw(source), frozenset({source}))


_DAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
           "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def format_date(epoch_millis: int) -> str:
    # Fixed English names so the output never depends on the process locale.
    dt = _EPOCH + timedelta(milliseconds=epoch_millis)
    return (f"{_DAYS[dt.weekday()]} {_MONTHS[dt.month - 1]} {dt.day:02d} "
            f"{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d} UTC {dt.year:04d}")


def read_clock(profile: DeviceProfile) -> tuple[TaintedValue, TaintedValue]:
    millis = profile.clock_epoch_millis
    return TaintedValue.clean(str(millis)), TaintedValue.clean(format_date(millis))


def set_criteria_accuracy(value: int) -> Criteria:
    if isinstance(value, bool) or value not in (1, 2):
        raise InvalidAccuracy(value)
    return Criteria(value)
