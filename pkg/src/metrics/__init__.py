"""
Instance measures: dynamism, urgency and geographic dispersion.
"""

from .dispersion import DispersionReport, DispersionRequest, geographic_dispersion, station_direct_time
from .dynamism import DynamismReport, dynamism, rho_of
from .report import (
    InstanceMetrics,
    MetricRoles,
    format_report,
    measure_instance,
    report_to_frame,
    report_values,
    truncate_2dp,
)
from .urgency import UrgencyReport, urgency

__all__ = [
    "DispersionReport",
    "DispersionRequest",
    "DynamismReport",
    "InstanceMetrics",
    "MetricRoles",
    "UrgencyReport",
    "dynamism",
    "format_report",
    "geographic_dispersion",
    "measure_instance",
    "report_to_frame",
    "report_values",
    "rho_of",
    "station_direct_time",
    "truncate_2dp",
    "urgency",
]
