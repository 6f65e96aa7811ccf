"""RF resource pool: carrier assignment on a frequency raster and RB arithmetic.

Carriers are granted as (center, bandwidth) pairs inside a spectrum band.
Centers lie on the band's raster grid; channels at the same site must not
overlap (nominal-width, edge-to-edge, zero extra guard); different sites may
reuse the same frequencies. Assignment is deterministic: the lowest feasible
raster-aligned center wins.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

from .errors import FrontendBusy, NoSpectrum, NotFound, UnknownBandwidth

SUBCARRIER_SPACING_HZ = 15_000
SUBCARRIERS_PER_RB = 12

# LTE channel bandwidth -> transmission bandwidth configuration, keyed by
# tenths of a MHz to dodge float equality. 1.4 MHz carries 6 RBs; above
# 3 MHz the count is 5 RB per MHz.
_RB_BY_DECI_MHZ = {14: 6, 30: 15, 50: 25, 100: 50, 150: 75, 200: 100}


def _deci_mhz(bandwidth_mhz: float) -> int:
    return int(round(bandwidth_mhz * 10))


def bandwidth_to_rbs(bandwidth_mhz: float) -> int:
    """Resource-block capacity of an LTE channel bandwidth (1.4 MHz -> 6, 5 MHz -> 25)."""
    try:
        return _RB_BY_DECI_MHZ[_deci_mhz(bandwidth_mhz)]
    except KeyError:
        raise UnknownBandwidth(f"{bandwidth_mhz} MHz is not an LTE channel bandwidth") from None


def rbs_to_subcarriers(n_rb: int) -> int:
    if n_rb < 0:
        raise ValueError("n_rb must be >= 0")
    return SUBCARRIERS_PER_RB * n_rb


def bandwidth_to_hz(bandwidth_mhz: float) -> int:
    if _deci_mhz(bandwidth_mhz) not in _RB_BY_DECI_MHZ:
        raise UnknownBandwidth(f"{bandwidth_mhz} MHz is not an LTE channel bandwidth")
    return _deci_mhz(bandwidth_mhz) * 100_000


def hz_to_bandwidth_mhz(bw_hz: int) -> float:
    for deci in _RB_BY_DECI_MHZ:
        if deci * 100_000 == bw_hz:
            return deci / 10
    raise UnknownBandwidth(f"{bw_hz} Hz is not an LTE channel bandwidth")


@dataclass(frozen=True)
class RbConfig:
    """Resource grid shape for one LTE channel bandwidth."""

    bandwidth_mhz: float
    n_rb: int
    subcarriers: int
    subcarrier_spacing_hz: int = SUBCARRIER_SPACING_HZ

    @classmethod
    def for_bandwidth(cls, bandwidth_mhz: float) -> "RbConfig":
        n_rb = bandwidth_to_rbs(bandwidth_mhz)
        return cls(
            bandwidth_mhz=bandwidth_mhz,
            n_rb=n_rb,
            subcarriers=rbs_to_subcarriers(n_rb),
        )


@dataclass(frozen=True)
class SpectrumBand:
    band_id: str
    low_hz: int
    high_hz: int
    raster_hz: int = 100_000

    def violations(self) -> list[str]:
        out = []
        if self.low_hz >= self.high_hz:
            out.append(f"band {self.band_id}: low_hz must be < high_hz")
        if self.raster_hz <= 0:
            out.append(f"band {self.band_id}: raster_hz must be > 0")
        if self.high_hz - self.low_hz < 1_400_000:
            out.append(f"band {self.band_id}: narrower than the smallest LTE channel (1.4 MHz)")
        return out

    @property
    def width_hz(self) -> int:
        return self.high_hz - self.low_hz

    def to_dict(self) -> dict:
        return {
            "band_id": self.band_id,
            "low_hz": self.low_hz,
            "high_hz": self.high_hz,
            "raster_hz": self.raster_hz,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumBand":
        return cls(
            band_id=d["band_id"],
            low_hz=int(d["low_hz"]),
            high_hz=int(d["high_hz"]),
            raster_hz=int(d.get("raster_hz", 100_000)),
        )


@dataclass(frozen=True)
class CarrierAssignment:
    assignment_id: str
    band_id: str
    frontend_id: str
    site_id: str
    center_hz: int
    bw_hz: int
    owner_ns_id: str

    def to_dict(self) -> dict:
        return {
            "assignment_id": self.assignment_id,
            "band_id": self.band_id,
            "frontend_id": self.frontend_id,
            "site_id": self.site_id,
            "center_hz": self.center_hz,
            "bw_hz": self.bw_hz,
            "owner_ns_id": self.owner_ns_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CarrierAssignment":
        return cls(
            assignment_id=d["assignment_id"],
            band_id=d["band_id"],
            frontend_id=d["frontend_id"],
            site_id=d["site_id"],
            center_hz=int(d["center_hz"]),
            bw_hz=int(d["bw_hz"]),
            owner_ns_id=d["owner_ns_id"],
        )


class RfPool:
    """Bookkeeping for spectrum bands, frontends and live carrier assignments.

    Mutations arrive through the single lifecycle/task writer; reads may be
    concurrent. By default a frontend carries at most one active carrier.
    """

    def __init__(self, bands, frontends, one_carrier_per_frontend: bool = True):
        self.bands: list[SpectrumBand] = list(bands)
        for band in self.bands:
            bad = band.violations()
            if bad:
                raise ValueError("; ".join(bad))
        self.frontends = {f.frontend_id: f for f in frontends}
        self.one_carrier_per_frontend = one_carrier_per_frontend
        self._assignments: dict[str, CarrierAssignment] = {}
        self._counter = 0
        self._lock = threading.Lock()

    # -- queries ---------------------------------------------------------

    def assignments(self) -> list[CarrierAssignment]:
        return sorted(self._assignments.values(), key=lambda a: a.assignment_id)

    def assignments_at_site(self, site_id: str) -> list[CarrierAssignment]:
        return [a for a in self.assignments() if a.site_id == site_id]

    def assignments_for_ns(self, ns_id: str) -> list[CarrierAssignment]:
        return [a for a in self.assignments() if a.owner_ns_id == ns_id]

    def get(self, assignment_id: str) -> CarrierAssignment:
        try:
            return self._assignments[assignment_id]
        except KeyError:
            raise NotFound(f"carrier assignment {assignment_id} not found") from None

    def band(self, band_id: str) -> SpectrumBand:
        for b in self.bands:
            if b.band_id == band_id:
                return b
        raise NotFound(f"band {band_id} not found")

    def occupancy(self, band_id: str, site_id: str) -> float:
        band = self.band(band_id)
        used = sum(
            a.bw_hz
            for a in self._assignments.values()
            if a.band_id == band_id and a.site_id == site_id
        )
        return used / band.width_hz

    # -- mutations ---------------------------------------------------------

    def assign_carrier(
        self,
        frontend_id: str,
        bw_hz: int,
        owner_ns_id: str,
        band_id: Optional[str] = None,
    ) -> CarrierAssignment:
        """Grant the lowest feasible raster-aligned carrier for the request.

        Bands are tried in pool order unless band_id pins one. Raises
        NoSpectrum when no center fits, FrontendBusy when the frontend
        already carries an assignment.
        """
        with self._lock:
            frontend = self.frontends.get(frontend_id)
            if frontend is None:
                raise NotFound(f"frontend {frontend_id} not found")
            if bw_hz > frontend.max_bw_hz:
                raise NoSpectrum(
                    f"requested {bw_hz} Hz exceeds frontend {frontend_id} max {frontend.max_bw_hz} Hz"
                )
            if self.one_carrier_per_frontend and any(
                a.frontend_id == frontend_id for a in self._assignments.values()
            ):
                raise FrontendBusy(f"frontend {frontend_id} already carries an assignment")

            candidates = [self.band(band_id)] if band_id else self.bands
            for band in candidates:
                center = self._lowest_center(band, frontend.site_id, bw_hz)
                if center is not None:
                    self._counter += 1
                    assignment = CarrierAssignment(
                        assignment_id=f"ca-{self._counter:04d}",
                        band_id=band.band_id,
                        frontend_id=frontend_id,
                        site_id=frontend.site_id,
                        center_hz=center,
                        bw_hz=bw_hz,
                        owner_ns_id=owner_ns_id,
                    )
                    self._assignments[assignment.assignment_id] = assignment
                    return assignment
            raise NoSpectrum(f"no feasible center for {bw_hz} Hz at site {frontend.site_id}")

    def release_carrier(self, assignment_id: str) -> CarrierAssignment:
        with self._lock:
            try:
                return self._assignments.pop(assignment_id)
            except KeyError:
                raise NotFound(f"carrier assignment {assignment_id} not found") from None

    def _lowest_center(self, band: SpectrumBand, site_id: str, bw_hz: int) -> Optional[int]:
        if bw_hz > band.width_hz:
            return None
        # LTE channel bandwidths are even multiples of 100 kHz, so halves and
        # pairwise separation minima stay integral.
        half = bw_hz // 2
        raster = band.raster_hz
        taken = sorted(
            (a.center_hz, a.bw_hz)
            for a in self._assignments.values()
            if a.band_id == band.band_id and a.site_id == site_id
        )
        # First raster point whose lower channel edge clears band.low.
        k = -(-half // raster)  # ceil
        center = band.low_hz + k * raster
        while center + half <= band.high_hz:
            conflict = None
            for other_center, other_bw in taken:
                if abs(center - other_center) < (bw_hz + other_bw) // 2:
                    conflict = (other_center, other_bw)
                    break
            if conflict is None:
                return center
            # Jump to the first raster point clear of the blocking channel.
            min_center = conflict[0] + (conflict[1] + bw_hz) // 2
            k = max(k + 1, -(-(min_center - band.low_hz) // raster))
            center = band.low_hz + k * raster
        return None

    # -- snapshot ---------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "counter": self._counter,
            "assignments": [a.to_dict() for a in self.assignments()],
        }

    def load_state(self, d: dict) -> None:
        self._counter = int(d.get("counter", 0))
        self._assignments = {
            a["assignment_id"]: CarrierAssignment.from_dict(a) for a in d.get("assignments", [])
        }
