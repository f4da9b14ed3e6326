"""
Full metric chain for one physical configuration.

``SystemModel`` freezes the deterministic channels of a scenario once and
then maps any candidate operating point (beamforming, powers, blocklength,
replica count) to the complete per-user report:
SJNR -> BLER -> replica success -> reliability -> utilization/delay ->
energy efficiency.
"""

from dataclasses import dataclass

import numpy as np

from .channel import RisGeometry, LinkScenario, ris_ue_channel, ris_bs_channel, \
    jammer_direct_channel, ris_jammer_channel
from .link import BeamformConfig, PowerAllocation, NoiseConfig, FblCode, \
    sjnr_all, bler, replica_success, reliability, co_phasing_phases
from .traffic import FrameParams, TrafficParams, utilization, mean_delay, \
    energy_efficiency


@dataclass(frozen=True)
class MetricsReport:
    """Per-user link and traffic metrics plus the system energy efficiency.

    ``mean_delay`` entries and ``energy_efficiency`` are None when any queue
    is unstable (utilization >= 1).
    """

    sjnr: tuple[float, ...]
    bler: tuple[float, ...]
    replica_success: float
    reliability: tuple[float, ...]
    utilization: tuple[float, ...]
    mean_delay: tuple[float | None, ...]
    energy_efficiency: float | None
    stable: bool


class SystemModel:
    """Deterministic scenario with precomputed channels.

    The channels depend only on geometry and layout, so they are synthesized
    once; every candidate evaluation then costs a few vector operations.
    Evaluations are pure and safe to run concurrently.
    """

    def __init__(self, geometry: RisGeometry, scenario: LinkScenario,
                 noise: NoiseConfig, header_time: float, bandwidth: float,
                 payload_bits: int, arrival_rates: tuple[float, ...]):
        if len(arrival_rates) != scenario.n_users:
            raise ValueError("one arrival rate per user required")
        self.geometry = geometry
        self.scenario = scenario
        self.noise = noise
        self.header_time = header_time
        self.bandwidth = bandwidth
        self.payload_bits = payload_bits
        self.arrival_rates = tuple(arrival_rates)

        self.ue_channels = np.vstack([
            ris_ue_channel(geometry, scenario, k)
            for k in range(1, scenario.n_users + 1)
        ])
        self.bs_channel = ris_bs_channel(geometry, scenario)
        self.jammer_direct = jammer_direct_channel(geometry, scenario)
        self.jammer_channel = ris_jammer_channel(geometry, scenario)

    @property
    def n_users(self) -> int:
        return self.scenario.n_users

    @property
    def n_elements(self) -> int:
        return self.geometry.n_elements

    def co_phased_beam(self, user: int, amplitudes) -> BeamformConfig:
        """Uniform or per-element amplitudes with phases aligned to one user."""
        phases = co_phasing_phases(self.bs_channel, self.ue_channels[user - 1])
        amps = np.broadcast_to(np.asarray(amplitudes, dtype=float),
                               (self.n_elements,)).copy()
        return BeamformConfig(amps, phases)

    def sjnr(self, beam: BeamformConfig, powers: PowerAllocation) -> np.ndarray:
        return sjnr_all(self.ue_channels, self.bs_channel, self.jammer_direct,
                        self.jammer_channel, beam, powers,
                        self.scenario.jammer_power, self.noise)

    def ris_output_power(self, beam: BeamformConfig, powers: PowerAllocation) -> float:
        """Reporting-only estimate of the power radiated by the active RIS.

        Per-element incident power (all users, the jammer, element thermal
        noise) scaled by that element's amplification. Never part of the
        energy-efficiency denominator.
        """
        incident = (np.asarray(powers.user_powers) @ np.abs(self.ue_channels) ** 2
                    + self.scenario.jammer_power * np.abs(self.jammer_channel) ** 2
                    + self.noise.ris_thermal_var)
        return float(np.sum(beam.amplitudes * incident))

    def evaluate(self, beam: BeamformConfig, powers: PowerAllocation,
                 blocklength: int, retransmissions: int,
                 arrival_rates: tuple[float, ...] | None = None) -> MetricsReport:
        """Run the full metric chain for one operating point.

        ``arrival_rates`` overrides the scenario rates for this evaluation
        only (used by traffic sweeps; channels are unaffected).
        """
        code = FblCode(blocklength, self.payload_bits)
        frame = FrameParams(self.header_time, self.bandwidth, blocklength)
        rates = self.arrival_rates if arrival_rates is None else tuple(arrival_rates)
        if len(rates) != self.n_users:
            raise ValueError("one arrival rate per user required")
        traffic = TrafficParams(rates, retransmissions)

        gammas = self.sjnr(beam, powers)
        blers = bler(gammas, code)
        omega = replica_success(blers)
        rel = reliability(omega, retransmissions)

        rhos = tuple(utilization(frame, traffic, k)
                     for k in range(1, self.n_users + 1))
        stable = all(rho < 1.0 for rho in rhos)
        if stable:
            delays = tuple(mean_delay(frame, traffic, k)
                           for k in range(1, self.n_users + 1))
            eta = energy_efficiency(self.payload_bits,
                                    [rel] * self.n_users,
                                    powers.user_powers, delays)
        else:
            delays = tuple(None for _ in range(self.n_users))
            eta = None

        return MetricsReport(
            sjnr=tuple(float(g) for g in np.atleast_1d(gammas)),
            bler=tuple(float(b) for b in np.atleast_1d(blers)),
            replica_success=omega,
            reliability=tuple(rel for _ in range(self.n_users)),
            utilization=rhos,
            mean_delay=delays,
            energy_efficiency=eta,
            stable=stable,
        )
