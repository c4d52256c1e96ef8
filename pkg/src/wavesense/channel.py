"""Intra-substrate wireless broadcast channel.

Log-distance path loss, SINR-based capture with a guard interval, half-duplex
receivers, and the 72-bit consensus packet codec (8-bit sender id plus two
32-bit fixed-point impedance fields).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace

import numpy as np

from .topology import Topology

# Fixed-point wire encoding: ohms = raw / 2**20, signed 32 bit.
FIXED_POINT_FRACTION_BITS = 20
FIXED_POINT_SCALE = 1 << FIXED_POINT_FRACTION_BITS
_INT32_MIN = -(1 << 31)
_INT32_MAX = (1 << 31) - 1

PAYLOAD_BITS = 72
_STRUCT = struct.Struct(">Bii")  # sender_id, r_raw, x_raw, big-endian

REFERENCE_DISTANCE_M = 0.001  # path-loss reference distance (1 mm)


def quantize_ohm(value_ohm: float) -> int:
    """Saturating fixed-point quantization of an impedance component."""
    raw = round(value_ohm * FIXED_POINT_SCALE)
    return min(max(raw, _INT32_MIN), _INT32_MAX)


@dataclass(frozen=True)
class ConsensusPacket:
    """One consensus broadcast: sender id and the (R, X) estimate."""

    sender_id: int
    r_raw: int
    x_raw: int

    def __post_init__(self) -> None:
        if not 0 <= self.sender_id <= 0xFF:
            raise ValueError("sender id must fit in 8 bits")
        for raw in (self.r_raw, self.x_raw):
            if not _INT32_MIN <= raw <= _INT32_MAX:
                raise ValueError("impedance field must fit in signed 32 bits")

    @classmethod
    def from_values(cls, sender_id: int, r_ohm: float, x_ohm: float) -> "ConsensusPacket":
        return cls(sender_id, quantize_ohm(r_ohm), quantize_ohm(x_ohm))

    @property
    def r_ohm(self) -> float:
        return self.r_raw / FIXED_POINT_SCALE

    @property
    def x_ohm(self) -> float:
        return self.x_raw / FIXED_POINT_SCALE


def encode_packet(packet: ConsensusPacket) -> bytes:
    """Serialize to the 72-bit payload: bits 0-7 sender, 8-39 R, 40-71 X."""
    return _STRUCT.pack(packet.sender_id, packet.r_raw, packet.x_raw)


def decode_packet(payload: bytes) -> ConsensusPacket:
    if len(payload) != _STRUCT.size:
        raise ValueError(f"payload must be {_STRUCT.size} bytes, got {len(payload)}")
    sender_id, r_raw, x_raw = _STRUCT.unpack(payload)
    return ConsensusPacket(sender_id, r_raw, x_raw)


def air_frame_bits(packet: ConsensusPacket, packet_bits: int) -> str:
    """On-air frame as a bit string: zero preamble then the payload."""
    if packet_bits < PAYLOAD_BITS:
        raise ValueError(f"frame must be at least {PAYLOAD_BITS} bits")
    payload = encode_packet(packet)
    bits = bin(int.from_bytes(payload, "big"))[2:].zfill(PAYLOAD_BITS)
    return "0" * (packet_bits - PAYLOAD_BITS) + bits


@dataclass(frozen=True)
class ChannelConfig:
    """Physical-layer parameters of the nano-node broadcast channel.

    The default reference loss closes the link budget so that the
    interference-free reception radius is exactly 2.5 cell pitches
    (25 mm), which gives interior nodes 20 reachable neighbors.
    """

    carrier_hz: float = 1e11
    noise_dbnw: float = 0.0
    sinr_threshold_db: float = -10.0
    guard_interval_s: float = 1e-10
    bitrate_bps: float = 1e11
    packet_bits: int = 100
    tx_power_dbnw: float = 30.0
    path_loss_exponent: float = 2.0
    reference_loss_db: float = 12.041199826559248
    ideal: bool = False  # lossless delivery, for oracle-equivalence checks

    @property
    def packet_duration_s(self) -> float:
        return self.packet_bits / self.bitrate_bps

    @property
    def noise_w(self) -> float:
        return 1e-9 * 10.0 ** (self.noise_dbnw / 10.0)

    @property
    def sinr_threshold_linear(self) -> float:
        return 10.0 ** (self.sinr_threshold_db / 10.0)

    @property
    def collision_window_s(self) -> float:
        """Two equal-length transmissions interfere iff their starts differ
        by less than this (each on-air interval extended by the guard)."""
        return self.packet_duration_s + 2.0 * self.guard_interval_s

    def reception_radius_m(self) -> float:
        """Interference-free decode range from the link budget."""
        margin_db = (
            self.tx_power_dbnw - self.reference_loss_db - self.noise_dbnw - self.sinr_threshold_db
        )
        return REFERENCE_DISTANCE_M * 10.0 ** (margin_db / (10.0 * self.path_loss_exponent))


def calibrated_reference_loss_db(
    reception_radius_m: float,
    tx_power_dbnw: float = 30.0,
    noise_dbnw: float = 0.0,
    sinr_threshold_db: float = -10.0,
    path_loss_exponent: float = 2.0,
) -> float:
    """Reference loss making the interference-free range exactly the given radius."""
    return (
        tx_power_dbnw
        - noise_dbnw
        - sinr_threshold_db
        - 10.0 * path_loss_exponent * math.log10(reception_radius_m / REFERENCE_DISTANCE_M)
    )


def received_power_dbnw(
    config: ChannelConfig, topology: Topology, sender: int, receiver: int
) -> float:
    """Log-distance received power at the receiver, dBnW."""
    if sender == receiver:
        raise ValueError("sender and receiver must differ")
    d = topology.distance_m(sender, receiver)
    return (
        config.tx_power_dbnw
        - config.reference_loss_db
        - 10.0 * config.path_loss_exponent * math.log10(d / REFERENCE_DISTANCE_M)
    )


def gain_matrix_w(config: ChannelConfig, topology: Topology) -> np.ndarray:
    """Linear received power in watts for every (sender, receiver) pair."""
    d = topology.distance_matrix_m()
    with np.errstate(divide="ignore"):
        prx_dbnw = (
            config.tx_power_dbnw
            - config.reference_loss_db
            - 10.0 * config.path_loss_exponent * np.log10(d / REFERENCE_DISTANCE_M)
        )
    g = 1e-9 * 10.0 ** (prx_dbnw / 10.0)
    np.fill_diagonal(g, 0.0)
    return g


@dataclass(frozen=True)
class Transmission:
    """One packet on the air."""

    sender: int
    start_time_s: float
    end_time_s: float
    packet: ConsensusPacket


def transmissions_interfere(a: Transmission, b: Transmission, guard_interval_s: float) -> bool:
    """Guard-extended on-air intervals overlap."""
    g = guard_interval_s
    return (a.start_time_s - g < b.end_time_s + g) and (b.start_time_s - g < a.end_time_s + g)


def arbitrate(
    config: ChannelConfig,
    topology: Topology,
    receiver: int,
    overlapping: list[Transmission],
    window: tuple[float, float],
) -> list[ConsensusPacket]:
    """Decide which of the window's transmissions the receiver decodes.

    A transmission decodes iff its interference-free received power clears
    the SINR threshold over noise alone (reception floor) and its SINR over
    noise plus all time-overlapping transmissions clears the threshold.
    A receiver transmitting during the window hears nothing in it.
    """
    if config.ideal:
        return [t.packet for t in overlapping if t.sender != receiver]
    g = config.guard_interval_s
    win = Transmission(-1, window[0], window[1], None)
    for t in overlapping:
        if t.sender == receiver and transmissions_interfere(t, win, g):
            return []  # half-duplex: own transmission blanks the window
    noise = config.noise_w
    thr = config.sinr_threshold_linear
    decoded = []
    for t in overlapping:
        if t.sender == receiver:
            continue
        p = 1e-9 * 10.0 ** (received_power_dbnw(config, topology, t.sender, receiver) / 10.0)
        if p < thr * noise:
            continue  # out of range
        interference = 0.0
        for o in overlapping:
            if o is t or o.sender == receiver:
                continue
            if transmissions_interfere(t, o, g):
                interference += 1e-9 * 10.0 ** (
                    received_power_dbnw(config, topology, o.sender, receiver) / 10.0
                )
        if p / (noise + interference) >= thr:
            decoded.append(t.packet)
    return decoded


def with_ideal_delivery(config: ChannelConfig) -> ChannelConfig:
    return replace(config, ideal=True)
