"""
Bandwidth units. Every rate in the code base is carried in bits/second.
"""

KBPS = 1e3
MBPS = 1e6


def kbps(value: float) -> float:
    """Kilobits/second to bits/second"""
    return value * KBPS


def mbps(value: float) -> float:
    """Megabits/second to bits/second"""
    return value * MBPS


def bdp_bits(capacity: float, base_rtt: float) -> float:
    """Bandwidth-delay product in bits"""
    return capacity * base_rtt
