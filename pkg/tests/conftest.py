import numpy as np
import pytest

from bufdstc.signal_model import draw_channels, generate_codes


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def scenario():
    """Default-size system: K=3 users, L=6 relays, N=16 chips."""
    codes = generate_codes(3, 16, seed=7)
    channel = draw_channels(3, 6, seed=11)
    sr, rd = channel.signatures(codes)
    return codes, channel, sr, rd


def pytest_terminal_summary(terminalreporter):
    """Collect the one-line verdicts recorded by the acceptance tests."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", None) != "call":
                continue
            lines.extend(v for name, v in rep.user_properties if name == "acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
