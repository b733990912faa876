import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from zsflow import make_game

from diamond_oracle import diamond_game

GAMES_DIR = Path(__file__).resolve().parent.parent / "games"


@pytest.fixture(scope="session")
def mp():
    """Matching pennies: row player wants to match."""
    return make_game([[1, -1], [-1, 1]], "non-symmetric", ["H", "T"], ["H", "T"])


@pytest.fixture(scope="session")
def rps():
    """Rock-paper-scissors with the canonical cyclic payoffs."""
    return make_game([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], "symmetric", ["R", "P", "S"])


@pytest.fixture(scope="session")
def diamond():
    """3x3 game whose sink omits exactly the corner profile (a, a); derived by
    exhaustive search over small integer payoffs (see diamond_oracle)."""
    return diamond_game()


@pytest.fixture(scope="session")
def games_dir():
    return GAMES_DIR
