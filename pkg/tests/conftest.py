import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

# numba's first-call JIT would trip hypothesis' per-example deadline
settings.register_profile("evoexpr", deadline=None)
settings.load_profile("evoexpr")
