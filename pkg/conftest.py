import hypothesis
import numpy as np

np.seterr(all="warn")

# property tests integrate orbits; no per-example deadline
hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile("default")
