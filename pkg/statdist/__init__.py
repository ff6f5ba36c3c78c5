__version__ = "0.1.0"


# global constants

# absolute tolerance for adaptive quadrature and its recursion limit
QUAD_TOL = 1e-9
QUAD_MAX_DEPTH = 40

# bisection tolerance (radians) for greedy packing and law inversion
BISECT_TOL = 1e-12

# arccos arguments may overshoot [-1, 1] by this much from rounding
CLAMP_TOL = 1e-12

# endpoints where p is 0 or 1 are pulled inside the domain by this much
ENDPOINT_EPS = 1e-9

# one standard error per side; D scales as 1 / CONFIDENCE_MULTIPLIER
CONFIDENCE_MULTIPLIER = 1.0

# default sample-size schedule for the counting limit
DEFAULT_SCHEDULE = (10**2, 10**3, 10**4, 10**5, 10**6)

# below this many trials binomial draws use per-trial inversion
INVERSION_CUTOFF = 10**3

DEFAULT_COLUMNS = 18
DEFAULT_CHANNELS = 8

# basis optimiser
OPTIMIZER_STEP_TOL = 1e-9
OPTIMIZER_MAX_SWEEPS = 10**3
OPTIMIZER_RESTARTS = 8

#! beyond this many monotone runs the closed form gives way to quadrature
MAX_MONOTONE_SEGMENTS = 256
