from django.conf import settings

# Default number of binary unfolding iterations (the `max` of an analysis).
MAX_ITERATIONS = getattr(settings, "LOOPFINDER_MAX_ITERATIONS", 2)

# Abort the unfolding once the pool holds more clauses than this.
POOL_CAP = getattr(settings, "LOOPFINDER_POOL_CAP", 100_000)

# Longest binary clause sequence stored in a loop dictionary.
PAIR_CAP = getattr(settings, "LOOPFINDER_PAIR_CAP", 8)

# Number of passes over the pool when building a loop dictionary.
PASS_LIMIT = getattr(settings, "LOOPFINDER_PASS_LIMIT", 3)

# If True then each looping condition is replayed by the derivation oracle.
ORACLE_ENABLED = getattr(settings, "LOOPFINDER_ORACLE_ENABLED", True)

# Depth a derivation must reach for a condition to count as confirmed.
ORACLE_DEPTH = getattr(settings, "LOOPFINDER_ORACLE_DEPTH", 1000)

# Number of search nodes the oracle may visit before giving up.
ORACLE_NODE_BUDGET = getattr(settings, "LOOPFINDER_ORACLE_NODE_BUDGET", 1_000_000)

# Modes are enumerated explicitly, so arity is bounded.
MODE_ARITY_BOUND = getattr(settings, "LOOPFINDER_MODE_ARITY_BOUND", 16)

# Interpreter recursion limit while the oracle runs; terms grow with depth.
RECURSION_LIMIT = getattr(settings, "LOOPFINDER_RECURSION_LIMIT", 20_000)
