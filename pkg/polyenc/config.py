import os
from pathlib import Path

# Logging
LOG_LEVEL = os.environ.get("POLYENC_LOG_LEVEL", os.environ.get("LOG_LEVEL", "INFO"))

# Heuristic monomorphisation (iteration bound K and new-formula budget Delta)
MONO_ITERATIONS = int(os.environ.get("POLYENC_MONO_ITERATIONS", 3))
MONO_BUDGET = int(os.environ.get("POLYENC_MONO_BUDGET", 200))

# Analysis defaults
COVER_POLICY = os.environ.get("POLYENC_COVER_POLICY", "minimal-earliest")
WITNESS_POLICY = os.environ.get("POLYENC_WITNESS_POLICY", "uncovered")

# Oracle budgets
STEP_LIMIT = int(os.environ.get("POLYENC_STEP_LIMIT", 50000))
MODEL_BOUND = int(os.environ.get("POLYENC_MODEL_BOUND", 4))
REFUTE_SECONDS = float(os.environ.get("POLYENC_REFUTE_SECONDS", 60))
# Above this many symbols the refuter does not fall back to congruence axioms
CONGRUENCE_SYMBOL_LIMIT = int(os.environ.get("POLYENC_CONGRUENCE_SYMBOL_LIMIT", 15))
# Weight picks per oldest-clause pick in the given-clause loop; 0 picks by weight only
PICK_GIVEN_RATIO = int(os.environ.get("POLYENC_PICK_GIVEN_RATIO", 4))

# External FOF prover bridge
PROVER = os.environ.get("POLYENC_PROVER", "")
PROVER_TIMEOUT = float(os.environ.get("POLYENC_PROVER_TIMEOUT", 30))

# Bundled corpus and service state
BASE_DIR = Path(__file__).resolve().parent.parent
CORPUS_DIR = Path(os.environ.get("POLYENC_CORPUS_DIR", str(BASE_DIR / "corpus")))
HISTORY_PATH = os.environ.get("POLYENC_HISTORY_PATH", "")
HISTORY_LIMIT = int(os.environ.get("POLYENC_HISTORY_LIMIT", 100))

# API
API_PREFIX = ""
CORS_ORIGINS = os.environ.get("POLYENC_CORS_ORIGINS", "*").split(",")
