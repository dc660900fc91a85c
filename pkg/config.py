# Configuration settings for the encoding toolkit

# Numerical tolerances
TERM_DROP_TOLERANCE = 1e-12     # merged XP terms below this magnitude are dropped
HERMITIAN_TOLERANCE = 1e-12     # explicit h_ij vs h_ji conflicts beyond this are rejected
NORM_TOLERANCE = 1e-10          # state-vector normalisation check
PROBABILITY_TOLERANCE = 1e-12   # histogram mass bookkeeping

# Simulator and exhaustive-check caps (desk scale)
MAX_SIMULATOR_QUBITS = 20
MAX_PAULI_EXPAND_QUBITS = 12
MAX_EXHAUSTIVE_KERNEL_DIM = 24        # verify_code enumerates ker G only when M - Q <= this
MAX_EXHAUSTIVE_STATES = 10_000_000    # injectivity check over C(M, N) states
MAX_DENSE_BASIS = 10_000              # exact diagonalisation basis size

# Randomized Linear Encoder
RLE_DEFAULT_SEED = 0
RLE_DEFAULT_MAX_ATTEMPTS = 20_000
RLE_PRECHECK_RANDOM_FACTOR = 4        # random 2K-weight probes per attempt = factor * (M - Q)
RLE_SCHEDULE_BELOW_GV = 2             # minimal-Q search starts this far below the GV bound

# Variational quantum eigensolver
VQE_DEFAULT_LAYERS = 2
VQE_DEFAULT_RESTARTS = 5              # CI mode
VQE_BENCHMARK_RESTARTS = 30           # benchmark mode
VQE_DEFAULT_INIT_SCALE = 0.01         # radians, "near zero parameters"
VQE_DEFAULT_MAX_ITERATIONS = 500
VQE_DEFAULT_GRADIENT_STEP = 1e-5
VQE_DEFAULT_CONVERGENCE_TOL = 1e-8    # Hartree
VQE_DEFAULT_SEED = 0

# Units
HARTREE_TO_KCAL_PER_MOL = 627.509474
CHEMICAL_ACCURACY_KCAL = 1.0

# Artifacts
CODE_FORMAT_VERSION = 1
