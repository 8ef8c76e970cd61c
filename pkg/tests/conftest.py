import os

# pin BLAS pools before numpy ever loads: keeps runs single-threaded and
# bitwise reproducible regardless of the host's core count
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")
