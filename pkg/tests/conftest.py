import pytest

import subseq_automata as sq


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # One-time JIT compile/cache-load so timed tests measure the algorithms,
    # not numba startup.
    sq.warmup()
