import numpy as np
import pytest

import kmseed.kmeans as km

# session-wide tally of traces checked by the monotonicity monitor
MONOTONE_TALLY = {"traces": 0, "violations": []}

# an increase can only appear as the final trace entry (it stops the loop),
# and float centroid arithmetic can leave that step within an ulp of flat
REL_SLACK = 1e-12


def trace_is_monotone(trace):
    return all(
        trace[i + 1] <= trace[i] * (1.0 + REL_SLACK) for i in range(len(trace) - 1)
    )


@pytest.fixture(autouse=True)
def _monitor_sse_traces():
    """Collect every sse_trace produced anywhere and assert non-increase."""
    km.TRACE_LOG = []
    yield
    traces, km.TRACE_LOG = km.TRACE_LOG, None
    MONOTONE_TALLY["traces"] += len(traces)
    bad = [t for t in traces if not trace_is_monotone(t)]
    MONOTONE_TALLY["violations"].extend(bad)
    assert not bad, f"non-monotone sse_trace(s): {bad[:3]}"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
