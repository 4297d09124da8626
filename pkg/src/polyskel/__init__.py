"""Edge skeletons of 0/1-polytopes, with a focus on imset polytopes."""
from .core import (EDGE, NON_EDGE, UNKNOWN, PairLedger, PairRecord, VertexSet, make_ledger,
                   read_vertices, write_vertices)
from .edgecheck import (EdgeVerdict, SkeletonConfig, compute_skeleton, cost_update,
                        exact_edge_test, verify_edge_numeric)
from .errors import (DomainError, IndeterminateError, MemoryBudgetError, NumericError,
                     ParseError, PolyskelError)
from .rhombus import check_fulfillment, rhombus_scan

__version__ = "0.1.0"
