"""tensorcp: sparse tensor algebra, class checkers, and complementarity solvers.

The package is organized around four layers:

- :mod:`tensorcp.core` — sparse coordinate tensors and their multilinear
  algebra (contraction, general products, subtensors, majorization);
- :mod:`tensorcp.classes` — membership checkers for semipositive /
  semimonotone / P / R classes plus the constructive witnesses;
- :mod:`tensorcp.tcp` — support-enumeration solvers for tensor and linear
  complementarity problems;
- :mod:`tensorcp.suites` — randomized theorem-replay suites with
  deterministic generators and counterexample dumps.

Serialization lives in :mod:`tensorcp.formats`; the ``tensorcp`` command in
:mod:`tensorcp.cli`.
"""

from .classes import (
    CheckConfig,
    ClassVerdict,
    DeltaShiftReport,
    QFalsifierReport,
    Status,
    build_g_matrix,
    build_null_diagonal,
    check_delta_shift,
    check_p,
    check_p0,
    check_r,
    check_r0,
    check_semimonotone,
    check_semipositive,
    check_strictly_semimonotone,
    check_strictly_semipositive,
    g_combination,
    grid_violation_scan,
    q_falsifier,
)
from .core import (
    Tensor,
    add,
    contract_batch,
    identity_tensor,
    is_null_vector,
    is_row_diagonal,
    majorization,
    make_tensor,
    permute_conjugate,
    principal_subtensor,
    row_subtensor,
    scalar_form,
    scale,
    shao_product,
    tensor_from_matrix,
    to_dense,
    tv_contract,
    vec_power,
    zero_tensor,
)
from .formats import (
    ParseError,
    parse_matrix,
    parse_objects,
    parse_tensor,
    parse_vector,
    write_matrix,
    write_tensor,
    write_vector,
)
from .lp import LpResult, minimax_on_simplex
from .suites import GenConfig, SuiteReport, SUITE_NAMES, run_suite
from .tcp import (
    LcpReport,
    SolverConfig,
    TcpReport,
    TcpSolution,
    natural_residual,
    solve_lcp,
    solve_lcp_report,
    solve_tcp,
    solve_tcp_report,
    verify_solution,
)

__version__ = "0.1.0"
