#pragma once

#include <string>
#include <vector>

#include "robustirs/cones.hpp"

namespace robustirs {

/// Optional structure hint: the rows of PSD cone `cone` (index into
/// `cones`) in column `var` of A equal svec(U diag(d) U'). The solver uses it
/// to scale that column cheaply; A must still hold the full data.
struct PsdFactor {
  int cone = 0;
  int var = 0;
  RMat U;
  RVec d;
};

/// minimize c'x  subject to  A x + s = b,  s in K = K_1 x ... x K_p.
/// Rows of A and b follow the order of `cones`; PSD blocks use svec layout.
struct ConicProblem {
  RVec c;
  RMat A;
  RVec b;
  std::vector<ConeBlock> cones;
  std::vector<PsdFactor> psd_factors;

  [[nodiscard]] int num_vars() const { return static_cast<int>(c.size()); }
  [[nodiscard]] int num_rows() const { return static_cast<int>(b.size()); }
  /// Throws DimensionMismatch / InvalidArgument on malformed data, including
  /// factors that do not reproduce their column of A.
  void validate() const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter, NumericalFailure };

const char* status_name(SolveStatus status);

struct KKTResiduals {
  double primal = 0.0;  // ||A x + s - b|| / (1 + ||b||)
  double dual = 0.0;    // ||A' y + c|| / (1 + ||c||)
  double gap = 0.0;     // |c'x + b'y| / (1 + |c'x| + |b'y|)
};

struct ConicSolution {
  RVec x, y, s;
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  KKTResiduals residuals;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.99;
  int refinement_steps = 10;  // upper bound; stops when no longer contracting
  bool parallel = true;  // OpenMP kernels for column scaling and normal matrix
  bool verbose = false;  // per-iteration residuals on stderr
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
/// Mehrotra predictor-corrector steps. Never throws on a well-formed problem;
/// numerical trouble is reported through the status.
///
/// On PrimalInfeasible, y holds a certificate with A'y = 0 (to tol),
/// b'y = -1, y in K*. On DualInfeasible, x holds a ray with c'x = -1.
ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

/// Scale-normalized KKT residuals of a primal-dual pair (x, s, y).
KKTResiduals kkt_residuals(const ConicProblem& problem, const ConicSolution& solution);

/// Dense JSON dump (schema: {"c": [...], "A": [[row]...], "b": [...],
/// "cones": [{"kind": "zero|nonneg|soc|psd", "dim": k}...]}).
std::string to_json(const ConicProblem& problem);
ConicProblem problem_from_json(const std::string& text);

}  // namespace robustirs
