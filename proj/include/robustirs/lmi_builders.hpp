#pragma once

#include <utility>
#include <vector>

#include "robustirs/conic_solver.hpp"
#include "robustirs/lemma_terms.hpp"

namespace robustirs {

/// Hermitian matrix affine in the real decision vector x:
/// H(x) = constant + sum over terms of x[var] * coef.
/// A term may carry `span`, columns whose range contains the range of
/// `coef`; the builder then hands the solver a low-rank factorization.
struct HermitianLMI {
  struct Term {
    int var = 0;
    CMat coef;
    CMat span;  // empty: unknown
  };
  CMat constant;
  std::vector<Term> terms;

  [[nodiscard]] int order() const { return static_cast<int>(constant.rows()); }
  void add(int var, const CMat& coef, const CMat& span = CMat()) { terms.push_back({var, coef, span}); }
  [[nodiscard]] CMat evaluate(const RVec& x) const;
};

/// Real vector affine in x: constant + coef * x (coef may have fewer columns
/// than x; missing columns are zero).
struct RowAffine {
  RVec constant;
  RMat coef;

  [[nodiscard]] RVec evaluate(const RVec& x) const;
};

/// Real scalar affine in x.
struct ScalarAffine {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;
};

/// Collects variables and cone constraints of the form  g(x) in K  and emits
/// the solver's  A x + s = b  layout (b = constant, A = -coefficients).
class ProblemBuilder {
 public:
  int add_variables(int count);
  [[nodiscard]] int num_vars() const { return num_vars_; }
  void set_cost(int var, double value);

  void add_nonneg(const RowAffine& g);
  void add_soc(const RowAffine& g);
  /// Hermitian PSD constraint through its real symmetric embedding.
  void add_psd(const HermitianLMI& lmi);

  [[nodiscard]] ConicProblem build() const;

 private:
  struct Block {
    ConeBlock cone;
    RVec b;
    std::vector<std::pair<int, RVec>> cols;  // var -> coefficient column
  };
  int num_vars_ = 0;
  std::vector<std::pair<int, double>> cost_;
  std::vector<Block> blocks_;
  std::vector<PsdFactor> factors_;
};

/// F = V diag(lambda) V^H for Hermitian F whose range lies in range(B).
/// Returns false when F is not reproduced to ~1e-10 relative accuracy.
bool hermitian_factor(const CMat& F, const CMat& B, CMat& V, RVec& lambda);

/// Which uncertainty coordinates enter the S-procedure (zero radius: dropped).
struct KeptBlocks {
  bool h = false;
  bool g = false;
};
KeptBlocks kept_blocks(const LinkModel& model);

/// Variable indices of one robust LMI. -1 marks an absent variable.
struct LmiVars {
  int theta0 = -1;  // first of the free-block parameters
  int mult_h = -1;  // normalized S-procedure multipliers
  int mult_g = -1;
  int slack = -1;   // normalized alpha
};

/// Legitimate-link robust LMI, normalized by c = noise * (2^eta - 1) and by
/// the radii:
///   [[Xi A Xi / c + diag(m_h I, m_g I), Xi a / c],
///    [.,  a0 / c - thr - m_h - m_g - slack]]  >= 0,
/// thr = T / c. Multipliers relate to the raw ones by m = varpi * xi^2 / c.
/// With `compress`, the dG coordinates are restricted to the span of the p
/// vectors (order N + M + 1 for the v-step, 2N + 1 for the w-step); the full
/// LMI is PSD iff the compressed one is and m_g >= 0.
HermitianLMI build_alice_lmi(const Lemma1Terms& terms, const LinkModel& model, double c,
                             const ScalarAffine& threshold, const LmiVars& vars,
                             bool compress = true);

/// Eavesdropper robust LMI. Exact: S-procedure on |s|^2 through a Schur lift
///   [[diag(m_h I, m_g I), 0, Xi p / sqrt(c)],
///    [0, thr - m_h - m_g - slack, s / sqrt(c)],
///    [., ., 1]] >= 0.
/// Linearized: [[diag(m) - Xi A Xi / c, -Xi a / c], [., thr - a0/c - m_h - m_g - slack]].
HermitianLMI build_eve_lmi(const Lemma1Terms& terms, const LinkModel& model, double c,
                           const ScalarAffine& threshold, const LmiVars& vars, EveBound bound,
                           bool compress = true);

/// Amplification power ||diag(conj v) H_I w||^2 + sigma_i2 ||v||^2.
double amplification_power(const CMat& H_i, const CVec& w, const CVec& v, double sigma_i2);

/// Schur form with v fixed, affine in w = x[theta0 .. theta0 + 2N):
///   [[1 - sigma_i2 ||v||^2 / P_F, u^H / sqrt(P_F)], [u / sqrt(P_F), I]] >= 0,
///   u = diag(conj v) H_I w.
HermitianLMI build_amp_lmi_w(const CMat& H_i, const CVec& v, double sigma_i2, double p_f,
                             int theta0);

/// SOC form with w fixed: ||f .* v|| <= sqrt(P_F), f = sqrt(|H_I w|^2 + sigma_i2),
/// normalized to rows [1; f .* Re v / sqrt(P_F); f .* Im v / sqrt(P_F)].
RowAffine build_amp_soc_v(const CMat& H_i, const CVec& w, double sigma_i2, double p_f,
                          int theta0, int num_vars);

/// |v_m| <= limit as M three-row SOC blocks [limit; Re v_m; Im v_m].
std::vector<RowAffine> build_magnitude_socs(int num_elements, double limit, int theta0,
                                            int num_vars);

}  // namespace robustirs
