#include "robustirs/alternating.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <json.hpp>

namespace robustirs {

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::VInfeasible: return "v_infeasible";
    case StopReason::VFailed: return "v_failed";
    case StopReason::WFailed: return "w_failed";
    case StopReason::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

bool AOTrace::solver_failure() const {
  return stop == StopReason::VFailed || stop == StopReason::WFailed;
}

double AOTrace::max_optimal_residual() const {
  double worst = 0.0;
  const auto fold = [&](SolveStatus st, const KKTResiduals& r) {
    if (st == SolveStatus::Optimal) worst = std::max({worst, r.primal, r.dual, r.gap});
  };
  for (const auto& it : iterations) {
    fold(it.v_status, it.v_residuals);
    fold(it.w_status, it.w_residuals);
  }
  return worst;
}

CVec initial_reflection(const ChannelSet& ch, const RobustConfig& cfg) {
  const Eigen::Index m = ch.num_elements();
  if (!cfg.use_irs) return CVec::Zero(m);
  if (cfg.passive()) return CVec::Ones(m);
  const double p_bar = ch.H_i.rowwise().squaredNorm().maxCoeff() * cfg.p_peak;
  const double amp =
      std::min(cfg.tau_max, std::sqrt(cfg.p_f / (static_cast<double>(m) * (cfg.sigma_i2 + p_bar))));
  return CVec::Constant(m, amp);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

CVec seed_beam(const ChannelSet& ch, const CVec& v, const RobustConfig& cfg) {
  const CVec g = ch.h_u + cascaded_channel(ch.h_iu, ch.H_i).adjoint() * v;
  const double n = g.norm();
  if (!(n > 0.0)) return CVec::Constant(ch.num_antennas(), std::sqrt(cfg.p_peak / ch.num_antennas()));
  return std::sqrt(cfg.p_peak) * g / n;
}

}  // namespace

AOTrace alternate_optimize(const ChannelSet& ch, const UncertaintySet& u, const RobustConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  AOTrace trace;

  CVec v = initial_reflection(ch, cfg);
  const double amp = v.size() > 0 ? std::abs(v(0)) : 0.0;
  std::mt19937_64 rng(cfg.init_seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  SubproblemResult init;
  const int attempts = cfg.use_irs ? 1 + cfg.init_retries : 1;
  for (int a = 0; a < attempts; ++a) {
    if (a > 0)
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::polar(amp, phase(rng));
    trace.init_attempts = a + 1;
    init = solve_w_subproblem(v, seed_beam(ch, v, cfg), ch, u, cfg);
    if (init.ok()) break;
  }
  if (!init.ok())
    throw InitializationFailed("no feasible starting point after " +
                               std::to_string(trace.init_attempts) + " attempts (last status " +
                               status_name(init.status) + ")");

  trace.state = {init.w, init.v};
  trace.powers.push_back(init.power);
  trace.history.push_back(trace.state);
  trace.stop = StopReason::MaxIterations;

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const auto tk = Clock::now();
    AOIteration it;
    it.index = k;
    CVec v_next = trace.state.v;
    if (cfg.use_irs) {
      const SubproblemResult vs = solve_v_subproblem(trace.state.w, trace.state.v, ch, u, cfg);
      it.v_status = vs.status;
      it.v_residuals = vs.residuals;
      if (!vs.usable()) {
        trace.stop = vs.status == SolveStatus::PrimalInfeasible ? StopReason::VInfeasible
                                                                 : StopReason::VFailed;
        it.seconds = seconds_since(tk);
        it.power_w = trace.powers.back();
        it.power_dbm = watt_to_dbm(it.power_w);
        trace.iterations.push_back(it);
        break;
      }
      v_next = vs.v;
      it.alpha_u = vs.alpha_u;
      it.alpha_e = vs.alpha_e;
    }
    const SubproblemResult ws = solve_w_subproblem(v_next, trace.state.w, ch, u, cfg);
    it.w_status = ws.status;
    it.w_residuals = ws.residuals;
    it.seconds = seconds_since(tk);
    if (!ws.usable()) {
      trace.stop = StopReason::WFailed;
      it.power_w = trace.powers.back();
      it.power_dbm = watt_to_dbm(it.power_w);
      trace.iterations.push_back(it);
      break;
    }
    const double prev = trace.powers.back();
    trace.state = {ws.w, v_next};
    trace.powers.push_back(ws.power);
    trace.history.push_back(trace.state);
    it.power_w = ws.power;
    it.power_dbm = watt_to_dbm(ws.power);
    trace.iterations.push_back(it);
    if (std::abs(ws.power - prev) / prev < cfg.epsilon) {
      trace.stop = StopReason::Converged;
      break;
    }
  }
  trace.seconds = seconds_since(t0);
  return trace;
}

std::string to_json(const AOTrace& trace) {
  nlohmann::json j;
  j["stop_reason"] = stop_reason_name(trace.stop);
  j["init_attempts"] = trace.init_attempts;
  j["seconds"] = trace.seconds;
  j["final_power_w"] = trace.final_power();
  j["final_power_dbm"] = watt_to_dbm(trace.final_power());
  j["initial_power_w"] = trace.powers.front();
  nlohmann::json its = nlohmann::json::array();
  for (const auto& it : trace.iterations)
    its.push_back({{"iteration", it.index},
                   {"power_w", it.power_w},
                   {"power_dbm", it.power_dbm},
                   {"alpha_u", it.alpha_u},
                   {"alpha_e", it.alpha_e},
                   {"v_status", status_name(it.v_status)},
                   {"w_status", status_name(it.w_status)},
                   {"seconds", it.seconds}});
  j["iterations"] = its;
  auto cvec = [](const CVec& z) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < z.size(); ++i) a.push_back({z(i).real(), z(i).imag()});
    return a;
  };
  j["w"] = cvec(trace.state.w);
  j["v"] = cvec(trace.state.v);
  return j.dump(2);
}

}  // namespace robustirs
