#include "uavris/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "uavris/assoc.hpp"
#include "uavris/channel.hpp"
#include "uavris/power.hpp"
#include "uavris/trajectory_s1.hpp"
#include "uavris/trajectory_s2.hpp"

namespace uavris {

namespace {

Allocation make_allocation(const Eigen::MatrixXd& assoc, const Eigen::MatrixXd& power) {
  Allocation alloc(static_cast<int>(assoc.rows()), static_cast<int>(assoc.cols()));
  for (int n = 1; n <= alloc.num_slots; ++n)
    for (int k = 0; k < alloc.num_users; ++k) {
      alloc.a(k, n) = assoc(k, n - 1);
      alloc.p(k, n) = power(k, n - 1);
    }
  return alloc;
}

// Slot phases start aligned to the nearest user so the first association
// pass sees meaningful gains.
PhaseSchedule initial_phases(const ScenarioConfig& cfg, const Trajectory& traj) {
  PhaseSchedule sched(cfg.ris_elements, cfg.num_slots);
  for (int n = 1; n <= cfg.num_slots; ++n) {
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.num_users; ++k) {
      const double d = (traj.at(n) - cfg.user_pos[static_cast<size_t>(k)]).norm2();
      if (d < best) {
        best = d;
        nearest = k;
      }
    }
    const auto theta =
        aligned_phases(traj.at(n), cfg.user_pos[static_cast<size_t>(nearest)], cfg.bs_pos, cfg);
    std::copy(theta.begin(), theta.end(), sched.column(n));
  }
  return sched;
}

}  // namespace

std::string IterationTrace::to_csv() const {
  std::ostringstream os;
  os << "iteration,gamma_per_watt,zeta_bits_per_s_per_hz,zeta_bound_bits_per_s_per_hz,"
        "assoc_solver_iters,dinkelbach_iters,power_sca_iters,trajectory_sca_iters,"
        "solver_failures,reverted,wall_ms\n";
  os.precision(17);
  for (const auto& r : records) {
    os << r.iteration << ',' << r.gamma << ',' << r.zeta << ',' << r.zeta_bound << ','
       << r.assoc_solver_iters << ',' << r.dinkelbach_iters << ',' << r.power_sca_iters << ','
       << r.trajectory_sca_iters << ',' << r.solver_failures << ',' << (r.reverted ? 1 : 0)
       << ',' << r.wall_ms << '\n';
  }
  return os.str();
}

RunResult run_algorithm2(const ScenarioConfig& cfg, Scheme scheme) {
  cfg.validate();
  const int K = cfg.num_users;
  const int N = cfg.num_slots;

  Trajectory traj = initial_trajectory(cfg);
  PhaseSchedule phases = initial_phases(cfg, traj);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, N);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(K, N);
  for (int k = 0; k < K; ++k) P.row(k).setConstant(cfg.max_power(k));

  RunResult out;
  double gamma_inc = 0.0;  // all-zero association yields zero efficiency

  for (int t = 1; t <= cfg.outer_cap; ++t) {
    const auto tic = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = t;

    // (a) user association on the current geometry, gated by re-evaluation
    try {
      const Eigen::MatrixXd R =
          association_rate_matrix(cfg, traj, phases, make_allocation(A, P));
      AssociationLp lp = solve_association_lp(R);
      rec.assoc_solver_iters = lp.report.newton_iterations;
      if (lp.report.status == SolveStatus::numerical_failure) ++rec.solver_failures;
      Eigen::MatrixXd A_new = round_association(lp.fractional);

      // Newly served pairs start from the power cap; dropped pairs release it.
      Eigen::MatrixXd P_new = P;
      for (int n = 0; n < N; ++n)
        for (int k = 0; k < K; ++k) {
          if (A_new(k, n) < 0.5)
            P_new(k, n) = 0.0;
          else if (P_new(k, n) <= 0.0)
            P_new(k, n) = cfg.max_power(k);
        }
      const double gamma_cand =
          evaluate_detailed(cfg, traj, phases, make_allocation(A_new, P_new)).gamma_exact;
      if (gamma_cand >= gamma_inc) {
        A = A_new;
        P = P_new;
        gamma_inc = gamma_cand;
      }
    } catch (const Error&) {
      ++rec.solver_failures;  // keep the incumbent association
    }

    // (b) transmit power
    try {
      PowerRunResult pr = optimize_power(A, traj, phases, P, cfg);
      rec.dinkelbach_iters = pr.dinkelbach_iterations;
      rec.power_sca_iters = pr.sca_iterations;
      if (pr.solver_failure) ++rec.solver_failures;
      const double gamma_cand =
          evaluate_detailed(cfg, traj, phases, make_allocation(A, pr.power)).gamma_exact;
      if (gamma_cand >= gamma_inc) {
        P = pr.power;
        gamma_inc = gamma_cand;
      }
    } catch (const Error&) {
      ++rec.solver_failures;
    }

    // (c) trajectory and phases, reverted when the objective would drop
    try {
      Trajectory traj_cand = traj;
      PhaseSchedule phases_cand = phases;
      if (scheme == Scheme::one) {
        TrajectoryRunResult tr = optimize_trajectory_s1(A, P, traj, phases, cfg);
        rec.trajectory_sca_iters = tr.sca_iterations;
        if (tr.solver_failure) ++rec.solver_failures;
        traj_cand = tr.trajectory;
        phases_cand = tr.phases;
      } else {
        JointRunResult tr = optimize_trajectory_s2(A, P, traj, phases, cfg);
        rec.trajectory_sca_iters = tr.sca_iterations;
        if (tr.solver_failure) ++rec.solver_failures;
        traj_cand = tr.trajectory;
        phases_cand = tr.phases;
      }
      const double gamma_cand =
          evaluate_detailed(cfg, traj_cand, phases_cand, make_allocation(A, P)).gamma_exact;
      if (gamma_cand >= gamma_inc) {
        traj = traj_cand;
        phases = phases_cand;
        gamma_inc = gamma_cand;
      } else {
        rec.reverted = true;  // keep the previous trajectory and phases
      }
    } catch (const Error&) {
      ++rec.solver_failures;
      rec.reverted = true;
    }

    // (d) record the true objective of the accepted state
    const RateReport rep = evaluate_detailed(cfg, traj, phases, make_allocation(A, P));
    gamma_inc = rep.gamma_exact;
    rec.gamma = rep.gamma_exact;
    rec.zeta = rep.zeta_exact;
    rec.zeta_bound = rep.zeta_bound;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - tic)
                      .count();
    out.trace.records.push_back(rec);

    if (t >= 2) {
      const double prev = out.trace.records[static_cast<size_t>(t) - 2].gamma;
      const double delta = std::abs(rec.gamma - prev);
      if (delta <= cfg.outer_tol * std::max(std::abs(rec.gamma), 1e-300) ||
          (rec.gamma == 0.0 && prev == 0.0)) {
        out.trace.converged = true;
        out.trace.iterations_to_converge = t;
        break;
      }
    }
  }
  if (!out.trace.converged)
    out.trace.iterations_to_converge = static_cast<int>(out.trace.records.size());

  out.state.allocation = make_allocation(A, P);
  out.state.trajectory = traj;
  out.state.phases = phases;
  const RateReport rep = evaluate_detailed(cfg, traj, phases, out.state.allocation);
  out.state.zeta = rep.zeta_exact;
  out.state.gamma = rep.gamma_exact;
  return out;
}

ComplexityEstimate complexity_estimate(const ScenarioConfig& cfg, Scheme scheme,
                                       const IterationTrace* trace) {
  ComplexityEstimate est;
  const double kn = static_cast<double>(cfg.num_users) * cfg.num_slots;
  est.association_ops = kn;
  est.power_ops = std::pow(kn, 3.5) * std::log2(1.0 / cfg.dinkelbach_tol);
  if (scheme == Scheme::one) {
    est.trajectory_ops = std::pow(2.0 * kn, 3.5) * std::log2(1.0 / cfg.sca_tol);
  } else {
    const double vars = (6.0 * cfg.num_users + cfg.ris_elements) * cfg.num_slots;
    est.trajectory_ops = std::pow(vars, 3.5) * std::log2(1.0 / cfg.sca_tol);
  }
  est.total_per_outer = est.association_ops + est.power_ops + est.trajectory_ops;
  if (trace != nullptr) {
    est.measured_outer_iterations = static_cast<int>(trace->records.size());
    for (const auto& r : trace->records) {
      est.measured_power_iterations += r.power_sca_iters;
      est.measured_trajectory_iterations += r.trajectory_sca_iters;
    }
  }
  return est;
}

}  // namespace uavris
