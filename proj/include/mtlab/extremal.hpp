#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtlab/linearization.hpp"

namespace mtlab {

/// Values v_0..v_{K−1} on the rings of a nested chain and v_K on the core.
struct RingProfile {
  std::vector<double> values;

  int depth() const { return static_cast<int>(values.size()) - 1; }
  /// The same function with one more ring: the core is split, keeping its value.
  RingProfile extended() const;
};

enum class SearchMode { ring, full_leaf };

struct OptimizeConfig {
  int depth = 8;
  int restarts = 16;
  int max_steps = 600;
  double initial_step = 0.25;  // relative to max value
  double step_growth = 1.5;
  double step_shrink = 0.5;
  double min_step = 1e-10;
  std::uint64_t seed = 1;
  SearchMode mode = SearchMode::ring;
  double tolerance = 1e-13;  // stop once relative improvement stays below this
  double chain_ratio = 0.75;
  int ring_subdivision = 2;
};

struct OptimizeResult {
  StepFunction phi;
  std::vector<double> values;  // piece values (ring) or leaf values (full_leaf)
  double attained = 0.0;       // ∫(Mφ)^p by leaf sums
  double bound = 0.0;
  int best_restart = 0;
  long evaluations = 0;
  /// Largest ∫(Mφ)^p / bellman_value(own moments) over every evaluated candidate.
  double max_cap_ratio = 0.0;
};

struct SweepRow {
  int depth = 0;
  double attained = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  double mu_zero = 0.0;
  double gap_beta_star = 0.0;
  double loc_dev_f = 0.0;
  double loc_dev_F = 0.0;
};

/// Nested chain with constant ratio a and the given ring subdivision.
NestedChain chain_tree(double a, int depth, int ring_subdivision);

/// Leaf function of piece values on a chain.
StepFunction profile_function(const NestedChain& chain, std::span<const double> piece_values);

/// t γ^k on R_k, and on the core the untruncated tail average c′ t γ^K.
RingProfile geometric_profile(double p, double a, double gamma, double t, int depth);
StepFunction geometric_family(double p, double a, double gamma, double t, int depth, int ring_subdivision = 2);

struct GeometricFit {
  double gamma = 1.0;
  double t = 0.0;
  double c_prime = 1.0;  // (1−a)/(1−aγ)
  bool feasible = false;
};

GeometricFit fit_geometric(double p, double f, double F, double a);

/// ∫|Mφ − cφ|^p with c = ω_p(f^p/F).
double eigen_residual(const StepFunction& phi, double p);
double eigen_residual(const StepFunction& phi, double p, double c);

/// Closed-form ∫(Mφ)^p for a ring profile with piece measures w.
double ring_objective(double p, std::span<const double> w, std::span<const double> v);

/// φ ← s φ^r with ∫φ = f and ∫φ^p = F (weights w). Empty when no r exists.
std::optional<std::vector<double>> moment_retract(std::span<const double> v, std::span<const double> w, double p,
                                                  double f, double F);

OptimizeResult optimize(double p, double f, double F, const OptimizeConfig& config,
                        const std::optional<RingProfile>& warm_start = std::nullopt);

/// Exhaustive search over piece-value tuples from {0, step, ..., hi} on a chain
/// of `depth` ≤ 2 rings whose rings are leaves. A tuple is scaled to ∫φ = f and
/// kept when its F/f^p ratio is within `ratio_tol` of the target.
double brute_force_oracle(double p, double f, double F, int depth, double hi, double step, double a,
                          double ratio_tol = 1e-4);

struct SweepRun {
  SweepRow row;
  OptimizeResult result;
};

/// Depths in the given order; in ring mode each depth warm-starts from the
/// previous depth's optimum.
std::vector<SweepRun> depth_sweep_runs(double p, double f, double F, std::span<const int> depths,
                                       const OptimizeConfig& config);
std::vector<SweepRow> depth_sweep(double p, double f, double F, std::span<const int> depths,
                                  const OptimizeConfig& config);

SweepRow sweep_row(const StepFunction& phi, double p, double f, double F, int depth);

struct Theorem33Probe {
  double h = 0.0;
  double int_m = 0.0;
  double int_phi_p = 0.0;
  double ratio_lhs = 0.0;  // int_m / int_phi_p
  double ratio_rhs = 0.0;  // ω_p(f^p/F)^p
  double h_ratio = 0.0;    // h / int_phi_p
  double fp_over_F = 0.0;
};

Theorem33Probe theorem33_probe(const StepFunction& phi, double p, const Linearization& lin,
                               std::span<const NodeId> members);

struct ZeroMassDiagnostics {
  double mu_zero = 0.0;
  std::vector<std::pair<NodeId, double>> p_map;  // I ↦ P_I over S_φ
  double s_phi_r_mass = 0.0;                     // Σ a_I over P_I < R
};

inline constexpr double kZeroFraction = 1e-12;

/// μ{φ ≤ ζ f} with ζ = kZeroFraction.
double mu_zero(const StepFunction& phi);

ZeroMassDiagnostics zero_mass_diagnostics(const StepFunction& phi, double p, const Linearization& lin, double R);

}  // namespace mtlab
