#include "mtlab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "mtlab/bellman.hpp"
#include "mtlab/error.hpp"
#include "mtlab/parallel.hpp"
#include "mtlab/sharp.hpp"

namespace mtlab {

namespace {

double weighted_sum(std::span<const double> w, std::span<const double> v) {
  CompensatedSum s;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * v[i];
  return s.value();
}

double weighted_power(std::span<const double> w, std::span<const double> v, double p) {
  CompensatedSum s;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(v[i], p);
  return s.value();
}

void require_moments(double p, double f, double F) {
  require_exponent(p);
  if (!(f > 0.0) || !std::isfinite(f) || !std::isfinite(F)) throw DomainError("moments must be finite with f > 0");
  if (std::pow(f, p) > F * (1.0 + kTauNum)) throw DomainError("infeasible moments: f^p > F");
}

// L²(w) gradient of the ring objective with the argmax pattern held fixed.
std::vector<double> ring_gradient(double p, std::span<const double> w, std::span<const double> v) {
  const std::size_t n = w.size();
  std::vector<double> tail_w(n + 1, 0.0);
  std::vector<double> tail_s(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    tail_w[j] = tail_w[j + 1] + w[j];
    tail_s[j] = tail_s[j + 1] + w[j] * v[j];
  }
  std::vector<double> coef(n, 0.0);
  std::vector<double> grad(n, 0.0);
  double best = -1.0;
  std::size_t best_j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ak = tail_s[k] / tail_w[k];
    if (exceeds(ak, best)) {
      best = ak;
      best_j = k;
    }
    const bool own = v[k] > best * (1.0 + kTauTie);
    const double m = own ? v[k] : best;
    const double weight = w[k] * p * std::pow(m, p - 1.0);
    if (own) {
      grad[k] += weight;
    } else {
      coef[best_j] += weight / tail_w[best_j];
    }
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += coef[i];
    grad[i] += w[i] * acc;
    grad[i] /= w[i];
  }
  return grad;
}

struct Objective {
  std::vector<double> w;
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

struct Ascent {
  std::vector<double> v;
  double value = 0.0;
  long evaluations = 0;
  double max_cap_ratio = 0.0;
};

double cap_ratio(double p, std::span<const double> w, std::span<const double> v, double J) {
  const double f = weighted_sum(w, v);
  const double F = weighted_power(w, v, p);
  if (!(f > 0.0)) return 0.0;
  return J / bellman_value(p, f, std::max(F, std::pow(f, p)));
}

// Tangent direction: remove the components along the constraint normals 1 and
// v^{p−1} in L²(w).
std::vector<double> tangent(std::span<const double> w, std::span<const double> g, std::span<const double> v,
                            double p) {
  const std::size_t n = w.size();
  std::vector<double> n2(n);
  for (std::size_t i = 0; i < n; ++i) n2[i] = std::pow(v[i], p - 1.0);
  double g11 = 0, g12 = 0, g22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    g11 += w[i];
    g12 += w[i] * n2[i];
    g22 += w[i] * n2[i] * n2[i];
    b1 += w[i] * g[i];
    b2 += w[i] * g[i] * n2[i];
  }
  const double det = g11 * g22 - g12 * g12;
  double alpha = b1 / g11;
  double beta = 0.0;
  if (det > 1e-12 * g11 * g22) {
    alpha = (b1 * g22 - b2 * g12) / det;
    beta = (b2 * g11 - b1 * g12) / det;
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = g[i] - alpha - beta * n2[i];
    if (v[i] <= 0.0 && d[i] < 0.0) d[i] = 0.0;
  }
  return d;
}

std::optional<std::vector<double>> retract_or_blend(const std::vector<double>& v, std::span<const double> w,
                                                    double p, double f, double F) {
  if (auto r = moment_retract(v, w, p, f, F)) return r;
  // Support too sparse (or too flat) for a power correction: mix in the constant.
  std::vector<double> b(v);
  for (double lambda : {0.05, 0.2, 0.5}) {
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = (1.0 - lambda) * v[i] + lambda * f;
    if (auto r = moment_retract(b, w, p, f, F)) return r;
  }
  return std::nullopt;
}

Ascent ascend(const Objective& obj, std::vector<double> v, double p, double f, double F,
              const OptimizeConfig& cfg) {
  Ascent out;
  out.v = std::move(v);
  out.value = obj.value(out.v);
  out.evaluations = 1;
  out.max_cap_ratio = cap_ratio(p, obj.w, out.v, out.value);
  double eta = cfg.initial_step;
  int quiet = 0;
  for (int step = 0; step < cfg.max_steps && eta >= cfg.min_step; ++step) {
    const auto d = tangent(obj.w, obj.gradient(out.v), out.v, p);
    double dn = 0.0;
    for (double x : d) dn = std::max(dn, std::abs(x));
    if (!(dn > 0.0)) break;
    const double vmax = *std::max_element(out.v.begin(), out.v.end());
    std::vector<double> trial(out.v.size());
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = std::max(0.0, out.v[i] + eta * vmax * d[i] / dn);
    auto retracted = retract_or_blend(trial, obj.w, p, f, F);
    if (!retracted) {
      eta *= cfg.step_shrink;
      continue;
    }
    const double J = obj.value(*retracted);
    ++out.evaluations;
    out.max_cap_ratio = std::max(out.max_cap_ratio, cap_ratio(p, obj.w, *retracted, J));
    if (J > out.value) {
      quiet = (J - out.value <= cfg.tolerance * out.value) ? quiet + 1 : 0;
      out.v = std::move(*retracted);
      out.value = J;
      eta = std::min(1.0, eta * cfg.step_growth);
      if (quiet >= 25) break;
    } else {
      eta *= cfg.step_shrink;
    }
  }
  return out;
}

double leaf_objective(const StepFunction& phi, double p) {
  const auto m = maximal_function(phi);
  return p_integral(m.mphi, p);
}

std::vector<double> random_profile(std::mt19937_64& rng, double p, double a, int depth) {
  const double gmax = std::min(std::pow(a, -1.0 / p), 1.0 / a);
  const double gamma = std::uniform_real_distribution<double>(1.0, 1.0 + 0.95 * (gmax - 1.0))(rng);
  const double sigma = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<double> v(static_cast<std::size_t>(depth) + 1);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(gamma, static_cast<double>(k)) * std::exp(noise(rng));
  // Optima tend to carry one large value near the end of the chain.
  if (std::bernoulli_distribution(0.5)(rng)) {
    std::uniform_int_distribution<int> where(depth / 2, depth);
    v[static_cast<std::size_t>(where(rng))] *= std::uniform_real_distribution<double>(1.5, 4.0)(rng);
  }
  return v;
}

}  // namespace

RingProfile RingProfile::extended() const {
  RingProfile out{values};
  out.values.push_back(values.back());
  return out;
}

NestedChain chain_tree(double a, int depth, int ring_subdivision) {
  if (depth < 1) throw DomainError("chain depth must be at least 1");
  const std::vector<double> ratios(static_cast<std::size_t>(depth), a);
  return build_nested_chain(ratios, ring_subdivision);
}

StepFunction profile_function(const NestedChain& chain, std::span<const double> piece_values) {
  if (piece_values.size() != static_cast<std::size_t>(chain.ring_count()) + 1) {
    throw UsageError("profile has " + std::to_string(piece_values.size()) + " values for " +
                     std::to_string(chain.ring_count() + 1) + " pieces");
  }
  std::vector<double> v(chain.tree.leaf_count());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = piece_values[static_cast<std::size_t>(chain.ring_of_leaf[s])];
  return StepFunction(share(chain.tree), std::move(v));
}

RingProfile geometric_profile(double p, double a, double gamma, double t, int depth) {
  require_exponent(p);
  if (!(a > 0.0 && a < 1.0)) throw DomainError("geometric family: a must lie in (0,1)");
  if (!(gamma > 1.0)) throw DomainError("geometric family: gamma must exceed 1");
  if (!(t > 0.0)) throw DomainError("geometric family: t must be positive");
  if (!(a * std::pow(gamma, p) < 1.0)) throw DomainError("geometric family: a gamma^p must be < 1");
  if (depth < 2) throw DomainError("geometric family: depth must be at least 2");
  RingProfile out;
  for (int k = 0; k < depth; ++k) out.values.push_back(t * std::pow(gamma, k));
  const double c_prime = (1.0 - a) / (1.0 - a * gamma);
  out.values.push_back(c_prime * t * std::pow(gamma, depth));
  return out;
}

StepFunction geometric_family(double p, double a, double gamma, double t, int depth, int ring_subdivision) {
  const auto prof = geometric_profile(p, a, gamma, t, depth);
  return profile_function(chain_tree(a, depth, ring_subdivision), prof.values);
}

GeometricFit fit_geometric(double p, double f, double F, double a) {
  require_exponent(p);
  if (!(a > 0.0 && a < 1.0)) throw DomainError("fit_geometric: a must lie in (0,1)");
  GeometricFit out;
  const double target = F / std::pow(f, p);
  if (!(target > 1.0) || !std::isfinite(target)) return out;
  // F/f^p as a function of γ, increasing from 1 at γ = 1 to ∞ at a^{−1/p}.
  auto ratio = [&](double g) {
    return std::pow(1.0 - a, 1.0 - p) * std::pow(1.0 - a * g, p) / (1.0 - a * std::pow(g, p));
  };
  double lo = 1.0;
  double hi = std::pow(a, -1.0 / p);
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = ratio(mid);
    if (!std::isfinite(r) || r > target || r < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double gamma = 0.5 * (lo + hi);
  if (!(gamma > 1.0) || std::abs(ratio(gamma) / target - 1.0) > 1e-8) return out;
  out.gamma = gamma;
  out.t = f * (1.0 - a * gamma) / (1.0 - a);
  out.c_prime = (1.0 - a) / (1.0 - a * gamma);
  out.feasible = out.t > 0.0;
  return out;
}

double eigen_residual(const StepFunction& phi, double p, double c) {
  const auto m = maximal_function(phi);
  CompensatedSum s;
  const auto& t = phi.tree();
  for (std::size_t i = 0; i < t.leaf_count(); ++i) {
    s += std::pow(std::abs(m.mphi.value(i) - c * phi.value(i)), p) * t.leaf_measure(i);
  }
  return s.value();
}

double eigen_residual(const StepFunction& phi, double p) {
  const Moments mo = moments(phi, p);
  return eigen_residual(phi, p, omega_p(p, std::min(1.0, std::pow(mo.f, p) / mo.F)));
}

double ring_objective(double p, std::span<const double> w, std::span<const double> v) {
  const std::size_t n = w.size();
  std::vector<double> tail_w(n + 1, 0.0);
  std::vector<double> tail_s(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    tail_w[j] = tail_w[j + 1] + w[j];
    tail_s[j] = tail_s[j + 1] + w[j] * v[j];
  }
  CompensatedSum J;
  double best = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    best = std::max(best, tail_s[k] / tail_w[k]);
    J += w[k] * std::pow(std::max(best, v[k]), p);
  }
  return J.value();
}

std::optional<std::vector<double>> moment_retract(std::span<const double> v, std::span<const double> w, double p,
                                                  double f, double F) {
  const double target = F / std::pow(f, p);
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, x);
  if (!(vmax > 0.0) || !std::isfinite(vmax)) return std::nullopt;
  const std::size_t n = v.size();
  if (target <= 1.0 + 1e-15) return std::vector<double>(n, f);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = v[i] / vmax;
  auto moments_at = [&](double r) {
    CompensatedSum i1;
    CompensatedSum ip;
    for (std::size_t i = 0; i < n; ++i) {
      if (u[i] <= 0.0) continue;
      const double ur = std::pow(u[i], r);
      i1 += w[i] * ur;
      ip += w[i] * std::pow(ur, p);
    }
    return std::pair{i1.value(), ip.value()};
  };
  auto ratio_at = [&](double r) {
    const auto [i1, ip] = moments_at(r);
    return ip / std::pow(i1, p);
  };
  // ratio(r) is nondecreasing; its infimum is μ(supp)^{1−p} as r → 0.
  double lo = 0.0;
  double hi = 1.0;
  double support = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] > 0.0) support += w[i];
  }
  if (std::pow(support, 1.0 - p) > target) return std::nullopt;
  while (ratio_at(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio_at(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double r = 0.5 * (lo + hi);
  if (!(r > 0.0)) return std::nullopt;
  const double i1 = moments_at(r).first;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] > 0.0) out[i] = f * std::pow(u[i], r) / i1;
  }
  return out;
}

OptimizeResult optimize(double p, double f, double F, const OptimizeConfig& cfg,
                        const std::optional<RingProfile>& warm_start) {
  require_moments(p, f, F);
  if (cfg.restarts < 1) throw UsageError("optimize: restarts must be at least 1");
  if (cfg.depth < 1) throw UsageError("optimize: depth must be at least 1");
  if (cfg.mode == SearchMode::full_leaf && cfg.depth > 6) {
    throw CapacityError("optimize: full_leaf mode supports depth <= 6");
  }
  const NestedChain chain = chain_tree(cfg.chain_ratio, cfg.depth, cfg.ring_subdivision);
  const TreePtr tree = share(chain.tree);
  const double bound = bellman_value(p, f, F);

  if (std::pow(f, p) >= F * (1.0 - 1e-15)) {
    OptimizeResult out{StepFunction::constant(tree, f), {}, 0.0, bound, 0, 1, 0.0};
    out.values = cfg.mode == SearchMode::ring ? std::vector<double>(static_cast<std::size_t>(cfg.depth) + 1, f)
                                              : std::vector<double>(tree->leaf_count(), f);
    out.attained = leaf_objective(out.phi, p);
    out.max_cap_ratio = out.attained / bound;
    return out;
  }

  Objective obj;
  if (cfg.mode == SearchMode::ring) {
    obj.w = chain.piece_measures();
    obj.value = [p, w = obj.w](const std::vector<double>& v) { return ring_objective(p, w, v); };
    obj.gradient = [p, w = obj.w](const std::vector<double>& v) { return ring_gradient(p, w, v); };
  } else {
    for (std::size_t s = 0; s < tree->leaf_count(); ++s) obj.w.push_back(tree->leaf_measure(s));
    obj.value = [p, tree](const std::vector<double>& v) { return leaf_objective(StepFunction(tree, v), p); };
    obj.gradient = [p, tree](const std::vector<double>& v) {
      const StepFunction phi(tree, v);
      const auto lin = linearize(phi, p);
      std::vector<double> acc(tree->size(), 0.0);
      for (NodeId id : tree->preorder()) {
        const auto parent = tree->parent(id);
        double a = parent ? acc[parent->index()] : 0.0;
        if (lin.contains(id)) {
          const auto& e = lin.at(id);
          a += p * e.a * std::pow(e.y, p - 1.0) / tree->measure(id);
        }
        acc[id.index()] = a;
      }
      std::vector<double> g(v.size());
      for (std::size_t s = 0; s < g.size(); ++s) g[s] = acc[tree->leaf_at(s).index()];
      return g;
    };
  }

  auto to_leaves = [&](const std::vector<double>& pieces) {
    std::vector<double> v(tree->leaf_count());
    for (std::size_t s = 0; s < v.size(); ++s) v[s] = pieces[static_cast<std::size_t>(chain.ring_of_leaf[s])];
    return v;
  };

  std::vector<Ascent> runs(static_cast<std::size_t>(cfg.restarts));
  parallel_for(runs.size(), [&](std::size_t k) {
    std::mt19937_64 rng(split_seed(cfg.seed, k));
    std::vector<double> pieces;
    if (k == 0 && warm_start) {
      RingProfile w = *warm_start;
      while (w.depth() < cfg.depth) w = w.extended();
      w.values.resize(static_cast<std::size_t>(cfg.depth) + 1);
      pieces = w.values;
    } else if (k == 1 && warm_start && warm_start->depth() >= 3) {
      // New rings inserted before the last ring, continuing the trend there.
      pieces = warm_start->values;
      while (static_cast<int>(pieces.size()) < cfg.depth + 1) {
        const std::size_t n = pieces.size();
        const double grow = pieces[n - 3] / std::max(pieces[n - 4], 1e-300);
        pieces.insert(pieces.end() - 2, pieces[n - 3] * grow);
      }
      pieces.resize(static_cast<std::size_t>(cfg.depth) + 1);
    } else if (k == 0) {
      const auto fit = fit_geometric(p, f, F, cfg.chain_ratio);
      pieces = fit.feasible && cfg.depth >= 2
                   ? geometric_profile(p, cfg.chain_ratio, fit.gamma, fit.t, cfg.depth).values
                   : random_profile(rng, p, cfg.chain_ratio, cfg.depth);
    } else {
      pieces = random_profile(rng, p, cfg.chain_ratio, cfg.depth);
    }
    std::vector<double> start = pieces;
    if (cfg.mode == SearchMode::full_leaf) {
      start = to_leaves(pieces);
      if (k > 0) {
        std::normal_distribution<double> noise(0.0, 0.1);
        for (double& x : start) x *= std::exp(noise(rng));
      }
    }
    auto retracted = retract_or_blend(start, obj.w, p, f, F);
    if (!retracted) retracted = std::vector<double>(start.size(), f);
    runs[k] = ascend(obj, std::move(*retracted), p, f, F, cfg);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].value > runs[best].value) best = k;
  }
  OptimizeResult out{cfg.mode == SearchMode::ring ? StepFunction(tree, to_leaves(runs[best].v))
                                                  : StepFunction(tree, runs[best].v),
                     runs[best].v,
                     0.0,
                     bound,
                     static_cast<int>(best),
                     0,
                     0.0};
  for (const auto& r : runs) {
    out.evaluations += r.evaluations;
    out.max_cap_ratio = std::max(out.max_cap_ratio, r.max_cap_ratio);
  }
  out.attained = leaf_objective(out.phi, p);
  return out;
}

double brute_force_oracle(double p, double f, double F, int depth, double hi, double step, double a,
                          double ratio_tol) {
  require_moments(p, f, F);
  if (depth < 1 || depth > 2) throw CapacityError("brute_force_oracle: depth must be 1 or 2");
  if (!(step > 0.0) || !(hi > 0.0)) throw DomainError("brute_force_oracle: grid must be positive");
  const auto points = static_cast<std::size_t>(std::floor(hi / step + 0.5)) + 1;
  const std::size_t pieces = static_cast<std::size_t>(depth) + 1;
  double total = 1.0;
  for (std::size_t i = 0; i < pieces; ++i) total *= static_cast<double>(points);
  if (total > 5e7) throw CapacityError("brute_force_oracle: grid too large");

  const NestedChain chain = chain_tree(a, depth, 0);
  const TreePtr tree = share(chain.tree);
  std::vector<double> w(tree->leaf_count());
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = tree->leaf_measure(s);
  const double target = F / std::pow(f, p);

  std::vector<std::size_t> idx(w.size(), 0);
  std::vector<double> v(w.size());
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(idx[i]) * step;
    const double f1 = weighted_sum(w, v);
    if (f1 > 0.0) {
      const double r = weighted_power(w, v, p) / std::pow(f1, p);
      if (std::abs(r - target) <= ratio_tol * target) {
        std::vector<double> scaled(v);
        for (double& x : scaled) x *= f / f1;
        best = std::max(best, leaf_objective(StepFunction(tree, std::move(scaled)), p));
      }
    }
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == points) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  if (!std::isfinite(best)) throw DomainError("brute_force_oracle: no grid tuple matches the moments");
  return best;
}

double mu_zero(const StepFunction& phi) {
  const double cut = kZeroFraction * phi.integral();
  CompensatedSum z;
  for (std::size_t s = 0; s < phi.tree().leaf_count(); ++s) {
    if (phi.value(s) <= cut) z += phi.tree().leaf_measure(s);
  }
  return z.value();
}

SweepRow sweep_row(const StepFunction& phi, double p, double f, double F, int depth) {
  SweepRow row;
  row.depth = depth;
  const auto lin = linearize(phi, p);
  row.attained = p_integral(maximal_function(phi).mphi, p);
  row.bound = bellman_value(p, f, F);
  row.gap = row.bound - row.attained;
  row.residual = eigen_residual(phi, p);
  row.mu_zero = mu_zero(phi);
  row.gap_beta_star = gap_at_beta_star(phi, lin);
  const auto& t = phi.tree();
  for (NodeId id : t.preorder()) {
    if (t.depth(id) > 2) continue;
    const auto& n = t.node(id);
    CompensatedSum pm;
    for (std::size_t s = n.leaf_begin; s < n.leaf_end; ++s) pm += std::pow(phi.value(s), p) * t.leaf_measure(s);
    row.loc_dev_f = std::max(row.loc_dev_f, std::abs(phi.average(id) - f));
    row.loc_dev_F = std::max(row.loc_dev_F, std::abs(pm.value() / n.measure - F));
  }
  return row;
}

std::vector<SweepRun> depth_sweep_runs(double p, double f, double F, std::span<const int> depths,
                                       const OptimizeConfig& config) {
  std::vector<SweepRun> out;
  std::optional<RingProfile> warm;
  for (int d : depths) {
    OptimizeConfig cfg = config;
    cfg.depth = d;
    if (warm && warm->depth() > d) warm.reset();
    auto res = optimize(p, f, F, cfg, config.mode == SearchMode::ring ? warm : std::nullopt);
    if (config.mode == SearchMode::ring) warm = RingProfile{res.values};
    SweepRow row = sweep_row(res.phi, p, f, F, d);
    out.push_back({row, std::move(res)});
  }
  return out;
}

std::vector<SweepRow> depth_sweep(double p, double f, double F, std::span<const int> depths,
                                  const OptimizeConfig& config) {
  std::vector<SweepRow> rows;
  for (auto& r : depth_sweep_runs(p, f, F, depths, config)) rows.push_back(r.row);
  return rows;
}

Theorem33Probe theorem33_probe(const StepFunction& phi, double p, const Linearization& lin,
                               std::span<const NodeId> members) {
  require_disjoint_family(lin, members);
  const auto& t = phi.tree();
  std::vector<char> in(t.leaf_count(), 0);
  CompensatedSum h;
  for (NodeId m : members) {
    const auto& n = t.node(m);
    std::fill(in.begin() + static_cast<std::ptrdiff_t>(n.leaf_begin),
              in.begin() + static_cast<std::ptrdiff_t>(n.leaf_end), 1);
    h += n.measure * std::pow(lin.at(m).y, p);
  }
  CompensatedSum im;
  CompensatedSum ip;
  for (std::size_t s = 0; s < t.leaf_count(); ++s) {
    if (!in[s]) continue;
    im += std::pow(lin.mphi(s), p) * t.leaf_measure(s);
    ip += std::pow(phi.value(s), p) * t.leaf_measure(s);
  }
  const Moments mo = moments(phi, p);
  Theorem33Probe out;
  out.h = h.value();
  out.int_m = im.value();
  out.int_phi_p = ip.value();
  out.ratio_lhs = out.int_phi_p > 0.0 ? out.int_m / out.int_phi_p : 0.0;
  out.fp_over_F = std::min(1.0, std::pow(mo.f, p) / mo.F);
  out.ratio_rhs = std::pow(omega_p(p, out.fp_over_F), p);
  out.h_ratio = out.int_phi_p > 0.0 ? out.h / out.int_phi_p : 0.0;
  return out;
}

ZeroMassDiagnostics zero_mass_diagnostics(const StepFunction& phi, double p, const Linearization& lin, double R) {
  require_exponent(p);
  if (!(R > 0.0)) throw DomainError("zero_mass_diagnostics: R must be positive");
  ZeroMassDiagnostics out;
  out.mu_zero = mu_zero(phi);
  CompensatedSum mass;
  for (const auto& e : lin.entries) {
    const double P = e.a > 0.0 ? e.p_mass / e.a : 0.0;
    out.p_map.emplace_back(e.node, P);
    if (P < R) mass += e.a;
  }
  out.s_phi_r_mass = mass.value();
  return out;
}

}  // namespace mtlab
