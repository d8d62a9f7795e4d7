#include "mtlab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "mtlab/bellman.hpp"
#include "mtlab/corpus.hpp"
#include "mtlab/extremal.hpp"
#include "mtlab/gphi.hpp"
#include "mtlab/io.hpp"
#include "mtlab/parallel.hpp"
#include "mtlab/sharp.hpp"

namespace mtlab {

namespace {

constexpr double kCorpusExponents[] = {1.5, 2.0, 3.0};

std::vector<CorpusInstance> suite_corpus(const LabConfig& config) {
  return make_corpus(config.seed, static_cast<std::size_t>(config.corpus_size), kCorpusExponents);
}

// Slack relative to the size of the quantities being compared.
double normalized(double slack, double scale) { return slack / std::max(1.0, std::abs(scale)); }

std::string fmt(double x) { return format_number(x); }

CriterionOutcome finish(int id, std::string name, std::string csv_name, const CsvTable& table, bool passed,
                        double value, double threshold, std::string detail) {
  if (!table.all_finite()) {
    passed = false;
    detail += "; non-finite value in output";
  }
  return {id, {std::move(name), passed, value, threshold, std::move(detail)}, std::move(csv_name), table.body()};
}

}  // namespace

CriterionOutcome criterion_special_functions(const LabConfig& config) {
  CsvTable table({"p", "x", "omega", "abs_error"});
  double worst = 0.0;
  bool ok = true;
  const double tol = 1e-12;
  for (double p : {1.5, 2.0, 3.0, 8.0}) {
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      const double z = omega_p(p, x);
      const double err = std::abs(h_p(p, z) - x);
      worst = std::max(worst, err);
      table.add_row({p, x, z, err});
    }
    ok = ok && std::abs(omega_p(p, 0.0) - p / (p - 1.0)) <= tol && std::abs(omega_p(p, 1.0) - 1.0) <= tol;
  }
  const double w2 = omega_p(2.0, 0.75);
  ok = ok && std::abs(w2 - 1.5) <= tol && worst <= tol;
  (void)config;
  return finish(1, "special functions", "c01_special.csv", table, ok, worst, tol,
                "max |H(omega(x)) - x| = " + fmt(worst) + ", omega_2(0.75) = " + fmt(w2));
}

CriterionOutcome criterion_bellman_bound(const LabConfig& config) {
  const auto corpus = suite_corpus(config);
  CsvTable table({"instance", "p", "leaves", "f", "F", "int_m", "bound", "ratio"});
  double worst = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    const auto m = maximal_function(inst.phi);
    const Moments mo = moments(inst.phi, inst.p);
    const double im = p_integral(m.mphi, inst.p);
    const double bound = bellman_value(inst.p, mo.f, mo.F);
    const double ratio = im / bound;
    worst = std::max(worst, ratio);
    if (im > bound * (1.0 + config.tau_num)) ok = false;
    table.add_row({static_cast<double>(i), inst.p, static_cast<double>(inst.phi.tree().leaf_count()), mo.f, mo.F,
                   im, bound, ratio});
  }
  return finish(2, "bellman bound never exceeded", "c02_bellman.csv", table, ok, worst, 1.0 + config.tau_num,
                std::to_string(corpus.size()) + " instances, max int(M phi)^p / bound = " + fmt(worst));
}

CriterionOutcome criterion_classical(const LabConfig& config) {
  const auto corpus = suite_corpus(config);
  CsvTable table({"instance", "p", "levels", "min_weak_slack", "lp_slack"});
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    const auto m = maximal_function(inst.phi);
    const double f = inst.phi.integral();
    double min_weak = std::numeric_limits<double>::infinity();
    const auto levels = weak_type_levels(m);
    for (double lambda : levels) {
      min_weak = std::min(min_weak, normalized(check_weak_type(inst.phi, m, lambda), f));
    }
    const double F = p_integral(inst.phi, inst.p);
    const double lp = normalized(check_lp_bound(inst.phi, m, inst.p), std::pow(inst.p / (inst.p - 1.0), inst.p) * F);
    worst = std::min({worst, min_weak, lp});
    table.add_row({static_cast<double>(i), inst.p, static_cast<double>(levels.size()), min_weak, lp});
  }
  return finish(3, "weak-type and Lp inequalities", "c03_classical.csv", table, worst >= -config.tau_num, worst,
                -config.tau_num, "min normalized slack = " + fmt(worst));
}

CriterionOutcome criterion_linearization(const LabConfig& config) {
  const auto corpus = suite_corpus(config);
  CsvTable table({"instance", "p", "s_phi", "lemma31", "nested", "covers", "measure_identity", "reconstruct",
                  "power_sum_dev"});
  bool ok = true;
  double worst = 0.0;
  int failures = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    const auto m = maximal_function(inst.phi);
    const auto lin = linearize(inst.phi, m, inst.p);
    const bool l31 = verify_lemma31(inst.phi, lin);
    const auto l32 = verify_lemma32(inst.phi, lin, config.tau_num);
    const auto rec = reconstruct_maximal(lin);
    bool same = true;
    for (std::size_t s = 0; s < rec.tree().leaf_count(); ++s) same = same && rec.value(s) == m.mphi.value(s);
    const double im = p_integral(m.mphi, inst.p);
    const double dev = std::abs(lin.weighted_power_sum() - im) / std::max(1.0, im);
    worst = std::max(worst, dev);
    const bool good = l31 && l32.nested && l32.covers && l32.measure_identity && same && dev <= config.tau_num;
    if (!good) {
      ok = false;
      ++failures;
    }
    table.add_row({static_cast<double>(i), inst.p, static_cast<double>(lin.entries.size()), l31 ? 1.0 : 0.0,
                   l32.nested ? 1.0 : 0.0, l32.covers ? 1.0 : 0.0, l32.measure_identity ? 1.0 : 0.0,
                   same ? 1.0 : 0.0, dev});
  }
  return finish(4, "linearization exactness", "c04_linearization.csv", table, ok, worst, config.tau_num,
                std::to_string(failures) + " failing instances, max power-sum deviation = " + fmt(worst));
}

CriterionOutcome criterion_sharp(const LabConfig& config) {
  const auto corpus = suite_corpus(config);
  CsvTable table({"inequality", "instance", "p", "beta", "members", "slack"});
  const auto tau = config.tau_num;
  double worst = std::numeric_limits<double>::infinity();
  double worst_add = 0.0;
  const auto grid = beta_grid();

  for (int which : {31, 32, 311, 310}) {
    for (int k = 0; k < config.sharp_instances; ++k) {
      const auto& inst = corpus[static_cast<std::size_t>(k) % corpus.size()];
      std::mt19937_64 rng(split_seed(config.seed ^ static_cast<std::uint64_t>(which) * 0x100000001B3ULL,
                                     static_cast<std::uint64_t>(k)));
      const auto lin = linearize(inst.phi, inst.p);
      const Moments mo = moments(inst.phi, inst.p);
      std::vector<double> betas(grid);
      betas.insert(betas.end(), {0.1, 1.0, 10.0});
      const double bstar = BellmanParams::make(inst.p, mo.f, mo.F).beta_star;
      if (bstar > 0.0) betas.push_back(bstar);
      const double beta = betas[std::uniform_int_distribution<std::size_t>(0, betas.size() - 1)(rng)];
      const auto fam = sample_family(lin, rng, which == 31);
      double slack = 0.0;
      switch (which) {
        case 31: slack = verify_thm31(inst.phi, lin, fam.members, beta); break;
        case 32: {
          slack = verify_thm32(inst.phi, lin, fam.members, beta);
          const double total = slack + verify_cor31(inst.phi, lin, fam.members, beta);
          worst_add = std::max(worst_add, std::abs(normalized(total - verify_310(inst.phi, lin, beta), mo.F)));
          break;
        }
        case 311: slack = verify_cor31(inst.phi, lin, fam.members, beta); break;
        default: slack = verify_310(inst.phi, lin, beta); break;
      }
      const double ns = normalized(slack, mo.F);
      worst = std::min(worst, ns);
      table.add_row({static_cast<double>(which), static_cast<double>(k), inst.p, beta,
                     which == 310 ? 0.0 : static_cast<double>(fam.members.size()), ns});
    }
  }

  // Hand-computed instances on the two-level binary tree with φ = (4,0,0,0).
  const TreePtr tree = share(build_uniform(2, 2));
  const StepFunction phi(tree, {4.0, 0.0, 0.0, 0.0});
  const auto lin = linearize(phi, 2.0);
  const NodeId left = tree->children(tree->root())[0];
  const NodeId leaf1 = tree->leaf_at(0);
  const std::vector<NodeId> left_only{left};
  const std::vector<NodeId> leaf_only{leaf1};
  struct Expect {
    const char* name;
    double got;
    double want;
  };
  const Expect worked[] = {
      {"thm31_left", verify_thm31(phi, lin, left_only, 1.0), 0.375},
      {"thm32_left", verify_thm32(phi, lin, left_only, 1.0), 1.75},
      {"cor31_leaf1", verify_cor31(phi, lin, leaf_only, 1.0), 1.125},
      {"ineq310", verify_310(phi, lin, 1.0), 2.125},
  };
  bool worked_ok = true;
  std::string worked_detail;
  for (const auto& e : worked) {
    const bool good = std::abs(e.got - e.want) <= 1e-6;
    worked_ok = worked_ok && good;
    worked_detail += std::string(" ") + e.name + "=" + fmt(e.got);
  }
  const bool ok = worst >= -tau && worst_add <= tau && worked_ok;
  return finish(5, "sharp inequalities", "c05_sharp.csv", table, ok, worst, -tau,
                "min normalized slack = " + fmt(worst) + ", additivity error = " + fmt(worst_add) +
                    ", worked:" + worked_detail);
}

CriterionOutcome criterion_gphi(const LabConfig& config) {
  const auto corpus = suite_corpus(config);
  CsvTable table({"instance", "p", "s_phi", "feasible", "averages", "p_integrals", "zero_growth", "moments",
                  "zero_dev", "min_mg_margin"});
  const double tau = config.tau_num;
  bool ok = true;
  int feasible = 0;
  double worst_zero = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    const auto lin = linearize(inst.phi, inst.p);
    const GPhi g = build_g(inst.phi, inst.p, lin);
    const bool feas = g.stage2_feasible();
    if (!feas) {
      table.add_row({static_cast<double>(i), inst.p, static_cast<double>(lin.entries.size()), 0, 0, 0, 0, 0, 0, 0});
      continue;
    }
    ++feasible;
    const auto chk = verify_g(inst.phi, inst.p, g, tau);
    double expected_zero = 0.0;
    for (const auto& r : g.records) expected_zero += r.a - r.gamma;
    const double zero_dev = std::abs(zero_measure(g.g) - expected_zero);
    const auto mg = maximal_function(g.g).mphi;
    const auto mphi = maximal_function(g.phi_refined).mphi;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < mg.tree().leaf_count(); ++s) {
      margin = std::min(margin, normalized(mg.value(s) - mphi.value(s), mphi.value(s)));
    }
    worst_zero = std::max(worst_zero, zero_dev);
    worst_margin = std::min(worst_margin, margin);
    if (!chk.all() || zero_dev > tau || margin < -tau) ok = false;
    table.add_row({static_cast<double>(i), inst.p, static_cast<double>(lin.entries.size()), 1,
                   chk.averages ? 1.0 : 0.0, chk.p_integrals ? 1.0 : 0.0, chk.zero_growth ? 1.0 : 0.0,
                   chk.moments ? 1.0 : 0.0, zero_dev, margin});
  }
  if (feasible == 0) ok = false;
  return finish(6, "g construction", "c06_gphi.csv", table, ok, worst_zero, tau,
                std::to_string(feasible) + " of " + std::to_string(corpus.size()) +
                    " instances stage-2 feasible, max zero-measure deviation = " + fmt(worst_zero) +
                    ", min Mg - Mphi margin = " + fmt(worst_margin));
}

CriterionOutcome criterion_extremal_trend(const LabConfig& config) {
  const double p = 2.0;
  const double f = 1.0;
  const double F = 4.0 / 3.0;
  OptimizeConfig oc;
  oc.mode = SearchMode::ring;
  oc.restarts = std::max(8, config.sweep_restarts);
  oc.seed = config.seed;
  oc.chain_ratio = config.chain_ratio;
  oc.ring_subdivision = config.ring_subdivision;
  std::vector<int> depths;
  for (int d = 4; d <= 12; ++d) depths.push_back(d);
  const auto rows = depth_sweep(p, f, F, depths, oc);

  CsvTable table({"depth", "attained", "bound", "gap", "residual", "mu_zero", "gap_beta_star", "loc_dev_f",
                  "loc_dev_F"});
  for (const auto& r : rows) {
    table.add_row({static_cast<double>(r.depth), r.attained, r.bound, r.gap, r.residual, r.mu_zero,
                   r.gap_beta_star, r.loc_dev_f, r.loc_dev_F});
  }
  const double bound = bellman_value(p, f, F);
  bool below = true;
  bool nondecreasing = true;
  bool residual_down = true;
  bool mu_down = true;
  bool gbs_down = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    below = below && rows[i].attained < bound;
    if (i == 0) continue;
    nondecreasing = nondecreasing && rows[i].attained >= rows[i - 1].attained;
    residual_down = residual_down && rows[i].residual < rows[i - 1].residual;
    mu_down = mu_down && rows[i].mu_zero <= rows[i - 1].mu_zero;
    gbs_down = gbs_down && rows[i].gap_beta_star < rows[i - 1].gap_beta_star;
  }
  const auto& first = rows.front();
  const auto& last = rows.back();
  const bool gap_halved = last.gap < first.gap / 2.0;
  const bool residual_halved = last.residual < first.residual / 2.0;
  const auto flag = [](bool b) { return b ? "ok" : "FAIL"; };
  std::ostringstream detail;
  detail << "below bound " << flag(below) << "; nondecreasing " << flag(nondecreasing) << "; gap(12)/gap(4) = "
         << fmt(last.gap / first.gap) << " " << flag(gap_halved) << "; residual decreasing " << flag(residual_down)
         << "; residual(12)/residual(4) = " << fmt(last.residual / first.residual) << " " << flag(residual_halved)
         << "; mu_zero non-increasing " << flag(mu_down) << "; gap at beta* decreasing " << flag(gbs_down);
  const bool ok = below && nondecreasing && gap_halved && residual_down && residual_halved && mu_down && gbs_down;
  return finish(7, "extremality trend", "c07_sweep.csv", table, ok, last.gap / first.gap, 0.5, detail.str());
}

CriterionOutcome criterion_negative_control(const LabConfig& config) {
  const double p = 2.0;
  const double a = 0.5;
  const auto fit = fit_geometric(p, 1.0, 4.0 / 3.0, a);
  const double omega = omega_p(p, 0.75);
  const double delta = omega - fit.c_prime;
  CsvTable table({"depth", "gamma", "c_prime", "omega", "own_residual", "eigen_residual"});
  bool own_down = true;
  bool eigen_apart = true;
  double own12 = std::numeric_limits<double>::infinity();
  double eigen12 = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  if (fit.feasible) {
    for (int K = 4; K <= 12; ++K) {
      const auto phi = geometric_family(p, a, fit.gamma, fit.t, K, config.ring_subdivision);
      const double own = eigen_residual(phi, p, fit.c_prime);
      const double eig = eigen_residual(phi, p);
      own_down = own_down && own < prev;
      eigen_apart = eigen_apart && eig > 10.0 * own;
      prev = own;
      own12 = own;
      eigen12 = eig;
      table.add_row({static_cast<double>(K), fit.gamma, fit.c_prime, omega, own, eig});
    }
  }
  const bool margin_ok = fit.feasible && delta > 0.01;
  const bool own_small = own12 < 1e-3;
  const auto flag = [](bool b) { return b ? "ok" : "FAIL"; };
  std::ostringstream detail;
  detail << "c' = " << fmt(fit.c_prime) << ", delta = " << fmt(delta) << " " << flag(margin_ok)
         << "; own residual decreasing " << flag(own_down) << "; own residual(12) = " << fmt(own12) << " "
         << flag(own_small) << "; eigen residual(12) = " << fmt(eigen12) << ", >10x own at every depth "
         << flag(eigen_apart);
  return finish(8, "negative control", "c08_geometric.csv", table, margin_ok && own_down && own_small && eigen_apart,
                own12, 1e-3, detail.str());
}

CriterionOutcome criterion_oracle(const LabConfig& config) {
  const double p = 2.0;
  const double f = 1.0;
  const double F = 4.0 / 3.0;
  const double oracle = brute_force_oracle(p, f, F, 2, 4.0, 0.05, config.chain_ratio);
  OptimizeConfig oc;
  oc.depth = 2;
  oc.restarts = std::max(8, config.sweep_restarts);
  oc.seed = config.seed;
  oc.chain_ratio = config.chain_ratio;
  oc.ring_subdivision = config.ring_subdivision;
  const auto opt = optimize(p, f, F, oc);
  const double bound = bellman_value(p, f, F);
  CsvTable table({"oracle", "optimized", "bound"});
  table.add_row({oracle, opt.attained, bound});
  const bool ok = oracle <= bound && oracle <= opt.attained + 1e-3;
  return finish(9, "oracle agreement", "c09_oracle.csv", table, ok, oracle - opt.attained, 1e-3,
                "oracle = " + fmt(oracle) + ", optimize = " + fmt(opt.attained) + ", bound = " + fmt(bound));
}

std::vector<CriterionOutcome> run_criteria(const LabConfig& config) {
  return {criterion_special_functions(config), criterion_bellman_bound(config), criterion_classical(config),
          criterion_linearization(config),     criterion_sharp(config),         criterion_gphi(config),
          criterion_extremal_trend(config),    criterion_negative_control(config), criterion_oracle(config)};
}

CriterionOutcome criterion_determinism(const std::vector<CriterionOutcome>& first,
                                       const std::vector<CriterionOutcome>& second) {
  CsvTable table({"criterion", "identical", "bytes"});
  bool ok = first.size() == second.size();
  int differing = 0;
  for (std::size_t i = 0; ok && i < first.size(); ++i) {
    const bool same = first[i].body == second[i].body;
    if (!same) ++differing;
    table.add_row({static_cast<double>(first[i].id), same ? 1.0 : 0.0, static_cast<double>(first[i].body.size())});
  }
  ok = ok && differing == 0;
  return finish(10, "determinism", "c10_determinism.csv", table, ok, differing, 0,
                std::to_string(differing) + " differing CSV bodies");
}

RunReport run_full_suite(const LabConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.command = "report";
  report.config = config;
  auto first = run_criteria(config);
  auto second = run_criteria(config);
  first.push_back(criterion_determinism(first, second));
  for (const auto& c : first) report.checks.push_back(c.check);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.outdir.empty()) {
    for (const auto& c : first) {
      write_csv((std::filesystem::path(config.outdir) / c.csv_name).string(), "report", config, c.body);
    }
    write_json_file(report.to_json(), (std::filesystem::path(config.outdir) / "report.json").string());
  }
  return report;
}

}  // namespace mtlab
