// mtlab: command-line front end for the maximal-function lab.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtlab/bellman.hpp"
#include "mtlab/error.hpp"
#include "mtlab/extremal.hpp"
#include "mtlab/gphi.hpp"
#include "mtlab/io.hpp"
#include "mtlab/lab.hpp"
#include "mtlab/parallel.hpp"
#include "mtlab/sharp.hpp"
#include "mtlab/suite.hpp"

namespace {

using namespace mtlab;

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;

void emit(const std::string& out, const std::string& command, const LabConfig& config, const CsvTable& table) {
  if (out.empty()) {
    std::cout << csv_header(command, config) << table.body();
  } else {
    write_csv(out, command, config, table.body());
  }
}

// "4:12" or "4,6,8".
std::vector<int> parse_depths(const std::string& text) {
  std::vector<int> out;
  try {
    if (const auto colon = text.find(':'); colon != std::string::npos) {
      const int lo = std::stoi(text.substr(0, colon));
      const int hi = std::stoi(text.substr(colon + 1));
      if (lo > hi) throw UsageError("--depths: empty range " + text);
      for (int d = lo; d <= hi; ++d) out.push_back(d);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const UsageError*>(&e)) throw;
    throw UsageError("--depths: cannot parse '" + text + "'");
  }
  if (out.empty()) throw UsageError("--depths: no depths given");
  return out;
}

std::vector<NodeId> parse_nodes(const std::string& text) {
  std::vector<NodeId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.emplace_back(static_cast<std::uint32_t>(std::stoul(item)));
    } catch (const std::logic_error&) {
      throw UsageError("--family: cannot parse node id '" + item + "'");
    }
  }
  return out;
}

SearchMode parse_mode(const std::string& m) {
  if (m == "ring") return SearchMode::ring;
  if (m == "full" || m == "full_leaf") return SearchMode::full_leaf;
  throw UsageError("--mode must be ring or full");
}

struct VerifyOptions {
  std::string fn;
  std::optional<double> beta;
  bool beta_grid = false;
  std::string family;
  int random = 0;
  std::string out;
};

int run_verify(const VerifyOptions& o, double p, std::uint64_t seed, const LabConfig& config) {
  const StepFunction phi = load_function(o.fn);
  const auto lin = linearize(phi, p);
  const Moments mo = moments(phi, p);
  const double bstar = BellmanParams::make(p, mo.f, mo.F).beta_star;
  std::vector<double> betas;
  if (o.beta) {
    betas.push_back(*o.beta);
  } else if (o.beta_grid) {
    betas = beta_grid();
    if (bstar > 0.0) betas.push_back(bstar);
  } else {
    betas.push_back(bstar > 0.0 ? bstar : 1.0);
  }

  std::vector<FamilySelection> families;
  if (!o.family.empty()) {
    FamilySelection fam;
    fam.members = parse_nodes(o.family);
    fam.kind = is_maximal_family(lin, fam.members) ? FamilyKind::maximal : FamilyKind::plain;
    families.push_back(std::move(fam));
  } else if (o.random > 0) {
    for (int k = 0; k < o.random; ++k) {
      std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(k)));
      families.push_back(sample_family(lin, rng, k % 2 == 0));
    }
  } else {
    families.push_back({{lin.tree->root()}, FamilyKind::maximal});
  }

  CsvTable table({"instance", "inequality", "beta", "members", "slack"});
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  auto record = [&](std::size_t instance, const char* name, double beta, std::size_t members, double slack) {
    const double ns = slack / std::max(1.0, mo.F);
    min_slack = std::min(min_slack, ns);
    ++count;
    table.add_cells({std::to_string(instance), name, format_number(beta), std::to_string(members), format_number(ns)});
  };
  std::size_t instance = 0;
  for (const auto& fam : families) {
    for (double beta : betas) {
      if (fam.kind == FamilyKind::maximal) record(instance, "thm31", beta, fam.members.size(), verify_thm31(phi, lin, fam.members, beta));
      record(instance, "thm32", beta, fam.members.size(), verify_thm32(phi, lin, fam.members, beta));
      record(instance, "cor31", beta, fam.members.size(), verify_cor31(phi, lin, fam.members, beta));
      record(instance, "ineq310", beta, 0, verify_310(phi, lin, beta));
      ++instance;
    }
  }
  table.add_cells({"summary", "min", "", std::to_string(count), format_number(min_slack)});
  emit(o.out, "verify", config, table);
  const bool ok = min_slack >= -config.tau_num;
  std::cerr << "verify: " << count << " slacks, min " << format_number(min_slack) << (ok ? ", pass" : ", FAIL")
            << "\n";
  return ok ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic maximal operator lab: Bellman bounds, sharp inequalities, extremal search"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);

  double p = 0.0;  // 0 means: take the config default
  auto add_p = [&](CLI::App* sc) { sc->add_option("--p", p, "exponent in (1, 64]"); };
  std::optional<std::uint64_t> seed;
  auto add_seed = [&](CLI::App* sc) { sc->add_option("--seed", seed, "master seed"); };
  std::string fn;
  std::string out;

  auto* omega = app.add_subcommand("omega", "inverse of H_p at x");
  double x = 0.0;
  add_p(omega);
  omega->add_option("--x", x, "value in [0,1]")->required();

  auto* bound = app.add_subcommand("bound", "Bellman value F*omega_p(f^p/F)^p");
  double f1 = 0.0;
  double F1 = 0.0;
  add_p(bound);
  bound->add_option("--f", f1, "integral of phi")->required();
  bound->add_option("--F", F1, "integral of phi^p")->required();

  auto* maximal = app.add_subcommand("maximal", "maximal function of a step function");
  std::optional<double> lambda;
  maximal->add_option("--fn", fn, "function file")->required()->check(CLI::ExistingFile);
  add_p(maximal);
  maximal->add_option("--lambda", lambda, "single level for the weak-type slack (default: every level)");
  maximal->add_option("--out", out, "JSON report (default stdout)");

  auto* linearize_cmd = app.add_subcommand("linearize", "S_phi and the sets A(phi,I)");
  add_p(linearize_cmd);
  linearize_cmd->add_option("--fn", fn, "function file")->required()->check(CLI::ExistingFile);
  linearize_cmd->add_option("--out", out, "CSV output (default stdout)");

  auto* verify = app.add_subcommand("verify", "slacks of the sharp inequalities");
  VerifyOptions vo;
  add_p(verify);
  add_seed(verify);
  verify->add_option("--fn", vo.fn, "function file")->required()->check(CLI::ExistingFile);
  auto* beta_opt = verify->add_option("--beta", vo.beta, "single beta > 0");
  verify->add_flag("--beta-grid", vo.beta_grid, "25-point log grid plus beta*")->excludes(beta_opt);
  auto* fam_opt = verify->add_option("--family", vo.family, "comma-separated node ids");
  verify->add_option("--random", vo.random, "number of random families")->excludes(fam_opt);
  verify->add_option("--out", vo.out, "CSV output (default stdout)");

  auto* optimize_cmd = app.add_subcommand("optimize", "search for a near-extremal function");
  std::string mode = "ring";
  int depth = 8;
  int restarts = 0;
  add_p(optimize_cmd);
  add_seed(optimize_cmd);
  optimize_cmd->add_option("--f", f1, "integral of phi")->required();
  optimize_cmd->add_option("--F", F1, "integral of phi^p")->required();
  optimize_cmd->add_option("--depth", depth, "chain depth")->required();
  optimize_cmd->add_option("--mode", mode, "ring or full");
  optimize_cmd->add_option("--restarts", restarts, "independent starts");
  optimize_cmd->add_option("--out", out, "function file to write")->required();

  auto* sweep = app.add_subcommand("sweep", "optimize across depths");
  std::string depths_text = "4:12";
  add_p(sweep);
  add_seed(sweep);
  sweep->add_option("--f", f1, "integral of phi")->required();
  sweep->add_option("--F", F1, "integral of phi^p")->required();
  sweep->add_option("--depths", depths_text, "range a:b or list a,b,c");
  sweep->add_option("--mode", mode, "ring or full");
  sweep->add_option("--restarts", restarts, "independent starts per depth");
  sweep->add_option("--out", out, "CSV output (default stdout)");

  auto* gphi_cmd = app.add_subcommand("gphi", "two-valued redistribution of phi");
  add_p(gphi_cmd);
  gphi_cmd->add_option("--fn", fn, "function file")->required()->check(CLI::ExistingFile);
  gphi_cmd->add_option("--out", out, "CSV table; g is written next to it as .g.json")->required();

  auto* residual = app.add_subcommand("residual", "eigenfunction residual of phi and its split for g");
  std::optional<double> c_opt;
  add_p(residual);
  residual->add_option("--fn", fn, "function file")->required()->check(CLI::ExistingFile);
  residual->add_option("--c", c_opt, "eigenvalue (default omega_p(f^p/F))");

  auto* report = app.add_subcommand("report", "run every acceptance check");
  std::string outdir;
  add_seed(report);
  report->add_option("--out", outdir, "output directory (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    LabConfig config = config_path.empty() ? LabConfig{} : load_config(config_path);
    if (p == 0.0) p = config.p;
    const std::uint64_t master = seed.value_or(config.seed);

    if (omega->parsed()) {
      std::cout << format_number(omega_p(p, x)) << "\n";
      return 0;
    }
    if (bound->parsed()) {
      std::cout << format_number(bellman_value(p, f1, F1)) << "\n";
      return 0;
    }
    if (maximal->parsed()) {
      const auto phi = load_function(fn);
      const auto m = maximal_function(phi);
      nlohmann::json leaves = nlohmann::json::array();
      for (std::size_t s = 0; s < phi.tree().leaf_count(); ++s) {
        leaves.push_back({{"leaf_id", phi.tree().leaf_at(s).value},
                          {"value", phi.value(s)},
                          {"mphi", m.mphi.value(s)},
                          {"argmax", m.argmax[s].value}});
      }
      const double F = p_integral(phi, p);
      const double scale_f = std::max(1.0, phi.integral());
      const double scale_F = std::max(1.0, std::pow(p / (p - 1.0), p) * F);
      double weak = std::numeric_limits<double>::infinity();
      if (lambda) {
        weak = check_weak_type(phi, m, *lambda);
      } else {
        for (double level : weak_type_levels(m)) weak = std::min(weak, check_weak_type(phi, m, level));
      }
      const double lp = check_lp_bound(phi, m, p);
      const double bellman = check_bellman_bound(phi, m, p);
      const bool ok = weak >= -config.tau_num * scale_f && lp >= -config.tau_num * scale_F &&
                      bellman >= -config.tau_num * std::max(1.0, F);
      nlohmann::json doc{{"format", "mtlab-maximal"},
                         {"version", kFileFormatVersion},
                         {"p", p},
                         {"lambda", lambda ? nlohmann::json(*lambda) : nlohmann::json("all levels")},
                         {"leaves", leaves},
                         {"weak_type_slack", weak},
                         {"lp_slack", lp},
                         {"bellman_slack", bellman},
                         {"passed", ok}};
      if (out.empty()) {
        std::cout << doc.dump(2) << "\n";
      } else {
        write_json_file(doc, out);
      }
      return ok ? 0 : kExitChecksFailed;
    }
    if (linearize_cmd->parsed()) {
      const auto phi = load_function(fn);
      const auto lin = linearize(phi, p);
      CsvTable table({"node", "a", "y", "x", "star"});
      for (const auto& e : lin.entries) {
        table.add_cells({std::to_string(e.node.value), format_number(e.a), format_number(e.y), format_number(e.x),
                         e.star ? std::to_string(e.star->value) : std::string()});
      }
      emit(out, "linearize", config, table);
      std::cerr << "linearize: " << lin.entries.size() << " elements in S_phi, sum a y^p = "
                << format_number(lin.weighted_power_sum()) << "\n";
      return 0;
    }
    if (verify->parsed()) return run_verify(vo, p, master, config);

    OptimizeConfig oc;
    oc.seed = master;
    oc.mode = parse_mode(mode);
    oc.restarts = restarts > 0 ? restarts : config.sweep_restarts;
    oc.chain_ratio = config.chain_ratio;
    oc.ring_subdivision = config.ring_subdivision;

    if (optimize_cmd->parsed()) {
      oc.depth = depth;
      const auto res = optimize(p, f1, F1, oc);
      store_function(res.phi, out);
      std::cout << "optimize: depth " << depth << " attained " << format_number(res.attained) << " bound "
                << format_number(res.bound) << " gap " << format_number(res.bound - res.attained) << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      const auto depths = parse_depths(depths_text);
      const auto rows = depth_sweep(p, f1, F1, depths, oc);
      CsvTable table({"depth", "attained", "bound", "gap", "residual", "mu_zero", "gap_beta_star", "loc_dev_f",
                      "loc_dev_F"});
      bool ok = true;
      for (const auto& r : rows) {
        ok = ok && r.attained <= r.bound + config.tau_num;
        table.add_row({static_cast<double>(r.depth), r.attained, r.bound, r.gap, r.residual, r.mu_zero,
                       r.gap_beta_star, r.loc_dev_f, r.loc_dev_F});
      }
      emit(out, "sweep", config, table);
      std::cerr << "sweep: " << rows.size() << " depths, final gap " << format_number(rows.back().gap) << "\n";
      return ok ? 0 : kExitChecksFailed;
    }
    if (gphi_cmd->parsed()) {
      const auto phi = load_function(fn);
      const auto g = build_g(phi, p);
      CsvTable table({"node", "a", "c", "gamma", "blocks", "stage2_feasible"});
      for (const auto& r : g.records) {
        table.add_cells({std::to_string(r.node.value), format_number(r.a), format_number(r.c),
                         format_number(r.gamma), std::to_string(r.blocks), r.stage2_feasible ? "1" : "0"});
      }
      write_csv(out, "gphi", config, table.body());
      const auto gpath = std::filesystem::path(out).replace_extension(".g.json").string();
      store_function(g.g, gpath);
      const auto chk = verify_g(phi, p, g, config.tau_num);
      std::cout << "gphi: " << g.records.size() << " elements, stage-2 feasible " << (g.stage2_feasible() ? "yes" : "no")
                << ", checks " << (chk.all() ? "pass" : "FAIL") << ", g written to " << gpath << "\n";
      return chk.all() || !g.stage2_feasible() ? 0 : kExitChecksFailed;
    }
    if (residual->parsed()) {
      const auto phi = load_function(fn);
      const auto g = build_g(phi, p);
      const Moments mo = moments(phi, p);
      const double c = c_opt.value_or(omega_p(p, std::min(1.0, std::pow(mo.f, p) / mo.F)));
      const auto split = residual_split(g, p, c);
      std::cout << "residual: c " << format_number(c) << " phi " << format_number(eigen_residual(phi, p, c))
                << " g_on_delta " << format_number(split.on_delta) << " g_off_delta "
                << format_number(split.off_delta) << "\n";
      return 0;
    }
    if (report->parsed()) {
      config.seed = master;
      if (!outdir.empty()) config.outdir = outdir;
      const auto rep = run_full_suite(config);
      for (const auto& c : rep.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      }
      std::cout << "report: " << (rep.all_passed() ? "all checks pass" : "some checks FAIL") << " in "
                << format_number(rep.seconds) << " s\n";
      return rep.exit_code();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
