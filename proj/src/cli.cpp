#include "periph/cli.hpp"

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "periph/deform.hpp"
#include "periph/format.hpp"
#include "periph/io.hpp"
#include "periph/model.hpp"
#include "periph/optimize.hpp"
#include "periph/oracle.hpp"

namespace periph::cli {

namespace {

struct GlobalFlags {
  double tol = kDefaultTolerance;
  bool json = false;
};

// Loaded model, or an exit code explaining why not.
struct Loaded {
  std::optional<PeripheralModel> model;
  int code = kOk;
};

Loaded load_model(const std::string& path, std::ostream& err) {
  Loaded result;
  try {
    result.model = io::parse_model(io::read_file(path));
  } catch (const io::FormatError& e) {
    err << "error: " << path << ": " << e.what() << '\n';
    result.code = kUsage;
    return result;
  }
  if (auto violations = validate(*result.model); !violations.empty()) {
    err << "error: " << path << " is not a valid model:\n";
    for (const auto& v : violations) err << "  " << v.message << '\n';
    result.model.reset();
    result.code = kInfeasible;
  }
  return result;
}

std::optional<Configuration> load_config(const std::string& inline_values, const std::string& path,
                                         int expected, std::ostream& err) {
  try {
    Configuration config;
    if (!inline_values.empty() && !path.empty()) {
      err << "error: give either --config or --config-file, not both\n";
      return std::nullopt;
    }
    if (!inline_values.empty()) {
      config = io::parse_config_list(inline_values);
    } else if (!path.empty()) {
      config = io::config_from_json(io::Json::parse(io::read_file(path)));
    } else {
      err << "error: a configuration is required (--config or --config-file)\n";
      return std::nullopt;
    }
    if (config.size() != expected) {
      err << "error: configuration has " << config.size() << " values, model has " << expected
          << " components\n";
      return std::nullopt;
    }
    return config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

void print_solution_text(std::ostream& out, const Solution& s) {
  out << "method: " << to_string(s.method) << '\n';
  out << "total:  " << shortest_decimal(s.total) << '\n';
  out << "config:";
  for (double v : s.config.values) out << ' ' << shortest_decimal(v);
  out << "\nactive:";
  for (const auto& o : s.active_set) out << ' ' << '[' << o.describe() << ']';
  out << '\n';
}

int cmd_solve(const std::string& path, const GlobalFlags& flags, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_model(path, err);
  if (!loaded.model) return loaded.code;
  try {
    const Solution s = solve_global(*loaded.model, flags.tol);
    if (flags.json) {
      out << io::dump(io::to_json(s)) << '\n';
    } else {
      print_solution_text(out, s);
    }
    return kOk;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  }
}

int cmd_classify(const std::string& path, const std::string& config_inline, const std::string& config_path,
                 const GlobalFlags& flags, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load_model(path, err);
  if (!loaded.model) return loaded.code;
  const auto config = load_config(config_inline, config_path, loaded.model->size(), err);
  if (!config) return kUsage;
  try {
    ClassifyOptions options;
    options.tol = flags.tol;
    const Classification c = classify(*loaded.model, *config, options);
    if (flags.json) {
      out << io::dump(io::to_json(c)) << '\n';
    } else {
      out << "verdict: " << to_string(c.verdict) << '\n' << "rule:    " << c.evidence.rule << '\n';
    }
    return kOk;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int cmd_curve(const std::string& path, const std::string& config_inline, const std::string& config_path, int root,
              const std::pair<double, double>& range, int samples, const GlobalFlags& flags, std::ostream& out,
              std::ostream& err) {
  const Loaded loaded = load_model(path, err);
  if (!loaded.model) return loaded.code;
  const auto config = load_config(config_inline, config_path, loaded.model->size(), err);
  if (!config) return kUsage;
  if (root < 0 || root >= loaded.model->size()) {
    err << "error: root " << root << " out of range\n";
    return kUsage;
  }
  if (samples < 1 || !(range.first <= range.second)) {
    err << "error: need --samples >= 1 and a range lo,hi with lo <= hi\n";
    return kUsage;
  }
  TangencyGraph graph;
  try {
    graph = tangency_graph(*loaded.model, *config, flags.tol);
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  try {
    const DeformationTree tree = DeformationTree::from_graph(graph, root);
    const auto curve = volume_curve(*loaded.model, *config, tree, range.first, range.second, samples);
    std::ostringstream csv;
    write_curve_csv(csv, curve);
    out << csv.str();
    return kOk;
  } catch (const CycleError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DeformationRangeError& e) {
    err << "error: " << e.what() << " (offending t = " << shortest_decimal(e.t()) << ")\n";
    return kInfeasible;
  }
}

int cmd_gen(int cusps, int collars, std::uint64_t seed, double density, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
  if (cusps < 0 || collars < 0 || cusps + collars < 1) {
    err << "error: need at least one component (--cusps + --collars >= 1)\n";
    return kUsage;
  }
  if (!(density >= 0.0 && density <= 1.0)) {
    err << "error: --density must lie in [0, 1]\n";
    return kUsage;
  }
  const std::string text = io::dump_model(gen_random(cusps, collars, seed, density));
  if (out_path.empty()) {
    out << text;
    return kOk;
  }
  try {
    io::write_file_atomic(out_path, text);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

int cmd_verify(int n, int instances, std::uint64_t seed, double rel_tol, const GlobalFlags& flags,
               std::ostream& out, std::ostream& err) {
  if (n < 1 || n > 4) {
    err << "error: --n must lie in [1, 4] (the grid oracle is exponential in n)\n";
    return kUsage;
  }
  if (instances < 0 || !(rel_tol > 0.0)) {
    err << "error: need --instances >= 0 and --rel-tol > 0\n";
    return kUsage;
  }
  const auto start = std::chrono::steady_clock::now();
  io::Json reports = io::Json::array();
  std::vector<std::uint64_t> failed;
  for (int k = 0; k < instances; ++k) {
    const std::uint64_t instance_seed = seed + static_cast<std::uint64_t>(k);
    // Cycle through every cusp/collar mix.
    const int cusps = static_cast<int>(instance_seed % static_cast<std::uint64_t>(n + 1));
    const PeripheralModel model = gen_random(cusps, n - cusps, instance_seed, 1.0);
    oracle::VerificationReport report;
    try {
      const Solution candidate = solve_global(model, flags.tol);
      report = oracle::verify_instance(model, candidate, rel_tol);
    } catch (const std::exception& e) {
      err << "instance " << instance_seed << ": " << e.what() << '\n';
      report.pass = false;
    }
    report.instance_seed = instance_seed;
    if (!report.pass) failed.push_back(instance_seed);
    reports.push_back(io::to_json(report));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (flags.json) {
    io::Json summary{{"n", n},
                     {"instances", instances},
                     {"seed", seed},
                     {"rel_tol", rel_tol},
                     {"passed", instances - static_cast<int>(failed.size())},
                     {"failed_seeds", failed},
                     {"reports", std::move(reports)}};
    out << io::dump(summary) << '\n';
  } else {
    out << "verified " << instances << " instances with n=" << n << ": "
        << instances - static_cast<int>(failed.size()) << " PASS, " << failed.size() << " FAIL\n";
  }
  err << "verify finished in " << seconds << " s\n";
  if (!failed.empty()) {
    err << "failing seeds:";
    for (auto s : failed) err << ' ' << s;
    err << '\n';
    return kVerifyFailed;
  }
  return kOk;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--range", "expected lo,hi");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--range", "expected two numbers lo,hi");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Peripheral volume solver: maximize, classify and deform cusp/collar configurations"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--tol", flags.tol, "Tangency tolerance in linearized coordinates")->check(CLI::PositiveNumber);
  app.add_flag("--json", flags.json, "Emit JSON instead of text");

  std::string model_path;
  std::string config_inline;
  std::string config_path;

  auto* solve = app.add_subcommand("solve", "Global maximum of total peripheral volume");
  solve->add_option("model", model_path, "Model JSON file")->required();

  auto* classify_cmd = app.add_subcommand("classify", "Decide whether a configuration is a local maximum");
  classify_cmd->add_option("model", model_path, "Model JSON file")->required();
  classify_cmd->add_option("--config", config_inline, "Comma-separated values in component order");
  classify_cmd->add_option("--config-file", config_path, "Configuration JSON file");

  int root = 0;
  std::string range_text = "-0.1,0.1";
  int samples = 21;
  auto* curve = app.add_subcommand("curve", "Total volume along a tangency-tree deformation (CSV)");
  curve->add_option("model", model_path, "Model JSON file")->required();
  curve->add_option("--config", config_inline, "Comma-separated base configuration");
  curve->add_option("--config-file", config_path, "Base configuration JSON file");
  curve->add_option("--root", root, "Component whose parameter drives the deformation");
  curve->add_option("--range", range_text, "Parameter range lo,hi");
  curve->add_option("--samples", samples, "Number of samples");

  int cusps = 0;
  int collars = 0;
  std::uint64_t seed = 0;
  double density = 1.0;
  std::string out_path;
  auto* gen = app.add_subcommand("gen", "Generate a random model");
  gen->add_option("--cusps", cusps, "Number of cusps");
  gen->add_option("--collars", collars, "Number of collars");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--density", density, "Probability that a pair is constrained");
  gen->add_option("--out", out_path, "Output file (default: stdout)");

  int n = 2;
  int instances = 100;
  std::uint64_t verify_seed = 1;
  double rel_tol = 1e-5;
  auto* verify = app.add_subcommand("verify", "Check solve against the grid oracle on random instances");
  verify->add_option("--n", n, "Components per instance (at most 4)");
  verify->add_option("--instances", instances, "Number of instances");
  verify->add_option("--seed", verify_seed, "First instance seed");
  verify->add_option("--rel-tol", rel_tol, "Relative tolerance");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  if (solve->parsed()) return cmd_solve(model_path, flags, out, err);
  if (classify_cmd->parsed()) return cmd_classify(model_path, config_inline, config_path, flags, out, err);
  if (curve->parsed()) {
    std::pair<double, double> range;
    try {
      range = parse_range(range_text);
    } catch (const CLI::ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
    return cmd_curve(model_path, config_inline, config_path, root, range, samples, flags, out, err);
  }
  if (gen->parsed()) return cmd_gen(cusps, collars, seed, density, out_path, out, err);
  if (verify->parsed()) return cmd_verify(n, instances, verify_seed, rel_tol, flags, out, err);
  return kUsage;
}

}  // namespace periph::cli
