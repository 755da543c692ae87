#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "g2mu/epstein.hpp"
#include "g2mu/fourier.hpp"
#include "g2mu/invariants.hpp"
#include "g2mu/spectral.hpp"

namespace g2mu::cli {

namespace {

using nlohmann::ordered_json;

std::string decimal(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// "a b c;d e f;..." so that CSV cells need no quoting.
std::string matrix_cell(const Matrix<Rational>& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_rational(m(i, j));
    }
  }
  return out;
}

std::string vector_cell(const Vec7<Rational>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_rational(v[i]);
  }
  return out;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string bool_cell(bool b) { return b ? "true" : "false"; }

ordered_json error_json(const std::string& type, const std::string& message,
                        std::optional<std::size_t> element = std::nullopt) {
  ordered_json e;
  e["type"] = type;
  e["message"] = message;
  if (element) e["element"] = *element;
  return e;
}

JoyceOrbifold build_orbifold(const OrbifoldConfig& c) { return validate_joyce(generate(c.generators), c.frame); }

CommandResult run_check(const OrbifoldConfig& c) {
  const G2Structure<Rational> structure(c.frame);
  const OrbifoldGroup group = generate(c.generators);
  CommandResult r;
  r.table.header = {"index", "matrix", "translation", "g2_compatible"};
  auto elements = ordered_json::array();
  std::optional<std::size_t> first_failure;
  for (std::size_t i = 0; i < group.order(); ++i) {
    const auto& a = group[i];
    const bool compatible = structure.is_g2_element(a.matrix());
    if (!compatible && !first_failure) first_failure = i;
    ordered_json e;
    e["index"] = i;
    e["matrix"] = matrix_json(a.matrix());
    e["translation"] = vector_json(a.translation());
    e["g2_compatible"] = compatible;
    elements.push_back(std::move(e));
    r.table.rows.push_back(
        {std::to_string(i), matrix_cell(a.matrix()), vector_cell(a.translation()), bool_cell(compatible)});
  }
  r.result["group_order"] = group.order();
  r.result["elements"] = std::move(elements);
  if (first_failure) {
    r.ok = false;
    r.error = error_json("NotG2Compatible",
                         "element " + std::to_string(*first_failure) + " does not preserve the G2 structure",
                         *first_failure);
  }
  return r;
}

CommandResult run_invariants(const OrbifoldConfig& c, double tol) {
  const JoyceOrbifold o = build_orbifold(c);
  const InvariantPair exact = mu_invariants(o);
  const NumericInvariants numeric = closed_form_mu(o);
  const double dev3 = std::abs(numeric.mu3 - to_double(exact.mu3));
  const double dev4 = std::abs(numeric.mu4 - to_double(exact.mu4));
  CommandResult r;
  r.ok = dev3 <= tol && dev4 <= tol;
  r.result["group_order"] = o.group.order();
  r.result["mu3"] = format_rational(exact.mu3);
  r.result["mu4"] = format_rational(exact.mu4);
  r.result["mu3_decimal"] = to_double(exact.mu3);
  r.result["mu4_decimal"] = to_double(exact.mu4);
  r.result["zeta_mu3"] = numeric.mu3;
  r.result["zeta_mu4"] = numeric.mu4;
  r.result["zeta_deviation"] = std::max(dev3, dev4);
  r.result["tolerance"] = tol;
  r.table.header = {"quantity", "exact", "decimal"};
  r.table.rows = {{"mu3", format_rational(exact.mu3), decimal(to_double(exact.mu3))},
                  {"mu4", format_rational(exact.mu4), decimal(to_double(exact.mu4))},
                  {"zeta_mu3", "", decimal(numeric.mu3)},
                  {"zeta_mu4", "", decimal(numeric.mu4)}};
  return r;
}

CommandResult run_spectrum(const OrbifoldConfig& c, const Rational& radius_sq) {
  const JoyceOrbifold o = build_orbifold(c);
  ModeSpaceCache cache(std::make_shared<const G2Structure<Rational>>(o.structure));
  const auto records = spectral_report(o, radius_sq, &cache);

  std::size_t disagreements = 0;
  for (const auto& cls : enumerate_classes(o, radius_sq))
    for (const auto& k : cls.vectors)
      for (const auto& a : o.group.elements())
        if (!transpose_rule_agrees(o.structure, a.matrix(), k)) ++disagreements;

  CommandResult r;
  r.table.header = {"norm_sq", "kind", "class_size", "dim_bruteforce", "dim_formula", "match"};
  auto rows = ordered_json::array();
  std::size_t mismatches = 0;
  for (const auto& rec : records) {
    if (!rec.match()) ++mismatches;
    ordered_json e;
    e["norm_sq"] = format_rational(rec.norm_sq);
    e["kind"] = std::string(name(rec.kind));
    e["class_size"] = rec.class_size;
    e["dim_bruteforce"] = rec.dim_bruteforce;
    e["dim_formula"] = rec.dim_formula;
    e["match"] = rec.match();
    rows.push_back(std::move(e));
    r.table.rows.push_back({format_rational(rec.norm_sq), std::string(name(rec.kind)), std::to_string(rec.class_size),
                            std::to_string(rec.dim_bruteforce), std::to_string(rec.dim_formula),
                            bool_cell(rec.match())});
  }
  r.ok = mismatches == 0;
  r.result["group_order"] = o.group.order();
  r.result["radius_sq"] = format_rational(radius_sq);
  r.result["records"] = std::move(rows);
  r.result["mismatches"] = mismatches;
  r.result["transpose_rule_disagreements"] = disagreements;
  return r;
}

CommandResult run_identities(const OrbifoldConfig& c, std::size_t trials, std::uint64_t seed, double tol,
                             bool strict) {
  const JoyceOrbifold o = build_orbifold(c);
  auto s = std::make_shared<const G2Structure<double>>(o.structure.frame().cast<double>());
  const IdentityReport suite = verify_identities(s, trials, seed, {}, strict);
  const auto hessian = hessian_residuals(s, trials, seed);

  CommandResult r;
  r.table.header = {"identity", "max_residual"};
  auto rows = ordered_json::array();
  double worst = 0.0;
  std::size_t failures = 0;
  auto add = [&](const IdentityResidual& x) {
    worst = std::max(worst, x.residual);
    if (!(x.residual <= tol)) ++failures;
    ordered_json e;
    e["identity"] = x.name;
    e["max_residual"] = x.residual;
    rows.push_back(std::move(e));
    r.table.rows.push_back({x.name, decimal(x.residual)});
  };
  for (const auto& x : suite.max_residuals) add(x);
  for (const auto& x : hessian) add(x);
  r.ok = failures == 0;
  r.result["trials"] = trials;
  r.result["seed"] = seed;
  r.result["strict_types"] = strict;
  r.result["tolerance"] = tol;
  r.result["identities"] = std::move(rows);
  r.result["worst_residual"] = worst;
  r.result["failures"] = failures;
  return r;
}

CommandResult run_zeta(const OrbifoldConfig& c, double tol) {
  const JoyceOrbifold o = build_orbifold(c);
  const NumericInvariants numeric = closed_form_mu(o);
  const InvariantPair exact = mu_invariants(o);

  CommandResult r;
  r.table.header = {"element", "rank", "twisted", "value_at_zero", "deviation"};
  auto rows = ordered_json::array();
  double worst = 0.0;
  for (const auto& t : numeric.terms) {
    const double deviation = std::abs(t.value_at_zero + 1.0);
    worst = std::max(worst, deviation);
    ordered_json e;
    e["element"] = t.element;
    e["rank"] = t.rank;
    e["twisted"] = t.twisted;
    e["value_at_zero"] = t.value_at_zero;
    e["deviation"] = deviation;
    rows.push_back(std::move(e));
    r.table.rows.push_back({std::to_string(t.element), std::to_string(t.rank), bool_cell(t.twisted),
                            decimal(t.value_at_zero), decimal(deviation)});
  }
  const double mu_dev =
      std::max(std::abs(numeric.mu3 - to_double(exact.mu3)), std::abs(numeric.mu4 - to_double(exact.mu4)));
  r.ok = worst <= tol && mu_dev <= tol;
  r.result["group_order"] = o.group.order();
  r.result["terms"] = std::move(rows);
  r.result["max_deviation"] = worst;
  r.result["mu3"] = numeric.mu3;
  r.result["mu4"] = numeric.mu4;
  r.result["mu_deviation"] = mu_dev;
  r.result["tolerance"] = tol;
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check", "invariants", "spectrum", "identities", "zeta"};
  return names;
}

double default_tolerance(const std::string& command) { return command == "identities" ? 1e-9 : 1e-6; }

CommandResult run_command(const std::string& command, const OrbifoldConfig& config, const RunOptions& options) {
  const double tol = options.tolerance.value_or(default_tolerance(command));
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InputError("tolerance must be a positive number");
  if (command == "check") return run_check(config);
  if (command == "invariants") return run_invariants(config, tol);
  if (command == "spectrum") {
    Rational radius = config.oracle_radius_sq;
    if (options.radius_sq) {
      try {
        radius = parse_rational(*options.radius_sq);
      } catch (const std::invalid_argument& e) {
        throw InputError(std::string("--radius-sq: ") + e.what());
      }
    }
    return run_spectrum(config, radius);
  }
  if (command == "identities") {
    const std::size_t trials = options.trials.value_or(config.trials);
    if (trials == 0) throw InputError("trials must be positive");
    return run_identities(config, trials, options.seed.value_or(config.seed), tol, options.strict_types);
  }
  if (command == "zeta") return run_zeta(config, tol);
  throw InputError("unknown command '" + command + "'");
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_escape(cells[i]);
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

int run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ordered_json report;
  report["tool"] = "g2mu";
  report["version"] = kVersion;
  report["command"] = options.command;

  int code = kSuccess;
  std::optional<CommandResult> result;
  ordered_json error;
  try {
    if (options.output != "json" && options.output != "csv")
      throw InputError("--output must be json or csv");
    const OrbifoldConfig config = load_config(options.config_path);
    report["config"] = to_json(config);
    result = run_command(options.command, config, options);
    if (!result->ok) code = kMathFailure;
    if (!result->error.is_null()) error = result->error;
  } catch (const NotG2Compatible& e) {
    error = error_json("NotG2Compatible", e.what(), e.element_index());
    code = kMathFailure;
  } catch (const NonUnimodular& e) {
    error = error_json("NonUnimodular", e.what());
    code = kMathFailure;
  } catch (const NonFinite& e) {
    error = error_json("NonFinite", e.what());
    code = kMathFailure;
  } catch (const InputError& e) {
    error = error_json("InputError", e.what());
    code = kInputFailure;
  } catch (const MetricError& e) {
    error = error_json("MetricError", e.what());
    code = kInputFailure;
  } catch (const std::invalid_argument& e) {
    error = error_json("InputError", e.what());
    code = kInputFailure;
  } catch (const Error& e) {
    error = error_json("Error", e.what());
    code = kMathFailure;
  }

  if (!error.is_null()) err << "error: " << error["type"].get<std::string>() << ": "
                            << error["message"].get<std::string>() << '\n';

  if (options.output == "csv") {
    if (result) write_csv(out, result->table);
    return code;
  }
  report["result"] = result ? result->result : ordered_json();
  report["ok"] = code == kSuccess;
  if (!error.is_null()) report["error"] = std::move(error);
  report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << report.dump(2) << '\n';
  return code;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral and zeta invariants of flat G2 orbifolds T^7/Gamma", "g2mu"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions options;
  std::string radius;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<CLI::Option*> radius_opts, trials_opts, seed_opts, tolerance_opts;
  auto given = [](const std::vector<CLI::Option*>& opts) {
    return std::any_of(opts.begin(), opts.end(), [](CLI::Option* o) { return o->count() > 0; });
  };

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "Orbifold config (JSON)")->required();
    sub->add_option("--output", options.output, "Report format")->check(CLI::IsMember({"json", "csv"}));
    tolerance_opts.push_back(sub->add_option("--tolerance", tolerance, "Pass threshold"));
  };

  for (const auto& name : command_names()) {
    CLI::App* sub = nullptr;
    if (name == "check") sub = app.add_subcommand(name, "Generate the group and test G2 compatibility");
    if (name == "invariants") sub = app.add_subcommand(name, "Exact mu3 and mu4 with a zeta cross-check");
    if (name == "spectrum") {
      sub = app.add_subcommand(name, "Invariant eigenspace dimensions by brute force and by trace formula");
      radius_opts.push_back(sub->add_option("--radius-sq", radius, "Largest |l|^2 enumerated (rational)"));
    }
    if (name == "identities") {
      sub = app.add_subcommand(name, "Refined-operator and Hessian identities on random forms");
      trials_opts.push_back(
          sub->add_option("--trials", trials, "Number of random trials")->check(CLI::PositiveNumber));
      seed_opts.push_back(sub->add_option("--seed", seed, "Random seed"));
      sub->add_flag("--strict-types", options.strict_types, "Reject mistyped inputs to refined operators");
    }
    if (name == "zeta") sub = app.add_subcommand(name, "Continued Epstein zeta values of fixed lattices");
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputFailure;
  }

  for (CLI::App* sub : app.get_subcommands()) options.command = sub->get_name();
  if (given(radius_opts)) options.radius_sq = radius;
  if (given(trials_opts)) options.trials = trials;
  if (given(seed_opts)) options.seed = seed;
  if (given(tolerance_opts)) options.tolerance = tolerance;
  return run(options, out, err);
}

}  // namespace g2mu::cli
