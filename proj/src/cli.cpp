#include "pseudomode/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "pseudomode/csv.hpp"
#include "pseudomode/estimator.hpp"
#include "pseudomode/loss_core.hpp"
#include "pseudomode/objective.hpp"
#include "pseudomode/synth.hpp"

namespace pseudomode {

namespace {

using nlohmann::json;

// A usage or input problem; mapped to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CommonOpts {
  std::string input = "-";
  std::string column = "all";
  std::string method;     // empty selects the default rule
  std::string format;     // "json" or "csv"; per-subcommand default
  std::string delimiter;  // empty = auto-detect
  double k = 2.633;
  double m = 2.0;
  double epsilon = 1e-6;
  std::size_t grid = 0;  // 0 = per-subcommand default
  std::size_t budget = 1000000;
  std::uint64_t seed = 1;
};

// PSEUDOMODE_CONFIG names a JSON file whose keys preset the flag defaults.
CommonOpts load_config_defaults() {
  CommonOpts base;
  const char* path = std::getenv("PSEUDOMODE_CONFIG");
  if (path == nullptr || *path == '\0') return base;
  std::ifstream file(path);
  if (!file) throw UsageError(std::string("cannot read config file '") + path + "'");
  json cfg;
  try {
    file >> cfg;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file '") + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError(std::string("config file '") + path + "' must hold a JSON object");
  try {
    if (cfg.contains("input")) base.input = cfg.at("input").get<std::string>();
    if (cfg.contains("column")) base.column = cfg.at("column").get<std::string>();
    if (cfg.contains("method")) base.method = cfg.at("method").get<std::string>();
    if (cfg.contains("format")) base.format = cfg.at("format").get<std::string>();
    if (cfg.contains("delimiter")) base.delimiter = cfg.at("delimiter").get<std::string>();
    if (cfg.contains("k")) base.k = cfg.at("k").get<double>();
    if (cfg.contains("m")) base.m = cfg.at("m").get<double>();
    if (cfg.contains("epsilon")) base.epsilon = cfg.at("epsilon").get<double>();
    if (cfg.contains("grid")) base.grid = cfg.at("grid").get<std::size_t>();
    if (cfg.contains("budget")) base.budget = cfg.at("budget").get<std::size_t>();
    if (cfg.contains("seed")) base.seed = cfg.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file '") + path + "': " + e.what());
  }
  return base;
}

void add_data_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--input", o.input, "input file path, or - for standard input");
  cmd->add_option("--column", o.column, "column to analyze: 0-based index, header name, or all");
  cmd->add_option("--delimiter", o.delimiter, "cell delimiter (auto-detected when omitted; 'tab' for tab)");
}

void add_model_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--k", o.k, "sharpness of the smoothed Hamming loss");
  cmd->add_option("--m", o.m, "flatness of the smoothed Hamming loss");
}

Method parse_method(const std::string& name) {
  if (name == "mean") return Method::Mean;
  if (name == "median") return Method::Median;
  if (name == "mode") return Method::ExactMode;
  if (name == "pseudo-lipschitz" || name == "lipschitz") return Method::PseudoLipschitz;
  if (name == "pseudo-quasi" || name == "quasi" || name == "quasiconvex")
    return Method::PseudoQuasiConvex;
  if (name == "oracle" || name == "grid-oracle") return Method::GridOracle;
  throw UsageError("unknown method '" + name +
                   "' (expected mean, median, mode, pseudo-lipschitz, pseudo-quasi, or oracle)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::Mean: return "mean";
    case Method::Median: return "median";
    case Method::ExactMode: return "mode";
    case Method::PseudoLipschitz: return "pseudo-lipschitz";
    case Method::PseudoQuasiConvex: return "pseudo-quasi";
    case Method::GridOracle: return "oracle";
  }
  return "unknown";
}

Method resolve_method(const CommonOpts& o) {
  if (!o.method.empty()) return parse_method(o.method);
  // Default rule: the quasi-convex path only where its certificate applies.
  if (o.k == 2.633 && o.m == 2.0) return Method::PseudoQuasiConvex;
  return Method::PseudoLipschitz;
}

char resolve_delimiter(const std::string& spec) {
  if (spec.empty()) return 0;
  if (spec == "tab" || spec == "\\t") return '\t';
  if (spec.size() == 1) return spec[0];
  throw UsageError("delimiter must be a single character or 'tab'");
}

std::string resolve_format(const std::string& spec, const char* fallback) {
  const std::string f = spec.empty() ? fallback : spec;
  if (f != "json" && f != "csv") throw UsageError("format must be json or csv");
  return f;
}

Table read_input(const CommonOpts& o, std::istream& in) {
  const char delim = resolve_delimiter(o.delimiter);
  if (o.input == "-") return read_table(in, delim);
  std::ifstream file(o.input);
  if (!file) throw UsageError("cannot open input file '" + o.input + "'");
  return read_table(file, delim);
}

// Columns selected by --column, in index order.
std::vector<std::size_t> select_columns(const Table& table, const std::string& selector) {
  if (table.column_count() == 0) throw UsageError("input holds no data");
  if (selector == "all" || selector == "both") {
    std::vector<std::size_t> out(table.column_count());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = c;
    return out;
  }
  try {
    return {resolve_column(table, selector)};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Enforces the ingestion contract for one column and surfaces skip counts.
void check_column(const Table& table, std::size_t c, std::ostream& err) {
  const std::string& name = table.column_names[c];
  const std::size_t good = table.columns[c].size();
  const std::size_t bad = table.skipped[c];
  if (good == 0) throw UsageError("column '" + name + "' holds no numeric data");
  if (static_cast<double>(bad) > 0.10 * static_cast<double>(good + bad))
    throw UsageError("column '" + name + "': " + std::to_string(bad) + " of " +
                     std::to_string(good + bad) + " cells are non-numeric (over the 10% limit)");
  if (bad > 0)
    err << "warning: column '" << name << "': skipped " << bad << " non-numeric cell"
        << (bad == 1 ? "" : "s") << "\n";
}

json report_to_json(const std::string& column, const EstimateReport& r) {
  json j;
  j["column"] = column;
  j["method"] = method_name(r.method);
  j["location_raw"] = r.location_raw;
  j["location_normalized"] = r.location_normalized;
  j["objective_value"] = r.objective_value;
  j["evaluations"] = r.evaluations;
  j["certified"] = r.certified;
  j["k"] = r.k;
  j["m"] = r.m;
  j["epsilon"] = r.epsilon;
  j["warnings"] = r.warnings;
  return j;
}

int cmd_estimate(const CommonOpts& o, std::istream& in, std::ostream& out, std::ostream& err) {
  const std::string format = resolve_format(o.format, "json");
  const Method method = resolve_method(o);
  const Table table = read_input(o, in);
  const std::vector<std::size_t> selected = select_columns(table, o.column);

  EstimatorParams params;
  params.k = o.k;
  params.m = o.m;
  params.epsilon = o.epsilon;
  params.budget = o.budget;
  if (o.grid != 0) params.oracle_grid = o.grid;

  bool all_certified = true;
  json reports = json::array();
  std::ostringstream csv;
  csv << "column,method,location_raw,location_normalized,objective_value,evaluations,"
         "certified,k,m,epsilon\n";
  for (std::size_t c : selected) {
    check_column(table, c, err);
    EstimateReport r;
    try {
      r = estimate(table.columns[c], method, params);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    all_certified = all_certified && r.certified;
    for (const std::string& w : r.warnings)
      err << "warning: column '" << table.column_names[c] << "': " << w << "\n";
    if (format == "json") {
      reports.push_back(report_to_json(table.column_names[c], r));
    } else {
      csv << table.column_names[c] << ',' << method_name(r.method) << ','
          << fmt_double(r.location_raw) << ',' << fmt_double(r.location_normalized) << ','
          << fmt_double(r.objective_value) << ',' << r.evaluations << ','
          << (r.certified ? "true" : "false") << ',' << fmt_double(r.k) << ','
          << fmt_double(r.m) << ',' << fmt_double(r.epsilon) << "\n";
    }
  }
  if (format == "json")
    out << reports.dump(2) << "\n";
  else
    out << csv.str();
  return all_certified ? 0 : 2;
}

const char* region_name(Region region) {
  switch (region) {
    case Region::Convex: return "Convex";
    case Region::Concave: return "Concave";
    case Region::Tail: return "Tail";
  }
  return "unknown";
}

int cmd_losscurve(const CommonOpts& o, std::ostream& out) {
  const std::string format = resolve_format(o.format, "csv");
  const std::size_t grid = o.grid == 0 ? 1001 : o.grid;
  if (grid < 2) throw UsageError("losscurve needs a grid of at least 2 points");
  SmoothedHammingLoss loss(o.k, o.m);
  // Symmetric domain wide enough to show every region at the given k.
  const double tail_start =
      loss.alpha_concave_end() < std::cosh(5.0) * 2.0 && loss.alpha_concave_end() >= 2.0
          ? std::acosh(loss.alpha_concave_end() / 2.0) / o.k
          : 5.0 / o.k;
  const double xmax = std::max(5.0 / o.k, 2.0 * tail_start);

  json rows = json::array();
  if (format == "csv") out << "x,value,d1,d2,region\n";
  for (std::size_t i = 0; i < grid; ++i) {
    const double span = static_cast<double>(grid - 1);
    const double x = xmax * (2.0 * static_cast<double>(i) - span) / span;
    const double value = loss.value(x);
    const double d1 = loss.d1(x);
    const double d2 = loss.d2(x);
    const char* region = region_name(loss.region(x));
    if (format == "csv") {
      out << fmt_double(x) << ',' << fmt_double(value) << ',' << fmt_double(d1) << ','
          << fmt_double(d2) << ',' << region << "\n";
    } else {
      json row;
      row["x"] = x;
      row["value"] = value;
      row["d1"] = d1;
      row["d2"] = d2;
      row["region"] = region;
      rows.push_back(std::move(row));
    }
  }
  if (format == "json") out << rows.dump(2) << "\n";
  return 0;
}

int cmd_trace(const CommonOpts& o, std::istream& in, std::ostream& out, std::ostream& err) {
  const std::string format = resolve_format(o.format, "csv");
  const Method method = resolve_method(o);
  if (method != Method::PseudoLipschitz && method != Method::PseudoQuasiConvex)
    throw UsageError("trace requires method pseudo-lipschitz or pseudo-quasi");
  const Table table = read_input(o, in);
  const std::vector<std::size_t> selected = select_columns(table, o.column);
  if (selected.size() != 1)
    throw UsageError("trace works on a single column; pick one with --column");
  const std::size_t c = selected.front();
  check_column(table, c, err);

  SampleSet samples;
  try {
    samples = normalize(table.columns[c]);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const OptimizerKind kind =
      method == Method::PseudoLipschitz ? OptimizerKind::Lipschitz : OptimizerKind::QuasiConvex;
  EstimateReport r;
  try {
    r = pseudo_mode(samples, o.k, o.m, kind, o.epsilon, o.budget);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const std::string& w : r.warnings)
    err << "warning: column '" << table.column_names[c] << "': " << w << "\n";

  if (kind == OptimizerKind::Lipschitz) {
    if (format == "csv") {
      out << "iteration,x,value,score,best_value,gap\n";
      for (const LipschitzTraceEntry& t : r.lipschitz_trace)
        out << t.index << ',' << fmt_double(t.x) << ',' << fmt_double(t.value) << ','
            << fmt_double(t.score) << ',' << fmt_double(t.best_value) << ','
            << fmt_double(t.gap) << "\n";
    } else {
      json rows = json::array();
      for (const LipschitzTraceEntry& t : r.lipschitz_trace) {
        json row;
        row["iteration"] = t.index;
        row["x"] = t.x;
        row["value"] = t.value;
        row["score"] = t.score;
        row["best_value"] = t.best_value;
        row["gap"] = t.gap;
        rows.push_back(std::move(row));
      }
      out << rows.dump(2) << "\n";
    }
  } else {
    if (format == "csv") {
      out << "iteration,queries,bracket_low,bracket_high,width\n";
      for (const QuasiIterationRecord& t : r.quasi_trace) {
        out << t.iteration << ',';
        for (std::size_t i = 0; i < t.queries.size(); ++i)
          out << (i == 0 ? "" : ";") << fmt_double(t.queries[i]);
        out << ',' << fmt_double(t.bracket_low) << ',' << fmt_double(t.bracket_high) << ','
            << fmt_double(t.width) << "\n";
      }
    } else {
      json rows = json::array();
      for (const QuasiIterationRecord& t : r.quasi_trace) {
        json row;
        row["iteration"] = t.iteration;
        row["queries"] = t.queries;
        row["bracket_low"] = t.bracket_low;
        row["bracket_high"] = t.bracket_high;
        row["width"] = t.width;
        rows.push_back(std::move(row));
      }
      out << rows.dump(2) << "\n";
    }
  }
  return r.certified ? 0 : 2;
}

int cmd_certify(const CommonOpts& o, std::istream& in, std::ostream& out, std::ostream& err) {
  const std::string format = resolve_format(o.format, "json");
  if (o.m != 2.0) throw UsageError("certify requires m = 2");
  const std::size_t grid = o.grid == 0 ? 1001 : o.grid;
  if (grid < 2) throw UsageError("certify needs a grid of at least 2 points");
  const Table table = read_input(o, in);
  const std::vector<std::size_t> selected = select_columns(table, o.column);

  const ObjectiveConfig config{o.k, o.m, Aggregation::Average};
  config.validate();
  const double bound = certificate_bound(o.k);

  bool all_passed = true;
  json reports = json::array();
  std::ostringstream csv;
  csv << "column,n,k,max_factor,certificate_bound,factor_ok,quasiconvex_ok,"
         "quasiconvex_violation_x,unimodal,sign_changes,unimodality_violation_x,passed\n";
  for (std::size_t c : selected) {
    check_column(table, c, err);
    SampleSet samples;
    try {
      samples = normalize(table.columns[c]);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    double max_factor = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(grid - 1);
      max_factor = std::max(max_factor, certificate_factor(config, samples, x));
    }
    const bool factor_ok = max_factor <= bound + 1e-12;
    const CheckReport qc =
        quasiconvexity_check(config, samples, default_quasi_delta(config, samples), grid);
    const UnimodalityReport uni = check_grid_unimodality(config, samples, grid);
    const bool passed = factor_ok && qc.passed && uni.unimodal;
    all_passed = all_passed && passed;

    if (format == "json") {
      json j;
      j["column"] = table.column_names[c];
      j["n"] = samples.count();
      j["k"] = o.k;
      j["m"] = o.m;
      j["grid"] = grid;
      j["max_factor"] = max_factor;
      j["certificate_bound"] = bound;
      j["factor_ok"] = factor_ok;
      j["quasiconvex_ok"] = qc.passed;
      j["quasiconvex_violation_x"] = qc.passed ? json() : json(qc.first_violation_x);
      j["unimodal"] = uni.unimodal;
      j["sign_changes"] = uni.sign_changes;
      j["unimodality_violation_x"] = uni.unimodal ? json() : json(uni.first_violation_x);
      j["passed"] = passed;
      reports.push_back(std::move(j));
    } else {
      csv << table.column_names[c] << ',' << samples.count() << ',' << fmt_double(o.k) << ','
          << fmt_double(max_factor) << ',' << fmt_double(bound) << ','
          << (factor_ok ? "true" : "false") << ',' << (qc.passed ? "true" : "false") << ','
          << (qc.passed ? "" : fmt_double(qc.first_violation_x)) << ','
          << (uni.unimodal ? "true" : "false") << ',' << uni.sign_changes << ','
          << (uni.unimodal ? "" : fmt_double(uni.first_violation_x)) << ','
          << (passed ? "true" : "false") << "\n";
    }
  }
  if (format == "json")
    out << reports.dump(2) << "\n";
  else
    out << csv.str();
  return all_passed ? 0 : 2;
}

struct SynthOpts {
  std::string kind = "mixture";
  std::size_t n = 200;
  double lo = 0.0;
  double hi = 1.0;
  double mass_fraction = 0.8;
  double mass_value = 0.5;
};

int cmd_synth(const CommonOpts& o, const SynthOpts& s, std::ostream& out) {
  std::vector<double> data;
  try {
    if (s.kind == "uniform")
      data = synth::uniform(s.n, s.lo, s.hi, o.seed);
    else if (s.kind == "mixture")
      data = synth::point_mass_mixture(s.n, s.mass_fraction, s.mass_value, o.seed);
    else
      throw UsageError("unknown synth kind '" + s.kind + "' (expected uniform or mixture)");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  out << "v\n";
  for (double v : data) out << fmt_double(v) << "\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  try {
    CommonOpts base = load_config_defaults();

    CLI::App app{"pseudo-mode location estimation for 1-D samples"};
    app.require_subcommand(1);

    CommonOpts est = base;
    CLI::App* cmd_est = app.add_subcommand("estimate", "estimate a centralizing location");
    add_data_options(cmd_est, est);
    add_model_options(cmd_est, est);
    cmd_est->add_option("--method", est.method,
                        "mean, median, mode, pseudo-lipschitz, pseudo-quasi, or oracle");
    cmd_est->add_option("--epsilon", est.epsilon, "certification tolerance");
    cmd_est->add_option("--budget", est.budget, "objective evaluation budget");
    cmd_est->add_option("--grid", est.grid, "grid size for the oracle method");
    cmd_est->add_option("--format", est.format, "json (default) or csv");

    CommonOpts curve = base;
    CLI::App* cmd_curve = app.add_subcommand("losscurve", "tabulate the loss and derivatives");
    add_model_options(cmd_curve, curve);
    cmd_curve->add_option("--grid", curve.grid, "number of grid points (default 1001)");
    cmd_curve->add_option("--format", curve.format, "csv (default) or json");

    CommonOpts trace = base;
    CLI::App* cmd_tr = app.add_subcommand("trace", "export an optimizer trace");
    add_data_options(cmd_tr, trace);
    add_model_options(cmd_tr, trace);
    cmd_tr->add_option("--method", trace.method, "pseudo-lipschitz or pseudo-quasi");
    cmd_tr->add_option("--epsilon", trace.epsilon, "certification tolerance");
    cmd_tr->add_option("--budget", trace.budget, "objective evaluation budget");
    cmd_tr->add_option("--format", trace.format, "csv (default) or json");

    CommonOpts cert = base;
    CLI::App* cmd_cert = app.add_subcommand("certify", "run the quasi-convexity diagnostics");
    add_data_options(cmd_cert, cert);
    add_model_options(cmd_cert, cert);
    cmd_cert->add_option("--grid", cert.grid, "diagnostic grid size (default 1001)");
    cmd_cert->add_option("--format", cert.format, "json (default) or csv");

    CommonOpts syn = base;
    SynthOpts syn_extra;
    CLI::App* cmd_syn = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    cmd_syn->add_option("--kind", syn_extra.kind, "uniform or mixture (default mixture)");
    cmd_syn->add_option("--n", syn_extra.n, "sample count (default 200)");
    cmd_syn->add_option("--seed", syn.seed, "generator seed");
    cmd_syn->add_option("--lo", syn_extra.lo, "uniform lower bound");
    cmd_syn->add_option("--hi", syn_extra.hi, "uniform upper bound");
    cmd_syn->add_option("--mass-fraction", syn_extra.mass_fraction,
                        "share of samples at the mass point");
    cmd_syn->add_option("--mass-value", syn_extra.mass_value, "location of the mass point");

    try {
      std::reverse(args.begin(), args.end());
      app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }

    if (cmd_est->parsed()) return cmd_estimate(est, in, out, err);
    if (cmd_curve->parsed()) return cmd_losscurve(curve, out);
    if (cmd_tr->parsed()) return cmd_trace(trace, in, out, err);
    if (cmd_cert->parsed()) return cmd_certify(cert, in, out, err);
    if (cmd_syn->parsed()) return cmd_synth(syn, syn_extra, out);
    err << "error: no subcommand selected\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pseudomode
