#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "measurelab/bohr_measure.hpp"
#include "measurelab/defaults.hpp"
#include "measurelab/diagnostics.hpp"
#include "measurelab/io.hpp"

namespace mlab::cli {

namespace {

using nlohmann::json;
using io::format_double;

// Thrown for a failed check after the output has been written.
struct CheckFailed {
  std::string what;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void emit(const std::string& out, const std::string& content) {
  if (out == "-") {
    std::cout << content;
    return;
  }
  io::write_atomic(io::resolve_output(out), content);
}

void emit_scan(const std::string& out, const ScanResult& scan, const std::vector<std::string>& comments) {
  if (out == "-") {
    std::cout << io::scan_csv(scan, comments) << '\n' << io::summary_csv(scan, comments);
    return;
  }
  const auto path = io::resolve_output(out);
  io::write_atomic(path, io::scan_csv(scan, comments));
  io::write_atomic(io::summary_path(path), io::summary_csv(scan, comments));
}

void require_dim(int d) {
  if (d < 1 || d > 3) throw Error(Errc::BadDimension, "--d must be 1, 2 or 3");
}

// A threshold scan contradicts the known side when a parameter at least 0.05
// past the threshold gets the opposite verdict, or a Monte-Carlo check misses.
void check_scan(const ScanResult& scan, double threshold, const char* name) {
  for (const auto& s : scan.summary) {
    if (s.param <= threshold - 0.05 && s.verdict == Verdict::Convergent)
      throw CheckFailed{std::string(name) + ": CONVERGENT below the threshold at " + format_double(s.param)};
    if (s.param >= threshold + 0.05 && s.verdict == Verdict::Divergent)
      throw CheckFailed{std::string(name) + ": DIVERGENT above the threshold at " + format_double(s.param)};
  }
  for (const auto& mc : scan.mc)
    if (!mc.within()) throw CheckFailed{std::string(name) + ": Monte-Carlo estimate outside 3 stderr"};
}

std::string config_line(const std::string& key, const std::string& value) { return key + "=" + value; }

struct Common {
  std::uint64_t seed = 1;
  std::string out;
};

// --------------------------------------------------------------------------
// Config file support: {"key": value} pairs become "--key value" for every key
// not already given on the command line.

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw Error(Errc::Parse, "config values must be scalars or arrays of scalars");
}

bool given(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (!config) return args;

  // Innermost subcommand named on the command line.
  CLI::App* target = &app;
  for (const auto& a : args) {
    if (a.empty() || a[0] == '-') continue;
    CLI::App* sub = nullptr;
    try {
      sub = target->get_subcommand(a);
    } catch (const CLI::OptionNotFound&) {
    }
    if (sub == nullptr) break;
    target = sub;
  }
  if (target == &app) throw Error(Errc::Parse, "--config needs a subcommand");

  const json doc = io::read_json(*config);
  if (!doc.is_object()) throw Error(Errc::Parse, "config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    const CLI::Option* opt = target->get_option_no_throw(flag);
    if (opt == nullptr || key == "config")
      throw Error(Errc::Parse, "unknown config key '" + key + "' for '" + target->get_name() + "'");
    if (given(args, flag)) continue;
    if (opt->get_type_size() == 0) {
      if (value.is_boolean() && value.get<bool>()) args.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      if (opt->get_items_expected_max() <= 1 || opt->get_delimiter() == '\0') {
        for (const auto& item : value) {
          args.push_back(flag);
          args.push_back(json_scalar(item));
        }
      } else {
        std::string joined;
        for (std::size_t i = 0; i < value.size(); ++i) joined += (i ? "," : "") + json_scalar(value[i]);
        args.push_back(flag);
        args.push_back(joined);
      }
    } else {
      args.push_back(flag);
      args.push_back(json_scalar(value));
    }
  }
  return args;
}

// --------------------------------------------------------------------------

struct FieldOpts {
  int d = 1;
  double m = 1.0;
  double L = 64.0;
  int N = 8192;
};

void run_kernel(const FieldOpts& o, const Common& c) {
  require_dim(o.d);
  const LatticeSpec spec(o.d, o.N, o.L);
  const CovarianceParams params(o.m);
  const Field kernel = lattice_kernel(params, spec);
  io::CsvWriter csv({"x", "kernel"});
  csv.comment("command=kernel");
  csv.comment(config_line("d", std::to_string(o.d)));
  csv.comment(config_line("m", format_double(o.m)));
  csv.comment(config_line("L", format_double(o.L)));
  csv.comment(config_line("N", std::to_string(o.N)));
  csv.comment(config_line("kernel_at_origin", format_double(kernel_at_origin(params, spec))));
  if (o.d > 1) csv.comment("line through the origin along the first axis");
  std::array<int, LatticeSpec::kMaxDim> idx{};
  for (int i = 0; i < o.d; ++i) idx[i] = o.N / 2;
  for (int j = 0; j < o.N; ++j) {
    idx[0] = j;
    csv.row({spec.coordinate(j), kernel[spec.flatten(std::span<const int>(idx.data(), o.d))]});
  }
  emit(c.out, csv.str());
}

void run_sample(const FieldOpts& o, const Common& c) {
  require_dim(o.d);
  const LatticeSpec spec(o.d, o.N, o.L);
  const Field phi = sample_field(CovarianceParams(o.m), spec, RngState{c.seed, 0});
  std::vector<std::string> columns;
  for (int i = 1; i <= o.d; ++i) columns.push_back("x" + std::to_string(i));
  columns.push_back("phi");
  io::CsvWriter csv(columns);
  csv.comment("command=sample");
  csv.comment(config_line("d", std::to_string(o.d)));
  csv.comment(config_line("m", format_double(o.m)));
  csv.comment(config_line("L", format_double(o.L)));
  csv.comment(config_line("N", std::to_string(o.N)));
  csv.comment(config_line("seed", std::to_string(c.seed)));
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto idx = spec.unflatten(i);
    std::vector<double> row;
    for (int k = 0; k < o.d; ++k) row.push_back(spec.coordinate(idx[k]));
    row.push_back(phi[i]);
    csv.row(row);
  }
  emit(c.out, csv.str());
}

struct ScanOpts {
  int d = 1;
  double m = 1.0;
  double L = defaults::kUvLength;
  double a = 0.0;
  std::optional<double> beta_fixed;
  std::vector<double> params;
  std::vector<int> sizes;
  std::vector<double> lengths;
  std::size_t replicas = 0;
  std::size_t max_sites = std::size_t{1} << 16;
};

McOptions mc_options(const ScanOpts& o, const Common& c) { return {o.replicas, RngState{c.seed, 0}, o.max_sites}; }

std::vector<std::string> echo(const char* command, const ScanOpts& o, const Common& c) {
  return {"command=" + std::string(command), config_line("d", std::to_string(o.d)), config_line("m", format_double(o.m)),
          config_line("replicas", std::to_string(o.replicas)), config_line("seed", std::to_string(c.seed))};
}

void run_uv(ScanOpts o, const Common& c) {
  require_dim(o.d);
  const double threshold = (o.d - 1) / 4.0;
  if (o.params.empty()) o.params = defaults::parameter_grid(threshold);
  if (o.sizes.empty()) o.sizes = defaults::uv_sizes(o.d);
  const auto scan = uv_scan(CovarianceParams(o.m), o.d, o.L, o.params, o.sizes, mc_options(o, c));
  auto comments = echo("uv-scan", o, c);
  comments.push_back(config_line("L", format_double(o.L)));
  comments.push_back(config_line("beta", join(o.params)));
  comments.push_back(config_line("N", join(o.sizes)));
  comments.push_back(config_line("statistic", "L^-d sum_p (m^2+p^2)^(-2 beta) sigma(p)"));
  emit_scan(c.out, scan, comments);
  check_scan(scan, threshold, "uv-scan");
}

void run_ir(ScanOpts o, const Common& c) {
  require_dim(o.d);
  const double threshold = o.d / 4.0;
  if (o.params.empty()) o.params = defaults::parameter_grid(threshold);
  if (o.a <= 0.0) o.a = defaults::ir_spacing(o.d);
  if (o.lengths.empty()) o.lengths = defaults::ir_lengths(o.d);
  const double beta = o.beta_fixed.value_or(defaults::ir_beta(o.d));
  const auto scan = ir_scan(CovarianceParams(o.m), o.d, o.a, o.params, o.lengths, beta, mc_options(o, c));
  auto comments = echo("ir-scan", o, c);
  comments.push_back(config_line("a", format_double(o.a)));
  comments.push_back(config_line("beta", format_double(beta)));
  comments.push_back(config_line("alpha", join(o.params)));
  comments.push_back(config_line("L", join(o.lengths)));
  emit_scan(c.out, scan, comments);
  check_scan(scan, threshold, "ir-scan");
}

void run_hs(ScanOpts o, const Common& c) {
  require_dim(o.d);
  const double threshold = o.d / 4.0;
  if (o.params.empty()) o.params = defaults::parameter_grid(threshold);
  if (o.sizes.empty()) o.sizes = defaults::hs_sizes(o.d);
  if (o.lengths.empty()) o.lengths = defaults::hs_lengths(o.sizes);
  const auto scan = hs_scan(CovarianceParams(o.m), o.d, o.params, o.sizes, o.lengths);
  auto comments = echo("hs-scan", o, c);
  comments.push_back(config_line("alpha", join(o.params)));
  comments.push_back(config_line("N", join(o.sizes)));
  comments.push_back(config_line("L", join(o.lengths)));
  emit_scan(c.out, scan, comments);
  check_scan(scan, threshold, "hs-scan");
}

struct ProbeOpts {
  int d = 1;
  double m = 1.0;
  double L = defaults::kProbeLength;
  std::vector<int> sizes;
  std::vector<double> lo, hi;
  std::size_t replicas = defaults::kProbeReplicas;
  std::size_t max_sites = std::size_t{1} << 16;
};

void run_probe(ProbeOpts o, const Common& c) {
  require_dim(o.d);
  if (o.sizes.empty()) o.sizes = defaults::probe_sizes(o.d);
  if (o.lo.empty()) o.lo.assign(o.d, -1.0);
  if (o.hi.empty()) o.hi.assign(o.d, 1.0);
  const auto probe = signed_measure_probe(CovarianceParams(o.m), o.d, o.L, o.sizes, Region{o.lo, o.hi},
                                          McOptions{o.replicas, RngState{c.seed, 0}, o.max_sites});
  std::vector<std::string> comments = {"command=singular-probe",
                                       config_line("d", std::to_string(o.d)),
                                       config_line("m", format_double(o.m)),
                                       config_line("L", format_double(o.L)),
                                       config_line("N", join(o.sizes)),
                                       config_line("lo", join(o.lo)),
                                       config_line("hi", join(o.hi)),
                                       config_line("replicas", std::to_string(o.replicas)),
                                       config_line("seed", std::to_string(c.seed)),
                                       config_line("statistic", "E[a^d sum_{x in U} |phi(x)|]"),
                                       config_line("strictly_increasing", probe.strictly_increasing ? "1" : "0"),
                                       config_line("total_increase", format_double(probe.total_increase)),
                                       config_line("max_mc_stderr", format_double(probe.max_mc_stderr)),
                                       config_line("verdict", std::string(to_string(probe.verdict)))};
  emit_scan(c.out, probe.scan, comments);
  if (probe.verdict != Verdict::Divergent) throw CheckFailed{"singular-probe: verdict is not DIVERGENT"};
  for (const auto& mc : probe.scan.mc)
    if (!mc.within()) throw CheckFailed{"singular-probe: Monte-Carlo estimate outside 3 stderr"};
}

// --------------------------------------------------------------------------
// bohr

struct IndependenceOpts {
  std::string input;
  std::vector<std::string> basis;
  std::vector<std::string> vectors;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void run_independence(const IndependenceOpts& o, const Common& c) {
  BasisPtr basis;
  std::vector<FrequencyVector> vectors;
  if (!o.input.empty()) {
    const json doc = io::read_json(o.input);
    for (const auto& [key, value] : doc.items())
      if (key != "basis" && key != "vectors") throw Error(Errc::Parse, "unknown key '" + key + "'");
    basis = io::parse_basis(doc);
    vectors = io::parse_vectors(basis, doc.at("vectors"));
  } else {
    if (o.basis.empty()) throw Error(Errc::Parse, "give --input or --basis with --vector");
    basis = SymbolBasis::make(o.basis);
    for (const auto& v : o.vectors) vectors.push_back(FrequencyVector::parse(basis, split(v, ',')));
  }
  json report;
  report["basis"] = basis->names();
  report["vectors"] = json::array();
  for (const auto& v : vectors) report["vectors"].push_back(io::to_json(v));
  report["count"] = vectors.size();
  report["rank"] = rank_over_Q(vectors);
  report["witness_bound"] = kWitnessBound;
  try {
    IndependentSet::make(vectors);
    report["independent"] = true;
    report["witness"] = nullptr;
  } catch (const DependentSetError& e) {
    report["independent"] = false;
    report["witness"] = e.witness() ? json(*e.witness()) : json(nullptr);
  } catch (const Error& e) {
    if (e.code() != Errc::EmptySet) throw;
    report["independent"] = false;
    report["witness"] = nullptr;
    report["error"] = std::string(to_string(e.code()));
  }
  emit(c.out, report.dump(2) + "\n");
}

struct PushforwardOpts {
  std::string input;
  std::size_t samples = 10000;
};

json estimate_json(const ComplexEstimate& e) {
  return {{"mean", io::format_complex(e.mean)}, {"stderr", format_double(e.std_error)}};
}

void run_pushforward(const PushforwardOpts& o, const Common& c) {
  std::optional<IndependentSet> gamma, gamma_prime;
  std::optional<CylFunction> f;
  if (!o.input.empty()) {
    const json doc = io::read_json(o.input);
    json coarse = doc;
    coarse.erase("gamma_prime");
    f = io::parse_cyl_function(coarse);
    gamma = f->gamma();
    gamma_prime = IndependentSet::make(io::parse_vectors(gamma->basis(), doc.at("gamma_prime")));
  } else {
    // {u1+u2, u1-u2} inside {u1, u2} with a fixed 4-term polynomial.
    const auto basis = SymbolBasis::make({"u1", "u2"});
    const auto u1 = FrequencyVector::unit(basis, 0), u2 = FrequencyVector::unit(basis, 1);
    gamma = IndependentSet::make({u1 + u2, u1 - u2});
    gamma_prime = IndependentSet::make({u1, u2});
    f = CylFunction(*gamma, {{{0, 0}, Complex(1.5, 0)}, {{1, 0}, Complex(2, -1)}, {{-1, 2}, Complex(0, 3)},
                             {{2, 1}, Complex(-1, 0.5)}});
  }
  const auto report = pushforward_check(*gamma, *gamma_prime, *f, o.samples, RngState{c.seed, 0});
  json doc;
  doc["command"] = "bohr pushforward";
  doc["seed"] = c.seed;
  doc["samples"] = o.samples;
  doc["function"] = io::to_json(*f);
  doc["gamma_prime"] = json::array();
  for (const auto& g : gamma_prime->generators()) doc["gamma_prime"].push_back(io::to_json(g));
  doc["refinement_matrix"] = refinement_matrix(*gamma, *gamma_prime);
  doc["transported"] = io::to_json(transport(*f, *gamma_prime));
  doc["exact_direct"] = io::format_complex(report.exact_direct);
  doc["exact_transported"] = io::format_complex(report.exact_transported);
  doc["mc_direct"] = estimate_json(report.mc_direct);
  doc["mc_transported"] = estimate_json(report.mc_transported);
  doc["exact_agree"] = report.exact_agree;
  doc["mc_agree"] = report.mc_agree;
  doc["passed"] = report.passed();
  emit(c.out, doc.dump(2) + "\n");
  if (!report.passed()) throw CheckFailed{"bohr pushforward: the two integrals disagree"};
}

struct ZnOpts {
  std::string r;
  std::vector<std::string> arcs;
  std::size_t n_max = 44;
  std::size_t samples = 100000;
};

void run_zn(const ZnOpts& o, const Common& c) {
  std::optional<ArcSet> arc;
  if (!o.r.empty() && !o.arcs.empty()) throw Error(Errc::Parse, "give either --r or --arc");
  if (!o.arcs.empty()) {
    std::vector<std::pair<mpq_class, mpq_class>> parts;
    for (const auto& a : o.arcs) {
      const auto ends = split(a, ':');
      if (ends.size() != 2) throw Error(Errc::Parse, "--arc takes lo:hi in turns, got '" + a + "'");
      parts.emplace_back(parse_rational(ends[0]), parse_rational(ends[1]));
    }
    arc = ArcSet(std::move(parts));
  } else {
    arc = ArcSet::prefix(parse_rational(o.r.empty() ? "1/2" : o.r));
  }
  std::vector<std::size_t> sizes;
  for (std::size_t n = 0; n <= o.n_max; ++n) sizes.push_back(n);
  const auto rows = zn_probability(*arc, sizes, o.samples, RngState{c.seed, 0});
  io::CsvWriter csv({"n", "exact", "exact_value", "frequency", "sigma", "within_3sigma"});
  csv.comment("command=bohr zn-probe");
  std::string arcs;
  for (const auto& [lo, hi] : arc->arcs()) arcs += (arcs.empty() ? "" : " ") + format_rational(lo) + ":" + format_rational(hi);
  csv.comment(config_line("arcs_turns", arcs));
  csv.comment(config_line("r", format_rational(arc->measure())));
  csv.comment(config_line("n_max", std::to_string(o.n_max)));
  csv.comment(config_line("samples", std::to_string(o.samples)));
  csv.comment(config_line("seed", std::to_string(c.seed)));
  csv.comment("r^N -> 0 as N grows");
  bool all_within = true;
  for (const auto& row : rows) {
    csv.row({std::to_string(row.n), format_rational(row.exact), format_double(row.exact_value),
             format_double(row.frequency), format_double(row.sigma), row.within ? "1" : "0"});
    all_within = all_within && row.within;
  }
  emit(c.out, csv.str());
  if (!all_within) throw CheckFailed{"bohr zn-probe: a frequency is outside 3 binomial sigma"};
}

struct ErgodicOpts {
  std::size_t trials = 1000;
  std::string input;
  std::string lambda;
};

void run_ergodic(const ErgodicOpts& o, const Common& c) {
  json doc;
  doc["command"] = "bohr ergodic-check";
  if (!o.input.empty()) {
    if (o.lambda.empty()) throw Error(Errc::Parse, "--input needs --lambda");
    const auto psi = io::parse_trig_poly(io::read_json(o.input));
    const auto lambda = parse_rational(o.lambda);
    doc["psi"] = io::to_json(psi);
    doc["lambda"] = format_rational(lambda);
    doc["image"] = io::to_json(act_scale(psi, lambda));
    doc["integral"] = io::format_complex(integrate_exact(psi));
    doc["integral_of_image"] = io::format_complex(integrate_exact(act_scale(psi, lambda)));
    doc["constant"] = psi.is_constant();
    doc["invariant"] = is_invariant(psi, lambda);
    emit(c.out, doc.dump(2) + "\n");
    return;
  }
  const auto report = ergodicity_suite(o.trials, RngState{c.seed, 0});
  doc["seed"] = c.seed;
  doc["trials"] = report.trials;
  doc["invariant_nonconstant"] = report.invariant_nonconstant;
  doc["constant_trials"] = report.constant_trials;
  doc["constant_invariant"] = report.constant_invariant;
  doc["reflection_trials"] = report.reflection_trials;
  doc["reflection_invariant"] = report.reflection_invariant;
  doc["note"] = "lambda = -1 fixes F_k + F_-k; those trials are reported, not counted as failures";
  doc["passed"] = report.passed();
  emit(c.out, doc.dump(2) + "\n");
  if (!report.passed()) throw CheckFailed{"bohr ergodic-check: a nonconstant invariant was found"};
}

struct SuiteOpts {
  std::vector<int> only;
};

void run_suite(const SuiteOpts& o, const Common& c) {
  acceptance::Options opt;
  opt.seed = c.seed;
  opt.on_result = [](const acceptance::Outcome& r) {
    std::cout << acceptance::summary_line(r) << '\n';
    for (const auto& d : r.details) std::cout << "    " << d << '\n';
    std::cout.flush();
  };
  using Check = acceptance::Outcome (*)(const acceptance::Options&);
  const Check checks[] = {acceptance::kernel_identity, acceptance::kernel_noncontinuity, acceptance::uv_threshold,
                          acceptance::ir_threshold,    acceptance::hilbert_schmidt,      acceptance::mass_insensitivity,
                          acceptance::signed_measure,  acceptance::zn_law,               acceptance::projective_haar,
                          acceptance::action_ergodicity, acceptance::exact_algebra};
  for (int id : o.only)
    if (id < 1 || id > 11) throw Error(Errc::Parse, "--only takes criterion numbers 1..11");
  std::vector<acceptance::Outcome> results;
  for (int id = 1; id <= 11; ++id) {
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), id) == o.only.end()) continue;
    results.push_back(checks[id - 1](opt));
    opt.on_result(results.back());
  }
  io::CsvWriter csv({"criterion", "title", "passed", "seconds", "budget_seconds"});
  csv.comment("command=suite");
  csv.comment(config_line("seed", std::to_string(c.seed)));
  bool all = true;
  for (const auto& r : results) {
    for (const auto& d : r.details) csv.comment(std::to_string(r.id) + ": " + d);
    all = all && r.passed;
  }
  for (const auto& r : results)
    csv.row({std::to_string(r.id), "\"" + r.title + "\"", r.passed ? "1" : "0", format_double(r.seconds),
             format_double(r.budget)});
  if (!c.out.empty()) emit(c.out, csv.str());
  std::cout << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
  if (!all) throw CheckFailed{"suite: acceptance failure"};
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Lattice free-field support diagnostics and Bohr-compactification measure checks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  Common common;
  auto add_common = [&](CLI::App* sub, const std::string& default_out) {
    common.out = "";
    sub->add_option("--seed", common.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", common.out, "Output file ('-' for stdout; relative paths go under $" +
                                             std::string(io::kOutDirEnv) + ")")
        ->default_str(default_out);
    sub->add_option("--config", "JSON file of {\"flag\": value}; command-line flags take precedence");
  };

  FieldOpts field;
  auto* kernel = app.add_subcommand("kernel", "Lattice covariance kernel C(x) along a line through the origin");
  auto* sample = app.add_subcommand("sample", "One free-field sample on the lattice");
  for (auto* sub : {kernel, sample}) {
    sub->add_option("--d", field.d, "Dimension 1..3")->capture_default_str();
    sub->add_option("--m", field.m, "Mass")->capture_default_str();
    sub->add_option("--L", field.L, "Box length")->capture_default_str();
    sub->add_option("--N", field.N, "Sites per axis (even)")->capture_default_str();
  }
  add_common(kernel, "kernel.csv");
  add_common(sample, "sample.csv");

  ScanOpts scan;
  auto* uv = app.add_subcommand("uv-scan", "Refinement scan of the beta threshold at fixed L");
  uv->add_option("--d", scan.d)->capture_default_str();
  uv->add_option("--m", scan.m)->capture_default_str();
  uv->add_option("--L", scan.L, "Box length")->capture_default_str();
  uv->add_option("--beta", scan.params, "beta values (default: (d-1)/4 +- 0.3)")->delimiter(',');
  uv->add_option("--N", scan.sizes, "Sites per axis, increasing")->delimiter(',');
  uv->add_option("--replicas", scan.replicas, "Monte-Carlo confirmation replicas (0 = off)")->capture_default_str();
  uv->add_option("--max-sites", scan.max_sites, "Skip Monte Carlo above this many sites")->capture_default_str();
  add_common(uv, "uv-scan.csv");

  auto* ir = app.add_subcommand("ir-scan", "Volume scan of the alpha threshold at fixed spacing");
  ir->add_option("--d", scan.d)->capture_default_str();
  ir->add_option("--m", scan.m)->capture_default_str();
  ir->add_option("--a", scan.a, "Lattice spacing (default per d)");
  ir->add_option("--alpha", scan.params, "alpha values (default: d/4 +- 0.3)")->delimiter(',');
  ir->add_option("--L", scan.lengths, "Box lengths, increasing, L/a even")->delimiter(',');
  ir->add_option("--beta", scan.beta_fixed, "Fixed beta above (d-1)/4 (default (d-1)/4 + 1/2)");
  ir->add_option("--replicas", scan.replicas)->capture_default_str();
  ir->add_option("--max-sites", scan.max_sites)->capture_default_str();
  add_common(ir, "ir-scan.csv");

  auto* hs = app.add_subcommand("hs-scan", "Hilbert-Schmidt norm across paired (N, L) grids");
  hs->add_option("--d", scan.d)->capture_default_str();
  hs->add_option("--m", scan.m)->capture_default_str();
  hs->add_option("--alpha", scan.params, "alpha values (default: d/4 +- 0.3)")->delimiter(',');
  hs->add_option("--N", scan.sizes, "Sites per axis, increasing")->delimiter(',');
  hs->add_option("--L", scan.lengths, "Box lengths paired with --N (default L = N)")->delimiter(',');
  add_common(hs, "hs-scan.csv");

  ProbeOpts probe;
  auto* sp = app.add_subcommand("singular-probe", "Local L1 mass of the field on a box U under refinement");
  sp->add_option("--d", probe.d)->capture_default_str();
  sp->add_option("--m", probe.m)->capture_default_str();
  sp->add_option("--L", probe.L)->capture_default_str();
  sp->add_option("--N", probe.sizes, "Sites per axis, increasing")->delimiter(',');
  sp->add_option("--lo", probe.lo, "Lower corner of U (default -1)")->delimiter(',');
  sp->add_option("--hi", probe.hi, "Upper corner of U (default 1)")->delimiter(',');
  sp->add_option("--replicas", probe.replicas)->capture_default_str();
  sp->add_option("--max-sites", probe.max_sites)->capture_default_str();
  add_common(sp, "singular-probe.csv");

  auto* bohr = app.add_subcommand("bohr", "Exact frequency algebra and Haar measure checks");
  bohr->require_subcommand(1);

  IndependenceOpts indep;
  auto* bi = bohr->add_subcommand("independence", "Rank over Q and an integer-relation witness");
  bi->add_option("--input", indep.input, "JSON {basis, vectors}");
  bi->add_option("--basis", indep.basis, "Symbol names")->delimiter(',');
  bi->add_option("--vector", indep.vectors, "Coordinates p/q,p/q,... (repeatable)");
  add_common(bi, "independence.json");

  PushforwardOpts push;
  auto* bp = bohr->add_subcommand("pushforward", "Integrate a cylindrical function on gamma and via gamma'");
  bp->add_option("--input", push.input, "JSON {basis, gamma, gamma_prime, terms}");
  bp->add_option("--samples", push.samples)->capture_default_str();
  add_common(bp, "pushforward.json");

  ZnOpts zn;
  auto* bz = bohr->add_subcommand("zn-probe", "Haar measure of Z_N against (mu_H(U))^N");
  bz->add_option("--r", zn.r, "U = [0, r) in turns, r = p/q (default 1/2)");
  bz->add_option("--arc", zn.arcs, "Arc lo:hi in turns (repeatable)");
  bz->add_option("--n-max", zn.n_max)->capture_default_str();
  bz->add_option("--samples", zn.samples)->capture_default_str();
  add_common(bz, "zn-probe.csv");

  ErgodicOpts erg;
  auto* be = bohr->add_subcommand("ergodic-check", "Invariance of trigonometric polynomials under k -> lambda k");
  be->add_option("--trials", erg.trials)->capture_default_str();
  be->add_option("--input", erg.input, "JSON {basis, terms}: check one polynomial");
  be->add_option("--lambda", erg.lambda, "p/q, with --input");
  add_common(be, "ergodic-check.json");

  SuiteOpts suite;
  auto* su = app.add_subcommand("suite", "Run every acceptance criterion");
  su->add_option("--only", suite.only, "Criterion numbers")->delimiter(',');
  add_common(su, "");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(app, args);
    std::vector<const char*> merged{argv[0]};
    for (const auto& a : args) merged.push_back(a.c_str());
    app.parse(static_cast<int>(merged.size()), merged.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }

  auto pick_out = [&](CLI::App* sub) {
    if (common.out.empty()) common.out = sub->get_option("--out")->get_default_str();
  };

  try {
    if (kernel->parsed()) pick_out(kernel), run_kernel(field, common);
    else if (sample->parsed()) pick_out(sample), run_sample(field, common);
    else if (uv->parsed()) pick_out(uv), run_uv(scan, common);
    else if (ir->parsed()) pick_out(ir), run_ir(scan, common);
    else if (hs->parsed()) pick_out(hs), run_hs(scan, common);
    else if (sp->parsed()) pick_out(sp), run_probe(probe, common);
    else if (bi->parsed()) pick_out(bi), run_independence(indep, common);
    else if (bp->parsed()) pick_out(bp), run_pushforward(push, common);
    else if (bz->parsed()) pick_out(bz), run_zn(zn, common);
    else if (be->parsed()) pick_out(be), run_ergodic(erg, common);
    else if (su->parsed()) {
      if (su->get_option("--seed")->count() == 0) common.seed = acceptance::Options{}.seed;
      run_suite(suite, common);
    }
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what << '\n';
    return kCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const json::exception& e) {
    std::cerr << "error: PARSE_ERROR: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}

}  // namespace mlab::cli
