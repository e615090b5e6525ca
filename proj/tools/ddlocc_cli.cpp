// ddlocc: command-line front end.
//
// JSON goes to --output when given, otherwise to stdout; the key: value summary goes to stdout
// when JSON is written to a file and to stderr otherwise.
//
// Exit codes: 0 success, 1 verification failure, 2 malformed input, 3 unconverged solve.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ddlocc/ddlocc.hpp"

namespace {

using ddlocc::io::json;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitUnconverged = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string output;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int starts = 50;
  long shots = 0;
  bool real = false;
  int threads = 0;

  ddlocc::SolverOptions solver() const {
    ddlocc::SolverOptions o;
    o.seed = seed;
    o.tol_residual = tol;
    o.max_starts = starts;
    o.real_mode = real;
    return o;
  }

  int thread_cap() const {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("DDLOCC_THREADS")) {
      try {
        const int n = std::stoi(env);
        if (n > 0) return n;
      } catch (const std::exception&) {
      }
    }
    return 1;
  }
};

json read_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw InputError("--input is required");
  std::ifstream in(cfg.input);
  if (!in) throw InputError("cannot open " + cfg.input);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

/// Parses with `f`, mapping shape and type problems to InputError.
template <class F>
auto parse(F&& f) {
  try {
    return f();
  } catch (const ddlocc::StructuralError& e) {
    throw InputError(e.what());
  } catch (const ddlocc::PreconditionError& e) {
    throw InputError(e.what());
  } catch (const json::exception& e) {
    throw InputError(e.what());
  }
}

class Output {
 public:
  explicit Output(const RunConfig& cfg) : cfg_(cfg) {}

  std::ostream& summary() { return cfg_.output.empty() ? std::cerr : std::cout; }

  void kv(const std::string& key, const std::string& value) { summary() << key << ": " << value << '\n'; }
  void kv(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(12);
    os << value;
    kv(key, os.str());
  }
  void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
  void kv(const std::string& key, bool value) { kv(key, std::string(value ? "true" : "false")); }

  void write(const std::string& text) {
    if (cfg_.output.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(cfg_.output);
    if (!out) throw std::runtime_error("cannot write " + cfg_.output);
    out << text;
  }

  void write(const json& j) { write(j.dump(2) + "\n"); }

 private:
  const RunConfig& cfg_;
};

int cmd_solve(const RunConfig& cfg) {
  const json j = read_input(cfg);
  Output out(cfg);
  ddlocc::DDCertificate cert;
  if (cfg.real) {
    const auto m = parse([&] { return ddlocc::io::real_operator_from_json(j); });
    cert = ddlocc::solve_dd_real(m, cfg.solver());
  } else {
    const auto m = parse([&] { return ddlocc::io::bipartite_from_json(j); });
    cert = ddlocc::solve_dd(m, cfg.solver());
  }
  out.write(ddlocc::io::to_json(cert));
  out.kv("residual", cert.residual);
  out.kv("converged", cert.converged);
  out.kv("starts_used", cert.starts_used);
  return cert.converged ? 0 : kExitUnconverged;
}

int cmd_protocol(const RunConfig& cfg) {
  const json j = read_input(cfg);
  const auto s = parse([&] { return ddlocc::io::subspace_from_json(j); });
  Output out(cfg);
  const auto p = ddlocc::build_protocol(s, cfg.solver());
  out.write(ddlocc::io::to_json(p));
  out.kv("residual", p.residual);
  out.kv("converged", p.converged);
  for (const auto& w : p.warnings) out.kv("warning", w);
  return p.converged ? 0 : kExitUnconverged;
}

int cmd_simulate(const RunConfig& cfg, int codeword) {
  const json j = read_input(cfg);
  const auto p = parse([&] { return ddlocc::io::protocol_from_json(j); });
  Output out(cfg);
  const auto mode = cfg.shots > 0 ? ddlocc::SimulationMode::sampled(cfg.shots, cfg.seed)
                                  : ddlocc::SimulationMode::exact_mode();
  json results = json::array();
  double worst = 1.0;
  for (int c = 0; c < p.codeword_count(); ++c) {
    if (codeword >= 0 && c != codeword) continue;
    const double succ = ddlocc::simulate(p, c, mode);
    worst = std::min(worst, succ);
    results.push_back({{"codeword", c}, {"success", succ}});
    out.kv("success_" + std::to_string(c), succ);
  }
  if (results.empty()) throw InputError("codeword index out of range");
  out.write(json{{"mode", cfg.shots > 0 ? "shots" : "exact"}, {"shots", cfg.shots}, {"results", results}});
  out.kv("min_success", worst);
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& only, bool timings) {
  Output out(cfg);
  ddlocc::SuiteOptions o;
  o.seed = cfg.seed;
  o.threads = cfg.thread_cap();
  std::vector<ddlocc::VerificationReport> reports;
  if (only.empty()) {
    reports = ddlocc::run_verification_suite(o);
  } else if (only == "g_identity") {
    reports.push_back(ddlocc::verify_g_identity());
  } else if (only == "jacobian_rank_complex") {
    reports.push_back(ddlocc::verify_jacobian_rank_complex(o.step));
  } else if (only == "jacobian_real") {
    reports.push_back(ddlocc::verify_jacobian_real(o.step));
  } else if (only == "appendix_b") {
    reports.push_back(ddlocc::verify_appendix_b(o.samples, o.seed));
  } else if (only == "appendix_c") {
    reports.push_back(ddlocc::verify_appendix_c(o.samples, o.seed));
  } else if (only == "uniqueness_h0") {
    reports.push_back(ddlocc::verify_uniqueness_h0(o.uniqueness_solves, o.seed));
  } else if (only == "dimensions") {
    reports.push_back(ddlocc::verify_dimensions());
  } else {
    throw InputError("unknown check " + only);
  }
  std::string lines;
  bool all = true;
  for (const auto& r : reports) {
    lines += r.to_json(timings).dump() + "\n";
    out.kv(r.check, std::string(r.pass ? "pass" : "FAIL"));
    if (timings) out.kv(r.check + "_seconds", r.runtime_seconds);
    all = all && r.pass;
  }
  out.write(lines);
  return all ? 0 : kExitVerifyFailed;
}

int cmd_capacity(const RunConfig& cfg, const std::string& mode) {
  const json j = read_input(cfg);
  const auto iso = parse([&] { return ddlocc::io::isometry_from_json(j); });
  std::vector<ddlocc::CVector> inputs;
  if (j.contains("inputs")) {
    inputs = parse([&] {
      std::vector<ddlocc::CVector> v;
      for (const auto& x : j["inputs"]) v.push_back(ddlocc::io::cvector_from_json(x));
      return v;
    });
  }
  Output out(cfg);
  ddlocc::CapacityProtocol c;
  if (mode == "assisted") {
    c = ddlocc::environment_assisted_protocol(iso, inputs, cfg.solver());
  } else {
    c = ddlocc::environment_assisting_protocol(iso, cfg.solver());
  }
  out.write(ddlocc::io::to_json(c));
  out.kv("mode", mode);
  out.kv("capacity_bits", c.capacity_bits);
  out.kv("min_success", c.min_success);
  out.kv("residual", c.protocol.residual);
  out.kv("converged", c.converged);
  return c.converged ? 0 : kExitUnconverged;
}

int cmd_qc_convert(const RunConfig& cfg) {
  const json j = read_input(cfg);
  const auto alpha = parse([&] { return ddlocc::io::bipartite_from_json(j); });
  Output out(cfg);
  const auto r = parse([&] { return ddlocc::qc_convert(alpha, cfg.tol, cfg.solver()); });
  out.write(ddlocc::io::to_json(r));
  out.kv("classical_a", r.classical_a);
  out.kv("generalized_classical_b", r.generalized_classical_b);
  out.kv("fully_classical", r.fully_classical);
  out.kv("support_restricted", r.support_restricted);
  out.kv("residual", r.residual);
  return r.certificate.converged ? 0 : kExitUnconverged;
}

/// Input {"dimA", "vector"} gives the entropy of one state; {"dimA", "basis"} also gives the
/// minimum over the span. Without input, the built-in unique basis is used.
int cmd_entanglement(const RunConfig& cfg, int samples) {
  Output out(cfg);
  int dim_a = 3;
  std::vector<ddlocc::CVector> basis;
  if (cfg.input.empty()) {
    basis = ddlocc::constants::unique_basis();
  } else {
    const json j = read_input(cfg);
    parse([&] {
      dim_a = ddlocc::io::require_int(j, "dimA");
      if (j.contains("vector")) {
        basis.push_back(ddlocc::io::cvector_from_json(j["vector"]));
      } else {
        for (const auto& v : ddlocc::io::require(j, "basis")) basis.push_back(ddlocc::io::cvector_from_json(v));
      }
      return 0;
    });
  }
  json res = json::object();
  json per = json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double s = parse([&] { return ddlocc::entanglement_entropy(basis[i], dim_a); });
    per.push_back(s);
    out.kv("entropy_" + std::to_string(i), s);
  }
  res["entropies"] = per;
  if (basis.size() > 1) {
    const auto span = parse([&] { return ddlocc::span_min_entanglement(basis, dim_a, samples, 10, cfg.seed); });
    res["spanMinimum"] = span.value;
    res["spanBestSample"] = span.best_sample;
    res["minimizer"] = ddlocc::io::to_json(span.coefficients);
    out.kv("span_minimum", span.value);
  }
  out.write(res);
  return 0;
}

int cmd_counterexample(const RunConfig& cfg) {
  Output out(cfg);
  const auto r = ddlocc::four_dim_counterexample(cfg.seed, cfg.starts);
  out.write(ddlocc::io::to_json(r));
  out.kv("dim_domain", r.dim_domain);
  out.kv("dim_target", r.dim_target);
  out.kv("epsilon", r.epsilon);
  out.kv("orthonormal", r.orthonormal);
  out.kv("gram_deviation", r.gram_deviation);
  out.kv("residual_floor", r.residual_floor);
  out.kv("label", r.label);
  return 0;
}

int cmd_dims(const RunConfig& cfg) {
  Output out(cfg);
  const auto c33 = ddlocc::complex_dimensions(3, 3), c34 = ddlocc::complex_dimensions(3, 4);
  const auto r33 = ddlocc::real_dimensions(3, 3);
  const int domain33 = 2 * ddlocc::su_dimension(3) + c33.d00;
  const int domain34 = ddlocc::su_dimension(3) + ddlocc::su_dimension(4) + c34.d00;
  out.write(json{{"complex3x3", {{"M0", c33.m0}, {"M00", c33.m00}, {"D00", c33.d00}, {"domain", domain33}}},
                 {"real3x3", {{"M2", r33.m2}, {"D2", r33.d2}}},
                 {"complex3x4", {{"M00", c34.m00}, {"D00", c34.d00}, {"domain", domain34}}}});
  out.kv("complex_3x3", std::to_string(c33.m00) + "/" + std::to_string(c33.d00) + "/" + std::to_string(domain33));
  out.kv("real_3x3", std::to_string(r33.m2) + "/" + std::to_string(r33.d2));
  out.kv("complex_3x4", std::to_string(domain34) + "/" + std::to_string(c34.m00));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dd-matrix solver, one-way LOCC protocols and certificate checks"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--input", cfg.input, "input JSON file");
  app.add_option("--output", cfg.output, "output JSON file (default stdout)");
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--tol", cfg.tol, "residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--starts", cfg.starts, "maximum solver starts")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--shots", cfg.shots, "shots for sampled simulation (0 = exact)")->check(CLI::NonNegativeNumber);
  app.add_flag("--real", cfg.real, "real (orthogonal) mode");
  app.add_option("--threads", cfg.threads, "worker cap (fallback DDLOCC_THREADS)")->check(CLI::NonNegativeNumber);

  auto* solve = app.add_subcommand("solve", "bring an operator to dd-form");
  auto* protocol = app.add_subcommand("protocol", "build a one-way LOCC protocol for a subspace");
  auto* simulate = app.add_subcommand("simulate", "simulate a protocol");
  int codeword = -1;
  simulate->add_option("--codeword", codeword, "codeword index (default all)");
  auto* verify = app.add_subcommand("verify", "run the certificate checks");
  bool all = false, timings = false;
  std::string only;
  verify->add_flag("--all", all, "run every check (default)");
  verify->add_option("--check", only, "run one check");
  verify->add_flag("--timings", timings, "include runtimes");
  auto* capacity = app.add_subcommand("capacity", "capacity protocol for a Stinespring isometry");
  std::string mode = "assisted";
  capacity->add_option("--mode", mode, "assisted | assisting")
      ->check(CLI::IsMember({"assisted", "assisting"}))
      ->capture_default_str();
  auto* qc = app.add_subcommand("qc-convert", "quantum-classical conversion of a two-qutrit state");
  auto* ent = app.add_subcommand("entanglement", "entanglement of states and of their span");
  int samples = 10000;
  ent->add_option("--samples", samples, "span samples")->capture_default_str()->check(CLI::PositiveNumber);
  auto* counter = app.add_subcommand("counterexample", "four-dimensional construction and solver floor");
  auto* dims = app.add_subcommand("dims", "dimension counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(cfg);
    if (*protocol) return cmd_protocol(cfg);
    if (*simulate) return cmd_simulate(cfg, codeword);
    if (*verify) return cmd_verify(cfg, all ? std::string() : only, timings);
    if (*capacity) return cmd_capacity(cfg, mode);
    if (*qc) return cmd_qc_convert(cfg);
    if (*ent) return cmd_entanglement(cfg, samples);
    if (*counter) return cmd_counterexample(cfg);
    if (*dims) return cmd_dims(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ddlocc::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return 0;
}
