#include "npcmaj_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "npcmaj/error.hpp"
#include "npcmaj/geometry.hpp"
#include "npcmaj/inequalities.hpp"
#include "npcmaj/json_io.hpp"
#include "npcmaj/stochastic.hpp"
#include "npcmaj/version.hpp"
#include "npcmaj/wasserstein.hpp"

namespace npcmaj::cli {
namespace {

struct Flags {
  std::string instance_path;
  std::string space;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::optional<double> tol;
  std::string format = "json";
  std::string out_path;
  bool ignore_zero_weight_rows = false;
  std::vector<std::string> suites;
  std::size_t threads = 1;
  std::size_t anchors = 10;
  bool inject_concave = false;
  std::string op = "distance";
};

// Fields an instance file may carry; anything else is rejected.
const char* const kInstanceFields[] = {"space", "atoms", "weights", "x_atoms", "lambda", "y_atoms",
                                       "mu",    "A",     "tol",     "functionals"};

struct Instance {
  std::string bytes;
  Json json;
  std::optional<Space> space;

  bool has(const char* key) const { return json.contains(key); }

  const Space& require_space() const {
    if (!space) fail(ErrorCode::ParseError, "instance needs a \"space\" (or pass --space)");
    return *space;
  }

  std::vector<Point> points(const char* key) const {
    if (!has(key)) fail(ErrorCode::ParseError, std::string("instance needs \"") + key + "\"");
    const Json& arr = json[key];
    if (!arr.is_array()) fail(ErrorCode::ParseError, std::string(key) + ": expected an array of points");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Point p = point_from_json(require_space(), arr[i]);
      const Validation v = validate_point(require_space(), p);
      if (!v.ok) fail(ErrorCode::InvalidPoint, std::string(key) + "[" + std::to_string(i) + "]: " + v.diagnostic);
      pts.push_back(std::move(p));
    }
    return pts;
  }

  std::vector<double> weights(const char* key, std::size_t n) const {
    if (!has(key)) return std::vector<double>(n, 1.0 / static_cast<double>(n));
    auto w = vector_from_json(json[key], key);
    if (w.size() != n) {
      fail(ErrorCode::LengthMismatch, std::string(key) + " has " + std::to_string(w.size()) + " entries, expected " +
                                          std::to_string(n));
    }
    return w;
  }

  Matrix matrix(const char* key) const {
    if (!has(key)) fail(ErrorCode::ParseError, std::string("instance needs \"") + key + "\"");
    return matrix_from_json(json[key], key);
  }
};

std::string read_all(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read instance file '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Instance load_instance(const Flags& flags) {
  Instance inst;
  if (flags.instance_path.empty()) fail(ErrorCode::ParseError, "an instance file is required");
  inst.bytes = read_all(flags.instance_path);
  inst.json = parse_json_text(inst.bytes);
  if (!inst.json.is_object()) fail(ErrorCode::ParseError, "instance must be a JSON object");
  for (auto it = inst.json.begin(); it != inst.json.end(); ++it) {
    bool known = false;
    for (const char* k : kInstanceFields) known = known || it.key() == k;
    if (!known) fail(ErrorCode::ParseError, "unknown instance field '" + it.key() + "'");
  }
  if (!flags.space.empty()) {
    inst.space = Space::parse(flags.space);
  } else if (inst.has("space")) {
    inst.space = space_from_json(inst.json["space"]);
  }
  return inst;
}

double effective_tol(const Flags& flags, const Instance* inst, double fallback) {
  if (flags.tol) return *flags.tol;
  if (inst && inst->has("tol")) {
    if (!inst->json["tol"].is_number()) fail(ErrorCode::ParseError, "tol: expected a number");
    return inst->json["tol"].get<double>();
  }
  return fallback;
}

struct CommandResult {
  int exit_code = kHolds;
  Json results;
  std::string csv;  ///< command-specific CSV body; generic key,value rows when empty
};

CommandResult cmd_barycenter(const Flags& flags, const Instance& inst) {
  const Space& space = inst.require_space();
  DiscreteMeasure m;
  m.atoms = inst.points("atoms");
  m.weights = inst.weights("weights", m.atoms.size());
  BarycenterOptions opts;
  opts.tol = effective_tol(flags, &inst, opts.tol);
  const BarycenterResult r = barycenter(space, m, opts);
  return {r.converged ? kHolds : kNotConverged, {{"barycenter", to_json(r)}}, {}};
}

VerifyOptions verify_options(const Flags& flags, const Instance& inst) {
  VerifyOptions v;
  v.tol = effective_tol(flags, &inst, v.tol);
  v.ignore_zero_weight_rows = flags.ignore_zero_weight_rows;
  return v;
}

int certificate_exit(const MajorizationCertificate& c) {
  if (c.valid) return kHolds;
  return c.unconverged_rows.empty() ? kViolated : kNotConverged;
}

// Ids listed under "functionals", resolved against `registry`; every registry
// entry when the field is absent and `default_all` is set.
std::vector<ConvexFunctional> selected_functionals(const Instance& inst, const std::vector<ConvexFunctional>& registry,
                                                   bool default_all) {
  if (!inst.has("functionals")) return default_all ? registry : std::vector<ConvexFunctional>{};
  const Json& ids = inst.json["functionals"];
  if (!ids.is_array()) fail(ErrorCode::ParseError, "functionals: expected an array of registry ids");
  std::vector<ConvexFunctional> out;
  for (const Json& id : ids) {
    if (!id.is_string()) fail(ErrorCode::ParseError, "functionals: expected string ids");
    const auto it = std::find_if(registry.begin(), registry.end(),
                                 [&](const ConvexFunctional& f) { return f.id == id.get<std::string>(); });
    if (it == registry.end()) fail(ErrorCode::ParameterOutOfRange, "unknown functional '" + id.get<std::string>() + "'");
    out.push_back(*it);
  }
  return out;
}

// Adds "majorization" results for the selected functionals; a violation turns exit 0 into 1.
void attach_jensen(CommandResult& r, const MajorizationCertificate& cert, const std::vector<ConvexFunctional>& fs) {
  if (fs.empty() || !cert.valid) return;
  Json arr = Json::array();
  bool all_ok = true;
  for (const ConvexFunctional& f : fs) {
    const SlackOutcome s = check_theorem3(cert, f, kViolationTol);
    all_ok = all_ok && s.ok;
    arr.push_back({{"functional", f.id}, {"slack", s.slack}, {"threshold", s.threshold}, {"ok", s.ok}});
  }
  r.results["majorization"] = arr;
  if (!all_ok && r.exit_code == kHolds) r.exit_code = kViolated;
}

CommandResult cmd_verify(const Flags& flags, const Instance& inst) {
  const Space& space = inst.require_space();
  const auto x = inst.points("x_atoms");
  const auto y = inst.points("y_atoms");
  const auto lambda = inst.weights("lambda", x.size());
  const auto mu = inst.weights("mu", y.size());
  const Matrix a = inst.matrix("A");
  const auto fs = selected_functionals(inst, builtin_registry(space), false);
  const auto cert = verify_majorization(space, x, lambda, y, mu, a, verify_options(flags, inst));
  CommandResult r{certificate_exit(cert), {{"certificate", to_json(cert)}}, {}};
  attach_jensen(r, cert, fs);
  return r;
}

CommandResult cmd_synthesize(const Flags& flags, const Instance& inst) {
  const Space& space = inst.require_space();
  const auto y = inst.points("y_atoms");
  const Matrix a = inst.matrix("A");
  const auto lambda = inst.weights("lambda", a.rows());
  const auto fs = selected_functionals(inst, builtin_registry(space), false);
  const auto cert = synthesize_majorized(space, y, lambda, a, verify_options(flags, inst));
  CommandResult r{certificate_exit(cert), {{"certificate", to_json(cert)}}, {}};
  attach_jensen(r, cert, fs);
  return r;
}

CommandResult cmd_decide(const Flags& flags, const Instance& inst) {
  const Space& space = inst.require_space();
  const auto x = inst.points("x_atoms");
  const auto y = inst.points("y_atoms");
  const auto lambda = inst.weights("lambda", x.size());
  const auto mu = inst.weights("mu", y.size());
  const EuclideanDecision d = decide_majorization_euclidean(space, x, lambda, y, mu, verify_options(flags, inst));
  Json res{{"feasible", d.feasible}, {"lp_residual", d.lp_residual}};
  if (d.feasible) res["A"] = to_json(d.witness);
  if (d.certificate) res["certificate"] = to_json(*d.certificate);
  return {d.feasible ? kHolds : kViolated, res, {}};
}

CommandResult cmd_birkhoff(const Flags&, const Instance& inst) {
  const Matrix a = inst.matrix("A");
  const BirkhoffDecomposition d = birkhoff_decompose(a);
  std::ostringstream csv;
  csv << "weight,permutation\n";
  for (const BirkhoffTerm& t : d.terms) {
    csv << format_double(t.weight) << ',';
    for (std::size_t i = 0; i < t.permutation.size(); ++i) csv << (i ? " " : "") << t.permutation[i];
    csv << '\n';
  }
  return {kHolds, {{"decomposition", to_json(d)}}, csv.str()};
}

CommandResult cmd_rado(const Flags& flags, const Instance& inst) {
  const Space& space = inst.require_space();
  const auto x = inst.points("x_atoms");
  const auto y = inst.points("y_atoms");
  std::optional<Matrix> cert;
  if (inst.has("A")) cert = inst.matrix("A");
  const double tol = effective_tol(flags, &inst, 1e-6);
  const RadoReport r = rado_probe(space, x, y, tol, cert);
  Json res{{"necessity_holds", r.necessity_holds},
           {"reconstruction_residual", r.reconstruction_residual},
           {"scale", r.scale},
           {"certificate_matrix", to_json(r.certificate_matrix)},
           {"decomposition", to_json(r.decomposition)}};
  if (r.lp_member) {
    res["lp_member"] = *r.lp_member;
    Json hull = Json::array();
    for (const HullCoefficient& h : r.hull_coefficients) hull.push_back({{"permutation", h.permutation}, {"weight", h.weight}});
    res["hull_coefficients"] = hull;
  }
  const bool holds = r.necessity_holds && r.lp_member.value_or(true);
  return {holds ? kHolds : kViolated, res, {}};
}

std::vector<Measure1D> measures_of(const std::vector<Point>& pts) {
  std::vector<Measure1D> out;
  for (const Point& p : pts) out.push_back(p.measure());
  return out;
}

CommandResult cmd_wasserstein(const Flags& flags, const Instance& inst) {
  Instance local = inst;
  if (!local.space) local.space = Space::wasserstein1d(1);
  if (local.space->kind() != SpaceKind::Wasserstein1D) {
    fail(ErrorCode::SpaceMismatch, "wasserstein expects a wasserstein1d space");
  }
  if (flags.op == "distance" || flags.op == "lp-distance") {
    const auto m = measures_of(local.points("atoms"));
    if (m.size() != 2) fail(ErrorCode::LengthMismatch, "distance needs exactly two measures in \"atoms\"");
    if (flags.op == "distance") return {kHolds, {{"w2", w2_quantile(m[0], m[1])}}, {}};
    const TransportResult t = w2_lp(DiscreteMeasureN::from_1d(m[0]), DiscreteMeasureN::from_1d(m[1]));
    return {kHolds, {{"w2", t.distance}, {"coupling", to_json(t.coupling)}}, {}};
  }
  if (flags.op == "barycenter") {
    const auto m = measures_of(local.points("atoms"));
    const auto w = local.weights("weights", m.size());
    const Measure1D bar = w2_barycenter_1d(m, w);
    return {kHolds, {{"barycenter", to_json(bar)}, {"objective", w2_objective(m, w, bar)}}, {}};
  }
  if (flags.op == "majorize") {
    const auto y = measures_of(local.points("y_atoms"));
    const Matrix a = local.matrix("A");
    const auto lambda = local.weights("lambda", a.rows());
    const auto fs = selected_functionals(local, w_functional_registry(), true);
    const auto cert = w_majorization(y, lambda, a, effective_tol(flags, &local, 1e-8));
    CommandResult r{certificate_exit(cert), {{"certificate", to_json(cert)}}, {}};
    attach_jensen(r, cert, fs);
    return r;
  }
  fail(ErrorCode::ParameterOutOfRange, "unknown --op '" + flags.op + "' (distance, lp-distance, barycenter, majorize)");
}

CommandResult cmd_fuzz(const Flags& flags) {
  if (flags.space.empty()) fail(ErrorCode::ParseError, "fuzz needs --space");
  if (flags.trials == 0) fail(ErrorCode::ParameterOutOfRange, "--trials must be >= 1");
  const Space space = Space::parse(flags.space);
  FuzzOptions opts;
  for (const std::string& s : flags.suites) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) opts.suites.insert(item);
    }
  }
  opts.threads = flags.threads;
  opts.anchors = flags.anchors;
  opts.inject_concave_control = flags.inject_concave;
  const double tol = flags.tol.value_or(kViolationTol);
  const auto reports = space.kind() == SpaceKind::Wasserstein1D ? w_fuzz_suite(flags.seed, flags.trials, tol, opts)
                                                                 : fuzz_suite(space, flags.seed, flags.trials, tol, opts);
  std::size_t violations = 0;
  Json arr = Json::array();
  for (const CheckReport& r : reports) {
    violations += r.violations;
    arr.push_back(to_json(r));
  }
  Json res{{"space", space.describe()}, {"trials", flags.trials}, {"violations", violations}, {"reports", arr}};
  return {violations == 0 ? kHolds : kViolated, res, reports_to_csv(reports)};
}

std::string flags_fingerprint(const std::string& command, const Flags& f) {
  std::ostringstream s;
  s << command << '|' << f.space << '|' << f.seed << '|' << f.trials << '|' << (f.tol ? format_double(*f.tol) : "")
    << '|' << f.ignore_zero_weight_rows << '|' << f.anchors << '|' << f.inject_concave << '|'
    << f.op;
  for (const std::string& x : f.suites) s << '|' << x;
  return s.str();
}

std::string generic_csv(const Json& results) {
  std::ostringstream csv;
  csv << "key,value\n";
  for (auto it = results.begin(); it != results.end(); ++it) {
    std::string v = it.value().dump();
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    csv << it.key() << ',' << v << '\n';
  }
  return csv.str();
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotConverged: return kNotConverged;
    case ErrorCode::NoCertificate: return kViolated;
    default: return kBadInput;
  }
}

}  // namespace

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Majorization in global NPC spaces: barycenters, certificates, and inequality fuzzing", "npcmaj"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));
  Flags flags;

  auto common = [&](CLI::App* sub, bool needs_instance) {
    if (needs_instance) sub->add_option("instance", flags.instance_path, "Instance JSON file ('-' for stdin)")->required();
    sub->add_option("--space", flags.space, "Space descriptor, e.g. euclidean:2, halfplane, spd:2, product(euclidean:1,halfplane)");
    sub->add_option("--seed", flags.seed, "Root seed");
    sub->add_option("--tol", flags.tol, "Tolerance override");
    sub->add_option("--format", flags.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", flags.out_path, "Write the report here instead of stdout");
  };
  auto* bary = app.add_subcommand("barycenter", "Barycenter of a weighted point set");
  common(bary, true);
  auto* verify = app.add_subcommand("verify", "Verify a majorization certificate");
  common(verify, true);
  verify->add_flag("--ignore-zero-weight-rows", flags.ignore_zero_weight_rows, "Skip rows with lambda_i = 0");
  auto* synth = app.add_subcommand("synthesize", "Build x-atoms from y-atoms and a row-stochastic matrix");
  common(synth, true);
  synth->add_flag("--ignore-zero-weight-rows", flags.ignore_zero_weight_rows, "Skip rows with lambda_i = 0");
  auto* decide = app.add_subcommand("decide", "Decide Euclidean majorization by LP");
  common(decide, true);
  auto* fuzz = app.add_subcommand("fuzz", "Seeded property checks of every inequality");
  common(fuzz, false);
  fuzz->add_option("--trials", flags.trials, "Number of random instances");
  fuzz->add_option("--suite", flags.suites, "Restrict to suites (comma separated or repeated)");
  fuzz->add_option("--threads", flags.threads, "Worker threads");
  fuzz->add_option("--anchors", flags.anchors, "Anchor points per certificate");
  fuzz->add_flag("--inject-concave", flags.inject_concave, "Add a concave functional that must be caught");
  auto* birk = app.add_subcommand("birkhoff", "Birkhoff decomposition of a doubly stochastic matrix");
  common(birk, true);
  auto* rado = app.add_subcommand("rado", "Rado necessity probe for an equal-weight majorization");
  common(rado, true);
  auto* wass = app.add_subcommand("wasserstein", "W2 distances, barycenters and majorization on the line");
  common(wass, true);
  wass->add_option("--op", flags.op, "distance | lp-distance | barycenter | majorize");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out;
    std::ostringstream cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kHolds : kBadInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  std::string input_bytes;
  try {
    if (command == "fuzz") {
      result = cmd_fuzz(flags);
    } else {
      const Instance inst = load_instance(flags);
      input_bytes = inst.bytes;
      if (command == "barycenter") result = cmd_barycenter(flags, inst);
      else if (command == "verify") result = cmd_verify(flags, inst);
      else if (command == "synthesize") result = cmd_synthesize(flags, inst);
      else if (command == "decide") result = cmd_decide(flags, inst);
      else if (command == "birkhoff") result = cmd_birkhoff(flags, inst);
      else if (command == "rado") result = cmd_rado(flags, inst);
      else result = cmd_wasserstein(flags, inst);
    }
  } catch (const Error& e) {
    err << "npcmaj " << command << ": " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "npcmaj " << command << ": " << e.what() << '\n';
    return kBadInput;
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const std::string inputs_digest = content_digest(input_bytes + '\n' + flags_fingerprint(command, flags));
  const std::string results_digest = content_digest(result.results.dump());
  std::string text;
  if (flags.format == "csv") {
    std::ostringstream csv;
    csv << "# npcmaj " << library_version() << " command=" << command << " seed=" << flags.seed
        << " inputs_digest=" << inputs_digest << " results_digest=" << results_digest << '\n';
    csv << (result.csv.empty() ? generic_csv(result.results) : result.csv);
    text = csv.str();
  } else {
    Json report{{"command", command},
                {"tool_version", library_version()},
                {"seed", flags.seed},
                {"inputs_digest", inputs_digest},
                {"results", result.results},
                {"results_digest", results_digest},
                {"wall_time_ms", wall_ms},
                {"exit_code", result.exit_code}};
    text = report.dump(2) + '\n';
  }
  if (flags.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(flags.out_path, std::ios::binary);
    if (!f) {
      err << "npcmaj: cannot write '" << flags.out_path << "'\n";
      return kBadInput;
    }
    f << text;
  }
  return result.exit_code;
}

}  // namespace npcmaj::cli
