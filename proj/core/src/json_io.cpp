#include "npcmaj/json_io.hpp"

#include <array>
#include <charconv>
#include <sstream>

#include "npcmaj/error.hpp"

namespace npcmaj {
namespace {

[[noreturn]] void bad(const std::string& what, const std::string& msg) {
  fail(ErrorCode::ParseError, what + ": " + msg);
}

double number_from_json(const Json& j, const std::string& what) {
  if (!j.is_number()) bad(what, "expected a number");
  return j.get<double>();
}

std::size_t count_from_json(const Json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    bad(what, "expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) bad(what, "unknown field '" + it.key() + "'");
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

Json to_json(const Space& s) {
  switch (s.kind()) {
    case SpaceKind::Euclidean: return {{"kind", "euclidean"}, {"dim", s.param()}};
    case SpaceKind::HalfPlane: return {{"kind", "halfplane"}};
    case SpaceKind::Spd: return {{"kind", "spd"}, {"order", s.param()}};
    case SpaceKind::Wasserstein1D: return {{"kind", "wasserstein1d"}, {"support_size", s.param()}};
    case SpaceKind::Product: {
      Json factors = Json::array();
      for (const Space& f : s.factors()) factors.push_back(to_json(f));
      return {{"kind", "product"}, {"factors", factors}};
    }
  }
  return {};
}

Space space_from_json(const Json& j) {
  if (j.is_string()) return Space::parse(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    bad("space", "expected {\"kind\": ...} or a string such as \"euclidean:2\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "euclidean") {
    only_keys(j, {"kind", "dim"}, "space");
    if (!j.contains("dim")) bad("space", "euclidean needs \"dim\"");
    return Space::euclidean(count_from_json(j["dim"], "space.dim"));
  }
  if (kind == "halfplane") {
    only_keys(j, {"kind"}, "space");
    return Space::half_plane();
  }
  if (kind == "spd") {
    only_keys(j, {"kind", "order"}, "space");
    if (!j.contains("order")) bad("space", "spd needs \"order\"");
    return Space::spd(count_from_json(j["order"], "space.order"));
  }
  if (kind == "wasserstein1d") {
    only_keys(j, {"kind", "support_size"}, "space");
    return Space::wasserstein1d(j.contains("support_size") ? count_from_json(j["support_size"], "space.support_size") : 1);
  }
  if (kind == "product") {
    only_keys(j, {"kind", "factors"}, "space");
    if (!j.contains("factors") || !j["factors"].is_array()) bad("space", "product needs a \"factors\" array");
    std::vector<Space> factors;
    for (const Json& f : j["factors"]) factors.push_back(space_from_json(f));
    return Space::product(std::move(factors));
  }
  bad("space", "unknown kind '" + kind + "'");
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) bad(what, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number_from_json(j[i], std::string(what) + "[" + std::to_string(i) + "]"));
  return v;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) bad(what, "expected a 2-D array");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(vector_from_json(j[i], (std::string(what) + " row " + std::to_string(i)).c_str()));
  }
  return Matrix::from_rows(rows);
}

Json to_json(const Measure1D& m) {
  return {{"atoms", std::vector<double>(m.atoms().begin(), m.atoms().end())},
          {"weights", std::vector<double>(m.weights().begin(), m.weights().end())}};
}

Measure1D measure1d_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.contains("weights")) {
    bad("measure", "expected {\"atoms\": [...], \"weights\": [...]}");
  }
  only_keys(j, {"atoms", "weights"}, "measure");
  auto atoms = vector_from_json(j["atoms"], "measure.atoms");
  auto weights = vector_from_json(j["weights"], "measure.weights");
  if (atoms.size() != weights.size()) fail(ErrorCode::InvalidMeasure, "atoms and weights differ in length");
  return Measure1D::make(std::move(atoms), std::move(weights));
}

Json to_json(const Point& p) {
  switch (p.kind()) {
    case SpaceKind::Euclidean: return p.coords();
    case SpaceKind::HalfPlane: return {{"re", p.half_plane().re}, {"im", p.half_plane().im}};
    case SpaceKind::Spd: return to_json(p.matrix());
    case SpaceKind::Wasserstein1D: return to_json(p.measure());
    case SpaceKind::Product: {
      Json parts = Json::array();
      for (const Point& q : p.parts()) parts.push_back(to_json(q));
      return parts;
    }
  }
  return {};
}

Point point_from_json(const Space& space, const Json& j) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: return Point::euclidean(vector_from_json(j, "euclidean point"));
    case SpaceKind::HalfPlane:
      if (!j.is_object() || !j.contains("re") || !j.contains("im")) bad("halfplane point", "expected {\"re\", \"im\"}");
      only_keys(j, {"re", "im"}, "halfplane point");
      return Point::half_plane(number_from_json(j["re"], "re"), number_from_json(j["im"], "im"));
    case SpaceKind::Spd: return Point::spd(matrix_from_json(j, "spd point"));
    case SpaceKind::Wasserstein1D: return Point::measure(measure1d_from_json(j));
    case SpaceKind::Product: {
      if (!j.is_array() || j.size() != space.factors().size()) {
        bad("product point", "expected an array with one entry per factor");
      }
      std::vector<Point> parts;
      for (std::size_t k = 0; k < j.size(); ++k) parts.push_back(point_from_json(space.factors()[k], j[k]));
      return Point::product(std::move(parts));
    }
  }
  bad("point", "unsupported space");
}

Json to_json(const BarycenterResult& r) {
  return {{"point", to_json(r.point)},
          {"objective", r.objective},
          {"grad_norm", r.grad_norm},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

Json to_json(const MajorizationCertificate& c) {
  Json x = Json::array();
  Json y = Json::array();
  Json bars = Json::array();
  for (const Point& p : c.x_atoms) x.push_back(to_json(p));
  for (const Point& p : c.y_atoms) y.push_back(to_json(p));
  for (const Point& p : c.row_barycenters) bars.push_back(to_json(p));
  return {{"space", to_json(c.space)},
          {"A", to_json(c.a)},
          {"lambda", c.lambda},
          {"mu", c.mu},
          {"x_atoms", x},
          {"y_atoms", y},
          {"residuals", c.residuals},
          {"row_barycenters", bars},
          {"unconverged_rows", c.unconverged_rows},
          {"exempt_rows", c.exempt_rows},
          {"pushforward_error", c.pushforward_error},
          {"scale", c.scale},
          {"tol", c.tol},
          {"valid", c.valid},
          {"diagnostic", c.diagnostic}};
}

Json to_json(const BirkhoffDecomposition& d) {
  Json terms = Json::array();
  for (const BirkhoffTerm& t : d.terms) terms.push_back({{"weight", t.weight}, {"permutation", t.permutation}});
  return {{"terms", terms}, {"reconstruction_error", d.reconstruction_error}};
}

Json to_json(const Coupling& c) {
  return {{"plan", to_json(c.plan)}, {"row_marginals", c.row_marginals}, {"col_marginals", c.col_marginals}};
}

Json to_json(const CheckReport& r) {
  return {{"check", r.check},
          {"functional", r.functional},
          {"space", r.space},
          {"trials", r.trials},
          {"violations", r.violations},
          {"skips", r.skips},
          {"worst_slack", r.trials > 0 ? Json(r.worst_slack) : Json(nullptr)},
          {"tolerance", r.tolerance},
          {"violating_seeds", r.violating_trials},
          {"skipped_seeds", r.skipped_trials}};
}

std::string reports_to_csv(std::span<const CheckReport> reports) {
  std::ostringstream out;
  out << "functional,space,trials,violations,worst_slack,seeds\n";
  for (const CheckReport& r : reports) {
    out << csv_field(r.check + '/' + r.functional) << ',' << csv_field(r.space) << ',' << r.trials << ',' << r.violations << ','
        << (r.trials > 0 ? format_double(r.worst_slack) : std::string()) << ',';
    for (std::size_t k = 0; k < r.violating_trials.size(); ++k) out << (k ? ";" : "") << r.violating_trials[k];
    out << '\n';
  }
  return out.str();
}

}  // namespace npcmaj
