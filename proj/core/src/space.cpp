#include "npcmaj/space.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "npcmaj/error.hpp"

namespace npcmaj {

Space::Space(SpaceKind kind, std::size_t param, std::vector<Space> factors)
    : kind_(kind), param_(param), factors_(std::move(factors)) {}

Space Space::euclidean(std::size_t dim) {
  if (dim == 0) fail(ErrorCode::ParameterOutOfRange, "Euclidean dimension must be >= 1");
  return Space(SpaceKind::Euclidean, dim, {});
}

Space Space::half_plane() { return Space(SpaceKind::HalfPlane, 2, {}); }

Space Space::spd(std::size_t order) {
  if (order == 0) fail(ErrorCode::ParameterOutOfRange, "Spd order must be >= 1");
  return Space(SpaceKind::Spd, order, {});
}

Space Space::product(std::vector<Space> factors) {
  if (factors.empty()) fail(ErrorCode::ParameterOutOfRange, "product needs at least one factor");
  const std::size_t n = factors.size();
  return Space(SpaceKind::Product, n, std::move(factors));
}

Space Space::wasserstein1d(std::size_t support_size) {
  if (support_size == 0) {
    fail(ErrorCode::ParameterOutOfRange, "Wasserstein1D support size must be >= 1");
  }
  return Space(SpaceKind::Wasserstein1D, support_size, {});
}

bool operator==(const Space& a, const Space& b) {
  return a.kind_ == b.kind_ && a.param_ == b.param_ && a.factors_ == b.factors_;
}

std::string Space::describe() const {
  switch (kind_) {
    case SpaceKind::Euclidean: return "euclidean:" + std::to_string(param_);
    case SpaceKind::HalfPlane: return "halfplane";
    case SpaceKind::Spd: return "spd:" + std::to_string(param_);
    case SpaceKind::Wasserstein1D: return "wasserstein1d:" + std::to_string(param_);
    case SpaceKind::Product: {
      std::string out = "product(";
      for (std::size_t k = 0; k < factors_.size(); ++k) {
        if (k) out += ",";
        out += factors_[k].describe();
      }
      return out + ")";
    }
  }
  return "?";
}

namespace {

class SpaceParser {
 public:
  explicit SpaceParser(const std::string& text) : text_(text) {}

  Space parse_all() {
    Space s = parse_one();
    if (pos_ != text_.size()) error("trailing characters");
    return s;
  }

 private:
  Space parse_one() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name == "halfplane") return Space::half_plane();
    if (name == "product") {
      expect('(');
      std::vector<Space> factors;
      factors.push_back(parse_one());
      while (peek() == ',') {
        ++pos_;
        factors.push_back(parse_one());
      }
      expect(')');
      return Space::product(std::move(factors));
    }
    if (name == "wasserstein1d" && peek() != ':') return Space::wasserstein1d(1);
    if (name == "euclidean" || name == "spd" || name == "wasserstein1d") {
      expect(':');
      const std::size_t n = parse_count();
      if (name == "euclidean") return Space::euclidean(n);
      if (name == "spd") return Space::spd(n);
      return Space::wasserstein1d(n);
    }
    error("unknown space kind '" + name + "'");
  }

  std::size_t parse_count() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) error("expected a positive integer");
    return static_cast<std::size_t>(std::stoul(text_.substr(start, pos_ - start)));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void error(const std::string& what) const {
    std::ostringstream msg;
    msg << "space descriptor '" << text_ << "' at offset " << pos_ << ": " << what;
    fail(ErrorCode::ParseError, msg.str());
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Space Space::parse(const std::string& text) { return SpaceParser(text).parse_all(); }

Point Point::euclidean(std::vector<double> coords) { return Point(Payload(std::move(coords))); }

Point Point::half_plane(double re, double im) { return Point(Payload(HalfPlanePoint{re, im})); }

Point Point::spd(const Matrix& s) {
  Point p(Payload(symmetrize(s)));
  p.input_asymmetry_ = relative_asymmetry(s);
  return p;
}

Point Point::product(std::vector<Point> parts) {
  return Point(Payload(ProductPoint{std::move(parts)}));
}

Point Point::measure(Measure1D m) { return Point(Payload(std::move(m))); }

SpaceKind Point::kind() const {
  switch (payload_.index()) {
    case 0: return SpaceKind::Euclidean;
    case 1: return SpaceKind::HalfPlane;
    case 2: return SpaceKind::Spd;
    case 3: return SpaceKind::Product;
    default: return SpaceKind::Wasserstein1D;
  }
}

namespace {
template <typename T>
const T& get_payload(const Point::Payload& p, const char* what) {
  if (const T* v = std::get_if<T>(&p)) return *v;
  fail(ErrorCode::SpaceMismatch, std::string("point does not hold a ") + what);
}
}  // namespace

const std::vector<double>& Point::coords() const {
  return get_payload<std::vector<double>>(payload_, "Euclidean vector");
}
const HalfPlanePoint& Point::half_plane() const {
  return get_payload<HalfPlanePoint>(payload_, "half-plane point");
}
const Matrix& Point::matrix() const { return get_payload<Matrix>(payload_, "matrix"); }
const std::vector<Point>& Point::parts() const {
  return get_payload<ProductPoint>(payload_, "product tuple").parts;
}
const Measure1D& Point::measure() const { return get_payload<Measure1D>(payload_, "measure"); }

bool operator==(const Point& a, const Point& b) {
  if (a.payload_.index() != b.payload_.index()) return false;
  if (a.kind() == SpaceKind::Product) {
    return a.parts() == b.parts();
  }
  return std::visit(
      [&](const auto& va) {
        using T = std::decay_t<decltype(va)>;
        if constexpr (std::is_same_v<T, ProductPoint>) {
          return false;
        } else {
          return va == std::get<T>(b.payload_);
        }
      },
      a.payload_);
}

namespace {
bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}
}  // namespace

bool canonical_less(const Point& a, const Point& b) {
  if (a.payload_.index() != b.payload_.index()) return a.payload_.index() < b.payload_.index();
  switch (a.kind()) {
    case SpaceKind::Euclidean: return lex_less(a.coords(), b.coords());
    case SpaceKind::HalfPlane: {
      const auto& p = a.half_plane();
      const auto& q = b.half_plane();
      return p.re != q.re ? p.re < q.re : p.im < q.im;
    }
    case SpaceKind::Spd: return lex_less(a.matrix().data(), b.matrix().data());
    case SpaceKind::Wasserstein1D: {
      const auto& p = a.measure();
      const auto& q = b.measure();
      if (p.atoms().size() != q.atoms().size()) return p.atoms().size() < q.atoms().size();
      if (!std::equal(p.atoms().begin(), p.atoms().end(), q.atoms().begin())) {
        return lex_less(p.atoms(), q.atoms());
      }
      return lex_less(p.weights(), q.weights());
    }
    case SpaceKind::Product: {
      const auto& pa = a.parts();
      const auto& pb = b.parts();
      return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end(), canonical_less);
    }
  }
  return false;
}

}  // namespace npcmaj
