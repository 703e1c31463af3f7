#include "ustat/config.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include "json.hpp"
#include <string_view>

#include "ustat/error.hpp"

namespace ustat {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool done() {
    skip();
    return p_ >= s_.size();
  }
  bool peek(char c) {
    skip();
    return p_ < s_.size() && s_[p_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++p_;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++p_;
    return true;
  }
  std::string ident() {
    skip();
    const std::size_t b = p_;
    while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '-' || s_[p_] == '_'))
      ++p_;
    if (b == p_) fail("expected a name");
    return std::string(s_.substr(b, p_ - b));
  }
  double number() {
    skip();
    const std::string rest(s_.substr(p_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (...) {
      fail("expected a number");
    }
    p_ += used;
    return v;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::config_error, why + " at offset " + std::to_string(p_) + " in '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t p_ = 0;
};

KernelSpec kernel_expr(Parser& p) {
  const std::string id = p.ident();
  if (id == "sign") return KernelSpec::sign();
  if (id == "bilinear") return KernelSpec::bilinear();
  if (id == "left") return KernelSpec::left();
  if (id == "right") return KernelSpec::right();
  if (id == "product") {
    if (p.accept('(')) {
      const double c = p.number();
      p.expect(')');
      return KernelSpec::product(c);
    }
    return KernelSpec::product();
  }
  if (id == "constant") {
    p.expect('(');
    const double c = p.number();
    int dim = 1;
    if (p.accept(',')) dim = static_cast<int>(p.number());
    p.expect(')');
    return KernelSpec::constant(c, dim);
  }
  if (id == "sum") {
    p.expect('(');
    KernelSpec k = kernel_expr(p);
    while (p.accept(',')) k = KernelSpec::sum(k, kernel_expr(p));
    p.expect(')');
    return k;
  }
  if (id == "scale") {
    p.expect('(');
    const double c = p.number();
    p.expect(',');
    KernelSpec k = kernel_expr(p);
    p.expect(')');
    return KernelSpec::scale(c, k);
  }
  if (id == "swap" || id == "sym-part" || id == "antisym-part") {
    p.expect('(');
    KernelSpec k = kernel_expr(p);
    p.expect(')');
    if (id == "swap") return KernelSpec::swap(k);
    if (id == "sym-part") return KernelSpec::sym_part(k);
    return KernelSpec::antisym_part(k);
  }
  p.fail("unknown kernel '" + id + "'");
}

MeasureSpec measure_expr(Parser& p) {
  const std::string id = p.ident();
  if (id == "uniform01") return SpaceSpec::uniform01();
  if (id == "stdnormal") return SpaceSpec::std_normal();
  if (id == "rademacher") return SpaceSpec::rademacher();
  if (id == "bernoulli") {
    const bool paren = p.accept('(');
    const double q = p.number();
    if (paren) p.expect(')');
    return SpaceSpec::bernoulli(q);
  }
  if (id == "ranks") {
    const bool paren = p.accept('(');
    const double n = p.number();
    if (paren) p.expect(')');
    return SpaceSpec::rank_ordinal(static_cast<int>(n));
  }
  if (id == "atoms") {
    p.expect('[');
    std::vector<double> v, w;
    do {
      v.push_back(p.number());
      p.expect(':');
      w.push_back(p.number());
    } while (p.accept(','));
    p.expect(']');
    return SpaceSpec::atoms(v, w);
  }
  if (id == "product") {
    p.expect('(');
    MeasureSpec a = measure_expr(p);
    p.expect(',');
    MeasureSpec b = measure_expr(p);
    p.expect(')');
    return SpaceSpec::product(a, b);
  }
  p.fail("unknown measure '" + id + "'");
}

std::vector<double> list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

KernelSpec parse_kernel(const std::string& text) {
  Parser p(text);
  KernelSpec k = kernel_expr(p);
  if (!p.done()) p.fail("trailing input");
  return k;
}

MeasureSpec parse_measure(const std::string& text) {
  Parser p(text);
  MeasureSpec m = measure_expr(p);
  if (!p.done()) p.fail("trailing input");
  return m;
}

MixtureLaw parse_law(const std::string& text, int writhe_terms) {
  if (text == "eta") return pure_eta();
  if (text == "xeta") return pure_xeta();
  if (text == "chi") {
    MixtureLaw l;
    l.chi = {1.0};
    return l;
  }
  if (text == "writhe") {
    MixtureLaw l;
    double s = 0.0;
    for (int q = 1; q <= writhe_terms; ++q) {
      const double lam = 1.0 / (std::numbers::pi * q);
      l.eta.push_back(lam);
      s += lam * lam;
    }
    l.tail_var = 1.0 / 6.0 - s;
    return l;
  }
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(Errc::config_error, "law must be a JSON object");
    MixtureLaw l;
    l.gaussian_var = j.value("gaussian_var", 0.0);
    l.tail_var = j.value("tail_var", 0.0);
    l.scale_exponent = j.value("scale_exponent", 1.0);
    l.chi = list(j, "chi");
    l.eta = list(j, "eta");
    l.xeta = list(j, "xeta");
    if (l.gaussian_var < 0 || l.tail_var < 0) throw Error(Errc::config_error, "negative variance in law");
    for (double v : l.eta)
      if (v <= 0) throw Error(Errc::config_error, "eta coefficients must be positive");
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("bad law spec: ") + e.what());
  }
}

std::string law_to_json(const MixtureLaw& law) {
  nlohmann::json j;
  j["gaussian_var"] = law.gaussian_var;
  j["chi"] = law.chi;
  j["eta"] = law.eta;
  j["xeta"] = law.xeta;
  j["tail_var"] = law.tail_var;
  j["scale_exponent"] = law.scale_exponent;
  if (law.parity) j["parity"] = *law.parity == Parity::even ? "even" : "odd";
  return j.dump();
}

}  // namespace ustat
