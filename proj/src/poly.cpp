#include "symred/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "symred/errors.hpp"

namespace symred {

bool GradedLexGreater::operator()(const Exponents& a, const Exponents& b) const {
  const int da = std::accumulate(a.begin(), a.end(), 0);
  const int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

Poly Poly::constant(std::size_t nvars, const Rational& c) {
  Poly p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t i) {
  if (i >= nvars) throw DimensionError("variable index out of range");
  Exponents e(nvars, 0);
  e[i] = 1;
  return monomial(e);
}

Poly Poly::monomial(const Exponents& e, const Rational& c) {
  Poly p(e.size());
  p.add_term(e, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && degree() == 0);
}

int Poly::degree() const {
  if (terms_.empty()) return -1;
  const auto& e = terms_.begin()->first;
  return std::accumulate(e.begin(), e.end(), 0);
}

bool Poly::is_homogeneous() const {
  if (terms_.empty()) return true;
  const int d = degree();
  return std::all_of(terms_.begin(), terms_.end(), [d](const auto& t) {
    return std::accumulate(t.first.begin(), t.first.end(), 0) == d;
  });
}

Poly Poly::homogeneous_component(int d) const {
  Poly out(nvars_);
  for (const auto& [e, c] : terms_)
    if (std::accumulate(e.begin(), e.end(), 0) == d) out.terms_.emplace(e, c);
  return out;
}

Rational Poly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Poly::add_term(const Exponents& e, const Rational& c) {
  if (e.size() != nvars_) throw DimensionError("monomial has wrong number of variables");
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

void Poly::check_same(const Poly& o) const {
  if (o.nvars_ != nvars_) throw DimensionError("polynomials live in different variable sets");
}

Poly& Poly::operator+=(const Poly& o) {
  check_same(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_same(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& s) {
  if (sgn(s) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  a.check_same(b);
  Poly out(a.nvars_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

Poly Poly::pow(unsigned k) const {
  Poly result = constant(nvars_, 1);
  Poly base = *this;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return result;
}

Poly Poly::derivative(std::size_t i) const {
  if (i >= nvars_) throw DimensionError("derivative index out of range");
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents d = e;
    d[i] -= 1;
    out.add_term(d, c * e[i]);
  }
  return out;
}

Poly Poly::substitute(const std::vector<Poly>& images) const {
  if (images.size() != nvars_) throw DimensionError("substitution needs one image per variable");
  if (images.empty()) return *this;
  const std::size_t m = images.front().nvars();
  for (const auto& im : images)
    if (im.nvars() != m) throw DimensionError("substitution images live in different variable sets");
  // Cache powers of each image.
  std::vector<std::vector<Poly>> powers(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) powers[i].push_back(constant(m, 1));
  Poly out(m);
  for (const auto& [e, c] : terms_) {
    Poly term = constant(m, c);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      while (powers[i].size() <= static_cast<std::size_t>(e[i])) powers[i].push_back(powers[i].back() * images[i]);
      term = term * powers[i][e[i]];
    }
    out += term;
  }
  return out;
}

Poly Poly::compose_linear(const QMatrix& g) const {
  if (g.rows() != nvars_ || g.cols() != nvars_) throw DimensionError("linear substitution has wrong shape");
  std::vector<Poly> images;
  images.reserve(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    Poly li(nvars_);
    for (std::size_t j = 0; j < nvars_; ++j)
      if (sgn(g(i, j)) != 0) {
        Exponents e(nvars_, 0);
        e[j] = 1;
        li.add_term(e, g(i, j));
      }
    images.push_back(std::move(li));
  }
  return substitute(images);
}

double Poly::evaluate(std::span<const double> x) const {
  if (x.size() != nvars_) throw DimensionError("evaluation point has wrong dimension");
  double s = 0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

Rational Poly::evaluate(std::span<const Rational> x) const {
  if (x.size() != nvars_) throw DimensionError("evaluation point has wrong dimension");
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

Poly Poly::extended(std::size_t nvars) const {
  if (nvars < nvars_) throw DimensionError("cannot shrink a polynomial's variable set");
  Poly out(nvars);
  for (const auto& [e, c] : terms_) {
    Exponents f = e;
    f.resize(nvars, 0);
    out.terms_.emplace(std::move(f), c);
  }
  return out;
}

std::vector<std::string> phase_space_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("q" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) names.push_back("p" + std::to_string(i));
  return names;
}

std::vector<std::string> generator_names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= m; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

std::string to_string(const Poly& p, const std::vector<std::string>& names) {
  if (names.size() != p.nvars()) throw DimensionError("variable name list has wrong length");
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    const bool neg = sgn(c) < 0;
    Rational mag = abs(c);
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    bool wrote = false;
    const bool unit_monomial = std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
    if (mag != 1 || unit_monomial) {
      os << mag.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << (wrote ? "*" : "") << names[i];
      if (e[i] > 1) os << '^' << e[i];
      wrote = true;
    }
  }
  return os.str();
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const std::vector<std::string>& names) : s_(text), names_(names) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("polynomial parse error at offset " + std::to_string(pos_) + ": " + what + " in '" +
                      std::string(s_) + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc(names_.size());
    bool negate = false;
    if (accept('-'))
      negate = true;
    else
      accept('+');
    Poly t = term();
    acc += negate ? -t : t;
    while (true) {
      if (accept('+'))
        acc += term();
      else if (accept('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  Poly term() {
    Poly acc = power();
    while (true) {
      if (accept('*')) {
        acc = acc * power();
      } else if (accept('/')) {
        Poly d = power();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        acc *= Rational(1) / d.terms().begin()->second;
      } else {
        break;
      }
    }
    return acc;
  }

  Poly power() {
    Poly base = atom();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start)))));
    }
    return base;
  }

  Poly atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Poly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return -power();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return Poly::constant(names_.size(), parse_rational(s_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      auto name = s_.substr(start, pos_ - start);
      auto it = std::find(names_.begin(), names_.end(), name);
      if (it == names_.end()) fail("unknown variable '" + std::string(name) + "'");
      return Poly::variable(names_.size(), static_cast<std::size_t>(it - names_.begin()));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const std::vector<std::string>& names) {
  return PolyParser(text, names).parse();
}

nlohmann::json to_json(const Poly& p) {
  auto arr = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) arr.push_back({{"coeff", c.get_str()}, {"exponents", e}});
  return arr;
}

Poly poly_from_json(const nlohmann::json& j, std::size_t nvars) {
  if (!j.is_array()) throw ConfigError("polynomial JSON must be a term list");
  Poly p(nvars);
  for (const auto& t : j) {
    if (!t.contains("coeff") || !t.contains("exponents")) throw ConfigError("polynomial term needs coeff and exponents");
    auto e = t.at("exponents").get<Exponents>();
    if (e.size() != nvars) throw ConfigError("polynomial term has wrong number of exponents");
    for (int k : e)
      if (k < 0) throw ConfigError("negative exponent in polynomial term");
    const auto& c = t.at("coeff");
    p.add_term(e, c.is_string() ? parse_rational(c.get<std::string>())
                                : (c.is_number_integer() ? Rational(c.get<long>()) : rational_from_double(c.get<double>())));
  }
  return p;
}

std::vector<Exponents> monomials_of_degree(std::size_t nvars, int d) {
  std::vector<Exponents> out;
  if (nvars == 0) {
    if (d == 0) out.emplace_back();
    return out;
  }
  Exponents e(nvars, 0);
  // Descending lex enumeration: put as much as possible on early variables.
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 == nvars) {
      e[i] = left;
      out.push_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[i] = k;
      self(self, i + 1, left - k);
    }
  };
  rec(rec, 0, d);
  return out;
}

Poly bracket_with_tensor(const Poly& f, const Poly& g, const QMatrix& pi) {
  const std::size_t n = f.nvars();
  if (g.nvars() != n || pi.rows() != n || pi.cols() != n) throw DimensionError("bracket: dimension mismatch");
  std::vector<Poly> df, dg;
  for (std::size_t i = 0; i < n; ++i) {
    df.push_back(f.derivative(i));
    dg.push_back(g.derivative(i));
  }
  Poly out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (df[i].is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (sgn(pi(i, j)) == 0 || dg[j].is_zero()) continue;
      out += pi(i, j) * (df[i] * dg[j]);
    }
  }
  return out;
}

DivisionResult divide(const Poly& f, const std::vector<Poly>& divisors) {
  const std::size_t n = f.nvars();
  DivisionResult r{std::vector<Poly>(divisors.size(), Poly(n)), Poly(n)};
  for (const auto& d : divisors)
    if (d.nvars() != n) throw DimensionError("division: variable sets differ");
  Poly p = f;
  while (!p.is_zero()) {
    const auto& [lm, lc] = *p.terms().begin();
    bool divided = false;
    for (std::size_t i = 0; i < divisors.size() && !divided; ++i) {
      if (divisors[i].is_zero()) continue;
      const auto& [dm, dc] = *divisors[i].terms().begin();
      bool divides = true;
      for (std::size_t k = 0; k < n; ++k)
        if (dm[k] > lm[k]) divides = false;
      if (!divides) continue;
      Exponents q(n);
      for (std::size_t k = 0; k < n; ++k) q[k] = lm[k] - dm[k];
      Poly qt = Poly::monomial(q, lc / dc);
      r.quotients[i] += qt;
      p -= qt * divisors[i];
      divided = true;
    }
    if (!divided) {
      Exponents lead = lm;
      Rational c = lc;
      r.remainder.add_term(lead, c);
      p.add_term(lead, -c);
    }
  }
  return r;
}

PolyEvaluator::PolyEvaluator(const Poly& p) : nvars_(p.nvars()) {
  for (const auto& [e, c] : p.terms()) {
    coeffs_.push_back(c.get_d());
    exps_.insert(exps_.end(), e.begin(), e.end());
    for (int k : e) max_exp_ = std::max(max_exp_, k);
  }
}

double PolyEvaluator::value(std::span<const double> x) const {
  if (coeffs_.empty()) return 0.0;
  // powers[i * (max_exp_ + 1) + k] = x_i^k
  const std::size_t stride = static_cast<std::size_t>(max_exp_) + 1;
  double local[256];
  std::vector<double> heap;
  double* pw = local;
  if (nvars_ * stride > 256) {
    heap.resize(nvars_ * stride);
    pw = heap.data();
  }
  for (std::size_t i = 0; i < nvars_; ++i) {
    pw[i * stride] = 1.0;
    for (std::size_t k = 1; k < stride; ++k) pw[i * stride + k] = pw[i * stride + k - 1] * x[i];
  }
  double s = 0;
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    double v = coeffs_[t];
    const int* e = &exps_[t * nvars_];
    for (std::size_t i = 0; i < nvars_; ++i)
      if (e[i]) v *= pw[i * stride + static_cast<std::size_t>(e[i])];
    s += v;
  }
  return s;
}

GradientEvaluator::GradientEvaluator(const Poly& p) : f_(p) {
  for (std::size_t i = 0; i < p.nvars(); ++i) partials_.emplace_back(p.derivative(i));
}

void GradientEvaluator::gradient(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < partials_.size(); ++i) out[i] = partials_[i].value(x);
}

}  // namespace symred
