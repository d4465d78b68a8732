#include "symred/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "symred/errors.hpp"

namespace symred::invariants {

namespace {

// Coordinates of homogeneous polynomials in the degree-d monomial basis.
class MonomialIndex {
 public:
  MonomialIndex(std::size_t nvars, int d) : monos_(monomials_of_degree(nvars, d)) {
    for (std::size_t i = 0; i < monos_.size(); ++i) index_.emplace(monos_[i], i);
  }
  std::size_t size() const { return monos_.size(); }
  const Exponents& monomial(std::size_t i) const { return monos_[i]; }
  std::size_t position(const Exponents& e) const { return index_.at(e); }

  void write_row(const Poly& p, QMatrix& m, std::size_t row) const {
    for (const auto& [e, c] : p.terms()) m(row, index_.at(e)) = c;
  }
  void write_col(const Poly& p, QMatrix& m, std::size_t col) const {
    for (const auto& [e, c] : p.terms()) m(index_.at(e), col) = c;
  }
  QMatrix rows(const std::vector<Poly>& ps) const {
    QMatrix m(ps.size(), size());
    for (std::size_t i = 0; i < ps.size(); ++i) write_row(ps[i], m, i);
    return m;
  }
  Poly poly_of_row(const QMatrix& m, std::size_t row, std::size_t nvars) const {
    Poly p(nvars);
    for (std::size_t j = 0; j < size(); ++j) p.add_term(monos_[j], m(row, j));
    return p;
  }

 private:
  std::vector<Exponents> monos_;
  std::map<Exponents, std::size_t, GradedLexGreater> index_;
};

QMatrix poisson_tensor_of(const symplin::SymplecticSpace& s) {
  if (s.exact_omega()) return s.exact_poisson_tensor();
  return QMatrix::from_eigen(s.poisson_tensor());
}

// Derivation along the linear vector field v -> x v.
Poly lie_derivative(const Poly& f, const QMatrix& x) {
  const std::size_t d = f.nvars();
  Poly out(d);
  for (std::size_t i = 0; i < d; ++i) {
    Poly df = f.derivative(i);
    if (df.is_zero()) continue;
    Poly lin(d);
    for (std::size_t j = 0; j < d; ++j)
      if (sgn(x(i, j)) != 0) {
        Exponents e(d, 0);
        e[j] = 1;
        lin.add_term(e, x(i, j));
      }
    out += df * lin;
  }
  return out;
}

// Complex polynomial as (real part, imaginary part).
struct ComplexPoly {
  Poly re, im;
};

ComplexPoly multiply(const ComplexPoly& a, const ComplexPoly& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

std::vector<Poly> torus_candidates(const groups::Torus& t, int d) {
  const std::size_t n = t.n(), dim = 2 * n;
  std::vector<Poly> out;
  // Exponent vector (a, b) of z^a zbar^b, enumerated in descending graded-lex.
  std::vector<Exponents> pairs;
  for (const auto& e : monomials_of_degree(2 * n, d)) {
    bool weight_zero = true;
    for (std::size_t r = 0; r < t.rank() && weight_zero; ++r) {
      mpz_class w = 0;
      for (std::size_t j = 0; j < n; ++j) w += t.weights[r][j] * (e[j] - e[n + j]);
      weight_zero = (w == 0);
    }
    if (weight_zero) pairs.push_back(e);
  }
  auto build = [&](const Exponents& e) {
    ComplexPoly acc{Poly::constant(dim, 1), Poly(dim)};
    for (std::size_t j = 0; j < n; ++j) {
      ComplexPoly z{Poly::variable(dim, j), Poly::variable(dim, n + j)};
      ComplexPoly zb{Poly::variable(dim, j), -Poly::variable(dim, n + j)};
      for (int k = 0; k < e[j]; ++k) acc = multiply(acc, z);
      for (int k = 0; k < e[n + j]; ++k) acc = multiply(acc, zb);
    }
    return acc;
  };
  auto swap_halves = [&](const Exponents& e) {
    Exponents s(e.begin() + static_cast<long>(n), e.end());
    s.insert(s.end(), e.begin(), e.begin() + static_cast<long>(n));
    return s;
  };
  for (const auto& e : pairs)
    if (swap_halves(e) == e) out.push_back(build(e).re);
  for (const auto& e : pairs) {
    Exponents s = swap_halves(e);
    if (s == e || !(GradedLexGreater{}(e, s))) continue;
    ComplexPoly c = build(e);
    out.push_back(c.re);
    out.push_back(c.im);
  }
  return out;
}

std::vector<Poly> echelon_basis(const std::vector<Poly>& ps, std::size_t nvars, int d) {
  MonomialIndex idx(nvars, d);
  if (ps.empty()) return {};
  RowEchelon r = rref(idx.rows(ps));
  std::vector<Poly> out;
  for (std::size_t i = 0; i < r.reduced.rows(); ++i) out.push_back(idx.poly_of_row(r.reduced, i, nvars));
  return out;
}

// Products of generators indexed by exponent vectors, memoized.
class ProductCache {
 public:
  explicit ProductCache(const std::vector<Poly>& gens, std::size_t nvars) : gens_(gens), nvars_(nvars) {}
  const Poly& get(const Exponents& e) {
    auto it = memo_.find(e);
    if (it != memo_.end()) return it->second;
    Poly p = Poly::constant(nvars_, 1);
    auto first = std::find_if(e.begin(), e.end(), [](int k) { return k > 0; });
    if (first != e.end()) {
      Exponents rest = e;
      const auto i = static_cast<std::size_t>(first - e.begin());
      --rest[i];
      p = get(rest) * gens_[i];
    }
    return memo_.emplace(e, std::move(p)).first->second;
  }

 private:
  const std::vector<Poly>& gens_;
  std::size_t nvars_;
  std::map<Exponents, Poly> memo_;
};

Poly poly_in_y(const std::vector<Exponents>& ys, const QMatrix& coeffs, std::size_t col, std::size_t m) {
  Poly p(m);
  for (std::size_t i = 0; i < ys.size(); ++i) p.add_term(ys[i], coeffs(i, col));
  return p;
}

}  // namespace

Poly poisson_bracket(const Poly& f, const Poly& g, const symplin::SymplecticSpace& s) {
  if (f.nvars() != s.dim() || g.nvars() != s.dim()) throw DimensionError("bracket: polynomial lives in another space");
  if (s.is_standard()) {
    const std::size_t n = s.half_dim();
    Poly out(s.dim());
    for (std::size_t i = 0; i < n; ++i) {
      Poly fq = f.derivative(i), fp = f.derivative(n + i);
      if (!fq.is_zero()) out += fq * g.derivative(n + i);
      if (!fp.is_zero()) out -= fp * g.derivative(i);
    }
    return out;
  }
  return bracket_with_tensor(f, g, poisson_tensor_of(s));
}

Poly reynolds(const Poly& f, const groups::FiniteGroup& g) {
  if (f.nvars() != g.dim()) throw DimensionError("reynolds: polynomial lives in another space");
  Poly out(f.nvars());
  for (const auto& x : g.elements()) out += f.compose_linear(x);
  out *= Rational(1, static_cast<unsigned long>(g.order()));
  return out;
}

std::vector<Rational> molien_series(const groups::FiniteGroup& g, int dmax) {
  const auto len = static_cast<std::size_t>(dmax + 1);
  std::vector<Rational> total(len, Rational(0));
  for (const auto& x : g.elements()) {
    auto c = characteristic_polynomial(x);
    const std::size_t n = c.size() - 1;
    // det(I - t x) has t^i coefficient c_{n-i}.
    std::vector<Rational> a(len, Rational(0));
    for (std::size_t i = 0; i <= n && i < len; ++i) a[i] = c[n - i];
    std::vector<Rational> b(len, Rational(0));
    b[0] = 1;
    for (std::size_t i = 1; i < len; ++i) {
      Rational s = 0;
      for (std::size_t j = 1; j <= i; ++j) s += a[j] * b[i - j];
      b[i] = -s;
    }
    for (std::size_t i = 0; i < len; ++i) total[i] += b[i];
  }
  for (auto& t : total) t /= static_cast<unsigned long>(g.order());
  return total;
}

mpz_class molien_dimension(const groups::FiniteGroup& g, int d) {
  if (d < 0) return 0;
  Rational r = molien_series(g, d)[static_cast<std::size_t>(d)];
  if (r.get_den() != 1) throw ConvergenceError("Molien coefficient is not an integer");
  return r.get_num();
}

bool is_invariant(const Poly& f, const groups::Group& g) {
  if (g.is_finite()) {
    for (const auto& x : g.finite().elements())
      if (!(f.compose_linear(x) == f)) return false;
    return true;
  }
  for (const auto& x : g.algebra_generators())
    if (!lie_derivative(f, x).is_zero()) return false;
  return true;
}

std::vector<Poly> invariant_basis(const groups::Group& g, int d) {
  const std::size_t dim = g.phase_dim();
  if (d == 0) return {Poly::constant(dim, 1)};
  if (g.is_finite()) {
    std::vector<Poly> images;
    for (const auto& e : monomials_of_degree(dim, d)) {
      Poly r = reynolds(Poly::monomial(e), g.finite());
      if (!r.is_zero()) images.push_back(std::move(r));
    }
    return echelon_basis(images, dim, d);
  }
  if (g.is_torus()) return torus_candidates(g.torus(), d);
  // Kernel of the infinitesimal action on degree-d forms.
  MonomialIndex idx(dim, d);
  const std::size_t k = g.algebra_dim();
  QMatrix op(k * idx.size(), idx.size());
  for (std::size_t col = 0; col < idx.size(); ++col) {
    Poly mono = Poly::monomial(idx.monomial(col));
    for (std::size_t a = 0; a < k; ++a) {
      Poly image = lie_derivative(mono, g.algebra_generators()[a]);
      for (const auto& [e, c] : image.terms()) op(a * idx.size() + idx.position(e), col) = c;
    }
  }
  QMatrix ker = nullspace(op);
  std::vector<Poly> vecs;
  for (std::size_t j = 0; j < ker.cols(); ++j) {
    Poly p(dim);
    for (std::size_t i = 0; i < idx.size(); ++i) p.add_term(idx.monomial(i), ker(i, j));
    vecs.push_back(std::move(p));
  }
  return echelon_basis(vecs, dim, d);
}

std::vector<Exponents> weighted_monomials(const std::vector<int>& degrees, int d) {
  const std::size_t m = degrees.size();
  std::vector<Exponents> out;
  Exponents e(m, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == m) {
      if (left == 0) out.push_back(e);
      return;
    }
    for (int k = left / degrees[i]; k >= 0; --k) {
      e[i] = k;
      rec(i + 1, left - k * degrees[i]);
    }
    e[i] = 0;
  };
  if (d >= 0) rec(0, d);
  std::sort(out.begin(), out.end(), GradedLexGreater{});
  return out;
}

Eigen::VectorXd HilbertMap::evaluate(const Eigen::VectorXd& v) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(generators.size()));
  std::span<const double> x(v.data(), static_cast<std::size_t>(v.size()));
  for (std::size_t i = 0; i < generators.size(); ++i) y(i) = generators[i].evaluate(x);
  return y;
}

HilbertMap invariant_generators(const groups::Group& g, std::optional<int> degree_bound) {
  const std::size_t dim = g.phase_dim();
  HilbertMap h;
  h.phase_dim = dim;
  if (degree_bound) {
    h.degree_bound = *degree_bound;
  } else if (g.is_finite()) {
    h.degree_bound = static_cast<int>(g.finite().order());
  } else if (g.is_torus()) {
    mpz_class wmax = 0;
    for (const auto& row : g.torus().weights)
      for (const auto& w : row) wmax = std::max(wmax, mpz_class(abs(w)));
    h.degree_bound = static_cast<int>(2 * g.torus().n() * wmax.get_ui());
  } else {
    h.degree_bound = 4;
  }
  if (h.degree_bound < 1) throw PreconditionError("degree bound must be positive");

  std::vector<Rational> molien;
  if (g.is_finite()) molien = molien_series(g.finite(), h.degree_bound);

  h.complete = true;
  for (int d = 1; d <= h.degree_bound; ++d) {
    MonomialIndex idx(dim, d);
    std::vector<Poly> candidates = invariant_basis(g, d);

    ProductCache products(h.generators, dim);
    std::vector<Poly> span;
    for (const auto& e : weighted_monomials(h.degrees, d)) span.push_back(products.get(e));
    QMatrix span_rows = idx.rows(span);
    std::size_t r = rank(span_rows);
    for (const auto& c : candidates) {
      QMatrix trial = QMatrix::vcat(span_rows, idx.rows({c}));
      std::size_t tr = rank(trial);
      if (tr > r) {
        h.generators.push_back(c);
        h.degrees.push_back(d);
        span_rows = std::move(trial);
        r = tr;
      }
    }

    DegreeCount count;
    count.degree = d;
    count.invariant_dim = candidates.empty() ? 0 : rank(idx.rows(candidates));
    count.product_dim = r;
    if (g.is_finite()) {
      count.expected = molien[static_cast<std::size_t>(d)].get_num();
    } else if (g.is_torus()) {
      count.expected = mpz_class(static_cast<unsigned long>(candidates.size()));
    }
    if (count.product_dim != count.invariant_dim) h.complete = false;
    if (count.expected && mpz_class(static_cast<unsigned long>(count.invariant_dim)) != *count.expected)
      h.complete = false;
    h.counts.push_back(count);
  }
  if (h.generators.empty()) throw ExpressibilityError("no invariant generators found below the degree bound");
  int maxdeg = *std::max_element(h.degrees.begin(), h.degrees.end());
  h.relations = generator_relations(h, 2 * maxdeg);
  return h;
}

std::vector<Poly> generator_relations(const HilbertMap& h, int max_degree) {
  const std::size_t m = h.size(), dim = h.phase_dim;
  ProductCache products(h.generators, dim);
  std::vector<Poly> found;
  std::vector<int> found_deg;
  for (int d = 1; d <= max_degree; ++d) {
    auto ys = weighted_monomials(h.degrees, d);
    if (ys.size() < 2) continue;
    MonomialIndex idx(dim, d);
    QMatrix a(idx.size(), ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) idx.write_col(products.get(ys[j]), a, j);
    QMatrix ker = nullspace(a);
    if (ker.cols() == 0) continue;

    std::map<Exponents, std::size_t> ypos;
    for (std::size_t i = 0; i < ys.size(); ++i) ypos.emplace(ys[i], i);
    auto vec_of = [&](const Poly& p, QMatrix& rows, std::size_t row) {
      for (const auto& [e, c] : p.terms()) rows(row, ypos.at(e)) = c;
    };

    // Multiples of lower relations.
    std::vector<Poly> implied;
    for (std::size_t i = 0; i < found.size(); ++i)
      for (const auto& e : weighted_monomials(h.degrees, d - found_deg[i])) implied.push_back(Poly::monomial(e) * found[i]);
    QMatrix span(implied.size(), ys.size());
    for (std::size_t i = 0; i < implied.size(); ++i) vec_of(implied[i], span, i);
    std::size_t r = rank(span);

    RowEchelon kr = rref(ker.transpose());
    for (std::size_t i = 0; i < kr.reduced.rows(); ++i) {
      QMatrix trial = QMatrix::vcat(span, kr.reduced.block(i, 0, 1, ys.size()));
      std::size_t tr = rank(trial);
      if (tr > r) {
        found.push_back(poly_in_y(ys, kr.reduced.transpose(), i, m));
        found_deg.push_back(d);
        span = std::move(trial);
        r = tr;
      }
    }
  }
  return found;
}

Poly express_in_generators(const Poly& f, const HilbertMap& h) {
  const std::size_t m = h.size(), dim = h.phase_dim;
  if (f.nvars() != dim) throw DimensionError("polynomial lives in another space");
  Poly out(m);
  ProductCache products(h.generators, dim);
  for (int d = 0; d <= std::max(f.degree(), 0); ++d) {
    Poly fd = f.homogeneous_component(d);
    if (fd.is_zero()) continue;
    if (d == 0) {
      out += Poly::constant(m, fd.coefficient(Exponents(dim, 0)));
      continue;
    }
    auto ys = weighted_monomials(h.degrees, d);
    MonomialIndex idx(dim, d);
    QMatrix a(idx.size(), ys.size()), b(idx.size(), 1);
    for (std::size_t j = 0; j < ys.size(); ++j) idx.write_col(products.get(ys[j]), a, j);
    idx.write_col(fd, b, 0);
    auto sol = ys.empty() ? std::nullopt : solve(a, b);
    if (!sol)
      throw ExpressibilityError("degree-" + std::to_string(d) + " part is not a polynomial in the generators");
    out += poly_in_y(ys, *sol, 0, m);
  }
  return out;
}

Eigen::MatrixXd PoissonStructure::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::span<const double> x(y.data(), static_cast<std::size_t>(y.size()));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = entries[i * m + j].evaluate(x);
  return out;
}

PoissonStructure reduced_structure_matrix(const HilbertMap& h, const symplin::SymplecticSpace& s) {
  PoissonStructure out;
  out.m = h.size();
  out.entries.assign(out.m * out.m, Poly(out.m));
  for (std::size_t i = 0; i < out.m; ++i)
    for (std::size_t j = i + 1; j < out.m; ++j) {
      Poly e = express_in_generators(poisson_bracket(h.generators[i], h.generators[j], s), h);
      out.entries[j * out.m + i] = -e;
      out.entries[i * out.m + j] = std::move(e);
    }
  return out;
}

StructureChecks check_structure(const HilbertMap& h, const PoissonStructure& lambda, const groups::Group& g,
                                const groups::MomentumMap& f, const symplin::SymplecticSpace& s) {
  const std::size_t m = h.size();
  StructureChecks c;
  c.antisymmetric = true;
  c.substitution_exact = true;
  c.closure_invariant = true;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (!(lambda(i, j) == -lambda(j, i))) c.antisymmetric = false;
      Poly br = poisson_bracket(h.generators[i], h.generators[j], s);
      if (!(lambda(i, j).substitute(h.generators) == br)) c.substitution_exact = false;
      if (i < j && !is_invariant(br, g)) c.closure_invariant = false;
    }

  // Jacobi on the y side, pulled back along p.
  c.jacobi_exact = true;
  std::vector<Poly> dl;  // d Lambda_ij / d y_l, index (i m + j) m + l
  for (std::size_t i = 0; i < m * m; ++i)
    for (std::size_t l = 0; l < m; ++l) dl.push_back(lambda.entries[i].derivative(l));
  auto term = [&](std::size_t a, std::size_t b, std::size_t cc) {
    Poly t(m);
    for (std::size_t l = 0; l < m; ++l) t += lambda(a, l) * dl[(b * m + cc) * m + l];
    return t;
  };
  for (std::size_t i = 0; i < m && c.jacobi_exact; ++i)
    for (std::size_t j = i + 1; j < m && c.jacobi_exact; ++j)
      for (std::size_t k = j + 1; k < m && c.jacobi_exact; ++k) {
        Poly jac = term(i, j, k) + term(j, k, i) + term(k, i, j);
        if (!jac.substitute(h.generators).is_zero()) c.jacobi_exact = false;
      }

  c.noether_exact = true;
  for (const auto& p : h.generators)
    for (const auto& fa : f.components)
      if (!poisson_bracket(p, fa, s).is_zero()) c.noether_exact = false;
  return c;
}

IdealDiagnostic poisson_ideal_diagnostic(const Poly& f, const groups::MomentumMap& mm,
                                         const std::vector<Eigen::VectorXd>& samples,
                                         const symplin::SymplecticSpace& s, const std::optional<Poly>& extra) {
  const std::size_t dim = s.dim();
  if (f.nvars() != dim) throw DimensionError("polynomial lives in another space");
  const Poly norm2 = mm.norm_squared();
  std::vector<Poly> family{norm2, f * norm2};
  for (std::size_t a = 0; a < mm.algebra_dim(); ++a)
    for (std::size_t b = a; b < mm.algebra_dim(); ++b) family.push_back(mm.components[a] * mm.components[b]);
  if (extra) family.push_back(*extra);

  IdealDiagnostic out;
  out.test_functions = family.size();
  for (const auto& h : family) {
    for (const auto& v : samples) {
      std::span<const double> x(v.data(), static_cast<std::size_t>(v.size()));
      const double scale = 1.0 + std::pow(v.norm(), std::max(h.degree(), 0));
      if (std::abs(h.evaluate(x)) > 1e-9 * scale)
        throw PreconditionError("test function does not vanish on the zero level: " +
                                to_string(h, phase_space_names(s.half_dim())));
    }
    Poly br = poisson_bracket(f, h, s);
    for (const auto& v : samples) {
      std::span<const double> x(v.data(), static_cast<std::size_t>(v.size()));
      out.max_residual = std::max(out.max_residual, std::abs(br.evaluate(x)));
    }
  }
  Poly br = poisson_bracket(f, norm2, s);
  out.exact_membership = mm.components.empty() ? br.is_zero() : divide(br, mm.components).remainder.is_zero();
  return out;
}

nlohmann::json to_json(const HilbertMap& h) {
  auto names = phase_space_names(h.phase_dim / 2);
  auto ynames = generator_names(h.size());
  nlohmann::json j;
  j["generators"] = nlohmann::json::array();
  for (std::size_t i = 0; i < h.size(); ++i)
    j["generators"].push_back({{"name", ynames[i]}, {"degree", h.degrees[i]}, {"poly", to_string(h.generators[i], names)}});
  j["degree_bound"] = h.degree_bound;
  j["complete_up_to_bound"] = h.complete;
  j["degree_counts"] = nlohmann::json::array();
  for (const auto& c : h.counts) {
    nlohmann::json e{{"degree", c.degree}, {"invariant_dim", c.invariant_dim}, {"product_dim", c.product_dim}};
    e["expected"] = c.expected ? nlohmann::json(c.expected->get_str()) : nlohmann::json(nullptr);
    j["degree_counts"].push_back(e);
  }
  j["relations"] = nlohmann::json::array();
  for (const auto& r : h.relations) j["relations"].push_back(to_string(r, ynames));
  return j;
}

nlohmann::json to_json(const PoissonStructure& p) {
  auto ynames = generator_names(p.m);
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < p.m; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < p.m; ++k) row.push_back(to_string(p(i, k), ynames));
    j.push_back(row);
  }
  return j;
}

}  // namespace symred::invariants
