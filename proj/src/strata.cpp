#include "symred/strata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "symred/errors.hpp"

namespace symred::strata {

namespace {

using groups::Subgroup;

QMatrix canonical_basis(const QMatrix& cols) {
  if (cols.cols() == 0) return QMatrix(cols.rows(), 0);
  RowEchelon e = rref(cols.transpose());
  if (e.reduced.rows() == 0) return QMatrix(cols.rows(), 0);
  return e.reduced.transpose();
}

bool fixes(const QMatrix& g, const QMatrix& basis) {
  if (basis.cols() == 0) return true;
  return (g * basis - basis).is_zero();
}

std::size_t rank_of(const QMatrix& m) { return m.cols() == 0 || m.rows() == 0 ? 0 : rank(m); }

bool contained_in(const QMatrix& small, const QMatrix& big) {
  if (small.cols() == 0) return true;
  if (big.cols() == 0) return false;
  return rank_of(QMatrix::hcat(big, small)) == rank_of(big);
}

Eigen::VectorXd newton_to_zero(const groups::MomentumMap& f, Eigen::VectorXd v, bool& ok) {
  ok = false;
  int polish = 0;
  for (int it = 0; it <= 100; ++it) {
    Eigen::VectorXd fv = f.evaluate(v);
    if (fv.norm() <= 1e-12 && !ok) {
      ok = true;
      polish = 2;
    }
    if (ok && (polish-- == 0 || fv.norm() == 0.0)) return v;
    if (it == 100) break;
    Eigen::MatrixXd j = f.jacobian(v);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    Eigen::VectorXd next = v - svd.solve(fv);
    if (ok && f.evaluate(next).norm() > fv.norm()) return v;
    v = next;
  }
  return v;
}

Eigen::VectorXd ball_point(std::mt19937_64& rng, Eigen::Index d, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
  return v.norm() > 0 ? Eigen::VectorXd(v * (r / v.norm())) : v;
}

std::vector<std::size_t> bits_to_support(unsigned long mask, std::size_t n) {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < n; ++j)
    if (mask & (1UL << j)) s.push_back(j);
  return s;
}

std::vector<IntVector> weight_columns(const groups::Torus& t) {
  std::vector<IntVector> cols;
  for (std::size_t j = 0; j < t.n(); ++j) cols.push_back(t.column(j));
  return cols;
}

bool in_lattice(const IntMatrix& hnf, const IntVector& v, std::size_t k) {
  IntMatrix rows = hnf;
  rows.push_back(v);
  return hermite_normal_form(rows, k) == hnf;
}

// Exact generic point of V^H whose stabilizer is exactly the stratum's class.
QMatrix finite_stratum_point(const groups::FiniteGroup& g, const StratumDescriptor& d, std::mt19937_64& rng) {
  const std::size_t dim = g.dim(), fd = d.fixed_space.cols();
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int attempt = 0; attempt < 64; ++attempt) {
    QMatrix c(fd, 1);
    for (std::size_t i = 0; i < fd; ++i) {
      int x = 0;
      while (x == 0) x = coef(rng);
      c(i, 0) = x;
    }
    QMatrix v = fd == 0 ? QMatrix(dim, 1) : d.fixed_space * c;
    if (groups::canonical_conjugate(g, groups::exact_isotropy(g, v)) == d.subgroup) return v;
  }
  throw ConvergenceError("no generic point found in the fixed space of " + d.isotropy_class);
}

Eigen::VectorXd torus_point(const groups::Torus& t, const std::vector<Rational>& r_full, std::mt19937_64& rng) {
  const std::size_t n = t.n();
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n));
  for (std::size_t j = 0; j < n; ++j) {
    const double mod = std::sqrt(r_full[j].get_d());
    const double ph = phase(rng);
    v(j) = mod * std::cos(ph);
    v(n + j) = mod * std::sin(ph);
  }
  return v;
}

std::vector<Rational> expand(const std::vector<Rational>& r, const std::vector<std::size_t>& support, std::size_t n) {
  std::vector<Rational> full(n, Rational(0));
  for (std::size_t i = 0; i < support.size(); ++i) full[support[i]] = r[i];
  return full;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m) { return symplin::Subspace::span(m).basis(); }

// Integer basis (columns of a k x m matrix) of the isotropy algebra of a support.
Eigen::MatrixXd torus_isotropy_algebra(const groups::Torus& t, const std::vector<std::size_t>& support) {
  IntMatrix rows;
  for (std::size_t j : support) rows.push_back(t.column(j));
  IntMatrix ker = integer_kernel(rows, t.rank());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rank()), static_cast<Eigen::Index>(ker.size()));
  for (std::size_t c = 0; c < ker.size(); ++c)
    for (std::size_t a = 0; a < t.rank(); ++a) m(a, c) = ker[c][a].get_d();
  return m;
}

Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& gens, const Eigen::VectorXd& xi) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(gens.front().rows(), gens.front().cols());
  for (std::size_t a = 0; a < gens.size(); ++a) x += xi(a) * gens[a];
  return x;
}

double action_scale(const groups::Group& g, const Eigen::VectorXd& x) {
  double gen = 1.0;
  for (const auto& m : g.float_generators()) gen = std::max(gen, m.norm());
  return gen * std::max(1.0, x.norm());
}

std::string dims_only_id() { return "dims-only"; }

}  // namespace

SamplerResult zero_level_sampler(const groups::MomentumMap& f, std::size_t count, double radius, std::uint64_t seed) {
  if (radius <= 0) throw PreconditionError("sampler radius must be positive");
  std::mt19937_64 rng(seed);
  SamplerResult out;
  out.requested = count;
  const auto d = static_cast<Eigen::Index>(f.phase_dim);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd v = ball_point(rng, d, radius);
    if (f.algebra_dim() > 0) {
      bool ok = false;
      v = newton_to_zero(f, v, ok);
      if (!ok) {
        ++out.shortfall;
        continue;
      }
      if (v.norm() > radius) v *= radius / v.norm();
    }
    out.points.push_back(std::move(v));
  }
  return out;
}

std::vector<QMatrix> fixed_space_lattice(const groups::FiniteGroup& g, const Subgroup& elements) {
  const std::size_t d = g.dim();
  std::set<QMatrix> seen;
  std::vector<QMatrix> out;
  std::vector<QMatrix> queue{QMatrix::identity(d)};
  seen.insert(queue.front());
  while (!queue.empty()) {
    QMatrix l = queue.back();
    queue.pop_back();
    out.push_back(l);
    if (l.cols() == 0) continue;
    for (std::size_t e : elements) {
      QMatrix c = nullspace((g.element(e) - QMatrix::identity(d)) * l);
      QMatrix k = canonical_basis(c.cols() == 0 ? QMatrix(d, 0) : l * c);
      if (k.cols() < l.cols() && seen.insert(k).second) queue.push_back(k);
    }
  }
  std::sort(out.begin(), out.end(), [](const QMatrix& a, const QMatrix& b) {
    return a.cols() != b.cols() ? a.cols() > b.cols() : a < b;
  });
  return out;
}

std::optional<std::vector<Rational>> positive_support_vector(const std::vector<IntVector>& columns,
                                                             const std::vector<std::size_t>& support) {
  const std::size_t m = support.size();
  if (m == 0) return std::vector<Rational>{};
  if (m > 20) throw PreconditionError("support too large for circuit enumeration");
  const std::size_t k = columns.front().size();
  std::vector<Rational> r(m, Rational(0));
  unsigned long covered = 0;
  const unsigned long all = (1UL << m) - 1;
  for (unsigned long mask = 1; mask <= all && covered != all; ++mask) {
    std::vector<std::size_t> idx = bits_to_support(mask, m);
    QMatrix a(k, idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c)
      for (std::size_t i = 0; i < k; ++i) a(i, c) = Rational(columns[support[idx[c]]][i]);
    QMatrix ker = nullspace(a);
    if (ker.cols() != 1) continue;
    int sign = 0;
    bool circuit = true;
    for (std::size_t c = 0; c < idx.size() && circuit; ++c) {
      int s = sgn(ker(c, 0));
      if (s == 0 || (sign != 0 && s != sign)) circuit = false;
      sign = s;
    }
    if (!circuit) continue;
    for (std::size_t c = 0; c < idx.size(); ++c) r[idx[c]] += abs(ker(c, 0));
    covered |= mask;
  }
  if (covered != all) return std::nullopt;
  return r;
}

std::size_t Stratification::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < strata.size(); ++i)
    if (strata[i].isotropy_class == id) return i;
  throw PreconditionError("isotropy class " + id + " is not realized");
}

Stratification enumerate_strata(const groups::Group& g, const symplin::SymplecticSpace& s, const groups::MomentumMap&) {
  Stratification st;
  const std::size_t dim = s.dim();
  std::map<std::string, StratumDescriptor> found;

  if (g.is_finite()) {
    const auto& fg = g.finite();
    Subgroup all(fg.order());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (const auto& l : fixed_space_lattice(fg, all)) {
      Subgroup k;
      for (std::size_t e = 0; e < fg.order(); ++e)
        if (fixes(fg.element(e), l)) k.push_back(e);
      Subgroup rep = groups::canonical_conjugate(fg, k);
      std::string id = groups::subgroup_id(rep);
      if (found.count(id)) continue;
      StratumDescriptor d;
      d.isotropy_class = id;
      d.subgroup = rep;
      d.fixed_space = groups::fixed_space(fg, rep);
      d.fixed_dim = d.fixed_space.cols();
      d.stratum_dim = d.fixed_dim;
      d.slice_rep = {{"kind", "finite"}, {"isotropy_order", rep.size()}, {"slice_dim", dim},
                     {"trivial_part_dim", d.fixed_dim}};
      found.emplace(id, std::move(d));
    }
    for (const auto& h : groups::subgroup_classes(fg)) {
      std::string id = groups::subgroup_id(h);
      st.classes.push_back({id, "order " + std::to_string(h.size()), found.count(id) > 0});
    }
  } else if (g.is_torus()) {
    const auto& t = g.torus();
    const std::size_t n = t.n(), k = t.rank();
    if (n > 16) throw PreconditionError("support enumeration limited to n <= 16");
    auto cols = weight_columns(t);
    std::map<std::string, ClassInfo> classes;
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
      auto support = bits_to_support(mask, n);
      auto iso = groups::torus_isotropy_of_support(t, support);
      std::string id = groups::lattice_id(iso.lattice, iso.finite_factors);
      bool realized = positive_support_vector(cols, support).has_value();
      auto& ci = classes[id];
      if (ci.id.empty()) {
        ci.id = id;
        std::ostringstream os;
        os << "isotropy dim " << iso.dimension << ", " << iso.finite_factors.size() << " finite factor(s)";
        ci.description = os.str();
      }
      ci.realized = ci.realized || realized;
      if (!realized) continue;
      auto it = found.find(id);
      if (it == found.end()) {
        StratumDescriptor d;
        d.isotropy_class = id;
        d.torus_isotropy = iso;
        std::vector<std::size_t> fixed_coords;
        for (std::size_t j = 0; j < n; ++j)
          if (in_lattice(iso.lattice, cols[j], k)) fixed_coords.push_back(j);
        d.fixed_space = QMatrix(dim, 2 * fixed_coords.size());
        for (std::size_t c = 0; c < fixed_coords.size(); ++c) {
          d.fixed_space(fixed_coords[c], c) = 1;
          d.fixed_space(n + fixed_coords[c], fixed_coords.size() + c) = 1;
        }
        d.fixed_dim = 2 * fixed_coords.size();
        d.stratum_dim = d.fixed_dim - 2 * iso.lattice.size();
        std::vector<std::string> factors;
        for (const auto& f : iso.finite_factors) factors.push_back(f.get_str());
        d.slice_rep = {{"kind", "torus"},
                       {"isotropy_dim", iso.dimension},
                       {"finite_factors", factors},
                       {"slice_dim", 2 * (n - support.size()) + 2 * support.size() - 2 * iso.lattice.size()},
                       {"trivial_part_dim", 2 * support.size() - 2 * iso.lattice.size()}};
        it = found.emplace(id, std::move(d)).first;
      }
      it->second.supports.push_back(support);
    }
    for (auto& [id, ci] : classes) st.classes.push_back(ci);
  } else {
    throw PreconditionError("stratification is computed for finite groups and tori");
  }

  for (auto& [id, d] : found) st.strata.push_back(std::move(d));
  std::stable_sort(st.strata.begin(), st.strata.end(), [](const StratumDescriptor& a, const StratumDescriptor& b) {
    return a.stratum_dim != b.stratum_dim ? a.stratum_dim < b.stratum_dim : a.isotropy_class < b.isotropy_class;
  });

  const std::size_t m = st.strata.size();
  st.below.assign(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto& a = st.strata[i];
      const auto& b = st.strata[j];
      if (g.is_finite()) {
        const auto& fg = g.finite();
        for (std::size_t x = 0; x < fg.order() && !st.below[i][j]; ++x)
          if (contained_in(fg.element(x) * a.fixed_space, b.fixed_space)) st.below[i][j] = true;
      } else {
        bool support_order = false;
        for (const auto& sa : a.supports)
          for (const auto& sb : b.supports)
            if (sa.size() < sb.size() && std::includes(sb.begin(), sb.end(), sa.begin(), sa.end())) support_order = true;
        st.below[i][j] = support_order && contained_in(a.fixed_space, b.fixed_space);
      }
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (!st.below[i][j]) continue;
      st.strata[i].closure_neighbors.push_back(st.strata[j].isotropy_class);
      bool covering = true;
      for (std::size_t l = 0; l < m && covering; ++l)
        if (st.below[i][l] && st.below[l][j]) covering = false;
      if (covering) st.hasse.emplace_back(i, j);
    }
  return st;
}

Eigen::VectorXd stratum_point(const groups::Group& g, const StratumDescriptor& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (g.is_finite()) return finite_stratum_point(g.finite(), d, rng).to_eigen();
  if (!g.is_torus()) throw PreconditionError("stratum points need a finite group or a torus");
  const auto& t = g.torus();
  const auto& support = d.supports.front();
  auto r = positive_support_vector(weight_columns(t), support);
  return torus_point(t, expand(*r, support, t.n()), rng);
}

FrontierReport frontier_diagnostic(const groups::Group& g, const Stratification& st, std::uint64_t seed) {
  FrontierReport rep;
  std::mt19937_64 rng(seed);
  const std::size_t m = st.strata.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (!st.below[i][j]) continue;
      ++rep.pairs_checked;
      const auto& lo = st.strata[i];
      const auto& hi = st.strata[j];
      bool ok = false;
      if (g.is_finite()) {
        const auto& fg = g.finite();
        QMatrix x = finite_stratum_point(fg, lo, rng);
        std::size_t mover = 0;
        for (std::size_t e = 0; e < fg.order(); ++e)
          if (contained_in(fg.element(e) * lo.fixed_space, hi.fixed_space)) {
            mover = e;
            break;
          }
        QMatrix limit = fg.element(mover) * x;
        QMatrix y = finite_stratum_point(fg, hi, rng);
        QMatrix path = limit + Rational(1, 1000) * y;
        Subgroup hp = groups::exact_isotropy(fg, path);
        Subgroup hl = groups::exact_isotropy(fg, limit);
        bool contains = false;
        for (std::size_t e = 0; e < fg.order() && !contains; ++e)
          contains = groups::subgroup_contains(hl, groups::conjugate(fg, hp, e));
        ok = groups::subgroup_id(groups::canonical_conjugate(fg, hp)) == hi.isotropy_class && contains &&
             hl.size() > hp.size();
      } else {
        const auto& t = g.torus();
        auto cols = weight_columns(t);
        for (const auto& sa : lo.supports) {
          for (const auto& sb : hi.supports) {
            if (!(sa.size() < sb.size() && std::includes(sb.begin(), sb.end(), sa.begin(), sa.end()))) continue;
            auto ra = expand(*positive_support_vector(cols, sa), sa, t.n());
            auto rb = expand(*positive_support_vector(cols, sb), sb, t.n());
            std::vector<Rational> rt(t.n());
            for (std::size_t q = 0; q < t.n(); ++q) rt[q] = ra[q] + Rational(1, 1000000) * rb[q];
            std::mt19937_64 phase_rng = rng;
            Eigen::VectorXd limit = torus_point(t, ra, phase_rng);
            phase_rng = rng;
            Eigen::VectorXd path = torus_point(t, rt, phase_rng);
            rng.discard(1);
            auto hl = groups::torus_isotropy(t, limit);
            auto hp = groups::torus_isotropy(t, path);
            bool contains = true;  // H_limit contains H_path iff L_limit is inside L_path
            for (const auto& row : hl.lattice) contains = contains && in_lattice(hp.lattice, row, t.rank());
            ok = groups::lattice_id(hp.lattice, hp.finite_factors) == hi.isotropy_class &&
                 groups::lattice_id(hl.lattice, hl.finite_factors) == lo.isotropy_class && contains;
            break;
          }
          if (ok) break;
        }
      }
      if (!ok) {
        ++rep.failures;
        rep.messages.push_back("frontier check failed for " + lo.isotropy_class + " below " + hi.isotropy_class);
      }
    }
  return rep;
}

Eigen::VectorXd SliceModel::slice_momentum(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(slice_hessians.size()));
  for (std::size_t i = 0; i < slice_hessians.size(); ++i) out(i) = 0.5 * w.dot(slice_hessians[i] * w);
  return out;
}

std::size_t SliceModel::trivial_part_dim() const {
  const auto w = static_cast<Eigen::Index>(slice.dim());
  if (slice_generators.empty() || w == 0) return slice.dim();
  Eigen::MatrixXd stacked(w * static_cast<Eigen::Index>(slice_generators.size()), w);
  for (std::size_t i = 0; i < slice_generators.size(); ++i)
    stacked.block(static_cast<Eigen::Index>(i) * w, 0, w, w) = slice_generators[i];
  return static_cast<std::size_t>(symplin::numerical_nullspace(stacked, symplin::kRankRelTol, 1.0).cols());
}

SliceModel slice_model(const Eigen::VectorXd& x, const groups::Group& g, const symplin::SymplecticSpace& s,
                       const groups::MomentumMap& f, double tol) {
  if (static_cast<std::size_t>(x.size()) != s.dim()) throw DimensionError("base point has wrong dimension");
  if (f.algebra_dim() > 0 && f.evaluate(x).norm() > 1e-10)
    throw PreconditionError("base point is not on the zero level of the momentum map");
  SliceModel out;
  out.base_point = x;
  const std::size_t d = s.dim();
  if (g.is_finite()) {
    out.stabilizer = groups::finite_isotropy(g.finite(), x, tol);
    out.isotropy_class = groups::subgroup_id(groups::canonical_conjugate(g.finite(), out.stabilizer));
    out.slice = symplin::Subspace::full(d);
    out.isotropy_algebra = Eigen::MatrixXd(0, 0);
    return out;
  }
  const auto k = static_cast<Eigen::Index>(g.algebra_dim());
  Eigen::MatrixXd tangent(static_cast<Eigen::Index>(d), k);
  for (Eigen::Index a = 0; a < k; ++a) tangent.col(a) = g.float_generators()[a] * x;
  symplin::Subspace orbit = symplin::Subspace::span(tangent, symplin::kRankRelTol, action_scale(g, x));
  auto j = symplin::adapted_complex_structure(s, Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  auto split = symplin::constant_rank_split(orbit, s, j);
  out.slice = split.N;
  out.orbit_dim = orbit.dim();
  out.nu_dim = split.nu.dim();
  if (!symplin::is_symplectic_subspace(out.slice, s)) throw AmbiguityError("slice is not a symplectic subspace");

  Eigen::MatrixXd h;
  if (g.is_torus()) {
    out.torus_isotropy = groups::torus_isotropy(g.torus(), x, tol);
    out.isotropy_class = groups::lattice_id(out.torus_isotropy.lattice, out.torus_isotropy.finite_factors);
    h = torus_isotropy_algebra(g.torus(), out.torus_isotropy.support);
  } else {
    h = groups::algebra_isotropy(g, x).basis();
  }
  out.isotropy_algebra = h.cols() > 0 ? orthonormal_columns(h) : Eigen::MatrixXd(k, 0);
  out.isotropy_algebra_dim = static_cast<std::size_t>(out.isotropy_algebra.cols());

  const Eigen::MatrixXd& b = out.slice.basis();
  for (Eigen::Index c = 0; c < out.isotropy_algebra.cols(); ++c) {
    Eigen::MatrixXd xm = combine(g.float_generators(), out.isotropy_algebra.col(c));
    Eigen::MatrixXd image = xm * b;
    if (b.cols() > 0 && (image - b * (b.transpose() * image)).norm() > 1e-8 * std::max(1.0, xm.norm()))
      throw ConvergenceError("isotropy action does not preserve the slice");
    out.slice_generators.push_back(b.transpose() * image);
    out.slice_hessians.push_back(b.transpose() * xm.transpose() * s.omega() * b);
  }
  return out;
}

LocalModelReport local_model_match(const Eigen::VectorXd& x, const groups::Group& g, const symplin::SymplecticSpace& s,
                                   const groups::MomentumMap& f, const Stratification* st, double tol) {
  LocalModelReport rep;
  const std::size_t dim = s.dim();
  if (g.is_finite()) {
    if (!st) throw PreconditionError("local model comparison needs the global stratification");
    const auto& fg = g.finite();
    Subgroup h = groups::finite_isotropy(fg, x, tol);
    std::set<std::pair<std::string, std::size_t>> local, global;
    for (const auto& l : fixed_space_lattice(fg, h)) {
      Subgroup k;
      for (std::size_t e : h)
        if (fixes(fg.element(e), l)) k.push_back(e);
      local.emplace(groups::subgroup_id(groups::canonical_conjugate(fg, k)), l.cols());
    }
    for (const auto& d : st->strata) {
      Eigen::MatrixXd basis = d.fixed_space.to_eigen();
      symplin::Subspace v = d.fixed_dim == 0 ? symplin::Subspace(dim) : symplin::Subspace::span(basis);
      for (std::size_t e = 0; e < fg.order(); ++e) {
        Eigen::VectorXd y = fg.float_elements()[fg.inverse(e)] * x;
        if (v.distance(y) <= tol * std::max(1.0, x.norm())) {
          global.emplace(d.isotropy_class, d.stratum_dim);
          break;
        }
      }
    }
    rep.slice_side.assign(local.begin(), local.end());
    rep.global_side.assign(global.begin(), global.end());
    rep.match = local == global;
    rep.details = {{"isotropy_order", h.size()}, {"slice_dim", dim}};
    return rep;
  }

  SliceModel sm = slice_model(x, g, s, f, tol);
  if (g.is_torus()) {
    if (!st) throw PreconditionError("local model comparison needs the global stratification");
    const auto& t = g.torus();
    const std::size_t n = t.n(), k = t.rank();
    auto cols = weight_columns(t);
    const auto& iso = sm.torus_isotropy;
    const std::size_t r = iso.lattice.size();
    std::vector<std::size_t> outside;
    for (std::size_t j = 0; j < n; ++j)
      if (!std::binary_search(iso.support.begin(), iso.support.end(), j)) outside.push_back(j);
    const std::size_t trivial = sm.trivial_part_dim();
    const bool dims_consistent = sm.slice.dim() == dim - sm.orbit_dim - sm.nu_dim &&
                                 trivial + 2 * outside.size() == sm.slice.dim();

    // Weights of the isotropy identity component on the moving part of W.
    IntMatrix support_rows;
    for (std::size_t j : iso.support) support_rows.push_back(cols[j]);
    IntMatrix hbasis = integer_kernel(support_rows, k);
    std::vector<IntVector> projected;
    for (std::size_t j : outside) {
      IntVector b;
      for (const auto& xi : hbasis) {
        mpz_class dot = 0;
        for (std::size_t a = 0; a < k; ++a) dot += xi[a] * cols[j][a];
        b.push_back(dot);
      }
      projected.push_back(b);
    }
    std::set<std::pair<std::string, std::size_t>> local, global;
    if (outside.size() > 16) throw PreconditionError("support enumeration limited to 16 coordinates");
    for (unsigned long mask = 0; mask < (1UL << outside.size()); ++mask) {
      auto sub = bits_to_support(mask, outside.size());
      bool realized = hbasis.empty() || sub.empty() ||
                      positive_support_vector(projected, sub).has_value();
      if (!realized) continue;
      IntMatrix rows = support_rows;
      for (std::size_t q : sub) rows.push_back(cols[outside[q]]);
      IntMatrix lat = hermite_normal_form(rows, k);
      std::vector<mpz_class> factors;
      for (const auto& fct : smith_invariant_factors(rows, k))
        if (fct > 1) factors.push_back(fct);
      std::size_t fixed_outside = 0;
      for (std::size_t j : outside)
        if (in_lattice(lat, cols[j], k)) ++fixed_outside;
      local.emplace(groups::lattice_id(lat, factors), trivial + 2 * fixed_outside - 2 * (lat.size() - r));
    }
    for (const auto& d : st->strata)
      for (const auto& sp : d.supports)
        if (std::includes(sp.begin(), sp.end(), iso.support.begin(), iso.support.end())) {
          global.emplace(d.isotropy_class, d.stratum_dim);
          break;
        }
    rep.slice_side.assign(local.begin(), local.end());
    rep.global_side.assign(global.begin(), global.end());
    rep.match = dims_consistent && local == global;
    rep.details = {{"orbit_dim", sm.orbit_dim}, {"nu_dim", sm.nu_dim}, {"slice_dim", sm.slice.dim()},
                   {"trivial_part_dim", trivial}, {"dims_consistent", dims_consistent}};
    return rep;
  }

  // Nonabelian algebra data: compare dimensions only.
  rep.partial = true;
  const auto k = static_cast<Eigen::Index>(g.algebra_dim());
  const Eigen::MatrixXd& hb = sm.isotropy_algebra;
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd fixed_basis;
  if (hb.cols() == 0) {
    fixed_basis = Eigen::MatrixXd::Identity(d, d);
  } else {
    Eigen::MatrixXd stacked(d * hb.cols(), d);
    for (Eigen::Index c = 0; c < hb.cols(); ++c) stacked.block(c * d, 0, d, d) = combine(g.float_generators(), hb.col(c));
    fixed_basis = symplin::numerical_nullspace(stacked, symplin::kRankRelTol, 1.0);
  }
  const auto fixed_dim = static_cast<std::size_t>(fixed_basis.cols());
  std::size_t level_dim = fixed_dim;
  if (fixed_dim > 0) {
    Eigen::MatrixXd jr = f.jacobian(x) * fixed_basis;
    level_dim -= symplin::numerical_rank(Eigen::JacobiSVD<Eigen::MatrixXd>(jr).singularValues(), symplin::kRankRelTol,
                                         std::max(1.0, x.norm()));
  }
  // Normalizer of the isotropy algebra and its orbit directions at x.
  auto c = g.structure_tensor();
  Eigen::MatrixXd perp = Eigen::MatrixXd::Identity(k, k) - hb * hb.transpose();
  Eigen::MatrixXd cond(k * std::max<Eigen::Index>(hb.cols(), 1), k);
  cond.setZero();
  for (Eigen::Index i = 0; i < hb.cols(); ++i)
    for (Eigen::Index a = 0; a < k; ++a) {
      Eigen::VectorXd ea = Eigen::VectorXd::Unit(k, a);
      cond.block(i * k, a, k, 1) = perp * c.bracket(ea, hb.col(i));
    }
  Eigen::MatrixXd normalizer =
      hb.cols() == 0 ? Eigen::MatrixXd::Identity(k, k) : symplin::numerical_nullspace(cond, symplin::kRankRelTol, 1.0);
  Eigen::MatrixXd dirs(d, std::max<Eigen::Index>(normalizer.cols(), 1));
  dirs.setZero();
  for (Eigen::Index i = 0; i < normalizer.cols(); ++i) dirs.col(i) = combine(g.float_generators(), normalizer.col(i)) * x;
  const std::size_t orbit_n = symplin::Subspace::span(dirs, symplin::kRankRelTol, action_scale(g, x)).dim();
  const std::size_t ambient = level_dim - orbit_n;
  const std::size_t trivial = sm.trivial_part_dim();
  const bool dims_consistent = sm.slice.dim() == dim - sm.orbit_dim - sm.nu_dim;
  rep.slice_side = {{dims_only_id(), trivial}};
  rep.global_side = {{dims_only_id(), ambient}};
  rep.match = dims_consistent && trivial == ambient;
  rep.details = {{"orbit_dim", sm.orbit_dim},
                 {"nu_dim", sm.nu_dim},
                 {"slice_dim", sm.slice.dim()},
                 {"isotropy_algebra_dim", sm.isotropy_algebra_dim},
                 {"fixed_space_dim", fixed_dim},
                 {"trivial_part_dim", trivial},
                 {"stratum_dim_at_point", ambient},
                 {"dim_minus_twice_orbit_plus_nu", static_cast<long>(dim) - 2 * static_cast<long>(sm.orbit_dim) +
                                                       static_cast<long>(sm.nu_dim)}};
  return rep;
}

MwmReport mwm_stratum(const groups::Group& g, const symplin::SymplecticSpace& s, const groups::MomentumMap& f,
                      const Stratification& st, std::size_t index, std::uint64_t seed) {
  if (index >= st.strata.size()) throw PreconditionError("subgroup is not realized as an isotropy class");
  const auto& d = st.strata[index];
  MwmReport rep;
  rep.isotropy_class = d.isotropy_class;
  rep.fixed_dim = d.fixed_dim;
  std::mt19937_64 rng(seed);
  if (g.is_finite()) {
    const auto& fg = g.finite();
    Subgroup n = groups::normalizer(fg, d.subgroup);
    rep.normalizer_order = n.size();
    QMatrix v = finite_stratum_point(fg, d, rng);
    Subgroup stab;
    for (std::size_t e : n)
      if (fg.element(e) * v == v) stab.push_back(e);
    rep.free_action = stab == d.subgroup;
    std::set<QMatrix> via_group, via_normalizer;
    for (std::size_t e = 0; e < fg.order(); ++e) {
      QMatrix w = fg.element(e) * v;
      bool in_fixed = true;
      for (std::size_t h : d.subgroup) in_fixed = in_fixed && (fg.element(h) * w == w);
      if (in_fixed) via_group.insert(w);
    }
    for (std::size_t e : n) via_normalizer.insert(fg.element(e) * v);
    rep.representatives_checked = true;
    rep.representatives_agree = via_group == via_normalizer && *via_group.begin() == *via_normalizer.begin();
    rep.reduced_dim = rep.fixed_dim;
    rep.matches_stratum = rep.free_action && rep.representatives_agree && rep.reduced_dim == d.stratum_dim;
    return rep;
  }
  if (!g.is_torus()) throw PreconditionError("per-stratum reduction is computed for finite groups and tori");
  const auto& t = g.torus();
  const auto k = static_cast<Eigen::Index>(t.rank());
  const std::size_t n = t.n();
  Eigen::VectorXd x = stratum_point(g, d, seed);
  const auto& support = d.supports.front();
  Eigen::MatrixXd h = torus_isotropy_algebra(t, support);
  Eigen::MatrixXd hq = h.cols() > 0 ? orthonormal_columns(h) : Eigen::MatrixXd(k, 0);
  Eigen::MatrixXd l = hq.cols() > 0 ? symplin::numerical_nullspace(hq.transpose(), symplin::kRankRelTol, 1.0)
                                    : Eigen::MatrixXd::Identity(k, k);
  rep.quotient_dim = static_cast<std::size_t>(l.cols());
  Eigen::MatrixXd fixed = d.fixed_space.to_eigen();
  Eigen::MatrixXd jac = l.transpose() * f.jacobian(x) * fixed;
  rep.momentum_rank = jac.size() == 0 ? 0
                                      : symplin::numerical_rank(Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues(),
                                                                symplin::kRankRelTol, 1.0);
  Eigen::MatrixXd dirs(x.size(), std::max<Eigen::Index>(l.cols(), 1));
  dirs.setZero();
  for (Eigen::Index c = 0; c < l.cols(); ++c) dirs.col(c) = combine(g.float_generators(), l.col(c)) * x;
  rep.orbit_dim = symplin::Subspace::span(dirs, symplin::kRankRelTol, action_scale(g, x)).dim();
  rep.reduced_dim = rep.fixed_dim - rep.momentum_rank - rep.orbit_dim;
  auto iso = groups::torus_isotropy(t, x);
  rep.free_action = groups::lattice_id(iso.lattice, iso.finite_factors) == d.isotropy_class &&
                    rep.orbit_dim == rep.quotient_dim;

  // Phase normalization: rotate the first support coordinate onto the positive real axis.
  if (k == 1 && !support.empty() && abs(t.weights[0][support.front()]) == 1) {
    rep.representatives_checked = true;
    const std::size_t j0 = support.front();
    const double w0 = t.weights[0][j0].get_d();
    auto normalize = [&](const Eigen::VectorXd& v) {
      const double phase = std::atan2(v(static_cast<Eigen::Index>(n + j0)), v(static_cast<Eigen::Index>(j0)));
      Eigen::VectorXd theta(1);
      theta(0) = phase / w0;  // the element with angle theta rotates coordinate j clockwise by w_j theta
      return Eigen::VectorXd(groups::torus_element(t, theta) * v);
    };
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    Eigen::VectorXd theta(1);
    theta(0) = ang(rng);
    Eigen::VectorXd moved = groups::torus_element(t, theta) * x;
    rep.representatives_agree = (normalize(x) - normalize(moved)).norm() <= 1e-9 * std::max(1.0, x.norm());
  }
  rep.matches_stratum = rep.free_action && rep.reduced_dim == d.stratum_dim &&
                        (!rep.representatives_checked || rep.representatives_agree);
  return rep;
}

LevelSetReport abelian_model_level_set(const groups::Group& g, const SliceModel& slice, const symplin::SymplecticSpace&,
                                       std::size_t samples, std::uint64_t seed) {
  if (g.is_algebra()) throw PreconditionError("the model-space level set is checked for abelian groups only");
  LevelSetReport rep;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto k = static_cast<Eigen::Index>(g.algebra_dim());
  const auto w = static_cast<Eigen::Index>(slice.slice.dim());
  const Eigen::MatrixXd& hb = slice.isotropy_algebra;
  Eigen::MatrixXd ph = k == 0 ? Eigen::MatrixXd(0, 0) : Eigen::MatrixXd(hb * hb.transpose());
  Eigen::MatrixXd pperp = k == 0 ? Eigen::MatrixXd(0, 0) : Eigen::MatrixXd(Eigen::MatrixXd::Identity(k, k) - ph);
  groups::MomentumMap slice_map;
  slice_map.phase_dim = static_cast<std::size_t>(w);
  slice_map.hessians = slice.slice_hessians;
  slice_map.components.assign(slice.slice_hessians.size(), Poly(static_cast<std::size_t>(w)));

  for (std::size_t i = 0; i < samples; ++i) {
    Eigen::VectorXd v = i == 0 ? Eigen::VectorXd::Zero(w) : ball_point(rng, w, 0.1);
    if (i % 2 == 1 && slice_map.algebra_dim() > 0) {
      bool ok = false;
      v = newton_to_zero(slice_map, v, ok);
    }
    Eigen::VectorXd mu = slice.slice_momentum(v);
    Eigen::VectorXd lifted = hb.cols() == 0 ? Eigen::VectorXd::Zero(k) : Eigen::VectorXd(hb * mu);
    // lambda in the annihilator of h, chosen by least squares.
    Eigen::VectorXd lambda = k == 0 ? Eigen::VectorXd() : Eigen::VectorXd(-(pperp * lifted));
    const double residual = k == 0 ? 0.0 : (lambda + lifted).norm();
    if (residual <= 1e-10) {
      ++rep.solutions;
      const double lam = k == 0 ? 0.0 : lambda.norm();
      rep.max_lambda = std::max(rep.max_lambda, lam);
      rep.max_slice_momentum = std::max(rep.max_slice_momentum, mu.size() ? mu.norm() : 0.0);
      if (lam > 1e-10 || (mu.size() && mu.norm() > 1e-10)) ++rep.counterexamples;
    }
    if (k > 0) {
      Eigen::VectorXd delta(k);
      for (Eigen::Index a = 0; a < k; ++a) delta(a) = normal(rng);
      delta *= 1e-3 / delta.norm();
      Eigen::VectorXd lam_shift = pperp * delta;
      const double res_shift = (ph * delta - lifted).norm();
      if (res_shift <= 1e-10 && lam_shift.norm() <= 1e-10 && (mu.size() == 0 || mu.norm() <= 1e-10))
        ++rep.shifted_zero_section_hits;
    }
  }
  return rep;
}

nlohmann::json to_json(const Stratification& st) {
  nlohmann::json j;
  j["strata"] = nlohmann::json::array();
  for (const auto& d : st.strata) {
    nlohmann::json e{{"isotropy_class", d.isotropy_class},
                     {"fixed_space_dim", d.fixed_dim},
                     {"stratum_dim", d.stratum_dim},
                     {"closure_neighbors", d.closure_neighbors},
                     {"slice_rep", d.slice_rep}};
    if (!d.supports.empty()) e["supports"] = d.supports;
    nlohmann::json basis = nlohmann::json::array();
    for (std::size_t c = 0; c < d.fixed_space.cols(); ++c) {
      nlohmann::json col = nlohmann::json::array();
      for (std::size_t r = 0; r < d.fixed_space.rows(); ++r) col.push_back(to_string(d.fixed_space(r, c)));
      basis.push_back(col);
    }
    e["fixed_space_basis"] = basis;
    j["strata"].push_back(e);
  }
  j["classes"] = nlohmann::json::array();
  for (const auto& c : st.classes)
    j["classes"].push_back({{"id", c.id}, {"description", c.description}, {"realized", c.realized}});
  j["hasse"] = nlohmann::json::array();
  for (const auto& [a, b] : st.hasse)
    j["hasse"].push_back({{"lower", st.strata[a].isotropy_class}, {"upper", st.strata[b].isotropy_class}});
  return j;
}

}  // namespace symred::strata
