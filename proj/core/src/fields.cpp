#include "tidal/fields.hpp"

#include <charconv>

#include <cmath>
#include <numbers>

namespace tidal {

const char* to_string(Chart c) { return c == Chart::Cartesian ? "cartesian" : "spherical"; }

MetricField::MetricField(std::string name, Params params, Chart chart, Evaluator evaluator, ChartGuard guard)
    : name_(std::move(name)),
      params_(std::move(params)),
      chart_(chart),
      evaluator_(std::move(evaluator)),
      guard_(std::move(guard)) {}

std::optional<std::string> MetricField::chart_violation(const Vec4<>& x) const {
  for (double c : x)
    if (!std::isfinite(c)) return std::string("non-finite coordinate");
  return guard_ ? guard_(x) : std::nullopt;
}

MetricJet MetricField::evaluate(const Vec4<>& x) const {
  if (auto why = chart_violation(x)) throw ChartError(name_ + ": " + *why);
  return evaluator_(x);
}

PotentialField::PotentialField(std::string name, Params params, Chart chart, Evaluator evaluator,
                               ChartGuard guard)
    : name_(std::move(name)),
      params_(std::move(params)),
      chart_(chart),
      evaluator_(std::move(evaluator)),
      guard_(std::move(guard)) {}

std::optional<std::string> PotentialField::chart_violation(const Vec4<>& x) const {
  for (double c : x)
    if (!std::isfinite(c)) return std::string("non-finite coordinate");
  return guard_ ? guard_(x) : std::nullopt;
}

PotentialJet PotentialField::evaluate(const Vec4<>& x) const {
  if (auto why = chart_violation(x)) throw ChartError(name_ + ": " + *why);
  return evaluator_(x);
}

namespace {

double param(const Params& p, const std::string& key, std::optional<double> fallback = std::nullopt) {
  if (auto it = p.find(key); it != p.end()) {
    if (!std::isfinite(it->second)) throw CatalogError("parameter '" + key + "' must be finite");
    return it->second;
  }
  if (fallback) return *fallback;
  throw CatalogError("missing parameter '" + key + "'");
}

void reject_unknown(const Params& p, std::initializer_list<const char*> known, const std::string& field) {
  for (const auto& [key, value] : p) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw CatalogError(field + ": unknown parameter '" + key + "'");
  }
}

// g = diag(−f, 1/f, r², r² sin²θ) with f = 1 − 2M/r + Q²/r².
MetricJet static_spherical_jet(double M, double Q, const Vec4<>& x) {
  const double r = x[1], th = x[2];
  const double s = std::sin(th), c = std::cos(th);
  const double f = 1.0 - 2.0 * M / r + Q * Q / (r * r);
  const double f1 = 2.0 * M / (r * r) - 2.0 * Q * Q / (r * r * r);
  const double f2 = -4.0 * M / (r * r * r) + 6.0 * Q * Q / (r * r * r * r);
  MetricJet j;
  j.g = diag(-f, 1.0 / f, r * r, r * r * s * s);
  j.dg[0][0][1] = -f1;
  j.dg[1][1][1] = -f1 / (f * f);
  j.dg[2][2][1] = 2.0 * r;
  j.dg[3][3][1] = 2.0 * r * s * s;
  j.dg[3][3][2] = 2.0 * r * r * s * c;
  j.ddg[0][0][1][1] = -f2;
  j.ddg[1][1][1][1] = -f2 / (f * f) + 2.0 * f1 * f1 / (f * f * f);
  j.ddg[2][2][1][1] = 2.0;
  j.ddg[3][3][1][1] = 2.0 * s * s;
  j.ddg[3][3][1][2] = 4.0 * r * s * c;
  j.ddg[3][3][2][1] = 4.0 * r * s * c;
  j.ddg[3][3][2][2] = 2.0 * r * r * (c * c - s * s);
  return j;
}

std::string shortest(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof(buf), v).ptr);
}

ChartGuard spherical_guard(double r_min) {
  return [r_min](const Vec4<>& x) -> std::optional<std::string> {
    if (!(x[1] > r_min)) return "r = " + shortest(x[1]) + " not above chart limit " + shortest(r_min);
    if (!(std::sin(x[2]) > 1e-8)) return std::string("θ on the polar axis");
    return std::nullopt;
  };
}

int parse_axis(const Params& p) {
  const double a = param(p, "axis", 3.0);
  if (a != 1.0 && a != 2.0 && a != 3.0) throw CatalogError("axis must be 1, 2 or 3 (x, y, z)");
  return static_cast<int>(a);
}

}  // namespace

MetricField builtin_metric(const std::string& name, const Params& params) {
  if (name == "minkowski") {
    reject_unknown(params, {}, name);
    return MetricField(name, params, Chart::Cartesian,
                       [](const Vec4<>&) {
                         MetricJet j;
                         j.g = diag(-1.0, 1.0, 1.0, 1.0);
                         return j;
                       },
                       {});
  }
  if (name == "schwarzschild") {
    reject_unknown(params, {"M"}, name);
    const double M = param(params, "M");
    if (!(M > 0.0)) throw CatalogError("schwarzschild: M must be positive");
    return MetricField(name, params, Chart::Spherical,
                       [M](const Vec4<>& x) { return static_spherical_jet(M, 0.0, x); },
                       spherical_guard(2.0 * M * (1.0 + 1e-6)));
  }
  if (name == "reissner_nordstrom") {
    reject_unknown(params, {"M", "Q", "allow_naked"}, name);
    const double M = param(params, "M");
    const double Q = param(params, "Q");
    const bool naked_ok = param(params, "allow_naked", 0.0) != 0.0;
    if (!(M > 0.0)) throw CatalogError("reissner_nordstrom: M must be positive");
    double r_min = 0.0;
    if (Q * Q <= M * M) {
      r_min = (M + std::sqrt(M * M - Q * Q)) * (1.0 + 1e-6);
    } else if (naked_ok) {
      r_min = 1e-6 * M;
    } else {
      throw CatalogError("reissner_nordstrom: Q² > M² (set allow_naked to override)");
    }
    return MetricField(name, params, Chart::Spherical,
                       [M, Q](const Vec4<>& x) { return static_spherical_jet(M, Q, x); }, spherical_guard(r_min));
  }
  throw CatalogError("unknown metric '" + name + "'");
}

PotentialField builtin_potential(const std::string& name, const Params& params, Chart chart) {
  if (name == "zero") {
    reject_unknown(params, {}, name);
    return PotentialField(name, params, chart, [](const Vec4<>&) { return PotentialJet{}; }, {});
  }
  if (name == "pure_gauge") {
    // A = dχ with χ = c·x⁰x¹x²; F vanishes identically.
    reject_unknown(params, {"c"}, name);
    const double c = param(params, "c", 1.0);
    return PotentialField(name, params, chart,
                          [c](const Vec4<>& x) {
                            PotentialJet j;
                            j.A = {c * x[1] * x[2], c * x[0] * x[2], c * x[0] * x[1], 0.0};
                            j.dA[0][1] = c * x[2];
                            j.dA[0][2] = c * x[1];
                            j.dA[1][0] = c * x[2];
                            j.dA[1][2] = c * x[0];
                            j.dA[2][0] = c * x[1];
                            j.dA[2][1] = c * x[0];
                            j.ddA[0][1][2] = j.ddA[0][2][1] = c;
                            j.ddA[1][0][2] = j.ddA[1][2][0] = c;
                            j.ddA[2][0][1] = j.ddA[2][1][0] = c;
                            return j;
                          },
                          {});
  }
  if (name == "uniform_b" || name == "uniform_e") {
    const bool magnetic = name == "uniform_b";
    const char* strength_key = magnetic ? "B" : "E";
    reject_unknown(params, {strength_key, "axis"}, name);
    if (chart != Chart::Cartesian) throw CatalogError(name + " requires a Cartesian chart");
    const double k = param(params, strength_key);
    const int a = parse_axis(params);
    if (magnetic) {
      // A_c = B x^b with (a, b, c) cyclic, so F_bc = B.
      const int b = a % 3 + 1, c = b % 3 + 1;
      return PotentialField(name, params, chart,
                            [k, b, c](const Vec4<>& x) {
                              PotentialJet j;
                              j.A[c] = k * x[b];
                              j.dA[c][b] = k;
                              return j;
                            },
                            {});
    }
    // A_0 = E x^a, so F_a0 = E.
    return PotentialField(name, params, chart,
                          [k, a](const Vec4<>& x) {
                            PotentialJet j;
                            j.A[0] = k * x[a];
                            j.dA[0][a] = k;
                            return j;
                          },
                          {});
  }
  if (name == "coulomb") {
    reject_unknown(params, {"Q"}, name);
    const double Q = param(params, "Q");
    const double r_min = 1e-6 * std::max(std::abs(Q), 1e-300);
    if (chart == Chart::Spherical) {
      return PotentialField(name, params, chart,
                            [Q](const Vec4<>& x) {
                              const double r = x[1];
                              PotentialJet j;
                              j.A[0] = Q / r;
                              j.dA[0][1] = -Q / (r * r);
                              j.ddA[0][1][1] = 2.0 * Q / (r * r * r);
                              return j;
                            },
                            [r_min](const Vec4<>& x) -> std::optional<std::string> {
                              if (!(x[1] > r_min)) return std::string("too close to the Coulomb singularity");
                              return std::nullopt;
                            });
    }
    return PotentialField(name, params, chart,
                          [Q](const Vec4<>& x) {
                            const double rho2 = x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
                            const double rho = std::sqrt(rho2);
                            const double inv3 = 1.0 / (rho2 * rho);
                            const double inv5 = inv3 / rho2;
                            PotentialJet j;
                            j.A[0] = Q / rho;
                            for (int a = 1; a < 4; ++a) {
                              j.dA[0][a] = -Q * x[a] * inv3;
                              for (int b = 1; b < 4; ++b)
                                j.ddA[0][a][b] = -Q * ((a == b ? inv3 : 0.0) - 3.0 * x[a] * x[b] * inv5);
                            }
                            return j;
                          },
                          [r_min](const Vec4<>& x) -> std::optional<std::string> {
                            const double rho = std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
                            if (!(rho > r_min)) return std::string("too close to the Coulomb singularity");
                            return std::nullopt;
                          });
  }
  throw CatalogError("unknown potential '" + name + "'");
}

std::vector<CatalogEntry> metric_catalog() {
  return {
      {"minkowski", {}, "flat space, Cartesian (t, x, y, z)"},
      {"schwarzschild", {"M"}, "vacuum black hole exterior, (t, r, θ, φ), r > 2M"},
      {"reissner_nordstrom", {"M", "Q", "allow_naked"}, "charged black hole exterior, (t, r, θ, φ), r > r_+"},
  };
}

std::vector<CatalogEntry> potential_catalog() {
  return {
      {"zero", {}, "A = 0"},
      {"uniform_b", {"B", "axis"}, "constant magnetic field along axis (Cartesian)"},
      {"uniform_e", {"E", "axis"}, "constant electric field along axis, F_a0 = E (Cartesian)"},
      {"coulomb", {"Q"}, "A_0 = Q/r in either chart"},
      {"pure_gauge", {"c"}, "A = d(c·x⁰x¹x²), F = 0"},
  };
}

namespace {

Vec4<BaseJet2> seed_base(const Vec4<>& x) {
  Vec4<BaseJet2> s;
  for (int k = 0; k < kDim; ++k) {
    s[k] = BaseJet2(Dual<double, 4>::variable(x[k], k));
    s[k].d[k] = Dual<double, 4>(1.0);
  }
  return s;
}

}  // namespace

MetricField metric_from_generic(std::string name, Chart chart,
                                std::function<Mat4<BaseJet2>(const Vec4<BaseJet2>&)> g, ChartGuard guard) {
  auto eval = [g = std::move(g)](const Vec4<>& x) {
    const auto m = g(seed_base(x));
    MetricJet j;
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k) {
        j.g[i][k] = m[i][k].v.v;
        for (int a = 0; a < kDim; ++a) {
          j.dg[i][k][a] = m[i][k].d[a].v;
          for (int b = 0; b < kDim; ++b) j.ddg[i][k][a][b] = m[i][k].d[a].d[b];
        }
      }
    return j;
  };
  return MetricField(std::move(name), {}, chart, std::move(eval), std::move(guard));
}

PotentialField potential_from_generic(std::string name, Chart chart,
                                      std::function<Vec4<BaseJet2>(const Vec4<BaseJet2>&)> A, ChartGuard guard) {
  auto eval = [A = std::move(A)](const Vec4<>& x) {
    const auto v = A(seed_base(x));
    PotentialJet j;
    for (int i = 0; i < kDim; ++i) {
      j.A[i] = v[i].v.v;
      for (int a = 0; a < kDim; ++a) {
        j.dA[i][a] = v[i].d[a].v;
        for (int b = 0; b < kDim; ++b) j.ddA[i][a][b] = v[i].d[a].d[b];
      }
    }
    return j;
  };
  return PotentialField(std::move(name), {}, chart, std::move(eval), std::move(guard));
}

bool solves_einstein(const MetricField& g, const PotentialField& A) {
  if (A.name() == "zero" || A.name() == "pure_gauge")
    return g.name() == "minkowski" || g.name() == "schwarzschild" ||
           (g.name() == "reissner_nordstrom" && g.params().at("Q") == 0.0);
  if (g.name() == "reissner_nordstrom" && A.name() == "coulomb" && A.chart() == Chart::Spherical)
    return std::abs(A.params().at("Q")) == std::abs(g.params().at("Q"));
  return false;
}

// ---------------------------------------------------------------------------

namespace {

Tensor3<> inverse_derivative(const Mat4<>& ginv, const Tensor3<>& dg) {
  // ∂_k g^ij = −g^ia ∂_k g_ab g^bj
  Tensor3<> out{};
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        double s = 0.0;
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b) s -= ginv[i][a] * dg[a][b][k] * ginv[b][j];
        out[i][j][k] = s;
      }
  return out;
}

}  // namespace

Christoffel christoffel(const MetricJet& jet) {
  const Mat4<> ginv = inverse(jet.g);
  const Tensor3<> dginv = inverse_derivative(ginv, jet.dg);
  // Γ_hjk = ½(∂_k g_hj + ∂_j g_hk − ∂_h g_jk) and its derivative.
  Tensor3<> low{};
  Tensor4<> dlow{};
  for (int h = 0; h < kDim; ++h)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        low[h][j][k] = 0.5 * (jet.dg[h][j][k] + jet.dg[h][k][j] - jet.dg[j][k][h]);
        for (int l = 0; l < kDim; ++l)
          dlow[h][j][k][l] = 0.5 * (jet.ddg[h][j][k][l] + jet.ddg[h][k][j][l] - jet.ddg[j][k][h][l]);
      }
  Christoffel c{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        double s = 0.0;
        for (int h = 0; h < kDim; ++h) s += ginv[i][h] * low[h][j][k];
        c.gamma[i][j][k] = s;
        for (int l = 0; l < kDim; ++l) {
          double ds = 0.0;
          for (int h = 0; h < kDim; ++h) ds += dginv[i][h][l] * low[h][j][k] + ginv[i][h] * dlow[h][j][k][l];
          c.dgamma[i][j][k][l] = ds;
        }
      }
  return c;
}

Christoffel christoffel(const MetricField& g, const Vec4<>& x) { return christoffel(g.evaluate(x)); }

Faraday faraday(const PotentialJet& jet) {
  Faraday f{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      f.F[i][j] = jet.dA[j][i] - jet.dA[i][j];
      for (int k = 0; k < kDim; ++k) f.dF[i][j][k] = jet.ddA[j][i][k] - jet.ddA[i][j][k];
    }
  return f;
}

Faraday faraday(const PotentialField& A, const Vec4<>& x) { return faraday(A.evaluate(x)); }

BaseCurvature base_riemann(const Christoffel& c) {
  BaseCurvature out{};
  const auto& G = c.gamma;
  const auto& dG = c.dgamma;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double s = dG[i][j][k][l] - dG[i][j][l][k];
          for (int h = 0; h < kDim; ++h) s += G[h][j][k] * G[i][h][l] - G[h][j][l] * G[i][h][k];
          out.riemann[i][j][k][l] = s;
        }
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) {
      double s = 0.0;
      for (int i = 0; i < kDim; ++i) s += out.riemann[i][j][l][i];
      out.ricci[j][l] = s;
    }
  return out;
}

BaseCurvature base_riemann(const MetricField& g, const Vec4<>& x) { return base_riemann(christoffel(g, x)); }

Vec4<> current(const PotentialField& A, const MetricField& g, const Vec4<>& x) {
  const MetricJet mj = g.evaluate(x);
  const Faraday f = faraday(A, x);
  const Christoffel c = christoffel(mj);
  const Mat4<> ginv = inverse(mj.g);
  const Tensor3<> dginv = inverse_derivative(ginv, mj.dg);
  // F^{ij} and ∂_k F^{ij}.
  Mat4<> Fup{};
  Tensor3<> dFup{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double s = 0.0;
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) s += ginv[i][a] * f.F[a][b] * ginv[j][b];
      Fup[i][j] = s;
      for (int k = 0; k < kDim; ++k) {
        double ds = 0.0;
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b)
            ds += dginv[i][a][k] * f.F[a][b] * ginv[j][b] + ginv[i][a] * f.dF[a][b][k] * ginv[j][b] +
                  ginv[i][a] * f.F[a][b] * dginv[j][b][k];
        dFup[i][j][k] = ds;
      }
    }
  Vec4<> J{};
  for (int j = 0; j < kDim; ++j) {
    double div = 0.0;
    for (int i = 0; i < kDim; ++i) {
      div += dFup[i][j][i];
      for (int k = 0; k < kDim; ++k) div += c.gamma[i][i][k] * Fup[k][j] + c.gamma[j][i][k] * Fup[i][k];
    }
    J[j] = div / (4.0 * std::numbers::pi);
  }
  return J;
}

Mat4<> StressEnergy::total() const {
  Mat4<> t;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t[i][j] = em[i][j] + matter[i][j];
  return t;
}

Mat4<> stress_energy_em(const Mat4<>& F, const Mat4<>& g) {
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      if (std::abs(F[i][j] + F[j][i]) > 1e-12 * (1.0 + max_abs(F)))
        throw TensorError("stress_energy_em: F is not antisymmetric");
  const Mat4<> ginv = inverse(g);
  const Mat4<> Fmixed = mat_mul(F, ginv);  // F_i^h = F_ia g^ah
  double F2 = 0.0;                          // F_kh F^kh
  for (int k = 0; k < kDim; ++k)
    for (int h = 0; h < kDim; ++h) F2 += Fmixed[k][h] * mat_mul(ginv, F)[k][h];
  Mat4<> T;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double s = 0.0;
      for (int h = 0; h < kDim; ++h) s += F[i][h] * Fmixed[j][h];
      T[i][j] = (s - 0.25 * g[i][j] * F2) / (4.0 * std::numbers::pi);
    }
  return T;
}

FieldSample sample_fields(const MetricField& g, const PotentialField& A, const Vec4<>& x) {
  if (g.chart() != A.chart())
    throw CatalogError(std::string("chart mismatch: metric is ") + to_string(g.chart()) + ", potential is " +
                       to_string(A.chart()));
  const MetricJet mj = g.evaluate(x);
  const Faraday f = faraday(A, x);
  const Christoffel c = christoffel(mj);
  FieldSample s;
  s.x = x;
  s.g = mj.g;
  s.ginv = inverse(mj.g);
  s.dg = mj.dg;
  s.ddg = mj.ddg;
  s.dginv = inverse_derivative(s.ginv, mj.dg);
  s.gamma = c.gamma;
  s.dgamma = c.dgamma;
  s.F = f.F;
  s.dF = f.dF;
  return s;
}

}  // namespace tidal
