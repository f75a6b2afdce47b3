#include "hecke/series.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace hecke {

namespace {

MultiPoly x_power(int k) { return MultiPoly::variable(Var::X, k); }

}  // namespace

SeriesPrefix expand(const RationalFunction& rf, int max_delta, int genus) {
  if (max_delta < 0) throw SeriesError("max_delta must be non-negative");
  const MultiPoly Q = rf.expanded_denominator();
  if (Q.min_degree(Var::X) < 0 || rf.numerator.min_degree(Var::X) < 0)
    throw SeriesError("negative powers of X in the rational function");
  const MultiPoly q0 = Q.coefficient_of(Var::X, 0);
  if (q0.is_zero()) throw SeriesError("denominator constant term vanishes");
  if (!q0.is_constant()) throw SeriesError("denominator constant term must be a nonzero constant");
  const Coefficient q0_inverse = Coefficient(1) / q0.constant_term();

  std::vector<MultiPoly> q;
  for (int j = 0; j <= Q.degree(Var::X); ++j) q.push_back(Q.coefficient_of(Var::X, j));

  SeriesPrefix out{genus, {}, SeriesSource::rational_function};
  for (int d = 0; d <= max_delta; ++d) {
    MultiPoly c = rf.numerator.coefficient_of(Var::X, d);
    for (int j = 1; j <= d && j < static_cast<int>(q.size()); ++j)
      c -= q[static_cast<std::size_t>(j)] * out.coefficients[static_cast<std::size_t>(d - j)];
    c *= q0_inverse;
    out.coefficients.push_back(std::move(c));
  }
  return out;
}

RationalFunction specialize_p(const RationalFunction& rf, std::int64_t p) {
  const Coefficient value(static_cast<long>(p));
  RationalFunction out;
  out.numerator = rf.numerator.specialize(Var::p, value);
  for (const auto& f : rf.denominator_factors) {
    MultiPoly g = f.specialize(Var::p, value);
    if (g.is_zero()) throw SeriesError("denominator factor vanishes at p = " + std::to_string(p));
    out.denominator_factors.push_back(std::move(g));
  }
  return out;
}

SeriesPrefix oracle_prefix(int genus, std::int64_t p, int max_delta,
                           const EnumerationOptions& options,
                           const std::optional<OmegaFamily>& family) {
  SeriesPrefix out{genus, {}, SeriesSource::oracle};
  for (int d = 0; d <= max_delta; ++d)
    out.coefficients.push_back(spherical_T(genus, p, d, options, family));
  return out;
}

bool Residuals::all_zero() const { return !first_nonzero().has_value(); }

std::optional<int> Residuals::first_nonzero() const {
  for (std::size_t i = 0; i < per_delta.size(); ++i)
    if (!per_delta[i].is_zero()) return static_cast<int>(i);
  return std::nullopt;
}

Residuals subtract(const SeriesPrefix& lhs, const SeriesPrefix& rhs) {
  Residuals r;
  const std::size_t n = std::min(lhs.coefficients.size(), rhs.coefficients.size());
  for (std::size_t i = 0; i < n; ++i) r.per_delta.push_back(lhs.coefficients[i] - rhs.coefficients[i]);
  return r;
}

Residuals compare_with_oracle(const RationalFunction& rf, int genus, std::int64_t p, int max_delta,
                              const EnumerationOptions& options,
                              const std::optional<OmegaFamily>& family) {
  const SeriesPrefix lhs = expand(specialize_p(rf, p), max_delta, genus);
  const SeriesPrefix rhs = oracle_prefix(genus, p, max_delta, options, family);
  return subtract(lhs, rhs);
}

MultiPoly reconstruct_numerator(std::span<const MultiPoly> q_factors, const SeriesPrefix& prefix,
                                int degree) {
  if (degree < 0) throw SeriesError("numerator degree must be non-negative");
  if (prefix.max_delta() < degree)
    throw SeriesError("series prefix too short: need X^" + std::to_string(degree));
  MultiPoly Q(1);
  for (const auto& f : q_factors) Q *= f;

  MultiPoly P;
  for (int j = 0; j <= prefix.max_delta(); ++j) {
    MultiPoly c;
    for (int i = 0; i <= j; ++i)
      c += Q.coefficient_of(Var::X, i) * prefix.coefficients[static_cast<std::size_t>(j - i)];
    if (j <= degree) {
      P += c * x_power(j);
    } else if (!c.is_zero()) {
      throw SeriesError("inconsistent series / wrong degree bound: Q*series has a nonzero X^" +
                        std::to_string(j) + " coefficient");
    }
  }
  return P;
}

MultiPoly interpolate_laurent(std::span<const std::pair<std::int64_t, Coefficient>> samples,
                              int lowest_exponent, int span) {
  if (span < 0) throw SeriesError("interpolation span must be non-negative");
  const std::size_t needed = static_cast<std::size_t>(span) + 1;
  if (samples.size() < needed)
    throw SeriesError("interpolation needs " + std::to_string(needed) + " samples, got " +
                      std::to_string(samples.size()));

  const MultiPoly t = MultiPoly::variable(Var::p);
  MultiPoly f;  // p^-lo * value, a polynomial of degree <= span
  for (std::size_t i = 0; i < needed; ++i) {
    const auto& [pi, vi] = samples[i];
    Coefficient yi = vi * MultiPoly::variable(Var::p, -lowest_exponent)
                              .eval({{Var::p, Coefficient(static_cast<long>(pi))}});
    MultiPoly basis(1);
    Coefficient denom = 1;
    for (std::size_t j = 0; j < needed; ++j) {
      if (j == i) continue;
      const long pj = static_cast<long>(samples[j].first);
      basis *= t - MultiPoly(pj);
      denom *= Coefficient(static_cast<long>(pi) - pj);
    }
    basis *= yi / denom;
    f += basis;
  }
  MultiPoly result = f * MultiPoly::variable(Var::p, lowest_exponent);

  for (std::size_t k = needed; k < samples.size(); ++k) {
    const auto& [pk, vk] = samples[k];
    if (result.eval({{Var::p, Coefficient(static_cast<long>(pk))}}) != vk)
      throw SeriesError("interpolation check failed at p = " + std::to_string(pk) +
                        " (degree bound too small or data inconsistent)");
  }
  return result;
}

SymbolicReconstruction reconstruct_symbolic(int genus, const InterpolationPlan& plan,
                                            const EnumerationOptions& options,
                                            const std::optional<OmegaFamily>& family) {
  SymbolicReconstruction out;
  const auto factors = build_Q(genus);
  std::vector<std::int64_t> primes = plan.fit_primes;
  primes.insert(primes.end(), plan.check_primes.begin(), plan.check_primes.end());

  for (std::int64_t p : primes) {
    int depth = plan.degree;
    while (depth < plan.degree + plan.tail_extra &&
           projected_coset_count(genus, p, depth + 1) <= static_cast<long double>(plan.tail_budget))
      ++depth;
    const SeriesPrefix prefix = oracle_prefix(genus, p, depth, options, family);
    out.per_prime.emplace_back(p, reconstruct_numerator(factors, prefix, plan.degree));
    out.depth.emplace_back(p, depth);
  }

  std::set<Exponents> keys;
  for (const auto& [p, poly] : out.per_prime)
    for (const auto& [e, c] : poly.terms()) keys.insert(e);

  const int per_degree = genus * (genus + 1) / 2;
  for (const Exponents& key : keys) {
    std::vector<std::pair<std::int64_t, Coefficient>> samples;
    for (const auto& [p, poly] : out.per_prime) samples.emplace_back(p, poly.coefficient(key));
    const int k = key[static_cast<std::size_t>(Var::X)];
    const int lo = -k * per_degree;
    const int span = k * per_degree + 2;
    if (static_cast<int>(plan.fit_primes.size()) < span + 1)
      throw SeriesError("X^" + std::to_string(k) + " needs " + std::to_string(span + 1) +
                        " fit primes");
    out.numerator += interpolate_laurent(samples, lo, span) * MultiPoly::monomial(1, key);
  }
  return out;
}

Residuals verify_siegel(const KTable& table, std::int64_t p, int max_delta,
                        const EnumerationOptions& options, SymConvention convention) {
  const RationalFunction projected = siegel_project(genus4_rational_function(table, convention));
  return compare_with_oracle(projected, 3, p, max_delta, options);
}

}  // namespace hecke
