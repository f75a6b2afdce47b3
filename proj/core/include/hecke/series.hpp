#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hecke/hecke_oracle.hpp"
#include "hecke/poly.hpp"
#include "hecke/sym_table.hpp"

namespace hecke {

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SeriesSource { rational_function, oracle };

// c_0 + c_1 X + .. + c_dmax X^dmax; the c_k do not contain X.
struct SeriesPrefix {
  int genus = 0;
  std::vector<MultiPoly> coefficients;
  SeriesSource source = SeriesSource::rational_function;

  int max_delta() const { return static_cast<int>(coefficients.size()) - 1; }
};

// Formal expansion in X through X^max_delta via the linear recurrence of the
// expanded denominator. The denominator's X^0 coefficient must be a nonzero constant.
SeriesPrefix expand(const RationalFunction& rf, int max_delta, int genus = 0);

// p -> numeric prime everywhere.
RationalFunction specialize_p(const RationalFunction& rf, std::int64_t p);

SeriesPrefix oracle_prefix(int genus, std::int64_t p, int max_delta,
                           const EnumerationOptions& options = {},
                           const std::optional<OmegaFamily>& family = std::nullopt);

struct Residuals {
  std::vector<MultiPoly> per_delta;

  bool all_zero() const;
  std::optional<int> first_nonzero() const;
};

// lhs - rhs termwise over the common length.
Residuals subtract(const SeriesPrefix& lhs, const SeriesPrefix& rhs);

Residuals compare_with_oracle(const RationalFunction& rf, int genus, std::int64_t p, int max_delta,
                              const EnumerationOptions& options = {},
                              const std::optional<OmegaFamily>& family = std::nullopt);

// P = (expanded Q) * series, truncated at X^degree. Throws SeriesError when a
// coefficient of X^(degree+1)..X^(max_delta) of the product does not vanish.
MultiPoly reconstruct_numerator(std::span<const MultiPoly> q_factors, const SeriesPrefix& prefix,
                                int degree);

/// Laurent polynomial in p through the sample points (p_i, v_i).
///
/// Fits c_lo p^lo + .. + c_{lo+span} p^{lo+span} by Lagrange interpolation on
/// the first span+1 samples; any further samples must agree or SeriesError is thrown.
MultiPoly interpolate_laurent(std::span<const std::pair<std::int64_t, Coefficient>> samples,
                              int lowest_exponent, int span);

struct InterpolationPlan {
  std::vector<std::int64_t> fit_primes{2, 3, 5, 7, 11, 13, 17, 19, 23};
  std::vector<std::int64_t> check_primes{29};
  int degree = 2;
  // extra tail terms (up to degree + tail_extra) for primes whose enumeration
  // projects at most tail_budget cosets
  int tail_extra = 2;
  std::uint64_t tail_budget = 20'000'000;
};

struct SymbolicReconstruction {
  MultiPoly numerator;  // coefficients Laurent in p
  std::vector<std::pair<std::int64_t, MultiPoly>> per_prime;  // numeric numerators
  std::vector<std::pair<std::int64_t, int>> depth;             // series depth used per prime
};

// Numeric reconstruction at every prime of the plan, then coefficientwise
// interpolation in p. Window for X^k: p^(-k n(n+1)/2) .. p^2.
SymbolicReconstruction reconstruct_symbolic(int genus, const InterpolationPlan& plan,
                                            const EnumerationOptions& options = {},
                                            const std::optional<OmegaFamily>& family = std::nullopt);

// expand(siegel_project(P4/Q4)) at p against the genus-3 oracle.
Residuals verify_siegel(const KTable& table, std::int64_t p, int max_delta,
                        const EnumerationOptions& options = {},
                        SymConvention convention = SymConvention::orbit_sum);

}  // namespace hecke
