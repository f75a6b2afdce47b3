#include "hecke/hecke_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace hecke {

namespace {

constexpr int kMaxDim = 8;
using Grid = std::array<std::array<std::int64_t, kMaxDim>, kMaxDim>;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in matrix op");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in matrix op");
  return r;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, base);
  return r;
}

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int valuation(std::int64_t x, std::int64_t p) {
  int v = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

void check_arguments(int genus, std::int64_t p, int delta) {
  if (genus < 1 || genus > 4) throw std::invalid_argument("genus must be in 1..4");
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  if (delta < 0) throw std::invalid_argument("delta must be non-negative");
}

struct Shape {
  int n;
  int N;
  std::int64_t p;
  std::int64_t mu;
  int delta;

  Shape(int genus, std::int64_t prime, int d)
      : n(genus), N(2 * genus), p(prime), mu(ipow(prime, d)), delta(d) {}
};

// Upper-left n x n block after the first n columns have been chosen.
struct Prefix {
  std::array<std::int64_t, 16> block{};
  std::array<int, 4> vals{};
};

void collect_prefixes(const Shape& s, Grid& m, std::array<int, 4>& vals, int b,
                      std::vector<Prefix>& out) {
  if (b == s.n) {
    Prefix pre;
    for (int i = 0; i < s.n; ++i)
      for (int j = 0; j < s.n; ++j) pre.block[static_cast<std::size_t>(i * 4 + j)] = m[i][j];
    pre.vals = vals;
    out.push_back(pre);
    return;
  }
  for (int a = 0; a <= s.delta; ++a) {
    const std::int64_t d = ipow(s.p, a);
    m[b][b] = d;
    vals[static_cast<std::size_t>(b)] = a;
    for (int r = 0; r < b; ++r) m[r][b] = 0;
    while (true) {
      collect_prefixes(s, m, vals, b + 1, out);
      int r = b - 1;
      while (r >= 0 && ++m[r][b] == d) m[r--][b] = 0;
      if (r < 0) break;
    }
  }
  m[b][b] = 0;
}

std::vector<Prefix> prefixes_for(const Shape& s) {
  Grid m{};
  std::array<int, 4> vals{};
  std::vector<Prefix> out;
  collect_prefixes(s, m, vals, 0, out);
  return out;
}

// omega(col_a, col_b) for the adapted form
std::int64_t pairing(const Shape& s, const Grid& m, int a, int b) {
  std::int64_t acc = 0;
  for (int i = 0; i < s.n; ++i) {
    acc = checked_add(acc, checked_mul(m[i][a], m[s.N - 1 - i][b]));
    acc = checked_add(acc, -checked_mul(m[s.N - 1 - i][a], m[i][b]));
  }
  return acc;
}

void verify_grid(const Shape& s, const Grid& m) {
  for (int a = 0; a < s.N; ++a)
    for (int b = a + 1; b < s.N; ++b) {
      const std::int64_t want = (b == s.N - 1 - a) ? s.mu : 0;
      if (pairing(s, m, a, b) != want)
        throw std::logic_error("enumerated coset violates the similitude identity");
    }
  for (int k = 0; k < s.n; ++k)
    if (m[k][k] * m[s.N - 1 - k][s.N - 1 - k] != s.mu)
      throw std::logic_error("enumerated coset violates the diagonal pairing");
}

// Depth-first walk over columns n..2n-1 below a fixed prefix.
template <class Leaf>
class LowerWalker {
 public:
  LowerWalker(const Shape& s, const Prefix& pre, std::uint64_t check_every, Leaf& leaf)
      : s_(s), check_every_(check_every), leaf_(leaf) {
    for (int i = 0; i < s.n; ++i)
      for (int j = 0; j < s.n; ++j) m_[i][j] = pre.block[static_cast<std::size_t>(i * 4 + j)];
  }

  void run() { walk(s_.n); }

 private:
  // Rows b-1 down to 2n-b are fixed by the pairings with columns 2n-b..b-1.
  // Each such equation only involves rows at or below the row it solves.
  bool fill_forced(int b) {
    const int bp = s_.N - 1 - b;
    for (int r = b - 1; r > bp; --r) {
      const int a = s_.N - 1 - r;
      const std::int64_t sum = pairing(s_, m_, a, b);
      const std::int64_t coef = r >= s_.n ? m_[a][a] : -m_[a][a];
      if (sum % coef != 0) return false;
      m_[r][b] = -sum / coef;
    }
    return true;
  }

  void clear_column(int b) {
    for (int r = 0; r <= b; ++r) m_[r][b] = 0;
  }

  void walk(int b) {
    if (b == s_.N) {
      if (check_every_ && ++visited_ % check_every_ == 0) verify_grid(s_, m_);
      leaf_(m_);
      return;
    }
    const int bp = s_.N - 1 - b;
    const std::int64_t d = s_.mu / m_[bp][bp];
    m_[b][b] = d;
    if (fill_forced(b)) {
      while (true) {
        walk(b + 1);
        int r = bp;
        while (r >= 0 && ++m_[r][b] == d) m_[r--][b] = 0;
        if (r < 0) break;
      }
    }
    clear_column(b);
  }

  const Shape& s_;
  std::uint64_t check_every_;
  std::uint64_t visited_ = 0;
  Leaf& leaf_;
  Grid m_{};
};

template <class Leaf>
void walk_prefix(const Shape& s, const Prefix& pre, std::uint64_t check_every, Leaf& leaf) {
  LowerWalker<Leaf> walker(s, pre, check_every, leaf);
  walker.run();
}

// Runs task(i) for i in [0, count) on up to `workers` threads.
template <class Task>
void run_tasks(std::size_t count, unsigned workers, Task&& task) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    const auto threads = std::min<std::size_t>(workers, count);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        try {
          for (std::size_t i = next++; i < count; i = next++) task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

void enforce_budget(int genus, std::int64_t p, int delta, const EnumerationOptions& options) {
  const long double projected = projected_coset_count(genus, p, delta);
  if (projected > static_cast<long double>(options.budget)) {
    std::ostringstream os;
    os << "enumeration budget exceeded: genus " << genus << ", p=" << p << ", delta=" << delta
       << " projects ~" << static_cast<double>(projected) << " cosets, cap is " << options.budget
       << " (raise with --budget or HECKE_ENUM_BUDGET)";
    throw BudgetExceeded(os.str());
  }
}

CosetRep make_rep(const Shape& s, const Grid& m) {
  CosetRep rep{s.n, s.p, s.delta, IntMatrix(s.N, s.N)};
  for (int i = 0; i < s.N; ++i)
    for (int j = i; j < s.N; ++j) rep.matrix(i, j) = m[i][j];
  return rep;
}

// Valuations of the local Smith form over Z_(p), computed mod p^bound.
std::vector<int> local_smith_valuations(const IntMatrix& input, std::int64_t p, int bound) {
  const std::int64_t q = ipow(p, bound);
  const int N = input.rows();
  std::vector<std::vector<std::int64_t>> m(static_cast<std::size_t>(N),
                                           std::vector<std::int64_t>(static_cast<std::size_t>(N)));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m[i][j] = ((input(i, j) % q) + q) % q;

  auto mulmod = [q](std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<__int128>(a) * b % q);
  };
  auto inverse = [q](std::int64_t u) {
    std::int64_t a = u, b = q, x0 = 1, x1 = 0;
    while (b) {
      const std::int64_t t = a / b;
      std::swap(a -= t * b, b);
      std::swap(x0 -= t * x1, x1);
    }
    return ((x0 % q) + q) % q;
  };

  std::vector<int> vals;
  for (int k = 0; k < N; ++k) {
    int best_i = -1, best_j = -1, best_v = bound;
    for (int i = k; i < N; ++i)
      for (int j = k; j < N; ++j)
        if (m[i][j] != 0) {
          const int v = valuation(m[i][j], p);
          if (v < best_v) best_v = v, best_i = i, best_j = j;
        }
    if (best_i < 0) throw std::logic_error("elementary divisor exceeds p^delta");
    std::swap(m[k], m[best_i]);
    for (auto& row : m) std::swap(row[k], row[best_j]);
    const std::int64_t pv = ipow(p, best_v);
    const std::int64_t uinv = inverse(m[k][k] / pv);
    for (int i = k + 1; i < N; ++i) {
      if (m[i][k] == 0) continue;
      const std::int64_t t = mulmod(m[i][k] / pv, uinv);
      for (int j = k; j < N; ++j) m[i][j] = ((m[i][j] - mulmod(t, m[k][j])) % q + q) % q;
    }
    for (int j = k + 1; j < N; ++j) m[k][j] = 0;  // cleared by column operations
    vals.push_back(best_v);
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

}  // namespace

// ---------------------------------------------------------------------------

IntMatrix::IntMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), 0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::diagonal(std::span<const std::int64_t> entries) {
  const int n = static_cast<int>(entries.size());
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = entries[static_cast<std::size_t>(i)];
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows[0].size()) : 0;
  IntMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != c)
      throw std::invalid_argument("ragged matrix rows");
    for (int j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix dimension mismatch");
  IntMatrix r(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const std::int64_t aik = a(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols_; ++j) r(i, j) = checked_add(r(i, j), checked_mul(aik, b(k, j)));
    }
  return r;
}

IntMatrix& IntMatrix::operator*=(std::int64_t s) {
  for (auto& v : data_) v = checked_mul(v, s);
  return *this;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << (i ? "; " : "(");
    for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
  }
  os << ")";
  return os.str();
}

IntMatrix standard_J(int genus) {
  IntMatrix J(2 * genus, 2 * genus);
  for (int i = 0; i < genus; ++i) {
    J(i, genus + i) = 1;
    J(genus + i, i) = -1;
  }
  return J;
}

IntMatrix adapted_J(int genus) {
  const int N = 2 * genus;
  IntMatrix J(N, N);
  for (int k = 0; k < N; ++k) J(k, N - 1 - k) = k < genus ? 1 : -1;
  return J;
}

std::optional<int> is_symplectic_similitude(const IntMatrix& m, std::int64_t p) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw std::invalid_argument("similitude test needs a square matrix of even size");
  const int n = m.rows() / 2;
  const IntMatrix J = standard_J(n);
  const IntMatrix S = m.transpose() * J * m;
  const std::int64_t mu = S(0, n);
  if (mu <= 0) return std::nullopt;
  IntMatrix scaled = J;
  scaled *= mu;
  if (S != scaled) return std::nullopt;
  std::int64_t rest = mu;
  int delta = 0;
  while (rest % p == 0) {
    rest /= p;
    ++delta;
  }
  if (rest != 1) return std::nullopt;
  return delta;
}

std::vector<int> CosetRep::valuations() const {
  std::vector<int> v;
  for (int i = 0; i < genus; ++i) v.push_back(valuation(matrix(i, i), p));
  return v;
}

IntMatrix CosetRep::to_standard_basis() const {
  const int N = 2 * genus;
  std::vector<int> to_std(static_cast<std::size_t>(N));
  for (int k = 0; k < genus; ++k) {
    to_std[static_cast<std::size_t>(k)] = k;
    to_std[static_cast<std::size_t>(N - 1 - k)] = genus + k;
  }
  IntMatrix out(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      out(to_std[static_cast<std::size_t>(i)], to_std[static_cast<std::size_t>(j)]) = matrix(i, j);
  return out;
}

std::string CosetRep::dump_line() const {
  std::string line;
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j) {
      if (!line.empty()) line += ' ';
      line += std::to_string(matrix(i, j));
    }
  return line;
}

IntMatrix row_hnf(const IntMatrix& input) {
  if (input.rows() != input.cols()) throw std::invalid_argument("row_hnf needs a square matrix");
  IntMatrix h = input;
  const int N = h.rows();
  auto combine = [&](int r1, int r2, std::int64_t a, std::int64_t b, std::int64_t c,
                     std::int64_t d) {
    // (row r1, row r2) <- (a r1 + b r2, c r1 + d r2)
    for (int j = 0; j < N; ++j) {
      const std::int64_t x = h(r1, j), y = h(r2, j);
      h(r1, j) = checked_add(checked_mul(a, x), checked_mul(b, y));
      h(r2, j) = checked_add(checked_mul(c, x), checked_mul(d, y));
    }
  };
  for (int k = 0; k < N; ++k) {
    for (int i = k + 1; i < N; ++i) {
      while (h(i, k) != 0) {
        const std::int64_t t = h(k, k) / h(i, k);
        combine(k, i, 0, 1, 1, -t);  // (r_k, r_i) <- (r_i, r_k - t r_i)
      }
    }
    if (h(k, k) == 0) throw std::invalid_argument("row_hnf: singular matrix");
    if (h(k, k) < 0)
      for (int j = 0; j < N; ++j) h(k, j) = -h(k, j);
    for (int i = 0; i < k; ++i) {
      std::int64_t t = h(i, k) / h(k, k);
      if (h(i, k) - t * h(k, k) < 0) --t;
      if (t != 0)
        for (int j = k; j < N; ++j) h(i, j) = checked_add(h(i, j), -checked_mul(t, h(k, j)));
    }
  }
  return h;
}

std::string DivisorChain::label() const {
  std::string s = "(";
  for (std::size_t i = 0; i < d_exponents.size(); ++i)
    s += (i ? "," : "") + std::to_string(ipow(p, d_exponents[i]));
  s += ";";
  for (std::size_t i = 0; i < e_exponents.size(); ++i)
    s += (i ? "," : "") + std::to_string(ipow(p, e_exponents[i]));
  return s + ")";
}

std::string DivisorChain::generator_name() const {
  const int n = genus();
  auto all = [](const std::vector<int>& v, int lo, int hi, int value) {
    for (int i = lo; i < hi; ++i)
      if (v[static_cast<std::size_t>(i)] != value) return false;
    return true;
  };
  if (all(d_exponents, 0, n, 0) && all(e_exponents, 0, n, 1)) return "T(p)";
  for (int i = 0; i <= n; ++i) {
    if (all(d_exponents, 0, n - i, 0) && all(d_exponents, n - i, n, 1) &&
        all(e_exponents, 0, n - i, 2) && all(e_exponents, n - i, n, 1))
      return "T_" + std::to_string(i) + "(p^2)";
  }
  return {};
}

DivisorChain smith_symplectic(const IntMatrix& m, std::int64_t p, int delta) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0)
    throw std::invalid_argument("smith_symplectic needs a square matrix of even size");
  const int N = m.rows(), n = N / 2;
  const std::vector<int> vals = local_smith_valuations(m, p, delta + 1);
  DivisorChain chain{p, {}, {}};
  for (int i = 0; i < n; ++i) {
    chain.d_exponents.push_back(vals[static_cast<std::size_t>(i)]);
    chain.e_exponents.push_back(vals[static_cast<std::size_t>(N - 1 - i)]);
    if (chain.d_exponents.back() + chain.e_exponents.back() != delta)
      throw std::logic_error("Smith divisors do not pair to p^delta");
  }
  return chain;
}

OmegaFamily OmegaFamily::calibrated(int genus) {
  OmegaFamily f{-genus * (genus + 1) / 2, {}};
  for (int i = 1; i <= genus; ++i) f.weights.push_back(genus + 1 - i);
  return f;
}

OmegaFamily OmegaFamily::ascending(int genus) {
  OmegaFamily f{-genus * (genus + 1) / 2, {}};
  for (int i = 1; i <= genus; ++i) f.weights.push_back(i);
  return f;
}

MultiPoly omega_of_valuations(int genus, std::int64_t p, int delta, std::span<const int> valuations,
                              const OmegaFamily& family) {
  if (static_cast<int>(valuations.size()) != genus ||
      static_cast<int>(family.weights.size()) != genus)
    throw std::invalid_argument("omega: valuation/weight count must equal the genus");
  Exponents e{};
  e[static_cast<std::size_t>(Var::x0)] = delta;
  int p_exp = family.scalar_exponent * delta;
  for (int i = 0; i < genus; ++i) {
    const int a = valuations[static_cast<std::size_t>(i)];
    e[static_cast<std::size_t>(x_var(i + 1))] = a;
    p_exp += family.weights[static_cast<std::size_t>(i)] * a;
  }
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(std::abs(p_exp)));
  const Coefficient c = p_exp >= 0 ? Coefficient(power) : Coefficient(1) / Coefficient(power);
  return MultiPoly::monomial(c, e);
}

MultiPoly omega(const CosetRep& rep, const OmegaFamily& family) {
  const auto vals = rep.valuations();
  return omega_of_valuations(rep.genus, rep.p, rep.delta, vals, family);
}

long double projected_coset_count(int genus, std::int64_t p, int delta) {
  long double count = std::pow(static_cast<long double>(p),
                               static_cast<long double>(delta * genus * (genus + 1) / 2));
  for (int i = 1; i <= genus; ++i) count *= 1.0L + std::pow(static_cast<long double>(p), -i);
  return delta == 0 ? 1.0L : count;
}

void for_each_coset(int genus, std::int64_t p, int delta, const EnumerationOptions& options,
                    const std::function<void(const CosetRep&)>& visit) {
  check_arguments(genus, p, delta);
  enforce_budget(genus, p, delta, options);
  const Shape s(genus, p, delta);
  auto leaf = [&](const Grid& m) { visit(make_rep(s, m)); };
  for (const Prefix& pre : prefixes_for(s)) walk_prefix(s, pre, options.check_every, leaf);
}

std::vector<CosetRep> enumerate_cosets(int genus, std::int64_t p, int delta,
                                       const EnumerationOptions& options) {
  check_arguments(genus, p, delta);
  enforce_budget(genus, p, delta, options);
  const Shape s(genus, p, delta);
  const auto prefixes = prefixes_for(s);
  std::vector<std::vector<CosetRep>> shards(prefixes.size());
  run_tasks(prefixes.size(), options.workers, [&](std::size_t i) {
    auto leaf = [&](const Grid& m) { shards[i].push_back(make_rep(s, m)); };
    walk_prefix(s, prefixes[i], options.check_every, leaf);
  });
  std::vector<CosetRep> out;
  for (auto& shard : shards)
    for (auto& rep : shard) out.push_back(std::move(rep));
  return out;
}

ValuationCounts diagonal_class_counts(int genus, std::int64_t p, int delta,
                                      const EnumerationOptions& options) {
  check_arguments(genus, p, delta);
  enforce_budget(genus, p, delta, options);
  const Shape s(genus, p, delta);
  const auto prefixes = prefixes_for(s);
  std::vector<std::uint64_t> counts(prefixes.size(), 0);
  run_tasks(prefixes.size(), options.workers, [&](std::size_t i) {
    std::uint64_t local = 0;
    auto leaf = [&local](const Grid&) { ++local; };
    walk_prefix(s, prefixes[i], options.check_every, leaf);
    counts[i] = local;
  });
  ValuationCounts out;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    if (counts[i] == 0) continue;
    std::vector<int> key(prefixes[i].vals.begin(), prefixes[i].vals.begin() + genus);
    out[key] += counts[i];
  }
  return out;
}

std::uint64_t count_cosets(int genus, std::int64_t p, int delta, const EnumerationOptions& options) {
  std::uint64_t total = 0;
  for (const auto& [key, c] : diagonal_class_counts(genus, p, delta, options)) total += c;
  return total;
}

MultiPoly image_from_counts(int genus, std::int64_t p, int delta, const ValuationCounts& counts,
                            const OmegaFamily& family) {
  MultiPoly total;
  for (const auto& [vals, count] : counts) {
    MultiPoly term = omega_of_valuations(genus, p, delta, vals, family);
    term *= Coefficient(mpz_class(std::to_string(count)));
    total += term;
  }
  return total;
}

MultiPoly spherical_T(int genus, std::int64_t p, int delta, const EnumerationOptions& options,
                      const std::optional<OmegaFamily>& family) {
  return image_from_counts(genus, p, delta, diagonal_class_counts(genus, p, delta, options),
                           family.value_or(OmegaFamily::calibrated(genus)));
}

std::vector<ClassImage> spherical_generators(int genus, std::int64_t p,
                                             const EnumerationOptions& options,
                                             const std::optional<OmegaFamily>& family,
                                             std::ostream* progress) {
  const OmegaFamily f = family.value_or(OmegaFamily::calibrated(genus));
  std::vector<ClassImage> out;
  for (int delta = 1; delta <= 2; ++delta) {
    check_arguments(genus, p, delta);
    enforce_budget(genus, p, delta, options);
    const Shape s(genus, p, delta);
    const auto prefixes = prefixes_for(s);
    using Tally = std::map<DivisorChain, std::uint64_t>;
    std::vector<Tally> tallies(prefixes.size());
    run_tasks(prefixes.size(), options.workers, [&](std::size_t i) {
      auto leaf = [&](const Grid& m) {
        const CosetRep rep = make_rep(s, m);
        ++tallies[i][smith_symplectic(rep.matrix, p, delta)];
      };
      walk_prefix(s, prefixes[i], options.check_every, leaf);
    });
    std::map<DivisorChain, std::pair<std::uint64_t, MultiPoly>> merged;
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      const std::vector<int> vals(prefixes[i].vals.begin(), prefixes[i].vals.begin() + genus);
      for (const auto& [chain, count] : tallies[i]) {
        auto& slot = merged[chain];
        slot.first += count;
        MultiPoly term = omega_of_valuations(genus, p, delta, vals, f);
        term *= Coefficient(mpz_class(std::to_string(count)));
        slot.second += term;
      }
    }
    std::vector<ClassImage> level;
    for (auto& [chain, slot] : merged) {
      std::string name = chain.generator_name();
      if (name.empty()) throw std::logic_error("unexpected divisor class " + chain.label());
      level.push_back({name, chain, delta, slot.first, std::move(slot.second)});
    }
    std::sort(level.begin(), level.end(),
              [](const ClassImage& a, const ClassImage& b) { return a.name < b.name; });
    for (auto& c : level) {
      if (progress) *progress << "class=" << c.chain.label() << " count=" << c.count << '\n';
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace hecke
