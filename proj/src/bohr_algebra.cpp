#include "measurelab/bohr_algebra.hpp"

#include <algorithm>
#include <limits>
#include <regex>
#include <set>

namespace mlab {

namespace {

void require_same_basis(std::span<const FrequencyVector> vectors) {
  for (const auto& v : vectors)
    if (!v.same_basis(vectors.front())) throw Error(Errc::BasisMismatch, "vectors over different bases");
}

mpz_class lcm_of_denominators(std::span<const FrequencyVector> vectors) {
  mpz_class l = 1;
  for (const auto& v : vectors)
    for (const auto& c : v.coords()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

// Rows scaled by one common factor, so integer relations are unchanged.
std::vector<std::vector<mpz_class>> integer_rows(std::span<const FrequencyVector> vectors) {
  const mpz_class l = lcm_of_denominators(vectors);
  std::vector<std::vector<mpz_class>> rows;
  rows.reserve(vectors.size());
  for (const auto& v : vectors) {
    std::vector<mpz_class> row;
    row.reserve(v.size());
    for (const auto& c : v.coords()) row.push_back(mpz_class(c * l));
    rows.push_back(std::move(row));
  }
  return rows;
}

bool fits_small(const std::vector<std::vector<mpz_class>>& rows, int bound) {
  // |sum m_i r_i| <= n * bound * max|r| must stay far from int64 overflow.
  const mpz_class limit = mpz_class(1) << 40;
  for (const auto& row : rows)
    for (const auto& x : row)
      if (abs(x) > limit) return false;
  return bound <= 1000 && rows.size() <= 16;
}

// Next vector in lexicographic order over [-h, h]^n; false once exhausted.
bool next_in_box(IntVector& m, int h) {
  for (std::size_t i = m.size(); i-- > 0;) {
    if (m[i] < h) {
      ++m[i];
      return true;
    }
    m[i] = -h;
  }
  return false;
}

bool is_candidate(const IntVector& m, int h) {
  std::int64_t height = 0;
  std::int64_t first = 0;
  for (auto x : m) {
    height = std::max<std::int64_t>(height, x < 0 ? -x : x);
    if (first == 0) first = x;
  }
  return height == h && first > 0;
}

}  // namespace

std::shared_ptr<const SymbolBasis> SymbolBasis::make(std::vector<std::string> names) {
  if (names.empty()) throw Error(Errc::BadBasis, "basis has no symbols");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw Error(Errc::BadBasis, "empty symbol name");
    if (!seen.insert(n).second) throw Error(Errc::BadBasis, "repeated symbol '" + n + "'");
  }
  return std::shared_ptr<const SymbolBasis>(new SymbolBasis(std::move(names)));
}

mpq_class parse_rational(const std::string& text) {
  static const std::regex pattern(R"(\s*([+-]?[0-9]+)(?:/([0-9]+))?\s*)");
  std::smatch match;
  if (!std::regex_match(text, match, pattern)) throw Error(Errc::Parse, "not a rational: '" + text + "'");
  mpz_class num(match[1].str().front() == '+' ? match[1].str().substr(1) : match[1].str(), 10);
  mpz_class den = 1;
  if (match[2].matched) den = mpz_class(match[2].str(), 10);
  if (den == 0) throw Error(Errc::Parse, "zero denominator in '" + text + "'");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::string format_rational(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

FrequencyVector::FrequencyVector(BasisPtr basis, std::vector<mpq_class> coords)
    : basis_(std::move(basis)), coords_(std::move(coords)) {
  if (!basis_) throw Error(Errc::BadBasis, "null basis");
  if (coords_.size() != basis_->size())
    throw Error(Errc::SizeMismatch, "frequency has " + std::to_string(coords_.size()) + " coordinates, basis has " +
                                        std::to_string(basis_->size()));
  for (auto& c : coords_) c.canonicalize();
}

FrequencyVector FrequencyVector::zero(BasisPtr basis) {
  const std::size_t n = basis ? basis->size() : 0;
  return FrequencyVector(std::move(basis), std::vector<mpq_class>(n, mpq_class(0)));
}

FrequencyVector FrequencyVector::unit(BasisPtr basis, std::size_t i) {
  auto v = zero(std::move(basis));
  if (i >= v.size()) throw Error(Errc::IndexOutOfRange, "symbol index " + std::to_string(i));
  v.coords_[i] = 1;
  return v;
}

FrequencyVector FrequencyVector::parse(BasisPtr basis, const std::vector<std::string>& coords) {
  std::vector<mpq_class> q;
  q.reserve(coords.size());
  for (const auto& c : coords) q.push_back(parse_rational(c));
  return FrequencyVector(std::move(basis), std::move(q));
}

bool FrequencyVector::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const mpq_class& c) { return c == 0; });
}

bool FrequencyVector::same_basis(const FrequencyVector& other) const {
  return basis_ == other.basis_ || *basis_ == *other.basis_;
}

FrequencyVector FrequencyVector::operator+(const FrequencyVector& other) const {
  if (!same_basis(other)) throw Error(Errc::BasisMismatch, "adding frequencies over different bases");
  auto out = *this;
  for (std::size_t i = 0; i < coords_.size(); ++i) out.coords_[i] += other.coords_[i];
  return out;
}

FrequencyVector FrequencyVector::operator-(const FrequencyVector& other) const { return *this + (-other); }

FrequencyVector FrequencyVector::operator-() const {
  auto out = *this;
  for (auto& c : out.coords_) c = -c;
  return out;
}

FrequencyVector FrequencyVector::operator*(const mpq_class& factor) const {
  auto out = *this;
  for (auto& c : out.coords_) c *= factor;
  return out;
}

FrequencyVector FrequencyVector::operator*(std::int64_t factor) const {
  return *this * mpq_class(mpz_class(std::to_string(factor), 10));
}

bool FrequencyVector::operator==(const FrequencyVector& other) const {
  return same_basis(other) && coords_ == other.coords_;
}

std::strong_ordering FrequencyVector::operator<=>(const FrequencyVector& other) const {
  const std::size_t n = std::min(coords_.size(), other.coords_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cmp(coords_[i], other.coords_[i]);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
  }
  return coords_.size() <=> other.coords_.size();
}

std::vector<std::string> FrequencyVector::to_strings() const {
  std::vector<std::string> out;
  out.reserve(coords_.size());
  for (const auto& c : coords_) out.push_back(format_rational(c));
  return out;
}

std::size_t rank_over_Q(std::span<const FrequencyVector> vectors) {
  if (vectors.empty()) return 0;
  require_same_basis(vectors);
  auto a = integer_rows(vectors);
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();

  // Bareiss: after step k every entry of the trailing block is a k x k minor,
  // so the division by the previous pivot is exact.
  std::size_t rank = 0;
  mpz_class prev = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        a[i][j] = a[rank][col] * a[i][j] - a[i][col] * a[rank][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

std::optional<IntVector> find_integer_relation(std::span<const FrequencyVector> vectors, int bound) {
  if (vectors.empty() || bound < 1) return std::nullopt;
  require_same_basis(vectors);
  const auto rows = integer_rows(vectors);
  const std::size_t n = rows.size();
  const std::size_t dim = rows.front().size();

  const bool small = fits_small(rows, bound);
  std::vector<std::vector<std::int64_t>> rows64;
  if (small)
    for (const auto& row : rows) {
      std::vector<std::int64_t> r;
      for (const auto& x : row) r.push_back(x.get_si());
      rows64.push_back(std::move(r));
    }

  auto vanishes = [&](const IntVector& m) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (small) {
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += m[i] * rows64[i][j];
        if (acc != 0) return false;
      } else {
        mpz_class acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += mpz_class(static_cast<long>(m[i])) * rows[i][j];
        if (acc != 0) return false;
      }
    }
    return true;
  };

  for (int h = 1; h <= bound; ++h) {
    IntVector m(n, -h);
    do {
      if (is_candidate(m, h) && vanishes(m)) return m;
    } while (next_in_box(m, h));
  }
  return std::nullopt;
}

IndependentSet IndependentSet::make(std::vector<FrequencyVector> vectors) {
  if (vectors.empty()) throw Error(Errc::EmptySet, "independent set needs at least one frequency");
  require_same_basis(vectors);
  const std::size_t rank = rank_over_Q(vectors);
  if (rank != vectors.size()) {
    std::optional<IntVector> witness;
    if (vectors.size() <= kWitnessMaxCount) witness = find_integer_relation(vectors, kWitnessBound);
    std::string what = "rank " + std::to_string(rank) + " < " + std::to_string(vectors.size());
    if (witness) {
      what += ", relation (";
      for (std::size_t i = 0; i < witness->size(); ++i) what += (i ? "," : "") + std::to_string((*witness)[i]);
      what += ")";
    }
    throw DependentSetError(what, std::move(witness));
  }
  return IndependentSet(std::make_shared<const std::vector<FrequencyVector>>(std::move(vectors)));
}

bool IndependentSet::operator==(const IndependentSet& other) const {
  return gens_ == other.gens_ || *gens_ == *other.gens_;
}

IntVector decompose(const FrequencyVector& k, const IndependentSet& gamma) {
  if (!k.same_basis(gamma[0])) throw Error(Errc::BasisMismatch, "frequency and set over different bases");
  const std::size_t n = gamma.size();
  const std::size_t dim = k.size();

  // Augmented system: columns are the generators, last column is k.
  std::vector<std::vector<mpq_class>> a(dim, std::vector<mpq_class>(n + 1));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < n; ++c) a[r][c] = gamma[c].coords()[r];
    a[r][n] = k.coords()[r];
  }

  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < dim; ++col) {
    std::size_t p = row;
    while (p < dim && a[p][col] == 0) ++p;
    if (p == dim) continue;
    std::swap(a[p], a[row]);
    const mpq_class inv = 1 / a[row][col];
    for (std::size_t j = col; j <= n; ++j) a[row][j] *= inv;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const mpq_class f = a[i][col];
      for (std::size_t j = col; j <= n; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < dim; ++i)
    if (a[i][n] != 0) throw Error(Errc::NotInSpan, "frequency is outside the Q-span of the set");

  IntVector m(n, 0);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) {
    const mpq_class& x = a[i][n];
    if (x.get_den() != 1) throw Error(Errc::NotIntegral, "coefficient " + format_rational(x) + " is not an integer");
    if (!x.get_num().fits_slong_p()) throw Error(Errc::Overflow, "coefficient exceeds 64 bits");
    m[pivot_col[i]] = x.get_num().get_si();
  }
  return m;
}

IntMatrix refinement_matrix(const IndependentSet& gamma, const IndependentSet& gamma_prime) {
  IntMatrix out;
  out.reserve(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    try {
      out.push_back(decompose(gamma[i], gamma_prime));
    } catch (const Error& e) {
      if (e.code() == Errc::NotInSpan || e.code() == Errc::NotIntegral)
        throw Error(Errc::NotRefinement, "generator " + std::to_string(i) + " is not in the finer group");
      throw;
    }
  }
  return out;
}

FrequencyVector scale(const FrequencyVector& k, const mpq_class& lambda) {
  if (lambda == 0) throw Error(Errc::ZeroLambda, "scaling by zero");
  return k * lambda;
}

IndependentSet scale(const IndependentSet& gamma, const mpq_class& lambda) {
  std::vector<FrequencyVector> out;
  out.reserve(gamma.size());
  for (const auto& k : gamma.generators()) out.push_back(scale(k, lambda));
  return IndependentSet::make(std::move(out));
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty()) return {};
  const std::size_t inner = b.size();
  const std::size_t cols = b.empty() ? 0 : b.front().size();
  IntMatrix out(a.size(), IntVector(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner) throw Error(Errc::SizeMismatch, "matrix shapes do not chain");
    for (std::size_t k = 0; k < inner; ++k)
      for (std::size_t j = 0; j < cols; ++j) {
        std::int64_t term;
        if (__builtin_mul_overflow(a[i][k], b[k][j], &term) || __builtin_add_overflow(out[i][j], term, &out[i][j]))
          throw Error(Errc::Overflow, "matrix product exceeds 64 bits");
      }
  }
  return out;
}

}  // namespace mlab
