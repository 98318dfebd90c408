#include "measurelab/bohr_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "measurelab/kernels.hpp"

namespace mlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t >= kTwoPi ? 0.0 : t;
}

double uniform_angle(std::mt19937_64& engine) {
  std::uniform_real_distribution<double> dist(0.0, kTwoPi);
  const double t = dist(engine);
  return t >= kTwoPi ? 0.0 : t;
}

double phase(const IntVector& m, std::span<const double> angles) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += static_cast<double>(m[i]) * angles[i];
  return acc;
}

// Shifted accumulation: a constant sample set gives its value and zero error.
ComplexEstimate complex_mean(const std::vector<Complex>& values) {
  ComplexEstimate out{};
  if (values.empty()) return out;
  const Complex shift = values.front();
  Complex acc = 0.0;
  for (const auto& v : values) acc += v - shift;
  const double n = static_cast<double>(values.size());
  out.mean = shift + acc / n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (const auto& v : values) ss += std::norm(v - out.mean);
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

bool within_three(const ComplexEstimate& est, Complex exact) {
  return std::abs(est.mean - exact) <= 3.0 * est.std_error;
}

RngState substream(const RngState& rng, std::uint64_t tag) { return {splitmix64(rng.seed ^ splitmix64(tag)), rng.stream}; }

void check_replicas(std::size_t replicas) {
  if (replicas < 100) throw Error(Errc::BadReplicas, "need at least 100 replicas, got " + std::to_string(replicas));
}

}  // namespace

TorusPoint haar_sample(const IndependentSet& gamma, const RngState& rng) {
  auto engine = rng.engine();
  TorusPoint point{gamma, std::vector<double>(gamma.size())};
  for (auto& a : point.angles) a = uniform_angle(engine);
  return point;
}

Complex evaluate_point(const TorusPoint& point, const FrequencyVector& k) {
  const IntVector m = decompose(k, point.gamma);
  return std::polar(1.0, wrap_angle(phase(m, point.angles)));
}

CylFunction::CylFunction(IndependentSet gamma, std::map<IntVector, Complex> coeffs) : gamma_(std::move(gamma)) {
  for (const auto& [m, c] : coeffs) add(m, c);
}

CylFunction CylFunction::constant(IndependentSet gamma, Complex c) {
  CylFunction f(std::move(gamma));
  f.add(IntVector(f.gamma().size(), 0), c);
  return f;
}

CylFunction CylFunction::character(IndependentSet gamma, IntVector m, Complex c) {
  CylFunction f(std::move(gamma));
  f.add(m, c);
  return f;
}

void CylFunction::add(const IntVector& m, Complex c) {
  if (m.size() != gamma_.size())
    throw Error(Errc::SizeMismatch, "character index has " + std::to_string(m.size()) + " entries, torus has " +
                                        std::to_string(gamma_.size()));
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw Error(Errc::NonfiniteValue, "coefficient");
  auto it = coeffs_.find(m);
  if (it == coeffs_.end()) {
    if (c != Complex(0.0)) coeffs_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == Complex(0.0)) coeffs_.erase(it);
}

Complex CylFunction::coefficient(const IntVector& m) const {
  const auto it = coeffs_.find(m);
  return it == coeffs_.end() ? Complex(0.0) : it->second;
}

Complex CylFunction::at(std::span<const double> angles) const {
  if (angles.size() != gamma_.size()) throw Error(Errc::SizeMismatch, "angle count != torus dimension");
  Complex acc = 0.0;
  for (const auto& [m, c] : coeffs_) acc += c * std::polar(1.0, wrap_angle(phase(m, angles)));
  return acc;
}

Complex evaluate(const CylFunction& f, const TorusPoint& point) {
  if (!(f.gamma() == point.gamma)) throw Error(Errc::GammaMismatch, "function and point live on different tori");
  return f.at(point.angles);
}

Complex integrate_exact(const CylFunction& f) { return f.coefficient(IntVector(f.gamma().size(), 0)); }

ComplexEstimate integrate_mc(const CylFunction& f, std::size_t replicas, const RngState& rng) {
  check_replicas(replicas);
  const auto values = kernels::parallel::map(replicas, [&](std::size_t r) {
    return evaluate(f, haar_sample(f.gamma(), rng.replica(r)));
  });
  return complex_mean(values);
}

std::vector<std::vector<ComplexEstimate>> character_gram(const IndependentSet& gamma,
                                                         std::span<const IntVector> characters,
                                                         std::size_t replicas, const RngState& rng) {
  check_replicas(replicas);
  for (const auto& m : characters)
    if (m.size() != gamma.size()) throw Error(Errc::SizeMismatch, "character index length != |gamma|");
  const auto samples = kernels::parallel::map(replicas, [&](std::size_t r) {
    const auto point = haar_sample(gamma, rng.replica(r));
    std::vector<Complex> chi;
    chi.reserve(characters.size());
    for (const auto& m : characters) chi.push_back(std::polar(1.0, wrap_angle(phase(m, point.angles))));
    return chi;
  });
  const std::size_t n = characters.size();
  std::vector<std::vector<ComplexEstimate>> gram(n, std::vector<ComplexEstimate>(n));
  std::vector<Complex> column(replicas);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t r = 0; r < replicas; ++r) column[r] = samples[r][a] * std::conj(samples[r][b]);
      gram[a][b] = complex_mean(column);
    }
  return gram;
}

CylFunction transport(const CylFunction& f, const IndependentSet& gamma_prime) {
  const IntMatrix mat = refinement_matrix(f.gamma(), gamma_prime);
  CylFunction out(gamma_prime);
  for (const auto& [m, c] : f.coeffs()) {
    IntVector image(gamma_prime.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < image.size(); ++j) image[j] += mat[i][j] * m[i];
    out.add(image, c);
  }
  return out;
}

TorusPoint restrict_point(const TorusPoint& point, const IndependentSet& gamma) {
  const IntMatrix mat = refinement_matrix(gamma, point.gamma);
  TorusPoint out{gamma, std::vector<double>(gamma.size())};
  for (std::size_t i = 0; i < gamma.size(); ++i) out.angles[i] = wrap_angle(phase(mat[i], point.angles));
  return out;
}

PushforwardReport pushforward_check(const IndependentSet& gamma, const IndependentSet& gamma_prime,
                                    const CylFunction& f, std::size_t replicas, const RngState& rng) {
  if (!(f.gamma() == gamma)) throw Error(Errc::GammaMismatch, "function is not on gamma");
  check_replicas(replicas);
  const auto moved = transport(f, gamma_prime);  // throws NOT_REFINEMENT first

  PushforwardReport report{};
  report.exact_direct = integrate_exact(f);
  report.exact_transported = integrate_exact(moved);
  report.exact_agree = report.exact_direct == report.exact_transported;

  report.mc_direct = integrate_mc(f, replicas, substream(rng, 1));
  const RngState fine = substream(rng, 2);
  const IntMatrix mat = refinement_matrix(gamma, gamma_prime);
  const auto values = kernels::parallel::map(replicas, [&](std::size_t r) {
    const auto point = haar_sample(gamma_prime, fine.replica(r));
    std::vector<double> coarse(gamma.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = wrap_angle(phase(mat[i], point.angles));
    return f.at(coarse);
  });
  report.mc_transported = complex_mean(values);
  report.mc_agree = within_three(report.mc_direct, report.exact_direct) &&
                    within_three(report.mc_transported, report.exact_direct);
  return report;
}

ArcSet::ArcSet(std::vector<std::pair<mpq_class, mpq_class>> arcs) : arcs_(std::move(arcs)), measure_(0) {
  if (arcs_.empty()) throw Error(Errc::BadArc, "no arcs");
  for (auto& [lo, hi] : arcs_) {
    lo.canonicalize();
    hi.canonicalize();
    if (lo < 0 || hi > 1 || !(lo < hi)) throw Error(Errc::BadArc, "arc must satisfy 0 <= lo < hi <= 1 (turns)");
  }
  std::sort(arcs_.begin(), arcs_.end());
  for (std::size_t i = 1; i < arcs_.size(); ++i)
    if (arcs_[i].first < arcs_[i - 1].second) throw Error(Errc::BadArc, "arcs overlap");
  for (const auto& [lo, hi] : arcs_) {
    measure_ += hi - lo;
    bounds_.emplace_back(lo.get_d() * kTwoPi, hi.get_d() * kTwoPi);
  }
}

ArcSet ArcSet::prefix(const mpq_class& r) { return ArcSet({{mpq_class(0), r}}); }

bool ArcSet::contains(double angle) const {
  for (const auto& [lo, hi] : bounds_)
    if (angle >= lo && angle < hi) return true;
  return false;
}

IndependentSet independent_sequence(const mpq_class& center, const mpq_class& radius, std::size_t count) {
  if (count == 0) throw Error(Errc::EmptySet, "sequence length 0");
  std::vector<std::string> names{"1"};
  for (std::size_t i = 1; i <= count; ++i) names.push_back("u" + std::to_string(i));
  const auto basis = SymbolBasis::make(std::move(names));
  std::vector<FrequencyVector> gens;
  mpq_class step = radius;
  for (std::size_t i = 1; i <= count; ++i) {
    step /= 2;
    std::vector<mpq_class> coords(count + 1, mpq_class(0));
    coords[0] = center;
    coords[i] = step;
    gens.emplace_back(basis, std::move(coords));
  }
  return IndependentSet::make(std::move(gens));
}

std::vector<ZnRow> zn_probability(const ArcSet& arc, std::span<const std::size_t> sizes, std::size_t replicas,
                                  const RngState& rng) {
  const mpq_class& r = arc.measure();
  if (!(r > 0 && r < 1)) throw Error(Errc::BadArc, "need 0 < mu_H(U) < 1, got " + format_rational(r));
  check_replicas(replicas);
  const std::size_t n_max = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  if (n_max > 0) independent_sequence(mpq_class(0), mpq_class(1), n_max);

  // Angles on gamma_N are drawn generator by generator, so one pass per
  // replica gives the length of its initial run inside U, which decides Z_N
  // for every N at once.
  const auto runs = kernels::parallel::map(replicas, [&](std::size_t rep) {
    auto engine = rng.replica(rep).engine();
    std::size_t run = 0;
    while (run < n_max && arc.contains(uniform_angle(engine))) ++run;
    return run;
  });

  std::vector<ZnRow> rows;
  for (std::size_t n : sizes) {
    ZnRow row{};
    row.n = n;
    mpz_pow_ui(row.exact.get_num_mpz_t(), r.get_num_mpz_t(), n);
    mpz_pow_ui(row.exact.get_den_mpz_t(), r.get_den_mpz_t(), n);
    row.exact.canonicalize();
    row.exact_value = row.exact.get_d();
    const auto hits = std::count_if(runs.begin(), runs.end(), [n](std::size_t run) { return run >= n; });
    const double m = static_cast<double>(replicas);
    row.frequency = static_cast<double>(hits) / m;
    row.sigma = std::sqrt(row.exact_value * (1.0 - row.exact_value) / m);
    row.within = std::abs(row.frequency - row.exact_value) <= 3.0 * row.sigma;
    rows.push_back(row);
  }
  return rows;
}

void GlobalTrigPoly::add(const FrequencyVector& k, Complex c) {
  if (!basis_ || !(*k.basis() == *basis_)) throw Error(Errc::BasisMismatch, "term over a different basis");
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw Error(Errc::NonfiniteValue, "coefficient");
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    if (c != Complex(0.0)) terms_.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second == Complex(0.0)) terms_.erase(it);
}

Complex GlobalTrigPoly::coefficient(const FrequencyVector& k) const {
  const auto it = terms_.find(k);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

bool GlobalTrigPoly::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.is_zero(); });
}

Complex integrate_exact(const GlobalTrigPoly& psi) { return psi.coefficient(FrequencyVector::zero(psi.basis())); }

GlobalTrigPoly act_scale(const GlobalTrigPoly& psi, const mpq_class& lambda) {
  if (lambda == 0) throw Error(Errc::ZeroLambda, "scaling by zero");
  GlobalTrigPoly out(psi.basis());
  for (const auto& [k, c] : psi.terms()) out.add(scale(k, lambda), c);
  return out;
}

bool is_invariant(const GlobalTrigPoly& psi, const mpq_class& lambda) {
  if (lambda == 0) throw Error(Errc::ZeroLambda, "scaling by zero");
  // c_k = c_{lambda k} can only fail where k or lambda k carries a term.
  std::set<FrequencyVector> keys;
  const mpq_class inverse = 1 / lambda;
  for (const auto& [k, c] : psi.terms()) {
    keys.insert(k);
    keys.insert(scale(k, lambda));
    keys.insert(scale(k, inverse));
  }
  for (const auto& k : keys)
    if (psi.coefficient(k) != psi.coefficient(scale(k, lambda))) return false;
  return true;
}

GlobalTrigPoly random_trig_poly(const BasisPtr& basis, std::mt19937_64& engine, bool force_nonconstant) {
  std::uniform_int_distribution<int> terms(1, 5);
  std::uniform_int_distribution<int> numerator(-4, 4);
  std::uniform_int_distribution<int> denominator(1, 4);
  std::uniform_int_distribution<int> coefficient(-9, 9);
  std::uniform_int_distribution<std::size_t> symbol(0, basis->size() - 1);

  auto random_coefficient = [&] {
    Complex c;
    do c = Complex(coefficient(engine), coefficient(engine));
    while (c == Complex(0.0));
    return c;
  };

  GlobalTrigPoly psi(basis);
  const int count = terms(engine);
  for (int t = 0; t < count; ++t) {
    std::vector<mpq_class> coords;
    for (std::size_t i = 0; i < basis->size(); ++i) coords.emplace_back(numerator(engine), denominator(engine));
    psi.add(FrequencyVector(basis, std::move(coords)), random_coefficient());
  }
  if (force_nonconstant && psi.is_constant())
    psi.add(FrequencyVector::unit(basis, symbol(engine)) * mpq_class(numerator(engine) >= 0 ? 1 : -1),
            random_coefficient());
  return psi;
}

mpq_class random_lambda(std::mt19937_64& engine) {
  std::uniform_int_distribution<int> numerator(-6, 6);
  std::uniform_int_distribution<int> denominator(1, 6);
  while (true) {
    mpq_class lambda(numerator(engine), denominator(engine));
    lambda.canonicalize();
    if (lambda != 0 && abs(lambda) != 1) return lambda;
  }
}

ErgodicityReport ergodicity_suite(std::size_t trials, const RngState& rng) {
  if (trials == 0) throw Error(Errc::BadReplicas, "need at least one trial");
  const auto basis = SymbolBasis::make({"1", "sqrt2", "pi"});
  const mpq_class reflection(-1);
  ErgodicityReport report{};
  for (std::size_t t = 0; t < trials; ++t) {
    auto engine = rng.replica(t).engine();

    const auto psi = random_trig_poly(basis, engine, true);
    const auto lambda = random_lambda(engine);
    ++report.trials;
    if (is_invariant(psi, lambda)) ++report.invariant_nonconstant;

    GlobalTrigPoly constant(basis);
    constant.add(FrequencyVector::zero(basis), integrate_exact(psi) + Complex(1.0, 0.0));
    ++report.constant_trials;
    if (is_invariant(constant, lambda)) ++report.constant_invariant;

    // F_k + F_{-k} is fixed by lambda = -1 alone; counted, never a failure.
    FrequencyVector k = FrequencyVector::zero(basis);
    for (const auto& [key, c] : psi.terms())
      if (!key.is_zero()) {
        k = key;
        break;
      }
    GlobalTrigPoly cosine(basis);
    cosine.add(k, 1.0);
    cosine.add(-k, 1.0);
    ++report.reflection_trials;
    if (is_invariant(cosine, reflection)) ++report.reflection_invariant;
  }
  return report;
}

}  // namespace mlab
