#include "hsigma/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace hsigma {

GeneratorSet::GeneratorSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > kMaxGenerators) {
    throw DomainError("generator set exceeds " + std::to_string(kMaxGenerators) + " generators");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw DomainError("duplicate generator name '" + n + "'");
  }
}

std::size_t GeneratorSet::index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DomainError("unknown generator '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

bool GeneratorSet::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

AlgebraPtr make_algebra(std::vector<std::string> names) {
  return std::make_shared<const GeneratorSet>(std::move(names));
}

AlgebraPtr make_field_algebra(const std::vector<std::string>& vertex_labels,
                              const std::vector<std::string>& extra) {
  std::vector<std::string> names;
  names.reserve(2 * vertex_labels.size() + extra.size());
  for (const auto& v : vertex_labels) {
    names.push_back("psibar_" + v);
    names.push_back("psi_" + v);
  }
  names.insert(names.end(), extra.begin(), extra.end());
  return make_algebra(std::move(names));
}

bool same_algebra(const AlgebraPtr& x, const AlgebraPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  return *x == *y;
}

int monomial_sign(Mask a, Mask b) noexcept {
  if (a & b) return 0;
  int swaps = 0;
  while (b) {
    const int k = std::countr_zero(b);
    b &= b - 1;
    swaps += std::popcount(k == 63 ? Mask{0} : (a >> (k + 1)));
  }
  return (swaps & 1) ? -1 : 1;
}

namespace {

AlgebraPtr unify(const AlgebraPtr& x, const AlgebraPtr& y) {
  if (!x) return y;
  if (!y) return x;
  if (!same_algebra(x, y)) throw AlgebraMismatch("operands belong to different generator sets");
  return x;
}

template <class T>
double magnitude(const T& c) {
  return std::abs(c);
}

template <class T>
void canonicalize(std::vector<std::pair<Mask, T>>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& p, const auto& q) { return p.first < q.first; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < terms.size();) {
    Mask m = terms[r].first;
    T acc = terms[r].second;
    std::size_t s = r + 1;
    for (; s < terms.size() && terms[s].first == m; ++s) acc += terms[s].second;
    if (acc != T(0)) terms[w++] = {m, acc};
    r = s;
  }
  terms.resize(w);
}

}  // namespace

template <class T>
BasicGrassmann<T>::BasicGrassmann(T scalar) {
  if (scalar != T(0)) terms_.emplace_back(Mask{0}, scalar);
}

template <class T>
BasicGrassmann<T>::BasicGrassmann(AlgebraPtr algebra, T scalar) : algebra_(std::move(algebra)) {
  if (scalar != T(0)) terms_.emplace_back(Mask{0}, scalar);
}

template <class T>
BasicGrassmann<T>::BasicGrassmann(AlgebraPtr algebra, std::vector<Term> terms)
    : algebra_(std::move(algebra)), terms_(std::move(terms)) {
  const std::size_t n = algebra_ ? algebra_->size() : 0;
  const Mask allowed = n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1);
  for (const auto& t : terms_) {
    if (t.first & ~allowed) throw DomainError("monomial references a generator outside the algebra");
  }
  canonicalize(terms_);
  prune();
}

template <class T>
BasicGrassmann<T> BasicGrassmann<T>::generator(const AlgebraPtr& algebra, std::size_t index) {
  if (!algebra || index >= algebra->size()) throw DomainError("generator index out of range");
  return BasicGrassmann(algebra, std::vector<Term>{{Mask{1} << index, T(1)}});
}

template <class T>
BasicGrassmann<T> BasicGrassmann<T>::generator(const AlgebraPtr& algebra, const std::string& name) {
  if (!algebra) throw DomainError("generator lookup without an algebra");
  return generator(algebra, algebra->index(name));
}

template <class T>
BasicGrassmann<T> BasicGrassmann<T>::monomial(const AlgebraPtr& algebra, Mask mask, T coeff) {
  return BasicGrassmann(algebra, std::vector<Term>{{mask, coeff}});
}

template <class T>
T BasicGrassmann<T>::body() const noexcept {
  return (!terms_.empty() && terms_.front().first == 0) ? terms_.front().second : T(0);
}

template <class T>
BasicGrassmann<T> BasicGrassmann<T>::soul() const {
  BasicGrassmann r;
  r.algebra_ = algebra_;
  r.terms_ = terms_;
  if (!r.terms_.empty() && r.terms_.front().first == 0) r.terms_.erase(r.terms_.begin());
  return r;
}

template <class T>
T BasicGrassmann<T>::coeff(Mask mask) const noexcept {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                             [](const Term& t, Mask m) { return t.first < m; });
  return (it != terms_.end() && it->first == mask) ? it->second : T(0);
}

template <class T>
bool BasicGrassmann<T>::is_scalar() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().first == 0);
}

template <class T>
bool BasicGrassmann<T>::is_even() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return (std::popcount(t.first) & 1) == 0; });
}

template <class T>
bool BasicGrassmann<T>::is_odd() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return (std::popcount(t.first) & 1) == 1; });
}

template <class T>
int BasicGrassmann<T>::degree() const noexcept {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, std::popcount(t.first));
  return d;
}

template <class T>
BasicGrassmann<T>& BasicGrassmann<T>::prune(double rel) {
  double mx = 0.0;
  for (const auto& t : terms_) mx = std::max(mx, magnitude(t.second));
  const double cut = rel * mx;
  std::erase_if(terms_, [cut](const Term& t) { return magnitude(t.second) <= cut; });
  return *this;
}

template <class T>
BasicGrassmann<T> BasicGrassmann<T>::operator-() const {
  BasicGrassmann r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

template <class T>
BasicGrassmann<T>& BasicGrassmann<T>::operator+=(const BasicGrassmann& y) {
  algebra_ = unify(algebra_, y.algebra_);
  std::vector<Term> out;
  out.reserve(terms_.size() + y.terms_.size());
  auto i = terms_.begin();
  auto j = y.terms_.begin();
  while (i != terms_.end() || j != y.terms_.end()) {
    if (j == y.terms_.end() || (i != terms_.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == terms_.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      T c = i->second + j->second;
      if (c != T(0)) out.emplace_back(i->first, c);
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return prune();
}

template <class T>
BasicGrassmann<T>& BasicGrassmann<T>::operator-=(const BasicGrassmann& y) {
  return *this += -y;
}

template <class T>
BasicGrassmann<T>& BasicGrassmann<T>::operator*=(const BasicGrassmann& y) {
  *this = multiply(*this, y);
  return *this;
}

template <class T>
BasicGrassmann<T>& BasicGrassmann<T>::operator*=(T s) {
  if (s == T(0)) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= s;
  return *this;
}

template <class T>
BasicGrassmann<T> BasicGrassmann<T>::multiply(const BasicGrassmann& x, const BasicGrassmann& y) {
  BasicGrassmann r;
  r.algebra_ = unify(x.algebra_, y.algebra_);
  if (x.terms_.empty() || y.terms_.empty()) return r;
  r.terms_.reserve(x.terms_.size() * y.terms_.size());
  for (const auto& [mx, cx] : x.terms_) {
    for (const auto& [my, cy] : y.terms_) {
      const int s = monomial_sign(mx, my);
      if (s == 0) continue;
      r.terms_.emplace_back(mx | my, s > 0 ? cx * cy : -(cx * cy));
    }
  }
  canonicalize(r.terms_);
  r.prune();
  return r;
}

template <class T>
bool BasicGrassmann<T>::approx_equal(const BasicGrassmann& y, double tol) const {
  if (algebra_ && y.algebra_ && !same_algebra(algebra_, y.algebra_)) return false;
  auto i = terms_.begin();
  auto j = y.terms_.begin();
  while (i != terms_.end() || j != y.terms_.end()) {
    if (j == y.terms_.end() || (i != terms_.end() && i->first < j->first)) {
      if (magnitude(i->second) > tol) return false;
      ++i;
    } else if (i == terms_.end() || j->first < i->first) {
      if (magnitude(j->second) > tol) return false;
      ++j;
    } else {
      if (magnitude(i->second - j->second) > tol) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

template <class T>
BasicGrassmann<T> BasicGrassmann<T>::embed(const AlgebraPtr& target,
                                           const std::vector<std::size_t>& index_map) const {
  const std::size_t n = algebra_ ? algebra_->size() : 0;
  if (index_map.size() < n) throw DomainError("embedding map shorter than the source algebra");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    Mask acc = 0;
    int sign = 1;
    for (Mask rest = m; rest; rest &= rest - 1) {
      const std::size_t k = static_cast<std::size_t>(std::countr_zero(rest));
      if (index_map[k] >= target->size()) throw DomainError("embedding target index out of range");
      const Mask bit = Mask{1} << index_map[k];
      const int s = monomial_sign(acc, bit);
      if (s == 0) throw DomainError("embedding map is not injective");
      sign *= s;
      acc |= bit;
    }
    out.emplace_back(acc, sign > 0 ? c : -c);
  }
  return BasicGrassmann(target, std::move(out));
}

template class BasicGrassmann<double>;
template class BasicGrassmann<std::complex<double>>;

ComplexGrassmann to_complex(const GrassmannElement& x) {
  return x.map<std::complex<double>>([](double c) { return std::complex<double>(c, 0.0); });
}

GrassmannElement real_part(const ComplexGrassmann& x) {
  return x.map<double>([](std::complex<double> c) { return c.real(); });
}

GrassmannElement imag_part(const ComplexGrassmann& x) {
  return x.map<double>([](std::complex<double> c) { return c.imag(); });
}

template <class T>
BasicGrassmann<T> apply_taylor(const BasicGrassmann<T>& x, const std::function<T(int)>& taylor) {
  if (!x.is_even()) throw ParityError("analytic functions are defined on even elements only");
  const BasicGrassmann<T> n = x.soul();
  BasicGrassmann<T> result(x.algebra(), taylor(0));
  BasicGrassmann<T> power(x.algebra(), T(1));
  for (int k = 1;; ++k) {
    power = power * n;
    if (power.is_zero()) break;
    result += power * taylor(k);
  }
  return result;
}

template BasicGrassmann<double> apply_taylor(const BasicGrassmann<double>&,
                                             const std::function<double(int)>&);
template BasicGrassmann<std::complex<double>> apply_taylor(
    const BasicGrassmann<std::complex<double>>&,
    const std::function<std::complex<double>(int)>&);

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

template <class T>
BasicGrassmann<T> named_fn(const BasicGrassmann<T>& x, EvenFn fn) {
  const T x0 = x.body();
  switch (fn) {
    case EvenFn::exp: {
      const T e = std::exp(x0);
      return apply_taylor<T>(x, [e](int k) { return e / T(factorial(k)); });
    }
    case EvenFn::log:
      return apply_taylor<T>(x, [x0](int k) {
        if (k == 0) return std::log(x0);
        const T sign = (k % 2 == 1) ? T(1) : T(-1);
        return sign / (T(k) * std::pow(x0, k));
      });
    case EvenFn::inverse:
      return apply_taylor<T>(x, [x0](int k) {
        const T sign = (k % 2 == 0) ? T(1) : T(-1);
        return sign / std::pow(x0, k + 1);
      });
    case EvenFn::sqrt:
      return apply_taylor<T>(x, [x0](int k) {
        // binom(1/2, k) x0^(1/2 - k)
        double binom = 1.0;
        for (int j = 0; j < k; ++j) binom *= (0.5 - j) / (j + 1.0);
        return T(binom) * std::sqrt(x0) / std::pow(x0, k);
      });
  }
  throw DomainError("unknown even function");
}

}  // namespace

GrassmannElement ga_fn_even(const GrassmannElement& x, EvenFn fn) {
  if (!x.is_even()) throw ParityError("analytic functions are defined on even elements only");
  if (fn != EvenFn::exp && !(x.body() > 0.0)) {
    throw DomainError("log, inverse and sqrt require a positive body");
  }
  return named_fn(x, fn);
}

ComplexGrassmann ga_fn_even(const ComplexGrassmann& x, EvenFn fn) {
  if (!x.is_even()) throw ParityError("analytic functions are defined on even elements only");
  if (fn != EvenFn::exp && x.body() == std::complex<double>(0.0)) {
    throw DomainError("log, inverse and sqrt require a nonzero body");
  }
  return named_fn(x, fn);
}

template <class T>
BasicGrassmann<T> exp(const BasicGrassmann<T>& x) {
  return ga_fn_even(x, EvenFn::exp);
}
template GrassmannElement exp(const GrassmannElement&);
template ComplexGrassmann exp(const ComplexGrassmann&);

GrassmannElement log(const GrassmannElement& x) { return ga_fn_even(x, EvenFn::log); }
GrassmannElement sqrt(const GrassmannElement& x) { return ga_fn_even(x, EvenFn::sqrt); }
GrassmannElement inverse(const GrassmannElement& x) { return ga_fn_even(x, EvenFn::inverse); }
ComplexGrassmann inverse(const ComplexGrassmann& x) { return ga_fn_even(x, EvenFn::inverse); }

GrassmannElement cosh(const GrassmannElement& x) {
  const double c = std::cosh(x.body()), s = std::sinh(x.body());
  return apply_taylor<double>(x, [c, s](int k) { return (k % 2 == 0 ? c : s) / factorial(k); });
}

GrassmannElement sinh(const GrassmannElement& x) {
  const double c = std::cosh(x.body()), s = std::sinh(x.body());
  return apply_taylor<double>(x, [c, s](int k) { return (k % 2 == 0 ? s : c) / factorial(k); });
}

template <class T>
BasicGrassmann<T> reciprocal(const BasicGrassmann<T>& x) {
  if (!x.is_even()) throw ParityError("reciprocal of a non-even element");
  if (x.body() == T(0)) throw SingularityError("reciprocal of an element with zero body");
  return named_fn(x, EvenFn::inverse);
}
template GrassmannElement reciprocal(const GrassmannElement&);
template ComplexGrassmann reciprocal(const ComplexGrassmann&);

template <class T>
BasicGrassmann<T> berezin(const BasicGrassmann<T>& x, std::size_t index) {
  if (!x.algebra() || index >= x.algebra()->size()) {
    throw DomainError("derivative with respect to a generator outside the algebra");
  }
  const Mask bit = Mask{1} << index;
  std::vector<typename BasicGrassmann<T>::Term> out;
  for (const auto& [m, c] : x.terms()) {
    if (!(m & bit)) continue;
    const bool negative = std::popcount(m & (bit - 1)) & 1;
    out.emplace_back(m ^ bit, negative ? -c : c);
  }
  return BasicGrassmann<T>(x.algebra(), std::move(out));
}
template GrassmannElement berezin(const GrassmannElement&, std::size_t);
template ComplexGrassmann berezin(const ComplexGrassmann&, std::size_t);

template <class T>
BasicGrassmann<T> berezin(const BasicGrassmann<T>& x, const std::string& name) {
  if (!x.algebra()) throw DomainError("unknown generator '" + name + "'");
  return berezin(x, x.algebra()->index(name));
}
template GrassmannElement berezin(const GrassmannElement&, const std::string&);
template ComplexGrassmann berezin(const ComplexGrassmann&, const std::string&);

template <class T>
BasicGrassmann<T> berezin_integral(const BasicGrassmann<T>& x,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  BasicGrassmann<T> r = x;
  for (const auto& [bar, gen] : pairs) r = berezin(berezin(r, gen), bar);
  return r;
}
template GrassmannElement berezin_integral(const GrassmannElement&,
                                           const std::vector<std::pair<std::size_t, std::size_t>>&);
template ComplexGrassmann berezin_integral(const ComplexGrassmann&,
                                           const std::vector<std::pair<std::size_t, std::size_t>>&);

template <class T>
BasicGMatrix<T> BasicGMatrix<T>::identity(std::size_t n) {
  BasicGMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Element(T(1));
  return m;
}

template <class T>
BasicGMatrix<T> BasicGMatrix<T>::operator+(const BasicGMatrix& y) const {
  if (rows_ != y.rows_ || cols_ != y.cols_) throw DomainError("matrix shape mismatch");
  BasicGMatrix r = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] += y.data_[k];
  return r;
}

template <class T>
BasicGMatrix<T> BasicGMatrix<T>::operator-(const BasicGMatrix& y) const {
  if (rows_ != y.rows_ || cols_ != y.cols_) throw DomainError("matrix shape mismatch");
  BasicGMatrix r = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] -= y.data_[k];
  return r;
}

template <class T>
BasicGMatrix<T> BasicGMatrix<T>::operator*(const BasicGMatrix& y) const {
  if (cols_ != y.rows_) throw DomainError("matrix shape mismatch");
  BasicGMatrix r(rows_, y.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < y.cols_; ++j)
      for (std::size_t k = 0; k < cols_; ++k) r(i, j) += (*this)(i, k) * y(k, j);
  return r;
}

template <class T>
bool BasicGMatrix<T>::all_even() const {
  return std::all_of(data_.begin(), data_.end(), [](const Element& e) { return e.is_even(); });
}

template <class T>
bool BasicGMatrix<T>::all_odd() const {
  return std::all_of(data_.begin(), data_.end(), [](const Element& e) { return e.is_odd(); });
}

template <class T>
bool BasicGMatrix<T>::approx_equal(const BasicGMatrix& y, double tol) const {
  if (rows_ != y.rows_ || cols_ != y.cols_) return false;
  for (std::size_t k = 0; k < data_.size(); ++k)
    if (!data_[k].approx_equal(y.data_[k], tol)) return false;
  return true;
}

template class BasicGMatrix<double>;
template class BasicGMatrix<std::complex<double>>;

namespace {

template <class T>
BasicGrassmann<T> cofactor_det(const BasicGMatrix<T>& m, std::vector<std::size_t>& cols,
                               std::size_t row) {
  if (cols.size() == 1) return m(row, cols[0]);
  BasicGrassmann<T> acc;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t c = cols[k];
    if (m(row, c).is_zero()) continue;
    std::vector<std::size_t> rest;
    rest.reserve(cols.size() - 1);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (j != k) rest.push_back(cols[j]);
    BasicGrassmann<T> term = m(row, c) * cofactor_det(m, rest, row + 1);
    if (k % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

template <class T>
std::size_t pivot_row(const BasicGMatrix<T>& m, std::size_t col, std::size_t from) {
  std::size_t best = from;
  double best_abs = -1.0;
  for (std::size_t r = from; r < m.rows(); ++r) {
    const double v = std::abs(m(r, col).body());
    if (v > best_abs) {
      best_abs = v;
      best = r;
    }
  }
  if (!(best_abs > 0.0)) throw SingularityError("matrix body is singular");
  return best;
}

template <class T>
void swap_rows(BasicGMatrix<T>& m, std::size_t a, std::size_t b) {
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

}  // namespace

template <class T>
BasicGrassmann<T> det(const BasicGMatrix<T>& m) {
  if (m.rows() != m.cols()) throw DomainError("determinant of a non-square matrix");
  if (!m.all_even()) throw ParityError("determinant requires even entries");
  const std::size_t n = m.rows();
  if (n == 0) return BasicGrassmann<T>(T(1));
  if (n <= 4) {
    std::vector<std::size_t> cols(n);
    for (std::size_t j = 0; j < n; ++j) cols[j] = j;
    return cofactor_det(m, cols, 0);
  }
  BasicGMatrix<T> w = m;
  BasicGrassmann<T> d(T(1));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = pivot_row(w, k, k);
    if (p != k) {
      swap_rows(w, p, k);
      d = -d;
    }
    d *= w(k, k);
    const BasicGrassmann<T> inv = reciprocal(w(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (w(r, k).is_zero()) continue;
      const BasicGrassmann<T> f = w(r, k) * inv;
      for (std::size_t j = k; j < n; ++j) w(r, j) -= f * w(k, j);
    }
  }
  return d;
}
template GrassmannElement det(const GMatrix&);
template ComplexGrassmann det(const BasicGMatrix<std::complex<double>>&);

template <class T>
BasicGMatrix<T> inverse(const BasicGMatrix<T>& m) {
  if (m.rows() != m.cols()) throw DomainError("inverse of a non-square matrix");
  if (!m.all_even()) throw ParityError("matrix inverse requires even entries");
  const std::size_t n = m.rows();
  BasicGMatrix<T> w = m;
  BasicGMatrix<T> inv = BasicGMatrix<T>::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = pivot_row(w, k, k);
    if (p != k) {
      swap_rows(w, p, k);
      swap_rows(inv, p, k);
    }
    const BasicGrassmann<T> piv = reciprocal(w(k, k));
    for (std::size_t j = 0; j < n; ++j) {
      w(k, j) = piv * w(k, j);
      inv(k, j) = piv * inv(k, j);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k || w(r, k).is_zero()) continue;
      const BasicGrassmann<T> f = w(r, k);
      for (std::size_t j = 0; j < n; ++j) {
        w(r, j) -= f * w(k, j);
        inv(r, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}
template GMatrix inverse(const GMatrix&);
template BasicGMatrix<std::complex<double>> inverse(const BasicGMatrix<std::complex<double>>&);

SuperMatrix::SuperMatrix(GMatrix a, GMatrix sigma, GMatrix gamma, GMatrix b)
    : a_(std::move(a)), sigma_(std::move(sigma)), gamma_(std::move(gamma)), b_(std::move(b)) {
  const std::size_t p = a_.rows(), q = b_.rows();
  if (a_.cols() != p || b_.cols() != q || sigma_.rows() != p || sigma_.cols() != q ||
      gamma_.rows() != q || gamma_.cols() != p) {
    throw DomainError("supermatrix block shapes are inconsistent");
  }
  if (!a_.all_even() || !b_.all_even()) throw ParityError("diagonal supermatrix blocks must be even");
  if (!sigma_.all_odd() || !gamma_.all_odd()) {
    throw ParityError("off-diagonal supermatrix blocks must be odd");
  }
}

SuperMatrix SuperMatrix::operator*(const SuperMatrix& y) const {
  return SuperMatrix(a_ * y.a_ + sigma_ * y.gamma_, a_ * y.sigma_ + sigma_ * y.b_,
                     gamma_ * y.a_ + b_ * y.gamma_, gamma_ * y.sigma_ + b_ * y.b_);
}

GrassmannElement sdet(const SuperMatrix& m) {
  const GrassmannElement det_b = det(m.B());
  if (det_b.body() == 0.0) throw SingularityError("sdet: body of B is singular");
  GMatrix s = m.A();
  if (m.odd_dim() > 0 && m.even_dim() > 0) s = s - m.Sigma() * inverse(m.B()) * m.Gamma();
  const GrassmannElement det_s = det(s);
  if (det_s.body() == 0.0) throw SingularityError("sdet: body of the Schur complement is singular");
  return det_s * reciprocal(det_b);
}

GroupElement::GroupElement(std::vector<GrassmannElement> a, std::vector<GrassmannElement> b,
                           std::vector<GrassmannElement> chibar,
                           std::vector<GrassmannElement> chi)
    : a_(std::move(a)), b_(std::move(b)), chibar_(std::move(chibar)), chi_(std::move(chi)) {
  const std::size_t n = a_.size();
  if (n == 0 || b_.size() != n || chibar_.size() != n || chi_.size() != n) {
    throw InvariantViolation("group element components must share a nonempty vertex set");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!a_[i].is_even() || !b_[i].is_even()) throw ParityError("a and b must be even");
    if (!chibar_[i].is_odd() || !chi_[i].is_odd()) throw ParityError("chibar and chi must be odd");
    if (!(a_[i].body() > 0.0)) throw InvariantViolation("group element needs body(a) > 0");
  }
  const std::size_t d = n - 1;
  if (!a_[d].approx_equal(1.0, 0.0) || !b_[d].is_zero() || !chibar_[d].is_zero() ||
      !chi_[d].is_zero()) {
    throw InvariantViolation("pinned component must be [1, 0, 0, 0]");
  }
}

GroupElement GroupElement::identity(std::size_t n_vertices, const AlgebraPtr& algebra) {
  return GroupElement(std::vector<GrassmannElement>(n_vertices, GrassmannElement(algebra, 1.0)),
                      std::vector<GrassmannElement>(n_vertices, GrassmannElement(algebra, 0.0)),
                      std::vector<GrassmannElement>(n_vertices, GrassmannElement(algebra, 0.0)),
                      std::vector<GrassmannElement>(n_vertices, GrassmannElement(algebra, 0.0)));
}

GroupElement GroupElement::real(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvariantViolation("a and b sizes differ");
  std::vector<GrassmannElement> ga(a.begin(), a.end()), gb(b.begin(), b.end());
  std::vector<GrassmannElement> zero(a.size());
  return GroupElement(std::move(ga), std::move(gb), zero, zero);
}

GroupElement GroupElement::operator*(const GroupElement& w) const {
  if (w.size() != size()) throw InvariantViolation("group elements over different vertex sets");
  const std::size_t n = size();
  std::vector<GrassmannElement> a(n), b(n), cb(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = a_[i] * w.a_[i];
    b[i] = b_[i] + a_[i] * w.b_[i];
    cb[i] = chibar_[i] + a_[i] * w.chibar_[i];
    c[i] = chi_[i] + a_[i] * w.chi_[i];
  }
  return GroupElement(std::move(a), std::move(b), std::move(cb), std::move(c));
}

GroupElement GroupElement::inverse() const {
  const std::size_t n = size();
  std::vector<GrassmannElement> a(n), b(n), cb(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = hsigma::inverse(a_[i]);
    b[i] = -(b_[i] * a[i]);
    cb[i] = -(chibar_[i] * a[i]);
    c[i] = -(chi_[i] * a[i]);
  }
  return GroupElement(std::move(a), std::move(b), std::move(cb), std::move(c));
}

bool GroupElement::approx_equal(const GroupElement& w, double tol) const {
  if (w.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!a_[i].approx_equal(w.a_[i], tol) || !b_[i].approx_equal(w.b_[i], tol) ||
        !chibar_[i].approx_equal(w.chibar_[i], tol) || !chi_[i].approx_equal(w.chi_[i], tol)) {
      return false;
    }
  }
  return true;
}

GroupElement group_op(const GroupElement& v, const GroupElement& w, GroupOp op) {
  return op == GroupOp::mul ? v * w : v.inverse();
}

}  // namespace hsigma
