#ifndef HSIGMA_GRASSMANN_HPP
#define HSIGMA_GRASSMANN_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hsigma/errors.hpp"

namespace hsigma {

/// Subset of generators, bit i set iff generator i is present.
using Mask = std::uint64_t;

/// Ordered, immutable list of odd generator names.
class GeneratorSet {
 public:
  static constexpr std::size_t kMaxGenerators = 64;

  explicit GeneratorSet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  /// Index of a generator; throws DomainError if absent.
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const;

  bool operator==(const GeneratorSet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
};

using AlgebraPtr = std::shared_ptr<const GeneratorSet>;

AlgebraPtr make_algebra(std::vector<std::string> names);

/// Algebra with generators psibar_i, psi_i interleaved per vertex label, followed by `extra`.
AlgebraPtr make_field_algebra(const std::vector<std::string>& vertex_labels,
                              const std::vector<std::string>& extra = {});

/// Same algebra: identical pointer, or identical name lists.
bool same_algebra(const AlgebraPtr& x, const AlgebraPtr& y);

/// Sign of ordering the product of monomials `a` (left) and `b` (right); 0 if they share a generator.
int monomial_sign(Mask a, Mask b) noexcept;

/// Element of the exterior algebra over a GeneratorSet.
///
/// Terms are kept sorted by mask with no zero coefficients. An element without
/// an algebra is a scalar and adopts the algebra of any operand it meets.
template <class T>
class BasicGrassmann {
 public:
  using value_type = T;
  using Term = std::pair<Mask, T>;

  BasicGrassmann() = default;
  BasicGrassmann(T scalar);  // NOLINT(google-explicit-constructor)
  BasicGrassmann(AlgebraPtr algebra, T scalar);
  BasicGrassmann(AlgebraPtr algebra, std::vector<Term> terms);

  static BasicGrassmann generator(const AlgebraPtr& algebra, std::size_t index);
  static BasicGrassmann generator(const AlgebraPtr& algebra, const std::string& name);
  static BasicGrassmann monomial(const AlgebraPtr& algebra, Mask mask, T coeff);

  const AlgebraPtr& algebra() const noexcept { return algebra_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  T body() const noexcept;
  BasicGrassmann soul() const;
  T coeff(Mask mask) const noexcept;
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_scalar() const noexcept;
  bool is_even() const noexcept;
  bool is_odd() const noexcept;
  /// Largest monomial degree present, -1 for zero.
  int degree() const noexcept;

  /// Drops terms whose magnitude is at most `rel` times the largest one.
  BasicGrassmann& prune(double rel = 1e-15);

  BasicGrassmann operator-() const;
  BasicGrassmann& operator+=(const BasicGrassmann& y);
  BasicGrassmann& operator-=(const BasicGrassmann& y);
  BasicGrassmann& operator*=(const BasicGrassmann& y);
  BasicGrassmann& operator*=(T s);

  friend BasicGrassmann operator+(BasicGrassmann x, const BasicGrassmann& y) { return x += y; }
  friend BasicGrassmann operator-(BasicGrassmann x, const BasicGrassmann& y) { return x -= y; }
  friend BasicGrassmann operator*(const BasicGrassmann& x, const BasicGrassmann& y) {
    return multiply(x, y);
  }
  friend BasicGrassmann operator*(BasicGrassmann x, T s) { return x *= s; }
  friend BasicGrassmann operator*(T s, BasicGrassmann x) { return x *= s; }

  /// Per-coefficient absolute comparison.
  bool approx_equal(const BasicGrassmann& y, double tol = 1e-12) const;
  bool operator==(const BasicGrassmann& y) const { return approx_equal(y); }

  /// Maps every coefficient through `f` (e.g. real part).
  template <class U, class F>
  BasicGrassmann<U> map(F f) const {
    std::vector<typename BasicGrassmann<U>::Term> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) out.emplace_back(m, f(c));
    return BasicGrassmann<U>(algebra_, std::move(out));
  }

  /// Re-expresses the element in a larger algebra; generator i goes to `index_map[i]`.
  BasicGrassmann embed(const AlgebraPtr& target, const std::vector<std::size_t>& index_map) const;

  static BasicGrassmann multiply(const BasicGrassmann& x, const BasicGrassmann& y);

 private:
  AlgebraPtr algebra_;
  std::vector<Term> terms_;
};

using GrassmannElement = BasicGrassmann<double>;
using ComplexGrassmann = BasicGrassmann<std::complex<double>>;

extern template class BasicGrassmann<double>;
extern template class BasicGrassmann<std::complex<double>>;

ComplexGrassmann to_complex(const GrassmannElement& x);
GrassmannElement real_part(const ComplexGrassmann& x);
GrassmannElement imag_part(const ComplexGrassmann& x);

enum class EvenFn { exp, log, inverse, sqrt };

/// f(body) + finite Taylor series in the soul; `taylor(k)` returns f^(k)(body)/k!.
template <class T>
BasicGrassmann<T> apply_taylor(const BasicGrassmann<T>& x, const std::function<T(int)>& taylor);

/// Named analytic function of an even element. log/inverse/sqrt need a positive body.
GrassmannElement ga_fn_even(const GrassmannElement& x, EvenFn fn);
ComplexGrassmann ga_fn_even(const ComplexGrassmann& x, EvenFn fn);

template <class T>
BasicGrassmann<T> exp(const BasicGrassmann<T>& x);
GrassmannElement log(const GrassmannElement& x);
GrassmannElement sqrt(const GrassmannElement& x);
GrassmannElement cosh(const GrassmannElement& x);
GrassmannElement sinh(const GrassmannElement& x);
GrassmannElement inverse(const GrassmannElement& x);
ComplexGrassmann inverse(const ComplexGrassmann& x);
/// Multiplicative inverse of an even element with any nonzero body.
template <class T>
BasicGrassmann<T> reciprocal(const BasicGrassmann<T>& x);

/// Left derivative with respect to generator `index`.
template <class T>
BasicGrassmann<T> berezin(const BasicGrassmann<T>& x, std::size_t index);
template <class T>
BasicGrassmann<T> berezin(const BasicGrassmann<T>& x, const std::string& name);

/// prod_k d/d(bar_k) d/d(gen_k) x, the inner derivative applied first within each pair.
template <class T>
BasicGrassmann<T> berezin_integral(const BasicGrassmann<T>& x,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Dense matrix of Grassmann elements, row-major.
template <class T>
class BasicGMatrix {
 public:
  using Element = BasicGrassmann<T>;

  BasicGMatrix() = default;
  BasicGMatrix(std::size_t rows, std::size_t cols, const Element& fill = Element())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static BasicGMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Element& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Element& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  BasicGMatrix operator+(const BasicGMatrix& y) const;
  BasicGMatrix operator-(const BasicGMatrix& y) const;
  BasicGMatrix operator*(const BasicGMatrix& y) const;

  bool all_even() const;
  bool all_odd() const;
  bool approx_equal(const BasicGMatrix& y, double tol = 1e-12) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Element> data_;
};

using GMatrix = BasicGMatrix<double>;

/// Determinant of a square even matrix: cofactor expansion up to 4x4, LU with
/// largest-|body| pivoting beyond.
template <class T>
BasicGrassmann<T> det(const BasicGMatrix<T>& m);
/// Inverse of a square even matrix with invertible body.
template <class T>
BasicGMatrix<T> inverse(const BasicGMatrix<T>& m);

/// [[A, Sigma], [Gamma, B]] with A, B even and Sigma, Gamma odd.
class SuperMatrix {
 public:
  SuperMatrix(GMatrix a, GMatrix sigma, GMatrix gamma, GMatrix b);

  const GMatrix& A() const noexcept { return a_; }
  const GMatrix& Sigma() const noexcept { return sigma_; }
  const GMatrix& Gamma() const noexcept { return gamma_; }
  const GMatrix& B() const noexcept { return b_; }
  std::size_t even_dim() const noexcept { return a_.rows(); }
  std::size_t odd_dim() const noexcept { return b_.rows(); }

  SuperMatrix operator*(const SuperMatrix& y) const;

 private:
  GMatrix a_, sigma_, gamma_, b_;
};

/// det(A - Sigma B^-1 Gamma) / det(B).
GrassmannElement sdet(const SuperMatrix& m);

/// Per-vertex [a, b, chibar, chi]; the last vertex is pinned to [1, 0, 0, 0].
class GroupElement {
 public:
  GroupElement(std::vector<GrassmannElement> a, std::vector<GrassmannElement> b,
               std::vector<GrassmannElement> chibar, std::vector<GrassmannElement> chi);

  static GroupElement identity(std::size_t n_vertices, const AlgebraPtr& algebra = nullptr);
  /// Real [a, b] with chibar = chi = 0; `a`, `b` cover all vertices including the pinned one.
  static GroupElement real(const std::vector<double>& a, const std::vector<double>& b);

  std::size_t size() const noexcept { return a_.size(); }
  const GrassmannElement& a(std::size_t i) const { return a_.at(i); }
  const GrassmannElement& b(std::size_t i) const { return b_.at(i); }
  const GrassmannElement& chibar(std::size_t i) const { return chibar_.at(i); }
  const GrassmannElement& chi(std::size_t i) const { return chi_.at(i); }

  GroupElement operator*(const GroupElement& w) const;
  GroupElement inverse() const;
  bool approx_equal(const GroupElement& w, double tol = 1e-12) const;

 private:
  std::vector<GrassmannElement> a_, b_, chibar_, chi_;
};

enum class GroupOp { mul, inv };
GroupElement group_op(const GroupElement& v, const GroupElement& w, GroupOp op);

}  // namespace hsigma

#endif  // HSIGMA_GRASSMANN_HPP
