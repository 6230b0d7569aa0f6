#pragma once

// Calculus of homogeneous polynomials in two symplectic variables (u, v),
// with {u, v} = 1.  Coefficients are exact rationals by default so that the
// algebraic identities hold exactly; a double-precision mode is available for
// interoperability with numeric code.
//
// A degree-k polynomial is stored densely: coeffs[m] multiplies u^(k-m) v^m.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace contactflow {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

class PolyError : public std::runtime_error {
 public:
  explicit PolyError(const std::string& what) : std::runtime_error(what) {}
};

template <class K>
struct HomPoly {
  int degree = 0;                 // homogeneity degree k >= 0
  std::vector<K> coeffs;          // size degree+1; coeffs[m] ~ u^(k-m) v^m

  HomPoly() : coeffs(1, K(0)) {}
  explicit HomPoly(int k) : degree(k), coeffs(static_cast<size_t>(k) + 1, K(0)) {
    if (k < 0) throw PolyError("polynomial degree must be >= 0");
  }
  HomPoly(int k, std::vector<K> c) : degree(k), coeffs(std::move(c)) {
    if (k < 0 || coeffs.size() != static_cast<size_t>(k) + 1)
      throw PolyError("coefficient list length must be degree + 1");
  }

  bool is_zero() const {
    for (const auto& c : coeffs)
      if (c != 0) return false;
    return true;
  }
  K operator()(const K& u, const K& v) const;  // evaluation
};

template <class K>
K HomPoly<K>::operator()(const K& u, const K& v) const {
  std::vector<K> upow(static_cast<size_t>(degree) + 1, K(1));
  std::vector<K> vpow(static_cast<size_t>(degree) + 1, K(1));
  for (int i = 1; i <= degree; ++i) {
    upow[static_cast<size_t>(i)] = upow[static_cast<size_t>(i - 1)] * u;
    vpow[static_cast<size_t>(i)] = vpow[static_cast<size_t>(i - 1)] * v;
  }
  K acc(0);
  for (int m = 0; m <= degree; ++m)
    acc += coeffs[static_cast<size_t>(m)] * upow[static_cast<size_t>(degree - m)] *
           vpow[static_cast<size_t>(m)];
  return acc;
}

// --- basic arithmetic -------------------------------------------------------

template <class K>
HomPoly<K> operator+(const HomPoly<K>& a, const HomPoly<K>& b) {
  if (a.degree != b.degree) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    throw PolyError("cannot add homogeneous polynomials of different degree");
  }
  HomPoly<K> r(a.degree);
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = a.coeffs[i] + b.coeffs[i];
  return r;
}

template <class K>
HomPoly<K> operator-(const HomPoly<K>& a, const HomPoly<K>& b) {
  if (a.degree != b.degree) {
    if (b.is_zero()) return a;
    if (a.is_zero()) {
      HomPoly<K> r(b.degree);
      for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = -b.coeffs[i];
      return r;
    }
    throw PolyError("cannot subtract homogeneous polynomials of different degree");
  }
  HomPoly<K> r(a.degree);
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = a.coeffs[i] - b.coeffs[i];
  return r;
}

template <class K>
HomPoly<K> operator*(const K& s, const HomPoly<K>& a) {
  HomPoly<K> r = a;
  for (auto& c : r.coeffs) c = s * c;
  return r;
}

template <class K>
HomPoly<K> operator*(const HomPoly<K>& a, const HomPoly<K>& b) {
  if (a.is_zero() || b.is_zero()) return HomPoly<K>(0);
  HomPoly<K> r(a.degree + b.degree);
  for (int i = 0; i <= a.degree; ++i)
    for (int j = 0; j <= b.degree; ++j)
      r.coeffs[static_cast<size_t>(i + j)] +=
          a.coeffs[static_cast<size_t>(i)] * b.coeffs[static_cast<size_t>(j)];
  return r;
}

template <class K>
bool operator==(const HomPoly<K>& a, const HomPoly<K>& b) {
  if (a.degree != b.degree) return a.is_zero() && b.is_zero();
  return a.coeffs == b.coeffs;
}

// Partial derivatives lower the degree by one.
template <class K>
HomPoly<K> d_du(const HomPoly<K>& p) {
  if (p.degree == 0) return HomPoly<K>(0);
  HomPoly<K> r(p.degree - 1);
  for (int m = 0; m < p.degree; ++m)
    r.coeffs[static_cast<size_t>(m)] = K(p.degree - m) * p.coeffs[static_cast<size_t>(m)];
  return r;
}

template <class K>
HomPoly<K> d_dv(const HomPoly<K>& p) {
  if (p.degree == 0) return HomPoly<K>(0);
  HomPoly<K> r(p.degree - 1);
  for (int m = 1; m <= p.degree; ++m)
    r.coeffs[static_cast<size_t>(m - 1)] = K(m) * p.coeffs[static_cast<size_t>(m)];
  return r;
}

// Multiplication by the variables u and v (degree + 1).
template <class K>
HomPoly<K> mul_u(const HomPoly<K>& p) {
  HomPoly<K> r(p.degree + 1);
  for (int m = 0; m <= p.degree; ++m) r.coeffs[static_cast<size_t>(m)] = p.coeffs[static_cast<size_t>(m)];
  return r;
}

template <class K>
HomPoly<K> mul_v(const HomPoly<K>& p) {
  HomPoly<K> r(p.degree + 1);
  for (int m = 0; m <= p.degree; ++m)
    r.coeffs[static_cast<size_t>(m + 1)] = p.coeffs[static_cast<size_t>(m)];
  return r;
}

// Poisson bracket {P, Q} = P_u Q_v - P_v Q_u.  Degree p + q - 2.
template <class K>
HomPoly<K> poisson_uv(const HomPoly<K>& p, const HomPoly<K>& q) {
  if (p.degree + q.degree < 2) return HomPoly<K>(0);
  return d_du(p) * d_dv(q) - d_dv(p) * d_du(q);
}

// Rotation generator A = u d/dv - v d/du (degree preserving).
template <class K>
HomPoly<K> a_operator(const HomPoly<K>& p) {
  if (p.degree == 0) return HomPoly<K>(0);
  HomPoly<K> r(p.degree);
  // A(u^(k-m) v^m) = m u^(k-m+1) v^(m-1) - (k-m) u^(k-m-1) v^(m+1)
  for (int m = 0; m <= p.degree; ++m) {
    const K& c = p.coeffs[static_cast<size_t>(m)];
    if (c == 0) continue;
    if (m >= 1) r.coeffs[static_cast<size_t>(m - 1)] += K(m) * c;
    if (m <= p.degree - 1) r.coeffs[static_cast<size_t>(m + 1)] -= K(p.degree - m) * c;
  }
  return r;
}

// I = u^2 + v^2 raised to the s-th power, as a degree-2s polynomial.
template <class K>
HomPoly<K> radial_power(int s) {
  if (s < 0) throw PolyError("radial_power needs s >= 0");
  HomPoly<K> r(2 * s);
  // (u^2+v^2)^s = sum_i binom(s,i) u^(2s-2i) v^(2i)
  K binom(1);
  for (int i = 0; i <= s; ++i) {
    r.coeffs[static_cast<size_t>(2 * i)] = binom;
    binom = binom * K(s - i) / K(i + 1);
  }
  return r;
}

// Average of u^a v^b over the unit circle, exact: zero when a or b is odd,
// otherwise (a-1)!!(b-1)!!/(a+b)!!.
Rat circle_moment(int a, int b);

// Circle average of a polynomial (the inner product against 1).
template <class K>
K circle_average(const HomPoly<K>& p);

// L2 inner product on the circle: average of the pointwise product.
template <class K>
K inner_product(const HomPoly<K>& p, const HomPoly<K>& q) {
  return circle_average(p * q);
}

// Splitting of a degree-k polynomial into its zero-average part and its
// rotation-invariant component c * I^(k/2) (c = 0 forced for odd k).
template <class K>
struct PolyDecomposition {
  HomPoly<K> zero_average;
  K invariant_coeff = K(0);
};

template <class K>
PolyDecomposition<K> decompose(const HomPoly<K>& p) {
  PolyDecomposition<K> d;
  if (p.degree % 2 != 0) {
    d.zero_average = p;
    d.invariant_coeff = K(0);
    return d;
  }
  d.invariant_coeff = circle_average(p);
  d.zero_average = p - d.invariant_coeff * radial_power<K>(p.degree / 2);
  return d;
}

// Solve A(Q) = R for the unique zero-average Q.  Throws PolyError when R has
// a nonzero rotation-invariant component (R outside the range of A).
//
// Method: restriction to the unit circle is injective on each homogeneity
// class, and the lifted trigonometric modes
//   I^((k-m)/2) Re((u+iv)^m),  I^((k-m)/2) Im((u+iv)^m)
// (m = k, k-2, ..., plus I^(k/2) for even k) form a basis of degree k on
// which A acts blockwise as a rotation with rate m.  Expanding R in that
// basis, dividing each mode pair by m, and reconstituting yields Q.
template <class K>
HomPoly<K> solve_cohomological(const HomPoly<K>& r);

// Matrix of A on the monomial basis of degree k ((k+1) x (k+1), integer
// entries), flattened row-major: entry(i, m) = coefficient of basis i in
// A(u^(k-m) v^m).
std::vector<BigInt> a_matrix(int k);

// Rank of the matrix of A on degree k, computed in exact arithmetic.
int a_rank(int k);

// --- parsing / printing -----------------------------------------------------

// Parses a comma-separated coefficient list "c0,c1,...,ck" where each entry is
// an integer, a fraction "p/q", or a decimal (converted exactly).
HomPoly<Rat> parse_poly(const std::string& text);
Rat parse_rational(const std::string& token);

std::string format_rational(const Rat& r);
std::string format_poly(const HomPoly<Rat>& p);        // coefficient list
std::string format_poly_pretty(const HomPoly<Rat>& p); // human-readable monomials

HomPoly<double> to_double(const HomPoly<Rat>& p);

// Explicit specializations for the two supported coefficient fields.
template <>
Rat circle_average<Rat>(const HomPoly<Rat>& p);
template <>
double circle_average<double>(const HomPoly<double>& p);
template <>
HomPoly<Rat> solve_cohomological<Rat>(const HomPoly<Rat>& r);
template <>
HomPoly<double> solve_cohomological<double>(const HomPoly<double>& r);

}  // namespace contactflow
