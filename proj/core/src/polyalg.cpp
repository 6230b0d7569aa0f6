#include "contactflow/polyalg.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace contactflow {

namespace {

BigInt double_factorial(int n) {
  // (-1)!! = 1 by convention.
  BigInt r(1);
  for (int k = n; k >= 2; k -= 2) r *= k;
  return r;
}

template <class K>
K knum(long n);

template <>
Rat knum<Rat>(long n) { return Rat(n); }
template <>
double knum<double>(long n) { return static_cast<double>(n); }

template <class K>
K kabs(const K& x);

template <>
Rat kabs<Rat>(const Rat& x) { return x < 0 ? Rat(-x) : x; }
template <>
double kabs<double>(const double& x) { return std::fabs(x); }

// Dense Gaussian elimination solve of a square system M x = b over the field
// K, with pivoting by largest absolute value (deterministic for both exact
// rationals and doubles).
template <class K>
std::vector<K> solve_linear(std::vector<std::vector<K>> m, std::vector<K> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    K best = kabs<K>(m[col][col]);
    for (size_t r = col + 1; r < n; ++r) {
      K a = kabs<K>(m[r][col]);
      if (a > best) { best = a; piv = r; }
    }
    if (best == K(0)) throw PolyError("singular linear system in polynomial solve");
    if (piv != col) { std::swap(m[piv], m[col]); std::swap(b[piv], b[col]); }
    for (size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == K(0)) continue;
      K f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<K> x(n, K(0));
  for (size_t ri = n; ri-- > 0;) {
    K acc = b[ri];
    for (size_t c = ri + 1; c < n; ++c) acc -= m[ri][c] * x[c];
    x[ri] = acc / m[ri][ri];
  }
  return x;
}

// Re((u+iv)^m) and Im((u+iv)^m) as homogeneous polynomials of degree m.
template <class K>
HomPoly<K> real_mode(int m) {
  HomPoly<K> p(m);
  K binom(1);
  for (int j = 0; j <= m; ++j) {
    if (j % 2 == 0) p.coeffs[static_cast<size_t>(j)] = ((j / 2) % 2 == 0 ? binom : -binom);
    binom = binom * knum<K>(m - j) / knum<K>(j + 1);
  }
  return p;
}

template <class K>
HomPoly<K> imag_mode(int m) {
  HomPoly<K> p(m);
  K binom(1);
  for (int j = 0; j <= m; ++j) {
    if (j % 2 == 1) p.coeffs[static_cast<size_t>(j)] = (((j - 1) / 2) % 2 == 0 ? binom : -binom);
    binom = binom * knum<K>(m - j) / knum<K>(j + 1);
  }
  return p;
}

template <class K>
K circle_average_impl(const HomPoly<K>& p) {
  K acc(0);
  for (int m = 0; m <= p.degree; ++m) {
    const K& c = p.coeffs[static_cast<size_t>(m)];
    if (c == K(0)) continue;
    Rat mom = circle_moment(p.degree - m, m);
    if (mom == 0) continue;
    // Convert the exact rational moment into K.
    if constexpr (std::is_same_v<K, Rat>) {
      acc += c * mom;
    } else {
      acc += c * static_cast<double>(mom);
    }
  }
  return acc;
}

template <class K>
HomPoly<K> solve_cohomological_impl(const HomPoly<K>& r) {
  const int k = r.degree;
  if (r.is_zero()) return HomPoly<K>(k);
  if (k == 0) throw PolyError("constant polynomial with nonzero average is not in the range of A");

  // Assemble the lifted trigonometric-mode basis of degree k.
  struct Mode { int m; HomPoly<K> poly; };
  std::vector<Mode> modes;
  const bool even = (k % 2 == 0);
  if (even) modes.push_back({0, radial_power<K>(k / 2)});
  for (int m = even ? 2 : 1; m <= k; m += 2) {
    HomPoly<K> rad = radial_power<K>((k - m) / 2);
    modes.push_back({m, rad * real_mode<K>(m)});
    modes.push_back({-m, rad * imag_mode<K>(m)});  // negative tag marks the Im partner
  }

  const size_t n = static_cast<size_t>(k) + 1;
  std::vector<std::vector<K>> basis(n, std::vector<K>(n, K(0)));
  for (size_t col = 0; col < n; ++col)
    for (size_t row = 0; row < n; ++row) basis[row][col] = modes[col].poly.coeffs[row];

  std::vector<K> x = solve_linear<K>(basis, r.coeffs);

  HomPoly<K> q(k);
  for (size_t col = 0; col < n; ++col) {
    const int tag = modes[col].m;
    if (tag == 0) {
      // Rotation-invariant component: must vanish for solvability.
      bool zero;
      if constexpr (std::is_same_v<K, Rat>) {
        zero = (x[col] == 0);
      } else {
        zero = (std::fabs(x[col]) <= 1e-12);
      }
      if (!zero)
        throw PolyError("right-hand side has a nonzero rotation-invariant average; not in range of A");
      continue;
    }
    // Pair (rho * Re_m + iota * Im_m): solved by q_re = -iota/m, q_im = rho/m.
    if (tag > 0) {
      const K rho = x[col];
      const K iota = x[col + 1];
      const K qr = -iota / knum<K>(tag);
      const K qi = rho / knum<K>(tag);
      q = q + qr * modes[col].poly + qi * modes[col + 1].poly;
      ++col;  // consume the Im partner
    }
  }
  return q;
}

}  // namespace

Rat circle_moment(int a, int b) {
  if (a < 0 || b < 0) throw PolyError("moment exponents must be nonnegative");
  if (a % 2 == 1 || b % 2 == 1) return Rat(0);
  return Rat(double_factorial(a - 1) * double_factorial(b - 1), double_factorial(a + b));
}

template <>
Rat circle_average<Rat>(const HomPoly<Rat>& p) { return circle_average_impl(p); }
template <>
double circle_average<double>(const HomPoly<double>& p) { return circle_average_impl(p); }

template <>
HomPoly<Rat> solve_cohomological<Rat>(const HomPoly<Rat>& r) { return solve_cohomological_impl(r); }
template <>
HomPoly<double> solve_cohomological<double>(const HomPoly<double>& r) {
  return solve_cohomological_impl(r);
}

std::vector<BigInt> a_matrix(int k) {
  if (k < 0) throw PolyError("degree must be >= 0");
  const size_t n = static_cast<size_t>(k) + 1;
  std::vector<BigInt> mat(n * n, BigInt(0));
  // Column m holds A(u^(k-m) v^m) = m e_{m-1} - (k-m) e_{m+1}.
  for (int m = 0; m <= k; ++m) {
    if (m >= 1) mat[static_cast<size_t>(m - 1) * n + static_cast<size_t>(m)] = m;
    if (m <= k - 1) mat[static_cast<size_t>(m + 1) * n + static_cast<size_t>(m)] = -(k - m);
  }
  return mat;
}

int a_rank(int k) {
  const size_t n = static_cast<size_t>(k) + 1;
  std::vector<BigInt> flat = a_matrix(k);
  std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) m[r][c] = Rat(flat[r * n + c]);

  int rank = 0;
  size_t row = 0;
  for (size_t col = 0; col < n && row < n; ++col) {
    size_t piv = row;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) continue;
    std::swap(m[piv], m[row]);
    for (size_t r = row + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      Rat f = m[r][col] / m[row][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

Rat parse_rational(const std::string& token) {
  std::string s;
  for (char ch : token)
    if (!isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw PolyError("empty coefficient");

  auto is_int = [](const std::string& t) {
    if (t.empty()) return false;
    size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };

  const size_t slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw PolyError("bad fraction '" + token + "'");
    if (BigInt(den) == 0) throw PolyError("zero denominator in '" + token + "'");
    return Rat{BigInt(num), BigInt(den)};
  }
  const size_t dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    bool neg = !head.empty() && head[0] == '-';
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) head = head.substr(1);
    if (head.empty()) head = "0";
    if (!is_int(head) || (!tail.empty() && !is_int(tail)))
      throw PolyError("bad decimal '" + token + "'");
    BigInt scale(1);
    for (size_t i = 0; i < tail.size(); ++i) scale *= 10;
    BigInt numer = BigInt(head) * scale + (tail.empty() ? BigInt(0) : BigInt(tail));
    Rat r(numer, scale);
    return neg ? Rat(-r) : r;
  }
  if (!is_int(s)) throw PolyError("bad coefficient '" + token + "'");
  return Rat(BigInt(s));
}

HomPoly<Rat> parse_poly(const std::string& text) {
  std::vector<Rat> coeffs;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) coeffs.push_back(parse_rational(tok));
  if (coeffs.empty()) throw PolyError("empty polynomial");
  const int k = static_cast<int>(coeffs.size()) - 1;
  return HomPoly<Rat>(k, std::move(coeffs));
}

std::string format_rational(const Rat& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

std::string format_poly(const HomPoly<Rat>& p) {
  std::ostringstream os;
  for (int m = 0; m <= p.degree; ++m) {
    if (m) os << ",";
    os << format_rational(p.coeffs[static_cast<size_t>(m)]);
  }
  return os.str();
}

std::string format_poly_pretty(const HomPoly<Rat>& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int m = 0; m <= p.degree; ++m) {
    const Rat& c = p.coeffs[static_cast<size_t>(m)];
    if (c == 0) continue;
    const Rat mag = c < 0 ? Rat(-c) : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    const int a = p.degree - m, b = m;
    const bool unit = (mag == 1) && (a + b > 0);
    if (!unit) os << format_rational(mag);
    bool star = !unit;
    if (a > 0) {
      if (star) os << "*";
      os << "u";
      if (a > 1) os << "^" << a;
      star = true;
    }
    if (b > 0) {
      if (star) os << "*";
      os << "v";
      if (b > 1) os << "^" << b;
    }
  }
  return os.str();
}

HomPoly<double> to_double(const HomPoly<Rat>& p) {
  HomPoly<double> r(p.degree);
  for (size_t i = 0; i < p.coeffs.size(); ++i)
    r.coeffs[i] = static_cast<double>(p.coeffs[i]);
  return r;
}

}  // namespace contactflow
