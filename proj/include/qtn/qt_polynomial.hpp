#pragma once

#include <map>
#include <string>
#include <utility>

namespace qtn {

// Bivariate polynomial with integer coefficients, sparse over (q,t) degrees.
// Arising counts are nonnegative, but differences are representable too;
// callers that need positivity check it explicitly.
class QTPolynomial {
 public:
  using Key = std::pair<int, int>;  // (q degree, t degree)

  void add(int q, int t, long long c = 1);
  long long coeff(int q, int t) const;
  const std::map<Key, long long>& terms() const { return terms_; }
  long long total_mass() const;
  bool empty() const { return terms_.empty(); }

  // Coefficient-wise a - b.
  static QTPolynomial difference(const QTPolynomial& a, const QTPolynomial& b);

  bool has_negative_coeff() const;

  // Invariant under swapping q and t degrees.
  bool symmetric() const;

  // "1*q^0*t^0 + 2*q^1*t^0 + ..." with terms sorted by (q,t); "0" if empty.
  std::string text() const;

  bool operator==(const QTPolynomial&) const = default;

 private:
  std::map<Key, long long> terms_;
};

}  // namespace qtn
