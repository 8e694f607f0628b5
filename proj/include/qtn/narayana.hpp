#pragma once

#include <optional>

#include "qtn/qt_polynomial.hpp"
#include "qtn/statistics.hpp"

namespace qtn {

// Joint (area, bounce) distribution over PP(k, n-k+1); the zero polynomial
// when n < k. Total mass is |NC(n,k)|. Cached per (n,k).
QTPolynomial qt_narayana(int n, int k);

// qt_narayana(m,k) - qt_narayana(m-1,k). Requires m >= k; throws
// InternalError if any coefficient comes out negative.
QTPolynomial incremental(int m, int k);

struct PairingReport {
  bool match = false;
  QTPolynomial observed, expected;
  struct Term {
    int q = 0, t = 0;
    long long observed = 0, expected = 0;
  };
  // Degree-lex smallest term where the polynomials differ.
  std::optional<Term> first_discrepancy;
};

// Compares the joint (s1, s2) distribution over NC(n,k) with qt_narayana(n,k).
PairingReport verify_pairing(const Statistic& s1, const Statistic& s2, int n, int k);

}  // namespace qtn
