#include "qtn/qt_polynomial.hpp"

namespace qtn {

void QTPolynomial::add(int q, int t, long long c) {
  if (c == 0) return;
  auto key = Key{q, t};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

long long QTPolynomial::coeff(int q, int t) const {
  auto it = terms_.find(Key{q, t});
  return it == terms_.end() ? 0 : it->second;
}

long long QTPolynomial::total_mass() const {
  long long mass = 0;
  for (const auto& [key, c] : terms_) mass += c;
  return mass;
}

QTPolynomial QTPolynomial::difference(const QTPolynomial& a, const QTPolynomial& b) {
  QTPolynomial out = a;
  for (const auto& [key, c] : b.terms_) out.add(key.first, key.second, -c);
  return out;
}

bool QTPolynomial::has_negative_coeff() const {
  for (const auto& [key, c] : terms_)
    if (c < 0) return true;
  return false;
}

bool QTPolynomial::symmetric() const {
  for (const auto& [key, c] : terms_)
    if (coeff(key.second, key.first) != c) return false;
  return true;
}

std::string QTPolynomial::text() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [key, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += std::to_string(c) + "*q^" + std::to_string(key.first) + "*t^" +
           std::to_string(key.second);
  }
  return out;
}

}  // namespace qtn
