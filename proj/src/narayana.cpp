#include "qtn/narayana.hpp"

#include <mutex>
#include <unordered_map>

#include "qtn/errors.hpp"

namespace qtn {

QTPolynomial qt_narayana(int n, int k) {
  if (k < 1) throw ArgumentError("qt_narayana requires k >= 1");
  if (n < k) return QTPolynomial{};

  static std::mutex mu;
  static std::unordered_map<long long, QTPolynomial> cache;
  long long key = static_cast<long long>(n) * 64 + k;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  QTPolynomial poly;
  for (const auto& p : enumerate_pp(k, n - k + 1))
    poly.add(static_cast<int>(area_pp(p)), static_cast<int>(bounce_pp(p)));
  cache.emplace(key, poly);
  return poly;
}

QTPolynomial incremental(int m, int k) {
  if (m < k) throw ArgumentError("incremental requires m >= k");
  QTPolynomial diff = QTPolynomial::difference(qt_narayana(m, k), qt_narayana(m - 1, k));
  if (diff.has_negative_coeff())
    throw InternalError("incremental polynomial has a negative coefficient");
  return diff;
}

PairingReport verify_pairing(const Statistic& s1, const Statistic& s2, int n, int k) {
  PairingReport report;
  report.expected = qt_narayana(n, k);
  for (const auto& p : enumerate_nc(n, k))
    report.observed.add(static_cast<int>(s1.fn(p, k)), static_cast<int>(s2.fn(p, k)));
  report.match = (report.observed == report.expected);
  if (!report.match) {
    QTPolynomial diff = QTPolynomial::difference(report.observed, report.expected);
    auto [key, c] = *diff.terms().begin();
    report.first_discrepancy = PairingReport::Term{
        key.first, key.second, report.observed.coeff(key.first, key.second),
        report.expected.coeff(key.first, key.second)};
  }
  return report;
}

}  // namespace qtn
