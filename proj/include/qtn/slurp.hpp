#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qtn/nc_partition.hpp"

namespace qtn {

// Distance with an unreachable top element for candidates that fail to
// evaluate: every invalid value compares above every finite one.
struct Distance {
  std::uint64_t value = 0;
  bool invalid = false;

  static Distance infinite() { return Distance{0, true}; }
  friend bool operator==(const Distance& a, const Distance& b) {
    return a.invalid == b.invalid && (a.invalid || a.value == b.value);
  }
  friend std::strong_ordering operator<=>(const Distance& a, const Distance& b) {
    if (a.invalid != b.invalid) return a.invalid ? std::strong_ordering::greater
                                                 : std::strong_ordering::less;
    if (a.invalid) return std::strong_ordering::equal;
    return a.value <=> b.value;
  }
};

struct BagKey {
  int m = -1;  // -1 on unrefined instances
  int u = 0;
  auto operator<=>(const BagKey&) const = default;
  std::string text() const;
};

struct Bag {
  BagKey key;
  std::vector<int> members;            // indices into SlurpInstance::objects
  std::map<long long, long long> target;  // value -> multiplicity
  long long target_mass() const;
};

// A bagged-distribution benchmark instance: each object is a partition from
// NC(n,k), each bag carries the value multiset a solution must realize.
struct SlurpInstance {
  int n = 0, k = 0;
  bool refined = false;
  std::vector<std::string> objects;  // canonical enumeration order
  std::vector<Bag> bags;             // sorted by key

  std::size_t size() const { return objects.size(); }
  std::vector<NCPartition> decode() const;
};

// Bags keyed by skip value (unrefined) or by (m, skip) with targets read off
// the incremental polynomials (refined).
SlurpInstance build_instance(int n, int k, bool refined);

// Same bag structure as build_instance, but targets are the observed value
// multisets of `values`. Used to plant a known-solvable target.
SlurpInstance instance_from_values(int n, int k, bool refined,
                                   const std::vector<long long>& values);

// Sum over bags and values of |target count - observed count|.
std::uint64_t delta(const std::vector<long long>& values, const SlurpInstance& inst);

// Per bag, ascending observed values against ascending expanded target,
// summed positional |difference|. Never exceeds any assignment's L1 cost.
std::uint64_t sorted_l1(const std::vector<long long>& values, const SlurpInstance& inst);

std::string instance_to_json(const SlurpInstance& inst);
SlurpInstance instance_from_json(std::string_view text);
void write_instance(const SlurpInstance& inst, const std::string& path);
SlurpInstance read_instance(const std::string& path);

// partition,skip,m,bag columns for eyeballing in a spreadsheet.
std::string instance_to_csv(const SlurpInstance& inst);

}  // namespace qtn
