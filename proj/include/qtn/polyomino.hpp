#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qtn/nc_partition.hpp"

namespace qtn {

// Parallelogram polyomino: two monotone lattice paths from (0,0) to (w,h)
// written as E/N step strings, sharing no lattice point except the two
// endpoints. The lower path starts with E and ends with N; the upper path
// starts with N and ends with E.
struct Polyomino {
  int w = 0, h = 0;
  std::string lower, upper;

  bool operator==(const Polyomino&) const = default;

  static Polyomino from_paths(int w, int h, std::string lower, std::string upper);

  // x of the (y+1)-th N step, i.e. where the path climbs from row y to y+1.
  std::vector<int> lower_rise() const;
  std::vector<int> upper_rise() const;

  // y of the path while crossing column x (the height of its E step there).
  std::vector<int> lower_run() const;
  std::vector<int> upper_run() const;

  bool lower_contains(int x, int y) const;
  bool upper_contains(int x, int y) const;
};

// All polyominoes of width w and height h, ordered lexicographically by
// their serialized text. Requires w, h >= 1.
std::vector<Polyomino> enumerate_pp(int w, int h);

// Reflection across the diagonal; swaps the two paths. PP(w,h) -> PP(h,w).
Polyomino transpose(const Polyomino& p);

// "2,2:EENN/NNEE"
std::string serialize_pp(const Polyomino& p);
Polyomino parse_pp(std::string_view text);

// The cell-labelling bijection PP(w,h) -> NC(w+h-1, w): cells adjacent to
// the lower path are indexed 1..w+h-1 bottom-to-top, left-to-right; cells
// adjacent to the upper path are then visited in the same order and each
// receives the largest unused index whose cell lies in the same row or
// below. Labels grouped by upper row form the blocks (h of them).
NCPartition eta(const Polyomino& p);

}  // namespace qtn
