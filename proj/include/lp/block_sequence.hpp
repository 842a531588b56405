#pragma once

#include <string>
#include <vector>

#include "lp/field.hpp"

namespace lp {

// An element of the dyadic sequence space: band-limited fields f^0, f^1, ...
// with spectrum of f^j supported in the ball of radius ball * 2^j, plus a
// regularity tag used by norm computations and the pair operators.
struct BlockSequence {
  std::vector<Field> blocks;
  double alpha = 0.0;  // regularity tag; NaN-free positive value required by pair ops
  double ball = 0.0;   // support ball multiplier
  std::string provenance;

  int size() const { return static_cast<int>(blocks.size()); }
  const Field& operator[](int j) const { return blocks[static_cast<std::size_t>(j)]; }

  // sup-norm of block j on the grid; zero fields report exactly zero
  double block_norm(int j) const { return blocks[static_cast<std::size_t>(j)].max_abs(); }
};

// sum of all blocks
Field sum_blocks(const BlockSequence& seq);

}  // namespace lp
