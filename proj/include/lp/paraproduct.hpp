#pragma once

#include <span>

#include "lp/block_sequence.hpp"
#include "lp/field.hpp"
#include "lp/partition.hpp"

namespace lp {

// Low-high paraproduct sum_{i<j-1} Delta_i f Delta_j g. Products are exact:
// if the combined band does not fit the grid the computation moves to a
// zero-padded grid and the result lives there.
Field paraproduct(const Field& f, const Field& g, const DyadicPartition& part);

// resonant part sum_{|i-j|<=1} Delta_i f Delta_j g
Field resonant(const Field& f, const Field& g, const DyadicPartition& part);

// pair operator {f^{<j-shift} g^j}_j on sequences; the result inherits g's
// regularity tag
BlockSequence pair_op(const BlockSequence& f, const BlockSequence& g, int shift,
                      const DyadicPartition& part);

// left-nested iteration (((f1,f2),f3),...)
BlockSequence multi_op(std::span<const BlockSequence> seqs, int shift,
                       const DyadicPartition& part);

// moment-weighted paraproduct sum_j Delta^l_{<j-2} g Delta_{j-1} h, l != 0
Field mpl(const Field& g, const Field& h, const MultiIndex& l, const DyadicPartition& part);

}  // namespace lp
