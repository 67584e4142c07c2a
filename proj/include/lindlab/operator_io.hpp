#pragma once

#include <iosfwd>

#include "lindlab/types.hpp"

namespace lindlab {

// Sparse-triplet text format:
//   # optional comment lines
//   <rows> <cols> <nnz>
//   <i> <j> <re> <im>      (nnz lines, 0-based indices, row-major order)
void write_triplets(std::ostream& out, const SpMat& m);
SpMat read_triplets(std::istream& in);

}  // namespace lindlab
