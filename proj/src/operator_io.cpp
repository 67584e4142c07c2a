#include "lindlab/operator_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lindlab {

void write_triplets(std::ostream& out, const SpMat& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  const auto old_precision = out.precision(17);
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SpMat::InnerIterator it(m, r); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
  out.precision(old_precision);
}

SpMat read_triplets(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw DomainError("triplet stream: missing header");
  std::int64_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      throw DomainError("triplet stream: malformed header '" + line + "'");
  }
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(nnz));
  for (std::int64_t k = 0; k < nnz; ++k) {
    if (!next_line()) throw DomainError("triplet stream: expected " + std::to_string(nnz) + " entries");
    std::istringstream row(line);
    std::int64_t i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(row >> i >> j >> re >> im)) throw DomainError("triplet stream: malformed entry '" + line + "'");
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw DomainError("triplet stream: index out of range in '" + line + "'");
    trip.emplace_back(i, j, cplx(re, im));
  }
  SpMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace lindlab
