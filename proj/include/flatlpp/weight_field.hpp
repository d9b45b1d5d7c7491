// Arrays of independent random weights on a rectangle or on the staircase
// triangle {(i, j) : i + j <= n + 1}, with per-cell rates and per-cell
// counter-RNG substreams so a field is reproducible independently of the
// order in which cells are touched.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flatlpp {

enum class WeightKind { exponential, inverse_gamma };

class WeightField {
 public:
  // Triangle with cell rate a_i + a_{n-j+1}; for inverse-gamma weights the
  // rate is used as the shape parameter.
  static WeightField flat_triangle(std::span<const double> drift, WeightKind kind,
                                   std::uint64_t seed, std::uint64_t replica);
  // rows x cols rectangle with rate row_rates[i-1] for every cell of row i.
  static WeightField rectangle(int rows, int cols, std::span<const double> row_rates,
                               WeightKind kind, std::uint64_t seed,
                               std::uint64_t replica);
  // Explicit data, row-major with NaN in absent cells.
  static WeightField from_values(int rows, int cols, bool triangle,
                                 std::vector<double> rates, std::vector<double> weights);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool triangle() const { return triangle_; }
  int triangle_n() const;  // rows() for a triangle field; throws otherwise

  bool contains(int i, int j) const;  // 1-based
  double rate(int i, int j) const;
  double weight(int i, int j) const;

  // One line per present cell: "i,j,rate,weight".
  void dump_csv(const std::string& path) const;
  static WeightField load_csv(const std::string& path);

 private:
  WeightField() = default;
  void sample(WeightKind kind, std::uint64_t seed, std::uint64_t replica);
  std::size_t index(int i, int j) const;

  int rows_ = 0;
  int cols_ = 0;
  bool triangle_ = false;
  std::vector<double> rates_;
  std::vector<double> weights_;
};

}  // namespace flatlpp
