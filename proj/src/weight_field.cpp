#include "flatlpp/weight_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "flatlpp/rng.hpp"

namespace flatlpp {

namespace {
constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
}

std::size_t WeightField::index(int i, int j) const {
  return static_cast<std::size_t>(i - 1) * cols_ + static_cast<std::size_t>(j - 1);
}

bool WeightField::contains(int i, int j) const {
  if (i < 1 || j < 1 || i > rows_ || j > cols_) return false;
  return !triangle_ || i + j <= rows_ + 1;
}

int WeightField::triangle_n() const {
  if (!triangle_) throw std::logic_error("WeightField: not a triangle field");
  return rows_;
}

double WeightField::rate(int i, int j) const {
  if (!contains(i, j)) throw std::out_of_range("WeightField::rate: cell outside support");
  return rates_[index(i, j)];
}

double WeightField::weight(int i, int j) const {
  if (!contains(i, j)) throw std::out_of_range("WeightField::weight: cell outside support");
  return weights_[index(i, j)];
}

void WeightField::sample(WeightKind kind, std::uint64_t seed, std::uint64_t replica) {
  weights_.assign(rates_.size(), kAbsent);
  for (int i = 1; i <= rows_; ++i)
    for (int j = 1; j <= cols_; ++j) {
      if (!contains(i, j)) continue;
      CounterRng rng(seed, StreamTag::cell, replica,
                     (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j));
      const double r = rates_[index(i, j)];
      weights_[index(i, j)] =
          kind == WeightKind::exponential ? rng.exponential(r) : rng.inverse_gamma(r);
    }
}

WeightField WeightField::flat_triangle(std::span<const double> drift, WeightKind kind,
                                       std::uint64_t seed, std::uint64_t replica) {
  const int n = static_cast<int>(drift.size());
  if (n < 1) throw std::invalid_argument("WeightField: empty drift vector");
  WeightField f;
  f.rows_ = f.cols_ = n;
  f.triangle_ = true;
  f.rates_.assign(static_cast<std::size_t>(n) * n, kAbsent);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; i + j <= n + 1; ++j)
      f.rates_[f.index(i, j)] = drift[static_cast<std::size_t>(i - 1)] +
                                drift[static_cast<std::size_t>(n - j)];
  f.sample(kind, seed, replica);
  return f;
}

WeightField WeightField::rectangle(int rows, int cols, std::span<const double> row_rates,
                                   WeightKind kind, std::uint64_t seed,
                                   std::uint64_t replica) {
  if (rows < 1 || cols < 1 || static_cast<int>(row_rates.size()) != rows)
    throw std::invalid_argument("WeightField: bad rectangle shape");
  WeightField f;
  f.rows_ = rows;
  f.cols_ = cols;
  f.triangle_ = false;
  f.rates_.resize(static_cast<std::size_t>(rows) * cols);
  for (int i = 1; i <= rows; ++i)
    for (int j = 1; j <= cols; ++j)
      f.rates_[f.index(i, j)] = row_rates[static_cast<std::size_t>(i - 1)];
  f.sample(kind, seed, replica);
  return f;
}

WeightField WeightField::from_values(int rows, int cols, bool triangle,
                                     std::vector<double> rates,
                                     std::vector<double> weights) {
  if (rows < 1 || cols < 1 ||
      rates.size() != static_cast<std::size_t>(rows) * cols ||
      weights.size() != rates.size())
    throw std::invalid_argument("WeightField: bad explicit data shape");
  WeightField f;
  f.rows_ = rows;
  f.cols_ = cols;
  f.triangle_ = triangle;
  f.rates_ = std::move(rates);
  f.weights_ = std::move(weights);
  return f;
}

void WeightField::dump_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("WeightField: cannot open " + path);
  out << "i,j,rate,weight\n";
  char line[96];
  for (int i = 1; i <= rows_; ++i)
    for (int j = 1; j <= cols_; ++j) {
      if (!contains(i, j)) continue;
      std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g\n", i, j, rates_[index(i, j)],
                    weights_[index(i, j)]);
      out << line;
    }
  if (!out) throw std::runtime_error("WeightField: failed writing " + path);
}

WeightField WeightField::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("WeightField: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "i,j,rate,weight")
    throw std::runtime_error("WeightField: unexpected header in " + path);
  struct Cell {
    int i, j;
    double rate, weight;
  };
  std::vector<Cell> cells;
  int max_i = 0, max_j = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Cell c;
    char comma;
    std::istringstream ss(line);
    if (!(ss >> c.i >> comma >> c.j >> comma >> c.rate >> comma >> c.weight))
      throw std::runtime_error("WeightField: malformed line in " + path);
    if (c.i < 1 || c.j < 1) throw std::runtime_error("WeightField: bad cell index");
    max_i = std::max(max_i, c.i);
    max_j = std::max(max_j, c.j);
    cells.push_back(c);
  }
  if (cells.empty()) throw std::runtime_error("WeightField: no cells in " + path);
  const bool tri = max_i == max_j &&
                   cells.size() == static_cast<std::size_t>(max_i) * (max_i + 1) / 2;
  std::vector<double> rates(static_cast<std::size_t>(max_i) * max_j, kAbsent);
  std::vector<double> weights(rates.size(), kAbsent);
  for (const auto& c : cells) {
    const std::size_t k =
        static_cast<std::size_t>(c.i - 1) * max_j + static_cast<std::size_t>(c.j - 1);
    rates[k] = c.rate;
    weights[k] = c.weight;
  }
  return from_values(max_i, max_j, tri, std::move(rates), std::move(weights));
}

}  // namespace flatlpp
