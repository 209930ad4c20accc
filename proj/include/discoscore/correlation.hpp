#pragma once

#include <span>

namespace discoscore {

// Product-moment correlation. Throws ShapeError on unequal or too short
// inputs and DomainError when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Kendall tau-b, computed with Knight's O(n log n) merge-sort algorithm.
// Throws DomainError when either side is entirely tied.
double kendall(std::span<const double> x, std::span<const double> y);

}  // namespace discoscore
