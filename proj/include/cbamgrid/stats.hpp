#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cbamgrid::stats {

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // population variance

// Pearson correlation with the same 1e-12 population-variance guard as the
// differentiable version: degenerate inputs give 0.
double pearson(std::span<const double> a, std::span<const double> b);

double rmse(std::span<const double> pred, std::span<const double> truth);
double mae(std::span<const double> pred, std::span<const double> truth);

// Ordinary least squares slope of y on x (single regressor with intercept).
double ols_slope(std::span<const double> x, std::span<const double> y);

// Ranks with average-rank tie handling, 1-based.
std::vector<double> average_ranks(std::span<const double> v);

}  // namespace cbamgrid::stats
