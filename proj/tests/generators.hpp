#pragma once

#include <random>
#include <string>

#include "killing/geometry.hpp"

namespace testgen {

// Random smooth canonical data on [-1, 1]^2 with lambda bounded away from 0.
struct DataGenerator {
  std::mt19937 rng;

  explicit DataGenerator(unsigned seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  std::string c(double lo = -1.0, double hi = 1.0) { return killing::format_constant(uniform(lo, hi)); }

  killing::KillingData make() {
    const std::string lambda = "exp(" + c(-0.5, 0.5) + "*x + " + c(-0.5, 0.5) + "*y + " + c(-0.3, 0.3) +
                               "*x*y + " + c(-0.3, 0.3) + "*sin(" + c(0.5, 2) + "*x))";
    const std::string a = c() + "*y + " + c() + "*x^2 + " + c() + "*cos(" + c() + "*x + y)";
    const std::string b = c() + "*x + " + c() + "*x*y^2 + " + c() + "*sin(y - " + c() + "*x)";
    return killing::KillingData::from_text(lambda, a, b, killing::Rect{}, "random");
  }

  // Height function for a graph over [-1, 1]^2 with moderate slopes.
  std::string height() {
    return c(-0.5, 0.5) + "*x^2 + " + c(-0.5, 0.5) + "*x*y + " + c(-0.5, 0.5) + "*y^2 + " + c(-0.5, 0.5) +
           "*sin(x + " + c() + "*y) + " + c(-0.5, 0.5) + "*x";
  }

  killing::Point3 point() { return killing::Point3(uniform(-0.7, 0.7), uniform(-0.7, 0.7), uniform(-3, 3)); }
  killing::Vec3 vector() { return killing::Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)); }
};

}  // namespace testgen
