#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "desired/agent/qnetwork.hpp"

namespace desired::agent {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text layout:
//   desired-qnet 1
//   <layer count + 1> <size0> <size1> ...
//   one line per layer: weights row-major then biases, %.17g
void write_snapshot(std::ostream& out, const QNetwork& net);
QNetwork read_snapshot(std::istream& in);
void save_snapshot(const std::string& path, const QNetwork& net);
QNetwork load_snapshot(const std::string& path);

/// alpha * avg_prev + (1 - alpha) * next, elementwise. Throws ShapeError on
/// mismatched architectures.
QNetwork ensemble_average(const QNetwork& avg_prev, const QNetwork& next, double alpha);

}  // namespace desired::agent
