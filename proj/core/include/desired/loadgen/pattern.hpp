#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace desired::loadgen {

enum class PatternKind : std::uint8_t { kConstant, kSinusoid, kFlashcrowd };

struct LoadPattern {
  PatternKind kind = PatternKind::kConstant;
  int n = 10;
  double amplitude = 15.0;
  double frequency = 1.0;  // cycles per run
  double phase = 25.0;     // radians
  double offset = 25.0;
  double duration_s = 3600.0;

  static LoadPattern constant(int n, double duration_s);
  static LoadPattern sinusoid(double duration_s, double amplitude = 15.0, double offset = 25.0,
                              double frequency = 1.0, double phase = 25.0);
};

class PatternError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const LoadPattern& p);

/// Client count at second \p t. Throws PatternError for t outside
/// [0, duration] or a flashcrowd pattern.
int instances_at(double t, const LoadPattern& p);

struct ReconcilePlan {
  int start = 0;
  // Instance ids to stop, most recently started first.
  std::vector<std::uint64_t> stop;
  bool empty() const noexcept { return start == 0 && stop.empty(); }
};

/// \p running lists instance ids in start order.
ReconcilePlan reconcile(const std::vector<std::uint64_t>& running, int desired);

const char* to_string(PatternKind k);
PatternKind pattern_kind_from_string(const std::string& s);

}  // namespace desired::loadgen
