#include "desired/loadgen/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace desired::loadgen {

LoadPattern LoadPattern::constant(int n, double duration_s) {
  LoadPattern p;
  p.kind = PatternKind::kConstant;
  p.n = n;
  p.duration_s = duration_s;
  return p;
}

LoadPattern LoadPattern::sinusoid(double duration_s, double amplitude, double offset,
                                  double frequency, double phase) {
  LoadPattern p;
  p.kind = PatternKind::kSinusoid;
  p.amplitude = amplitude;
  p.offset = offset;
  p.frequency = frequency;
  p.phase = phase;
  p.duration_s = duration_s;
  return p;
}

void validate(const LoadPattern& p) {
  if (!(p.duration_s > 0.0)) throw PatternError("load pattern: duration must be positive");
  switch (p.kind) {
    case PatternKind::kConstant:
      if (p.n < 0) throw PatternError("load pattern: constant count must be >= 0");
      break;
    case PatternKind::kSinusoid:
      if (!std::isfinite(p.amplitude) || !std::isfinite(p.offset) || !std::isfinite(p.phase) ||
          !std::isfinite(p.frequency)) {
        throw PatternError("load pattern: sinusoid parameters must be finite");
      }
      break;
    case PatternKind::kFlashcrowd:
      throw PatternError("load pattern: flashcrowd is reserved and not implemented");
  }
}

int instances_at(double t, const LoadPattern& p) {
  if (t < 0.0 || t > p.duration_s) throw PatternError("instances_at: t outside the run");
  switch (p.kind) {
    case PatternKind::kConstant:
      return p.n;
    case PatternKind::kSinusoid: {
      const double arg = 2.0 * std::numbers::pi * p.frequency * t / p.duration_s + p.phase;
      const double v = std::round(p.offset + p.amplitude * std::sin(arg));
      return static_cast<int>(std::max(0.0, v));
    }
    case PatternKind::kFlashcrowd:
      break;
  }
  throw PatternError("instances_at: flashcrowd is reserved and not implemented");
}

ReconcilePlan reconcile(const std::vector<std::uint64_t>& running, int desired) {
  ReconcilePlan plan;
  const int have = static_cast<int>(running.size());
  desired = std::max(desired, 0);
  if (desired > have) {
    plan.start = desired - have;
  } else {
    for (int i = have - 1; i >= desired; --i) plan.stop.push_back(running[static_cast<std::size_t>(i)]);
  }
  return plan;
}

const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::kConstant: return "constant";
    case PatternKind::kSinusoid: return "sinusoid";
    case PatternKind::kFlashcrowd: return "flashcrowd";
  }
  return "?";
}

PatternKind pattern_kind_from_string(const std::string& s) {
  if (s == "constant") return PatternKind::kConstant;
  if (s == "sinusoid") return PatternKind::kSinusoid;
  if (s == "flashcrowd") return PatternKind::kFlashcrowd;
  throw PatternError("unknown load pattern kind: " + s);
}

}  // namespace desired::loadgen
