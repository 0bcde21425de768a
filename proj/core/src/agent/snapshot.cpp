#include "desired/agent/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace desired::agent {

namespace {
constexpr const char* kMagic = "desired-qnet";
constexpr int kVersion = 1;
}  // namespace

void write_snapshot(std::ostream& out, const QNetwork& net) {
  out << kMagic << ' ' << kVersion << '\n' << net.sizes().size();
  for (auto s : net.sizes()) out << ' ' << s;
  out << '\n';
  const auto p = net.parameters();
  char buf[32];
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const std::size_t begin = net.weight_offset(l);
    const std::size_t end = net.bias_offset(l) + net.sizes()[l + 1];
    for (std::size_t i = begin; i < end; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      out << (i == begin ? "" : " ") << buf;
    }
    out << '\n';
  }
}

QNetwork read_snapshot(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw SnapshotError("snapshot: bad header");
  if (version != kVersion) throw SnapshotError("snapshot: unsupported version");
  std::size_t n = 0;
  if (!(in >> n) || n < 2 || n > 64) throw SnapshotError("snapshot: bad layer count");
  std::vector<std::size_t> sizes(n);
  for (auto& s : sizes) {
    if (!(in >> s)) throw SnapshotError("snapshot: truncated sizes");
  }
  QNetwork net(sizes);
  auto p = net.parameters();
  for (auto& v : p) {
    std::string tok;
    if (!(in >> tok)) throw SnapshotError("snapshot: truncated parameters");
    try {
      std::size_t used = 0;
      v = std::stod(tok, &used);
      if (used != tok.size()) throw SnapshotError("snapshot: bad number " + tok);
    } catch (const std::logic_error&) {
      throw SnapshotError("snapshot: bad number " + tok);
    }
  }
  return net;
}

void save_snapshot(const std::string& path, const QNetwork& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot write " + path);
  write_snapshot(out, net);
}

QNetwork load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot read " + path);
  return read_snapshot(in);
}

QNetwork ensemble_average(const QNetwork& avg_prev, const QNetwork& next, double alpha) {
  if (!avg_prev.same_shape(next)) throw ShapeError("ensemble_average: shape mismatch");
  QNetwork out = avg_prev;
  auto o = out.parameters();
  const auto b = next.parameters();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = alpha * o[i] + (1.0 - alpha) * b[i];
  return out;
}

}  // namespace desired::agent
