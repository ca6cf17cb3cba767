#include "genet/policy/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace genet::policy {

namespace {

constexpr char kMagic[8] = {'G', 'N', 'E', 'T', 'P', 'O', 'L', '\0'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_array(std::ostream& out, const std::vector<double>& xs) {
  put_u64(out, xs.size());
  for (double x : xs) put_u64(out, std::bit_cast<std::uint64_t>(x));
}

std::vector<double> get_array(std::istream& in, std::uint64_t limit) {
  const auto n = get_u64(in);
  if (n > limit) throw std::runtime_error("checkpoint: array length " + std::to_string(n) + " exceeds expected size");
  std::vector<double> xs(n);
  for (auto& x : xs) x = std::bit_cast<double>(get_u64(in));
  return xs;
}

void check_finite(const std::vector<double>& xs, const char* what) {
  for (double x : xs)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string("snapshot: non-finite value in ") + what);
}

}  // namespace

Architecture PolicySnapshot::critic_arch() const {
  Architecture a = arch;
  a.outputs = 1;
  return a;
}

void PolicySnapshot::validate() const {
  arch.validate();
  if (actor.size() != arch.param_count()) throw std::invalid_argument("snapshot: actor parameter count mismatch");
  if (critic.size() != critic_arch().param_count())
    throw std::invalid_argument("snapshot: critic parameter count mismatch");
  const std::size_t total = actor.size() + critic.size();
  if (!optimizer.m.empty() && (optimizer.m.size() != total || optimizer.v.size() != total))
    throw std::invalid_argument("snapshot: optimizer state size mismatch");
  check_finite(actor, "actor");
  check_finite(critic, "critic");
  check_finite(optimizer.m, "optimizer");
  check_finite(optimizer.v, "optimizer");
}

PolicySnapshot init_snapshot(UseCase use_case, Architecture arch, std::uint64_t seed) {
  PolicySnapshot s;
  s.use_case = use_case;
  s.arch = std::move(arch);
  s.actor = Mlp(s.arch).init(derive_seed(seed, {0x61}), 0.1);
  s.critic = Mlp(s.critic_arch()).init(derive_seed(seed, {0x63}), 1.0);
  s.validate();
  return s;
}

Eigen::VectorXd policy_probs(const PolicySnapshot& snap, std::span<const double> features) {
  Mlp net(snap.arch);
  MlpWorkspace ws;
  Eigen::VectorXd logits;
  net.forward(snap.actor, features, ws, logits);
  return softmax(logits);
}

std::size_t policy_act(const PolicySnapshot& snap, std::span<const double> features, Rng& rng, bool greedy) {
  const Eigen::VectorXd p = policy_probs(snap, features);
  if (greedy) {
    Eigen::Index best = 0;
    p.maxCoeff(&best);
    return static_cast<std::size_t>(best);
  }
  return sample_categorical(p, uniform01(rng));
}

void write_checkpoint(std::ostream& out, const PolicySnapshot& snap) {
  snap.validate();
  out.write(kMagic, sizeof kMagic);
  put_u32(out, PolicySnapshot::kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(snap.use_case));
  const auto w = snap.arch.widths();
  put_u64(out, w.size());
  for (auto x : w) put_u64(out, x);
  put_u64(out, snap.iteration);
  put_array(out, snap.actor);
  put_array(out, snap.critic);
  put_array(out, snap.optimizer.m);
  put_array(out, snap.optimizer.v);
  put_u64(out, snap.optimizer.step);
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

PolicySnapshot read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("checkpoint: bad magic");
  const auto version = get_u32(in);
  if (version != PolicySnapshot::kFormatVersion)
    throw std::runtime_error("checkpoint: unsupported format version " + std::to_string(version));
  PolicySnapshot s;
  const auto uc = get_u32(in);
  if (uc > 2) throw std::runtime_error("checkpoint: unknown use case tag");
  s.use_case = static_cast<UseCase>(uc);
  const auto layers = get_u64(in);
  if (layers < 2 || layers > 64) throw std::runtime_error("checkpoint: implausible layer count");
  std::vector<std::size_t> w(layers);
  for (auto& x : w) x = get_u64(in);
  s.arch.inputs = w.front();
  s.arch.outputs = w.back();
  s.arch.hidden.assign(w.begin() + 1, w.end() - 1);
  const std::uint64_t limit = 1ull << 28;
  s.iteration = get_u64(in);
  s.actor = get_array(in, limit);
  s.critic = get_array(in, limit);
  s.optimizer.m = get_array(in, limit);
  s.optimizer.v = get_array(in, limit);
  s.optimizer.step = get_u64(in);
  s.validate();
  return s;
}

void save_checkpoint(const std::string& path, const PolicySnapshot& snap) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  write_checkpoint(out, snap);
}

PolicySnapshot load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace genet::policy
