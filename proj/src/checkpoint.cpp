#include "pkin/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");
static_assert(sizeof(double) == 8, "checkpoint format requires 64-bit IEEE");

namespace pkin {

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw io_error(std::string("truncated checkpoint file (") + what + ")");
  return v;
}

void put_array(std::ofstream& out, const ArrayXX& a) {
  // first index (row) outermost
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) put(out, a(i, j));
}

void get_array(std::ifstream& in, ArrayXX& a, const char* what) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      a(i, j) = get<double>(in, what);
}

// phi bytes go [cell][radial][angular]; the in-memory column is
// qi + n_r*qj (angular outer), so the loops reorder explicitly.
void put_phi(std::ofstream& out, const ArrayXX& phi, int n_r, int n_a) {
  for (Eigen::Index c = 0; c < phi.rows(); ++c)
    for (int qi = 0; qi < n_r; ++qi)
      for (int qj = 0; qj < n_a; ++qj) put(out, phi(c, qi + n_r * qj));
}

void get_phi(std::ifstream& in, ArrayXX& phi, int n_r, int n_a) {
  for (Eigen::Index c = 0; c < phi.rows(); ++c)
    for (int qi = 0; qi < n_r; ++qi)
      for (int qj = 0; qj < n_a; ++qj)
        phi(c, qi + n_r * qj) = get<double>(in, "configuration density");
}

constexpr char kMagic[4] = {'P', 'K', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.config_text.size()));
  out.write(ck.config_text.data(),
            static_cast<std::streamsize>(ck.config_text.size()));
  put<std::int32_t>(out, ck.n_x);
  put<std::int32_t>(out, ck.n_y);
  put<std::int32_t>(out, ck.n_r);
  put<std::int32_t>(out, ck.n_a);
  put<double>(out, ck.time);
  put<std::uint64_t>(out, ck.step);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.audit.size()));
  for (double x : ck.audit) put(out, x);
  put_array(out, ck.u);
  put_array(out, ck.v);
  put_array(out, ck.p);
  put_array(out, ck.theta);
  put_phi(out, ck.phi, ck.n_r, ck.n_a);
  out.flush();
  if (!out) throw io_error("write failed for checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint: " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw io_error("not a checkpoint file (bad magic): " + path);
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion)
    throw io_error("unsupported checkpoint version " +
                   std::to_string(version) + " in " + path);
  Checkpoint ck;
  const auto clen = get<std::uint32_t>(in, "config length");
  ck.config_text.resize(clen);
  in.read(ck.config_text.data(), clen);
  if (!in) throw io_error("truncated checkpoint file (config text)");
  ck.n_x = get<std::int32_t>(in, "n_x");
  ck.n_y = get<std::int32_t>(in, "n_y");
  ck.n_r = get<std::int32_t>(in, "n_r");
  ck.n_a = get<std::int32_t>(in, "n_a");
  if (ck.n_x < 1 || ck.n_y < 1 || ck.n_r < 1 || ck.n_a < 1 ||
      ck.n_x > 100000 || ck.n_y > 100000 || ck.n_r > 100000 ||
      ck.n_a > 100000)
    throw io_error("checkpoint grid dimensions are implausible");
  ck.time = get<double>(in, "time");
  ck.step = get<std::uint64_t>(in, "step");
  const auto acount = get<std::uint32_t>(in, "audit count");
  if (acount > 4096) throw io_error("checkpoint audit block is implausible");
  ck.audit.resize(acount);
  for (auto& x : ck.audit) x = get<double>(in, "audit values");
  ck.u.resize(ck.n_x + 1, ck.n_y);
  ck.v.resize(ck.n_x, ck.n_y + 1);
  ck.p.resize(ck.n_x, ck.n_y);
  ck.theta.resize(ck.n_x, ck.n_y);
  ck.phi.resize(static_cast<Eigen::Index>(ck.n_x) * ck.n_y,
                static_cast<Eigen::Index>(ck.n_r) * ck.n_a);
  get_array(in, ck.u, "u field");
  get_array(in, ck.v, "v field");
  get_array(in, ck.p, "pressure");
  get_array(in, ck.theta, "temperature");
  get_phi(in, ck.phi, ck.n_r, ck.n_a);
  return ck;
}

}  // namespace pkin
