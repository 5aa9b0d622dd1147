#ifndef SIGMA_IO_HPP_
#define SIGMA_IO_HPP_

// Persistence: sample files (CSV and the "H22S" columnar binary format),
// report writing, and the reproducibility manifest.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigma/sampler.hpp"

namespace sigma {

// "H22S" columnar layout, little-endian throughout:
//   bytes 0..3   magic "H22S"
//   3 x uint64   chains, kept per chain, vertices
//   doubles      u column, chain-major then sample then vertex
//   doubles      s column, same order

inline void write_samples_binary(const std::string& path, const SampleBatch& batch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write("H22S", 4);
  auto put_u64 = [&](std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 8);
  };
  auto put_f64 = [&](double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(v);
  };
  put_u64(static_cast<std::uint64_t>(batch.chains));
  put_u64(static_cast<std::uint64_t>(batch.kept_per_chain));
  put_u64(static_cast<std::uint64_t>(batch.n_vertices));
  for (const auto& cfg : batch.configs)
    for (double v : cfg.u) put_f64(v);
  for (const auto& cfg : batch.configs)
    for (double v : cfg.s) put_f64(v);
}

inline SampleBatch read_samples_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "H22S", 4) != 0)
    throw std::runtime_error("bad magic in sample file: " + path);
  auto get_u64 = [&] {
    char buf[8];
    in.read(buf, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
  };
  auto get_f64 = [&] {
    std::uint64_t v = get_u64();
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  };
  SampleBatch batch;
  batch.chains = static_cast<int>(get_u64());
  batch.kept_per_chain = static_cast<long>(get_u64());
  batch.n_vertices = static_cast<std::size_t>(get_u64());
  std::size_t total = static_cast<std::size_t>(batch.chains) * batch.kept_per_chain;
  batch.configs.resize(total);
  for (auto& cfg : batch.configs) {
    cfg.u.resize(batch.n_vertices);
    for (auto& v : cfg.u) v = get_f64();
  }
  for (auto& cfg : batch.configs) {
    cfg.s.resize(batch.n_vertices);
    for (auto& v : cfg.s) v = get_f64();
  }
  if (!in) throw std::runtime_error("truncated sample file: " + path);
  return batch;
}

inline void write_samples_csv(const std::string& path, const SampleBatch& batch) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "chain,step,vertex,u,s\n";
  out.precision(17);
  for (int c = 0; c < batch.chains; ++c)
    for (long k = 0; k < batch.kept_per_chain; ++k) {
      const FieldConfig& cfg = batch.at(c, k);
      for (std::size_t v = 0; v < batch.n_vertices; ++v)
        out << c << "," << k << "," << v << "," << cfg.u[v] << "," << cfg.s[v] << "\n";
    }
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

/// Reproducibility manifest: digest of the effective configuration plus
/// seeds; anyone with the manifest can rerun bit for bit.
inline nlohmann::json make_manifest(const nlohmann::json& config, std::uint64_t seed) {
  nlohmann::json m;
  m["schema"] = "h22_manifest_v1";
  m["config"] = config;
  m["config_digest"] = fnv1a_hex(config.dump());
  m["seed"] = seed;
  return m;
}

}  // namespace sigma

#endif  // SIGMA_IO_HPP_
